//! Dimensions attached to the block map: the self-similar equation for the
//! domain `D(g)`, the closed form for the range `E(g)`, and box counting on
//! the graph of `g`.

use serde::Serialize;
use std::collections::HashSet;

use crate::block_map::BlockAlphabet;
use crate::exec::{self, Strategy};

/// Enumeration cap used when `CANTOR_LAB_BUDGET` is unset.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

pub const BUDGET_ENV: &str = "CANTOR_LAB_BUDGET";

const BRACKET_WIDTH: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DimensionError {
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("residual {residual:e} exceeds tolerance {tol:e}")]
    ToleranceUnreachable { residual: f64, tol: f64 },
    #[error("depth {m} needs {needed} enumerations, budget is {budget}")]
    BudgetExceeded { m: usize, needed: u128, budget: u64 },
    #[error("depth range {m_min}..={m_max} is empty or starts below 1")]
    BadRange { m_min: usize, m_max: usize },
}

impl DimensionError {
    pub fn name(&self) -> &'static str {
        match self {
            DimensionError::BadTolerance(_) => "BadTolerance",
            DimensionError::ToleranceUnreachable { .. } => "ToleranceUnreachable",
            DimensionError::BudgetExceeded { .. } => "BudgetExceeded",
            DimensionError::BadRange { .. } => "BadRange",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountRecord {
    pub depth: usize,
    pub box_count: u64,
    /// `q`, the grid at depth `m` has side `q^-m`.
    pub base: u32,
    pub fitted_slope: f64,
}

impl BoxCountRecord {
    pub fn log_inv_side(&self) -> f64 {
        self.depth as f64 * f64::from(self.base).ln()
    }

    pub fn log_count(&self) -> f64 {
        (self.box_count as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphDimension {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub records: Vec<BoxCountRecord>,
}

/// Reads `CANTOR_LAB_BUDGET`, falling back to [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// `h(α) = Σ_{p∈Θ} q^{-pα} - 1`, strictly decreasing.
pub fn moran_residual(a: &BlockAlphabet, alpha: f64) -> f64 {
    let ln_q = f64::from(a.q()).ln();
    a.theta()
        .iter()
        .map(|&p| (-f64::from(p) * alpha * ln_q).exp())
        .sum::<f64>()
        - 1.0
}

fn moran_slope(a: &BlockAlphabet, alpha: f64) -> f64 {
    let ln_q = f64::from(a.q()).ln();
    -ln_q
        * a.theta()
            .iter()
            .map(|&p| f64::from(p) * (-f64::from(p) * alpha * ln_q).exp())
            .sum::<f64>()
}

/// Root of `h` on `(0, 1]`: bisection down to a 1e-14 bracket, then Newton
/// steps kept inside the bracket.
pub fn dimension_dg(a: &BlockAlphabet, tol: f64) -> Result<DimensionEstimate, DimensionError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(DimensionError::BadTolerance(tol));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iterations = 0;
    while hi - lo > BRACKET_WIDTH && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if moran_residual(a, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut value = 0.5 * (lo + hi);
    for _ in 0..4 {
        let next = value - moran_residual(a, value) / moran_slope(a, value);
        iterations += 1;
        if !(lo..=hi).contains(&next) || next == value {
            break;
        }
        value = next;
    }
    let residual = moran_residual(a, value).abs();
    if residual > tol {
        return Err(DimensionError::ToleranceUnreachable { residual, tol });
    }
    Ok(DimensionEstimate {
        value,
        residual,
        iterations,
        bracket: (lo, hi),
    })
}

/// `log_q |Θ|`.
pub fn dimension_eg(a: &BlockAlphabet) -> f64 {
    f64::from(a.tau()).ln() / f64::from(a.q()).ln()
}

/// `(τ / q^α)^m`, the covering sum factor at depth `m`.
pub fn covering_factor(a: &BlockAlphabet, alpha: f64, m: usize) -> f64 {
    (f64::from(a.tau()) / f64::from(a.q()).powf(alpha)).powi(m as i32)
}

fn check_budget(branching: u32, m: usize, budget: u64, q: u32) -> Result<(), DimensionError> {
    let needed = u128::from(branching)
        .checked_pow(m as u32)
        .unwrap_or(u128::MAX);
    // Square indices pack (x, y) into q^{2m}, which must fit in a u128.
    let fits = u128::from(q).checked_pow(2 * m as u32).is_some();
    if needed > u128::from(budget) || !fits {
        return Err(DimensionError::BudgetExceeded { m, needed, budget });
    }
    Ok(())
}

/// Counts the squares of side `q^-m` that meet the graph of `g` restricted
/// to words of `m` blocks. The x index is the first `m` digits of the
/// expanded word, the y index is the image word itself.
pub fn box_count_graph(
    a: &BlockAlphabet,
    m: usize,
    budget: u64,
    strategy: Strategy,
) -> Result<BoxCountRecord, DimensionError> {
    if m == 0 {
        return Err(DimensionError::BadRange { m_min: m, m_max: m });
    }
    check_budget(a.tau(), m, budget, a.q())?;
    let q = u128::from(a.q());
    let side = q.pow(m as u32);
    let theta = a.theta();
    let squares = exec::map_reduce(
        strategy,
        &theta,
        |&first| {
            let mut seen = HashSet::new();
            let mut alphas = vec![first];
            enumerate(&theta, m, &mut alphas, &mut |alphas| {
                let mut x = 0u128;
                let mut taken = 0;
                'outer: for &al in alphas.iter() {
                    for _ in 1..al {
                        if taken == m {
                            break 'outer;
                        }
                        x = x * q + u128::from(a.u());
                        taken += 1;
                    }
                    if taken == m {
                        break;
                    }
                    x = x * q + u128::from(al);
                    taken += 1;
                }
                let y = alphas
                    .iter()
                    .fold(0u128, |acc, &al| acc * q + u128::from(al));
                seen.insert(x * side + y);
            });
            seen
        },
        HashSet::new,
        merge_sets,
    );
    let box_count = squares.len() as u64;
    let record = BoxCountRecord {
        depth: m,
        box_count,
        base: a.q(),
        fitted_slope: 0.0,
    };
    Ok(BoxCountRecord {
        fitted_slope: record.log_count() / record.log_inv_side(),
        ..record
    })
}

/// Calibration: the squares of side `q^-m` meeting the diagonal `y = x`,
/// enumerated over all `m`-digit x prefixes.
pub fn box_count_identity(
    q: u32,
    m: usize,
    budget: u64,
    strategy: Strategy,
) -> Result<BoxCountRecord, DimensionError> {
    if m == 0 {
        return Err(DimensionError::BadRange { m_min: m, m_max: m });
    }
    check_budget(q, m, budget, q)?;
    let side = u128::from(q).pow(m as u32);
    let digits: Vec<u32> = (0..q).collect();
    let squares = exec::map_reduce(
        strategy,
        &digits,
        |&first| {
            let mut seen = HashSet::new();
            let mut prefix = vec![first];
            enumerate(&digits, m, &mut prefix, &mut |d| {
                let x = d
                    .iter()
                    .fold(0u128, |acc, &v| acc * u128::from(q) + u128::from(v));
                seen.insert(x * side + x);
            });
            seen
        },
        HashSet::new,
        merge_sets,
    );
    let record = BoxCountRecord {
        depth: m,
        box_count: squares.len() as u64,
        base: q,
        fitted_slope: 0.0,
    };
    Ok(BoxCountRecord {
        fitted_slope: record.log_count() / record.log_inv_side(),
        ..record
    })
}

/// Least-squares slope of `log N` against `log q^m` over `m_min..=m_max`.
pub fn graph_dimension_estimate(
    a: &BlockAlphabet,
    m_min: usize,
    m_max: usize,
    budget: u64,
    strategy: Strategy,
) -> Result<GraphDimension, DimensionError> {
    fit_records(m_min, m_max, |m| box_count_graph(a, m, budget, strategy))
}

/// [`graph_dimension_estimate`] for the diagonal.
pub fn identity_dimension_estimate(
    q: u32,
    m_min: usize,
    m_max: usize,
    budget: u64,
    strategy: Strategy,
) -> Result<GraphDimension, DimensionError> {
    fit_records(m_min, m_max, |m| box_count_identity(q, m, budget, strategy))
}

fn fit_records(
    m_min: usize,
    m_max: usize,
    count: impl Fn(usize) -> Result<BoxCountRecord, DimensionError>,
) -> Result<GraphDimension, DimensionError> {
    if m_min == 0 || m_min >= m_max {
        return Err(DimensionError::BadRange { m_min, m_max });
    }
    let mut records = (m_min..=m_max).map(count).collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<f64> = records.iter().map(BoxCountRecord::log_inv_side).collect();
    let ys: Vec<f64> = records.iter().map(BoxCountRecord::log_count).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (slope * x + intercept))
        .collect();
    for r in &mut records {
        r.fitted_slope = slope;
    }
    Ok(GraphDimension {
        slope,
        intercept,
        residuals,
        records,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn merge_sets(mut a: HashSet<u128>, b: HashSet<u128>) -> HashSet<u128> {
    if a.len() < b.len() {
        return merge_sets(b, a);
    }
    a.extend(b);
    a
}

/// Depth-first walk over every extension of `prefix` to length `len`.
fn enumerate(alphabet: &[u32], len: usize, prefix: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if prefix.len() == len {
        visit(prefix);
        return;
    }
    for &d in alphabet {
        prefix.push(d);
        enumerate(alphabet, len, prefix, visit);
        prefix.pop();
    }
}
