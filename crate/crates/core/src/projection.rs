//! The digit projection `f`: a Cantor word over `Q` read as a word in a
//! constant base `q >= q_n`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::codec::{CantorDigits, CodecError, TailKind};
use crate::rational::{inv_pow, Rational};
use crate::schedule::{BaseSchedule, Boundedness, ScheduleError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProjectionError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("word is defined over {found}, expected {expected}")]
    ScheduleMismatch { expected: String, found: String },
    #[error("f is not defined on the max-tail representation {0}")]
    NonCanonical(String),
    #[error("no two-sided jump at the endpoint {0}")]
    Endpoint(String),
    #[error("inputs are equal")]
    EqualInputs,
    #[error("inputs are not ordered: first value exceeds second")]
    NotOrdered,
    #[error("shift {k} exceeds word length {len}")]
    ShiftTooLong { k: usize, len: usize },
}

impl ProjectionError {
    pub fn name(&self) -> &'static str {
        match self {
            ProjectionError::Schedule(e) => e.name(),
            ProjectionError::Codec(e) => e.name(),
            ProjectionError::ScheduleMismatch { .. } => "ScheduleMismatch",
            ProjectionError::NonCanonical(_) => "NonCanonical",
            ProjectionError::Endpoint(_) => "Endpoint",
            ProjectionError::EqualInputs => "EqualInputs",
            ProjectionError::NotOrdered => "NotOrdered",
            ProjectionError::ShiftTooLong { .. } => "ShiftTooLong",
        }
    }
}

/// A schedule together with the target base `q`, with `q_n <= q` checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionContext {
    schedule: BaseSchedule,
    q: u32,
    class: Boundedness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpReport {
    pub position: usize,
    pub jump: Rational,
    pub lower_bound: Rational,
    pub upper_bound: Rational,
    /// The bounds are only guaranteed when `q_j < q` for every `j > position`.
    pub bounds_asserted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityWitness {
    pub first_difference: usize,
    pub gap: Rational,
    pub lower_bound: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    DerivativeOne,
    Singular,
    NonDifferentiable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeProbe {
    pub ranks: Vec<usize>,
    /// `μ_f(Δ_n) / |Δ_n|` over the rank-`n` cylinders containing the point.
    pub ratios: Vec<Rational>,
    /// `(f(x_m) - f(x_0)) / (x_m - x_0) = q_1...q_m / q^m` for a single-digit
    /// perturbation at rank `m`.
    pub secant_ratios: Vec<Rational>,
    pub verdict: Verdict,
}

impl ProjectionContext {
    pub fn new(schedule: BaseSchedule, q: u32) -> Result<Self, ProjectionError> {
        let class = schedule.is_bounded_by(q, 1)?;
        Ok(ProjectionContext { schedule, q, class })
    }

    pub fn schedule(&self) -> &BaseSchedule {
        &self.schedule
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn class(&self) -> Boundedness {
        self.class
    }

    fn check_schedule(&self, d: &CantorDigits) -> Result<(), ProjectionError> {
        if d.schedule() != &self.schedule {
            return Err(ProjectionError::ScheduleMismatch {
                expected: self.schedule.to_string(),
                found: d.schedule().to_string(),
            });
        }
        Ok(())
    }

    /// `Σ_{j>n} (q_j - 1) / q^j` in closed form.
    pub fn tail_mass(&self, n: usize) -> Rational {
        tail_mass(&self.schedule, self.q, n)
    }

    /// `f(1) = Σ (q_n - 1) / q^n`.
    pub fn f_one(&self) -> Rational {
        self.tail_mass(0)
    }

    /// Digit-level reading of any word, max tails included.
    fn read_digits(&self, d: &CantorDigits) -> Rational {
        let mut value = Rational::zero();
        for (i, &e) in d.digits().iter().enumerate() {
            value += Rational::from_integer(BigInt::from(e)) * inv_pow(self.q, i + 1);
        }
        if d.tail() == TailKind::Max {
            value += self.tail_mass(d.len());
        }
        value
    }

    /// `f(x)` on canonical words. Max-tail words other than the word for 1
    /// are rejected: `f` disagrees on the two representations of a
    /// Q-rational point whenever some `q_n < q`.
    pub fn eval_f(&self, d: &CantorDigits) -> Result<Rational, ProjectionError> {
        self.check_schedule(d)?;
        if d.tail() == TailKind::Max && !d.is_one() {
            return Err(ProjectionError::NonCanonical(d.to_string()));
        }
        Ok(self.read_digits(d))
    }

    /// Jump `f(x_0+) - f(x_0-) = 1/q^n - Σ_{j>n} (q_j - 1)/q^j` at the
    /// Q-rational point whose canonical word ends at position `n`.
    pub fn jump_at(&self, d: &CantorDigits) -> Result<JumpReport, ProjectionError> {
        self.check_schedule(d)?;
        if d.tail() == TailKind::Max && !d.is_one() {
            return Err(ProjectionError::NonCanonical(d.to_string()));
        }
        let d = d.canonicalize();
        if d.is_empty() {
            return Err(ProjectionError::Endpoint(d.to_string()));
        }
        let n = d.len();
        let q = self.q;
        let scale = inv_pow(q, n);
        let jump = &scale - self.tail_mass(n);
        let q_minus_1 = Rational::from_integer(BigInt::from(q - 1));
        let lower_bound = &scale / &q_minus_1;
        let upper_bound = &scale * Rational::from_integer(BigInt::from(q - 2)) / &q_minus_1;
        let bounds_asserted =
            (n + 1..=n + self.schedule.window()).all(|j| self.schedule.base_at(j) < q);
        Ok(JumpReport {
            position: n,
            jump,
            lower_bound,
            upper_bound,
            bounds_asserted,
        })
    }

    /// `(f(x), f(1 - x), f(1))` where `1 - x` is the digit complement.
    pub fn symmetry_check(
        &self,
        d: &CantorDigits,
    ) -> Result<(Rational, Rational, Rational), ProjectionError> {
        self.check_schedule(d)?;
        let fx = self.eval_f(d)?;
        let comp = d.complement()?;
        Ok((fx, self.read_digits(&comp), self.f_one()))
    }

    /// `(f(σ^k x), σ^k f(x))`; the right side is the base-`q` shift
    /// `frac(q^k · f(x))` computed on the value.
    pub fn shift_commutation_check(
        &self,
        d: &CantorDigits,
        k: usize,
    ) -> Result<(Rational, Rational), ProjectionError> {
        self.check_schedule(d)?;
        if d.tail() != TailKind::Zero {
            return Err(CodecError::NotZeroTail.into());
        }
        if k > d.len() {
            return Err(ProjectionError::ShiftTooLong { k, len: d.len() });
        }
        let shifted_ctx = ProjectionContext::new(self.schedule.shifted(k), self.q)?;
        let lhs = shifted_ctx.eval_f(&d.shift(k))?;
        let scaled = self.eval_f(d)? * Rational::from_integer(BigInt::from(self.q).pow(k as u32));
        let rhs = &scaled - Rational::from_integer(crate::rational::floor(&scaled));
        Ok((lhs, rhs))
    }

    /// First differing position and the exact gap `f(d2) - f(d1)` with the
    /// lower bound `1/q^{n0} - Σ_{j>n0} (q_j - 1)/q^j`.
    pub fn monotonicity_witness(
        &self,
        d1: &CantorDigits,
        d2: &CantorDigits,
    ) -> Result<MonotonicityWitness, ProjectionError> {
        let f1 = self.eval_f(d1)?;
        let f2 = self.eval_f(d2)?;
        let (x1, x2) = (d1.decode(), d2.decode());
        if x1 == x2 {
            return Err(ProjectionError::EqualInputs);
        }
        if x1 > x2 {
            return Err(ProjectionError::NotOrdered);
        }
        let longest = d1.len().max(d2.len()) + 1;
        let first_difference = (1..=longest)
            .find(|&k| d1.digit_at(k) != d2.digit_at(k))
            .expect("distinct canonical words differ at a finite position");
        let gap = f2 - f1;
        let lower_bound = inv_pow(self.q, first_difference) - self.tail_mass(first_difference);
        Ok(MonotonicityWitness {
            first_difference,
            gap,
            lower_bound,
        })
    }

    pub fn derivative_probe(
        &self,
        base_word: &[u32],
        depth: usize,
    ) -> Result<DerivativeProbe, ProjectionError> {
        self.derivative_probe_with_horizon(base_word, depth, None)
    }

    /// Ratio sequences for ranks `1..=depth` and the verdict implied by how
    /// the schedule compares with `q`. A forced `horizon` shorter than the
    /// prefix plus one tail period hides the tail and yields
    /// [`Verdict::Inconclusive`].
    pub fn derivative_probe_with_horizon(
        &self,
        base_word: &[u32],
        depth: usize,
        horizon: Option<usize>,
    ) -> Result<DerivativeProbe, ProjectionError> {
        let mut point = base_word.to_vec();
        point.resize(point.len().max(depth), 0);
        CantorDigits::zero_tail(self.schedule.clone(), point.clone())?;
        let mut ratios = Vec::with_capacity(depth);
        let mut secant_ratios = Vec::with_capacity(depth);
        for n in 1..=depth {
            let prefix = point[..n].to_vec();
            let inf = CantorDigits::new(self.schedule.clone(), prefix.clone(), TailKind::Zero)?;
            let sup = CantorDigits::new(self.schedule.clone(), prefix, TailKind::Max)?;
            let change = self.read_digits(&sup) - self.read_digits(&inf);
            let length = sup.decode() - inf.decode();
            ratios.push(change / length);
            secant_ratios.push(Rational::new(
                self.schedule.product_to(n),
                BigInt::from(self.q).pow(n as u32),
            ));
        }
        let verdict = match horizon {
            Some(h) if h < self.schedule.window() => Verdict::Inconclusive,
            _ => match self.class {
                Boundedness::AllEqual => Verdict::DerivativeOne,
                Boundedness::AllStrictlyLess => Verdict::Singular,
                Boundedness::Mixed if self.schedule.tail_has_base_below(self.q) => {
                    Verdict::Singular
                }
                Boundedness::Mixed => Verdict::NonDifferentiable,
            },
        };
        Ok(DerivativeProbe {
            ranks: (1..=depth).collect(),
            ratios,
            secant_ratios,
            verdict,
        })
    }

    /// `∫_0^1 f = (1/2) Σ (q_n - 1) / q^n`.
    pub fn integral_f(&self) -> Rational {
        self.f_one() / Rational::from_integer(BigInt::from(2))
    }
}

/// `Σ_{j>n} (q_j - 1) / q^j`, geometric over the tail period.
pub fn tail_mass(schedule: &BaseSchedule, q: u32, n: usize) -> Rational {
    let p = schedule.period();
    let ratio = inv_pow(q, p);
    schedule.eventually_geometric_sum(n + 1, p, &ratio, |j| {
        Rational::from_integer(BigInt::from(schedule.base_at(j) - 1)) * inv_pow(q, j)
    })
}

impl JumpReport {
    pub fn within_bounds(&self) -> bool {
        self.lower_bound <= self.jump && self.jump <= self.upper_bound
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.jump.is_negative()
    }
}

impl DerivativeProbe {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.ratios.windows(2).all(|w| w[1] < w[0])
    }

    pub fn all_ones(&self) -> bool {
        self.ratios.iter().all(One::is_one)
    }
}
