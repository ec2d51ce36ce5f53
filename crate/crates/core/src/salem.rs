//! Salem-type functions driven by a weight matrix `P = ||p_{i,n}||`:
//!
//! ```text
//! F(x) = β_{ε_1,1} + Σ_{k≥2} β_{ε_k,k} · Π_{n<k} p_{ε_n,n},   β_{i,n} = Σ_{j<i} p_{j,n}
//! ```
//!
//! Infinite series are evaluated as exact partial sums carrying an explicit
//! bound on the discarded tail.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::codec::{CantorDigits, CodecError, QaryDigits, TailKind};
use crate::exec::{self, Strategy};
use crate::projection::{ProjectionContext, ProjectionError};
use crate::rational::{parse_rational, Fraction, Rational};
use crate::schedule::{BaseSchedule, ScheduleError, Tail};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SalemError {
    #[error("column {level} needs at least two weights")]
    ColumnTooShort { level: usize },
    #[error("weight p[{index},{level}] = {value} is outside (-1, 1)")]
    WeightOutOfRange {
        level: usize,
        index: usize,
        value: String,
    },
    #[error("column {level} sums to {sum}, expected 1")]
    ColumnSum { level: usize, sum: String },
    #[error("periodic column tail needs at least one column")]
    EmptyTail,
    #[error("partial sum beta[{index},{level}] = {value} violates 0 < beta < 1")]
    ConditionFour {
        level: usize,
        index: usize,
        value: String,
    },
    #[error("weight p[{index},{level}] is negative")]
    NegativeWeight { level: usize, index: usize },
    #[error("distribution functions need a constant base")]
    NotConstantBase,
    #[error("digit {digit} at level {level} has no column entry")]
    DigitOutOfColumn { level: usize, digit: u32 },
    #[error("word is defined over {found}, expected {expected}")]
    ScheduleMismatch { expected: String, found: String },
    #[error("weight matrix base {matrix} does not match target base {target}")]
    BaseMismatch { matrix: u32, target: u32 },
    #[error("operation needs a zero-tail word")]
    NotZeroTail,
    #[error("malformed weight matrix: {0}")]
    BadDescriptor(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

impl SalemError {
    pub fn name(&self) -> &'static str {
        match self {
            SalemError::ColumnTooShort { .. } => "ColumnTooShort",
            SalemError::WeightOutOfRange { .. } => "WeightOutOfRange",
            SalemError::ColumnSum { .. } => "ColumnSum",
            SalemError::EmptyTail => "EmptyTail",
            SalemError::ConditionFour { .. } => "ConditionFour",
            SalemError::NegativeWeight { .. } => "NegativeWeight",
            SalemError::NotConstantBase => "NotConstantBase",
            SalemError::DigitOutOfColumn { .. } => "DigitOutOfColumn",
            SalemError::ScheduleMismatch { .. } => "ScheduleMismatch",
            SalemError::BaseMismatch { .. } => "BaseMismatch",
            SalemError::NotZeroTail => "NotZeroTail",
            SalemError::BadDescriptor(_) => "BadDescriptor",
            SalemError::Codec(e) => e.name(),
            SalemError::Projection(e) => e.name(),
            SalemError::Schedule(e) => e.name(),
        }
    }
}

/// One level of the matrix with its partial sums cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    weights: Vec<Rational>,
    betas: Vec<Rational>,
}

impl Column {
    fn new(weights: Vec<Rational>, level: usize) -> Result<Self, SalemError> {
        if weights.len() < 2 {
            return Err(SalemError::ColumnTooShort { level });
        }
        for (index, p) in weights.iter().enumerate() {
            if p.abs() >= Rational::one() {
                return Err(SalemError::WeightOutOfRange {
                    level,
                    index,
                    value: Fraction(p).to_string(),
                });
            }
        }
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return Err(SalemError::ColumnSum {
                level,
                sum: Fraction(&sum).to_string(),
            });
        }
        Ok(Self::unchecked(weights))
    }

    fn unchecked(weights: Vec<Rational>) -> Self {
        let mut betas = Vec::with_capacity(weights.len());
        let mut acc = Rational::zero();
        for p in &weights {
            betas.push(acc.clone());
            acc += p;
        }
        Column { weights, betas }
    }

    /// The first `len` entries; no longer a probability column in general.
    fn truncated(&self, len: usize) -> Column {
        Column::unchecked(self.weights[..len].to_vec())
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn beta(&self, i: usize) -> &Rational {
        &self.betas[i]
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn max_abs(&self) -> Rational {
        self.weights
            .iter()
            .map(|p| p.abs())
            .max()
            .expect("non-empty column")
    }

    fn max_abs_beta(&self) -> Rational {
        self.betas
            .iter()
            .map(|b| b.abs())
            .max()
            .expect("non-empty column")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnTail {
    Constant(Column),
    Periodic(Vec<Column>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    schedule: BaseSchedule,
    prefix: Vec<Column>,
    tail: ColumnTail,
}

/// Exact partial sum with a bound on the discarded tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    pub value: Rational,
    /// `|true value - value| <= tail_bound`.
    pub tail_bound: Rational,
    pub terms_used: usize,
    pub terms: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    /// Signed weights over a positive Cantor series.
    Example1,
    /// Weights with `0 < β < 1` over an alternating Cantor series.
    Example2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LimitClass {
    /// `Π q_k p_k -> 0`.
    Zero,
    /// The product stays bounded away from 0.
    NonZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub variant: Variant,
    /// `p_{i,n} · p_{i-1,n} < 0` for every level and every `i >= 1`.
    pub adjacent_sign: bool,
    /// `lim Π q_k p_{0,k}`.
    pub first_column_product: LimitClass,
    /// `lim Π q_k p_{q_k-1,k}`.
    pub last_column_product: LimitClass,
    /// Example 1's `q_n p_{q_n-1,n} >= 1 or <= 1`, with the undefined index
    /// symbol read as `q_n`. Under that reading the disjunction always holds.
    pub last_column_disjunction: Option<bool>,
    /// `0 < β_{i,n} < 1` for `i != 0` (Example 2 only).
    pub condition_four: Option<bool>,
    pub all_hold: bool,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    /// `[adjacent_sign, first_product_nonzero, last_product_nonzero, extra, all_hold]`
    pub fn vector(&self) -> [bool; 5] {
        [
            self.adjacent_sign,
            self.first_column_product == LimitClass::NonZero,
            self.last_column_product == LimitClass::NonZero,
            self.last_column_disjunction
                .or(self.condition_four)
                .unwrap_or(true),
            self.all_hold,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscillationRow {
    pub rank: usize,
    pub digit: u32,
    pub quotient: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscillationProbe {
    pub rows: Vec<OscillationRow>,
    /// Sign changes along the per-rank leading quotients.
    pub sign_changes: usize,
    pub max_abs: Rational,
}

impl OscillationProbe {
    /// The first recorded quotient at each rank.
    pub fn leading(&self) -> Vec<&Rational> {
        let mut out: Vec<&Rational> = Vec::new();
        let mut last_rank = 0;
        for row in &self.rows {
            if row.rank != last_rank {
                out.push(&row.quotient);
                last_rank = row.rank;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionCheck {
    /// `F` evaluated on the Cantor word with columns cut to `q_n` entries.
    pub direct: EvalResult,
    /// `F_{η,q}` evaluated on the base-`q` digits of `f(x)`.
    pub composed: EvalResult,
}

impl CompositionCheck {
    pub fn terms_equal(&self) -> bool {
        self.direct.terms == self.composed.terms
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDescriptor {
    #[serde(default)]
    columns_prefix: Vec<Vec<String>>,
    tail: TailDescriptor,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TailDescriptor {
    Constant { column: Vec<String> },
    Periodic { columns: Vec<Vec<String>> },
}

enum Digits<'a> {
    /// Digits past the stored word follow the word's tail rule.
    Word(&'a CantorDigits),
    /// Digits past the slice are unknown.
    Truncated(&'a [u32]),
}

impl Digits<'_> {
    fn at(&self, k: usize) -> u32 {
        match self {
            Digits::Word(w) => w.digit_at(k),
            Digits::Truncated(d) => d[k - 1],
        }
    }

    /// True when every digit past `terms` is known to be 0.
    fn zero_after(&self, terms: usize) -> bool {
        match self {
            Digits::Word(w) => w.tail() == TailKind::Zero && terms >= w.len(),
            Digits::Truncated(_) => false,
        }
    }
}

impl WeightMatrix {
    pub fn new(
        prefix: Vec<Vec<Rational>>,
        tail: Vec<Vec<Rational>>,
        periodic: bool,
    ) -> Result<Self, SalemError> {
        let prefix_len = prefix.len();
        let prefix: Vec<Column> = prefix
            .into_iter()
            .enumerate()
            .map(|(i, w)| Column::new(w, i + 1))
            .collect::<Result<_, _>>()?;
        if tail.is_empty() {
            return Err(SalemError::EmptyTail);
        }
        let tail_cols: Vec<Column> = tail
            .into_iter()
            .enumerate()
            .map(|(i, w)| Column::new(w, prefix_len + i + 1))
            .collect::<Result<_, _>>()?;
        let prefix_bases = prefix.iter().map(|c| c.len() as u32).collect();
        let (tail, schedule_tail) = if periodic {
            let segment = tail_cols.iter().map(|c| c.len() as u32).collect();
            (ColumnTail::Periodic(tail_cols), Tail::Periodic { segment })
        } else {
            if tail_cols.len() != 1 {
                return Err(SalemError::BadDescriptor(
                    "constant tail takes one column".into(),
                ));
            }
            let col = tail_cols.into_iter().next().expect("one column");
            let value = col.len() as u32;
            (ColumnTail::Constant(col), Tail::Constant { value })
        };
        Ok(WeightMatrix {
            schedule: BaseSchedule::new(prefix_bases, schedule_tail)?,
            prefix,
            tail,
        })
    }

    /// The same column at every level.
    pub fn constant(column: Vec<Rational>) -> Result<Self, SalemError> {
        Self::new(Vec::new(), vec![column], false)
    }

    /// `p_{i,n} = 1 / q` at every level.
    pub fn uniform(q: u32) -> Result<Self, SalemError> {
        let w = Rational::new(BigInt::one(), BigInt::from(q));
        Self::constant(vec![w; q as usize])
    }

    pub fn from_json(s: &str) -> Result<Self, SalemError> {
        let d: MatrixDescriptor =
            serde_json::from_str(s).map_err(|e| SalemError::BadDescriptor(e.to_string()))?;
        let parse_col = |c: &Vec<String>| -> Result<Vec<Rational>, SalemError> {
            c.iter()
                .map(|v| parse_rational(v).map_err(|e| SalemError::BadDescriptor(e.to_string())))
                .collect()
        };
        let prefix = d
            .columns_prefix
            .iter()
            .map(parse_col)
            .collect::<Result<Vec<_>, _>>()?;
        match d.tail {
            TailDescriptor::Constant { column } => {
                Self::new(prefix, vec![parse_col(&column)?], false)
            }
            TailDescriptor::Periodic { columns } => {
                let cols = columns
                    .iter()
                    .map(parse_col)
                    .collect::<Result<Vec<_>, _>>()?;
                Self::new(prefix, cols, true)
            }
        }
    }

    pub fn to_json(&self) -> String {
        let render = |c: &Column| {
            c.weights
                .iter()
                .map(|p| Fraction(p).to_string())
                .collect::<Vec<_>>()
        };
        let d = MatrixDescriptor {
            columns_prefix: self.prefix.iter().map(render).collect(),
            tail: match &self.tail {
                ColumnTail::Constant(c) => TailDescriptor::Constant { column: render(c) },
                ColumnTail::Periodic(cs) => TailDescriptor::Periodic {
                    columns: cs.iter().map(render).collect(),
                },
            },
        };
        serde_json::to_string(&d).expect("descriptor serializes")
    }

    pub fn schedule(&self) -> &BaseSchedule {
        &self.schedule
    }

    /// Column at level `n >= 1`.
    pub fn column(&self, n: usize) -> &Column {
        if n <= self.prefix.len() {
            return &self.prefix[n - 1];
        }
        match &self.tail {
            ColumnTail::Constant(c) => c,
            ColumnTail::Periodic(cs) => &cs[(n - self.prefix.len() - 1) % cs.len()],
        }
    }

    fn all_columns(&self) -> impl Iterator<Item = &Column> {
        let tail: Vec<&Column> = match &self.tail {
            ColumnTail::Constant(c) => vec![c],
            ColumnTail::Periodic(cs) => cs.iter().collect(),
        };
        self.prefix.iter().chain(tail)
    }

    fn window_levels(&self) -> impl Iterator<Item = usize> {
        1..=self.schedule.window()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.all_columns()
            .all(|c| c.weights.iter().all(|p| !p.is_negative()))
    }

    /// `0 < β_{i,n} < 1` for every level and `i != 0`.
    pub fn satisfies_condition_four(&self) -> Result<(), SalemError> {
        for n in self.window_levels() {
            let col = self.column(n);
            for i in 1..col.len() {
                let b = col.beta(i);
                if !b.is_positive() || *b >= Rational::one() {
                    return Err(SalemError::ConditionFour {
                        level: n,
                        index: i,
                        value: Fraction(b).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Bound on `|Σ_{k>T} β_k Π_{T<n<k} p_n|`, the value of the series on the
    /// shifted word. For non-negative weights that value is a probability.
    fn remainder_constant(&self) -> Rational {
        if self.is_nonnegative() {
            return Rational::one();
        }
        let b = self
            .all_columns()
            .map(Column::max_abs_beta)
            .max()
            .expect("columns");
        let m = self
            .all_columns()
            .map(Column::max_abs)
            .max()
            .expect("columns");
        b / (Rational::one() - m)
    }

    fn check_word(&self, d: &CantorDigits) -> Result<(), SalemError> {
        if d.schedule() != &self.schedule {
            return Err(SalemError::ScheduleMismatch {
                expected: self.schedule.to_string(),
                found: d.schedule().to_string(),
            });
        }
        Ok(())
    }

    /// Shared partial-sum loop. `reflect_even` swaps the digit `ε` for
    /// `q_n - 1 - ε` on even levels.
    fn series<'c>(
        &self,
        column_at: impl Fn(usize) -> &'c Column,
        digits: &Digits,
        terms: usize,
        reflect_even: bool,
    ) -> Result<EvalResult, SalemError> {
        let mut product = Rational::one();
        let mut value = Rational::zero();
        let mut list = Vec::with_capacity(terms);
        for k in 1..=terms {
            let col = column_at(k);
            let raw = digits.at(k);
            if raw as usize >= col.len() {
                return Err(SalemError::DigitOutOfColumn {
                    level: k,
                    digit: raw,
                });
            }
            let digit = if reflect_even && k % 2 == 0 {
                col.len() as u32 - 1 - raw
            } else {
                raw
            };
            let term = col.beta(digit as usize) * &product;
            value += &term;
            list.push(term);
            product *= col.weight(digit as usize);
        }
        let tail_bound = if !reflect_even && digits.zero_after(terms) {
            Rational::zero()
        } else {
            product.abs() * self.remainder_constant()
        };
        Ok(EvalResult {
            value,
            tail_bound,
            terms_used: terms,
            terms: list,
        })
    }

    /// Partial sum of `F` through `terms` levels.
    pub fn eval_f(&self, d: &CantorDigits, terms: usize) -> Result<EvalResult, SalemError> {
        self.check_word(d)?;
        self.series(|n| self.column(n), &Digits::Word(d), terms.max(1), false)
    }

    /// `F̃` on an alternating-series word: even levels read the reflected
    /// index `q_n - 1 - ε_n` in both `β` and `p`.
    pub fn eval_f_tilde(&self, d: &CantorDigits, terms: usize) -> Result<EvalResult, SalemError> {
        self.check_word(d)?;
        if d.tail() != TailKind::Zero {
            return Err(SalemError::NotZeroTail);
        }
        self.satisfies_condition_four()?;
        self.series(|n| self.column(n), &Digits::Word(d), terms.max(1), true)
    }

    /// Distribution function `F_{η,q}` of the random q-ary expansion with
    /// digit probabilities `p_{i,k}`.
    pub fn eval_distribution(&self, x: &Rational, terms: usize) -> Result<EvalResult, SalemError> {
        for n in self.window_levels() {
            for (index, p) in self.column(n).weights.iter().enumerate() {
                if p.is_negative() {
                    return Err(SalemError::NegativeWeight { level: n, index });
                }
            }
        }
        let q = self
            .schedule
            .constant_base()
            .ok_or(SalemError::NotConstantBase)?;
        let exact = |v: Rational| EvalResult {
            value: v,
            tail_bound: Rational::zero(),
            terms_used: 0,
            terms: Vec::new(),
        };
        if x.is_negative() {
            return Ok(exact(Rational::zero()));
        }
        if *x >= Rational::one() {
            return Ok(exact(Rational::one()));
        }
        let terms = terms.max(1);
        let (word, remainder) = QaryDigits::encode(x, q, terms)?;
        if remainder.is_zero() {
            let w = word.to_cantor();
            let w = CantorDigits::zero_tail(self.schedule.clone(), w.digits().to_vec())?;
            self.series(
                |n| self.column(n),
                &Digits::Word(&w),
                terms.max(w.len()),
                false,
            )
        } else {
            self.series(
                |n| self.column(n),
                &Digits::Truncated(word.digits()),
                terms,
                false,
            )
        }
    }

    /// Reports which hypotheses of the non-differentiability theorems hold.
    /// Limits of products are decided exactly over the tail pattern.
    pub fn check_nondiff_hypotheses(&self, variant: Variant) -> HypothesisReport {
        let mut notes = Vec::new();
        let adjacent_sign = self.window_levels().all(|n| {
            let w = &self.column(n).weights;
            w.windows(2).all(|pair| (&pair[0] * &pair[1]).is_negative())
        });
        let first_column_product = self.product_limit(|_| 0);
        let last_column_product = self.product_limit(|c| c.len() - 1);
        let last_column_disjunction = match variant {
            Variant::Example1 => {
                notes.push(
                    "interpreted: the undefined index d_n is read as q_n, making the last-column \
                     condition q_n*p[q_n-1,n] >= 1 or <= 1"
                        .to_string(),
                );
                let one = Rational::one();
                Some(self.window_levels().all(|n| {
                    let c = self.column(n);
                    let v = Rational::from_integer(BigInt::from(c.len())) * c.weight(c.len() - 1);
                    v >= one || v <= one
                }))
            }
            Variant::Example2 => None,
        };
        let condition_four = match variant {
            Variant::Example1 => None,
            Variant::Example2 => Some(self.satisfies_condition_four().is_ok()),
        };
        let all_hold = adjacent_sign
            && first_column_product == LimitClass::NonZero
            && last_column_product == LimitClass::NonZero
            && last_column_disjunction.unwrap_or(true)
            && condition_four.unwrap_or(true);
        HypothesisReport {
            variant,
            adjacent_sign,
            first_column_product,
            last_column_product,
            last_column_disjunction,
            condition_four,
            all_hold,
            notes,
        }
    }

    /// `lim Π_k q_k p_{index(k),k}`: zero once any factor vanishes or the
    /// per-period magnitude is below 1.
    fn product_limit(&self, index: impl Fn(&Column) -> usize) -> LimitClass {
        let factor = |n: usize| {
            let c = self.column(n);
            Rational::from_integer(BigInt::from(c.len())) * c.weight(index(c))
        };
        if self.window_levels().any(|n| factor(n).is_zero()) {
            return LimitClass::Zero;
        }
        let start = self.schedule.prefix().len() + 1;
        let per_period: Rational = (start..start + self.schedule.period())
            .map(|n| factor(n).abs())
            .product();
        if per_period >= Rational::one() {
            LimitClass::NonZero
        } else {
            LimitClass::Zero
        }
    }

    /// Exact difference quotients `(F(x_m) - F(x_0)) / (x_m - x_0)` where
    /// `x_m` changes digit `m` of the point to every other admissible value.
    pub fn oscillation_probe(
        &self,
        point: &CantorDigits,
        depth: usize,
        strategy: Strategy,
    ) -> Result<OscillationProbe, SalemError> {
        self.check_word(point)?;
        if point.tail() != TailKind::Zero {
            return Err(SalemError::NotZeroTail);
        }
        let mut base = point.digits().to_vec();
        base.resize(base.len().max(depth), 0);
        let x0 = CantorDigits::zero_tail(self.schedule.clone(), base.clone())?;
        let f0 = self.eval_f(&x0, x0.len().max(1))?.value;
        let v0 = x0.decode();
        let ranks: Vec<usize> = (1..=depth).collect();
        let per_rank = exec::map(
            strategy,
            &ranks,
            |&m| -> Result<Vec<OscillationRow>, SalemError> {
                let mut rows = Vec::new();
                for digit in 0..self.schedule.base_at(m) {
                    if digit == base[m - 1] {
                        continue;
                    }
                    let mut moved = base.clone();
                    moved[m - 1] = digit;
                    let xm = CantorDigits::zero_tail(self.schedule.clone(), moved)?;
                    let fm = self.eval_f(&xm, xm.len().max(1))?.value;
                    rows.push(OscillationRow {
                        rank: m,
                        digit,
                        quotient: (fm - &f0) / (xm.decode() - &v0),
                    });
                }
                Ok(rows)
            },
        );
        let mut rows = Vec::new();
        for r in per_rank {
            rows.extend(r?);
        }
        let mut probe = OscillationProbe {
            max_abs: rows
                .iter()
                .map(|r| r.quotient.abs())
                .max()
                .unwrap_or_else(Rational::zero),
            rows,
            sign_changes: 0,
        };
        probe.sign_changes = probe
            .leading()
            .windows(2)
            .filter(|w| w[0].is_positive() != w[1].is_positive())
            .count();
        Ok(probe)
    }

    /// Evaluates `F` on `d` directly and as `F_{η,q}(f(d))`, where `self`
    /// holds base-`q` columns and `F` uses those columns cut to `q_n`
    /// entries.
    pub fn composition_check(
        &self,
        ctx: &ProjectionContext,
        d: &CantorDigits,
        terms: usize,
    ) -> Result<CompositionCheck, SalemError> {
        let q = self
            .schedule
            .constant_base()
            .ok_or(SalemError::NotConstantBase)?;
        if q != ctx.q() {
            return Err(SalemError::BaseMismatch {
                matrix: q,
                target: ctx.q(),
            });
        }
        let terms = terms.max(1);
        let restricted: Vec<Column> = (1..=terms)
            .map(|n| self.column(n).truncated(ctx.schedule().base_at(n) as usize))
            .collect();
        let direct = self.series(|n| &restricted[n - 1], &Digits::Word(d), terms, false)?;

        let y = ctx.eval_f(d)?;
        let (image, remainder) = QaryDigits::encode(&y, q, terms)?;
        let composed = if remainder.is_zero() && image.tail() == TailKind::Zero {
            let w = CantorDigits::zero_tail(self.schedule.clone(), image.digits().to_vec())?;
            self.series(|n| self.column(n), &Digits::Word(&w), terms, false)?
        } else if image.tail() == TailKind::Max {
            let w = CantorDigits::one(self.schedule.clone());
            self.series(|n| self.column(n), &Digits::Word(&w), terms, false)?
        } else {
            self.series(
                |n| self.column(n),
                &Digits::Truncated(image.digits()),
                terms,
                false,
            )?
        };
        Ok(CompositionCheck { direct, composed })
    }
}
