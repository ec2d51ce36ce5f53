//! Cantor-series digit words: exact decode, greedy encode, canonical forms,
//! complements, shifts and cylinders.
//!
//! A word stores finitely many digits `ε_1..ε_m` and a tail rule. With
//! [`TailKind::Zero`] every later digit is 0; with [`TailKind::Max`] every
//! later digit is `q_j - 1`. The two tails give the dual representations of
//! Q-rational numbers; the canonical form is the zero tail, except for the
//! number 1 whose only canonical word is the empty word with a max tail.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{is_unit_interval, Rational};
use crate::schedule::{BaseSchedule, ScheduleError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("digit {digit} at position {position} is outside 0..{base}")]
    DigitOutOfRange {
        position: usize,
        digit: u32,
        base: u32,
    },
    #[error("value {0} lies outside [0, 1]")]
    OutOfUnitInterval(String),
    #[error("operation needs a zero-tail word")]
    NotZeroTail,
    #[error("malformed digit word {0:?}")]
    BadWord(String),
    #[error("cylinder base word must have at least one digit")]
    EmptyCylinder,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

impl CodecError {
    pub fn name(&self) -> &'static str {
        match self {
            CodecError::DigitOutOfRange { .. } => "DigitOutOfRange",
            CodecError::OutOfUnitInterval(_) => "OutOfUnitInterval",
            CodecError::NotZeroTail => "NotZeroTail",
            CodecError::BadWord(_) => "BadWord",
            CodecError::EmptyCylinder => "EmptyCylinder",
            CodecError::Schedule(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailKind {
    /// All digits past the stored word are 0.
    Zero,
    /// All digits past the stored word are maximal (`q_j - 1`).
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CantorDigits {
    schedule: BaseSchedule,
    digits: Vec<u32>,
    tail: TailKind,
}

fn check_digits(schedule: &BaseSchedule, digits: &[u32]) -> Result<(), CodecError> {
    for (i, &d) in digits.iter().enumerate() {
        let base = schedule.base_at(i + 1);
        if d >= base {
            return Err(CodecError::DigitOutOfRange {
                position: i + 1,
                digit: d,
                base,
            });
        }
    }
    Ok(())
}

impl CantorDigits {
    pub fn new(
        schedule: BaseSchedule,
        digits: Vec<u32>,
        tail: TailKind,
    ) -> Result<Self, CodecError> {
        check_digits(&schedule, &digits)?;
        Ok(CantorDigits {
            schedule,
            digits,
            tail,
        })
    }

    pub fn zero_tail(schedule: BaseSchedule, digits: Vec<u32>) -> Result<Self, CodecError> {
        Self::new(schedule, digits, TailKind::Zero)
    }

    /// The canonical word for 1.
    pub fn one(schedule: BaseSchedule) -> Self {
        CantorDigits {
            schedule,
            digits: Vec::new(),
            tail: TailKind::Max,
        }
    }

    pub fn zero(schedule: BaseSchedule) -> Self {
        CantorDigits {
            schedule,
            digits: Vec::new(),
            tail: TailKind::Zero,
        }
    }

    pub fn schedule(&self) -> &BaseSchedule {
        &self.schedule
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn tail(&self) -> TailKind {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `ε_k` including the implied tail digits.
    pub fn digit_at(&self, k: usize) -> u32 {
        match self.digits.get(k - 1) {
            Some(&d) => d,
            None => match self.tail {
                TailKind::Zero => 0,
                TailKind::Max => self.schedule.base_at(k) - 1,
            },
        }
    }

    /// Exact value `Σ ε_k / (q_1 ... q_k)`; the max tail contributes
    /// `1 / (q_1 ... q_m)` by telescoping.
    pub fn decode(&self) -> Rational {
        let mut product = BigInt::one();
        let mut numer = BigInt::zero();
        // Horner-style accumulation over a common denominator.
        for (i, &d) in self.digits.iter().enumerate() {
            let q = self.schedule.base_at(i + 1);
            product *= q;
            numer = numer * q + d;
        }
        if self.tail == TailKind::Max {
            numer += 1;
        }
        Rational::new(numer, product)
    }

    /// `Σ_{i<=n} ε_i / (q_1 ... q_i)` using tail digits past the stored word.
    pub fn partial_sum(&self, n: usize) -> Rational {
        let mut product = BigInt::one();
        let mut numer = BigInt::zero();
        for k in 1..=n {
            let q = self.schedule.base_at(k);
            product *= q;
            numer = numer * q + self.digit_at(k);
        }
        Rational::new(numer, product)
    }

    /// Greedy digit extraction. Q-rational inputs terminate with an exact
    /// zero-tail word; otherwise `max_digits` digits are emitted and the
    /// remainder is reported.
    pub fn encode(
        x: &Rational,
        schedule: &BaseSchedule,
        max_digits: usize,
    ) -> Result<Encoding, CodecError> {
        if !is_unit_interval(x) {
            return Err(CodecError::OutOfUnitInterval(x.to_string()));
        }
        if x.is_one() {
            return Ok(Encoding {
                word: CantorDigits::one(schedule.clone()),
                remainder: Rational::zero(),
            });
        }
        let mut digits = Vec::new();
        let mut rest = x.clone();
        let mut k = 1;
        while !rest.is_zero() && digits.len() < max_digits {
            let q = schedule.base_at(k);
            let scaled = &rest * Rational::from_integer(BigInt::from(q));
            let (d, _) = scaled.numer().div_mod_floor(scaled.denom());
            let d = d.to_u32().expect("digit fits in u32").min(q - 1);
            rest = scaled - Rational::from_integer(BigInt::from(d));
            digits.push(d);
            k += 1;
        }
        Ok(Encoding {
            word: CantorDigits {
                schedule: schedule.clone(),
                digits,
                tail: TailKind::Zero,
            },
            remainder: rest,
        })
    }

    pub fn is_one(&self) -> bool {
        self.tail == TailKind::Max && self.digits.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        match self.tail {
            TailKind::Max => self.digits.is_empty(),
            TailKind::Zero => self.digits.last() != Some(&0),
        }
    }

    /// Rewrites max-tail words as their zero-tail twin and strips trailing
    /// zeros. The value is preserved exactly.
    pub fn canonicalize(&self) -> CantorDigits {
        let mut digits = self.digits.clone();
        if self.tail == TailKind::Max {
            // Carry the implicit +1 through trailing maximal digits.
            loop {
                match digits.pop() {
                    None => return CantorDigits::one(self.schedule.clone()),
                    Some(d) if d + 1 < self.schedule.base_at(digits.len() + 1) => {
                        digits.push(d + 1);
                        break;
                    }
                    Some(_) => {}
                }
            }
        }
        while digits.last() == Some(&0) {
            digits.pop();
        }
        CantorDigits {
            schedule: self.schedule.clone(),
            digits,
            tail: TailKind::Zero,
        }
    }

    /// Digit-wise complement `ε'_k = q_k - 1 - ε_k`, tagged with a max tail.
    ///
    /// The result is deliberately left non-canonical: the symmetry
    /// `f(x) + f(1 - x) = f(1)` only holds digit by digit for this
    /// representation, and fails for the canonical twin at points where
    /// `f` jumps.
    pub fn complement(&self) -> Result<CantorDigits, CodecError> {
        if self.tail != TailKind::Zero {
            return Err(CodecError::NotZeroTail);
        }
        let digits = self
            .digits
            .iter()
            .enumerate()
            .map(|(i, &d)| self.schedule.base_at(i + 1) - 1 - d)
            .collect();
        Ok(CantorDigits {
            schedule: self.schedule.clone(),
            digits,
            tail: TailKind::Max,
        })
    }

    /// `σ^n`: drops the first `n` digits and shifts the schedule with them.
    pub fn shift(&self, n: usize) -> CantorDigits {
        let digits = self
            .digits
            .get(n..)
            .map(<[u32]>::to_vec)
            .unwrap_or_default();
        CantorDigits {
            schedule: self.schedule.shifted(n),
            digits,
            tail: self.tail,
        }
    }

    /// Value of the word read as an alternating Cantor series
    /// `Σ (1 + ε_n)(-1)^{n+1} / (q_1 ... q_n)`; the zero tail keeps
    /// contributing `±1 / (q_1 ... q_n)` and is summed in closed form.
    pub fn decode_alternating(&self) -> Result<Rational, CodecError> {
        if self.tail != TailKind::Zero {
            return Err(CodecError::NotZeroTail);
        }
        let sign = |n: usize| {
            if n % 2 == 1 {
                BigInt::one()
            } else {
                -BigInt::one()
            }
        };
        let m = self.digits.len();
        let mut value = Rational::zero();
        let mut product = BigInt::one();
        for (i, &d) in self.digits.iter().enumerate() {
            product *= self.schedule.base_at(i + 1);
            value += Rational::new(sign(i + 1) * (1 + d), product.clone());
        }
        let s = &self.schedule;
        let p = s.period();
        let period = if p.is_multiple_of(2) { p } else { 2 * p };
        let start = s.prefix().len() + 1;
        let block: BigInt = (start..start + period)
            .map(|k| BigInt::from(s.base_at(k)))
            .product();
        let ratio = Rational::new(BigInt::one(), block);
        let tail = s.eventually_geometric_sum(m + 1, period, &ratio, |n| {
            Rational::new(sign(n), s.product_to(n))
        });
        Ok(value + tail)
    }
}

/// Output of [`CantorDigits::encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub word: CantorDigits,
    /// `σ^m(x)` after the emitted digits; zero iff the word is exact.
    pub remainder: Rational,
}

impl Encoding {
    pub fn is_exact(&self) -> bool {
        self.remainder.is_zero()
    }

    /// The interval of numbers sharing the emitted prefix.
    pub fn residual_interval(&self) -> (Rational, Rational) {
        let lo = self.word.decode();
        if self.word.is_one() {
            return (lo.clone(), lo);
        }
        let width = Rational::new(
            BigInt::one(),
            self.word.schedule.product_to(self.word.len()),
        );
        let hi = &lo + width;
        (lo, hi)
    }
}

impl fmt::Display for CantorDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.schedule)?;
        if self.digits.is_empty() {
            write!(f, "()")?;
        } else {
            write!(f, "{}", join_digits(&self.digits))?;
        }
        if self.tail == TailKind::Max {
            write!(f, "!")?;
        }
        Ok(())
    }
}

pub fn join_digits(digits: &[u32]) -> String {
    digits
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

/// Parses a dot-separated digit list; `""` and `"()"` are the empty list.
pub fn parse_digit_list(s: &str) -> Result<Vec<u32>, CodecError> {
    let s = s.trim();
    if s.is_empty() || s == "()" {
        return Ok(Vec::new());
    }
    s.split('.')
        .map(|d| {
            d.trim()
                .parse::<u32>()
                .map_err(|_| CodecError::BadWord(s.to_string()))
        })
        .collect()
}

impl FromStr for CantorDigits {
    type Err = CodecError;

    /// Grammar: `Q[<prefix>;c<q>|p<segment>] <d1>.<d2>...[!]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let close = s
            .find(']')
            .ok_or_else(|| CodecError::BadWord(s.to_string()))?;
        let schedule: BaseSchedule = s[..=close].parse()?;
        let body = s[close + 1..].trim();
        let (body, tail) = match body.strip_suffix('!') {
            Some(b) => (b, TailKind::Max),
            None => (body, TailKind::Zero),
        };
        CantorDigits::new(schedule, parse_digit_list(body)?, tail)
    }
}

/// A constant-base expansion `Σ α_k / q^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QaryDigits {
    base: u32,
    digits: Vec<u32>,
    tail: TailKind,
}

impl QaryDigits {
    pub fn new(base: u32, digits: Vec<u32>, tail: TailKind) -> Result<Self, CodecError> {
        let schedule = BaseSchedule::constant(base)?;
        check_digits(&schedule, &digits)?;
        Ok(QaryDigits { base, digits, tail })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn tail(&self) -> TailKind {
        self.tail
    }

    pub fn to_cantor(&self) -> CantorDigits {
        CantorDigits {
            schedule: BaseSchedule::constant(self.base).expect("validated base"),
            digits: self.digits.clone(),
            tail: self.tail,
        }
    }

    pub fn decode(&self) -> Rational {
        self.to_cantor().decode()
    }

    pub fn encode(
        x: &Rational,
        base: u32,
        max_digits: usize,
    ) -> Result<(QaryDigits, Rational), CodecError> {
        let enc = CantorDigits::encode(x, &BaseSchedule::constant(base)?, max_digits)?;
        let word = QaryDigits {
            base,
            digits: enc.word.digits,
            tail: enc.word.tail,
        };
        Ok((word, enc.remainder))
    }
}

impl fmt::Display for QaryDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_cantor().fmt(f)
    }
}

/// The closed interval of numbers whose expansion starts with `base_word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    schedule: BaseSchedule,
    base_word: Vec<u32>,
}

impl Cylinder {
    pub fn new(schedule: BaseSchedule, base_word: Vec<u32>) -> Result<Self, CodecError> {
        if base_word.is_empty() {
            return Err(CodecError::EmptyCylinder);
        }
        check_digits(&schedule, &base_word)?;
        Ok(Cylinder {
            schedule,
            base_word,
        })
    }

    pub fn rank(&self) -> usize {
        self.base_word.len()
    }

    /// `(inf, sup)`; the supremum is the max-tail word, so the length is
    /// `1 / (q_1 ... q_m)`.
    pub fn interval(&self) -> (Rational, Rational) {
        let word = CantorDigits {
            schedule: self.schedule.clone(),
            digits: self.base_word.clone(),
            tail: TailKind::Zero,
        };
        let inf = word.decode();
        let sup = CantorDigits {
            tail: TailKind::Max,
            ..word
        }
        .decode();
        (inf, sup)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let (lo, hi) = self.interval();
        !(x - &lo).is_negative() && !(&hi - x).is_negative()
    }
}
