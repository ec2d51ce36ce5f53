//! Base sequences `Q = (q_k)` given as a finite prefix followed by a
//! constant or periodic tail.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("base {base} at position {position} is below 2")]
    BaseTooSmall { position: usize, base: u32 },
    #[error("periodic tail needs a non-empty segment")]
    EmptySegment,
    #[error("target base {q} must be at least 2")]
    TargetTooSmall { q: u32 },
    #[error("q_{position} = {base} exceeds the target base {q}")]
    ExceedsBound { position: usize, base: u32, q: u32 },
    #[error("malformed schedule tag {0:?}")]
    BadTag(String),
    #[error("malformed schedule descriptor: {0}")]
    BadDescriptor(String),
}

impl ScheduleError {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleError::BaseTooSmall { .. } => "BaseTooSmall",
            ScheduleError::EmptySegment => "EmptySegment",
            ScheduleError::TargetTooSmall { .. } => "TargetTooSmall",
            ScheduleError::ExceedsBound { .. } => "ExceedsBound",
            ScheduleError::BadTag(_) => "BadTag",
            ScheduleError::BadDescriptor(_) => "BadDescriptor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    Constant { value: u32 },
    Periodic { segment: Vec<u32> },
}

/// How a schedule compares against a target base `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Boundedness {
    /// `q_n = q` for every `n`.
    AllEqual,
    /// `q_n < q` for every `n`.
    AllStrictlyLess,
    /// Both occur.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Descriptor", into = "Descriptor")]
pub struct BaseSchedule {
    prefix: Vec<u32>,
    tail: Tail,
}

#[derive(Serialize, Deserialize)]
struct Descriptor {
    #[serde(default)]
    prefix: Vec<u32>,
    tail: Tail,
}

impl TryFrom<Descriptor> for BaseSchedule {
    type Error = ScheduleError;

    fn try_from(d: Descriptor) -> Result<Self, Self::Error> {
        BaseSchedule::new(d.prefix, d.tail)
    }
}

impl From<BaseSchedule> for Descriptor {
    fn from(s: BaseSchedule) -> Self {
        Descriptor {
            prefix: s.prefix,
            tail: s.tail,
        }
    }
}

impl BaseSchedule {
    pub fn new(prefix: Vec<u32>, tail: Tail) -> Result<Self, ScheduleError> {
        for (i, &b) in prefix.iter().enumerate() {
            if b < 2 {
                return Err(ScheduleError::BaseTooSmall {
                    position: i + 1,
                    base: b,
                });
            }
        }
        let tail_bases: &[u32] = match &tail {
            Tail::Constant { value } => std::slice::from_ref(value),
            Tail::Periodic { segment } if segment.is_empty() => {
                return Err(ScheduleError::EmptySegment)
            }
            Tail::Periodic { segment } => segment,
        };
        for (i, &b) in tail_bases.iter().enumerate() {
            if b < 2 {
                return Err(ScheduleError::BaseTooSmall {
                    position: prefix.len() + i + 1,
                    base: b,
                });
            }
        }
        Ok(BaseSchedule { prefix, tail })
    }

    /// Accepts the JSON descriptor or the compact tag.
    pub fn parse_any(s: &str) -> Result<Self, ScheduleError> {
        if s.trim_start().starts_with('{') {
            let d: Descriptor =
                serde_json::from_str(s).map_err(|e| ScheduleError::BadDescriptor(e.to_string()))?;
            BaseSchedule::new(d.prefix, d.tail)
        } else {
            s.parse()
        }
    }

    pub fn constant(q: u32) -> Result<Self, ScheduleError> {
        Self::new(Vec::new(), Tail::Constant { value: q })
    }

    pub fn periodic(segment: Vec<u32>) -> Result<Self, ScheduleError> {
        Self::new(Vec::new(), Tail::Periodic { segment })
    }

    pub fn with_prefix(prefix: Vec<u32>, tail: Tail) -> Result<Self, ScheduleError> {
        Self::new(prefix, tail)
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Length of the repeating tail pattern.
    pub fn period(&self) -> usize {
        match &self.tail {
            Tail::Constant { .. } => 1,
            Tail::Periodic { segment } => segment.len(),
        }
    }

    /// Number of leading positions that determine the whole schedule.
    pub fn window(&self) -> usize {
        self.prefix.len() + self.period()
    }

    /// `q_k` for `k >= 1`.
    pub fn base_at(&self, k: usize) -> u32 {
        assert!(k >= 1, "schedule positions start at 1");
        if k <= self.prefix.len() {
            return self.prefix[k - 1];
        }
        match &self.tail {
            Tail::Constant { value } => *value,
            Tail::Periodic { segment } => segment[(k - self.prefix.len() - 1) % segment.len()],
        }
    }

    pub fn bases(&self, n: usize) -> impl Iterator<Item = u32> + '_ {
        (1..=n).map(move |k| self.base_at(k))
    }

    /// `q_1 q_2 ... q_n`, equal to 1 for `n = 0`.
    pub fn product_to(&self, n: usize) -> BigInt {
        self.bases(n).fold(BigInt::one(), |acc, b| acc * b)
    }

    /// The bases of one full tail period.
    pub fn tail_bases(&self) -> Vec<u32> {
        let start = self.prefix.len() + 1;
        (start..start + self.period())
            .map(|k| self.base_at(k))
            .collect()
    }

    /// Returns `Some(q)` when every `q_k` equals `q`.
    pub fn constant_base(&self) -> Option<u32> {
        let first = self.base_at(1);
        self.bases(self.window())
            .all(|b| b == first)
            .then_some(first)
    }

    /// The schedule `k -> q_{n+k}`.
    pub fn shifted(&self, n: usize) -> BaseSchedule {
        if n <= self.prefix.len() {
            return BaseSchedule {
                prefix: self.prefix[n..].to_vec(),
                tail: self.tail.clone(),
            };
        }
        let tail = match &self.tail {
            Tail::Constant { value } => Tail::Constant { value: *value },
            Tail::Periodic { segment } => {
                let r = (n - self.prefix.len()) % segment.len();
                let mut rotated = segment[r..].to_vec();
                rotated.extend_from_slice(&segment[..r]);
                Tail::Periodic { segment: rotated }
            }
        };
        BaseSchedule {
            prefix: Vec::new(),
            tail,
        }
    }

    /// Classifies the schedule against the target base `q`.
    ///
    /// The scan covers at least `horizon` positions and always the full
    /// prefix plus one tail period, so the answer is exact.
    pub fn is_bounded_by(&self, q: u32, horizon: usize) -> Result<Boundedness, ScheduleError> {
        if q < 2 {
            return Err(ScheduleError::TargetTooSmall { q });
        }
        let (mut equal, mut less) = (false, false);
        for k in 1..=horizon.max(self.window()) {
            let b = self.base_at(k);
            if b > q {
                return Err(ScheduleError::ExceedsBound {
                    position: k,
                    base: b,
                    q,
                });
            }
            if b == q {
                equal = true;
            } else {
                less = true;
            }
        }
        Ok(match (equal, less) {
            (true, false) => Boundedness::AllEqual,
            (false, true) => Boundedness::AllStrictlyLess,
            _ => Boundedness::Mixed,
        })
    }

    /// True when the tail contains a base below `q`, i.e. infinitely many
    /// `q_n < q`.
    pub fn tail_has_base_below(&self, q: u32) -> bool {
        self.tail_bases().iter().any(|&b| b < q)
    }

    /// Sums `term(j)` over `j >= start` for a series that is geometric past
    /// the prefix: `term(j + period) = term(j) * ratio` for every
    /// `j > prefix.len()`, with `|ratio| < 1`. `period` must be a multiple
    /// of the tail period.
    pub(crate) fn eventually_geometric_sum(
        &self,
        start: usize,
        period: usize,
        ratio: &Rational,
        term: impl Fn(usize) -> Rational,
    ) -> Rational {
        debug_assert!(period.is_multiple_of(self.period()));
        let head_end = self.prefix.len();
        let mut total = Rational::zero();
        for j in start..=head_end {
            total += term(j);
        }
        let s = start.max(head_end + 1);
        let mut block = Rational::zero();
        for j in s..s + period {
            block += term(j);
        }
        total + block / (Rational::one() - ratio)
    }
}

impl fmt::Display for BaseSchedule {
    /// Compact tag such as `Q[2,3,4;c4]` or `Q[;p2,3]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| {
            v.iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match &self.tail {
            Tail::Constant { value } => write!(f, "Q[{};c{}]", join(&self.prefix), value),
            Tail::Periodic { segment } => {
                write!(f, "Q[{};p{}]", join(&self.prefix), join(segment))
            }
        }
    }
}

impl FromStr for BaseSchedule {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScheduleError::BadTag(s.to_string());
        let inner = s
            .trim()
            .strip_prefix("Q[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (prefix, tail) = inner.split_once(';').ok_or_else(bad)?;
        let list = |t: &str| -> Result<Vec<u32>, ScheduleError> {
            if t.trim().is_empty() {
                return Ok(Vec::new());
            }
            t.split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
                .collect()
        };
        let prefix = list(prefix)?;
        let tail = tail.trim();
        let tail = if let Some(c) = tail.strip_prefix('c') {
            Tail::Constant {
                value: c.trim().parse().map_err(|_| bad())?,
            }
        } else if let Some(p) = tail.strip_prefix('p') {
            Tail::Periodic { segment: list(p)? }
        } else {
            return Err(bad());
        };
        BaseSchedule::new(prefix, tail)
    }
}
