//! The block map `g`. A base-`q` word built from blocks `u…u α` (with
//! `α - 1` copies of the padding digit `u` before each significant digit
//! `α ∈ Θ = {1, …, q-1} \ {u}`) is sent to the word `α_1 α_2 …`:
//!
//! ```text
//! g(Δ_{u..uα_1 u..uα_2 …}) = Σ α_n / q^n
//! ```
//!
//! For an infinite word the x-side value carries an extra `u / (q - 1)`
//! term from the padding convention. Only finite words are evaluated here,
//! so that constant never enters a computation.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

use crate::codec::{CodecError, QaryDigits, TailKind};
use crate::exec::{self, Strategy};
use crate::rational::{inv_pow, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BlockError {
    #[error("base {q} with padding digit {u} is not admissible (need q > 3 and u < q)")]
    InvalidAlphabet { q: u32, u: u32 },
    #[error("digit {digit} at position {position} exceeds base {q}")]
    DigitOutOfRange { position: usize, digit: u32, q: u32 },
    #[error("digit {digit} at position {position} is not in Theta")]
    DigitOutOfTheta { position: usize, digit: u32 },
    #[error("block ending at position {position}: digit {alpha} needs {expected} padding digits, found {found}")]
    MalformedBlock {
        position: usize,
        alpha: u32,
        expected: u32,
        found: u32,
    },
    #[error("input ends inside a block after {remainder} padding digits")]
    TrailingPartialBlock { remainder: usize },
    #[error("block words are finite; a max-tail input has no block decomposition")]
    InfiniteTail,
    #[error("word is over base {found}, expected {expected}")]
    BaseMismatch { expected: u32, found: u32 },
    #[error("position {position} is outside 1..={len}")]
    Position { position: usize, len: usize },
}

impl BlockError {
    pub fn name(&self) -> &'static str {
        match self {
            BlockError::InvalidAlphabet { .. } => "InvalidAlphabet",
            BlockError::DigitOutOfRange { .. } => "DigitOutOfRange",
            BlockError::DigitOutOfTheta { .. } => "DigitOutOfTheta",
            BlockError::MalformedBlock { .. } => "MalformedBlock",
            BlockError::TrailingPartialBlock { .. } => "TrailingPartialBlock",
            BlockError::InfiniteTail => "InfiniteTail",
            BlockError::BaseMismatch { .. } => "BaseMismatch",
            BlockError::Position { .. } => "Position",
        }
    }
}

impl From<CodecError> for BlockError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::DigitOutOfRange {
                position,
                digit,
                base,
            } => BlockError::DigitOutOfRange {
                position,
                digit,
                q: base,
            },
            _ => BlockError::InfiniteTail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BlockAlphabet {
    q: u32,
    u: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MonotonicityClass {
    Decreasing,
    Increasing,
    NonMonotone,
}

impl fmt::Display for MonotonicityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl BlockAlphabet {
    pub fn new(q: u32, u: u32) -> Result<Self, BlockError> {
        if q <= 3 || u >= q {
            return Err(BlockError::InvalidAlphabet { q, u });
        }
        Ok(BlockAlphabet { q, u })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn theta(&self) -> Vec<u32> {
        (1..self.q).filter(|&a| a != self.u).collect()
    }

    pub fn in_theta(&self, digit: u32) -> bool {
        digit >= 1 && digit < self.q && digit != self.u
    }

    /// `|Θ|`: `q - 1` when `u = 0`, otherwise `q - 2`.
    pub fn tau(&self) -> u32 {
        if self.u == 0 {
            self.q - 1
        } else {
            self.q - 2
        }
    }

    /// Decreasing for `u ∈ {0, 1}`, increasing for `u ∈ {q-2, q-1}`, and
    /// neither in between. At `q = 4` the two monotone ranges cover every
    /// `u`.
    pub fn monotonicity_class(&self) -> MonotonicityClass {
        if self.u <= 1 {
            MonotonicityClass::Decreasing
        } else if self.u >= self.q - 2 {
            MonotonicityClass::Increasing
        } else {
            MonotonicityClass::NonMonotone
        }
    }

    /// Splits a finite base-`q` word into blocks.
    pub fn parse_blocks(&self, digits: &QaryDigits) -> Result<BlockWord, BlockError> {
        self.check_base(digits)?;
        if digits.tail() == TailKind::Max {
            return Err(BlockError::InfiniteTail);
        }
        self.parse_digits(digits.digits())
    }

    /// [`parse_blocks`](Self::parse_blocks) on a bare digit slice.
    pub fn parse_digits(&self, digits: &[u32]) -> Result<BlockWord, BlockError> {
        let mut alphas = Vec::new();
        let mut run = 0u32;
        for (i, &d) in digits.iter().enumerate() {
            let position = i + 1;
            if d >= self.q {
                return Err(BlockError::DigitOutOfRange {
                    position,
                    digit: d,
                    q: self.q,
                });
            }
            if d == self.u {
                run += 1;
                continue;
            }
            if !self.in_theta(d) {
                return Err(BlockError::DigitOutOfTheta { position, digit: d });
            }
            if run != d - 1 {
                return Err(BlockError::MalformedBlock {
                    position,
                    alpha: d,
                    expected: d - 1,
                    found: run,
                });
            }
            alphas.push(d);
            run = 0;
        }
        if run > 0 {
            return Err(BlockError::TrailingPartialBlock {
                remainder: run as usize,
            });
        }
        Ok(BlockWord {
            alphabet: *self,
            alphas,
        })
    }

    /// The block word whose `g`-image has the digits of `y`.
    pub fn invert_g(&self, y: &QaryDigits) -> Result<BlockWord, BlockError> {
        self.check_base(y)?;
        if y.tail() == TailKind::Max {
            return Err(BlockError::InfiniteTail);
        }
        self.word(y.digits().to_vec())
    }

    pub fn word(&self, alphas: Vec<u32>) -> Result<BlockWord, BlockError> {
        if let Some((i, &a)) = alphas.iter().enumerate().find(|(_, &a)| !self.in_theta(a)) {
            return Err(BlockError::DigitOutOfTheta {
                position: i + 1,
                digit: a,
            });
        }
        Ok(BlockWord {
            alphabet: *self,
            alphas,
        })
    }

    pub fn random_word<R: Rng>(&self, rng: &mut R, blocks: usize) -> BlockWord {
        let theta = self.theta();
        let alphas = (0..blocks)
            .map(|_| theta[rng.gen_range(0..theta.len())])
            .collect();
        BlockWord {
            alphabet: *self,
            alphas,
        }
    }

    fn check_base(&self, digits: &QaryDigits) -> Result<(), BlockError> {
        if digits.base() != self.q {
            return Err(BlockError::BaseMismatch {
                expected: self.q,
                found: digits.base(),
            });
        }
        Ok(())
    }

    /// Samples random pairs of words with the same number of blocks and
    /// compares the order of their x-values with the order of their images.
    /// Words are compared as values, which is the same as comparing them
    /// zero-padded to a common length.
    pub fn monotonicity_probe(
        &self,
        trials: usize,
        seed: u64,
        strategy: Strategy,
    ) -> MonotonicityReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(BlockWord, BlockWord)> = (0..trials)
            .map(|_| loop {
                let blocks = rng.gen_range(1..=4);
                let a = self.random_word(&mut rng, blocks);
                let b = self.random_word(&mut rng, blocks);
                if a != b {
                    break (a, b);
                }
            })
            .collect();
        let tallies = exec::map_reduce(
            strategy,
            &pairs,
            |(a, b)| {
                let x = a.x_value().cmp(&b.x_value());
                let y = a.eval_g().cmp(&b.eval_g());
                match (x, y) {
                    (Ordering::Equal, _) | (_, Ordering::Equal) => [0, 0, 1],
                    _ if x == y => [1, 0, 0],
                    _ => [0, 1, 0],
                }
            },
            || [0usize; 3],
            |l, r| [l[0] + r[0], l[1] + r[1], l[2] + r[2]],
        );
        MonotonicityReport {
            class: self.monotonicity_class(),
            trials,
            concordant: tallies[0],
            discordant: tallies[1],
            ties: tallies[2],
        }
    }
}

impl fmt::Display for BlockAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} u={}", self.q, self.u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockWord {
    alphabet: BlockAlphabet,
    alphas: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub class: MonotonicityClass,
    pub trials: usize,
    /// Pairs where `x` and `g(x)` are ordered the same way.
    pub concordant: usize,
    pub discordant: usize,
    pub ties: usize,
}

impl MonotonicityReport {
    pub fn consistent(&self) -> bool {
        self.ties == 0
            && match self.class {
                MonotonicityClass::Decreasing => self.concordant == 0,
                MonotonicityClass::Increasing => self.discordant == 0,
                MonotonicityClass::NonMonotone => self.concordant > 0 && self.discordant > 0,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GDerivativeRow {
    pub n: usize,
    pub alpha: u32,
    pub quotient: Rational,
    /// `α_1 + … + α_{n-1} + α_n - n`, the power of `q` in the proof's
    /// limit display after the `c` terms cancel.
    pub closed_form_exponent: i64,
    /// Exact quotient from the closed form, available when `u = 0` and the
    /// perturbed block is the last one.
    pub closed_form_quotient: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GDerivativeProbe {
    pub position: usize,
    /// The original value `c` of the perturbed block.
    pub base_alpha: u32,
    pub rows: Vec<GDerivativeRow>,
}

impl BlockWord {
    pub fn alphabet(&self) -> &BlockAlphabet {
        &self.alphabet
    }

    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Length of the expanded word, `Σ α_i`.
    pub fn expanded_len(&self) -> usize {
        self.alphas.iter().map(|&a| a as usize).sum()
    }

    pub fn expand_digits(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.expanded_len());
        for &a in &self.alphas {
            out.extend(std::iter::repeat_n(self.alphabet.u, a as usize - 1));
            out.push(a);
        }
        out
    }

    pub fn expand_blocks(&self) -> QaryDigits {
        QaryDigits::new(self.alphabet.q, self.expand_digits(), TailKind::Zero)
            .expect("block digits are below q")
    }

    /// Value of the expanded finite word.
    pub fn x_value(&self) -> Rational {
        self.expand_blocks().decode()
    }

    /// `Σ α_n / q^n`.
    pub fn eval_g(&self) -> Rational {
        self.image().decode()
    }

    /// The `g`-image as a base-`q` word: the alphas themselves.
    pub fn image(&self) -> QaryDigits {
        QaryDigits::new(self.alphabet.q, self.alphas.clone(), TailKind::Zero)
            .expect("alphas are below q")
    }

    /// Both sides of `g(σ^{α_1+…+α_n}(x)) = σ^n(g(x))` as digit words.
    pub fn g_shift_commutation(&self, n: usize) -> Result<(QaryDigits, QaryDigits), BlockError> {
        if n > self.len() {
            return Err(BlockError::Position {
                position: n,
                len: self.len(),
            });
        }
        let drop: usize = self.alphas[..n].iter().map(|&a| a as usize).sum();
        let shifted = self.expand_digits()[drop..].to_vec();
        let left = self.alphabet.parse_digits(&shifted)?.image();
        let right = QaryDigits::new(self.alphabet.q, self.alphas[n..].to_vec(), TailKind::Zero)?;
        Ok((left, right))
    }

    /// Replaces block `n` by each other admissible `α` (at most `depth`
    /// of them, smallest first) and records the exact difference quotient
    /// `(g(x) - g(x_0)) / (x - x_0)`.
    pub fn g_derivative_probe(
        &self,
        n: usize,
        depth: usize,
    ) -> Result<GDerivativeProbe, BlockError> {
        if n == 0 || n > self.len() {
            return Err(BlockError::Position {
                position: n,
                len: self.len(),
            });
        }
        let a = self.alphabet;
        let q = a.q;
        let c = self.alphas[n - 1];
        let s: usize = self.alphas[..n - 1].iter().map(|&v| v as usize).sum();
        let (x0, y0) = (self.x_value(), self.eval_g());
        let rows = a
            .theta()
            .into_iter()
            .filter(|&alpha| alpha != c)
            .take(depth)
            .map(|alpha| {
                let mut alphas = self.alphas.clone();
                alphas[n - 1] = alpha;
                let w = BlockWord {
                    alphabet: a,
                    alphas,
                };
                let quotient = (w.eval_g() - &y0) / (w.x_value() - &x0);
                let closed_form_quotient = (a.u == 0 && n == self.len()).then(|| {
                    // x-difference (α q^c - c q^α) / q^{S+α+c}, g-difference (α - c) / q^n
                    let qb = BigInt::from(q);
                    let num = (BigInt::from(alpha) - c) * qb.pow(s as u32 + alpha + c);
                    let den = BigInt::from(alpha) * qb.pow(c) - BigInt::from(c) * qb.pow(alpha);
                    Rational::new(num, den) * inv_pow(q, n)
                });
                GDerivativeRow {
                    n,
                    alpha,
                    quotient,
                    closed_form_exponent: (s + alpha as usize) as i64 - n as i64,
                    closed_form_quotient,
                }
            })
            .collect();
        Ok(GDerivativeProbe {
            position: n,
            base_alpha: c,
            rows,
        })
    }
}

impl GDerivativeProbe {
    /// Largest over smallest quotient magnitude.
    pub fn spread(&self) -> Option<Rational> {
        let mags: Vec<Rational> = self.rows.iter().map(|r| r.quotient.abs()).collect();
        let lo = mags.iter().min()?;
        let hi = mags.iter().max()?;
        (!lo.is_zero()).then(|| hi / lo)
    }

    pub fn matches_closed_form(&self) -> bool {
        self.rows.iter().all(|r| {
            r.closed_form_quotient
                .as_ref()
                .is_none_or(|c| *c == r.quotient)
        })
    }
}

impl fmt::Display for BlockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphas.is_empty() {
            return f.write_str("()");
        }
        f.write_str(&crate::codec::join_digits(&self.alphas))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Strategy;
    use crate::rational::ratio;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, Just, Strategy as _};

    fn q5(u: u32) -> BlockAlphabet {
        BlockAlphabet::new(5, u).unwrap()
    }

    fn digits(q: u32, d: &[u32]) -> QaryDigits {
        QaryDigits::new(q, d.to_vec(), TailKind::Zero).unwrap()
    }

    #[test]
    fn alphabet_rules() {
        assert!(BlockAlphabet::new(3, 0).is_err());
        assert!(BlockAlphabet::new(5, 5).is_err());
        assert_eq!(q5(0).theta(), vec![1, 2, 3, 4]);
        assert_eq!(q5(2).theta(), vec![1, 3, 4]);
        assert_eq!(q5(0).tau(), 4);
        assert_eq!(q5(2).tau(), 3);
    }

    #[test]
    fn parse_examples() {
        let w = q5(0).parse_blocks(&digits(5, &[0, 0, 3, 0, 2, 1])).unwrap();
        assert_eq!(w.alphas(), &[3, 2, 1]);
        assert_eq!(
            q5(0).parse_blocks(&digits(5, &[3])).unwrap_err().name(),
            "MalformedBlock"
        );
        assert_eq!(
            q5(2).parse_blocks(&digits(5, &[2, 3])).unwrap_err().name(),
            "MalformedBlock"
        );
        assert_eq!(
            q5(0).parse_blocks(&digits(5, &[0, 2, 0])).unwrap_err(),
            BlockError::TrailingPartialBlock { remainder: 1 }
        );
        assert_eq!(
            q5(2).parse_blocks(&digits(5, &[0])).unwrap_err().name(),
            "DigitOutOfTheta"
        );
        assert_eq!(
            q5(0).parse_blocks(&digits(7, &[1])).unwrap_err().name(),
            "BaseMismatch"
        );
    }

    #[test]
    fn expand_and_eval() {
        let w = q5(0).word(vec![3, 2, 1]).unwrap();
        assert_eq!(w.expand_digits(), vec![0, 0, 3, 0, 2, 1]);
        assert_eq!(w.eval_g(), ratio(86, 125));
        assert_eq!(q5(0).word(vec![]).unwrap().eval_g(), ratio(0, 1));
        assert_eq!(q5(2).word(vec![1]).unwrap().eval_g(), ratio(1, 5));
        assert!(q5(0).word(vec![]).unwrap().expand_digits().is_empty());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            q5(0).invert_g(&digits(5, &[3, 2, 1])).unwrap().alphas(),
            &[3, 2, 1]
        );
        assert_eq!(
            q5(0).invert_g(&digits(5, &[3, 0])).unwrap_err().name(),
            "DigitOutOfTheta"
        );
    }

    #[test]
    fn classes() {
        assert_eq!(q5(0).monotonicity_class(), MonotonicityClass::Decreasing);
        assert_eq!(q5(4).monotonicity_class(), MonotonicityClass::Increasing);
        assert_eq!(
            BlockAlphabet::new(6, 2).unwrap().monotonicity_class(),
            MonotonicityClass::NonMonotone
        );
        assert_eq!(
            BlockAlphabet::new(4, 2).unwrap().monotonicity_class(),
            MonotonicityClass::Increasing
        );
        assert_eq!(
            BlockAlphabet::new(4, 1).unwrap().monotonicity_class(),
            MonotonicityClass::Decreasing
        );
    }

    #[test]
    fn monotonicity_pair_examples() {
        let a = q5(0);
        let (w1, w2) = (a.word(vec![1]).unwrap(), a.word(vec![2]).unwrap());
        assert_eq!(w1.x_value(), ratio(1, 5));
        assert_eq!(w2.x_value(), ratio(2, 25));
        assert!(w1.x_value() > w2.x_value() && w1.eval_g() < w2.eval_g());
        let b = q5(4);
        let (v1, v2) = (b.word(vec![1]).unwrap(), b.word(vec![2]).unwrap());
        assert!(v1.x_value() < v2.x_value() && v1.eval_g() < v2.eval_g());
    }

    #[test]
    fn probe_agrees_with_class() {
        for (q, u) in [(5, 0), (5, 1), (5, 3), (5, 4), (6, 2), (4, 2), (4, 0)] {
            let r =
                BlockAlphabet::new(q, u)
                    .unwrap()
                    .monotonicity_probe(400, 7, Strategy::Parallel);
            assert!(r.consistent(), "{q} {u}: {r:?}");
        }
    }

    #[test]
    fn shift_examples() {
        let w = q5(0).word(vec![3, 2, 1]).unwrap();
        let (l, r) = w.g_shift_commutation(1).unwrap();
        assert_eq!(l.digits(), &[2, 1]);
        assert_eq!(l, r);
        let (l, r) = w.g_shift_commutation(3).unwrap();
        assert!(l.digits().is_empty() && r.digits().is_empty());
        assert!(w.g_shift_commutation(4).is_err());
    }

    #[test]
    fn derivative_probe_closed_form() {
        let a = q5(0);
        let w = a.word(vec![1, 1, 1]).unwrap();
        let p = w.g_derivative_probe(3, 10).unwrap();
        assert_eq!(p.rows.len(), 3);
        assert!(p.matches_closed_form());
        assert_eq!(p.rows[0].closed_form_exponent, 2 + 2 - 3);

        let w = a.word(vec![4, 4]).unwrap();
        let p = w.g_derivative_probe(2, 10).unwrap();
        assert!(p.matches_closed_form());
        let exps: Vec<i64> = p.rows.iter().map(|r| r.closed_form_exponent).collect();
        assert_eq!(exps, vec![3, 4, 5]);
        let mags: Vec<Rational> = p.rows.iter().map(|r| r.quotient.abs()).collect();
        assert!(mags.windows(2).all(|m| m[0] < m[1]));
        assert!(p.spread().unwrap() > ratio(3, 1));

        let single = a.word(vec![2]).unwrap().g_derivative_probe(1, 10).unwrap();
        assert!(single.matches_closed_form());
        // c = 2, α = 1: (1 - 2) q^3 / (q (1·q^2 - 2·q)) = -125 / 75
        assert_eq!(single.rows[0].quotient, ratio(-5, 3));
    }

    #[test]
    fn derivative_probe_inner_block_has_no_closed_form() {
        let w = q5(0).word(vec![2, 3]).unwrap();
        let p = w.g_derivative_probe(1, 10).unwrap();
        assert!(p.rows.iter().all(|r| r.closed_form_quotient.is_none()));
        assert!(q5(2)
            .word(vec![1])
            .unwrap()
            .g_derivative_probe(1, 10)
            .unwrap()
            .rows[0]
            .closed_form_quotient
            .is_none());
    }

    fn alphabets() -> impl proptest::strategy::Strategy<Value = BlockAlphabet> {
        (4u32..9)
            .prop_flat_map(|q| (Just(q), 0..q))
            .prop_map(|(q, u)| BlockAlphabet::new(q, u).unwrap())
    }

    fn words() -> impl proptest::strategy::Strategy<Value = BlockWord> {
        alphabets().prop_flat_map(|a| {
            let theta = a.theta();
            proptest::collection::vec(proptest::sample::select(theta), 0..8)
                .prop_map(move |al| a.word(al).unwrap())
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_expand(w in words()) {
            prop_assert_eq!(w.alphabet().parse_blocks(&w.expand_blocks()).unwrap(), w);
        }

        #[test]
        fn image_digits_lie_in_theta(w in words()) {
            let y = w.eval_g();
            let q = w.alphabet().q();
            let scaled = &y * Rational::from_integer(BigInt::from(q).pow(w.len() as u32));
            prop_assert!(scaled.is_integer());
            let (enc, rem) = QaryDigits::encode(&y, q, w.len()).unwrap();
            prop_assert!(rem.is_zero());
            prop_assert!(enc.digits().iter().all(|&d| w.alphabet().in_theta(d)));
            let mut padded = enc.digits().to_vec();
            padded.resize(w.len(), 0);
            prop_assert_eq!(w.alphabet().invert_g(&digits(q, &padded)).unwrap(), w);
        }

        #[test]
        fn shift_commutes(w in words(), k in 0usize..8) {
            let n = k.min(w.len());
            let (l, r) = w.g_shift_commutation(n).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn distinct_words_distinct_values(a in words(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = a.alphabet().random_word(&mut rng, a.len());
            prop_assert_eq!(a.eval_g() == b.eval_g(), a == b);
            prop_assert_eq!(a.x_value() == b.x_value(), a == b);
        }
    }
}
