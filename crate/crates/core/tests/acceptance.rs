//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the PASS/FAIL lines always reach stdout; exits non-zero on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cantor_lab::block_map::{BlockAlphabet, MonotonicityClass};
use cantor_lab::cli::OPERATIONS;
use cantor_lab::dimension::{self, DEFAULT_BUDGET};
use cantor_lab::projection::Verdict;
use cantor_lab::rational::{inv_pow, pow, ratio};
use cantor_lab::salem::{Variant, WeightMatrix};
use cantor_lab::{
    BaseSchedule, Boundedness, CantorDigits, ProjectionContext, QaryDigits, Rational, Strategy,
    Tail, TailKind,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + criterion)
}

fn schedules() -> Vec<BaseSchedule> {
    vec![
        BaseSchedule::constant(2).unwrap(),
        BaseSchedule::constant(10).unwrap(),
        BaseSchedule::new(vec![2, 3, 4], Tail::Constant { value: 4 }).unwrap(),
        BaseSchedule::periodic(vec![2, 3]).unwrap(),
        BaseSchedule::new(
            vec![7, 2],
            Tail::Periodic {
                segment: vec![3, 5, 2],
            },
        )
        .unwrap(),
    ]
}

fn max_base(s: &BaseSchedule) -> u32 {
    (1..=s.window()).map(|k| s.base_at(k)).max().unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, s: &BaseSchedule, len: usize) -> CantorDigits {
    let digits = (1..=len).map(|k| rng.gen_range(0..s.base_at(k))).collect();
    CantorDigits::zero_tail(s.clone(), digits).unwrap()
}

fn big(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn c01_codec_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let all = schedules();
    for i in 0..1000 {
        let s = &all[i % all.len()];
        let den = s.product_to(12);
        let num: BigInt = BigInt::from(rng.gen::<u64>()) % (&den + 1u32);
        let x = Rational::new(num, den);
        let enc = CantorDigits::encode(&x, s, 12).map_err(|e| e.to_string())?;
        ensure(enc.is_exact() && enc.word.decode() == x, || {
            format!("{s} {x}")
        })?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!(
        "1000 rationals, 5 schedules, {:?}",
        start.elapsed()
    ))
}

fn c02_shift_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2);
    let all = schedules();
    for i in 0..1000 {
        let s = &all[i % all.len()];
        let len = rng.gen_range(0..16);
        let mut w = random_word(&mut rng, s, len);
        if rng.gen_bool(0.2) {
            w = CantorDigits::new(s.clone(), w.digits().to_vec(), TailKind::Max).unwrap();
        }
        let n = rng.gen_range(0..=len + 2);
        let rhs = w.partial_sum(n) + w.shift(n).decode() / Rational::from_integer(s.product_to(n));
        ensure(rhs == w.decode(), || format!("{w} n={n}"))?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("1000 (word, n) pairs, {:?}", start.elapsed()))
}

fn c03_identity_degeneration() -> Outcome {
    let mut rng = rng(3);
    for _ in 0..1000 {
        let q = rng.gen_range(2..=12);
        let ctx = ProjectionContext::new(BaseSchedule::constant(q).unwrap(), q).unwrap();
        let len = rng.gen_range(0..14);
        let w = random_word(&mut rng, ctx.schedule(), len);
        ensure(
            ctx.eval_f(&w).map_err(|e| e.to_string())? == w.decode(),
            || w.to_string(),
        )?;
    }
    Ok("f = identity on 1000 words".into())
}

fn c04_jump_formula() -> Outcome {
    let ctx = ProjectionContext::new(BaseSchedule::constant(2).unwrap(), 3).unwrap();
    let w = CantorDigits::zero_tail(ctx.schedule().clone(), vec![1]).unwrap();
    let j = ctx.jump_at(&w).map_err(|e| e.to_string())?;
    ensure(j.jump == ratio(1, 6), || format!("jump {}", j.jump))?;
    ensure(
        j.lower_bound == ratio(1, 6) && j.upper_bound == ratio(1, 6),
        || format!("{j:?}"),
    )?;

    let mut rng = rng(4);
    let pool = [
        BaseSchedule::constant(2).unwrap(),
        BaseSchedule::constant(3).unwrap(),
        BaseSchedule::periodic(vec![2, 3]).unwrap(),
        BaseSchedule::new(
            vec![5, 5],
            Tail::Periodic {
                segment: vec![3, 4],
            },
        )
        .unwrap(),
        BaseSchedule::new(vec![4], Tail::Constant { value: 5 }).unwrap(),
    ];
    let mut asserted = 0;
    for i in 0..200 {
        let s = &pool[i % pool.len()];
        let q = max_base(s) + rng.gen_range(0..2);
        let ctx = ProjectionContext::new(s.clone(), q).unwrap();
        let len = rng.gen_range(1..10);
        let mut digits: Vec<u32> = random_word(&mut rng, s, len).digits().to_vec();
        digits[len - 1] = rng.gen_range(1..s.base_at(len));
        let w = CantorDigits::zero_tail(s.clone(), digits).unwrap();
        let j = ctx.jump_at(&w).map_err(|e| e.to_string())?;
        if j.bounds_asserted {
            asserted += 1;
            ensure(j.within_bounds(), || format!("{w} q={q}: {j:?}"))?;
        }
    }
    ensure(asserted >= 100, || {
        format!("only {asserted} points had a strict tail")
    })?;
    Ok(format!(
        "jump 1/6 = both bounds; {asserted}/200 strict-tail points within bounds"
    ))
}

fn c05_symmetry() -> Outcome {
    let mut rng = rng(5);
    let all = schedules();
    for i in 0..1000 {
        let s = &all[i % all.len()];
        let q = max_base(s) + rng.gen_range(0..3);
        let ctx = ProjectionContext::new(s.clone(), q).unwrap();
        let len = rng.gen_range(0..12);
        let w = random_word(&mut rng, s, len);
        let (a, b, one) = ctx.symmetry_check(&w).map_err(|e| e.to_string())?;
        ensure(&a + &b == one && one == ctx.f_one(), || w.to_string())?;
    }
    let ctx = ProjectionContext::new(BaseSchedule::constant(2).unwrap(), 3).unwrap();
    for _ in 0..50 {
        let len = rng.gen_range(0..12);
        let w = random_word(&mut rng, ctx.schedule(), len);
        let (a, b, _) = ctx.symmetry_check(&w).map_err(|e| e.to_string())?;
        ensure(a + b == ratio(1, 2), || w.to_string())?;
    }
    Ok("1000 words across 5 schedules; Constant(2), q=3 sums to 1/2".into())
}

fn c06_strict_monotonicity() -> Outcome {
    let mut rng = rng(6);
    let all = schedules();
    let mut pairs = 0;
    while pairs < 1000 {
        let s = &all[pairs % all.len()];
        let q = max_base(s) + rng.gen_range(0..3);
        let ctx = ProjectionContext::new(s.clone(), q).unwrap();
        let (l1, l2) = (rng.gen_range(0..10), rng.gen_range(0..10));
        let (a, b) = (
            random_word(&mut rng, s, l1).canonicalize(),
            random_word(&mut rng, s, l2).canonicalize(),
        );
        let (xa, xb) = (a.decode(), b.decode());
        if xa == xb {
            continue;
        }
        let (lo, hi) = if xa < xb { (a, b) } else { (b, a) };
        let (fl, fh) = (
            ctx.eval_f(&lo).map_err(|e| e.to_string())?,
            ctx.eval_f(&hi).map_err(|e| e.to_string())?,
        );
        ensure(fl < fh, || format!("{lo} vs {hi}"))?;
        pairs += 1;
    }
    Ok("1000 ordered pairs, zero violations".into())
}

fn c07_integral() -> Outcome {
    let ctx = ProjectionContext::new(BaseSchedule::constant(2).unwrap(), 3).unwrap();
    let closed = ctx.integral_f();
    ensure(closed == ratio(1, 4), || format!("integral {closed}"))?;
    let width = inv_pow(2, 10);
    let mut riemann = Rational::zero();
    for k in 0..1024u32 {
        let digits = (0..10).rev().map(|b| (k >> b) & 1).collect();
        let left = CantorDigits::zero_tail(ctx.schedule().clone(), digits).unwrap();
        riemann += ctx.eval_f(&left).map_err(|e| e.to_string())? * &width;
    }
    let gap = (&riemann - &closed).abs();
    ensure(gap <= width, || format!("Riemann sum {riemann}, gap {gap}"))?;

    let mut rng = rng(7);
    let all = schedules();
    for i in 0..20 {
        let s = &all[i % all.len()];
        let q = max_base(s) + rng.gen_range(0..4);
        let ctx = ProjectionContext::new(s.clone(), q).unwrap();
        let v = ctx.integral_f();
        let lower = Rational::one() / (big(2) * big(u64::from(q - 1)));
        ensure(lower <= v && v <= ratio(1, 2), || format!("{s} q={q}: {v}"))?;
    }
    Ok(format!(
        "closed form 1/4, Riemann gap {:.3e}, 20 contexts in bounds",
        cantor_lab::rational::to_f64(&gap)
    ))
}

fn c08_derivative_trichotomy() -> Outcome {
    let combos: Vec<(BaseSchedule, u32)> = vec![
        (BaseSchedule::constant(2).unwrap(), 3),
        (BaseSchedule::constant(3).unwrap(), 3),
        (
            BaseSchedule::new(vec![2], Tail::Constant { value: 3 }).unwrap(),
            3,
        ),
        (BaseSchedule::constant(2).unwrap(), 2),
        (BaseSchedule::constant(4).unwrap(), 7),
        (BaseSchedule::periodic(vec![2, 3]).unwrap(), 3),
        (BaseSchedule::periodic(vec![2, 3]).unwrap(), 4),
        (
            BaseSchedule::new(vec![2, 2, 2], Tail::Constant { value: 5 }).unwrap(),
            5,
        ),
        (
            BaseSchedule::new(vec![5, 5], Tail::Constant { value: 2 }).unwrap(),
            5,
        ),
        (
            BaseSchedule::new(
                vec![4],
                Tail::Periodic {
                    segment: vec![4, 3],
                },
            )
            .unwrap(),
            4,
        ),
        (
            BaseSchedule::new(vec![3, 3], Tail::Constant { value: 3 }).unwrap(),
            3,
        ),
        (BaseSchedule::periodic(vec![6]).unwrap(), 6),
        (
            BaseSchedule::new(vec![2, 6], Tail::Periodic { segment: vec![6] }).unwrap(),
            6,
        ),
        (BaseSchedule::periodic(vec![3, 5, 2]).unwrap(), 6),
        (
            BaseSchedule::new(vec![7], Tail::Constant { value: 3 }).unwrap(),
            7,
        ),
    ];
    for (s, q) in &combos {
        let ctx = ProjectionContext::new(s.clone(), *q).unwrap();
        let class = s.is_bounded_by(*q, 1).map_err(|e| e.to_string())?;
        let expected = match class {
            Boundedness::AllEqual => Verdict::DerivativeOne,
            Boundedness::AllStrictlyLess => Verdict::Singular,
            Boundedness::Mixed if s.tail_has_base_below(*q) => Verdict::Singular,
            Boundedness::Mixed => Verdict::NonDifferentiable,
        };
        let p = ctx.derivative_probe(&[], 12).map_err(|e| e.to_string())?;
        ensure(p.verdict == expected, || {
            format!("{s} q={q}: {:?} vs {expected:?}", p.verdict)
        })?;
    }
    let ctx = ProjectionContext::new(BaseSchedule::constant(2).unwrap(), 3).unwrap();
    let p = ctx.derivative_probe(&[], 20).map_err(|e| e.to_string())?;
    for (n, r) in p.ranks.iter().zip(&p.ratios) {
        // (2/3)^n times the tail factor Σ_{j>n} (q_j - 1) / q^{j-n} = 1/2
        let want = pow(&ratio(2, 3), *n) * ratio(1, 2);
        ensure(*r == want, || format!("rank {n}: {r}"))?;
    }
    ensure(p.is_strictly_decreasing(), || {
        "ratios not strictly decreasing".into()
    })?;
    let last = p.ratios.last().unwrap();
    ensure(*last < ratio(1, 1000), || format!("rank 20 ratio {last}"))?;
    Ok(format!(
        "15 combinations match; rank-20 ratio {:.3e}",
        cantor_lab::rational::to_f64(last)
    ))
}

fn salem() -> WeightMatrix {
    WeightMatrix::constant(vec![ratio(3, 10), ratio(7, 10)]).unwrap()
}

fn c09_salem_values() -> Outcome {
    let m = salem();
    let f_half = m
        .eval_distribution(&ratio(1, 2), 20)
        .map_err(|e| e.to_string())?;
    let f_3q = m
        .eval_distribution(&ratio(3, 4), 20)
        .map_err(|e| e.to_string())?;
    ensure(
        f_half.value == ratio(3, 10) && f_half.tail_bound.is_zero(),
        || format!("F(1/2) = {}", f_half.value),
    )?;
    ensure(
        f_3q.value == ratio(51, 100) && f_3q.tail_bound.is_zero(),
        || format!("F(3/4) = {}", f_3q.value),
    )?;

    let mut rng = rng(9);
    for _ in 0..100 {
        let q = rng.gen_range(2..=9);
        let len = rng.gen_range(0..10);
        let digits = (0..len).map(|_| rng.gen_range(0..q)).collect();
        let x = QaryDigits::new(q, digits, TailKind::Zero).unwrap().decode();
        let r = WeightMatrix::uniform(q)
            .unwrap()
            .eval_distribution(&x, 12)
            .map_err(|e| e.to_string())?;
        ensure(r.value == x, || format!("q={q} x={x}: {}", r.value))?;
    }

    let mut xs: Vec<Rational> = (0..500)
        .map(|_| {
            Rational::new(
                BigInt::from(rng.gen_range(-100i64..1100)),
                BigInt::from(1000),
            )
        })
        .collect();
    xs.sort();
    let values = xs
        .iter()
        .map(|x| m.eval_distribution(x, 24).map(|r| r.value))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let inversions = values.windows(2).filter(|w| w[0] > w[1]).count();
    ensure(inversions == 0, || format!("{inversions} inversions"))?;
    Ok("F(1/2)=3/10, F(3/4)=51/100; uniform = identity on 100; 500 samples monotone".into())
}

fn c10_hypothesis_vectors() -> Outcome {
    let cases = [
        (
            "alternating-sign",
            vec![ratio(3, 5), ratio(-1, 5), ratio(3, 5)],
            [true, true, true, true, true],
        ),
        (
            "all-positive",
            vec![ratio(1, 5), ratio(2, 5), ratio(2, 5)],
            [false, false, true, true, false],
        ),
        (
            "salem",
            vec![ratio(3, 10), ratio(7, 10)],
            [false, false, true, true, false],
        ),
    ];
    for (name, col, want) in cases {
        let m = WeightMatrix::constant(col).map_err(|e| e.to_string())?;
        let got = m.check_nondiff_hypotheses(Variant::Example1).vector();
        ensure(got == want, || format!("{name}: {got:?} != {want:?}"))?;
    }
    Ok("three worked matrices reproduce their vectors".into())
}

fn c11_composition() -> Outcome {
    let mut rng = rng(11);
    let setups = [
        (
            WeightMatrix::constant(vec![ratio(1, 5), ratio(1, 2), ratio(3, 10)]).unwrap(),
            BaseSchedule::constant(2).unwrap(),
        ),
        (
            WeightMatrix::constant(vec![ratio(3, 5), ratio(-1, 5), ratio(3, 5)]).unwrap(),
            BaseSchedule::periodic(vec![2, 3]).unwrap(),
        ),
        (
            WeightMatrix::constant(vec![ratio(1, 2), ratio(-1, 4), ratio(1, 2), ratio(1, 4)])
                .unwrap(),
            BaseSchedule::new(
                vec![4, 2],
                Tail::Periodic {
                    segment: vec![3, 4],
                },
            )
            .unwrap(),
        ),
    ];
    for i in 0..50 {
        let (p, s) = &setups[i % setups.len()];
        let q = p.schedule().constant_base().unwrap();
        let ctx = ProjectionContext::new(s.clone(), q).unwrap();
        let len = rng.gen_range(0..14);
        let w = random_word(&mut rng, s, len);
        let terms = rng.gen_range(1..18);
        let c = p
            .composition_check(&ctx, &w, terms)
            .map_err(|e| e.to_string())?;
        ensure(c.terms_equal(), || format!("{w} terms={terms}"))?;
    }
    Ok("50 words, identical term lists".into())
}

fn c12_g_bijection() -> Outcome {
    let mut rng = rng(12);
    let alphabets: Vec<BlockAlphabet> = [(5, 0), (5, 2), (6, 5), (8, 3)]
        .iter()
        .map(|&(q, u)| BlockAlphabet::new(q, u).unwrap())
        .collect();
    for i in 0..500 {
        let a = &alphabets[i % alphabets.len()];
        let len = rng.gen_range(0..10);
        let w = a.random_word(&mut rng, len);
        let back = a
            .parse_blocks(&w.expand_blocks())
            .map_err(|e| e.to_string())?;
        ensure(back == w, || w.to_string())?;
    }
    let q5 = |u| BlockAlphabet::new(5, u).unwrap();
    let digits = |d: &[u32]| QaryDigits::new(5, d.to_vec(), TailKind::Zero).unwrap();
    let errors = [
        q5(0).parse_blocks(&digits(&[3])),
        q5(2).parse_blocks(&digits(&[2, 3])),
        q5(0).parse_blocks(&digits(&[0, 2, 0])),
    ];
    let names: Vec<&str> = errors
        .iter()
        .map(|e| e.as_ref().map_or_else(|e| e.name(), |_| "accepted"))
        .collect();
    ensure(
        names == ["MalformedBlock", "MalformedBlock", "TrailingPartialBlock"],
        || format!("{names:?}"),
    )?;
    let ok = q5(0)
        .parse_blocks(&digits(&[0, 0, 3, 0, 2, 1]))
        .map_err(|e| e.to_string())?;
    ensure(ok.alphas() == [3, 2, 1], || ok.to_string())?;

    for i in 0..500 {
        let a = &alphabets[i % alphabets.len()];
        let len = rng.gen_range(0..10);
        let w = a.random_word(&mut rng, len);
        let (y, rem) = QaryDigits::encode(&w.eval_g(), a.q(), len).map_err(|e| e.to_string())?;
        ensure(rem.is_zero() && y.digits() == w.alphas(), || {
            format!("{w}: image {y}")
        })?;
        ensure(a.invert_g(&y).map_err(|e| e.to_string())? == w, || {
            w.to_string()
        })?;
    }
    Ok("500 round trips, 3 parse errors, 500 inversions".into())
}

fn c13_g_shift() -> Outcome {
    let mut rng = rng(13);
    for _ in 0..200 {
        let q = rng.gen_range(4..10);
        let a = BlockAlphabet::new(q, rng.gen_range(0..q)).unwrap();
        let len = rng.gen_range(0..10);
        let w = a.random_word(&mut rng, len);
        let n = rng.gen_range(0..=len);
        let (l, r) = w.g_shift_commutation(n).map_err(|e| e.to_string())?;
        ensure(l == r, || format!("{w} n={n}"))?;
    }
    Ok("200 (w, n) pairs".into())
}

fn c14_monotonicity() -> Outcome {
    let mut summary = Vec::new();
    for (q, u) in [(5, 0), (5, 1), (5, 3), (5, 4), (6, 2), (4, 2), (4, 0)] {
        let a = BlockAlphabet::new(q, u).unwrap();
        let r = a.monotonicity_probe(1000, 14, Strategy::default());
        ensure(r.consistent(), || format!("q={q} u={u}: {r:?}"))?;
        if r.class == MonotonicityClass::NonMonotone {
            summary.push(format!("({q},{u}) {}+/{}-", r.concordant, r.discordant));
        }
    }
    Ok(format!(
        "7 alphabets consistent; non-monotone {}",
        summary.join(", ")
    ))
}

fn c15_dimension() -> Outcome {
    let mut rng = rng(15);
    for _ in 0..20 {
        let q = rng.gen_range(4..16);
        let a = BlockAlphabet::new(q, rng.gen_range(0..q)).unwrap();
        let d = dimension::dimension_dg(&a, 1e-12).map_err(|e| e.to_string())?;
        ensure(d.residual < 1e-12, || {
            format!("{a}: residual {}", d.residual)
        })?;
    }
    // Pinned from an independent bisection on x + x^2 + x^3 + x^4 = 1, x = 5^-α.
    const ORACLE: f64 = 0.407_754_765_913_560_25;
    let d = dimension::dimension_dg(&BlockAlphabet::new(5, 0).unwrap(), 1e-12)
        .map_err(|e| e.to_string())?;
    ensure((d.value - ORACLE).abs() < 1e-3, || {
        format!("D(g) = {}", d.value)
    })?;
    let e = dimension::dimension_eg(&BlockAlphabet::new(5, 2).unwrap());
    let log5_3 = 3f64.ln() / 5f64.ln();
    ensure((e - log5_3).abs() < 1e-12, || format!("E(g) = {e}"))?;
    Ok(format!(
        "20 residuals < 1e-12; D(g) = {:.12}; E(g) = {e:.12}",
        d.value
    ))
}

fn c16_box_counting() -> Outcome {
    let start = Instant::now();
    let s = Strategy::default();
    let q50 = BlockAlphabet::new(5, 0).unwrap();
    let q52 = BlockAlphabet::new(5, 2).unwrap();
    let count = |a: &BlockAlphabet, m| {
        dimension::box_count_graph(a, m, DEFAULT_BUDGET, s).map(|r| r.box_count)
    };
    let got = [count(&q50, 1), count(&q52, 1), count(&q50, 2)];
    let got: Vec<u64> = got
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(got == [4, 3, 16], || format!("{got:?}"))?;
    let g = dimension::graph_dimension_estimate(&q50, 2, 5, DEFAULT_BUDGET, s)
        .map_err(|e| e.to_string())?;
    ensure((0.8..=1.2).contains(&g.slope), || {
        format!("slope {}", g.slope)
    })?;
    let c = dimension::identity_dimension_estimate(5, 2, 5, DEFAULT_BUDGET, s)
        .map_err(|e| e.to_string())?;
    ensure((0.95..=1.05).contains(&c.slope), || {
        format!("calibration {}", c.slope)
    })?;
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "counts 4/3/16, slope {:.4}, calibration {:.4}, {:?}",
        g.slope,
        c.slope,
        start.elapsed()
    ))
}

fn c17_cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cantor-lab");
    let exec = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())
    };
    let representative: [&[&str]; 5] = [
        &[
            "convert",
            "--schedule",
            r#"{"prefix":[],"tail":{"kind":"constant","value":2}}"#,
            "--value",
            "5/8",
            "--digits",
            "8",
        ],
        &[
            "--format",
            "json",
            "probe-f",
            "--schedule",
            "Q[2;c3]",
            "--q",
            "3",
            "--depth",
            "6",
        ],
        &["--format", "csv", "boxcount", "--q", "5", "--u", "0"],
        &["dim", "--q", "5", "--u", "0", "--tol", "1e-12"],
        &[
            "--float",
            "eval-salem",
            "--matrix",
            r#"{"tail":{"kind":"constant","column":["3/10","7/10"]}}"#,
            "--value",
            "1/3",
        ],
    ];
    for args in representative {
        let (a, b) = (exec(args)?, exec(args)?);
        ensure(a.status.success(), || {
            format!("{args:?}: {}", String::from_utf8_lossy(&a.stderr))
        })?;
        ensure(a.stdout == b.stdout && a.stderr == b.stderr, || {
            format!("{args:?} differs between runs")
        })?;
    }
    ensure(OPERATIONS.len() == 35, || {
        format!("{} operations in dispatch table", OPERATIONS.len())
    })?;
    for (op, args) in OPERATIONS {
        let out = exec(args)?;
        ensure(out.status.success(), || {
            format!("{op}: {}", String::from_utf8_lossy(&out.stderr))
        })?;
    }
    let encode = exec(representative[0])?;
    let text = String::from_utf8_lossy(&encode.stdout);
    ensure(
        text.lines()
            .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["word", "1.0.1"]),
        || text.to_string(),
    )?;
    Ok("5 commands byte-identical; 35 operations reachable".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 17] = [
        ("codec round trip", c01_codec_round_trip),
        ("shift identity", c02_shift_identity),
        ("identity degeneration", c03_identity_degeneration),
        ("jump formula", c04_jump_formula),
        ("symmetry", c05_symmetry),
        ("strict monotonicity", c06_strict_monotonicity),
        ("integral", c07_integral),
        ("derivative trichotomy", c08_derivative_trichotomy),
        ("salem values", c09_salem_values),
        ("hypothesis checker", c10_hypothesis_vectors),
        ("composition identity", c11_composition),
        ("g parser and bijection", c12_g_bijection),
        ("g shift commutation", c13_g_shift),
        ("monotonicity classes", c14_monotonicity),
        ("dimension solver", c15_dimension),
        ("box counting", c16_box_counting),
        ("cli determinism", c17_cli),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
