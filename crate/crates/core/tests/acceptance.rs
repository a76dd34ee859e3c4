//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test -p hhverify --test acceptance -- --nocapture`.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use hhverify::bounds::{self, Variant};
use hhverify::classify::{self, ClassParams, ClassVerdict, ClassifyOptions};
use hhverify::funcspec::{self, FamilySpec};
use hhverify::means::{arithmetic_mean, geometric_mean, logarithmic_mean};
use hhverify::quadrature::{self, Interval};
use hhverify::verify::{self, HypothesisStatus, SweepGrid, SweepOptions, Theorem, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in [0.5f64, 1.0, 2.0] {
        let f = funcspec::parse(&format!("exp({k}*x)")).unwrap();
        for m in [0.5, 1.0] {
            let params = ClassParams::new(1.0, m).unwrap();
            let opts = verify::VerifyOptions { check_hypothesis: false, ..Default::default() };
            let r = verify::verify_theorem(Theorem::Eq4, Variant::Corrected, &f, unit(), params, &opts);
            let margin = r.margin.ok_or_else(|| format!("k={k} m={m}: no margin"))?;
            ensure(margin.abs() <= 1e-8, || format!("k={k} m={m}: margin {margin:e}"))?;
            let closed = (k.exp() - 1.0) / k;
            let lhs = r.lhs.unwrap();
            ensure((lhs - closed).abs() <= 1e-8, || format!("k={k}: lhs {lhs} vs {closed}"))?;
            worst = worst.max(margin.abs());
        }
    }
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("max |margin| {worst:.1e} in {took:.1?}"))
}

fn criterion_2() -> Outcome {
    let f = funcspec::parse("exp(x)").unwrap();
    let chain = bounds::chain_dr2(&f, unit(), verify::DEFAULT_TOL).map_err(|e| e.to_string())?;
    let expected = [1.6487213, 1.6487213, 1.6487213, 1.7182818, 1.7182818, 1.8591409];
    let got = chain.values();
    for (i, (&g, &e)) in got.iter().zip(&expected).enumerate() {
        ensure((g - e).abs() <= 1e-7, || format!("term {i}: {g} vs {e}"))?;
    }
    for w in got.windows(2) {
        ensure(w[1] >= w[0] - 1e-9, || format!("chain decreases: {} > {}", w[0], w[1]))?;
    }
    Ok(format!("{got:.7?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let phi: f64 = rng.gen_range(f64::EPSILON..1.0);
        let w = 10f64.powf(rng.gen_range(-3.0..3.0));
        let factor = bounds::exp_mean_factor(phi, 1.0).map_err(|e| e.to_string())?;
        let lhs = w * factor.value().ok_or("factor inapplicable for phi < 1")?;
        let rhs = logarithmic_mean(w * phi, w).map_err(|e| e.to_string())?;
        let rel = (lhs - rhs).abs() / w;
        ensure(rel <= 1e-12, || format!("phi={phi} w={w}: {lhs} vs {rhs}"))?;
        worst = worst.max(rel);
    }
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("10000 pairs, max error {worst:.1e}·w in {took:.1?}"))
}

/// Corpus for the gated sweep: 19 functions, left endpoints on a fine grid
/// in [0, 2) and right endpoints in {0.5, 1, 1.5, 2} (40 intervals), and six
/// values each of m and alpha. Classification cost grows with the number of
/// distinct right endpoints, so those stay few.
fn corpus_grid() -> SweepGrid {
    let mut families = Vec::new();
    for c in [0.25, 0.5, 0.75, 1.0, 1.5] {
        families.push(FamilySpec::new("const", [("c", c)]));
    }
    for k in [-1.0, -0.5, 0.5, 1.0, 2.0] {
        families.push(FamilySpec::new("exp_linear", [("k", k)]));
    }
    for c in [0.5, 1.0, 1.5] {
        for k in [-1.0, 0.5, 1.5] {
            families.push(FamilySpec::new("exp_affine", [("c", c), ("k", k)]));
        }
    }
    let a: Vec<f64> = (0..16).map(|i| i as f64 * 0.125).collect();
    let unit_values = vec![0.2, 0.4, 0.5, 0.6, 0.8, 1.0];
    SweepGrid {
        families,
        a,
        b: vec![0.5, 1.0, 1.5, 2.0],
        alpha: unit_values.clone(),
        m: unit_values,
        theorems: vec![Theorem::Eq4, Theorem::Eq11, Theorem::Eq22, Theorem::Eq31, Theorem::Eq42],
        variant: Variant::Corrected,
    }
}

fn gated_sweep_json() -> Result<(String, String), String> {
    let grid = corpus_grid();
    let opts = SweepOptions { check_hypothesis: true, ..Default::default() };
    let summary = verify::sweep(&grid, &opts).map_err(|e| e.to_string())?;
    let mut points = std::collections::BTreeSet::new();
    let mut gated = 0usize;
    for r in &summary.reports {
        if r.hypothesis.status != HypothesisStatus::Pass {
            continue;
        }
        gated += 1;
        let p = &r.params;
        points.insert(format!("{}|{}|{}|{}|{}", p.family.as_ref().unwrap(), p.a, p.b, p.alpha, p.m));
        ensure(matches!(r.verdict, Verdict::Holds | Verdict::Inapplicable), || {
            format!("{} {:?} at {:?}: margin {:?}", r.theorem, r.verdict, r.params, r.margin)
        })?;
    }
    ensure(points.len() >= 10_000, || format!("only {} certified corpus points", points.len()))?;
    let json = serde_json::to_string(&summary).map_err(|e| e.to_string())?;
    Ok((json, format!("{} certified points, {gated} gated reports all hold", points.len())))
}

/// Criterion 4's sweep output, compared against a rerun by criterion 8.
static FIRST_SWEEP: OnceLock<String> = OnceLock::new();

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (json, detail) = gated_sweep_json()?;
    let _ = FIRST_SWEEP.set(json);
    let took = within(start, Duration::from_secs(60))?;
    Ok(format!("{detail} in {took:.1?}"))
}

fn criterion_5() -> Outcome {
    let f = funcspec::parse("0.5").unwrap();
    let params = ClassParams::new(1.0, 1.0).unwrap();
    let opts = verify::VerifyOptions::default();
    for theorem in [Theorem::Eq22, Theorem::Eq42] {
        let printed = verify::verify_theorem(theorem, Variant::Printed, &f, unit(), params, &opts);
        let (lhs, rhs, margin) = (printed.lhs.unwrap(), printed.rhs.unwrap(), printed.margin.unwrap());
        ensure((lhs - 0.5).abs() <= 1e-12 && (rhs - 0.25).abs() <= 1e-12, || {
            format!("{theorem} printed: lhs {lhs}, rhs {rhs}")
        })?;
        ensure((margin + 0.25).abs() <= 1e-12, || format!("{theorem} printed margin {margin}"))?;
        ensure(printed.verdict == Verdict::Violated, || format!("{theorem} printed: {:?}", printed.verdict))?;
        let corrected = verify::verify_theorem(theorem, Variant::Corrected, &f, unit(), params, &opts);
        let mc = corrected.margin.unwrap();
        ensure(mc.abs() <= 1e-10, || format!("{theorem} corrected margin {mc}"))?;
        ensure(corrected.verdict == Verdict::Holds, || format!("{theorem} corrected: {:?}", corrected.verdict))?;
    }
    Ok("printed eq22/eq42 violated at margin -0.25, corrected equal".into())
}

fn classifier_reports() -> Result<(String, String), String> {
    let opts = ClassifyOptions::default();
    let exp = funcspec::parse("exp(x)").unwrap();
    let mut reports = Vec::new();
    for i in 1..=10 {
        let m = i as f64 / 10.0;
        let r = classify::check_m_log_convex(&exp, 2.0, m, &opts).map_err(|e| e.to_string())?;
        ensure(r.verdict == ClassVerdict::Pass, || format!("exp(x) refuted for m={m}"))?;
        reports.push(r);
    }

    let quad = funcspec::parse("x^2+1").unwrap();
    let r = classify::check_m_log_convex(&quad, 2.0, 1.0, &opts).map_err(|e| e.to_string())?;
    let w = r.worst_violation.ok_or("x^2+1 was not refuted")?;
    let (lhs, rhs) =
        classify::evaluate_triple(&quad, ClassParams::new(1.0, 1.0).unwrap(), w.x, w.y, w.t).map_err(|e| e.to_string())?;
    ensure(lhs > rhs * (1.0 + opts.tol_rel), || format!("x^2+1 witness does not replay: {lhs} vs {rhs}"))?;
    reports.push(r);

    let params = ClassParams::new(0.5, 1.0).unwrap();
    let r = classify::check_alpha_m_log_convex(&exp, 2.0, params, &opts).map_err(|e| e.to_string())?;
    let w = r.worst_violation.ok_or("exp(x) not refuted for alpha=0.5")?;
    ensure(w.x < w.y, || format!("witness has x={} >= y={}", w.x, w.y))?;
    let (lhs, rhs) = classify::evaluate_triple(&exp, params, w.x, w.y, w.t).map_err(|e| e.to_string())?;
    ensure(lhs > rhs * (1.0 + opts.tol_rel), || format!("alpha witness does not replay: {lhs} vs {rhs}"))?;
    reports.push(r);

    let json = serde_json::to_string(&reports).map_err(|e| e.to_string())?;
    Ok((json, "exp(x) certified for m=0.1..1; x^2+1 and (0.5,1) witnesses replay".into()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (_, detail) = classifier_reports()?;
    let took = within(start, Duration::from_secs(10))?;
    Ok(format!("{detail} in {took:.1?}"))
}

fn criterion_7() -> Outcome {
    let cubic = |x: f64| 2.0 * x * x * x - 3.0 * x * x + 0.5 * x + 4.0;
    let antideriv = |x: f64| 0.5 * x.powi(4) - x.powi(3) + 0.25 * x * x + 4.0 * x;
    for (a, b) in [(0.0, 1.0), (0.3, 2.7), (1.0, 5.0)] {
        let iv = Interval::new(a, b).unwrap();
        let r = quadrature::integrate_fn(cubic, iv, 1e-10).map_err(|e| e.to_string())?;
        let exact = antideriv(b) - antideriv(a);
        ensure((r.value - exact).abs() <= 1e-13 * exact.abs().max(1.0), || {
            format!("cubic on [{a},{b}]: {} vs {exact}", r.value)
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let p = 10f64.powf(rng.gen_range(-6.0..6.0));
        let q = 10f64.powf(rng.gen_range(-6.0..6.0));
        let (g, l, a) = (geometric_mean(p, q), logarithmic_mean(p, q).unwrap(), arithmetic_mean(p, q));
        ensure(g <= l * (1.0 + 1e-12) && l <= a * (1.0 + 1e-12), || format!("G<=L<=A fails at ({p}, {q})"))?;
    }

    for _ in 0..1_000 {
        let p = 10f64.powf(rng.gen_range(-300.0..300.0));
        let l = logarithmic_mean(p, p).unwrap();
        ensure(l == p, || format!("L({p},{p}) = {l}"))?;
    }
    Ok("cubic exactness, G<=L<=A on 10000 pairs, L(p,p)=p".into())
}

fn criterion_8() -> Outcome {
    let sweep_a = match FIRST_SWEEP.get() {
        Some(json) => json.clone(),
        None => gated_sweep_json()?.0,
    };
    let (sweep_b, _) = gated_sweep_json()?;
    ensure(sweep_a == sweep_b, || "sweep JSON differs between runs".into())?;
    let (class_a, _) = classifier_reports()?;
    let (class_b, _) = classifier_reports()?;
    ensure(class_a == class_b, || "classifier JSON differs between runs".into())?;
    Ok(format!("{} + {} bytes identical", sweep_a.len(), class_a.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 equality family", criterion_1),
        ("2 dr2 chain values", criterion_2),
        ("3 log-mean identity", criterion_3),
        ("4 hypothesis-gated sweep", criterion_4),
        ("5 printed counterexample", criterion_5),
        ("6 classifier certificates", criterion_6),
        ("7 numeric kernels", criterion_7),
        ("8 determinism", criterion_8),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                println!("FAIL criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
