//! Acceptance suite: one pass/fail line per criterion.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use cxhyp::boundary::{cartan_invariant, cross_ratio_count, invariant_vector, tuples_congruent, BoundaryPoint, BoundaryTuple};
use cxhyp::fixtures::multiplicity_pair;
use cxhyp::form::{form, form_matrix, su_residuals, Isometry};
use cxhyp::json::{matrix_from_value, matrix_to_value};
use cxhyp::linalg::{frob, CMatrix, CVector, C64};
use cxhyp::loxodromic::{
    char_poly, eigenframe, is_regular, isometry_from_eigenpoints, same_element_class, Eigenframe,
};
use cxhyp::pair::{
    canonical_eigenpoint, global_scalar_deviation, is_nonsingular, make_pair, normalize_nonsingular_randomized,
    pairs_conjugate, reference_eigenpoint, reference_invariants, LoxodromicPair,
};
use cxhyp::random::{
    loxodromic_from_params, random_loxodromic, random_null_vector, random_params, random_su, random_su_with,
    seeded_rng, LoxodromicParams, SeededRng,
};
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

/// Largest `|⟨p,p⟩|` over every eigenpoint lift built by any criterion.
static NULL_DEFECT: AtomicU64 = AtomicU64::new(0);
static NULL_COUNT: AtomicUsize = AtomicUsize::new(0);

fn record_null(lifts: &[CVector]) {
    for p in lifts {
        let d = form(p, p).norm();
        // non-negative floats order like their bit patterns
        NULL_DEFECT.fetch_max(d.to_bits(), Ordering::Relaxed);
    }
    NULL_COUNT.fetch_add(lifts.len(), Ordering::Relaxed);
}

fn record_frame(f: &Eigenframe) {
    record_null(&f.eigenpoint_lifts());
}

fn record_tuple(t: &BoundaryTuple) {
    let lifts: Vec<CVector> = t.points().iter().map(|p| p.lift().clone()).collect();
    record_null(&lifts);
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn random_pair(n: usize, rng: &mut SeededRng) -> Result<LoxodromicPair, String> {
    for _ in 0..100 {
        let a = lift(random_loxodromic(n, rng), "random element")?.element;
        let b = lift(random_loxodromic(n, rng), "random element")?.element;
        if let Ok(p) = make_pair(a, b) {
            return Ok(p);
        }
    }
    Err("no valid random pair in 100 draws".into())
}

fn form_preservation() -> Outcome {
    let start = Instant::now();
    let (mut worst_form, mut worst_det) = (0.0f64, 0.0f64);
    for n in 2..=5 {
        for s in 0..1000 {
            let a = lift(random_su(n, 10_000 * n as u64 + s), "random_su")?;
            let (f, d) = su_residuals(a.matrix());
            let scale = frob(a.matrix()).powi(2);
            worst_form = worst_form.max(f / scale);
            worst_det = worst_det.max(d);
        }
    }
    let elapsed = start.elapsed();
    ensure(worst_form < 1e-9, || format!("form residual {worst_form:e}·‖A‖²"))?;
    ensure(worst_det < 1e-9, || format!("det residual {worst_det:e}"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "4000 elements, form ≤ {worst_form:.1e}·‖A‖², det ≤ {worst_det:.1e}, {elapsed:.2?}"
    ))
}

fn self_inversive() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=5 {
        let mut rng = seeded_rng(20_000 + n as u64);
        for _ in 0..500 {
            let a = lift(random_su_with(n, &mut rng), "random_su")?;
            worst = worst.max(char_poly(&a).self_inversive_defect());
            let l = lift(random_loxodromic(n, &mut rng), "random element")?.element;
            worst = worst.max(char_poly(&l).self_inversive_defect());
        }
    }
    ensure(worst < 1e-9, || format!("defect {worst:e}"))?;
    Ok(format!("4000 elements, max defect {worst:.1e}"))
}

/// A loxodromic whose unit-circle eigenvalues include a repeated one.
fn repeated_params(n: usize, rng: &mut SeededRng) -> LoxodromicParams {
    let phi = rng.random_range(-PI..PI);
    let mut phis = vec![phi, phi];
    phis.extend((2..n - 1).map(|_| rng.random_range(-PI..PI)));
    let theta = -phis.iter().sum::<f64>() / 2.0;
    LoxodromicParams {
        r: rng.random_range(1.5..3.0),
        theta,
        phis,
    }
}

fn regularity_equivalence() -> Outcome {
    let mut agreed = 0;
    let mut worst_im = 0.0f64;
    let mut worst_repeated = 0.0f64;
    for n in 2..=4 {
        let mut rng = seeded_rng(30_000 + n as u64);
        for _ in 0..1000 {
            let params = random_params(n, 0.05, &mut rng);
            // oracle from the construction: r > 1 and distinct phases
            let expected = params.r > 1.0 && params.min_gap() > 0.0;
            let a = lift(loxodromic_from_params(params, &mut rng), "random element")?.element;
            let reg = lift(is_regular(&a), "is_regular")?;
            ensure(reg.regular == expected, || format!("n={n}: resultant test says {}", reg.regular))?;
            let ratio = reg.resultant.im.abs() / reg.resultant.norm();
            ensure(ratio <= 1e-6, || format!("n={n}: |Im R|/|R| = {ratio:e}"))?;
            worst_im = worst_im.max(ratio);
            agreed += 1;
        }
        if n >= 3 {
            for _ in 0..200 {
                let a = lift(loxodromic_from_params(repeated_params(n, &mut rng), &mut rng), "element")?.element;
                let reg = lift(is_regular(&a), "is_regular on repeated")?;
                ensure(!reg.regular, || format!("n={n}: repeated eigenvalue read as regular"))?;
                let rel = reg.resultant.norm() / reg.scale;
                ensure(rel < 1e-6, || format!("n={n}: |R| = {rel:e}·scale for a repeated eigenvalue"))?;
                worst_repeated = worst_repeated.max(rel);
            }
        }
    }
    Ok(format!(
        "{agreed}/3000 agree, max |Im R|/|R| {worst_im:.1e}; 400 repeated with |R| ≤ {worst_repeated:.1e}·scale"
    ))
}

/// Sorted eigenvalues of the diagonal form.
fn spectrum(p: &LoxodromicParams) -> Vec<C64> {
    let mut v: Vec<C64> = p.diagonal().diagonal().iter().copied().collect();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn same_spectrum(p: &LoxodromicParams, q: &LoxodromicParams) -> bool {
    if p.phis.len() != q.phis.len() {
        return false;
    }
    let (s, t) = (spectrum(p), spectrum(q));
    // multiset equality under a greedy nearest match
    let mut used = vec![false; t.len()];
    s.iter().all(|x| {
        match (0..t.len()).filter(|&j| !used[j]).min_by(|&i, &j| (t[i] - x).norm().total_cmp(&(t[j] - x).norm())) {
            Some(j) if (t[j] - x).norm() < 1e-9 => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

fn perturbed(p: &LoxodromicParams, rng: &mut SeededRng) -> LoxodromicParams {
    let delta: f64 = rng.random_range(1e-3..1e-1) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut q = p.clone();
    match rng.random_range(0..3) {
        0 => q.r *= 1.0 + delta.abs(),
        1 if q.phis.len() >= 2 => {
            q.phis[0] += delta;
            q.phis[1] -= delta;
        }
        _ => {
            q.theta += delta;
            if let Some(last) = q.phis.last_mut() {
                *last -= 2.0 * delta;
            } else {
                q.r *= 1.0 + delta.abs();
                q.theta = p.theta;
            }
        }
    }
    q
}

fn trace_criterion() -> Outcome {
    let mut rng = seeded_rng(40_000);
    let mut agree = 0;
    for i in 0..1000 {
        let n = 2 + i % 3;
        let p = random_params(n, 0.05, &mut rng);
        let sample = lift(loxodromic_from_params(p.clone(), &mut rng), "element")?;
        let (q, b) = if i % 2 == 0 {
            let c = lift(random_su_with(n, &mut rng), "random_su")?;
            (p.clone(), sample.element.conjugate_by(&c))
        } else {
            let q = perturbed(&p, &mut rng);
            let b = lift(loxodromic_from_params(q.clone(), &mut rng), "element")?.element;
            (q, b)
        };
        let oracle = same_spectrum(&p, &q);
        ensure(oracle == (i % 2 == 0), || format!("sample {i}: oracle disagrees with construction"))?;
        let got = lift(same_element_class(&sample.element, &b), "same_element_class")?;
        ensure(got == oracle, || format!("sample {i} (n={n}): same_element_class {got}, oracle {oracle}"))?;
        agree += 1;
    }
    Ok(format!("{agree}/1000 agree with the eigenvalue oracle (500 conjugate, 500 perturbed)"))
}

fn cartan_bounds() -> Outcome {
    let mut rng = seeded_rng(50_000);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 2 + i % 3;
        let pts: Vec<BoundaryPoint> = (0..3)
            .map(|_| BoundaryPoint::from_lift(random_null_vector(n, &mut rng)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let a = lift(cartan_invariant(&pts[0], &pts[1], &pts[2]), "cartan")?;
        worst = worst.max(a.abs());
    }
    for s in 0..50 {
        let pair = random_pair(2 + s % 3, &mut seeded_rng(50_100 + s as u64))?;
        let a = lift(reference_invariants(&pair), "profile")?.angular;
        worst = worst.max(a.abs());
    }
    ensure(worst <= FRAC_PI_2, || format!("|angle| reached {worst}"))?;

    let c = |re: f64, im: f64| C64::new(re, im);
    let pt = |v: [C64; 3]| BoundaryPoint::from_lift(CVector::from_column_slice(&v));
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let mover = lift(random_su(2, 50_001), "random_su")?;
    let chain = [pt([zero, zero, one]), pt([one, zero, zero]), pt([c(0.0, 1.0), zero, one])];
    let real = [pt([zero, zero, one]), pt([one, zero, zero]), pt([c(-0.5, 0.0), one, one])];
    let mut chain_err = 0.0f64;
    let mut real_err = 0.0f64;
    for moved in [false, true] {
        let get = |t: &[Result<BoundaryPoint, cxhyp::error::Error>; 3]| -> Result<f64, String> {
            let p: Vec<BoundaryPoint> = t
                .iter()
                .map(|x| x.clone().map(|b| if moved { b.mapped_by(&mover) } else { b }))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            lift(cartan_invariant(&p[0], &p[1], &p[2]), "cartan")
        };
        chain_err = chain_err.max((get(&chain)?.abs() - FRAC_PI_2).abs());
        real_err = real_err.max(get(&real)?.abs());
    }
    ensure(chain_err < 1e-9, || format!("same-chain triple off π/2 by {chain_err:e}"))?;
    ensure(real_err < 1e-9, || format!("totally real triple has |angle| {real_err:e}"))?;
    Ok(format!(
        "max |angle| {worst:.4} ≤ π/2; chain off by {chain_err:.1e}, real {real_err:.1e}"
    ))
}

fn congruence() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 2..=3 {
        let mut rng = seeded_rng(60_000 + n as u64);
        while count < 200 * (n - 1) {
            let m = 2 * n + 2;
            let lifts: Vec<CVector> = (0..m).map(|_| random_null_vector(n, &mut rng)).collect();
            let p = lift(BoundaryTuple::from_lifts(lifts), "tuple")?;
            if p.rank() < n + 1 {
                continue;
            }
            let c = lift(random_su_with(n, &mut rng), "random_su")?;
            let q = p.mapped_by(&c);
            let x = lift(tuples_congruent(&p, &q, 1e-7), "tuples_congruent")?
                .ok_or_else(|| format!("n={n}: congruent tuples reported as not congruent"))?;
            ensure(x.is_certified(), || "returned isometry is not certified".into())?;
            let d = p.mapped_by(&x).max_displacement(&q);
            ensure(d < 1e-7, || format!("n={n}: displacement {d:e}"))?;
            worst = worst.max(d);
            count += 1;
        }
    }
    Ok(format!("{count} tuples, max displacement {worst:.1e}"))
}

fn conjugation_residuals(x: &Isometry, p: &LoxodromicPair, q: &LoxodromicPair) -> f64 {
    let xi = x.inverse();
    [(p.a(), q.a()), (p.b(), q.b())]
        .iter()
        .map(|(m, t)| frob(&(x.matrix() * m.matrix() * &xi - t.matrix())))
        .fold(0.0, f64::max)
}

fn reconstruction() -> Outcome {
    let mut lines = Vec::new();
    for n in 2..=4 {
        let start = Instant::now();
        let mut worst = 0.0f64;
        for s in 0..200u64 {
            let mut rng = seeded_rng(80_000 + 1000 * n as u64 + s);
            let p = random_pair(n, &mut rng)?;
            let c = lift(random_su_with(n, &mut rng), "random_su")?;
            let q = lift(make_pair(p.a().conjugate_by(&c), p.b().conjugate_by(&c)), "conjugate pair")?;
            for f in [p.frame_a(), p.frame_b(), q.frame_a(), q.frame_b()] {
                record_frame(f);
            }
            let x = lift(pairs_conjugate(&p, &q, 1e-7), "pairs_conjugate")?
                .ok_or_else(|| format!("n={n}, sample {s}: reported not conjugate"))?;
            let r = conjugation_residuals(&x, &p, &q);
            ensure(r < 1e-7, || format!("n={n}, sample {s}: residual {r:e}"))?;
            worst = worst.max(r);
        }
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(60), || format!("n={n} took {elapsed:?}"))?;
        lines.push(format!("n={n}: {worst:.1e} in {elapsed:.1?}"));
    }
    // repeated polar eigenvalue: the centralizer search runs at its default budget
    let mut worst = 0.0f64;
    for s in 0..10u64 {
        let p = lift(multiplicity_pair(s), "multiplicity fixture")?;
        let q = p.transport(&lift(random_su(3, 81_000 + s), "random_su")?);
        let x = lift(pairs_conjugate(&p, &q, 1e-7), "pairs_conjugate on the multiplicity fixture")?
            .ok_or_else(|| format!("multiplicity fixture {s}: reported not conjugate"))?;
        let r = conjugation_residuals(&x, &p, &q);
        ensure(r < 1e-7, || format!("multiplicity fixture {s}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    lines.push(format!("multiplicity-2 fixtures: {worst:.1e}"));
    Ok(format!("200 pairs per n, max residual {}", lines.join(", ")))
}

fn nonsingular_uniqueness() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=4 {
        let mut rng = seeded_rng(90_000 + n as u64);
        let mut found = 0;
        let mut draws = 0;
        while found < 100 {
            draws += 1;
            ensure(draws < 10_000, || format!("n={n}: too few non-singular pairs"))?;
            let p = random_pair(n, &mut rng)?;
            if !is_nonsingular(&p) {
                continue;
            }
            let seed = rng.random::<u64>();
            let u = lift(normalize_nonsingular_randomized(&p, seed), "normalize")?;
            let v = lift(normalize_nonsingular_randomized(&p, seed ^ 0x9e37_79b9), "normalize")?;
            record_null(&u.lifts);
            record_null(&v.lifts);
            let (omega, dev) = global_scalar_deviation(&u.lifts, &v.lifts);
            ensure((omega.norm() - 1.0).abs() < 1e-12, || "scalar is not unimodular".into())?;
            ensure(dev < 1e-8, || format!("n={n}: runs differ by {dev:e} after the best scalar"))?;
            worst = worst.max(dev);
            found += 1;
        }
    }
    Ok(format!("200 pairs, max deviation {worst:.1e}"))
}

fn cross_ratio_counts() -> Outcome {
    let mut profiles = 0;
    for n in 2..=5 {
        for s in 0..20u64 {
            let p = random_pair(n, &mut seeded_rng(100_000 + 100 * n as u64 + s))?;
            let point = lift(reference_eigenpoint(&p, s), "reference eigenpoint")?;
            record_tuple(&point.tuple);
            if let Ok(c) = canonical_eigenpoint(&p) {
                record_null(&c.lifts());
            }
            let profile = lift(reference_invariants(&p), "profile")?;
            if profile.t == 2 * n + 2 {
                let want = (n + 1) * (2 * n - 1);
                ensure(profile.cross.len() == want, || {
                    format!("n={n}: {} cross ratios, expected {want}", profile.cross.len())
                })?;
                profiles += 1;
            }
        }
    }
    let mut rng = seeded_rng(100_001);
    for m in 3..=14 {
        let n = (m / 2).max(2);
        let lifts: Vec<CVector> = (0..m).map(|_| random_null_vector(n, &mut rng)).collect();
        let t = lift(BoundaryTuple::from_lifts(lifts), "tuple")?;
        let iv = lift(invariant_vector(&t), "invariant vector")?;
        ensure(iv.len() == cross_ratio_count(m), || format!("m={m}: count mismatch"))?;
        ensure(2 * iv.len() + 1 == m * (m - 3) + 1, || format!("m={m}: 2·len+1 = {}", 2 * iv.len() + 1))?;
    }
    ensure(profiles > 0, || "no profile with t = 2n+2".into())?;
    Ok(format!("{profiles} profiles with (n+1)(2n−1) entries; m = 3..14 dimension identity"))
}

fn rigidity() -> Outcome {
    let mut worst = 0.0f64;
    for s in 0..100u64 {
        let n = 2 + (s % 3) as usize;
        let mut rng = seeded_rng(110_000 + s);
        let a = lift(random_loxodromic(n, &mut rng), "element")?.element;
        let c = lift(random_su_with(n, &mut rng), "random_su")?;
        let moved = a.conjugate_by(&c);
        let f = lift(eigenframe(&a), "eigenframe")?;
        let g = lift(eigenframe(&moved), "eigenframe")?;
        record_frame(&f);
        record_frame(&g);
        let (src, dst) = (f.eigenpoints(), g.eigenpoints());
        let x = lift(isometry_from_eigenpoints(&src[..n], &dst[..n]), "isometry from eigenpoints")?;
        // the last polar vector is not among the matched points
        let last = f.x().last().expect("n ≥ 2").clone();
        let target = g.x().last().expect("n ≥ 2").clone();
        let (omega, dev) = global_scalar_deviation(&[x.apply(&last)], &[target]);
        ensure((omega.norm() - 1.0).abs() < 1e-12, || "scalar is not unimodular".into())?;
        let xi = x.inverse();
        let conj = frob(&(x.matrix() * a.matrix() * &xi - moved.matrix())) / frob(moved.matrix()).max(1.0);
        let d = dev.max(conj);
        ensure(d < 1e-8, || format!("sample {s} (n={n}): polar deviation {dev:e}, element residual {conj:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("100 frame pairs, max deviation {worst:.1e}"))
}

fn nullity() -> Outcome {
    let worst = f64::from_bits(NULL_DEFECT.load(Ordering::Relaxed));
    let count = NULL_COUNT.load(Ordering::Relaxed);
    ensure(count > 0, || "no eigenpoints recorded".into())?;
    ensure(worst < 1e-9, || format!("|<p,p>| reached {worst:e}"))?;
    Ok(format!("{count} eigenpoints, max |<p,p>| {worst:.1e}"))
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cxhyp"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("cxhyp {args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn cli_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let pair_path = dir.path().join("pair.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["random", "--kind", "element", "--n", "3", "--seed", "1"],
        vec!["random", "--kind", "pair", "--n", "2", "--seed", "5"],
        vec!["random", "--kind", "nonsingular-pair", "--n", "4", "--seed", "9"],
    ];
    for args in &runs {
        ensure(cli(args)? == cli(args)?, || format!("{args:?} is not byte-identical"))?;
    }
    let text = cli(&runs[1])?;
    std::fs::write(&pair_path, &text).map_err(|e| e.to_string())?;
    let path = pair_path.to_str().expect("utf-8 path");
    for mode in ["reference", "canonical", "nonsingular", "goodI"] {
        let args = ["pair", "--mode", mode, path];
        ensure(cli(&args)? == cli(&args)?, || format!("pair --mode {mode} is not byte-identical"))?;
    }
    let verdict = ["conjugate-test", path, path];
    ensure(cli(&verdict)? == cli(&verdict)?, || "conjugate-test is not byte-identical".into())?;

    // matrices and reports survive a trip through the wire format
    let doc: Value = serde_json::from_slice(&text).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (key, report) in [("A", "reportA"), ("B", "reportB")] {
        let m = lift(matrix_from_value(&doc[key]), "matrix")?;
        let again = lift(matrix_from_value(&matrix_to_value(&m)), "matrix")?;
        worst = worst.max(max_diff(&m, &again));
        let inline = serde_json::to_string(&doc[key]).map_err(|e| e.to_string())?;
        let classified: Value =
            serde_json::from_slice(&cli(&["classify", "--inline", &inline])?).map_err(|e| e.to_string())?;
        worst = worst.max(value_diff(&classified, &doc[report])?);
    }
    ensure(worst <= 1e-12, || format!("round-trip deviation {worst:e}"))?;
    let v: Value = serde_json::from_slice(&cli(&verdict)?).map_err(|e| e.to_string())?;
    ensure(v["verdict"] == "yes", || format!("self-conjugacy verdict {}", v["verdict"]))?;
    let x = lift(matrix_from_value(&v["conjugator"]), "conjugator")?;
    let h = form_matrix(x.nrows());
    ensure(frob(&(x.adjoint() * &h * &x - &h)) < 1e-9, || "conjugator does not preserve the form".into())?;
    Ok(format!("{} commands byte-identical, round-trip deviation {worst:.1e}", runs.len() + 5))
}

/// Largest numeric difference between two JSON values of the same shape.
fn value_diff(a: &Value, b: &Value) -> Result<f64, String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => Ok((x.as_f64().unwrap_or(f64::NAN) - y.as_f64().unwrap_or(f64::NAN)).abs()),
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).try_fold(0.0f64, |acc, (u, v)| Ok(acc.max(value_diff(u, v)?)))
        }
        (Value::Object(x), Value::Object(y)) if x.len() == y.len() => x.iter().try_fold(0.0f64, |acc, (k, u)| {
            let v = y.get(k).ok_or_else(|| format!("missing key {k}"))?;
            Ok(acc.max(value_diff(u, v)?))
        }),
        (x, y) if x == y => Ok(0.0),
        (x, y) => Err(format!("shape mismatch: {x} vs {y}")),
    }
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome);
    // nullity is read last because it aggregates the other suites
    let criteria: [Criterion; 12] = [
        (1, "form preservation", form_preservation),
        (2, "self-inversive characteristic polynomial", self_inversive),
        (3, "regularity equivalence", regularity_equivalence),
        (4, "trace conjugacy criterion", trace_criterion),
        (5, "Cartan bound and degeneracy", cartan_bounds),
        (6, "invariant-vector congruence", congruence),
        (8, "pair reconstruction", reconstruction),
        (9, "non-singular uniqueness", nonsingular_uniqueness),
        (10, "cross-ratio count", cross_ratio_counts),
        (11, "eigenpoint rigidity", rigidity),
        (12, "CLI determinism and round-trip", cli_round_trip),
        (7, "eigenpoint nullity", nullity),
    ];
    let mut results: Vec<(u32, &str, Outcome)> = criteria
        .iter()
        .map(|&(id, name, f)| {
            let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
            (id, name, outcome)
        })
        .collect();
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
