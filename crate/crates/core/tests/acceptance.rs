//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its runtime; the test fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use peakon_core::evolution::*;
use peakon_core::forward::*;
use peakon_core::interior::*;
use peakon_core::inverse::measure_from_spectral_data;
use peakon_core::{Error, InteriorData, PeakonMeasure, SpectralData, Tolerances};
use rand::Rng;

type Check = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn close_measures(a: &PeakonMeasure, b: &PeakonMeasure, rel: f64) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| {
            let s = a.omega()[i].abs().max(a.vee()[i]);
            (a.points()[i] - b.points()[i]).abs() <= rel * a.points()[i].abs().max(1.0)
                && (a.omega()[i] - b.omega()[i]).abs() <= rel * s
                && (a.vee()[i] - b.vee()[i]).abs() <= rel * s
        })
}

/// Interior data of `s` at `a` agree with `d` within `rel`, signs included.
fn reproduces(s: &PeakonMeasure, d: &InteriorData, rel: f64, tol: &Tolerances) -> std::result::Result<(), String> {
    let back = interior_data(s, d.a, tol).map_err(|e| e.to_string())?;
    ensure!(back.len() == d.len(), "{} eigenvalues instead of {}", back.len(), d.len());
    for i in 0..d.len() {
        ensure!(rel_close(back.eigenvalues[i], d.eigenvalues[i], rel), "lambda {} vs {}", back.eigenvalues[i], d.eigenvalues[i]);
        ensure!((back.phi[i] - d.phi[i]).abs() <= rel, "phi {} vs {}", back.phi[i], d.phi[i]);
        ensure!(d.phi[i] == 0.0 || back.phi[i].signum() == d.phi[i].signum(), "sign of phi_{i}");
    }
    Ok(())
}

// 1 -------------------------------------------------------------------------

fn single_peakon() -> Check {
    let m = PeakonMeasure::new(&[0.0], &[2.0], &[0.0]).unwrap();
    let l = eigenvalues(&m, &tol()).map_err(|e| e.to_string())?;
    ensure!(l.len() == 1 && (l[0] - 0.5).abs() <= 1e-12, "lambda = {l:?}");
    let d = interior_data(&m, 0.0, &tol()).unwrap();
    ensure!((d.phi[0] - 1.0).abs() <= 1e-12, "phi(0) = {}", d.phi[0]);
    let alpha = feasibility(&d.eigenvalues, &d.phi, &tol()).alpha;
    ensure!(alpha.abs() <= 1e-12, "alpha = {alpha}");
    for a in [-1.3, 0.0, 0.4, 2.0] {
        let data = InteriorData { a, eigenvalues: vec![0.5], phi: vec![(-0.5f64).exp()] };
        let out = enumerate_solutions(&data, &[], &tol()).map_err(|e| e.to_string())?;
        ensure!(out.len() == 2, "{} solutions at a = {a}", out.len());
        let mut xs = Vec::new();
        for o in &out {
            let s = o.result.as_ref().map_err(|e| e.to_string())?;
            ensure!(s.len() == 1, "{s:?}");
            xs.push(s.points()[0]);
        }
        xs.sort_by(f64::total_cmp);
        ensure!((xs[0] - (a - 1.0)).abs() <= 1e-9 && (xs[1] - (a + 1.0)).abs() <= 1e-9, "x = {xs:?} at a = {a}");
    }
    Ok("lambda = 0.5, phi(0) = 1, x1 = a +- 1 at four points".into())
}

// 2 -------------------------------------------------------------------------

/// Sign changes of the eigenfunction on a fine grid covering the support.
fn grid_zeros(m: &PeakonMeasure, lambda: f64) -> usize {
    let p = eigen_profile(m, lambda).0;
    let (lo, hi) = (m.points()[0], m.points()[m.len() - 1]);
    let mut xs: Vec<f64> = (0..=4000).map(|k| lo + (hi - lo) * k as f64 / 4000.0).collect();
    xs.extend(m.points());
    xs.sort_by(f64::total_cmp);
    let vals: Vec<f64> = xs.iter().map(|&x| p.eval(x).0).collect();
    let signs: Vec<f64> = vals.iter().filter(|v| **v != 0.0).map(|v| v.signum()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn oscillation() -> Check {
    let mut r = rng(1001);
    let mut with_v = 0;
    for case in 0..200 {
        let n = r.gen_range(1..=8);
        let m = random_measure(&mut r, n);
        let c = m.counts();
        with_v += (c.n_v > 0) as usize;
        let l = eigenvalues(&m, &tol()).map_err(|e| format!("case {case}: {e}"))?;
        let pos = l.iter().filter(|&&x| x > 0.0).count();
        let neg = l.iter().filter(|&&x| x < 0.0).count();
        ensure!((pos, neg) == (c.n_v + c.n_plus, c.n_v + c.n_minus), "case {case}: counts ({pos}, {neg}) for {c:?}");
        let dense = dense_eigenvalues(&m);
        ensure!(dense.len() == l.len(), "case {case}: dense pencil has {} eigenvalues", dense.len());
        for i in 0..l.len() {
            ensure!(rel_close(l[i], dense[i], 1e-8), "case {case}: {} vs dense {}", l[i], dense[i]);
            let want = ladder_rank(&l, i) - 1;
            let got = zero_count_at(&m, l[i]);
            let grid = grid_zeros(&m, l[i]);
            ensure!(got == want && grid == want, "case {case}: eigenvalue {} has {got} zeros ({grid} on grid), expected {want}", l[i]);
        }
    }
    ensure!(with_v >= 50, "only {with_v} measures carried v");
    Ok(format!("200 measures, {with_v} with v-points"))
}

// 3 -------------------------------------------------------------------------

fn roundtrip() -> Check {
    let mut r = rng(1002);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = r.gen_range(1..=6);
        let m = random_measure(&mut r, n);
        let sd = spectral_data(&m, &tol()).map_err(|e| format!("case {case}: {e}"))?;
        let back = measure_from_spectral_data(&sd, &tol()).map_err(|e| format!("case {case}: {e} for {m:?}"))?;
        ensure!(back.len() == m.len(), "case {case}: {back:?} vs {m:?}");
        for i in 0..m.len() {
            let s = m.omega()[i].abs().max(m.vee()[i]);
            worst = worst
                .max((back.points()[i] - m.points()[i]).abs() / m.points()[i].abs().max(1.0))
                .max((back.omega()[i] - m.omega()[i]).abs() / s)
                .max((back.vee()[i] - m.vee()[i]).abs() / s);
        }
        ensure!(worst <= 1e-6, "case {case}: error {worst:e} for {m:?}");
    }
    Ok(format!("100 measures, worst relative error {worst:.1e}"))
}

// 4 -------------------------------------------------------------------------

fn reference_points(r: &mut impl Rng, m: &PeakonMeasure) -> Vec<f64> {
    let p = m.points();
    let mut out = vec![p[0] - r.gen_range(0.1..2.0), p[p.len() - 1] + r.gen_range(0.1..2.0)];
    out.extend(p.iter().copied());
    for w in p.windows(2) {
        out.push(r.gen_range(w[0]..w[1]));
    }
    out
}

/// Count stated for data with no vanishing phi_i(a).
fn expected_count(regime: Regime, lambda: &[f64]) -> usize {
    let straddles = lambda[0] < 0.0 && lambda[lambda.len() - 1] > 0.0;
    match (regime, straddles) {
        (Regime::AlphaBetaZero, _) => 1,
        (Regime::AlphaZero, false) => 1,
        (Regime::AlphaZero, true) => 2,
        (Regime::AlphaNonzero, false) => 2,
        (Regime::AlphaNonzero, true) => 4,
    }
}

/// Sign patterns of |phi| accepted by the existence test, weighted by the
/// number of measures each one yields.
fn sign_enumeration(d: &InteriorData) -> u64 {
    let n = d.len();
    (0..1u32 << n)
        .map(|signs| {
            let phi: Vec<f64> = (0..n).map(|i| if signs >> i & 1 == 1 { -d.phi[i].abs() } else { d.phi[i].abs() }).collect();
            let cand = InteriorData { a: d.a, eigenvalues: d.eigenvalues.clone(), phi };
            if feasibility(&cand.eigenvalues, &cand.phi, &tol()).ok {
                solution_count(&cand, &tol()).unwrap().branches() as u64
            } else {
                0
            }
        })
        .sum()
}

fn interior_counts() -> Check {
    let mut r = rng(1004);
    let mut seen = std::collections::BTreeMap::new();
    let (mut verified, mut failed) = (0, Vec::new());
    for case in 0..60 {
        let n = r.gen_range(1..=4);
        let m = if case % 3 == 0 { random_positive_measure(&mut r, n) } else { random_measure(&mut r, n) };
        for a in reference_points(&mut r, &m) {
            let d = interior_data(&m, a, &tol()).unwrap();
            if d.len() > 6 || d.phi.iter().any(|p| p.abs() < 1e-6) {
                continue;
            }
            let report = feasibility(&d.eigenvalues, &d.phi, &tol());
            ensure!(report.ok, "forward data rejected: {report:?}");
            let want = expected_count(report.regime, &d.eigenvalues);
            let count = solution_count(&d, &tol()).map_err(|e| e.to_string())?;
            ensure!(count.dim() == 0 && count.branches() == want, "{count:?} for {:?}, expected {want}", report.regime);
            let moduli = modulus_family_count(&d, &tol()).map_err(|e| e.to_string())?;
            let exponent = match report.regime {
                Regime::AlphaBetaZero => d.len() - 2,
                Regime::AlphaZero => d.len() - 1,
                Regime::AlphaNonzero => d.len(),
            };
            ensure!(moduli == 1 << exponent, "modulus count {moduli} vs 2^{exponent} ({:?})", report.regime);
            ensure!(sign_enumeration(&d) == moduli, "sign enumeration disagrees with {moduli}");
            let straddles = d.eigenvalues[0] < 0.0 && d.eigenvalues[d.len() - 1] > 0.0;
            *seen.entry((format!("{:?}", report.regime), straddles)).or_insert(0) += 1;
            let out = enumerate_solutions(&d, &[], &tol()).map_err(|e| e.to_string())?;
            ensure!(out.len() == want, "{} branches enumerated", out.len());
            let mut found = false;
            for o in &out {
                match &o.result {
                    Ok(s) => {
                        reproduces(s, &d, 1e-6, &tol()).map_err(|e| format!("branch {} at a = {a}: {e}", o.branch))?;
                        found |= close_measures(&m, s, 1e-6);
                        verified += 1;
                    }
                    // near-coincident dipoles sit below the forward solver's resolution
                    Err(e) => {
                        let why = e.to_string();
                        let dipole = ["too close for the gap formulas", "coincide within tolerance", "norming constant routes disagree"]
                            .iter()
                            .any(|k| why.contains(k));
                        ensure!(dipole, "branch {} at a = {a}: {why}", o.branch);
                        failed.push(why);
                    }
                }
            }
            ensure!(found, "original measure not among the solutions at a = {a}: {m:?}");
        }
    }
    for key in [("AlphaBetaZero", true), ("AlphaZero", false), ("AlphaZero", true), ("AlphaNonzero", false), ("AlphaNonzero", true)] {
        ensure!(seen.get(&(key.0.to_string(), key.1)).copied().unwrap_or(0) >= 3, "regime {key:?} barely exercised: {seen:?}");
    }
    Ok(format!(
        "{verified} of {} solutions verified, {} near-coincident dipole branches reported as ReconstructionFail; regimes {seen:?}",
        verified + failed.len(),
        failed.len()
    ))
}

// 5 -------------------------------------------------------------------------

fn families() -> Check {
    // a positive three-peakon measure; the second eigenfunction has one zero
    let m = PeakonMeasure::new(&[0.0, 1.0, 2.2], &[1.0, 0.8, 1.5], &[0.0; 3]).unwrap();
    let sd = spectral_data(&m, &tol()).unwrap();
    let f = |x: f64| normalized_eigenfunctions(&m, &sd, &[x])[1][0];
    let (mut lo, mut hi) = (0.0, 2.2);
    ensure!(f(lo) * f(hi) < 0.0, "no sign change of phi_2 on the support");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * f(lo) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let d = interior_data(&m, a, &tol()).unwrap();
    let family = solution_family(&d, &tol()).map_err(|e| e.to_string())?;
    let count = solution_count(&d, &tol()).map_err(|e| e.to_string())?;
    let regime = feasibility(&d.eigenvalues, &d.phi, &tol()).regime;
    ensure!(count.dim() == 1 && family.dim_k == 1, "{count:?}");
    ensure!(count.branches() == expected_count(regime, &d.eigenvalues), "{regime:?} {count:?}");
    let m1 = family.generate(0, &[0.3], &tol()).map_err(|e| e.to_string())?;
    let m2 = family.generate(0, &[0.7], &tol()).map_err(|e| e.to_string())?;
    ensure!(!close_measures(&m1, &m2, 1e-3), "theta does not move the measure");
    reproduces(&m1, &d, 1e-6, &tol())?;
    reproduces(&m2, &d, 1e-6, &tol())?;
    Ok(format!("a = {a:.6}, {count:?}"))
}

// 6 -------------------------------------------------------------------------

fn trace_formula() -> Check {
    let mut r = rng(1006);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = r.gen_range(1..=6);
        let m = random_measure(&mut r, n);
        let sd = spectral_data(&m, &tol()).map_err(|e| e.to_string())?;
        let (lo, hi) = (m.points()[0] - 3.0, m.points()[m.len() - 1] + 3.0);
        let xs: Vec<f64> = (0..=300).map(|k| lo + (hi - lo) * k as f64 / 300.0).chain(m.points().iter().copied()).collect();
        let t = trace_u(&m, &sd, &xs);
        let k = kernel_u(&m, &xs);
        let dev = t.iter().zip(&k).fold(0.0f64, |s, (a, b)| s.max((a - b).abs()));
        worst = worst.max(dev);
        ensure!(dev <= 1e-8, "case {case}: deviation {dev:e} for {m:?}");
    }
    Ok(format!("50 measures, worst deviation {worst:.1e}"))
}

// 7 -------------------------------------------------------------------------

fn flow() -> Check {
    let mut r = rng(1007);
    let mut worst_drift = 0.0f64;
    for case in 0..20 {
        let n = r.gen_range(1..=5);
        let p = random_positive_measure(&mut r, n);
        // half of the cases are antipeakon trains
        let m = if case % 2 == 0 {
            p
        } else {
            let w: Vec<f64> = p.omega().iter().map(|w| -w).collect();
            PeakonMeasure::new(p.points(), &w, p.vee()).unwrap()
        };
        let fs = FlowState::new(spectral_data(&m, &tol()).unwrap(), 0.0).unwrap();
        let l0 = fs.base().eigenvalues.clone();
        let momentum: f64 = l0.iter().map(|l| 1.0 / l).sum();
        let (bound, _) = sup_u(&fs);
        for k in 0..=10 {
            let t = k as f64;
            let mt = fs.measure_at(t, &tol()).map_err(|e| format!("case {case}, t = {t}: {e}"))?;
            let xs: Vec<f64> = (0..=200)
                .map(|j| mt.points()[0] - 3.0 + (mt.points()[mt.len() - 1] - mt.points()[0] + 6.0) * j as f64 / 200.0)
                .chain(mt.points().iter().copied())
                .collect();
            let (u, _) = solution_at(&fs, t, &xs, &tol()).map_err(|e| format!("case {case}, t = {t}: {e}"))?;
            let l = eigenvalues(&mt, &tol()).map_err(|e| e.to_string())?;
            for (a, b) in l.iter().zip(&l0) {
                worst_drift = worst_drift.max((a - b).abs() / b.abs());
            }
            ensure!(worst_drift <= 1e-9, "case {case}, t = {t}: eigenvalue drift {worst_drift:e}");
            let sum: f64 = mt.omega().iter().sum();
            ensure!((sum - momentum).abs() <= 1e-8, "case {case}, t = {t}: sum of weights {sum} vs {momentum}");
            let top = u.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            ensure!(top <= bound + 1e-9, "case {case}, t = {t}: |u| = {top} above {bound}");
        }
    }
    // a single peakon of height c travels with speed c
    for c in [0.5, 1.0, 2.0, 3.5] {
        let m = PeakonMeasure::new(&[0.3], &[2.0 * c], &[0.0]).unwrap();
        let fs = FlowState::new(spectral_data(&m, &tol()).unwrap(), 0.0).unwrap();
        let x0 = fs.measure_at(0.0, &tol()).unwrap().points()[0];
        let x1 = fs.measure_at(4.0, &tol()).unwrap().points()[0];
        let speed = (x1 - x0) / 4.0;
        ensure!((speed - c).abs() <= 1e-8, "speed {speed} for height {c}");
    }
    Ok(format!("20 trains over t in [0, 10], drift {worst_drift:.1e}"))
}

// 8 -------------------------------------------------------------------------

fn collision() -> Check {
    let mut r = rng(1008);
    for case in 0..10 {
        let c = r.gen_range(0.3..3.0);
        let x0 = r.gen_range(0.2..3.0);
        let m = PeakonMeasure::new(&[-x0, x0], &[c, -c], &[0.0, 0.0]).unwrap();
        let fs = FlowState::new(spectral_data(&m, &tol()).unwrap(), 0.0).unwrap();
        let sd: &SpectralData = fs.base();
        // the pair collides when both norming constants coincide
        let tc = sd.eigenvalues[1] * (sd.norming[1] / sd.norming[0]).ln();
        ensure!(tc > 0.0, "case {case}: collision time {tc}");
        let mut times: Vec<f64> = (0..=20).map(|k| 2.0 * tc * k as f64 / 20.0).collect();
        times.push(tc);
        let scan = collision_scan(&fs, &times, &tol());
        let on: Vec<f64> = scan.iter().filter(|s| s.v_mass.is_some_and(|v| v > 1e-6)).map(|s| s.t).collect();
        ensure!(!on.is_empty(), "case {case}: v never switched on: {scan:?}");
        ensure!(on.iter().all(|t| (t - tc).abs() < 1e-6), "case {case}: v-mass away from the collision at {on:?}");
        let windows = collision_windows(&scan);
        ensure!(windows.iter().any(|w| w.0 <= tc && tc <= w.1), "case {case}: no window around {tc}");
    }
    Ok("10 symmetric pairs, v switched on at the collision".into())
}

// 9 -------------------------------------------------------------------------

fn has(report: &FeasibilityReport, pred: impl Fn(&Violation) -> bool) -> bool {
    !report.ok && report.violations.iter().any(pred)
}

fn feasibility_gate() -> Check {
    let mut r = rng(1009);
    let (mut ii, mut norm, mut adj) = (0, 0, 0);
    for case in 0..100 {
        let n = r.gen_range(3..=7);
        let m = random_measure(&mut r, n);
        let lo = m.points()[0] - 1.0;
        let hi = m.points()[m.len() - 1] + 1.0;
        let d = interior_data(&m, r.gen_range(lo..hi), &tol()).unwrap();
        let k = d.len();
        if k < 3 {
            continue;
        }
        // (ii): a zero whose neighbours share a sign
        let j = r.gen_range(1..k - 1);
        let mut phi = d.phi.clone();
        phi[j] = 0.0;
        phi[j + 1] = phi[j + 1].abs() * phi[j - 1].signum();
        let rep = feasibility(&d.eigenvalues, &phi, &tol());
        ensure!(has(&rep, |v| *v == Violation::NeighboursSameSign { index: j }), "case {case}: (ii) not flagged: {rep:?}");
        ii += 1;

        // (iii): norm above one
        let s = 1.2 / d.phi.iter().map(|p| p * p).sum::<f64>().sqrt();
        let phi: Vec<f64> = d.phi.iter().map(|p| p * s).collect();
        let rep = feasibility(&d.eigenvalues, &phi, &tol());
        ensure!(has(&rep, |v| matches!(v, Violation::NormExceeded { .. })), "case {case}: norm not flagged: {rep:?}");
        norm += 1;

        // (iii): a negative value next to the origin
        let j0 = d.eigenvalues.iter().filter(|&&l| l < 0.0).count();
        let i = match j0 {
            0 => 0,
            j if j == k => k - 1,
            j => j - 1 + r.gen_range(0..2),
        };
        let mut phi = d.phi.clone();
        phi[i] = -phi[i].abs().max(1e-3);
        let rep = feasibility(&d.eigenvalues, &phi, &tol());
        ensure!(has(&rep, |v| *v == Violation::AdjacentNotPositive { index: i }), "case {case}: wrong sign not flagged: {rep:?}");
        adj += 1;
    }
    ensure!(ii >= 50, "only {ii} cases");
    Ok(format!("{ii} (ii) cases, {norm} norm cases, {adj} sign cases rejected"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check, Duration); 9] = [
        ("1 single-peakon closed forms", single_peakon, Duration::from_secs(1)),
        ("2 oscillation theorem", oscillation, Duration::from_secs(30)),
        ("3 forward/inverse roundtrip", roundtrip, Duration::from_secs(60)),
        ("4 interior solution counts", interior_counts, Duration::MAX),
        ("5 split families", families, Duration::MAX),
        ("6 trace formula", trace_formula, Duration::MAX),
        ("7 flow conservation", flow, Duration::MAX),
        ("8 collision switch-on", collision, Duration::MAX),
        ("9 feasibility gate", feasibility_gate, Duration::MAX),
    ];
    let mut failures = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{took:.2?}]"),
            Err(why) => {
                failures += 1;
                println!("FAIL  criterion {name}: {why} [{took:.2?}]");
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}

#[test]
fn infeasible_data_fail_with_named_error() {
    let d = InteriorData { a: 0.0, eigenvalues: vec![0.5, 1.0, 2.0], phi: vec![0.3, 0.0, 0.2] };
    assert!(matches!(solution_count(&d, &tol()), Err(Error::Infeasible(_))));
}
