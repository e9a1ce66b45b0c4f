//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use valence_forge::becker::{becker_suite, HalfPlaneMap};
use valence_forge::construction::{build_construction, ConstructionParams, ConstructionState};
use valence_forge::dimension::{construction_dimension, dimension_formula};
use valence_forge::gmap::{check_bilipschitz, valence_demo, BilipschitzReport, ValenceReport};
use valence_forge::poisson::{h0, h0_inv, poisson, poisson_quadrature_oracle};
use valence_forge::report::VerificationReport;
use valence_forge::seed::{builtin_exp_seed, estimate_constants, SeedConstants, SeedFunction};
use valence_forge::verify::{check_construction_bounds, check_density_window, maximal_density_set};
use valence_forge::IntervalSet;

const TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_set(rng: &mut ChaCha8Rng, max_components: usize) -> IntervalSet {
    let k = rng.gen_range(1..=max_components);
    let mut pts: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(-10.0..10.0)).collect();
    pts.sort_by(f64::total_cmp);
    let iv: Vec<(f64, f64)> = pts.chunks(2).filter(|c| c[1] - c[0] > 1e-6).map(|c| (c[0], c[1])).collect();
    if iv.is_empty() {
        return IntervalSet::single(0.0, 1.0).unwrap();
    }
    // neighbouring intervals may touch after filtering; merge them
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    IntervalSet::new(merged).unwrap()
}

fn kernel_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sets: Vec<IntervalSet> = (0..100).map(|_| random_set(&mut rng, 5)).collect();
    let zs: Vec<Complex64> = (0..100)
        .map(|_| Complex64::new(rng.gen_range(-12.0..12.0), 10f64.powf(rng.gen_range(-3.0..1.0))))
        .collect();
    let mut worst = 0.0_f64;
    for x in &sets {
        for &z in &zs {
            let d = (poisson(x, z).unwrap() - poisson_quadrature_oracle(x, z, 1e-12).unwrap()).norm();
            worst = worst.max(d);
        }
    }
    let t = start.elapsed();
    outcome(worst < 1e-9 && t < Duration::from_secs(10), format!("max deviation {worst:.2e} over 100 sets x 100 points in {t:.2?}"))
}

fn strip_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let z = Complex64::new(rng.gen_range(-10.0..10.0), 10f64.powf(rng.gen_range(-3.0..1.0)));
        worst = worst.max((h0_inv(h0(z).unwrap()).unwrap() - z).norm());
    }
    let at0 = (h0(Complex64::new(0.0, 0.0)).unwrap() - 1.0).norm();
    let at_i = (h0(Complex64::new(0.0, 1.0)).unwrap() - 0.5).norm();
    let far = (0..16)
        .map(|k| h0(Complex64::from_polar(1e8, PI * (k as f64 + 0.5) / 16.0)).unwrap().norm())
        .fold(0.0, f64::max);
    let pass = worst < 1e-12 && at0 < 1e-15 && at_i < 1e-15 && far < 1e-7;
    outcome(pass, format!("round trip {worst:.2e}, |h0(0)-1| {at0:.1e}, |h0(i)-1/2| {at_i:.1e}, |h0| at 1e8 {far:.1e}"))
}

fn scaling_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let x = random_set(&mut rng, 5);
        let a = 10f64.powf(rng.gen_range(-2.0..2.0));
        let c = rng.gen_range(-10.0..10.0);
        let z = Complex64::new(rng.gen_range(-10.0..10.0), 10f64.powf(rng.gen_range(-2.0..1.0)));
        let lhs = poisson(&x.scale_translate(a, c).unwrap(), z * a + c).unwrap();
        worst = worst.max((lhs - poisson(&x, z).unwrap()).norm());
    }
    outcome(worst < 1e-12, format!("max deviation {worst:.2e} over 1000 (X, a, c, z)"))
}

fn reference_construction() -> (Outcome, ConstructionState) {
    let start = Instant::now();
    let st = build_construction(ConstructionParams::reference(), 3, TOL).unwrap();
    let t = start.elapsed();
    let mut worst_ratio = 0.0_f64;
    let mut max_residual = 0.0_f64;
    let mut roots = 0;
    for (idx, rec) in st.records().iter().enumerate() {
        let l = rec.level();
        let shift = (st.x_abs(idx).unwrap() - st.center_abs(idx).unwrap()).abs();
        worst_ratio = worst_ratio.max(shift / st.centering_bound(l, 7.0));
        max_residual = max_residual.max(rec.residual);
        roots += usize::from(rec.shift.is_some());
    }
    let pass = st.records().len() == 84 && roots == 84 && max_residual < 1e-12 && worst_ratio < 1.0 && t < Duration::from_secs(60);
    let detail = format!(
        "{} records, {roots} roots, max |Im P| {max_residual:.2e}, max |x-c|/bound {worst_ratio:.3}, built in {t:.2?}",
        st.records().len()
    );
    (outcome(pass, detail), st)
}

fn bound_suite(st: &ConstructionState) -> (Outcome, Vec<VerificationReport>) {
    let reports = check_construction_bounds(st, 400, 0).unwrap();
    let required: Vec<&VerificationReport> = reports.iter().filter(|r| !r.informational).collect();
    let failures = required.iter().filter(|r| !(r.pass && r.margin > 0.0)).count();
    let complement = reports.iter().find(|r| r.check_id == "complement_12eps").map(|r| r.bound).unwrap_or(f64::NAN);
    let x = maximal_density_set(1.0, 10, 0.1).unwrap();
    let window = check_density_window(&x, 1.0, 10, 0.1, 10.0, 10_000).unwrap();
    let window_bound = (0.3 + 0.2) / PI;
    let pass = failures == 0
        && !required.is_empty()
        && (complement - 0.09375).abs() < 1e-15
        && window.pass
        && (window.bound - window_bound).abs() < 1e-15;
    let detail = format!(
        "{} required reports, {failures} failures, 12eps bound {complement}, density window {:.4} <= {:.4}",
        required.len(),
        window.observed_max,
        window.bound
    );
    (outcome(pass, detail), reports)
}

fn dimension(st: &ConstructionState) -> Outcome {
    let r = construction_dimension(st).unwrap();
    let p = &st.params;
    let s = (p.n as f64 - 1.0).ln() / (1.0 / p.gamma).ln();
    let slope_err = (r.two_scale_slope - s).abs();
    let cantor_err = (r.cantor_reference.unwrap() - 2f64.ln() / 3f64.ln()).abs();
    let (eps, g1) = (1.0 / 128.0, 3e-5);
    let closed = |n: f64| (n - 1.0).ln() / (2.0 * n * (1.0 + n.ln()) / (eps * g1)).ln();
    let mut formula_err = 0.0_f64;
    let mut monotone = true;
    let mut prev = 0.0;
    for n in 3..=1_000_000u32 {
        let d = dimension_formula(n as f64, eps, g1).unwrap();
        if n % 997 == 0 || n < 100 {
            formula_err = formula_err.max((d - closed(n as f64)).abs());
        }
        monotone &= d > prev;
        prev = d;
    }
    let pass = slope_err < 1e-6 && cantor_err < 1e-6 && formula_err < 1e-12 && monotone;
    outcome(pass, format!("slope error {slope_err:.1e}, Cantor reference error {cantor_err:.1e}, formula error {formula_err:.1e}, monotone to 1e6: {monotone}, d(1e6) = {prev:.4}"))
}

fn bilipschitz(g: &SeedFunction, st: &ConstructionState, c: &SeedConstants) -> (Outcome, BilipschitzReport) {
    let start = Instant::now();
    let r = check_bilipschitz(g, st, 3, c, 500, TOL, 0).unwrap();
    let pass = r.pairs == 500 && r.lower.pass && r.upper.pass;
    let detail = format!(
        "ratios in [{:.3e}, {:.3e}] against [{:.3e}, {:.4}] (unbudgeted |b0|/8 = {:.2e}) over {} pairs in {:.2?}",
        r.min_ratio,
        r.max_ratio,
        r.lower.bound,
        r.upper.bound,
        c.b0.norm() / 8.0,
        r.pairs,
        start.elapsed()
    );
    (outcome(pass, detail), r)
}

fn valence(g: &SeedFunction, st: &ConstructionState, c: &SeedConstants) -> (Outcome, Vec<ValenceReport>) {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut reports = Vec::new();
    for depth in [2, 3] {
        let r = valence_demo(g, st, c, depth, 1e-13, 4096).unwrap();
        let integral = r.disks.iter().all(|d| (d.raw_winding - d.winding as f64).abs() < 1e-3 / (2.0 * PI));
        ok &= r.disks.len() == depth && r.disjoint && r.disks.iter().all(|d| d.winding >= 1) && r.total_preimages >= depth as i64 && integral;
        parts.push(format!("depth {depth}: windings {:?}, total {}, disjoint {}", r.disks.iter().map(|d| d.winding).collect::<Vec<_>>(), r.total_preimages, r.disjoint));
        reports.push(r);
    }
    (outcome(ok, format!("{} in {:.2?}", parts.join("; "), start.elapsed())), reports)
}

fn becker() -> Outcome {
    let results = becker_suite(1.0, 1000, 0).unwrap();
    let names: Vec<String> = results.iter().map(|r| r.name.clone()).collect();
    let wanted = [HalfPlaneMap::Identity, HalfPlaneMap::Scale { k: 2.0 }, HalfPlaneMap::Translate { t: Complex64::new(0.0, 1.0) }];
    let has_all = wanted.iter().all(|m| results.iter().any(|r| r.map == *m)) && results.iter().any(|r| matches!(r.map, HalfPlaneMap::Mobius { .. }));
    let sp_ok = results.iter().all(|r| r.schwarz_pick.pass && r.composed.pass);
    let equality = results
        .iter()
        .filter(|r| r.map.is_isometry())
        .map(|r| (r.sp_max_ratio - 1.0).abs().max((r.sp_min_ratio - 1.0).abs()))
        .fold(0.0, f64::max);
    outcome(has_all && sp_ok && equality < 1e-12, format!("maps {names:?}, equality deviation {equality:.1e}"))
}

/// Serialized artifacts of the full pipeline.
fn artifacts(g: &SeedFunction, c: &SeedConstants, st: &ConstructionState, reports: &[VerificationReport], bl: &BilipschitzReport, val: &[ValenceReport]) -> Vec<String> {
    let mut out = vec![
        serde_json::to_string_pretty(g).unwrap(),
        serde_json::to_string_pretty(c).unwrap(),
        serde_json::to_string_pretty(&st.to_json().unwrap()).unwrap(),
        serde_json::to_string_pretty(bl).unwrap(),
        serde_json::to_string_pretty(&construction_dimension(st).unwrap()).unwrap(),
    ];
    out.extend(reports.iter().map(|r| serde_json::to_string(r).unwrap()));
    out.extend(val.iter().map(|r| serde_json::to_string_pretty(r).unwrap()));
    out
}

fn determinism(first: &[String]) -> Outcome {
    // second run on a differently sized pool
    let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
    let second = pool.install(|| {
        let g = builtin_exp_seed().unwrap();
        let c = estimate_constants(&g).unwrap();
        let st = build_construction(ConstructionParams::reference(), 3, TOL).unwrap();
        let reports = check_construction_bounds(&st, 400, 0).unwrap();
        let bl = check_bilipschitz(&g, &st, 3, &c, 500, TOL, 0).unwrap();
        let val: Vec<ValenceReport> = [2, 3].iter().map(|&d| valence_demo(&g, &st, &c, d, 1e-13, 4096).unwrap()).collect();
        artifacts(&g, &c, &st, &reports, &bl, &val)
    });
    let differing = first.iter().zip(&second).filter(|(a, b)| a != b).count();
    let pass = first.len() == second.len() && differing == 0;
    outcome(pass, format!("{} artifacts compared, {differing} differ", first.len()))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("kernel oracle", kernel_oracle()));
    results.push(("strip round trip", strip_round_trip()));
    results.push(("scaling identity", scaling_identity()));
    let (o, st) = reference_construction();
    results.push(("reference construction", o));
    let (o, reports) = bound_suite(&st);
    results.push(("bound suite", o));
    results.push(("dimension", dimension(&st)));
    let g = builtin_exp_seed().unwrap();
    let c = estimate_constants(&g).unwrap();
    let (o, bl) = bilipschitz(&g, &st, &c);
    results.push(("bi-Lipschitz", o));
    let (o, val) = valence(&g, &st, &c);
    results.push(("valence", o));
    results.push(("half-plane contraction", becker()));
    let first = artifacts(&g, &c, &st, &reports, &bl, &val);
    results.push(("determinism", determinism(&first)));

    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
