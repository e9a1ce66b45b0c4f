use std::sync::OnceLock;

use num_complex::Complex64;
use valence_forge::construction::{build_construction, ConstructionParams, ConstructionState};
use valence_forge::gmap::{check_bilipschitz, valence_demo, GMap};
use valence_forge::sampling::Sampler;
use valence_forge::seed::{builtin_exp_seed, estimate_constants, zero_pair, SeedConstants, SeedFunction};

struct Fixture {
    seed: SeedFunction,
    constants: SeedConstants,
    state: ConstructionState,
}

fn fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let seed = builtin_exp_seed().unwrap();
        let constants = estimate_constants(&seed).unwrap();
        let state = build_construction(ConstructionParams::reference(), 3, 1e-12).unwrap();
        Fixture { seed, constants, state }
    })
}

#[test]
fn global_lipschitz_bound() {
    let f = fixture();
    let frame = f.state.frame(None, |_| true).unwrap();
    let g = GMap::new(&f.seed, &frame, 1e-12).unwrap().with_constants(&f.constants);
    let s = Sampler::new(4, 9);
    let a = s.rect(60, -1.2, 1.2, 0.0, 0.5);
    let b = s.rect(60, -1.2, 1.2, 0.0, 0.5);
    for (&z1, &z2) in a.iter().zip(b.iter().rev()) {
        let (d, err) = g.diff(z1, z2).unwrap();
        assert!(d.norm() <= f.constants.big_m * (z2 - z1).norm() + 2.0 * err + 1e-15, "{z1} {z2}");
    }
}

#[test]
fn halving_tolerance_converges() {
    let f = fixture();
    let frame = f.state.frame(None, |_| true).unwrap();
    let z = Complex64::new(0.37, 0.05);
    let eval = |tol: f64| GMap::new(&f.seed, &frame, tol).unwrap().eval(z).unwrap().0;
    let tol = 1e-6;
    let reference = eval(tol / 100.0);
    let d1 = (eval(tol) - reference).norm();
    let d2 = (eval(tol / 2.0) - reference).norm();
    let floor = 1e-15 * reference.norm().max(1e-300);
    assert!(d2 <= d1 / 2.0 + floor || d2 <= floor, "{d1:e} {d2:e}");
    assert!(d1 <= tol);
}

#[test]
fn univalent_disk_has_one_preimage() {
    let f = fixture();
    let zb = zero_pair(&f.seed, f.state.params.beta1).unwrap();
    let k = f.state.level_indices(1)[1];
    let frame = f.state.frame(Some(k), |_| true).unwrap();
    let g = GMap::new(&f.seed, &frame, 1e-13).unwrap().with_scale(f.state.scale_of(k)).with_constants(&f.constants);
    let w = g.eval(zb).unwrap().0;
    let c = g.count_preimages(w, zb, f.constants.rho, 2048).unwrap();
    assert_eq!(c.winding, 1);
    assert!((c.raw - 1.0).abs() < 1e-3 / (2.0 * std::f64::consts::PI));
}

#[test]
fn bilipschitz_at_level_two() {
    let f = fixture();
    let r = check_bilipschitz(&f.seed, &f.state, 2, &f.constants, 100, 1e-12, 3).unwrap();
    assert!(r.lower.pass && r.upper.pass);
    assert!(r.min_ratio >= f.constants.b0.norm() / 8.0);
    assert!(r.max_ratio <= f.constants.big_m);
    assert!(check_bilipschitz(&f.seed, &f.state, 1, &f.constants, 7, 1e-12, 3).is_err());
}

#[test]
fn valence_totals_grow_with_depth() {
    let f = fixture();
    let one = valence_demo(&f.seed, &f.state, &f.constants, 1, 1e-13, 4096).unwrap();
    let two = valence_demo(&f.seed, &f.state, &f.constants, 2, 1e-13, 4096).unwrap();
    assert!(one.pass && two.pass);
    assert!(one.total_preimages >= 1 && two.total_preimages >= one.total_preimages);
    assert!(two.disjoint && two.min_separation > 0.0);
    assert_eq!(two.disks.len(), 2);
    let back: serde_json::Value = serde_json::to_value(&two).unwrap();
    assert!(back.get("loops").is_none());
}
