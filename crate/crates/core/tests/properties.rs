use num_complex::Complex64;
use proptest::prelude::*;
use valence_forge::becker::{check_becker_halfplane, model_log_derivative, HalfPlaneMap};
use valence_forge::dimension::{box_dimension, dimension_formula};
use valence_forge::gmap::GMap;
use valence_forge::poisson::{h0, h0_inv, poisson, poisson_deriv, poisson_quadrature_oracle};
use valence_forge::report::VerificationReport;
use valence_forge::sampling::Sampler;
use valence_forge::seed::{qr_map, SeedFunction};
use valence_forge::IntervalSet;

fn interval_set(max_components: usize) -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((-20.0f64..20.0, 0.01f64..3.0, 0.01f64..3.0), 1..=max_components).prop_map(|parts| {
        // lay components out left to right with positive gaps
        let mut x = parts[0].0;
        let mut iv = Vec::new();
        for (_, len, gap) in parts {
            iv.push((x, x + len));
            x += len + gap;
        }
        IntervalSet::new(iv).unwrap()
    })
}

fn upper(min_im: f64) -> impl Strategy<Value = Complex64> {
    (-30.0f64..30.0, min_im.log10()..1.5f64).prop_map(|(re, lg)| Complex64::new(re, 10f64.powf(lg)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn strip_containment(x in interval_set(6), z in upper(1e-6)) {
        let w = poisson(&x, z).unwrap();
        prop_assert!(w.re > 0.0 && w.re < 1.0, "{w}");
    }

    #[test]
    fn boundary_values(x in interval_set(5), t in -30.0f64..30.0) {
        prop_assume!(x.boundary_distance(t) > 1e-6);
        let w = poisson(&x, Complex64::new(t, 0.0)).unwrap();
        let want = if x.contains(t) { 1.0 } else { 0.0 };
        prop_assert!((w.re - want).abs() < 1e-12, "{w} at {t}");
    }

    #[test]
    fn gap_blow_up(x in interval_set(4), k in 0usize..4) {
        let iv = x.intervals();
        let (a, b) = iv[k % iv.len()];
        let right = |h: f64| poisson(&x, Complex64::new(b + h, h)).unwrap().im;
        let left = |h: f64| poisson(&x, Complex64::new(a - h, h)).unwrap().im;
        prop_assert!(right(1e-10) > right(1e-5) && right(1e-5) > right(1e-2) - 1e-9);
        prop_assert!(left(1e-10) < left(1e-5) && left(1e-5) < left(1e-2) + 1e-9);
        prop_assert!(right(1e-12) > 3.0 && left(1e-12) < -3.0);
    }

    #[test]
    fn additivity(x in interval_set(6), z in upper(1e-3), split in 0usize..6) {
        let iv = x.intervals();
        let cut = split % iv.len() + 1;
        let (a, b) = iv.split_at(cut.min(iv.len()));
        let xa = IntervalSet::new(a.to_vec()).unwrap();
        let xb = IntervalSet::new(b.to_vec()).unwrap();
        let sum = poisson(&xa, z).unwrap() + poisson(&xb, z).unwrap();
        prop_assert!((sum - poisson(&x, z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn scaling_identity(x in interval_set(5), a in 0.01f64..100.0, c in -10.0f64..10.0, z in upper(1e-3)) {
        let scaled = poisson(&x.scale_translate(a, c).unwrap(), z * a + c).unwrap();
        prop_assert!((scaled - poisson(&x, z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn h0_round_trip(z in upper(1e-3)) {
        let w = h0(z).unwrap();
        prop_assert!((h0_inv(w).unwrap() - z).norm() < 1e-12 * z.norm().max(1.0));
    }

    #[test]
    fn json_round_trip(x in interval_set(6)) {
        let s = serde_json::to_string(&x).unwrap();
        let back: IntervalSet = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn qr_image_disk(r in 1.5f64..200.0, z in upper(1e-4)) {
        let q = qr_map(r, z).unwrap();
        prop_assert!((q - Complex64::new(0.0, r)).norm() < r - 1.0 / r);
    }

    #[test]
    fn schwarz_pick_for_mobius(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0, tau in 0.1f64..4.0) {
        prop_assume!(a * d - b * c > 1e-3);
        let map = HalfPlaneMap::Mobius { a, b, c, d };
        let r = check_becker_halfplane(|w| model_log_derivative(tau, w), map, tau, 200, 7).unwrap();
        prop_assert!(r.schwarz_pick.pass && r.composed.pass);
        prop_assert!((r.sp_max_ratio - 1.0).abs() < 1e-9 && (r.sp_min_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn formula_increasing_in_n(n in 3.0f64..1e9, eps in 1e-6f64..0.0099, g1 in 1e-12f64..1e-3) {
        let d1 = dimension_formula(n, eps, g1).unwrap();
        let d2 = dimension_formula(n * 1.01 + 1.0, eps, g1).unwrap();
        prop_assert!(0.0 < d1 && d1 < d2 && d2 < 1.0);
    }

    #[test]
    fn exact_ratio_slope(n in 3u32..50, g in 1e-8f64..0.3, levels in 2usize..8) {
        let data: Vec<(f64, f64)> = (0..levels).map(|l| ((n as f64 - 1.0).powi(l as i32), g.powi(l as i32))).collect();
        let s = box_dimension(&data).unwrap().two_scale_slope;
        prop_assert!((s - (n as f64 - 1.0).ln() / (1.0 / g).ln()).abs() < 1e-10);
    }

    #[test]
    fn sampler_prefix_stable(seed in any::<u64>(), n in 1usize..200) {
        let s = Sampler::new(seed, 3);
        let a = s.disk(n, Complex64::new(0.0, 0.0), 1.0);
        let b = s.disk(2 * n, Complex64::new(0.0, 0.0), 1.0);
        prop_assert_eq!(&a[..], &b[..n]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_form_matches_oracle(x in interval_set(5), z in upper(1e-3)) {
        let d = (poisson(&x, z).unwrap() - poisson_quadrature_oracle(&x, z, 1e-12).unwrap()).norm();
        prop_assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn derivative_matches_difference(x in interval_set(4), z in upper(0.2)) {
        let h = 1e-5;
        let fd = (poisson(&x, z + h).unwrap() - poisson(&x, z - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - poisson_deriv(&x, z).unwrap()).norm() < 1e-6 * (1.0 + fd.norm()));
    }

    /// Linear `G` with slope `b0`: the count is 1 exactly when the target
    /// lies in the image disk, unless the loop passes too close to it.
    #[test]
    fn winding_is_integral(re in -1.0f64..1.0, im in 0.3f64..2.0, radius in 0.05f64..0.25, wr in -1.0f64..1.0, wi in 0.0f64..2.0) {
        let b0 = Complex64::new(0.7, -0.4);
        let seed = SeedFunction::constant(b0);
        let x = IntervalSet::new(vec![(-1.0, -0.3), (0.2, 0.6)]).unwrap();
        let g = GMap::new(&seed, &x, 1e-12).unwrap();
        let center = Complex64::new(re, im);
        let w = Complex64::new(wr, wi);
        match g.count_preimages(w, center, radius, 64) {
            Ok(c) => {
                prop_assert!((c.raw - c.winding as f64).abs() < 1e-3 / (2.0 * std::f64::consts::PI));
                let inside = (w / b0 - center).norm() < radius;
                prop_assert_eq!(c.winding, i64::from(inside));
            }
            Err(e) => prop_assert!(matches!(e, valence_forge::Error::BoundaryTooClose { .. }), "{e}"),
        }
    }

    #[test]
    fn report_pass_iff_positive_margin(bound in -1.0f64..1.0, observed in -1.0f64..1.0) {
        let r = VerificationReport::new("t", None, bound, observed, 1, Complex64::new(0.0, 0.0));
        prop_assert_eq!(r.pass, bound - observed > 0.0);
        let back: VerificationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}
