use num_complex::Complex64;
use valence_forge::construction::dense::{assemble_dense, van_der_corput_anchors, DenseConfig, InsertCase};
use valence_forge::construction::{build_construction, classical_cantor, ConstructionParams, ConstructionState, Node, Relation, StateJson};
use valence_forge::poisson::{poisson, poisson_deriv};
use valence_forge::verify::check_construction_bounds;
use valence_forge::IntervalSet;

fn reference_state() -> ConstructionState {
    build_construction(ConstructionParams::reference(), 3, 1e-12).unwrap()
}

#[test]
fn reference_parameters() {
    let p = ConstructionParams::reference();
    let alpha = (1.0 / 128.0) / (5.0 * (1.0 + 5f64.ln()));
    assert!((p.alpha - alpha).abs() < 1e-18);
    assert!((p.alpha - 6.0e-4).abs() < 1e-5);
    let e = ConstructionParams::new(5, 0.02, 1.0 / 128.0, 1e-6).unwrap_err();
    assert_eq!(e.to_string(), "eps < 1/100 violated");
}

#[test]
fn relatives() {
    let k = Node::new(vec![2, 3], 5).unwrap();
    let sib = k.relatives(5, Relation::Siblings).unwrap();
    assert_eq!(sib, vec![Node::new(vec![2, 1], 5).unwrap(), Node::new(vec![2, 2], 5).unwrap(), Node::new(vec![2, 4], 5).unwrap()]);
    assert_eq!(k.relatives(5, Relation::Cousins).unwrap().len(), 15);
}

#[test]
fn level_counts_and_roots() {
    let st = reference_state();
    assert_eq!(st.level_counts(), vec![4, 16, 64]);
    assert_eq!(st.records().len(), 84);
    assert!(st.max_residual() < 1e-12);
    st.check_invariants().unwrap();
    let p = &st.params;
    for (idx, rec) in st.records().iter().enumerate() {
        let shift = (st.x_abs(idx).unwrap() - st.center_abs(idx).unwrap()).abs();
        assert!(shift < st.centering_bound(rec.level(), 7.0), "{}", rec.node);
        if rec.level() == 1 {
            assert!(shift < 4.0 * p.eps * p.alpha * p.beta1);
        }
    }
}

#[test]
fn child_centers() {
    let st = reference_state();
    let k2 = st.index_of(&Node::new(vec![2], 5).unwrap()).unwrap();
    assert!((st.center_abs(k2).unwrap() - 0.4).abs() < 1e-15);
    let k23 = st.index_of(&Node::new(vec![2, 3], 5).unwrap()).unwrap();
    let want = st.x_abs(k2).unwrap() + (3.0 / 5.0 - 0.5) * st.params.gamma;
    assert!((st.center_abs(k23).unwrap() - want).abs() < 1e-15);
}

#[test]
fn gap_derivative_bound() {
    let p = ConstructionParams::reference();
    let i = p.unit_i();
    for x in [-0.9 * p.beta1, -0.3 * p.beta1, 0.0, 0.5 * p.beta1] {
        assert!(poisson_deriv(&i, Complex64::new(x, 0.0)).unwrap().im < -1.0 / (2.0 * p.beta1));
    }
    let i = IntervalSet::new(vec![(-1.0, -0.01), (0.01, 1.0)]).unwrap();
    let want = 2.0 / std::f64::consts::PI * (0.01 - 1.0) / 0.01;
    assert!((poisson_deriv(&i, Complex64::new(0.0, 0.0)).unwrap().im - want).abs() < 1e-9);
}

#[test]
fn build_is_deterministic() {
    let a = serde_json::to_string(&reference_state().to_json().unwrap()).unwrap();
    let b = serde_json::to_string(&reference_state().to_json().unwrap()).unwrap();
    assert_eq!(a, b);
    let js: StateJson = serde_json::from_str(&a).unwrap();
    let back = ConstructionState::from_json(&js).unwrap();
    assert_eq!(serde_json::to_string(&back.to_json().unwrap()).unwrap(), a);
}

#[test]
fn suite_passes_for_several_n() {
    for n in [4, 5, 6] {
        let eps = 1.0 / 128.0;
        let p = ConstructionParams::derive(n, eps, eps, eps * eps / 2.0).unwrap();
        let st = build_construction(p, 3, 1e-12).unwrap();
        let reports = check_construction_bounds(&st, 64, 1).unwrap();
        for r in reports.iter().filter(|r| !r.informational) {
            assert!(r.pass && r.margin > 0.0, "N = {n}: {}", r.summary_line());
        }
    }
}

#[test]
fn bound_fields_follow_the_formulas() {
    let st = reference_state();
    let p = &st.params;
    let reports = check_construction_bounds(&st, 16, 0).unwrap();
    let find = |id: &str, node: &str| reports.iter().find(|r| r.check_id == id && r.node.as_deref() == Some(node)).unwrap();
    assert_eq!(find("complement_12eps", "1.2").bound, 12.0 * p.eps);
    assert_eq!(find("complement_12eps", "1.2").bound, 0.09375);
    assert_eq!(find("cousin_sum", "3.1").bound, 4.0 * p.eps);
    assert_eq!(find("descendant_sum", "2").bound, p.eps);
    assert_eq!(find("restricted_tree_7eps", "2.2.2").bound, 7.0 * p.eps);
    assert_eq!(find("near_root_3eps", "4").bound, 3.0 * p.eps);
    let sib = find("sibling_derivative", "2.3").bound;
    assert!((sib - 8.0 * p.alpha * 25.0 / p.gamma).abs() < 1e-12 * sib);
    let r = find("centering_7eps", "1.1.1").bound;
    assert!((r - 7.0 * p.eps * p.alpha * p.beta1 * p.gamma * p.gamma).abs() < 1e-30);
}

#[test]
fn doubling_samples_never_lowers_a_maximum() {
    let st = build_construction(ConstructionParams::reference(), 2, 1e-12).unwrap();
    let a = check_construction_bounds(&st, 50, 3).unwrap();
    let b = check_construction_bounds(&st, 100, 3).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((&x.check_id, &x.node), (&y.check_id, &y.node));
        assert!(y.observed_max >= x.observed_max, "{} {:?}", x.check_id, x.node);
        assert!(!(y.pass && !x.pass));
    }
}

#[test]
fn classical_levels_nest() {
    let levels = classical_cantor(3, 0.5, 5).unwrap();
    for m in 1..levels.len() {
        let parent = IntervalSet::new(levels[m - 1].iter().map(|i| (i[0], i[1])).collect()).unwrap();
        assert!(levels[m].iter().all(|i| parent.contains(i[0]) && parent.contains(i[1])));
    }
}

#[test]
fn dense_stage_four_gap_insertion() {
    let cfg = DenseConfig { max_stage: 4, anchors: van_der_corput_anchors(4), ..DenseConfig::default() };
    let d = assemble_dense(&cfg).unwrap();
    let stage4 = d.log.iter().find(|l| l.stage == 4).unwrap();
    assert_eq!(stage4.case, InsertCase::Gap);
    assert!(stage4.worst_degradation < 2.0);
    for c in d.certificates.iter().filter(|c| c.stage == 3) {
        assert!(c.current_margin > 0.0 && c.original_margin / c.current_margin < 2.0);
    }
}

#[test]
fn dense_stages_nest_and_track_anchors() {
    let cfg = DenseConfig::default();
    let d = assemble_dense(&cfg).unwrap();
    for l in d.log.iter().filter(|l| l.case != InsertCase::Base) {
        assert!((l.tau - l.anchor).abs() <= cfg.sigma / 2f64.powi(l.stage as i32), "stage {}", l.stage);
    }
    assert!(d.certificates.iter().all(|c| c.current_margin > 0.0));
    // every earlier stage's set survives inside the next one, away from its hole
    let mut prev: Option<IntervalSet> = None;
    for stage in 3..=cfg.max_stage {
        let y = assemble_dense(&DenseConfig { max_stage: stage, anchors: van_der_corput_anchors(stage), ..cfg.clone() }).unwrap().y;
        if let Some(p) = &prev {
            let hole = d.log.iter().find(|l| l.stage == stage).and_then(|l| l.hole);
            for &(a, b) in p.intervals() {
                let m = 0.5 * (a + b);
                if hole.is_none_or(|h| m < h[0] || m > h[1]) {
                    assert!(y.contains(m), "stage {stage} lost ({a}, {b})");
                }
            }
        }
        prev = Some(y);
    }
    assert!(poisson(&d.y, Complex64::new(0.5, 0.1)).unwrap().re > 0.0);
}
