//! Sampled certification of the construction inequalities and of the
//! harmonic-measure density estimate.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::construction::{ConstructionState, Frame, Node, NodeRecord};
use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::poisson::poisson;
use crate::report::VerificationReport;
use crate::sampling::{stream_id, Sampler};

/// Relative slack allowed in the exact window-density hypothesis.
pub const DENSITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Value,
    Deriv,
}

#[derive(Debug, Clone, Copy)]
enum Region {
    /// Closed upper half of the annulus `r_in ≤ |ω| ≤ r_out`.
    HalfAnnulus { r_in: f64, r_out: f64 },
}

struct Sup {
    max: f64,
    worst: Complex64,
    evaluated: usize,
    skipped: usize,
}

fn sup_over(frame: &Frame, q: Quantity, region: Region, samples: usize, sampler: &Sampler) -> Result<Sup> {
    let c0 = Complex64::new(0.0, 0.0);
    let pts: Vec<Complex64> = match region {
        Region::HalfAnnulus { r_in, r_out } => sampler
            .half_annulus(samples, c0, r_in, r_out)
            .into_iter()
            .chain(sampler.half_annulus_boundary(samples, c0, r_in, r_out))
            .collect(),
    };
    let mut out = Sup { max: 0.0, worst: c0, evaluated: 0, skipped: 0 };
    for w in pts {
        let v = match q {
            Quantity::Value => frame.value(w),
            Quantity::Deriv => frame.deriv(w),
        };
        match v {
            Ok(v) => {
                out.evaluated += 1;
                if v.norm() > out.max || out.evaluated == 1 {
                    out.max = v.norm();
                    out.worst = w;
                }
            }
            Err(Error::SingularEndpoint { .. }) => out.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn sampled_report(
    id: &str,
    node: &Node,
    bound: f64,
    frame: &Frame,
    q: Quantity,
    region: Region,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let sampler = Sampler::new(seed, stream_id(&format!("{id}/{node}")));
    let s = sup_over(frame, q, region, samples, &sampler)?;
    Ok(VerificationReport::new(id, Some(node.to_string()), bound, s.max, s.evaluated, s.worst).with_skipped(s.skipped))
}

fn in_subtree(r: &NodeRecord, root: &Node) -> bool {
    r.level() >= root.level() && r.node.prefix(root.level()) == *root
}

/// All per-node reports for one node, in a fixed order.
fn node_reports(st: &ConstructionState, idx: usize, samples: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let p = st.params;
    let rec = &st.records()[idx];
    let k = rec.node.clone();
    let l = k.level();
    let s = st.scale_of(idx);
    let b1 = p.beta1;
    let eps = p.eps;
    let nf = p.n as f64;
    let gl1 = p.gamma.powi(l as i32 - 1);
    let id = Some(k.to_string());
    let mut out = Vec::new();

    // centering and residual
    let shift = st.shift_of(idx)?;
    out.push(VerificationReport::new("centering_7eps", id.clone(), st.centering_bound(l, 7.0), shift.abs(), 1, Complex64::new(shift / s, 0.0)));
    out.push(
        VerificationReport::new("centering_4eps", id.clone(), st.centering_bound(l, 4.0), shift.abs(), 1, Complex64::new(shift / s, 0.0))
            .informational(),
    );
    out.push(VerificationReport::new("root_residual", id.clone(), st.tol, rec.residual, 1, Complex64::new(shift / s, 0.0)));

    // disk chain to the parent
    if let Some(par) = rec.parent {
        let d = st.center_diff(idx, par)?.abs();
        let bound = b1 * st.scale_of(par) / 2.0;
        let observed = d + b1 * s / 2.0;
        out.push(VerificationReport::new("disk_nesting", id.clone(), bound, observed, 1, Complex64::new(d / s, 0.0)));
    }

    let full = Region::HalfAnnulus { r_in: 0.0, r_out: 1.0 };
    let ring = Region::HalfAnnulus { r_in: b1, r_out: 1.0 };

    // sibling subtrees, derivative on Δ(c, s)
    let parent_prefix = if l > 1 { Some(k.prefix(l - 1)) } else { None };
    let sib = st.frame(Some(idx), |r| {
        r.level() >= l
            && r.node.prefix(l) != k
            && match &parent_prefix {
                Some(pp) => r.node.prefix(l - 1) == *pp,
                None => true,
            }
    })?;
    out.push(
        sampled_report("sibling_derivative", &k, 8.0 * p.alpha * nf * nf / gl1, &sib, Quantity::Deriv, full, samples, seed)?
            .with_note("lower half-disk covered by conjugate symmetry"),
    );

    // ancestors, derivative on Δ(c, sβ₁/2)
    let anc = st.frame(Some(idx), |r| r.level() <= l && k.prefix(r.level()) == r.node)?;
    out.push(
        sampled_report("ancestor_derivative", &k, 4.0 / (p.alpha * b1 * gl1), &anc, Quantity::Deriv, Region::HalfAnnulus { r_in: 0.0, r_out: b1 / 2.0 }, samples, seed)?
            .with_note("lower half-disk covered by conjugate symmetry"),
    );

    // cousin subtrees on the closed half-disk
    let cous = st.frame(Some(idx), |r| r.level() >= l && r.node.prefix(l) != k)?;
    out.push(sampled_report("cousin_sum", &k, 4.0 * eps, &cous, Quantity::Value, full, samples, seed)?);

    // descendants on the half-annulus, after checking its hypothesis
    let desc = st.frame(Some(idx), |r| r.level() > l && in_subtree(r, &k))?;
    let reach = desc.entries.iter().map(|&(dc, sm)| dc.abs() + sm).fold(0.0, f64::max);
    let measure: f64 = desc.entries.iter().map(|&(_, sm)| 2.0 * sm * (1.0 - b1)).sum();
    let hyp_ok = reach < b1 * s / 2.0 && measure <= p.gamma.powi(l as i32);
    let mut r_desc = sampled_report("descendant_sum", &k, eps, &desc, Quantity::Value, ring, samples, seed)?;
    if !hyp_ok {
        r_desc.pass = false;
        r_desc = r_desc.with_note("hypothesis violated: descendants not inside c + (alpha/4)gamma^(l-1)B or measure above gamma^l");
    }
    out.push(r_desc);

    // restricted tree without k, 7ε authoritative, 4ε recorded
    let restricted = st.frame(Some(idx), |r| r.level() <= l && r.node != k)?;
    let r_tree = sampled_report("restricted_tree_7eps", &k, 7.0 * eps, &restricted, Quantity::Value, full, samples, seed)?;
    let mut r_tree_4 = r_tree.clone();
    r_tree_4.check_id = "restricted_tree_4eps".into();
    r_tree_4.bound = 4.0 * eps;
    r_tree_4.margin = r_tree_4.bound - r_tree_4.observed_max;
    r_tree_4.pass = r_tree_4.margin > 0.0;
    out.push(r_tree);
    out.push(r_tree_4.informational());

    // |P(X_{𝒦′(k)})| < 3ε on the half-disk Δ(x(k), γ^l)
    let near_x = st.frame_at(idx, shift, p.gamma.powi(l as i32), |r| r.level() <= l)?;
    out.push(sampled_report("near_root_3eps", &k, 3.0 * eps, &near_x, Quantity::Value, full, samples, seed)?);

    // everything except k on the half-annulus
    let others = st.frame(Some(idx), |r| r.node != k)?;
    out.push(sampled_report("complement_12eps", &k, 12.0 * eps, &others, Quantity::Value, ring, samples, seed)?);

    Ok(out)
}

/// Runs every per-node check on a finalized state. Reports are ordered by
/// node (level, then lexicographic) and check.
pub fn check_construction_bounds(st: &ConstructionState, samples_per_node: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    if st.finalized_level < st.depth {
        return Err(Error::NotFinalized(format!("state finalized to level {} of {}", st.finalized_level, st.depth)));
    }
    if samples_per_node == 0 {
        return Err(Error::InvalidParameter("samples_per_node must be positive".into()));
    }
    let n = st.records().len();
    let per: Vec<Result<Vec<VerificationReport>>> =
        (0..n).into_par_iter().map(|i| node_reports(st, i, samples_per_node, seed)).collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

/// The maximal periodic set admitted by the density hypothesis: `N`
/// intervals `(kb/N, kb/N + ℓ)` with `ℓ = ηb/(N(1 + log N))`.
pub fn maximal_density_set(b: f64, n: u32, eta: f64) -> Result<IntervalSet> {
    let nf = n as f64;
    let len = eta * b / (nf * (1.0 + nf.ln()));
    IntervalSet::new((0..n).map(|k| (k as f64 * b / nf, k as f64 * b / nf + len)).collect())
}

/// `max |P(X, x + (Tbη/N)i)|` over `grid` points of `[0, b]` against
/// `(1/π)(3/T + 2η)`.
pub fn check_density_window(x: &IntervalSet, b: f64, n: u32, eta: f64, t: f64, grid: usize) -> Result<VerificationReport> {
    if !(b > 0.0 && eta > 0.0 && t > 0.0) || n < 1 || grid < 2 {
        return Err(Error::InvalidParameter("density check needs b, eta, T > 0, N >= 1, grid >= 2".into()));
    }
    let nf = n as f64;
    if let Some((lo, hi)) = x.hull() {
        if lo < 0.0 || hi > b {
            return Err(Error::Precondition(format!("X must lie in [0, {b}]")));
        }
    }
    let cap = eta * b / (nf * (1.0 + nf.ln()));
    let dens = x.max_window_measure(b / nf);
    if dens > cap * (1.0 + DENSITY_SLACK) {
        return Err(Error::Precondition(format!("density hypothesis: window measure {dens:e} exceeds {cap:e}")));
    }
    let h = t * b * eta / nf;
    let bound = (3.0 / t + 2.0 * eta) / PI;
    let mut max = 0.0;
    let mut worst = Complex64::new(0.0, h);
    for i in 0..grid {
        let z = Complex64::new(b * i as f64 / (grid - 1) as f64, h);
        let v = poisson(x, z)?.norm();
        if v > max {
            max = v;
            worst = z;
        }
    }
    Ok(VerificationReport::new("density_window", None, bound, max, grid, worst))
}
