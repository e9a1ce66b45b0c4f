//! `G(X, z) = ∫₀^z g′(H0⁻¹(P(X, ζ))) dζ` by contour quadrature, with the
//! bi-Lipschitz check on `E` and argument-principle preimage counting.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{ConstructionState, Frame, Node};
use crate::error::{Error, Result};
use crate::poisson::StripField;
use crate::quadrature::integrate_path;
use crate::report::VerificationReport;
use crate::sampling::{stream_id, Sampler};
use crate::seed::{zero_pair, SeedConstants, SeedFunction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `G` for a strip field written in a local coordinate `ω`, where one unit
/// of `ω` has absolute length `scale`. Values and error estimates are
/// returned in absolute units.
#[derive(Clone, Copy)]
pub struct GMap<'a> {
    pub seed: &'a SeedFunction,
    pub field: &'a dyn StripField,
    pub scale: f64,
    /// Absolute error target for integrals in the local coordinate.
    pub tol: f64,
    /// `|g′|` must stay inside this annulus.
    pub annulus: Option<(f64, f64)>,
}

impl<'a> GMap<'a> {
    pub fn new(seed: &'a SeedFunction, field: &'a dyn StripField, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
        Ok(Self { seed, field, scale: 1.0, tol, annulus: None })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_annulus(mut self, lo: f64, hi: f64) -> Self {
        self.annulus = Some((lo, hi));
        self
    }

    /// Annulus `R(m(1 − 10⁻⁶), M(1 + 10⁻⁶))` widened by the constants' safety factor.
    pub fn with_constants(self, c: &SeedConstants) -> Self {
        let (lo, hi) = c.annulus();
        self.with_annulus(lo * (1.0 - 1e-6), hi * (1.0 + 1e-6))
    }

    pub fn integrand(&self, omega: Complex64) -> Result<Complex64> {
        let v = self.seed.gprime_strip(self.field.strip_value(omega)?)?;
        if let Some((lo, hi)) = self.annulus {
            let a = v.norm();
            if !(a >= lo && a <= hi) {
                return Err(Error::AnnulusViolation { value: a, min: lo, max: hi });
            }
        }
        Ok(v)
    }

    /// Integral along a polyline in local coordinates with local error `tol`.
    pub fn along(&self, points: &[Complex64], tol: f64) -> Result<(Complex64, f64)> {
        let (v, e) = integrate_path(|w| self.integrand(w), points, tol)?;
        Ok((v * self.scale, e * self.scale))
    }

    /// `G(z)` along `[0, ci] ∪ [ci, z]`, `c = max(10⁻³, Im z)`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, f64)> {
        if z.im < 0.0 {
            return Err(Error::BelowRealAxis(z));
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok((z, 0.0));
        }
        let c = z.im.max(1e-3);
        self.along(&[Complex64::new(0.0, 0.0), I * c, z], self.tol)
    }

    /// `G(z₂) − G(z₁)` through the bridge `z₁ → z₁ + ih → z₂ + ih → z₂`,
    /// `h = |z₂ − z₁|/2`, with error target `tol·|z₂ − z₁|`.
    pub fn diff(&self, z1: Complex64, z2: Complex64) -> Result<(Complex64, f64)> {
        let d = (z2 - z1).norm();
        if d == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let h = I * (d / 2.0);
        self.along(&[z1, z1 + h, z2 + h, z2], self.tol * d)
    }

    /// Number of preimages of `w` in the disk `Δ(center, radius)`.
    pub fn count_preimages(&self, w: Complex64, center: Complex64, radius: f64, boundary_points: usize) -> Result<WindingCount> {
        let (g, e) = self.eval(center)?;
        self.count_around(g - w, e, center, radius, boundary_points, &[])
            .map(|(mut v, _)| v.remove(0))
    }

    /// Windings of the loop `G(∂Δ) − w` given `f_center = G(center) − w`,
    /// first around `0` and then around each `shift` (so about `w + shift`).
    /// The discretization doubles until every count repeats.
    fn count_around(&self, f_center: Complex64, center_err: f64, center: Complex64, radius: f64, boundary_points: usize, shifts: &[Complex64]) -> Result<(Vec<WindingCount>, Vec<Complex64>)> {
        if center.im - radius <= 0.0 {
            return Err(Error::Precondition(format!("disk around {center} of radius {radius} leaves the upper half-plane")));
        }
        let mut n = boundary_points.max(8);
        let mut prev: Option<Vec<i64>> = None;
        loop {
            let loop_vals = self.boundary_values(f_center, center, radius, n)?;
            let budget = 10.0 * (center_err + loop_vals.1);
            let mut counts = Vec::with_capacity(shifts.len() + 1);
            for (k, s) in std::iter::once(Complex64::new(0.0, 0.0)).chain(shifts.iter().copied()).enumerate() {
                let vals: Vec<Complex64> = loop_vals.0.iter().map(|v| v - s).collect();
                let min_distance = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
                if !(min_distance > budget) {
                    return Err(Error::BoundaryTooClose { distance: min_distance, budget });
                }
                let raw = winding(&vals, loop_vals.2 - s);
                let rounded = raw.round();
                if (raw - rounded).abs() > 1e-3 / (2.0 * PI) {
                    return Err(Error::WindingUnstable(format!("loop {k} accumulated {raw} turns with {n} points")));
                }
                counts.push(WindingCount { winding: rounded as i64, raw, boundary_points: n, min_distance, budget });
            }
            let ints: Vec<i64> = counts.iter().map(|c| c.winding).collect();
            if prev.as_ref() == Some(&ints) {
                return Ok((counts, loop_vals.0));
            }
            if n > 1 << 18 {
                return Err(Error::WindingUnstable(format!("no stable count up to {n} points")));
            }
            prev = Some(ints);
            n *= 2;
        }
    }

    /// `G(b_k) − w` around the circle, from the center value by a radial
    /// segment and then chord by chord. Returns the values, the summed error
    /// estimate and the value reached after the full turn.
    fn boundary_values(&self, f_center: Complex64, center: Complex64, radius: f64, n: usize) -> Result<(Vec<Complex64>, f64, Complex64)> {
        let pts: Vec<Complex64> = (0..=n).map(|k| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64)).collect();
        let chord = (pts[1] - pts[0]).norm();
        let chords: Vec<(Complex64, f64)> = pts
            .par_windows(2)
            .map(|w| self.along(w, self.tol * chord))
            .collect::<Result<_>>()?;
        let (radial, mut err) = self.along(&[center, pts[0]], self.tol * radius)?;
        let mut cur = f_center + radial;
        let mut out = Vec::with_capacity(n);
        for (v, e) in chords.into_iter().take(n) {
            out.push(cur);
            cur += v;
            err += e;
        }
        Ok((out, err, cur))
    }
}

/// Turning about the origin of the path `vals[0], …, vals[n−1], end`, in
/// turns. Its distance to an integer is the closure error of the loop.
fn winding(vals: &[Complex64], end: Complex64) -> f64 {
    let mut total = 0.0;
    for w in vals.windows(2) {
        total += (w[1] / w[0]).arg();
    }
    total += (end / vals[vals.len() - 1]).arg();
    total / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingCount {
    pub winding: i64,
    /// Accumulated argument in turns before rounding.
    pub raw: f64,
    pub boundary_points: usize,
    pub min_distance: f64,
    pub budget: f64,
}

/// Frames keyed by anchor, each holding all of `X` at the built depth.
struct FrameCache<'s> {
    state: &'s ConstructionState,
    frames: HashMap<Option<usize>, Frame>,
}

impl<'s> FrameCache<'s> {
    fn new(state: &'s ConstructionState) -> Self {
        Self { state, frames: HashMap::new() }
    }

    fn get(&mut self, anchor: Option<usize>) -> Result<&Frame> {
        if !self.frames.contains_key(&anchor) {
            let f = self.state.frame(anchor, |_| true)?;
            self.frames.insert(anchor, f);
        }
        Ok(&self.frames[&anchor])
    }
}

/// `x(k)` of node `idx` in the local coordinate of `anchor`.
fn local_x(state: &ConstructionState, idx: usize, anchor: Option<usize>) -> Result<f64> {
    match anchor {
        None => state.x_abs(idx),
        Some(a) => Ok((state.center_diff(idx, a)? + state.shift_of(idx)?) / state.scale_of(a)),
    }
}

/// Deepest common ancestor record of two nodes, if they share one.
fn common_anchor(state: &ConstructionState, a: usize, b: usize) -> Result<Option<usize>> {
    let na = &state.records()[a].node;
    let nb = &state.records()[b].node;
    let q = na.common_prefix_len(nb);
    if q == 0 {
        return Ok(None);
    }
    let q = q.min(na.level() - 1).min(nb.level() - 1);
    if q == 0 {
        return Ok(None);
    }
    Ok(Some(state.index_of(&na.prefix(q))?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilipschitzReport {
    pub level: usize,
    pub pairs: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Ratio-scale quadrature budget `2·tol_rel`.
    pub budget: f64,
    pub lower: VerificationReport,
    pub upper: VerificationReport,
    /// Whether `ε ≤ η/(2π)` holds for the construction parameters.
    pub eps_stipulation: bool,
}

impl BilipschitzReport {
    pub fn reports(&self) -> [&VerificationReport; 2] {
        [&self.lower, &self.upper]
    }
}

/// Samples `pairs` distinct pairs of level-`level` centering points `x(k)`
/// and checks `|b₀|/8 − budget ≤ |ΔG|/|Δx| ≤ M + budget`.
pub fn check_bilipschitz(
    seed: &SeedFunction,
    state: &ConstructionState,
    level: usize,
    constants: &SeedConstants,
    pairs: usize,
    rel_tol: f64,
    rng_seed: u64,
) -> Result<BilipschitzReport> {
    if level == 0 || level > state.depth {
        return Err(Error::InvalidParameter(format!("level {level} outside 1..={}", state.depth)));
    }
    let nodes = state.level_indices(level);
    let total = nodes.len() * (nodes.len() - 1) / 2;
    if pairs == 0 || pairs > total {
        return Err(Error::InvalidParameter(format!("{pairs} pairs requested, {total} available")));
    }
    // distinct pairs in a fixed pseudo-random order
    let sampler = Sampler::new(rng_seed, stream_id("bilipschitz"));
    let mut order: Vec<(f64, usize, usize)> = Vec::with_capacity(total);
    let keys = sampler.rect(total, 0.0, 1.0, 0.0, 1.0);
    let mut k = 0;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            order.push((keys[k].re, nodes[i], nodes[j]));
            k += 1;
        }
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    order.truncate(pairs);

    let mut cache = FrameCache::new(state);
    let mut anchors = Vec::with_capacity(pairs);
    for &(_, a, b) in &order {
        let anc = common_anchor(state, a, b)?;
        cache.get(anc)?;
        anchors.push(anc);
    }
    let frames = &cache.frames;
    let ratios: Vec<(f64, Complex64)> = order
        .par_iter()
        .zip(anchors.par_iter())
        .map(|(&(_, a, b), anc)| {
            let frame = &frames[anc];
            let scale = anc.map_or(1.0, |i| state.scale_of(i));
            let g = GMap::new(seed, frame, rel_tol)?.with_scale(scale).with_constants(constants);
            let x1 = local_x(state, a, *anc)?;
            let x2 = local_x(state, b, *anc)?;
            let (dg, _) = g.diff(Complex64::new(x1, 0.0), Complex64::new(x2, 0.0))?;
            let dx = (x2 - x1).abs() * scale;
            let absolute = state.x_abs(a)?;
            Ok((dg.norm() / dx, Complex64::new(absolute, 0.0)))
        })
        .collect::<Result<_>>()?;
    let budget = 2.0 * rel_tol;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    let (mut lo_pt, mut hi_pt) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for &(r, p) in &ratios {
        if r < lo {
            lo = r;
            lo_pt = p;
        }
        if r > hi {
            hi = r;
            hi_pt = p;
        }
    }
    let b0 = constants.b0.norm();
    let eta_bound = constants.eta / (2.0 * PI);
    let eps_ok = state.params.eps <= eta_bound;
    let note = if eps_ok {
        "eps <= eta/(2 pi) holds".to_string()
    } else {
        format!("eps = {} exceeds eta/(2 pi) = {eta_bound:e}; bounds checked regardless", state.params.eps)
    };
    let lower = VerificationReport::lower("bilipschitz_lower", Some(format!("level{level}")), b0 / 8.0 - budget, lo, hi, pairs, lo_pt).with_note(note.clone());
    let upper = VerificationReport::new("bilipschitz_upper", Some(format!("level{level}")), constants.big_m + budget, hi, pairs, hi_pt).with_note(note);
    Ok(BilipschitzReport { level, pairs, min_ratio: lo, max_ratio: hi, budget, lower, upper, eps_stipulation: eps_ok })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskReport {
    pub level: usize,
    pub anchor: Node,
    /// Disk center and radius in the anchor's local coordinate.
    pub local_center: Complex64,
    pub local_radius: f64,
    pub scale: f64,
    pub winding: i64,
    pub raw_winding: f64,
    pub boundary_points: usize,
    pub min_distance: f64,
    pub budget: f64,
    /// Windings about five interior targets; each must be 1.
    pub spot_windings: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValenceReport {
    pub depth: usize,
    pub x_node: Node,
    pub x_star: f64,
    pub target_w: Complex64,
    pub beta1: f64,
    pub z_beta: Complex64,
    pub rho: f64,
    pub disks: Vec<DiskReport>,
    pub total_preimages: i64,
    pub disjoint: bool,
    /// Smallest gap between disks relative to the larger radius.
    pub min_separation: f64,
    pub pass: bool,
    /// Thinned loops `(G(∂disk) − w)/scale` per disk, for plotting.
    #[serde(skip)]
    pub loops: Vec<Vec<Complex64>>,
}

/// Counts preimages of `w = G(x*)`, `x* = x(k*)` for the first node `k*` of
/// level `depth`, in the disks `s_i·Δ(z_β, ρ) + c(a_i)` of its ancestors.
pub fn valence_demo(seed: &SeedFunction, state: &ConstructionState, constants: &SeedConstants, depth: usize, tol: f64, boundary_points: usize) -> Result<ValenceReport> {
    if depth == 0 || depth > state.depth {
        return Err(Error::InvalidParameter(format!("depth {depth} outside 1..={}", state.depth)));
    }
    let beta1 = state.params.beta1;
    let z_beta = zero_pair(seed, beta1)?;
    let rho = constants.rho;
    let star = state.level_indices(depth)[0];
    let star_node = state.records()[star].node.clone();
    let absolute = state.frame(None, |_| true)?;
    let x_star = state.x_abs(star)?;
    let g_abs = GMap::new(seed, &absolute, tol)?.with_constants(constants);
    let (target_w, _) = g_abs.eval(Complex64::new(x_star, 0.0))?;

    let spot_offsets: Vec<Complex64> = (0..5).map(|j| Complex64::from_polar(0.5 * rho, 2.0 * PI * j as f64 / 5.0 + 0.3)).collect();
    let mut disks = Vec::with_capacity(depth);
    let mut loops = Vec::with_capacity(depth);
    for (i, anc) in star_node.ancestors().into_iter().rev().enumerate() {
        let level = i + 1;
        let a = state.index_of(&anc)?;
        let frame = state.frame(Some(a), |_| true)?;
        let s = state.scale_of(a);
        let g = GMap::new(seed, &frame, tol)?.with_scale(s).with_constants(constants);
        let omega = Complex64::new(local_x(state, star, Some(a))?, 0.0);
        let (f_center, e_center) = g.along(&[omega, Complex64::new(omega.re, z_beta.im), z_beta], tol)?;
        let mut shifts = Vec::with_capacity(spot_offsets.len());
        for off in &spot_offsets {
            shifts.push(f_center + g.along(&[z_beta, z_beta + off], tol)?.0);
        }
        let (counts, loop_vals) = g.count_around(f_center, e_center, z_beta, rho, boundary_points, &shifts)?;
        let stride = (loop_vals.len() / 512).max(1);
        loops.push(loop_vals.iter().step_by(stride).map(|v| v / s).collect());
        let main = &counts[0];
        disks.push(DiskReport {
            level,
            anchor: anc,
            local_center: z_beta,
            local_radius: rho,
            scale: s,
            winding: main.winding,
            raw_winding: main.raw,
            boundary_points: main.boundary_points,
            min_distance: main.min_distance,
            budget: main.budget,
            spot_windings: counts[1..].iter().map(|c| c.winding).collect(),
        });
    }

    // pairwise separation measured in the frame of the shallower disk
    let mut disjoint = true;
    let mut min_sep = f64::INFINITY;
    let ancestors: Vec<usize> = star_node.ancestors().iter().rev().map(|n| state.index_of(n)).collect::<Result<_>>()?;
    for i in 0..ancestors.len() {
        for j in i + 1..ancestors.len() {
            let si = state.scale_of(ancestors[i]);
            let ratio = state.scale_of(ancestors[j]) / si;
            let cj = state.center_diff(ancestors[j], ancestors[i])? / si + ratio * z_beta;
            let gap = (cj - z_beta).norm() - rho * (1.0 + ratio);
            min_sep = min_sep.min(gap / rho);
            if !(gap > 0.0) {
                disjoint = false;
            }
        }
    }
    let total: i64 = disks.iter().map(|d| d.winding).sum();
    let pass = disjoint && disks.iter().all(|d| d.winding >= 1 && d.spot_windings.iter().all(|&w| w == 1)) && total >= depth as i64;
    Ok(ValenceReport {
        depth,
        x_node: star_node,
        x_star,
        target_w,
        beta1,
        z_beta,
        rho,
        disks,
        total_preimages: total,
        disjoint,
        min_separation: if min_sep.is_finite() { min_sep } else { 0.0 },
        pass,
        loops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval_set::IntervalSet;

    #[test]
    fn constant_seed_is_linear() {
        let b0 = Complex64::new(0.5, -0.25);
        let seed = SeedFunction::constant(b0);
        let x = IntervalSet::new(vec![(-1.0, -0.2), (0.3, 0.9)]).unwrap();
        let g = GMap::new(&seed, &x, 1e-12).unwrap();
        assert_eq!(g.eval(Complex64::new(0.0, 0.0)).unwrap().0, Complex64::new(0.0, 0.0));
        let z = Complex64::new(0.7, 0.4);
        assert!((g.eval(z).unwrap().0 - b0 * z).norm() < 1e-12);
        let d = g.diff(Complex64::new(-0.5, 0.0), Complex64::new(0.1, 0.0)).unwrap().0;
        assert!((d - b0 * 0.6).norm() < 1e-12);
        let c = g.count_preimages(b0 * Complex64::new(0.2, 0.5), Complex64::new(0.2, 0.6), 0.3, 64).unwrap();
        assert_eq!(c.winding, 1);
        let c = g.count_preimages(Complex64::new(100.0, 0.0), Complex64::new(0.2, 0.6), 0.3, 64).unwrap();
        assert_eq!(c.winding, 0);
    }

    #[test]
    fn disk_must_stay_in_half_plane() {
        let seed = SeedFunction::constant(Complex64::new(1.0, 0.0));
        let x = IntervalSet::single(0.0, 1.0).unwrap();
        let g = GMap::new(&seed, &x, 1e-10).unwrap();
        assert!(g.count_preimages(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.1), 0.2, 32).is_err());
    }

    #[test]
    fn winding_of_circle() {
        let v: Vec<Complex64> = (0..100).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 100.0 * 2.0)).collect();
        assert!((winding(&v, v[0]) - 2.0).abs() < 1e-12);
        assert!((winding(&v, v[0] * Complex64::from_polar(1.0, 0.01)) - 2.0 - 0.01 / (2.0 * PI)).abs() < 1e-12);
    }
}
