//! Seed derivatives `g′`, the `q_r` pre-composition, the collision search that
//! normalizes a nonunivalent seed, and estimation of the seed constants.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poisson::{h0, h0_inv_recip, poisson_interval};
use crate::quadrature::{integrate_segment, DEFAULT_TOL};
use crate::report::VerificationReport;
use crate::sampling::{stream_id, Sampler};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Radius at which `b₀ = g′(∞)` is sampled.
pub const INFINITY_RADIUS: f64 = 1e8;

/// `g₀′(q) = P(q)/Q(q) · exp(i·c·q)` with polynomial coefficients listed in
/// ascending order as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTemplate {
    pub numerator: Vec<[f64; 2]>,
    pub denominator: Vec<[f64; 2]>,
    pub exp_rate: f64,
}

fn horner(coeffs: &[[f64; 2]], q: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * q + Complex64::new(c[0], c[1]))
}

impl SeedTemplate {
    /// The built-in `exp(icz)`.
    pub fn exp(rate: f64) -> Self {
        Self { numerator: vec![[1.0, 0.0]], denominator: vec![[1.0, 0.0]], exp_rate: rate }
    }

    pub fn eval(&self, q: Complex64) -> Complex64 {
        horner(&self.numerator, q) / horner(&self.denominator, q) * (I * self.exp_rate * q).exp()
    }

    fn validate(&self) -> Result<()> {
        let nonzero = |v: &[[f64; 2]]| v.iter().any(|c| c[0] != 0.0 || c[1] != 0.0);
        if !nonzero(&self.numerator) || !nonzero(&self.denominator) {
            return Err(Error::InvalidParameter("seed polynomials must be nonzero".into()));
        }
        if !self.exp_rate.is_finite() {
            return Err(Error::InvalidParameter("exp_rate must be finite".into()));
        }
        Ok(())
    }
}

/// User seed file: a template plus the `q_r` parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSeedFile {
    #[serde(flatten)]
    pub template: SeedTemplate,
    #[serde(default = "default_r")]
    pub r: f64,
}

fn default_r() -> f64 {
    20.0
}

/// Conformal map of the upper half-plane onto `Δ(ri, r − 1/r)` with
/// `q_r(i) = i` and `q_r′(i) > 0`.
pub fn qr_map(r: f64, z: Complex64) -> Result<Complex64> {
    if !(r > 1.0) {
        return Err(Error::InvalidParameter(format!("q_r needs r > 1, got {r}")));
    }
    Ok(qr_from_cayley(r, (z - I) / (z + I)))
}

/// `q_r` written in terms of the Cayley variable `C = (z − i)/(z + i)`.
fn qr_from_cayley(r: f64, c: Complex64) -> Complex64 {
    let a = Complex64::new(0.0, -r / (r + 1.0));
    let v = I * c;
    let u = (v + a) / (1.0 + a.conj() * v);
    I * r + (r - 1.0 / r) * u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    BuiltIn,
    Normalized,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeedKind {
    /// `g′ ≡ b₀`; a degenerate evaluator for tests.
    Constant { b0: Complex64 },
    /// `g′(z) = g₀′(q_r(scale·z + a))`.
    Normalized { template: SeedTemplate, r: f64, a: Complex64, b: Complex64, scale: f64, z0: Complex64, collision_residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFunction {
    pub origin: Origin,
    pub description: String,
    #[serde(flatten)]
    pub kind: SeedKind,
}

impl SeedFunction {
    pub fn constant(b0: Complex64) -> Self {
        Self { origin: Origin::BuiltIn, description: format!("constant g' = {b0}"), kind: SeedKind::Constant { b0 } }
    }

    /// Normalized zero `z₀` with `g(z₀) = g(0) = 0`, if any.
    pub fn z0(&self) -> Option<Complex64> {
        match &self.kind {
            SeedKind::Constant { .. } => None,
            SeedKind::Normalized { z0, .. } => Some(*z0),
        }
    }

    pub fn gprime(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            SeedKind::Constant { b0 } => *b0,
            SeedKind::Normalized { template, r, a, scale, .. } => {
                let zeta = z * *scale + *a;
                template.eval(qr_from_cayley(*r, (zeta - I) / (zeta + I)))
            }
        }
    }

    /// `g′(1/s)`, finite at `s = 0`.
    pub fn gprime_recip(&self, s: Complex64) -> Complex64 {
        match &self.kind {
            SeedKind::Constant { b0 } => *b0,
            SeedKind::Normalized { template, r, a, scale, .. } => {
                let c = (*scale + (*a - I) * s) / (*scale + (*a + I) * s);
                template.eval(qr_from_cayley(*r, c))
            }
        }
    }

    /// `g′(H0⁻¹(w))` for `w` in the closed strip.
    pub fn gprime_strip(&self, w: Complex64) -> Result<Complex64> {
        let s = h0_inv_recip(w)?;
        if s.norm() <= 1.0 {
            Ok(self.gprime_recip(s))
        } else {
            Ok(self.gprime(1.0 / s))
        }
    }

    /// `g′(∞)` sampled at `|z| = 10⁸`.
    pub fn b0(&self) -> Complex64 {
        self.gprime_recip(Complex64::new(0.0, -1.0 / INFINITY_RADIUS))
    }

    /// `g(z) = ∫₀^z g′`.
    pub fn g(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        Ok(integrate_segment(|t| Ok(self.gprime(t)), Complex64::new(0.0, 0.0), z, tol)?.0)
    }
}

/// Grid and iteration budget of the collision search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionSearch {
    pub heights: Vec<f64>,
    pub re_min: f64,
    pub re_max: f64,
    pub re_step: f64,
    pub newton_iters: usize,
    pub residual_tol: f64,
    /// Minimum of `Im(b − a)/|b − a|`.
    pub min_angle: f64,
}

impl Default for CollisionSearch {
    fn default() -> Self {
        Self { heights: vec![0.0, 0.25, 0.5, 1.0], re_min: -30.0, re_max: 30.0, re_step: 0.5, newton_iters: 60, residual_tol: 1e-10, min_angle: 0.5 }
    }
}

struct Candidate {
    a: Complex64,
    b: Complex64,
    residual: f64,
    score: f64,
}

fn newton_collision<F>(fp: &F, a: Complex64, b_init: Complex64, cfg: &CollisionSearch) -> Option<Candidate>
where
    F: Fn(Complex64) -> Complex64,
{
    let seg = |b: Complex64| integrate_segment(|t| Ok(fp(t)), a, b, 1e-13).map(|v| v.0);
    let mut b = b_init;
    for _ in 0..cfg.newton_iters {
        let diff = seg(b).ok()?;
        if diff.norm() < 1e-13 {
            break;
        }
        let mut step = diff / fp(b);
        if step.norm() > 2.0 {
            step = step / step.norm() * 2.0;
        }
        b -= step;
        if b.im < 0.0 {
            b.im = 0.0;
        }
        if !b.re.is_finite() || !b.im.is_finite() {
            return None;
        }
    }
    let residual = seg(b).ok()?.norm();
    let d = b - a;
    if !(residual < cfg.residual_tol) || d.norm() <= 1e-3 || d.im / d.norm() < cfg.min_angle {
        return None;
    }
    let logs: Vec<f64> = (0..=100).map(|k| fp(a + d * (k as f64 / 100.0)).norm().ln()).collect();
    let score = logs.iter().cloned().fold(f64::MIN, f64::max) - logs.iter().cloned().fold(f64::MAX, f64::min);
    Some(Candidate { a, b, residual, score })
}

/// Builds the normalized seed `g(z) = (f(2Dz + a′) − f(a′))/(2D)` from
/// `f′ = g₀′∘q_r`, where `f(a′) = f(b′)` is located by a grid-seeded damped
/// Newton search and `D = |b′ − a′|`.
pub fn build_normalized_seed(template: &SeedTemplate, r: f64, origin: Origin, cfg: &CollisionSearch) -> Result<SeedFunction> {
    template.validate()?;
    qr_map(r, I)?;
    let fp = |z: Complex64| template.eval(qr_from_cayley(r, (z - I) / (z + I)));
    let mut starts = Vec::new();
    for &h in &cfg.heights {
        let steps = ((cfg.re_max - cfg.re_min) / cfg.re_step).round() as i64;
        for k in 0..=steps {
            starts.push(Complex64::new(cfg.re_min + k as f64 * cfg.re_step, h));
        }
    }
    let two_pi = 2.0 * PI;
    let mut offsets: Vec<Complex64> = Vec::new();
    for s in [-1.0, 1.0] {
        for dy in [0.0, 1.0, 2.0, 4.0] {
            offsets.push(Complex64::new(s * two_pi, dy));
        }
    }
    offsets.extend([Complex64::new(3.0, 3.0), Complex64::new(-3.0, 3.0), Complex64::new(1.0, 4.0), Complex64::new(-1.0, 4.0), Complex64::new(0.0, 2.0), Complex64::new(0.0, 4.0)]);
    let found: Vec<Option<Candidate>> = starts
        .par_iter()
        .map(|&a| {
            offsets
                .iter()
                .filter_map(|&o| newton_collision(&fp, a, a + o, cfg))
                .min_by(|x, y| x.score.total_cmp(&y.score))
        })
        .collect();
    let best = found
        .into_iter()
        .flatten()
        .min_by(|x, y| x.score.total_cmp(&y.score))
        .ok_or_else(|| Error::NoCollision(format!("no admissible pair on {} grid starts", starts.len())))?;
    let d = (best.b - best.a).norm();
    if d == 0.0 {
        return Err(Error::NoCollision("degenerate pair a' = b'".into()));
    }
    let scale = 2.0 * d;
    let z0 = (best.b - best.a) / scale;
    let description = format!(
        "g'(z) = g0'(q_r(2Dz + a')) with r = {r}, a' = {}, b' = {}, D = {d}",
        best.a, best.b
    );
    Ok(SeedFunction {
        origin,
        description,
        kind: SeedKind::Normalized { template: template.clone(), r, a: best.a, b: best.b, scale, z0, collision_residual: best.residual },
    })
}

/// The built-in seed `exp(iz)` normalized with `q_20`.
pub fn builtin_exp_seed() -> Result<SeedFunction> {
    build_normalized_seed(&SeedTemplate::exp(1.0), 20.0, Origin::Normalized, &CollisionSearch::default())
}

pub fn user_seed(file: &UserSeedFile) -> Result<SeedFunction> {
    let t = &file.template;
    t.validate()?;
    qr_map(file.r, I)?;
    // the denominator must not vanish on the closed target disk of q_r
    let (center, rad) = (Complex64::new(0.0, file.r), file.r - 1.0 / file.r);
    let mut qmin = f64::INFINITY;
    let mut qmax: f64 = 0.0;
    for i in 0..=64 {
        for j in 0..128 {
            let q = center + Complex64::from_polar(rad * i as f64 / 64.0, 2.0 * PI * j as f64 / 128.0);
            let v = horner(&t.denominator, q).norm();
            qmin = qmin.min(v);
            qmax = qmax.max(v);
        }
    }
    if !(qmin > 1e-12 * qmax) {
        return Err(Error::InvalidParameter("seed denominator vanishes on the q_r target disk".into()));
    }
    build_normalized_seed(t, file.r, Origin::User, &CollisionSearch::default())
}

/// Flags marking constants that rest on grid heuristics rather than formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicFlags {
    pub m_bounds: bool,
    pub delta: bool,
    pub xi: bool,
    pub beta2: bool,
    pub beta3: bool,
    pub eps1: bool,
    #[serde(rename = "M1")]
    pub m1: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedConstants {
    pub b0: Complex64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    /// Multiplicative widening applied to `[m, M]` in annulus assertions.
    pub safety_factor: f64,
    pub delta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub eta: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B_koebe")]
    pub b_koebe: f64,
    pub z0: Complex64,
    pub xi: f64,
    pub rho: f64,
    pub r_cov: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub eps1: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    pub c0: f64,
    pub eps0: f64,
    pub beta1_rec: f64,
    pub eps_rec: f64,
    pub heuristic: HeuristicFlags,
}

/// Annulus data `(b₀, m, M)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusEstimate {
    pub b0: Complex64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

pub const SAFETY_FACTOR: f64 = 1.05;
pub const BETA2: f64 = 0.01;
const CAYLEY_RADII: usize = 160;
const CAYLEY_ANGLES: usize = 320;

/// `g′(z)` at `z = i(1 + ζ)/(1 − ζ)` for `|ζ| ≤ 1`, with `ζ = 1` giving `g′(∞)`.
pub fn gprime_cayley(g: &SeedFunction, zeta: Complex64) -> Complex64 {
    if (zeta + 1.0).norm() < 1e-12 {
        return g.gprime(Complex64::new(0.0, 0.0));
    }
    // s = 1/z = −i(1 − ζ)/(1 + ζ)
    let s = -I * (1.0 - zeta) / (1.0 + zeta);
    if s.norm() <= 1.0 {
        g.gprime_recip(s)
    } else {
        g.gprime(1.0 / s)
    }
}

/// Extremes of `|g′|` over a polar grid of the Cayley disk
/// `z = i(1 + ζ)/(1 − ζ)`, including the real axis and `∞`.
pub fn estimate_annulus(g: &SeedFunction) -> Result<AnnulusEstimate> {
    let b0 = g.b0();
    let rows: Vec<(f64, f64)> = (0..=CAYLEY_RADII)
        .into_par_iter()
        .map(|i| {
            let rad = i as f64 / CAYLEY_RADII as f64;
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for j in 0..CAYLEY_ANGLES {
                let zeta = Complex64::from_polar(rad, 2.0 * PI * j as f64 / CAYLEY_ANGLES as f64);
                let v = gprime_cayley(g, zeta);
                lo = lo.min(v.norm());
                hi = hi.max(v.norm());
            }
            (lo, hi)
        })
        .collect();
    let m = rows.iter().map(|r| r.0).fold(b0.norm(), f64::min);
    let big_m = rows.iter().map(|r| r.1).fold(b0.norm(), f64::max);
    if !(m > 0.0) {
        return Err(Error::NonPositiveConstant { name: "m", value: m });
    }
    Ok(AnnulusEstimate { b0, m, big_m })
}

/// `H_β = P(J ∖ [−β, β], ·)`.
pub fn h_beta(beta: f64, z: Complex64) -> Result<Complex64> {
    if beta == 0.0 {
        return h0(z);
    }
    Ok(poisson_interval(-1.0, -beta, z)? + poisson_interval(beta, 1.0, z)?)
}

/// `g_β(z) = ∫₀^z g′(H0⁻¹(H_β(ζ))) dζ` along the segment `[0, z]`.
pub fn g_beta(g: &SeedFunction, beta: f64, z: Complex64, tol: f64) -> Result<Complex64> {
    Ok(integrate_segment(|t| g.gprime_strip(h_beta(beta, t)?), Complex64::new(0.0, 0.0), z, tol)?.0)
}

/// Continues the zero `z_β` of `g_β` from `β = 0` (where it equals `z₀`) to
/// `beta`, returning the whole path.
pub fn zero_pair_path(g: &SeedFunction, beta: f64, steps: usize) -> Result<Vec<(f64, Complex64)>> {
    let mut z = g.z0().ok_or(Error::MissingZeroPair)?;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let b = beta * k as f64 / steps.max(1) as f64;
        let mut converged = false;
        for _ in 0..50 {
            let val = g_beta(g, b, z, 1e-14)?;
            let d = g.gprime_strip(h_beta(b, z)?)?;
            let step = val / d;
            z -= step;
            if !(z.im > 0.0) {
                return Err(Error::EstimateDiverged(format!("zero pair left the half-plane at beta = {b}")));
            }
            if step.norm() < 1e-14 * (1.0 + z.norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::EstimateDiverged(format!("zero-pair continuation stalled at beta = {b}")));
        }
        out.push((b, z));
    }
    Ok(out)
}

pub fn zero_pair(g: &SeedFunction, beta: f64) -> Result<Complex64> {
    Ok(zero_pair_path(g, beta, 10)?.last().expect("nonempty").1)
}

/// Grid over `D(c) = closure((ℍ + ci) ∩ Δ)`.
fn d_grid(c: f64) -> Vec<Complex64> {
    let mut v = Vec::new();
    let ymax = 1.0;
    for i in 0..=40 {
        let y = c + (ymax - c) * (i as f64 / 40.0).powi(2);
        let half = (1.0 - y * y).max(0.0).sqrt();
        for j in 0..=80 {
            v.push(Complex64::new(-half + 2.0 * half * j as f64 / 80.0, y));
        }
    }
    v
}

/// Distance of `H_β(z)` to the strip boundary, computed from the angles
/// subtended by `X` and by its complement so that neither side cancels.
fn strip_boundary_distance(beta: f64, z: Complex64) -> Result<f64> {
    let inside = h_beta(beta, z)?.re;
    let mut outside = (z.im.atan2(1.0 - z.re) + z.im.atan2(z.re + 1.0)) / PI;
    if beta > 0.0 {
        outside += poisson_interval(-beta, beta, z)?.re;
    }
    Ok(inside.min(outside))
}

/// Half of the distance from `∪_{β ≤ β₃} H_β(D(c))` to the strip boundary.
fn eps1_of(c: f64, beta3: f64) -> Result<f64> {
    let mut dmin = f64::INFINITY;
    for b in [0.0, beta3 / 2.0, beta3] {
        for z in d_grid(c) {
            match strip_boundary_distance(b, z) {
                Err(Error::SingularEndpoint { .. }) => continue,
                d => dmin = dmin.min(d?),
            }
        }
    }
    Ok(dmin / 2.0)
}

/// `d/dw g′(H0⁻¹(w))`, differenced in whichever of `z` or `s = 1/z` is bounded.
pub fn strip_derivative(g: &SeedFunction, w: Complex64) -> Result<Complex64> {
    let s = h0_inv_recip(w)?;
    let h = 1e-6;
    // ds/dw = −(iπ/2)(1 − s²)
    let ds_dw = -I * (PI / 2.0) * (1.0 - s * s);
    if s.norm() <= 1.0 {
        let d = (g.gprime_recip(s + h) - g.gprime_recip(s - h)) / (2.0 * h);
        Ok(d * ds_dw)
    } else {
        let z = 1.0 / s;
        let hz = h * z.norm().max(1.0);
        let d = (g.gprime(z + hz) - g.gprime(z - hz)) / (2.0 * hz);
        Ok(-d * ds_dw / (s * s))
    }
}

/// Twice the largest sampled derivative of `g′∘H0⁻¹` on the `ε₁`-neighborhood.
fn m1_of(g: &SeedFunction, c: f64, beta3: f64, eps1: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for b in [0.0, beta3] {
        for z in d_grid(c).into_iter().step_by(3) {
            let w0 = match h_beta(b, z) {
                Err(Error::SingularEndpoint { .. }) => continue,
                w => w?,
            };
            for k in 0..8 {
                let w = w0 + Complex64::from_polar(eps1, PI * k as f64 / 4.0);
                let w = Complex64::new(w.re.clamp(0.0, 1.0), w.im);
                worst = worst.max(strip_derivative(g, w)?.norm());
            }
        }
    }
    Ok(2.0 * worst)
}

/// Largest `δ` on a geometric grid with `|g′(H0⁻¹(w)) − b₀| < |b₀|/4` at all
/// sampled `|w| < δ` of the closed strip.
fn estimate_delta(g: &SeedFunction, b0: Complex64) -> Result<f64> {
    let target = b0.norm() / 4.0;
    let mut delta = 0.5;
    while delta > 1e-14 {
        let mut ok = true;
        'scan: for i in 1..=32 {
            let rad = delta * i as f64 / 32.0;
            for j in 0..=32 {
                let th = -PI / 2.0 + PI * j as f64 / 32.0;
                let w = Complex64::from_polar(rad, th);
                let w = Complex64::new(w.re.max(0.0), w.im);
                if (g.gprime_strip(w)? - b0).norm() >= target {
                    ok = false;
                    break 'scan;
                }
            }
        }
        if ok {
            return Ok(delta);
        }
        delta /= 2.0_f64.sqrt();
    }
    Err(Error::EstimateDiverged("no delta found down to 1e-14".into()))
}

/// Estimates every seed-dependent constant. Needs a normalized seed with a
/// zero pair.
pub fn estimate_constants(g: &SeedFunction) -> Result<SeedConstants> {
    let z0 = g.z0().ok_or(Error::MissingZeroPair)?;
    let ann = estimate_annulus(g)?;
    let (b0, m, big_m) = (ann.b0, ann.m, ann.big_m);
    let delta = estimate_delta(g, b0)?;
    let t = 24.0 / (PI * delta);
    let bn = b0.norm();
    let eta = 0.9 * (PI * delta / 24.0).min(PI * delta * bn / (96.0 * big_m)).min(bn / (8.0 * big_m));
    let a = if big_m / m <= 1.0 + 1e-15 { 1.0 } else { (PI * PI / (4.0 * (big_m / m).ln())).tanh() };
    let b_koebe = a * m / 4.0;
    let path = zero_pair_path(g, BETA2, 10)?;
    let xi = path.iter().map(|&(_, z)| (z.im / 2.0).min(1.0 - z.norm())).fold(f64::INFINITY, f64::min);
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::NonPositiveConstant { name: "xi", value: xi });
    }
    let rho = a.min(0.49) * xi;
    let r_cov = a * xi * m / 4.0;
    let beta3 = BETA2;
    let c0 = (r_cov / (8.0 * big_m)).min(xi / 4.0);
    let eps1 = eps1_of(c0, beta3)?;
    let m1 = m1_of(g, c0, beta3, eps1)?;
    let eps0 = (r_cov / (4.0 * m1)).min(eps1).min(eta / (2.0 * PI));
    let beta1_rec = 0.25 * c0.min(beta3);
    let eps_rec = 0.25 * (eps0 / 24.0).min(1.0 / 200.0);
    let out = SeedConstants {
        b0,
        m,
        big_m,
        safety_factor: SAFETY_FACTOR,
        delta,
        t,
        eta,
        a,
        b_koebe,
        z0,
        xi,
        rho,
        r_cov,
        beta2: BETA2,
        beta3,
        eps1,
        m1,
        c0,
        eps0,
        beta1_rec,
        eps_rec,
        heuristic: HeuristicFlags { m_bounds: true, delta: true, xi: true, beta2: true, beta3: true, eps1: true, m1: true },
    };
    for (name, v) in [
        ("m", m),
        ("delta", delta),
        ("eta", eta),
        ("A", a),
        ("rho", rho),
        ("r_cov", r_cov),
        ("eps1", eps1),
        ("M1", m1),
        ("c0", c0),
        ("eps0", eps0),
        ("beta1_rec", beta1_rec),
        ("eps_rec", eps_rec),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveConstant { name, value: v });
        }
    }
    Ok(out)
}

impl SeedConstants {
    /// Lower and upper annulus radii with the safety factor applied.
    pub fn annulus(&self) -> (f64, f64) {
        (self.m / self.safety_factor, self.big_m * self.safety_factor)
    }
}

/// Post-conditions of a normalized seed and its constants, sampled on
/// `samples` interior and `samples` boundary points of the Cayley disk.
pub fn seed_checks(g: &SeedFunction, c: &SeedConstants, samples: usize, rng_seed: u64) -> Result<Vec<VerificationReport>> {
    let origin = Complex64::new(0.0, 0.0);
    let mut out = Vec::new();
    if let SeedKind::Normalized { z0, collision_residual, .. } = &g.kind {
        out.push(VerificationReport::new("seed_collision_residual", None, 1e-10, *collision_residual, 1, *z0));
        let gz0 = g.g(*z0, 1e-15)?.norm();
        out.push(VerificationReport::new("seed_zero_pair", None, 1e-9, gz0, 1, *z0));
        out.push(VerificationReport::new("seed_zero_radius", None, 1e-9, (z0.norm() - 0.5).abs(), 1, *z0));
    }
    out.push(VerificationReport::new("seed_origin", None, 1e-9, g.g(origin, DEFAULT_TOL)?.norm(), 1, origin));
    let sampler = Sampler::new(rng_seed, stream_id("seed"));
    let pts: Vec<Complex64> = sampler.disk(samples, origin, 1.0).into_iter().chain(sampler.circle(samples, origin, 1.0)).collect();
    let vals: Vec<(f64, Complex64)> = pts.par_iter().map(|&z| (gprime_cayley(g, z).norm(), z)).collect();
    let (lo, lo_pt) = vals.iter().copied().fold((f64::INFINITY, origin), |a, b| if b.0 < a.0 { b } else { a });
    let (hi, hi_pt) = vals.iter().copied().fold((0.0, origin), |a, b| if b.0 > a.0 { b } else { a });
    let (m_lo, m_hi) = c.annulus();
    out.push(VerificationReport::lower("seed_nonvanishing", None, 0.0, lo, hi, vals.len(), lo_pt).with_note("lower bound; pass needs min |g'| > 0"));
    out.push(VerificationReport::lower("seed_annulus_lower", None, m_lo, lo, hi, vals.len(), lo_pt));
    out.push(VerificationReport::new("seed_annulus_upper", None, m_hi, hi, vals.len(), hi_pt));
    let b0 = c.b0.norm();
    out.push(VerificationReport::new("eta_constraint", None, (PI * c.delta / 24.0).min(PI * c.delta * b0 / (96.0 * c.big_m)).min(b0 / (8.0 * c.big_m)), c.eta, 1, origin));
    out.push(VerificationReport::new("t_delta_identity", None, 24.0 * 1e-12, (c.t * PI * c.delta - 24.0).abs(), 1, origin));
    Ok(out)
}
