//! Finite-stage assembly `Y₃ ⊂ … ⊂ Y_n` that plants scaled copies of the
//! `N = n` construction near successive anchor points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::ConstructionParams;
use super::state::{build_construction, poisson_unit_i};
use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::poisson::poisson;
use crate::sampling::{radical_inverse, stream_id, Sampler};

/// Smallest copy size, relative to `max(1, |τ|)`, whose intervals stay resolvable.
pub const MIN_RELATIVE_SIZE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseConfig {
    pub eps: f64,
    pub beta1: f64,
    /// `γ₁ = gamma1_factor·ε·β₁`.
    pub gamma1_factor: f64,
    /// Depth of every inserted construction.
    pub depth: usize,
    pub sigma: f64,
    pub max_stage: u32,
    /// `p_3, p_4, …`; entries before `p_4` are unused.
    pub anchors: Vec<f64>,
    /// Largest allowed `original/current` ratio of a certificate margin.
    pub degradation: f64,
    pub cert_samples: usize,
    pub tol: f64,
    pub rng_seed: u64,
}

impl Default for DenseConfig {
    fn default() -> Self {
        Self {
            eps: 1.0 / 128.0,
            beta1: 1.0 / 128.0,
            gamma1_factor: 0.5,
            depth: 1,
            sigma: 0.25,
            max_stage: 6,
            anchors: van_der_corput_anchors(6),
            degradation: 2.0,
            cert_samples: 64,
            tol: 1e-12,
            rng_seed: 0,
        }
    }
}

/// `p_n` for `n = 3..=max_stage` from the base-2 van der Corput sequence on `[0, 1]`.
pub fn van_der_corput_anchors(max_stage: u32) -> Vec<f64> {
    (3..=max_stage).map(|n| radical_inverse(n as u64 - 2, 2)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InsertCase {
    Base,
    /// `τ` in a gap of the current set.
    Gap,
    /// `τ` inside the current set; a hole is cut first.
    Hole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: u32,
    pub anchor: f64,
    pub tau: f64,
    pub case: InsertCase,
    /// Half-width of the cleared interval around `τ`.
    pub rho: f64,
    /// Zero of `Im P(Y ∪ I′(ρ, τ), ·)` in the cleared interval; the copy is centered here.
    pub q: f64,
    pub delta: f64,
    /// Removed interval for the hole case.
    pub hole: Option<[f64; 2]>,
    pub rho_halvings: u32,
    pub delta_halvings: u32,
    /// Earlier certificates skip sample points within this distance of `τ`.
    pub exclusion_radius: f64,
    /// Largest `original/current` margin ratio over earlier certificates.
    pub worst_degradation: f64,
    pub intervals_after: usize,
}

/// 12ε margin of one level-1 node of a planted copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub stage: u32,
    pub center: f64,
    pub radius: f64,
    pub beta1: f64,
    pub bound: f64,
    pub original_margin: f64,
    pub current_margin: f64,
    /// Sample points skipped so far because they lie near a later modification.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseAssembly {
    pub y: IntervalSet,
    pub log: Vec<StageLog>,
    pub certificates: Vec<Certificate>,
}

struct Copy {
    set: IntervalSet,
    nodes: Vec<(f64, f64)>,
    beta1: f64,
    eps: f64,
}

fn planted_copy(cfg: &DenseConfig, n: u32, delta: f64, offset: f64) -> Result<Copy> {
    let p = ConstructionParams::new(n, cfg.eps, cfg.beta1, cfg.gamma1_factor * cfg.eps * cfg.beta1)?;
    let st = build_construction(p, cfg.depth, cfg.tol)?;
    let set = st.x_truncated()?.scale_translate(delta, offset)?;
    let nodes = st
        .level_indices(1)
        .into_iter()
        .map(|i| Ok((delta * st.center_abs(i)? + offset, delta * p.scale(1))))
        .collect::<Result<_>>()?;
    Ok(Copy { set, nodes, beta1: p.beta1, eps: p.eps })
}

/// Largest sampled `|P(Y ∖ I(k), z)|` over the 12ε region of a node,
/// skipping points within `exclusion` of each center in `avoid`. Returns the
/// maximum and the number of skipped points.
fn observed(y: &IntervalSet, center: f64, radius: f64, beta1: f64, pts: &[Complex64], avoid: &[(f64, f64)]) -> Result<(f64, usize)> {
    let local = y.scale_translate(1.0 / radius, -center / radius)?;
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for &u in pts {
        let z = Complex64::new(center, 0.0) + u * radius;
        if avoid.iter().any(|&(t, r)| (z - t).norm() < r) {
            skipped += 1;
            continue;
        }
        match poisson(&local, u).and_then(|v| Ok(v - poisson_unit_i(beta1, u)?)) {
            Ok(v) => worst = worst.max(v.norm()),
            Err(Error::SingularEndpoint { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((worst, skipped))
}

fn perturb_tau(y: &IntervalSet, p: f64, window: f64) -> Result<f64> {
    if !y.is_boundary(p) {
        return Ok(p);
    }
    for k in 1..=16 {
        let t = p + window * k as f64 / 64.0;
        if !y.is_boundary(t) {
            return Ok(t);
        }
    }
    Err(Error::AnchorOnBoundary(p))
}

/// Zero of `Im P(Y, τ + ρu)` for `u ∈ (−1/2, 1/2)`, where `Y` covers
/// `ρI′ + τ` and misses `ρ(−1/2, 1/2) + τ`.
fn gap_root(y: &IntervalSet, tau: f64, rho: f64) -> Result<f64> {
    let local = y.scale_translate(1.0 / rho, -tau / rho)?;
    let f = |u: f64| -> Result<f64> { Ok(poisson(&local, Complex64::new(u, 0.0))?.im) };
    let (mut lo, mut hi) = (-0.5 + 1e-9, 0.5 - 1e-9);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::NoSignChange(format!("cleared interval around {tau}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(tau + rho * 0.5 * (lo + hi))
}

/// Distance factor of the neighborhood of a modification that earlier
/// certificates no longer sample.
pub const EXCLUSION_FACTOR: f64 = 8.0;

/// Largest share of a certificate's sample points that may be excluded.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.25;

pub fn assemble_dense(cfg: &DenseConfig) -> Result<DenseAssembly> {
    if cfg.max_stage < 3 {
        return Err(Error::InvalidParameter(format!("max_stage must be at least 3, got {}", cfg.max_stage)));
    }
    let needed = (cfg.max_stage - 2) as usize;
    if cfg.anchors.len() < needed {
        return Err(Error::InvalidParameter(format!("{needed} anchors needed, {} given", cfg.anchors.len())));
    }
    let anchors = &cfg.anchors[..needed];
    for i in 0..anchors.len() {
        if !anchors[i].is_finite() || anchors[i + 1..].contains(&anchors[i]) {
            return Err(Error::InvalidParameter("anchors must be finite and distinct".into()));
        }
    }
    if !(cfg.sigma > 0.0 && cfg.degradation > 1.0 && cfg.cert_samples > 0) {
        return Err(Error::InvalidParameter("sigma > 0, degradation > 1 and cert_samples > 0 required".into()));
    }
    let pts = Sampler::new(cfg.rng_seed, stream_id("dense")).half_annulus(cfg.cert_samples, Complex64::new(0.0, 0.0), cfg.beta1, 1.0);

    let base = planted_copy(cfg, 3, 1.0, 0.0)?;
    let mut y = base.set.clone();
    let mut certs = Vec::new();
    for &(c, r) in &base.nodes {
        let bound = 12.0 * base.eps;
        let (obs, skipped) = observed(&y, c, r, base.beta1, &pts, &[])?;
        let m = bound - obs;
        certs.push(Certificate { stage: 3, center: c, radius: r, beta1: base.beta1, bound, original_margin: m, current_margin: m, excluded: skipped });
    }
    let mut log = vec![StageLog {
        stage: 3,
        anchor: anchors[0],
        tau: 0.0,
        case: InsertCase::Base,
        rho: 0.0,
        q: 0.0,
        delta: 1.0,
        hole: None,
        rho_halvings: 0,
        delta_halvings: 0,
        exclusion_radius: 0.0,
        worst_degradation: 1.0,
        intervals_after: y.len(),
    }];
    let mut avoid: Vec<(u32, f64, f64)> = Vec::new();

    for n in 4..=cfg.max_stage {
        let p = anchors[(n - 3) as usize];
        let window = cfg.sigma / 2f64.powi(n as i32);
        let tau = perturb_tau(&y, p, window)?;
        let (case, mut rho) = match y.component_containing(tau) {
            Some((u0, u1)) => (InsertCase::Hole, (tau - u0).min(u1 - tau).min(window) / 2.0),
            None => {
                let left = y.intervals().iter().map(|iv| iv.1).filter(|&b| b <= tau).fold(f64::NEG_INFINITY, f64::max);
                let right = y.intervals().iter().map(|iv| iv.0).filter(|&a| a >= tau).fold(f64::INFINITY, f64::min);
                (InsertCase::Gap, (tau - left).min(right - tau).min(window) / 2.0)
            }
        };
        let mut rho_halvings = 0;
        loop {
            if rho < MIN_RELATIVE_SIZE * tau.abs().max(1.0) {
                return Err(Error::Precondition(format!("stage {n}: no clearing keeps margins within {}x", cfg.degradation)));
            }
            let (cleared, hole) = match case {
                InsertCase::Hole => (y.remove(tau - rho / 2.0, tau + rho / 2.0)?, Some([tau - rho / 2.0, tau + rho / 2.0])),
                _ => {
                    let side = IntervalSet::new(vec![(tau - rho, tau - rho / 2.0), (tau + rho / 2.0, tau + rho)])?;
                    (y.disjoint_union(&side)?, None)
                }
            };
            let q = gap_root(&cleared, tau, rho)?;
            let exclusion = EXCLUSION_FACTOR * rho;
            let mut avoid_now = avoid.clone();
            avoid_now.push((n, tau, exclusion));

            // the copy is shrunk until its own 12ε margins are positive
            let mut delta = (rho / 2.0 - (q - tau).abs()).min(rho / 4.0);
            let mut delta_halvings = 0;
            let (candidate, copy) = loop {
                let copy = planted_copy(cfg, n, delta, q - delta / 2.0)?;
                let cand = cleared.disjoint_union(&copy.set)?;
                let mut ok = true;
                for &(c, r) in &copy.nodes {
                    if observed(&cand, c, r, copy.beta1, &pts, &[])?.0 >= 12.0 * copy.eps {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    break (cand, copy);
                }
                delta /= 2.0;
                delta_halvings += 1;
                if delta < MIN_RELATIVE_SIZE * q.abs().max(1.0) {
                    return Err(Error::Precondition(format!("stage {n}: copy margins stay nonpositive")));
                }
            };

            let mut worst: f64 = 1.0;
            let mut covered = true;
            let mut current = Vec::with_capacity(certs.len());
            for c in &certs {
                let later: Vec<(f64, f64)> = avoid_now.iter().filter(|a| a.0 > c.stage).map(|a| (a.1, a.2)).collect();
                let (obs, skipped) = observed(&candidate, c.center, c.radius, c.beta1, &pts, &later)?;
                let m = c.bound - obs;
                worst = worst.max(if m > 0.0 { c.original_margin / m } else { f64::INFINITY });
                covered &= skipped as f64 <= MAX_EXCLUDED_FRACTION * pts.len() as f64;
                current.push((m, skipped));
            }
            if worst <= cfg.degradation && covered {
                for (c, (m, skipped)) in certs.iter_mut().zip(current) {
                    c.current_margin = m;
                    c.excluded = skipped;
                }
                for &(c, r) in &copy.nodes {
                    let bound = 12.0 * copy.eps;
                    let (obs, skipped) = observed(&candidate, c, r, copy.beta1, &pts, &[])?;
                    certs.push(Certificate { stage: n, center: c, radius: r, beta1: copy.beta1, bound, original_margin: bound - obs, current_margin: bound - obs, excluded: skipped });
                }
                avoid = avoid_now;
                y = candidate;
                log.push(StageLog {
                    stage: n,
                    anchor: p,
                    tau,
                    case,
                    rho,
                    q,
                    delta,
                    hole,
                    rho_halvings,
                    delta_halvings,
                    exclusion_radius: exclusion,
                    worst_degradation: worst,
                    intervals_after: y.len(),
                });
                break;
            }
            rho /= 2.0;
            rho_halvings += 1;
        }
    }
    Ok(DenseAssembly { y, log, certificates: certs })
}
