//! Schwarz–Pick contraction of half-plane self-maps and propagation of a
//! Becker-type bound `|F″/F′| ≤ τ/(2 Im w)` through them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::sampling::{stream_id, Sampler};

/// Slack allowed above the bound so that equality cases pass.
pub const EQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum HalfPlaneMap {
    Identity,
    Scale { k: f64 },
    Translate { t: Complex64 },
    /// `(az + b)/(cz + d)` with real coefficients and `ad − bc > 0`.
    Mobius { a: f64, b: f64, c: f64, d: f64 },
    Sqrt,
}

impl HalfPlaneMap {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            HalfPlaneMap::Scale { k } => k > 0.0,
            HalfPlaneMap::Translate { t } => t.im >= 0.0 && t.re.is_finite(),
            HalfPlaneMap::Mobius { a, b, c, d } => a * d - b * c > 0.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{self:?} is not a self-map of the upper half-plane")))
        }
    }

    pub fn name(&self) -> String {
        match *self {
            HalfPlaneMap::Identity => "identity".into(),
            HalfPlaneMap::Scale { k } => format!("{k}z"),
            HalfPlaneMap::Translate { t } => format!("z+({t})"),
            HalfPlaneMap::Mobius { a, b, c, d } => format!("({a}z+{b})/({c}z+{d})"),
            HalfPlaneMap::Sqrt => "sqrt".into(),
        }
    }

    /// Whether `|p′| = Im p/Im z` holds identically.
    pub fn is_isometry(&self) -> bool {
        match *self {
            HalfPlaneMap::Sqrt => false,
            HalfPlaneMap::Translate { t } => t.im == 0.0,
            _ => true,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            HalfPlaneMap::Identity => z,
            HalfPlaneMap::Scale { k } => z * k,
            HalfPlaneMap::Translate { t } => z + t,
            HalfPlaneMap::Mobius { a, b, c, d } => (z * a + b) / (z * c + d),
            HalfPlaneMap::Sqrt => z.sqrt(),
        }
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        match *self {
            HalfPlaneMap::Identity | HalfPlaneMap::Translate { .. } => Complex64::new(1.0, 0.0),
            HalfPlaneMap::Scale { k } => Complex64::new(k, 0.0),
            HalfPlaneMap::Mobius { a, b, c, d } => {
                let den = z * c + d;
                (a * d - b * c) / (den * den)
            }
            HalfPlaneMap::Sqrt => 0.5 / z.sqrt(),
        }
    }

    /// The maps exercised by the default suite.
    pub fn standard_suite() -> Vec<HalfPlaneMap> {
        vec![
            HalfPlaneMap::Identity,
            HalfPlaneMap::Scale { k: 2.0 },
            HalfPlaneMap::Translate { t: Complex64::new(0.0, 1.0) },
            HalfPlaneMap::Mobius { a: 0.0, b: -1.0, c: 1.0, d: 0.0 },
            HalfPlaneMap::Mobius { a: 2.0, b: 1.0, c: 1.0, d: 3.0 },
            HalfPlaneMap::Sqrt,
        ]
    }
}

/// Model `F` with `F″/F′(w) = (τ/2)/(w + i)`, which satisfies the Becker-type
/// bound since `|w + i| > Im w`.
pub fn model_log_derivative(tau: f64, w: Complex64) -> Complex64 {
    (tau / 2.0) / (w + Complex64::new(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeckerResult {
    pub map: HalfPlaneMap,
    pub name: String,
    /// Extremes of `|p′(z)|·Im z/Im p(z)`.
    pub sp_min_ratio: f64,
    pub sp_max_ratio: f64,
    pub schwarz_pick: VerificationReport,
    /// `|(F″/F′)(p(z))|·|p′(z)|` against `τ/(2 Im z)`, as a ratio.
    pub composed: VerificationReport,
}

/// Sample points with `Re z ∈ [−10, 10]` and `Im z` log-uniform in `[10⁻², 10²]`.
pub fn becker_samples(samples: usize, rng_seed: u64) -> Vec<Complex64> {
    Sampler::new(rng_seed, stream_id("becker"))
        .rect(samples, 0.0, 1.0, 0.0, 1.0)
        .into_iter()
        .map(|u| Complex64::new(-10.0 + 20.0 * u.re, 10f64.powf(-2.0 + 4.0 * u.im)))
        .collect()
}

pub fn check_becker_halfplane<F>(log_deriv: F, map: HalfPlaneMap, tau: f64, samples: usize, rng_seed: u64) -> Result<BeckerResult>
where
    F: Fn(Complex64) -> Complex64,
{
    map.validate()?;
    if !(tau > 0.0) || samples == 0 {
        return Err(Error::InvalidParameter("tau must be positive and samples nonzero".into()));
    }
    let (mut sp_lo, mut sp_hi, mut sp_pt) = (f64::INFINITY, 0.0_f64, Complex64::new(0.0, 0.0));
    let (mut c_hi, mut c_pt) = (0.0_f64, Complex64::new(0.0, 0.0));
    for z in becker_samples(samples, rng_seed) {
        let p = map.eval(z);
        if !(p.im > 0.0) {
            return Err(Error::LeftHalfPlane(p));
        }
        let dp = map.deriv(z).norm();
        let sp = dp * z.im / p.im;
        sp_lo = sp_lo.min(sp);
        if sp > sp_hi {
            sp_hi = sp;
            sp_pt = z;
        }
        let composed = log_deriv(p).norm() * dp / (tau / (2.0 * z.im));
        if composed > c_hi {
            c_hi = composed;
            c_pt = z;
        }
    }
    let node = Some(map.name());
    Ok(BeckerResult {
        map,
        name: map.name(),
        sp_min_ratio: sp_lo,
        sp_max_ratio: sp_hi,
        schwarz_pick: VerificationReport::new("schwarz_pick", node.clone(), 1.0 + EQUALITY_SLACK, sp_hi, samples, sp_pt),
        composed: VerificationReport::new("becker_composed", node, 1.0 + EQUALITY_SLACK, c_hi, samples, c_pt),
    })
}

/// Runs [`check_becker_halfplane`] with the model `F` over the standard maps.
pub fn becker_suite(tau: f64, samples: usize, rng_seed: u64) -> Result<Vec<BeckerResult>> {
    HalfPlaneMap::standard_suite()
        .into_iter()
        .map(|m| check_becker_halfplane(|w| model_log_derivative(tau, w), m, tau, samples, rng_seed))
        .collect()
}
