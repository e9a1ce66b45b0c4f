//! Closed-form harmonic-measure map `P(X, z)` on the upper half-plane and the
//! strip map `H0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::quadrature::{integrate_real, DEFAULT_TOL};

/// Relative guard radius around interval endpoints.
pub const GUARD: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Anything that maps the closed upper half-plane into the closed strip
/// `0 <= Re <= 1`.
pub trait StripField: Sync {
    fn strip_value(&self, z: Complex64) -> Result<Complex64>;
}

impl StripField for IntervalSet {
    fn strip_value(&self, z: Complex64) -> Result<Complex64> {
        poisson(self, z)
    }
}

fn check_half_plane(z: Complex64) -> Result<Complex64> {
    if z.im < 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::BelowRealAxis(z));
    }
    // normalizes -0.0
    Ok(Complex64::new(z.re, z.im + 0.0))
}

/// `P((a, b), z) = (i/π)(log(z − a) − log(z − b))` with `Im log ∈ [0, π]`.
pub fn poisson_interval(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    if !(a < b) {
        return Err(Error::InvalidInterval { left: a, right: b, reason: "left must be < right" });
    }
    let z = check_half_plane(z)?;
    let guard = GUARD * (b - a);
    let za = z - a;
    let zb = z - b;
    if za.norm() <= guard {
        return Err(Error::SingularEndpoint { point: z, endpoint: a });
    }
    if zb.norm() <= guard {
        return Err(Error::SingularEndpoint { point: z, endpoint: b });
    }
    Ok(poisson_unit(za, zb, b - a))
}

/// Core evaluation given `z − a`, `z − b` and `b − a`, all finite and away
/// from the endpoints.
fn poisson_unit(za: Complex64, zb: Complex64, len: f64) -> Complex64 {
    // (z − a)/(z − b) = 1 + u
    let u = len / zb;
    let (arg, log_mod) = if u.norm_sqr() < 0.25 {
        let arg = u.im.atan2(1.0 + u.re).min(0.0);
        (arg, 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p())
    } else {
        let y = za.im + 0.0;
        let arg = y.atan2(za.re) - y.atan2(zb.re);
        (arg, za.norm().ln() - zb.norm().ln())
    };
    Complex64::new(-arg / PI + 0.0, log_mod / PI)
}

/// `P(X, z)`, the sum of [`poisson_interval`] over the components of `X`.
pub fn poisson(x: &IntervalSet, z: Complex64) -> Result<Complex64> {
    let z = check_half_plane(z)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for &(a, b) in x.intervals() {
        sum += poisson_interval(a, b, z)?;
    }
    Ok(sum)
}

/// Derivative of a single-interval term, `(i/π)(a − b)/((z − a)(z − b))`.
pub fn poisson_interval_deriv(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    if !(a < b) {
        return Err(Error::InvalidInterval { left: a, right: b, reason: "left must be < right" });
    }
    let z = check_half_plane(z)?;
    let guard = GUARD * (b - a);
    let za = z - a;
    let zb = z - b;
    if za.norm() <= guard {
        return Err(Error::SingularEndpoint { point: z, endpoint: a });
    }
    if zb.norm() <= guard {
        return Err(Error::SingularEndpoint { point: z, endpoint: b });
    }
    Ok(I * (a - b) / (PI * za * zb))
}

pub fn poisson_deriv(x: &IntervalSet, z: Complex64) -> Result<Complex64> {
    let z = check_half_plane(z)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for &(a, b) in x.intervals() {
        sum += poisson_interval_deriv(a, b, z)?;
    }
    Ok(sum)
}

/// Direct adaptive integration of `(i/π)∫_X dt/(z − t)`, used as a test oracle.
pub fn poisson_quadrature_oracle(x: &IntervalSet, z: Complex64, tol: f64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::BelowRealAxis(z));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let total = x.measure();
    let mut sum = Complex64::new(0.0, 0.0);
    for &(a, b) in x.intervals() {
        let share = tol * (b - a) / total;
        let (v, _) = integrate_real(|t| Ok(1.0 / (z - t)), a, b, share)?;
        sum += v;
    }
    Ok(I * sum / PI)
}

pub fn poisson_quadrature_default(x: &IntervalSet, z: Complex64) -> Result<Complex64> {
    poisson_quadrature_oracle(x, z, DEFAULT_TOL)
}

/// `H0(z) = P((−1, 1), z)`, a bijection of the upper half-plane onto the strip.
pub fn h0(z: Complex64) -> Result<Complex64> {
    poisson_interval(-1.0, 1.0, z)
}

fn check_strip(w: Complex64) -> Result<()> {
    if !(0.0..=1.0).contains(&w.re) || !w.im.is_finite() {
        return Err(Error::OutsideStrip(w));
    }
    Ok(())
}

/// Complex `exp(w) − 1` without cancellation for small `w`.
pub fn expm1(w: Complex64) -> Complex64 {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    let em = w.re.exp_m1();
    Complex64::new(em * c - 2.0 * half * half, (em + 1.0) * s)
}

/// `1/H0⁻¹(w) = −i·tan(πw/2)`, well conditioned near `w = 0` where `H0⁻¹`
/// itself blows up.
pub fn h0_inv_recip(w: Complex64) -> Result<Complex64> {
    check_strip(w)?;
    let e = expm1(I * PI * w);
    let den = 2.0 + e;
    if den.norm() == 0.0 {
        return Err(Error::SingularEndpoint { point: w, endpoint: 1.0 });
    }
    Ok(-e / den)
}

/// `H0⁻¹(w) = i·cot(πw/2)`.
pub fn h0_inv(w: Complex64) -> Result<Complex64> {
    check_strip(w)?;
    let e = expm1(I * PI * w);
    if e.norm() == 0.0 {
        return Err(Error::SingularEndpoint { point: w, endpoint: -1.0 });
    }
    Ok(-(2.0 + e) / e)
}
