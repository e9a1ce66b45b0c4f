//! Globally adaptive Gauss–Kronrod (7, 15) quadrature for complex-valued
//! integrands along real intervals and straight segments of the plane.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_SUBDIVISIONS: usize = 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Piece>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx)? + f(center + dx)?;
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Ok(Piece { a, b, value, error })
}

/// Integrates `f` over `[a, b]` until the summed error estimate is at most
/// `tol`. Returns the value and the error estimate.
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if a == b {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let mut pieces = vec![gk15(&mut f, a, b)?];
    loop {
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        if err <= tol {
            let value = pieces.iter().map(|p| p.value).sum();
            return Ok((value, err));
        }
        if pieces.len() >= MAX_SUBDIVISIONS {
            return Err(Error::QuadratureDiverged { estimate: err, tol });
        }
        let (idx, worst) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, p)| (i, *p))
            .expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureDiverged { estimate: err, tol });
        }
        pieces[idx] = gk15(&mut f, worst.a, mid)?;
        pieces.push(gk15(&mut f, mid, worst.b)?);
    }
}

/// Integrates `f(z) dz` along the straight segment from `z0` to `z1`.
pub fn integrate_segment<F>(mut f: F, z0: Complex64, z1: Complex64, tol: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let d = z1 - z0;
    let len = d.norm();
    if len == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let (v, e) = integrate_real(|t| Ok(f(z0 + d * t)? * d), 0.0, 1.0, tol)?;
    Ok((v, e))
}

/// Integrates along a polyline through `points`, splitting `tol` by length.
pub fn integrate_path<F>(mut f: F, points: &[Complex64], tol: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let total: f64 = points.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    if total == 0.0 {
        return Ok((value, err));
    }
    for w in points.windows(2) {
        let share = tol * (w[1] - w[0]).norm() / total;
        let (v, e) = integrate_segment(&mut f, w[0], w[1], share)?;
        value += v;
        err += e;
    }
    Ok((value, err))
}
