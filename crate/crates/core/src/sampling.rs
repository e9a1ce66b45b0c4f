//! Nested low-discrepancy point sets over disks, half-disks and their
//! boundaries.
//!
//! Every sequence is prefix-stable: the first `n` points do not depend on how
//! many points are drawn in total, so observed maxima can only grow with `n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Shifted Halton/van der Corput generator. The random shift is a function of
/// `(seed, stream)` only.
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    shift: [f64; 3],
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { shift: [rng.gen(), rng.gen(), rng.gen()] }
    }

    fn unit2(&self, i: usize) -> (f64, f64) {
        let i = i as u64 + 1;
        ((radical_inverse(i, 2) + self.shift[0]).fract(), (radical_inverse(i, 3) + self.shift[1]).fract())
    }

    fn unit1(&self, i: usize) -> f64 {
        (radical_inverse(i as u64, 2) + self.shift[2]).fract()
    }

    /// Area-uniform points in the closed half-disk `{|z − c| ≤ r, Im z ≥ 0}`,
    /// optionally with the inner disk of radius `r_inner` removed.
    pub fn half_annulus(&self, n: usize, c: Complex64, r_inner: f64, r: f64) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let (u, v) = self.unit2(i);
                let rad = (r_inner * r_inner + u * (r * r - r_inner * r_inner)).sqrt();
                c + Complex64::from_polar(rad, PI * v)
            })
            .collect()
    }

    /// Boundary of the closed half-annulus: outer arc, inner arc (if any) and
    /// the two real segments, weighted by length.
    pub fn half_annulus_boundary(&self, n: usize, c: Complex64, r_inner: f64, r: f64) -> Vec<Complex64> {
        let outer = PI * r;
        let inner = PI * r_inner;
        let seg = 2.0 * (r - r_inner);
        let total = outer + inner + seg;
        (0..n)
            .map(|i| {
                let t = self.unit1(i) * total;
                if t < outer {
                    c + Complex64::from_polar(r, t / r)
                } else if t < outer + inner {
                    c + Complex64::from_polar(r_inner, (t - outer) / r_inner)
                } else {
                    let s = t - outer - inner;
                    let x = if s < seg / 2.0 { -r + s } else { r_inner + (s - seg / 2.0) };
                    c + Complex64::new(x, 0.0)
                }
            })
            .collect()
    }

    /// Area-uniform points in the closed disk `{|z − c| ≤ r}`.
    pub fn disk(&self, n: usize, c: Complex64, r: f64) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let (u, v) = self.unit2(i);
                c + Complex64::from_polar(r * u.sqrt(), 2.0 * PI * v)
            })
            .collect()
    }

    pub fn circle(&self, n: usize, c: Complex64, r: f64) -> Vec<Complex64> {
        (0..n).map(|i| c + Complex64::from_polar(r, 2.0 * PI * self.unit1(i))).collect()
    }

    /// Points of the unit square mapped affinely onto `[x0, x1] × [y0, y1]`.
    pub fn rect(&self, n: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let (u, v) = self.unit2(i);
                Complex64::new(x0 + u * (x1 - x0), y0 + v * (y1 - y0))
            })
            .collect()
    }
}

/// Stable 64-bit stream id for a textual key (FNV-1a).
pub fn stream_id(key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
