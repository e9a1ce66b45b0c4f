use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::poisson::poisson;
use crate::sampling::Sampler;

/// Smallest admissible representable scale `αγ^(depth−1)`.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// `(N, ε, β₁, γ₁)` together with the derived `α` and `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    #[serde(rename = "N")]
    pub n: u32,
    pub eps: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub alpha: f64,
    pub gamma: f64,
}

/// `α = ε/(N(1 + log N))`.
pub fn alpha_of(n: u32, eps: f64) -> f64 {
    let nf = n as f64;
    eps / (nf * (1.0 + nf.ln()))
}

impl ConstructionParams {
    /// Computes `α`, `γ` and checks the initial bounds without sampling.
    pub fn new(n: u32, eps: f64, beta1: f64, gamma1: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::ConstraintViolated(format!("N >= 3 (got {n})")));
        }
        for (name, v) in [("eps", eps), ("beta1", beta1), ("gamma1", gamma1)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ConstraintViolated(format!("{name} > 0 (got {v})")));
            }
        }
        if !(eps < 0.01) {
            return Err(Error::ConstraintViolated("eps < 1/100".into()));
        }
        if !(beta1 < 0.01) {
            return Err(Error::ConstraintViolated("beta1 < 1/100".into()));
        }
        if !(gamma1 < eps * beta1) {
            return Err(Error::ConstraintViolated("gamma1 < eps*beta1".into()));
        }
        let alpha = alpha_of(n, eps);
        Ok(Self { n, eps, beta1, gamma1, alpha, gamma: gamma1 * alpha / 2.0 })
    }

    /// Scale of `I(k)` relative to `I`: `(α/2)γ^(l−1)`.
    pub fn scale(&self, level: usize) -> f64 {
        0.5 * self.alpha * self.gamma.powi(level as i32 - 1)
    }

    pub fn max_depth(&self) -> usize {
        let mut d = 1;
        while self.alpha * self.gamma.powi(d as i32) > UNDERFLOW_FLOOR {
            d += 1;
        }
        d
    }

    /// The reference interval set `I = (−1, −β₁) ∪ (β₁, 1)`.
    pub fn unit_i(&self) -> IntervalSet {
        IntervalSet::new(vec![(-1.0, -self.beta1), (self.beta1, 1.0)]).expect("beta1 < 1")
    }

    /// Upper bound `2γ₁/(πβ₁)` for `|P(U, z)|` over the admissible `U` and `z`.
    pub fn gamma1_analytic_bound(&self) -> f64 {
        2.0 * self.gamma1 / (PI * self.beta1)
    }

    /// Largest `|P(U, z)|` observed over sampled sets `U ⊂ (−β₁/2, β₁/2)` of
    /// measure `γ₁` and sampled `z` in the closed half-annulus `β₁ ≤ |z| ≤ 1`.
    pub fn gamma1_sampled_max(&self, sets: usize, points: usize, seed: u64) -> Result<f64> {
        let half = self.beta1 / 2.0;
        let mut worst: f64 = 0.0;
        for s in 0..sets {
            let sampler = Sampler::new(seed, s as u64);
            let pieces = 1 + s % 4;
            let len = self.gamma1 / pieces as f64;
            let slot = 2.0 * half / pieces as f64;
            let starts = sampler.rect(pieces, 0.0, 1.0, 0.0, 1.0);
            let u = IntervalSet::new(
                (0..pieces)
                    .map(|p| {
                        let lo = -half + p as f64 * slot + starts[p].re * (slot - len);
                        (lo, lo + len)
                    })
                    .collect(),
            )?;
            let zs = sampler
                .half_annulus(points, Complex64::new(0.0, 0.0), self.beta1, 1.0)
                .into_iter()
                .chain(sampler.half_annulus_boundary(points, Complex64::new(0.0, 0.0), self.beta1, 1.0));
            for z in zs {
                worst = worst.max(poisson(&u, z)?.norm());
            }
        }
        Ok(worst)
    }

    /// Full validation including the sampled `γ₁`-smallness condition.
    pub fn derive(n: u32, eps: f64, beta1: f64, gamma1: f64) -> Result<Self> {
        let p = Self::new(n, eps, beta1, gamma1)?;
        if !(p.gamma1_analytic_bound() < eps) {
            return Err(Error::ConstraintViolated("gamma1 smallness |P(U,z)| < eps".into()));
        }
        if !(p.gamma1_sampled_max(8, 64, 0)? < eps) {
            return Err(Error::ConstraintViolated("gamma1 smallness |P(U,z)| < eps".into()));
        }
        Ok(p)
    }

    /// Default reference parameters: `N = 5`, `ε = β₁ = 1/128`, `γ₁ = εβ₁/2`.
    pub fn reference() -> Self {
        let eps = 1.0 / 128.0;
        Self::new(5, eps, eps, eps * eps / 2.0).expect("reference parameters are valid")
    }
}
