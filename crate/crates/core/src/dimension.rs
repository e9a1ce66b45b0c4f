//! Box-count slopes from level data and the closed-form dimension formulas.

use serde::{Deserialize, Serialize};

use crate::construction::{ConstructionParams, ConstructionState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Always `"box-count slope"`; the estimator bounds Hausdorff dimension from above.
    pub estimator: String,
    pub levels_used: Vec<usize>,
    pub counts: Vec<f64>,
    pub scales: Vec<f64>,
    pub pair_slopes: Vec<f64>,
    pub two_scale_slope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_s: Option<f64>,
    #[serde(rename = "formula_dN", skip_serializing_if = "Option::is_none")]
    pub formula_dn: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cantor_reference: Option<f64>,
}

/// Averages `log(n_{l+1}/n_l)/log(s_l/s_{l+1})` over consecutive levels.
pub fn box_dimension(levels: &[(f64, f64)]) -> Result<DimensionReport> {
    if levels.len() < 2 {
        return Err(Error::InsufficientData(format!("{} level(s), need at least 2", levels.len())));
    }
    for w in levels.windows(2) {
        if !(w[0].0 > 0.0 && w[1].0 > 0.0 && w[0].1 > 0.0 && w[1].1 > 0.0) {
            return Err(Error::InvalidParameter("counts and scales must be positive".into()));
        }
        if !(w[1].1 < w[0].1) {
            return Err(Error::InvalidParameter("scales must decrease".into()));
        }
    }
    let pair_slopes: Vec<f64> = levels.windows(2).map(|w| (w[1].0 / w[0].0).ln() / (w[0].1 / w[1].1).ln()).collect();
    let two_scale_slope = pair_slopes.iter().sum::<f64>() / pair_slopes.len() as f64;
    Ok(DimensionReport {
        estimator: "box-count slope".into(),
        levels_used: (1..=levels.len()).collect(),
        counts: levels.iter().map(|l| l.0).collect(),
        scales: levels.iter().map(|l| l.1).collect(),
        pair_slopes,
        two_scale_slope,
        formula_s: None,
        formula_dn: None,
        cantor_reference: None,
    })
}

/// `s = log(N − 1)/log(1/γ)`.
pub fn formula_s(p: &ConstructionParams) -> f64 {
    (p.n as f64 - 1.0).ln() / (1.0 / p.gamma).ln()
}

/// `d(N) = log(N−1)/(log N + log(1 + log N) + log(2/(ε·γ₁)))`.
pub fn dimension_formula(n: f64, eps: f64, gamma1: f64) -> Result<f64> {
    if !(n >= 3.0) || !(eps > 0.0 && eps < 0.01) || !(gamma1 > 0.0) {
        return Err(Error::InvalidParameter(format!("dimension formula needs N >= 3, 0 < eps < 1/100, gamma1 > 0 (got {n}, {eps}, {gamma1})")));
    }
    Ok((n - 1.0).ln() / (n.ln() + n.ln().ln_1p() + (2.0 / (eps * gamma1)).ln()))
}

/// Levels `0..=depth` of the middle-thirds Cantor set.
pub fn middle_thirds(depth: usize) -> Vec<Vec<[f64; 2]>> {
    let mut levels = vec![vec![[0.0, 1.0]]];
    for _ in 0..depth {
        let next = levels
            .last()
            .expect("nonempty")
            .iter()
            .flat_map(|&[a, b]| {
                let t = (b - a) / 3.0;
                [[a, a + t], [b - t, b]]
            })
            .collect();
        levels.push(next);
    }
    levels
}

/// Box slope of the middle-thirds level data, which should be `log 2/log 3`.
pub fn cantor_reference(depth: usize) -> Result<f64> {
    let levels: Vec<(f64, f64)> = middle_thirds(depth).iter().map(|l| (l.len() as f64, l[0][1] - l[0][0])).collect();
    Ok(box_dimension(&levels)?.two_scale_slope)
}

/// Level data `((N−1)^l, scale of J at level l)` of a built construction,
/// with the formulas attached.
pub fn construction_dimension(state: &ConstructionState) -> Result<DimensionReport> {
    let p = &state.params;
    let levels: Vec<(f64, f64)> = state
        .level_counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| (c as f64, 2.0 * p.scale(i + 1)))
        .collect();
    let mut r = box_dimension(&levels)?;
    r.formula_s = Some(formula_s(p));
    r.formula_dn = Some(dimension_formula(p.n as f64, p.eps, p.gamma1)?);
    r.cantor_reference = Some(cantor_reference(12)?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_cantor_slope() {
        let levels: Vec<(f64, f64)> = (0..12).map(|m| (2f64.powi(m), 3f64.powi(-m))).collect();
        let r = box_dimension(&levels).unwrap();
        assert!((r.two_scale_slope - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn middle_thirds_reference() {
        let l = middle_thirds(3);
        assert_eq!(l[3].len(), 8);
        assert!((l[1][1][0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((cantor_reference(12).unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn needs_two_levels() {
        assert!(box_dimension(&[(1.0, 1.0)]).is_err());
        assert!(box_dimension(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    }

    #[test]
    fn formula_below_one() {
        for n in [3.0, 5.0, 100.0, 1e6, 1e12] {
            assert!(dimension_formula(n, 1.0 / 128.0, 3e-5).unwrap() < 1.0);
        }
        assert!(dimension_formula(2.0, 1.0 / 128.0, 3e-5).is_err());
    }
}
