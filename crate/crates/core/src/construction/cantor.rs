use crate::error::{Error, Result};

/// Levels `E₁..E_depth` of the classical `(N, α)` Cantor construction: each
/// closed interval of length `ℓ` is replaced by `N − 1` intervals of length
/// `ℓα/N` centered at its `k/N` points.
pub fn classical_cantor(n: u32, alpha: f64, depth: usize) -> Result<Vec<Vec<[f64; 2]>>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("N must be at least 3, got {n}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let nf = n as f64;
    let mut levels: Vec<Vec<[f64; 2]>> = Vec::with_capacity(depth);
    let mut current = vec![[0.0, 1.0]];
    for _ in 0..depth {
        let next: Vec<[f64; 2]> = current
            .iter()
            .flat_map(|&[a, b]| {
                let len = b - a;
                let child = len * alpha / nf;
                (1..n).map(move |k| {
                    let c = a + len * k as f64 / nf;
                    [c - child / 2.0, c + child / 2.0]
                })
            })
            .collect();
        levels.push(next.clone());
        current = next;
    }
    Ok(levels)
}

/// Similarity dimension `log(N − 1)/log(N/α)` of the classical set.
pub fn classical_dimension(n: u32, alpha: f64) -> f64 {
    (n as f64 - 1.0).ln() / (n as f64 / alpha).ln()
}
