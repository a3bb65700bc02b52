//! Centered finite-difference stencils on `2p+1` equispaced nodes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Coefficients `δ_j`, `j = -p..=p`, of a centered `k`-th derivative stencil.
///
/// The weights are dimensionless; [`StencilWeights::apply`] divides by `dt^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilWeights {
    k: usize,
    p: usize,
    delta: Vec<f64>,
}

/// Smallest admissible half-width for a `k`-th derivative.
pub fn min_halfwidth(k: usize) -> usize {
    k.div_ceil(2)
}

impl StencilWeights {
    /// Solves the moment system `Σ_j δ_j j^m = k! [m = k]`, `m = 0..=2p`.
    pub fn new(k: usize, p: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameters(
                "stencil derivative order must be ≥ 1".into(),
            ));
        }
        if p < min_halfwidth(k) {
            return Err(Error::InvalidParameters(format!(
                "half-width p = {p} too small for derivative order {k} (need p ≥ {})",
                min_halfwidth(k)
            )));
        }
        let n = 2 * p + 1;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 - p as f64).collect();
        let vandermonde = DMatrix::from_fn(n, n, |m, j| nodes[j].powi(m as i32));
        let mut rhs = DVector::zeros(n);
        rhs[k] = (1..=k).map(|i| i as f64).product();
        let mut delta = linalg::solve(&vandermonde, &rhs)
            .map_err(|_| Error::InvalidParameters("singular moment system".into()))?
            .as_slice()
            .to_vec();

        // Restore exact (anti)symmetry lost to round-off and flush tiny entries.
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        for j in 1..=p {
            let avg = 0.5 * (delta[p + j] + sign * delta[p - j]);
            delta[p + j] = avg;
            delta[p - j] = sign * avg;
        }
        if k % 2 == 1 {
            delta[p] = 0.0;
        }
        Ok(Self { k, p, delta })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn halfwidth(&self) -> usize {
        self.p
    }

    /// Weights ordered from node `-p` to node `p`.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// Weight for node `j ∈ [-p, p]`.
    pub fn weight(&self, j: isize) -> f64 {
        self.delta[(j + self.p as isize) as usize]
    }

    /// Accuracy order `ω = 2p − 2⌊(k−1)/2⌋`.
    pub fn accuracy(&self) -> usize {
        2 * self.p - 2 * ((self.k - 1) / 2)
    }

    /// Node offsets `-p..=p`.
    pub fn nodes(&self) -> impl Iterator<Item = isize> {
        let p = self.p as isize;
        -p..=p
    }

    /// `dt^{-k} Σ_j δ_j v_j`, componentwise over the node samples.
    pub fn apply(&self, values: &[DVector<f64>], dt: f64) -> Result<DVector<f64>> {
        let n = self.delta.len();
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: values.len(),
            });
        }
        let dim = values[0].len();
        if let Some(bad) = values.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "timestep must be positive, got {dt}"
            )));
        }
        Ok(self.combine(values) / dt.powi(self.k as i32))
    }

    /// Unscaled `Σ_j δ_j v_j`; callers guarantee the node count.
    pub(crate) fn combine(&self, values: &[DVector<f64>]) -> DVector<f64> {
        let mut acc = DVector::zeros(values[0].len());
        for (d, v) in self.delta.iter().zip(values) {
            if *d != 0.0 {
                acc.axpy(*d, v, 1.0);
            }
        }
        acc
    }
}
