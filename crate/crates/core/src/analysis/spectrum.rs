//! Adjacency spectrum of small `D(n, q)` by dense symmetric eigensolve.

use nalgebra::{DMatrix, SymmetricEigen};

use super::oracle::GraphOracle;
use crate::error::{Error, Result};

/// Largest graph `spectrum` will decompose.
pub const MAX_SPECTRUM_VERTICES: usize = 5000;

/// Eigenvalues closer than this are treated as equal.
pub const EIGEN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// All eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `λ0`; equals `q` for a `q`-regular graph.
    pub top: f64,
    /// `λ1`: the largest eigenvalue strictly below `q`, if any.
    pub second: Option<f64>,
    /// `2 √q`.
    pub bound: f64,
    /// Largest `‖Av − λv‖ / ‖v‖` over the computed eigenpairs.
    pub max_residual: f64,
    /// Largest `|λ_i + λ_{N-1-i}|`; zero for a bipartite spectrum.
    pub asymmetry: f64,
}

impl SpectrumReport {
    pub fn within_bound(&self) -> bool {
        self.second
            .is_none_or(|l| l.abs() <= self.bound + EIGEN_TOLERANCE)
    }

    pub fn symmetric(&self) -> bool {
        self.asymmetry <= EIGEN_TOLERANCE
    }

    /// Multiplicity of `q`, i.e. the number of connected components.
    pub fn top_multiplicity(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&l| (l - self.top).abs() <= EIGEN_TOLERANCE)
            .count()
    }
}

pub fn spectrum(oracle: &GraphOracle) -> Result<SpectrumReport> {
    let size = oracle.vertex_count();
    if size > MAX_SPECTRUM_VERTICES {
        return Err(Error::parameter(format!(
            "{size} vertices exceeds the dense eigensolve limit of {MAX_SPECTRUM_VERTICES}"
        )));
    }
    let q = oracle.params().modulus().value() as f64;
    let mut a = DMatrix::<f64>::zeros(size, size);
    for (u, ns) in oracle.adjacency().iter().enumerate() {
        for &v in ns {
            a[(u, v as usize)] = 1.0;
        }
    }

    let eigen = SymmetricEigen::new(a.clone());
    let mut max_residual: f64 = 0.0;
    for (i, &lambda) in eigen.eigenvalues.iter().enumerate() {
        let v = eigen.eigenvectors.column(i);
        let r = (&a * v - v * lambda).norm() / v.norm();
        max_residual = max_residual.max(r);
    }

    let mut eigenvalues: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    let second = eigenvalues
        .iter()
        .copied()
        .find(|&l| l < q - EIGEN_TOLERANCE);
    let asymmetry = eigenvalues
        .iter()
        .zip(eigenvalues.iter().rev())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max);

    Ok(SpectrumReport {
        eigenvalues,
        top,
        second,
        bound: 2.0 * q.sqrt(),
        max_residual,
        asymmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::super::oracle::build_oracle;
    use super::*;

    #[test]
    fn d23() {
        let r = spectrum(&build_oracle(2, 3).unwrap()).unwrap();
        assert_eq!(r.eigenvalues.len(), 18);
        assert!((r.top - 3.0).abs() < 1e-9);
        assert!(r.max_residual <= 1e-6);
        assert!(r.symmetric());
        assert!(r.within_bound());
        assert_eq!(r.top_multiplicity(), 1);
    }

    #[test]
    fn eigenvalues_sum_to_trace() {
        // Trace of A is 0 and trace of A^2 is twice the edge count.
        let o = build_oracle(2, 5).unwrap();
        let r = spectrum(&o).unwrap();
        let sum: f64 = r.eigenvalues.iter().sum();
        let squares: f64 = r.eigenvalues.iter().map(|l| l * l).sum();
        assert!(sum.abs() < 1e-8);
        assert!((squares - 2.0 * o.edge_count() as f64).abs() < 1e-8);
    }

    #[test]
    fn guardrail() {
        assert!(spectrum(&build_oracle(5, 5).unwrap()).is_err());
    }
}
