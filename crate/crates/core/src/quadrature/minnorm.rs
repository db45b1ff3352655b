use nalgebra::{DMatrix, DVector};

use super::QuadratureError;

/// Minimum-norm solver for `A w = b` with `A` of size `m x n`, `m <= n`, full
/// row rank. `Aᵀ = Q R` is factorized once; each solve costs two triangular
/// and one orthogonal application: `w = Q R⁻ᵀ b`.
#[derive(Debug, Clone)]
pub struct MinNorm {
    q: DMatrix<f64>,
    rt: DMatrix<f64>,
}

impl MinNorm {
    pub fn new(a: &DMatrix<f64>) -> Result<Self, QuadratureError> {
        let (m, n) = a.shape();
        if m > n {
            return Err(QuadratureError::TooFewNodes { nodes: n, functions: m });
        }
        let qr = a.transpose().qr();
        let r = qr.r();
        let diag: Vec<f64> = (0..m).map(|k| r[(k, k)].abs()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if m > 0 && !(min > 1e-12 * max) {
            return Err(QuadratureError::RankDeficient { rows: m, cols: n, ratio: min / max });
        }
        Ok(Self { q: qr.q(), rt: r.transpose() })
    }

    pub fn rows(&self) -> usize {
        self.rt.nrows()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = DVector::from_column_slice(rhs);
        let y = self.rt.solve_lower_triangular(&b).expect("triangular factor checked at construction");
        (&self.q * y).as_slice().to_vec()
    }

    /// Solves for every column of `rhs` (`m x k`), returning `n x k`.
    pub fn solve_many(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        let y = self.rt.solve_lower_triangular(rhs).expect("triangular factor checked at construction");
        &self.q * y
    }
}
