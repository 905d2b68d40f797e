//! Numeric rank and kernel bases via complex SVD.

use nalgebra::DMatrix;
use num::complex::Complex64;

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct RankResult {
    pub rank: usize,
    /// Orthonormal kernel basis, one column per kernel vector.
    pub kernel: DMatrix<Complex64>,
}

impl RankResult {
    pub fn kernel_dim(&self) -> usize {
        self.kernel.ncols()
    }
}

/// Rank = number of singular values above `tol * sigma_max` (rank 0 when the
/// matrix is zero), kernel = the remaining right singular vectors.
pub fn numeric_rank(m: &DMatrix<Complex64>, tol: f64) -> RankResult {
    assert!(tol > 0.0, "tolerance must be positive");
    let ncols = m.ncols();
    // Pad with zero rows so the SVD carries a complete set of right singular
    // vectors; zero rows do not change rank or kernel.
    let work = if m.nrows() < ncols {
        let mut p = DMatrix::zeros(ncols, ncols);
        p.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let sigma = &svd.singular_values;
    let smax = sigma.iter().cloned().fold(0.0f64, f64::max);
    let rank = if smax == 0.0 {
        0
    } else {
        sigma.iter().filter(|&&s| s > tol * smax).count()
    };
    let v_t = svd.v_t.expect("requested right singular vectors");
    let kdim = ncols - rank;
    let mut kernel = DMatrix::zeros(ncols, kdim);
    for (out_col, row) in (rank..ncols).enumerate() {
        for j in 0..ncols {
            kernel[(j, out_col)] = v_t[(row, j)].conj();
        }
    }
    RankResult { rank, kernel }
}
