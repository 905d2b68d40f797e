//! The transfer function Psi(z), the periodic rigidity matrix Psi(1), the
//! flexible-lattice rigidity matrix, and the supercell Fourier-block rank
//! oracle.

use crate::error::Error;
use crate::framework::CrystalFramework;
use crate::laurent::Laurent;
use crate::numeric::{numeric_rank, RankResult};
use crate::polymatrix::PolynomialMatrix;
use crate::rational::{rational_to_f64, Gaussian};
use nalgebra::DMatrix;
use num::complex::Complex64;
use num::BigRational;
use std::f64::consts::TAU;

/// Rank thresholds for the rank-extremality rigidity certificates, computed
/// once from (d, n) and reported in all verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankThresholds {
    /// rank Psi(1) for periodic rigidity: dn - d.
    pub periodic: usize,
    /// rank Psi(z) away from 1 for rank extremality: dn.
    pub transfer: usize,
    /// rank R_fper for flexible-lattice rigidity: dn + d(d-1)/2.
    pub flex_lattice: usize,
}

impl RankThresholds {
    pub fn for_framework(fw: &CrystalFramework) -> Self {
        let d = fw.dim;
        let n = fw.n_joints();
        RankThresholds {
            periodic: d * n - d,
            transfer: d * n,
            flex_lattice: d * n + d * (d - 1) / 2,
        }
    }
}

/// The m x dn transfer function: `psi` over the Laurent ring, `psi_poly`
/// with per-row monomial normalization (nonnegative exponents), and the
/// shifts relating the two (`psi_poly` row = z^shift * `psi` row).
#[derive(Clone, Debug)]
pub struct TransferFunction {
    pub psi: PolynomialMatrix,
    pub psi_poly: PolynomialMatrix,
    pub row_shifts: Vec<Vec<i64>>,
}

impl TransferFunction {
    pub fn dn(&self) -> usize {
        self.psi.cols
    }

    /// Numeric rank and kernel of Psi evaluated at `z`.
    pub fn rank_at(&self, z: &[Complex64], tol: f64) -> Result<RankResult, Error> {
        Ok(numeric_rank(&self.psi.eval(z)?, tol))
    }
}

/// Build Psi(z) with rows in edge order and columns joint-major,
/// coordinate-minor.
pub fn transfer_function(fw: &CrystalFramework) -> Result<TransferFunction, Error> {
    fw.require_valid()?;
    let d = fw.dim;
    let n = fw.n_joints();
    let m = fw.n_edges();
    let mut entries = vec![Laurent::zero(d); m * d * n];
    for (row, e) in fw.edges.iter().enumerate() {
        let vi = fw.joint_index(&e.v)?;
        let wi = fw.joint_index(&e.w)?;
        let p = fw.bar_vector(e)?;
        let neg_k: Vec<i64> = e.k.iter().map(|x| -x).collect();
        let neg_l: Vec<i64> = e.l.iter().map(|x| -x).collect();
        for t in 0..d {
            let coeff = Gaussian::from_rational(p[t].clone());
            if vi == wi {
                let val = Laurent::monomial(d, &neg_k, coeff.clone())
                    .sub(&Laurent::monomial(d, &neg_l, coeff));
                entries[row * d * n + vi * d + t] = val;
            } else {
                entries[row * d * n + vi * d + t] = Laurent::monomial(d, &neg_k, coeff.clone());
                entries[row * d * n + wi * d + t] =
                    Laurent::monomial(d, &neg_l, coeff).neg();
            }
        }
    }
    let row_labels: Vec<String> = fw.edges.iter().map(|e| e.label()).collect();
    let col_labels: Vec<(String, usize)> = fw
        .joints
        .iter()
        .flat_map(|j| (0..d).map(move |t| (j.id.clone(), t)))
        .collect();
    let psi = PolynomialMatrix::new(m, d * n, entries, row_labels, col_labels);

    let mut row_shifts = Vec::with_capacity(m);
    let psi_poly = psi.map_rows(|row_idx, row| {
        // Shift the whole row by the componentwise minimum exponent.
        let mut min = vec![0i64; d];
        let mut any = false;
        for p in row {
            if let Some(pm) = p.min_exponents() {
                if !any {
                    min = pm;
                    any = true;
                } else {
                    for (a, b) in min.iter_mut().zip(pm) {
                        *a = (*a).min(b);
                    }
                }
            }
        }
        let shift: Vec<i64> = min.iter().map(|x| -x).collect();
        let shifted = row.iter().map(|p| p.shift(&shift)).collect();
        debug_assert_eq!(row_idx, row_shifts.len());
        row_shifts.push(shift);
        shifted
    });
    Ok(TransferFunction {
        psi,
        psi_poly,
        row_shifts,
    })
}

/// The scalar periodic rigidity matrix R_per = Psi(1), built directly from
/// bar vectors.
pub fn periodic_rigidity_matrix(fw: &CrystalFramework) -> Result<DMatrix<Complex64>, Error> {
    let d = fw.dim;
    let n = fw.n_joints();
    let mut m = DMatrix::zeros(fw.n_edges(), d * n);
    for (row, e) in fw.edges.iter().enumerate() {
        let vi = fw.joint_index(&e.v)?;
        let wi = fw.joint_index(&e.w)?;
        if vi == wi {
            continue;
        }
        let p = fw.bar_vector(e)?;
        for t in 0..d {
            let x = rational_to_f64(&p[t]);
            m[(row, vi * d + t)] = Complex64::new(x, 0.0);
            m[(row, wi * d + t)] = Complex64::new(-x, 0.0);
        }
    }
    Ok(m)
}

/// The m x (dn + d^2) flexible-lattice rigidity matrix. Lattice columns hold
/// the deformation matrix X column-major; rows with v = w carry only the
/// lattice part.
#[derive(Clone, Debug)]
pub struct FlexLatticeMatrix {
    pub matrix: DMatrix<Complex64>,
    pub dim: usize,
    pub dn: usize,
    /// Extremal rank threshold dn + d(d-1)/2.
    pub extremal_rank: usize,
}

impl FlexLatticeMatrix {
    pub fn rank(&self, tol: f64) -> RankResult {
        numeric_rank(&self.matrix, tol)
    }
}

pub fn flexible_lattice_matrix(fw: &CrystalFramework) -> Result<FlexLatticeMatrix, Error> {
    fw.require_valid()?;
    let d = fw.dim;
    let n = fw.n_joints();
    let dn = d * n;
    let mut m = DMatrix::zeros(fw.n_edges(), dn + d * d);
    for (row, e) in fw.edges.iter().enumerate() {
        let vi = fw.joint_index(&e.v)?;
        let wi = fw.joint_index(&e.w)?;
        let p: Vec<f64> = fw.bar_vector_f64(e)?;
        if vi != wi {
            for t in 0..d {
                m[(row, vi * d + t)] = Complex64::new(p[t], 0.0);
                m[(row, wi * d + t)] = Complex64::new(-p[t], 0.0);
            }
        }
        for t in 0..d {
            let lk = (e.l[t] - e.k[t]) as f64;
            for i in 0..d {
                m[(row, dn + t * d + i)] = Complex64::new(lk * p[i], 0.0);
            }
        }
    }
    Ok(FlexLatticeMatrix {
        matrix: m,
        dim: d,
        dn,
        extremal_rank: RankThresholds::for_framework(fw).flex_lattice,
    })
}

/// All tuples of roots of unity with orders dividing `reps`, row-major over
/// the index grid.
pub fn root_of_unity_grid(reps: &[i64]) -> Vec<Vec<Complex64>> {
    crate::framework::residue_cells(reps)
        .iter()
        .map(|idx| {
            idx.iter()
                .zip(reps)
                .map(|(&j, &r)| Complex64::from_polar(1.0, TAU * j as f64 / r as f64))
                .collect()
        })
        .collect()
}

/// Discrete-Fourier rank oracle: the supercell periodic rigidity matrix
/// block-diagonalizes over reps-th roots of unity, so both sides must agree.
pub fn supercell_rank_identity(
    fw: &CrystalFramework,
    reps: &[i64],
    tol: f64,
) -> Result<(usize, usize), Error> {
    fw.require_valid()?;
    let sc = fw.supercell(reps)?;
    let lhs = numeric_rank(&periodic_rigidity_matrix(&sc)?, tol).rank;
    let tf = transfer_function(fw)?;
    let mut rhs = 0;
    for omega in root_of_unity_grid(reps) {
        rhs += tf.rank_at(&omega, tol)?.rank;
    }
    Ok((lhs, rhs))
}

/// Exact rational entries of Psi(1) for the translation-kernel invariant.
pub fn periodic_rigidity_matrix_exact(
    fw: &CrystalFramework,
) -> Result<Vec<Vec<BigRational>>, Error> {
    let d = fw.dim;
    let n = fw.n_joints();
    let mut rows = Vec::with_capacity(fw.n_edges());
    for e in &fw.edges {
        let vi = fw.joint_index(&e.v)?;
        let wi = fw.joint_index(&e.w)?;
        let mut row = vec![BigRational::from_integer(0.into()); d * n];
        if vi != wi {
            let p = fw.bar_vector(e)?;
            for t in 0..d {
                row[vi * d + t] = p[t].clone();
                row[wi * d + t] = -p[t].clone();
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
