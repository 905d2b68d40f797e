//! Dense matrices of Laurent polynomials: symbolic minors and evaluation.

use crate::error::Error;
use crate::laurent::Laurent;
use itertools::Itertools;
use nalgebra::DMatrix;
use num::complex::Complex64;

/// An m x c matrix over the Laurent polynomial ring, with row labels (edge
/// ids) and column labels (joint id, coordinate index).
#[derive(Clone, Debug)]
pub struct PolynomialMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Laurent>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<(String, usize)>,
}

impl PolynomialMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        entries: Vec<Laurent>,
        row_labels: Vec<String>,
        col_labels: Vec<(String, usize)>,
    ) -> Self {
        assert_eq!(entries.len(), rows * cols);
        assert_eq!(row_labels.len(), rows);
        assert_eq!(col_labels.len(), cols);
        PolynomialMatrix {
            rows,
            cols,
            entries,
            row_labels,
            col_labels,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Laurent] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map_rows(&self, mut f: impl FnMut(usize, &[Laurent]) -> Vec<Laurent>) -> PolynomialMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.rows {
            let row = f(i, self.row(i));
            assert_eq!(row.len(), self.cols);
            entries.extend(row);
        }
        PolynomialMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }

    /// Entrywise evaluation at a point of `C_*^d`.
    pub fn eval(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>, Error> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.entry(i, j).eval(z)?;
            }
        }
        Ok(m)
    }

    /// All `size x size` minors, monomial-normalized, ordered by the
    /// lexicographic (row subset, column subset) index tuples.
    pub fn minors(&self, size: usize) -> Result<Vec<Laurent>, Error> {
        if size == 0 || size > self.rows.min(self.cols) {
            return Err(Error::MinorSize {
                size,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = Vec::new();
        for rows in (0..self.rows).combinations(size) {
            for cols in (0..self.cols).combinations(size) {
                let sub: Vec<Vec<Laurent>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| self.entry(i, j).clone()).collect())
                    .collect();
                let det = determinant(&sub);
                let det = match det.monomial_normalize() {
                    Ok((q, _)) => q,
                    Err(_) => det, // zero minor kept as zero
                };
                out.push(det);
            }
        }
        Ok(out)
    }
}

/// Determinant of a square grid of Laurent polynomials via fraction-free
/// (Bareiss) elimination; all intermediate divisions are exact.
pub fn determinant(m: &[Vec<Laurent>]) -> Laurent {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n));
    let nvars = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut a: Vec<Vec<Laurent>> = m.to_vec();
    let mut sign = false;
    let mut prev = Laurent::one(nvars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = !sign;
                }
                None => return Laurent::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = if num.is_zero() {
                    num
                } else {
                    num.divide_exact(&prev).expect("Bareiss division is exact")
                };
            }
            a[i][k] = Laurent::zero(nvars);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}
