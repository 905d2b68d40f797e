//! Crystal-framework data model, validation, fixtures and supercells.
//!
//! A framework is a finite motif of joints and edges together with `d`
//! period vectors; joint `(v, k)` sits at `p(v) + A k` where `A` has the
//! period vectors as columns.

use crate::error::Error;
use crate::rational::rational_to_f64;
use num::{BigInt, BigRational, One, Zero};

pub type MultiIndex = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Joint {
    pub id: String,
    pub coords: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDecl {
    pub v: String,
    pub k: MultiIndex,
    pub w: String,
    pub l: MultiIndex,
}

impl EdgeDecl {
    pub fn new(v: &str, k: &[i64], w: &str, l: &[i64]) -> Self {
        EdgeDecl {
            v: v.into(),
            k: k.to_vec(),
            w: w.into(),
            l: l.to_vec(),
        }
    }

    /// Stable display label used for matrix rows.
    pub fn label(&self) -> String {
        format!(
            "({},{:?})-({},{:?})",
            self.v, self.k, self.w, self.l
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrystalFramework {
    pub dim: usize,
    /// Period vectors a_1..a_d; column t of the period matrix A.
    pub periods: Vec<Vec<BigRational>>,
    pub joints: Vec<Joint>,
    pub edges: Vec<EdgeDecl>,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CrystalFramework {
    pub fn n_joints(&self) -> usize {
        self.joints.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn joint_index(&self, id: &str) -> Result<usize, Error> {
        self.joints
            .iter()
            .position(|j| j.id == id)
            .ok_or_else(|| Error::UnknownJoint(id.to_string()))
    }

    /// A * k for a cell index k.
    pub fn lattice_vector(&self, k: &[i64]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim];
        for (t, a) in self.periods.iter().enumerate() {
            let kt = BigRational::from_integer(BigInt::from(k[t]));
            for (o, at) in out.iter_mut().zip(a) {
                *o += at * &kt;
            }
        }
        out
    }

    /// Bar vector p(e) = p(v) + A k - p(w) - A l.
    pub fn bar_vector(&self, e: &EdgeDecl) -> Result<Vec<BigRational>, Error> {
        let vi = self.joint_index(&e.v)?;
        let wi = self.joint_index(&e.w)?;
        let ak = self.lattice_vector(&e.k);
        let al = self.lattice_vector(&e.l);
        Ok((0..self.dim)
            .map(|t| &self.joints[vi].coords[t] + &ak[t] - &self.joints[wi].coords[t] - &al[t])
            .collect())
    }

    pub fn bar_vector_f64(&self, e: &EdgeDecl) -> Result<Vec<f64>, Error> {
        Ok(self.bar_vector(e)?.iter().map(rational_to_f64).collect())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let d = self.dim;
        if d == 0 {
            report.violations.push("dimension must be positive".into());
            return report;
        }
        if self.periods.len() != d {
            report
                .violations
                .push(format!("expected {d} period vectors, got {}", self.periods.len()));
        }
        for (t, a) in self.periods.iter().enumerate() {
            if a.len() != d {
                report
                    .violations
                    .push(format!("period vector {} has length {}, expected {d}", t + 1, a.len()));
            }
        }
        if self.periods.len() == d && self.periods.iter().all(|a| a.len() == d)
            && rational_det(&self.periods).is_zero() {
                report.violations.push("periods dependent (det A = 0)".into());
            }
        for j in &self.joints {
            if j.coords.len() != d {
                report
                    .violations
                    .push(format!("joint {:?} has {} coordinates, expected {d}", j.id, j.coords.len()));
            }
        }
        for (a, ja) in self.joints.iter().enumerate() {
            for jb in self.joints.iter().skip(a + 1) {
                if ja.id == jb.id {
                    report.violations.push(format!("duplicate joint label {:?}", ja.id));
                } else if ja.coords == jb.coords {
                    report
                        .warnings
                        .push(format!("coincident joints {:?} and {:?}", ja.id, jb.id));
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.k.len() != d || e.l.len() != d {
                report
                    .violations
                    .push(format!("edge {i} has cell offsets of wrong length"));
                continue;
            }
            if e.v == e.w && e.k == e.l {
                report
                    .violations
                    .push(format!("edge {i} is a self-loop ({},{:?})", e.v, e.k));
                continue;
            }
            let known = self.joint_index(&e.v).is_ok() && self.joint_index(&e.w).is_ok();
            if !known {
                report
                    .violations
                    .push(format!("edge {i} references unknown joint label"));
                continue;
            }
            if report.violations.is_empty() || self.periods.iter().all(|a| a.len() == d) {
                if let Ok(p) = self.bar_vector(e) {
                    if p.iter().all(|x| x.is_zero()) {
                        report.violations.push(format!("edge {i} is a zero-length bar"));
                    }
                }
            }
        }
        report
    }

    /// Validate and wrap violations as an error.
    pub fn require_valid(&self) -> Result<(), Error> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidFramework {
                violations: report.violations,
            })
        }
    }

    /// Re-describe the framework over the enlarged lattice A * diag(reps).
    ///
    /// Joints are indexed by residue cells; edge offsets are reduced modulo
    /// `reps` with carries moved into the new cell offsets.
    pub fn supercell(&self, reps: &[i64]) -> Result<CrystalFramework, Error> {
        if reps.len() != self.dim || reps.iter().any(|&r| r < 1) {
            return Err(Error::BadRepetitions(reps.to_vec()));
        }
        let d = self.dim;
        let periods: Vec<Vec<BigRational>> = self
            .periods
            .iter()
            .enumerate()
            .map(|(t, a)| {
                let r = BigRational::from_integer(BigInt::from(reps[t]));
                a.iter().map(|x| x * &r).collect()
            })
            .collect();

        let residues = residue_cells(reps);
        let mut joints = Vec::new();
        for r in &residues {
            for j in &self.joints {
                let shift = self.lattice_vector(r);
                let coords = j.coords.iter().zip(&shift).map(|(c, s)| c + s).collect();
                joints.push(Joint {
                    id: residue_label(&j.id, r),
                    coords,
                });
            }
        }
        let mut edges = Vec::new();
        for s in &residues {
            for e in &self.edges {
                let (kv, rv) = split_cell(&add(s, &e.k), reps);
                let (kw, rw) = split_cell(&add(s, &e.l), reps);
                edges.push(EdgeDecl {
                    v: residue_label(&e.v, &rv),
                    k: kv,
                    w: residue_label(&e.w, &rw),
                    l: kw,
                });
            }
        }
        let _ = d;
        Ok(CrystalFramework {
            dim: self.dim,
            periods,
            joints,
            edges,
        })
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Split a cell index into (supercell index, residue) with Euclidean residue.
fn split_cell(c: &[i64], reps: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let mut q = Vec::with_capacity(c.len());
    let mut r = Vec::with_capacity(c.len());
    for (&ci, &ri) in c.iter().zip(reps) {
        q.push(ci.div_euclid(ri));
        r.push(ci.rem_euclid(ri));
    }
    (q, r)
}

/// Residue cells in row-major order: (0,..,0), (0,..,1), ...
pub fn residue_cells(reps: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &r in reps {
        let mut next = Vec::new();
        for cell in &out {
            for i in 0..r {
                let mut c = cell.clone();
                c.push(i);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

fn residue_label(id: &str, r: &[i64]) -> String {
    let suffix: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    format!("{id}@{}", suffix.join(","))
}

/// Exact determinant of a small rational matrix given as columns.
#[allow(clippy::needless_range_loop)]
pub fn rational_det(cols: &[Vec<BigRational>]) -> BigRational {
    let n = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect();
    let mut det = BigRational::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[i][k].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if pivot != k {
            m.swap(k, pivot);
            det = -det;
        }
        let pv = m[k][k].clone();
        det *= &pv;
        for i in k + 1..n {
            let factor = &m[i][k] / &pv;
            for j in k..n {
                let sub = &factor * &m[k][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Named fixtures from the example gallery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GalleryName {
    Grid,
    DiagGrid,
    KagomeRational,
    Doubled3d,
}

impl GalleryName {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "grid" => Ok(GalleryName::Grid),
            "diag_grid" => Ok(GalleryName::DiagGrid),
            "kagome_rational" => Ok(GalleryName::KagomeRational),
            "doubled3d" => Ok(GalleryName::Doubled3d),
            other => Err(Error::UnknownGallery(other.to_string())),
        }
    }

    pub fn all() -> [GalleryName; 4] {
        [
            GalleryName::Grid,
            GalleryName::DiagGrid,
            GalleryName::KagomeRational,
            GalleryName::Doubled3d,
        ]
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GalleryName::Grid => "grid",
            GalleryName::DiagGrid => "diag_grid",
            GalleryName::KagomeRational => "kagome_rational",
            GalleryName::Doubled3d => "doubled3d",
        }
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn qv(entries: &[(i64, i64)]) -> Vec<BigRational> {
    entries.iter().map(|&(n, d)| q(n, d)).collect()
}

pub fn gallery(name: GalleryName) -> CrystalFramework {
    match name {
        GalleryName::Grid => CrystalFramework {
            dim: 2,
            periods: vec![qv(&[(1, 1), (0, 1)]), qv(&[(0, 1), (1, 1)])],
            joints: vec![Joint {
                id: "v".into(),
                coords: qv(&[(0, 1), (0, 1)]),
            }],
            edges: vec![
                EdgeDecl::new("v", &[0, 0], "v", &[1, 0]),
                EdgeDecl::new("v", &[0, 0], "v", &[0, 1]),
            ],
        },
        // Square grid plus diagonals (n,m)-(n+1,m+1) for n+m even. Periods
        // a1=(1,1), a2=(0,2) span the even sublattice; the motif has 2
        // joints and 5 bars, and the alternating gear flex reads (-1,1).
        GalleryName::DiagGrid => CrystalFramework {
            dim: 2,
            periods: vec![qv(&[(1, 1), (1, 1)]), qv(&[(0, 1), (2, 1)])],
            joints: vec![
                Joint {
                    id: "v".into(),
                    coords: qv(&[(0, 1), (0, 1)]),
                },
                Joint {
                    id: "w".into(),
                    coords: qv(&[(1, 1), (0, 1)]),
                },
            ],
            edges: vec![
                EdgeDecl::new("v", &[0, 0], "w", &[0, 0]),
                EdgeDecl::new("v", &[0, 0], "w", &[-1, 1]),
                EdgeDecl::new("w", &[0, 0], "v", &[2, -1]),
                EdgeDecl::new("w", &[0, 0], "v", &[1, 0]),
                EdgeDecl::new("v", &[0, 0], "v", &[1, 0]),
            ],
        },
        // Kagome combinatorics in a rational affine realization: midpoints of
        // the triangle lattice mapped by a1 -> (1,0), a2 -> (0,1).
        GalleryName::KagomeRational => CrystalFramework {
            dim: 2,
            periods: vec![qv(&[(1, 1), (0, 1)]), qv(&[(0, 1), (1, 1)])],
            joints: vec![
                Joint {
                    id: "a".into(),
                    coords: qv(&[(1, 2), (0, 1)]),
                },
                Joint {
                    id: "b".into(),
                    coords: qv(&[(0, 1), (1, 2)]),
                },
                Joint {
                    id: "c".into(),
                    coords: qv(&[(1, 2), (1, 2)]),
                },
            ],
            edges: vec![
                EdgeDecl::new("a", &[0, 0], "b", &[0, 0]),
                EdgeDecl::new("a", &[0, 0], "c", &[0, 0]),
                EdgeDecl::new("b", &[0, 0], "c", &[0, 0]),
                EdgeDecl::new("c", &[0, 0], "b", &[1, 0]),
                EdgeDecl::new("c", &[0, 0], "a", &[0, 1]),
                EdgeDecl::new("b", &[1, 0], "a", &[0, 1]),
            ],
        },
        // An infinitesimally rigid single-joint 3D framework (axis bars plus
        // face-diagonal bars) and two parallel copies, each tied back by two
        // bars with independent directions. Each copy keeps exactly one
        // relative translation (kernel of Psi(1) has dimension 3 + 1 + 1),
        // while the rank-2 couplings obstruct all relative rotations, so the
        // first-order flex space is 6 + 1 + 1 = 8 dimensional.
        GalleryName::Doubled3d => {
            let offsets: [[i64; 3]; 6] = [
                [1, 0, 0],
                [0, 1, 0],
                [0, 0, 1],
                [1, 1, 0],
                [1, 0, 1],
                [0, 1, 1],
            ];
            let mut edges = Vec::new();
            for id in ["a", "b", "c"] {
                for off in &offsets {
                    edges.push(EdgeDecl::new(id, &[0, 0, 0], id, off));
                }
            }
            edges.push(EdgeDecl::new("a", &[0, 0, 0], "b", &[0, 0, 0]));
            edges.push(EdgeDecl::new("a", &[0, 0, 0], "b", &[1, 0, 0]));
            edges.push(EdgeDecl::new("a", &[0, 0, 0], "c", &[0, 0, 0]));
            edges.push(EdgeDecl::new("a", &[0, 0, 0], "c", &[0, 1, 0]));
            CrystalFramework {
                dim: 3,
                periods: vec![
                    qv(&[(1, 1), (0, 1), (0, 1)]),
                    qv(&[(0, 1), (1, 1), (0, 1)]),
                    qv(&[(0, 1), (0, 1), (1, 1)]),
                ],
                joints: vec![
                    Joint {
                        id: "a".into(),
                        coords: qv(&[(0, 1), (0, 1), (0, 1)]),
                    },
                    Joint {
                        id: "b".into(),
                        coords: qv(&[(1, 4), (1, 3), (1, 2)]),
                    },
                    Joint {
                        id: "c".into(),
                        coords: qv(&[(1, 5), (1, 7), (2, 3)]),
                    },
                ],
                edges,
            }
        }
    }
}
