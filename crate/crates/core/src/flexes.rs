//! Velocity fields and flexes: factor-periodic, flexible-lattice, rigid
//! motions, and polynomially-weighted (pg) flexes, together with the
//! rigidity verdict and the flex-space dimension decision.

use nalgebra::DMatrix;
use num::complex::Complex64;
use std::collections::BTreeMap;

use crate::error::Error;
use crate::framework::CrystalFramework;
use crate::numeric::numeric_rank;
use crate::rational::rational_to_f64;
use crate::spectrum::{
    geometric_spectrum_with, is_spectrum_finite, Certification, Finiteness, GeometricSpectrum,
    SpectrumOptions,
};
use crate::transfer::{
    flexible_lattice_matrix, periodic_rigidity_matrix, transfer_function, RankThresholds,
};

/// A polynomial in d integer variables with complex coefficients,
/// nonnegative exponents, used for the h part of pg-flexes.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<i64>, Complex64>,
}

const COEFF_EPS: f64 = 1e-12;

impl CPoly {
    pub fn zero(nvars: usize) -> Self {
        CPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = CPoly::zero(nvars);
        if c.norm() > 0.0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: &[(Vec<i64>, Complex64)]) -> Self {
        let mut p = CPoly::zero(nvars);
        for (k, c) in terms {
            p.add_term(k.clone(), *c);
        }
        p
    }

    fn add_term(&mut self, k: Vec<i64>, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().norm() < COEFF_EPS {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                if c.norm() >= COEFF_EPS {
                    v.insert(c);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.norm() < COEFF_EPS)
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CPoly {
        let mut out = CPoly::zero(self.nvars);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    /// Evaluate at an integer cell index.
    pub fn eval(&self, k: &[i64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut m = 1.0;
            for (a, &kt) in alpha.iter().zip(k) {
                m *= (kt as f64).powi(*a as i32);
            }
            acc += c * m;
        }
        acc
    }

    /// The composed polynomial k -> self(k + k0), expanded binomially.
    pub fn shift_arg(&self, k0: &[i64]) -> CPoly {
        let mut out = CPoly::zero(self.nvars);
        for (alpha, c) in &self.terms {
            for (beta, w) in shift_expansion(alpha, k0) {
                out.add_term(beta, c * w);
            }
        }
        out
    }

    pub fn degree_in(&self, j: usize) -> i64 {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() >= COEFF_EPS)
            .map(|(k, _)| k[j])
            .max()
            .unwrap_or(0)
    }

    /// Lexicographic multi-degree over surviving terms.
    pub fn multi_degree(&self) -> Vec<i64> {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() >= COEFF_EPS)
            .map(|(k, _)| k.clone())
            .max()
            .unwrap_or_else(|| vec![0; self.nvars])
    }
}

/// Coefficients of (k + k0)^alpha in the monomial basis: pairs
/// (beta, C(alpha,beta) k0^(alpha-beta)) over beta <= alpha.
fn shift_expansion(alpha: &[i64], k0: &[i64]) -> Vec<(Vec<i64>, f64)> {
    let mut acc: Vec<(Vec<i64>, f64)> = vec![(Vec::new(), 1.0)];
    for (&a, &x) in alpha.iter().zip(k0) {
        let mut next = Vec::new();
        for (prefix, w) in &acc {
            for b in 0..=a {
                let c = binom(a, b) * (x as f64).powi((a - b) as i32);
                if c == 0.0 {
                    continue;
                }
                let mut beta = prefix.clone();
                beta.push(b);
                next.push((beta, w * c));
            }
        }
        acc = next;
    }
    acc
}

fn binom(n: i64, k: i64) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Velocity field on a box window of cells; each value is the stacked
/// velocity of the n motif joints in that cell (length dn).
#[derive(Debug, Clone)]
pub struct WindowField {
    pub k_min: Vec<i64>,
    pub k_max: Vec<i64>,
    pub values: BTreeMap<Vec<i64>, Vec<Complex64>>,
}

impl WindowField {
    pub fn from_fn(
        k_min: &[i64],
        k_max: &[i64],
        mut f: impl FnMut(&[i64]) -> Vec<Complex64>,
    ) -> Self {
        let mut values = BTreeMap::new();
        for k in box_cells(k_min, k_max) {
            let v = f(&k);
            values.insert(k, v);
        }
        WindowField {
            k_min: k_min.to_vec(),
            k_max: k_max.to_vec(),
            values,
        }
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.iter()
            .zip(self.k_min.iter().zip(&self.k_max))
            .all(|(&x, (&lo, &hi))| lo <= x && x <= hi)
    }

    fn scale(&self) -> f64 {
        self.values
            .values()
            .flat_map(|v| v.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    /// Plain-text listing "joint_id, cell k, velocity components".
    pub fn listing(&self, fw: &CrystalFramework) -> String {
        let d = fw.dim;
        let mut out = String::new();
        for (k, u) in &self.values {
            for (vi, joint) in fw.joints.iter().enumerate() {
                let comps: Vec<String> = (0..d)
                    .map(|t| {
                        let c = u[vi * d + t];
                        format!("{:+.6}{:+.6}i", c.re, c.im)
                    })
                    .collect();
                out.push_str(&format!(
                    "{}, {:?}, {}\n",
                    joint.id,
                    k,
                    comps.join(" ")
                ));
            }
        }
        out
    }
}

fn box_cells(k_min: &[i64], k_max: &[i64]) -> Vec<Vec<i64>> {
    let mut cells: Vec<Vec<i64>> = vec![Vec::new()];
    for (lo, hi) in k_min.iter().zip(k_max) {
        let mut next = Vec::new();
        for c in &cells {
            for x in *lo..=*hi {
                let mut c2 = c.clone();
                c2.push(x);
                next.push(c2);
            }
        }
        cells = next;
    }
    cells
}

fn vec_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn omega_pow(omega: &[Complex64], k: &[i64]) -> Complex64 {
    omega
        .iter()
        .zip(k)
        .map(|(w, &e)| w.powi(e as i32))
        .product()
}

/// A polynomially-weighted geometric flex: the field k -> omega^k h(k).
#[derive(Debug, Clone)]
pub struct PGFlex {
    pub omega: Vec<Complex64>,
    /// One polynomial per joint coordinate; length dn.
    pub h: Vec<CPoly>,
}

impl PGFlex {
    pub fn window_field(&self, k_min: &[i64], k_max: &[i64]) -> WindowField {
        WindowField::from_fn(k_min, k_max, |k| {
            let w = omega_pow(&self.omega, k);
            self.h.iter().map(|p| w * p.eval(k)).collect()
        })
    }

    pub fn max_degree(&self) -> i64 {
        self.h
            .iter()
            .map(|p| p.multi_degree().iter().sum::<i64>())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient table serialization: one line per (coordinate, exponent).
    pub fn coefficient_table(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.h.iter().enumerate() {
            for (k, c) in &p.terms {
                out.push_str(&format!("h[{i}] {:?} {:+.6}{:+.6}i\n", k, c.re, c.im));
            }
        }
        out
    }
}

/// A flexible-lattice (affinely periodic) flex u(k) = u0 + (Xk, ..., Xk).
#[derive(Debug, Clone)]
pub struct FperFlex {
    pub u0: Vec<Complex64>,
    pub x: DMatrix<Complex64>,
}

impl FperFlex {
    #[allow(clippy::needless_range_loop)]
    pub fn window_field(&self, k_min: &[i64], k_max: &[i64]) -> WindowField {
        let d = self.x.nrows();
        let n = self.u0.len() / d;
        WindowField::from_fn(k_min, k_max, |k| {
            let kc: Vec<Complex64> = k.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
            let mut xk = vec![Complex64::new(0.0, 0.0); d];
            for i in 0..d {
                for t in 0..d {
                    xk[i] += self.x[(i, t)] * kc[t];
                }
            }
            (0..n * d).map(|i| self.u0[i] + xk[i % d]).collect()
        })
    }

    /// Frobenius norm of the symmetric part of X (zero for trivial affine
    /// flexes built from skew matrices).
    pub fn symmetric_part_norm(&self) -> f64 {
        let d = self.x.nrows();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += ((self.x[(i, j)] + self.x[(j, i)]) * 0.5).norm_sqr();
            }
        }
        s.sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct FlexCheck {
    pub ok: bool,
    /// Labels "edge_label @ cell" of violated edge instances.
    pub violations: Vec<String>,
}

/// Check the first-order flex condition p(e) . (u(v,k+k0) - u(w,k+l0)) = 0
/// for every edge instance with both endpoint cells inside the window.
pub fn check_flex_window(
    fw: &CrystalFramework,
    field: &WindowField,
    tol: f64,
) -> Result<FlexCheck, Error> {
    fw.require_valid()?;
    let d = fw.dim;
    let scale = field.scale();
    let mut violations = Vec::new();
    if scale == 0.0 {
        return Ok(FlexCheck {
            ok: true,
            violations,
        });
    }
    for e in &fw.edges {
        let vi = fw.joint_index(&e.v)?;
        let wi = fw.joint_index(&e.w)?;
        let p = fw.bar_vector_f64(e)?;
        let p_norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        for base in field.values.keys() {
            // interpret `base` as the cell of the v endpoint
            let kv = base.clone();
            let shift: Vec<i64> = e.l.iter().zip(&e.k).map(|(l, k)| l - k).collect();
            let kw = vec_add(&kv, &shift);
            if !field.contains(&kw) {
                continue;
            }
            let uv = &field.values[&kv];
            let uw = &field.values[&kw];
            let mut dot = Complex64::new(0.0, 0.0);
            for t in 0..d {
                dot += Complex64::new(p[t], 0.0) * (uv[vi * d + t] - uw[wi * d + t]);
            }
            if dot.norm() > tol * p_norm * scale {
                violations.push(format!("{} @ {:?}", e.label(), kv));
            }
        }
    }
    Ok(FlexCheck {
        ok: violations.is_empty(),
        violations,
    })
}

/// Kernel basis of Psi(omega^{-1}) wrapped as constant-h pg-flexes.
pub fn factor_periodic_flexes(
    fw: &CrystalFramework,
    omega: &[Complex64],
    tol: f64,
) -> Result<Vec<PGFlex>, Error> {
    fw.require_valid()?;
    let tf = transfer_function(fw)?;
    let z: Vec<Complex64> = omega.iter().map(|w| w.inv()).collect();
    let r = tf.rank_at(&z, tol)?;
    let d = fw.dim;
    let dn = tf.dn();
    let mut out = Vec::new();
    for c in 0..r.kernel.ncols() {
        let h = (0..dn)
            .map(|i| CPoly::constant(d, r.kernel[(i, c)]))
            .collect();
        out.push(PGFlex {
            omega: omega.to_vec(),
            h,
        });
    }
    Ok(out)
}

/// Kernel basis of R_fper decoded as (u0, X) pairs. The lattice block of
/// R_fper carries (l_t - k_t) p(e)_i in column t*d + i while the field
/// u(k) = u0 + (Xk,...) contributes (k_t - l_t) sums, so X is the negated
/// reshape of the kernel tail.
pub fn fper_flex_space(fw: &CrystalFramework, tol: f64) -> Result<Vec<FperFlex>, Error> {
    let fl = flexible_lattice_matrix(fw)?;
    let r = fl.rank(tol);
    let d = fl.dim;
    let dn = fl.dn;
    let mut out = Vec::new();
    for c in 0..r.kernel.ncols() {
        let u0: Vec<Complex64> = (0..dn).map(|i| r.kernel[(i, c)]).collect();
        let mut x = DMatrix::zeros(d, d);
        for t in 0..d {
            for i in 0..d {
                x[(i, t)] = -r.kernel[(dn + t * d + i, c)];
            }
        }
        out.push(FperFlex { u0, x });
    }
    Ok(out)
}

/// Basis of the rigid-motion flex space: d translations plus d(d-1)/2
/// infinitesimal rotations, as omega = 1 pg-flexes of degree <= 1.
#[allow(clippy::needless_range_loop)]
pub fn rigid_motion_flexes(fw: &CrystalFramework) -> Result<Vec<PGFlex>, Error> {
    fw.require_valid()?;
    let d = fw.dim;
    let n = fw.n_joints();
    let one = vec![Complex64::new(1.0, 0.0); d];
    let mut out = Vec::new();
    for t in 0..d {
        let h = (0..d * n)
            .map(|i| {
                if i % d == t {
                    CPoly::constant(d, Complex64::new(1.0, 0.0))
                } else {
                    CPoly::zero(d)
                }
            })
            .collect();
        out.push(PGFlex {
            omega: one.clone(),
            h,
        });
    }
    // periods as a real matrix, columns a_j
    let a: Vec<Vec<f64>> = fw
        .periods
        .iter()
        .map(|col| col.iter().map(rational_to_f64).collect())
        .collect();
    let coords: Vec<Vec<f64>> = fw
        .joints
        .iter()
        .map(|j| j.coords.iter().map(rational_to_f64).collect())
        .collect();
    for s in 0..d {
        for t in (s + 1)..d {
            // skew generator B = E_st - E_ts; field u = B(p_v + A k)
            let b_row = |i: usize, x: &[f64]| -> f64 {
                if i == s {
                    x[t]
                } else if i == t {
                    -x[s]
                } else {
                    0.0
                }
            };
            let mut h = Vec::with_capacity(d * n);
            for v in 0..n {
                for i in 0..d {
                    let mut terms = vec![(
                        vec![0; d],
                        Complex64::new(b_row(i, &coords[v]), 0.0),
                    )];
                    for (j, col) in a.iter().enumerate() {
                        let mut e = vec![0; d];
                        e[j] = 1;
                        terms.push((e, Complex64::new(b_row(i, col), 0.0)));
                    }
                    h.push(CPoly::from_terms(d, &terms));
                }
            }
            out.push(PGFlex {
                omega: one.clone(),
                h,
            });
        }
    }
    Ok(out)
}

/// All exponent vectors with total degree <= max_deg, in a fixed order.
fn monomials_up_to(d: usize, max_deg: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for m in &out {
            let used: i64 = m.iter().sum();
            for e in 0..=(max_deg - used) {
                let mut m2 = m.clone();
                m2.push(e);
                next.push(m2);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Basis of pg-flexes with multi-factor omega and total degree of h at most
/// max_deg: the per-edge polynomial identities are expanded in the monomial
/// basis and solved as one numeric null-space problem in the coefficients.
#[allow(clippy::needless_range_loop)]
pub fn pg_flex_space(
    fw: &CrystalFramework,
    omega: &[Complex64],
    max_deg: i64,
    tol: f64,
) -> Result<Vec<PGFlex>, Error> {
    if max_deg < 0 {
        return Err(Error::InvalidArgument("max_deg must be >= 0".into()));
    }
    fw.require_valid()?;
    if omega.len() != fw.dim || omega.iter().any(|w| w.norm() < 1e-12) {
        return Err(Error::InvalidArgument(
            "omega must have d nonzero components".into(),
        ));
    }
    let d = fw.dim;
    let n = fw.n_joints();
    let dn = d * n;
    let monos = monomials_up_to(d, max_deg);
    let mono_index: BTreeMap<Vec<i64>, usize> =
        monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let nm = monos.len();
    let mut m = DMatrix::<Complex64>::zeros(fw.n_edges() * nm, dn * nm);
    for (ei, e) in fw.edges.iter().enumerate() {
        let vi = fw.joint_index(&e.v)?;
        let wi = fw.joint_index(&e.w)?;
        let p = fw.bar_vector_f64(e)?;
        let wv = omega_pow(omega, &e.k);
        let ww = omega_pow(omega, &e.l);
        for (ai, alpha) in monos.iter().enumerate() {
            // v side: + p_t omega^k0 (k + k0)^alpha on column (vi*d+t, alpha)
            for (k0, side, joint, w) in
                [(&e.k, 1.0, vi, wv), (&e.l, -1.0, wi, ww)]
            {
                for (beta, coef) in shift_expansion(alpha, k0) {
                    let bi = mono_index[&beta];
                    for t in 0..d {
                        let col = (joint * d + t) * nm + ai;
                        m[(ei * nm + bi, col)] +=
                            Complex64::new(side * p[t] * coef, 0.0) * w;
                    }
                }
            }
        }
    }
    let r = numeric_rank(&m, tol);
    let mut out = Vec::new();
    for c in 0..r.kernel.ncols() {
        let mut h = Vec::with_capacity(dn);
        for i in 0..dn {
            let terms: Vec<(Vec<i64>, Complex64)> = monos
                .iter()
                .enumerate()
                .map(|(ai, mono)| (mono.clone(), r.kernel[(i * nm + ai, c)]))
                .filter(|(_, coef)| coef.norm() >= COEFF_EPS)
                .collect();
            h.push(CPoly::from_terms(d, &terms));
        }
        out.push(PGFlex {
            omega: omega.to_vec(),
            h,
        });
    }
    Ok(out)
}

/// The finite difference u - omega_j W_j u in pg form: same omega, new
/// polynomial h(k) - h(k - e_j) (the omega factors cancel against the
/// shift), with strictly lower lexicographic multi-degree.
pub fn difference_reduce(f: &PGFlex, j: usize) -> Result<PGFlex, Error> {
    let d = f.omega.len();
    if j >= d {
        return Err(Error::InvalidArgument(format!(
            "direction {j} out of range for d = {d}"
        )));
    }
    if f.h.iter().all(|p| p.degree_in(j) == 0) {
        return Err(Error::DegreeZero { var: j });
    }
    let mut shift = vec![0; d];
    shift[j] = -1;
    let h = f
        .h
        .iter()
        .map(|p| p.sub(&p.shift_arg(&shift)))
        .collect();
    Ok(PGFlex {
        omega: f.omega.clone(),
        h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rigidity {
    Rigid,
    Flexible,
    Unknown,
}

#[derive(Debug, Clone)]
pub enum FlexWitness {
    FactorPeriodic(PGFlex),
    FlexibleLattice(FperFlex),
}

#[derive(Debug, Clone)]
pub struct RigidityVerdict {
    /// Some(true) iff Gamma(C) = {1}; None when only probabilistic
    /// certification is available and no counterexample was found.
    pub gamma_trivial: Option<bool>,
    pub periodic_kernel_is_translations: bool,
    pub fper_rank_extremal: bool,
    /// Mirrors gamma_trivial: rank Psi(z) = dn for all z != 1.
    pub psi_rank_extremal: Option<bool>,
    pub first_order_rigid: Rigidity,
    pub certification: Certification,
    pub witness: Option<FlexWitness>,
    pub thresholds: RankThresholds,
    pub spectrum: GeometricSpectrum,
}

pub fn rigidity_verdict(fw: &CrystalFramework) -> Result<RigidityVerdict, Error> {
    rigidity_verdict_with(fw, &SpectrumOptions::default())
}

pub fn rigidity_verdict_with(
    fw: &CrystalFramework,
    opts: &SpectrumOptions,
) -> Result<RigidityVerdict, Error> {
    fw.require_valid()?;
    let tol = opts.tol;
    let d = fw.dim;
    let thresholds = RankThresholds::for_framework(fw);
    let spectrum = geometric_spectrum_with(fw, opts)?;

    let one = vec![Complex64::new(1.0, 0.0); d];
    let nontrivial_point = spectrum
        .points
        .iter()
        .find(|(w, _)| point_far_from(w, &one));
    let gamma_trivial = match is_spectrum_finite(&spectrum) {
        Finiteness::Infinite => Some(false),
        Finiteness::Finite => Some(nontrivial_point.is_none()),
        // certified points are genuine members of Gamma even in sampled mode
        Finiteness::Unknown => {
            if nontrivial_point.is_some() {
                Some(false)
            } else {
                None
            }
        }
    };

    let rper = numeric_rank(&periodic_rigidity_matrix(fw)?, tol);
    let periodic_kernel_is_translations = rper.kernel_dim() == d;

    let fl = flexible_lattice_matrix(fw)?;
    let fper_rank_extremal = fl.rank(tol).rank == thresholds.flex_lattice;

    let first_order_rigid = match gamma_trivial {
        Some(true) if periodic_kernel_is_translations && fper_rank_extremal => Rigidity::Rigid,
        None if periodic_kernel_is_translations && fper_rank_extremal => Rigidity::Unknown,
        _ => Rigidity::Flexible,
    };

    let witness = if first_order_rigid == Rigidity::Flexible {
        find_witness(
            fw,
            tol,
            fper_rank_extremal,
            periodic_kernel_is_translations,
            &spectrum,
        )?
    } else {
        None
    };

    Ok(RigidityVerdict {
        gamma_trivial,
        periodic_kernel_is_translations,
        fper_rank_extremal,
        psi_rank_extremal: gamma_trivial,
        first_order_rigid,
        certification: spectrum.certification,
        witness,
        thresholds,
        spectrum,
    })
}

fn point_far_from(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter().zip(b).any(|(x, y)| (x - y).norm() > 1e-6)
}

/// Construct and re-verify a nontrivial flex for a flexible framework,
/// preferring a lattice-shear FperFlex, then a non-translation periodic
/// flex, then a factor-periodic flex at some omega != 1.
fn find_witness(
    fw: &CrystalFramework,
    tol: f64,
    fper_rank_extremal: bool,
    periodic_kernel_is_translations: bool,
    spectrum: &GeometricSpectrum,
) -> Result<Option<FlexWitness>, Error> {
    let d = fw.dim;
    let window_lo = vec![-2i64; d];
    let window_hi = vec![2i64; d];
    let check = |field: &WindowField| -> bool {
        check_flex_window(fw, field, 1e-8)
            .map(|c| c.ok)
            .unwrap_or(false)
    };

    if !fper_rank_extremal {
        for f in fper_flex_space(fw, tol)? {
            if f.symmetric_part_norm() > 1e-6
                && check(&f.window_field(&window_lo, &window_hi))
            {
                return Ok(Some(FlexWitness::FlexibleLattice(f)));
            }
        }
    }

    if !periodic_kernel_is_translations {
        let one = vec![Complex64::new(1.0, 0.0); d];
        let flexes = factor_periodic_flexes(fw, &one, tol)?;
        // project away the translation span to keep a genuine witness
        for f in &flexes {
            let residual = remove_translation_component(fw, f);
            if let Some(f2) = residual {
                if check(&f2.window_field(&window_lo, &window_hi)) {
                    return Ok(Some(FlexWitness::FactorPeriodic(f2)));
                }
            }
        }
    }

    // a spectrum point away from 1, or a scan of small root-of-unity grids
    // when Gamma is positive-dimensional
    let one = vec![Complex64::new(1.0, 0.0); d];
    let mut omegas: Vec<Vec<Complex64>> = spectrum
        .points
        .iter()
        .filter(|(w, _)| point_far_from(w, &one))
        .map(|(w, _)| w.clone())
        .collect();
    if omegas.is_empty() {
        'scan: for order in 2..=8i64 {
            for s in crate::spectrum::rum_rational_scan(fw, order, tol)? {
                if point_far_from(&s.omega, &one) {
                    omegas.push(s.omega);
                    break 'scan;
                }
            }
        }
    }
    for w in omegas {
        for f in factor_periodic_flexes(fw, &w, tol)? {
            if check(&f.window_field(&window_lo, &window_hi)) {
                return Ok(Some(FlexWitness::FactorPeriodic(f)));
            }
        }
    }
    Ok(None)
}

/// Subtract the orthogonal projection onto the d translation vectors; None
/// when the remainder is negligible.
fn remove_translation_component(fw: &CrystalFramework, f: &PGFlex) -> Option<PGFlex> {
    let d = fw.dim;
    let n = fw.n_joints();
    let dn = d * n;
    let mut u: Vec<Complex64> = f
        .h
        .iter()
        .map(|p| p.eval(&vec![0; d]))
        .collect();
    for t in 0..d {
        // orthonormal translation direction: e_t at every joint, norm sqrt(n)
        let mut proj = Complex64::new(0.0, 0.0);
        for v in 0..n {
            proj += u[v * d + t];
        }
        proj /= n as f64;
        for v in 0..n {
            u[v * d + t] -= proj;
        }
    }
    let norm: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return None;
    }
    let h = (0..dn).map(|i| CPoly::constant(d, u[i] / norm)).collect();
    Some(PGFlex {
        omega: f.omega.clone(),
        h,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlexDimension {
    Infinite,
    Finite(usize),
    Unknown,
}

#[derive(Debug, Clone)]
pub struct FlexDimensionResult {
    pub dimension: FlexDimension,
    pub certification: Certification,
    /// Stabilized per-point dimensions, parallel to the spectrum's points.
    pub per_point: Vec<usize>,
}

pub fn flex_space_dimension(
    fw: &CrystalFramework,
    max_deg_cap: i64,
) -> Result<FlexDimensionResult, Error> {
    flex_space_dimension_with(fw, max_deg_cap, &SpectrumOptions::default())
}

/// Total flex dimension: infinite when Gamma is infinite, otherwise the sum
/// over certified spectrum points of the degree-stabilized pg-flex
/// dimension (two consecutive degrees agreeing, capped at max_deg_cap).
pub fn flex_space_dimension_with(
    fw: &CrystalFramework,
    max_deg_cap: i64,
    opts: &SpectrumOptions,
) -> Result<FlexDimensionResult, Error> {
    fw.require_valid()?;
    let spectrum = geometric_spectrum_with(fw, opts)?;
    if is_spectrum_finite(&spectrum) == Finiteness::Infinite {
        return Ok(FlexDimensionResult {
            dimension: FlexDimension::Infinite,
            certification: spectrum.certification,
            per_point: Vec::new(),
        });
    }
    let mut per_point = Vec::new();
    let mut total = 0usize;
    for (omega, _) in &spectrum.points {
        let mut prev = pg_flex_space(fw, omega, 0, opts.tol)?.len();
        let mut stabilized = None;
        for deg in 1..=max_deg_cap {
            let cur = pg_flex_space(fw, omega, deg, opts.tol)?.len();
            if cur == prev {
                stabilized = Some(cur);
                break;
            }
            prev = cur;
        }
        match stabilized {
            Some(dim) => {
                per_point.push(dim);
                total += dim;
            }
            None => {
                return Ok(FlexDimensionResult {
                    dimension: FlexDimension::Unknown,
                    certification: spectrum.certification,
                    per_point,
                });
            }
        }
    }
    Ok(FlexDimensionResult {
        dimension: FlexDimension::Finite(total),
        certification: spectrum.certification,
        per_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{gallery, GalleryName};
    use crate::numeric::DEFAULT_TOL;

    fn one(d: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); d]
    }

    fn window(d: usize, r: i64) -> (Vec<i64>, Vec<i64>) {
        (vec![-r; d], vec![r; d])
    }

    fn assert_flex(fw: &CrystalFramework, f: &PGFlex, r: i64) {
        let (lo, hi) = window(fw.dim, r);
        let c = check_flex_window(fw, &f.window_field(&lo, &hi), 1e-8).unwrap();
        assert!(c.ok, "violations: {:?}", c.violations);
    }

    #[test]
    fn rigid_motions_are_flexes() {
        for name in GalleryName::all() {
            let fw = gallery(name);
            let flexes = rigid_motion_flexes(&fw).unwrap();
            assert_eq!(flexes.len(), fw.dim + fw.dim * (fw.dim - 1) / 2);
            for f in &flexes {
                assert_flex(&fw, f, 2);
            }
        }
    }

    #[test]
    fn grid_stretch_field_is_not_a_flex() {
        let fw = gallery(GalleryName::Grid);
        // u(k) = (k1, 0) stretches horizontal bars
        let (lo, hi) = window(2, 2);
        let field = WindowField::from_fn(&lo, &hi, |k| {
            vec![Complex64::new(k[0] as f64, 0.0), Complex64::new(0.0, 0.0)]
        });
        let c = check_flex_window(&fw, &field, 1e-8).unwrap();
        assert!(!c.ok);
        assert!(!c.violations.is_empty());
    }

    #[test]
    fn diag_grid_factor_periodic() {
        let fw = gallery(GalleryName::DiagGrid);
        let w = vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)];
        let flexes = factor_periodic_flexes(&fw, &w, DEFAULT_TOL).unwrap();
        assert_eq!(flexes.len(), 1);
        assert_flex(&fw, &flexes[0], 2);

        let generic = vec![Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
        assert!(factor_periodic_flexes(&fw, &generic, DEFAULT_TOL)
            .unwrap()
            .is_empty());

        let at_one = factor_periodic_flexes(&fw, &one(2), DEFAULT_TOL).unwrap();
        assert!(at_one.len() >= 2);
    }

    #[test]
    fn grid_fper_space() {
        let fw = gallery(GalleryName::Grid);
        let flexes = fper_flex_space(&fw, DEFAULT_TOL).unwrap();
        assert_eq!(flexes.len(), 4);
        let (lo, hi) = window(2, 2);
        for f in &flexes {
            let c = check_flex_window(&fw, &f.window_field(&lo, &hi), 1e-8).unwrap();
            assert!(c.ok, "violations: {:?}", c.violations);
        }
        // some basis vector mixes in a shear (nonzero symmetric part)
        assert!(flexes.iter().any(|f| f.symmetric_part_norm() > 1e-6));
    }

    #[test]
    fn fper_trivial_count_at_extremal_rank() {
        // 1D two-joint chain is flexible-lattice rank extremal
        let fw = crate::framework::CrystalFramework {
            dim: 1,
            periods: vec![vec![num::BigRational::from_integer(1.into())]],
            joints: vec![
                crate::framework::Joint {
                    id: "a".into(),
                    coords: vec![num::BigRational::from_integer(0.into())],
                },
                crate::framework::Joint {
                    id: "b".into(),
                    coords: vec![num::BigRational::new(1.into(), 2.into())],
                },
            ],
            edges: vec![
                crate::framework::EdgeDecl::new("a", &[0], "b", &[0]),
                crate::framework::EdgeDecl::new("b", &[0], "a", &[1]),
            ],
        };
        let flexes = fper_flex_space(&fw, DEFAULT_TOL).unwrap();
        // d(d+1)/2 = 1: the translation; axial lattice scaling is obstructed
        assert_eq!(flexes.len(), 1);
    }

    #[test]
    fn pg_space_diag_grid() {
        let fw = gallery(GalleryName::DiagGrid);
        let w = vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)];
        let basis = pg_flex_space(&fw, &w, 0, DEFAULT_TOL).unwrap();
        assert_eq!(basis.len(), 1);
        assert_flex(&fw, &basis[0], 2);
    }

    #[test]
    fn pg_space_contains_rigid_motions() {
        for name in [GalleryName::DiagGrid, GalleryName::Doubled3d] {
            let fw = gallery(name);
            let d = fw.dim;
            let basis = pg_flex_space(&fw, &one(d), 1, DEFAULT_TOL).unwrap();
            let rigid = rigid_motion_flexes(&fw).unwrap();
            assert!(basis.len() >= rigid.len());
            // span inclusion via ranks of stacked coefficient matrices
            let monos = monomials_up_to(d, 1);
            let to_row = |f: &PGFlex| -> Vec<Complex64> {
                let mut row = Vec::new();
                for p in &f.h {
                    for m in &monos {
                        row.push(p.terms.get(m).copied().unwrap_or(Complex64::new(0.0, 0.0)));
                    }
                }
                row
            };
            let ncols = fw.dim * fw.n_joints() * monos.len();
            let stack = |flexes: &[Vec<Complex64>]| {
                DMatrix::from_fn(flexes.len(), ncols, |i, j| flexes[i][j])
            };
            let basis_rows: Vec<Vec<Complex64>> = basis.iter().map(&to_row).collect();
            let mut all_rows = basis_rows.clone();
            all_rows.extend(rigid.iter().map(&to_row));
            let r1 = numeric_rank(&stack(&basis_rows), DEFAULT_TOL).rank;
            let r2 = numeric_rank(&stack(&all_rows), DEFAULT_TOL).rank;
            assert_eq!(r1, r2, "rigid motions escape the pg space for {name:?}");
        }
    }

    #[test]
    fn grid_horizontal_line_flexes() {
        // h in the first coordinate depending only on k2: always a flex
        let fw = gallery(GalleryName::Grid);
        let basis = pg_flex_space(&fw, &one(2), 3, DEFAULT_TOL).unwrap();
        // every h = (f(k2), g(k1)) with deg f, deg g <= 3 is a flex: dim 8
        assert_eq!(basis.len(), 8);
        for f in basis.iter().take(3) {
            assert_flex(&fw, f, 2);
        }
    }

    #[test]
    fn difference_reduce_drops_degree() {
        let fw = gallery(GalleryName::DiagGrid);
        let rot = rigid_motion_flexes(&fw).unwrap().pop().unwrap();
        assert_eq!(rot.max_degree(), 1);
        let red = difference_reduce(&rot, 0).unwrap();
        assert!(red.max_degree() <= 0, "degree {:?}", red.max_degree());
        assert_flex(&fw, &red, 2);
        assert!(matches!(
            difference_reduce(&red, 0),
            Err(Error::DegreeZero { var: 0 })
        ));

        // quadratic in k1 reduces to linear
        let q = CPoly::from_terms(2, &[(vec![2, 0], Complex64::new(1.0, 0.0))]);
        let f = PGFlex {
            omega: one(2),
            h: vec![q, CPoly::zero(2)],
        };
        let red = difference_reduce(&f, 0).unwrap();
        assert_eq!(red.h[0].degree_in(0), 1);
    }

    #[test]
    fn dimensions_match_fixtures() {
        let r = flex_space_dimension(&gallery(GalleryName::DiagGrid), 6).unwrap();
        assert_eq!(r.dimension, FlexDimension::Finite(4));

        let r = flex_space_dimension(&gallery(GalleryName::Grid), 6).unwrap();
        assert_eq!(r.dimension, FlexDimension::Infinite);
    }

    #[test]
    fn doubled3d_dimension_eight() {
        let opts = SpectrumOptions {
            samples: 300,
            ..SpectrumOptions::default()
        };
        let r = flex_space_dimension_with(&gallery(GalleryName::Doubled3d), 6, &opts).unwrap();
        assert_eq!(r.dimension, FlexDimension::Finite(8));
        assert_eq!(r.certification, Certification::Sampled);
    }

    #[test]
    fn verdicts() {
        let v = rigidity_verdict(&gallery(GalleryName::Grid)).unwrap();
        assert_eq!(v.first_order_rigid, Rigidity::Flexible);
        assert_eq!(v.gamma_trivial, Some(false));
        assert!(!v.fper_rank_extremal);
        assert!(matches!(v.witness, Some(FlexWitness::FlexibleLattice(_))));

        let v = rigidity_verdict(&gallery(GalleryName::DiagGrid)).unwrap();
        assert_eq!(v.first_order_rigid, Rigidity::Flexible);
        assert_eq!(v.gamma_trivial, Some(false));
        assert!(v.periodic_kernel_is_translations);
        match &v.witness {
            Some(FlexWitness::FactorPeriodic(f)) => {
                assert!((f.omega[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-8);
                assert!((f.omega[1] - Complex64::new(1.0, 0.0)).norm() < 1e-8);
            }
            other => panic!("expected factor-periodic witness, got {other:?}"),
        }

        let v = rigidity_verdict(&gallery(GalleryName::KagomeRational)).unwrap();
        assert_eq!(v.first_order_rigid, Rigidity::Flexible);
    }

    #[test]
    fn doubled3d_verdict_fails_periodic_kernel() {
        let opts = SpectrumOptions {
            samples: 300,
            ..SpectrumOptions::default()
        };
        let v = rigidity_verdict_with(&gallery(GalleryName::Doubled3d), &opts).unwrap();
        assert_eq!(v.first_order_rigid, Rigidity::Flexible);
        assert!(!v.periodic_kernel_is_translations);
        assert_eq!(v.certification, Certification::Sampled);
        assert!(matches!(v.witness, Some(FlexWitness::FactorPeriodic(_))));
    }

    #[test]
    fn one_dimensional_chain_is_rigid() {
        let fw = crate::framework::CrystalFramework {
            dim: 1,
            periods: vec![vec![num::BigRational::from_integer(1.into())]],
            joints: vec![
                crate::framework::Joint {
                    id: "a".into(),
                    coords: vec![num::BigRational::from_integer(0.into())],
                },
                crate::framework::Joint {
                    id: "b".into(),
                    coords: vec![num::BigRational::new(1.into(), 2.into())],
                },
            ],
            edges: vec![
                crate::framework::EdgeDecl::new("a", &[0], "b", &[0]),
                crate::framework::EdgeDecl::new("b", &[0], "a", &[1]),
            ],
        };
        let v = rigidity_verdict(&fw).unwrap();
        assert_eq!(v.first_order_rigid, Rigidity::Rigid);
        assert_eq!(v.gamma_trivial, Some(true));
        assert!(v.periodic_kernel_is_translations);
        assert!(v.fper_rank_extremal);
        assert!(v.witness.is_none());
    }
}
