//! RUM spectrum by torus sampling and the geometric flex spectrum Gamma(C),
//! exact for d <= 2 and probabilistically certified for d >= 3.
//!
//! All root-finding happens in the z-domain on the normalized transfer
//! function; reported spectrum points are omega = z^{-1} componentwise, so
//! the inversion convention is applied in exactly one place
//! ([`invert_point`]).

use num::complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::elimination::{gcd_many, resultant, univariate_roots};
use crate::error::Error;
use crate::framework::{residue_cells, CrystalFramework};
use crate::laurent::Laurent;
use crate::maybe_par_map;
use crate::numeric::DEFAULT_TOL;
use crate::transfer::{root_of_unity_grid, transfer_function, TransferFunction};

/// One rank-drop sample on the torus.
#[derive(Debug, Clone)]
pub struct RumSample {
    pub omega: Vec<Complex64>,
    pub rank: usize,
    pub kernel_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Finite,
    PositiveDimensional,
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finiteness {
    Finite,
    Infinite,
    Unknown,
}

/// The geometric flex spectrum Gamma(C). `points` holds certified
/// (omega, kernel_dim) pairs when the spectrum is finite or probabilistic;
/// `components` holds the nonunit minor-GCD factor (in the z variables)
/// when positive-dimensional.
#[derive(Debug, Clone)]
pub struct GeometricSpectrum {
    pub kind: SpectrumKind,
    pub points: Vec<(Vec<Complex64>, usize)>,
    pub components: Vec<Laurent>,
    pub certification: Certification,
}

pub struct SpectrumOptions {
    pub tol: f64,
    /// Seed for the d >= 3 sampler.
    pub seed: u64,
    /// Number of random samples in probabilistic mode.
    pub samples: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            tol: DEFAULT_TOL,
            seed: 20260201,
            samples: 10_000,
        }
    }
}

/// Candidate clustering radius for probabilistic mode and point dedup.
const CLUSTER_RADIUS: f64 = 1e-6;

fn invert_point(z: &[Complex64]) -> Vec<Complex64> {
    z.iter().map(|zi| zi.inv()).collect()
}

/// Evaluate Psi at omega^{-1} and wrap the result when the kernel is
/// nontrivial.
fn sample_at(tf: &TransferFunction, omega: Vec<Complex64>, tol: f64) -> Option<RumSample> {
    let z = invert_point(&omega);
    let r = tf.rank_at(&z, tol).ok()?;
    let kernel_dim = tf.dn() - r.rank;
    (kernel_dim >= 1).then_some(RumSample {
        omega,
        rank: r.rank,
        kernel_dim,
    })
}

/// Scan the uniform grid (e^{2 pi i j / grid_n})_j on T^d in row-major order
/// and report every sample where Psi(omega^{-1}) has nontrivial kernel.
pub fn rum_scan(
    fw: &CrystalFramework,
    grid_n: i64,
    tol: f64,
) -> Result<Vec<RumSample>, Error> {
    if grid_n < 1 {
        return Err(Error::InvalidArgument("grid_n must be >= 1".into()));
    }
    fw.require_valid()?;
    let tf = transfer_function(fw)?;
    let points: Vec<Vec<Complex64>> = residue_cells(&vec![grid_n; fw.dim])
        .iter()
        .map(|idx| {
            idx.iter()
                .map(|&j| Complex64::from_polar(1.0, TAU * j as f64 / grid_n as f64))
                .collect()
        })
        .collect();
    Ok(maybe_par_map(points, |omega| sample_at(&tf, omega, tol))
        .into_iter()
        .flatten()
        .collect())
}

/// Same scan restricted to tuples of roots of unity of order dividing
/// `max_order` (the rational RUM spectrum probe).
pub fn rum_rational_scan(
    fw: &CrystalFramework,
    max_order: i64,
    tol: f64,
) -> Result<Vec<RumSample>, Error> {
    if max_order < 1 {
        return Err(Error::InvalidArgument("max_order must be >= 1".into()));
    }
    fw.require_valid()?;
    let tf = transfer_function(fw)?;
    let points = root_of_unity_grid(&vec![max_order; fw.dim]);
    Ok(maybe_par_map(points, |omega| sample_at(&tf, omega, tol))
        .into_iter()
        .flatten()
        .collect())
}

/// Sequential variant of [`rum_scan`] with identical output; exists so the
/// bench suite can compare the parallel and sequential paths directly.
pub fn rum_scan_sequential(
    fw: &CrystalFramework,
    grid_n: i64,
    tol: f64,
) -> Result<Vec<RumSample>, Error> {
    if grid_n < 1 {
        return Err(Error::InvalidArgument("grid_n must be >= 1".into()));
    }
    fw.require_valid()?;
    let tf = transfer_function(fw)?;
    let points: Vec<Vec<Complex64>> = residue_cells(&vec![grid_n; fw.dim])
        .iter()
        .map(|idx| {
            idx.iter()
                .map(|&j| Complex64::from_polar(1.0, TAU * j as f64 / grid_n as f64))
                .collect()
        })
        .collect();
    Ok(crate::seq_map(points, |omega| sample_at(&tf, omega, tol))
        .into_iter()
        .flatten()
        .collect())
}

/// CSV text for a sample list: header
/// `omega_1_re,omega_1_im,...,rank,kernel_dim`, 17-significant-digit floats.
pub fn rum_samples_csv(dim: usize, samples: &[RumSample]) -> String {
    let mut out = String::new();
    for t in 1..=dim {
        out.push_str(&format!("omega_{t}_re,omega_{t}_im,"));
    }
    out.push_str("rank,kernel_dim\n");
    for s in samples {
        for w in &s.omega {
            out.push_str(&format!("{:.16e},{:.16e},", w.re, w.im));
        }
        out.push_str(&format!("{},{}\n", s.rank, s.kernel_dim));
    }
    out
}

pub fn geometric_spectrum(fw: &CrystalFramework) -> Result<GeometricSpectrum, Error> {
    geometric_spectrum_with(fw, &SpectrumOptions::default())
}

pub fn geometric_spectrum_with(
    fw: &CrystalFramework,
    opts: &SpectrumOptions,
) -> Result<GeometricSpectrum, Error> {
    fw.require_valid()?;
    let tf = transfer_function(fw)?;
    let dn = tf.dn();

    if fw.dim >= 3 {
        return Ok(probabilistic_spectrum(fw, &tf, opts));
    }

    // Underdetermined: every evaluation is rank-deficient.
    if fw.n_edges() < dn {
        return Ok(GeometricSpectrum {
            kind: SpectrumKind::PositiveDimensional,
            points: Vec::new(),
            components: vec![Laurent::zero(fw.dim)],
            certification: Certification::Exact,
        });
    }

    let minors: Vec<Laurent> = tf
        .psi_poly
        .minors(dn)?
        .into_iter()
        .filter(|p| !p.is_zero())
        .collect();
    if minors.is_empty() {
        return Ok(GeometricSpectrum {
            kind: SpectrumKind::PositiveDimensional,
            points: Vec::new(),
            components: vec![Laurent::zero(fw.dim)],
            certification: Certification::Exact,
        });
    }

    let g = gcd_many(&minors)?;
    if !g.is_monomial_unit() {
        if fw.dim == 1 {
            // A nonunit univariate GCD still has a finite zero set.
            let roots = univariate_roots(&g, 0)?;
            let points = certify_candidates(
                &tf,
                roots.as_complex().into_iter().map(|z| vec![z]).collect(),
                opts.tol,
            );
            return Ok(GeometricSpectrum {
                kind: SpectrumKind::Finite,
                points,
                components: Vec::new(),
                certification: Certification::Exact,
            });
        }
        return Ok(GeometricSpectrum {
            kind: SpectrumKind::PositiveDimensional,
            points: Vec::new(),
            components: vec![g],
            certification: Certification::Exact,
        });
    }

    // Unit GCD with d = 1 means no common zero at all; that contradicts the
    // forced rank drop at z = 1 unless there are no minors, handled above.
    let candidates = if fw.dim == 1 {
        vec![vec![Complex64::new(1.0, 0.0)]]
    } else {
        finite_candidates_2d(&minors)?
    };
    let points = certify_candidates(&tf, candidates, opts.tol);
    Ok(GeometricSpectrum {
        kind: SpectrumKind::Finite,
        points,
        components: Vec::new(),
        certification: Certification::Exact,
    })
}

pub fn is_spectrum_finite(gs: &GeometricSpectrum) -> Finiteness {
    match gs.kind {
        SpectrumKind::Finite => Finiteness::Finite,
        SpectrumKind::PositiveDimensional => Finiteness::Infinite,
        SpectrumKind::Probabilistic => Finiteness::Unknown,
    }
}

/// Certify candidate z-points by the numeric kernel of Psi(z); returns
/// deduplicated (omega, kernel_dim) pairs with omega = z^{-1}.
fn certify_candidates(
    tf: &TransferFunction,
    candidates: Vec<Vec<Complex64>>,
    tol: f64,
) -> Vec<(Vec<Complex64>, usize)> {
    let mut points: Vec<(Vec<Complex64>, usize)> = Vec::new();
    for z in candidates {
        if z.iter().any(|zi| zi.norm() < 1e-12) {
            continue;
        }
        if points
            .iter()
            .any(|(w, _)| point_dist(w, &invert_point(&z)) < CLUSTER_RADIUS)
        {
            continue;
        }
        if let Ok(r) = tf.rank_at(&z, tol) {
            let kdim = tf.dn() - r.rank;
            if kdim >= 1 {
                points.push((invert_point(&z), kdim));
            }
        }
    }
    points
}

fn point_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Candidate common zeros of a bivariate minor system with unit GCD:
/// z1 values from pairwise resultants eliminating z2 (plus the roots of any
/// minor not involving z2), then z2 roots of each minor specialized at z1.
/// The output is a superset of the true common-zero set; certification
/// against Psi filters it.
fn finite_candidates_2d(minors: &[Laurent]) -> Result<Vec<Vec<Complex64>>, Error> {
    let mut z1_candidates: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let involves_z2: Vec<&Laurent> = minors
        .iter()
        .filter(|p| p.degree_in(1).unwrap_or(0) > p.min_exponents().unwrap()[1])
        .collect();
    for p in minors {
        if p.degree_in(1).unwrap_or(0) == p.min_exponents().unwrap()[1] && !p.is_constant() {
            // univariate in z1
            z1_candidates.extend(univariate_roots(p, 0)?.as_complex());
        }
    }
    for i in 0..involves_z2.len() {
        for j in (i + 1)..involves_z2.len() {
            let r = resultant(involves_z2[i], involves_z2[j], 1)?;
            if r.is_zero() || r.is_constant() {
                continue;
            }
            z1_candidates.extend(univariate_roots(&r, 0)?.as_complex());
        }
    }

    let mut out = Vec::new();
    for &z1 in &z1_candidates {
        if z1.norm() < 1e-12 {
            continue;
        }
        let mut z2_candidates = vec![Complex64::new(1.0, 0.0)];
        for p in &involves_z2 {
            let coeffs = specialize_z1(p, z1);
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if scale < 1e-10 {
                continue;
            }
            z2_candidates.extend(crate::elimination::complex_poly_roots(&coeffs));
        }
        for z2 in z2_candidates {
            out.push(vec![z1, z2]);
        }
    }
    Ok(out)
}

/// Coefficient vector in z2 of a bivariate Laurent polynomial with z1
/// specialized, after monomial normalization.
fn specialize_z1(p: &Laurent, z1: Complex64) -> Vec<Complex64> {
    let (q, _) = p.monomial_normalize().expect("nonzero polynomial");
    let deg = q.degree_in(1).unwrap_or(0) as usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
    for (k, c) in q.terms() {
        coeffs[k[1] as usize] += c.to_complex() * z1.powi(k[0] as i32);
    }
    coeffs
}

/// d >= 3: seeded sampling over torus points, polydisk shells, and low-order
/// roots of unity; rank-drop hits are clustered and re-certified.
fn probabilistic_spectrum(
    fw: &CrystalFramework,
    tf: &TransferFunction,
    opts: &SpectrumOptions,
) -> GeometricSpectrum {
    let d = fw.dim;
    let mut candidates: Vec<Vec<Complex64>> = Vec::new();
    for order in 1..=4_i64 {
        candidates.extend(root_of_unity_grid(&vec![order; d]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let on_torus = rng.gen_bool(0.5);
        let z: Vec<Complex64> = (0..d)
            .map(|_| {
                let r = if on_torus {
                    1.0
                } else {
                    // log-uniform shell radius in [1/2, 2]
                    (rng.gen_range(-1.0..1.0) * std::f64::consts::LN_2).exp()
                };
                Complex64::from_polar(r, rng.gen_range(0.0..TAU))
            })
            .collect();
        candidates.push(z);
    }

    let tol = opts.tol;
    let hits: Vec<Vec<Complex64>> = maybe_par_map(candidates, |z| {
        let r = tf.rank_at(&z, tol).ok()?;
        (tf.dn() - r.rank >= 1).then_some(z)
    })
    .into_iter()
    .flatten()
    .collect();

    // Greedy clustering, then one more certification pass on the centers.
    let mut centers: Vec<Vec<Complex64>> = Vec::new();
    for z in hits {
        if !centers.iter().any(|c| point_dist(c, &z) < CLUSTER_RADIUS) {
            centers.push(z);
        }
    }
    let points = certify_candidates(tf, centers, opts.tol);
    GeometricSpectrum {
        kind: SpectrumKind::Probabilistic,
        points,
        components: Vec::new(),
        certification: Certification::Sampled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{gallery, EdgeDecl, GalleryName, Joint};
    use num::BigRational;

    fn near(a: Complex64, re: f64, im: f64) -> bool {
        (a - Complex64::new(re, im)).norm() < 1e-8
    }

    #[test]
    fn grid_scan_drops_on_axes() {
        let fw = gallery(GalleryName::Grid);
        let samples = rum_scan(&fw, 8, DEFAULT_TOL).unwrap();
        // {omega1 = 1} and {omega2 = 1} grid lines: 8 + 8 - 1 samples
        assert_eq!(samples.len(), 15);
        for s in &samples {
            assert!(near(s.omega[0], 1.0, 0.0) || near(s.omega[1], 1.0, 0.0));
            assert_eq!(s.kernel_dim, 2 - s.rank);
        }
    }

    #[test]
    fn diag_grid_scan_two_points() {
        let fw = gallery(GalleryName::DiagGrid);
        let samples = rum_scan(&fw, 2, DEFAULT_TOL).unwrap();
        assert_eq!(samples.len(), 2, "{samples:?}");
        assert!(near(samples[0].omega[0], 1.0, 0.0) && near(samples[0].omega[1], 1.0, 0.0));
        assert!(near(samples[1].omega[0], -1.0, 0.0) && near(samples[1].omega[1], 1.0, 0.0));
    }

    #[test]
    fn identity_sample_has_translation_kernel() {
        for name in GalleryName::all() {
            let fw = gallery(name);
            let samples = rum_rational_scan(&fw, 1, DEFAULT_TOL).unwrap();
            assert_eq!(samples.len(), 1);
            assert!(samples[0].kernel_dim >= fw.dim);
        }
    }

    #[test]
    fn doubled3d_rational_scan_only_identity() {
        let fw = gallery(GalleryName::Doubled3d);
        let samples = rum_rational_scan(&fw, 3, DEFAULT_TOL).unwrap();
        assert_eq!(samples.len(), 1);
        assert_eq!(samples[0].kernel_dim, 5);
    }

    #[test]
    fn sequential_scan_matches_parallel() {
        let fw = gallery(GalleryName::KagomeRational);
        let a = rum_scan(&fw, 6, DEFAULT_TOL).unwrap();
        let b = rum_scan_sequential(&fw, 6, DEFAULT_TOL).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.rank, y.rank);
            assert!(point_dist(&x.omega, &y.omega) < 1e-14);
        }
    }

    #[test]
    fn grid_spectrum_positive_dimensional() {
        let fw = gallery(GalleryName::Grid);
        let gs = geometric_spectrum(&fw).unwrap();
        assert_eq!(gs.kind, SpectrumKind::PositiveDimensional);
        assert_eq!(is_spectrum_finite(&gs), Finiteness::Infinite);
        // component equals (1 - z1)(1 - z2) up to a unit
        let one = Laurent::one(2);
        let target = one
            .sub(&Laurent::var(2, 0))
            .mul(&one.sub(&Laurent::var(2, 1)));
        let comp = &gs.components[0];
        let q = target.divide_exact(comp);
        assert!(q.is_some() && q.unwrap().is_monomial_unit(), "{comp}");
    }

    #[test]
    fn diag_grid_spectrum_finite() {
        let fw = gallery(GalleryName::DiagGrid);
        let gs = geometric_spectrum(&fw).unwrap();
        assert_eq!(gs.kind, SpectrumKind::Finite);
        assert_eq!(gs.certification, Certification::Exact);
        assert_eq!(is_spectrum_finite(&gs), Finiteness::Finite);
        let mut pts: Vec<(f64, f64, f64, f64, usize)> = gs
            .points
            .iter()
            .map(|(w, k)| (w[0].re, w[0].im, w[1].re, w[1].im, *k))
            .collect();
        pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!((pts[0].0 - 1.0).abs() < 1e-8 && (pts[0].2 - 1.0).abs() < 1e-8);
        assert_eq!(pts[0].4, 2); // translations
        assert!((pts[1].0 + 1.0).abs() < 1e-8 && (pts[1].2 - 1.0).abs() < 1e-8);
        assert_eq!(pts[1].4, 1);
    }

    #[test]
    fn kagome_scan_three_lines() {
        let fw = gallery(GalleryName::KagomeRational);
        let samples = rum_scan(&fw, 8, DEFAULT_TOL).unwrap();
        // lines {omega1 = 1}, {omega2 = 1}, {omega1 = omega2} meet at 1 only
        assert_eq!(samples.len(), 3 * 8 - 2);
        for s in &samples {
            let on_line = near(s.omega[0], 1.0, 0.0)
                || near(s.omega[1], 1.0, 0.0)
                || (s.omega[0] - s.omega[1]).norm() < 1e-8;
            assert!(on_line, "{:?}", s.omega);
        }
    }

    #[test]
    fn kagome_spectrum_infinite() {
        let fw = gallery(GalleryName::KagomeRational);
        let gs = geometric_spectrum(&fw).unwrap();
        assert_eq!(gs.kind, SpectrumKind::PositiveDimensional);
        // the (single) 6x6 determinant vanishes along the scan lines below
        let samples = rum_scan(&fw, 8, DEFAULT_TOL).unwrap();
        for s in &samples {
            let z = invert_point(&s.omega);
            let val = gs.components[0].eval(&z).unwrap();
            assert!(val.norm() < 1e-8);
        }
    }

    #[test]
    fn doubled3d_spectrum_probabilistic() {
        let fw = gallery(GalleryName::Doubled3d);
        let gs = geometric_spectrum_with(
            &fw,
            &SpectrumOptions {
                samples: 500,
                ..SpectrumOptions::default()
            },
        )
        .unwrap();
        assert_eq!(gs.kind, SpectrumKind::Probabilistic);
        assert_eq!(is_spectrum_finite(&gs), Finiteness::Unknown);
        assert_eq!(gs.points.len(), 1, "{:?}", gs.points);
        for w in &gs.points[0].0 {
            assert!(near(*w, 1.0, 0.0));
        }
    }

    #[test]
    fn one_dimensional_chain_spectrum() {
        // two-joint 1D chain: rigid, Gamma = {1}
        let fw = CrystalFramework {
            dim: 1,
            periods: vec![vec![BigRational::from_integer(1.into())]],
            joints: vec![
                Joint {
                    id: "a".into(),
                    coords: vec![BigRational::from_integer(0.into())],
                },
                Joint {
                    id: "b".into(),
                    coords: vec![BigRational::new(1.into(), 2.into())],
                },
            ],
            edges: vec![
                EdgeDecl::new("a", &[0], "b", &[0]),
                EdgeDecl::new("b", &[0], "a", &[1]),
            ],
        };
        let gs = geometric_spectrum(&fw).unwrap();
        assert_eq!(gs.kind, SpectrumKind::Finite);
        assert_eq!(gs.points.len(), 1);
        assert!(near(gs.points[0].0[0], 1.0, 0.0));
        assert_eq!(gs.points[0].1, 1);
    }

    #[test]
    fn csv_shape() {
        let fw = gallery(GalleryName::DiagGrid);
        let samples = rum_scan(&fw, 2, DEFAULT_TOL).unwrap();
        let csv = rum_samples_csv(2, &samples);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "omega_1_re,omega_1_im,omega_2_re,omega_2_im,rank,kernel_dim"
        );
        assert_eq!(lines.count(), samples.len());
    }
}
