//! Exact GCDs, Sylvester resultants and univariate root extraction.
//!
//! GCD and resultant are restricted to at most two variables; three and more
//! variables are declared unsupported rather than approximated.

use crate::error::Error;
use crate::laurent::Laurent;
use crate::rational::Gaussian;
use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, Zero};

/// GCD of two Laurent polynomials after monomial normalization, monic in the
/// lexicographic leading term. Unique up to a unit of the Laurent ring.
pub fn gcd_exact(p: &Laurent, q: &Laurent) -> Result<Laurent, Error> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let nvars = p.nvars();
    if nvars > 2 {
        return Err(Error::GcdUnsupported { nvars });
    }
    let (a, _) = p.monomial_normalize()?;
    let (b, _) = q.monomial_normalize()?;
    let g = poly_gcd(&a, &b);
    Ok(g.monic())
}

/// Fold `gcd_exact` over a nonempty list, with an early exit on a unit.
pub fn gcd_many(polys: &[Laurent]) -> Result<Laurent, Error> {
    let mut iter = polys.iter().filter(|p| !p.is_zero());
    let first = iter.next().ok_or(Error::ZeroPolynomial)?;
    let mut g = first.monomial_normalize()?.0.monic();
    for p in iter {
        g = gcd_exact(&g, p)?;
        if g.is_constant() {
            break;
        }
    }
    Ok(g)
}

/// GCD of normalized polynomials in <= 2 variables.
fn poly_gcd(a: &Laurent, b: &Laurent) -> Laurent {
    let nvars = a.nvars();
    // Variables actually occurring in either operand.
    let mut used = vec![false; nvars];
    for p in [a, b] {
        for (k, _) in p.terms() {
            for (i, e) in k.iter().enumerate() {
                if *e != 0 {
                    used[i] = true;
                }
            }
        }
    }
    let used_vars: Vec<usize> = (0..nvars).filter(|&i| used[i]).collect();
    match used_vars.len() {
        0 => Laurent::one(nvars),
        1 => gcd_effectively_univariate(a, b, used_vars[0]),
        _ => gcd_bivariate(a, b, 1),
    }
}

/// Euclid over the field Q(i) for polynomials involving a single variable.
fn gcd_effectively_univariate(a: &Laurent, b: &Laurent, var: usize) -> Laurent {
    let mut p = a.clone();
    let mut q = b.clone();
    while !q.is_zero() {
        let r = rem_univariate(&p, &q, var);
        p = q;
        q = r;
    }
    p.monic()
}

/// Remainder of univariate division over Q(i) (both involve only `var`).
fn rem_univariate(p: &Laurent, q: &Laurent, var: usize) -> Laurent {
    let nvars = p.nvars();
    let dq = q.degree_in(var).unwrap();
    let lc_q = coeff_of(q, var, dq);
    let lc_q_inv = lc_q.constant_value().unwrap().inv();
    let mut rem = p.clone();
    loop {
        let dr = match rem.degree_in(var) {
            Some(d) if !rem.is_zero() => d,
            _ => return rem,
        };
        if rem.is_zero() || dr < dq {
            return rem;
        }
        let lc_r = coeff_of(&rem, var, dr).constant_value().unwrap().clone();
        let mut k = vec![0i64; nvars];
        k[var] = dr - dq;
        let t = Laurent::monomial(nvars, &k, lc_r.mul(&lc_q_inv));
        rem = rem.sub(&t.mul(q));
    }
}

/// Coefficient of `var^deg` in `p`, as a polynomial in the other variables.
fn coeff_of(p: &Laurent, var: usize, deg: i64) -> Laurent {
    let nvars = p.nvars();
    let mut out = Laurent::zero(nvars);
    for (k, c) in p.terms() {
        if k[var] == deg {
            let mut nk = k.clone();
            nk[var] = 0;
            out = out.add(&Laurent::monomial(nvars, &nk, c.clone()));
        }
    }
    out
}

/// Coefficient vector of `p` in `var`, index = degree.
fn coeff_vec(p: &Laurent, var: usize) -> Vec<Laurent> {
    let deg = p.degree_in(var).unwrap_or(0);
    (0..=deg).map(|d| coeff_of(p, var, d)).collect()
}

/// Content of `p` in the main variable: GCD of its coefficient polynomials.
fn content(p: &Laurent, main: usize, other: usize) -> Laurent {
    let coeffs: Vec<Laurent> = coeff_vec(p, main).into_iter().filter(|c| !c.is_zero()).collect();
    let mut g = coeffs[0].clone();
    for c in &coeffs[1..] {
        g = gcd_effectively_univariate(&g, c, other);
        if g.is_constant() {
            return Laurent::one(p.nvars());
        }
    }
    g.monic()
}

fn primitive_part(p: &Laurent, main: usize, other: usize) -> Laurent {
    let c = content(p, main, other);
    p.divide_exact(&c).expect("content divides")
}

/// Bivariate GCD via content / primitive-part recursion with a primitive
/// pseudo-remainder sequence in the main variable.
fn gcd_bivariate(a: &Laurent, b: &Laurent, main: usize) -> Laurent {
    let other = 1 - main;
    let da = a.degree_in(main).unwrap_or(0);
    let db = b.degree_in(main).unwrap_or(0);
    if da == 0 {
        return gcd_effectively_univariate(a, &content(b, main, other), other);
    }
    if db == 0 {
        return gcd_effectively_univariate(b, &content(a, main, other), other);
    }
    let content_gcd = gcd_effectively_univariate(&content(a, main, other), &content(b, main, other), other);
    let mut p = primitive_part(a, main, other);
    let mut q = primitive_part(b, main, other);
    if p.degree_in(main) < q.degree_in(main) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = pseudo_rem(&p, &q, main);
        if r.is_zero() {
            return content_gcd.mul(&primitive_part(&q, main, other)).monic();
        }
        if r.degree_in(main) == Some(0) {
            return content_gcd;
        }
        p = q;
        q = primitive_part(&r, main, other);
    }
}

/// Pseudo-remainder: `lc(q)^(deg p - deg q + 1) * p  mod  q` in `main`.
fn pseudo_rem(p: &Laurent, q: &Laurent, main: usize) -> Laurent {
    let dq = q.degree_in(main).unwrap();
    let lc_q = coeff_of(q, main, dq);
    let mut rem = p.clone();
    loop {
        if rem.is_zero() {
            return rem;
        }
        let dr = rem.degree_in(main).unwrap();
        if dr < dq {
            return rem;
        }
        let lc_r = coeff_of(&rem, main, dr);
        let mut k = vec![0i64; p.nvars()];
        k[main] = dr - dq;
        let shift = Laurent::monomial(p.nvars(), &k, Gaussian::one());
        // rem <- lc(q) * rem - lc(rem) * z^(dr-dq) * q
        rem = rem.mul(&lc_q).sub(&lc_r.mul(&shift).mul(q));
    }
}

/// Sylvester resultant of two normalized bivariate polynomials, eliminating
/// `var`. Zero iff the operands share a factor of positive degree in `var`.
pub fn resultant(p: &Laurent, q: &Laurent, var: usize) -> Result<Laurent, Error> {
    let nvars = p.nvars();
    if nvars != 2 {
        return Err(Error::ResultantDimension { nvars });
    }
    let dp = p.degree_in(var).unwrap_or(0) as usize;
    let dq = q.degree_in(var).unwrap_or(0) as usize;
    if dp == 0 || dq == 0 {
        return Err(Error::DegreeZero { var });
    }
    let pc = coeff_vec(p, var);
    let qc = coeff_vec(q, var);
    let n = dp + dq;
    let mut m = vec![vec![Laurent::zero(nvars); n]; n];
    // dq rows of p's coefficients, then dp rows of q's, highest degree first.
    for (r, row) in m.iter_mut().take(dq).enumerate() {
        for (j, c) in pc.iter().rev().enumerate() {
            row[r + j] = c.clone();
        }
    }
    for (r, row) in m.iter_mut().skip(dq).take(dp).enumerate() {
        for (j, c) in qc.iter().rev().enumerate() {
            row[r + j] = c.clone();
        }
    }
    Ok(crate::polymatrix::determinant(&m))
}

/// Root set of an effectively univariate polynomial: exact Gaussian-rational
/// roots stripped first, remaining roots from companion-matrix eigenvalues.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub exact: Vec<Gaussian>,
    pub numeric: Vec<Complex64>,
}

impl RootSet {
    pub fn all_exact(&self) -> bool {
        self.numeric.is_empty()
    }

    pub fn as_complex(&self) -> Vec<Complex64> {
        self.exact
            .iter()
            .map(|g| g.to_complex())
            .chain(self.numeric.iter().copied())
            .collect()
    }
}

/// Roots (in C_*) of a polynomial involving only `var`. Roots at 0 are
/// discarded by the monomial normalization.
pub fn univariate_roots(p: &Laurent, var: usize) -> Result<RootSet, Error> {
    let (mut f, _) = p.monomial_normalize()?;
    let nvars = f.nvars();
    let mut exact = Vec::new();

    // Candidate exact roots: the obvious fourth roots of unity, plus rational
    // candidates when the coefficients are real rational.
    let mut candidates: Vec<Gaussian> = vec![
        Gaussian::from_int(1),
        Gaussian::from_int(-1),
        Gaussian::i(),
        Gaussian::i().neg(),
    ];
    candidates.extend(rational_candidates(&f, var));

    for cand in candidates {
        loop {
            if f.degree_in(var).unwrap_or(0) == 0 {
                break;
            }
            let mut point = vec![Gaussian::from_int(1); nvars];
            point[var] = cand.clone();
            if !f.eval_exact(&point).is_zero() {
                break;
            }
            let mut k = vec![0i64; nvars];
            k[var] = 1;
            let linear = Laurent::monomial(nvars, &k, Gaussian::one())
                .sub(&Laurent::constant(nvars, cand.clone()));
            f = f.divide_exact(&linear).expect("verified root divides");
            exact.push(cand.clone());
        }
    }

    let numeric = if f.degree_in(var).unwrap_or(0) > 0 {
        let coeffs: Vec<Complex64> = coeff_vec(&f, var)
            .iter()
            .map(|c| c.constant_value().map(|g| g.to_complex()).unwrap_or_default())
            .collect();
        complex_poly_roots(&coeffs)
    } else {
        Vec::new()
    };
    Ok(RootSet { exact, numeric })
}

/// Rational-root-theorem candidates for a polynomial with real rational
/// coefficients; empty when coefficients are complex or too large to factor.
fn rational_candidates(f: &Laurent, var: usize) -> Vec<Gaussian> {
    let coeffs = coeff_vec(f, var);
    let mut rats: Vec<BigRational> = Vec::new();
    for c in &coeffs {
        match c.constant_value() {
            Some(g) if g.im.is_zero() => rats.push(g.re.clone()),
            Some(_) => return Vec::new(),
            None if c.is_zero() => rats.push(BigRational::zero()),
            None => return Vec::new(),
        }
    }
    let lead = match rats.last() {
        Some(l) if !l.is_zero() => l,
        _ => return Vec::new(),
    };
    let cons = match rats.first() {
        Some(c) if !c.is_zero() => c,
        _ => return Vec::new(),
    };
    // Clear denominators: integer poly with constant c0 and leading cn.
    let mut denom_lcm = BigInt::one();
    for r in &rats {
        denom_lcm = num::integer::lcm(denom_lcm, r.denom().clone());
    }
    let c0 = (cons * BigRational::from_integer(denom_lcm.clone())).to_integer().abs();
    let cn = (lead * BigRational::from_integer(denom_lcm)).to_integer().abs();
    let limit = BigInt::from(1_000_000u64);
    if c0 > limit || cn > limit {
        return Vec::new();
    }
    let mut out = Vec::new();
    for p in divisors(&c0) {
        for q in divisors(&cn) {
            let r = BigRational::new(p.clone(), q.clone());
            out.push(Gaussian::from_rational(r.clone()));
            out.push(Gaussian::from_rational(-r));
        }
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n: u64 = n.to_string().parse().unwrap_or(0);
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d != n / d {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// Roots of a complex-coefficient polynomial via companion-matrix
/// eigenvalues. `coeffs[j]` is the coefficient of degree j.
pub fn complex_poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    // Trim leading (near-)zeros relative to the largest coefficient.
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = m.schur();
    let (_, t) = schur.unpack();
    (0..deg).map(|i| t[(i, i)]).collect()
}
