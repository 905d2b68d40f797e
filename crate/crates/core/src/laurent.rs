//! Exact multivariate Laurent polynomials over the Gaussian rationals.
//!
//! Exponents may be negative; `monomial_normalize` recovers an ordinary
//! polynomial together with the monomial shift that was factored out.

use crate::error::Error;
use crate::rational::Gaussian;
use num::complex::Complex64;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A Laurent polynomial in `nvars` variables, stored as a sparse term map.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Laurent {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Gaussian>,
}

impl Laurent {
    pub fn zero(nvars: usize) -> Self {
        Laurent {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Gaussian) -> Self {
        let mut p = Laurent::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Laurent::constant(nvars, Gaussian::one())
    }

    /// The monomial `c * z^k`.
    pub fn monomial(nvars: usize, k: &[i64], c: Gaussian) -> Self {
        assert_eq!(k.len(), nvars);
        let mut p = Laurent::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(k.to_vec(), c);
        }
        p
    }

    /// The coordinate variable `z_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut k = vec![0i64; nvars];
        k[i] = 1;
        Laurent::monomial(nvars, &k, Gaussian::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Gaussian)> {
        self.terms.iter()
    }

    /// A unit of the Laurent ring: a single term `c * z^k`, `c != 0`.
    pub fn is_monomial_unit(&self) -> bool {
        self.terms.len() == 1
    }

    /// A nonzero constant (unit of the polynomial ring).
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(|&e| e == 0))
    }

    pub fn constant_value(&self) -> Option<&Gaussian> {
        if self.terms.len() == 1 {
            let (k, c) = self.terms.iter().next().unwrap();
            if k.iter().all(|&e| e == 0) {
                return Some(c);
            }
        }
        None
    }

    fn insert_term(&mut self, k: Vec<i64>, c: Gaussian) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Laurent {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.clone().neg();
        }
        out
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Laurent::zero(self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k: Vec<i64> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.insert_term(k, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Gaussian) -> Laurent {
        if c.is_zero() {
            return Laurent::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Multiply by the monomial `z^k`.
    pub fn shift(&self, k: &[i64]) -> Laurent {
        assert_eq!(k.len(), self.nvars);
        let mut out = Laurent::zero(self.nvars);
        for (e, c) in &self.terms {
            let ne: Vec<i64> = e.iter().zip(k).map(|(a, b)| a + b).collect();
            out.terms.insert(ne, c.clone());
        }
        out
    }

    /// Evaluate at a point of `C_*^d`. Errors on a zero coordinate when a
    /// negative exponent would need it.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, Error> {
        assert_eq!(z.len(), self.nvars);
        for (i, zi) in z.iter().enumerate() {
            if zi.norm_sqr() == 0.0 {
                return Err(Error::ZeroEvaluationPoint { var: i });
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut t = c.to_complex();
            for (e, zi) in k.iter().zip(z) {
                t *= zi.powi(*e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact evaluation at a Gaussian-rational point. Coordinates hit by a
    /// negative exponent must be nonzero.
    pub fn eval_exact(&self, z: &[Gaussian]) -> Gaussian {
        assert_eq!(z.len(), self.nvars);
        let mut acc = Gaussian::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (e, zi) in k.iter().zip(z) {
                if *e == 0 {
                    continue;
                }
                let base = if *e < 0 { zi.inv() } else { zi.clone() };
                for _ in 0..e.unsigned_abs() {
                    t *= &base;
                }
            }
            acc += &t;
        }
        acc
    }

    /// Minimum exponent per variable over all terms.
    pub fn min_exponents(&self) -> Option<Vec<i64>> {
        if self.is_zero() {
            return None;
        }
        let mut min = vec![i64::MAX; self.nvars];
        for k in self.terms.keys() {
            for (m, e) in min.iter_mut().zip(k) {
                *m = (*m).min(*e);
            }
        }
        Some(min)
    }

    /// Maximum exponent (degree) in variable `var`; None for the zero poly.
    pub fn degree_in(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|k| k[var]).max()
    }

    /// Factor out the largest monomial so that the quotient has nonnegative
    /// exponents with at least one zero exponent per variable.
    ///
    /// Returns `(q, k)` with `self = z^{-k} * q`.
    pub fn monomial_normalize(&self) -> Result<(Laurent, Vec<i64>), Error> {
        let min = self.min_exponents().ok_or(Error::ZeroPolynomial)?;
        let shift: Vec<i64> = min.iter().map(|m| -m).collect();
        Ok((self.shift(&shift), shift))
    }

    /// Leading term in lexicographic exponent order.
    pub fn leading(&self) -> Option<(&Vec<i64>, &Gaussian)> {
        self.terms.iter().next_back()
    }

    /// Scale so the lexicographic leading coefficient is 1.
    pub fn monic(&self) -> Laurent {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv()),
        }
    }

    /// Exact division: returns `Some(self / divisor)` when the division is
    /// exact in the Laurent ring, `None` otherwise.
    ///
    /// Both operands are monomial-normalized first; exactness up to monomial
    /// units is what matters in the Laurent ring.
    pub fn divide_exact(&self, divisor: &Laurent) -> Option<Laurent> {
        assert_eq!(self.nvars, divisor.nvars);
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Laurent::zero(self.nvars));
        }
        let (p, kp) = self.monomial_normalize().unwrap();
        let (d, kd) = divisor.monomial_normalize().unwrap();
        let q = p.poly_divide_exact(&d)?;
        // self = z^{-kp} p, divisor = z^{-kd} d, so self/divisor = z^{kd-kp} q.
        let shift: Vec<i64> = kd.iter().zip(&kp).map(|(a, b)| a - b).collect();
        Some(q.shift(&shift))
    }

    /// Exact polynomial division (nonnegative exponents assumed).
    fn poly_divide_exact(&self, divisor: &Laurent) -> Option<Laurent> {
        let mut rem = self.clone();
        let mut quot = Laurent::zero(self.nvars);
        let (dk, dc) = divisor.leading().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        let dc_inv = dc.inv();
        while !rem.is_zero() {
            let (rk, rc) = rem.leading().map(|(k, c)| (k.clone(), c.clone())).unwrap();
            // Exact quotients have polynomial leading terms at every step.
            if rk.iter().zip(&dk).any(|(a, b)| a < b) {
                return None;
            }
            let qk: Vec<i64> = rk.iter().zip(&dk).map(|(a, b)| a - b).collect();
            let t = Laurent::monomial(self.nvars, &qk, rc.mul(&dc_inv));
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k.iter().all(|&e| e == 0) {
                write!(f, "{c}")?;
                continue;
            }
            if !c.is_one() {
                write!(f, "{c}*")?;
            }
            let mut started = false;
            for (i, e) in k.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                if started {
                    write!(f, "*")?;
                }
                started = true;
                if *e == 1 {
                    write!(f, "z{}", i + 1)?;
                } else {
                    write!(f, "z{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Gaussian;

    fn g(n: i64) -> Gaussian {
        Gaussian::from_int(n)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 1 - z_i in `nvars` variables.
    fn one_minus(nvars: usize, i: usize) -> Laurent {
        Laurent::one(nvars).sub(&Laurent::var(nvars, i))
    }

    #[test]
    fn eval_examples() {
        let p = one_minus(2, 0);
        assert_eq!(p.eval(&[c(1.0, 0.0), c(5.0, 0.0)]).unwrap(), c(0.0, 0.0));

        let pq = one_minus(2, 0).mul(&one_minus(2, 1));
        assert_eq!(pq.eval(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap(), c(2.0, 0.0));

        let inv = Laurent::monomial(2, &[-1, 0], g(1));
        assert_eq!(inv.eval(&[c(2.0, 0.0), c(1.0, 0.0)]).unwrap(), c(0.5, 0.0));
        assert!(inv.eval(&[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn normalize_examples() {
        // z1^{-1}(1 - z1) -> q = 1 - z1 with shift (1,0)
        let p = Laurent::monomial(2, &[-1, 0], g(1)).mul(&one_minus(2, 0));
        let (q, k) = p.monomial_normalize().unwrap();
        assert_eq!(k, vec![1, 0]);
        assert_eq!(q, one_minus(2, 0));

        let p = one_minus(2, 1);
        let (q, k) = p.monomial_normalize().unwrap();
        assert_eq!(k, vec![0, 0]);
        assert_eq!(q, one_minus(2, 1));

        // z1*z2 -> q = 1 with shift (-1,-1)
        let p = Laurent::monomial(2, &[1, 1], g(1));
        let (q, k) = p.monomial_normalize().unwrap();
        assert_eq!(k, vec![-1, -1]);
        assert_eq!(q, Laurent::one(2));

        assert!(Laurent::zero(2).monomial_normalize().is_err());
    }

    #[test]
    fn normalize_round_trip() {
        let p = Laurent::monomial(2, &[-2, 3], g(5))
            .add(&Laurent::monomial(2, &[1, -1], Gaussian::i()));
        let (q, k) = p.monomial_normalize().unwrap();
        let neg_k: Vec<i64> = k.iter().map(|e| -e).collect();
        assert_eq!(q.shift(&neg_k), p);
    }

    #[test]
    fn exact_division() {
        let a = one_minus(2, 0);
        let b = one_minus(2, 1);
        let prod = a.mul(&b);
        assert_eq!(prod.divide_exact(&a).unwrap(), b);
        assert_eq!(prod.divide_exact(&b).unwrap(), a);
        assert!(b.divide_exact(&a).is_none());
    }

    proptest::proptest! {
        #[test]
        fn product_division_round_trips(
            terms_a in proptest::collection::vec(((-3i64..=3, -3i64..=3), -5i64..=5), 1..4),
            terms_b in proptest::collection::vec(((-3i64..=3, -3i64..=3), -5i64..=5), 1..4),
        ) {
            let build = |terms: &[((i64, i64), i64)]| {
                let mut p = Laurent::zero(2);
                for &((k1, k2), c) in terms {
                    p = p.add(&Laurent::monomial(2, &[k1, k2], g(c)));
                }
                p
            };
            let a = build(&terms_a);
            let b = build(&terms_b);
            proptest::prop_assume!(!a.is_zero() && !b.is_zero());
            let prod = a.mul(&b);
            proptest::prop_assert_eq!(prod.divide_exact(&a), Some(b.clone()));
            proptest::prop_assert_eq!(prod.divide_exact(&b), Some(a));
        }

        #[test]
        fn shift_is_a_ring_map(
            k1 in -4i64..=4,
            k2 in -4i64..=4,
            c in -5i64..=5,
        ) {
            let p = one_minus(2, 0).add(&Laurent::monomial(2, &[1, -1], g(c)));
            let q = one_minus(2, 1);
            let k = [k1, k2];
            proptest::prop_assert_eq!(p.add(&q).shift(&k), p.shift(&k).add(&q.shift(&k)));
            proptest::prop_assert_eq!(
                p.mul(&q).shift(&k),
                p.shift(&k).mul(&q.shift(&k)).shift(&[-k1, -k2])
            );
        }
    }
}
