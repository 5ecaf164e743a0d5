//! Sparse Laurent polynomials over `F_p` in one or two variables.
//!
//! Monomials are units of the Laurent ring, so divisibility questions are
//! answered on the canonical representative: the associate with every
//! variable's minimal exponent equal to zero.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::fp::{inv_mod, is_prime, mul_mod, residue, FpPoly};
use crate::error::{ExactError, ExactResult};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    p: u64,
    nvars: usize,
    terms: BTreeMap<Vec<i64>, u64>,
}

/// Graded lexicographic comparison of exponent vectors.
pub fn grlex(a: &[i64], b: &[i64]) -> Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl LaurentPoly {
    pub fn zero(p: u64, nvars: usize) -> Self {
        LaurentPoly { p, nvars, terms: BTreeMap::new() }
    }

    pub fn monomial(p: u64, exponents: Vec<i64>, coeff: i64) -> Self {
        let nvars = exponents.len();
        let mut out = Self::zero(p, nvars);
        out.add_term(exponents, residue(coeff, p));
        out
    }

    pub fn one(p: u64, nvars: usize) -> Self {
        Self::monomial(p, vec![0; nvars], 1)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms(
        p: u64,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<i64>, i64)>,
    ) -> ExactResult<Self> {
        if !is_prime(p) {
            return Err(ExactError::Domain(format!("modulus {p} is not prime")));
        }
        let mut out = Self::zero(p, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(ExactError::VariableMismatch { left: nvars, right: e.len() });
            }
            out.add_term(e, residue(c, p));
        }
        Ok(out)
    }

    /// `u^(k n) - 1`.
    pub fn u_pow_minus_one(p: u64, n: &[i64], k: i64) -> Self {
        let e: Vec<i64> = n.iter().map(|x| x * k).collect();
        let mut out = Self::monomial(p, e, 1);
        out.add_term(vec![0; n.len()], p - 1);
        out
    }

    pub fn from_fp_poly(f: &FpPoly) -> Self {
        let mut out = Self::zero(f.modulus(), 1);
        for (i, &c) in f.coeffs().iter().enumerate() {
            out.add_term(vec![i as i64], c);
        }
        out
    }

    fn add_term(&mut self, e: Vec<i64>, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let p = self.p;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = (*o.get() + c) % p;
                if sum == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &u64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Units of the Laurent ring are exactly the nonzero monomials.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn coeff(&self, e: &[i64]) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    fn check_compatible(&self, o: &Self) -> ExactResult<()> {
        if self.p != o.p {
            return Err(ExactError::ModulusMismatch { left: self.p, right: o.p });
        }
        if self.nvars != o.nvars {
            return Err(ExactError::VariableMismatch { left: self.nvars, right: o.nvars });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert!(self.check_compatible(o).is_ok());
        let mut out = self.clone();
        for (e, &c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        LaurentPoly { p, nvars: self.nvars, terms: self.terms.iter().map(|(e, &c)| (e.clone(), p - c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = Self::zero(self.p, self.nvars);
        for (e, &x) in &self.terms {
            out.add_term(e.clone(), mul_mod(x, c, self.p));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert!(self.check_compatible(o).is_ok());
        let mut out = Self::zero(self.p, self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, mul_mod(ca, cb, self.p));
            }
        }
        out
    }

    /// Multiplies by the monomial `u^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        LaurentPoly {
            p: self.p,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (e.iter().zip(shift).map(|(x, s)| x + s).collect(), c))
                .collect(),
        }
    }

    pub fn min_exponents(&self) -> Vec<i64> {
        (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).min().unwrap_or(0))
            .collect()
    }

    pub fn max_exponents(&self) -> Vec<i64> {
        (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect()
    }

    /// Returns `(s, c)` with `self = u^s * c` and `c` canonical.
    pub fn canonical_shift(&self) -> (Vec<i64>, Self) {
        let s = self.min_exponents();
        let neg: Vec<i64> = s.iter().map(|x| -x).collect();
        (s, self.shift(&neg))
    }

    pub fn canonical(&self) -> Self {
        self.canonical_shift().1
    }

    pub fn is_canonical(&self) -> bool {
        self.min_exponents().iter().all(|&m| m == 0)
    }

    /// Canonical associate scaled so its grlex-leading coefficient is 1.
    pub fn normalized(&self) -> Self {
        let c = self.canonical();
        match c.leading_term() {
            Some((_, lc)) => c.scale(inv_mod(lc, self.p)),
            None => c,
        }
    }

    /// Degree span in variable `var` (`max - min` exponent).
    pub fn degree_in(&self, var: usize) -> i64 {
        if self.is_zero() {
            return 0;
        }
        self.max_exponents()[var] - self.min_exponents()[var]
    }

    /// Total degree of the canonical representative.
    pub fn total_degree(&self) -> i64 {
        let c = self.canonical();
        c.terms.keys().map(|e| e.iter().sum::<i64>()).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(Vec<i64>, u64)> {
        self.terms.iter().max_by(|a, b| grlex(a.0, b.0)).map(|(e, &c)| (e.clone(), c))
    }

    /// Monomial change of variables `u^e -> u^(M e)` for an integer matrix
    /// `m` (a ring automorphism when `m` is unimodular).
    pub fn substitute(&self, m: &[Vec<i64>]) -> Self {
        let mut out = Self::zero(self.p, self.nvars);
        for (e, &c) in &self.terms {
            let image = m.iter().map(|row| row.iter().zip(e).map(|(a, b)| a * b).sum()).collect();
            out.add_term(image, c);
        }
        out
    }

    pub fn swap_vars(&self) -> Self {
        assert_eq!(self.nvars, 2);
        self.substitute(&[vec![0, 1], vec![1, 0]])
    }

    /// Univariate view of a canonical one-variable polynomial.
    pub fn to_fp_poly(&self) -> FpPoly {
        assert_eq!(self.nvars, 1);
        let c = self.canonical();
        let deg = c.max_exponents()[0].max(0) as usize;
        let mut coeffs = vec![0u64; deg + 1];
        for (e, &x) in &c.terms {
            coeffs[e[0] as usize] = x;
        }
        FpPoly::new(self.p, coeffs)
    }

    /// Dense view of a canonical two-variable polynomial as a polynomial
    /// in `u2` whose coefficients are polynomials in `u1`.
    pub fn to_bivariate(&self) -> Vec<FpPoly> {
        assert_eq!(self.nvars, 2);
        let c = self.canonical();
        let d2 = c.max_exponents()[1].max(0) as usize;
        let mut rows: Vec<Vec<u64>> = vec![Vec::new(); d2 + 1];
        for (e, &x) in &c.terms {
            let row = &mut rows[e[1] as usize];
            let i = e[0] as usize;
            if row.len() <= i {
                row.resize(i + 1, 0);
            }
            row[i] = x;
        }
        rows.into_iter().map(|r| FpPoly::new(self.p, r)).collect()
    }

    pub fn from_bivariate(p: u64, coeffs: &[FpPoly]) -> Self {
        let mut out = Self::zero(p, 2);
        for (j, c) in coeffs.iter().enumerate() {
            for (i, &x) in c.coeffs().iter().enumerate() {
                out.add_term(vec![i as i64, j as i64], x);
            }
        }
        out
    }

    /// Embeds a polynomial in `u1` into two variables.
    pub fn from_fp_poly_in_u1(f: &FpPoly) -> Self {
        Self::from_bivariate(f.modulus(), std::slice::from_ref(f))
    }
}

/// Exact division in the Laurent ring: `Some(q)` with `h = q * g`, or
/// `None` when `g` does not divide `h`.
///
/// Both sides are moved to canonical polynomial representatives and divided
/// with graded-lex leading terms. A leading term of the remainder that the
/// divisor's leading term does not divide proves non-divisibility, since
/// `LT(q g) = LT(q) LT(g)`.
pub fn laurent_divides(g: &LaurentPoly, h: &LaurentPoly) -> ExactResult<Option<LaurentPoly>> {
    g.check_compatible(h)?;
    if g.is_zero() {
        return Err(ExactError::Domain("division by the zero Laurent polynomial".into()));
    }
    let (p, n) = (g.p, g.nvars);
    if h.is_zero() {
        return Ok(Some(LaurentPoly::zero(p, n)));
    }
    let (sg, gc) = g.canonical_shift();
    let (sh, mut rem) = h.canonical_shift();
    let (lg, lc) = gc.leading_term().expect("nonzero");
    let lc_inv = inv_mod(lc, p);
    let mut quot = LaurentPoly::zero(p, n);
    while let Some((lr, c)) = rem.leading_term() {
        if lr.iter().zip(&lg).any(|(a, b)| a < b) {
            return Ok(None);
        }
        let e: Vec<i64> = lr.iter().zip(&lg).map(|(a, b)| a - b).collect();
        let t = LaurentPoly::monomial(p, e, mul_mod(c, lc_inv, p) as i64);
        rem = rem.sub(&t.mul(&gc));
        quot = quot.add(&t);
    }
    let shift: Vec<i64> = sh.iter().zip(&sg).map(|(a, b)| a - b).collect();
    Ok(Some(quot.shift(&shift)))
}

/// Monic univariate gcd of two one-variable Laurent polynomials.
pub fn laurent_gcd_1d(f: &LaurentPoly, g: &LaurentPoly) -> ExactResult<LaurentPoly> {
    f.check_compatible(g)?;
    if f.nvars != 1 {
        return Err(ExactError::Domain(format!("laurent_gcd_1d needs d = 1, got d = {}", f.nvars)));
    }
    if f.is_zero() && g.is_zero() {
        return Err(ExactError::Domain("gcd of two zero polynomials".into()));
    }
    let a = f.to_fp_poly();
    let b = g.to_fp_poly();
    Ok(LaurentPoly::from_fp_poly(&a.gcd(&b)))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Vec<i64>, &u64)> = self.terms.iter().collect();
        terms.sort_by(|a, b| grlex(a.0, b.0));
        for (k, (e, &c)) in terms.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| {
                    let name = if self.nvars == 1 { "u".to_string() } else { format!("u{}", i + 1) };
                    if x == 1 {
                        name
                    } else {
                        format!("{name}^{x}")
                    }
                })
                .collect();
            match (c, vars.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                _ => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over F_{}", self.p)
    }
}

/// One stored term: exponent vector and coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<i64>,
    pub coefficient: i64,
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    p: u64,
    d: usize,
    terms: Vec<Term>,
}

impl LaurentPoly {
    pub fn term_list(&self) -> Vec<Term> {
        let mut terms: Vec<(&Vec<i64>, &u64)> = self.terms.iter().collect();
        terms.sort_by(|a, b| grlex(a.0, b.0));
        terms
            .into_iter()
            .map(|(e, &c)| Term { exponents: e.clone(), coefficient: c as i64 })
            .collect()
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LaurentRepr { p: self.p, d: self.nvars, terms: self.term_list() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = LaurentRepr::deserialize(d)?;
        LaurentPoly::from_terms(r.p, r.d, r.terms.into_iter().map(|t| (t.exponents, t.coefficient)))
            .map_err(serde::de::Error::custom)
    }
}
