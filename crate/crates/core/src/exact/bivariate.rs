//! Common-factor detection for two-variable polynomials over `F_p`.
//!
//! A polynomial in `F_p[u1, u2]` is viewed as a polynomial in `u2` with
//! coefficients in `F_p[u1]`. Two inputs share a nonunit factor iff their
//! `u2`-contents share a factor (a polynomial in `u1` alone), or their
//! primitive parts share a factor of positive `u2`-degree, which happens iff
//! the resultant `Res_u2` of the primitive parts vanishes identically.
//! The latter is also computed by a primitive remainder sequence; the two
//! routes must agree.

use serde::{Deserialize, Serialize};

use super::fp::FpPoly;
use super::laurent::{laurent_gcd_1d, LaurentPoly};
use crate::error::{ExactError, ExactResult};

type BiPoly = Vec<FpPoly>;

fn trim(mut a: BiPoly) -> BiPoly {
    while a.last().is_some_and(FpPoly::is_zero) {
        a.pop();
    }
    a
}

fn bideg(a: &BiPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

/// Monic gcd (in `u1`) of the `u2`-coefficients.
pub fn content_u2(coeffs: &[FpPoly], p: u64) -> FpPoly {
    coeffs.iter().fold(FpPoly::zero(p), |acc, c| acc.gcd(c))
}

fn primitive_part(a: &BiPoly, p: u64) -> BiPoly {
    let c = content_u2(a, p);
    if c.is_zero() {
        return a.clone();
    }
    trim(a.iter().map(|x| x.exact_div(&c).expect("content divides")).collect())
}

/// Pseudo-remainder of `a` by `b` in `F_p[u1][u2]`.
fn pseudo_rem(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = bideg(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r = a.clone();
    while let Some(dr) = bideg(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: BiPoly = r.iter().map(|x| x.mul(&lb)).collect();
        for (j, bj) in b.iter().enumerate() {
            next[j + shift] = next[j + shift].sub(&bj.mul(&lr));
        }
        r = trim(next);
    }
    r
}

/// gcd of two `u2`-primitive polynomials by the primitive remainder sequence;
/// returns `[1]` when they share no factor of positive `u2`-degree.
fn primitive_prs_gcd(a: &BiPoly, b: &BiPoly, p: u64) -> BiPoly {
    let (mut a, mut b) = if bideg(a) >= bideg(b) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    loop {
        if bideg(&b).is_none() {
            return a;
        }
        if bideg(&b) == Some(0) {
            return vec![FpPoly::one(p)];
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        b = primitive_part(&r, p);
    }
}

/// Element of the rational function field `F_p(u1)`, reduced, monic denominator.
#[derive(Clone, Debug, PartialEq)]
struct RatFn {
    num: FpPoly,
    den: FpPoly,
}

impl RatFn {
    fn new(num: FpPoly, den: FpPoly) -> Self {
        let p = num.modulus();
        if num.is_zero() {
            return RatFn { num, den: FpPoly::one(p) };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap());
        let lead = d.leading();
        let inv = super::fp::inv_mod(lead, p);
        n = n.scale(inv);
        d = d.scale(inv);
        RatFn { num: n, den: d }
    }

    fn poly(f: FpPoly) -> Self {
        let p = f.modulus();
        RatFn { num: f, den: FpPoly::one(p) }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    fn sub(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).sub(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    fn div(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::poly(FpPoly::one(self.num.modulus())), |acc, _| acc.mul(self))
    }

    fn neg(&self) -> Self {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }
}

fn field_rem(a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let q = r[dr].div(lb);
        for (j, bj) in b.iter().enumerate() {
            r[j + dr - db] = r[j + dr - db].sub(&q.mul(bj));
        }
        while r.last().is_some_and(RatFn::is_zero) {
            r.pop();
        }
    }
    r
}

/// `Res_u2(a, b)` computed by Euclid over `F_p(u1)`:
/// `Res(A, B) = (-1)^(mn) lc(B)^(m-k) Res(B, A mod B)`.
fn resultant_u2(a: &BiPoly, b: &BiPoly, p: u64) -> FpPoly {
    let mut a: Vec<RatFn> = a.iter().cloned().map(RatFn::poly).collect();
    let mut b: Vec<RatFn> = b.iter().cloned().map(RatFn::poly).collect();
    let mut acc = RatFn::poly(FpPoly::one(p));
    loop {
        if a.is_empty() || b.is_empty() {
            return FpPoly::zero(p);
        }
        let (m, n) = (a.len() - 1, b.len() - 1);
        if n == 0 {
            acc = acc.mul(&b[0].pow(m));
            break;
        }
        let r = field_rem(&a, &b);
        if r.is_empty() {
            return FpPoly::zero(p);
        }
        let k = r.len() - 1;
        let mut factor = b[n].pow(m - k);
        if (m * n) % 2 == 1 {
            factor = factor.neg();
        }
        acc = acc.mul(&factor);
        a = b;
        b = r;
    }
    assert!(acc.den.is_one(), "resultant of polynomials is a polynomial");
    acc.num
}

/// Which variable the shared factor involves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessVariable {
    /// A factor that is a polynomial in `u1` alone (found through contents).
    U1,
    /// A factor of positive `u2`-degree (found through the resultant).
    U2,
}

/// Outcome of [`bivar_common_factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonFactor {
    /// gcd of the `u2`-contents, a monic polynomial in `u1`.
    pub content_gcd: FpPoly,
    /// `Res_u2` of the primitive parts; identically zero iff they share a
    /// factor of positive `u2`-degree.
    pub resultant: FpPoly,
    /// Greatest common divisor up to a unit, normalized.
    pub gcd: LaurentPoly,
    pub witness: Option<WitnessVariable>,
}

impl CommonFactor {
    pub fn exists(&self) -> bool {
        self.witness.is_some()
    }
}

/// Decides whether two nonzero two-variable Laurent polynomials share a
/// nonunit factor.
pub fn bivar_common_factor(f: &LaurentPoly, g: &LaurentPoly) -> ExactResult<CommonFactor> {
    if f.modulus() != g.modulus() {
        return Err(ExactError::ModulusMismatch { left: f.modulus(), right: g.modulus() });
    }
    if f.nvars() != 2 || g.nvars() != 2 {
        return Err(ExactError::Domain(format!(
            "bivar_common_factor needs d = 2, got d = {} and d = {}",
            f.nvars(),
            g.nvars()
        )));
    }
    if f.is_zero() || g.is_zero() {
        return Err(ExactError::Domain("bivar_common_factor needs nonzero inputs".into()));
    }
    let p = f.modulus();
    let fb = f.to_bivariate();
    let gb = g.to_bivariate();

    // contents: polynomials in u1, compared by the univariate gcd
    let cf = LaurentPoly::from_fp_poly(&content_u2(&fb, p));
    let cg = LaurentPoly::from_fp_poly(&content_u2(&gb, p));
    let content_gcd = laurent_gcd_1d(&cf, &cg)?.to_fp_poly();

    let pf = primitive_part(&fb, p);
    let pg = primitive_part(&gb, p);
    let (resultant, pp_gcd) = if bideg(&pf) == Some(0) || bideg(&pg) == Some(0) {
        // one side is free of u2: no factor of positive u2-degree
        (FpPoly::one(p), vec![FpPoly::one(p)])
    } else {
        (resultant_u2(&pf, &pg, p), primitive_prs_gcd(&pf, &pg, p))
    };
    let shares_u2 = bideg(&pp_gcd).unwrap_or(0) > 0;
    assert_eq!(
        resultant.is_zero(),
        shares_u2,
        "resultant and remainder-sequence routes disagree on {f} and {g}"
    );

    let gcd = LaurentPoly::from_bivariate(p, std::slice::from_ref(&content_gcd))
        .mul(&LaurentPoly::from_bivariate(p, &pp_gcd))
        .normalized();
    let witness = if shares_u2 {
        Some(WitnessVariable::U2)
    } else if !content_gcd.is_unit() {
        Some(WitnessVariable::U1)
    } else {
        None
    };
    Ok(CommonFactor { content_gcd, resultant, gcd, witness })
}
