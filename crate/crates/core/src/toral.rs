//! Ergodicity and distality for commuting groups of toral and solenoidal
//! automorphisms.
//!
//! All computations run on dual matrices `D = (A^T)^{-1}` acting on
//! characters in `Q^r`. A character has a finite orbit under a single
//! matrix iff it lies in the kernel of a product of cyclotomic polynomials
//! evaluated at the matrix; the orders involved all satisfy `φ(d) ≤ r`, so
//! the uniform exponent `M*(r)` from [`m_star`] covers every case.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, MatrixAction};
use crate::exact::{
    char_poly, cyclotomic, cyclotomic_orders, euler_phi, kernel, m_star, poly_gcd,
    primitive_integer_vector, IntMatrix, IntPoly, RatMatrix, RatPoly, RationalSubspace,
};
use crate::oracle::{is_closed, orbit_exact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Ergodic,
    NotErgodic,
    Distal,
    NotDistal,
}

/// `Φ_order` dividing a characteristic polynomial `multiplicity` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclotomicFactor {
    pub order: u64,
    pub multiplicity: u32,
}

/// Evidence for a verdict, checkable with the exact layer alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// `gcd(char_poly, Φ_d) = 1` for every listed order `d`.
    NoRootOfUnityEigenvalue { matrix: RatMatrix, char_poly: RatPoly, orders: Vec<u64> },
    /// A nonzero character together with its whole orbit, closed under the
    /// acting matrices and their inverses.
    WitnessCharacter {
        acting: Vec<RatMatrix>,
        #[serde(with = "crate::exact::ratvec")]
        character: Vec<BigRational>,
        #[serde(with = "crate::exact::ratvecs")]
        orbit: Vec<Vec<BigRational>>,
    },
    /// `char_poly = ∏ Φ_d^m`.
    CyclotomicCharPoly { matrix: RatMatrix, char_poly: RatPoly, factors: Vec<CyclotomicFactor> },
    /// `char_poly = ∏ Φ_d^m · factor` with `factor` free of cyclotomic divisors.
    NonCyclotomicFactor {
        matrix: RatMatrix,
        char_poly: RatPoly,
        cyclotomic: Vec<CyclotomicFactor>,
        factor: RatPoly,
    },
    /// Squarefree cyclotomic parts `c_i = gcd(char_poly(D_i), x^M − 1)`
    /// whose kernels `ker c_i(D_i)` meet only in zero.
    NoFiniteOrbitCharacter { dim: usize, acting: Vec<RatMatrix>, cyclotomic_parts: Vec<RatPoly> },
    /// One distality verdict per generator.
    Generatorwise { verdicts: Vec<Verdict> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate replay failed: {0}")]
pub struct ReplayError(pub String);

fn check(cond: bool, what: &str) -> Result<(), ReplayError> {
    if cond {
        Ok(())
    } else {
        Err(ReplayError(what.to_string()))
    }
}

/// `M*(r)`, with `1` for the empty space.
pub fn exponent_bound(r: usize) -> u64 {
    if r == 0 {
        1
    } else {
        m_star(r).expect("m_star fits in u64 for practical dimensions")
    }
}

fn phi_poly(d: u64) -> RatPoly {
    RatPoly::from_int(&cyclotomic(d).expect("d >= 1"))
}

fn is_one(p: &RatPoly) -> bool {
    p.degree() == Some(0) && p.is_monic()
}

/// Splits a monic polynomial into its cyclotomic factors of order `d` with
/// `φ(d) ≤ r` and the remaining cofactor.
pub fn cyclotomic_decomposition(cp: &RatPoly, r: usize) -> (Vec<CyclotomicFactor>, RatPoly) {
    let mut rest = cp.clone();
    let mut factors = Vec::new();
    for d in cyclotomic_orders(r) {
        let phi = phi_poly(d);
        let mut multiplicity = 0;
        while let Some(q) = rest.exact_div(&phi) {
            rest = q;
            multiplicity += 1;
        }
        if multiplicity > 0 {
            factors.push(CyclotomicFactor { order: d, multiplicity });
        }
    }
    (factors, rest)
}

fn factors_product(factors: &[CyclotomicFactor]) -> RatPoly {
    factors
        .iter()
        .fold(RatPoly::one(), |acc, f| &acc * &phi_poly(f.order).pow(f.multiplicity))
}

/// `∏ Φ_d` over the cyclotomic divisors of `cp`, each once; equals
/// `gcd(cp, x^{M*} − 1)`.
fn squarefree_cyclotomic_part(cp: &RatPoly, r: usize) -> RatPoly {
    cyclotomic_orders(r)
        .into_iter()
        .map(phi_poly)
        .filter(|phi| phi.divides(cp))
        .fold(RatPoly::one(), |acc, phi| &acc * &phi)
}

const DET_PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % DET_PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn residue(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(DET_PRIME)).to_u64().expect("reduced")
}

/// `det(N^M − L^M I) mod q` for the prime `q = 2^61 − 1`.
fn det_residue(n: &IntMatrix, l: &BigInt, m: u64) -> u64 {
    let r = n.rows();
    let q = DET_PRIME;
    let mat_mul = |a: &[Vec<u64>], b: &[Vec<u64>]| -> Vec<Vec<u64>> {
        (0..r)
            .map(|i| (0..r).map(|j| (0..r).fold(0, |s, k| (s + mulmod(a[i][k], b[k][j])) % q)).collect())
            .collect()
    };
    let mut base: Vec<Vec<u64>> = (0..r).map(|i| (0..r).map(|j| residue(&n[(i, j)])).collect()).collect();
    let mut a: Vec<Vec<u64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as u64).collect()).collect();
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            a = mat_mul(&a, &base);
        }
        base = mat_mul(&base, &base);
        e >>= 1;
    }
    let lm = powmod(residue(l), m);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = (row[i] + q - lm) % q;
    }
    let mut det = 1;
    for c in 0..r {
        let Some(p) = (c..r).find(|&i| a[i][c] != 0) else {
            return 0;
        };
        if p != c {
            a.swap(p, c);
            det = (q - det) % q;
        }
        det = mulmod(det, a[c][c]);
        let inv = powmod(a[c][c], q - 2);
        let pivot = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            let f = mulmod(row[c], inv);
            for (x, &pv) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x = (*x + q - mulmod(f, pv)) % q;
            }
        }
    }
    det
}

/// `det(B^{M*} − I) ≠ 0`, evaluated over the integers after clearing
/// denominators: with `B = N / L` this is `det(N^M − L^M I) ≠ 0`. A
/// nonzero residue modulo a prime settles it; otherwise the determinant is
/// computed exactly.
pub fn det_route_nonzero(b: &RatMatrix) -> bool {
    let r = b.rows();
    if r == 0 {
        return true;
    }
    let m = exponent_bound(r);
    let (l, n) = b.clear_denominators();
    if det_residue(&n, &l, m) != 0 {
        return true;
    }
    let lm = num_traits::pow(l, m as usize);
    let mut p = n.pow(m);
    for i in 0..r {
        p[(i, i)] -= &lm;
    }
    !p.det().expect("square").is_zero()
}

fn x_pow_mod(e: u64, m: &IntPoly) -> IntPoly {
    let rem = |f: &IntPoly| f.div_rem_monic(m).1;
    let mut acc = rem(&IntPoly::one());
    let mut base = rem(&IntPoly::monomial(BigInt::from(1), 1));
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&(&acc * &base));
        }
        base = rem(&(&base * &base));
        e >>= 1;
    }
    acc
}

/// `cp | (x^{M*} − 1)^r`, the polynomial form of `(B^{M*} − I)^r = 0`.
/// A monic divisor of a monic integer polynomial is integral, so the
/// reduction runs over `Z`.
pub fn distal_route(cp: &RatPoly, r: usize) -> bool {
    if r == 0 {
        return true;
    }
    let Some(cp) = cp.to_int().filter(|c| c.is_monic()) else {
        return false;
    };
    let rem = |f: &IntPoly| f.div_rem_monic(&cp).1;
    let h = rem(&(&x_pow_mod(exponent_bound(r), &cp) - &IntPoly::one()));
    let mut acc = rem(&IntPoly::one());
    for _ in 0..r {
        acc = rem(&(&acc * &h));
    }
    acc.is_zero()
}

fn sorted_orbit(acting: &[RatMatrix], start: &[BigRational]) -> Vec<Vec<BigRational>> {
    let maps: Vec<RatMatrix> = acting
        .iter()
        .cloned()
        .chain(acting.iter().map(|m| m.inverse().expect("automorphism")))
        .collect();
    let mut orbit = orbit_exact(&maps, start, usize::MAX).expect("finite orbit");
    orbit.sort();
    orbit
}

fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Ergodicity of the single automorphism with dual matrix `b`. The
/// cyclotomic-gcd route decides and certifies; the determinant route is
/// evaluated alongside and must agree.
pub fn ergodic_verdict(b: &RatMatrix) -> Verdict {
    let r = b.rows();
    let cp = char_poly(b).expect("square matrix");
    let orders = cyclotomic_orders(r);
    let hit = orders
        .iter()
        .copied()
        .find(|&d| !is_one(&poly_gcd(&cp, &phi_poly(d)).expect("char poly is nonzero")));
    assert_eq!(
        hit.is_none(),
        det_route_nonzero(b),
        "cyclotomic and determinant routes disagree on {b}"
    );
    match hit {
        None => Verdict {
            kind: VerdictKind::Ergodic,
            certificate: Certificate::NoRootOfUnityEigenvalue { matrix: b.clone(), char_poly: cp, orders },
        },
        Some(d) => {
            let fixed = kernel(&b.eval_poly(&phi_poly(d)));
            let character = to_rational(&primitive_integer_vector(&fixed.basis()[0]));
            let acting = vec![b.clone()];
            let orbit = sorted_orbit(&acting, &character);
            Verdict {
                kind: VerdictKind::NotErgodic,
                certificate: Certificate::WitnessCharacter { acting, character, orbit },
            }
        }
    }
}

/// Distality of the single automorphism with dual matrix `b`: every
/// eigenvalue a root of unity. Checked by division into cyclotomic factors
/// and, independently, by `cp | (x^{M*} − 1)^r`.
pub fn distal_verdict(b: &RatMatrix) -> Verdict {
    let r = b.rows();
    let cp = char_poly(b).expect("square matrix");
    let (factors, rest) = cyclotomic_decomposition(&cp, r);
    let distal = is_one(&rest);
    assert_eq!(distal, distal_route(&cp, r), "distality routes disagree on {b}");
    let certificate = if distal {
        Certificate::CyclotomicCharPoly { matrix: b.clone(), char_poly: cp, factors }
    } else {
        Certificate::NonCyclotomicFactor { matrix: b.clone(), char_poly: cp, cyclotomic: factors, factor: rest }
    };
    Verdict { kind: if distal { VerdictKind::Distal } else { VerdictKind::NotDistal }, certificate }
}

pub fn is_ergodic_element(action: &MatrixAction, exponents: &[i64]) -> Result<Verdict, ActionError> {
    Ok(ergodic_verdict(&action.dual_element(exponents)?))
}

pub fn is_distal_element(action: &MatrixAction, exponents: &[i64]) -> Result<Verdict, ActionError> {
    Ok(distal_verdict(&action.dual_element(exponents)?))
}

/// Characters in `Q^dim` with finite orbit under the group generated by
/// `maps`: `∩ ker c_i(D_i)` with `c_i` the squarefree cyclotomic part of
/// the characteristic polynomial of `D_i`.
pub fn finite_orbit_subspace_of(dim: usize, maps: &[RatMatrix]) -> RationalSubspace {
    let mut w = RationalSubspace::full(dim);
    for d in maps {
        if w.is_zero() {
            break;
        }
        let part = squarefree_cyclotomic_part(&char_poly(d).expect("square"), dim);
        if is_one(&part) {
            return RationalSubspace::zero(dim);
        }
        w = w.intersect(&kernel(&d.eval_poly(&part)));
    }
    w
}

/// `A_fin = {χ : Γχ finite} = ∩ ker(D_i^{M*} − I)`.
pub fn finite_orbit_subspace(action: &MatrixAction) -> RationalSubspace {
    finite_orbit_subspace_of(action.dim(), action.duals())
}

/// Group ergodicity for the group generated by `maps` acting on `Q^dim`.
pub fn group_ergodic_verdict(dim: usize, maps: &[RatMatrix]) -> Verdict {
    let fin = finite_orbit_subspace_of(dim, maps);
    if fin.is_zero() {
        let cyclotomic_parts =
            maps.iter().map(|d| squarefree_cyclotomic_part(&char_poly(d).expect("square"), dim)).collect();
        return Verdict {
            kind: VerdictKind::Ergodic,
            certificate: Certificate::NoFiniteOrbitCharacter { dim, acting: maps.to_vec(), cyclotomic_parts },
        };
    }
    let character = to_rational(&primitive_integer_vector(&fin.basis()[0]));
    let orbit = sorted_orbit(maps, &character);
    Verdict {
        kind: VerdictKind::NotErgodic,
        certificate: Certificate::WitnessCharacter { acting: maps.to_vec(), character, orbit },
    }
}

pub fn is_ergodic_group(action: &MatrixAction) -> Verdict {
    group_ergodic_verdict(action.dim(), action.duals())
}

/// For commuting automorphisms the group is distal iff every generator is.
pub fn is_distal_group(action: &MatrixAction) -> Verdict {
    generatorwise(action.duals().iter().map(distal_verdict).collect())
}

fn generatorwise(verdicts: Vec<Verdict>) -> Verdict {
    let distal = verdicts.iter().all(|v| v.kind == VerdictKind::Distal);
    Verdict {
        kind: if distal { VerdictKind::Distal } else { VerdictKind::NotDistal },
        certificate: Certificate::Generatorwise { verdicts },
    }
}

/// Reporting flag: an ergodic automorphism of a compact group is mixing of
/// all orders.
pub fn mixing_flag(verdict: &Verdict) -> bool {
    verdict.kind == VerdictKind::Ergodic
}

/// The smallest invariant `W∞` of the dual with no finite-orbit character
/// in `Q^r / W∞` and every generator quasi-unipotent on `W∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargestErgodic {
    pub duals: Vec<RatMatrix>,
    pub subspace: RationalSubspace,
    /// `dim W` after each fixpoint round.
    pub rounds: Vec<usize>,
    /// Group ergodicity on the quotient `Q^r / W∞`.
    pub quotient_verdict: Verdict,
    /// Distality of each generator restricted to `W∞`.
    pub restricted: Vec<Verdict>,
}

pub fn largest_ergodic_subgroup(action: &MatrixAction) -> LargestErgodic {
    let r = action.dim();
    let maps = action.duals();
    let mut w = RationalSubspace::zero(r);
    let mut rounds = Vec::new();
    let quotient = loop {
        let q: Vec<RatMatrix> = maps.iter().map(|d| w.quotient_matrix(d)).collect();
        let fin = finite_orbit_subspace_of(r - w.dim(), &q);
        if fin.is_zero() {
            break q;
        }
        w = w.preimage(&fin);
        rounds.push(w.dim());
    };
    let quotient_verdict = group_ergodic_verdict(r - w.dim(), &quotient);
    let restricted = maps.iter().map(|d| distal_verdict(&w.restrict(d))).collect();
    LargestErgodic { duals: maps.to_vec(), subspace: w, rounds, quotient_verdict, restricted }
}

/// One step `W_{i-1} ⊇ W_i` of the ergodic–distal filtration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    /// 1-based generator index.
    pub generator: usize,
    pub dim_before: usize,
    pub dim_after: usize,
    /// Ergodicity of `D_i` on `W_{i-1} / W_i`.
    pub section: Verdict,
    /// Distality of `D_i` on `W_i`.
    pub restricted: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub duals: Vec<RatMatrix>,
    /// `W_0 = Q^r ⊇ W_1 ⊇ … ⊇ W_n`.
    pub chain: Vec<RationalSubspace>,
    pub stages: Vec<Stage>,
    pub residual: RationalSubspace,
    /// Distality of every generator on the residual.
    pub residual_distal: Vec<Verdict>,
    pub group_ergodic: bool,
}

/// `W_i = W_{i-1} ∩ ker cyc_i(D_i)`, where `cyc_i` is the full cyclotomic
/// part of the characteristic polynomial of `D_i` on `W_{i-1}`.
pub fn ergodic_distal_filtration(action: &MatrixAction) -> FiltrationReport {
    let r = action.dim();
    let maps = action.duals();
    let mut chain = vec![RationalSubspace::full(r)];
    let mut stages = Vec::new();
    for (i, d) in maps.iter().enumerate() {
        let prev = chain.last().expect("chain starts nonempty").clone();
        let restricted_prev = prev.restrict(d);
        let cp = char_poly(&restricted_prev).expect("square");
        let (factors, _) = cyclotomic_decomposition(&cp, prev.dim());
        let next = prev.intersect(&kernel(&d.eval_poly(&factors_product(&factors))));
        let section = ergodic_verdict(&prev.induced_on_section(&next, d));
        assert_eq!(section.kind, VerdictKind::Ergodic, "filtration stage {} not ergodic", i + 1);
        let restricted = distal_verdict(&next.restrict(d));
        stages.push(Stage { generator: i + 1, dim_before: prev.dim(), dim_after: next.dim(), section, restricted });
        chain.push(next);
    }
    let residual = chain.last().expect("nonempty").clone();
    let residual_distal = maps.iter().map(|d| distal_verdict(&residual.restrict(d))).collect();
    let group_ergodic = residual.is_zero();
    FiltrationReport { duals: maps.to_vec(), chain, stages, residual, residual_distal, group_ergodic }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the group is not ergodic")]
    NotErgodicGroup { witness: Box<Verdict> },
    #[error("no ergodic element with exponent sum at most {max_sum}")]
    Exhausted { max_sum: u64 },
}

/// An all-positive exponent vector whose product is ergodic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErgodicElement {
    pub exponents: Vec<u64>,
    pub element: RatMatrix,
    pub dual: RatMatrix,
    pub verdict: Verdict,
    pub det_route_nonzero: bool,
    pub mixing: bool,
    pub candidates_tried: usize,
}

/// Compositions of `sum` into `parts` positive parts, lexicographic.
pub fn compositions(sum: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if sum == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return if sum >= 1 { vec![vec![sum]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=sum.saturating_sub(parts as u64 - 1) {
        for mut tail in compositions(sum - first, parts - 1) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// First all-positive exponent vector, by exponent sum then
/// lexicographically, whose product is ergodic. `max_sum = None` searches
/// until found, which terminates for ergodic groups.
pub fn find_ergodic_exponents(action: &MatrixAction, max_sum: Option<u64>) -> Result<ErgodicElement, SearchError> {
    let group = is_ergodic_group(action);
    if group.kind != VerdictKind::Ergodic {
        return Err(SearchError::NotErgodicGroup { witness: Box::new(group) });
    }
    let n = action.num_generators();
    let mut tried = 0;
    let mut sum = n as u64;
    loop {
        if max_sum.is_some_and(|m| sum > m) {
            return Err(SearchError::Exhausted { max_sum: max_sum.unwrap_or(0) });
        }
        for exps in compositions(sum, n) {
            tried += 1;
            let signed: Vec<i64> = exps.iter().map(|&e| e as i64).collect();
            let dual = action.dual_element(&signed).expect("length matches");
            let verdict = ergodic_verdict(&dual);
            if verdict.kind == VerdictKind::Ergodic {
                return Ok(ErgodicElement {
                    element: action.element(&signed).expect("length matches"),
                    det_route_nonzero: det_route_nonzero(&dual),
                    mixing: mixing_flag(&verdict),
                    exponents: exps,
                    dual,
                    verdict,
                    candidates_tried: tried,
                });
            }
        }
        sum += 1;
    }
}

impl Verdict {
    /// Re-derives the certificate from scratch and checks it supports
    /// `kind`.
    pub fn replay(&self) -> Result<(), ReplayError> {
        match &self.certificate {
            Certificate::NoRootOfUnityEigenvalue { matrix, char_poly: cp, orders } => {
                check(self.kind == VerdictKind::Ergodic, "kind does not match gcd certificate")?;
                let r = matrix.ensure_square().map_err(|e| ReplayError(e.to_string()))?;
                check(&char_poly(matrix).expect("square") == cp, "characteristic polynomial")?;
                check(orders == &cyclotomic_orders(r), "order list")?;
                for &d in orders {
                    check(is_one(&poly_gcd(cp, &phi_poly(d)).expect("nonzero")), "cyclotomic gcd")?;
                }
                check(det_route_nonzero(matrix), "determinant route")
            }
            Certificate::WitnessCharacter { acting, character, orbit } => {
                check(self.kind == VerdictKind::NotErgodic, "kind does not match witness")?;
                check(!acting.is_empty(), "no acting matrices")?;
                let r = acting[0].rows();
                check(acting.iter().all(|m| m.rows() == r && m.cols() == r), "acting shapes")?;
                check(character.len() == r, "character length")?;
                check(character.iter().any(|x| !x.is_zero()), "zero character")?;
                check(orbit.iter().all(|v| v.len() == r), "orbit vector length")?;
                check(orbit.contains(character), "character missing from orbit")?;
                let mut sorted = orbit.clone();
                sorted.sort();
                sorted.dedup();
                check(sorted.len() == orbit.len(), "orbit has repeats")?;
                let mut maps = acting.clone();
                for m in acting {
                    maps.push(m.inverse().ok_or_else(|| ReplayError("singular acting matrix".into()))?);
                }
                check(is_closed(&maps, orbit), "orbit not closed")
            }
            Certificate::CyclotomicCharPoly { matrix, char_poly: cp, factors } => {
                check(self.kind == VerdictKind::Distal, "kind does not match cyclotomic factorization")?;
                let r = matrix.ensure_square().map_err(|e| ReplayError(e.to_string()))?;
                check(&char_poly(matrix).expect("square") == cp, "characteristic polynomial")?;
                check(
                    factors.iter().all(|f| euler_phi(f.order as i64).is_ok_and(|p| p <= r as u64)),
                    "factor order",
                )?;
                check(&factors_product(factors) == cp, "factor product")?;
                check(distal_route(cp, r), "power route")
            }
            Certificate::NonCyclotomicFactor { matrix, char_poly: cp, cyclotomic: factors, factor } => {
                check(self.kind == VerdictKind::NotDistal, "kind does not match non-cyclotomic factor")?;
                let r = matrix.ensure_square().map_err(|e| ReplayError(e.to_string()))?;
                check(&char_poly(matrix).expect("square") == cp, "characteristic polynomial")?;
                check(&(&factors_product(factors) * factor) == cp, "factor product")?;
                check(factor.degree().is_some_and(|d| d >= 1), "constant cofactor")?;
                for d in cyclotomic_orders(r) {
                    check(is_one(&poly_gcd(factor, &phi_poly(d)).expect("nonzero")), "cofactor gcd")?;
                }
                check(!distal_route(cp, r), "power route")
            }
            Certificate::NoFiniteOrbitCharacter { dim, acting, cyclotomic_parts } => {
                check(self.kind == VerdictKind::Ergodic, "kind does not match kernel certificate")?;
                check(acting.len() == cyclotomic_parts.len(), "part count")?;
                check(acting.iter().all(|m| m.rows() == *dim && m.cols() == *dim), "acting shapes")?;
                let xm = RatPoly::x_pow_minus_one(exponent_bound(*dim) as usize);
                let mut w = RationalSubspace::full(*dim);
                for (d, part) in acting.iter().zip(cyclotomic_parts) {
                    let cp = char_poly(d).expect("square");
                    check(&poly_gcd(&cp, &xm).expect("nonzero") == part, "cyclotomic part")?;
                    w = w.intersect(&kernel(&d.eval_poly(part)));
                }
                check(w.is_zero(), "finite-orbit subspace is nonzero")
            }
            Certificate::Generatorwise { verdicts } => {
                for v in verdicts {
                    check(matches!(v.kind, VerdictKind::Distal | VerdictKind::NotDistal), "generator verdict kind")?;
                    v.replay()?;
                }
                let distal = verdicts.iter().all(|v| v.kind == VerdictKind::Distal);
                let expected = if distal { VerdictKind::Distal } else { VerdictKind::NotDistal };
                check(self.kind == expected, "aggregate kind")
            }
        }
    }
}

impl LargestErgodic {
    pub fn replay(&self) -> Result<(), ReplayError> {
        let r = self.subspace.ambient();
        check(self.duals.iter().all(|d| self.subspace.is_invariant(d)), "W is not invariant")?;
        let q: Vec<RatMatrix> = self.duals.iter().map(|d| self.subspace.quotient_matrix(d)).collect();
        check(self.quotient_verdict.kind == VerdictKind::Ergodic, "quotient not ergodic")?;
        match &self.quotient_verdict.certificate {
            Certificate::NoFiniteOrbitCharacter { dim, acting, .. } => {
                check(*dim == r - self.subspace.dim() && acting == &q, "quotient matrices")?;
            }
            _ => return Err(ReplayError("unexpected quotient certificate".into())),
        }
        self.quotient_verdict.replay()?;
        check(self.restricted.len() == self.duals.len(), "restricted count")?;
        for (d, v) in self.duals.iter().zip(&self.restricted) {
            check(certificate_matrix(v) == Some(&self.subspace.restrict(d)), "restricted matrix")?;
            check(v.kind == VerdictKind::Distal, "generator not distal on W")?;
            v.replay()?;
        }
        Ok(())
    }
}

impl Verdict {
    /// The single matrix the verdict is about, if there is one.
    pub fn subject(&self) -> Option<&RatMatrix> {
        certificate_matrix(self)
    }
}

fn certificate_matrix(v: &Verdict) -> Option<&RatMatrix> {
    match &v.certificate {
        Certificate::NoRootOfUnityEigenvalue { matrix, .. }
        | Certificate::CyclotomicCharPoly { matrix, .. }
        | Certificate::NonCyclotomicFactor { matrix, .. } => Some(matrix),
        Certificate::WitnessCharacter { acting, .. } if acting.len() == 1 => Some(&acting[0]),
        _ => None,
    }
}

impl FiltrationReport {
    pub fn replay(&self) -> Result<(), ReplayError> {
        let first = self.chain.first().ok_or_else(|| ReplayError("empty chain".into()))?;
        check(first.is_full(), "W_0 is not the whole space")?;
        check(self.chain.len() == self.duals.len() + 1, "chain length")?;
        check(self.stages.len() == self.duals.len(), "stage count")?;
        for w in &self.chain {
            check(self.duals.iter().all(|d| w.is_invariant(d)), "chain member not invariant")?;
        }
        for (i, stage) in self.stages.iter().enumerate() {
            let (prev, next, d) = (&self.chain[i], &self.chain[i + 1], &self.duals[i]);
            check(prev.contains_subspace(next), "chain not decreasing")?;
            check(stage.generator == i + 1, "stage attribution")?;
            check(stage.dim_before == prev.dim() && stage.dim_after == next.dim(), "stage dimensions")?;
            check(
                certificate_matrix(&stage.section) == Some(&prev.induced_on_section(next, d)),
                "section matrix",
            )?;
            check(stage.section.kind == VerdictKind::Ergodic, "section not ergodic")?;
            stage.section.replay()?;
            check(certificate_matrix(&stage.restricted) == Some(&next.restrict(d)), "restricted matrix")?;
            check(stage.restricted.kind == VerdictKind::Distal, "generator not distal on W_i")?;
            stage.restricted.replay()?;
        }
        check(self.chain.last() == Some(&self.residual), "residual")?;
        for (d, v) in self.duals.iter().zip(&self.residual_distal) {
            check(certificate_matrix(v) == Some(&self.residual.restrict(d)), "residual matrix")?;
            check(v.kind == VerdictKind::Distal, "generator not distal on residual")?;
            v.replay()?;
        }
        check(self.group_ergodic == self.residual.is_zero(), "ergodicity flag")
    }
}

impl ErgodicElement {
    pub fn replay(&self, action: &MatrixAction) -> Result<(), ReplayError> {
        check(self.exponents.iter().all(|&e| e >= 1), "non-positive exponent")?;
        let signed: Vec<i64> = self.exponents.iter().map(|&e| e as i64).collect();
        let element = action.element(&signed).map_err(|e| ReplayError(e.to_string()))?;
        let dual = action.dual_element(&signed).map_err(|e| ReplayError(e.to_string()))?;
        check(element == self.element && dual == self.dual, "element matrices")?;
        check(certificate_matrix(&self.verdict) == Some(&dual), "verdict subject")?;
        check(self.verdict.kind == VerdictKind::Ergodic, "element not ergodic")?;
        check(self.det_route_nonzero && det_route_nonzero(&dual), "determinant route")?;
        self.verdict.replay()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn toral(gens: &[&[&[i64]]]) -> MatrixAction {
        MatrixAction::toral(gens.iter().map(|g| RatMatrix::from_i64(g)).collect()).unwrap()
    }

    fn fib() -> RatMatrix {
        RatMatrix::from_i64(&[&[0, 1], &[1, 1]])
    }

    #[test]
    fn determinant_residue_matches_exact_determinant() {
        for rows in [
            &[&[0i64, 1][..], &[1, 1]][..],
            &[&[1, 1], &[0, 1]],
            &[&[2, 1, 0], &[1, 1, 0], &[1, 1, 1]],
            &[&[3, -2, 5], &[0, 7, 1], &[4, 4, -1]],
        ] {
            let n = IntMatrix::from_i64(rows);
            for (l, m) in [(1i64, 1u64), (1, 6), (2, 5), (3, 12)] {
                let l = BigInt::from(l);
                let lm = num_traits::pow(l.clone(), m as usize);
                let mut p = n.pow(m);
                for i in 0..n.rows() {
                    p[(i, i)] -= &lm;
                }
                assert_eq!(det_residue(&n, &l, m), residue(&p.det().unwrap()));
            }
        }
    }

    fn block_pair() -> MatrixAction {
        let i2 = RatMatrix::identity(2);
        MatrixAction::toral(vec![
            RatMatrix::block_diag(&[fib(), i2.clone()]),
            RatMatrix::block_diag(&[i2, fib()]),
        ])
        .unwrap()
    }

    fn witness(v: &Verdict) -> &[BigRational] {
        match &v.certificate {
            Certificate::WitnessCharacter { character, .. } => character,
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn single_element_examples() {
        let f = toral(&[&[&[0, 1], &[1, 1]]]);
        let v = is_ergodic_element(&f, &[1]).unwrap();
        assert_eq!(v.kind, VerdictKind::Ergodic);
        v.replay().unwrap();
        assert!(mixing_flag(&v));

        let id = toral(&[&[&[1, 0], &[0, 1]]]);
        let v = is_ergodic_element(&id, &[1]).unwrap();
        assert_eq!(v.kind, VerdictKind::NotErgodic);
        assert_eq!(witness(&v), &[rat(1), rat(0)]);
        v.replay().unwrap();
        assert!(!mixing_flag(&v));

        let rot = toral(&[&[&[0, -1], &[1, 0]]]);
        let v = is_ergodic_element(&rot, &[1]).unwrap();
        assert_eq!(v.kind, VerdictKind::NotErgodic);
        match &v.certificate {
            Certificate::WitnessCharacter { orbit, .. } => assert!(orbit.len() <= 4),
            _ => unreachable!(),
        }
        v.replay().unwrap();
    }

    #[test]
    fn distal_examples() {
        let u = toral(&[&[&[1, 1], &[0, 1]]]);
        let v = is_distal_element(&u, &[1]).unwrap();
        assert_eq!(v.kind, VerdictKind::Distal);
        match &v.certificate {
            Certificate::CyclotomicCharPoly { factors, .. } => {
                assert_eq!(factors, &[CyclotomicFactor { order: 1, multiplicity: 2 }])
            }
            _ => unreachable!(),
        }
        v.replay().unwrap();
        let v = is_distal_element(&toral(&[&[&[0, 1], &[1, 1]]]), &[1]).unwrap();
        assert_eq!(v.kind, VerdictKind::NotDistal);
        v.replay().unwrap();
        assert_eq!(is_distal_element(&toral(&[&[&[1, 0], &[0, 1]]]), &[1]).unwrap().kind, VerdictKind::Distal);
    }

    #[test]
    fn finite_orbit_subspace_examples() {
        let u = toral(&[&[&[1, 1], &[0, 1]]]);
        assert_eq!(finite_orbit_subspace(&u), RationalSubspace::span(2, vec![vec![rat(0), rat(1)]]));
        assert!(finite_orbit_subspace(&block_pair()).is_zero());
        assert!(finite_orbit_subspace(&toral(&[&[&[1, 0], &[0, 1]]])).is_full());
    }

    #[test]
    fn finite_orbit_subspace_matches_direct_formula() {
        for a in [toral(&[&[&[1, 1], &[0, 1]]]), block_pair(), toral(&[&[&[0, -1], &[1, 0]]])] {
            let m = exponent_bound(a.dim());
            let direct = a
                .duals()
                .iter()
                .map(|d| kernel(&(&d.pow(m) - &RatMatrix::identity(a.dim()))))
                .fold(RationalSubspace::full(a.dim()), |acc, k| acc.intersect(&k));
            assert_eq!(finite_orbit_subspace(&a), direct);
        }
    }

    #[test]
    fn group_verdicts() {
        let pair = block_pair();
        for e in [[1, 0], [0, 1]] {
            assert_eq!(is_ergodic_element(&pair, &e).unwrap().kind, VerdictKind::NotErgodic);
        }
        let g = is_ergodic_group(&pair);
        assert_eq!(g.kind, VerdictKind::Ergodic);
        g.replay().unwrap();

        let g = is_ergodic_group(&toral(&[&[&[0, -1], &[1, 0]]]));
        assert_eq!(g.kind, VerdictKind::NotErgodic);
        g.replay().unwrap();

        let g = is_ergodic_group(&toral(&[&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]]));
        assert_eq!(witness(&g), &[rat(1), rat(0), rat(0)]);
    }

    #[test]
    fn group_distality() {
        let a = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]).pow(2);
        let b = RatMatrix::from_i64(&[&[1, 3], &[0, 1]]);
        let v = is_distal_group(&MatrixAction::toral(vec![a, b]).unwrap());
        assert_eq!(v.kind, VerdictKind::Distal);
        v.replay().unwrap();
        assert_eq!(is_distal_group(&toral(&[&[&[0, 1], &[1, 1]]])).kind, VerdictKind::NotDistal);
        let pm = toral(&[&[&[1, 0], &[0, 1]], &[&[-1, 0], &[0, -1]]]);
        assert_eq!(is_distal_group(&pm).kind, VerdictKind::Distal);
    }

    #[test]
    fn largest_ergodic_subgroup_examples() {
        let f = largest_ergodic_subgroup(&toral(&[&[&[0, 1], &[1, 1]]]));
        assert!(f.subspace.is_zero());
        f.replay().unwrap();

        let u = largest_ergodic_subgroup(&toral(&[&[&[1, 1], &[0, 1]]]));
        assert!(u.subspace.is_full());
        assert_eq!(u.rounds, vec![1, 2]);
        u.replay().unwrap();

        let i2 = RatMatrix::identity(2);
        let single = MatrixAction::toral(vec![RatMatrix::block_diag(&[fib(), i2])]).unwrap();
        let l = largest_ergodic_subgroup(&single);
        let plane = RationalSubspace::span(4, vec![
            vec![rat(0), rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(1)],
        ]);
        assert_eq!(l.subspace, plane);
        l.replay().unwrap();
    }

    #[test]
    fn filtration_examples() {
        let f = ergodic_distal_filtration(&toral(&[&[&[0, 1], &[1, 1]]]));
        assert_eq!(f.chain.iter().map(RationalSubspace::dim).collect::<Vec<_>>(), vec![2, 0]);
        assert!(f.group_ergodic);
        f.replay().unwrap();

        let p = ergodic_distal_filtration(&block_pair());
        assert_eq!(p.chain.iter().map(RationalSubspace::dim).collect::<Vec<_>>(), vec![4, 2, 0]);
        let plane = RationalSubspace::span(4, vec![
            vec![rat(0), rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(1)],
        ]);
        assert_eq!(p.chain[1], plane);
        assert_eq!(p.stages.iter().map(|s| s.generator).collect::<Vec<_>>(), vec![1, 2]);
        p.replay().unwrap();

        let id = ergodic_distal_filtration(&toral(&[&[&[1, 0], &[0, 1]]]));
        assert_eq!(id.chain.iter().map(RationalSubspace::dim).collect::<Vec<_>>(), vec![2, 2]);
        assert!(!id.group_ergodic);
        id.replay().unwrap();
    }

    #[test]
    fn exponent_search_examples() {
        let f = find_ergodic_exponents(&toral(&[&[&[0, 1], &[1, 1]]]), None).unwrap();
        assert_eq!(f.exponents, vec![1]);
        let p = find_ergodic_exponents(&block_pair(), None).unwrap();
        assert_eq!(p.exponents, vec![1, 1]);
        assert_eq!(p.element, RatMatrix::block_diag(&[fib(), fib()]));
        p.replay(&block_pair()).unwrap();
        let err = find_ergodic_exponents(&toral(&[&[&[1, 0], &[0, 1]]]), None).unwrap_err();
        assert!(matches!(err, SearchError::NotErgodicGroup { .. }));
    }

    #[test]
    fn composition_order() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(4, 3), vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]);
        assert!(compositions(1, 2).is_empty());
    }

    #[test]
    fn solenoid_element() {
        let a = MatrixAction::solenoid(vec![RatMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => rat(2),
            (1, 1) => crate::exact::rat_frac(1, 3),
            _ => rat(0),
        })])
        .unwrap();
        let v = is_ergodic_element(&a, &[1]).unwrap();
        assert_eq!(v.kind, VerdictKind::Ergodic);
        v.replay().unwrap();
    }

    #[test]
    fn tampered_certificates_fail() {
        let v = is_ergodic_element(&toral(&[&[&[0, -1], &[1, 0]]]), &[1]).unwrap();
        let mut bad = v.clone();
        if let Certificate::WitnessCharacter { orbit, .. } = &mut bad.certificate {
            orbit.pop();
        }
        assert!(bad.replay().is_err());
        let mut flipped = v;
        flipped.kind = VerdictKind::Ergodic;
        assert!(flipped.replay().is_err());
    }
}
