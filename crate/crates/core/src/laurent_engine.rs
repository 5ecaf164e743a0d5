//! Ergodicity of `α_n : a ↦ u^n a` on the dual of a cyclic module
//! `S / (g)`, `S = F_p[u1^±1, …, ud^±1]`, `d ∈ {1, 2}`.
//!
//! `α_n` fails to be ergodic iff some `K ≥ 1` makes `gcd(g, u^{Kn} − 1)` a
//! nonunit. For `d = 2` a unimodular change of variables taking `n` to
//! `(e, 0)` turns this into a univariate question about the `u2`-content
//! of the transformed presentation, which is decided exactly. The plain
//! `K`-scan through [`bivar_common_factor`] runs alongside as a
//! cross-check and is also available on its own as a bounded procedure.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::LaurentCyclicAction;
use crate::exact::bivariate::content_u2;
use crate::exact::{bivar_common_factor, laurent_divides, laurent_gcd_1d, FpPoly, LaurentPoly};
use crate::ExactError;
use crate::toral::ReplayError;

/// Upper limit applied to the default `K` bound `p^{2 deg g}`.
pub const DEFAULT_K_MAX_CAP: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("direction n must be nonzero")]
    ZeroDirection,
    #[error("direction has {found} coordinates, expected {expected}")]
    DirectionLength { expected: usize, found: usize },
    #[error("the group is not ergodic")]
    NotErgodicGroup { witness: Box<BoundedVerdict> },
    #[error("no ergodic direction with |n|∞ ≤ {search_box}")]
    Exhausted { search_box: u64 },
    #[error("m lies in (g), so it is zero in the module")]
    ZeroElement,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedKind {
    NotErgodic,
    /// No finite orbit found for any `K ≤ k_max`; not a proof.
    ErgodicUpTo,
    Ergodic,
}

/// `(u^{Kn} − 1)·m = quotient·g` with `m ∉ (g)`: the class of `m` is a
/// nonzero module element fixed by `α_n^K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentWitness {
    pub k: u64,
    pub direction: Vec<i64>,
    pub common_factor: LaurentPoly,
    pub m: LaurentPoly,
    pub quotient: LaurentPoly,
}

/// Exact ergodicity arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ErgodicProof {
    /// With `σ(u^v) = u^{Tv}` and `T n = (e, 0)`, every common factor of
    /// `σg` and `u1^{Ke} − 1` divides the `u2`-content of `σg`, here a unit.
    ContentUnit { transform: Vec<Vec<i64>>, substituted: LaurentPoly, content: LaurentPoly },
    /// Two variables: a common factor of `g`, `u1^K − 1` and `u2^K − 1`
    /// divides both the `u2`-content (a polynomial in `u1`) and the
    /// `u1`-content (a polynomial in `u2`), hence is a unit.
    SeparatedContents { u1_content: LaurentPoly, u2_content: LaurentPoly },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedVerdict {
    pub kind: BoundedKind,
    pub presentation: LaurentPoly,
    /// `None` for a verdict about the whole group.
    pub direction: Option<Vec<i64>>,
    /// `K` bound of the bivariate cross-check or bounded scan.
    pub k_max: u64,
    pub witness: Option<LaurentWitness>,
    pub proof: Option<ErgodicProof>,
}

impl BoundedVerdict {
    pub fn is_exact(&self) -> bool {
        self.kind != BoundedKind::ErgodicUpTo
    }
}

/// `min(p^{2 deg g}, DEFAULT_K_MAX_CAP)`.
pub fn default_k_max(action: &LaurentCyclicAction) -> u64 {
    let exp = 2 * action.presentation().total_degree().max(0) as u32;
    action.modulus().checked_pow(exp).unwrap_or(u64::MAX).min(DEFAULT_K_MAX_CAP)
}

fn check_direction(action: &LaurentCyclicAction, n: &[i64]) -> Result<(), LaurentError> {
    if n.len() != action.nvars() {
        return Err(LaurentError::DirectionLength { expected: action.nvars(), found: n.len() });
    }
    if n.iter().all(|&x| x == 0) {
        return Err(LaurentError::ZeroDirection);
    }
    Ok(())
}

/// Unimodular `T` (rows) with `T n = (e, 0)`, `e = gcd(n1, n2) > 0`.
pub fn straightening_transform(n: &[i64]) -> Vec<Vec<i64>> {
    let (a, b) = (n[0], n[1]);
    let eg = a.extended_gcd(&b);
    let (e, s, t) = if eg.gcd < 0 { (-eg.gcd, -eg.x, -eg.y) } else { (eg.gcd, eg.x, eg.y) };
    vec![vec![s, t], vec![-b / e, a / e]]
}

fn univariate_content(g: &LaurentPoly) -> FpPoly {
    content_u2(&g.canonical().to_bivariate(), g.modulus())
}

/// Common factor, module element and quotient certifying that `α_n^K` fixes
/// a nonzero element, or `None` when `gcd(g, u^{Kn} − 1)` is a unit.
fn witness_at(g: &LaurentPoly, n: &[i64], k: u64) -> Result<Option<LaurentWitness>, LaurentError> {
    let h = LaurentPoly::u_pow_minus_one(g.modulus(), n, k as i64);
    let common = if g.nvars() == 1 {
        laurent_gcd_1d(g, &h)?
    } else {
        let cf = bivar_common_factor(g, &h)?;
        if !cf.exists() {
            return Ok(None);
        }
        cf.gcd
    };
    if common.is_unit() {
        return Ok(None);
    }
    let m = laurent_divides(&common, g)?.expect("gcd divides g");
    let quotient = laurent_divides(g, &h.mul(&m))?.expect("(u^Kn - 1) m lies in (g)");
    Ok(Some(LaurentWitness { k, direction: n.to_vec(), common_factor: common, m, quotient }))
}

/// Least `K ≥ 1` with `gcd(c, x^{Ke} − 1)` a nonunit, for `c` with
/// `c(0) ≠ 0`; it is at most `p^{deg c} − 1`.
fn least_order(c: &FpPoly, e: u64) -> u64 {
    let p = c.modulus();
    let one = FpPoly::one(p);
    let mut k = 1;
    loop {
        let r = FpPoly::x_pow_mod(p, k * e, c).sub(&one);
        if !c.gcd(&r).is_unit() {
            return k;
        }
        k += 1;
    }
}

/// Only the `K`-scan: `NotErgodic` with the least `K ≤ k_max`, otherwise
/// `ErgodicUpTo(k_max)`.
pub fn alpha_bounded_scan(action: &LaurentCyclicAction, n: &[i64], k_max: u64) -> Result<BoundedVerdict, LaurentError> {
    check_direction(action, n)?;
    let g = action.presentation();
    for k in 1..=k_max {
        if let Some(w) = witness_at(g, n, k)? {
            return Ok(BoundedVerdict {
                kind: BoundedKind::NotErgodic,
                presentation: g.clone(),
                direction: Some(n.to_vec()),
                k_max,
                witness: Some(w),
                proof: None,
            });
        }
    }
    Ok(BoundedVerdict {
        kind: BoundedKind::ErgodicUpTo,
        presentation: g.clone(),
        direction: Some(n.to_vec()),
        k_max,
        witness: None,
        proof: None,
    })
}

/// Exact verdict for `α_n`. For `d = 1` the module is finite and the answer
/// is always `NotErgodic`; for `d = 2` the content criterion decides, and
/// the `K`-scan up to `k_max` must agree with it.
pub fn alpha_is_ergodic(action: &LaurentCyclicAction, n: &[i64], k_max: u64) -> Result<BoundedVerdict, LaurentError> {
    check_direction(action, n)?;
    let g = action.presentation();
    let p = action.modulus();
    let (least, proof) = if action.nvars() == 1 {
        (Some(least_order(&g.to_fp_poly(), n[0].unsigned_abs())), None)
    } else {
        let transform = straightening_transform(n);
        let e = transform[0][0] * n[0] + transform[0][1] * n[1];
        let substituted = g.substitute(&transform).canonical();
        let content = univariate_content(&substituted);
        if content.is_unit() {
            let proof = ErgodicProof::ContentUnit {
                transform,
                substituted,
                content: LaurentPoly::from_fp_poly(&content),
            };
            (None, Some(proof))
        } else {
            (Some(least_order(&content, e as u64)), None)
        }
    };
    let scan = alpha_bounded_scan(action, n, k_max.min(least.unwrap_or(k_max)))?;
    match least {
        Some(k) => {
            if k <= k_max {
                assert_eq!(scan.witness.as_ref().map(|w| w.k), Some(k), "K-scan disagrees with exact order for {g}");
            } else {
                assert_eq!(scan.kind, BoundedKind::ErgodicUpTo, "K-scan found K below the exact order for {g}");
            }
            let witness = witness_at(g, n, k)?.expect("exact order yields a common factor");
            Ok(BoundedVerdict {
                kind: BoundedKind::NotErgodic,
                presentation: g.clone(),
                direction: Some(n.to_vec()),
                k_max,
                witness: Some(witness),
                proof: None,
            })
        }
        None => {
            assert_eq!(scan.kind, BoundedKind::ErgodicUpTo, "K-scan contradicts content criterion for {g} over F_{p}");
            Ok(BoundedVerdict {
                kind: BoundedKind::Ergodic,
                presentation: g.clone(),
                direction: Some(n.to_vec()),
                k_max,
                witness: None,
                proof,
            })
        }
    }
}

/// Ergodicity of the whole group `{α_n}`. Exact for both `d = 1` (never
/// ergodic) and `d = 2` (always ergodic).
pub fn group_is_ergodic(action: &LaurentCyclicAction, k_max: u64) -> Result<BoundedVerdict, LaurentError> {
    let g = action.presentation();
    if action.nvars() == 1 {
        let mut v = alpha_is_ergodic(action, &[1], k_max)?;
        v.direction = None;
        return Ok(v);
    }
    let u1_content = LaurentPoly::from_fp_poly(&univariate_content(g));
    let u2_content = LaurentPoly::from_fp_poly(&univariate_content(&g.swap_vars()));
    Ok(BoundedVerdict {
        kind: BoundedKind::Ergodic,
        presentation: g.clone(),
        direction: None,
        k_max,
        witness: None,
        proof: Some(ErgodicProof::SeparatedContents { u1_content, u2_content }),
    })
}

/// Nonzero directions up to sign (first nonzero coordinate positive) with
/// `|n|∞ ≤ search_box`, ordered by `|n|∞`, then `|n|₁`, then
/// lexicographically descending.
pub fn direction_scan_order(d: usize, search_box: u64) -> Vec<Vec<i64>> {
    let b = search_box as i64;
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-b; d];
    loop {
        let first = cur.iter().find(|&&x| x != 0);
        if first.is_some_and(|&x| x > 0) {
            out.push(cur.clone());
        }
        let Some(pos) = (0..d).rev().find(|&i| cur[i] < b) else {
            break;
        };
        cur[pos] += 1;
        cur[pos + 1..].iter_mut().for_each(|x| *x = -b);
    }
    let key = |n: &Vec<i64>| {
        let inf = n.iter().map(|x| x.abs()).max().unwrap_or(0);
        let one: i64 = n.iter().map(|x| x.abs()).sum();
        (inf, one, std::cmp::Reverse(n.clone()))
    };
    out.sort_by_key(key);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErgodicDirection {
    pub direction: Vec<i64>,
    pub verdict: BoundedVerdict,
    pub directions_tried: usize,
}

/// First direction in [`direction_scan_order`] with an ergodic `α_n`.
/// Bounded verdicts qualify only when `allow_bounded` is set.
pub fn find_ergodic_direction(
    action: &LaurentCyclicAction,
    search_box: u64,
    k_max: u64,
    allow_bounded: bool,
) -> Result<ErgodicDirection, LaurentError> {
    let group = group_is_ergodic(action, k_max)?;
    if group.kind == BoundedKind::NotErgodic {
        return Err(LaurentError::NotErgodicGroup { witness: Box::new(group) });
    }
    for (i, n) in direction_scan_order(action.nvars(), search_box).into_iter().enumerate() {
        let verdict = alpha_is_ergodic(action, &n, k_max)?;
        let ok = match verdict.kind {
            BoundedKind::Ergodic => true,
            BoundedKind::ErgodicUpTo => allow_bounded,
            BoundedKind::NotErgodic => false,
        };
        if ok {
            return Ok(ErgodicDirection { direction: n, verdict, directions_tried: i + 1 });
        }
    }
    Err(LaurentError::Exhausted { search_box })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProbeResult {
    Finite { k: u64 },
    NoFiniteOrbitUpTo { cap: u64 },
}

/// Least `K ≤ cap` with `(u^{Kn} − 1)·m ∈ (g)`, found by direct division.
pub fn orbit_probe(
    action: &LaurentCyclicAction,
    m: &LaurentPoly,
    n: &[i64],
    cap: u64,
) -> Result<ProbeResult, LaurentError> {
    check_direction(action, n)?;
    let g = action.presentation();
    if laurent_divides(g, m)?.is_some() {
        return Err(LaurentError::ZeroElement);
    }
    for k in 1..=cap {
        let h = LaurentPoly::u_pow_minus_one(g.modulus(), n, k as i64);
        if laurent_divides(g, &h.mul(m))?.is_some() {
            return Ok(ProbeResult::Finite { k });
        }
    }
    Ok(ProbeResult::NoFiniteOrbitUpTo { cap })
}

fn check(cond: bool, what: &str) -> Result<(), ReplayError> {
    if cond {
        Ok(())
    } else {
        Err(ReplayError(what.to_string()))
    }
}

impl LaurentWitness {
    pub fn replay(&self, g: &LaurentPoly) -> Result<(), ReplayError> {
        let err = |e: ExactError| ReplayError(e.to_string());
        check(self.k >= 1, "K must be positive")?;
        check(self.direction.iter().any(|&x| x != 0), "zero direction")?;
        check(laurent_divides(g, &self.m).map_err(err)?.is_none(), "m lies in (g)")?;
        let h = LaurentPoly::u_pow_minus_one(g.modulus(), &self.direction, self.k as i64);
        check(h.mul(&self.m) == self.quotient.mul(g), "(u^Kn - 1) m != q g")?;
        check(!self.common_factor.is_unit(), "unit common factor")?;
        check(laurent_divides(&self.common_factor, g).map_err(err)?.is_some(), "factor does not divide g")?;
        check(laurent_divides(&self.common_factor, &h).map_err(err)?.is_some(), "factor does not divide u^Kn - 1")
    }
}

impl BoundedVerdict {
    pub fn replay(&self) -> Result<(), ReplayError> {
        let g = &self.presentation;
        let err = |e: LaurentError| ReplayError(e.to_string());
        match self.kind {
            BoundedKind::NotErgodic => {
                let w = self.witness.as_ref().ok_or_else(|| ReplayError("missing witness".into()))?;
                if let Some(n) = &self.direction {
                    check(&w.direction == n, "witness direction")?;
                } else {
                    check(g.nvars() == 1, "group witness needs one variable")?;
                }
                w.replay(g)
            }
            BoundedKind::ErgodicUpTo => {
                let n = self.direction.as_ref().ok_or_else(|| ReplayError("missing direction".into()))?;
                for k in 1..=self.k_max {
                    check(witness_at(g, n, k).map_err(err)?.is_none(), "finite orbit below k_max")?;
                }
                Ok(())
            }
            BoundedKind::Ergodic => match &self.proof {
                Some(ErgodicProof::ContentUnit { transform, substituted, content }) => {
                    let n = self.direction.as_ref().ok_or_else(|| ReplayError("missing direction".into()))?;
                    check(g.nvars() == 2 && n.len() == 2 && transform.len() == 2, "shape")?;
                    check(transform.iter().all(|r| r.len() == 2), "transform shape")?;
                    let det = transform[0][0] * transform[1][1] - transform[0][1] * transform[1][0];
                    check(det.abs() == 1, "transform not unimodular")?;
                    check(transform[1][0] * n[0] + transform[1][1] * n[1] == 0, "transform does not straighten n")?;
                    check(&g.substitute(transform).canonical() == substituted, "substituted presentation")?;
                    let c = univariate_content(substituted);
                    check(&LaurentPoly::from_fp_poly(&c) == content && c.is_unit(), "content is not a unit")
                }
                Some(ErgodicProof::SeparatedContents { u1_content, u2_content }) => {
                    check(self.direction.is_none() && g.nvars() == 2, "group proof shape")?;
                    check(&LaurentPoly::from_fp_poly(&univariate_content(g)) == u1_content, "u2-content")?;
                    check(
                        &LaurentPoly::from_fp_poly(&univariate_content(&g.swap_vars())) == u2_content,
                        "u1-content",
                    )
                }
                None => Err(ReplayError("exact ergodic verdict without proof".into())),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(p: u64, d: usize, terms: &[(&[i64], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(p, d, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    fn ledrappier() -> LaurentCyclicAction {
        LaurentCyclicAction::new(lp(2, 2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)])).unwrap()
    }

    #[test]
    fn one_variable_order_three() {
        let a = LaurentCyclicAction::new(lp(2, 1, &[(&[0], 1), (&[1], 1), (&[2], 1)])).unwrap();
        let v = alpha_is_ergodic(&a, &[1], 64).unwrap();
        assert_eq!(v.kind, BoundedKind::NotErgodic);
        assert_eq!(v.witness.as_ref().unwrap().k, 3);
        v.replay().unwrap();
        let grp = group_is_ergodic(&a, 64).unwrap();
        assert_eq!(grp.kind, BoundedKind::NotErgodic);
        grp.replay().unwrap();
    }

    #[test]
    fn ledrappier_axes_are_ergodic() {
        let a = ledrappier();
        for n in [[1, 0], [0, 1]] {
            let v = alpha_is_ergodic(&a, &n, 64).unwrap();
            assert_eq!(v.kind, BoundedKind::Ergodic);
            v.replay().unwrap();
        }
        let g = group_is_ergodic(&a, 64).unwrap();
        assert_eq!(g.kind, BoundedKind::Ergodic);
        g.replay().unwrap();
        assert_eq!(find_ergodic_direction(&a, 3, 64, false).unwrap().direction, vec![1, 0]);
    }

    #[test]
    fn reducible_presentation_has_fixed_element() {
        let a = LaurentCyclicAction::new(
            lp(3, 2, &[(&[0, 0], -1), (&[1, 0], 1)]).mul(&lp(3, 2, &[(&[0, 0], 1), (&[0, 1], 1)])),
        )
        .unwrap();
        let v = alpha_is_ergodic(&a, &[1, 0], 64).unwrap();
        assert_eq!(v.kind, BoundedKind::NotErgodic);
        assert_eq!(v.witness.as_ref().unwrap().k, 1);
        v.replay().unwrap();
    }

    #[test]
    fn probe_examples() {
        let a = LaurentCyclicAction::new(lp(2, 1, &[(&[0], 1), (&[1], 1), (&[2], 1)])).unwrap();
        let one = LaurentPoly::one(2, 1);
        assert_eq!(orbit_probe(&a, &one, &[1], 10).unwrap(), ProbeResult::Finite { k: 3 });
        let l = ledrappier();
        assert_eq!(
            orbit_probe(&l, &LaurentPoly::one(2, 2), &[1, 0], 64).unwrap(),
            ProbeResult::NoFiniteOrbitUpTo { cap: 64 }
        );
        assert_eq!(orbit_probe(&l, l.presentation(), &[1, 0], 4), Err(LaurentError::ZeroElement));
    }

    #[test]
    fn zero_direction_is_rejected() {
        assert_eq!(alpha_is_ergodic(&ledrappier(), &[0, 0], 4), Err(LaurentError::ZeroDirection));
    }

    #[test]
    fn transforms_straighten() {
        for n in [[1, 0], [0, 1], [2, 3], [-4, 6], [0, -5], [-1, -1]] {
            let t = straightening_transform(&n);
            let image = [t[0][0] * n[0] + t[0][1] * n[1], t[1][0] * n[0] + t[1][1] * n[1]];
            assert!(image[0] > 0 && image[1] == 0, "{n:?}");
            assert_eq!((t[0][0] * t[1][1] - t[0][1] * t[1][0]).abs(), 1);
        }
    }

    #[test]
    fn scan_order_starts_on_the_axes() {
        let order = direction_scan_order(2, 1);
        assert_eq!(order, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]]);
        assert_eq!(direction_scan_order(1, 3), vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn default_bound() {
        assert_eq!(default_k_max(&ledrappier()), 4);
        let a = LaurentCyclicAction::new(lp(3, 2, &[(&[0, 0], 1), (&[2, 1], 1)])).unwrap();
        assert_eq!(default_k_max(&a), 64);
    }
}
