//! Brute-force dual orbit enumeration and the differential harness that
//! checks the analytic engines against it.
//!
//! An orbit is explored over the group generated by the dual generators
//! and their inverses. Finite answers are always backed by the explicit,
//! closure-checked member list; `ExceededCap` is never evidence of
//! infinitude.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{MatrixAction, ProductDemoSpec};
use crate::exact::{IntMatrix, Matrix, Scalar};
use crate::toral::finite_orbit_subspace;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error")]
pub enum OracleError {
    #[error("the zero character has a trivial orbit")]
    ZeroCharacter,
    #[error("character has {found} coordinates, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("orbit enumeration needs integral dual generators")]
    NonIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitStatus {
    Finite,
    ExceededCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierStats {
    pub visited: usize,
    /// Bit length of the largest coordinate seen; `None` when the modular
    /// pass alone settled the orbit.
    pub max_coordinate_bits: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub status: OrbitStatus,
    pub size: Option<usize>,
    pub stats: FrontierStats,
    /// Sorted orbit members, present exactly when the orbit is finite.
    #[serde(skip)]
    pub members: Option<Vec<Vec<BigInt>>>,
}

/// Multiply-rotate fold over sign and limbs; collisions only make the
/// first pass undercount, never invent a finite orbit.
fn digest(v: &[BigInt]) -> u64 {
    const K: u64 = 0x517c_c1b7_2722_0a95;
    let mut h = 0u64;
    let mut mix = |w: u64| h = (h.rotate_left(5) ^ w).wrapping_mul(K);
    for x in v {
        mix(x.sign() as u64);
        x.magnitude().iter_u64_digits().for_each(&mut mix);
    }
    h
}

/// Small-entry matrix applied by additions and word multiplications.
struct Word(Vec<Vec<(usize, i64)>>);

impl Word {
    fn new(m: &IntMatrix) -> Option<Self> {
        let rows = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| i64::try_from(x).ok().map(|x| (j, x)))
                    .collect()
            })
            .collect::<Option<_>>()?;
        Some(Word(rows))
    }

    fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.0
            .iter()
            .map(|row| {
                let mut acc = BigInt::zero();
                for &(j, c) in row {
                    match c {
                        1 => acc += &x[j],
                        -1 => acc -= &x[j],
                        c => acc += &x[j] * c,
                    }
                }
                acc
            })
            .collect()
    }
}

fn integral_maps(action: &MatrixAction) -> Result<Vec<IntMatrix>, OracleError> {
    action
        .duals()
        .iter()
        .chain(action.dual_inverses())
        .map(|m| m.to_int().ok_or(OracleError::NonIntegral))
        .collect()
}

/// Exhaustive orbit of `start` under `maps`, or `None` once more than
/// `limit` points have been seen.
pub fn orbit_exact<T>(maps: &[Matrix<T>], start: &[T], limit: usize) -> Option<Vec<Vec<T>>>
where
    T: Scalar + Hash + Eq,
{
    let mut seen: HashSet<Vec<T>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.to_vec());
    queue.push_back(start.to_vec());
    while let Some(x) = queue.pop_front() {
        for m in maps {
            let y = m.mul_vec(&x);
            if !seen.contains(&y) {
                if seen.len() >= limit {
                    return None;
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Some(seen.into_iter().collect())
}

/// `maps` send every member of `set` back into `set`.
pub fn is_closed<T>(maps: &[Matrix<T>], set: &[Vec<T>]) -> bool
where
    T: Scalar + Hash + Eq,
{
    let members: HashSet<&Vec<T>> = set.iter().collect();
    set.iter().all(|x| maps.iter().all(|m| members.contains(&m.mul_vec(x))))
}

/// First pass: hashed exploration keeping only digests and the frontier,
/// so runaway orbits cost little memory. Calls `visit` on every new point.
fn explore(
    maps: &[IntMatrix],
    start: &[BigInt],
    cap: usize,
    visit: &mut dyn FnMut(&[BigInt]),
) -> (OrbitStatus, FrontierStats) {
    let bits = |v: &[BigInt]| v.iter().map(|x| x.bits()).max();
    let words: Option<Vec<Word>> = maps.iter().map(Word::new).collect();
    let apply = |i: usize, x: &[BigInt]| match &words {
        Some(w) => w[i].apply(x),
        None => maps[i].mul_vec(x),
    };
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(digest(start));
    let mut stats = FrontierStats { visited: 1, max_coordinate_bits: bits(start) };
    visit(start);
    queue.push_back(start.to_vec());
    while let Some(x) = queue.pop_front() {
        for i in 0..maps.len() {
            let y = apply(i, &x);
            if seen.insert(digest(&y)) {
                stats.visited += 1;
                stats.max_coordinate_bits = stats.max_coordinate_bits.max(bits(&y));
                if stats.visited > cap {
                    return (OrbitStatus::ExceededCap, stats);
                }
                visit(&y);
                queue.push_back(y);
            }
        }
    }
    (OrbitStatus::Finite, stats)
}

const ORBIT_PRIME: u64 = (1 << 61) - 1;

fn residue(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(ORBIT_PRIME)).try_into().expect("reduced")
}

/// More than `cap` residues in the orbit of `chi` mod `2^61 − 1`. Reduction
/// only merges points, so `true` proves the integer orbit exceeds `cap`.
fn exceeds_mod_prime(maps: &[IntMatrix], chi: &[BigInt], cap: usize) -> bool {
    let q = ORBIT_PRIME as u128;
    let reduced: Vec<Vec<Vec<u64>>> =
        maps.iter().map(|m| (0..m.rows()).map(|i| m.row(i).iter().map(residue).collect()).collect()).collect();
    let apply = |m: &Vec<Vec<u64>>, x: &[u64]| -> Vec<u64> {
        m.iter()
            .map(|row| (row.iter().zip(x).map(|(&a, &b)| a as u128 * b as u128 % q).sum::<u128>() % q) as u64)
            .collect()
    };
    let start: Vec<u64> = chi.iter().map(residue).collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        for m in &reduced {
            let y = apply(m, &x);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return true;
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    false
}

fn bfs_with(
    maps: &[IntMatrix],
    chi: &[BigInt],
    cap: usize,
    visit: &mut dyn FnMut(&[BigInt]),
) -> OrbitResult {
    if exceeds_mod_prime(maps, chi, cap) {
        let stats = FrontierStats { visited: cap + 1, max_coordinate_bits: None };
        return OrbitResult { status: OrbitStatus::ExceededCap, size: None, stats, members: None };
    }
    let (status, stats) = explore(maps, chi, cap, visit);
    if status == OrbitStatus::ExceededCap {
        return OrbitResult { status, size: None, stats, members: None };
    }
    // exact second pass; a digest collision can only shrink the first count
    match orbit_exact(maps, chi, cap) {
        Some(mut members) => {
            assert!(is_closed(maps, &members), "finite orbit failed closure check");
            members.sort();
            let stats = FrontierStats { visited: members.len(), ..stats };
            OrbitResult { status, size: Some(members.len()), stats, members: Some(members) }
        }
        None => OrbitResult {
            status: OrbitStatus::ExceededCap,
            size: None,
            stats: FrontierStats { visited: cap + 1, ..stats },
            members: None,
        },
    }
}

/// Breadth-first orbit of the integer character `chi`; `ExceededCap` once
/// more than `cap` distinct characters have been visited.
pub fn orbit_bfs(action: &MatrixAction, chi: &[BigInt], cap: usize) -> Result<OrbitResult, OracleError> {
    if chi.len() != action.dim() {
        return Err(OracleError::Dimension { expected: action.dim(), found: chi.len() });
    }
    if chi.iter().all(Zero::is_zero) {
        return Err(OracleError::ZeroCharacter);
    }
    let maps = integral_maps(action)?;
    Ok(bfs_with(&maps, chi, cap, &mut |_| {}))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleFailure {
    /// BFS closed on a character the engine places outside `A_fin`.
    FiniteOutside {
        #[serde(with = "crate::exact::intvec")]
        character: Vec<BigInt>,
        size: usize,
    },
    /// BFS did not close on a character the engine places inside `A_fin`.
    ExceededInside {
        #[serde(with = "crate::exact::intvec")]
        character: Vec<BigInt>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub norm_bound: u64,
    pub cap: usize,
    pub finite_orbit_subspace_dim: usize,
    pub characters_checked: usize,
    pub inside_finite_orbit_subspace: usize,
    pub finite_orbits: usize,
    pub exceeded_cap: usize,
    /// Orbit searches actually run; the rest were settled by scaling or by
    /// appearing in an earlier orbit.
    pub bfs_runs: usize,
    pub failures: Vec<OracleFailure>,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Primitive representative up to sign: `orbit(kχ) = k·orbit(χ)`.
fn class_key(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut out: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        out.iter_mut().for_each(|x| *x = -x.clone());
    }
    out
}

/// Every nonzero integer vector with `|χ|∞ ≤ bound`, lexicographic.
pub fn box_characters(r: usize, bound: u64) -> Vec<Vec<BigInt>> {
    let b = bound as i64;
    let mut out = Vec::new();
    let mut cur = vec![-b; r];
    loop {
        if cur.iter().any(|&x| x != 0) {
            out.push(cur.iter().map(|&x| BigInt::from(x)).collect());
        }
        let Some(pos) = (0..r).rev().find(|&i| cur[i] < b) else {
            return out;
        };
        cur[pos] += 1;
        cur[pos + 1..].iter_mut().for_each(|x| *x = -b);
    }
}

/// Checks the given characters against `A_fin`.
pub fn cross_validate_characters(
    action: &MatrixAction,
    characters: &[Vec<BigInt>],
    norm_bound: u64,
    cap: usize,
) -> Result<CrossValidation, OracleError> {
    let maps = integral_maps(action)?;
    let fin = finite_orbit_subspace(action);
    let bound = BigInt::from(norm_bound);
    let mut settled: BTreeMap<Vec<BigInt>, (OrbitStatus, Option<usize>)> = BTreeMap::new();
    let mut report = CrossValidation {
        norm_bound,
        cap,
        finite_orbit_subspace_dim: fin.dim(),
        characters_checked: 0,
        inside_finite_orbit_subspace: 0,
        finite_orbits: 0,
        exceeded_cap: 0,
        bfs_runs: 0,
        failures: Vec::new(),
    };
    for chi in characters {
        if chi.len() != action.dim() {
            return Err(OracleError::Dimension { expected: action.dim(), found: chi.len() });
        }
        if chi.iter().all(Zero::is_zero) {
            return Err(OracleError::ZeroCharacter);
        }
        let key = class_key(chi);
        let (status, size) = match settled.get(&key) {
            Some(&known) => known,
            None => {
                let mut in_box = Vec::new();
                let res = bfs_with(&maps, &key, cap, &mut |y| {
                    if y.iter().all(|x| x.abs() <= bound) {
                        in_box.push(class_key(y));
                    }
                });
                report.bfs_runs += 1;
                for k in in_box {
                    settled.insert(k, (res.status, res.size));
                }
                settled.insert(key, (res.status, res.size));
                (res.status, res.size)
            }
        };
        report.characters_checked += 1;
        let rational: Vec<BigRational> = chi.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let inside = fin.contains(&rational);
        if inside {
            report.inside_finite_orbit_subspace += 1;
        }
        match status {
            OrbitStatus::Finite => {
                report.finite_orbits += 1;
                if !inside {
                    report.failures.push(OracleFailure::FiniteOutside {
                        character: chi.clone(),
                        size: size.expect("finite orbits have a size"),
                    });
                }
            }
            OrbitStatus::ExceededCap => {
                report.exceeded_cap += 1;
                if inside {
                    report.failures.push(OracleFailure::ExceededInside { character: chi.clone() });
                }
            }
        }
    }
    Ok(report)
}

/// Every nonzero character in the box `|χ|∞ ≤ norm_bound`.
pub fn cross_validate(action: &MatrixAction, norm_bound: u64, cap: usize) -> Result<CrossValidation, OracleError> {
    let chars = box_characters(action.dim(), norm_bound);
    cross_validate_characters(action, &chars, norm_bound, cap)
}

/// A deterministic sample of `samples` characters spread evenly over the
/// box, always including the coordinate vectors.
pub fn spot_check(
    action: &MatrixAction,
    norm_bound: u64,
    cap: usize,
    samples: usize,
) -> Result<CrossValidation, OracleError> {
    let all = box_characters(action.dim(), norm_bound);
    let mut chosen: Vec<Vec<BigInt>> = (0..action.dim())
        .map(|i| (0..action.dim()).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let extra = samples.saturating_sub(chosen.len());
    if extra > 0 && !all.is_empty() {
        let stride = (all.len() / extra).max(1);
        chosen.extend(all.iter().skip(stride / 2).step_by(stride).take(extra).cloned());
    }
    cross_validate_characters(action, &chosen, norm_bound, cap)
}

/// One factor `K_{i,j}` of the shift-product example and the exponent of
/// the base automorphism by which a lattice point acts on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorIdentity {
    pub i: i64,
    pub j: i64,
    /// `j·i − i·j`, the exponent by which `(i,j)` acts on `K_{i,j}`.
    pub exponent: i64,
    /// A lattice point acting on `K_{i,j}` by a nonzero power.
    pub group_witness: [i64; 2],
    pub group_witness_exponent: i64,
}

/// `K_n`, the product of the factors `K_{i,j}` with `i + j ≥ n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub n: i64,
    pub factors: usize,
    /// A factor of `K_n` missing from `K_{n+1}`.
    pub dropped_factor: [i64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoE2 {
    pub box_radius: u32,
    pub identities: Vec<FactorIdentity>,
    pub chain: Vec<ChainLink>,
}

impl DemoE2 {
    /// Re-derives every identity and strict inclusion.
    pub fn verify(&self) -> bool {
        let b = self.box_radius as i64;
        let expected = (2 * b + 1) * (2 * b + 1) - 1;
        let ids_ok = self.identities.len() as i64 == expected
            && self.identities.iter().all(|f| {
                let exponent_on = |n: i64, m: i64| m * f.i - n * f.j;
                (f.i, f.j) != (0, 0)
                    && f.i.abs() <= b
                    && f.j.abs() <= b
                    && f.exponent == 0
                    && exponent_on(f.i, f.j) == 0
                    && exponent_on(f.group_witness[0], f.group_witness[1]) == f.group_witness_exponent
                    && f.group_witness_exponent != 0
            });
        let count = |n: i64| box_points(b).filter(|&(i, j)| i + j >= n).count();
        let chain_ok = self.chain.len() as i64 == b
            && self.chain.iter().enumerate().all(|(k, link)| {
                let [di, dj] = link.dropped_factor;
                link.n == k as i64 + 1
                    && link.factors == count(link.n)
                    && di + dj == link.n
                    && di.abs() <= b
                    && dj.abs() <= b
                    && count(link.n) > count(link.n + 1)
            });
        ids_ok && chain_ok
    }
}

fn box_points(b: i64) -> impl Iterator<Item = (i64, i64)> {
    (-b..=b).flat_map(move |i| (-b..=b).map(move |j| (i, j))).filter(|&p| p != (0, 0))
}

/// Certificates for the finitely generated ergodic `Z^2` action with no
/// ergodic element and no descending chain condition.
pub fn demo_e2(spec: ProductDemoSpec) -> DemoE2 {
    let b = spec.box_radius as i64;
    let identities = box_points(b)
        .map(|(i, j)| {
            let exponent_on = |n: i64, m: i64| m * i - n * j;
            let group_witness = if j != 0 { [i + 1, j] } else { [i, j + 1] };
            FactorIdentity {
                i,
                j,
                exponent: exponent_on(i, j),
                group_witness,
                group_witness_exponent: exponent_on(group_witness[0], group_witness[1]),
            }
        })
        .collect();
    let chain = (1..=b)
        .map(|n| ChainLink {
            n,
            factors: box_points(b).filter(|&(i, j)| i + j >= n).count(),
            dropped_factor: [n, 0],
        })
        .collect();
    DemoE2 { box_radius: spec.box_radius, identities, chain }
}
