//! Random commuting families with known ground truth.
//!
//! A family is block diagonal before a random unimodular change of basis.
//! Each block is either hyperbolic (powers of a 2×2 seed with no eigenvalue
//! on the unit circle), unipotent (polynomials in one nilpotent matrix,
//! possibly negated) or of finite order. Verdicts follow from the block
//! exponents alone, without touching the engines.

#![allow(dead_code)]

use ergodic_core::exact::RatMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<i64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n).map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

pub fn scale(a: &Mat, c: i64) -> Mat {
    a.iter().map(|row| row.iter().map(|x| x * c).collect()).collect()
}

/// `a^e` for a unimodular `a`; negative powers via the explicit inverse.
pub fn power(a: &Mat, e: i64) -> Mat {
    let base = if e < 0 { inverse_2x2(a) } else { a.clone() };
    (0..e.unsigned_abs()).fold(identity(a.len()), |acc, _| mul(&acc, &base))
}

fn inverse_2x2(a: &Mat) -> Mat {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    assert!(det.abs() == 1);
    vec![vec![a[1][1] * det, -a[0][1] * det], vec![-a[1][0] * det, a[0][0] * det]]
}

pub fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(Vec::len).sum();
    let mut out = vec![vec![0; n]; n];
    let mut at = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out[at + i][at + j] = *x;
            }
        }
        at += b.len();
    }
    out
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    (0..n * m).map(|i| (0..n * m).map(|j| a[i / m][j / m] * b[i % m][j % m]).collect()).collect()
}

pub fn to_rat(a: &Mat) -> RatMatrix {
    RatMatrix::from_fn(a.len(), a.len(), |i, j| BigRational::from_integer(BigInt::from(a[i][j])))
}

/// Product of random elementary matrices with entries in `{-1, 0, 1}`.
pub fn random_unimodular(rng: &mut impl Rng, r: usize) -> Mat {
    let mut p = identity(r);
    if r < 2 {
        return if rng.gen_bool(0.5) { p } else { scale(&p, -1) };
    }
    for _ in 0..r + 1 {
        let i = rng.gen_range(0..r);
        let mut j = rng.gen_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut e = identity(r);
        e[i][j] = c;
        p = mul(&e, &p);
    }
    p
}

pub fn conjugate_all(gens: &[Mat], p: &Mat) -> Vec<RatMatrix> {
    let pr = to_rat(p);
    let pinv = pr.inverse().expect("unimodular");
    gens.iter().map(|g| &(&pr * &to_rat(g)) * &pinv).collect()
}

/// Seeds `[[0,1],[s,t]]`: char poly `x^2 - t x - s`, real roots off the
/// unit circle.
pub fn hyperbolic_seed(rng: &mut impl Rng) -> Mat {
    let (s, t) = *[(1, 1), (1, -1), (1, 3), (-1, 3), (1, -3), (-1, -3), (1, 4), (-1, 4), (-1, -4)]
        .choose(rng)
        .expect("nonempty");
    vec![vec![0, 1], vec![s, t]]
}

pub fn random_nilpotent(rng: &mut impl Rng, k: usize) -> Mat {
    (0..k).map(|i| (0..k).map(|j| if j > i { rng.gen_range(-2..=2) } else { 0 }).collect()).collect()
}

/// `±(I + c1 N + c2 N^2 + …)`.
pub fn unipotent_in(rng: &mut impl Rng, n: &Mat, allow_sign: bool) -> Mat {
    let k = n.len();
    let mut out = identity(k);
    let mut np = identity(k);
    for _ in 1..k {
        np = mul(&np, n);
        out = add(&out, &scale(&np, rng.gen_range(-2..=2)));
    }
    if allow_sign && rng.gen_bool(0.5) {
        scale(&out, -1)
    } else {
        out
    }
}

pub const FINITE_ORDER: [(&[[i64; 2]; 2], u32); 3] =
    [(&[[0, -1], [1, 0]], 4), (&[[0, -1], [1, -1]], 3), (&[[0, 1], [-1, 1]], 6)];

#[derive(Debug, Clone)]
pub enum Block {
    /// Exponent of the seed in each generator.
    Hyperbolic { seed: Mat, exponents: Vec<i64> },
    Unipotent { size: usize },
    Finite,
}

#[derive(Debug, Clone)]
pub struct Family {
    pub r: usize,
    pub blocks: Vec<Block>,
    pub generators: Vec<RatMatrix>,
    pub change_of_basis: Mat,
}

impl Family {
    fn block_exponents(&self, exps: &[i64]) -> Vec<Option<i64>> {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Hyperbolic { exponents, .. } => Some(exponents.iter().zip(exps).map(|(e, n)| e * n).sum()),
                _ => None,
            })
            .collect()
    }

    /// Ergodic iff every block is hyperbolic with a nonzero total exponent.
    pub fn element_ergodic(&self, exps: &[i64]) -> bool {
        self.block_exponents(exps).iter().all(|e| e.is_some_and(|e| e != 0))
    }

    /// Distal iff no hyperbolic block moves.
    pub fn element_distal(&self, exps: &[i64]) -> bool {
        self.block_exponents(exps).iter().all(|e| e.is_none_or(|e| e == 0))
    }

    pub fn group_ergodic(&self) -> bool {
        self.blocks.iter().all(|b| matches!(b, Block::Hyperbolic { exponents, .. } if exponents.iter().any(|&e| e != 0)))
    }

    pub fn group_distal(&self) -> bool {
        self.blocks.iter().all(|b| match b {
            Block::Hyperbolic { exponents, .. } => exponents.iter().all(|&e| e == 0),
            _ => true,
        })
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }
}

/// A family on `r ≤ max_r` with `1..=max_gens` generators.
pub fn random_family(rng: &mut impl Rng, max_r: usize, max_gens: usize) -> Family {
    let gens = rng.gen_range(1..=max_gens);
    let target = rng.gen_range(2..=max_r.max(2));
    let mut blocks = Vec::new();
    let mut per_gen: Vec<Vec<Mat>> = vec![Vec::new(); gens];
    let mut r = 0;
    while r < target {
        let room = target - r;
        let choice = rng.gen_range(0..10);
        if room >= 2 && choice < 6 {
            let seed = hyperbolic_seed(rng);
            let exponents: Vec<i64> = (0..gens).map(|_| rng.gen_range(-2..=2)).collect();
            for (g, e) in per_gen.iter_mut().zip(&exponents) {
                g.push(power(&seed, *e));
            }
            blocks.push(Block::Hyperbolic { seed, exponents });
            r += 2;
        } else if room >= 2 && choice < 8 {
            let (m, order) = FINITE_ORDER.choose(rng).expect("nonempty");
            let base: Mat = m.iter().map(|row| row.to_vec()).collect();
            for g in per_gen.iter_mut() {
                g.push(power(&base, rng.gen_range(0..*order) as i64));
            }
            blocks.push(Block::Finite);
            r += 2;
        } else {
            let size = rng.gen_range(1..=room.min(3));
            let n = random_nilpotent(rng, size);
            for g in per_gen.iter_mut() {
                g.push(unipotent_in(rng, &n, true));
            }
            blocks.push(Block::Unipotent { size });
            r += size;
        }
    }
    let p = random_unimodular(rng, r);
    let mats: Vec<Mat> = per_gen.iter().map(|bs| block_diag(bs)).collect();
    Family { r, blocks, generators: conjugate_all(&mats, &p), change_of_basis: p }
}

/// Commuting unipotent generators `I + c1 N + …` in one random nilpotent `N`,
/// on `r ≤ max_r` coordinates.
pub fn random_unipotent_family(rng: &mut impl Rng, max_r: usize, max_gens: usize) -> Vec<RatMatrix> {
    let r = rng.gen_range(1..=max_r);
    let gens = rng.gen_range(1..=max_gens);
    let n = random_nilpotent(rng, r);
    let mats: Vec<Mat> = (0..gens).map(|_| unipotent_in(rng, &n, false)).collect();
    conjugate_all(&mats, &random_unimodular(rng, r))
}

/// `α = S ⊗ I_k` ergodic and `β = I_2 ⊗ U` quasi-unipotent, commuting,
/// on `r = 2k ≤ 6`.
pub fn random_ergodic_distal_pair(rng: &mut impl Rng) -> (RatMatrix, RatMatrix) {
    let k = rng.gen_range(1..=3);
    let s = hyperbolic_seed(rng);
    let u = if k == 2 && rng.gen_bool(0.5) {
        let (m, order) = FINITE_ORDER.choose(rng).expect("nonempty");
        let base: Mat = m.iter().map(|row| row.to_vec()).collect();
        power(&base, rng.gen_range(1..*order) as i64)
    } else {
        let n = random_nilpotent(rng, k);
        unipotent_in(rng, &n, true)
    };
    let alpha = kron(&s, &identity(k));
    let beta = kron(&identity(2), &u);
    let p = random_unimodular(rng, 2 * k);
    let out = conjugate_all(&[alpha, beta], &p);
    (out[0].clone(), out[1].clone())
}

/// Exponent vectors in `[-bound, bound]^n`, excluding zero.
pub fn random_exponents(rng: &mut impl Rng, n: usize, bound: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}
