mod common;

use ergodic_core::exact::{
    bivar_common_factor, char_poly, cyclotomic, kernel, laurent_divides, laurent_gcd_1d, poly_gcd, rat, LaurentPoly,
    RatMatrix, RatPoly,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn rat_poly(c: &[i64]) -> RatPoly {
    RatPoly::from_i64(c)
}

fn matrix(n: usize, entries: &[i64]) -> RatMatrix {
    RatMatrix::from_fn(n, n, |i, j| rat(entries[i * n + j]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn char_poly_is_a_similarity_invariant(seed in any::<u64>(), n in 1usize..=5, entries in prop::collection::vec(-4i64..=4, 25)) {
        let a = matrix(n, &entries);
        let p = common::to_rat(&common::random_unimodular(&mut common::rng(seed), n));
        let conj = &(&p.inverse().unwrap() * &a) * &p;
        prop_assert_eq!(char_poly(&a).unwrap(), char_poly(&conj).unwrap());
    }

    #[test]
    fn gcd_divides_and_absorbs_common_divisors(
        f in prop::collection::vec(-5i64..=5, 1..5),
        g in prop::collection::vec(-5i64..=5, 1..5),
        c in prop::collection::vec(-3i64..=3, 1..3),
    ) {
        let c = rat_poly(&c);
        prop_assume!(!c.is_zero());
        let f = &rat_poly(&f) * &c;
        let g = &rat_poly(&g) * &c;
        prop_assume!(!f.is_zero() || !g.is_zero());
        let d = poly_gcd(&f, &g).unwrap();
        prop_assert!(d.is_monic());
        prop_assert!(f.is_zero() || d.divides(&f));
        prop_assert!(g.is_zero() || d.divides(&g));
        prop_assert!(c.divides(&d));
    }

    #[test]
    fn kernel_has_complementary_dimension(n in 1usize..=5, m in 1usize..=5, entries in prop::collection::vec(-2i64..=2, 25)) {
        let a = RatMatrix::from_fn(n, m, |i, j| rat(entries[i * 5 + j] * ((i + j) % 3) as i64));
        let k = kernel(&a);
        prop_assert_eq!(k.dim() + a.rank(), m);
        for v in k.basis() {
            prop_assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn laurent_division_reconstructs_the_dividend(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        gt in prop::collection::vec((0i64..3, -1i64..2, -3i64..=3), 1..5),
        qt in prop::collection::vec((-1i64..3, 0i64..2, -3i64..=3), 1..5),
    ) {
        let g = LaurentPoly::from_terms(p, 2, gt.iter().map(|&(a, b, c)| (vec![a, b], c))).unwrap();
        let q = LaurentPoly::from_terms(p, 2, qt.iter().map(|&(a, b, c)| (vec![a, b], c))).unwrap();
        prop_assume!(!g.is_zero() && !q.is_zero());
        let h = g.mul(&q);
        let found = laurent_divides(&g, &h).unwrap().expect("g divides g·q");
        prop_assert_eq!(found.mul(&g), h.clone());
        let bumped = h.add(&LaurentPoly::monomial(p, vec![7, 7], 1));
        if let Some(q2) = laurent_divides(&g, &bumped).unwrap() {
            prop_assert_eq!(q2.mul(&g), bumped);
        }
    }

    #[test]
    fn bivariate_factor_matches_one_variable_gcd(
        p in prop::sample::select(vec![2u64, 3, 5]),
        f in prop::collection::vec(-2i64..=2, 1..6),
        g in prop::collection::vec(-2i64..=2, 1..6),
    ) {
        let one = |c: &[i64]| LaurentPoly::from_terms(p, 1, c.iter().enumerate().map(|(i, &x)| (vec![i as i64], x))).unwrap();
        let two = |c: &[i64]| LaurentPoly::from_terms(p, 2, c.iter().enumerate().map(|(i, &x)| (vec![i as i64, 0], x))).unwrap();
        let (f1, g1) = (one(&f), one(&g));
        prop_assume!(!f1.is_zero() && !g1.is_zero());
        let shared = !laurent_gcd_1d(&f1, &g1).unwrap().is_unit();
        let cf = bivar_common_factor(&two(&f), &two(&g)).unwrap();
        prop_assert_eq!(cf.exists(), shared);
        let swapped = bivar_common_factor(&two(&f).swap_vars(), &two(&g).swap_vars()).unwrap();
        prop_assert_eq!(swapped.exists(), shared);
    }
}

#[test]
fn cyclotomic_products_give_x_to_the_n_minus_one() {
    for n in 1..=30u64 {
        let product = (1..=n)
            .filter(|d| n % d == 0)
            .fold(RatPoly::one(), |acc, d| &acc * &RatPoly::from_int(&cyclotomic(d).unwrap()));
        assert_eq!(product, RatPoly::x_pow_minus_one(n as usize), "n = {n}");
    }
}

#[test]
fn rational_entries_survive_serialization() {
    let m = RatMatrix::from_fn(2, 2, |i, j| BigRational::new(BigInt::from(i as i64 - 1), BigInt::from(j as i64 + 2)));
    let text = serde_json::to_string(&m).unwrap();
    let back: RatMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
}
