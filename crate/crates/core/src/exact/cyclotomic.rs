//! Euler's totient, cyclotomic polynomials and the uniform root-of-unity
//! exponent `M*(r)`.

use std::collections::BTreeMap;

use num_integer::Integer;

use super::poly::IntPoly;
use crate::error::{ExactError, ExactResult};

pub fn euler_phi(d: i64) -> ExactResult<u64> {
    if d <= 0 {
        return Err(ExactError::Domain(format!("euler_phi needs d >= 1, got {d}")));
    }
    let mut n = d as u64;
    let mut phi = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    Ok(phi)
}

/// Every `d >= 1` with `phi(d) <= r`, ascending.
///
/// Since `phi(d) >= sqrt(d / 2)`, scanning `d <= 2 r^2 + 1` is exhaustive.
pub fn cyclotomic_orders(r: usize) -> Vec<u64> {
    let bound = 2 * (r as u64) * (r as u64) + 1;
    (1..=bound)
        .filter(|&d| euler_phi(d as i64).is_ok_and(|p| p <= r as u64))
        .collect()
}

/// `lcm{ d : phi(d) <= r }`: every root-of-unity eigenvalue of an `r x r`
/// rational matrix has order dividing this.
pub fn m_star(r: usize) -> ExactResult<u64> {
    if r == 0 {
        return Err(ExactError::Domain("m_star needs r >= 1".into()));
    }
    cyclotomic_orders(r).into_iter().try_fold(1u64, |acc, d| {
        let g = acc.gcd(&d);
        (acc / g).checked_mul(d).ok_or(ExactError::Overflow("m_star"))
    })
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The `d`-th cyclotomic polynomial, by dividing `x^d - 1` by `Phi_e` for
/// every proper divisor `e` of `d`.
pub fn cyclotomic(d: u64) -> ExactResult<IntPoly> {
    if d == 0 {
        return Err(ExactError::Domain("cyclotomic needs d >= 1".into()));
    }
    let mut table: BTreeMap<u64, IntPoly> = BTreeMap::new();
    for e in divisors(d) {
        let mut p = IntPoly::x_pow_minus_one(e as usize);
        for f in divisors(e).into_iter().filter(|&f| f < e) {
            let (q, rem) = p.div_rem_monic(&table[&f]);
            debug_assert!(rem.is_zero());
            p = q;
        }
        table.insert(e, p);
    }
    Ok(table.remove(&d).expect("d divides itself"))
}
