//! Exact q-analogues and the subspace-counting formulas built on them.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::ModuleType;

fn pow(q: u64, e: u64) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// `[n]_q = 1 + q + ... + q^(n-1)`
pub fn q_number(n: u32, q: u64) -> BigUint {
    (0..n).map(|i| pow(q, i as u64)).sum()
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`
pub fn q_factorial(n: u32, q: u64) -> BigUint {
    (1..=n).map(|i| q_number(i, q)).product()
}

/// Gaussian binomial coefficient; zero when `n > d`.
pub fn q_binom(d: u32, n: u32, q: u64) -> BigUint {
    if n > d {
        return BigUint::zero();
    }
    let num: BigUint = (0..n).map(|i| q_number(d - i, q)).product();
    num / q_factorial(n, q)
}

/// Number of free rank-`n` submodules of `O_r^d`.
pub fn count_spaces(n: u32, d: u32, q: u64, r: u32) -> BigUint {
    if n > d {
        return BigUint::zero();
    }
    q_binom(d, n, q) * pow(q, (r as u64 - 1) * n as u64 * (d - n) as u64)
}

/// Number of `n`-spaces contained in a module of the given type.
pub fn count_contained(n: u32, ty: &ModuleType, q: u64, r: u32) -> BigUint {
    let delta: u64 = ty.ks.iter().map(|&k| (r - k) as u64).sum();
    count_spaces(n, ty.m, q, r) * pow(q, n as u64 * delta)
}

/// Number of `n`-spaces of `O_r^d` containing a module of the given type.
pub fn count_containing(n: u32, ty: &ModuleType, d: u32, q: u64, r: u32) -> BigUint {
    let t = ty.ks.len() as u32;
    if ty.m + t > n || n > d {
        return BigUint::zero();
    }
    let ksum: u64 = ty.ks.iter().map(|&k| k as u64).sum();
    count_spaces(d - n, d - ty.m - t, q, r) * pow(q, (d - n) as u64 * ksum)
}

/// `|GL_d(O_r)| = prod_{i<d} (q^d - q^i) * q^(d^2 (r-1))`
pub fn gl_order(d: u32, q: u64, r: u32) -> BigUint {
    let qd = pow(q, d as u64);
    let base: BigUint = (0..d).map(|i| &qd - pow(q, i as u64)).product();
    base * pow(q, (d as u64).pow(2) * (r as u64 - 1))
}

pub fn to_u64(x: &BigUint) -> Option<u64> {
    u64::try_from(x).ok()
}

pub fn is_one(x: &BigUint) -> bool {
    x.is_one()
}
