//! Exact integer linear algebra for spectrum certification.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(a: &[i64], n: usize) -> usize {
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            a[i * n..(i + 1) * n]
                .iter()
                .map(|&x| BigInt::from(x))
                .collect()
        })
        .collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..n {
        let Some(piv) = (rank..n)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].abs())
        else {
            continue;
        };
        m.swap(rank, piv);
        let (top, rest) = m.split_at_mut(rank + 1);
        let prow = &top[rank];
        let p = prow[c].clone();
        rest.par_iter_mut().for_each(|row| {
            let f = row[c].clone();
            for j in c + 1..n {
                let v = &p * &row[j] - &f * &prow[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        });
        prev = p;
        rank += 1;
    }
    rank
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^28`, descending. Small enough that 128 products fit in a `u64` accumulator.
pub fn modular_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 28) - 1;
    while out.len() < count {
        if is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

fn reduce(a: &[i64], p: u64) -> Vec<u64> {
    a.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect()
}

/// Rank modulo `p`; never exceeds the rank over the rationals.
pub fn modular_rank(a: &[i64], n: usize, p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = (0..n).map(|i| reduce(&a[i * n..(i + 1) * n], p)).collect();
    let mut rank = 0;
    for c in 0..n {
        let Some(piv) = (rank..n).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][c], p - 2, p);
        for x in m[rank][c..].iter_mut() {
            *x = *x * inv % p;
        }
        let (top, rest) = m.split_at_mut(rank + 1);
        let prow = &top[rank];
        rest.par_iter_mut().for_each(|row| {
            let f = row[c];
            if f != 0 {
                let nf = p - f;
                for j in c..n {
                    row[j] = (row[j] + nf * prow[j]) % p;
                }
            }
        });
        rank += 1;
    }
    rank
}

fn matmul_mod(a: &[u64], b: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut bt = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            bt[j * n + i] = b[i * n + j];
        }
    }
    let mut out = vec![0u64; n * n];
    out.par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let ar = &a[i * n..(i + 1) * n];
            for (j, o) in row.iter_mut().enumerate() {
                let bc = &bt[j * n..(j + 1) * n];
                let mut acc = 0u64;
                for (chunk_a, chunk_b) in ar.chunks(128).zip(bc.chunks(128)) {
                    let s: u64 = chunk_a.iter().zip(chunk_b).map(|(&x, &y)| x * y).sum();
                    acc = (acc + s % p) % p;
                }
                *o = acc;
            }
        });
    out
}

/// Certifies `prod_j (A - l_j I) = 0` over the integers by checking it modulo
/// enough primes that their product exceeds twice an entry bound of the product.
pub fn annihilates(a: &[i64], n: usize, lambdas: &[i64]) -> bool {
    if n == 0 || lambdas.is_empty() {
        return n == 0;
    }
    let max_abs = |l: i64| -> f64 {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (a[i * n + j] - if i == j { l } else { 0 }).unsigned_abs() as f64)
            .fold(0.0, f64::max)
    };
    let mut bits = 1.0;
    for (k, &l) in lambdas.iter().enumerate() {
        bits += max_abs(l).max(1.0).log2();
        if k > 0 {
            bits += (n as f64).log2();
        }
    }
    let nprimes = (bits / 27.0).ceil() as usize + 1;
    modular_primes(nprimes).into_iter().all(|p| {
        let factor = |l: i64| -> Vec<u64> {
            let mut f = reduce(a, p);
            for i in 0..n {
                f[i * n + i] = (f[i * n + i] + p - (l.rem_euclid(p as i64) as u64)) % p;
            }
            f
        };
        let mut acc = factor(lambdas[0]);
        for &l in &lambdas[1..] {
            acc = matmul_mod(&acc, &factor(l), n, p);
        }
        acc.iter().all(|&x| x == 0)
    })
}

/// Characteristic polynomial `det(xI - A)` modulo `p`, low degree first, via
/// reduction to Hessenberg form.
pub fn charpoly_mod(a: &[i64], n: usize, p: u64) -> Vec<u64> {
    let mut h: Vec<Vec<u64>> = (0..n).map(|i| reduce(&a[i * n..(i + 1) * n], p)).collect();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = pow_mod(h[j + 1][j], p - 2, p);
        for k in j + 2..n {
            let u = mul_mod(h[k][j], inv, p);
            if u == 0 {
                continue;
            }
            let (top, rest) = h.split_at_mut(k);
            let src = &top[j + 1];
            for (x, &y) in rest[0].iter_mut().zip(src) {
                *x = (*x + p - mul_mod(u, y, p)) % p;
            }
            for row in h.iter_mut() {
                row[j + 1] = (row[j + 1] + mul_mod(u, row[k], p)) % p;
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let prev = &polys[m - 1];
        let mut next = vec![0u64; m + 1];
        let diag = h[m - 1][m - 1];
        for (k, &c) in prev.iter().enumerate() {
            next[k + 1] = (next[k + 1] + c) % p;
            next[k] = (next[k] + p - mul_mod(diag, c, p)) % p;
        }
        let mut t = 1u64;
        for i in 1..m {
            t = mul_mod(t, h[m - i][m - i - 1], p);
            let f = mul_mod(t, h[m - i - 1][m - 1], p);
            if f == 0 {
                continue;
            }
            for (k, &c) in polys[m - i - 1].iter().enumerate() {
                next[k] = (next[k] + p - mul_mod(f, c, p)) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().expect("nonempty")
}
