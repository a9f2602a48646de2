//! Spectra of the line/`n`-space incidence graphs.
//!
//! Three routes to the same table: the closed formulas, the recursive Kronecker
//! construction of the squared adjacency restricted to lines, and the squared
//! adjacency read off an explicit graph. Eigenvalues of the bipartite graph are
//! stored squared, so `2 sqrt 2` is kept as the integer 8.

pub mod exact;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::ComplexGraph;
use crate::graph::AbstractGraph;
use crate::linalg::{count_spaces, q_binom, q_number, qcomb};

pub const DEFAULT_GAMMA_CAP: usize = 4096;
/// Largest size for which ranks are computed by Bareiss elimination over the integers.
pub const BAREISS_LIMIT: usize = 160;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("need 2 <= n <= d - 1, got d = {d}, n = {n}")]
    BadParameters { d: u32, n: u32 },
    #[error("matrix of size {size} exceeds the cap {cap}")]
    CapExceeded { size: u64, cap: usize },
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("eigenvalue {0} is not within 1e-6 of an integer")]
    NonIntegerEigenvalue(f64),
    #[error("larger side has {left} vertices but the other side only {right}")]
    SidesOutOfOrder { left: u64, right: u64 },
    #[error("exact verification failed: {0}")]
    VerificationFailed(String),
    #[error("graph entry ({0}, {1}) is {2}, expected {3} from the intersection type")]
    EntryMismatch(u32, u32, i64, i64),
    #[error("graph is not an incidence graph between lines and one other color")]
    NotLineIncidence,
    #[error("graph does not have exactly two colors")]
    NotBipartite,
}

fn to_u64(x: BigUint) -> Result<u64, SpectraError> {
    qcomb::to_u64(&x).ok_or(SpectraError::Overflow)
}

fn check_params(d: u32, n: u32) -> Result<(), SpectraError> {
    if n < 2 || n >= d {
        return Err(SpectraError::BadParameters { d, n });
    }
    Ok(())
}

/// Common-neighbor counts `s_0 > s_1 > ... > s_r` for two lines meeting in `p^i`.
pub fn s_values(d: u32, n: u32, q: u64, r: u32) -> Result<Vec<u64>, SpectraError> {
    check_params(d, n)?;
    let mut out = vec![to_u64(count_spaces(n - 1, d - 1, q, r))?];
    let base = count_spaces(n - 2, d - 2, q, r);
    for i in 1..=r {
        out.push(to_u64(&base * BigUint::from(q).pow((r - i) * (d - n)))?);
    }
    Ok(out)
}

/// Number of lines meeting a fixed line in `p^i`, for `i = 0..=r`.
pub fn intersection_counts(d: u32, q: u64, r: u32) -> Result<Vec<u64>, SpectraError> {
    let mut out = vec![1u64];
    let qd = |e: u32| BigUint::from(q).pow(e);
    for i in 1..r {
        out.push(to_u64(qd(i * (d - 1)) - qd((i - 1) * (d - 1)))?);
    }
    if r >= 1 {
        out.push(to_u64(count_spaces(1, d, q, r) - qd((r - 1) * (d - 1)))?);
    }
    Ok(out)
}

/// Dense symmetric integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaMatrix {
    n: usize,
    data: Vec<i64>,
}

impl GammaMatrix {
    pub fn from_vec(n: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), n * n);
        GammaMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn check_symmetric(&self) -> Result<(), SpectraError> {
        for i in 0..self.n {
            for j in 0..i {
                if self.get(i, j) != self.get(j, i) {
                    return Err(SpectraError::NotSymmetric(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.get(i, i) as i128).sum()
    }

    /// `tr(G^2)`, the sum of squared entries for symmetric `G`.
    pub fn trace_of_square(&self) -> i128 {
        self.data.iter().map(|&x| (x as i128) * (x as i128)).sum()
    }

    /// Entries of every row as a sorted multiset.
    pub fn row_profiles(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.sort_unstable();
                r
            })
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }
}

/// The recursive Kronecker construction, with `s_r` at the root.
pub fn gamma2_recursive(
    d: u32,
    n: u32,
    q: u64,
    r: u32,
    cap: usize,
) -> Result<GammaMatrix, SpectraError> {
    let s = s_values(d, n, q, r)?;
    let size = to_u64(count_spaces(1, d, q, r))?;
    if size > cap as u64 {
        return Err(SpectraError::CapExceeded { size, cap });
    }
    let r = r as usize;
    let mut g = GammaMatrix {
        n: 1,
        data: vec![s[r] as i64],
    };
    for i in (0..r).rev() {
        let block = if i == r - 1 {
            to_u64(q_number(d, q))?
        } else {
            q.pow(d - 1)
        } as usize;
        let m = g.n * block;
        let mut data = vec![0i64; m * m];
        for a in 0..m {
            for b in 0..m {
                data[a * m + b] = g.get(a / block, b / block);
            }
            data[a * m + a] += s[i] as i64 - s[i + 1] as i64;
        }
        g = GammaMatrix { n: m, data };
    }
    Ok(g)
}

/// Index of the `s` value at position `(i, j)` of the recursive matrix.
pub fn delta(i: usize, j: usize, d: u32, q: u64, r: u32) -> u32 {
    (0..r)
        .find(|&k| i / q.pow(k * (d - 1)) as usize == j / q.pow(k * (d - 1)) as usize)
        .unwrap_or(r)
}

/// Common-neighbor counts between the given vertices, through vertices of `through` color.
pub fn gamma2_from_abstract(g: &AbstractGraph, left: &[u32], through: u32) -> GammaMatrix {
    let n = left.len();
    let rows: Vec<Vec<i64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| g.common_neighbors(left[i], left[j], Some(through)) as i64)
                .collect()
        })
        .collect();
    GammaMatrix {
        n,
        data: rows.concat(),
    }
}

/// Squared adjacency restricted to lines, checking each entry against the
/// intersection type of the two lines.
pub fn gamma2_from_graph(g: &ComplexGraph) -> Result<GammaMatrix, SpectraError> {
    let [1, n] = g.colors() else {
        return Err(SpectraError::NotLineIncidence);
    };
    let n = *n;
    let spec = g.spec();
    let s = s_values(spec.d(), n, spec.q(), spec.r())?;
    let lines: Vec<u32> = (0..g.layer(1).len()).map(|i| g.global_id(1, i)).collect();
    let gamma = gamma2_from_abstract(g.graph(), &lines, n);
    let ring = spec.ring();
    let r = spec.r();
    let bad = (0..lines.len()).into_par_iter().find_map_any(|i| {
        (0..i).find_map(|j| {
            let meet = g.module(lines[i]).intersect(ring, g.module(lines[j]));
            // a line meets another line in p^k, a module of log-size r - k
            let k = r - meet.log_q_size();
            let expected = s[k as usize] as i64;
            (gamma.get(i, j) != expected).then_some((lines[i], lines[j], gamma.get(i, j), expected))
        })
    });
    if let Some((a, b, got, want)) = bad {
        return Err(SpectraError::EntryMismatch(a, b, got, want));
    }
    Ok(gamma)
}

/// Squared nonzero eigenvalues with multiplicities, plus the zero count.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectrumTable {
    /// `(lambda^2, multiplicity)`, largest first; each stands for `+-lambda`.
    pub lambda_squared: Vec<(u64, u64)>,
    pub zeros: u64,
    /// `(|smaller side|, |larger side|)`
    pub sides: (u64, u64),
}

impl SpectrumTable {
    fn from_map(map: BTreeMap<u64, u64>, zeros: u64, sides: (u64, u64)) -> Self {
        let lambda_squared = map
            .into_iter()
            .rev()
            .filter(|&(l, m)| l > 0 && m > 0)
            .collect();
        SpectrumTable {
            lambda_squared,
            zeros,
            sides,
        }
    }

    pub fn eigenvalue_count(&self) -> u64 {
        2 * self.lambda_squared.iter().map(|&(_, m)| m).sum::<u64>() + self.zeros
    }

    pub fn top(&self) -> Option<u64> {
        self.lambda_squared.first().map(|&(l, _)| l)
    }

    pub fn second(&self) -> Option<u64> {
        self.lambda_squared.get(1).map(|&(l, _)| l)
    }

    /// `sum mult * lambda^2`, which is `tr(Gamma)`.
    pub fn power_sum(&self, k: u32) -> u128 {
        self.lambda_squared
            .iter()
            .map(|&(l, m)| m as u128 * (l as u128).pow(k))
            .sum()
    }

    /// All adjacency eigenvalues as floats, descending.
    pub fn eigenvalues_f64(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &(l, m) in &self.lambda_squared {
            out.extend(std::iter::repeat_n((l as f64).sqrt(), m as usize));
        }
        out.extend(std::iter::repeat_n(0.0, self.zeros as usize));
        for &(l, m) in self.lambda_squared.iter().rev() {
            out.extend(std::iter::repeat_n(-(l as f64).sqrt(), m as usize));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda_squared": self.lambda_squared.iter().map(|&(l, m)| [l, m]).collect::<Vec<_>>(),
            "zeros": self.zeros,
            "sides": [self.sides.0, self.sides.1],
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<16}{}\n", "eigenvalue", "multiplicity");
        for &(l, m) in &self.lambda_squared {
            out.push_str(&format!("{:<16}{m}\n", format!("+-sqrt({l})")));
        }
        out.push_str(&format!("{:<16}{}\n", "0", self.zeros));
        out
    }
}

/// The four-row table for the adjacency spectrum of the line/`n`-space graph.
///
/// Exponents are those forced by the degrees: the top eigenvalue squared is
/// `S_{n-1}^{d-1} * S_1^n`.
pub fn closed_spectrum(d: u32, n: u32, q: u64, r: u32) -> Result<SpectrumTable, SpectraError> {
    check_params(d, n)?;
    closed_table(
        d,
        n,
        q,
        r,
        (r - 1) * (n - 1) * (d - n + 1),
        (n - 1) * (r - 1) * (d - n),
    )
}

/// The same table with the exponents `(r-1)((d-1)^2-(d-1)n+2n-2)` and
/// `(d-2)(r-1)(d-n)` in the top and common factors. It differs from
/// [`closed_spectrum`] by the factor `q^((r-1)(d-n)(d-n-1))` on every row,
/// so the two agree exactly when `n = d - 1` or `r = 1`.
pub fn closed_spectrum_as_printed(
    d: u32,
    n: u32,
    q: u64,
    r: u32,
) -> Result<SpectrumTable, SpectraError> {
    check_params(d, n)?;
    let (d1, r1) = (d - 1, r - 1);
    closed_table(
        d,
        n,
        q,
        r,
        r1 * (d1 * d1 - d1 * n + 2 * n - 2),
        (d - 2) * r1 * (d - n),
    )
}

fn closed_table(
    d: u32,
    n: u32,
    q: u64,
    r: u32,
    top_exp: u32,
    common_exp: u32,
) -> Result<SpectrumTable, SpectraError> {
    let qp = |e: u32| BigUint::from(q).pow(e);
    let d1 = d - 1;
    let top = q_binom(d - 1, n - 1, q) * q_number(n, q) * qp(top_exp);
    let common = q_binom(d - 2, n - 1, q) * qp(common_exp);
    let second = &common * qp(r * (n - 1));
    let mut map = BTreeMap::new();
    *map.entry(to_u64(top)?).or_insert(0) += 1;
    *map.entry(to_u64(second)?).or_insert(0) += to_u64(q_number(d, q))? - 1;
    for k in 0..r.saturating_sub(1) {
        let l = to_u64(&common * qp((k + 1) * (n - 1)))?;
        let mult = to_u64(qp((r - 2 - k) * d1) * (qp(d1) - 1u32) * q_number(d, q))?;
        *map.entry(l).or_insert(0) += mult;
    }
    let left = to_u64(count_spaces(1, d, q, r))?;
    let right = to_u64(count_spaces(n, d, q, r))?;
    if right < left {
        return Err(SpectraError::SidesOutOfOrder { left, right });
    }
    Ok(SpectrumTable::from_map(map, right - left, (left, right)))
}

/// Eigenvalues of the recursive matrix evaluated symbolically from the `s` values.
pub fn gamma_sum_spectrum(d: u32, n: u32, q: u64, r: u32) -> Result<SpectrumTable, SpectraError> {
    let s = s_values(d, n, q, r)?;
    let qd1 = |i: u32| q.pow(i * (d - 1)) as i128;
    let partial = |k: u32| -> i128 {
        (0..=k)
            .map(|i| qd1(i) * (s[i as usize] as i128 - s[i as usize + 1] as i128))
            .sum()
    };
    let qn = to_u64(q_number(d, q))?;
    let mut map: BTreeMap<u64, u64> = BTreeMap::new();
    let mut add = |l: i128, m: u64| {
        *map.entry(u64::try_from(l).expect("eigenvalue is non-negative"))
            .or_insert(0) += m;
    };
    add(
        qd1(r - 1) * qn as i128 * s[r as usize] as i128 + partial(r - 1),
        1,
    );
    add(partial(r - 1), qn - 1);
    for k in 0..r.saturating_sub(1) {
        add(partial(k), (qd1(r - 2 - k) * (qd1(1) - 1)) as u64 * qn);
    }
    let zero_eig = map.remove(&0).unwrap_or(0);
    let left = to_u64(count_spaces(1, d, q, r))?;
    let right = to_u64(count_spaces(n, d, q, r))?;
    Ok(SpectrumTable::from_map(
        map,
        right - left + zero_eig,
        (left, right),
    ))
}

/// Float eigenvalues of a symmetric matrix, descending.
pub fn float_eigenvalues(g: &GammaMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = g
        .to_f64()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Float adjacency spectrum of a graph, descending.
pub fn adjacency_eigenvalues(g: &AbstractGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if g.has_edge(i as u32, j as u32) {
            1.0
        } else {
            0.0
        }
    });
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Exact multiplicities of the given candidate eigenvalues, certified: the
/// product of `(G - l I)` over the candidates vanishes, so the spectrum lies
/// among them, and the kernel dimensions add up to the size.
pub fn certify_eigenvalues(
    g: &GammaMatrix,
    candidates: &[i64],
) -> Result<BTreeMap<i64, u64>, SpectraError> {
    let n = g.size();
    if !exact::annihilates(g.data(), n, candidates) {
        return Err(SpectraError::VerificationFailed(format!(
            "candidates {candidates:?} do not annihilate the matrix"
        )));
    }
    let shifted = |l: i64| -> Vec<i64> {
        let mut a = g.data().to_vec();
        for i in 0..n {
            a[i * n + i] -= l;
        }
        a
    };
    if n <= BAREISS_LIMIT {
        let out: BTreeMap<i64, u64> = candidates
            .iter()
            .map(|&l| (l, (n - exact::bareiss_rank(&shifted(l), n)) as u64))
            .collect();
        let total: u64 = out.values().sum();
        if total != n as u64 {
            return Err(SpectraError::VerificationFailed(format!(
                "kernel dimensions sum to {total}, not {n}"
            )));
        }
        return Ok(out);
    }
    // Modular nullity bounds the true nullity from above; once the sum is n the
    // bounds are attained because the true nullities of a diagonalizable matrix
    // annihilated by the candidates also sum to n.
    for p in exact::modular_primes(4) {
        let out: BTreeMap<i64, u64> = candidates
            .iter()
            .map(|&l| (l, (n - exact::modular_rank(&shifted(l), n, p)) as u64))
            .collect();
        if out.values().sum::<u64>() == n as u64 {
            return Ok(out);
        }
    }
    Err(SpectraError::VerificationFailed(
        "modular kernel dimensions never summed to the size".into(),
    ))
}

/// Integer candidates from a float eigensolver.
pub fn candidate_eigenvalues(g: &GammaMatrix) -> Result<Vec<i64>, SpectraError> {
    let mut out: Vec<i64> = Vec::new();
    for ev in float_eigenvalues(g) {
        let rounded = ev.round();
        if (ev - rounded).abs() > 1e-6 * ev.abs().max(1.0) {
            return Err(SpectraError::NonIntegerEigenvalue(ev));
        }
        if out.last() != Some(&(rounded as i64)) {
            out.push(rounded as i64);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Bipartite spectrum from the squared adjacency restricted to the smaller side.
/// `other_side` is the size of the larger side.
pub fn spectrum_from_gamma(
    g: &GammaMatrix,
    other_side: u64,
) -> Result<SpectrumTable, SpectraError> {
    g.check_symmetric()?;
    let candidates = candidate_eigenvalues(g)?;
    spectrum_from_gamma_with(g, other_side, &candidates)
}

/// As [`spectrum_from_gamma`], with the candidate eigenvalues supplied.
pub fn spectrum_from_gamma_with(
    g: &GammaMatrix,
    other_side: u64,
    candidates: &[i64],
) -> Result<SpectrumTable, SpectraError> {
    g.check_symmetric()?;
    let left = g.size() as u64;
    if other_side < left {
        return Err(SpectraError::SidesOutOfOrder {
            left,
            right: other_side,
        });
    }
    let mults = certify_eigenvalues(g, candidates)?;
    let mut map = BTreeMap::new();
    let mut kernel = 0;
    for (l, m) in mults {
        if l < 0 && m > 0 {
            return Err(SpectraError::VerificationFailed(format!(
                "negative eigenvalue {l}"
            )));
        }
        if l == 0 {
            kernel += m;
        } else if m > 0 {
            map.insert(l as u64, m);
        }
    }
    Ok(SpectrumTable::from_map(
        map,
        other_side - left + kernel,
        (left, other_side),
    ))
}

/// Largest deviation between the float eigenvalues of `g` and a table, both
/// divided by the top eigenvalue.
pub fn float_deviation(g: &GammaMatrix, table: &SpectrumTable) -> f64 {
    let ev = float_eigenvalues(g);
    let mut exact: Vec<f64> = Vec::new();
    for &(l, m) in &table.lambda_squared {
        exact.extend(std::iter::repeat_n(l as f64, m as usize));
    }
    exact.resize(ev.len(), 0.0);
    let top = exact.first().copied().unwrap_or(1.0).max(1.0);
    ev.iter()
        .zip(&exact)
        .map(|(a, b)| ((a - b) / top).abs())
        .fold(0.0, f64::max)
}

/// Second normalized eigenvalue, exactly as `lambda_2^2 / lambda_1^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expansion {
    pub numerator: u64,
    pub denominator: u64,
    pub value: f64,
}

impl Expansion {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator)
    }
}

pub fn expansion_of(table: &SpectrumTable) -> Option<Expansion> {
    let (l1, l2) = (table.top()?, table.second()?);
    let ratio = Ratio::new(l2, l1);
    Some(Expansion {
        numerator: *ratio.numer(),
        denominator: *ratio.denom(),
        value: (l2 as f64 / l1 as f64).sqrt(),
    })
}

pub fn expansion(d: u32, n: u32, q: u64, r: u32) -> Result<Expansion, SpectraError> {
    expansion_of(&closed_spectrum(d, n, q, r)?).ok_or(SpectraError::BadParameters { d, n })
}

/// `[d-n]_q q^(n-1) / ([n]_q [d-1]_q)`, the squared expansion predicted independently of `r`.
pub fn expansion_formula(d: u32, n: u32, q: u64) -> Ratio<u64> {
    let num = to_u64(q_number(d - n, q) * BigUint::from(q).pow(n - 1)).expect("small");
    let den = to_u64(q_number(n, q) * q_number(d - 1, q)).expect("small");
    Ratio::new(num, den)
}

/// Checks `G[a][c] >= min(G[a][b], G[b][c])` for all ordered triples; returns the violation count.
pub fn ultrametric_violations(g: &GammaMatrix) -> u64 {
    let n = g.size();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut bad = 0;
            for b in 0..n {
                let ab = g.get(a, b);
                for c in 0..n {
                    if g.get(a, c) < ab.min(g.get(b, c)) {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum()
}

pub fn ultrametric_check(g: &GammaMatrix) -> bool {
    ultrametric_violations(g) == 0
}

/// Squared adjacency restricted to the smaller color class of a two-color
/// graph, with the size of the other class.
pub fn bipartite_gram(g: &ComplexGraph) -> Result<(GammaMatrix, u64), SpectraError> {
    let &[a, b] = g.colors() else {
        return Err(SpectraError::NotBipartite);
    };
    let (small, large) = if g.layer(a).len() <= g.layer(b).len() {
        (a, b)
    } else {
        (b, a)
    };
    let left: Vec<u32> = (0..g.layer(small).len())
        .map(|i| g.global_id(small, i))
        .collect();
    Ok((
        gamma2_from_abstract(g.graph(), &left, large),
        g.layer(large).len() as u64,
    ))
}

pub const COMPARISON_TOLERANCE: f64 = 1e-8;

/// Side-by-side spectra of two bipartite graphs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumComparison {
    pub sides: [(u64, u64); 2],
    pub float_tolerance: f64,
    pub float_max_deviation: f64,
    pub float_equal: bool,
    pub primes: Vec<u64>,
    pub charpoly_equal: Vec<bool>,
    /// Certified tables, when every eigenvalue of both sides is an integer.
    pub exact: Option<[SpectrumTable; 2]>,
    pub isospectral: bool,
}

/// Compares spectra through the smaller-side Gram matrices: float
/// eigenvalues normalized by the larger top value, characteristic polynomials
/// modulo `nprimes` primes, and certified tables when available.
pub fn compare_spectra(
    a: &(GammaMatrix, u64),
    b: &(GammaMatrix, u64),
    nprimes: usize,
) -> SpectrumComparison {
    let sides = [(a.0.size() as u64, a.1), (b.0.size() as u64, b.1)];
    let (ea, eb) = (float_eigenvalues(&a.0), float_eigenvalues(&b.0));
    let top = ea
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(eb.first().copied().unwrap_or(0.0))
        .max(1.0);
    let float_max_deviation = if ea.len() == eb.len() {
        ea.iter()
            .zip(&eb)
            .map(|(x, y)| (x - y).abs() / top)
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let float_equal = float_max_deviation <= COMPARISON_TOLERANCE;
    let primes = exact::modular_primes(nprimes);
    let charpoly_equal: Vec<bool> = primes
        .par_iter()
        .map(|&p| {
            sides[0].0 == sides[1].0
                && exact::charpoly_mod(a.0.data(), a.0.size(), p)
                    == exact::charpoly_mod(b.0.data(), b.0.size(), p)
        })
        .collect();
    let exact = match (
        spectrum_from_gamma(&a.0, a.1),
        spectrum_from_gamma(&b.0, b.1),
    ) {
        (Ok(x), Ok(y)) => Some([x, y]),
        _ => None,
    };
    let isospectral = sides[0] == sides[1]
        && float_equal
        && charpoly_equal.iter().all(|&e| e)
        && exact.as_ref().is_none_or(|[x, y]| x == y);
    SpectrumComparison {
        sides,
        float_tolerance: COMPARISON_TOLERANCE,
        float_max_deviation,
        float_equal,
        primes,
        charpoly_equal,
        exact,
        isospectral,
    }
}
