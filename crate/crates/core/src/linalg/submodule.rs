use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{smith_normal_form, Matrix};
use crate::ring::{Ring, RingSpec};

/// Isomorphism type `O^m x p^k_1 x ... x p^k_t` with `0 < k_1 <= ... <= k_t < r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModuleType {
    pub m: u32,
    pub ks: Vec<u32>,
}

impl ModuleType {
    pub fn free(m: u32) -> Self {
        ModuleType { m, ks: vec![] }
    }

    /// From Smith diagonal valuations; values `>= r` are zero entries and dropped.
    pub fn from_valuations(vals: &[u32], r: u32) -> Self {
        let m = vals.iter().filter(|&&a| a == 0).count() as u32;
        let mut ks: Vec<u32> = vals.iter().copied().filter(|&a| a > 0 && a < r).collect();
        ks.sort_unstable();
        ModuleType { m, ks }
    }

    pub fn ngens(&self) -> u32 {
        self.m + self.ks.len() as u32
    }

    pub fn is_free(&self) -> bool {
        self.ks.is_empty()
    }

    /// `log_q |M|`
    pub fn log_size(&self, r: u32) -> u32 {
        r * self.m + self.ks.iter().map(|&k| r - k).sum::<u32>()
    }

    /// Type of the annihilator inside `O_r^d`.
    pub fn dual(&self, d: u32, r: u32) -> Self {
        let mut ks: Vec<u32> = self.ks.iter().map(|&k| r - k).collect();
        ks.sort_unstable();
        ModuleType {
            m: d - self.ngens(),
            ks,
        }
    }
}

impl fmt::Display for ModuleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.ks.iter().map(|k| k.to_string()).collect();
        write!(f, "({};{})", self.m, ks.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trichotomy {
    NotNGenerated,
    FreelyNGenerated,
    NGeneratedNotFree,
}

/// One row of a Howell form: leading column `col` holds `pi^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HowellRow {
    pub row: Vec<u32>,
    pub col: usize,
    pub k: u32,
}

/// Howell form of the row span: echelon, leading entries `pi^k`, entries above
/// a leading entry reduced modulo `p^k`, and every element of the span whose
/// first `j` coordinates vanish is a combination of rows leading after `j`.
/// The last property makes the form unique and membership a single pass.
pub fn howell_form<I>(ring: &Ring, d: usize, gens: I) -> Vec<HowellRow>
where
    I: IntoIterator,
    I::Item: AsRef<[u32]>,
{
    let r = ring.r();
    let mut pool: Vec<Vec<u32>> = gens
        .into_iter()
        .map(|g| g.as_ref().to_vec())
        .filter(|g| g.iter().any(|&x| x != 0))
        .collect();
    let mut out: Vec<HowellRow> = Vec::new();
    for c in 0..d {
        let best = pool
            .iter()
            .enumerate()
            .filter(|(_, row)| row[c] != 0)
            .min_by_key(|(i, row)| (ring.valuation(row[c]), *i))
            .map(|(i, _)| i);
        let Some(bi) = best else { continue };
        let mut piv = pool.swap_remove(bi);
        let k = ring.valuation(piv[c]);
        let w_inv = ring.inverse(ring.div_pi_pow(piv[c], k)).expect("unit part");
        for x in piv.iter_mut() {
            *x = ring.mul(*x, w_inv);
        }
        for row in pool.iter_mut() {
            if row[c] != 0 {
                let f = ring.div_pi_pow(row[c], k);
                for (x, &y) in row.iter_mut().zip(&piv) {
                    *x = ring.sub_mul(*x, f, y);
                }
            }
        }
        if k > 0 {
            let s = ring.pi_pow(r - k);
            pool.push(piv.iter().map(|&x| ring.mul(s, x)).collect());
        }
        pool.retain(|row| row.iter().any(|&x| x != 0));
        out.push(HowellRow {
            row: piv,
            col: c,
            k,
        });
    }
    for l in 0..out.len() {
        let (col, k) = (out[l].col, out[l].k);
        let (above, rest) = out.split_at_mut(l);
        let pivot_row = &rest[0].row;
        for h in above.iter_mut() {
            let e = h.row[col];
            let x = ring.quo_pi_pow(e, k);
            if x != 0 {
                for (a, &b) in h.row.iter_mut().zip(pivot_row) {
                    *a = ring.sub_mul(*a, x, b);
                }
            }
        }
    }
    out
}

fn howell_contains(ring: &Ring, howell: &[HowellRow], v: &[u32]) -> bool {
    let mut v = v.to_vec();
    for h in howell {
        let e = v[h.col];
        if e == 0 {
            continue;
        }
        if ring.valuation(e) < h.k {
            return false;
        }
        let f = ring.div_pi_pow(e, h.k);
        for (a, &b) in v.iter_mut().zip(&h.row) {
            *a = ring.sub_mul(*a, f, b);
        }
    }
    v.iter().all(|&x| x == 0)
}

/// Gauss-Jordan with unit pivots. Returns the reduced pivot rows and whether
/// anything outside their span was left over.
fn unit_gauss_jordan(ring: &Ring, d: usize, mut rows: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, bool) {
    let mut rank = 0;
    for c in 0..d {
        let Some(piv) = (rank..rows.len()).find(|&i| ring.is_unit(rows[i][c])) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = ring.inverse(rows[rank][c]).unwrap();
        for x in rows[rank].iter_mut() {
            *x = ring.mul(*x, inv);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = ring.sub_mul(*x, f, y);
                }
            }
        }
        rank += 1;
    }
    let leftover = rows[rank..].iter().any(|row| row.iter().any(|&x| x != 0));
    rows.truncate(rank);
    (rows, leftover)
}

/// A submodule of `O_r^d` held by its canonical generator matrix.
///
/// Free modules use the reduced echelon basis with unit pivots (identity on
/// pivot columns, entries left of a pivot in the maximal ideal). Other modules
/// use their Howell form with redundant rows dropped greedily from the bottom,
/// which leaves a minimal generating set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Submodule {
    spec: RingSpec,
    d: usize,
    basis: Matrix,
    ty: ModuleType,
}

impl Ord for Submodule {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.d, self.basis.data(), self.spec).cmp(&(other.d, other.basis.data(), other.spec))
    }
}

impl PartialOrd for Submodule {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn canonical_form<I>(ring: &Ring, d: usize, gens: I) -> Submodule
where
    I: IntoIterator,
    I::Item: AsRef<[u32]>,
{
    let rows: Vec<Vec<u32>> = gens
        .into_iter()
        .map(|g| {
            let g = g.as_ref();
            assert_eq!(g.len(), d, "generator outside the ambient space");
            g.to_vec()
        })
        .filter(|g| g.iter().any(|&x| x != 0))
        .collect();
    let (free_rows, leftover) = unit_gauss_jordan(ring, d, rows.clone());
    if !leftover {
        let n = free_rows.len() as u32;
        return Submodule {
            spec: ring.spec(),
            d,
            basis: Matrix::from_rows(d, &free_rows),
            ty: ModuleType::free(n),
        };
    }
    let mut kept: Vec<Vec<u32>> = howell_form(ring, d, &rows)
        .into_iter()
        .map(|h| h.row)
        .collect();
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let rest = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, row)| row);
        if howell_contains(ring, &howell_form(ring, d, rest), &kept[i]) {
            kept.remove(i);
        }
    }
    let basis = Matrix::from_rows(d, &kept);
    let vals = smith_normal_form(ring, &basis).valuations(ring);
    let ty = ModuleType::from_valuations(&vals, ring.r());
    Submodule {
        spec: ring.spec(),
        d,
        basis,
        ty,
    }
}

impl Submodule {
    pub fn zero(spec: RingSpec, d: usize) -> Self {
        Submodule {
            spec,
            d,
            basis: Matrix::zeros(0, d),
            ty: ModuleType::free(0),
        }
    }

    pub fn full(ring: &Ring, d: usize) -> Self {
        Submodule {
            spec: ring.spec(),
            d,
            basis: Matrix::identity(ring, d),
            ty: ModuleType::free(d as u32),
        }
    }

    /// Wraps a matrix already known to be a canonical free basis.
    pub(crate) fn from_canonical_free(spec: RingSpec, d: usize, basis: Matrix) -> Self {
        let n = basis.nrows() as u32;
        Submodule {
            spec,
            d,
            basis,
            ty: ModuleType::free(n),
        }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.basis.rows_iter()
    }

    pub fn module_type(&self) -> &ModuleType {
        &self.ty
    }

    pub fn is_free(&self) -> bool {
        self.ty.is_free()
    }

    /// Free rank `m` of the type.
    pub fn rank(&self) -> u32 {
        self.ty.m
    }

    /// Minimal number of generators.
    pub fn ngens(&self) -> u32 {
        self.ty.ngens()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.nrows() == 0
    }

    pub fn log_q_size(&self) -> u32 {
        self.ty.log_size(self.spec.r())
    }

    pub fn howell(&self, ring: &Ring) -> Vec<HowellRow> {
        howell_form(ring, self.d, self.rows())
    }

    pub fn contains_vector(&self, ring: &Ring, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.d);
        if self.is_free() {
            let mut w = v.to_vec();
            for row in self.rows() {
                let c = row
                    .iter()
                    .position(|&x| ring.is_unit(x))
                    .expect("free basis row has a pivot");
                let f = w[c];
                if f != 0 {
                    for (a, &b) in w.iter_mut().zip(row) {
                        *a = ring.sub_mul(*a, f, b);
                    }
                }
            }
            return w.iter().all(|&x| x == 0);
        }
        howell_contains(ring, &self.howell(ring), v)
    }

    /// `other` is a submodule of `self`.
    pub fn contains(&self, ring: &Ring, other: &Submodule) -> bool {
        if self.is_free() {
            return other.rows().all(|v| self.contains_vector(ring, v));
        }
        let h = self.howell(ring);
        other.rows().all(|v| howell_contains(ring, &h, v))
    }

    pub fn sum(&self, ring: &Ring, other: &Submodule) -> Submodule {
        canonical_form(ring, self.d, self.rows().chain(other.rows()))
    }

    /// Annihilator under the standard bilinear form.
    pub fn perp(&self, ring: &Ring) -> Submodule {
        if self.is_zero() {
            return Submodule::full(ring, self.d);
        }
        let s = smith_normal_form(ring, &self.basis);
        let vals = s.valuations(ring);
        let r = ring.r();
        let gens: Vec<Vec<u32>> = (0..self.d)
            .filter_map(|i| {
                let a = vals.get(i).copied().unwrap_or(r);
                let scale = ring.pi_pow(r - a.min(r));
                (scale != 0).then(|| s.v.col(i).into_iter().map(|x| ring.mul(x, scale)).collect())
            })
            .collect();
        canonical_form(ring, self.d, &gens)
    }

    pub fn intersect(&self, ring: &Ring, other: &Submodule) -> Submodule {
        self.perp(ring).sum(ring, &other.perp(ring)).perp(ring)
    }

    pub fn trichotomy(&self, n: u32) -> Trichotomy {
        if self.ngens() > n {
            Trichotomy::NotNGenerated
        } else if self.is_free() && self.ty.m == n {
            Trichotomy::FreelyNGenerated
        } else {
            Trichotomy::NGeneratedNotFree
        }
    }

    /// Image of the module under a map applied to every generator.
    pub fn map_rows(&self, ring: &Ring, f: impl Fn(&[u32]) -> Vec<u32>) -> Submodule {
        let rows: Vec<Vec<u32>> = self.rows().map(f).collect();
        canonical_form(ring, self.d, &rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows()
                .map(|row| {
                    serde_json::Value::Array(
                        row.iter().map(|&x| self.spec.elem_to_json(x)).collect(),
                    )
                })
                .collect(),
        )
    }
}

impl fmt::Display for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .map(|row| {
                format!(
                    "({})",
                    row.iter()
                        .map(|&x| self.spec.format_elem(x))
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        write!(f, "<{}>", rows.join(", "))
    }
}

/// Every element of the span, by brute force. Only for small oracles.
pub fn span_elements<I>(ring: &Ring, d: usize, gens: I) -> BTreeSet<Vec<u32>>
where
    I: IntoIterator,
    I::Item: AsRef<[u32]>,
{
    let mut set: BTreeSet<Vec<u32>> = BTreeSet::new();
    set.insert(vec![0; d]);
    for g in gens {
        let g = g.as_ref();
        let mut next = BTreeSet::new();
        for s in &set {
            for c in ring.elements() {
                next.insert(
                    s.iter()
                        .zip(g)
                        .map(|(&a, &b)| ring.add(a, ring.mul(c, b)))
                        .collect(),
                );
            }
        }
        set = next;
    }
    set
}
