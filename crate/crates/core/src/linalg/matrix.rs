use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ring::Ring;

/// Dense row-major matrix of ring codes. The ring is passed to every
/// arithmetic method rather than stored, so matrices stay plain data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        let one = 1 % ring.size();
        for i in 0..n {
            m.data[i * n + i] = one;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[u32]>>(cols: usize, rows: &[R]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[u32]> {
        // chunks_exact panics on zero width
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, ring: &Ring, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let cur = out.get(i, j);
                        out.set(i, j, ring.add(cur, ring.mul(a, b)));
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, ring: &Ring, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = ring.add(*o, ring.mul(a, self.get(k, j)));
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, ring: &Ring, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| ring.add(acc, ring.mul(a, b)))
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(u32) -> u32) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] -= c * row[src]`
    pub fn row_sub_mul(&mut self, ring: &Ring, dst: usize, c: u32, src: usize) {
        if c == 0 {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s != 0 {
                let v = ring.sub_mul(self.get(dst, j), c, s);
                self.set(dst, j, v);
            }
        }
    }

    /// `col[dst] -= c * col[src]`
    pub fn col_sub_mul(&mut self, ring: &Ring, dst: usize, c: u32, src: usize) {
        if c == 0 {
            return;
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s != 0 {
                let v = ring.sub_mul(self.get(i, dst), c, s);
                self.set(i, dst, v);
            }
        }
    }

    pub fn scale_row(&mut self, ring: &Ring, i: usize, c: u32) {
        for x in self.row_mut(i) {
            *x = ring.mul(*x, c);
        }
    }

    pub fn scale_col(&mut self, ring: &Ring, j: usize, c: u32) {
        for i in 0..self.rows {
            let v = ring.mul(self.get(i, j), c);
            self.set(i, j, v);
        }
    }

    /// Rank of the reduction modulo the maximal ideal.
    pub fn residue_rank(&self, ring: &Ring) -> usize {
        let p = ring.p();
        let mut m: Vec<Vec<u32>> = self
            .rows_iter()
            .map(|r| r.iter().map(|&x| x % p).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = mod_inverse(m[rank][c], p);
            for x in m[rank].iter_mut() {
                *x = *x * inv % p;
            }
            let pivot = m[rank].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i != rank && row[c] != 0 {
                    let f = row[c];
                    for (x, &y) in row.iter_mut().zip(&pivot) {
                        *x = (*x + p * p - f * y % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, ring: &Ring) -> bool {
        self.rows == self.cols && self.residue_rank(ring) == self.rows
    }

    /// Determinant by elimination with minimal-valuation pivots; every
    /// elimination factor is an exact quotient, so no division is lost.
    pub fn det(&self, ring: &Ring) -> u32 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1 % ring.size();
        for c in 0..n {
            let piv = (c..n).min_by_key(|&i| ring.valuation(m.get(i, c)));
            let Some(piv) = piv.filter(|&i| m.get(i, c) != 0) else {
                return 0;
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = ring.neg(det);
            }
            let pv = m.get(c, c);
            let k = ring.valuation(pv);
            let w_inv = ring.inverse(ring.div_pi_pow(pv, k)).expect("unit part");
            for i in c + 1..n {
                let e = m.get(i, c);
                if e != 0 {
                    let f = ring.mul(ring.div_pi_pow(e, k), w_inv);
                    m.row_sub_mul(ring, i, f, c);
                }
            }
            det = ring.mul(det, pv);
        }
        det
    }

    pub fn inverse(&self, ring: &Ring) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(ring, n);
        for c in 0..n {
            let piv = (c..n).find(|&i| ring.is_unit(a.get(i, c)))?;
            a.swap_rows(piv, c);
            inv.swap_rows(piv, c);
            let u = ring.inverse(a.get(c, c)).unwrap();
            a.scale_row(ring, c, u);
            inv.scale_row(ring, c, u);
            for i in 0..n {
                let f = a.get(i, c);
                if i != c && f != 0 {
                    a.row_sub_mul(ring, i, f, c);
                    inv.row_sub_mul(ring, i, f, c);
                }
            }
        }
        Some(inv)
    }

    pub fn format(&self, ring: &Ring) -> String {
        let spec = ring.spec();
        let rows: Vec<String> = self
            .rows_iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(|&x| spec.format_elem(x))
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows_iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r:?}")?;
        }
        Ok(())
    }
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// True iff some coordinate is a unit.
pub fn is_primitive(ring: &Ring, v: &[u32]) -> bool {
    v.iter().any(|&x| ring.is_unit(x))
}
