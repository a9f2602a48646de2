use crate::linalg::Matrix;
use crate::ring::Ring;

/// `u * a * v = d` with `u`, `v` invertible and `d` diagonal, entries `pi^a_1, pi^a_2, ...`
/// with `a_1 <= a_2 <= ...` (zero entries last).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
}

impl Smith {
    /// Valuations of the `min(rows, cols)` diagonal entries; `r` marks a zero.
    pub fn valuations(&self, ring: &Ring) -> Vec<u32> {
        let k = self.d.nrows().min(self.d.ncols());
        (0..k).map(|i| ring.valuation(self.d.get(i, i))).collect()
    }
}

pub fn smith_normal_form(ring: &Ring, a: &Matrix) -> Smith {
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = Matrix::identity(ring, rows);
    let mut v = Matrix::identity(ring, cols);
    for t in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let e = d.get(i, j);
                if e != 0 {
                    let val = ring.valuation(e);
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((k, pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        let w_inv = ring
            .inverse(ring.div_pi_pow(d.get(t, t), k))
            .expect("unit part");
        d.scale_row(ring, t, w_inv);
        u.scale_row(ring, t, w_inv);
        for i in t + 1..rows {
            let e = d.get(i, t);
            if e != 0 {
                let f = ring.div_pi_pow(e, k);
                d.row_sub_mul(ring, i, f, t);
                u.row_sub_mul(ring, i, f, t);
            }
        }
        for j in t + 1..cols {
            let e = d.get(t, j);
            if e != 0 {
                let f = ring.div_pi_pow(e, k);
                d.col_sub_mul(ring, j, f, t);
                v.col_sub_mul(ring, j, f, t);
            }
        }
    }
    Smith { u, d, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;
    use proptest::prelude::*;

    fn check(ring: &Ring, a: &Matrix) -> Smith {
        let s = smith_normal_form(ring, a);
        assert_eq!(s.u.mul(ring, a).mul(ring, &s.v), s.d, "U A V != D for {a}");
        assert!(s.u.is_invertible(ring) && ring.is_unit(s.u.det(ring)));
        assert!(s.v.is_invertible(ring) && ring.is_unit(s.v.det(ring)));
        let vals = s.valuations(ring);
        for i in 0..s.d.nrows() {
            for j in 0..s.d.ncols() {
                if i != j {
                    assert_eq!(s.d.get(i, j), 0);
                }
            }
        }
        for (i, &k) in vals.iter().enumerate() {
            assert_eq!(s.d.get(i, i), ring.pi_pow(k));
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        s
    }

    #[test]
    fn examples() {
        let z4 = Ring::new(RingSpec::zmod(2, 2).unwrap());
        let s = check(&z4, &Matrix::from_rows(2, &[[2, 0], [0, 2]]));
        assert_eq!(s.d, Matrix::from_rows(2, &[[2, 0], [0, 2]]));
        let s = check(&z4, &Matrix::from_rows(2, &[[1, 2], [2, 0]]));
        assert_eq!(s.d, Matrix::from_rows(2, &[[1, 0], [0, 0]]));
        let s = check(&z4, &Matrix::zeros(2, 3));
        assert_eq!(s.u, Matrix::identity(&z4, 2));
        assert_eq!(s.v, Matrix::identity(&z4, 3));
    }

    fn spec_strategy() -> impl Strategy<Value = RingSpec> {
        prop_oneof![
            Just(RingSpec::zmod(2, 2).unwrap()),
            Just(RingSpec::zmod(2, 3).unwrap()),
            Just(RingSpec::zmod(3, 2).unwrap()),
            Just(RingSpec::tpoly(2, 3).unwrap()),
            Just(RingSpec::tpoly(3, 2).unwrap()),
            Just(RingSpec::zmod(5, 1).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(3000))]
        #[test]
        fn round_trip(spec in spec_strategy(), rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
            let ring = Ring::new(spec);
            let mut x = seed;
            let data = (0..rows * cols).map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 33) % spec.size() as u64) as u32
            }).collect();
            check(&ring, &Matrix::from_vec(rows, cols, data));
        }
    }
}
