//! Semilinear automorphisms, matrix-group closures and the exceptional checks in rank three.

pub mod cayley;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use serde_json::json;
use std::hash::Hash;
use thiserror::Error;

use crate::complex::{build_bipartite, ComplexGraph, ComplexSpec};
use crate::graph::AbstractGraph;
use crate::linalg::{gl_order, Matrix, Submodule};
use crate::rigidity::{automorphism_group, CanonOptions, RigidityError};
use crate::ring::{ring_automorphisms, Flavor, Ring, RingAut, RingSpec};

pub use cayley::{cayley_graph, standard_connection_set, Dihedral, FiniteGroupSpec, GroupElem};

pub const DEFAULT_CLOSURE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("matrix is not invertible over the ring")]
    NotInvertible,
    #[error("matrix is {rows}x{cols}, expected {d}x{d}")]
    WrongShape { rows: usize, cols: usize, d: usize },
    #[error("ring automorphism belongs to {found}, expected {expected}")]
    RingMismatch { expected: String, found: String },
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("pairing is not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("pairing is not injective: {0}")]
    NotInjective(String),
    #[error("pairing reaches {reached} of {expected} target elements")]
    NotSurjective { reached: usize, expected: String },
    #[error("connection set: {0}")]
    BadConnectionSet(String),
    #[error("the map does not send vertices to vertices")]
    NotAVertexMap,
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
}

/// `V -> { A tau(v) }`, acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearAut {
    a: Matrix,
    tau: RingAut,
}

impl SemilinearAut {
    pub fn new(ring: &Ring, a: Matrix, tau: RingAut) -> Result<Self, GroupError> {
        if a.nrows() != a.ncols() {
            return Err(GroupError::WrongShape {
                rows: a.nrows(),
                cols: a.ncols(),
                d: a.nrows(),
            });
        }
        if tau.spec() != ring.spec() {
            return Err(GroupError::RingMismatch {
                expected: ring.spec().label(),
                found: tau.spec().label(),
            });
        }
        if !a.is_invertible(ring) {
            return Err(GroupError::NotInvertible);
        }
        Ok(SemilinearAut { a, tau })
    }

    pub fn linear(ring: &Ring, a: Matrix) -> Result<Self, GroupError> {
        Self::new(ring, a, RingAut::identity(ring.spec()))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn ring_aut(&self) -> RingAut {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

pub fn apply_semilinear(
    ring: &Ring,
    phi: &SemilinearAut,
    v: &Submodule,
) -> Result<Submodule, GroupError> {
    if v.ambient_dim() != phi.dim() {
        return Err(GroupError::WrongShape {
            rows: phi.dim(),
            cols: phi.dim(),
            d: v.ambient_dim(),
        });
    }
    Ok(v.map_rows(ring, |row| {
        let twisted: Vec<u32> = row.iter().map(|&x| phi.tau.apply(x)).collect();
        phi.a.mul_vec(ring, &twisted)
    }))
}

pub fn apply_perp_aut(ring: &Ring, v: &Submodule) -> Submodule {
    v.perp(ring)
}

/// The vertex permutation a module map induces on `g`, if it sends vertices to vertices.
pub fn induced_map(
    g: &ComplexGraph,
    f: impl Fn(&Submodule) -> Submodule + Sync,
) -> Option<Vec<u32>> {
    (0..g.vertex_count() as u32)
        .into_par_iter()
        .map(|v| g.find(&f(g.module(v))))
        .collect()
}

pub fn semilinear_map(g: &ComplexGraph, phi: &SemilinearAut) -> Result<Vec<u32>, GroupError> {
    let ring = g.spec().ring();
    induced_map(g, |v| {
        apply_semilinear(ring, phi, v).expect("dimension checked")
    })
    .ok_or(GroupError::NotAVertexMap)
}

/// Needs the color set of `g` to be closed under `c -> d - c`.
pub fn perp_map_on(g: &ComplexGraph) -> Result<Vec<u32>, GroupError> {
    let ring = g.spec().ring();
    induced_map(g, |v| v.perp(ring)).ok_or(GroupError::NotAVertexMap)
}

pub fn verify_graph_automorphism(g: &AbstractGraph, map: &[u32]) -> bool {
    g.is_automorphism(map)
}

/// Exact group orders. `pgl` is the quotient by unit scalars; `pgl_display`
/// is `q^(d^2 (r-1)) |PGL_d(F_q)|`, kept for comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupOrders {
    pub ring: String,
    pub d: u32,
    #[serde(serialize_with = "big_as_string")]
    pub gl: BigUint,
    #[serde(serialize_with = "big_as_string")]
    pub pgl: BigUint,
    #[serde(serialize_with = "big_as_string")]
    pub pgl_display: BigUint,
    pub ring_automorphisms: u64,
    #[serde(serialize_with = "big_as_string")]
    pub aut0: BigUint,
    /// Only for `d >= 3`, where duality adds a factor of two.
    #[serde(serialize_with = "opt_big_as_string")]
    pub aut: Option<BigUint>,
}

fn big_as_string<S: serde::Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn opt_big_as_string<S: serde::Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

pub fn ring_automorphism_count(spec: RingSpec) -> u64 {
    match spec.flavor() {
        Flavor::IntegerMod => 1,
        Flavor::TruncatedPoly if spec.r() == 1 => 1,
        Flavor::TruncatedPoly => (spec.p() as u64 - 1) * (spec.p() as u64).pow(spec.r() - 2),
    }
}

pub fn group_orders(spec: RingSpec, d: u32) -> GroupOrders {
    let q = spec.q() as u64;
    let r = spec.r();
    let gl = gl_order(d, q, r);
    let scalars = q.pow(r - 1) * (q - 1);
    let pgl = &gl / scalars;
    let pgl_field = gl_order(d, q, 1) / (q - 1);
    let pgl_display = pgl_field * BigUint::from(q).pow(d * d * (r - 1));
    let nring = ring_automorphism_count(spec);
    let aut0 = &pgl * nring;
    let aut = (d >= 3).then(|| &aut0 * 2u32);
    GroupOrders {
        ring: spec.label(),
        d,
        gl,
        pgl,
        pgl_display,
        ring_automorphisms: nring,
        aut0,
        aut,
    }
}

/// Breadth-first closure of `{identity}` under right multiplication by the
/// generators. Returns the elements in discovery order.
pub fn closure<T, F>(identity: T, gens: &[T], mul: F, cap: usize) -> Result<Vec<T>, GroupError>
where
    T: Clone + Eq + Hash + Send + Sync,
    F: Fn(&T, &T) -> T + Sync,
{
    let mut seen: FxHashSet<T> = FxHashSet::default();
    seen.insert(identity.clone());
    let mut all = vec![identity];
    let mut start = 0;
    while start < all.len() {
        let frontier = &all[start..];
        let products: Vec<T> = frontier
            .par_iter()
            .flat_map_iter(|x| gens.iter().map(|g| mul(x, g)))
            .collect();
        start = all.len();
        for y in products {
            if !seen.contains(&y) {
                if all.len() >= cap {
                    return Err(GroupError::CapExceeded(cap));
                }
                seen.insert(y.clone());
                all.push(y);
            }
        }
    }
    Ok(all)
}

#[derive(Debug, Clone)]
pub struct GeneratedGroup {
    pub generators: Vec<Matrix>,
    pub elements: Vec<Matrix>,
}

impl GeneratedGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elements.contains(m)
    }
}

pub fn bfs_closure(ring: &Ring, gens: &[Matrix], cap: usize) -> Result<GeneratedGroup, GroupError> {
    let d = gens.first().map_or(0, |g| g.nrows());
    for g in gens {
        if g.nrows() != d || g.ncols() != d {
            return Err(GroupError::WrongShape {
                rows: g.nrows(),
                cols: g.ncols(),
                d,
            });
        }
        if !g.is_invertible(ring) {
            return Err(GroupError::NotInvertible);
        }
    }
    let elements = closure(Matrix::identity(ring, d), gens, |x, g| x.mul(ring, g), cap)?;
    Ok(GeneratedGroup {
        generators: gens.to_vec(),
        elements,
    })
}

/// Elementary transvections `I + E_ij` and `diag(u, 1, ..., 1)` for every unit `u`.
pub fn standard_generators(ring: &Ring, d: usize) -> Vec<Matrix> {
    let mut out = vec![];
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let mut e = Matrix::identity(ring, d);
                e.set(i, j, 1);
                out.push(e);
            }
        }
    }
    for u in ring.units().filter(|&u| u != 1) {
        let mut e = Matrix::identity(ring, d);
        e.set(0, 0, u);
        out.push(e);
    }
    out
}

/// Machine-readable outcome of a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub parameters: serde_json::Value,
    pub verdict: Verdict,
    pub witness: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// The two generator pairs for the isomorphism `GL_3(Z/4) -> GL_3(F_2[t]/t^2)`.
/// In the polynomial encoding `t` has code 2 and `t + 1` code 3.
pub fn psi_generator_pairs() -> Vec<(Matrix, Matrix)> {
    let m = |rows: [[u32; 3]; 3]| Matrix::from_rows(3, &rows);
    vec![
        (
            m([[0, 1, 1], [0, 0, 1], [1, 0, 0]]),
            m([[1, 1, 3], [2, 1, 1], [1, 2, 3]]),
        ),
        (
            m([[0, 1, 0], [0, 0, 1], [3, 0, 1]]),
            m([[1, 1, 3], [1, 2, 1], [2, 1, 1]]),
        ),
    ]
}

/// Walks the group generated by the left components, carrying the right
/// components along. Fails as soon as one element acquires two partners.
pub fn paired_closure(
    src: &Ring,
    dst: &Ring,
    pairs: &[(Matrix, Matrix)],
    cap: usize,
) -> Result<FxHashMap<Matrix, Matrix>, GroupError> {
    let d = pairs.first().map_or(0, |p| p.0.nrows());
    for (a, b) in pairs {
        if !a.is_invertible(src) || !b.is_invertible(dst) {
            return Err(GroupError::NotInvertible);
        }
    }
    let id = (Matrix::identity(src, d), Matrix::identity(dst, d));
    let mut fwd: FxHashMap<Matrix, Matrix> = FxHashMap::default();
    let mut back: FxHashMap<Matrix, Matrix> = FxHashMap::default();
    fwd.insert(id.0.clone(), id.1.clone());
    back.insert(id.1.clone(), id.0.clone());
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let products: Vec<(Matrix, Matrix)> = frontier
            .par_iter()
            .flat_map_iter(|(g, h)| {
                pairs
                    .iter()
                    .map(move |(a, b)| (g.mul(src, a), h.mul(dst, b)))
            })
            .collect();
        let mut next = vec![];
        for (g, h) in products {
            match fwd.get(&g) {
                Some(h0) if *h0 == h => continue,
                Some(h0) => {
                    return Err(GroupError::NotAHomomorphism(format!(
                        "{:?} has partners {:?} and {:?}",
                        g.data(),
                        h0.data(),
                        h.data()
                    )));
                }
                None => {}
            }
            if let Some(g0) = back.get(&h) {
                return Err(GroupError::NotInjective(format!(
                    "{:?} has preimages {:?} and {:?}",
                    h.data(),
                    g0.data(),
                    g.data()
                )));
            }
            if fwd.len() >= cap {
                return Err(GroupError::CapExceeded(cap));
            }
            fwd.insert(g.clone(), h.clone());
            back.insert(h.clone(), g.clone());
            next.push((g, h));
        }
        frontier = next;
    }
    Ok(fwd)
}

/// Checks a generator pairing extends to an isomorphism between the full
/// general linear groups.
pub fn verify_pairing(
    src: &Ring,
    dst: &Ring,
    pairs: &[(Matrix, Matrix)],
) -> Result<usize, GroupError> {
    let d = pairs.first().map_or(0, |p| p.0.nrows()) as u32;
    let map = paired_closure(src, dst, pairs, DEFAULT_CLOSURE_CAP)?;
    let full_src = gl_order(d, src.q() as u64, src.r());
    let full_dst = gl_order(d, dst.q() as u64, dst.r());
    if BigUint::from(map.len()) != full_src {
        return Err(GroupError::NotAHomomorphism(format!(
            "generators reach {} of {} source elements",
            map.len(),
            full_src
        )));
    }
    if BigUint::from(map.len()) != full_dst {
        return Err(GroupError::NotSurjective {
            reached: map.len(),
            expected: full_dst.to_string(),
        });
    }
    Ok(map.len())
}

fn z4() -> Ring {
    Ring::new(RingSpec::zmod(2, 2).expect("valid"))
}

fn f2t2() -> Ring {
    Ring::new(RingSpec::tpoly(2, 2).expect("valid"))
}

pub fn verify_exceptional_psi() -> CheckReport {
    psi_report(&psi_generator_pairs(), "exceptional_psi")
}

/// The generator pairs with the two target matrices exchanged.
pub fn swapped_psi_pairs() -> Vec<(Matrix, Matrix)> {
    let p = psi_generator_pairs();
    vec![
        (p[0].0.clone(), p[1].1.clone()),
        (p[1].0.clone(), p[0].1.clone()),
    ]
}

pub fn psi_report(pairs: &[(Matrix, Matrix)], name: &str) -> CheckReport {
    let (src, dst) = (z4(), f2t2());
    let parameters = json!({
        "source": src.spec().label(),
        "target": dst.spec().label(),
        "pairs": pairs.iter().map(|(a, b)| json!([a.format(&src), b.format(&dst)])).collect::<Vec<_>>(),
    });
    let (verdict, witness) = match verify_pairing(&src, &dst, pairs) {
        Ok(n) => (Verdict::Pass, json!({ "bijection_size": n })),
        Err(e) => (Verdict::Fail, json!({ "error": e.to_string() })),
    };
    CheckReport {
        check: name.into(),
        parameters,
        verdict,
        witness,
    }
}

fn permutation_matrix(ring: &Ring, d: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::identity(ring, d);
    m.swap_rows(i, j);
    m
}

/// Invertible upper triangular matrices.
pub fn borel_elements(ring: &Ring, d: usize) -> Vec<Matrix> {
    let units: Vec<u32> = ring.units().collect();
    let all: Vec<u32> = ring.elements().collect();
    let mut slots: Vec<&[u32]> = vec![];
    for i in 0..d {
        for j in 0..d {
            slots.push(match j.cmp(&i) {
                std::cmp::Ordering::Less => &[0],
                std::cmp::Ordering::Equal => &units,
                std::cmp::Ordering::Greater => &all,
            });
        }
    }
    let total: usize = slots.iter().map(|s| s.len()).product();
    (0..total)
        .map(|mut k| {
            let data = slots
                .iter()
                .map(|s| {
                    let x = s[k % s.len()];
                    k /= s.len();
                    x
                })
                .collect();
            Matrix::from_vec(d, d, data)
        })
        .collect()
}

/// The entry test for `s b w`, plus exhaustive non-membership in `B u BwB`
/// when `|B|` is at most `exhaustive_limit`.
pub fn verify_not_bn_pair(spec: RingSpec, exhaustive_limit: usize) -> CheckReport {
    let ring = Ring::new(spec);
    let d = 3;
    let parameters = json!({ "ring": spec.label(), "d": d });
    let pi = ring.uniformizer();
    if spec.r() < 2 || pi == 0 {
        return CheckReport {
            check: "not_bn_pair".into(),
            parameters,
            verdict: Verdict::Inapplicable,
            witness: json!({ "reason": "residue ring is a field, the uniformizer vanishes" }),
        };
    }
    let s = permutation_matrix(&ring, d, 0, 1);
    let w = s.clone();
    let mut b = Matrix::identity(&ring, d);
    b.set(0, 1, pi);
    let sbw = s.mul(&ring, &b).mul(&ring, &w);
    let entry = sbw.get(1, 0);
    let entry_ok = entry != 0 && !ring.is_unit(entry);
    let mut witness = json!({
        "sbw": sbw.format(&ring),
        "entry_2_1": spec.format_elem(entry),
        "entry_is_zero": entry == 0,
        "entry_is_unit": ring.is_unit(entry),
    });
    let mut verdict = entry_ok;
    let borel_size: usize = {
        let units = spec.unit_count() as usize;
        let n = ring.size() as usize;
        units.pow(d as u32) * n.pow((d * (d - 1) / 2) as u32)
    };
    if borel_size <= exhaustive_limit {
        let borel = borel_elements(&ring, d);
        let bw: Vec<Matrix> = borel.iter().map(|x| x.mul(&ring, &w)).collect();
        let double: FxHashSet<Matrix> = bw
            .par_iter()
            .flat_map_iter(|x| borel.iter().map(|y| x.mul(&ring, y)))
            .collect();
        let in_b = borel.contains(&sbw);
        let in_bwb = double.contains(&sbw);
        let bwb_entries_units = double.iter().all(|g| ring.is_unit(g.get(1, 0)));
        witness["borel_size"] = json!(borel.len());
        witness["double_coset_size"] = json!(double.len());
        witness["in_b"] = json!(in_b);
        witness["in_bwb"] = json!(in_bwb);
        witness["bwb_entries_all_units"] = json!(bwb_entries_units);
        verdict = verdict && !in_b && !in_bwb && bwb_entries_units && borel.len() == borel_size;
    }
    CheckReport {
        check: "not_bn_pair".into(),
        parameters,
        verdict: if verdict {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        witness,
    }
}

fn is_unit_scalar(ring: &Ring, a: &Matrix) -> bool {
    let c = a.get(0, 0);
    ring.is_unit(c)
        && (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| a.get(i, j) == if i == j { c } else { 0 }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub checked: usize,
    pub trivial_on_lines: usize,
    pub scalars: usize,
    /// Matrices where acting trivially and being scalar disagree.
    pub mismatches: usize,
}

/// Compares "acts trivially on lines" with "is a unit scalar" over `matrices`.
pub fn kernel_check(spec: &ComplexSpec, matrices: &[Matrix]) -> KernelReport {
    let ring = spec.ring();
    let d = spec.d() as usize;
    let lines = crate::complex::enumerate_free(ring, d, 1);
    let rows: Vec<(bool, bool)> = matrices
        .par_iter()
        .map(|a| {
            let phi = SemilinearAut::linear(ring, a.clone()).expect("invertible input");
            let trivial = lines
                .iter()
                .all(|l| apply_semilinear(ring, &phi, l).expect("dim") == *l);
            (trivial, is_unit_scalar(ring, a))
        })
        .collect();
    KernelReport {
        checked: rows.len(),
        trivial_on_lines: rows.iter().filter(|r| r.0).count(),
        scalars: rows.iter().filter(|r| r.1).count(),
        mismatches: rows.iter().filter(|r| r.0 != r.1).count(),
    }
}

/// Random matrices with unit determinant, by rejection.
pub fn sample_invertible(ring: &Ring, d: usize, count: usize, seed: u64) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = Matrix::from_vec(
            d,
            d,
            (0..d * d).map(|_| rng.gen_range(0..ring.size())).collect(),
        );
        if m.is_invertible(ring) {
            out.push(m);
        }
    }
    out
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().map(|&x| b[x as usize]).collect()
}

/// Permutation group generated by vertex permutations, by closure.
pub fn permutation_group(gens: &[Vec<u32>], cap: usize) -> Result<Vec<Vec<u32>>, GroupError> {
    let n = gens.first().map_or(0, |g| g.len());
    closure(
        (0..n as u32).collect(),
        gens,
        |a: &Vec<u32>, b: &Vec<u32>| compose(a, b),
        cap,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub ring: String,
    pub d: u32,
    pub m: u32,
    pub n: u32,
    pub generated_order: u128,
    pub brute_force_order: u128,
    pub generators: usize,
    pub all_generators_verified: bool,
    pub orders: GroupOrders,
    /// Which closed form for `|PGL|` gives the generated count: "center_quotient", "display", both or neither.
    pub pgl_formula_matching: Vec<String>,
}

impl TransferReport {
    pub fn agrees(&self) -> bool {
        self.all_generators_verified && self.generated_order == self.brute_force_order
    }
}

/// Compares the group generated by the algebraic automorphisms (and the
/// duality, when `m + n = d`) with the full automorphism group of the uncolored graph.
pub fn aut_transfer(
    spec: &ComplexSpec,
    m: u32,
    n: u32,
    opts: CanonOptions,
) -> Result<TransferReport, GroupError> {
    let g = build_bipartite(spec, m, n).map_err(|e| GroupError::BadConnectionSet(e.to_string()))?;
    let ring = spec.ring();
    let d = spec.d();
    let mut gens: Vec<Vec<u32>> = vec![];
    for a in standard_generators(ring, d as usize) {
        gens.push(semilinear_map(&g, &SemilinearAut::linear(ring, a)?)?);
    }
    for tau in ring_automorphisms(ring.spec())
        .into_iter()
        .filter(|t| !t.is_identity())
    {
        gens.push(semilinear_map(
            &g,
            &SemilinearAut::new(ring, Matrix::identity(ring, d as usize), tau)?,
        )?);
    }
    let with_perp = m + n == d;
    if with_perp {
        gens.push(perp_map_on(&g)?);
    }
    let uncolored = g.graph().uncolored();
    let all_generators_verified = gens
        .iter()
        .all(|p| verify_graph_automorphism(&uncolored, p));
    let generated = permutation_group(&gens, DEFAULT_CLOSURE_CAP)?.len() as u128;
    let brute = automorphism_group(&uncolored, opts)?.order;
    let orders = group_orders(ring.spec(), d);
    let factor = ring_automorphism_count(ring.spec()) as u128 * if with_perp { 2 } else { 1 };
    let mut matching = vec![];
    for (name, value) in [
        ("center_quotient", &orders.pgl),
        ("display", &orders.pgl_display),
    ] {
        if BigUint::from(generated) == value * factor {
            matching.push(name.to_string());
        }
    }
    Ok(TransferReport {
        ring: ring.spec().label(),
        d,
        m,
        n,
        generated_order: generated,
        brute_force_order: brute,
        generators: gens.len(),
        all_generators_verified,
        orders,
        pgl_formula_matching: matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_full_complex, enumerate_free};
    use crate::linalg::canonical_form;

    fn ring(s: RingSpec) -> Ring {
        Ring::new(s)
    }

    #[test]
    fn apply_examples() {
        let r = z4();
        let id = SemilinearAut::linear(&r, Matrix::identity(&r, 3)).unwrap();
        for l in enumerate_free(&r, 3, 1) {
            assert_eq!(apply_semilinear(&r, &id, &l).unwrap(), l);
        }
        let swap = SemilinearAut::linear(&r, permutation_matrix(&r, 3, 0, 1)).unwrap();
        let e1 = canonical_form(&r, 3, [[1u32, 0, 0]]);
        assert_eq!(
            apply_semilinear(&r, &swap, &e1).unwrap(),
            canonical_form(&r, 3, [[0u32, 1, 0]])
        );

        // t -> t + t^2 over F_2[t]/t^3: codes are base-2 digit strings, t = 2, t + t^2 = 6
        let s = RingSpec::tpoly(2, 3).unwrap();
        let r = ring(s);
        let tau = RingAut::substitution(s, 6).unwrap();
        let phi = SemilinearAut::new(&r, Matrix::identity(&r, 2), tau).unwrap();
        let v = canonical_form(&r, 2, [[1u32, 2]]);
        assert_eq!(
            apply_semilinear(&r, &phi, &v).unwrap(),
            canonical_form(&r, 2, [[1u32, 6]])
        );
    }

    #[test]
    fn non_invertible_is_rejected() {
        let r = z4();
        let a = Matrix::from_rows(2, &[[2u32, 0], [0, 1]]);
        assert_eq!(SemilinearAut::linear(&r, a), Err(GroupError::NotInvertible));
    }

    #[test]
    fn induced_maps_are_automorphisms() {
        for s in [
            RingSpec::zmod(2, 2).unwrap(),
            RingSpec::tpoly(2, 2).unwrap(),
        ] {
            let spec = ComplexSpec::new(s, 3).unwrap();
            let g = build_bipartite(&spec, 1, 2).unwrap();
            let ring = spec.ring();
            for a in sample_invertible(ring, 3, 20, 7) {
                let map = semilinear_map(&g, &SemilinearAut::linear(ring, a).unwrap()).unwrap();
                assert!(verify_graph_automorphism(g.graph(), &map));
            }
            let perp = perp_map_on(&g).unwrap();
            assert!(verify_graph_automorphism(g.graph(), &perp));
            assert!((0..g.vertex_count() as u32)
                .all(|v| g.color_of(perp[v as usize]) == 3 - g.color_of(v)));
            let mut t: Vec<u32> = (0..g.vertex_count() as u32).collect();
            t.swap(0, 1);
            assert!(!verify_graph_automorphism(g.graph(), &t));
        }
    }

    #[test]
    fn induced_maps_on_full_complex_d4() {
        let spec = ComplexSpec::new(RingSpec::tpoly(2, 2).unwrap(), 4).unwrap();
        let g = build_full_complex(&spec).unwrap();
        let ring = spec.ring();
        for tau in ring_automorphisms(ring.spec()) {
            for a in sample_invertible(ring, 4, 3, 11) {
                let map = semilinear_map(&g, &SemilinearAut::new(ring, a, tau).unwrap()).unwrap();
                assert!(g.graph().is_color_isomorphism_to(g.graph(), &map));
            }
        }
        assert!(verify_graph_automorphism(
            g.graph(),
            &perp_map_on(&g).unwrap()
        ));
    }

    #[test]
    fn orders() {
        let o = group_orders(RingSpec::zmod(2, 2).unwrap(), 3);
        assert_eq!(o.gl, BigUint::from(86016u32));
        assert_eq!(o.pgl, BigUint::from(43008u32));
        assert_eq!(o.pgl_display, BigUint::from(86016u32));
        assert_eq!(o.aut, Some(BigUint::from(86016u32)));
        assert_eq!(
            group_orders(RingSpec::zmod(2, 1).unwrap(), 2).gl,
            BigUint::from(6u32)
        );
        assert_eq!(group_orders(RingSpec::zmod(2, 2).unwrap(), 2).aut, None);
        // at r = 1 the two formulas coincide
        let f = group_orders(RingSpec::zmod(3, 1).unwrap(), 3);
        assert_eq!(f.pgl, f.pgl_display);
    }

    #[test]
    fn ring_automorphism_counts() {
        for (p, r) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)] {
            let s = RingSpec::tpoly(p, r).unwrap();
            assert_eq!(
                ring_automorphism_count(s),
                ring_automorphisms(s).len() as u64,
                "p={p} r={r}"
            );
            assert_eq!(ring_automorphism_count(RingSpec::zmod(p, r).unwrap()), 1);
        }
    }

    #[test]
    fn closure_matches_order_formula() {
        let r = z4();
        assert_eq!(
            bfs_closure(&r, &[Matrix::identity(&r, 3)], 10)
                .unwrap()
                .order(),
            1
        );
        for (s, d) in [
            (RingSpec::zmod(2, 1).unwrap(), 2),
            (RingSpec::zmod(2, 2).unwrap(), 2),
            (RingSpec::tpoly(2, 2).unwrap(), 2),
            (RingSpec::zmod(3, 1).unwrap(), 2),
            (RingSpec::zmod(3, 2).unwrap(), 2),
            (RingSpec::tpoly(3, 2).unwrap(), 2),
        ] {
            let r = ring(s);
            let g = bfs_closure(&r, &standard_generators(&r, d), DEFAULT_CLOSURE_CAP).unwrap();
            assert_eq!(
                BigUint::from(g.order()),
                gl_order(d as u32, s.q() as u64, s.r()),
                "{s} d={d}"
            );
        }
        assert_eq!(
            bfs_closure(&r, &standard_generators(&r, 2), DEFAULT_CLOSURE_CAP)
                .unwrap()
                .order(),
            96
        );
        assert_eq!(
            bfs_closure(&r, &standard_generators(&r, 3), 1000).unwrap_err(),
            GroupError::CapExceeded(1000)
        );
        let bad = Matrix::from_rows(2, &[[2u32, 0], [0, 1]]);
        assert_eq!(
            bfs_closure(&r, &[bad], 10).unwrap_err(),
            GroupError::NotInvertible
        );
    }

    #[test]
    fn psi_generators_generate() {
        let r = z4();
        let gens: Vec<Matrix> = psi_generator_pairs().into_iter().map(|p| p.0).collect();
        assert_eq!(
            bfs_closure(&r, &gens, DEFAULT_CLOSURE_CAP).unwrap().order(),
            86016
        );
        let t = f2t2();
        let gens: Vec<Matrix> = psi_generator_pairs().into_iter().map(|p| p.1).collect();
        assert_eq!(
            bfs_closure(&t, &gens, DEFAULT_CLOSURE_CAP).unwrap().order(),
            86016
        );
    }

    #[test]
    fn identity_pairing_is_trivial() {
        let (s, t) = (z4(), f2t2());
        let map = paired_closure(
            &s,
            &t,
            &[(Matrix::identity(&s, 3), Matrix::identity(&t, 3))],
            10,
        )
        .unwrap();
        assert_eq!(map.len(), 1);
    }

    #[test]
    fn kernel_is_scalars_gl2() {
        let spec = ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), 2).unwrap();
        let all = bfs_closure(
            spec.ring(),
            &standard_generators(spec.ring(), 2),
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap();
        let k = kernel_check(&spec, &all.elements);
        assert_eq!(k.checked, 96);
        assert_eq!(k.scalars, 2);
        assert_eq!(k.mismatches, 0);
    }

    #[test]
    fn borel_size() {
        assert_eq!(borel_elements(&z4(), 3).len(), 512);
        assert!(borel_elements(&z4(), 3)
            .iter()
            .all(|b| b.is_invertible(&z4())));
    }

    #[test]
    fn not_bn_pair_field_case_is_inapplicable() {
        let rep = verify_not_bn_pair(RingSpec::zmod(2, 1).unwrap(), 0);
        assert_eq!(rep.verdict, Verdict::Inapplicable);
        let rep = verify_not_bn_pair(RingSpec::tpoly(3, 2).unwrap(), 0);
        assert!(rep.passed());
        assert_eq!(rep.witness["entry_2_1"], "t");
    }
}
