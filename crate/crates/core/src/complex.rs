//! Vertex sets, inclusion graphs and facets of the free projective space.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{write_edge_list, AbstractGraph};
use crate::linalg::{canonical_form, count_spaces, qcomb, Matrix, Submodule};
use crate::ring::{Ring, RingSpec};

pub const DEFAULT_VERTEX_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("dimension d = {0} is below 2")]
    DimensionTooSmall(u32),
    #[error("color {color} is outside 1..={max}")]
    InvalidColor { color: u32, max: u32 },
    #[error("colors must be distinct and increasing, got {0:?}")]
    BadColorSet(Vec<u32>),
    #[error("enumeration needs {needed} vertices, above the cap of {cap}")]
    CapExceeded { needed: u64, cap: u64 },
}

/// A ring and an ambient dimension, with a guard on total enumeration size.
#[derive(Debug, Clone)]
pub struct ComplexSpec {
    ring: Ring,
    d: u32,
    cap: u64,
}

impl ComplexSpec {
    pub fn new(spec: RingSpec, d: u32) -> Result<Self, ComplexError> {
        Self::with_cap(spec, d, DEFAULT_VERTEX_CAP)
    }

    /// The cap bounds `|X_1| + ... + |X_(d-1)|`.
    pub fn with_cap(spec: RingSpec, d: u32, cap: u64) -> Result<Self, ComplexError> {
        if d < 2 {
            return Err(ComplexError::DimensionTooSmall(d));
        }
        let s = ComplexSpec {
            ring: Ring::new(spec),
            d,
            cap,
        };
        let needed = s.total_vertices();
        if needed > cap {
            return Err(ComplexError::CapExceeded { needed, cap });
        }
        Ok(s)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ring_spec(&self) -> RingSpec {
        self.ring.spec()
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn q(&self) -> u64 {
        self.ring.q() as u64
    }

    pub fn r(&self) -> u32 {
        self.ring.r()
    }

    /// `S_n^d`, saturating at `u64::MAX`.
    pub fn layer_size(&self, n: u32) -> u64 {
        qcomb::to_u64(&count_spaces(n, self.d, self.q(), self.r())).unwrap_or(u64::MAX)
    }

    pub fn total_vertices(&self) -> u64 {
        (1..self.d).fold(0u64, |acc, n| acc.saturating_add(self.layer_size(n)))
    }

    fn check_color(&self, c: u32) -> Result<(), ComplexError> {
        if c == 0 || c >= self.d {
            return Err(ComplexError::InvalidColor {
                color: c,
                max: self.d - 1,
            });
        }
        Ok(())
    }
}

/// All free rank-`n` submodules of `O_r^d`, sorted by canonical matrix.
///
/// Generated directly in canonical shape: for each pivot set, row `i` has a 1
/// in its pivot column, zeros in the other pivot columns, an entry of the
/// maximal ideal in non-pivot columns to the left of its pivot and anything to
/// the right.
pub fn enumerate_free(ring: &Ring, d: usize, n: usize) -> Vec<Submodule> {
    let q = ring.p();
    let r = ring.r();
    let ideal: Vec<u32> = (0..q.pow(r - 1)).map(|x| x * q).collect();
    let all: Vec<u32> = ring.elements().collect();
    let pivot_sets = combinations(d, n);
    let spec = ring.spec();
    let mut out: Vec<Submodule> = pivot_sets
        .par_iter()
        .flat_map_iter(|pivots| {
            let mut slots: Vec<(usize, usize, &[u32])> = Vec::new();
            for (i, &c) in pivots.iter().enumerate() {
                for j in 0..d {
                    if pivots.contains(&j) {
                        continue;
                    }
                    slots.push((i, j, if j < c { &ideal } else { &all }));
                }
            }
            let total: usize = slots.iter().map(|s| s.2.len()).product();
            let mut base = Matrix::zeros(n, d);
            for (i, &c) in pivots.iter().enumerate() {
                base.set(i, c, 1 % ring.size());
            }
            (0..total).map(move |mut idx| {
                let mut m = base.clone();
                for &(i, j, choices) in &slots {
                    m.set(i, j, choices[idx % choices.len()]);
                    idx /= choices.len();
                }
                Submodule::from_canonical_free(spec, d, m)
            })
        })
        .collect();
    out.par_sort_unstable();
    out
}

fn combinations(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in start..d {
            cur.push(c);
            go(c + 1, d, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, n, &mut Vec::new(), &mut out);
    out
}

pub fn enumerate_spaces(spec: &ComplexSpec, n: u32) -> Result<Vec<Submodule>, ComplexError> {
    spec.check_color(n)?;
    Ok(enumerate_free(spec.ring(), spec.d as usize, n as usize))
}

/// Inclusion graph on a chosen set of colors, keeping the module labels.
#[derive(Debug, Clone)]
pub struct ComplexGraph {
    spec: ComplexSpec,
    colors: Vec<u32>,
    layers: Vec<Vec<Submodule>>,
    offsets: Vec<u32>,
    graph: AbstractGraph,
    facets: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerSummary {
    pub color: u32,
    pub count: usize,
    pub expected: u64,
}

impl ComplexGraph {
    pub fn spec(&self) -> &ComplexSpec {
        &self.spec
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn graph(&self) -> &AbstractGraph {
        &self.graph
    }

    pub fn into_graph(self) -> AbstractGraph {
        self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    fn slot(&self, color: u32) -> Option<usize> {
        self.colors.iter().position(|&c| c == color)
    }

    pub fn layer(&self, color: u32) -> &[Submodule] {
        self.slot(color)
            .map(|i| self.layers[i].as_slice())
            .unwrap_or(&[])
    }

    pub fn global_id(&self, color: u32, index: usize) -> u32 {
        self.offsets[self.slot(color).expect("color present")] + index as u32
    }

    /// Global id of a module, if it is a vertex of this graph.
    pub fn find(&self, m: &Submodule) -> Option<u32> {
        let color = m.rank();
        let slot = self.slot(color)?;
        if !m.is_free() {
            return None;
        }
        self.layers[slot]
            .binary_search(m)
            .ok()
            .map(|i| self.offsets[slot] + i as u32)
    }

    pub fn module(&self, v: u32) -> &Submodule {
        let slot = self.offsets.partition_point(|&o| o <= v) - 1;
        &self.layers[slot][(v - self.offsets[slot]) as usize]
    }

    pub fn color_of(&self, v: u32) -> u32 {
        self.graph.color(v)
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        self.graph.neighbors(v)
    }

    pub fn common_neighbors(&self, u: u32, v: u32, color: u32) -> usize {
        self.graph.common_neighbors(u, v, Some(color))
    }

    pub fn facets(&self) -> Option<&[Vec<u32>]> {
        self.facets.as_deref()
    }

    pub fn layer_summary(&self) -> Vec<LayerSummary> {
        self.colors
            .iter()
            .zip(&self.layers)
            .map(|(&c, l)| LayerSummary {
                color: c,
                count: l.len(),
                expected: self.spec.layer_size(c),
            })
            .collect()
    }

    pub fn edge_list(&self) -> String {
        write_edge_list(&self.graph, self.spec.d, &self.spec.ring_spec().label())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<serde_json::Value> = (0..self.vertex_count() as u32)
            .map(|v| serde_json::json!({"id": v, "color": self.color_of(v), "basis": self.module(v).to_json()}))
            .collect();
        serde_json::json!({
            "d": self.spec.d,
            "ring": self.spec.ring_spec(),
            "colors": self.colors,
            "vertices": vertices,
            "edges": self.graph.edges(),
        })
    }
}

/// Builds the inclusion graph on the given colors (strictly increasing).
pub fn build_colored(spec: &ComplexSpec, colors: &[u32]) -> Result<ComplexGraph, ComplexError> {
    if colors.is_empty() || colors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ComplexError::BadColorSet(colors.to_vec()));
    }
    for &c in colors {
        spec.check_color(c)?;
    }
    let needed: u64 = colors.iter().map(|&c| spec.layer_size(c)).sum();
    if needed > spec.cap {
        return Err(ComplexError::CapExceeded {
            needed,
            cap: spec.cap,
        });
    }
    let ring = spec.ring();
    let d = spec.d as usize;
    let layers: Vec<Vec<Submodule>> = colors
        .iter()
        .map(|&c| enumerate_free(ring, d, c as usize))
        .collect();
    let mut offsets = Vec::with_capacity(colors.len());
    let mut total = 0u32;
    for l in &layers {
        offsets.push(total);
        total += l.len() as u32;
    }
    let mut vertex_colors = Vec::with_capacity(total as usize);
    for (&c, l) in colors.iter().zip(&layers) {
        vertex_colors.extend(std::iter::repeat_n(c, l.len()));
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); total as usize];
    for (bi, &b) in colors.iter().enumerate() {
        for (ai, &a) in colors[..bi].iter().enumerate() {
            let index: FxHashMap<&[u32], u32> = layers[ai]
                .iter()
                .enumerate()
                .map(|(i, m)| (m.basis().data(), i as u32))
                .collect();
            let local = enumerate_free(ring, b as usize, a as usize);
            let lists: Vec<Vec<u32>> = layers[bi]
                .par_iter()
                .map(|big| {
                    let mut ids: Vec<u32> = local
                        .iter()
                        .map(|x| {
                            let image = x.basis().mul(ring, big.basis());
                            let sub = canonical_form(ring, d, image.rows_iter());
                            offsets[ai] + index[sub.basis().data()]
                        })
                        .collect();
                    ids.sort_unstable();
                    ids
                })
                .collect();
            for (j, ids) in lists.into_iter().enumerate() {
                let v = offsets[bi] + j as u32;
                for &u in &ids {
                    adj[u as usize].push(v);
                }
                adj[v as usize].extend(ids);
            }
        }
    }
    let graph = AbstractGraph::from_adjacency(vertex_colors, adj);
    Ok(ComplexGraph {
        spec: spec.clone(),
        colors: colors.to_vec(),
        layers,
        offsets,
        graph,
        facets: None,
    })
}

pub fn build_bipartite(spec: &ComplexSpec, m: u32, n: u32) -> Result<ComplexGraph, ComplexError> {
    if m >= n {
        return Err(ComplexError::BadColorSet(vec![m, n]));
    }
    build_colored(spec, &[m, n])
}

/// All colors `1..d`, plus the maximal flags as facets.
pub fn build_full_complex(spec: &ComplexSpec) -> Result<ComplexGraph, ComplexError> {
    let colors: Vec<u32> = (1..spec.d).collect();
    if colors.is_empty() {
        return Err(ComplexError::DimensionTooSmall(spec.d));
    }
    let mut g = build_colored(spec, &colors)?;
    g.facets = Some(maximal_flags(&g.graph, &colors));
    Ok(g)
}

/// Chains `v_1 < v_2 < ...` with one vertex of each consecutive color.
pub fn maximal_flags(g: &AbstractGraph, colors: &[u32]) -> Vec<Vec<u32>> {
    fn extend(g: &AbstractGraph, colors: &[u32], chain: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if chain.len() == colors.len() {
            out.push(chain.clone());
            return;
        }
        let next = colors[chain.len()];
        let last = *chain.last().unwrap();
        for &w in g.neighbors(last) {
            if g.color(w) == next && chain.iter().all(|&u| g.has_edge(u, w)) {
                chain.push(w);
                extend(g, colors, chain, out);
                chain.pop();
            }
        }
    }
    let mut out = Vec::new();
    let Some(&first) = colors.first() else {
        return out;
    };
    for v in g.vertices_of_color(first) {
        extend(g, colors, &mut vec![v], &mut out);
    }
    out
}

/// The map `V -> V^perp` from the vertices of `src` to those of `dst`, where
/// `dst` must carry the dual colors `d - c`.
pub fn perp_map(src: &ComplexGraph, dst: &ComplexGraph) -> Option<Vec<u32>> {
    let ring = src.spec.ring();
    (0..src.vertex_count() as u32)
        .map(|v| dst.find(&src.module(v).perp(ring)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{count_contained, count_containing, ModuleType};

    fn spec(p: u32, r: u32, d: u32) -> ComplexSpec {
        ComplexSpec::new(RingSpec::zmod(p, r).unwrap(), d).unwrap()
    }

    fn tspec(p: u32, r: u32, d: u32) -> ComplexSpec {
        ComplexSpec::new(RingSpec::tpoly(p, r).unwrap(), d).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let lines = enumerate_spaces(&spec(2, 2, 2), 1).unwrap();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0].basis().data(), &[0, 1]);
        assert!(lines.iter().any(|l| l.basis().data() == [1, 2]));
        assert_eq!(enumerate_spaces(&spec(2, 2, 3), 1).unwrap().len(), 28);
        assert_eq!(enumerate_spaces(&tspec(2, 2, 3), 2).unwrap().len(), 28);
        assert!(matches!(
            enumerate_spaces(&spec(2, 2, 3), 0),
            Err(ComplexError::InvalidColor { .. })
        ));
    }

    #[test]
    fn enumeration_is_canonical_and_distinct() {
        for s in [spec(2, 2, 3), tspec(3, 2, 3), spec(2, 3, 3), tspec(2, 2, 4)] {
            for n in 1..s.d() {
                let layer = enumerate_spaces(&s, n).unwrap();
                assert_eq!(layer.len() as u64, s.layer_size(n));
                assert!(layer.windows(2).all(|w| w[0] < w[1]));
                for m in layer.iter().step_by(7) {
                    assert_eq!(&canonical_form(s.ring(), s.d() as usize, m.rows()), m);
                }
            }
        }
    }

    #[test]
    fn bipartite_examples() {
        let g = build_bipartite(&spec(2, 2, 3), 1, 2).unwrap();
        assert_eq!(g.vertex_count(), 56);
        assert_eq!(g.edge_count(), 168);
        assert!((0..56).all(|v| g.graph().degree(v) == 6));

        let fano = build_bipartite(&spec(2, 1, 3), 1, 2).unwrap();
        assert_eq!(fano.vertex_count(), 14);
        assert!((0..14).all(|v| fano.graph().degree(v) == 3));

        let g = build_bipartite(&spec(2, 2, 4), 1, 3).unwrap();
        assert_eq!(g.vertex_count(), 240);
        assert!((0..240).all(|v| g.graph().degree(v) == 28));
    }

    #[test]
    fn biregular_degrees_match_counts() {
        for s in [spec(2, 2, 4), tspec(2, 2, 4), spec(3, 2, 3), tspec(2, 3, 3)] {
            let (q, r, d) = (s.q(), s.r(), s.d());
            for m in 1..d {
                for n in m + 1..d {
                    let g = build_bipartite(&s, m, n).unwrap();
                    let down = count_containing(n, &ModuleType::free(m), d, q, r);
                    let up = count_contained(m, &ModuleType::free(n), q, r);
                    for v in 0..g.vertex_count() as u32 {
                        let expected = if g.color_of(v) == m { &down } else { &up };
                        assert_eq!(&num_bigint::BigUint::from(g.graph().degree(v)), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn full_complex_facets() {
        let g = build_full_complex(&spec(2, 2, 2)).unwrap();
        assert_eq!(g.edge_count(), 0);
        let fano = build_full_complex(&spec(2, 1, 3)).unwrap();
        assert_eq!(fano.facets().unwrap().len(), 21);
        let g = build_full_complex(&spec(2, 2, 3)).unwrap();
        assert_eq!(g.vertex_count(), 56);
        assert_eq!(g.facets().unwrap().len(), 168);
    }

    #[test]
    fn common_neighbor_examples() {
        let s = spec(2, 2, 3);
        let g = build_bipartite(&s, 1, 2).unwrap();
        let ring = s.ring();
        let lines = g.layer(1).len() as u32;
        for u in 0..lines {
            assert_eq!(g.common_neighbors(u, u, 2), 6);
            for v in 0..lines {
                if u == v {
                    continue;
                }
                let meet = g.module(u).intersect(ring, g.module(v));
                let expected = match meet.module_type().ks.as_slice() {
                    [] => 1,
                    [1] => 2,
                    other => panic!("unexpected intersection type {other:?}"),
                };
                assert_eq!(g.common_neighbors(u, v, 2), expected);
            }
        }
    }

    #[test]
    fn perp_is_an_isomorphism() {
        for s in [spec(2, 2, 4), tspec(2, 2, 3)] {
            let d = s.d();
            for m in 1..d {
                for n in m + 1..d {
                    let g = build_bipartite(&s, m, n).unwrap();
                    let h = build_bipartite(&s, d - n, d - m).unwrap();
                    let map = perp_map(&g, &h).unwrap();
                    assert!(g.graph().is_isomorphism_to(h.graph(), &map));
                }
            }
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let s = spec(3, 2, 3);
        let a = build_full_complex(&s).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| build_full_complex(&s).unwrap());
        assert_eq!(a.graph(), b.graph());
        assert_eq!(a.facets(), b.facets());
    }

    #[test]
    fn cap_is_enforced() {
        let err = ComplexSpec::with_cap(RingSpec::zmod(3, 3).unwrap(), 4, 100_000).unwrap_err();
        assert!(matches!(err, ComplexError::CapExceeded { .. }));
    }
}
