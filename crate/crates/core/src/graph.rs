//! Label-free colored graphs and the plain-text edge-list format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(u32, u32, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Simple undirected graph with a color per vertex. Adjacency lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractGraph {
    colors: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

impl AbstractGraph {
    pub fn from_edges(colors: Vec<u32>, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let n = colors.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Ok(AbstractGraph { colors, adj })
    }

    /// Trusted constructor; lists must be symmetric.
    pub(crate) fn from_adjacency(colors: Vec<u32>, mut adj: Vec<Vec<u32>>) -> Self {
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        AbstractGraph { colors, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, v: u32) -> u32 {
        self.colors[v as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Sorted list of `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    pub fn color_set(&self) -> Vec<u32> {
        self.colors
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn vertices_of_color(&self, c: u32) -> Vec<u32> {
        (0..self.colors.len() as u32)
            .filter(|&v| self.colors[v as usize] == c)
            .collect()
    }

    pub fn common_neighbors(&self, u: u32, v: u32, color: Option<u32>) -> usize {
        let (a, b) = (&self.adj[u as usize], &self.adj[v as usize]);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if color.is_none_or(|c| self.colors[a[i] as usize] == c) {
                        n += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> AbstractGraph {
        assert_eq!(perm.len(), self.vertex_count());
        let n = self.vertex_count();
        let mut colors = vec![0; n];
        let mut adj = vec![Vec::new(); n];
        for v in 0..n {
            colors[perm[v] as usize] = self.colors[v];
            adj[perm[v] as usize] = self.adj[v].iter().map(|&w| perm[w as usize]).collect();
        }
        AbstractGraph::from_adjacency(colors, adj)
    }

    /// Relabels by a uniformly random permutation drawn from `seed`; returns the permutation too.
    pub fn shuffled(&self, seed: u64) -> (AbstractGraph, Vec<u32>) {
        let mut perm: Vec<u32> = (0..self.vertex_count() as u32).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        (self.relabel(&perm), perm)
    }

    /// Same graph with every vertex given color 0.
    pub fn uncolored(&self) -> AbstractGraph {
        AbstractGraph {
            colors: vec![0; self.colors.len()],
            adj: self.adj.clone(),
        }
    }

    pub fn with_colors(&self, colors: Vec<u32>) -> AbstractGraph {
        assert_eq!(colors.len(), self.colors.len());
        AbstractGraph {
            colors,
            adj: self.adj.clone(),
        }
    }

    /// True iff `perm` is a bijection mapping edges onto edges. Colors are ignored.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        self.is_isomorphism_to(self, perm)
    }

    /// True iff `perm` maps the edge set of `self` bijectively onto that of `other`.
    pub fn is_isomorphism_to(&self, other: &AbstractGraph, perm: &[u32]) -> bool {
        let n = self.vertex_count();
        if perm.len() != n || other.vertex_count() != n || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p as usize >= n || std::mem::replace(&mut seen[p as usize], true) {
                return false;
            }
        }
        self.edges()
            .iter()
            .all(|&(u, v)| other.has_edge(perm[u as usize], perm[v as usize]))
    }

    /// Like [`is_isomorphism_to`](Self::is_isomorphism_to), additionally requiring colors to match.
    pub fn is_color_isomorphism_to(&self, other: &AbstractGraph, perm: &[u32]) -> bool {
        self.is_isomorphism_to(other, perm)
            && (0..self.vertex_count()).all(|v| self.colors[v] == other.colors[perm[v] as usize])
    }

    /// True iff there is no edge inside a color class.
    pub fn is_properly_colored(&self) -> bool {
        self.edges()
            .iter()
            .all(|&(u, v)| self.colors[u as usize] != self.colors[v as usize])
    }

    /// Induced subgraph on the given color classes; vertices keep their relative order.
    pub fn induced_on_colors(&self, keep: &[u32]) -> (AbstractGraph, Vec<u32>) {
        let kept: Vec<u32> = (0..self.vertex_count() as u32)
            .filter(|&v| keep.contains(&self.color(v)))
            .collect();
        let mut new_id = vec![u32::MAX; self.vertex_count()];
        for (i, &v) in kept.iter().enumerate() {
            new_id[v as usize] = i as u32;
        }
        let colors = kept.iter().map(|&v| self.color(v)).collect();
        let adj = kept
            .iter()
            .map(|&v| {
                self.adj[v as usize]
                    .iter()
                    .filter(|&&w| new_id[w as usize] != u32::MAX)
                    .map(|&w| new_id[w as usize])
                    .collect()
            })
            .collect();
        (AbstractGraph::from_adjacency(colors, adj), kept)
    }
}

/// Metadata carried in the edge-list header.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeListHeader {
    pub d: Option<u32>,
    pub ring: Option<String>,
    pub colors: Vec<u32>,
    pub sizes: Vec<usize>,
}

/// Header `# freeproj d=.. ring=.. colors=a,b,.. sizes=x,y,..` then one `u v` per line.
/// Vertices are numbered color class by color class, in the order of `colors`;
/// a graph whose colors are not already grouped that way is renumbered stably.
pub fn write_edge_list(g: &AbstractGraph, d: u32, ring_label: &str) -> String {
    if g.colors.windows(2).any(|w| w[0] > w[1]) {
        let mut order: Vec<u32> = (0..g.vertex_count() as u32).collect();
        order.sort_by_key(|&v| g.color(v));
        let mut perm = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            perm[old as usize] = new as u32;
        }
        return write_edge_list(&g.relabel(&perm), d, ring_label);
    }
    let colors = g.color_set();
    let sizes: Vec<usize> = colors
        .iter()
        .map(|&c| g.vertices_of_color(c).len())
        .collect();
    let join = |v: Vec<String>| v.join(",");
    let mut out = format!(
        "# freeproj d={d} ring={ring_label} colors={} sizes={}\n",
        join(colors.iter().map(|c| c.to_string()).collect()),
        join(sizes.iter().map(|c| c.to_string()).collect()),
    );
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<(EdgeListHeader, AbstractGraph), GraphError> {
    let mut header = EdgeListHeader::default();
    let mut edges = Vec::new();
    let err = |line: usize, msg: &str| GraphError::Parse {
        line: line + 1,
        msg: msg.to_string(),
    };
    let parse_list = |s: &str, line: usize| -> Result<Vec<u64>, GraphError> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| err(line, "bad number list"))
            })
            .collect()
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for tok in rest.split_whitespace() {
                let Some((key, val)) = tok.split_once('=') else {
                    continue;
                };
                match key {
                    "d" => header.d = Some(val.parse().map_err(|_| err(i, "bad d"))?),
                    "ring" => header.ring = Some(val.to_string()),
                    "colors" => {
                        header.colors = parse_list(val, i)?.into_iter().map(|x| x as u32).collect()
                    }
                    "sizes" => {
                        header.sizes = parse_list(val, i)?
                            .into_iter()
                            .map(|x| x as usize)
                            .collect()
                    }
                    _ => {}
                }
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(i, "expected two vertex ids"));
        };
        let a: u32 = a.parse().map_err(|_| err(i, "bad vertex id"))?;
        let b: u32 = b.parse().map_err(|_| err(i, "bad vertex id"))?;
        edges.push((a, b));
    }
    let colors: Vec<u32> = if header.sizes.is_empty() {
        let n = edges
            .iter()
            .map(|&(a, b)| a.max(b) as usize + 1)
            .max()
            .unwrap_or(0);
        vec![0; n]
    } else {
        if header.colors.len() != header.sizes.len() {
            return Err(err(0, "colors and sizes differ in length"));
        }
        header
            .colors
            .iter()
            .zip(&header.sizes)
            .flat_map(|(&c, &s)| std::iter::repeat_n(c, s))
            .collect()
    };
    let g = AbstractGraph::from_edges(colors, &edges)?;
    Ok((header, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> AbstractGraph {
        AbstractGraph::from_edges(vec![1, 2, 1], &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn basics() {
        let g = path();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.common_neighbors(0, 2, None), 1);
        assert_eq!(g.common_neighbors(0, 2, Some(1)), 0);
        assert!(g.is_automorphism(&[2, 1, 0]));
        assert!(!g.is_automorphism(&[1, 0, 2]));
        assert!(g.is_properly_colored());
        assert!(AbstractGraph::from_edges(vec![0], &[(0, 0)]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let text = write_edge_list(&path(), 3, "zmod:2:2");
        assert!(text.starts_with("# freeproj d=3 ring=zmod:2:2 colors=1,2 sizes=2,1"));
        let (h, parsed) = parse_edge_list(&text).unwrap();
        assert_eq!(h.d, Some(3));
        assert_eq!(parsed.vertex_count(), 3);
        assert_eq!(parsed.edge_count(), 2);
        assert_eq!(parsed.colors(), &[1, 1, 2]);
        assert!(parse_edge_list("0 1 2\n").is_err());
    }
}
