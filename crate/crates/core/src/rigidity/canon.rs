//! Canonical labeling of colored graphs by individualization-refinement.
//!
//! Search nodes are ordered partitions refined to equitability. Each node
//! carries a hash of its refinement trace; leaves are compared by the trace
//! sequence and then by the relabeled graph, and the largest leaf is the
//! canonical one. Nodes whose trace falls below the best leaf are cut, equal
//! leaves yield automorphisms that cut sibling subtrees, and children lying in
//! a common orbit of the known automorphisms fixing the current path are
//! visited once.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::Serialize;

use super::RigidityError;
use crate::graph::AbstractGraph;

pub const DEFAULT_VERTEX_BUDGET: usize = 2_000;
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, Copy)]
pub struct CanonOptions {
    pub max_vertices: usize,
    pub max_nodes: u64,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions {
            max_vertices: DEFAULT_VERTEX_BUDGET,
            max_nodes: DEFAULT_NODE_BUDGET,
        }
    }
}

fn mix(h: u64, x: u64) -> u64 {
    // splitmix64 finalizer over the running state
    let mut z = h ^ x
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h << 6)
        .wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
struct Partition {
    elems: Vec<u32>,
    pos: Vec<u32>,
    /// start of the cell holding each position
    start: Vec<u32>,
    /// cell length, valid at cell starts
    len: Vec<u32>,
    cells: usize,
}

struct Scratch {
    count: Vec<u32>,
    touched: Vec<u32>,
    in_queue: Vec<bool>,
    queue: VecDeque<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            count: vec![0; n],
            touched: Vec::new(),
            in_queue: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn push(&mut self, s: u32) {
        if !self.in_queue[s as usize] {
            self.in_queue[s as usize] = true;
            self.queue.push_back(s);
        }
    }
}

impl Partition {
    fn from_colors(colors: &[u32], scratch: &mut Scratch, h: &mut u64) -> Self {
        let n = colors.len();
        let mut elems: Vec<u32> = (0..n as u32).collect();
        elems.sort_by_key(|&v| (colors[v as usize], v));
        let mut pos = vec![0; n];
        for (i, &v) in elems.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        let mut start = vec![0; n];
        let mut len = vec![0; n];
        let mut cells = 0;
        let mut i = 0;
        while i < n {
            let c = colors[elems[i] as usize];
            let mut j = i;
            while j < n && colors[elems[j] as usize] == c {
                start[j] = i as u32;
                j += 1;
            }
            len[i] = (j - i) as u32;
            *h = mix(mix(*h, c as u64), (j - i) as u64);
            scratch.push(i as u32);
            cells += 1;
            i = j;
        }
        Partition {
            elems,
            pos,
            start,
            len,
            cells,
        }
    }

    fn cell_of(&self, v: u32) -> u32 {
        self.start[self.pos[v as usize] as usize]
    }

    fn individualize(&mut self, v: u32, scratch: &mut Scratch, h: &mut u64) {
        let s = self.cell_of(v) as usize;
        let l = self.len[s] as usize;
        *h = mix(*h, s as u64 | 1 << 40);
        if l == 1 {
            return;
        }
        let p = self.pos[v as usize] as usize;
        let other = self.elems[s];
        self.elems.swap(s, p);
        self.pos[other as usize] = p as u32;
        self.pos[v as usize] = s as u32;
        self.len[s] = 1;
        self.len[s + 1] = (l - 1) as u32;
        for x in &mut self.start[s + 1..s + l] {
            *x = (s + 1) as u32;
        }
        self.cells += 1;
        if scratch.in_queue[s] {
            scratch.push((s + 1) as u32);
        }
        scratch.push(s as u32);
    }

    fn refine(&mut self, g: &AbstractGraph, scratch: &mut Scratch, h: &mut u64) {
        let mut keyed: Vec<(u32, u32)> = Vec::new();
        let mut cells: Vec<u32> = Vec::new();
        while let Some(w) = scratch.queue.pop_front() {
            scratch.in_queue[w as usize] = false;
            let wl = self.len[w as usize] as usize;
            for i in w as usize..w as usize + wl {
                for &u in g.neighbors(self.elems[i]) {
                    if scratch.count[u as usize] == 0 {
                        scratch.touched.push(u);
                    }
                    scratch.count[u as usize] += 1;
                }
            }
            cells.clear();
            cells.extend(scratch.touched.iter().map(|&u| self.cell_of(u)));
            cells.sort_unstable();
            cells.dedup();
            for &c in &cells {
                let cs = c as usize;
                let cl = self.len[cs] as usize;
                keyed.clear();
                keyed.extend(
                    self.elems[cs..cs + cl]
                        .iter()
                        .map(|&v| (scratch.count[v as usize], v)),
                );
                keyed.sort_unstable();
                if keyed[0].0 == keyed[cl - 1].0 {
                    *h = mix(*h, (c as u64) << 32 | keyed[0].0 as u64);
                    continue;
                }
                *h = mix(mix(*h, w as u64), c as u64);
                for (i, &(_, v)) in keyed.iter().enumerate() {
                    self.elems[cs + i] = v;
                    self.pos[v as usize] = (cs + i) as u32;
                }
                let mut frags: Vec<(usize, usize)> = Vec::new();
                let mut i = 0;
                while i < cl {
                    let k = keyed[i].0;
                    let mut j = i;
                    while j < cl && keyed[j].0 == k {
                        j += 1;
                    }
                    frags.push((cs + i, j - i));
                    *h = mix(*h, (k as u64) << 32 | (j - i) as u64);
                    i = j;
                }
                for &(fs, fl) in &frags {
                    self.len[fs] = fl as u32;
                    for x in &mut self.start[fs..fs + fl] {
                        *x = fs as u32;
                    }
                }
                self.cells += frags.len() - 1;
                if scratch.in_queue[cs] {
                    for &(fs, _) in &frags[1..] {
                        scratch.push(fs as u32);
                    }
                } else {
                    let largest = frags
                        .iter()
                        .enumerate()
                        .max_by_key(|(i, f)| (f.1, std::cmp::Reverse(*i)))
                        .unwrap()
                        .0;
                    for (i, &(fs, _)) in frags.iter().enumerate() {
                        if i != largest {
                            scratch.push(fs as u32);
                        }
                    }
                }
            }
            for &u in &scratch.touched {
                scratch.count[u as usize] = 0;
            }
            scratch.touched.clear();
        }
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        let mut i = 0;
        while i < self.elems.len() {
            let l = self.len[i];
            if l > 1 && best.is_none_or(|(bl, _)| l < bl) {
                best = Some((l, i));
            }
            i += l as usize;
        }
        best.map(|(_, s)| s)
    }

    fn certificate(&self, g: &AbstractGraph) -> Vec<u32> {
        let n = self.elems.len();
        let mut out = Vec::with_capacity(n + 2 * g.edge_count() + n);
        out.extend(self.elems.iter().map(|&v| g.color(v)));
        let mut nb = Vec::new();
        for &v in &self.elems {
            nb.clear();
            nb.extend(g.neighbors(v).iter().map(|&u| self.pos[u as usize]));
            nb.sort_unstable();
            out.push(nb.len() as u32);
            out.extend_from_slice(&nb);
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Leaf {
    traces: Vec<u64>,
    cert: Vec<u32>,
    path: Vec<u32>,
    elems: Vec<u32>,
}

struct Search<'a> {
    g: &'a AbstractGraph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<u32>>,
    nodes: u64,
    max_nodes: u64,
}

fn divergence(a: &[u32], b: &[u32]) -> usize {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .unwrap_or(a.len().min(b.len()))
}

fn find(parent: &mut [u32], x: u32) -> u32 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut x = x;
    while parent[x as usize] != r {
        let next = parent[x as usize];
        parent[x as usize] = r;
        x = next;
    }
    r
}

/// Orbit representatives (the least element) under the given permutations.
fn orbit_mins<'p>(n: usize, gens: impl Iterator<Item = &'p Vec<u32>>) -> Vec<u32> {
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for g in gens {
        for (v, &w) in g.iter().enumerate() {
            let (a, b) = (find(&mut parent, v as u32), find(&mut parent, w));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    (0..n as u32).map(|v| find(&mut parent, v)).collect()
}

impl Search<'_> {
    fn record_automorphism(&mut self, from: &[u32], to: &[u32]) {
        let mut gamma = vec![0u32; from.len()];
        for (&a, &b) in from.iter().zip(to) {
            gamma[a as usize] = b;
        }
        if gamma.iter().enumerate().any(|(v, &w)| v as u32 != w) {
            self.gens.push(gamma);
        }
    }

    /// Returns the level to jump back to, if any.
    fn dfs(
        &mut self,
        part: Partition,
        path: &mut Vec<u32>,
        traces: &mut Vec<u64>,
    ) -> Result<Option<usize>, RigidityError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(RigidityError::BudgetExceeded(format!(
                "more than {} search nodes",
                self.max_nodes
            )));
        }
        let depth = traces.len();
        let eq_first = self
            .first
            .as_ref()
            .is_none_or(|f| f.traces.get(..depth) == Some(&traces[..]));
        let vs_best = match &self.best {
            None => Ordering::Greater,
            Some(b) => {
                let k = depth.min(b.traces.len());
                traces[..k].cmp(&b.traces[..k])
            }
        };
        if !eq_first && vs_best == Ordering::Less {
            return Ok(None);
        }
        let Some(target) = part.target_cell() else {
            let cert = part.certificate(self.g);
            let leaf = Leaf {
                traces: traces.clone(),
                cert,
                path: path.clone(),
                elems: part.elems,
            };
            let Some(first) = &self.first else {
                self.first = Some(leaf.clone());
                self.best = Some(leaf);
                return Ok(None);
            };
            if first.traces == leaf.traces && first.cert == leaf.cert {
                let (fe, fp) = (first.elems.clone(), first.path.clone());
                self.record_automorphism(&fe, &leaf.elems);
                return Ok(Some(divergence(&fp, &leaf.path)));
            }
            let best = self.best.as_ref().unwrap();
            match (&leaf.traces, &leaf.cert).cmp(&(&best.traces, &best.cert)) {
                Ordering::Greater => self.best = Some(leaf),
                Ordering::Equal => {
                    let (be, bp) = (best.elems.clone(), best.path.clone());
                    self.record_automorphism(&be, &leaf.elems);
                    return Ok(Some(divergence(&bp, &leaf.path)));
                }
                Ordering::Less => {}
            }
            return Ok(None);
        };
        let n = part.elems.len();
        let tl = part.len[target] as usize;
        let mut children: Vec<u32> = part.elems[target..target + tl].to_vec();
        children.sort_unstable();
        let mut known_gens = usize::MAX;
        let mut mins: Vec<u32> = Vec::new();
        let mut scratch = Scratch::new(n);
        for w in children {
            if known_gens != self.gens.len() {
                known_gens = self.gens.len();
                let fixing = self
                    .gens
                    .iter()
                    .filter(|g| path.iter().all(|&v| g[v as usize] == v));
                mins = orbit_mins(n, fixing);
            }
            if mins[w as usize] != w {
                continue;
            }
            let mut child = part.clone();
            let mut h = traces.last().copied().unwrap_or(0);
            child.individualize(w, &mut scratch, &mut h);
            child.refine(self.g, &mut scratch, &mut h);
            path.push(w);
            traces.push(h);
            let jump = self.dfs(child, path, traces)?;
            path.pop();
            traces.pop();
            if let Some(j) = jump {
                if j < depth {
                    return Ok(Some(j));
                }
            }
        }
        Ok(None)
    }
}

/// Result of canonical labeling.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalLabeling {
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<u32>,
    /// Colors in canonical order followed by each canonical vertex's sorted neighbor positions.
    pub certificate: Vec<u32>,
    pub fingerprint: u64,
    /// Automorphisms found along the way; they need not generate the whole group.
    #[serde(skip)]
    pub automorphisms: Vec<Vec<u32>>,
    pub nodes: u64,
}

impl CanonicalLabeling {
    pub fn canonical_graph(&self, g: &AbstractGraph) -> AbstractGraph {
        g.relabel(&self.labeling)
    }

    /// Checks that the labeling carries `g` onto the certificate.
    pub fn verify(&self, g: &AbstractGraph) -> bool {
        let n = g.vertex_count();
        let mut elems = vec![0u32; n];
        let mut seen = vec![false; n];
        for (v, &p) in self.labeling.iter().enumerate() {
            if p as usize >= n || std::mem::replace(&mut seen[p as usize], true) {
                return false;
            }
            elems[p as usize] = v as u32;
        }
        let part = Partition {
            elems,
            pos: self.labeling.clone(),
            start: (0..n as u32).collect(),
            len: vec![1; n],
            cells: n,
        };
        part.certificate(g) == self.certificate
    }
}

pub fn canonicalize(g: &AbstractGraph) -> Result<CanonicalLabeling, RigidityError> {
    canonicalize_with(g, &[], CanonOptions::default())
}

/// Canonical labeling of `g` with the vertices of `fixed` individualized in order.
pub fn canonicalize_with(
    g: &AbstractGraph,
    fixed: &[u32],
    opts: CanonOptions,
) -> Result<CanonicalLabeling, RigidityError> {
    let n = g.vertex_count();
    if n > opts.max_vertices {
        return Err(RigidityError::BudgetExceeded(format!(
            "{n} vertices exceed the budget {}",
            opts.max_vertices
        )));
    }
    let mut scratch = Scratch::new(n);
    let mut h = mix(0, n as u64);
    let mut part = Partition::from_colors(g.colors(), &mut scratch, &mut h);
    part.refine(g, &mut scratch, &mut h);
    for &v in fixed {
        part.individualize(v, &mut scratch, &mut h);
        part.refine(g, &mut scratch, &mut h);
    }
    let mut search = Search {
        g,
        first: None,
        best: None,
        gens: Vec::new(),
        nodes: 0,
        max_nodes: opts.max_nodes,
    };
    let mut traces = vec![h];
    search.dfs(part, &mut Vec::new(), &mut traces)?;
    let best = search.best.expect("search reaches a leaf");
    let mut labeling = vec![0u32; n];
    for (i, &v) in best.elems.iter().enumerate() {
        labeling[v as usize] = i as u32;
    }
    let mut fingerprint = 0u64;
    for &x in best.traces.iter() {
        fingerprint = mix(fingerprint, x);
    }
    for &x in &best.cert {
        fingerprint = mix(fingerprint, x as u64);
    }
    Ok(CanonicalLabeling {
        labeling,
        certificate: best.cert,
        fingerprint,
        automorphisms: search.gens,
        nodes: search.nodes,
    })
}

/// A color-preserving isomorphism `g1 -> g2`, verified edge by edge, or `None`.
pub fn is_isomorphic(
    g1: &AbstractGraph,
    g2: &AbstractGraph,
) -> Result<Option<Vec<u32>>, RigidityError> {
    is_isomorphic_with(g1, &[], g2, &[], CanonOptions::default())
}

/// As [`is_isomorphic`], with the two sequences required to correspond.
pub fn is_isomorphic_with(
    g1: &AbstractGraph,
    fixed1: &[u32],
    g2: &AbstractGraph,
    fixed2: &[u32],
    opts: CanonOptions,
) -> Result<Option<Vec<u32>>, RigidityError> {
    if g1.vertex_count() != g2.vertex_count()
        || g1.edge_count() != g2.edge_count()
        || fixed1.len() != fixed2.len()
    {
        return Ok(None);
    }
    let c1 = canonicalize_with(g1, fixed1, opts)?;
    let c2 = canonicalize_with(g2, fixed2, opts)?;
    if c1.certificate != c2.certificate {
        return Ok(None);
    }
    let mut inv2 = vec![0u32; c2.labeling.len()];
    for (v, &p) in c2.labeling.iter().enumerate() {
        inv2[p as usize] = v as u32;
    }
    let map: Vec<u32> = c1.labeling.iter().map(|&p| inv2[p as usize]).collect();
    if !g1.is_color_isomorphism_to(g2, &map)
        || fixed1
            .iter()
            .zip(fixed2)
            .any(|(&a, &b)| map[a as usize] != b)
    {
        return Err(RigidityError::CertificateMismatch);
    }
    Ok(Some(map))
}

/// Order of the color-preserving automorphism group, with the base and basic orbit sizes.
#[derive(Debug, Clone, Serialize)]
pub struct AutomorphismGroup {
    pub order: u128,
    pub base: Vec<u32>,
    pub orbit_sizes: Vec<u64>,
    #[serde(skip)]
    pub generators: Vec<Vec<u32>>,
}

/// Counts automorphisms by orbit-stabilizer along a base. Every orbit member is
/// witnessed by an explicit automorphism fixing the earlier base points; members
/// not reached by known automorphisms are settled by an isomorphism test.
pub fn automorphism_group(
    g: &AbstractGraph,
    opts: CanonOptions,
) -> Result<AutomorphismGroup, RigidityError> {
    let n = g.vertex_count();
    let mut gens: Vec<Vec<u32>> = canonicalize_with(g, &[], opts)?.automorphisms;
    let mut base: Vec<u32> = Vec::new();
    let mut orbit_sizes = Vec::new();
    loop {
        let mut scratch = Scratch::new(n);
        let mut h = 0;
        let mut part = Partition::from_colors(g.colors(), &mut scratch, &mut h);
        part.refine(g, &mut scratch, &mut h);
        for &v in &base {
            part.individualize(v, &mut scratch, &mut h);
            part.refine(g, &mut scratch, &mut h);
        }
        let Some(target) = part.target_cell() else {
            break;
        };
        let mut cell: Vec<u32> = part.elems[target..target + part.len[target] as usize].to_vec();
        cell.sort_unstable();
        let v = cell[0];
        let mut with_v = base.clone();
        with_v.push(v);
        let mut rejected: Vec<u32> = Vec::new();
        for &w in &cell[1..] {
            let fixing: Vec<&Vec<u32>> = gens
                .iter()
                .filter(|p| base.iter().all(|&b| p[b as usize] == b))
                .collect();
            let mins = orbit_mins(n, fixing.into_iter());
            if mins[w as usize] == mins[v as usize]
                || rejected
                    .iter()
                    .any(|&x| mins[x as usize] == mins[w as usize])
            {
                continue;
            }
            let mut with_w = base.clone();
            with_w.push(w);
            match is_isomorphic_with(g, &with_v, g, &with_w, opts)? {
                Some(map) => gens.push(map),
                None => rejected.push(w),
            }
        }
        let fixing: Vec<&Vec<u32>> = gens
            .iter()
            .filter(|p| base.iter().all(|&b| p[b as usize] == b))
            .collect();
        let mins = orbit_mins(n, fixing.into_iter());
        orbit_sizes.push(
            cell.iter()
                .filter(|&&w| mins[w as usize] == mins[v as usize])
                .count() as u64,
        );
        base.push(v);
    }
    for p in &gens {
        if !g.is_color_isomorphism_to(g, p) {
            return Err(RigidityError::CertificateMismatch);
        }
    }
    let order = orbit_sizes.iter().map(|&s| s as u128).product();
    Ok(AutomorphismGroup {
        order,
        base,
        orbit_sizes,
        generators: gens,
    })
}
