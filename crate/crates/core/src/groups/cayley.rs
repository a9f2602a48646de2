//! Cayley graphs on `D_n x C_2 x C_2`.

use crate::graph::AbstractGraph;
use crate::ring::Flavor;

use super::GroupError;

/// `sigma^rot tau^flip` in the dihedral group of order `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dihedral {
    pub rot: u32,
    pub flip: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElem {
    pub dihedral: Dihedral,
    pub c1: u32,
    pub c2: u32,
}

impl GroupElem {
    pub fn new(rot: u32, flip: u32, c1: u32, c2: u32) -> Self {
        GroupElem {
            dihedral: Dihedral { rot, flip },
            c1,
            c2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupSpec {
    pub n: u32,
    pub connection: Vec<GroupElem>,
}

impl FiniteGroupSpec {
    pub fn order(&self) -> usize {
        8 * self.n as usize
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem::new(0, 0, 0, 0)
    }

    pub fn mul(&self, x: GroupElem, y: GroupElem) -> GroupElem {
        let n = self.n;
        let (a, b) = (x.dihedral, y.dihedral);
        let rot = if a.flip == 0 {
            (a.rot + b.rot) % n
        } else {
            (a.rot + n - b.rot % n) % n
        };
        GroupElem::new(
            rot,
            (a.flip + b.flip) % 2,
            (x.c1 + y.c1) % 2,
            (x.c2 + y.c2) % 2,
        )
    }

    pub fn inverse(&self, x: GroupElem) -> GroupElem {
        let d = x.dihedral;
        let rot = if d.flip == 0 {
            (self.n - d.rot) % self.n
        } else {
            d.rot
        };
        GroupElem::new(rot, d.flip, x.c1, x.c2)
    }

    pub fn index(&self, x: GroupElem) -> u32 {
        ((x.dihedral.rot * 2 + x.dihedral.flip) * 2 + x.c1) * 2 + x.c2
    }

    pub fn elements(&self) -> Vec<GroupElem> {
        let mut out = vec![];
        for rot in 0..self.n {
            for flip in 0..2 {
                for c1 in 0..2 {
                    for c2 in 0..2 {
                        out.push(GroupElem::new(rot, flip, c1, c2));
                    }
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<(), GroupError> {
        if self.n < 3 {
            return Err(GroupError::BadConnectionSet(format!(
                "dihedral degree {} is below 3",
                self.n
            )));
        }
        for (i, &s) in self.connection.iter().enumerate() {
            let d = s.dihedral;
            if d.rot >= self.n || d.flip > 1 || s.c1 > 1 || s.c2 > 1 {
                return Err(GroupError::BadConnectionSet(format!(
                    "{s:?} is not a group element"
                )));
            }
            if s == self.identity() {
                return Err(GroupError::BadConnectionSet("contains the identity".into()));
            }
            if self.connection[..i].contains(&s) {
                return Err(GroupError::BadConnectionSet(format!("{s:?} is repeated")));
            }
            if !self.connection.contains(&self.inverse(s)) {
                return Err(GroupError::BadConnectionSet(format!(
                    "inverse of {s:?} is missing"
                )));
            }
        }
        Ok(())
    }
}

/// The connection sets realizing the rank-three line-plane graphs over `Z/4`
/// and `F_2[t]/t^2`. Here `tau sigma^k = (-k mod 7, 1)`.
pub fn standard_connection_set(flavor: Flavor) -> FiniteGroupSpec {
    let t = |k: u32, c1, c2| GroupElem::new((7 - k) % 7, 1, c1, c2);
    let connection = match flavor {
        Flavor::IntegerMod => vec![
            t(0, 0, 0),
            t(0, 1, 0),
            t(1, 1, 0),
            t(1, 1, 1),
            t(3, 0, 0),
            t(3, 1, 1),
        ],
        Flavor::TruncatedPoly => vec![
            t(0, 0, 0),
            t(0, 1, 0),
            t(1, 1, 0),
            t(1, 1, 1),
            t(3, 1, 0),
            t(3, 0, 1),
        ],
    };
    FiniteGroupSpec { n: 7, connection }
}

/// Right Cayley graph: `g ~ g s`. Vertices are numbered by [`FiniteGroupSpec::index`].
pub fn cayley_graph(spec: &FiniteGroupSpec) -> Result<AbstractGraph, GroupError> {
    spec.validate()?;
    let mut edges = vec![];
    for g in spec.elements() {
        for &s in &spec.connection {
            let (u, v) = (spec.index(g), spec.index(spec.mul(g, s)));
            if u < v {
                edges.push((u, v));
            }
        }
    }
    AbstractGraph::from_edges(vec![0; spec.order()], &edges)
        .map_err(|e| GroupError::BadConnectionSet(e.to_string()))
}
