//! Free projective spaces over the finite local rings `Z/p^r` and `F_p[t]/t^r`.

pub mod complex;
pub mod graph;
pub mod groups;
pub mod linalg;
pub mod rigidity;
pub mod ring;
pub mod spectra;

pub use complex::{build_bipartite, build_full_complex, ComplexError, ComplexGraph, ComplexSpec};
pub use graph::AbstractGraph;
pub use linalg::{canonical_form, Matrix, ModuleType, Submodule};
pub use ring::{Flavor, Ring, RingAut, RingElem, RingError, RingSpec};
