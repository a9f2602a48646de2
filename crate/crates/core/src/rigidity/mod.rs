//! Graph canonization and reconstruction of the full complex from two colors.

pub mod canon;
pub mod reconstruct;

use thiserror::Error;

pub use canon::{
    automorphism_group, canonicalize, canonicalize_with, is_isomorphic, is_isomorphic_with,
    AutomorphismGroup, CanonOptions, CanonicalLabeling,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("canonical labelings disagree with the graphs they label")]
    CertificateMismatch,
    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),
    #[error("not an automorphism of the input graph")]
    NotAnAutomorphism,
    #[error("bad colors: {0}")]
    BadColors(String),
}

pub use reconstruct::{
    check_pair_counts, extend_automorphism, infer_colors, reconstruct_full, shuffle_edges, Params,
    Provenance, Reconstruction, ReconstructionState, Step,
};
