//! Matrices and submodules of `O_r^d`.

mod matrix;
pub mod qcomb;
mod snf;
mod submodule;

pub use matrix::{is_primitive, Matrix};
pub use qcomb::{
    count_contained, count_containing, count_spaces, gl_order, q_binom, q_factorial, q_number,
};
pub use snf::{smith_normal_form, Smith};
pub use submodule::{
    canonical_form, howell_form, span_elements, HowellRow, ModuleType, Submodule, Trichotomy,
};
