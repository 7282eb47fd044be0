//! Dense complex linear-algebra kernels: Hermitian eigendecomposition,
//! matrix functions, Sylvester solves, and trace inner products.
//!
//! Everything here is a pure function on immutable inputs; no shared
//! state, safe to call concurrently.

mod eig;
mod funcs;
mod matrix;
mod sylvester;

pub use eig::{herm_eig, EigenDecomposition, HERMITIAN_TOL};
pub use funcs::{herm_fn, herm_fn_real, inv_power, sqrt_psd, unitary_exp, SQRT_CLIP_TOL};
pub use matrix::{frob_inner, frob_norm, ComplexMatrix};
pub use sylvester::{sylvester_solve, Symmetry, PENCIL_TOL};
