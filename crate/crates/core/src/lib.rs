//! Validated parameterizations of unstable manifolds for the Fisher equation
//! `u_t = u_xx + α u (1 − c(x) u)` on `[0, π]` with Neumann boundary conditions.
//!
//! The equation is studied through its cosine coefficients. Equilibria,
//! their unstable eigendata, the Morse index, a high-order Taylor expansion of
//! the unstable manifold and a short connecting orbit to the sink are each
//! certified by a Newton-Kantorovich (radii polynomial) argument carried out
//! in interval arithmetic.

// Negated comparisons are deliberate: they reject NaN along with the out-of-range case.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::result_large_err)]

pub mod eigen;
pub mod fisher;
pub mod fourier_taylor;
pub mod interval;
pub mod linalg;
pub mod manifold;
pub mod manifold_validation;
pub mod multi_index;
pub mod orbit;
pub mod par;
pub mod pipeline;
pub mod radii;
pub mod sequence_space;

pub use interval::Interval;
pub use sequence_space::CosineSeq;
