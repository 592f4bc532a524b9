//! Numerical spin geometry on surfaces in the model spaces R³, S³, H³ and on
//! hypersurfaces of R⁴.
//!
//! The library restricts Killing spinors to immersed surfaces by parallel
//! transport of a modified connection, verifies the Dirac-type identities the
//! restricted field satisfies, reconstructs the shape operator from the
//! spinor's energy-momentum tensor, and checks the Gauss-Codazzi
//! integrability conditions — all on a catalog of closed-form test
//! geometries.

// index loops mirror the tensor formulas they implement
#![allow(clippy::needless_range_loop)]
// `!(x > tol)` sends NaN down the error path; `x <= tol` would not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clifford;
pub mod config;
pub mod error;
pub mod fd;
pub mod hypersurface4;
pub mod killing_flow;
pub mod model_spaces;
pub mod report;
pub mod spin_calculus;
pub mod surface_charts;

pub use error::{Error, Result};
