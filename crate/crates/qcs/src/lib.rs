//! Exact Laurent expansions of curves on triangulated surfaces, computed
//! from snake/band graph matchings and from 2x2 matrix products.

pub mod cli;
pub mod curvespec;
pub mod error;
pub mod laurent;
pub mod mat2;
pub mod mpath;
pub mod skein;
pub mod snakeband;

pub use error::{Error, Result};
pub use laurent::{LaurentPoly, Var};
pub use mat2::Mat2;
