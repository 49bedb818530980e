//! Topological recursion on `x = z + 1/z`, `y = ln z`.

mod checks;
mod curve;
mod differential;
mod infinity;
mod recursion;

pub use checks::*;
pub use curve::{Chart, SpectralCurve, BRANCH_POINTS};
pub use differential::{Assignment, PoleBasisDifferential};
pub use infinity::*;
pub use recursion::{eo_invariant, EoSolver};
