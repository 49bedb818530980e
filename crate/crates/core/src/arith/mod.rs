//! Exact numeric substrate: rationals, symbolic atoms, polynomials,
//! quasi-polynomials and truncated Laurent series.

pub mod laurent;
pub mod poly;
pub mod quasi;
pub mod rat;
pub mod symrat;

pub use laurent::LaurentSeries;
pub use poly::MultiPoly;
pub use quasi::{quasi_eval, quasi_fit, QuasiPoly};
pub use rat::{c_factor, frac, parse_rat, rat, Rat};
pub use symrat::SymRat;
