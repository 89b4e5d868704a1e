//! Arbitrary-precision rational scalars, univariate polynomials, reduced
//! rational functions, and truncated Laurent series.
//!
//! Everything in this module is exact: no floating point, and irrational
//! intermediate values (non-square rational under a square root, a residue
//! obstructing termwise integration) are hard errors. Truncation windows on
//! series are carried explicitly and shrunk conservatively — asking for a
//! coefficient outside the known window is an error, never a silent zero.

mod poly;
mod rat;
mod ratfunc;
mod series;

pub use poly::Poly;
pub use rat::{rat, rat_from_str, rat_pow, rat_sqrt, rat_to_f64, rat_to_string, Rat};
pub use ratfunc::RatFunc;
pub use series::LSeries;

use thiserror::Error;

/// Errors from exact arithmetic.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("series centers differ: {0} vs {1}")]
    CenterMismatch(String, String),
    #[error("division by a series with no known nonzero leading coefficient")]
    SeriesDivByZero,
    #[error("square root of series with odd valuation {0}")]
    OddValuation(i64),
    #[error("leading coefficient {0} is not the square of a rational")]
    NotARationalSquare(String),
    #[error("series reversion requires valuation exactly 1 with nonzero linear coefficient")]
    BadReversionInput,
    #[error("termwise integration obstructed by nonzero residue term {0}")]
    ResidueObstruction(String),
    #[error("exponent -1 outside the known window [{0}, {1}]; truncation too short")]
    ResidueWindow(i64, i64),
    #[error("coefficient of exponent {0} outside the known window [{1}, {2}]")]
    UnknownCoefficient(i64, i64, i64),
    #[error("empty window after operation")]
    EmptyWindow,
    #[error("division by the zero polynomial")]
    PolyDivByZero,
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}

pub type Result<T> = std::result::Result<T, ArithError>;
