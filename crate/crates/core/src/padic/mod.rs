//! Finite-precision p-adic arithmetic, Newton polygons, Hensel lifting,
//! Eisenstein towers, ramification breaks and Herbrand functions.
//!
//! The guiding rule of the precision model: a comparison is either
//! decided within tracked precision or reported as
//! [`PadicError::PrecisionExhausted`] — never guessed.

mod breaks;
mod ctx;
mod herbrand;
mod qp;
mod tower;

pub use breaks::{cyclotomic_breaks, cyclotomic_tower, ramification_breaks, BreakData};
pub use ctx::{
    hensel_root, newton_polygon, padd, pderiv, pdivmod, peval, pmul, pneg, pscale, psub, ptrim,
    resultant, LocalField, NewtonPolygon, PolygonSegment,
};
pub use herbrand::HerbrandFn;
pub use qp::{sqrt_unit, Qp, QpCtx};
pub use tower::{Elt, Level, LevelKind, Tower, TowerCtx};

use thiserror::Error;

/// Default absolute precision for the base field, in v_p units
/// (elements are tracked modulo p^60 at every tower level).
pub const DEFAULT_PRECISION: i64 = 60;

#[derive(Debug, Error, PartialEq)]
pub enum PadicError {
    /// A decision (valuation, hull vertex, comparison) could not be made
    /// at the tracked precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by an element that is zero to working precision")]
    DivisionByZeroToPrecision,
    /// A polynomial offered as an Eisenstein step is not one.
    #[error("not Eisenstein: {0}")]
    NotEisenstein(String),
    /// |f(seed)| >= |f'(seed)|^2 in the valuation sense.
    #[error("Hensel condition failed: {0}")]
    HenselConditionFailed(String),
    #[error("invalid break data: {0}")]
    InvalidBreaks(String),
    /// A Newton polygon needed for a decision is ambiguous.
    #[error("ambiguous Newton polygon: {0}")]
    AmbiguousPolygon(String),
}
