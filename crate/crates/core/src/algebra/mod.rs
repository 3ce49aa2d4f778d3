//! Exact polynomial and rational-function algebra.

mod gcd;
mod mobius;
mod poly;
mod ratmap;

pub use gcd::{poly_content_int, poly_gcd, squarefree_part, yun_squarefree};
pub use mobius::Mobius;
pub use poly::Poly;
pub use ratmap::{map_from_ints, ProjPoint, RationalMap};

use thiserror::Error;

/// Default bound on coefficient size: decimal digits per coefficient.
pub const DEFAULT_DIGIT_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    /// Both numerator and denominator were the zero polynomial.
    #[error("zero map: numerator and denominator both vanish")]
    ZeroMap,
    /// A degree-0 map arose where degree >= 1 is required.
    #[error("constant map where a degree >= 1 map is required")]
    ConstantMap,
    /// Coefficient sizes exceeded the configured bound.
    #[error("coefficient overflow: {digits} decimal digits exceeds bound {bound}")]
    Overflow { digits: u64, bound: u64 },
    /// Möbius transformation with ad - bc = 0.
    #[error("singular Möbius transformation (ad - bc = 0)")]
    SingularMobius,
}
