//! Dynamical classification and the special families.

mod chebyshev;
mod exceptional;
mod lattes;
mod orbit;
mod pcf;
mod quad;

pub use chebyshev::{chebyshev, trace_quotient_map};
pub use exceptional::is_exceptional;
pub use lattes::{lattes_multiplication_map, DivisionPolynomials};
pub use orbit::{detect_period, Height, OrbitLimits, OrbitOutcome, OrbitReport};
pub use pcf::{classify_pcf, CritLocus, CriticalOrbit, PcfReport, PcfVerdict};
pub use quad::QuadExt;

use crate::algebra::RationalMap;
use crate::ring::Rat;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    /// An irreducible factor of the critical polynomial has degree > 2.
    #[error("critical point of degree {degree} over Q is not supported (max 2)")]
    UnsupportedCriticalDegree { degree: usize },
    /// 4a^3 + 27b^2 = 0.
    #[error("singular curve: discriminant vanishes")]
    SingularCurve,
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// Exact check of the intertwining identity `phi ∘ pi = pi ∘ psi` for
/// maps over Q. Degrees must satisfy deg phi = deg psi (the two
/// composites otherwise cannot agree).
pub fn verify_semiconjugacy(
    phi: &RationalMap<Rat>,
    pi: &RationalMap<Rat>,
    psi: &RationalMap<Rat>,
) -> bool {
    if phi.degree() != psi.degree() {
        return false;
    }
    match (phi.compose(pi), pi.compose(psi)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}
