//! Certified complex-numeric verification layer.
//!
//! Everything here works in double precision with explicit residual
//! certificates; a computation that cannot be certified fails with
//! [`VerifyError::NonConvergence`] or [`VerifyError::ToleranceExceeded`]
//! rather than returning an unverified answer.

mod chebtrace;
mod lattes_fiber;
mod power;
mod preimage;
mod roots;
mod witness;

pub use chebtrace::{chebyshev_trace_witness, TraceWitness};
pub use lattes_fiber::{lattes_fiber_check, FiberReport};
pub use power::{verify_power_structure, PowerStructureReport};
pub use preimage::{preimage_tree, NodeValue, PreimageTree, TreeNode};
pub use roots::{certified_roots_complex, certified_roots_rat, CertifiedRoot};
pub use witness::{witness_root_of_unity, UnityWitness, WitnessExpr};

use thiserror::Error;

/// Numeric policy: residual and comparison tolerances, all scaled by a
/// single knob. Two orders of slack separate the certification layer
/// (per-root residuals) from the assertion layer (per-check
/// comparisons).
#[derive(Clone, Debug)]
pub struct Tolerances {
    /// Relative residual target for certified roots.
    pub root_residual: f64,
    /// Comparison tolerance for product/partition checks.
    pub check: f64,
    /// Error budget for root-of-unity witnesses.
    pub witness: f64,
    /// Iteration cap for the simultaneous root finder.
    pub max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_residual: 1e-12,
            check: 1e-8,
            witness: 1e-9,
            max_iterations: 400,
        }
    }
}

impl Tolerances {
    /// Scales every tolerance by a common factor in (0, 1].
    pub fn scaled(scale: f64) -> Self {
        assert!(scale > 0.0 && scale <= 1.0, "tolerance scale in (0, 1]");
        let base = Tolerances::default();
        Tolerances {
            root_residual: base.root_residual * scale,
            check: base.check * scale,
            witness: base.witness * scale,
            max_iterations: base.max_iterations,
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    /// The root finder could not certify all roots at the residual target.
    #[error(
        "root finder failed to certify roots: residual {residual:.3e} above target {target:.3e}"
    )]
    NonConvergence { residual: f64, target: f64 },
    /// A fiber polynomial collapsed unexpectedly.
    #[error("degenerate fiber: {0}")]
    DegenerateFiber(String),
    /// The map does not carry the required power-composite structure.
    #[error("map is not power-composite for m = {m}: {reason}")]
    NotPowerComposite { m: usize, reason: String },
    /// A verified quantity exceeded its tolerance.
    #[error("tolerance exceeded in {check}: |error| = {value:.3e} > {tol:.3e}")]
    ToleranceExceeded { check: String, value: f64, tol: f64 },
    /// A hypothesis of the underlying statement failed.
    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),
    /// No usable lift with nonzero trace was found.
    #[error("degenerate lift: all candidate roots have near-zero trace")]
    DegenerateLift,
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
    #[error(transparent)]
    Dynamics(#[from] crate::dynamics::DynamicsError),
}
