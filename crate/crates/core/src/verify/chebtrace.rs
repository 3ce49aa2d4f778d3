//! Chebyshev trace witnesses: v(ζ) from the quotient identity
//! v(ζ) = (v(ζγ) + v(ζ^{-1}γ)) / v(γ), where v(z) = z + 1/z and γ is a
//! d^n-th root of a lift b' of the basepoint (v(b') = b).

use super::{Tolerances, VerifyError};
use num::complex::Complex64;

#[derive(Clone, Debug)]
pub struct TraceWitness {
    pub d: usize,
    pub n: usize,
    pub base: Complex64,
    /// Lift with v(lift) = base.
    pub lift: Complex64,
    /// The chosen d^n-th root of the lift.
    pub gamma: Complex64,
    /// Value of the quotient formula.
    pub value: Complex64,
    /// The trace 2cos(2π/d^n) it must reproduce.
    pub expected: Complex64,
    pub error: f64,
}

fn v(z: Complex64) -> Complex64 {
    z + Complex64::new(1.0, 0.0) / z
}

/// Computes the trace of a primitive d^n-th root of unity from the
/// quotient formula over a preimage of `b` under the trace diagram.
pub fn chebyshev_trace_witness(
    d: usize,
    b: Complex64,
    n: usize,
    tol: &Tolerances,
) -> Result<TraceWitness, VerifyError> {
    assert!(d >= 2 && n >= 1);
    // lift: root of z^2 - b z + 1 (so lift + 1/lift = b); pick the root
    // of larger modulus for conditioning (their product is 1)
    let disc = b * b - Complex64::new(4.0, 0.0);
    let sq = disc.sqrt();
    let mut lift = (b + sq) / 2.0;
    let other = (b - sq) / 2.0;
    if other.norm() > lift.norm() {
        lift = other;
    }
    if lift.norm() == 0.0 {
        return Err(VerifyError::DegenerateFiber(
            "lift of the basepoint is zero".into(),
        ));
    }

    let order = (d as u32).pow(n as u32) as f64;
    let root_mod = lift.norm().powf(1.0 / order);
    let base_arg = lift.arg() / order;
    // choose the d^n-th root with the largest |v(γ)|
    let mut gamma = None;
    let mut best = 0.0f64;
    let total = (d as usize).pow(n as u32);
    for k in 0..total {
        let cand = Complex64::from_polar(
            root_mod,
            base_arg + 2.0 * std::f64::consts::PI * (k as f64) / order,
        );
        let t = v(cand).norm();
        if t > best {
            best = t;
            gamma = Some(cand);
        }
    }
    let gamma = gamma
        .filter(|_| best > 1e-6)
        .ok_or(VerifyError::DegenerateLift)?;

    let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / order);
    let value = (v(zeta * gamma) + v(gamma / zeta)) / v(gamma);
    let expected = v(zeta);
    let error = (value - expected).norm();
    if error > tol.witness {
        return Err(VerifyError::ToleranceExceeded {
            check: format!("trace witness for d = {}, n = {}", d, n),
            value: error,
            tol: tol.witness,
        });
    }
    Ok(TraceWitness {
        d,
        n,
        base: b,
        lift,
        gamma,
        value,
        expected,
        error,
    })
}
