//! Orbit-partition and product checks for maps in K(x^m) fixing 0 and ∞.
//!
//! For such a map written as f/g with f monic of degree d > deg g and
//! f(0) = 0, the fiber polynomial over α is h = f - αg, and with
//! c = g(0):
//!
//!   * the roots of h are permuted by multiplication by ζ_m, in orbits
//!     of size exactly m;
//!   * the full root product is (-1)^{d+1} c α;
//!   * a product of orbit representatives, raised to the m-th power,
//!     is (-1)^{(m+d)/m} c α.

use super::roots::{certified_roots_complex, lex_cmp};
use super::{Tolerances, VerifyError};
use crate::algebra::RationalMap;
use crate::ring::{rat_to_f64, Rat};
use num::complex::Complex64;

#[derive(Clone, Debug)]
pub struct PowerStructureReport {
    pub m: usize,
    pub degree: usize,
    /// Largest distance from ζ_m · root to the nearest root.
    pub orbit_closure_error: f64,
    /// Sizes of the ζ_m-orbits (each must be exactly m).
    pub orbit_sizes: Vec<usize>,
    /// |Π roots - (-1)^{d+1} c α|.
    pub full_product_error: f64,
    /// |(Π representatives)^m - (-1)^{(m+d)/m} c α|.
    pub representative_power_error: f64,
}

/// Verifies the ζ_m-orbit partition of the fiber over α and the two
/// product identities, within tolerance.
pub fn verify_power_structure(
    phi: &RationalMap<Rat>,
    alpha: Complex64,
    m: usize,
    tol: &Tolerances,
) -> Result<PowerStructureReport, VerifyError> {
    if m < 2 {
        return Err(VerifyError::NotPowerComposite {
            m,
            reason: "m must be at least 2".into(),
        });
    }
    let order = phi.power_composite_order();
    if order % m != 0 {
        return Err(VerifyError::NotPowerComposite {
            m,
            reason: format!("map has power-composite order {}", order),
        });
    }
    let d = phi.degree();
    // hypotheses: f(0) = 0 and deg f > deg g (0 and ∞ fixed)
    if !phi.num().coeff(0).eq(&num::traits::Zero::zero()) {
        return Err(VerifyError::NotPowerComposite {
            m,
            reason: "numerator constant term is nonzero (0 not fixed)".into(),
        });
    }
    if phi.num().deg() <= phi.den().deg() {
        return Err(VerifyError::NotPowerComposite {
            m,
            reason: "deg f <= deg g (infinity not fixed)".into(),
        });
    }
    if alpha.norm() == 0.0 {
        return Err(VerifyError::NotPowerComposite {
            m,
            reason: "alpha must be nonzero".into(),
        });
    }

    // rescale so the numerator is monic; c = g(0) in that scaling
    let lead = rat_to_f64(phi.num().leading().expect("nonzero"));
    let fc: Vec<Complex64> = phi
        .num()
        .coeffs()
        .iter()
        .map(|x| Complex64::new(rat_to_f64(x) / lead, 0.0))
        .collect();
    let gc: Vec<Complex64> = phi
        .den()
        .coeffs()
        .iter()
        .map(|x| Complex64::new(rat_to_f64(x) / lead, 0.0))
        .collect();
    let c0 = gc[0];

    // fiber polynomial h = f - α g, monic of degree d
    let mut h: Vec<Complex64> = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let a = fc.get(i).copied().unwrap_or_default();
        let b = gc.get(i).copied().unwrap_or_default();
        h.push(a - alpha * b);
    }
    let roots = certified_roots_complex(&h, tol)?;
    // expand multiplicities into a flat list
    let mut flat: Vec<Complex64> = Vec::with_capacity(d);
    for r in &roots {
        for _ in 0..r.multiplicity {
            flat.push(r.value);
        }
    }
    flat.sort_by(lex_cmp);

    let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / (m as f64));
    // orbit partition: repeatedly take the lexicographically smallest
    // unassigned root and match its ζ-orbit
    let mut assigned = vec![false; flat.len()];
    let mut orbit_sizes = Vec::new();
    let mut reps: Vec<Complex64> = Vec::new();
    let mut closure_err = 0.0f64;
    for i in 0..flat.len() {
        if assigned[i] {
            continue;
        }
        let rep = flat[i];
        reps.push(rep);
        let mut size = 0;
        let mut cur = rep;
        for _ in 0..m {
            // nearest unassigned root to cur
            let mut best: Option<(usize, f64)> = None;
            for (j, z) in flat.iter().enumerate() {
                if assigned[j] {
                    continue;
                }
                let dist = (z - cur).norm();
                if best.map_or(true, |(_, bd)| dist < bd) {
                    best = Some((j, dist));
                }
            }
            let (j, dist) = best.ok_or_else(|| VerifyError::ToleranceExceeded {
                check: "orbit partition ran out of roots".into(),
                value: f64::INFINITY,
                tol: tol.check,
            })?;
            if dist > tol.check * (1.0 + cur.norm()) {
                return Err(VerifyError::ToleranceExceeded {
                    check: "zeta-orbit closure".into(),
                    value: dist,
                    tol: tol.check * (1.0 + cur.norm()),
                });
            }
            closure_err = closure_err.max(dist);
            assigned[j] = true;
            size += 1;
            cur = zeta * cur;
        }
        // after m steps the orbit must close back on the representative
        let back = (cur - rep).norm();
        closure_err = closure_err.max(back);
        if back > tol.check * (1.0 + rep.norm()) {
            return Err(VerifyError::ToleranceExceeded {
                check: "zeta^m returns to representative".into(),
                value: back,
                tol: tol.check * (1.0 + rep.norm()),
            });
        }
        orbit_sizes.push(size);
    }
    if orbit_sizes.iter().any(|&s| s != m) || orbit_sizes.len() != d / m {
        return Err(VerifyError::ToleranceExceeded {
            check: "orbit sizes".into(),
            value: orbit_sizes.len() as f64,
            tol: (d / m) as f64,
        });
    }

    // product identities
    let full: Complex64 = flat.iter().product();
    let sign_full = if (d + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let expect_full = Complex64::new(sign_full, 0.0) * c0 * alpha;
    let full_err = (full - expect_full).norm();
    let scale_full = 1.0 + expect_full.norm();
    if full_err > tol.check * scale_full {
        return Err(VerifyError::ToleranceExceeded {
            check: "full product identity".into(),
            value: full_err,
            tol: tol.check * scale_full,
        });
    }

    let rep_prod: Complex64 = reps.iter().product();
    let mut powed = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        powed *= rep_prod;
    }
    let sign_rep = if (m + d) / m % 2 == 0 { 1.0 } else { -1.0 };
    let expect_rep = Complex64::new(sign_rep, 0.0) * c0 * alpha;
    let rep_err = (powed - expect_rep).norm();
    let scale_rep = 1.0 + expect_rep.norm();
    if rep_err > tol.check * scale_rep {
        return Err(VerifyError::ToleranceExceeded {
            check: "representative power identity".into(),
            value: rep_err,
            tol: tol.check * scale_rep,
        });
    }

    Ok(PowerStructureReport {
        m,
        degree: d,
        orbit_closure_error: closure_err,
        orbit_sizes,
        full_product_error: full_err,
        representative_power_error: rep_err,
    })
}
