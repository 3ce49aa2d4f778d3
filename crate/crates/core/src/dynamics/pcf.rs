//! Post-critical finiteness classification.
//!
//! Critical points of degree <= 2 over Q are tracked exactly (in Q or
//! Q(√D)); higher-degree critical points are reported as unsupported
//! rather than approximated. The negative verdict is always bounded:
//! `NotPcfWithin(N)`, never an unconditional "not PCF".

use super::orbit::{detect_period, OrbitLimits, OrbitOutcome};
use super::quad::{is_rat_square, rat_sqrt, QuadExt};
use super::DynamicsError;
use crate::algebra::{Poly, ProjPoint, RationalMap};
use crate::ring::{rat, rat_height, Coeff, Rat};
use crate::verify::{certified_roots_rat, Tolerances};
use num::BigInt;

/// Where a critical point lives.
#[derive(Clone, Debug, PartialEq)]
pub enum CritLocus {
    Rational(Rat),
    /// A conjugate pair (s ± √D)/2q presented by one representative.
    Quadratic {
        disc: Rat,
        point: QuadExt,
    },
    Infinity,
}

#[derive(Clone, Debug)]
pub struct CriticalOrbit {
    pub locus: CritLocus,
    pub multiplicity: usize,
    pub outcome: OrbitOutcome,
    /// Rendered orbit points, for reporting.
    pub orbit: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PcfVerdict {
    Pcf,
    NotPcfWithin(usize),
}

#[derive(Clone, Debug)]
pub struct PcfReport {
    pub orbits: Vec<CriticalOrbit>,
    pub verdict: PcfVerdict,
    pub bound: usize,
    pub height_bound: BigInt,
}

/// Classifies a map as PCF or not-PCF-within-bounds by tracking every
/// critical orbit exactly.
pub fn classify_pcf(phi: &RationalMap<Rat>, bound: usize) -> Result<PcfReport, DynamicsError> {
    phi.require_degree(2)?;
    let (crit, inf_mult) = phi.critical_polynomial();
    let factors = split_linear_quadratic(&crit)?;

    let mut heights: Vec<BigInt> = phi
        .num()
        .coeffs()
        .iter()
        .chain(phi.den().coeffs())
        .map(rat_height)
        .collect();
    for (f, _) in &factors {
        if let CritFactor::Linear(r) = f {
            heights.push(rat_height(r));
        }
    }
    let limits = OrbitLimits::for_inputs(bound, &heights);

    let mut orbits = Vec::new();
    if inf_mult > 0 {
        let r = detect_period(phi, ProjPoint::<Rat>::Infinity, &limits);
        orbits.push(CriticalOrbit {
            locus: CritLocus::Infinity,
            multiplicity: inf_mult,
            outcome: r.outcome.clone(),
            orbit: r.points.iter().map(render_rat_point).collect(),
        });
    }
    for (factor, mult) in factors {
        match factor {
            CritFactor::Linear(root) => {
                let r = detect_period(phi, ProjPoint::Finite(root.clone()), &limits);
                orbits.push(CriticalOrbit {
                    locus: CritLocus::Rational(root),
                    multiplicity: mult,
                    outcome: r.outcome.clone(),
                    orbit: r.points.iter().map(render_rat_point).collect(),
                });
            }
            CritFactor::Quadratic {
                disc,
                half_s,
                half_q,
            } => {
                let phi_q = phi.map_coeffs(|c| QuadExt::from_rat(c.clone()));
                // both Galois conjugates, tracked separately
                for sign in [1i64, -1] {
                    let pt = QuadExt::new(
                        disc.clone(),
                        half_s.clone(),
                        &half_q * Rat::from_integer(BigInt::from(sign)),
                    );
                    let r = detect_period(&phi_q, ProjPoint::Finite(pt.clone()), &limits);
                    orbits.push(CriticalOrbit {
                        locus: CritLocus::Quadratic {
                            disc: disc.clone(),
                            point: pt,
                        },
                        multiplicity: mult,
                        outcome: r.outcome.clone(),
                        orbit: r.points.iter().map(render_quad_point).collect(),
                    });
                }
            }
        }
    }

    let verdict = if orbits
        .iter()
        .all(|o| matches!(o.outcome, OrbitOutcome::Periodic { .. }))
    {
        PcfVerdict::Pcf
    } else {
        PcfVerdict::NotPcfWithin(bound)
    };
    Ok(PcfReport {
        orbits,
        verdict,
        bound,
        height_bound: limits.height_bound,
    })
}

enum CritFactor {
    Linear(Rat),
    /// x^2 - sx + p with non-square discriminant; roots half_s ± half_q √disc.
    Quadratic {
        disc: Rat,
        half_s: Rat,
        half_q: Rat,
    },
}

/// Splits a rational polynomial into linear and quadratic factors with
/// multiplicities, by exact verification of numerically guessed factors.
fn split_linear_quadratic(c: &Poly<Rat>) -> Result<Vec<(CritFactor, usize)>, DynamicsError> {
    let mut out = Vec::new();
    if c.deg() == 0 {
        return Ok(out);
    }
    let tol = Tolerances::default();
    let roots = certified_roots_rat(c, &tol)
        .map_err(|_| DynamicsError::UnsupportedCriticalDegree { degree: c.deg() })?;
    // roots come back grouped by exact multiplicity (Yun); resolve each
    // simple cluster into rational or quadratic factors
    let mut unresolved: Vec<(num::complex::Complex64, usize)> = Vec::new();
    for r in &roots {
        if let Some(q) = rationalize(r.value.re) {
            if r.value.im.abs() < 1e-9 * (1.0 + r.value.re.abs()) && c.eval(&q).is_zero() {
                out.push((CritFactor::Linear(q), r.multiplicity));
                continue;
            }
        }
        unresolved.push((r.value, r.multiplicity));
    }
    // pair unresolved roots into exact quadratics
    while let Some((z, mult)) = unresolved.pop() {
        let mut matched = None;
        for (k, (w, wm)) in unresolved.iter().enumerate() {
            if *wm != mult {
                continue;
            }
            let s = z + w;
            let p = z * w;
            if s.im.abs() > 1e-7 * (1.0 + s.norm()) || p.im.abs() > 1e-7 * (1.0 + p.norm()) {
                continue;
            }
            if let (Some(sr), Some(pr)) = (rationalize(s.re), rationalize(p.re)) {
                // verify exactly: x^2 - s x + p divides c
                let quad =
                    Poly::from_coeffs(vec![pr.clone(), -sr.clone(), Rat::from_integer(1.into())]);
                if c.divmod(&quad).map_or(false, |(_, rem)| rem.is_zero()) {
                    matched = Some((k, sr, pr));
                    break;
                }
            }
        }
        match matched {
            Some((k, sr, pr)) => {
                unresolved.remove(k);
                let disc = &sr * &sr - rat(4, 1) * &pr;
                if is_rat_square(&disc) {
                    let sq = rat_sqrt(&disc).expect("square disc");
                    let half = rat(1, 2);
                    out.push((CritFactor::Linear((&sr + &sq) * &half), mult));
                    out.push((CritFactor::Linear((&sr - &sq) * &half), mult));
                } else {
                    out.push((
                        CritFactor::Quadratic {
                            disc,
                            half_s: &sr * rat(1, 2),
                            half_q: rat(1, 2),
                        },
                        mult,
                    ));
                }
            }
            None => {
                return Err(DynamicsError::UnsupportedCriticalDegree {
                    degree: unresolved.len() + 1,
                })
            }
        }
    }
    Ok(out)
}

/// Continued-fraction rationalization with a denominator cap; the
/// result is only a candidate, callers verify exactly.
fn rationalize(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let max_den: i64 = 1_000_000_000;
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..40 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - x).abs() < 1e-12 * (1.0 + x.abs()) {
            return Some(rat(p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let r = 1.0 / frac;
        let a = r.floor();
        if !(a.is_finite()) || a >= max_den as f64 {
            break;
        }
        let ai = a as i64;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac = r - a;
    }
    let approx = p1 as f64 / q1 as f64;
    if (approx - x).abs() < 1e-9 * (1.0 + x.abs()) {
        Some(rat(p1, q1))
    } else {
        None
    }
}

fn render_rat_point(p: &ProjPoint<Rat>) -> String {
    match p {
        ProjPoint::Infinity => "inf".into(),
        ProjPoint::Finite(v) => crate::ring::rat_to_string(v),
    }
}

fn render_quad_point(p: &ProjPoint<QuadExt>) -> String {
    match p {
        ProjPoint::Infinity => "inf".into(),
        ProjPoint::Finite(v) => {
            if v.is_rational() {
                crate::ring::rat_to_string(v.rational_part())
            } else {
                format!(
                    "{} + {}*sqrt({})",
                    crate::ring::rat_to_string(v.rational_part()),
                    crate::ring::rat_to_string(v.radical_part()),
                    crate::ring::rat_to_string(v.radicand())
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::map_from_ints;
    use crate::ring::rint;

    #[test]
    fn x2_minus_1_is_pcf() {
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let rep = classify_pcf(&phi, 20).unwrap();
        assert_eq!(rep.verdict, PcfVerdict::Pcf);
        // infinity fixed, 0 of period 2
        assert!(rep.orbits.iter().any(|o| matches!(
            (&o.locus, &o.outcome),
            (
                CritLocus::Infinity,
                OrbitOutcome::Periodic {
                    preperiod: 0,
                    period: 1
                }
            )
        )));
        assert!(rep.orbits.iter().any(|o| matches!(
            (&o.locus, &o.outcome),
            (CritLocus::Rational(r), OrbitOutcome::Periodic { preperiod: 0, period: 2 }) if r.is_zero()
        )));
    }

    #[test]
    fn squaring_map_is_pcf() {
        let phi = map_from_ints(&[0, 0, 1], &[1]).unwrap();
        let rep = classify_pcf(&phi, 20).unwrap();
        assert_eq!(rep.verdict, PcfVerdict::Pcf);
    }

    #[test]
    fn x2_plus_1_escapes() {
        let phi = map_from_ints(&[1, 0, 1], &[1]).unwrap();
        let rep = classify_pcf(&phi, 20).unwrap();
        assert_eq!(rep.verdict, PcfVerdict::NotPcfWithin(20));
    }

    #[test]
    fn quadratic_critical_points_tracked() {
        // phi = (x^2+1)/x has critical points ±1; make one with irrational ones:
        // phi = (x^2 + 2)/x: c = x^2 - 2, critical points ±√2
        let phi = map_from_ints(&[2, 0, 1], &[0, 1]).unwrap();
        let rep = classify_pcf(&phi, 12).unwrap();
        assert!(rep
            .orbits
            .iter()
            .any(|o| matches!(&o.locus, CritLocus::Quadratic { disc, .. } if *disc == rint(8))));
    }

    #[test]
    fn cubic_critical_points_unsupported() {
        // the degree-4 Lattès map on y^2 = x^3 + 1 has critical points
        // generating cubic extensions
        let phi = crate::dynamics::lattes_multiplication_map(&rint(0), &rint(1), 2).unwrap();
        let err = classify_pcf(&phi, 16).unwrap_err();
        assert!(matches!(
            err,
            DynamicsError::UnsupportedCriticalDegree { .. }
        ));
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(0.5).unwrap(), rat(1, 2));
        assert_eq!(rationalize(-2.0).unwrap(), rint(-2));
        assert_eq!(rationalize(1.0 / 3.0).unwrap(), rat(1, 3));
    }
}
