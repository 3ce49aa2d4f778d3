//! Exact forward-orbit tracking with cycle detection.

use super::quad::QuadExt;
use crate::algebra::{ProjPoint, RationalMap};
use crate::ring::{rat_height, Coeff, Rat};
use num::BigInt;
use std::collections::HashMap;
use std::hash::Hash;

/// Naive height used by the escape criterion.
pub trait Height {
    fn height(&self) -> BigInt;
}

impl Height for Rat {
    fn height(&self) -> BigInt {
        rat_height(self)
    }
}

impl Height for QuadExt {
    fn height(&self) -> BigInt {
        let a = rat_height(self.rational_part());
        let b = rat_height(self.radical_part());
        if a > b {
            a
        } else {
            b
        }
    }
}

impl<T: Height> Height for ProjPoint<T> {
    fn height(&self) -> BigInt {
        match self {
            ProjPoint::Finite(t) => t.height(),
            ProjPoint::Infinity => BigInt::from(0),
        }
    }
}

/// Escape bounds for orbit tracking. A verdict of "escaped" is always
/// relative to these bounds; it is never an unconditional negative.
#[derive(Clone, Debug)]
pub struct OrbitLimits {
    pub max_points: usize,
    pub height_bound: BigInt,
}

impl OrbitLimits {
    pub fn new(max_points: usize, height_bound: BigInt) -> Self {
        OrbitLimits {
            max_points,
            height_bound,
        }
    }

    /// Default policy: at most `max_points` distinct points, height cap
    /// max(10^6, 10 * max input height).
    pub fn for_inputs(max_points: usize, input_heights: &[BigInt]) -> Self {
        let mut h = BigInt::from(1_000_000u64);
        for x in input_heights {
            let ten_x = x * 10;
            if ten_x > h {
                h = ten_x;
            }
        }
        OrbitLimits {
            max_points,
            height_bound: h,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitOutcome {
    Periodic { preperiod: usize, period: usize },
    Escaped { steps: usize },
}

#[derive(Clone, Debug)]
pub struct OrbitReport<T: Coeff> {
    pub start: ProjPoint<T>,
    pub outcome: OrbitOutcome,
    /// The orbit prefix actually computed (up to and including the first
    /// repeated point for periodic orbits).
    pub points: Vec<ProjPoint<T>>,
}

impl<T: Coeff> OrbitReport<T> {
    pub fn is_periodic(&self) -> bool {
        matches!(self.outcome, OrbitOutcome::Periodic { .. })
    }
}

/// Tracks the exact forward orbit of a point, reporting preperiod and
/// period on cycle closure, or an escape once the orbit exceeds the
/// point or height bounds.
pub fn detect_period<T>(
    phi: &RationalMap<T>,
    start: ProjPoint<T>,
    limits: &OrbitLimits,
) -> OrbitReport<T>
where
    T: Coeff + Eq + Hash + Height,
{
    let mut seen: HashMap<ProjPoint<T>, usize> = HashMap::new();
    let mut points: Vec<ProjPoint<T>> = Vec::new();
    let mut current = start.clone();
    loop {
        if let Some(&i) = seen.get(&current) {
            return OrbitReport {
                start,
                outcome: OrbitOutcome::Periodic {
                    preperiod: i,
                    period: points.len() - i,
                },
                points,
            };
        }
        if points.len() >= limits.max_points || current.height() > limits.height_bound {
            return OrbitReport {
                start,
                outcome: OrbitOutcome::Escaped {
                    steps: points.len(),
                },
                points,
            };
        }
        seen.insert(current.clone(), points.len());
        points.push(current.clone());
        current = phi.eval_proj(&current);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::map_from_ints;
    use crate::ring::rint;

    fn limits() -> OrbitLimits {
        OrbitLimits::for_inputs(64, &[])
    }

    #[test]
    fn zero_has_period_two_under_x2_minus_1() {
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let r = detect_period(&phi, ProjPoint::Finite(rint(0)), &limits());
        assert_eq!(
            r.outcome,
            OrbitOutcome::Periodic {
                preperiod: 0,
                period: 2
            }
        );
    }

    #[test]
    fn infinity_fixed_under_polynomials() {
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let r = detect_period(&phi, ProjPoint::Infinity, &limits());
        assert_eq!(
            r.outcome,
            OrbitOutcome::Periodic {
                preperiod: 0,
                period: 1
            }
        );
    }

    #[test]
    fn one_is_preperiodic() {
        // 1 -> 0 -> -1 -> 0
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let r = detect_period(&phi, ProjPoint::Finite(rint(1)), &limits());
        assert_eq!(
            r.outcome,
            OrbitOutcome::Periodic {
                preperiod: 1,
                period: 2
            }
        );
    }

    #[test]
    fn growing_orbit_escapes() {
        // x^2 + 1: orbit of 0 grows without bound
        let phi = map_from_ints(&[1, 0, 1], &[1]).unwrap();
        let r = detect_period(&phi, ProjPoint::Finite(rint(0)), &limits());
        assert!(matches!(r.outcome, OrbitOutcome::Escaped { .. }));
    }

    #[test]
    fn conjugation_covariance() {
        use crate::algebra::Mobius;
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let mu = Mobius::new(rint(2), rint(1), rint(1), rint(3)).unwrap();
        let psi = phi.conjugate(&mu).unwrap();
        for start in [
            ProjPoint::Finite(rint(0)),
            ProjPoint::Finite(rint(1)),
            ProjPoint::Infinity,
        ] {
            let a = detect_period(&phi, start.clone(), &limits());
            let b = detect_period(&psi, mu.apply(&start), &limits());
            assert_eq!(a.outcome, b.outcome);
        }
    }
}
