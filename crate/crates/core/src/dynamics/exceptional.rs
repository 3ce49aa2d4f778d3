//! Exceptional points: finite, fully invariant backward orbits.
//!
//! The test is the two-level criterion: collect the distinct points of
//! the first and second preimages; the basepoint is exceptional iff
//! that set has at most two elements and is carried into itself by the
//! map. Over characteristic zero an exceptional set never exceeds two
//! points, so two levels decide exactly.

use super::quad::{is_rat_square, rat_sqrt, QuadExt};
use super::DynamicsError;
use crate::algebra::{squarefree_part, Poly, ProjPoint, RationalMap, DEFAULT_DIGIT_BOUND};
use crate::ring::{rat, Rat};

/// Exact exceptionality test for a rational basepoint (or infinity).
pub fn is_exceptional(phi: &RationalMap<Rat>, b: &ProjPoint<Rat>) -> Result<bool, DynamicsError> {
    phi.require_degree(2)?;
    let phi2 = phi.iterate(2, DEFAULT_DIGIT_BOUND)?;
    let (h1, inf1) = preimage_poly(phi, b);
    let (h2, inf2) = preimage_poly(&phi2, b);

    let has_inf = inf1 || inf2;
    let mut merged = Poly::one();
    for h in [&h1, &h2] {
        if h.deg() > 0 {
            merged = merged.mul(h);
        }
    }
    let distinct = if merged.deg() > 0 {
        squarefree_part(&merged)
    } else {
        Poly::one()
    };
    let count = distinct.deg() + usize::from(has_inf);
    if count > 2 {
        return Ok(false);
    }

    // candidate set: at most 2 points, rational or quadratic-conjugate
    let mut set: Vec<ProjPoint<QuadExt>> = Vec::new();
    if has_inf {
        set.push(ProjPoint::Infinity);
    }
    match distinct.deg() {
        0 => {}
        1 => {
            let r = -distinct.coeff(0) / distinct.coeff(1);
            set.push(ProjPoint::Finite(QuadExt::from_rat(r)));
        }
        2 => {
            let a = distinct.coeff(2);
            let s = -distinct.coeff(1) / &a;
            let p = distinct.coeff(0) / &a;
            let disc = &s * &s - rat(4, 1) * &p;
            if is_rat_square(&disc) {
                let sq = rat_sqrt(&disc).expect("square disc");
                let half = rat(1, 2);
                set.push(ProjPoint::Finite(QuadExt::from_rat((&s + &sq) * &half)));
                set.push(ProjPoint::Finite(QuadExt::from_rat((&s - &sq) * &half)));
            } else {
                let half_s = &s * rat(1, 2);
                set.push(ProjPoint::Finite(QuadExt::new(
                    disc.clone(),
                    half_s.clone(),
                    rat(1, 2),
                )));
                set.push(ProjPoint::Finite(QuadExt::new(disc, half_s, rat(-1, 2))));
            }
        }
        _ => unreachable!("count bound"),
    }
    debug_assert!(set.len() <= 2);
    if set.is_empty() {
        // a nonempty map always has preimages; the set can only be empty
        // if everything concentrated at infinity without the flag, which
        // cannot happen
        return Ok(false);
    }

    // forward stability in Q(√D)
    let phi_q = phi.map_coeffs(|c| QuadExt::from_rat(c.clone()));
    for s in &set {
        let image = phi_q.eval_proj(s);
        if !set.contains(&image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Preimage polynomial of a projective point, plus a flag for infinity
/// being a preimage (degree drop or polynomial behaviour at infinity).
fn preimage_poly(phi: &RationalMap<Rat>, b: &ProjPoint<Rat>) -> (Poly<Rat>, bool) {
    let d = phi.degree();
    match b {
        ProjPoint::Finite(v) => {
            let h = phi.num().sub(&phi.den().scale(v));
            let inf = h.deg() < d;
            (h, inf)
        }
        ProjPoint::Infinity => {
            let h = phi.den().clone();
            let inf = phi.num().deg() > phi.den().deg();
            (h, inf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::map_from_ints;
    use crate::ring::rint;

    #[test]
    fn zero_exceptional_for_squaring() {
        let phi = map_from_ints(&[0, 0, 1], &[1]).unwrap();
        assert!(is_exceptional(&phi, &ProjPoint::Finite(rint(0))).unwrap());
        assert!(is_exceptional(&phi, &ProjPoint::Infinity).unwrap());
        assert!(!is_exceptional(&phi, &ProjPoint::Finite(rint(1))).unwrap());
    }

    #[test]
    fn inverse_square_swaps_zero_and_infinity() {
        // phi = 1/x^2
        let phi = map_from_ints(&[1], &[0, 0, 1]).unwrap();
        assert!(is_exceptional(&phi, &ProjPoint::Finite(rint(0))).unwrap());
        assert!(is_exceptional(&phi, &ProjPoint::Infinity).unwrap());
    }

    #[test]
    fn zero_not_exceptional_for_x2_minus_1() {
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        assert!(!is_exceptional(&phi, &ProjPoint::Finite(rint(0))).unwrap());
        // but infinity still is (polynomial map)
        assert!(is_exceptional(&phi, &ProjPoint::Infinity).unwrap());
    }

    #[test]
    fn forward_invariance_of_exceptional_sets() {
        // if b is exceptional then so is phi(b)
        let maps = [
            map_from_ints(&[0, 0, 1], &[1]).unwrap(),
            map_from_ints(&[1], &[0, 0, 1]).unwrap(),
            map_from_ints(&[-1, 0, 1], &[1]).unwrap(),
        ];
        let points = [
            ProjPoint::Finite(rint(0)),
            ProjPoint::Finite(rint(2)),
            ProjPoint::Infinity,
        ];
        for phi in &maps {
            for b in &points {
                if is_exceptional(phi, b).unwrap() {
                    let image = phi.eval_proj(b);
                    assert!(is_exceptional(phi, &image).unwrap());
                }
            }
        }
    }
}
