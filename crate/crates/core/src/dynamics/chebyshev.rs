//! Normalized Chebyshev polynomials: T_d(x + 1/x) = x^d + x^{-d}.

use crate::algebra::{Poly, RationalMap};
use crate::ring::{rint, Rat};

/// The degree-d monic Chebyshev polynomial, from the recurrence
/// T_0 = 2, T_1 = x, T_{n+1} = x T_n - T_{n-1}.
pub fn chebyshev(d: usize) -> Poly<Rat> {
    let mut prev: Poly<Rat> = Poly::constant(rint(2));
    let mut cur: Poly<Rat> = Poly::x();
    if d == 0 {
        return prev;
    }
    for _ in 1..d {
        let next = Poly::x().mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// The trace quotient v(x) = x + 1/x = (x^2 + 1)/x as a rational map.
pub fn trace_quotient_map() -> RationalMap<Rat> {
    RationalMap::new(
        Poly::from_coeffs(vec![rint(1), rint(0), rint(1)]),
        Poly::x(),
    )
    .expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{map_from_ints, RationalMap, DEFAULT_DIGIT_BOUND};
    use crate::dynamics::verify_semiconjugacy;
    use crate::ring::Coeff;

    fn cheb_map(d: usize) -> RationalMap<Rat> {
        RationalMap::new(chebyshev(d), Poly::one()).unwrap()
    }

    fn power_map(d: usize) -> RationalMap<Rat> {
        RationalMap::new(Poly::monomial(rint(1), d), Poly::one()).unwrap()
    }

    #[test]
    fn small_chebyshev_values() {
        assert_eq!(chebyshev(1), Poly::x());
        assert_eq!(chebyshev(2).coeffs(), &[rint(-2), rint(0), rint(1)]);
        assert_eq!(
            chebyshev(3).coeffs(),
            &[rint(0), rint(-3), rint(0), rint(1)]
        );
    }

    #[test]
    fn composition_law() {
        for (d1, d2) in [(2, 2), (2, 3), (3, 2), (4, 2), (2, 4), (8, 8), (5, 6)] {
            if d1 * d2 > 64 {
                continue;
            }
            let lhs = cheb_map(d1).compose(&cheb_map(d2)).unwrap();
            let rhs = cheb_map(d1 * d2);
            assert_eq!(lhs, rhs, "T_{} ∘ T_{} = T_{}", d1, d2, d1 * d2);
        }
    }

    #[test]
    fn semiconjugate_to_power_map() {
        let v = trace_quotient_map();
        for d in 2..=10 {
            assert!(
                verify_semiconjugacy(&cheb_map(d), &v, &power_map(d)),
                "T_{} ∘ v = v ∘ x^{}",
                d,
                d
            );
        }
    }

    #[test]
    fn semiconjugacy_rejects_degree_mismatch() {
        let v = map_from_ints(&[0, 1], &[1]).unwrap(); // identity
        assert!(!verify_semiconjugacy(&power_map(2), &v, &power_map(3)));
    }

    #[test]
    fn trace_identity_two_variables() {
        // v(x)v(y) = v(xy) + v(x/y), cleared of denominators:
        // (x^2+1)(y^2+1) = (x^2 y^2 + 1) + (x^2 + y^2) over Q[y][x]
        type B = Poly<Rat>;
        let y: B = Poly::x();
        let y2 = y.mul(&y);
        let one_b: B = Poly::one();
        let y2p1 = y2.add(&one_b);
        // polynomials in x with coefficients in Q[y]
        let x2: Poly<B> = Poly::monomial(one_b.clone(), 2);
        let lhs = x2.add(&Poly::constant(one_b.clone())).scale(&y2p1);
        let rhs = Poly::monomial(y2.clone(), 2) // x^2 y^2
            .add(&Poly::constant(one_b.clone())) // + 1
            .add(&Poly::monomial(one_b.clone(), 2)) // + x^2
            .add(&Poly::constant(y2)); // + y^2
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_of_power_identity() {
        // T_d(v(x)) = v(x^d) exactly as rational maps, d <= 10
        let v = trace_quotient_map();
        for d in 2..=10usize {
            let lhs = cheb_map(d).compose(&v).unwrap();
            let num = Poly::monomial(rint(1), 2 * d).add(&Poly::one());
            let den = Poly::monomial(rint(1), d);
            let rhs = RationalMap::new(num, den).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn iterates_match_composition_law() {
        let t2 = cheb_map(2);
        assert_eq!(t2.iterate(3, DEFAULT_DIGIT_BOUND).unwrap(), cheb_map(8));
    }
}
