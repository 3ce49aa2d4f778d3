//! Möbius transformations (ax + b)/(cx + d).

use super::ratmap::{ProjPoint, RationalMap};
use super::{AlgebraError, Poly};
use crate::ring::Coeff;

/// An invertible fractional-linear transformation.
#[derive(Clone, PartialEq, Debug)]
pub struct Mobius<T: Coeff> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Coeff> Mobius<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, AlgebraError> {
        let m = Mobius { a, b, c, d };
        if m.det().is_zero() {
            Err(AlgebraError::SingularMobius)
        } else {
            Ok(m)
        }
    }

    /// x + t.
    pub fn translation(t: T) -> Self {
        Mobius {
            a: T::one(),
            b: t,
            c: T::zero(),
            d: T::one(),
        }
    }

    /// u * x, u invertible.
    pub fn scaling(u: T) -> Result<Self, AlgebraError> {
        Mobius::new(u, T::zero(), T::zero(), T::one())
    }

    pub fn identity() -> Self {
        Mobius::translation(T::zero())
    }

    pub fn det(&self) -> T {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        Mobius::new(self.d.clone(), self.b.neg(), self.c.neg(), self.a.clone())
    }

    pub fn apply(&self, x: &ProjPoint<T>) -> ProjPoint<T> {
        match x {
            ProjPoint::Infinity => {
                if self.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(self.a.div(&self.c).expect("c invertible"))
                }
            }
            ProjPoint::Finite(v) => {
                let n = self.a.mul(v).add(&self.b);
                let d = self.c.mul(v).add(&self.d);
                if d.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(n.div(&d).expect("nonzero denominator"))
                }
            }
        }
    }

    pub fn to_map(&self) -> Result<RationalMap<T>, AlgebraError> {
        RationalMap::from_parts_unchecked(
            Poly::from_coeffs(vec![self.b.clone(), self.a.clone()]),
            Poly::from_coeffs(vec![self.d.clone(), self.c.clone()]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratmap::map_from_ints;
    use crate::ring::{rint, Rat};

    #[test]
    fn singular_rejected() {
        assert_eq!(
            Mobius::new(rint(1), rint(2), rint(2), rint(4)).unwrap_err(),
            AlgebraError::SingularMobius
        );
    }

    #[test]
    fn conjugation_by_identity() {
        let phi = map_from_ints(&[0, 0, 1], &[1]).unwrap();
        let id: Mobius<Rat> = Mobius::identity();
        assert_eq!(phi.conjugate(&id).unwrap(), phi);
    }

    #[test]
    fn conjugation_round_trip() {
        let phi = map_from_ints(&[1, -2, 0, 3], &[2, 1]).unwrap();
        let mu = Mobius::new(rint(2), rint(1), rint(1), rint(3)).unwrap();
        let psi = phi.conjugate(&mu).unwrap();
        let back = psi.conjugate(&mu.inverse().unwrap()).unwrap();
        assert_eq!(back, phi);
        assert_eq!(psi.degree(), phi.degree());
    }

    #[test]
    fn shifted_octic_example() {
        // phi = (x-2)^8 - 2(x-2)^2 + 3, mu = x - 2: psi(0) = phi(2) - 2 = 1
        let x_minus_2 = Poly::from_coeffs(vec![rint(-2), rint(1)]);
        let num = x_minus_2
            .pow(8)
            .add(&x_minus_2.pow(2).scale(&rint(-2)))
            .add(&Poly::constant(rint(3)));
        let phi = RationalMap::new(num, Poly::one()).unwrap();
        let mu = Mobius::new(rint(1), rint(-2), rint(0), rint(1)).unwrap();
        let psi = phi.conjugate(&mu).unwrap();
        assert_eq!(
            psi.eval_proj(&ProjPoint::Finite(rint(0))),
            ProjPoint::Finite(rint(1))
        );
        assert_eq!(psi.degree(), 8);
    }
}
