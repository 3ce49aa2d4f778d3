//! Exact arithmetic in a real or imaginary quadratic extension Q(√d).

use crate::ring::{Coeff, Rat};
use num::traits::Zero;
use std::hash::{Hash, Hasher};

/// `a + b√d` with `d` a fixed non-square rational.
///
/// Elements with `b = 0` are plain rationals and compare equal across
/// different `d` tags, so ring constants (`zero`, `one`, `from_i64`)
/// need no field context.
#[derive(Clone, Debug)]
pub struct QuadExt {
    d: Rat,
    a: Rat,
    b: Rat,
}

impl QuadExt {
    pub fn new(d: Rat, a: Rat, b: Rat) -> Self {
        debug_assert!(!is_rat_square(&d), "radicand must be a non-square");
        QuadExt { d, a, b }
    }

    pub fn from_rat(a: Rat) -> Self {
        QuadExt {
            d: <Rat as Coeff>::zero(),
            a,
            b: <Rat as Coeff>::zero(),
        }
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }
    pub fn radical_part(&self) -> &Rat {
        &self.b
    }
    pub fn radicand(&self) -> &Rat {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }

    /// Galois conjugate a - b√d.
    pub fn conj(&self) -> Self {
        QuadExt {
            d: self.d.clone(),
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    /// Field norm a^2 - d b^2.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.d * &self.b * &self.b
    }

    fn join_d(&self, rhs: &Self) -> Rat {
        if Zero::is_zero(&self.b) {
            rhs.d.clone()
        } else {
            if !Zero::is_zero(&rhs.b) {
                debug_assert_eq!(self.d, rhs.d, "mixed quadratic fields");
            }
            self.d.clone()
        }
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (Zero::is_zero(&self.b) || self.d == other.d)
    }
}
impl Eq for QuadExt {}

impl Hash for QuadExt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !Zero::is_zero(&self.b) {
            self.d.hash(state);
        }
    }
}

impl Coeff for QuadExt {
    fn zero() -> Self {
        QuadExt::from_rat(<Rat as Coeff>::zero())
    }
    fn one() -> Self {
        QuadExt::from_rat(<Rat as Coeff>::one())
    }
    fn from_i64(n: i64) -> Self {
        QuadExt::from_rat(<Rat as Coeff>::from_i64(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn add(&self, rhs: &Self) -> Self {
        QuadExt {
            d: self.join_d(rhs),
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
    fn neg(&self) -> Self {
        QuadExt {
            d: self.d.clone(),
            a: -&self.a,
            b: -&self.b,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let d = self.join_d(rhs);
        QuadExt {
            a: &self.a * &rhs.a + &d * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        }
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        // norm is nonzero because d is not a square
        let n = self.norm();
        debug_assert!(!Zero::is_zero(&n));
        let ninv = n.recip();
        Some(QuadExt {
            d: self.d.clone(),
            a: &self.a * &ninv,
            b: -&self.b * &ninv,
        })
    }
}

/// Exact test for a rational being a perfect square.
pub fn is_rat_square(r: &Rat) -> bool {
    use num::traits::Signed;
    if Zero::is_zero(r) {
        return true;
    }
    if r.is_negative() {
        return false;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    &(&sn * &sn) == n && &(&sd * &sd) == d
}

/// Exact rational square root, if one exists.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    use num::traits::Signed;
    if r.is_negative() {
        return None;
    }
    let sn = r.numer().sqrt();
    let sd = r.denom().sqrt();
    if &(&sn * &sn) == r.numer() && &(&sd * &sd) == r.denom() {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, rint};

    #[test]
    fn sqrt2_inverse() {
        let s = QuadExt::new(rint(2), rint(0), rint(1)); // √2
        let inv = s.inv().unwrap();
        assert_eq!(s.mul(&inv), Coeff::one());
        assert_eq!(inv, QuadExt::new(rint(2), rint(0), rat(1, 2)));
    }

    #[test]
    fn rational_elements_compare_across_tags() {
        let x = QuadExt::new(rint(5), rint(3), rint(0));
        let y = QuadExt::from_rat(rint(3));
        assert_eq!(x, y);
    }

    #[test]
    fn square_detection() {
        assert!(is_rat_square(&rat(9, 4)));
        assert!(!is_rat_square(&rint(2)));
        assert!(!is_rat_square(&rint(-4)));
        assert_eq!(rat_sqrt(&rat(9, 4)), Some(rat(3, 2)));
    }
}
