//! Capped-precision scalars of Q_p.
//!
//! A value is stored as p^val * unit with the unit tracked modulo
//! p^(prec - val) ("capped relative" precision), or as zero-to-precision
//! p^prec. Valuations of nonzero-to-precision values are exact;
//! arithmetic propagates precision pessimistically.

use super::ctx::LocalField;
use super::PadicError;
use crate::ring::Rat;
use num::rational::Ratio;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::{BigInt, BigUint};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// Known to be ≡ 0 mod p^prec.
    Zero,
    /// p^val * unit, unit coprime to p, reduced mod p^(prec - val).
    NonZero { val: i64, unit: BigUint },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qp {
    p: u64,
    prec: i64,
    repr: Repr,
}

fn ppow(p: u64, k: i64) -> BigUint {
    debug_assert!(k >= 0);
    BigUint::from(p).pow(k as u32)
}

impl Qp {
    pub fn zero(p: u64, prec: i64) -> Self {
        Qp {
            p,
            prec,
            repr: Repr::Zero,
        }
    }

    pub fn one(p: u64, prec: i64) -> Self {
        Qp::from_i64(1, p, prec)
    }

    pub fn from_i64(n: i64, p: u64, prec: i64) -> Self {
        Qp::from_bigint(&BigInt::from(n), p, prec)
    }

    pub fn from_bigint(n: &BigInt, p: u64, prec: i64) -> Self {
        if n.is_zero() {
            return Qp::zero(p, prec);
        }
        let neg = n.is_negative();
        let mut m = n.abs().to_biguint().expect("abs");
        let pb = BigUint::from(p);
        let mut val = 0i64;
        while (&m % &pb).is_zero() {
            m /= &pb;
            val += 1;
        }
        if val >= prec {
            return Qp::zero(p, prec);
        }
        let modulus = ppow(p, prec - val);
        let mut unit = m % &modulus;
        if neg && !unit.is_zero() {
            unit = &modulus - unit;
        }
        Qp {
            p,
            prec,
            repr: Repr::NonZero { val, unit },
        }
    }

    pub fn from_rat(r: &Rat, p: u64, prec: i64) -> Self {
        let num = Qp::from_bigint(r.numer(), p, prec + 64);
        let den = Qp::from_bigint(r.denom(), p, prec + 64);
        num.div(&den).expect("nonzero denominator").truncate(prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Absolute precision: the value is known modulo p^precision.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Exact valuation, or `None` for zero-to-precision values.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::NonZero { val, .. } => Some(*val),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Caps the absolute precision (never raises it).
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        match &self.repr {
            Repr::Zero => Qp::zero(self.p, prec),
            Repr::NonZero { val, unit } => {
                if *val >= prec {
                    Qp::zero(self.p, prec)
                } else {
                    Qp {
                        p: self.p,
                        prec,
                        repr: Repr::NonZero {
                            val: *val,
                            unit: unit % ppow(self.p, prec - val),
                        },
                    }
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::NonZero { val, unit } => {
                let modulus = ppow(self.p, self.prec - val);
                Qp {
                    p: self.p,
                    prec: self.prec,
                    repr: Repr::NonZero {
                        val: *val,
                        unit: &modulus - unit,
                    },
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p;
        match (&self.repr, &rhs.repr) {
            (Repr::Zero, Repr::Zero) => Qp::zero(p, self.prec.min(rhs.prec)),
            (Repr::Zero, Repr::NonZero { .. }) => rhs.truncate(self.prec),
            (Repr::NonZero { .. }, Repr::Zero) => self.truncate(rhs.prec),
            (Repr::NonZero { val: v1, unit: u1 }, Repr::NonZero { val: v2, unit: u2 }) => {
                let prec = self.prec.min(rhs.prec);
                let vmin = (*v1).min(*v2);
                if vmin >= prec {
                    return Qp::zero(p, prec);
                }
                let modulus = ppow(p, prec - vmin);
                let a = u1 * ppow(p, v1 - vmin) % &modulus;
                let b = u2 * ppow(p, v2 - vmin) % &modulus;
                let mut s = (a + b) % &modulus;
                if s.is_zero() {
                    return Qp::zero(p, prec);
                }
                // strip p factors from the (possibly cancelling) sum
                let pb = BigUint::from(p);
                let mut val = vmin;
                while (&s % &pb).is_zero() {
                    s /= &pb;
                    val += 1;
                    if val >= prec {
                        return Qp::zero(p, prec);
                    }
                }
                Qp {
                    p,
                    prec,
                    repr: Repr::NonZero { val, unit: s },
                }
            }
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p;
        match (&self.repr, &rhs.repr) {
            (Repr::Zero, Repr::Zero) => Qp::zero(p, self.prec + rhs.prec),
            (Repr::Zero, Repr::NonZero { val, .. }) => Qp::zero(p, self.prec + val),
            (Repr::NonZero { val, .. }, Repr::Zero) => Qp::zero(p, rhs.prec + val),
            (Repr::NonZero { val: v1, unit: u1 }, Repr::NonZero { val: v2, unit: u2 }) => {
                let rel = (self.prec - v1).min(rhs.prec - v2);
                let val = v1 + v2;
                let modulus = ppow(p, rel);
                Qp {
                    p,
                    prec: val + rel,
                    repr: Repr::NonZero {
                        val,
                        unit: u1 * u2 % modulus,
                    },
                }
            }
        }
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        match &self.repr {
            Repr::Zero => Err(PadicError::DivisionByZeroToPrecision),
            Repr::NonZero { val, unit } => {
                let rel = self.prec - val;
                let modulus = ppow(self.p, rel);
                let inv = modinv(unit, &modulus).ok_or(PadicError::DivisionByZeroToPrecision)?;
                Ok(Qp {
                    p: self.p,
                    prec: -val + rel,
                    repr: Repr::NonZero {
                        val: -val,
                        unit: inv,
                    },
                })
            }
        }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Qp::one(self.p, self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Two values agree at their shared precision.
    pub fn agrees_with(&self, rhs: &Self) -> bool {
        let shared = self.prec.min(rhs.prec);
        self.sub(rhs).truncate(shared).is_zero()
    }

    /// Canonical integer representative of p^(-val) * value mod p^rel,
    /// for display and serialization.
    pub fn unit_digits(&self) -> Option<(i64, BigUint)> {
        match &self.repr {
            Repr::Zero => None,
            Repr::NonZero { val, unit } => Some((*val, unit.clone())),
        }
    }
}

impl std::fmt::Display for Qp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "O({}^{})", self.p, self.prec),
            Repr::NonZero { val, unit } => {
                if *val == 0 {
                    write!(f, "{} + O({}^{})", unit, self.p, self.prec)
                } else {
                    write!(
                        f,
                        "{}^{}*{} + O({}^{})",
                        self.p, val, unit, self.p, self.prec
                    )
                }
            }
        }
    }
}

fn modinv(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m = BigInt::from(modulus.clone());
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if !r0.is_one() {
        return None;
    }
    let mut t = t0 % &m;
    if t.is_negative() {
        t += &m;
    }
    t.to_biguint()
}

/// Context object implementing the local-field interface for plain Q_p.
#[derive(Clone, Copy, Debug)]
pub struct QpCtx {
    pub p: u64,
    pub prec: i64,
}

impl LocalField for QpCtx {
    type Elem = Qp;

    fn zero(&self) -> Qp {
        Qp::zero(self.p, self.prec)
    }
    fn one(&self) -> Qp {
        Qp::one(self.p, self.prec)
    }
    fn from_i64(&self, n: i64) -> Qp {
        Qp::from_i64(n, self.p, self.prec)
    }
    fn add(&self, a: &Qp, b: &Qp) -> Qp {
        a.add(b)
    }
    fn neg(&self, a: &Qp) -> Qp {
        a.neg()
    }
    fn mul(&self, a: &Qp, b: &Qp) -> Qp {
        a.mul(b)
    }
    fn inv(&self, a: &Qp) -> Result<Qp, PadicError> {
        a.inv()
    }
    fn is_zero(&self, a: &Qp) -> bool {
        a.is_zero()
    }
    fn val(&self, a: &Qp) -> Option<Ratio<i64>> {
        a.valuation().map(Ratio::from_integer)
    }
    fn abs_prec(&self, a: &Qp) -> Ratio<i64> {
        Ratio::from_integer(a.precision())
    }
}

/// Unit square root by Newton iteration (odd p: simple residue root;
/// p = 2: requires unit ≡ 1 mod 8).
pub fn sqrt_unit(x: &Qp) -> Result<Qp, PadicError> {
    let p = x.prime();
    if x.valuation() != Some(0) {
        return Err(PadicError::HenselConditionFailed(
            "square root of a non-unit".into(),
        ));
    }
    let (_, unit) = x.unit_digits().expect("nonzero");
    let seed = if p == 2 {
        if (&unit % BigUint::from(8u32)).to_u64() != Some(1) {
            return Err(PadicError::HenselConditionFailed(
                "unit is not a square in Q_2 (not 1 mod 8)".into(),
            ));
        }
        Qp::one(2, x.precision())
    } else {
        let residue = (&unit % BigUint::from(p)).to_u64().expect("small residue");
        let mut s = None;
        for cand in 1..p {
            if (cand * cand) % p == residue {
                s = Some(cand);
                break;
            }
        }
        match s {
            Some(c) => Qp::from_i64(c as i64, p, x.precision()),
            None => {
                return Err(PadicError::HenselConditionFailed(
                    "unit is not a quadratic residue".into(),
                ))
            }
        }
    };
    // Newton: z <- z - (z^2 - x) / (2z)
    let two = Qp::from_i64(2, p, x.precision());
    let mut z = seed;
    for _ in 0..64 {
        let f = z.mul(&z).sub(x);
        if f.is_zero() {
            break;
        }
        let step = f.div(&two.mul(&z))?;
        z = z.sub(&step);
    }
    let residual = z.mul(&z).sub(x);
    if !residual.is_zero() {
        return Err(PadicError::HenselConditionFailed(
            "square-root iteration did not converge".into(),
        ));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn valuation_of_twelve() {
        let x = Qp::from_i64(12, 2, 30);
        assert_eq!(x.valuation(), Some(2));
        let y = Qp::from_i64(12, 3, 30);
        assert_eq!(y.valuation(), Some(1));
    }

    #[test]
    fn valuation_additivity() {
        let cases = [(12i64, 8i64), (6, 9), (-20, 50), (7, 7)];
        for p in [2u64, 3, 5] {
            for (a, b) in cases {
                let x = Qp::from_i64(a, p, 40);
                let y = Qp::from_i64(b, p, 40);
                let xy = x.mul(&y);
                assert_eq!(
                    xy.valuation().unwrap(),
                    x.valuation().unwrap() + y.valuation().unwrap()
                );
            }
        }
    }

    #[test]
    fn division_by_zero_to_precision() {
        let z = Qp::zero(2, 20);
        let x = Qp::from_i64(3, 2, 20);
        assert_eq!(
            x.div(&z).unwrap_err(),
            PadicError::DivisionByZeroToPrecision
        );
    }

    #[test]
    fn rational_embedding() {
        // 3/4 in Q_2: valuation -2
        let x = Qp::from_rat(&rat(3, 4), 2, 30);
        assert_eq!(x.valuation(), Some(-2));
        let back = x.mul(&Qp::from_i64(4, 2, 30));
        assert!(back.agrees_with(&Qp::from_i64(3, 2, 28)));
    }

    #[test]
    fn cancellation_in_addition() {
        let x = Qp::from_i64(7, 2, 30);
        let y = Qp::from_i64(-7, 2, 30);
        assert!(x.add(&y).is_zero());
        let a = Qp::from_i64(5, 2, 30);
        let b = Qp::from_i64(3, 2, 30);
        assert_eq!(a.add(&b).valuation(), Some(3));
    }

    #[test]
    fn sqrt_of_seventeen_in_q2() {
        // 17 ≡ 1 mod 8: a unit square
        let x = Qp::from_i64(17, 2, 40);
        let s = sqrt_unit(&x).unwrap();
        assert!(s.mul(&s).agrees_with(&x));
    }

    #[test]
    fn sqrt_rejects_nonresidue() {
        let x = Qp::from_i64(3, 2, 40);
        assert!(sqrt_unit(&x).is_err());
        let y = Qp::from_i64(2, 5, 40);
        assert!(sqrt_unit(&y).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let x = Qp::from_i64(10, 5, 30);
        let inv = x.inv().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        assert!(x.mul(&inv).agrees_with(&Qp::one(5, 25)));
    }
}
