//! Rational maps on the projective line and Möbius conjugation.

use super::gcd::{poly_content_int, poly_gcd};
use super::mobius::Mobius;
use super::{AlgebraError, Poly};
use crate::ring::{Coeff, Rat};
use num::traits::{One, Signed, Zero};
use num::BigInt;

/// A point of the projective line over the coefficient domain.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ProjPoint<T> {
    Finite(T),
    Infinity,
}

impl<T> ProjPoint<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            ProjPoint::Finite(t) => Some(t),
            ProjPoint::Infinity => None,
        }
    }
    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }
}

/// A rational map `num/den` with coprime numerator and denominator.
///
/// Over `Rat` the canonical form is unique: num and den are jointly
/// integral with joint content 1, coprime as polynomials, and den has a
/// positive leading coefficient. Two maps are equal as functions iff the
/// canonical coefficient lists agree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMap<T: Coeff> {
    num: Poly<T>,
    den: Poly<T>,
    degree: usize,
}

impl<T: Coeff> RationalMap<T> {
    /// Builds without any gcd reduction (used by domains where exact gcd
    /// is unavailable, e.g. finite-precision local fields). The caller is
    /// responsible for coprimality.
    pub fn from_parts_unchecked(num: Poly<T>, den: Poly<T>) -> Result<Self, AlgebraError> {
        if num.is_zero() && den.is_zero() {
            return Err(AlgebraError::ZeroMap);
        }
        if den.is_zero() {
            return Err(AlgebraError::ConstantMap);
        }
        let degree = num.deg().max(den.deg());
        Ok(RationalMap { num, den, degree })
    }

    pub fn num(&self) -> &Poly<T> {
        &self.num
    }
    pub fn den(&self) -> &Poly<T> {
        &self.den
    }
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest `m >= 1` with both numerator and denominator in `K[x^m]`.
    pub fn power_composite_order(&self) -> usize {
        let gn = self.num.exponent_gcd();
        let gd = self.den.exponent_gcd();
        // exponent_gcd returns 1 for constants; fold constants in as "any m"
        let g = match (self.num.is_constant(), self.den.is_constant()) {
            (true, true) => 1,
            (true, false) => gd,
            (false, true) => gn,
            (false, false) => gcd_usize(gn, gd),
        };
        g.max(1)
    }

    /// Evaluates at a projective point. Coprimality guarantees num and
    /// den never vanish simultaneously (asserted).
    pub fn eval_proj(&self, x: &ProjPoint<T>) -> ProjPoint<T> {
        match x {
            ProjPoint::Infinity => {
                let dn = self.num.deg();
                let dd = self.den.deg();
                if self.num.is_zero() {
                    return ProjPoint::Finite(T::zero());
                }
                match dn.cmp(&dd) {
                    std::cmp::Ordering::Greater => ProjPoint::Infinity,
                    std::cmp::Ordering::Less => ProjPoint::Finite(T::zero()),
                    std::cmp::Ordering::Equal => {
                        let l = self
                            .num
                            .leading()
                            .unwrap()
                            .div(self.den.leading().unwrap())
                            .expect("leading coefficient invertible");
                        ProjPoint::Finite(l)
                    }
                }
            }
            ProjPoint::Finite(v) => {
                let n = self.num.eval(v);
                let d = self.den.eval(v);
                if d.is_zero() {
                    assert!(
                        !n.is_zero(),
                        "indeterminate 0/0 evaluation on a coprime map"
                    );
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(n.div(&d).expect("nonzero denominator"))
                }
            }
        }
    }

    /// Maps coefficients into another domain (no re-reduction; the image
    /// of a coprime pair under a field embedding stays coprime).
    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U + Copy) -> RationalMap<U> {
        RationalMap {
            num: self.num.map_coeffs(f),
            den: self.den.map_coeffs(f),
            degree: self.degree,
        }
    }

    /// Raw composition `self ∘ inner` by homogeneous substitution; no
    /// reduction is performed.
    pub fn compose_raw(&self, inner: &RationalMap<T>) -> (Poly<T>, Poly<T>) {
        let d = self.degree;
        let u = &inner.num;
        let v = &inner.den;
        // powers of u and v up to d
        let mut up = Vec::with_capacity(d + 1);
        let mut vp = Vec::with_capacity(d + 1);
        up.push(Poly::one());
        vp.push(Poly::one());
        for i in 1..=d {
            up.push(up[i - 1].mul(u));
            vp.push(vp[i - 1].mul(v));
        }
        let mut fnum = Poly::zero();
        let mut fden = Poly::zero();
        for i in 0..=d {
            let ci = self.num.coeff(i);
            if !ci.is_zero() {
                fnum = fnum.add(&up[i].mul(&vp[d - i]).scale(&ci));
            }
            let bi = self.den.coeff(i);
            if !bi.is_zero() {
                fden = fden.add(&up[i].mul(&vp[d - i]).scale(&bi));
            }
        }
        (fnum, fden)
    }
}

impl RationalMap<Rat> {
    /// Canonical constructor over the rationals: cancels the exact
    /// polynomial gcd, clears denominators, removes joint integer
    /// content and fixes the denominator's sign.
    pub fn new(num: Poly<Rat>, den: Poly<Rat>) -> Result<Self, AlgebraError> {
        if num.is_zero() && den.is_zero() {
            return Err(AlgebraError::ZeroMap);
        }
        if den.is_zero() {
            // the constant map to infinity
            return Err(AlgebraError::ConstantMap);
        }
        if num.is_zero() {
            // the constant zero map, canonically 0/1
            return Ok(RationalMap {
                num: Poly::zero(),
                den: Poly::one(),
                degree: 0,
            });
        }
        let (mut n, mut d) = (num, den);
        {
            let g = poly_gcd(&n, &d);
            if g.deg() > 0 {
                n = n.div_exact(&g).expect("gcd divides");
                d = d.div_exact(&g).expect("gcd divides");
            }
        }
        let (n, d) = joint_normalize(n, d);
        let degree = n.deg().max(d.deg());
        Ok(RationalMap {
            num: n,
            den: d,
            degree,
        })
    }

    /// Errors with `ConstantMap` unless the degree is at least `min`.
    pub fn require_degree(&self, min: usize) -> Result<(), AlgebraError> {
        if self.degree < min {
            Err(AlgebraError::ConstantMap)
        } else {
            Ok(())
        }
    }

    /// Composition `self ∘ inner`, renormalized.
    pub fn compose(&self, inner: &RationalMap<Rat>) -> Result<Self, AlgebraError> {
        let (n, d) = self.compose_raw(inner);
        let out = RationalMap::new(n, d)?;
        debug_assert_eq!(out.degree, self.degree * inner.degree);
        Ok(out)
    }

    /// `self^n` by repeated composition, with a coefficient-size guard.
    pub fn iterate(&self, n: usize, digit_bound: u64) -> Result<Self, AlgebraError> {
        assert!(n >= 1, "iterate requires n >= 1");
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose(self)?;
            acc.check_size(digit_bound)?;
        }
        Ok(acc)
    }

    /// Conjugation `mu ∘ self ∘ mu^{-1}`; degree is preserved.
    pub fn conjugate(&self, mu: &Mobius<Rat>) -> Result<Self, AlgebraError> {
        let muinv = mu.inverse()?;
        let inner = self.compose(&muinv.to_map()?)?;
        let out = mu.to_map()?.compose(&inner)?;
        debug_assert_eq!(out.degree, self.degree);
        Ok(out)
    }

    /// The finite critical locus `f'g - fg'` (primitive integer form)
    /// together with the multiplicity of infinity as a critical point,
    /// `(2d - 2) - deg c`.
    pub fn critical_polynomial(&self) -> (Poly<Rat>, usize) {
        let c = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        let c = primitive_rat(c);
        let budget = 2 * self.degree - 2;
        let inf_mult = budget - c.deg().min(budget);
        (c, inf_mult)
    }

    /// Largest coefficient size in decimal digits.
    pub fn coeff_digits(&self) -> u64 {
        let mut bits = 0u64;
        for c in self.num.coeffs().iter().chain(self.den.coeffs()) {
            bits = bits.max(c.numer().bits()).max(c.denom().bits());
        }
        // bits * log10(2), rounded up
        (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64
    }

    fn check_size(&self, digit_bound: u64) -> Result<(), AlgebraError> {
        let digits = self.coeff_digits();
        if digits > digit_bound {
            Err(AlgebraError::Overflow {
                digits,
                bound: digit_bound,
            })
        } else {
            Ok(())
        }
    }

    /// Canonical affine polynomial view, if the map is one.
    pub fn as_polynomial(&self) -> Option<Poly<Rat>> {
        if self.den.deg() == 0 {
            let c = self.den.coeff(0);
            Some(self.num.scale(&c.recip()))
        } else {
            None
        }
    }
}

/// Convenience: builds the canonical map from integer coefficient lists.
pub fn map_from_ints(num: &[i64], den: &[i64]) -> Result<RationalMap<Rat>, AlgebraError> {
    let n = Poly::from_coeffs(
        num.iter()
            .map(|&c| Rat::from_integer(BigInt::from(c)))
            .collect(),
    );
    let d = Poly::from_coeffs(
        den.iter()
            .map(|&c| Rat::from_integer(BigInt::from(c)))
            .collect(),
    );
    RationalMap::new(n, d)
}

fn joint_normalize(n: Poly<Rat>, d: Poly<Rat>) -> (Poly<Rat>, Poly<Rat>) {
    // common denominator over both polynomials
    let mut l = BigInt::one();
    for c in n.coeffs().iter().chain(d.coeffs()) {
        let g = num::integer::gcd(l.clone(), c.denom().clone());
        l = &l / &g * c.denom();
    }
    let ni: Vec<BigInt> = n
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect();
    let di: Vec<BigInt> = d
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect();
    // joint content
    let mut g = poly_content_int(&ni);
    g = num::integer::gcd(g, poly_content_int(&di));
    if g.is_zero() {
        g = BigInt::one();
    }
    // sign: positive leading coefficient on the denominator (numerator
    // sign decides if the denominator is zero, which new() rejects)
    let flip = di.last().map_or(false, |x| x.is_negative());
    let adjust = |v: Vec<BigInt>| -> Poly<Rat> {
        Poly::from_coeffs(
            v.into_iter()
                .map(|x| {
                    let y = &x / &g;
                    Rat::from_integer(if flip { -y } else { y })
                })
                .collect(),
        )
    };
    (adjust(ni), adjust(di))
}

fn primitive_rat(p: Poly<Rat>) -> Poly<Rat> {
    if p.is_zero() {
        return p;
    }
    let mut l = BigInt::one();
    for c in p.coeffs() {
        let g = num::integer::gcd(l.clone(), c.denom().clone());
        l = &l / &g * c.denom();
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect();
    let mut g = poly_content_int(&ints);
    if ints.last().unwrap().is_negative() {
        g = -g;
    }
    Poly::from_coeffs(
        ints.into_iter()
            .map(|x| Rat::from_integer(&x / &g))
            .collect(),
    )
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}
