//! Division polynomials and flexible Lattès maps.
//!
//! Arithmetic happens in the coordinate ring Q[x, y]/(y^2 - x^3 - ax - b),
//! with elements stored as u(x) + y·v(x). Division polynomials ψ_n then
//! come out as pure-u (odd n) or pure-y (even n) elements, and the
//! multiplication-by-d map on x-coordinates is
//! x([d]P) = (x ψ_d^2 - ψ_{d+1} ψ_{d-1}) / ψ_d^2.

use super::DynamicsError;
use crate::algebra::{Poly, RationalMap};
use crate::ring::{rint, Rat};
use num::traits::Zero;

/// u(x) + y·v(x) on the curve y^2 = x^3 + ax + b.
#[derive(Clone, Debug, PartialEq)]
struct CurvePoly {
    u: Poly<Rat>,
    v: Poly<Rat>,
}

impl CurvePoly {
    fn from_u(u: Poly<Rat>) -> Self {
        CurvePoly { u, v: Poly::zero() }
    }
    fn from_v(v: Poly<Rat>) -> Self {
        CurvePoly { u: Poly::zero(), v }
    }
    fn mul(&self, rhs: &Self, curve: &Poly<Rat>) -> Self {
        CurvePoly {
            u: self.u.mul(&rhs.u).add(&curve.mul(&self.v.mul(&rhs.v))),
            v: self.u.mul(&rhs.v).add(&self.v.mul(&rhs.u)),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        CurvePoly {
            u: self.u.sub(&rhs.u),
            v: self.v.sub(&rhs.v),
        }
    }
    fn pow(&self, e: usize, curve: &Poly<Rat>) -> Self {
        let mut acc = CurvePoly::from_u(Poly::one());
        for _ in 0..e {
            acc = acc.mul(self, curve);
        }
        acc
    }
}

/// The table ψ_0..ψ_n of division polynomials for y^2 = x^3 + ax + b.
#[derive(Clone, Debug)]
pub struct DivisionPolynomials {
    pub a: Rat,
    pub b: Rat,
    curve: Poly<Rat>,
    psi: Vec<CurvePoly>,
}

impl DivisionPolynomials {
    /// Builds the table up to index `n_max`. Fails on singular curves.
    pub fn new(a: Rat, b: Rat, n_max: usize) -> Result<Self, DynamicsError> {
        let disc = rint(4) * &a * &a * &a + rint(27) * &b * &b;
        if disc.is_zero() {
            return Err(DynamicsError::SingularCurve);
        }
        let curve = Poly::from_coeffs(vec![b.clone(), a.clone(), rint(0), rint(1)]);
        let mut psi: Vec<CurvePoly> = Vec::with_capacity(n_max + 1);
        psi.push(CurvePoly::from_u(Poly::zero())); // ψ_0 = 0
        psi.push(CurvePoly::from_u(Poly::one())); // ψ_1 = 1
        if n_max >= 2 {
            psi.push(CurvePoly::from_v(Poly::constant(rint(2)))); // ψ_2 = 2y
        }
        if n_max >= 3 {
            // ψ_3 = 3x^4 + 6a x^2 + 12b x - a^2
            psi.push(CurvePoly::from_u(Poly::from_coeffs(vec![
                -(&a * &a),
                rint(12) * &b,
                rint(6) * &a,
                rint(0),
                rint(3),
            ])));
        }
        if n_max >= 4 {
            // ψ_4 = 4y (x^6 + 5a x^4 + 20b x^3 - 5a^2 x^2 - 4ab x - 8b^2 - a^3)
            psi.push(CurvePoly::from_v(
                Poly::from_coeffs(vec![
                    -(rint(8) * &b * &b) - &a * &a * &a,
                    -(rint(4) * &a * &b),
                    -(rint(5) * &a * &a),
                    rint(20) * &b,
                    rint(5) * &a,
                    rint(0),
                    rint(1),
                ])
                .scale(&rint(4)),
            ));
        }
        let mut table = DivisionPolynomials { a, b, curve, psi };
        for n in 5..=n_max {
            let next = table.compute(n);
            table.psi.push(next);
        }
        Ok(table)
    }

    fn compute(&self, n: usize) -> CurvePoly {
        let c = &self.curve;
        let p = &self.psi;
        if n % 2 == 1 {
            // ψ_{2m+1} = ψ_{m+2} ψ_m^3 − ψ_{m−1} ψ_{m+1}^3
            let m = (n - 1) / 2;
            let t1 = p[m + 2].mul(&p[m].pow(3, c), c);
            let t2 = p[m - 1].mul(&p[m + 1].pow(3, c), c);
            let out = t1.sub(&t2);
            debug_assert!(out.v.is_zero(), "odd-index ψ must be pure in x");
            out
        } else {
            // ψ_{2m} · 2y = ψ_m (ψ_{m+2} ψ_{m−1}^2 − ψ_{m−2} ψ_{m+1}^2)
            let m = n / 2;
            let inner = p[m + 2]
                .mul(&p[m - 1].pow(2, c), c)
                .sub(&p[m - 2].mul(&p[m + 1].pow(2, c), c));
            let num = p[m].mul(&inner, c);
            debug_assert!(num.v.is_zero(), "even-index numerator must be pure");
            let two_c = c.scale(&rint(2));
            let g = num
                .u
                .div_exact(&two_c)
                .expect("even-index ψ numerator divisible by 2(x^3+ax+b)");
            CurvePoly::from_v(g)
        }
    }

    /// ψ_n as `(polynomial in x, carries a factor y)`.
    pub fn psi(&self, n: usize) -> (Poly<Rat>, bool) {
        let e = &self.psi[n];
        if n % 2 == 1 || n == 0 {
            (e.u.clone(), false)
        } else {
            (e.v.clone(), true)
        }
    }

    /// ψ_n^2 with y^2 eliminated; vanishes exactly on x(E[n] \ {O, 2-torsion part handled}).
    pub fn psi_squared(&self, n: usize) -> Poly<Rat> {
        let sq = self.psi[n].mul(&self.psi[n], &self.curve);
        debug_assert!(sq.v.is_zero());
        sq.u
    }

    /// Polynomial in x whose roots are exactly the x-coordinates of the
    /// nonzero n-torsion points.
    pub fn torsion_x_polynomial(&self, n: usize) -> Poly<Rat> {
        let (g, has_y) = self.psi(n);
        if has_y {
            self.curve.mul(&g)
        } else {
            g
        }
    }

    pub fn curve_cubic(&self) -> &Poly<Rat> {
        &self.curve
    }
}

/// The flexible Lattès map of degree d^2: the action of
/// multiplication-by-d on x-coordinates of y^2 = x^3 + ax + b.
pub fn lattes_multiplication_map(
    a: &Rat,
    b: &Rat,
    d: usize,
) -> Result<RationalMap<Rat>, DynamicsError> {
    assert!(d >= 1);
    let table = DivisionPolynomials::new(a.clone(), b.clone(), d + 1)?;
    if d == 1 {
        return Ok(RationalMap::new(Poly::x(), Poly::one())?);
    }
    let den = table.psi_squared(d);
    let prod = table.psi[d + 1].mul(&table.psi[d - 1], &table.curve);
    debug_assert!(prod.v.is_zero());
    let num = Poly::x().mul(&den).sub(&prod.u);
    let map = RationalMap::new(num, den)?;
    debug_assert_eq!(map.degree(), d * d);
    Ok(map)
}
