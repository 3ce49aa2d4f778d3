//! Exact polynomial gcd over Q via the subresultant PRS, plus Yun's
//! square-free decomposition.
//!
//! Rational polynomials are cleared to primitive integer polynomials
//! first; the subresultant remainder sequence keeps intermediate
//! coefficients from exploding the way naive Euclid does.

use super::Poly;
use crate::ring::Rat;
use num::traits::{One, Signed, Zero};
use num::BigInt;

fn int_coeffs(p: &Poly<Rat>) -> Vec<BigInt> {
    // scale by the lcm of denominators
    let mut l = BigInt::one();
    for c in p.coeffs() {
        let d = c.denom();
        let g = num::integer::gcd(l.clone(), d.clone());
        l = &l / &g * d;
    }
    p.coeffs()
        .iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect()
}

/// Content (gcd of coefficients) of an integer polynomial.
pub fn poly_content_int(c: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for a in c {
        g = num::integer::gcd(g, a.clone());
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive(mut c: Vec<BigInt>) -> Vec<BigInt> {
    while c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
    if c.is_empty() {
        return c;
    }
    let g = poly_content_int(&c);
    if !g.is_one() {
        for a in &mut c {
            *a = &*a / &g;
        }
    }
    if c.last().unwrap().is_negative() {
        for a in &mut c {
            *a = -&*a;
        }
    }
    c
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, all over Z.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    let mut r: Vec<BigInt> = a.to_vec();
    let mut e = a.len() as i64 - b.len() as i64 + 1;
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let lead = r.last().unwrap().clone();
        for x in r.iter_mut() {
            *x = &*x * &lb;
        }
        for j in 0..db {
            r[k + j] = &r[k + j] - &(&lead * &b[j]);
        }
        r.pop();
        while r.last().map_or(false, |x| x.is_zero()) {
            r.pop();
        }
        e -= 1;
        if r.is_empty() {
            break;
        }
    }
    // top up so the total factor is exactly lc(b)^(da-db+1)
    while e > 0 {
        for x in r.iter_mut() {
            *x = &*x * &lb;
        }
        e -= 1;
    }
    r
}

fn int_gcd(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let mut a = primitive(a);
    let mut b = primitive(b);
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = a.len() - b.len();
        let r = prem(&a, &b);
        if r.is_empty() {
            return primitive(b);
        }
        if r.len() == 1 {
            return vec![BigInt::one()];
        }
        a = b;
        // subresultant scaling: divide r by g * h^delta (exact)
        let mut scale = &g * pow_big(&h, delta as u32);
        if scale.is_zero() {
            scale = BigInt::one();
        }
        b = r.into_iter().map(|x| &x / &scale).collect();
        g = a.last().unwrap().clone();
        let gd = pow_big(&g, delta as u32);
        h = if delta == 0 {
            h
        } else {
            &gd / &pow_big(&h, (delta - 1) as u32)
        };
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
    }
}

fn pow_big(b: &BigInt, e: u32) -> BigInt {
    b.pow(e)
}

/// Monic gcd of two rational polynomials (subresultant PRS under the
/// hood). gcd(0, 0) = 0.
pub fn poly_gcd(a: &Poly<Rat>, b: &Poly<Rat>) -> Poly<Rat> {
    if a.is_zero() {
        return b.monic().unwrap_or_else(Poly::zero);
    }
    if b.is_zero() {
        return a.monic().unwrap_or_else(Poly::zero);
    }
    let g = int_gcd(int_coeffs(a), int_coeffs(b));
    let gp: Poly<Rat> = Poly::from_coeffs(g.into_iter().map(Rat::from_integer).collect());
    gp.monic().unwrap_or_else(Poly::zero)
}

/// Square-free part: p / gcd(p, p').
pub fn squarefree_part(p: &Poly<Rat>) -> Poly<Rat> {
    if p.deg() == 0 {
        return p.clone();
    }
    let g = poly_gcd(p, &p.derivative());
    p.div_exact(&g).expect("gcd divides")
}

/// Yun's algorithm: returns `(f_i, i)` pairs with `p = lc * prod f_i^i`
/// and each `f_i` square-free, monic, of positive degree.
pub fn yun_squarefree(p: &Poly<Rat>) -> Vec<(Poly<Rat>, usize)> {
    let p = match p.monic() {
        Some(m) => m,
        None => return vec![],
    };
    if p.deg() == 0 {
        return vec![];
    }
    let dp = p.derivative();
    let a = poly_gcd(&p, &dp);
    let mut b = p.div_exact(&a).expect("gcd divides");
    let mut c = dp.div_exact(&a).expect("gcd divides");
    let mut out = Vec::new();
    let mut i = 1usize;
    loop {
        let d = c.sub(&b.derivative());
        if d.is_zero() {
            if b.deg() > 0 {
                out.push((b.monic().unwrap(), i));
            }
            break;
        }
        let f = poly_gcd(&b, &d);
        if f.deg() > 0 {
            out.push((f.clone(), i));
        }
        b = b.div_exact(&f).expect("gcd divides");
        c = d.div_exact(&f).expect("gcd divides");
        i += 1;
        if b.deg() == 0 {
            break;
        }
    }
    out
}
