//! Towers of Eisenstein (and one optional inert) extensions over Q_p.
//!
//! Elements are nested polynomial residues: a level-k element is a
//! coefficient vector over level k-1, reduced modulo the level's monic
//! defining polynomial. Norms go through resultants, never through root
//! enumeration. Valuations are exact: for an Eisenstein step the terms
//! c_i π^i have pairwise distinct valuations mod 1, and for the single
//! inert step the residue images 1, u, ..., u^{f-1} are independent.

use super::ctx::{newton_polygon, pdivmod, pmul, ptrim, resultant, LocalField};
use super::qp::Qp;
use super::PadicError;
use crate::ring::Rat;
use num::rational::Ratio;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelKind {
    /// Unramified step (allowed only directly over the base).
    Inert,
    /// Totally ramified step defined by an Eisenstein polynomial.
    Eisenstein,
}

#[derive(Clone, Debug)]
pub struct Level {
    pub kind: LevelKind,
    pub degree: usize,
    /// Monic defining polynomial (length degree + 1, leading exactly 1)
    /// with coefficients one level below.
    pub poly: Vec<Elt>,
}

/// A tower element. `Ext` vectors may be shorter than the level degree;
/// missing coordinates are exact zeros.
#[derive(Clone, Debug)]
pub enum Elt {
    Base(Qp),
    Ext(Vec<Elt>),
}

/// An immutable chain of extensions over Q_p. Pushing a level clones the
/// cheap `Arc` spine, so older towers stay valid.
#[derive(Clone, Debug)]
pub struct Tower {
    pub p: u64,
    pub base_prec: i64,
    levels: Vec<Arc<Level>>,
}

impl Tower {
    pub fn base(p: u64, base_prec: i64) -> Self {
        Tower {
            p,
            base_prec,
            levels: vec![],
        }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k - 1]
    }

    /// Ramification index: product of Eisenstein level degrees.
    pub fn ram_index(&self) -> i64 {
        self.ram_index_up_to(self.levels.len())
    }

    /// Ramification index of the sub-tower up to the given level.
    pub fn ram_index_up_to(&self, level: usize) -> i64 {
        self.levels[..level]
            .iter()
            .filter(|l| l.kind == LevelKind::Eisenstein)
            .map(|l| l.degree as i64)
            .product()
    }

    /// Residue degree: product of inert level degrees.
    pub fn residue_degree(&self) -> i64 {
        self.levels
            .iter()
            .filter(|l| l.kind == LevelKind::Inert)
            .map(|l| l.degree as i64)
            .product()
    }

    pub fn ctx(&self, level: usize) -> TowerCtx<'_> {
        assert!(level <= self.levels.len());
        TowerCtx { tower: self, level }
    }

    pub fn top(&self) -> TowerCtx<'_> {
        self.ctx(self.levels.len())
    }

    /// Lifts an element from one level to a higher one.
    pub fn lift(&self, e: &Elt, from: usize, to: usize) -> Elt {
        assert!(from <= to && to <= self.levels.len());
        let mut out = e.clone();
        for _ in from..to {
            out = Elt::Ext(vec![out]);
        }
        out
    }

    pub fn embed_rat(&self, r: &Rat, level: usize) -> Elt {
        let q = Qp::from_rat(r, self.p, self.base_prec);
        self.lift(&Elt::Base(q), 0, level)
    }

    pub fn embed_qp(&self, q: &Qp, level: usize) -> Elt {
        assert_eq!(q.prime(), self.p);
        self.lift(&Elt::Base(q.clone()), 0, level)
    }

    /// The adjoined root of level k's defining polynomial, as a level-k
    /// element.
    pub fn generator(&self, k: usize) -> Elt {
        assert!(k >= 1 && k <= self.levels.len());
        let level = &self.levels[k - 1];
        if level.degree == 1 {
            let sub = self.ctx(k - 1);
            Elt::Ext(vec![sub.neg(&level.poly[0])])
        } else {
            let sub = self.ctx(k - 1);
            Elt::Ext(vec![sub.zero(), sub.one()])
        }
    }

    /// Extends the tower by a monic Eisenstein polynomial over the top
    /// level (single polygon segment of slope -1/deg).
    pub fn push_eisenstein(&self, g: &[Elt]) -> Result<Tower, PadicError> {
        let ctx = self.top();
        let g = ptrim(&ctx, g.to_vec());
        if g.len() < 2 {
            return Err(PadicError::NotEisenstein(
                "defining polynomial must have degree at least 1".into(),
            ));
        }
        let degree = g.len() - 1;
        let lead = g.last().unwrap();
        if !ctx.is_zero(&ctx.sub(lead, &ctx.one())) {
            return Err(PadicError::NotEisenstein(
                "defining polynomial must be monic".into(),
            ));
        }
        let np = newton_polygon(&ctx, &g)?;
        if !np.is_single_segment(Ratio::new(-1, degree as i64)) {
            return Err(PadicError::NotEisenstein(format!(
                "Newton polygon is not a single segment of slope -1/{}",
                degree
            )));
        }
        if np.vertices.first() != Some(&(0, Ratio::from_integer(1))) {
            return Err(PadicError::NotEisenstein(
                "constant term does not have valuation exactly 1".into(),
            ));
        }
        let mut poly = g;
        *poly.last_mut().unwrap() = exact_one(self, self.levels.len());
        let mut t = self.clone();
        t.levels.push(Arc::new(Level {
            kind: LevelKind::Eisenstein,
            degree,
            poly,
        }));
        Ok(t)
    }

    /// Adds the single allowed unramified level directly over Q_p: a
    /// monic lift of an irreducible polynomial over F_p.
    pub fn push_inert(&self, coeffs: &[i64]) -> Result<Tower, PadicError> {
        if !self.levels.is_empty() {
            return Err(PadicError::NotEisenstein(
                "an inert level is only supported directly over the base".into(),
            ));
        }
        let degree = coeffs.len() - 1;
        if degree < 1 || coeffs[degree] != 1 {
            return Err(PadicError::NotEisenstein(
                "inert level needs a monic polynomial of degree >= 1".into(),
            ));
        }
        let modp: Vec<u64> = coeffs
            .iter()
            .map(|&c| (c.rem_euclid(self.p as i64)) as u64)
            .collect();
        if !is_irreducible_mod_p(&modp, self.p) {
            return Err(PadicError::NotEisenstein(
                "inert polynomial is reducible modulo p".into(),
            ));
        }
        let poly: Vec<Elt> = coeffs
            .iter()
            .map(|&c| Elt::Base(Qp::from_i64(c, self.p, self.base_prec)))
            .collect();
        let mut t = self.clone();
        t.levels.push(Arc::new(Level {
            kind: LevelKind::Inert,
            degree,
            poly,
        }));
        Ok(t)
    }

    /// Norm from level k to level k-1: the resultant of the defining
    /// polynomial with the element's representative.
    pub fn norm_step(&self, e: &Elt, k: usize) -> Result<Elt, PadicError> {
        assert!(k >= 1 && k <= self.levels.len());
        let sub = self.ctx(k - 1);
        let repr = match e {
            Elt::Ext(v) => v.clone(),
            Elt::Base(_) => panic!("element is not at level {}", k),
        };
        resultant(&sub, &self.levels[k - 1].poly, &repr)
    }
}

fn exact_one(tower: &Tower, level: usize) -> Elt {
    let one = Qp::from_i64(1, tower.p, tower.base_prec);
    tower.lift(&Elt::Base(one), 0, level)
}

fn is_irreducible_mod_p(c: &[u64], p: u64) -> bool {
    let deg = c.len() - 1;
    if deg == 1 {
        return true;
    }
    // no roots
    for x in 0..p {
        let mut acc = 0u64;
        for k in c.iter().rev() {
            acc = (acc * x + k) % p;
        }
        if acc == 0 {
            return false;
        }
    }
    if deg <= 3 {
        return true;
    }
    // trial division by monic irreducible quadratics (enough for deg <= 5)
    if deg <= 5 {
        for b in 0..p {
            for a in 0..p {
                let q = [b, a, 1u64];
                if !is_irreducible_mod_p(&q, p) {
                    continue;
                }
                if fp_poly_divides(&q, c, p) {
                    return false;
                }
            }
        }
        return true;
    }
    // larger inert degrees are outside desk scale
    false
}

fn fp_poly_divides(d: &[u64], c: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = c.to_vec();
    let dd = d.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap() % p;
        let k = rem.len() - 1 - dd;
        if lead != 0 {
            for j in 0..=dd {
                let idx = k + j;
                let sub = (lead * d[j]) % p;
                rem[idx] = (rem[idx] + p * p - sub) % p;
            }
        }
        rem.pop();
        while rem.last().map_or(false, |&x| x % p == 0) && rem.len() > dd {
            rem.pop();
        }
    }
    rem.iter().all(|&x| x % p == 0)
}

/// Context for arithmetic at a fixed tower level. Valuations are in the
/// level's own normalization: v(uniformizer of level k) = 1.
#[derive(Clone, Copy)]
pub struct TowerCtx<'a> {
    pub tower: &'a Tower,
    pub level: usize,
}

impl<'a> TowerCtx<'a> {
    fn sub_ctx(&self) -> TowerCtx<'a> {
        TowerCtx {
            tower: self.tower,
            level: self.level - 1,
        }
    }

    fn level_info(&self) -> &Level {
        self.tower.level(self.level)
    }

    /// The uniformizer of this level (p at the base, π_k above; for an
    /// inert level this is still p).
    pub fn uniformizer(&self) -> Elt {
        if self.level == 0 {
            return Elt::Base(Qp::from_i64(
                self.tower.p as i64,
                self.tower.p,
                self.tower.base_prec,
            ));
        }
        match self.level_info().kind {
            LevelKind::Eisenstein => self.tower.generator(self.level),
            LevelKind::Inert => {
                let below = self.sub_ctx().uniformizer();
                self.tower.lift(&below, self.level - 1, self.level)
            }
        }
    }
}

impl<'a> LocalField for TowerCtx<'a> {
    type Elem = Elt;

    fn zero(&self) -> Elt {
        if self.level == 0 {
            Elt::Base(Qp::zero(self.tower.p, self.tower.base_prec))
        } else {
            Elt::Ext(vec![])
        }
    }

    fn one(&self) -> Elt {
        if self.level == 0 {
            Elt::Base(Qp::one(self.tower.p, self.tower.base_prec))
        } else {
            Elt::Ext(vec![self.sub_ctx().one()])
        }
    }

    fn from_i64(&self, n: i64) -> Elt {
        if self.level == 0 {
            Elt::Base(Qp::from_i64(n, self.tower.p, self.tower.base_prec))
        } else {
            Elt::Ext(vec![self.sub_ctx().from_i64(n)])
        }
    }

    fn add(&self, a: &Elt, b: &Elt) -> Elt {
        match (a, b) {
            (Elt::Base(x), Elt::Base(y)) => Elt::Base(x.add(y)),
            (Elt::Ext(x), Elt::Ext(y)) => {
                let sub = self.sub_ctx();
                let n = x.len().max(y.len());
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    out.push(match (x.get(i), y.get(i)) {
                        (Some(u), Some(v)) => sub.add(u, v),
                        (Some(u), None) => u.clone(),
                        (None, Some(v)) => v.clone(),
                        (None, None) => unreachable!(),
                    });
                }
                Elt::Ext(out)
            }
            _ => panic!("level mismatch in tower addition"),
        }
    }

    fn neg(&self, a: &Elt) -> Elt {
        match a {
            Elt::Base(x) => Elt::Base(x.neg()),
            Elt::Ext(v) => {
                let sub = self.sub_ctx();
                Elt::Ext(v.iter().map(|c| sub.neg(c)).collect())
            }
        }
    }

    fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        match (a, b) {
            (Elt::Base(x), Elt::Base(y)) => Elt::Base(x.mul(y)),
            (Elt::Ext(x), Elt::Ext(y)) => {
                let sub = self.sub_ctx();
                let prod = pmul(&sub, x, y);
                let degree = self.level_info().degree;
                if prod.len() > degree {
                    let (_, rem) = pdivmod(&sub, &prod, &self.level_info().poly)
                        .expect("defining polynomial is monic");
                    Elt::Ext(rem)
                } else {
                    Elt::Ext(prod)
                }
            }
            _ => panic!("level mismatch in tower multiplication"),
        }
    }

    fn inv(&self, a: &Elt) -> Result<Elt, PadicError> {
        match a {
            Elt::Base(x) => x.inv().map(Elt::Base),
            Elt::Ext(v) => {
                let sub = self.sub_ctx();
                // extended Euclid against the defining polynomial
                let g = &self.level_info().poly;
                let mut r0 = g.clone();
                let mut r1 = ptrim(&sub, v.clone());
                if r1.is_empty() {
                    return Err(PadicError::DivisionByZeroToPrecision);
                }
                let mut s0: Vec<Elt> = vec![];
                let mut s1: Vec<Elt> = vec![sub.one()];
                while r1.len() > 1 {
                    let (q, r2) = pdivmod(&sub, &r0, &r1)?;
                    let qs1 = pmul(&sub, &q, &s1);
                    let s2 = super::ctx::psub(&sub, &s0, &qs1);
                    r0 = std::mem::replace(&mut r1, r2);
                    s0 = std::mem::replace(&mut s1, s2);
                    if r1.is_empty() {
                        return Err(PadicError::DivisionByZeroToPrecision);
                    }
                }
                let c = sub.inv(&r1[0])?;
                let mut out = super::ctx::pscale(&sub, &s1, &c);
                if out.len() > self.level_info().degree {
                    let (_, rem) = pdivmod(&sub, &out, g)?;
                    out = rem;
                }
                Ok(Elt::Ext(out))
            }
        }
    }

    fn is_zero(&self, a: &Elt) -> bool {
        match a {
            Elt::Base(x) => x.is_zero(),
            Elt::Ext(v) => {
                let sub = self.sub_ctx();
                v.iter().all(|c| sub.is_zero(c))
            }
        }
    }

    fn val(&self, a: &Elt) -> Option<Ratio<i64>> {
        match a {
            Elt::Base(x) => x.valuation().map(Ratio::from_integer),
            Elt::Ext(v) => {
                let sub = self.sub_ctx();
                let info = self.level_info();
                let scale = match info.kind {
                    LevelKind::Eisenstein => info.degree as i64,
                    LevelKind::Inert => 1,
                };
                let shift = |i: usize| -> Ratio<i64> {
                    match info.kind {
                        LevelKind::Eisenstein => Ratio::from_integer(i as i64),
                        LevelKind::Inert => Ratio::from_integer(0),
                    }
                };
                let mut best: Option<Ratio<i64>> = None;
                let mut unknown_bound: Option<Ratio<i64>> = None;
                for (i, c) in v.iter().enumerate() {
                    match sub.val(c) {
                        Some(vc) => {
                            let term = vc * scale + shift(i);
                            if best.as_ref().map_or(true, |b| term < *b) {
                                best = Some(term);
                            }
                        }
                        None => {
                            let bound = sub.abs_prec(c) * scale + shift(i);
                            if unknown_bound.as_ref().map_or(true, |b| bound < *b) {
                                unknown_bound = Some(bound);
                            }
                        }
                    }
                }
                match (best, unknown_bound) {
                    (Some(b), Some(u)) if u <= b => None, // not decidable at precision
                    (Some(b), _) => Some(b),
                    (None, _) => None,
                }
            }
        }
    }

    fn abs_prec(&self, a: &Elt) -> Ratio<i64> {
        match a {
            Elt::Base(x) => Ratio::from_integer(x.precision()),
            Elt::Ext(v) => {
                let sub = self.sub_ctx();
                let info = self.level_info();
                let scale = match info.kind {
                    LevelKind::Eisenstein => info.degree as i64,
                    LevelKind::Inert => 1,
                };
                let mut best: Option<Ratio<i64>> = None;
                for (i, c) in v.iter().enumerate() {
                    let shift = match info.kind {
                        LevelKind::Eisenstein => Ratio::from_integer(i as i64),
                        LevelKind::Inert => Ratio::from_integer(0),
                    };
                    let t = sub.abs_prec(c) * scale + shift;
                    if best.as_ref().map_or(true, |b| t < *b) {
                        best = Some(t);
                    }
                }
                best.unwrap_or_else(|| {
                    Ratio::from_integer(
                        self.tower.base_prec * self.tower.ram_index_up_to(self.level),
                    )
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ctx::peval;

    fn q2_tower() -> Tower {
        Tower::base(2, 40)
    }

    fn qi(t: &Tower, n: i64) -> Elt {
        t.ctx(0).from_i64(n)
    }

    #[test]
    fn push_sqrt2_and_value() {
        let t = q2_tower();
        let g = vec![qi(&t, -2), qi(&t, 0), qi(&t, 1)];
        let t2 = t.push_eisenstein(&g).unwrap();
        assert_eq!(t2.ram_index(), 2);
        let ctx = t2.top();
        let pi = t2.generator(1);
        // v(π) = 1, v(π^2) = v(2) = 2
        assert_eq!(ctx.val(&pi), Some(Ratio::from_integer(1)));
        let pi2 = ctx.mul(&pi, &pi);
        assert_eq!(ctx.val(&pi2), Some(Ratio::from_integer(2)));
        // π^2 = 2
        let two = t2.embed_rat(&crate::ring::rint(2), 1);
        assert!(ctx.is_zero(&ctx.sub(&pi2, &two)));
    }

    #[test]
    fn non_eisenstein_rejected() {
        let t = q2_tower();
        let g = vec![qi(&t, -1), qi(&t, 0), qi(&t, 1)]; // x^2 - 1
        assert!(matches!(
            t.push_eisenstein(&g),
            Err(PadicError::NotEisenstein(_))
        ));
    }

    #[test]
    fn norm_of_uniformizer_is_constant_term() {
        let t = q2_tower();
        // x^2 + 2x + 2: norm of root = constant term (degree even)
        let g = vec![qi(&t, 2), qi(&t, 2), qi(&t, 1)];
        let t2 = t.push_eisenstein(&g).unwrap();
        let pi = t2.generator(1);
        let n = t2.norm_step(&pi, 1).unwrap();
        // N(π) = (-1)^2 * g(0) = 2
        let ctx0 = t2.ctx(0);
        assert!(ctx0.is_zero(&ctx0.sub(&n, &qi(&t2, 2))));
    }

    #[test]
    fn norm_multiplicativity() {
        let t = q2_tower();
        let g = vec![qi(&t, 2), qi(&t, 2), qi(&t, 1)];
        let t2 = t.push_eisenstein(&g).unwrap();
        let ctx = t2.top();
        let pi = t2.generator(1);
        let x = ctx.add(&pi, &t2.embed_rat(&crate::ring::rint(3), 1));
        let y = ctx.add(&ctx.mul(&pi, &pi), &t2.embed_rat(&crate::ring::rint(1), 1));
        let nxy = t2.norm_step(&ctx.mul(&x, &y), 1).unwrap();
        let nx_ny = t2
            .ctx(0)
            .mul(&t2.norm_step(&x, 1).unwrap(), &t2.norm_step(&y, 1).unwrap());
        let ctx0 = t2.ctx(0);
        assert!(ctx0.is_zero(&ctx0.sub(&nxy, &nx_ny)));
    }

    #[test]
    fn unit_norm_has_valuation_zero() {
        let t = q2_tower();
        let g = vec![qi(&t, -2), qi(&t, 0), qi(&t, 1)];
        let t2 = t.push_eisenstein(&g).unwrap();
        let ctx = t2.top();
        let pi = t2.generator(1);
        let u = ctx.add(&ctx.one(), &pi); // 1 + π, a unit
        let n = t2.norm_step(&u, 1).unwrap();
        assert_eq!(t2.ctx(0).val(&n), Some(Ratio::from_integer(0)));
    }

    #[test]
    fn inversion_round_trip_in_tower() {
        let t = q2_tower();
        let g = vec![qi(&t, 2), qi(&t, 2), qi(&t, 1)];
        let t2 = t.push_eisenstein(&g).unwrap();
        let ctx = t2.top();
        let pi = t2.generator(1);
        let x = ctx.add(&pi, &ctx.from_i64(1)); // unit
        let xi = ctx.inv(&x).unwrap();
        let prod = ctx.mul(&x, &xi);
        assert!(ctx.is_zero(&ctx.sub(&prod, &ctx.one())));
        // uniformizer inverse has valuation -1
        let pinv = ctx.inv(&pi).unwrap();
        assert_eq!(ctx.val(&pinv), Some(Ratio::from_integer(-1)));
    }

    #[test]
    fn two_level_tower_valuations() {
        // Q_2(√2, fourth root of 2)
        let t = q2_tower();
        let g1 = vec![qi(&t, -2), qi(&t, 0), qi(&t, 1)];
        let t1 = t.push_eisenstein(&g1).unwrap();
        let pi1 = t1.generator(1);
        let c1 = t1.top();
        // x^2 - π over the first level
        let g2 = vec![c1.neg(&pi1), c1.zero(), c1.one()];
        let t2 = t1.push_eisenstein(&g2).unwrap();
        assert_eq!(t2.ram_index(), 4);
        let c2 = t2.top();
        let pi2 = t2.generator(2);
        assert_eq!(c2.val(&pi2), Some(Ratio::from_integer(1)));
        // π2^4 = π1^2 = 2: valuation 4 in v_{E_2} units
        let pi2_4 = peval(
            &c2,
            &[c2.zero(), c2.zero(), c2.zero(), c2.zero(), c2.one()],
            &pi2,
        );
        assert_eq!(c2.val(&pi2_4), Some(Ratio::from_integer(4)));
    }

    #[test]
    fn inert_level_over_base() {
        // F_4 = F_2[u]/(u^2 + u + 1)
        let t = q2_tower();
        let t1 = t.push_inert(&[1, 1, 1]).unwrap();
        assert_eq!(t1.ram_index(), 1);
        assert_eq!(t1.residue_degree(), 2);
        let ctx = t1.top();
        let u = t1.generator(1);
        // u is a unit: valuation 0
        assert_eq!(ctx.val(&u), Some(Ratio::from_integer(0)));
        // u^2 + u + 1 = 0
        let val = peval(&ctx, &[ctx.one(), ctx.one(), ctx.one()], &u);
        assert!(ctx.is_zero(&val));
        // p is still the uniformizer
        assert_eq!(ctx.val(&ctx.from_i64(2)), Some(Ratio::from_integer(1)));
    }

    #[test]
    fn inert_rejects_reducible() {
        let t = q2_tower();
        assert!(t.push_inert(&[1, 0, 1]).is_err()); // x^2 + 1 = (x+1)^2 mod 2
    }
}
