//! Context-style local-field interface and the polynomial machinery
//! built on it: Newton polygons, Hensel lifting, resultants.
//!
//! Elements of a tower level need their tower (prime, precision, level
//! polynomials) to compute, so the interface is a context object rather
//! than a by-value trait. Q_p and every tower level implement it.

use super::PadicError;
use num::rational::Ratio;
use std::fmt::Debug;

/// A local field at finite precision: ring operations, fallible
/// inversion, exact valuations of nonzero-to-precision elements.
///
/// `val` is normalized to the context's own uniformizer: v(π) = 1, so
/// element valuations are integers and polygon slopes are rationals.
pub trait LocalField {
    type Elem: Clone + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, PadicError>;
    /// Zero to working precision.
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Exact valuation (v(π) = 1), or None for zero-to-precision.
    fn val(&self, a: &Self::Elem) -> Option<Ratio<i64>>;
    /// Absolute precision of the element in the same normalization.
    fn abs_prec(&self, a: &Self::Elem) -> Ratio<i64>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, PadicError> {
        Ok(self.mul(a, &self.inv(b)?))
    }
}

/// Trims trailing zero-to-precision coefficients.
pub fn ptrim<F: LocalField>(ctx: &F, mut c: Vec<F::Elem>) -> Vec<F::Elem> {
    while c.last().map_or(false, |x| ctx.is_zero(x)) {
        c.pop();
    }
    c
}

pub fn padd<F: LocalField>(ctx: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => ctx.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        };
        out.push(x);
    }
    ptrim(ctx, out)
}

pub fn pneg<F: LocalField>(ctx: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().map(|x| ctx.neg(x)).collect()
}

pub fn psub<F: LocalField>(ctx: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    padd(ctx, a, &pneg(ctx, b))
}

pub fn pmul<F: LocalField>(ctx: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if ctx.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ctx.add(&out[i + j], &ctx.mul(x, y));
        }
    }
    ptrim(ctx, out)
}

pub fn pscale<F: LocalField>(ctx: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    ptrim(ctx, a.iter().map(|x| ctx.mul(x, c)).collect())
}

pub fn peval<F: LocalField>(ctx: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    let mut acc = ctx.zero();
    for c in a.iter().rev() {
        acc = ctx.add(&ctx.mul(&acc, x), c);
    }
    acc
}

pub fn pderiv<F: LocalField>(ctx: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    if a.len() <= 1 {
        return vec![];
    }
    let mut out = Vec::with_capacity(a.len() - 1);
    for (i, c) in a.iter().enumerate().skip(1) {
        out.push(ctx.mul(c, &ctx.from_i64(i as i64)));
    }
    ptrim(ctx, out)
}

/// Division with remainder; requires an invertible leading coefficient.
pub fn pdivmod<F: LocalField>(
    ctx: &F,
    a: &[F::Elem],
    b: &[F::Elem],
) -> Result<(Vec<F::Elem>, Vec<F::Elem>), PadicError> {
    let b = ptrim(ctx, b.to_vec());
    if b.is_empty() {
        return Err(PadicError::DivisionByZeroToPrecision);
    }
    let linv = ctx.inv(b.last().unwrap())?;
    let db = b.len() - 1;
    let mut rem = ptrim(ctx, a.to_vec());
    if rem.len() < b.len() {
        return Ok((vec![], rem));
    }
    let mut quot = vec![ctx.zero(); rem.len() - db];
    while rem.len() >= b.len() {
        let k = rem.len() - b.len();
        let factor = ctx.mul(rem.last().unwrap(), &linv);
        if !ctx.is_zero(&factor) {
            for j in 0..db {
                let t = ctx.mul(&factor, &b[j]);
                rem[k + j] = ctx.sub(&rem[k + j], &t);
            }
        }
        quot[k] = factor;
        rem.pop();
        while rem.last().map_or(false, |x| ctx.is_zero(x)) {
            rem.pop();
        }
    }
    Ok((ptrim(ctx, quot), rem))
}

/// Sylvester resultant by the Euclidean remainder sequence over the
/// fraction field; for monic `a` this is the product of `b` over the
/// roots of `a` (the norm form used by tower norms).
pub fn resultant<F: LocalField>(
    ctx: &F,
    a: &[F::Elem],
    b: &[F::Elem],
) -> Result<F::Elem, PadicError> {
    let mut a = ptrim(ctx, a.to_vec());
    let mut b = ptrim(ctx, b.to_vec());
    let mut acc = ctx.one();
    loop {
        if a.is_empty() || b.is_empty() {
            return Ok(ctx.zero());
        }
        let da = a.len() - 1;
        let db = b.len() - 1;
        if db == 0 {
            // Res(a, const) = const^{deg a}
            let mut c = ctx.one();
            for _ in 0..da {
                c = ctx.mul(&c, &b[0]);
            }
            return Ok(ctx.mul(&acc, &c));
        }
        if da == 0 {
            let mut c = ctx.one();
            for _ in 0..db {
                c = ctx.mul(&c, &a[0]);
            }
            return Ok(ctx.mul(&acc, &c));
        }
        if da < db {
            // Res(a, b) = (-1)^{da db} Res(b, a)
            if (da * db) % 2 == 1 {
                acc = ctx.neg(&acc);
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let (_, r) = pdivmod(ctx, &a, &b)?;
        let lb = b.last().unwrap().clone();
        let dr = if r.is_empty() { 0 } else { r.len() - 1 };
        if r.is_empty() {
            return Ok(ctx.zero());
        }
        // Res(a, b) = lc(b)^{da - dr} (-1)^{da db} Res(b, r)
        let mut factor = ctx.one();
        for _ in 0..(da - dr) {
            factor = ctx.mul(&factor, &lb);
        }
        acc = ctx.mul(&acc, &factor);
        if (da * db) % 2 == 1 {
            acc = ctx.neg(&acc);
        }
        a = b;
        b = r;
    }
}

/// One segment of a lower Newton polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonSegment {
    pub slope: Ratio<i64>,
    pub length: usize,
}

/// Lower convex hull of the (exponent, valuation) cloud of a polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    /// Hull vertices, left to right, starting at the lowest nonzero
    /// exponent and ending at the degree.
    pub vertices: Vec<(usize, Ratio<i64>)>,
    pub segments: Vec<PolygonSegment>,
}

impl NewtonPolygon {
    /// Single segment of the given slope.
    pub fn is_single_segment(&self, slope: Ratio<i64>) -> bool {
        self.segments.len() == 1 && self.segments[0].slope == slope
    }
}

/// Computes the Newton polygon. A zero-to-precision coefficient whose
/// precision bound dips below the hull makes the hull ambiguous: that is
/// a precision failure, not a guess.
pub fn newton_polygon<F: LocalField>(
    ctx: &F,
    coeffs: &[F::Elem],
) -> Result<NewtonPolygon, PadicError> {
    let c = ptrim(ctx, coeffs.to_vec());
    if c.is_empty() {
        return Err(PadicError::AmbiguousPolygon("zero polynomial".into()));
    }
    let mut pts: Vec<(usize, Ratio<i64>)> = Vec::new();
    let mut unknown: Vec<(usize, Ratio<i64>)> = Vec::new();
    for (i, x) in c.iter().enumerate() {
        match ctx.val(x) {
            Some(v) => pts.push((i, v)),
            None => unknown.push((i, ctx.abs_prec(x))),
        }
    }
    if pts.is_empty() {
        return Err(PadicError::AmbiguousPolygon(
            "all coefficients are zero to precision".into(),
        ));
    }
    // monotone lower hull; a middle vertex survives only if it lies
    // strictly below the chord of its neighbours (collinear points merge
    // into one segment)
    let mut hull: Vec<(usize, Ratio<i64>)> = Vec::new();
    for &(x, ref y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2].clone();
            let (x2, y2) = hull[hull.len() - 1].clone();
            let lhs = (&y2 - &y1) * Ratio::from_integer((x as i64) - (x1 as i64));
            let rhs = (y.clone() - &y1) * Ratio::from_integer((x2 as i64) - (x1 as i64));
            if lhs < rhs {
                break;
            }
            hull.pop();
        }
        hull.push((x, y.clone()));
    }
    // a zero-to-precision coefficient strictly below the hull could
    // change it
    for (x, bound) in unknown {
        if below_hull(&hull, x, &bound) {
            return Err(PadicError::PrecisionExhausted(format!(
                "coefficient of x^{} is zero to precision {} but the hull needs it",
                x, bound
            )));
        }
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let (x1, ref y1) = w[0];
            let (x2, ref y2) = w[1];
            PolygonSegment {
                slope: (y2.clone() - y1) / Ratio::from_integer((x2 as i64) - (x1 as i64)),
                length: x2 - x1,
            }
        })
        .collect();
    Ok(NewtonPolygon {
        vertices: hull,
        segments,
    })
}

fn below_hull(hull: &[(usize, Ratio<i64>)], x: usize, y: &Ratio<i64>) -> bool {
    if hull.len() == 1 {
        return x < hull[0].0 || (x == hull[0].0 && *y < hull[0].1);
    }
    if x < hull[0].0 || x > hull[hull.len() - 1].0 {
        // outside the hull span: to the left it could prepend a vertex
        // below; to the right the polynomial degree already ended
        return x < hull[0].0;
    }
    for w in hull.windows(2) {
        let (x1, ref y1) = w[0];
        let (x2, ref y2) = w[1];
        if x1 <= x && x <= x2 {
            // y < line value at x?
            let lhs = (y.clone() - y1) * Ratio::from_integer((x2 as i64) - (x1 as i64));
            let rhs = (y2.clone() - y1) * Ratio::from_integer((x as i64) - (x1 as i64));
            return lhs < rhs;
        }
    }
    false
}

/// Hensel/Newton lifting of a simple root from a seed with
/// v(f(seed)) > 2 v(f'(seed)).
pub fn hensel_root<F: LocalField>(
    ctx: &F,
    f: &[F::Elem],
    seed: &F::Elem,
) -> Result<F::Elem, PadicError> {
    let df = pderiv(ctx, f);
    let f0 = peval(ctx, f, seed);
    let d0 = peval(ctx, &df, seed);
    let vd = ctx.val(&d0).ok_or_else(|| {
        PadicError::HenselConditionFailed("derivative vanishes to precision at the seed".into())
    })?;
    match ctx.val(&f0) {
        None => return Ok(seed.clone()), // already a root to precision
        Some(vf) => {
            if vf <= vd.clone() + vd.clone() {
                return Err(PadicError::HenselConditionFailed(format!(
                    "v(f(seed)) = {} not greater than 2 v(f'(seed)) = {}",
                    vf,
                    vd * 2
                )));
            }
        }
    }
    let mut x = seed.clone();
    for _ in 0..64 {
        let fx = peval(ctx, f, &x);
        if ctx.is_zero(&fx) {
            return Ok(x);
        }
        let dx = peval(ctx, &df, &x);
        let step = ctx.div(&fx, &dx)?;
        x = ctx.sub(&x, &step);
    }
    let fx = peval(ctx, f, &x);
    if ctx.is_zero(&fx) {
        Ok(x)
    } else {
        Err(PadicError::HenselConditionFailed(
            "Newton iteration stalled before reaching working precision".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::qp::{Qp, QpCtx};
    use crate::padic::PadicError;

    fn q(n: i64, ctx: &QpCtx) -> Qp {
        ctx.from_i64(n)
    }

    #[test]
    fn polygon_x2_minus_2() {
        let ctx = QpCtx { p: 2, prec: 40 };
        let f = vec![q(-2, &ctx), q(0, &ctx), q(1, &ctx)];
        let np = newton_polygon(&ctx, &f).unwrap();
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.segments[0].slope, Ratio::new(-1, 2));
        assert_eq!(np.segments[0].length, 2);
        assert!(np.is_single_segment(Ratio::new(-1, 2)));
    }

    #[test]
    fn polygon_two_segments() {
        let ctx = QpCtx { p: 2, prec: 40 };
        // x^2 + x + 2: hull (0,1) -> (1,0) -> (2,0)
        let f = vec![q(2, &ctx), q(1, &ctx), q(1, &ctx)];
        let np = newton_polygon(&ctx, &f).unwrap();
        assert_eq!(np.segments.len(), 2);
        assert_eq!(np.segments[0].slope, Ratio::new(-1, 1));
        assert_eq!(np.segments[1].slope, Ratio::new(0, 1));
    }

    #[test]
    fn polygon_eisenstein_cubic() {
        let ctx = QpCtx { p: 2, prec: 40 };
        // x^3 + 2x + 2
        let f = vec![q(2, &ctx), q(2, &ctx), q(0, &ctx), q(1, &ctx)];
        let np = newton_polygon(&ctx, &f).unwrap();
        assert!(np.is_single_segment(Ratio::new(-1, 3)));
    }

    #[test]
    fn polygon_ambiguous_at_low_precision() {
        let ctx = QpCtx { p: 2, prec: 40 };
        // middle coefficient known only mod 2^0: it could dip below the
        // chord (0,2)-(2,0), so the hull is undecided
        let f = vec![q(4, &ctx), Qp::zero(2, 0), q(1, &ctx)];
        assert!(matches!(
            newton_polygon(&ctx, &f),
            Err(PadicError::PrecisionExhausted(_))
        ));
        // the same coefficient pinned above the chord decides the hull
        let f2 = vec![q(4, &ctx), Qp::zero(2, 30), q(1, &ctx)];
        let np = newton_polygon(&ctx, &f2).unwrap();
        assert!(np.is_single_segment(Ratio::new(-1, 1)));
        // an unknown constant term is always ambiguous: it could append
        // a steep left segment
        let f3 = vec![Qp::zero(2, 30), q(4, &ctx), q(1, &ctx)];
        assert!(matches!(
            newton_polygon(&ctx, &f3),
            Err(PadicError::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn hensel_lifts_sqrt17() {
        let ctx = QpCtx { p: 2, prec: 40 };
        let f = vec![q(-17, &ctx), q(0, &ctx), q(1, &ctx)];
        let root = hensel_root(&ctx, &f, &q(1, &ctx)).unwrap();
        let check = peval(&ctx, &f, &root);
        assert!(check.is_zero());
    }

    #[test]
    fn hensel_root_congruent_6_mod_8() {
        // x^2 - x + 2 over Q_2, seed 2
        let ctx = QpCtx { p: 2, prec: 40 };
        let f = vec![q(2, &ctx), q(-1, &ctx), q(1, &ctx)];
        let root = hensel_root(&ctx, &f, &q(2, &ctx)).unwrap();
        let diff = root.sub(&q(6, &ctx));
        // root ≡ 6 mod 8
        assert!(diff.valuation().map_or(true, |v| v >= 3));
    }

    #[test]
    fn hensel_rejects_bad_seed() {
        let ctx = QpCtx { p: 2, prec: 40 };
        // x^2 - 3 has no root in Q_2; seed 1: f(1) = -2, f'(1) = 2:
        // v(f) = 1 not > 2 = 2v(f')
        let f = vec![q(-3, &ctx), q(0, &ctx), q(1, &ctx)];
        assert!(matches!(
            hensel_root(&ctx, &f, &q(1, &ctx)),
            Err(PadicError::HenselConditionFailed(_))
        ));
    }

    #[test]
    fn linear_root() {
        let ctx = QpCtx { p: 3, prec: 30 };
        let f = vec![q(-7, &ctx), q(1, &ctx)];
        let root = hensel_root(&ctx, &f, &q(7, &ctx)).unwrap();
        assert!(root.agrees_with(&q(7, &ctx)));
    }

    #[test]
    fn resultant_of_monic_and_linear() {
        // Res(x^2 - 2, x) = product of x over roots = -2... with the
        // convention Res(f, g) = lc(f)^{deg g} prod g(root_i) = -2
        let ctx = QpCtx { p: 2, prec: 40 };
        let f = vec![q(-2, &ctx), q(0, &ctx), q(1, &ctx)];
        let g = vec![q(0, &ctx), q(1, &ctx)];
        let r = resultant(&ctx, &f, &g).unwrap();
        assert!(r.agrees_with(&q(-2, &ctx)));
    }

    #[test]
    fn resultant_multiplicative_in_second_argument() {
        let ctx = QpCtx { p: 5, prec: 30 };
        let f = vec![q(3, &ctx), q(1, &ctx), q(1, &ctx)];
        let g = vec![q(1, &ctx), q(2, &ctx)];
        let h = vec![q(-4, &ctx), q(0, &ctx), q(1, &ctx)];
        let gh = pmul(&ctx, &g, &h);
        let lhs = resultant(&ctx, &f, &gh).unwrap();
        let rhs = ctx.mul(
            &resultant(&ctx, &f, &g).unwrap(),
            &resultant(&ctx, &f, &h).unwrap(),
        );
        assert!(lhs.agrees_with(&rhs));
    }
}
