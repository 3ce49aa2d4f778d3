//! The norm-compatible tower pipeline.
//!
//! Given a good-reduction map whose m-th iterate reduces to c·x^{p^r},
//! the pipeline locates the fixed points γ (positive valuation) and δ
//! (negative valuation or ∞), conjugates by μ(x) = u(x-γ)/(1-δ^{-1}x)
//! with the unit u chosen so the model has s_{p^r} = t_0 = 1, and builds
//! the tower E_n = E_{n-1}(π_n), where π_n is a root of
//!
//!   h_n(x) = f_1((-1)^{p+1} x) + (-1)^p π_{n-1} g_1((-1)^{p+1} x).
//!
//! Each h_n is monic Eisenstein of degree p^r with constant term
//! (-1)^p π_{n-1}, so N(π_n) = π_{n-1} on the nose; the per-level
//! certificate records the polygon, coefficient valuations and norm
//! checks required by the APF criterion.

mod residue;

pub use residue::{FpMap, FpPoly};

use crate::algebra::{AlgebraError, Poly, RationalMap, DEFAULT_DIGIT_BOUND};
use crate::padic::{
    hensel_root, newton_polygon, peval, pmul, pscale, psub, ptrim, Elt, LocalField, PadicError, Qp,
    QpCtx, Tower,
};
use crate::ring::{rat_to_string, Rat};
use num::rational::Ratio;
use num::traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApfError {
    #[error("map does not have good reduction: {0}")]
    NotGoodReduction(String),
    #[error("no iterate up to m_max = {0} reduces to a monomial c·x^(p^r)")]
    NotPowerLikeWithin(usize),
    #[error("unit equation u^(p^r - 1) = w unsolvable at working precision")]
    UnitEquationUnsolvableAtPrecision,
    #[error("residue extension of degree {needed} exceeds the configured bound {bound}")]
    ResidueExtensionTooLarge { needed: usize, bound: usize },
    #[error("certificate failure: {0}")]
    CertificateFailure(String),
    #[error("conjugated model violates an invariant: {0}")]
    ModelInvariant(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The power-like reduction data: least m with reduction c·x^{p^r}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerLikeData {
    pub m: usize,
    pub r: u32,
    pub c: u64,
}

/// Least m <= m_max such that the reduction of phi^m is c·x^{p^r} with
/// deg phi^m = p^r, computed exactly over the residue field.
pub fn powerlike_order(
    phi: &RationalMap<Rat>,
    p: u64,
    m_max: usize,
) -> Result<PowerLikeData, ApfError> {
    phi.require_degree(2)?;
    let reduced = reduce_map(phi, p)?;
    let d = phi.degree();
    if reduced.degree() != d {
        return Err(ApfError::NotGoodReduction(format!(
            "reduction has degree {} < {}",
            reduced.degree(),
            d
        )));
    }
    let mut cur = reduced.clone();
    for m in 1..=m_max {
        let deg_expected = d
            .checked_pow(m as u32)
            .ok_or(ApfError::NotPowerLikeWithin(m_max))?;
        if cur.degree() != deg_expected {
            return Err(ApfError::NotGoodReduction(format!(
                "iterate {} lost degree over the residue field",
                m
            )));
        }
        if let Some((c, k)) = cur.as_monomial() {
            debug_assert_eq!(k, deg_expected);
            if let Some(r) = p_power_exponent(k as u64, p) {
                return Ok(PowerLikeData { m, r, c });
            }
        }
        if m < m_max {
            cur = cur.compose(&reduced, p);
        }
    }
    Err(ApfError::NotPowerLikeWithin(m_max))
}

fn p_power_exponent(k: u64, p: u64) -> Option<u32> {
    if k < 2 {
        return None;
    }
    let mut k = k;
    let mut r = 0;
    while k % p == 0 {
        k /= p;
        r += 1;
    }
    if k == 1 {
        Some(r)
    } else {
        None
    }
}

/// Coefficient-wise reduction mod p. Canonical maps over Q are jointly
/// integral with content 1, so some coefficient is a p-unit already.
fn reduce_map(phi: &RationalMap<Rat>, p: u64) -> Result<FpMap, ApfError> {
    use num::traits::{One, ToPrimitive};
    let pb = num::BigInt::from(p);
    let to_fp = |poly: &Poly<Rat>| -> Result<Vec<u64>, ApfError> {
        poly.coeffs()
            .iter()
            .map(|c| {
                if !c.denom().is_one() {
                    return Err(ApfError::NotGoodReduction(
                        "coefficients are not p-integral".into(),
                    ));
                }
                let mut m = c.numer() % &pb;
                if m.is_negative() {
                    m += &pb;
                }
                Ok(m.to_u64().unwrap_or(0))
            })
            .collect()
    };
    Ok(FpMap::new(to_fp(phi.num())?, to_fp(phi.den())?, p))
}

/// Fixed points of the power-like iterate: γ with v > 0 (or exactly 0),
/// δ with v < 0 (None when the iterate is polynomial, i.e. δ = ∞).
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub gamma: Qp,
    pub delta: Option<Qp>,
}

/// Locates γ and δ by Hensel lifting from the extreme Newton-polygon
/// segments of f(x) - x·g(x).
pub fn fixed_points(phi_m: &RationalMap<Rat>, p: u64, prec: i64) -> Result<FixedPoints, ApfError> {
    let pr = phi_m.degree();
    check_powerlike_shape(phi_m, p, pr)?;
    let ctx = QpCtx { p, prec };
    // F = f - x g over Q_p
    let f = phi_m.num();
    let g = phi_m.den();
    let n = (f.deg() + 1).max(g.deg() + 2);
    let mut big_f: Vec<Qp> = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = Qp::from_rat(&f.coeff(i), p, prec);
        if i >= 1 {
            c = c.sub(&Qp::from_rat(&g.coeff(i - 1), p, prec));
        }
        big_f.push(c);
    }
    let big_f = ptrim(&ctx, big_f);

    // γ: the unique root with positive valuation
    let gamma = if ctx.is_zero(&big_f[0]) {
        Qp::zero(p, prec)
    } else {
        let seed = ctx.neg(&big_f[0]).div(&big_f[1]).map_err(ApfError::Padic)?;
        hensel_root(&ctx, &big_f, &seed)?
    };
    if gamma.valuation().map_or(false, |v| v <= 0) {
        return Err(ApfError::ModelInvariant(
            "computed γ does not have positive valuation".into(),
        ));
    }

    // δ: reverse the polynomial; a degree drop of F at the top means δ = ∞
    let delta = if g.deg() < pr {
        None
    } else {
        let rev: Vec<Qp> = big_f.iter().rev().cloned().collect();
        let rev = ptrim(&ctx, rev);
        if ctx.is_zero(&rev[0]) {
            return Err(ApfError::Padic(PadicError::AmbiguousPolygon(
                "reversed fixed-point polynomial has vanishing constant term".into(),
            )));
        }
        let seed = ctx.neg(&rev[0]).div(&rev[1]).map_err(ApfError::Padic)?;
        let eps = hensel_root(&ctx, &rev, &seed)?;
        let delta = eps.inv().map_err(ApfError::Padic)?;
        if delta.valuation().map_or(true, |v| v >= 0) {
            return Err(ApfError::ModelInvariant(
                "computed δ does not have negative valuation".into(),
            ));
        }
        Some(delta)
    };
    Ok(FixedPoints { gamma, delta })
}

/// Direct check of the coefficient-shape hypotheses: leading numerator
/// and constant denominator coefficients are units, everything else has
/// positive valuation.
fn check_powerlike_shape(phi_m: &RationalMap<Rat>, p: u64, pr: usize) -> Result<(), ApfError> {
    let vp = |r: &Rat| -> i64 {
        if Zero::is_zero(r) {
            return i64::MAX;
        }
        let mut v = 0i64;
        let mut num = r.numer().clone();
        let pb = num::BigInt::from(p);
        while (&num % &pb).is_zero() {
            num /= &pb;
            v += 1;
        }
        let mut den = r.denom().clone();
        while (&den % &pb).is_zero() {
            den /= &pb;
            v -= 1;
        }
        v
    };
    let f = phi_m.num();
    let g = phi_m.den();
    if f.deg() != pr {
        return Err(ApfError::Padic(PadicError::AmbiguousPolygon(
            "numerator degree is not p^r".into(),
        )));
    }
    for i in 0..=pr {
        let va = vp(&f.coeff(i));
        let vb = vp(&g.coeff(i));
        let ok = if i == pr {
            va == 0 && vb >= 1
        } else if i == 0 {
            va >= 1 && vb == 0
        } else {
            va >= 1 && vb >= 1
        };
        if !ok {
            return Err(ApfError::Padic(PadicError::AmbiguousPolygon(format!(
                "coefficient {} violates the power-like valuation shape",
                i
            ))));
        }
    }
    Ok(())
}

/// The conjugated model ψ^m = f_1/g_1 over K' = Q_p(u) with s_0 = 0,
/// t_{p^r} = 0, s_{p^r} = t_0 = 1 and all other coefficients of positive
/// valuation.
#[derive(Clone, Debug)]
pub struct ConjugatedModel {
    pub gamma: Qp,
    pub delta: Option<Qp>,
    /// The normalizing unit (an element of the base of `tower`).
    pub u: Elt,
    pub u_is_one: bool,
    /// K' as a tower base: Q_p, possibly with one inert level.
    pub base: Tower,
    /// Numerator coefficients s_0..s_{p^r} at the base's top level.
    pub num: Vec<Elt>,
    /// Denominator coefficients t_0..t_{p^r}.
    pub den: Vec<Elt>,
    pub pr: usize,
    pub p: u64,
}

/// Conjugates the iterate by μ(x) = u(x-γ)/(1-δ^{-1}x) and normalizes
/// s_{p^r} = t_0 = 1, solving the unit equation for u (adjoining one
/// inert level when the residue equation requires it).
pub fn normalizing_model(
    phi_m: &RationalMap<Rat>,
    fx: &FixedPoints,
    p: u64,
    prec: i64,
    max_inert: usize,
) -> Result<ConjugatedModel, ApfError> {
    let ctx = QpCtx { p, prec };
    let pr = phi_m.degree();
    let fq: Vec<Qp> = phi_m
        .num()
        .coeffs()
        .iter()
        .map(|c| Qp::from_rat(c, p, prec))
        .collect();
    let gq: Vec<Qp> = phi_m
        .den()
        .coeffs()
        .iter()
        .map(|c| Qp::from_rat(c, p, prec))
        .collect();
    let gamma = &fx.gamma;
    let dinv = match &fx.delta {
        Some(d) => d.inv().map_err(ApfError::Padic)?,
        None => Qp::zero(p, prec),
    };

    // substitute μ^{-1}(x) = (x + γ·1)/(δ^{-1}x + 1)·... with u = 1 first:
    // μ0^{-1}(x) = (x + γ)/(δ^{-1} x + 1)
    let inner_num = vec![gamma.clone(), Qp::one(p, prec)];
    let inner_den = vec![Qp::one(p, prec), dinv.clone()];
    let (comp_n, comp_d) = compose_map_qp(&ctx, (&fq, &gq), (&inner_num, &inner_den), pr);
    // μ0(w) = (w - γ)/(1 - δ^{-1} w) applied to w = N/D:
    // ψ0 = (N - γ D)/(D - δ^{-1} N)
    let s0: Vec<Qp> = psub(&ctx, &comp_n, &pscale(&ctx, &comp_d, gamma));
    let t0: Vec<Qp> = psub(&ctx, &comp_d, &pscale(&ctx, &comp_n, &dinv));

    // invariants before scaling: s(0) = 0, t has degree < p^r
    let mut s = s0;
    let mut t = t0;
    if !ctx.is_zero(&s[0]) {
        return Err(ApfError::ModelInvariant(
            "conjugated numerator does not vanish at 0".into(),
        ));
    }
    s[0] = Qp::zero(p, prec * 2);
    if s.len() != pr + 1 {
        return Err(ApfError::ModelInvariant(
            "conjugated numerator lost degree".into(),
        ));
    }
    if t.len() > pr && !ctx.is_zero(&t[pr]) {
        return Err(ApfError::ModelInvariant(
            "conjugated denominator does not fix infinity".into(),
        ));
    }
    t.truncate(pr);
    let t = ptrim(&ctx, t);
    if t.is_empty() || t[0].valuation() != Some(0) {
        return Err(ApfError::ModelInvariant(
            "conjugated denominator constant term is not a unit".into(),
        ));
    }
    if s[pr].valuation() != Some(0) {
        return Err(ApfError::ModelInvariant(
            "conjugated leading coefficient is not a unit".into(),
        ));
    }

    // unit equation u^{p^r - 1} = w := s_{p^r}/t_0
    let w = s[pr].div(&t[0]).map_err(ApfError::Padic)?;
    let (base, u, u_is_one) = solve_unit_equation(&w, p, prec, pr, max_inert)?;
    let bl = base.num_levels();
    let bctx = base.ctx(bl);

    // scale: x -> u x conjugation sends s_i -> s_i u^{p^r + 1 - i},
    // t_j -> t_j u^{p^r - j}
    let lift = |q: &Qp| -> Elt { base.embed_qp(q, bl) };
    let upow = |e: usize| -> Elt {
        let mut acc = bctx.one();
        for _ in 0..e {
            acc = bctx.mul(&acc, &u);
        }
        acc
    };
    let mut s2: Vec<Elt> = Vec::with_capacity(pr + 1);
    for (i, si) in s.iter().enumerate() {
        s2.push(bctx.mul(&lift(si), &upow(pr + 1 - i)));
    }
    let mut t2: Vec<Elt> = Vec::with_capacity(t.len());
    for (j, tj) in t.iter().enumerate() {
        t2.push(bctx.mul(&lift(tj), &upow(pr - j)));
    }
    // divide through by the common unit value t2[0] (= s2[pr])
    let scale_inv = bctx.inv(&t2[0]).map_err(ApfError::Padic)?;
    if !bctx.is_zero(&bctx.sub(&s2[pr], &t2[0])) {
        return Err(ApfError::UnitEquationUnsolvableAtPrecision);
    }
    for x in s2.iter_mut() {
        *x = bctx.mul(x, &scale_inv);
    }
    for x in t2.iter_mut() {
        *x = bctx.mul(x, &scale_inv);
    }
    s2[pr] = bctx.one();
    t2[0] = bctx.one();
    s2[0] = bctx.zero();

    // all middle coefficients must have positive valuation
    for (i, x) in s2.iter().enumerate() {
        if i != 0 && i != pr {
            if let Some(v) = bctx.val(x) {
                if v <= Ratio::from_integer(0) {
                    return Err(ApfError::ModelInvariant(format!(
                        "s_{} has non-positive valuation {}",
                        i, v
                    )));
                }
            }
        }
    }
    for (j, x) in t2.iter().enumerate() {
        if j != 0 {
            if let Some(v) = bctx.val(x) {
                if v <= Ratio::from_integer(0) {
                    return Err(ApfError::ModelInvariant(format!(
                        "t_{} has non-positive valuation {}",
                        j, v
                    )));
                }
            }
        }
    }

    Ok(ConjugatedModel {
        gamma: fx.gamma.clone(),
        delta: fx.delta.clone(),
        u,
        u_is_one,
        base,
        num: s2,
        den: t2,
        pr,
        p,
    })
}

/// Homogeneous substitution of a degree-1 map into a degree-pr map over
/// Q_p.
fn compose_map_qp(
    ctx: &QpCtx,
    outer: (&[Qp], &[Qp]),
    inner: (&[Qp], &[Qp]),
    pr: usize,
) -> (Vec<Qp>, Vec<Qp>) {
    let (fq, gq) = outer;
    let (u, v) = inner;
    let mut up: Vec<Vec<Qp>> = vec![vec![ctx.one()]];
    let mut vp: Vec<Vec<Qp>> = vec![vec![ctx.one()]];
    for i in 1..=pr {
        up.push(pmul(ctx, &up[i - 1], u));
        vp.push(pmul(ctx, &vp[i - 1], v));
    }
    let mut n: Vec<Qp> = vec![];
    let mut d: Vec<Qp> = vec![];
    for i in 0..=pr {
        if let Some(c) = fq.get(i) {
            if !ctx.is_zero(c) {
                n = crate::padic::padd(ctx, &n, &pscale(ctx, &pmul(ctx, &up[i], &vp[pr - i]), c));
            }
        }
        if let Some(c) = gq.get(i) {
            if !ctx.is_zero(c) {
                d = crate::padic::padd(ctx, &d, &pscale(ctx, &pmul(ctx, &up[i], &vp[pr - i]), c));
            }
        }
    }
    (n, d)
}

/// Solves u^{p^r - 1} = w. In Q_p when the residue equation has a
/// solution; otherwise adjoins the smallest inert level whose residue
/// field contains one.
fn solve_unit_equation(
    w: &Qp,
    p: u64,
    prec: i64,
    pr: usize,
    max_inert: usize,
) -> Result<(Tower, Elt, bool), ApfError> {
    let base = Tower::base(p, prec);
    let one = Qp::one(p, prec);
    if w.agrees_with(&one) {
        let u = base.embed_qp(&one, 0);
        return Ok((base, u, true));
    }
    let exp = (pr as u64) - 1; // p^r - 1
                               // residue search in F_p
    let wbar = residue_of_unit(w, p);
    for a in 1..p {
        if pow_mod(a, exp, p) == wbar {
            let ctx = QpCtx { p, prec };
            let u = hensel_unit_root(&ctx, w, exp, Qp::from_i64(a as i64, p, prec))?;
            let e = base.embed_qp(&u, 0);
            return Ok((base, e, false));
        }
    }
    // need an inert extension: search k = 2..max_inert
    for k in 2..=max_inert {
        let tower = match find_inert(&base, k) {
            Some(t) => t,
            None => continue,
        };
        let ctx = tower.ctx(1);
        let we = tower.embed_qp(w, 1);
        // residue search over F_{p^k}
        let mut coeffs = vec![0u64; k];
        loop {
            let cand = residue_elt(&tower, &coeffs);
            let mut pw = ctx.one();
            let mut b = cand.clone();
            let mut e = exp;
            while e > 0 {
                if e & 1 == 1 {
                    pw = ctx.mul(&pw, &b);
                }
                e >>= 1;
                if e > 0 {
                    b = ctx.mul(&b, &b);
                }
            }
            let diff = ctx.sub(&pw, &we);
            let ok = match ctx.val(&diff) {
                None => true,
                Some(v) => v >= Ratio::from_integer(1),
            };
            if ok && ctx.val(&cand) == Some(Ratio::from_integer(0)) {
                // Hensel in the tower
                let f = unit_poly(&ctx, &we, exp);
                let u = hensel_root(&ctx, &f, &cand)?;
                return Ok((tower.clone(), u, false));
            }
            // next candidate
            let mut idx = 0;
            loop {
                if idx == k {
                    break;
                }
                coeffs[idx] += 1;
                if coeffs[idx] < p {
                    break;
                }
                coeffs[idx] = 0;
                idx += 1;
            }
            if idx == k {
                break;
            }
        }
    }
    Err(ApfError::ResidueExtensionTooLarge {
        needed: max_inert + 1,
        bound: max_inert,
    })
}

fn pow_mod(a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut b = a % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        e >>= 1;
        b = b * b % p;
    }
    acc
}

fn residue_of_unit(w: &Qp, p: u64) -> u64 {
    use num::traits::ToPrimitive;
    let (v, unit) = w.unit_digits().expect("unit");
    debug_assert_eq!(v, 0);
    (unit % num::BigUint::from(p)).to_u64().unwrap_or(0)
}

fn residue_elt(tower: &Tower, coeffs: &[u64]) -> Elt {
    let items: Vec<Elt> = coeffs
        .iter()
        .map(|&c| Elt::Base(Qp::from_i64(c as i64, tower.p, tower.base_prec)))
        .collect();
    Elt::Ext(items)
}

fn unit_poly<'a>(ctx: &crate::padic::TowerCtx<'a>, w: &Elt, exp: u64) -> Vec<Elt> {
    // u^exp - w
    let mut f = vec![ctx.neg(w)];
    for _ in 0..exp {
        f.push(ctx.zero());
    }
    let last = f.len() - 1;
    f[last] = ctx.one();
    f
}

fn hensel_unit_root(ctx: &QpCtx, w: &Qp, exp: u64, seed: Qp) -> Result<Qp, ApfError> {
    // f(u) = u^exp - w
    let mut f = vec![w.neg()];
    for _ in 1..exp {
        f.push(ctx.zero());
    }
    f.push(ctx.one());
    hensel_root(ctx, &f, &seed).map_err(ApfError::Padic)
}

fn find_inert(base: &Tower, k: usize) -> Option<Tower> {
    let p = base.p as i64;
    // search monic lifts x^k + ... with small coefficients
    let total = (p as u64).pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut coeffs = Vec::with_capacity(k + 1);
        for _ in 0..k {
            coeffs.push((c % p as u64) as i64);
            c /= p as u64;
        }
        coeffs.push(1);
        if let Ok(t) = base.push_inert(&coeffs) {
            return Some(t);
        }
    }
    None
}

/// The level polynomial h_n over the current top of the tower.
pub fn tower_step_poly(model: &ConjugatedModel, tower: &Tower, pi_prev: &Elt) -> Vec<Elt> {
    let top = tower.num_levels();
    let ctx = tower.ctx(top);
    let bl = model.base.num_levels();
    let pr = model.pr;
    let p = model.p;
    let minus_one_p = if p % 2 == 0 { 1i64 } else { -1 }; // (-1)^p
    let eps = -minus_one_p; // (-1)^{p+1}
    let mut h: Vec<Elt> = Vec::with_capacity(pr + 1);
    for i in 0..=pr {
        let s = model
            .num
            .get(i)
            .map(|x| tower.lift(x, bl, top))
            .unwrap_or_else(|| ctx.zero());
        let t = model
            .den
            .get(i)
            .map(|x| tower.lift(x, bl, top))
            .unwrap_or_else(|| ctx.zero());
        // coefficient of x^i: eps^i ( s_i + (-1)^p π t_i )
        let mut c = ctx.add(
            &s,
            &ctx.mul(
                pi_prev,
                &(if minus_one_p == 1 {
                    t.clone()
                } else {
                    ctx.neg(&t)
                }),
            ),
        );
        if eps == -1 && i % 2 == 1 {
            c = ctx.neg(&c);
        }
        h.push(c);
    }
    h
}

/// One level of the certificate.
#[derive(Clone, Debug)]
pub struct CertLevel {
    pub n: usize,
    pub qn: usize,
    /// Valuations of h_n's coefficients in v_{E_1} (= v_p) units,
    /// constant term first; `None` marks zero-to-precision entries.
    pub coeff_vals: Vec<Option<Ratio<i64>>>,
    /// Polygon slope as a string, e.g. "-1/64".
    pub slope: String,
    pub polygon_single_segment: bool,
    /// Constant-term norm identity N(π_n) = π_{n-1}.
    pub norm_ok: bool,
    /// Resultant-route norm agreement.
    pub norm_resultant_ok: bool,
    /// Whether the defining relation ψ^m(±π_n) = ±π_{n-1} was replayed.
    pub replayed: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ApfCertificate {
    pub p: u64,
    pub m: usize,
    pub r: u32,
    pub c: u64,
    pub gamma: String,
    pub delta: String,
    pub u: String,
    pub u_is_one: bool,
    pub levels: Vec<CertLevel>,
    /// Uniform lower bound on middle-coefficient valuations (v_p units).
    pub epsilon: Option<Ratio<i64>>,
    /// Middle coefficients agree across levels (exact when the model is
    /// polynomial; the π-dependent part is recorded otherwise).
    pub coeffs_n_independent: bool,
    pub basepoint: String,
    pub verdict: String,
}

/// Full pipeline: power-like order, fixed points, normalized model,
/// tower construction with per-level certification.
pub fn build_apf_tower(
    phi: &RationalMap<Rat>,
    p: u64,
    depth: usize,
    m_max: usize,
    prec: i64,
    replay_budget: u64,
) -> Result<(Tower, ApfCertificate), ApfError> {
    assert!(depth >= 1);
    let pl = powerlike_order(phi, p, m_max)?;
    let phi_m = phi.iterate(pl.m, DEFAULT_DIGIT_BOUND)?;
    // Hensel steps retry once at doubled precision before failing loudly
    let fx = match fixed_points(&phi_m, p, prec) {
        Ok(v) => v,
        Err(ApfError::Padic(PadicError::HenselConditionFailed(_))) => {
            fixed_points(&phi_m, p, prec * 2)?
        }
        Err(e) => return Err(e),
    };
    let model = match normalizing_model(&phi_m, &fx, p, prec, 4) {
        Ok(m) => m,
        Err(ApfError::UnitEquationUnsolvableAtPrecision)
        | Err(ApfError::Padic(PadicError::HenselConditionFailed(_))) => {
            let fx2 = fixed_points(&phi_m, p, prec * 2)?;
            normalizing_model(&phi_m, &fx2, p, prec * 2, 4)?
        }
        Err(e) => return Err(e),
    };
    let pr = model.pr;
    let base_levels = model.base.num_levels();

    let mut tower = model.base.clone();
    let mut pi_prev = tower.ctx(base_levels).uniformizer();
    let mut levels: Vec<CertLevel> = Vec::new();
    let mut epsilon: Option<Ratio<i64>> = None;
    let mut all_ok = true;
    let mut first_middle_vals: Option<Vec<Option<Ratio<i64>>>> = None;
    let mut first_h: Option<(Vec<Elt>, usize)> = None;
    let mut coeffs_n_independent = model.den.len() == 1;

    for n in 2..=(depth + 1) {
        let h = tower_step_poly(&model, &tower, &pi_prev);
        let top_ctx = tower.ctx(tower.num_levels());
        let ram = tower.ram_index_up_to(tower.num_levels());
        // per-coefficient valuations in v_p units
        let coeff_vals: Vec<Option<Ratio<i64>>> = h
            .iter()
            .map(|c| top_ctx.val(c).map(|v| v / Ratio::from_integer(ram)))
            .collect();
        let np = newton_polygon(&top_ctx, &h)?;
        let single = np.is_single_segment(Ratio::new(-1, pr as i64));
        if !single {
            all_ok = false;
        }
        // middle-coefficient epsilon in v_p units
        for (i, v) in coeff_vals.iter().enumerate() {
            if i == 0 || i == pr {
                continue;
            }
            if let Some(v) = v {
                if epsilon.as_ref().map_or(true, |e| v < e) {
                    epsilon = Some(*v);
                }
            }
        }
        // n-independence of the middle coefficients: exact for
        // polynomial models where the π-term is absent; compared both by
        // valuation and by value (lifting the first level's coefficients)
        if coeffs_n_independent {
            let mids: Vec<Option<Ratio<i64>>> = coeff_vals[1..pr].to_vec();
            match &first_middle_vals {
                None => first_middle_vals = Some(mids),
                Some(f) => {
                    if *f != mids {
                        coeffs_n_independent = false;
                    }
                }
            }
            match &first_h {
                None => first_h = Some((h.clone(), tower.num_levels())),
                Some((h0, lvl0)) => {
                    for i in 1..pr {
                        let lifted = tower.lift(&h0[i], *lvl0, tower.num_levels());
                        if !top_ctx.is_zero(&top_ctx.sub(&h[i], &lifted)) {
                            coeffs_n_independent = false;
                        }
                    }
                }
            }
        }

        let new_tower = tower.push_eisenstein(&h)?;
        let k = new_tower.num_levels();
        let pi_new = new_tower.generator(k);

        // norm checks: the constant-term identity is exact by
        // construction; the resultant route recomputes it independently
        let norm_res = new_tower.norm_step(&pi_new, k)?;
        let prev_ctx = new_tower.ctx(k - 1);
        let norm_resultant_ok = prev_ctx.is_zero(&prev_ctx.sub(&norm_res, &pi_prev));
        let sign_check = {
            // N(π_n) = (-1)^{p^r} h(0) = (-1)^{p^r} (-1)^p π_{n-1}
            let parity = (pr as i64 + p as i64) % 2;
            parity == 0
        };
        let h0 = &h[0];
        let expect = if p % 2 == 0 {
            pi_prev.clone()
        } else {
            prev_ctx.neg(&pi_prev)
        };
        let norm_ok = sign_check && prev_ctx.is_zero(&prev_ctx.sub(h0, &expect));
        if !norm_ok || !norm_resultant_ok {
            all_ok = false;
        }

        // replay ψ^m(εx) at the new uniformizer when affordable
        let e_total = new_tower.ram_index_up_to(k) as u64;
        let est = (pr as u64) * e_total * e_total;
        let replayed = if est <= replay_budget {
            Some(replay_defining_relation(
                &model, &new_tower, &pi_new, &pi_prev,
            ))
        } else {
            None
        };
        if replayed == Some(false) {
            all_ok = false;
        }

        levels.push(CertLevel {
            n,
            qn: pr,
            coeff_vals,
            slope: format!("-1/{}", pr),
            polygon_single_segment: single,
            norm_ok,
            norm_resultant_ok,
            replayed,
        });
        tower = new_tower;
        pi_prev = tower.lift(&pi_new, k, k);
    }

    if epsilon.map_or(true, |e| e <= Ratio::from_integer(0)) {
        all_ok = false;
    }

    // basepoint: b = μ^{-1}((-1)^{p+1} π_1) with π_1 = p
    let bctx = model.base.ctx(base_levels);
    let pi1 = bctx.uniformizer();
    let signed_pi = if p % 2 == 0 { bctx.neg(&pi1) } else { pi1 };
    let dinv = match &model.delta {
        Some(d) => model
            .base
            .embed_qp(&d.inv().map_err(ApfError::Padic)?, base_levels),
        None => bctx.zero(),
    };
    let ge = model.base.embed_qp(&model.gamma, base_levels);
    let bnum = bctx.add(&signed_pi, &bctx.mul(&model.u, &ge));
    let bden = bctx.add(&bctx.mul(&dinv, &signed_pi), &model.u);
    let basepoint = bctx.div(&bnum, &bden).map_err(ApfError::Padic)?;

    let cert = ApfCertificate {
        p,
        m: pl.m,
        r: pl.r,
        c: pl.c,
        gamma: model.gamma.to_string(),
        delta: match &model.delta {
            Some(d) => d.to_string(),
            None => "inf".into(),
        },
        u: render_elt(&model.base, &model.u, base_levels),
        u_is_one: model.u_is_one,
        levels,
        epsilon,
        coeffs_n_independent,
        basepoint: render_elt(&model.base, &basepoint, base_levels),
        verdict: if all_ok { "pass".into() } else { "fail".into() },
    };
    Ok((tower, cert))
}

/// Evaluates ψ^m at (-1)^{p+1} π_n inside the tower and compares with
/// (-1)^{p+1} π_{n-1}.
fn replay_defining_relation(
    model: &ConjugatedModel,
    tower: &Tower,
    pi_new: &Elt,
    pi_prev: &Elt,
) -> bool {
    let k = tower.num_levels();
    let ctx = tower.ctx(k);
    let bl = model.base.num_levels();
    let eps_neg = model.p % 2 == 0;
    let x = if eps_neg {
        ctx.neg(pi_new)
    } else {
        pi_new.clone()
    };
    let lift_all = |v: &[Elt]| -> Vec<Elt> { v.iter().map(|c| tower.lift(c, bl, k)).collect() };
    let fv = peval(&ctx, &lift_all(&model.num), &x);
    let gv = peval(&ctx, &lift_all(&model.den), &x);
    let lhs = match ctx.div(&fv, &gv) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let prev_lifted = tower.lift(pi_prev, k - 1, k);
    let rhs = if eps_neg {
        ctx.neg(&prev_lifted)
    } else {
        prev_lifted
    };
    ctx.is_zero(&ctx.sub(&lhs, &rhs))
}

fn render_elt(tower: &Tower, e: &Elt, level: usize) -> String {
    match e {
        Elt::Base(q) => q.to_string(),
        Elt::Ext(v) => {
            let parts: Vec<String> = v
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    format!(
                        "({})*w^{}",
                        render_elt(tower, c, level.saturating_sub(1)),
                        i
                    )
                })
                .collect();
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            }
        }
    }
}

/// Renders a rational map in the shared literal form, for reports.
pub fn map_literal(phi: &RationalMap<Rat>) -> (Vec<String>, Vec<String>) {
    (
        phi.num().coeffs().iter().map(rat_to_string).collect(),
        phi.den().coeffs().iter().map(rat_to_string).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::map_from_ints;
    use crate::ring::rint;

    fn octic_example() -> RationalMap<Rat> {
        // (x-2)^8 - 2(x-2)^2 + 3
        let xm2 = Poly::from_coeffs(vec![rint(-2), rint(1)]);
        let num = xm2
            .pow(8)
            .add(&xm2.pow(2).scale(&rint(-2)))
            .add(&Poly::constant(rint(3)));
        RationalMap::new(num, Poly::one()).unwrap()
    }

    #[test]
    fn powerlike_order_octic() {
        let pl = powerlike_order(&octic_example(), 2, 8).unwrap();
        assert_eq!(pl, PowerLikeData { m: 2, r: 6, c: 1 });
    }

    #[test]
    fn powerlike_order_x2_plus_2() {
        let phi = map_from_ints(&[2, 0, 1], &[1]).unwrap();
        let pl = powerlike_order(&phi, 2, 8).unwrap();
        assert_eq!(pl, PowerLikeData { m: 1, r: 1, c: 1 });
    }

    #[test]
    fn powerlike_order_x2_plus_1() {
        let phi = map_from_ints(&[1, 0, 1], &[1]).unwrap();
        let pl = powerlike_order(&phi, 2, 8).unwrap();
        assert_eq!(pl, PowerLikeData { m: 2, r: 2, c: 1 });
    }

    #[test]
    fn never_powerlike() {
        let phi = map_from_ints(&[1, 1, 1], &[1]).unwrap(); // x^2 + x + 1
        assert!(matches!(
            powerlike_order(&phi, 2, 6),
            Err(ApfError::NotPowerLikeWithin(6))
        ));
    }

    #[test]
    fn fixed_points_x2_plus_2() {
        // gamma: root of x^2 - x + 2 ≡ 6 mod 8; delta = ∞
        let phi = map_from_ints(&[2, 0, 1], &[1]).unwrap();
        let fx = fixed_points(&phi, 2, 40).unwrap();
        assert!(fx.delta.is_none());
        let six = Qp::from_i64(6, 2, 3);
        assert!(fx.gamma.truncate(3).agrees_with(&six));
    }

    #[test]
    fn fixed_points_octic_gamma_is_two() {
        let phi2 = octic_example().iterate(2, DEFAULT_DIGIT_BOUND).unwrap();
        let fx = fixed_points(&phi2, 2, 40).unwrap();
        assert!(fx.delta.is_none());
        assert!(fx.gamma.agrees_with(&Qp::from_i64(2, 2, 40)));
    }

    #[test]
    fn model_for_x2_plus_2() {
        let phi = map_from_ints(&[2, 0, 1], &[1]).unwrap();
        let fx = fixed_points(&phi, 2, 40).unwrap();
        let model = normalizing_model(&phi, &fx, 2, 40, 4).unwrap();
        assert!(model.u_is_one);
        assert_eq!(model.pr, 2);
        // ψ = x^2 + 2γx: s_1 = 2γ with v = 2
        let ctx = model.base.ctx(0);
        assert_eq!(ctx.val(&model.num[1]), Some(Ratio::from_integer(2)));
    }

    #[test]
    fn tower_x2_plus_2_depth_4() {
        let phi = map_from_ints(&[2, 0, 1], &[1]).unwrap();
        let (tower, cert) = build_apf_tower(&phi, 2, 4, 8, 40, 50_000_000).unwrap();
        assert_eq!(cert.verdict, "pass");
        assert_eq!(tower.ram_index(), 16);
        assert!(cert.epsilon.unwrap() >= Ratio::from_integer(1));
        for lvl in &cert.levels {
            assert_eq!(lvl.qn, 2);
            assert!(lvl.norm_ok && lvl.norm_resultant_ok);
            assert_eq!(lvl.replayed, Some(true));
        }
    }

    #[test]
    fn fixed_points_rejects_wrong_shape() {
        // x^2 + x + 1 has a unit middle coefficient: not power-like
        let phi = map_from_ints(&[1, 1, 1], &[1]).unwrap();
        assert!(matches!(
            fixed_points(&phi, 2, 40),
            Err(ApfError::Padic(PadicError::AmbiguousPolygon(_)))
        ));
    }

    #[test]
    fn odd_prime_tower_x3_plus_3x() {
        // p = 3: h_n = f_1(x) - pi g_1(x), N(pi_n) = pi_(n-1) with the
        // odd-sign conventions
        let phi = map_from_ints(&[0, 3, 0, 1], &[1]).unwrap();
        let pl = powerlike_order(&phi, 3, 4).unwrap();
        assert_eq!(pl, PowerLikeData { m: 1, r: 1, c: 1 });
        let (tower, cert) = build_apf_tower(&phi, 3, 3, 4, 40, 50_000_000).unwrap();
        assert_eq!(cert.verdict, "pass");
        assert_eq!(tower.ram_index(), 27);
        assert!(cert.u_is_one);
        // gamma is exactly 0 here (phi fixes 0)
        assert!(cert.gamma.starts_with("O(3^"));
        for lvl in &cert.levels {
            assert_eq!(lvl.qn, 3);
            assert!(lvl.norm_ok && lvl.norm_resultant_ok);
            assert_eq!(lvl.replayed, Some(true));
        }
    }

    #[test]
    fn inert_unit_equation_path() {
        // phi = 2x^3 + 3x over Q_3: reduction 2x^3, so w = 2 and
        // u^2 = 2 needs the quadratic unramified extension F_9
        let phi = map_from_ints(&[0, 3, 0, 2], &[1]).unwrap();
        let pl = powerlike_order(&phi, 3, 4).unwrap();
        assert_eq!(pl, PowerLikeData { m: 1, r: 1, c: 2 });
        let (tower, cert) = build_apf_tower(&phi, 3, 2, 4, 40, 50_000_000).unwrap();
        assert_eq!(cert.verdict, "pass");
        assert!(!cert.u_is_one);
        // residue degree 2 from the inert level, ramification 3^2
        assert_eq!(tower.residue_degree(), 2);
        assert_eq!(tower.ram_index(), 9);
        for lvl in &cert.levels {
            assert!(lvl.polygon_single_segment);
            assert!(lvl.norm_ok && lvl.norm_resultant_ok);
        }
    }

    #[test]
    fn rational_map_with_finite_delta() {
        // phi = x^2/(2x^2 + 2x + 1) over Q_2: good reduction to x^2,
        // denominator of full degree, so delta is finite of negative
        // valuation and the model keeps a nonconstant denominator
        let phi = RationalMap::new(
            Poly::from_coeffs(vec![rint(0), rint(0), rint(1)]),
            Poly::from_coeffs(vec![rint(1), rint(2), rint(2)]),
        )
        .unwrap();
        let pl = powerlike_order(&phi, 2, 4).unwrap();
        assert_eq!(pl, PowerLikeData { m: 1, r: 1, c: 1 });
        let fx = fixed_points(&phi, 2, 40).unwrap();
        // gamma = 0 exactly (phi fixes 0); delta has valuation -1
        assert!(fx.gamma.is_zero());
        let delta = fx.delta.clone().expect("finite delta");
        assert_eq!(delta.valuation(), Some(-1));
        let (tower, cert) = build_apf_tower(&phi, 2, 2, 4, 40, 50_000_000).unwrap();
        assert_eq!(cert.verdict, "pass");
        assert_eq!(tower.ram_index(), 4);
        // the pi-dependent middle terms make strict n-independence fail
        assert!(!cert.coeffs_n_independent);
        for lvl in &cert.levels {
            assert!(lvl.polygon_single_segment);
            assert!(lvl.norm_ok && lvl.norm_resultant_ok);
        }
    }

    #[test]
    fn tower_x2_plus_1_depth_3() {
        let phi = map_from_ints(&[1, 0, 1], &[1]).unwrap();
        let (tower, cert) = build_apf_tower(&phi, 2, 3, 8, 40, 50_000_000).unwrap();
        assert_eq!(cert.verdict, "pass");
        assert_eq!(cert.m, 2);
        assert_eq!(cert.r, 2);
        assert_eq!(tower.ram_index(), 64);
    }
}
