//! Lower ramification breaks.
//!
//! Two independent routes are provided. `ramification_breaks` reads the
//! breaks off the Newton polygon of ρ(x)/x with ρ(x) = g(π'x + π'): the
//! nonzero roots of ρ are (σπ' - π')/π', whose valuations are the break
//! values. `cyclotomic_breaks` brute-forces i(σ_a) = v(σ_a π - π) for
//! the cyclotomic tower Q_p(ζ_{p^n})/Q_p by expanding the conjugates
//! (1+π)^a - 1 inside the tower.

use super::ctx::{newton_polygon, padd, pmul, pscale, LocalField};
use super::tower::{Elt, Tower};
use super::PadicError;
use num::rational::Ratio;
use num::traits::{One, Zero};
use num::BigInt;

/// Lower ramification breaks with multiplicities, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakData {
    pub breaks: Vec<(Ratio<i64>, usize)>,
}

impl BreakData {
    pub fn new(mut raw: Vec<(Ratio<i64>, usize)>) -> Result<Self, PadicError> {
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut breaks: Vec<(Ratio<i64>, usize)> = Vec::new();
        for (b, m) in raw {
            if b < Ratio::zero() {
                return Err(PadicError::InvalidBreaks(format!(
                    "negative break value {}",
                    b
                )));
            }
            if m == 0 {
                continue;
            }
            match breaks.last_mut() {
                Some((prev, pm)) if *prev == b => *pm += m,
                _ => breaks.push((b, m)),
            }
        }
        Ok(BreakData { breaks })
    }

    pub fn empty() -> Self {
        BreakData { breaks: vec![] }
    }

    /// Total count of nontrivial group elements: sum of multiplicities.
    pub fn mass(&self) -> usize {
        self.breaks.iter().map(|(_, m)| m).sum()
    }
}

/// Breaks of the extension defined by a monic Eisenstein polynomial over
/// the top of `tower`, read from the ρ(x)/x polygon. Returns the break
/// data together with the extended tower.
pub fn ramification_breaks(tower: &Tower, g: &[Elt]) -> Result<(BreakData, Tower), PadicError> {
    let t2 = tower.push_eisenstein(g)?;
    let k = t2.num_levels();
    let degree = t2.level(k).degree;
    if degree == 1 {
        return Ok((BreakData::empty(), t2));
    }
    let ctx = t2.top();
    let pi = t2.generator(k);

    // ρ(x) = g(π·x + π), coefficients at the new top level
    let shift = vec![pi.clone(), pi.clone()]; // π + π x
    let mut rho: Vec<Elt> = vec![ctx.zero()];
    let mut power: Vec<Elt> = vec![ctx.one()];
    for (i, gi) in g.iter().enumerate() {
        let gi_up = t2.lift(gi, k - 1, k);
        rho = padd(&ctx, &rho, &pscale(&ctx, &power, &gi_up));
        if i + 1 < g.len() {
            power = pmul(&ctx, &power, &shift);
        }
    }
    // ρ(0) = g(π) = 0 to precision; divide by x
    if let Some(c0) = rho.first() {
        if !ctx.is_zero(c0) {
            return Err(PadicError::PrecisionExhausted(
                "g(π) did not vanish to precision".into(),
            ));
        }
    }
    let rho_over_x: Vec<Elt> = rho.into_iter().skip(1).collect();
    let np = newton_polygon(&ctx, &rho_over_x)?;
    let raw: Vec<(Ratio<i64>, usize)> = np.segments.iter().map(|s| (-s.slope, s.length)).collect();
    Ok((BreakData::new(raw)?, t2))
}

/// Coefficients of the cyclotomic polynomial Φ_{p^n}(x + 1) over Z.
fn cyclotomic_shifted(p: u64, n: u32) -> Vec<BigInt> {
    // Φ_{p^n}(x) = Σ_{j<p} x^{j p^{n-1}}
    let step = (p as usize).pow(n - 1);
    let deg = step * (p as usize - 1);
    let mut phi = vec![BigInt::zero(); deg + 1];
    for j in 0..p as usize {
        if j * step <= deg {
            phi[j * step] = BigInt::one();
        }
    }
    // substitute x -> x + 1 by repeated synthetic shifts
    let mut out = phi;
    // Horner-style: evaluate Σ c_i (x+1)^i
    let mut acc: Vec<BigInt> = vec![BigInt::zero()];
    for c in out.iter().rev() {
        // acc = acc * (x + 1) + c
        let mut next = vec![BigInt::zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i] += a;
            next[i + 1] += a;
        }
        next[0] += c;
        while next.last().map_or(false, |x| x.is_zero()) {
            next.pop();
        }
        acc = next;
    }
    out = acc;
    out
}

/// The cyclotomic tower Q_p(ζ_{p^n})/Q_p with uniformizer ζ - 1.
pub fn cyclotomic_tower(p: u64, n: u32, prec: i64) -> Result<Tower, PadicError> {
    assert!(n >= 1);
    let base = Tower::base(p, prec);
    let coeffs = cyclotomic_shifted(p, n);
    let g: Vec<Elt> = coeffs
        .iter()
        .map(|c| base.embed_rat(&crate::ring::Rat::from_integer(c.clone()), 0))
        .collect();
    base.push_eisenstein(&g)
}

/// Brute-force lower breaks of Q_p(ζ_{p^n})/Q_p: for every a coprime to
/// p, i(σ_a) = v((1+π)^a - 1 - π) computed inside the tower; the breaks
/// are the values i(σ_a) - 1.
pub fn cyclotomic_breaks(p: u64, n: u32, prec: i64) -> Result<BreakData, PadicError> {
    let t = cyclotomic_tower(p, n, prec)?;
    let ctx = t.top();
    if t.level(1).degree == 1 {
        return Ok(BreakData::empty());
    }
    let pi = t.generator(1);
    let one_plus_pi = ctx.add(&ctx.one(), &pi);
    let order = (p as u64).pow(n);
    let mut raw: Vec<(Ratio<i64>, usize)> = Vec::new();
    for a in 2..order {
        if a % p == 0 {
            continue;
        }
        // σ_a(π) = (1+π)^a - 1
        let mut pw = ctx.one();
        let mut base = one_plus_pi.clone();
        let mut e = a;
        while e > 0 {
            if e & 1 == 1 {
                pw = ctx.mul(&pw, &base);
            }
            e >>= 1;
            if e > 0 {
                base = ctx.mul(&base, &base);
            }
        }
        let sigma_pi = ctx.sub(&pw, &ctx.one());
        let diff = ctx.sub(&sigma_pi, &pi);
        let i_sigma = ctx.val(&diff).ok_or_else(|| {
            PadicError::PrecisionExhausted(format!("i(σ_{}) undecided at precision", a))
        })?;
        raw.push((i_sigma - Ratio::one(), 1));
    }
    BreakData::new(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::qp::Qp;

    fn qe(t: &Tower, n: i64) -> Elt {
        Elt::Base(Qp::from_i64(n, t.p, t.base_prec))
    }

    #[test]
    fn sqrt2_break_is_two() {
        let t = Tower::base(2, 40);
        let g = vec![qe(&t, -2), qe(&t, 0), qe(&t, 1)];
        let (b, _) = ramification_breaks(&t, &g).unwrap();
        assert_eq!(b.breaks, vec![(Ratio::from_integer(2), 1)]);
    }

    #[test]
    fn zeta4_break_is_one() {
        let t = Tower::base(2, 40);
        let g = vec![qe(&t, 2), qe(&t, 2), qe(&t, 1)]; // x^2 + 2x + 2
        let (b, _) = ramification_breaks(&t, &g).unwrap();
        assert_eq!(b.breaks, vec![(Ratio::from_integer(1), 1)]);
    }

    #[test]
    fn degree_one_has_no_breaks() {
        let t = Tower::base(2, 40);
        let g = vec![qe(&t, -2), qe(&t, 1)]; // x - 2
        let (b, _) = ramification_breaks(&t, &g).unwrap();
        assert!(b.breaks.is_empty());
    }

    #[test]
    fn cyclotomic_q2_breaks() {
        // Q_2(ζ_2) = Q_2: trivial; Q_2(ζ_4): {1}; Q_2(ζ_8): {1, 3}
        let b1 = cyclotomic_breaks(2, 1, 40).unwrap();
        assert!(b1.breaks.is_empty());
        let b2 = cyclotomic_breaks(2, 2, 40).unwrap();
        assert_eq!(b2.breaks, vec![(Ratio::from_integer(1), 1)]);
        let b3 = cyclotomic_breaks(2, 3, 40).unwrap();
        assert_eq!(
            b3.breaks,
            vec![(Ratio::from_integer(1), 2), (Ratio::from_integer(3), 1)]
        );
    }

    #[test]
    fn cyclotomic_q3_breaks() {
        // Q_3(ζ_3)/Q_3 is tame of degree 2: single break at 0
        let b1 = cyclotomic_breaks(3, 1, 40).unwrap();
        assert_eq!(b1.breaks, vec![(Ratio::from_integer(0), 1)]);
        // Q_3(ζ_9)/Q_3: tame part at 0 (3 elements), wild at 2 (2 elements)
        let b2 = cyclotomic_breaks(3, 2, 40).unwrap();
        assert_eq!(
            b2.breaks,
            vec![(Ratio::from_integer(0), 3), (Ratio::from_integer(2), 2)]
        );
    }

    #[test]
    fn cyclotomic_q5_breaks() {
        // Q_5(zeta_5)/Q_5 is tame of degree 4
        let b1 = cyclotomic_breaks(5, 1, 30).unwrap();
        assert_eq!(b1.breaks, vec![(Ratio::from_integer(0), 3)]);
        // Q_5(zeta_25)/Q_5: tame part at 0, wild break at 4
        let b2 = cyclotomic_breaks(5, 2, 30).unwrap();
        assert_eq!(
            b2.breaks,
            vec![(Ratio::from_integer(0), 15), (Ratio::from_integer(4), 4)]
        );
    }

    #[test]
    fn polygon_route_matches_oracle_on_cyclotomics() {
        for (p, n) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2)] {
            let base = Tower::base(p, 60);
            let coeffs = cyclotomic_shifted(p, n);
            let g: Vec<Elt> = coeffs
                .iter()
                .map(|c| base.embed_rat(&crate::ring::Rat::from_integer(c.clone()), 0))
                .collect();
            let (poly_route, _) = ramification_breaks(&base, &g).unwrap();
            let oracle = cyclotomic_breaks(p, n, 60).unwrap();
            assert_eq!(poly_route, oracle, "p = {}, n = {}", p, n);
        }
    }
}
