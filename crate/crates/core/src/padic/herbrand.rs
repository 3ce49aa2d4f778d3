//! Herbrand transition functions: piecewise-linear, concave, built from
//! lower break data as φ(x) = (x + Σ m_i · min(b_i, x)) / (1 + Σ m_i).
//!
//! All breakpoint arithmetic is exact rational.

use super::breaks::BreakData;
use super::PadicError;
use num::rational::Ratio;
use num::traits::{One, Zero};

type Q = Ratio<i64>;

/// Piecewise-linear increasing concave function with φ(0) = 0, stored as
/// interior knots (x, φ(x)) plus the slope of the unbounded final piece.
#[derive(Clone, Debug)]
pub struct HerbrandFn {
    /// Strictly increasing in x; x > 0; slopes change at every knot.
    knots: Vec<(Q, Q)>,
    final_slope: Q,
    /// Slope out of the origin (differs from a knot-derived slope only
    /// when there are no knots, or a tame jump at 0 lowered it).
    first_slope: Q,
}

impl HerbrandFn {
    pub fn identity() -> Self {
        HerbrandFn {
            knots: vec![],
            final_slope: Q::one(),
            first_slope: Q::one(),
        }
    }

    /// Builds φ from lower breaks. A break at 0 (tame part) lowers the
    /// slope out of the origin; wild breaks appear as interior knots.
    pub fn from_breaks(data: &BreakData) -> Result<Self, PadicError> {
        let n = 1 + data.mass() as i64;
        let mut remaining = data.mass() as i64;
        let mut knots = Vec::new();
        let mut x_prev = Q::zero();
        let mut y_prev = Q::zero();
        let mut slope = Q::new(1 + remaining, n); // = 1 initially
        let mut first_slope = slope;
        for (b, m) in &data.breaks {
            if *b < Q::zero() {
                return Err(PadicError::InvalidBreaks("negative break".into()));
            }
            if *b == Q::zero() {
                remaining -= *m as i64;
                slope = Q::new(1 + remaining, n);
                first_slope = slope;
                continue;
            }
            let y = y_prev + slope * (*b - x_prev);
            knots.push((*b, y));
            x_prev = *b;
            y_prev = y;
            remaining -= *m as i64;
            slope = Q::new(1 + remaining, n);
        }
        Ok(HerbrandFn {
            knots,
            final_slope: Q::new(1, n),
            first_slope,
        }
        .simplified())
    }

    /// Pieces as (x_start, y_start, slope); the last one is unbounded.
    fn pieces(&self) -> Vec<(Q, Q, Q)> {
        let mut out = Vec::with_capacity(self.knots.len() + 1);
        let mut x0 = Q::zero();
        let mut y0 = Q::zero();
        for (i, (x, y)) in self.knots.iter().enumerate() {
            let slope = if i == 0 && self.knots[0].0 > Q::zero() {
                // slope of the first piece comes from the knot value
                (y - y0) / (x - x0)
            } else {
                (y - y0) / (x - x0)
            };
            out.push((x0, y0, slope));
            x0 = *x;
            y0 = *y;
        }
        if out.is_empty() {
            out.push((Q::zero(), Q::zero(), self.first_slope));
        } else {
            out.push((x0, y0, self.final_slope));
        }
        out
    }

    pub fn eval(&self, x: Q) -> Q {
        assert!(x >= Q::zero(), "domain is x >= 0");
        let pieces = self.pieces();
        for (i, (x0, y0, slope)) in pieces.iter().enumerate() {
            let end = self.knots.get(i).map(|(kx, _)| *kx);
            match end {
                Some(kx) if x > kx => continue,
                _ => return y0 + slope * (x - x0),
            }
        }
        unreachable!()
    }

    /// Inverse function ψ (strictly increasing, so well defined).
    pub fn eval_inverse(&self, y: Q) -> Q {
        assert!(y >= Q::zero());
        let pieces = self.pieces();
        for (i, (x0, y0, slope)) in pieces.iter().enumerate() {
            let end = self.knots.get(i).map(|(_, ky)| *ky);
            match end {
                Some(ky) if y > ky => continue,
                _ => return x0 + (y - y0) / slope,
            }
        }
        unreachable!()
    }

    /// Composite `self ∘ inner` (transitivity: φ_{L/K} = φ_{L'/K} ∘ φ_{L/L'}
    /// with `self` the lower-extension function).
    pub fn compose(&self, inner: &HerbrandFn) -> HerbrandFn {
        let mut xs: Vec<Q> = inner.knots.iter().map(|(x, _)| *x).collect();
        for (kx, _) in &self.knots {
            xs.push(inner.eval_inverse(*kx));
        }
        xs.sort();
        xs.dedup();
        xs.retain(|x| *x > Q::zero());
        let knots: Vec<(Q, Q)> = xs.iter().map(|x| (*x, self.eval(inner.eval(*x)))).collect();
        let first_slope = match knots.first() {
            Some((x, y)) => y / x,
            None => self.first_slope * inner.first_slope,
        };
        HerbrandFn {
            knots,
            final_slope: self.final_slope * inner.final_slope,
            first_slope,
        }
        .simplified()
    }

    /// Removes knots at which the slope does not change.
    fn simplified(&self) -> HerbrandFn {
        let pieces = self.pieces();
        let mut knots = Vec::new();
        for (i, (x, y)) in self.knots.iter().enumerate() {
            if pieces[i].2 != pieces[i + 1].2 {
                knots.push((*x, *y));
            }
        }
        HerbrandFn {
            knots,
            final_slope: self.final_slope,
            first_slope: pieces[0].2,
        }
    }

    pub fn initial_slope(&self) -> Q {
        self.pieces()[0].2
    }

    pub fn final_slope(&self) -> Q {
        self.final_slope
    }

    pub fn knots(&self) -> &[(Q, Q)] {
        &self.knots
    }

    /// Upper-numbering images of lower breaks.
    pub fn upper_breaks(&self, lower: &BreakData) -> Vec<Q> {
        lower.breaks.iter().map(|(b, _)| self.eval(*b)).collect()
    }

    /// Slopes positive and nonincreasing, φ(0) = 0 by construction.
    pub fn is_concave(&self) -> bool {
        let pieces = self.pieces();
        let mut prev: Option<Q> = None;
        for (_, _, slope) in pieces {
            if slope <= Q::zero() {
                return false;
            }
            if let Some(p) = prev {
                if slope > p {
                    return false;
                }
            }
            prev = Some(slope);
        }
        true
    }
}

impl PartialEq for HerbrandFn {
    fn eq(&self, other: &Self) -> bool {
        let a = self.simplified();
        let b = other.simplified();
        a.knots == b.knots && a.final_slope == b.final_slope && a.first_slope == b.first_slope
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn breaks(v: &[(i64, usize)]) -> BreakData {
        BreakData::new(v.iter().map(|&(b, m)| (Q::from_integer(b), m)).collect()).unwrap()
    }

    #[test]
    fn single_break_at_two_index_two() {
        // breaks {2}, group order 2: φ(x) = x on [0,2], then 2 + (x-2)/2
        let h = HerbrandFn::from_breaks(&breaks(&[(2, 1)])).unwrap();
        assert_eq!(h.eval(Q::from_integer(1)), Q::from_integer(1));
        assert_eq!(h.eval(Q::from_integer(2)), Q::from_integer(2));
        assert_eq!(h.eval(Q::from_integer(4)), Q::from_integer(3));
        assert_eq!(h.initial_slope(), Q::one());
        assert!(h.is_concave());
    }

    #[test]
    fn trivial_extension_is_identity() {
        let h = HerbrandFn::from_breaks(&BreakData::empty()).unwrap();
        assert_eq!(h, HerbrandFn::identity());
        assert_eq!(h.eval(Q::new(7, 3)), Q::new(7, 3));
    }

    #[test]
    fn inverse_round_trip() {
        let h = HerbrandFn::from_breaks(&breaks(&[(1, 2), (3, 1)])).unwrap();
        for x in [
            Q::zero(),
            Q::new(1, 2),
            Q::one(),
            Q::new(5, 2),
            Q::from_integer(3),
            Q::from_integer(10),
        ] {
            assert_eq!(h.eval_inverse(h.eval(x)), x);
        }
    }

    #[test]
    fn tame_break_at_zero_changes_initial_slope() {
        // breaks {0 ×3, 2 ×2} (e.g. a degree-6 cyclotomic): slope 1/2 at 0
        let h = HerbrandFn::from_breaks(&breaks(&[(0, 3), (2, 2)])).unwrap();
        assert_eq!(h.initial_slope(), Q::new(1, 2));
        assert_eq!(h.eval(Q::from_integer(2)), Q::one());
        assert!(h.is_concave());
    }

    #[test]
    fn composition_matches_direct_for_zeta8() {
        // φ_{Q_2(ζ_8)/Q_2} = φ_{Q_2(ζ_4)/Q_2} ∘ φ_{Q_2(ζ_8)/Q_2(ζ_4)}
        let lower = HerbrandFn::from_breaks(&breaks(&[(1, 1)])).unwrap();
        let upper = HerbrandFn::from_breaks(&breaks(&[(3, 1)])).unwrap();
        let composed = lower.compose(&upper);
        let direct = HerbrandFn::from_breaks(&breaks(&[(1, 2), (3, 1)])).unwrap();
        assert_eq!(composed, direct);
        assert_eq!(direct.eval(Q::from_integer(3)), Q::from_integer(2));
        assert_eq!(direct.eval(Q::from_integer(7)), Q::from_integer(3));
    }

    #[test]
    fn upper_breaks_of_zeta8() {
        let b = breaks(&[(1, 2), (3, 1)]);
        let h = HerbrandFn::from_breaks(&b).unwrap();
        assert_eq!(h.upper_breaks(&b), vec![Q::one(), Q::from_integer(2)]);
    }
}
