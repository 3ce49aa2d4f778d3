//! Lattès fiber structure: the n-th preimage of an x-coordinate under
//! the multiplication-by-d map coincides with the x-coordinates of a
//! torsion translate family {P1 + T : T in E[d^n]}.

use super::preimage::{preimage_tree, NodeValue};
use super::roots::certified_roots_rat;
use super::{Tolerances, VerifyError};
use crate::dynamics::{lattes_multiplication_map, DivisionPolynomials, DynamicsError};
use crate::ring::{rat_to_f64, Rat};
use num::complex::Complex64;

/// Affine complex point or the origin of the group law.
#[derive(Clone, Copy, Debug)]
enum EPoint {
    O,
    Affine(Complex64, Complex64),
}

#[derive(Clone, Debug)]
pub struct FiberReport {
    pub degree: usize,
    pub depth: usize,
    /// |phi^{-n}(x0)| with multiplicity (= d^{2n}).
    pub fiber_mass: usize,
    /// Largest distance in the greedy bijection between the two sides.
    pub max_match_distance: f64,
    /// x-coordinate error of [d^n]P1 against x0 via the group law.
    pub norm_check_error: f64,
}

struct Curve {
    a: Complex64,
    b: Complex64,
}

impl Curve {
    fn rhs(&self, x: Complex64) -> Complex64 {
        x * x * x + self.a * x + self.b
    }

    fn add(&self, p: EPoint, q: EPoint) -> EPoint {
        const EPS: f64 = 1e-9;
        match (p, q) {
            (EPoint::O, q) => q,
            (p, EPoint::O) => p,
            (EPoint::Affine(x1, y1), EPoint::Affine(x2, y2)) => {
                let scale = 1.0 + x1.norm().max(x2.norm());
                if (x1 - x2).norm() < EPS * scale {
                    if (y1 + y2).norm() < EPS * (1.0 + y1.norm().max(y2.norm())) {
                        return EPoint::O;
                    }
                    // doubling
                    let lam = (Complex64::new(3.0, 0.0) * x1 * x1 + self.a)
                        / (Complex64::new(2.0, 0.0) * y1);
                    let x3 = lam * lam - x1 - x2;
                    let y3 = lam * (x1 - x3) - y1;
                    EPoint::Affine(x3, y3)
                } else {
                    let lam = (y2 - y1) / (x2 - x1);
                    let x3 = lam * lam - x1 - x2;
                    let y3 = lam * (x1 - x3) - y1;
                    EPoint::Affine(x3, y3)
                }
            }
        }
    }

    fn mul(&self, k: usize, p: EPoint) -> EPoint {
        let mut acc = EPoint::O;
        let mut base = p;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }
}

/// Verifies that phi^{-n}(x0) for the degree-d^2 Lattès map matches the
/// torsion-translate enumeration {x(P1 + T) : T in E[d^n]} within
/// tolerance, where P1 is a lift of one preimage.
pub fn lattes_fiber_check(
    a: &Rat,
    b: &Rat,
    d: usize,
    x0: &Rat,
    n: usize,
    tol: &Tolerances,
) -> Result<FiberReport, VerifyError> {
    assert!(d >= 2);
    let x0c = Complex64::new(rat_to_f64(x0), 0.0);
    if n == 0 {
        return Ok(FiberReport {
            degree: d * d,
            depth: 0,
            fiber_mass: 1,
            max_match_distance: 0.0,
            norm_check_error: 0.0,
        });
    }
    let phi = lattes_multiplication_map(a, b, d)?;
    let tree = preimage_tree(&phi, NodeValue::Finite(x0c), n, tol)?;
    let mut side_a: Vec<Complex64> = Vec::new();
    for node in tree.level(n) {
        match node.value {
            NodeValue::Finite(z) => {
                for _ in 0..node.multiplicity {
                    side_a.push(z);
                }
            }
            NodeValue::Infinity => {
                return Err(VerifyError::DegenerateFiber(
                    "infinity appeared in a Lattès fiber of a finite basepoint".into(),
                ))
            }
        }
    }
    let k = d.pow(n as u32);
    let expected_mass = k * k;
    if side_a.len() != expected_mass {
        return Err(VerifyError::DegenerateFiber(format!(
            "fiber mass {} != d^(2n) = {}",
            side_a.len(),
            expected_mass
        )));
    }

    let curve = Curve {
        a: Complex64::new(rat_to_f64(a), 0.0),
        b: Complex64::new(rat_to_f64(b), 0.0),
    };

    // torsion points E[k] from the division polynomials: for even k the
    // 2-torsion (y = 0) sits on the curve cubic, the rest on the
    // y-stripped part of ψ_k
    let table =
        DivisionPolynomials::new(a.clone(), b.clone(), k.max(2)).map_err(DynamicsError::from)?;
    let (g, has_y) = table.psi(k);
    let mut torsion: Vec<EPoint> = vec![EPoint::O];
    if has_y {
        for root in certified_roots_rat(table.curve_cubic(), tol)? {
            torsion.push(EPoint::Affine(root.value, Complex64::new(0.0, 0.0)));
        }
    }
    if g.deg() >= 1 {
        for root in certified_roots_rat(&g, tol)? {
            let x = root.value;
            let y = curve.rhs(x).sqrt();
            torsion.push(EPoint::Affine(x, y));
            torsion.push(EPoint::Affine(x, -y));
        }
    }
    if torsion.len() != k * k {
        return Err(VerifyError::DegenerateFiber(format!(
            "torsion enumeration found {} points, expected {}",
            torsion.len(),
            k * k
        )));
    }

    // lift of the lexicographically first preimage
    let x1 = side_a[0];
    let y1 = curve.rhs(x1).sqrt();
    let p1 = EPoint::Affine(x1, y1);

    // independent group-law check: [k]P1 must sit over x0
    let kp = curve.mul(k, p1);
    let norm_check_error = match kp {
        EPoint::Affine(x, _) => (x - x0c).norm(),
        EPoint::O => f64::INFINITY,
    };
    if !(norm_check_error <= tol.check * (1.0 + x0c.norm())) {
        return Err(VerifyError::ToleranceExceeded {
            check: "group-law image of the lifted preimage".into(),
            value: norm_check_error,
            tol: tol.check * (1.0 + x0c.norm()),
        });
    }

    // side B: x(P1 + T)
    let mut side_b: Vec<Complex64> = Vec::with_capacity(k * k);
    for t in &torsion {
        match curve.add(p1, *t) {
            EPoint::Affine(x, _) => side_b.push(x),
            EPoint::O => {
                return Err(VerifyError::DegenerateFiber(
                    "a torsion translate landed at the origin".into(),
                ))
            }
        }
    }

    // greedy multiset matching
    let mut used = vec![false; side_b.len()];
    let mut max_match = 0.0f64;
    for za in &side_a {
        let mut best: Option<(usize, f64)> = None;
        for (i, zb) in side_b.iter().enumerate() {
            if used[i] {
                continue;
            }
            let dist = (za - zb).norm();
            if best.map_or(true, |(_, bd)| dist < bd) {
                best = Some((i, dist));
            }
        }
        let (i, dist) = best.expect("sides have equal mass");
        let scale = 1.0 + za.norm();
        if dist > tol.check * scale {
            return Err(VerifyError::ToleranceExceeded {
                check: "fiber vs torsion-translate matching".into(),
                value: dist,
                tol: tol.check * scale,
            });
        }
        used[i] = true;
        max_match = max_match.max(dist);
    }

    Ok(FiberReport {
        degree: d * d,
        depth: n,
        fiber_mass: expected_mass,
        max_match_distance: max_match,
        norm_check_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rint;

    #[test]
    fn trivial_depth_zero() {
        let r =
            lattes_fiber_check(&rint(0), &rint(1), 2, &rint(2), 0, &Tolerances::default()).unwrap();
        assert_eq!(r.fiber_mass, 1);
    }

    #[test]
    fn duplication_fiber_on_y2_x3_plus_1() {
        // P = (2, 3) lies on y^2 = x^3 + 1
        let r =
            lattes_fiber_check(&rint(0), &rint(1), 2, &rint(2), 1, &Tolerances::default()).unwrap();
        assert_eq!(r.fiber_mass, 4);
        assert!(r.max_match_distance < 1e-8);
        assert!(r.norm_check_error < 1e-8);
    }

    #[test]
    fn depth_two_fiber() {
        let r =
            lattes_fiber_check(&rint(0), &rint(1), 2, &rint(2), 2, &Tolerances::default()).unwrap();
        assert_eq!(r.fiber_mass, 16);
        assert!(r.max_match_distance < 1e-7);
    }

    #[test]
    fn triplication_fiber() {
        let r =
            lattes_fiber_check(&rint(0), &rint(1), 3, &rint(2), 1, &Tolerances::default()).unwrap();
        assert_eq!(r.fiber_mass, 9);
        assert!(r.max_match_distance < 1e-8);
    }
}
