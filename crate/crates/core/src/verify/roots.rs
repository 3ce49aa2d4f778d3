//! Certified complex roots via Aberth–Ehrlich simultaneous iteration
//! with Newton refinement.
//!
//! Rational inputs get an exact square-free decomposition (Yun) first,
//! so every numeric solve sees only simple roots and multiplicities are
//! exact. Complex-coefficient inputs are solved directly and close
//! clusters are merged into multiple roots.

use super::{Tolerances, VerifyError};
use crate::algebra::{yun_squarefree, Poly};
use crate::ring::{rat_to_f64, Rat};
use num::complex::Complex64;

/// A root approximation with an evaluated residual certificate.
#[derive(Clone, Debug)]
pub struct CertifiedRoot {
    pub value: Complex64,
    /// Upper bound on |p(value)| including evaluation rounding.
    pub residual_bound: f64,
    pub multiplicity: usize,
}

/// Lexicographic order on (re, im); used everywhere node determinism
/// matters.
pub fn lex_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in c.iter().rev() {
        acc = acc * z + k;
    }
    acc
}

fn horner_d(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for k in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + k;
    }
    (p, dp)
}

/// Magnitude of the evaluated polynomial at `z`, in the scale used for
/// relative residuals: sum_i |c_i| |z|^i.
fn eval_scale(c: &[Complex64], z: Complex64) -> f64 {
    let az = z.norm();
    let mut s = 0.0;
    let mut pw = 1.0;
    for k in c {
        s += k.norm() * pw;
        pw *= az;
    }
    s.max(f64::MIN_POSITIVE)
}

fn trim(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |x| x.norm() == 0.0) {
        c.pop();
    }
    c
}

/// Aberth–Ehrlich iteration; returns one approximation per root of a
/// polynomial assumed square-free (clusters are still tolerated and
/// handled by the caller).
fn aberth(coeffs: &[Complex64], tol: &Tolerances) -> Result<Vec<Complex64>, VerifyError> {
    let c = trim(coeffs);
    let n = c.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }
    // Cauchy-style inclusion radius
    let lead = c[n].norm();
    let mut radius: f64 = 0.0;
    for k in &c[..n] {
        radius = radius.max((k.norm() / lead).powf(1.0 / (n as f64)));
    }
    radius = 1.0 + 2.0 * radius;
    // deterministic, symmetry-breaking starting circle
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.3847;
            let r = radius * (0.85 + 0.1 * ((k as f64) / (n as f64)));
            Complex64::from_polar(r, theta)
        })
        .collect();
    let mut converged = false;
    for _ in 0..tol.max_iterations {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner_d(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() == 0.0 {
                // derivative vanished: nudge off the symmetric point
                Complex64::new(1e-8, 1e-8)
            } else {
                p / dp
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-300 {
                        s += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * s;
            let w = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            z[i] -= w;
            let rel = w.norm() / (1.0 + z[i].norm());
            max_step = max_step.max(rel);
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = horner_d(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if step.norm() > 1.0 + zi.norm() {
                break;
            }
            *zi -= step;
        }
    }
    let _ = converged;
    Ok(z)
}

fn residual_bound(c: &[Complex64], z: Complex64) -> f64 {
    let n = c.len();
    let p = horner(c, z).norm();
    // rounding bound for Horner evaluation: ~2n eps per term scale
    p + 2.0 * (n as f64) * f64::EPSILON * eval_scale(c, z)
}

/// Certified roots of a complex-coefficient polynomial. Close
/// approximations are merged into clusters whose size is reported as
/// the multiplicity.
pub fn certified_roots_complex(
    coeffs: &[Complex64],
    tol: &Tolerances,
) -> Result<Vec<CertifiedRoot>, VerifyError> {
    let c = trim(coeffs);
    assert!(c.len() >= 2, "roots of a constant requested");
    let approx = aberth(&c, tol)?;
    // cluster merge
    let mut zs = approx;
    zs.sort_by(lex_cmp);
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    'outer: for z in zs {
        for (center, count) in clusters.iter_mut() {
            let scale = 1.0 + center.norm();
            if (z - *center).norm() < 1e-6 * scale {
                // running mean keeps the cluster centroid stable
                let k = *count as f64;
                *center = (*center * k + z) / (k + 1.0);
                *count += 1;
                continue 'outer;
            }
        }
        clusters.push((z, 1));
    }
    let mut out = Vec::with_capacity(clusters.len());
    for (z, mult) in clusters {
        let rb = residual_bound(&c, z);
        let rel = rb / eval_scale(&c, z);
        // multiple roots flatten the residual floor: allow eps^(m/(m+1))-ish
        let target = if mult == 1 {
            tol.root_residual
        } else {
            tol.root_residual.powf(mult as f64 / (mult as f64 + 1.0))
        };
        if rel > target {
            return Err(VerifyError::NonConvergence {
                residual: rel,
                target,
            });
        }
        out.push(CertifiedRoot {
            value: z,
            residual_bound: rb,
            multiplicity: mult,
        });
    }
    out.sort_by(|a, b| lex_cmp(&a.value, &b.value));
    Ok(out)
}

/// Certified roots of an exact rational polynomial: Yun's square-free
/// decomposition gives exact multiplicities, and each square-free factor
/// is solved with simple roots only.
pub fn certified_roots_rat(
    p: &Poly<Rat>,
    tol: &Tolerances,
) -> Result<Vec<CertifiedRoot>, VerifyError> {
    assert!(p.deg() >= 1, "roots of a constant requested");
    let full: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|c| Complex64::new(rat_to_f64(c), 0.0))
        .collect();
    let mut out = Vec::new();
    for (factor, mult) in yun_squarefree(p) {
        let fc: Vec<Complex64> = factor
            .coeffs()
            .iter()
            .map(|c| Complex64::new(rat_to_f64(c), 0.0))
            .collect();
        let roots = aberth(&fc, tol)?;
        for z in roots {
            let rb = residual_bound(&fc, z);
            let rel = rb / eval_scale(&fc, z);
            if rel > tol.root_residual {
                return Err(VerifyError::NonConvergence {
                    residual: rel,
                    target: tol.root_residual,
                });
            }
            out.push(CertifiedRoot {
                value: z,
                // certificate is against the original polynomial
                residual_bound: residual_bound(&full, z),
                multiplicity: mult,
            });
        }
    }
    out.sort_by(|a, b| lex_cmp(&a.value, &b.value));
    debug_assert_eq!(out.iter().map(|r| r.multiplicity).sum::<usize>(), p.deg());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rint;

    fn p(v: &[i64]) -> Poly<Rat> {
        Poly::from_coeffs(v.iter().map(|&n| rint(n)).collect())
    }

    #[test]
    fn sqrt_two() {
        let roots = certified_roots_rat(&p(&[-2, 0, 1]), &Tolerances::default()).unwrap();
        assert_eq!(roots.len(), 2);
        let s = 2f64.sqrt();
        assert!((roots[0].value - Complex64::new(-s, 0.0)).norm() < 1e-12);
        assert!((roots[1].value - Complex64::new(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pure_imaginary_pair() {
        let roots = certified_roots_rat(&p(&[1, 0, 1]), &Tolerances::default()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].value - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1].value - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_root_multiplicity() {
        // (x-1)^3
        let f = p(&[-1, 1]).pow(3);
        let roots = certified_roots_rat(&f, &Tolerances::default()).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 3);
        assert!((roots[0].value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degree_twenty_roots_of_unity() {
        // x^20 - 1: all roots on the unit circle
        let mut v = vec![0i64; 21];
        v[0] = -1;
        v[20] = 1;
        let roots = certified_roots_rat(&p(&v), &Tolerances::default()).unwrap();
        assert_eq!(roots.len(), 20);
        for r in &roots {
            assert!((r.value.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_coefficient_quadratic() {
        // (x - i)(x - 2) = x^2 - (2+i)x + 2i
        let c = vec![
            Complex64::new(0.0, 2.0),
            Complex64::new(-2.0, -1.0),
            Complex64::new(1.0, 0.0),
        ];
        let roots = certified_roots_complex(&c, &Tolerances::default()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots
            .iter()
            .any(|r| (r.value - Complex64::new(0.0, 1.0)).norm() < 1e-10));
        assert!(roots
            .iter()
            .any(|r| (r.value - Complex64::new(2.0, 0.0)).norm() < 1e-10));
    }
}
