//! Explicit root-of-unity witnesses over preimage trees.
//!
//! For a map fixing 0 and ∞ whose r-th iterate lies in K(x^m), a
//! primitive m-th root of unity is the quotient of two first-level
//! preimages (ζα and α), and an m-th root of any witnessed quantity is
//! obtained by replacing every node by a product of ζ_m-orbit
//! representatives over its fiber. Iterating builds a primitive
//! m^j-th root witness from nodes at iterate-depth j, i.e. at most
//! r·j steps of the original map.

use super::preimage::{preimage_tree, NodeValue, PreimageTree};
use super::roots::lex_cmp;
use super::{Tolerances, VerifyError};
use crate::algebra::{ProjPoint, RationalMap, DEFAULT_DIGIT_BOUND};
use crate::dynamics::{detect_period, is_exceptional, OrbitLimits, OrbitOutcome};
use crate::ring::{rat_to_f64, Rat};
use num::complex::Complex64;

/// Reference to a tree node: 1-based iterate level and index within the
/// sorted level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRef {
    pub level: usize,
    pub index: usize,
}

/// A witness expression: a quotient of two equal-length products of
/// tree nodes. Every witness this module produces has this shape.
#[derive(Clone, Debug)]
pub struct WitnessExpr {
    pub numerator: Vec<NodeRef>,
    pub denominator: Vec<NodeRef>,
}

impl WitnessExpr {
    pub fn eval(&self, tree: &PreimageTree) -> Complex64 {
        let prod = |refs: &[NodeRef]| -> Complex64 {
            refs.iter()
                .map(|r| {
                    tree.level(r.level)[r.index]
                        .value
                        .finite()
                        .expect("witness nodes are finite")
                })
                .product()
        };
        prod(&self.numerator) / prod(&self.denominator)
    }
}

#[derive(Clone, Debug)]
pub struct UnityWitness {
    pub m: usize,
    pub j: usize,
    /// lcm of the periods of 0 and ∞ under the original map.
    pub r: usize,
    /// Depth of the witness in steps of the original map: r·j.
    pub level: usize,
    pub expr: WitnessExpr,
    pub value: Complex64,
    /// Index k (coprime to m) with value ≈ exp(2πik / m^j).
    pub nearest_index: u64,
    /// Distance from the evaluated expression to that root of unity.
    pub numeric_error: f64,
    /// The iterate preimage tree the expression references.
    pub tree: PreimageTree,
}

/// Builds a replayable witness that a primitive m^j-th root of unity
/// lies in the field generated by the depth-(r·j) preimages of `b`.
pub fn witness_root_of_unity(
    phi: &RationalMap<Rat>,
    b: &Rat,
    m: usize,
    j: usize,
    tol: &Tolerances,
) -> Result<UnityWitness, VerifyError> {
    if m < 2 {
        return Err(VerifyError::HypothesisFailure(
            "m must be at least 2".into(),
        ));
    }
    if j < 1 {
        return Err(VerifyError::HypothesisFailure(
            "j must be at least 1".into(),
        ));
    }
    phi.require_degree(2)
        .map_err(crate::dynamics::DynamicsError::from)?;
    if phi.power_composite_order() % m != 0 {
        return Err(VerifyError::HypothesisFailure(format!(
            "map is not in K(x^{}) (power-composite order {})",
            m,
            phi.power_composite_order()
        )));
    }
    // 0 and ∞ must be genuinely periodic
    let limits = OrbitLimits::for_inputs(64, &[]);
    let r0 = match detect_period(phi, ProjPoint::Finite(num::traits::Zero::zero()), &limits).outcome
    {
        OrbitOutcome::Periodic {
            preperiod: 0,
            period,
        } => period,
        _ => {
            return Err(VerifyError::HypothesisFailure(
                "0 is not periodic under the map".into(),
            ))
        }
    };
    let rinf = match detect_period(phi, ProjPoint::<Rat>::Infinity, &limits).outcome {
        OrbitOutcome::Periodic {
            preperiod: 0,
            period,
        } => period,
        _ => {
            return Err(VerifyError::HypothesisFailure(
                "∞ is not periodic under the map".into(),
            ))
        }
    };
    let r = lcm(r0, rinf);
    if is_exceptional(phi, &ProjPoint::Finite(b.clone()))? {
        return Err(VerifyError::HypothesisFailure(
            "basepoint is exceptional".into(),
        ));
    }

    // the iterate satisfies the direct hypotheses: fixes 0 and ∞
    let big = phi.iterate(r, DEFAULT_DIGIT_BOUND)?;
    let d = big.degree();
    assert!(
        big.num().coeff(0).eq(&num::traits::Zero::zero()),
        "iterate fixes 0"
    );
    assert!(big.num().deg() > big.den().deg(), "iterate fixes ∞");
    assert_eq!(big.power_composite_order() % m, 0);

    let bc = Complex64::new(rat_to_f64(b), 0.0);
    let tree = preimage_tree(&big, NodeValue::Finite(bc), j, tol)?;
    let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / (m as f64));

    // level 1: pick α (lex-first node of modulus > threshold) and match ζα
    let level1 = tree.level(1);
    if level1.iter().any(|n| n.multiplicity > 1) {
        return Err(VerifyError::HypothesisFailure(
            "fiber has multiple roots; choose a generic basepoint".into(),
        ));
    }
    let alpha_idx = level1
        .iter()
        .position(|n| n.value.finite().map_or(false, |z| z.norm() > 1e-9))
        .ok_or_else(|| VerifyError::HypothesisFailure("no nonzero first preimage".into()))?;
    let alpha = level1[alpha_idx].value.finite().unwrap();
    let target = zeta * alpha;
    let zeta_alpha_idx = nearest_node(level1, target, tol, "ζ·α is a sibling preimage")?;
    let mut num_refs = vec![NodeRef {
        level: 1,
        index: zeta_alpha_idx,
    }];
    let mut den_refs = vec![NodeRef {
        level: 1,
        index: alpha_idx,
    }];

    // deepen: replace each node by the product of ζ_m-orbit
    // representatives of its fiber
    for lvl in 2..=j {
        num_refs = expand_refs(&tree, &num_refs, lvl, m, zeta, tol)?;
        den_refs = expand_refs(&tree, &den_refs, lvl, m, zeta, tol)?;
        debug_assert_eq!(num_refs.len(), den_refs.len());
        debug_assert_eq!(num_refs.len(), (d / m).pow((lvl - 1) as u32));
    }

    let expr = WitnessExpr {
        numerator: num_refs,
        denominator: den_refs,
    };
    let value = expr.eval(&tree);

    // nearest primitive m^j-th root of unity
    let order = (m as u64).pow(j as u32);
    let mut best: Option<(u64, f64)> = None;
    for k in 0..order {
        if gcd_u64(k, m as u64) != 1 {
            continue;
        }
        let root = Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * (k as f64) / (order as f64),
        );
        let dist = (value - root).norm();
        if best.map_or(true, |(_, bd)| dist < bd) {
            best = Some((k, dist));
        }
    }
    let (nearest_index, numeric_error) = best.expect("primitive roots exist");
    if numeric_error > tol.witness {
        return Err(VerifyError::ToleranceExceeded {
            check: format!("witness distance to primitive {}^{} root", m, j),
            value: numeric_error,
            tol: tol.witness,
        });
    }

    Ok(UnityWitness {
        m,
        j,
        r,
        level: r * j,
        expr,
        value,
        nearest_index,
        numeric_error,
        tree,
    })
}

fn expand_refs(
    tree: &PreimageTree,
    refs: &[NodeRef],
    child_level: usize,
    m: usize,
    zeta: Complex64,
    tol: &Tolerances,
) -> Result<Vec<NodeRef>, VerifyError> {
    let mut out = Vec::new();
    for r in refs {
        debug_assert_eq!(r.level, child_level - 1);
        let child_idx = tree.children(child_level - 1, r.index);
        let children = tree.level(child_level);
        if child_idx
            .iter()
            .any(|&i| children[i].multiplicity > 1 || children[i].value.finite().is_none())
        {
            return Err(VerifyError::HypothesisFailure(
                "fiber has multiple or infinite nodes".into(),
            ));
        }
        // ζ_m-orbit representatives among this fiber, lex-deterministic
        let mut rest: Vec<usize> = child_idx.clone();
        rest.sort_by(|&a, &b| {
            lex_cmp(
                &children[a].value.finite().unwrap(),
                &children[b].value.finite().unwrap(),
            )
        });
        let mut assigned = vec![false; rest.len()];
        for i in 0..rest.len() {
            if assigned[i] {
                continue;
            }
            assigned[i] = true;
            out.push(NodeRef {
                level: child_level,
                index: rest[i],
            });
            // mark the rest of the orbit
            let mut cur = children[rest[i]].value.finite().unwrap();
            for _ in 1..m {
                cur = zeta * cur;
                let mut best: Option<(usize, f64)> = None;
                for (k, &ci) in rest.iter().enumerate() {
                    if assigned[k] {
                        continue;
                    }
                    let dist = (children[ci].value.finite().unwrap() - cur).norm();
                    if best.map_or(true, |(_, bd)| dist < bd) {
                        best = Some((k, dist));
                    }
                }
                let (k, dist) = best.ok_or_else(|| VerifyError::ToleranceExceeded {
                    check: "fiber orbit partition".into(),
                    value: f64::INFINITY,
                    tol: tol.check,
                })?;
                if dist > tol.check * (1.0 + cur.norm()) {
                    return Err(VerifyError::ToleranceExceeded {
                        check: "fiber orbit closure".into(),
                        value: dist,
                        tol: tol.check * (1.0 + cur.norm()),
                    });
                }
                assigned[k] = true;
            }
        }
    }
    Ok(out)
}

fn nearest_node(
    level: &[super::preimage::TreeNode],
    target: Complex64,
    tol: &Tolerances,
    what: &str,
) -> Result<usize, VerifyError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, n) in level.iter().enumerate() {
        if let Some(z) = n.value.finite() {
            let dist = (z - target).norm();
            if best.map_or(true, |(_, bd)| dist < bd) {
                best = Some((i, dist));
            }
        }
    }
    match best {
        Some((i, dist)) if dist <= tol.check * (1.0 + target.norm()) => Ok(i),
        _ => Err(VerifyError::HypothesisFailure(what.into())),
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd_u64(a as u64, b as u64) as usize * b
}
