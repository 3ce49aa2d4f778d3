//! Certified preimage trees: levelled sets of numeric solutions of
//! phi^k(x) = b with parent links and residual bookkeeping.

use super::roots::{certified_roots_complex, lex_cmp};
use super::{Tolerances, VerifyError};
use crate::algebra::{Poly, RationalMap};
use crate::ring::{rat_to_f64, Rat};
use num::complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeValue {
    Finite(Complex64),
    Infinity,
}

impl NodeValue {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            NodeValue::Finite(z) => Some(*z),
            NodeValue::Infinity => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub value: NodeValue,
    /// |h(value)| bound from the root certificate (0 for structural
    /// infinity nodes).
    pub residual: f64,
    pub multiplicity: usize,
    /// Index into the previous level; `None` at level 1 (parent is the
    /// basepoint).
    pub parent: Option<usize>,
    /// |phi(value) - parent| measured numerically after the solve.
    pub forward_residual: f64,
}

/// Levelled backward orbit of a basepoint under a fixed map.
#[derive(Clone, Debug)]
pub struct PreimageTree {
    pub base: NodeValue,
    /// `levels[k]` holds the nodes of phi^{-(k+1)}(b), sorted
    /// lexicographically by (re, im) with infinity last.
    pub levels: Vec<Vec<TreeNode>>,
    num_c: Vec<Complex64>,
    den_c: Vec<Complex64>,
    degree: usize,
}

impl PreimageTree {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nodes at a 1-based level.
    pub fn level(&self, k: usize) -> &[TreeNode] {
        &self.levels[k - 1]
    }

    /// Children (at level k+1) of node `idx` at level k (0 = basepoint).
    pub fn children(&self, level: usize, idx: usize) -> Vec<usize> {
        if level >= self.levels.len() {
            return vec![];
        }
        self.levels[level]
            .iter()
            .enumerate()
            .filter(|(_, n)| n.parent == Some(idx) || (level == 0 && n.parent.is_none()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Numeric evaluation of the map at a complex point.
    pub fn eval_map(&self, z: Complex64) -> NodeValue {
        let n = horner(&self.num_c, z);
        let d = horner(&self.den_c, z);
        if d.norm() == 0.0 {
            NodeValue::Infinity
        } else {
            NodeValue::Finite(n / d)
        }
    }

    /// Total multiplicity at a level (must equal degree^level).
    pub fn level_mass(&self, k: usize) -> usize {
        self.level(k).iter().map(|n| n.multiplicity).sum()
    }
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in c.iter().rev() {
        acc = acc * z + k;
    }
    acc
}

fn to_complex(p: &Poly<Rat>) -> Vec<Complex64> {
    p.coeffs()
        .iter()
        .map(|c| Complex64::new(rat_to_f64(c), 0.0))
        .collect()
}

/// Expands the certified preimage tree of `b` to the requested depth.
///
/// Fibers over a node α are the roots of f - α g; when that polynomial
/// drops degree (α is the ratio of leading coefficients) the missing
/// mass is recorded as an explicit infinity node.
pub fn preimage_tree(
    phi: &RationalMap<Rat>,
    b: NodeValue,
    depth: usize,
    tol: &Tolerances,
) -> Result<PreimageTree, VerifyError> {
    phi.require_degree(2)
        .map_err(crate::dynamics::DynamicsError::from)?;
    assert!(depth >= 1, "depth must be at least 1");
    let num_c = to_complex(phi.num());
    let den_c = to_complex(phi.den());
    let d = phi.degree();
    let mut tree = PreimageTree {
        base: b,
        levels: Vec::with_capacity(depth),
        num_c,
        den_c,
        degree: d,
    };
    let mut frontier: Vec<(Option<usize>, NodeValue, usize)> = vec![(None, b, 1)];
    for _level in 0..depth {
        let mut nodes: Vec<TreeNode> = Vec::new();
        for (idx, (_, value, mult)) in frontier.iter().enumerate() {
            let parent = if _level == 0 { None } else { Some(idx) };
            expand_fiber(&tree, *value, *mult, parent, tol, &mut nodes)?;
        }
        // deterministic order: finite nodes lex by (re, im), infinity last
        nodes.sort_by(|a, b| match (&a.value, &b.value) {
            (NodeValue::Infinity, NodeValue::Infinity) => std::cmp::Ordering::Equal,
            (NodeValue::Infinity, _) => std::cmp::Ordering::Greater,
            (_, NodeValue::Infinity) => std::cmp::Ordering::Less,
            (NodeValue::Finite(x), NodeValue::Finite(y)) => lex_cmp(x, y),
        });
        let mass: usize = nodes.iter().map(|n| n.multiplicity).sum();
        if mass != d * frontier.iter().map(|f| f.2).sum::<usize>() {
            return Err(VerifyError::DegenerateFiber(format!(
                "level mass {} does not match degree count",
                mass
            )));
        }
        frontier = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (Some(i), n.value, n.multiplicity))
            .collect();
        tree.levels.push(nodes);
    }
    Ok(tree)
}

fn expand_fiber(
    tree: &PreimageTree,
    alpha: NodeValue,
    parent_mult: usize,
    parent: Option<usize>,
    tol: &Tolerances,
    out: &mut Vec<TreeNode>,
) -> Result<(), VerifyError> {
    let d = tree.degree;
    match alpha {
        NodeValue::Infinity => {
            // preimages of infinity: zeros of the denominator, plus
            // infinity itself when deg num > deg den
            let mut h = tree.den_c.clone();
            while h.last().map_or(false, |x| x.norm() == 0.0) {
                h.pop();
            }
            let finite_deg = h.len().saturating_sub(1);
            if finite_deg > 0 {
                for r in certified_roots_complex(&h, tol)? {
                    let fwd = 0.0; // pole: forward value is infinity by construction
                    out.push(TreeNode {
                        value: NodeValue::Finite(r.value),
                        residual: r.residual_bound,
                        multiplicity: r.multiplicity * parent_mult,
                        parent,
                        forward_residual: fwd,
                    });
                }
            }
            if d > finite_deg {
                out.push(TreeNode {
                    value: NodeValue::Infinity,
                    residual: 0.0,
                    multiplicity: (d - finite_deg) * parent_mult,
                    parent,
                    forward_residual: 0.0,
                });
            }
            Ok(())
        }
        NodeValue::Finite(a) => {
            // h = num - a * den
            let n = tree.num_c.len().max(tree.den_c.len());
            let mut h: Vec<Complex64> = Vec::with_capacity(n);
            for i in 0..n {
                let nc = tree.num_c.get(i).copied().unwrap_or_default();
                let dc = tree.den_c.get(i).copied().unwrap_or_default();
                h.push(nc - a * dc);
            }
            // degree drop: α equal (numerically) to the leading ratio
            let scale: f64 = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
            while h
                .last()
                .map_or(false, |x| x.norm() <= 1e-13 * scale && h.len() > 1)
            {
                h.pop();
            }
            let finite_deg = h.len() - 1;
            if finite_deg == 0 {
                return Err(VerifyError::DegenerateFiber(
                    "fiber polynomial collapsed to a constant".into(),
                ));
            }
            for r in certified_roots_complex(&h, tol)? {
                let fwd = match tree.eval_map(r.value) {
                    NodeValue::Finite(w) => (w - a).norm(),
                    NodeValue::Infinity => f64::INFINITY,
                };
                if !fwd.is_finite() || fwd > tol.check * (1.0 + a.norm()) {
                    return Err(VerifyError::ToleranceExceeded {
                        check: "preimage forward residual".into(),
                        value: fwd,
                        tol: tol.check * (1.0 + a.norm()),
                    });
                }
                out.push(TreeNode {
                    value: NodeValue::Finite(r.value),
                    residual: r.residual_bound,
                    multiplicity: r.multiplicity * parent_mult,
                    parent,
                    forward_residual: fwd,
                });
            }
            if finite_deg < d {
                out.push(TreeNode {
                    value: NodeValue::Infinity,
                    residual: 0.0,
                    multiplicity: (d - finite_deg) * parent_mult,
                    parent,
                    forward_residual: 0.0,
                });
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::map_from_ints;

    #[test]
    fn fourth_roots_of_unity() {
        let phi = map_from_ints(&[0, 0, 1], &[1]).unwrap(); // x^2
        let t = preimage_tree(
            &phi,
            NodeValue::Finite(Complex64::new(1.0, 0.0)),
            2,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(t.level(2).len(), 4);
        let expect = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
        ];
        for (node, e) in t.level(2).iter().zip(expect) {
            assert!((node.value.finite().unwrap() - e).norm() < 1e-10);
        }
    }

    #[test]
    fn simple_fiber_of_x2_minus_1() {
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let t = preimage_tree(
            &phi,
            NodeValue::Finite(Complex64::new(3.0, 0.0)),
            1,
            &Tolerances::default(),
        )
        .unwrap();
        let vals: Vec<Complex64> = t.level(1).iter().filter_map(|n| n.value.finite()).collect();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((vals[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degree_count_with_multiplicity() {
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let t = preimage_tree(
            &phi,
            NodeValue::Finite(Complex64::new(3.0, 0.0)),
            3,
            &Tolerances::default(),
        )
        .unwrap();
        for k in 1..=3 {
            assert_eq!(t.level_mass(k), 2usize.pow(k as u32));
        }
    }

    #[test]
    fn rational_map_with_infinity_nodes() {
        // phi = (x^2+1)/x: fiber over infinity is {0, infinity}
        let phi = map_from_ints(&[1, 0, 1], &[0, 1]).unwrap();
        let t = preimage_tree(&phi, NodeValue::Infinity, 1, &Tolerances::default()).unwrap();
        assert_eq!(t.level(1).len(), 2);
        assert!(t
            .level(1)
            .iter()
            .any(|n| matches!(n.value, NodeValue::Infinity)));
        assert!(t
            .level(1)
            .iter()
            .any(|n| n.value.finite().map_or(false, |z| z.norm() < 1e-12)));
    }

    #[test]
    fn forward_iteration_returns_to_base() {
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let t = preimage_tree(
            &phi,
            NodeValue::Finite(Complex64::new(3.0, 0.0)),
            3,
            &Tolerances::default(),
        )
        .unwrap();
        for node in t.level(3) {
            let mut z = node.value.finite().unwrap();
            for _ in 0..3 {
                z = match t.eval_map(z) {
                    NodeValue::Finite(w) => w,
                    NodeValue::Infinity => panic!("unexpected pole"),
                };
            }
            assert!((z - Complex64::new(3.0, 0.0)).norm() < 1e-7);
        }
    }
}
