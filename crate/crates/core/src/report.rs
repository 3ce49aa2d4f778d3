//! Shared JSON formats: map literals, orbit/PCF reports, witness
//! certificates and APF certificates.

use crate::algebra::{AlgebraError, Poly, ProjPoint, RationalMap};
use crate::apf::{ApfCertificate, CertLevel};
use crate::dynamics::{CritLocus, OrbitOutcome, PcfReport, PcfVerdict};
use crate::ring::{parse_rat, rat_to_string, Rat};
use crate::verify::{NodeValue, PreimageTree, UnityWitness};
use serde::{Deserialize, Serialize};

/// The shared map literal: coefficient strings, constant term first,
/// rationals as "p/q".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapLiteral {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

impl MapLiteral {
    pub fn parse(&self) -> Result<RationalMap<Rat>, String> {
        let parse_poly = |v: &[String]| -> Result<Poly<Rat>, String> {
            let coeffs: Result<Vec<Rat>, String> = v
                .iter()
                .map(|s| parse_rat(s).ok_or_else(|| format!("bad rational literal: {:?}", s)))
                .collect();
            Ok(Poly::from_coeffs(coeffs?))
        };
        let num = parse_poly(&self.num)?;
        let den = parse_poly(&self.den)?;
        RationalMap::new(num, den).map_err(|e: AlgebraError| e.to_string())
    }

    pub fn from_map(phi: &RationalMap<Rat>) -> Self {
        MapLiteral {
            num: phi.num().coeffs().iter().map(rat_to_string).collect(),
            den: phi.den().coeffs().iter().map(rat_to_string).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitJson {
    pub point: String,
    pub multiplicity: usize,
    pub outcome: String,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
    pub orbit: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PcfJson {
    pub verdict: String,
    pub bound: usize,
    pub height_bound: String,
    pub orbits: Vec<OrbitJson>,
}

pub fn pcf_to_json(rep: &PcfReport) -> PcfJson {
    let orbits = rep
        .orbits
        .iter()
        .map(|o| {
            let point = match &o.locus {
                CritLocus::Infinity => "inf".to_string(),
                CritLocus::Rational(r) => rat_to_string(r),
                CritLocus::Quadratic { disc, point } => format!(
                    "{} + {}*sqrt({})",
                    rat_to_string(point.rational_part()),
                    rat_to_string(point.radical_part()),
                    rat_to_string(disc)
                ),
            };
            let (outcome, preperiod, period) = match o.outcome {
                OrbitOutcome::Periodic { preperiod, period } => {
                    ("periodic".to_string(), Some(preperiod), Some(period))
                }
                OrbitOutcome::Escaped { steps } => {
                    (format!("escaped at step {}", steps), None, None)
                }
            };
            OrbitJson {
                point,
                multiplicity: o.multiplicity,
                outcome,
                preperiod,
                period,
                orbit: o.orbit.clone(),
            }
        })
        .collect();
    PcfJson {
        verdict: match rep.verdict {
            PcfVerdict::Pcf => "PCF".to_string(),
            PcfVerdict::NotPcfWithin(n) => format!("NotPCFWithin({})", n),
        },
        bound: rep.bound,
        height_bound: rep.height_bound.to_string(),
        orbits,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeNodeJson {
    pub re: f64,
    pub im: f64,
    pub infinite: bool,
    pub multiplicity: usize,
    pub parent: Option<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeRefJson {
    pub level: usize,
    pub index: usize,
}

/// A replayable witness certificate: the expression (a quotient of two
/// node products), the tree approximations it references, and the
/// numeric error against the nearest primitive root.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessJson {
    pub m: usize,
    pub j: usize,
    pub r: usize,
    pub level: usize,
    pub level_bound_rj: usize,
    pub numerator: Vec<NodeRefJson>,
    pub denominator: Vec<NodeRefJson>,
    pub value_re: f64,
    pub value_im: f64,
    pub nearest_primitive_index: u64,
    pub numeric_error: f64,
    pub tree: Vec<Vec<TreeNodeJson>>,
}

pub fn witness_to_json(w: &UnityWitness) -> WitnessJson {
    WitnessJson {
        m: w.m,
        j: w.j,
        r: w.r,
        level: w.level,
        level_bound_rj: w.r * w.j,
        numerator: w
            .expr
            .numerator
            .iter()
            .map(|n| NodeRefJson {
                level: n.level,
                index: n.index,
            })
            .collect(),
        denominator: w
            .expr
            .denominator
            .iter()
            .map(|n| NodeRefJson {
                level: n.level,
                index: n.index,
            })
            .collect(),
        value_re: w.value.re,
        value_im: w.value.im,
        nearest_primitive_index: w.nearest_index,
        numeric_error: w.numeric_error,
        tree: tree_to_json(&w.tree),
    }
}

pub fn tree_to_json(tree: &PreimageTree) -> Vec<Vec<TreeNodeJson>> {
    tree.levels
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|n| match n.value {
                    NodeValue::Finite(z) => TreeNodeJson {
                        re: z.re,
                        im: z.im,
                        infinite: false,
                        multiplicity: n.multiplicity,
                        parent: n.parent,
                        residual: n.residual,
                    },
                    NodeValue::Infinity => TreeNodeJson {
                        re: 0.0,
                        im: 0.0,
                        infinite: true,
                        multiplicity: n.multiplicity,
                        parent: n.parent,
                        residual: n.residual,
                    },
                })
                .collect()
        })
        .collect()
}

/// Independent re-evaluation of a serialized witness: multiplies the
/// referenced approximations and measures the distance to the claimed
/// primitive root of unity.
pub fn replay_witness_json(w: &WitnessJson) -> Result<f64, String> {
    use num::complex::Complex64;
    let lookup = |r: &NodeRefJson| -> Result<Complex64, String> {
        let level = w
            .tree
            .get(r.level - 1)
            .ok_or_else(|| "level out of range".to_string())?;
        let node = level
            .get(r.index)
            .ok_or_else(|| "index out of range".to_string())?;
        if node.infinite {
            return Err("witness references an infinite node".into());
        }
        Ok(Complex64::new(node.re, node.im))
    };
    let mut num = Complex64::new(1.0, 0.0);
    for r in &w.numerator {
        num *= lookup(r)?;
    }
    let mut den = Complex64::new(1.0, 0.0);
    for r in &w.denominator {
        den *= lookup(r)?;
    }
    if den.norm() == 0.0 {
        return Err("denominator product vanished".into());
    }
    let value = num / den;
    let order = (w.m as u64).pow(w.j as u32) as f64;
    let target = Complex64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI * (w.nearest_primitive_index as f64) / order,
    );
    Ok((value - target).norm())
}

#[derive(Clone, Debug, Serialize)]
pub struct CertLevelJson {
    pub n: usize,
    pub qn: usize,
    pub coeff_vals: Vec<Option<String>>,
    pub slope: String,
    pub polygon_single_segment: bool,
    pub norm_ok: bool,
    pub norm_resultant_ok: bool,
    pub replayed: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApfCertificateJson {
    pub p: u64,
    pub m: usize,
    pub r: u32,
    pub c: u64,
    pub gamma: String,
    pub delta: String,
    pub u: String,
    pub u_is_one: bool,
    pub levels: Vec<CertLevelJson>,
    pub epsilon: Option<String>,
    pub coeffs_n_independent: bool,
    pub basepoint: String,
    pub verdict: String,
}

pub fn certificate_to_json(cert: &ApfCertificate) -> ApfCertificateJson {
    let fmt_level = |l: &CertLevel| CertLevelJson {
        n: l.n,
        qn: l.qn,
        coeff_vals: l
            .coeff_vals
            .iter()
            .map(|v| v.map(|x| x.to_string()))
            .collect(),
        slope: l.slope.clone(),
        polygon_single_segment: l.polygon_single_segment,
        norm_ok: l.norm_ok,
        norm_resultant_ok: l.norm_resultant_ok,
        replayed: l.replayed,
    };
    ApfCertificateJson {
        p: cert.p,
        m: cert.m,
        r: cert.r,
        c: cert.c,
        gamma: cert.gamma.clone(),
        delta: cert.delta.clone(),
        u: cert.u.clone(),
        u_is_one: cert.u_is_one,
        levels: cert.levels.iter().map(fmt_level).collect(),
        epsilon: cert.epsilon.map(|e| e.to_string()),
        coeffs_n_independent: cert.coeffs_n_independent,
        basepoint: cert.basepoint.clone(),
        verdict: cert.verdict.clone(),
    }
}

pub fn proj_point_to_string(p: &ProjPoint<Rat>) -> String {
    match p {
        ProjPoint::Infinity => "inf".into(),
        ProjPoint::Finite(v) => rat_to_string(v),
    }
}

/// Parses "inf" or a rational literal.
pub fn parse_proj_point(s: &str) -> Option<ProjPoint<Rat>> {
    let t = s.trim();
    if t == "inf" || t == "infinity" || t == "oo" {
        Some(ProjPoint::Infinity)
    } else {
        parse_rat(t).map(ProjPoint::Finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_literal_round_trip() {
        let lit = MapLiteral {
            num: vec!["2".into(), "0".into(), "-1".into()],
            den: vec!["1".into()],
        };
        let phi = lit.parse().unwrap();
        assert_eq!(phi.degree(), 2);
        let back = MapLiteral::from_map(&phi);
        assert_eq!(back.num, vec!["2", "0", "-1"]);
        assert_eq!(back.den, vec!["1"]);
    }

    #[test]
    fn literal_with_fractions_normalizes() {
        let lit = MapLiteral {
            num: vec!["1/2".into(), "0".into(), "1/2".into()],
            den: vec!["1".into()],
        };
        let phi = lit.parse().unwrap();
        // (x^2+1)/2 canonically
        assert_eq!(MapLiteral::from_map(&phi).den, vec!["2"]);
    }

    #[test]
    fn witness_replay_from_json() {
        use crate::algebra::map_from_ints;
        use crate::verify::{witness_root_of_unity, Tolerances};
        let phi = map_from_ints(&[-1, 0, 1], &[1]).unwrap();
        let w = witness_root_of_unity(&phi, &crate::ring::rint(3), 2, 2, &Tolerances::default())
            .unwrap();
        let json = witness_to_json(&w);
        let err = replay_witness_json(&json).unwrap();
        assert!(err < 1e-9);
        // serialization stays machine-checkable end to end
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"level\""));
    }
}
