//! Command-line surface: batch verification and certificate emission.
//!
//! Exit codes: 0 = all checks pass, 1 = a mathematical check failed
//! (the report names it), 2 = usage or input error.

use clap::{Args, Parser, Subcommand};
use iterext::algebra::{RationalMap, DEFAULT_DIGIT_BOUND};
use iterext::apf::build_apf_tower;
use iterext::dynamics::{
    chebyshev, classify_pcf, is_exceptional, lattes_multiplication_map, trace_quotient_map,
    verify_semiconjugacy,
};
use iterext::padic::{cyclotomic_breaks, ramification_breaks, Elt, HerbrandFn, LocalField, Tower};
use iterext::report::{
    certificate_to_json, parse_proj_point, pcf_to_json, replay_witness_json, witness_to_json,
    MapLiteral,
};
use iterext::ring::Complex64;
use iterext::ring::{parse_rat, rat_to_f64, rat_to_string, rint, Rat};
use iterext::verify::{
    chebyshev_trace_witness, lattes_fiber_check, verify_power_structure, witness_root_of_unity,
    Tolerances,
};
use serde_json::{json, Value};
use std::io::Read;
use std::process::ExitCode;

/// Numeric policy shared by every subcommand.
#[derive(Args, Clone, Debug)]
struct RunConfig {
    /// Base p-adic precision (digits of p).
    #[arg(long, default_value_t = 60)]
    precision: i64,
    /// Tower depth / preimage depth. Defaults to 6 for towers with
    /// level degree p^r <= 8 and 3 for larger ones.
    #[arg(long)]
    depth: Option<usize>,
    /// Single scale knob multiplying every numeric tolerance, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    tolerance: f64,
    /// Orbit / iteration bound N.
    #[arg(long = "bound-n", default_value_t = 64)]
    bound_n: usize,
    /// Bound on the power-like search for iterates.
    #[arg(long = "m-max", default_value_t = 8)]
    m_max: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<String>,
}

impl RunConfig {
    fn validate(&self) -> Result<(), String> {
        if self.precision < 4 {
            return Err("precision must be at least 4".into());
        }
        if self.depth == Some(0) || self.bound_n == 0 || self.m_max == 0 {
            return Err("bounds must be positive".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1.0) {
            return Err("tolerance scale must lie in (0, 1]".into());
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances::scaled(self.tolerance)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "iterext",
    about = "Verification toolkit for iterated preimage fields and norm-compatible towers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical locus, PCF classification and exceptional-point report.
    Analyze {
        #[command(flatten)]
        config: RunConfig,
        /// Map literal file ('-' for stdin).
        #[arg(long)]
        map: String,
        /// Optional basepoint to test for exceptionality.
        #[arg(long)]
        base: Option<String>,
    },
    /// Orbit-partition product checks and root-of-unity witnesses.
    VerifyRoots {
        #[command(flatten)]
        config: RunConfig,
        #[arg(long)]
        map: String,
        /// Basepoint b (rational).
        #[arg(long)]
        base: String,
        /// Power-composite order m.
        #[arg(long)]
        m: usize,
        /// Witness depth j (targets a primitive m^j-th root).
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    /// Chebyshev identities and trace witnesses.
    Chebyshev {
        #[command(flatten)]
        config: RunConfig,
        /// Degree d.
        #[arg(long)]
        d: usize,
        /// Basepoint for the trace witness.
        #[arg(long, default_value = "1")]
        base: String,
        /// Trace witness depth n.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Lattès semiconjugacy and fiber checks.
    Lattes {
        #[command(flatten)]
        config: RunConfig,
        /// Curve coefficient a of y^2 = x^3 + ax + b.
        #[arg(long)]
        a: String,
        /// Curve coefficient b.
        #[arg(long)]
        b: String,
        /// Multiplication degree d (the map has degree d^2).
        #[arg(long)]
        d: usize,
        /// x-coordinate basepoint.
        #[arg(long, default_value = "2")]
        x0: String,
        /// Fiber depth n.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Ramification breaks and Herbrand data.
    Ramification {
        #[command(flatten)]
        config: RunConfig,
        /// Cyclotomic tower "p,n" (breaks of Q_p(ζ_{p^n})/Q_p).
        #[arg(long)]
        cyclotomic: Option<String>,
        /// Eisenstein polynomial over Q_p: comma-separated integer
        /// coefficients, constant first.
        #[arg(long)]
        eisenstein: Option<String>,
        /// Prime p (required with --eisenstein).
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Norm-compatible tower construction with an APF certificate.
    Apf {
        #[command(flatten)]
        config: RunConfig,
        #[arg(long)]
        map: String,
        /// Residue characteristic p.
        #[arg(long, default_value_t = 2)]
        prime: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("a mathematical check failed; see the report");
            ExitCode::from(1)
        }
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let (config, report, passed) = match cli.command {
        Command::Analyze { config, map, base } => {
            config.validate()?;
            let phi = load_map(&map)?;
            let (r, ok) = cmd_analyze(&phi, base.as_deref(), &config)?;
            (config, r, ok)
        }
        Command::VerifyRoots {
            config,
            map,
            base,
            m,
            j,
        } => {
            config.validate()?;
            let phi = load_map(&map)?;
            let b = parse_rat(&base).ok_or("bad --base rational")?;
            let (r, ok) = cmd_verify_roots(&phi, &b, m, j, &config);
            (config, r, ok)
        }
        Command::Chebyshev { config, d, base, n } => {
            config.validate()?;
            if d < 2 {
                return Err("--d must be at least 2".into());
            }
            let b = parse_rat(&base).ok_or("bad --base rational")?;
            let (r, ok) = cmd_chebyshev(d, &b, n, &config);
            (config, r, ok)
        }
        Command::Lattes {
            config,
            a,
            b,
            d,
            x0,
            n,
        } => {
            config.validate()?;
            let a = parse_rat(&a).ok_or("bad --a rational")?;
            let b = parse_rat(&b).ok_or("bad --b rational")?;
            let x0 = parse_rat(&x0).ok_or("bad --x0 rational")?;
            if d < 2 {
                return Err("--d must be at least 2".into());
            }
            let (r, ok) = cmd_lattes(&a, &b, d, &x0, n, &config)?;
            (config, r, ok)
        }
        Command::Ramification {
            config,
            cyclotomic,
            eisenstein,
            prime,
        } => {
            config.validate()?;
            let (r, ok) = match (cyclotomic, eisenstein) {
                (Some(spec), None) => cmd_ramification_cyclotomic(&spec, &config)?,
                (None, Some(coeffs)) => {
                    let p = prime.ok_or("--prime is required with --eisenstein")?;
                    cmd_ramification_eisenstein(&coeffs, p, &config)?
                }
                _ => return Err("pass exactly one of --cyclotomic or --eisenstein".into()),
            };
            (config, r, ok)
        }
        Command::Apf { config, map, prime } => {
            config.validate()?;
            let phi = load_map(&map)?;
            let (r, ok) = cmd_apf(&phi, prime, &config);
            (config, r, ok)
        }
    };
    emit(&config, &report)?;
    Ok(passed)
}

fn load_map(path: &str) -> Result<RationalMap<Rat>, String> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path, e))?
    };
    let lit: MapLiteral =
        serde_json::from_str(&text).map_err(|e| format!("bad map JSON: {}", e))?;
    lit.parse()
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn emit(config: &RunConfig, report: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    match &config.output {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| e.to_string()),
        None => {
            println!("{}", text);
            Ok(())
        }
    }
}

fn cmd_analyze(
    phi: &RationalMap<Rat>,
    base: Option<&str>,
    config: &RunConfig,
) -> Result<(Value, bool), String> {
    let pcf = classify_pcf(phi, config.bound_n).map_err(|e| e.to_string())?;
    let (crit, inf_mult) = phi.critical_polynomial();
    let exceptional = match base {
        Some(s) => {
            let b = parse_proj_point(s).ok_or("bad --base point")?;
            let v = is_exceptional(phi, &b).map_err(|e| e.to_string())?;
            Some(json!({
                "base": s,
                "exceptional": v,
            }))
        }
        None => None,
    };
    let report = json!({
        "timestamp": timestamp(),
        "command": "analyze",
        "map": MapLiteral::from_map(phi),
        "degree": phi.degree(),
        "critical_polynomial": crit.coeffs().iter().map(rat_to_string).collect::<Vec<_>>(),
        "infinity_critical_multiplicity": inf_mult,
        "pcf": serde_json::to_value(pcf_to_json(&pcf)).unwrap(),
        "exceptional": exceptional,
        "note": "PCF and exceptionality are desk-scale bounded checks, not decision procedures",
    });
    Ok((report, true))
}

fn cmd_verify_roots(
    phi: &RationalMap<Rat>,
    b: &Rat,
    m: usize,
    j: usize,
    config: &RunConfig,
) -> (Value, bool) {
    let tol = config.tolerances();
    let mut ok = true;
    let mut r_lcm = 1usize;
    let witness = match witness_root_of_unity(phi, b, m, j, &tol) {
        Ok(w) => {
            r_lcm = w.r;
            let wj = witness_to_json(&w);
            let replay = replay_witness_json(&wj).unwrap_or(f64::INFINITY);
            json!({
                "witness": serde_json::to_value(&wj).unwrap(),
                "replay_error": replay,
                "ok": replay < tol.witness * 10.0,
            })
        }
        Err(e) => {
            ok = false;
            json!({ "error": e.to_string() })
        }
    };
    let power = match phi.iterate(r_lcm, DEFAULT_DIGIT_BOUND) {
        Ok(big) => {
            match verify_power_structure(&big, Complex64::new(rat_to_f64(b), 0.0), m, &tol) {
                Ok(rep) => json!({
                    "m": rep.m,
                    "degree": rep.degree,
                    "orbit_sizes": rep.orbit_sizes,
                    "orbit_closure_error": rep.orbit_closure_error,
                    "full_product_error": rep.full_product_error,
                    "representative_power_error": rep.representative_power_error,
                }),
                Err(e) => {
                    ok = false;
                    json!({ "error": e.to_string() })
                }
            }
        }
        Err(e) => {
            ok = false;
            json!({ "error": e.to_string() })
        }
    };
    let report = json!({
        "timestamp": timestamp(),
        "command": "verify-roots",
        "map": MapLiteral::from_map(phi),
        "base": rat_to_string(b),
        "m": m,
        "j": j,
        "power_structure": power,
        "unity_witness": witness,
        "ok": ok,
    });
    (report, ok)
}

fn cmd_chebyshev(d: usize, b: &Rat, n: usize, config: &RunConfig) -> (Value, bool) {
    let tol = config.tolerances();
    let mut ok = true;
    let t_d = RationalMap::new(chebyshev(d), iterext::algebra::Poly::one()).unwrap();
    let v = trace_quotient_map();
    let power = RationalMap::new(
        iterext::algebra::Poly::monomial(rint(1), d),
        iterext::algebra::Poly::one(),
    )
    .unwrap();
    let semi = verify_semiconjugacy(&t_d, &v, &power);
    if !semi {
        ok = false;
    }
    let comp = if d * d <= 64 {
        let lhs = t_d.compose(&t_d).ok();
        let rhs = RationalMap::new(chebyshev(d * d), iterext::algebra::Poly::one()).ok();
        let good = lhs.is_some() && lhs == rhs;
        if !good {
            ok = false;
        }
        Some(good)
    } else {
        None
    };
    let trace = match chebyshev_trace_witness(d, Complex64::new(rat_to_f64(b), 0.0), n, &tol) {
        Ok(w) => json!({
            "d": w.d,
            "n": w.n,
            "gamma_re": w.gamma.re,
            "gamma_im": w.gamma.im,
            "value_re": w.value.re,
            "value_im": w.value.im,
            "expected_re": w.expected.re,
            "error": w.error,
        }),
        Err(e) => {
            ok = false;
            json!({ "error": e.to_string() })
        }
    };
    let report = json!({
        "timestamp": timestamp(),
        "command": "chebyshev",
        "d": d,
        "semiconjugate_to_power_map": semi,
        "composition_law_d_squared": comp,
        "trace_witness": trace,
        "ok": ok,
    });
    (report, ok)
}

fn cmd_lattes(
    a: &Rat,
    b: &Rat,
    d: usize,
    x0: &Rat,
    n: usize,
    config: &RunConfig,
) -> Result<(Value, bool), String> {
    let tol = config.tolerances();
    let mut ok = true;
    let phi = lattes_multiplication_map(a, b, d).map_err(|e| e.to_string())?;
    // the exact content of the commuting square on x-coordinates:
    // multiplication maps compose
    let comp = match (phi.compose(&phi), lattes_multiplication_map(a, b, d * d)) {
        (Ok(lhs), Ok(rhs)) => lhs == rhs,
        _ => false,
    };
    if !comp {
        ok = false;
    }
    let fiber = match lattes_fiber_check(a, b, d, x0, n, &tol) {
        Ok(r) => json!({
            "degree": r.degree,
            "depth": r.depth,
            "fiber_mass": r.fiber_mass,
            "max_match_distance": r.max_match_distance,
            "group_law_check_error": r.norm_check_error,
        }),
        Err(e) => {
            ok = false;
            json!({ "error": e.to_string() })
        }
    };
    let report = json!({
        "timestamp": timestamp(),
        "command": "lattes",
        "a": rat_to_string(a),
        "b": rat_to_string(b),
        "d": d,
        "degree": phi.degree(),
        "map": MapLiteral::from_map(&phi),
        "multiplication_composition_law": comp,
        "fiber_check": fiber,
        "ok": ok,
    });
    Ok((report, ok))
}

fn cmd_ramification_cyclotomic(spec: &str, config: &RunConfig) -> Result<(Value, bool), String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err("--cyclotomic expects \"p,n\"".into());
    }
    let p: u64 = parts[0].trim().parse().map_err(|_| "bad p")?;
    let n: u32 = parts[1].trim().parse().map_err(|_| "bad n")?;
    if ![2u64, 3, 5].contains(&p) || n == 0 || n > 3 {
        return Err("cyclotomic oracle supports p in {2,3,5}, 1 <= n <= 3".into());
    }
    let oracle = cyclotomic_breaks(p, n, config.precision).map_err(|e| e.to_string())?;
    let h = HerbrandFn::from_breaks(&oracle).map_err(|e| e.to_string())?;
    let upper = h.upper_breaks(&oracle);
    let report = json!({
        "timestamp": timestamp(),
        "command": "ramification",
        "tower": format!("Q_{}(zeta_{}^{})", p, p, n),
        "lower_breaks": oracle.breaks.iter().map(|(b, m)| json!({"break": b.to_string(), "multiplicity": m})).collect::<Vec<_>>(),
        "upper_breaks": upper.iter().map(|u| u.to_string()).collect::<Vec<_>>(),
        "herbrand_initial_slope": h.initial_slope().to_string(),
        "herbrand_concave": h.is_concave(),
        "ok": true,
    });
    Ok((report, true))
}

fn cmd_ramification_eisenstein(
    coeffs: &str,
    p: u64,
    config: &RunConfig,
) -> Result<(Value, bool), String> {
    let ints: Result<Vec<i64>, _> = coeffs.split(',').map(|s| s.trim().parse::<i64>()).collect();
    let ints = ints.map_err(|_| "bad coefficient list")?;
    let base = Tower::base(p, config.precision);
    let g: Vec<Elt> = ints.iter().map(|&c| base.ctx(0).from_i64(c)).collect();
    let polygon = iterext::padic::newton_polygon(&base.ctx(0), &g).map_err(|e| e.to_string())?;
    let (breaks, tower) = ramification_breaks(&base, &g).map_err(|e| e.to_string())?;
    let h = HerbrandFn::from_breaks(&breaks).map_err(|e| e.to_string())?;
    let levels: Vec<Value> = (1..=tower.num_levels())
        .map(|k| {
            let lvl = tower.level(k);
            json!({
                "kind": format!("{:?}", lvl.kind),
                "degree": lvl.degree,
            })
        })
        .collect();
    let report = json!({
        "timestamp": timestamp(),
        "command": "ramification",
        "prime": p,
        "degree": tower.level(1).degree,
        "newton_polygon_vertices": polygon
            .vertices
            .iter()
            .map(|(x, v)| json!({"exponent": x, "valuation": v.to_string()}))
            .collect::<Vec<_>>(),
        "tower_levels": levels,
        "ramification_index": tower.ram_index(),
        "lower_breaks": breaks.breaks.iter().map(|(b, m)| json!({"break": b.to_string(), "multiplicity": m})).collect::<Vec<_>>(),
        "upper_breaks": h.upper_breaks(&breaks).iter().map(|u| u.to_string()).collect::<Vec<_>>(),
        "herbrand_initial_slope": h.initial_slope().to_string(),
        "herbrand_concave": h.is_concave(),
        "galois_verified": false,
        "note": "breaks from the rho(x)/x polygon; Galois-ness of the step is assumed, not verified",
        "ok": true,
    });
    Ok((report, true))
}

fn cmd_apf(phi: &RationalMap<Rat>, p: u64, config: &RunConfig) -> (Value, bool) {
    // default depth: deeper for small level degrees, shallow for big ones
    let depth = config.depth.unwrap_or_else(|| {
        match iterext::apf::powerlike_order(phi, p, config.m_max) {
            Ok(pl) => {
                if (p as u64).pow(pl.r) <= 8 {
                    6
                } else {
                    3
                }
            }
            Err(_) => 3,
        }
    });
    match build_apf_tower(phi, p, depth, config.m_max, config.precision, 50_000_000) {
        Ok((tower, cert)) => {
            let passed = cert.verdict == "pass";
            let report = json!({
                "timestamp": timestamp(),
                "command": "apf",
                "map": MapLiteral::from_map(phi),
                "prime": p,
                "depth": depth,
                "ramification_index": tower.ram_index(),
                "certificate": serde_json::to_value(certificate_to_json(&cert)).unwrap(),
                "ok": passed,
            });
            (report, passed)
        }
        Err(e) => (
            json!({
                "timestamp": timestamp(),
                "command": "apf",
                "map": MapLiteral::from_map(phi),
                "prime": p,
                "error": e.to_string(),
                "ok": false,
            }),
            false,
        ),
    }
}
