use crate::{Chi, Command, Failure, RunConfig};
use building_lab::depth::{fixed_vertices, singular_depth, torus_distance, verify_fixpoint_bounds};
use building_lab::gl::{double_coset_count, flag_count_formula, BuildingComplex};
use building_lab::guard;
use building_lab::padic::{Padic, PadicMatrix};
use building_lab::rep::complex::required_precision;
use building_lab::rep::{
    chain_complex, character_scan, euler_report, growth_table, TorusCharacter,
};
use building_lab::roots::{build_root_system, height};
use building_lab::verify::{run_all, VerifyConfig, CRITERIA};
use building_lab::{Rational, RationalRep};
use serde::Serialize;
use serde_json::Value;

/// Digits carried by parsed group elements.
const GAMMA_DIGITS: u32 = 24;

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
}

fn check(name: impl Into<String>, passed: bool) -> CheckLine {
    CheckLine {
        name: name.into(),
        passed,
    }
}

/// Flat CSV view of a payload.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    pub payload: Value,
    pub checks: Vec<CheckLine>,
    pub table: Table,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub fn validate(command: Command, cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.n < 2 {
        return Err(usage(format!("--n must be at least 2, got {}", cfg.n)));
    }
    if !is_prime(cfg.p) || cfg.p > 1 << 16 {
        return Err(usage(format!(
            "--p must be a prime below 2^16, got {}",
            cfg.p
        )));
    }
    if cfg.e < 0 || cfg.e_max < 0 || cfg.radius < 0 {
        return Err(usage("--e, --e-max and --radius must be nonnegative"));
    }
    if cfg.precision == Some(0) {
        return Err(usage("--precision must be positive"));
    }
    if cfg.r.is_some_and(|r| r < 0) {
        return Err(usage("--r must be nonnegative"));
    }
    if cfg.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    match (cfg.chi, cfg.p) {
        (Chi::Legendre, 2) => return Err(usage("--chi legendre needs an odd prime")),
        (Chi::Mod4, p) if p != 2 => return Err(usage("--chi mod4 needs p = 2")),
        _ => {}
    }
    if matches!(command, Command::Fixed | Command::Charscan) && cfg.gamma.len() != cfg.n {
        return Err(usage(format!(
            "--gamma needs {} diagonal entries, got {}",
            cfg.n,
            cfg.gamma.len()
        )));
    }
    Ok(())
}

/// `u`, `p^v`, `p^v*u` or `u*p^v`, optionally signed.
pub fn parse_entry(token: &str, p: u64) -> Result<Padic, Failure> {
    let t = token.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, t),
    };
    let mut v = 0i64;
    let mut u = 1i64;
    for factor in body.split('*') {
        let factor = factor.trim();
        if let Some((base, exp)) = factor.split_once('^') {
            let base: u64 = base
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad base in {token:?}")))?;
            if base != p {
                return Err(usage(format!(
                    "{token:?}: power of {base}, expected powers of p = {p}"
                )));
            }
            v += exp
                .trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("bad exponent in {token:?}")))?;
        } else {
            let x: i64 = factor
                .parse()
                .map_err(|_| usage(format!("bad factor {factor:?} in {token:?}")))?;
            if x == 0 {
                return Err(usage(format!("{token:?} is zero")));
            }
            u = u
                .checked_mul(x)
                .ok_or_else(|| usage(format!("{token:?} overflows")))?;
        }
    }
    Ok(Padic::p_power(p, v, GAMMA_DIGITS).mul(&Padic::from_int(sign * u, p, GAMMA_DIGITS)))
}

fn gamma(cfg: &RunConfig) -> Result<PadicMatrix, Failure> {
    let d: Vec<Padic> = cfg
        .gamma
        .iter()
        .map(|t| parse_entry(t, cfg.p))
        .collect::<Result<_, _>>()?;
    Ok(PadicMatrix::diag(&d))
}

fn character(cfg: &RunConfig) -> Result<TorusCharacter, Failure> {
    Ok(TorusCharacter::parse(cfg.chi.name(), cfg.n, cfg.p)?)
}

fn json<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Io(e.to_string()))
}

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<Outcome, Failure> {
    match command {
        Command::Roots => roots(cfg),
        Command::Cosets => cosets(cfg),
        Command::Growth => growth(cfg),
        Command::Fixed => fixed(cfg),
        Command::Charscan => charscan(cfg),
        Command::Complex => complex(cfg),
        Command::VerifyAll => verify_all(cfg),
    }
}

fn roots(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let n = cfg.n;
    guard::check((n * n) as u128)?;
    let rs = build_root_system(n)?;
    let simple: Vec<_> = rs.simple_roots.clone();
    let rows = rs
        .roots
        .iter()
        .map(|a| {
            vec![
                a.to_string(),
                a.is_positive().to_string(),
                simple.contains(a).to_string(),
                height(&if a.is_positive() { *a } else { a.negate() })
                    .map(|h| h.to_string())
                    .unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Outcome {
        checks: vec![
            check("root count n(n-1)", rs.roots.len() == n * (n - 1)),
            check("simple roots n-1", rs.simple_roots.len() == n - 1),
        ],
        payload: json(&rs)?,
        table: Table {
            header: vec!["root", "positive", "simple", "height"],
            rows,
        },
    })
}

#[derive(Serialize)]
struct CosetRow {
    e: i64,
    double_cosets: u128,
    closed_form: u128,
    ratio_to_q_power: Rational,
}

fn cosets(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (n, p) = (cfg.n, cfg.p);
    let top = u32::try_from(cfg.e_max + 1).map_err(|_| usage("--e-max too large"))?;
    guard::check(flag_count_formula(n, p, top))?;
    let half = (n * (n - 1) / 2) as u32;
    let mut rows = Vec::new();
    for e in 0..=cfg.e_max {
        let count = double_coset_count(n, p, e as u32)?;
        let q = (p as i64).pow(e as u32 * half);
        rows.push(CosetRow {
            e,
            double_cosets: count,
            closed_form: flag_count_formula(n, p, e as u32 + 1),
            ratio_to_q_power: Rational::new(count as i64, q),
        });
    }
    Ok(Outcome {
        checks: rows
            .iter()
            .map(|r| {
                check(
                    format!("e={} count matches closed form", r.e),
                    r.double_cosets == r.closed_form,
                )
            })
            .collect(),
        table: Table {
            header: vec!["e", "double_cosets", "closed_form", "ratio_to_q_power"],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        r.e.to_string(),
                        r.double_cosets.to_string(),
                        r.closed_form.to_string(),
                        r.ratio_to_q_power.to_string(),
                    ]
                })
                .collect(),
        },
        payload: json(&rows)?,
    })
}

fn growth(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let t = growth_table(cfg.n, cfg.p, cfg.e_max, &character(cfg)?)?;
    let rows = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.e.to_string(),
                r.double_cosets.to_string(),
                r.closed_form.to_string(),
                r.dim_invariants.to_string(),
                r.m_v.to_string(),
                r.bound.to_string(),
                r.ratio_to_bound.to_string(),
                r.ratio_to_q_power.to_string(),
                r.mu_times_dim.to_string(),
                r.ball_orbits.to_string(),
                r.ball_vertices.to_string(),
                r.exceeds_bound.to_string(),
                r.provenance.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        checks: vec![
            check(
                "measured constant at most 4",
                t.measured_constant <= Rational::integer(4),
            ),
            check(
                "mu(K_e) dim strictly decreasing",
                t.mu_dim_strictly_decreasing,
            ),
            check("ball orbits match vertex counts", t.orbits_match),
        ],
        table: Table {
            header: vec![
                "e",
                "double_cosets",
                "closed_form",
                "dim_invariants",
                "m_v",
                "bound",
                "ratio_to_bound",
                "ratio_to_q_power",
                "mu_times_dim",
                "ball_orbits",
                "ball_vertices",
                "exceeds_bound",
                "provenance",
            ],
            rows,
        },
        payload: json(&t)?,
    })
}

fn fixed(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let g = gamma(cfg)?;
    let depth = singular_depth(&g, cfg.e)?;
    let rep = if depth.regular {
        verify_fixpoint_bounds(&g, cfg.radius)?
    } else {
        fixed_vertices(&g, cfg.radius)?
    };
    let mut checks = vec![
        check("apartment ball fixed", rep.contains_apartment_ball),
        check("closed under geodesics", rep.closed_under_geodesics),
    ];
    if depth.regular {
        checks.push(check(
            "valuation bounds (b)",
            rep.bounds.iter().all(|b| b.bound_b),
        ));
        checks.push(check(
            "valuation bounds (c)",
            rep.bounds.iter().all(|b| b.bound_c),
        ));
    }
    let mut distances = Vec::new();
    if cfg.n == 2 {
        for v in &rep.fixed {
            distances.push(torus_distance(v, cfg.radius)?);
        }
        if let Some(sd) = depth.sd {
            let hgt = Rational::integer(cfg.n as i64 - 1);
            let cap = hgt * Rational::integer(sd);
            checks.push(check(
                "d_T(x) <= hgt sd",
                distances.iter().all(|d| *d <= cap),
            ));
        }
    }
    let rows = rep
        .fixed
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let b = rep.bounds.get(i);
            vec![
                format!("{:?}", v.coords()),
                format!("{:?}", v.h),
                distances.get(i).map(|d| d.to_string()).unwrap_or_default(),
                b.map(|b| b.bound_b.to_string()).unwrap_or_default(),
                b.map(|b| b.bound_c.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let mut payload = json(&rep)?;
    payload["depth"] = json(&depth)?;
    payload["torus_distances"] = json(&distances)?;
    Ok(Outcome {
        payload,
        checks,
        table: Table {
            header: vec!["vertex", "h", "torus_distance", "bound_b", "bound_c"],
            rows,
        },
    })
}

fn charscan(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let g = gamma(cfg)?;
    let depth = singular_depth(&g, cfg.e)?;
    let r = depth.r_split.ok_or_else(|| {
        Failure::Lib(building_lab::Error::Irregular(
            "gamma has equal eigenvalues".into(),
        ))
    })?;
    let s_max = cfg.r.unwrap_or(r + 3);
    let m = cfg.precision.unwrap_or((s_max + 1).max(1) as u32);
    let rep = RationalRep::principal_series(cfg.n, cfg.p, character(cfg)?, m)?;
    let scan = character_scan(&g, cfg.e, &rep, Some(s_max), cfg.samples, cfg.seed)?;
    let checks = if scan.compact {
        vec![
            check(
                "chi_(K_s) constant on the scanned neighbourhood",
                scan.constant,
            ),
            check("chi_(K_s) independent of s", scan.stable_in_s),
        ]
    } else {
        // non-compact: only the stabilization in s is reported
        vec![check("scan completed", true)]
    };
    let rows = scan
        .cells
        .iter()
        .map(|c| {
            vec![
                c.s.to_string(),
                c.value.clone(),
                c.evaluations.to_string(),
                c.all_equal.to_string(),
                c.distinct_values.join(";"),
            ]
        })
        .collect();
    let mut payload = json(&scan)?;
    payload["model_precision"] = json(&m)?;
    Ok(Outcome {
        payload,
        checks,
        table: Table {
            header: vec!["s", "value", "evaluations", "all_equal", "distinct_values"],
            rows,
        },
    })
}

fn complex(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let c = BuildingComplex::ball(cfg.n, cfg.p, cfg.radius)?;
    let m = match cfg.precision {
        Some(m) => m,
        None => required_precision(&c, cfg.e)?,
    };
    let rep = RationalRep::principal_series(cfg.n, cfg.p, character(cfg)?, m)?;
    let (_, h) = chain_complex(&c, cfg.e, &rep)?;
    let (_, eu) = euler_report(&c, cfg.e, &rep)?;
    let checks = vec![
        check("boundary squares to zero", h.boundary_squared_zero),
        check("coefficients nested", h.coefficients_nested),
        check("exact in positive degrees", h.exact),
        check(
            "H_0 is the vertex sum",
            h.homology.first() == Some(&h.vertex_sum_rank),
        ),
        check("Euler idempotent", eu.idempotent),
        check("Euler image is the vertex sum", eu.image_is_vertex_sum),
        check(
            "Euler kernel is the common kernel",
            eu.kernel_is_common_kernel,
        ),
    ];
    let rows = (0..h.chain_dims.len())
        .map(|d| {
            vec![
                d.to_string(),
                h.chain_dims[d].to_string(),
                h.boundary_ranks
                    .get(d)
                    .map(|r| r.to_string())
                    .unwrap_or_default(),
                h.homology[d].to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        payload: serde_json::json!({ "model_precision": m, "homology": json(&h)?, "euler": json(&eu)? }),
        checks,
        table: Table {
            header: vec!["degree", "chain_dim", "boundary_rank", "homology"],
            rows,
        },
    })
}

fn verify_all(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let vc = VerifyConfig {
        precision: cfg.precision,
        budget: cfg.samples,
        seed: cfg.seed,
        ..VerifyConfig::default()
    };
    let ids: Vec<u8> = CRITERIA.iter().map(|c| c.0).collect();
    let reports = run_all(&ids, &vc);
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.id.to_string(),
                r.title.clone(),
                r.passed.to_string(),
                r.checks.iter().filter(|c| c.passed).count().to_string(),
                r.checks.len().to_string(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Outcome {
        checks: reports
            .iter()
            .map(|r| check(format!("criterion {}: {}", r.id, r.title), r.passed))
            .collect(),
        payload: json(&reports)?,
        table: Table {
            header: vec![
                "id",
                "title",
                "passed",
                "checks_passed",
                "checks_total",
                "error",
            ],
            rows,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries() {
        let x = parse_entry("2^1*3", 2).unwrap();
        assert!(x.agrees_with(&Padic::from_int(6, 2, 20)));
        let x = parse_entry("-3", 2).unwrap();
        assert!(x.agrees_with(&Padic::from_int(-3, 2, 20)));
        assert!(parse_entry("3^1", 2).is_err());
        assert!(parse_entry("0", 2).is_err());
        assert!(parse_entry("x", 2).is_err());
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(101));
        assert!(!is_prime(1) && !is_prime(9));
    }
}
