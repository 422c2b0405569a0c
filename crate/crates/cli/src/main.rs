mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use pcf_core::experiment::{self, Budget};
use pcf_core::factor::{self, FactorProblem};
use pcf_core::pell::{self, FPPoint};
use pcf_core::{contmat, expr, gauss, hurwitz, pcf, suite, Error, Mat2, Pcf, QuadPoly, RElem, Ring};
use serde_json::{json, Value};

use config::Config;

#[derive(Parser)]
#[command(name = "pcf", version, about = "Periodic continued fractions, continuant matrices and their varieties")]
struct Cli {
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML config file (keys: ring, unit_generators, [budgets], output).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Node budget for exhaustive searches.
    #[arg(long, global = true, env = "PCF_NODE_LIMIT")]
    node_limit: Option<u64>,
    /// Wall-clock budget for scans, in seconds.
    #[arg(long, global = true, env = "PCF_TIME_LIMIT_SECS")]
    time_limit_secs: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RingArg {
    /// Base ring: Z, Z[i], Z[1/p], O(d) or Z[sqrt(d)].
    #[arg(long)]
    ring: Option<String>,
}

#[derive(Args)]
struct Shape {
    /// Preperiod length.
    #[arg(long = "N")]
    n: usize,
    /// Period length.
    #[arg(long)]
    k: usize,
    /// Height bound.
    #[arg(long = "H")]
    h: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact and numeric value of a PCF such as "[1; 2]".
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        pcf: String,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, default_value_t = pcf::DEFAULT_DIGITS)]
        digits: u32,
        #[arg(long, default_value_t = pcf::DEFAULT_MAX_PERIODS)]
        max_periods: usize,
    },
    /// E-matrix and quadratic polynomial of a PCF.
    Quad {
        #[arg(long, allow_hyphen_values = true)]
        pcf: String,
        #[command(flatten)]
        ring: RingArg,
    },
    /// Nearest-integer expansion of a rational or real quadratic value.
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Nearest-lattice-point expansion over an imaginary quadratic order.
    ExpandGauss {
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// The exceptional set M of an imaginary quadratic order.
    Mset {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
    /// Fundamental solution of y^2 - alpha x^2 = ±1.
    Pell {
        #[arg(long)]
        alpha: i64,
    },
    /// Fermat-Pell points from the unit stream, one JSON object per line.
    FpPoints {
        #[arg(long)]
        quad: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[command(flatten)]
        ring: RingArg,
        /// Unit generators (repeatable); falls back to the config file, then the default unit.
        #[arg(long = "generator")]
        generators: Vec<String>,
    },
    /// Height-bounded points of the factorization variety of a matrix "a,b,c,d".
    Factor {
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        ring: RingArg,
    },
    /// PCFs of a given shape whose E-matrix is the FP point "a,b,c,d".
    Fiber {
        #[arg(long)]
        fp: String,
        #[arg(long)]
        quad: String,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        ring: RingArg,
    },
    /// Exhaustive scan of a PCF variety for interior points.
    ScanDegenerate {
        #[arg(long)]
        quad: String,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        ring: RingArg,
    },
    /// Harvest fiber points and test them for polynomial nondegeneracy.
    DensityCert {
        #[arg(long)]
        quad: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        fibers: usize,
        #[arg(long = "H")]
        h: u64,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long = "generator")]
        generators: Vec<String>,
    },
    /// Bounded-height bijection between FP points of x^2 - alpha and units.
    PellCheck {
        #[arg(long)]
        alpha: i64,
        #[arg(long)]
        k: usize,
        #[arg(long = "H", default_value_t = 1000)]
        h: u64,
    },
    /// Run the full verification battery.
    VerifySuite,
}

/// Exit statuses.
const OK: u8 = 0;
const ASSERTION_FAILED: u8 = 1;
const USAGE: u8 = 2;
const BUDGET: u8 = 3;

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

struct Ctx {
    config: Config,
    budget: Budget,
    out: Vec<String>,
}

impl Ctx {
    fn ring(&self, arg: &RingArg) -> Result<Ring, Failure> {
        let s = arg.ring.as_deref().or(self.config.ring.as_deref()).unwrap_or("Z");
        Ok(s.parse()?)
    }

    fn emit(&mut self, v: Value) {
        self.out.push(v.to_string());
    }

    fn generators(&self, flags: &[String]) -> Vec<String> {
        if flags.is_empty() {
            self.config.unit_generators.clone()
        } else {
            flags.to_vec()
        }
    }
}

/// Over ℤ, elements that fit in i64 are JSON numbers; over any other ring every element
/// is an exact string, so an array never mixes the two.
fn elem_json(x: &RElem, ring: &Ring) -> Value {
    match x.as_integer().and_then(|n| n.to_i64()).filter(|_| ring.is_integers()) {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

fn elems_json<'a>(xs: impl IntoIterator<Item = &'a RElem>, ring: &Ring) -> Value {
    Value::Array(xs.into_iter().map(|x| elem_json(x, ring)).collect())
}

fn matrix_json(m: &Mat2, ring: &Ring) -> Value {
    let [a, b, c, d] = m.entries();
    json!([elems_json([a, b], ring), elems_json([c, d], ring)])
}

fn run(cli: Cli, ctx: &mut Ctx) -> Result<u8, Failure> {
    let node_limit = ctx.budget.node_limit;
    match cli.cmd {
        Cmd::Eval { pcf: s, ring, digits, max_periods } => {
            let ring = ctx.ring(&ring)?;
            let p = Pcf::parse(&s, &ring)?;
            let v = pcf::evaluate_with(&p, &ring, digits, max_periods)?;
            ctx.emit(json!({
                "pcf": p.to_string(),
                "quad": elems_json(contmat::quad_poly(&p).coeffs(), &ring),
                "value_exact": v.exact.as_ref().map(|x| x.to_string()),
                "value_numeric": v.numeric_json(digits as usize),
                "converged": v.converged,
            }));
            eprintln!("{p}: {} after {} periods", v.exact.map_or("no exact form".into(), |x| x.to_string()), v.periods);
        }
        Cmd::Quad { pcf: s, ring } => {
            let ring = ctx.ring(&ring)?;
            let p = Pcf::parse(&s, &ring)?;
            let q = contmat::quad_poly(&p);
            ctx.emit(json!({ "pcf": p.to_string(), "e_matrix": matrix_json(&contmat::e_matrix(&p), &ring), "quad": elems_json(q.coeffs(), &ring) }));
            eprintln!("{p}: {q}");
        }
        Cmd::Expand { value, ring, max_steps } => {
            let ring = ctx.ring(&ring)?;
            let x = expr::parse_value(&value, &ring)?;
            let e = hurwitz::nicf_expand(&x, max_steps)?;
            let ints = |v: &[num_bigint::BigInt]| -> Value {
                v.iter().map(|n| n.to_i64().map_or_else(|| json!(n.to_string()), |n| json!(n))).collect()
            };
            ctx.emit(json!({ "preperiod": ints(&e.preperiod), "period": ints(&e.period) }));
            eprintln!("{x} = {e}");
        }
        Cmd::ExpandGauss { value, ring, max_steps } => {
            let ring = ctx.ring(&ring)?;
            let x = expr::parse_value(&value, &ring)?;
            let g = gauss::nicf_expand_gauss(&x, &ring, max_steps)?;
            ctx.emit(json!({
                "preperiod": elems_json(&g.expansion.preperiod, &ring),
                "period": elems_json(&g.expansion.period, &ring),
                "avoids_m": g.avoids_m,
            }));
            eprintln!("{x} = {}", g.expansion);
        }
        Cmd::Mset { ring, bound } => {
            let ring = ctx.ring(&ring)?;
            let m = gauss::m_set(&ring, bound)?;
            ctx.emit(json!({ "ring": ring.to_string(), "bound": bound, "count": m.members.len(), "members": elems_json(&m.members, &ring) }));
            eprintln!("|M| = {} over {ring}", m.members.len());
        }
        Cmd::Pell { alpha } => {
            let (x, y, norm) = pell::fundamental_pell(&alpha.into())?;
            ctx.emit(json!({ "alpha": alpha, "x": x.to_string(), "y": y.to_string(), "norm": norm }));
            eprintln!("{y}^2 - {alpha}*{x}^2 = {norm}");
        }
        Cmd::FpPoints { quad, k, count, ring, generators } => {
            let ring = ctx.ring(&ring)?;
            let q = QuadPoly::parse(&quad, &ring)?;
            let gens = pell::parse_generators(&ctx.generators(&generators), &q, &ring)?;
            let pts = pell::fp_stream(&q, k, &ring, count, &gens)?;
            for p in &pts {
                ctx.emit(serde_json::to_value(p).expect("points serialize"));
            }
            eprintln!("{} FP points for {q}, k = {k}", pts.len());
        }
        Cmd::Factor { matrix, shape, ring } => {
            let ring = ctx.ring(&ring)?;
            let a = Mat2::parse(&matrix, &ring)?;
            let p = FactorProblem { a, n: shape.n, k: shape.k, h: shape.h, ring };
            let sols = factor::vbar_solve_with(&p, node_limit)?;
            for s in &sols {
                ctx.emit(json!(s.to_string()));
            }
            eprintln!("{} solutions of height <= {}; existence beyond the bound: unknown", sols.len(), shape.h);
        }
        Cmd::Fiber { fp, quad, shape, ring } => {
            let ring = ctx.ring(&ring)?;
            let q = QuadPoly::parse(&quad, &ring)?;
            let m = Mat2::parse(&fp, &ring)?;
            let [a, b, c, d] = m.entries().map(Clone::clone);
            let pt = FPPoint { a, b, c, d, k_parity: (shape.k % 2) as u8 };
            pt.check(&q).map_err(|e| Failure::Usage(e.to_string()))?;
            let sols = factor::fiber_solve_with(&pt, &q, shape.n, shape.k, shape.h, &ring, node_limit)?;
            for p in &sols {
                ctx.emit(json!(p.to_string()));
            }
            eprintln!("{} fiber points of height <= {}", sols.len(), shape.h);
        }
        Cmd::ScanDegenerate { quad, shape, ring } => {
            let ring = ctx.ring(&ring)?;
            let q = QuadPoly::parse(&quad, &ring)?;
            let r = experiment::degeneracy_scan(&q, shape.n, shape.k, shape.h, &ring, &ctx.budget)?;
            ctx.emit(serde_json::to_value(&r).expect("reports serialize"));
            eprintln!("{} points, {} interior (bound {})", r.total_points, r.interior_points.len(), experiment::MAX_INTERIOR);
            return Ok(if r.holds { OK } else { ASSERTION_FAILED });
        }
        Cmd::DensityCert { quad, n, k, fibers, h, degree, ring, generators } => {
            let ring = ctx.ring(&ring)?;
            let q = QuadPoly::parse(&quad, &ring)?;
            let gens = pell::parse_generators(&ctx.generators(&generators), &q, &ring)?;
            let c = experiment::harvest_and_certify(&q, n, k, &ring, fibers, h, degree, &gens, &ctx.budget)?;
            ctx.emit(serde_json::to_value(&c).expect("certificates serialize"));
            eprintln!("{} points, rank {}/{}: certified = {}", c.points.len(), c.rank, c.monomial_count, c.certified);
            return Ok(if c.certified { OK } else { ASSERTION_FAILED });
        }
        Cmd::PellCheck { alpha, k, h } => {
            let r = experiment::pell_bijection_check(alpha, k, h)?;
            ctx.emit(serde_json::to_value(&r).expect("reports serialize"));
            eprintln!("{} FP points, {} units: bijective = {}", r.fp_points, r.units, r.bijective);
            return Ok(if r.bijective { OK } else { ASSERTION_FAILED });
        }
        Cmd::VerifySuite => {
            let r = suite::run_suite();
            for c in &r.criteria {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                eprintln!("criterion {:>2} {tag} {}: {} ({} ms)", c.id, c.name, c.detail, c.elapsed_ms);
                if let Some(o) = &c.obstruction {
                    eprintln!("             obstruction: {o}");
                }
            }
            ctx.emit(serde_json::to_value(&r).expect("reports serialize"));
            return Ok(if r.all_pass { OK } else { ASSERTION_FAILED });
        }
    }
    Ok(OK)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::TimeLimitExceeded(_) | Error::StepBudgetExceeded(_) => BUDGET,
        Error::Invariant(_) => ASSERTION_FAILED,
        _ => USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let config = match cli.config.as_deref().map(Config::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    let budget = Budget {
        node_limit: cli.node_limit.or(config.budgets.node_limit).map_or(factor::DEFAULT_NODE_LIMIT, u128::from),
        time_limit: cli.time_limit_secs.or(config.budgets.time_limit_secs).map(Duration::from_secs),
    };
    let mut ctx = Ctx { config, budget, out: Vec::new() };
    let status = match run(cli, &mut ctx) {
        Ok(s) => s,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            USAGE
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    let mut text = ctx.out.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    let written = match &ctx.config.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE);
    }
    ExitCode::from(status)
}
