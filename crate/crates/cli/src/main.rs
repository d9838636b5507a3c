//! `incidence`: batch front end for the incidence-core pipeline.
//!
//! Every verb prints a single JSON document on stdout. Exit status is 0 on
//! success, 1 when the library reports a domain error (the JSON then carries
//! the error) and 2 on malformed command lines.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use incidence_core::incidence::ElementFile;
use incidence_core::linmaps::MapFile;
use incidence_core::poset::PosetFile;
use incidence_core::preserver::{
    bruteforce_classify, construct_preserver, decide_existence, lemma_suite, square_roots_of, verify_product_preserver,
    zero_product_basis_check, zero_product_exhaustive, Budget, ConstructOptions, Jobs, PreserverProblem, VerifyMode,
};
use incidence_core::{Algebra, Cocycle, Error, Field, IdempotentClass, IncidenceElement, LinearMap, Poset, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "incidence", version, about = "Incidence algebras and preservers of products equal to primitive idempotents")]
struct Cli {
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,

    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, env = "PRESERVER_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Connectivity, dimension, automorphisms and orbits of a poset.
    PosetInfo {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Evaluate one algebra operation on element files.
    AlgebraEval {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        a: PathBuf,
        /// Second operand for binary operations.
        #[arg(long)]
        b: Option<PathBuf>,
    },
    /// Decide whether a preserver for (epsilon, eta) exists.
    PreserverDecide {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Build a preserver for (epsilon, eta).
    PreserverConstruct {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i8,
        /// Cocycle file: element-file layout, one entry per strict pair.
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// Write the map here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check `f g = epsilon => phi(f) phi(g) = eta`. The poset is read from the map's basis.
    PreserverVerify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        epsilon: PathBuf,
        #[arg(long)]
        eta: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Structural checks a preserver must pass.
    LemmaSuite {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        epsilon: PathBuf,
        #[arg(long)]
        eta: PathBuf,
    },
    /// All f with f^2 = e_y, by enumeration.
    SquareRoots {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        y: String,
    },
    /// Enumerate GL(d, p) and classify the preservers of (e_x, e_y).
    Bruteforce {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = Budget::default().max_dim)]
        max_dim: usize,
        #[arg(long, default_value_t = Budget::default().audit_rate)]
        audit_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Does the map preserve zero products?
    ZpCheck {
        #[arg(long)]
        map: PathBuf,
        /// Field of the map entries, p or Q.
        #[arg(long)]
        field: String,
        /// Also check every pair by enumeration.
        #[arg(long)]
        exhaustive: bool,
    },
}

#[derive(clap::Args)]
struct ProblemArgs {
    #[arg(long)]
    poset: PathBuf,
    /// A prime p or Q.
    #[arg(long)]
    field: String,
    #[arg(long)]
    epsilon: PathBuf,
    #[arg(long)]
    eta: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Product,
    Sum,
    Difference,
    Square,
    Inverse,
    Classify,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (report, code) = match run(&cli.command, Jobs(cli.jobs)) {
        Ok(v) => (v, 0),
        Err(e) => (error_report(&e), 1),
    };
    let text = if cli.pretty { serde_json::to_string_pretty(&report) } else { serde_json::to_string(&report) };
    println!("{}", text.expect("reports are plain JSON values"));
    ExitCode::from(code)
}

fn error_report(e: &Error) -> Value {
    let debug = format!("{e:?}");
    let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default();
    json!({ "error": { "kind": kind, "message": e.to_string() } })
}

fn run(command: &Command, jobs: Jobs) -> Result<Value> {
    match command {
        Command::PosetInfo { poset } => {
            let poset = load_poset(poset)?;
            let autos = poset.automorphisms();
            let names = |block: &[usize]| block.iter().map(|&i| poset.name(i).to_string()).collect::<Vec<_>>();
            Ok(json!({
                "connected": poset.is_connected()?,
                "dimension": poset.comparable_pair_count(),
                "automorphisms": autos.len(),
                "orbits": poset.orbits().iter().map(|o| names(o)).collect::<Vec<_>>(),
                "length": poset.poset_length(),
                "automorphism_list": autos.iter().map(|a| a.named(&poset)).collect::<Vec<_>>(),
            }))
        }
        Command::AlgebraEval { poset, field, op, a, b } => {
            let alg = Algebra::new(load_poset(poset)?, parse_field(field)?);
            let a = load_element(&alg, a)?;
            let b = || -> Result<IncidenceElement> {
                let path = b.as_ref().ok_or_else(|| Error::BadOptions("this operation needs --b".into()))?;
                load_element(&alg, path)
            };
            let result = match op {
                Op::Product => a.try_mul(&b()?)?,
                Op::Sum => a.try_add(&b()?)?,
                Op::Difference => a.try_sub(&b()?)?,
                Op::Square => a.square(),
                Op::Inverse => a.invert()?,
                Op::Classify => {
                    return Ok(match a.classify_idempotent() {
                        IdempotentClass::NotIdempotent => json!({ "class": "not_idempotent" }),
                        IdempotentClass::NonPrimitive => json!({ "class": "non_primitive" }),
                        IdempotentClass::Primitive { base } => {
                            json!({ "class": "primitive", "base": alg.poset().name(base) })
                        }
                    })
                }
            };
            Ok(json!({ "result": result.to_file() }))
        }
        Command::PreserverDecide { problem } => {
            let problem = load_problem(problem)?;
            Ok(serde_json::to_value(decide_existence(&problem, jobs)?.to_file())?)
        }
        Command::PreserverConstruct { problem, sign, sigma, out } => {
            let problem = load_problem(problem)?;
            let sigma = match sigma {
                Some(path) => Some(Cocycle::from_file(problem.algebra(), &read_json::<ElementFile>(path)?)?),
                None => None,
            };
            let options = ConstructOptions { sign: *sign, sigma, ..ConstructOptions::default() };
            let map = construct_preserver(&problem, &options)?;
            match out {
                Some(path) => {
                    fs::write(path, map.to_json())?;
                    Ok(json!({
                        "written": path.display().to_string(),
                        "dimension": map.algebra().dim(),
                        "pm_automorphism": map.pm_automorphism(),
                    }))
                }
                None => Ok(serde_json::to_value(map.to_file())?),
            }
        }
        Command::PreserverVerify { map, epsilon, eta, mode, n, seed } => {
            let (phi, eps, eta) = load_map_problem(map, epsilon, eta)?;
            let mode = match mode {
                Mode::Exhaustive => VerifyMode::Exhaustive,
                Mode::Sampled => VerifyMode::Sampled { n: *n, seed: *seed },
            };
            Ok(serde_json::to_value(verify_product_preserver(&phi, &eps, &eta, mode, jobs)?)?)
        }
        Command::LemmaSuite { map, epsilon, eta } => {
            let (phi, eps, eta) = load_map_problem(map, epsilon, eta)?;
            Ok(serde_json::to_value(lemma_suite(&phi, &eps, &eta)?)?)
        }
        Command::SquareRoots { poset, p, y } => {
            let alg = Algebra::new(load_poset(poset)?, Field::prime(*p)?);
            let roots = square_roots_of(&alg, y)?;
            Ok(json!({ "count": roots.len(), "roots": roots.iter().map(IncidenceElement::to_file).collect::<Vec<_>>() }))
        }
        Command::Bruteforce { poset, p, x, y, max_dim, audit_rate, seed } => {
            let poset = load_poset(poset)?;
            let budget = Budget { max_dim: *max_dim, audit_rate: *audit_rate, seed: *seed, ..Budget::default() };
            Ok(serde_json::to_value(bruteforce_classify(&poset, *p, x, y, &budget, jobs)?)?)
        }
        Command::ZpCheck { map, field, exhaustive } => {
            let file: MapFile = read_json(map)?;
            let alg = Algebra::new(file.poset()?, parse_field(field)?);
            let phi = LinearMap::from_file(&alg, &file)?;
            let basis = zero_product_basis_check(&phi);
            Ok(if *exhaustive {
                json!({ "preserves_zero_products": basis, "exhaustive": zero_product_exhaustive(&phi)? })
            } else {
                json!({ "preserves_zero_products": basis })
            })
        }
    }
}

fn parse_field(s: &str) -> Result<Field> {
    match s {
        "Q" | "q" => Ok(Field::Rational),
        _ => Field::prime(s.parse().map_err(|_| Error::Format(format!("field must be a prime or Q, got {s:?}")))?),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn load_poset(path: &Path) -> Result<Poset> {
    Poset::from_file(&read_json::<PosetFile>(path)?)
}

fn load_element(alg: &Algebra, path: &Path) -> Result<IncidenceElement> {
    alg.element_from_file(&read_json::<ElementFile>(path)?)
}

fn load_problem(args: &ProblemArgs) -> Result<PreserverProblem> {
    let alg = Algebra::new(load_poset(&args.poset)?, parse_field(&args.field)?);
    PreserverProblem::new(load_element(&alg, &args.epsilon)?, load_element(&alg, &args.eta)?)
}

/// The map file fixes the poset; the field comes from the epsilon file.
fn load_map_problem(map: &Path, epsilon: &Path, eta: &Path) -> Result<(LinearMap, IncidenceElement, IncidenceElement)> {
    let file: MapFile = read_json(map)?;
    let eps_file: ElementFile = read_json(epsilon)?;
    let alg = Algebra::new(file.poset()?, eps_file.field.to_field()?);
    let phi = LinearMap::from_file(&alg, &file)?;
    let eps = alg.element_from_file(&eps_file)?;
    let eta = load_element(&alg, eta)?;
    Ok((phi, eps, eta))
}
