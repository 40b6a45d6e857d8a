use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fqrank::algebra::{Elem, Field};
use fqrank::chain::{hit_zero_bound, planted_bound, planted_pmf, positive_path_bound, ChainKind, ChainSpec, MAX_ENUMERATED_STEPS};
use fqrank::distributions::{rational_to_decimal, tv_distance, CorankPmf, Ensemble, Parity};
use fqrank::harness::suites::{run_all, run_suite};
use fqrank::harness::{mc_corank, tv_report, worker_count};
use fqrank::models::{sample, validate_conditions, ModelSpec};
use fqrank::structure::structure_report;
use fqrank::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "fqrank", version, about = "Rank statistics of random matrices over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CsvOut {
    /// Also write the PMF table to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-n or limiting corank law of a uniform ensemble.
    Dist {
        /// square, rect, symmetric or alternating
        kind: String,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Extra columns of the rectangular ensemble.
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// Parity of the alternating limit (defaults to the parity of n).
        #[arg(long)]
        parity: Option<Parity>,
        #[arg(long)]
        limit: bool,
        #[arg(long, default_value_t = 1e-30)]
        tol: f64,
        #[command(flatten)]
        out: CsvOut,
    },
    /// Draw one matrix from a model spec.
    Sample {
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Monte Carlo corank law of a model spec, optionally against a limit law.
    Mc {
        spec: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Limit law to compare with: square, rect, symmetric or alternating.
        #[arg(long = "ref")]
        reference: Option<String>,
        /// Compare with the finite-n law instead of the limit.
        #[arg(long)]
        finite: bool,
        /// Largest accepted total variation distance.
        #[arg(long, default_value_t = 0.02)]
        tv_tol: f64,
        #[command(flatten)]
        out: CsvOut,
    },
    /// Run an acceptance suite by name or number, or `all`.
    Verify { suite: String },
    /// Exact corank chains.
    Chain {
        /// symmetric, alternating or iid-column
        kind: String,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        x0: usize,
        #[arg(long)]
        steps: usize,
        /// Row count of the iid-column chain.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, conflicts_with_all = ["path", "planted"])]
        hit_zero: bool,
        #[arg(long, conflicts_with = "planted")]
        path: bool,
        #[arg(long)]
        planted: bool,
        #[command(flatten)]
        out: CsvOut,
    },
    /// Fourier structure of a vector against the entry laws of one column.
    Structure {
        spec: PathBuf,
        /// Comma-separated field elements.
        #[arg(long, value_delimiter = ',')]
        vector: Vec<Elem>,
        #[arg(long, default_value_t = 0)]
        column: usize,
        /// Threshold parameter K.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Required number of indices outside the threshold set.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
}

/// JSON to print and whether every requested verification passed.
type Outcome = (Value, bool);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((value, pass)) => {
            emit(&serde_json::to_string_pretty(&value).expect("json"));
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            emit(&json!({ "error": e.to_string() }).to_string());
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Print to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Dist { kind, n, q, m, parity, limit, tol, out } => {
            let f = Field::new(q)?;
            let mut ensemble: Ensemble = kind.parse()?;
            if let Ensemble::Rect(_) = ensemble {
                ensemble = Ensemble::Rect(m);
            }
            let pmf = if limit {
                ensemble.limit_pmf(&f, parity.unwrap_or(Parity::of(n)), tol)?
            } else {
                ensemble.finite_pmf(n, &f)?
            };
            write_csv(&out, &pmf)?;
            Ok((pmf.to_json(), true))
        }
        Command::Sample { spec, seed, trial } => {
            let (spec, spec_seed) = load_spec(&spec)?;
            let seed = seed.or(spec_seed).unwrap_or(0);
            let m = sample(&spec, seed, trial);
            Ok((
                json!({
                    "model": spec.kind.as_str(),
                    "seed": seed,
                    "trial": trial,
                    "matrix": m.to_text(spec.field.q()),
                    "corank": m.corank(&spec.field),
                    "conditions": condition_warnings(&spec),
                }),
                true,
            ))
        }
        Command::Mc { spec, trials, seed, reference, finite, tv_tol, out } => {
            let (spec, spec_seed) = load_spec(&spec)?;
            let seed = seed.or(spec_seed).unwrap_or(0);
            let mc = mc_corank(&spec, trials, seed)?;
            write_csv(&out, &mc.empirical)?;
            let mut value = mc.to_json();
            value["workers"] = json!(worker_count());
            value["conditions"] = condition_warnings(&spec);
            let mut pass = true;
            if let Some(name) = reference {
                let f = &spec.field;
                let mut ensemble: Ensemble = name.parse()?;
                if let Ensemble::Rect(_) = ensemble {
                    ensemble = Ensemble::Rect(spec.m);
                }
                let law = if finite {
                    ensemble.finite_pmf(spec.n, f)?
                } else {
                    ensemble.limit_pmf(f, Parity::of(spec.n), 1e-12)?
                };
                let report = tv_report(&format!("{} vs {name}", spec.kind.as_str()), &mc, &law, tv_tol);
                pass = report.pass;
                value["verification"] = report.to_json();
            }
            Ok((value, pass))
        }
        Command::Verify { suite } => {
            let outcomes = if suite == "all" { run_all()? } else { vec![run_suite(&suite)?] };
            for o in &outcomes {
                eprintln!("{}", o.summary_line());
            }
            let pass = outcomes.iter().all(|o| o.pass);
            let reports: Vec<Value> = outcomes.iter().map(|o| o.to_json()).collect();
            Ok((json!({ "pass": pass, "suites": reports }), pass))
        }
        Command::Chain { kind, q, x0, steps, n, hit_zero, path, planted, out } => {
            let f = Field::new(q)?;
            let kind: ChainKind = kind.parse()?;
            let chain = match kind {
                ChainKind::IidColumn { .. } => {
                    let n = n.ok_or_else(|| Error::Parse("iid-column needs --n".into()))?;
                    ChainSpec::iid_column(n, &f)
                }
                _ => ChainSpec::new(kind, &f)?,
            };
            if hit_zero {
                run_hit_zero(&chain, x0, steps)
            } else if path {
                run_path(&chain, x0, steps)
            } else if planted {
                run_planted(&chain, x0, steps, &out)
            } else {
                let law = chain.evolve(&CorankPmf::point(f.q(), x0), steps)?;
                write_csv(&out, &law)?;
                Ok((law.to_json(), true))
            }
        }
        Command::Structure { spec, vector, column, k, m } => {
            let (spec, _) = load_spec(&spec)?;
            let f = &spec.field;
            let (rows, cols) = spec.shape();
            if vector.len() != rows {
                return Err(Error::DimensionMismatch(format!("vector has {} entries, columns have {rows}", vector.len())));
            }
            if column >= cols {
                return Err(Error::DimensionMismatch(format!("column {column} out of range 0..{cols}")));
            }
            if let Some(&bad) = vector.iter().find(|&&v| v >= f.q()) {
                return Err(Error::Parse(format!("{bad} is not an element of F_{}", f.q())));
            }
            let dists: Vec<_> = (0..rows).map(|i| spec.entries.at(i, column).clone()).collect();
            let fixed: BTreeSet<usize> = spec.type_f.set(column).map(|s| s.keys().copied().collect()).unwrap_or_default();
            let report = structure_report(f, &vector, &dists, &fixed, k, m);
            let mut value = serde_json::to_value(&report).expect("json");
            value["claim_bound"] = json!(report.claim_bound());
            value["claim1_holds"] = json!(report.claim1_holds(f));
            value["max_product"] = json!(report.max_product());
            Ok((value, true))
        }
    }
}

fn run_hit_zero(chain: &ChainSpec, x0: usize, steps: usize) -> Result<Outcome, Error> {
    let prob = chain.hit_zero_prob(x0, steps);
    let mut value = json!({
        "chain": chain.kind.name(),
        "x0": x0,
        "steps": steps,
        "probability": prob.to_string(),
        "probability_decimal": rational_to_decimal(&prob).round(30).to_string(),
    });
    let mut pass = true;
    if x0 < steps {
        let bound = hit_zero_bound(chain.field.q(), x0, steps);
        pass = prob >= bound;
        value["lower_bound"] = json!(bound.to_string());
        value["pass"] = json!(pass);
    }
    Ok((value, pass))
}

fn run_path(chain: &ChainSpec, x0: usize, steps: usize) -> Result<Outcome, Error> {
    let (path, prob) = chain.most_likely_positive_path(x0, steps)?;
    let bound = positive_path_bound(chain.field.q(), x0, steps);
    let mut pass = prob <= bound;
    let mut value = json!({
        "chain": chain.kind.name(),
        "path": path,
        "probability": prob.to_string(),
        "upper_bound": bound.to_string(),
    });
    if steps <= MAX_ENUMERATED_STEPS {
        let (best_path, best) = chain.max_positive_path_exhaustive(x0, steps)?;
        pass &= best == prob;
        value["exhaustive_max"] = json!(best.to_string());
        value["exhaustive_path"] = json!(best_path);
    }
    value["pass"] = json!(pass);
    Ok((value, pass))
}

fn run_planted(chain: &ChainSpec, x0: usize, steps: usize, out: &CsvOut) -> Result<Outcome, Error> {
    let f = &chain.field;
    let law = planted_pmf(chain.kind, f, x0, steps)?;
    write_csv(out, &law)?;
    let n = x0 + steps;
    let limit = match chain.kind {
        ChainKind::Alternating => Ensemble::Alternating.limit_pmf(f, Parity::of(n), 1e-30)?,
        _ => Ensemble::Symmetric.limit_pmf(f, Parity::of(n), 1e-30)?,
    };
    let tv = tv_distance(&law, &limit);
    let mut value = json!({
        "chain": chain.kind.name(),
        "x0": x0,
        "steps": steps,
        "pmf": law.to_json(),
        "tv_to_limit": tv.value.round(30).to_string(),
    });
    let mut pass = true;
    if n.is_multiple_of(2) && x0 < n / 2 {
        let bound = planted_bound(f.q(), n, x0);
        pass = tv.upper() <= rational_to_decimal(&bound);
        value["upper_bound"] = json!(bound.to_string());
        value["pass"] = json!(pass);
    }
    Ok((value, pass))
}

fn load_spec(path: &PathBuf) -> Result<(ModelSpec, Option<u64>), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    ModelSpec::from_json(&text)
}

fn condition_warnings(spec: &ModelSpec) -> Value {
    let report = validate_conditions(spec, 0.05);
    serde_json::to_value(&report).unwrap_or(Value::Null)
}

fn write_csv(out: &CsvOut, pmf: &CorankPmf) -> Result<(), Error> {
    if let Some(path) = &out.csv {
        std::fs::write(path, pmf.to_csv()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
