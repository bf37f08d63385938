//! `stairstab` command-line interface.

mod record;
mod report;
mod targets;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use stairstab::diagonal::{fsd, theorem2_path};
use stairstab::grid::{enumerate_types, parse_members, recfsg, PathType};
use stairstab::optimize::{
    default_budget, maximize_all_types, maximize_fsl, maximize_grid_type, Family, Method,
    TypeOutcome,
};
use stairstab::Point;

use crate::record::{RecordFamily, RunRecord};

#[derive(Debug, Parser)]
#[command(name = "stairstab", version)]
#[command(about = "Line-stabbing bounds for simplices spanned by stretched grids and diagonals")]
struct Cli {
    /// Worker threads (defaults to one per CPU).
    #[arg(long, global = true, env = "STAIRSTAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the stair-path types left after normalization.
    Types {
        #[arg(long)]
        dim: usize,

        /// Print a JSON array instead of one type per line.
        #[arg(long)]
        json: bool,
    },

    /// Evaluate the stabbed fraction for one stair-path.
    Eval {
        #[arg(long, value_enum)]
        family: EvalFamily,

        #[arg(long)]
        dim: usize,

        /// Comma-separated coordinates; fractions such as 4/5 are accepted.
        #[arg(long, value_delimiter = ',', value_parser = parse_number, allow_hyphen_values = true)]
        q: Vec<f64>,

        #[arg(long, value_delimiter = ',', value_parser = parse_number, allow_hyphen_values = true)]
        p: Vec<f64>,

        /// Use the long diagonal path of the given dimension instead of --q/--p.
        #[arg(long)]
        theorem2: bool,
    },

    /// Maximize the per-type objectives and write JSON Lines records.
    Maximize {
        #[arg(long, value_enum)]
        family: MaxFamily,

        #[arg(long)]
        dim: Option<usize>,

        /// Single grid type such as {2,3}; all types when omitted.
        #[arg(long = "type")]
        type_label: Option<String>,

        #[arg(long, default_value = "de", value_parser = parse_method)]
        method: Method,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Evaluations per type (default 200000 up to d = 5, 2000000 above).
        #[arg(long)]
        budget: Option<usize>,

        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,

        /// Permit grid runs above d = 6.
        #[arg(long)]
        allow_high_dim: bool,
    },

    /// Check closed forms against sampling, exhaustive counts or the exact oracle.
    Verify {
        #[arg(long, value_enum)]
        mode: verify::Mode,

        #[arg(long)]
        dim: usize,

        /// Grid side(s) for census and transference, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        size: Vec<usize>,

        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,

        #[arg(long, default_value_t = 10_000)]
        trials: usize,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Measure sampled in mc mode.
        #[arg(long, value_enum, default_value = "grid")]
        family: EvalFamily,

        #[arg(long, value_delimiter = ',', value_parser = parse_number, allow_hyphen_values = true)]
        q: Vec<f64>,

        #[arg(long, value_delimiter = ',', value_parser = parse_number, allow_hyphen_values = true)]
        p: Vec<f64>,

        /// Largest census size, in d-subsets.
        #[arg(long, default_value_t = stairstab::transfer::DEFAULT_CENSUS_LIMIT)]
        limit: u128,

        /// Expected census fraction as `a/b`.
        #[arg(long)]
        expect: Option<String>,
    },

    /// Run the full reproduction suite and write CSV tables plus a summary.
    Report {
        #[arg(long)]
        out: PathBuf,

        #[arg(long, default_value = "de", value_parser = parse_method)]
        method: Method,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Count d = 6 maxima above the best-known value as findings instead of failures.
        #[arg(long)]
        accept_improvements: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalFamily {
    Grid,
    Diag,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MaxFamily {
    Grid,
    Diag3,
    Fsl,
}

pub enum Outcome {
    Passed,
    Failed,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

/// Parses a decimal or a fraction `a/b`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
            let d: f64 = d.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
            n / d
        }
        None => s.parse().map_err(|e| format!("{s:?}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not a finite number"))
    }
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

pub fn point_of(name: &str, coords: &[f64], d: usize) -> anyhow::Result<Point> {
    if coords.len() != d {
        bail!("--{name} needs {d} coordinates, got {}", coords.len());
    }
    Ok(Point::new(coords.to_vec())?)
}

fn cmd_types(dim: usize, json: bool) -> anyhow::Result<Outcome> {
    let types: Vec<String> = enumerate_types(dim)?
        .iter()
        .map(|t| t.to_string())
        .collect();
    if json {
        println!("{}", serde_json::to_string(&types)?);
    } else {
        for t in types {
            println!("{t}");
        }
    }
    Ok(Outcome::Passed)
}

fn cmd_eval(
    family: EvalFamily,
    dim: usize,
    q: &[f64],
    p: &[f64],
    theorem2: bool,
) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let mut rec = match (family, theorem2) {
        (EvalFamily::Grid, true) => bail!("--theorem2 applies to the diag family"),
        (EvalFamily::Grid, false) => {
            let qp = point_of("q", q, dim)?;
            let pp = point_of("p", p, dim)?;
            let value = recfsg(&qp, &pp)? / factorial(dim);
            let mut r = RunRecord::new("eval", dim, RecordFamily::Grid, value);
            r.type_label = Some(PathType::of(&qp, &pp)?.to_string());
            r.argmax_q = Some(qp.into_vec());
            r.argmax_p = Some(pp.into_vec());
            r
        }
        (EvalFamily::Diag, true) => {
            if !q.is_empty() || !p.is_empty() {
                bail!("--theorem2 replaces --q and --p");
            }
            let path = theorem2_path(dim)?;
            let exact = fsd(&path.q, &path.p)?;
            let approx = path.to_f64();
            let mut r = RunRecord::new(
                "eval",
                dim,
                RecordFamily::DiagonalTheorem2,
                num_traits_to_f64(&exact),
            );
            r.argmax_q = Some(approx.q);
            r.argmax_p = Some(approx.p);
            r
        }
        (EvalFamily::Diag, false) => {
            let qp = point_of("q", q, dim)?;
            let pp = point_of("p", p, dim)?;
            let value = fsd(qp.as_slice(), pp.as_slice())?;
            let mut r = RunRecord::new("eval", dim, RecordFamily::Diagonal, value);
            r.argmax_q = Some(qp.into_vec());
            r.argmax_p = Some(pp.into_vec());
            r
        }
    };
    rec.evaluations = Some(1);
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    println!("{}", rec.to_json_line());
    Ok(Outcome::Passed)
}

fn num_traits_to_f64(r: &stairstab::Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn type_record(dim: usize, family: RecordFamily, outcome: &TypeOutcome) -> RunRecord {
    let res = &outcome.result;
    let mut r = RunRecord::new("maximize", dim, family, res.value);
    r.type_label = Some(outcome.label.clone());
    r.method = Some(res.method.to_string());
    r.seed = Some(res.seed);
    r.argmax_q = Some(outcome.q.clone());
    r.argmax_p = Some(outcome.p.clone());
    r.evaluations = Some(res.evaluations as u64);
    r.wall_ms = res.wall_time_ms;
    r
}

#[allow(clippy::too_many_arguments)]
fn cmd_maximize(
    family: MaxFamily,
    dim: Option<usize>,
    type_label: Option<&str>,
    method: Method,
    seed: u64,
    budget: Option<usize>,
    out: Option<&PathBuf>,
    allow_high_dim: bool,
) -> anyhow::Result<Outcome> {
    let mut records = Vec::new();
    match family {
        MaxFamily::Grid => {
            let Some(d) = dim else {
                bail!("--dim is required for the grid family")
            };
            if d > 6 && !allow_high_dim {
                bail!("grid runs above d = 6 need --allow-high-dim");
            }
            let budget = budget.unwrap_or_else(|| default_budget(d));
            let outcomes = match type_label {
                Some(label) => {
                    let ty = PathType::new(d, parse_members(label)?)?;
                    if !ty.is_normalized() {
                        bail!("type {ty} is not normalized; list the valid types with `stairstab types --dim {d}`");
                    }
                    vec![maximize_grid_type(d, &ty, method, seed, budget)?]
                }
                None => maximize_all_types(d, Family::Grid, method, seed, budget)?.entries,
            };
            records.extend(
                outcomes
                    .iter()
                    .map(|o| type_record(d, RecordFamily::Grid, o)),
            );
        }
        MaxFamily::Diag3 => {
            if dim.is_some_and(|d| d != 3) {
                bail!("the diag3 family exists only for d = 3");
            }
            if type_label.is_some() {
                bail!("--type applies to the grid family");
            }
            let budget = budget.unwrap_or_else(|| default_budget(3));
            let all = maximize_all_types(3, Family::Diag3, method, seed, budget)?;
            records.extend(
                all.entries
                    .iter()
                    .map(|o| type_record(3, RecordFamily::Diag3, o)),
            );
        }
        MaxFamily::Fsl => {
            let Some(d) = dim else {
                bail!("--dim is required for the fsl family")
            };
            if type_label.is_some() {
                bail!("--type applies to the grid family");
            }
            let budget = budget.unwrap_or_else(|| default_budget(d));
            let res = maximize_fsl(d, method, seed, budget)?;
            let mut r = RunRecord::new("maximize", d, RecordFamily::Fsl, res.value);
            r.method = Some(res.method.to_string());
            r.seed = Some(seed);
            r.argmax_q = Some(res.argmax.clone());
            r.evaluations = Some(res.evaluations as u64);
            r.wall_ms = res.wall_time_ms;
            records.push(r);
        }
    }
    if records.len() > 1 {
        let best = records
            .iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .expect("nonempty")
            .clone();
        let mut overall = best;
        overall.command = "maximize_overall".to_string();
        overall.evaluations = Some(records.iter().filter_map(|r| r.evaluations).sum());
        overall.wall_ms = records.iter().map(|r| r.wall_ms).sum();
        records.push(overall);
    }

    let sink: Box<dyn Write> = match out {
        Some(path) => {
            Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    for r in &records {
        writeln!(sink, "{}", r.to_json_line())?;
    }
    sink.flush()?;
    Ok(Outcome::Passed)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use stairstab::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::BudgetExceeded { .. } | E::BudgetTooSmall { .. } | E::TooManyPoints { .. }) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Types { dim, json } => cmd_types(dim, json),
        Command::Eval {
            family,
            dim,
            q,
            p,
            theorem2,
        } => cmd_eval(family, dim, &q, &p, theorem2),
        Command::Maximize {
            family,
            dim,
            type_label,
            method,
            seed,
            budget,
            out,
            allow_high_dim,
        } => cmd_maximize(
            family,
            dim,
            type_label.as_deref(),
            method,
            seed,
            budget,
            out.as_ref(),
            allow_high_dim,
        ),
        Command::Verify {
            mode,
            dim,
            size,
            samples,
            trials,
            seed,
            family,
            q,
            p,
            limit,
            expect,
        } => verify::run(&verify::Args {
            mode,
            dim,
            sizes: size,
            samples,
            trials,
            seed,
            family,
            q,
            p,
            limit,
            expect,
        }),
        Command::Report {
            out,
            method,
            seed,
            accept_improvements,
        } => report::run(&out, method, seed, accept_improvements),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
