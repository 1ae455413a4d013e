//! Command-line front end. Every command prints one JSON envelope
//! `{tool, version, command, config, seed, result}` on stdout and a short
//! summary on stderr.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 budget exhausted or exact computation infeasible.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::fire::{self, BoundStatus, CellSet, FireError};
use crate::graph::{self, Budget, FiniteGraph, GraphError};
use crate::group::GroupSpec;
use crate::local::{collect_distribution, tv_distance, LocalError, NeighborhoodDistribution};
use crate::sampling::SeedSpec;
use crate::voronoi::{self, BvtParams, BvtSampler};
use crate::Error;

pub const TOOL: &str = "irelab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "irelab", version, about = "Invariant random equivalence relation lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat key=value file mirroring the flags; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads (0 = one per core). Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Write the JSON (or CSV) payload here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo check of the three tiling bounds, optionally against the exact law.
    #[command(args_override_self = true)]
    FireVerify(FireVerifyArgs),
    /// Bernoulli Voronoi tessellation tools.
    #[command(args_override_self = true)]
    Bvt {
        #[command(subcommand)]
        action: BvtCommand,
    },
    /// Finite-graph certificates.
    #[command(args_override_self = true)]
    Graph {
        #[command(subcommand)]
        action: GraphCommand,
    },
    /// Total variation distance between two neighborhood distributions.
    #[command(args_override_self = true)]
    BsDistance(BsDistanceArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct FireVerifyArgs {
    #[arg(long, default_value = "z:1")]
    pub group: String,
    /// "ball:r" or "explicit:<comma-separated normal forms>".
    #[arg(long = "cell-set")]
    pub cell_set: String,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compute the exact law by enumeration.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct BvtArgs {
    #[arg(long, default_value = "z:2")]
    pub group: String,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 50)]
    pub rmax: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum BvtCommand {
    /// Print sampled root cells.
    #[command(args_override_self = true)]
    Sample(BvtArgs),
    /// Check `E[1/|cell(o)|] = p`.
    #[command(args_override_self = true)]
    IntensityCheck(BvtArgs),
    /// Law of the root cell's size.
    #[command(args_override_self = true)]
    Histogram {
        #[command(flatten)]
        common: BvtArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Empirical law of the root's rooted neighborhood inside its cell.
    #[command(args_override_self = true)]
    Nbhd {
        #[command(flatten)]
        common: BvtArgs,
        #[arg(long, default_value_t = 2)]
        radius: u32,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Greedy,
}

#[derive(Subcommand, Debug)]
pub enum GraphCommand {
    /// Certificate for `(epsilon, k)`-hyperfiniteness.
    #[command(args_override_self = true)]
    Hyperfinite {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimum boundary ratio of connected sets of each size up to N.
    #[command(args_override_self = true)]
    Expansion {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that large induced subgraphs of an expander are not hyperfinite.
    #[command(args_override_self = true)]
    Robustness {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kappa: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct BsDistanceArgs {
    /// A distribution file, or the output of `bvt nbhd`.
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// What a finished command hands back to `main`.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Fire(FireError::OracleInfeasible { .. }) => EXIT_BUDGET,
        Error::Graph(GraphError::ExactInfeasible(_) | GraphError::BudgetExceeded { .. }) => EXIT_BUDGET,
        Error::Local(LocalError::TooLarge(_)) => EXIT_BUDGET,
        _ => EXIT_INVALID,
    }
}

struct Report {
    command: &'static str,
    config: Value,
    seed: u64,
    result: Value,
    summary: String,
    /// Replaces the JSON payload when set.
    csv: Option<String>,
    code: i32,
}

/// Parses `args` (including the program name), applies `--config`, runs
/// the command on a pool of `--workers` threads.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::apply_config_file(args) {
        Ok(a) => a,
        Err(e) => return Outcome::failure(EXIT_INVALID, e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            return Outcome {
                code,
                stdout: if code == EXIT_OK { e.to_string() } else { String::new() },
                stderr: if code == EXIT_OK { String::new() } else { e.to_string() },
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
        Ok(p) => p,
        Err(e) => return Outcome::failure(EXIT_INVALID, format!("cannot start {} workers: {e}", cli.workers)),
    };
    let report = match pool.install(|| dispatch(&cli.command)) {
        Ok(r) => r,
        Err(e) => return Outcome::failure(exit_code(&e), e),
    };
    let payload = match report.csv {
        Some(csv) => csv,
        None => {
            let envelope = json!({
                "tool": TOOL,
                "version": VERSION,
                "command": report.command,
                "config": report.config,
                "seed": report.seed,
                "result": report.result,
            });
            let mut s = serde_json::to_string_pretty(&envelope).expect("JSON values serialize");
            s.push('\n');
            s
        }
    };
    let stdout = match &cli.output {
        Some(path) => match std::fs::write(path, &payload) {
            Ok(()) => String::new(),
            Err(e) => return Outcome::failure(EXIT_INVALID, format!("cannot write {}: {e}", path.display())),
        },
        None => payload,
    };
    Outcome {
        code: report.code,
        stdout,
        stderr: report.summary,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn group(s: &str) -> Result<GroupSpec, Error> {
    Ok(s.parse::<GroupSpec>()?)
}

fn read_graph(path: &PathBuf) -> Result<FiniteGraph, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    Ok(FiniteGraph::parse(&text)?)
}

fn dispatch(cmd: &Command) -> Result<Report, Error> {
    match cmd {
        Command::FireVerify(a) => fire_verify(a),
        Command::Bvt { action } => bvt(action),
        Command::Graph { action } => graph_cmd(action),
        Command::BsDistance(a) => bs_distance(a),
    }
}

fn fire_verify(a: &FireVerifyArgs) -> Result<Report, Error> {
    let g = group(&a.group)?;
    let cell_set = CellSet::from_spec(g, &a.cell_set, a.delta)?;
    let seed = SeedSpec::new(a.seed, 0);
    let oracle = if a.oracle {
        Some(fire::compare_with_oracle(&cell_set, a.samples, seed)?)
    } else {
        None
    };
    let bounds = fire::verify_lemma_bounds(&cell_set, a.samples, seed)?;
    let all_pass = bounds.iter().all(|b| b.status == BoundStatus::Pass);
    let mut summary = format!(
        "fire-verify: |A| = {}, delta = {}, {} samples\n",
        cell_set.len(),
        cell_set.delta(),
        a.samples
    );
    for b in &bounds {
        let est = b.estimate.as_ref().map_or("n/a".to_string(), |e| format!("{:.6}", e.value));
        let _ = writeln!(
            summary,
            "  bound {:?}: estimate {est} vs {:.6} -> {:?}",
            b.bound_id, b.bound, b.status
        );
    }
    if let Some(o) = &oracle {
        let _ = writeln!(
            summary,
            "  exact P = {:.6} (MC off by {:.2} SE), exact E[size;hit] = {:.6} (MC off by {:.2} SE)",
            o.prob_exact, o.prob_deviation_se, o.size_exact, o.size_deviation_se
        );
    }
    Ok(Report {
        command: "fire-verify",
        config: to_value(a),
        seed: a.seed,
        result: json!({
            "cell_set": cell_set.elements().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "cell_set_size": cell_set.len(),
            "delta": cell_set.delta(),
            "window_size": fire::determinacy_window(&cell_set).len(),
            "bounds": to_value(&bounds),
            "all_pass": all_pass,
            "oracle": oracle.as_ref().map(to_value),
        }),
        summary,
        csv: None,
        code: if all_pass { EXIT_OK } else { EXIT_VERIFICATION },
    })
}

fn bvt_params(a: &BvtArgs) -> Result<BvtParams, Error> {
    BvtParams::new(group(&a.group)?, a.p, a.rmax)
}

fn bvt(cmd: &BvtCommand) -> Result<Report, Error> {
    match cmd {
        BvtCommand::Sample(a) => {
            let params = bvt_params(a)?;
            let seed = SeedSpec::new(a.seed, 0);
            let cells = crate::stats::run_samples(a.samples, |i| voronoi::sample_bvt_root_cell(&params, seed.stream(i)));
            let rows: Vec<Value> = cells
                .iter()
                .map(|c| {
                    json!({
                        "determined": c.determined,
                        "center": c.center.as_ref().map(ToString::to_string),
                        "nearest_distance": c.nearest_distance,
                        "size": c.cell.size(),
                        "sampled_radius": c.sampled_radius,
                        "members": c.cell.members.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let undetermined = cells.iter().filter(|c| !c.determined).count();
            Ok(Report {
                command: "bvt sample",
                config: to_value(a),
                seed: a.seed,
                summary: format!("bvt sample: {} cells, {undetermined} undetermined\n", cells.len()),
                result: json!({ "cells": rows, "undetermined": undetermined }),
                csv: None,
                code: EXIT_OK,
            })
        }
        BvtCommand::IntensityCheck(a) => {
            let params = bvt_params(a)?;
            let r = voronoi::bvt_intensity_identity(&params, a.samples, SeedSpec::new(a.seed, 0))?;
            let mut summary = format!(
                "bvt intensity-check: E[1/|cell|] = {:.6} +- {:.6} vs p = {} ({:.2} SE), undetermined {:.4}\n",
                r.estimate.value, r.estimate.std_error, r.p, r.deviation_in_se, r.undetermined_fraction
            );
            if r.warning {
                summary.push_str("  warning: large undetermined fraction, raise --rmax\n");
            }
            Ok(Report {
                command: "bvt intensity-check",
                config: to_value(a),
                seed: a.seed,
                result: to_value(&r),
                summary,
                csv: None,
                code: if r.within_4se { EXIT_OK } else { EXIT_VERIFICATION },
            })
        }
        BvtCommand::Histogram { common, format } => {
            let params = bvt_params(common)?;
            let h = voronoi::bvt_cell_size_histogram(&params, common.samples, SeedSpec::new(common.seed, 0));
            let csv = (*format == Format::Csv).then(|| {
                let mut s = String::from("size,mass\n");
                for (k, m) in &h.masses {
                    let _ = writeln!(s, "{k},{m}");
                }
                let _ = writeln!(s, "undetermined,{}", h.undetermined_fraction);
                s
            });
            let mut config = to_value(common);
            config["format"] = to_value(format);
            Ok(Report {
                command: "bvt histogram",
                config,
                seed: common.seed,
                summary: format!(
                    "bvt histogram: {} sizes observed, undetermined {:.4}\n",
                    h.masses.len(),
                    h.undetermined_fraction
                ),
                result: to_value(&h),
                csv,
                code: EXIT_OK,
            })
        }
        BvtCommand::Nbhd { common, radius } => {
            let params = bvt_params(common)?;
            let mut dist = collect_distribution(&BvtSampler(params), *radius, common.samples, SeedSpec::new(common.seed, 0))?;
            dist.provenance.insert("p".into(), params.p.p().into());
            dist.provenance.insert("rmax".into(), params.r_max.into());
            let mut config = to_value(common);
            config["radius"] = (*radius).into();
            Ok(Report {
                command: "bvt nbhd",
                config,
                seed: common.seed,
                summary: format!(
                    "bvt nbhd: radius {radius}, {} neighborhood types, {} undetermined of {}\n",
                    dist.counts.len(),
                    dist.undetermined,
                    dist.total
                ),
                result: to_value(&dist),
                csv: None,
                code: EXIT_OK,
            })
        }
    }
}

fn graph_cmd(cmd: &GraphCommand) -> Result<Report, Error> {
    match cmd {
        GraphCommand::Hyperfinite {
            input,
            epsilon,
            k,
            mode,
            seed,
        } => {
            let g = read_graph(input)?;
            let cert = match mode {
                Mode::Exact => graph::hyperfinite_exact(
                    &g,
                    *epsilon,
                    *k,
                    Budget::from_env(graph::DEFAULT_NODE_BUDGET),
                )?,
                Mode::Greedy => graph::hyperfinite_greedy(&g, *epsilon, *k)?,
            };
            let checked = graph::verify_certificate(&g, &cert);
            let summary = format!(
                "graph hyperfinite ({mode:?}): {} with {} removed edges of {} allowed{}\n",
                if cert.verdict { "yes" } else if cert.heuristic { "not certified" } else { "no" },
                cert.cut_size,
                epsilon * g.vertex_count() as f64,
                checked.as_ref().err().map_or(String::new(), |e| format!("; CERTIFICATE INVALID: {e}"))
            );
            Ok(Report {
                command: "graph hyperfinite",
                config: json!({
                    "input": input.display().to_string(),
                    "epsilon": epsilon,
                    "k": k,
                    "mode": to_value(mode),
                    "seed": seed,
                }),
                seed: *seed,
                result: to_value(&cert),
                summary,
                csv: None,
                code: if checked.is_ok() { EXIT_OK } else { EXIT_VERIFICATION },
            })
        }
        GraphCommand::Expansion { input, n, format, seed } => {
            let g = read_graph(input)?;
            let p = graph::expansion_profile(&g, *n, Budget::from_env(graph::DEFAULT_SET_BUDGET))?;
            let csv = (*format == Format::Csv).then(|| {
                let mut s = String::from("size,boundary,ratio,witness\n");
                for m in &p.minima {
                    let w: Vec<String> = m.witness.iter().map(ToString::to_string).collect();
                    let _ = writeln!(s, "{},{},{},{}", m.size, m.boundary, m.ratio, w.join(" "));
                }
                s
            });
            Ok(Report {
                command: "graph expansion",
                config: json!({
                    "input": input.display().to_string(),
                    "N": n,
                    "format": to_value(format),
                    "seed": seed,
                }),
                seed: *seed,
                summary: format!(
                    "graph expansion: kappa = {} over {} connected sets\n",
                    p.kappa.map_or("n/a".to_string(), |k| k.to_string()),
                    p.sets_enumerated
                ),
                result: to_value(&p),
                csv,
                code: EXIT_OK,
            })
        }
        GraphCommand::Robustness {
            input,
            kappa,
            n,
            epsilon,
            seed,
        } => {
            let g = read_graph(input)?;
            let r = graph::robustness_check(&g, *kappa, *n, *epsilon, *seed)?;
            Ok(Report {
                command: "graph robustness",
                config: json!({
                    "input": input.display().to_string(),
                    "kappa": kappa,
                    "N": n,
                    "epsilon": epsilon,
                    "seed": seed,
                }),
                seed: *seed,
                summary: format!(
                    "graph robustness: {} subsets checked ({:?}), {} counterexamples\n",
                    r.subsets_checked,
                    r.mode,
                    r.counterexamples.len()
                ),
                code: if r.passes { EXIT_OK } else { EXIT_VERIFICATION },
                result: to_value(&r),
                csv: None,
            })
        }
    }
}

/// Reads a distribution, either bare or as the `result` of an envelope.
fn read_distribution(path: &PathBuf) -> Result<NeighborhoodDistribution, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let mut v: Value =
        serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    if let Some(inner) = v.get_mut("result") {
        v = inner.take();
    }
    serde_json::from_value(v).map_err(|e| Error::Invalid(format!("{}: not a neighborhood distribution: {e}", path.display())))
}

fn bs_distance(a: &BsDistanceArgs) -> Result<Report, Error> {
    let da = read_distribution(&a.a)?;
    let db = read_distribution(&a.b)?;
    let tv = tv_distance(&da, &db).map_err(|e| match e {
        LocalError::RadiusMismatch(..) | LocalError::Empty => Error::Invalid(e.to_string()),
        other => other.into(),
    })?;
    Ok(Report {
        command: "bs-distance",
        config: json!({
            "a": a.a.display().to_string(),
            "b": a.b.display().to_string(),
            "seed": a.seed,
        }),
        seed: a.seed,
        summary: format!("bs-distance: TV = {tv:.6} (samples {} vs {})\n", da.total, db.total),
        result: json!({
            "tv_distance": tv,
            "radius": da.radius,
            "samples_a": da.total,
            "samples_b": db.total,
            "undetermined_a": da.undetermined,
            "undetermined_b": db.undetermined,
        }),
        csv: None,
        code: EXIT_OK,
    })
}
