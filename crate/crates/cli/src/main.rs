//! `graphiso`: invariants and inequality checks for weighted metric graphs.
//!
//! Exit status: 0 when every applicable check holds, 1 on usage or input
//! errors, 2 when some check is violated.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use graphiso::analysis::{self, fmt_real, round_json, Analysis, AnalysisOptions, BatchKind, BatchRow};
use graphiso::graph::generate::{self, GraphKind};
use graphiso::io::{graph_to_json, matrix_to_json, read_graph, read_matrix};
use graphiso::subshift::{self, equality_family};
use graphiso::sysvol::{bs_lower_bound, bs_report, optimize_systolic_volume};
use graphiso::{Graph, InequalityReport};

const THREADS_VAR: &str = "GRAPHISO_THREADS";

#[derive(Parser)]
#[command(name = "graphiso", version, about = "Systolic, entropy and stable-norm checks for metric graphs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Tolerance of the systolic-volume optimiser.
    #[arg(long, global = true, default_value_t = graphiso::sysvol::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo samples for the stable unit ball.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: usize,
    /// Ball radius for the growth estimate [default: 25 / shortest edge].
    #[arg(long, global = true)]
    rmax: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Never fall back to sampling for the stable ball volume.
    #[arg(long, global = true)]
    exact_only: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one graph file.
    Analyze {
        file: PathBuf,
        /// Skip the ball-growth estimate.
        #[arg(long)]
        no_estimate: bool,
        /// Skip the systolic-volume optimiser.
        #[arg(long)]
        no_optimize: bool,
    },
    /// Generate and analyse a seeded random corpus; CSV by default.
    Batch(BatchArgs),
    /// Entropy, minimal period and the period bound for a 0/1 matrix file.
    Subshift { file: PathBuf },
    /// Optimal normalised weights for a graph file.
    Optimize { file: PathBuf },
    /// Write an example graph (or matrix) as JSON.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BatchFamily {
    RandomWeighted,
    RandomRegular,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long, value_enum)]
    kind: BatchFamily,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    betti_min: usize,
    #[arg(long, default_value_t = 8)]
    betti_max: usize,
    #[arg(long, default_value_t = 0.1)]
    weight_min: f64,
    #[arg(long, default_value_t = 10.0)]
    weight_max: f64,
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
    valences: Vec<usize>,
    /// Also run the ball-growth estimate per instance.
    #[arg(long)]
    estimate: bool,
    /// Also run the systolic-volume optimiser per instance.
    #[arg(long)]
    optimize: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenerateFamily {
    Bouquet,
    Theta,
    Complete,
    Cycle,
    RandomRegular,
    RandomWeighted,
    /// Transition matrix of the period-bound equality case.
    EqualityMatrix,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GenerateFamily,
    /// Edge weights for bouquets and theta graphs.
    #[arg(long, value_delimiter = ',')]
    weights: Vec<f64>,
    /// Vertex count, or the matrix parameter for `equality-matrix`.
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    valence: usize,
    #[arg(long, default_value_t = 1)]
    betti_min: usize,
    #[arg(long, default_value_t = 8)]
    betti_max: usize,
    #[arg(long, default_value_t = 0.1)]
    weight_min: f64,
    #[arg(long, default_value_t = 10.0)]
    weight_max: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(cli);
    if let Err(e) = &result {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(exit_status(&result))
}

/// 0 when every check holds, 1 on errors, 2 when some check is violated.
fn exit_status(result: &anyhow::Result<usize>) -> u8 {
    match result {
        Ok(0) => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).with_context(|| {
        format!("{THREADS_VAR} must be a positive integer, got `{raw}`")
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

/// Runs a command and returns the number of violated checks.
fn run(cli: Cli) -> anyhow::Result<usize> {
    configure_threads()?;
    let c = &cli.common;
    if !(c.tolerance > 0.0 && c.tolerance.is_finite()) {
        bail!("--tolerance must be positive");
    }
    if c.rmax.is_some_and(|r| !(r > 0.0 && r.is_finite())) {
        bail!("--rmax must be positive");
    }
    let options = AnalysisOptions {
        tolerance: c.tolerance,
        seed: c.seed,
        samples: c.samples,
        r_max: c.rmax,
        exact_only: c.exact_only,
        ..AnalysisOptions::default()
    };
    let mut out = std::io::stdout().lock();
    match &cli.command {
        Command::Analyze {
            file,
            no_estimate,
            no_optimize,
        } => {
            let g: Graph = read_graph(file)?;
            let opts = AnalysisOptions {
                estimate: !no_estimate,
                optimize: !no_optimize,
                ..options
            };
            let a = analysis::analyze(&g, &opts)?;
            match c.format.unwrap_or(Format::Json) {
                Format::Json => print_json(&mut out, &a.to_json())?,
                Format::Table => print_analysis_table(&mut out, &a)?,
                Format::Csv => {
                    let row = BatchRow {
                        index: 0,
                        seed: c.seed,
                        graph: g,
                        analysis: a.clone(),
                    };
                    analysis::write_csv(std::slice::from_ref(&row), &mut out)?;
                }
            }
            Ok(a.violations())
        }
        Command::Batch(args) => {
            let kind = match args.kind {
                BatchFamily::RandomWeighted => BatchKind::RandomWeighted {
                    betti: (args.betti_min, args.betti_max),
                    weight: (args.weight_min, args.weight_max),
                },
                BatchFamily::RandomRegular => BatchKind::RandomRegular {
                    n: (args.n_min, args.n_max),
                    valences: args.valences.clone(),
                },
            };
            let opts = AnalysisOptions {
                estimate: args.estimate,
                optimize: args.optimize,
                ..options
            };
            let rows = analysis::run_batch(&kind, args.count, c.seed, &opts)?;
            match c.format.unwrap_or(Format::Csv) {
                Format::Csv => analysis::write_csv(&rows, &mut out)?,
                Format::Json => {
                    let items: Vec<Value> = rows
                        .iter()
                        .map(|r| json!({"index": r.index, "seed": r.seed, "report": r.analysis.to_json()}))
                        .collect();
                    print_json(&mut out, &Value::Array(items))?;
                }
                Format::Table => print_batch_table(&mut out, &rows)?,
            }
            Ok(rows.iter().map(|r| r.analysis.violations()).sum())
        }
        Command::Subshift { file } => {
            let a = read_matrix(file)?;
            let report = subshift::check_prop6(&a)?;
            let h: f64 = subshift::topological_entropy(&a)?;
            let body = json!({
                "n": a.size(),
                "h_top": h,
                "minimal_period": subshift::minimal_period(&a)?,
                "b_a": subshift::betti_b_a(&a),
                "weakly_connected": a.is_weakly_connected(),
                "check": report,
            });
            match c.format.unwrap_or(Format::Json) {
                Format::Table => print_checks(&mut out, std::slice::from_ref(&report))?,
                _ => print_json(&mut out, &rounded(body))?,
            }
            Ok(usize::from(report.violated()))
        }
        Command::Optimize { file } => {
            let g: Graph = read_graph(file)?;
            let opt = optimize_systolic_volume(&g, c.tolerance)?;
            let report = bs_report(&g, &opt);
            let weights: serde_json::Map<String, Value> =
                g.edges().iter().zip(&opt.weights).map(|(e, &w)| (e.id.clone(), json!(w))).collect();
            let active: Vec<Value> = opt
                .active
                .iter()
                .map(|(cycle, y)| json!({"edges": cycle.edge_ids(&g), "length": cycle.length, "packing_weight": y}))
                .collect();
            let bound = bs_lower_bound::<f64>(g.betti_number()).ok();
            let body = json!({
                "sigma": opt.sigma,
                "weights": weights,
                "active_cycles": active,
                "bs_lower_bound": bound,
                "systole": opt.systole,
                "lower_bound": opt.lower_bound,
                "upper_bound": opt.upper_bound,
                "check": report,
            });
            match c.format.unwrap_or(Format::Json) {
                Format::Table => {
                    writeln!(out, "sigma  {}", fmt_real(opt.sigma))?;
                    for (id, w) in &weights {
                        writeln!(out, "  {id:<12} {}", fmt_real(w.as_f64().unwrap_or(f64::NAN)))?;
                    }
                    print_checks(&mut out, std::slice::from_ref(&report))?;
                }
                _ => print_json(&mut out, &rounded(body))?,
            }
            Ok(usize::from(report.violated()))
        }
        Command::Generate(args) => {
            let text = generate_json(args, c.seed)?;
            writeln!(out, "{text}")?;
            Ok(0)
        }
    }
}

fn generate_json(args: &GenerateArgs, seed: u64) -> anyhow::Result<String> {
    let kind = match args.kind {
        GenerateFamily::EqualityMatrix => return Ok(matrix_to_json(&equality_family(args.n)?)),
        GenerateFamily::Bouquet | GenerateFamily::Theta if args.weights.is_empty() => {
            bail!("--weights is required for this kind")
        }
        GenerateFamily::Bouquet => GraphKind::Bouquet {
            weights: args.weights.clone(),
        },
        GenerateFamily::Theta => GraphKind::Theta {
            weights: args.weights.clone(),
        },
        GenerateFamily::Complete => GraphKind::Complete { n: args.n },
        GenerateFamily::Cycle => GraphKind::Cycle { n: args.n },
        GenerateFamily::RandomRegular => GraphKind::RandomRegular {
            n: args.n,
            valence: args.valence,
        },
        GenerateFamily::RandomWeighted => GraphKind::RandomWeighted {
            betti: (args.betti_min, args.betti_max),
            weight: (args.weight_min, args.weight_max),
        },
    };
    let g: Graph = generate::generate(&kind, seed)?;
    Ok(graph_to_json(&g))
}

fn rounded(mut v: Value) -> Value {
    round_json(&mut v);
    v
}

fn print_json(out: &mut impl Write, v: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)
}

fn opt_real(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_else(|| "-".into())
}

fn print_analysis_table(out: &mut impl Write, a: &Analysis) -> std::io::Result<()> {
    let rows = [
        ("vertices", a.vertices.to_string()),
        ("edges", a.edges.to_string()),
        ("betti", a.betti.to_string()),
        ("volume", fmt_real(a.volume)),
        ("valence", format!("{}..{}", a.valence_min, a.valence_max)),
        ("systole", a.systole.map(fmt_real).unwrap_or_else(|| "inf".into())),
        ("systole_cycle", a.systole_cycle.join(" ")),
        ("h_vol", fmt_real(a.h_vol)),
        ("h_vol_estimate", opt_real(a.h_vol_estimate)),
        ("residual", opt_real(a.residual)),
        ("c_min_literal", opt_real(a.c_min_literal)),
        ("c_min_maximal", opt_real(a.c_min_maximal)),
        ("c_max", opt_real(a.c_max)),
        ("stable_ball_volume", opt_real(a.stable_ball_volume)),
        (
            "ci99",
            a.ci99.map(|[lo, hi]| format!("[{}, {}]", fmt_real(lo), fmt_real(hi))).unwrap_or_else(|| "-".into()),
        ),
        ("sigma", opt_real(a.sigma)),
    ];
    for (key, value) in rows {
        writeln!(out, "{key:<20} {value}")?;
    }
    if let Some(note) = &a.estimate_note {
        writeln!(out, "{:<20} {note}", "estimate_note")?;
    }
    writeln!(out)?;
    print_checks(out, &a.checks)
}

fn print_checks(out: &mut impl Write, checks: &[InequalityReport]) -> std::io::Result<()> {
    writeln!(out, "{:<22} {:>18} {:>18} {:>18}  status", "check", "left", "right", "slack")?;
    for r in checks {
        let status = match r.holds {
            None => "n/a",
            Some(true) if r.equality => "equality",
            Some(true) => "ok",
            Some(false) => "VIOLATED",
        };
        writeln!(
            out,
            "{:<22} {:>18} {:>18} {:>18}  {status}",
            r.name,
            opt_real(r.left),
            opt_real(r.right),
            opt_real(r.slack)
        )?;
    }
    Ok(())
}

fn print_batch_table(out: &mut impl Write, rows: &[BatchRow]) -> std::io::Result<()> {
    writeln!(out, "{:>5} {:>4} {:>4} {:>5} {:>14} {:>14} {:>5}", "index", "|V|", "|E|", "b", "systole", "h_vol", "viol")?;
    for r in rows {
        let a = &r.analysis;
        writeln!(
            out,
            "{:>5} {:>4} {:>4} {:>5} {:>14} {:>14} {:>5}",
            r.index,
            a.vertices,
            a.edges,
            a.betti,
            a.systole.map(fmt_real).unwrap_or_else(|| "inf".into()),
            fmt_real(a.h_vol),
            a.violations()
        )?;
    }
    Ok(())
}
