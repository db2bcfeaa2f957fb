//! `floodgraph`: floodings on metric graphs from the command line.
//!
//! Exit codes: 0 pass, 1 gate failure, 2 usage/input error, 3 sampling
//! budget exhausted. Identical command and seed produce byte-identical
//! output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use floodgraph::entropy::xlogx;
use floodgraph::experiments::{
    run_circle, run_convergence, run_grid_diagnostic, run_regular_tree, run_segment, run_star_m1,
    run_star_m2, ConvergenceConfig, ExperimentReport,
};
use floodgraph::flooding::{simulate, UniformPolicy};
use floodgraph::graph::{GraphPoint, MetricGraph};
use floodgraph::labeling::{find_peaks, sample_conditioned, LabelError};
use floodgraph::tree::{centroid, optimal_flooding};

#[derive(Parser)]
#[command(name = "floodgraph", version, about = "floodings on metric graphs")]
struct Cli {
    /// Number of worker threads (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyFlag {
    Optimal,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file: one `u v length` edge per line, `#` comments.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print the centroid of a metric tree.
    Centroid {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Simulate a flooding and print its stage trace.
    Flood {
        #[command(flatten)]
        graph: GraphArg,
        /// Number of sources.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum, default_value_t = PolicyFlag::Optimal)]
        policy: PolicyFlag,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the entropy of a flooding trace file.
    Beta {
        /// Trace file as produced by `flood`.
        trace: PathBuf,
    },
    /// Sample conditioned labelings of a subdivision graph.
    Sample {
        #[command(flatten)]
        graph: GraphArg,
        /// Subdivision level.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Conditioned peak count.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rejection budget (total draws).
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Sample dump file (default stdout): `seed trial peakcount labels...`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Peak-location histogram CSV (`vertex count frequency`).
        #[arg(long)]
        hist: Option<PathBuf>,
    },
    /// Run a validation suite; exit 0 iff all gates pass.
    Validate {
        /// circle | segment | star-m1 | star-m2 | regular-tree | convergence | grid | all
        suite: String,
        /// Shrink the long-running suites.
        #[arg(long)]
        fast: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Write reports (and convergence CSV) here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore failure: the global pool may already exist in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn input_err(message: impl Into<String>) -> CliError {
    CliError { code: 2, message: message.into() }
}

fn load_graph(path: &PathBuf) -> Result<Arc<MetricGraph>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    MetricGraph::parse(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| input_err(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Centroid { graph } => {
            let g = load_graph(&graph.graph)?;
            let c = centroid(&g).map_err(|e| input_err(e.to_string()))?;
            println!("edge {} offset {}", c.edge, c.offset);
            Ok(ExitCode::SUCCESS)
        }
        Command::Flood { graph, m, policy, out } => {
            let g = load_graph(&graph.graph)?;
            let flooding = match policy {
                PolicyFlag::Optimal => {
                    let opt = optimal_flooding(&g, m).map_err(|e| input_err(e.to_string()))?;
                    opt.flooding
                }
                PolicyFlag::Uniform => {
                    let sources = spread_sources(&g, m)?;
                    simulate(&g, &sources, &mut UniformPolicy)
                        .map_err(|e| input_err(e.to_string()))?
                }
            };
            write_or_print(&out, &flooding.trace())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Beta { trace } => {
            let text = fs::read_to_string(&trace)
                .map_err(|e| input_err(format!("cannot read {}: {e}", trace.display())))?;
            let b = beta_of_trace(&text)?;
            println!("{b}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample { graph, n, m, trials, seed, budget, out, hist } => {
            let g = load_graph(&graph.graph)?;
            let sub = g.subdivide(n.max(1));
            let comb = sub.combinatorial();
            let run = sample_conditioned(comb, m, trials, seed, budget).map_err(|e| match e {
                LabelError::BudgetExhausted { .. } => CliError {
                    code: 3,
                    message: format!("{e} (acceptance rate too low at this size)"),
                },
                other => input_err(other.to_string()),
            })?;
            let mut dump = String::new();
            let mut peak_counts = vec![0u64; comb.vertex_count()];
            for s in &run.samples {
                let peaks = find_peaks(comb, &s.labeling);
                dump.push_str(&format!("{seed} {} {}", s.trial, peaks.count()));
                for l in s.labeling.labels() {
                    dump.push_str(&format!(" {l}"));
                }
                dump.push('\n');
                for &v in &peaks.vertices {
                    peak_counts[v] += 1;
                }
            }
            write_or_print(&out, &dump)?;
            if let Some(hist_path) = hist {
                let mut csv = String::from("vertex,count,frequency\n");
                for (v, &c) in peak_counts.iter().enumerate() {
                    csv.push_str(&format!(
                        "{v},{c},{}\n",
                        c as f64 / run.samples.len() as f64
                    ));
                }
                fs::write(&hist_path, csv)
                    .map_err(|e| input_err(format!("cannot write {}: {e}", hist_path.display())))?;
            }
            eprintln!(
                "accepted {} of {} draws (acceptance rate {:.3e})",
                run.samples.len(),
                run.draws,
                run.acceptance_rate
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { suite, fast, seed, eps, trials, out, format } => {
            validate(&suite, fast, seed, eps, trials, out, format)
        }
    }
}

/// Deterministic source spread for heuristic floodings on arbitrary graphs:
/// `m` points at arc positions `(i + 1/2) zeta / m` along the concatenated
/// edges.
fn spread_sources(g: &Arc<MetricGraph>, m: usize) -> Result<Vec<GraphPoint>, CliError> {
    if m == 0 {
        return Err(input_err("--m must be positive"));
    }
    let zeta = g.total_length();
    let mut sources = Vec::with_capacity(m);
    for i in 0..m {
        let mut arc = (i as f64 + 0.5) / m as f64 * zeta;
        let mut point = None;
        for e in 0..g.edge_count() {
            if arc <= g.edge_len(e) {
                point = Some(g.point(e, arc).map_err(|e| input_err(e.to_string()))?);
                break;
            }
            arc -= g.edge_len(e);
        }
        sources.push(point.unwrap_or_else(|| {
            g.point(g.edge_count() - 1, g.edge_len(g.edge_count() - 1)).unwrap()
        }));
    }
    Ok(sources)
}

/// Entropy of a trace: both the compact and the expanded form, checked
/// against each other; rates must lie on the simplex per stage.
fn beta_of_trace(text: &str) -> Result<f64, CliError> {
    struct StageAcc {
        duration: f64,
        rates: Vec<f64>,
    }
    let mut stages: Vec<StageAcc> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "stage" {
            if fields.len() != 4 {
                return Err(input_err(format!("line {}: bad stage record", i + 1)));
            }
            let t0: f64 = fields[2]
                .parse()
                .map_err(|_| input_err(format!("line {}: bad t_start", i + 1)))?;
            let t1: f64 = fields[3]
                .parse()
                .map_err(|_| input_err(format!("line {}: bad t_end", i + 1)))?;
            stages.push(StageAcc { duration: t1 - t0, rates: Vec::new() });
        } else {
            if fields.len() != 4 {
                return Err(input_err(format!("line {}: bad arm record", i + 1)));
            }
            let rate: f64 = fields[3]
                .parse()
                .map_err(|_| input_err(format!("line {}: bad rate", i + 1)))?;
            match stages.last_mut() {
                Some(s) => s.rates.push(rate),
                None => return Err(input_err(format!("line {}: arm before stage", i + 1))),
            }
        }
    }
    if stages.is_empty() {
        return Err(input_err("empty trace"));
    }
    let mut compact = 0.0;
    let mut expanded = 0.0;
    for (k, s) in stages.iter().enumerate() {
        let sum: f64 = s.rates.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || s.rates.iter().any(|&z| z < -1e-12) {
            return Err(input_err(format!(
                "BadPolicy: stage {} rates sum to {sum}, expected 1",
                k + 1
            )));
        }
        compact -= s.duration * s.rates.iter().map(|&z| xlogx(z)).sum::<f64>();
        expanded += xlogx(s.duration)
            - s.rates.iter().map(|&z| xlogx(z * s.duration)).sum::<f64>();
    }
    if (compact - expanded).abs() > 1e-9 {
        return Err(input_err(format!(
            "FormMismatch: compact {compact} vs expanded {expanded}"
        )));
    }
    Ok(compact)
}

fn validate(
    suite: &str,
    fast: bool,
    seed: u64,
    eps: f64,
    trials: usize,
    out: Option<PathBuf>,
    format: Format,
) -> Result<ExitCode, CliError> {
    let mut reports: Vec<ExperimentReport> = Vec::new();
    let mut extra = String::new();
    let mut run_suite = |name: &str, reports: &mut Vec<ExperimentReport>| -> Result<(), CliError> {
        match name {
            "circle" => {
                for m in 1..=3 {
                    reports.push(run_circle(m));
                }
            }
            "segment" => {
                for m in 1..=if fast { 2 } else { 3 } {
                    reports.push(run_segment(m));
                }
            }
            "star-m1" => {
                for r in [(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (4.0, 1.0, 1.0), (3.0, 1.0, 1.0)] {
                    reports.push(run_star_m1(r.0, r.1, r.2));
                }
            }
            "star-m2" => {
                reports.push(run_star_m2(1.0, 1.0, 1.0));
                reports.push(run_star_m2(200.0, 1.0, 0.5));
                reports.push(run_star_m2(1.0, 5.0 / 6.0, 2.0 / 5.0));
            }
            "regular-tree" => {
                reports.push(run_regular_tree(2, 2));
                if !fast {
                    reports.push(run_regular_tree(2, 3));
                }
            }
            "convergence" => {
                let cfg = ConvergenceConfig {
                    n_list: if fast { vec![2, 4] } else { vec![4, 8, 16] },
                    m: 1,
                    trials,
                    seed,
                    eps,
                    budget: 10_000_000,
                };
                for edges in [
                    vec![("a", "b", 1.0)],
                    vec![("c", "l1", 1.0), ("c", "l2", 1.0), ("c", "l3", 1.0)],
                ] {
                    let g = MetricGraph::from_edges(&edges).unwrap();
                    let res = run_convergence(&g, &cfg).map_err(|e| match e {
                        LabelError::BudgetExhausted { .. } => {
                            CliError { code: 3, message: e.to_string() }
                        }
                        other => input_err(other.to_string()),
                    })?;
                    extra.push_str(&res.csv);
                    reports.push(res.report);
                }
            }
            "grid" => {
                reports.push(run_grid_diagnostic(5, 5, &[10.0, 20.0, 30.0]));
            }
            other => {
                return Err(input_err(format!(
                    "unknown suite `{other}` (expected circle, segment, star-m1, star-m2, regular-tree, convergence, grid, or all)"
                )))
            }
        }
        Ok(())
    };

    if suite == "all" {
        for name in ["circle", "segment", "star-m1", "star-m2", "regular-tree", "convergence", "grid"]
        {
            run_suite(name, &mut reports)?;
        }
    } else {
        run_suite(suite, &mut reports)?;
    }

    let mut rendered = String::new();
    for r in &reports {
        rendered.push_str(&match format {
            Format::Text => r.render(),
            Format::Csv => r.render_csv(),
        });
    }
    rendered.push_str(&extra);
    write_or_print(&out, &rendered)?;
    let all_pass = reports.iter().all(|r| r.pass());
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
