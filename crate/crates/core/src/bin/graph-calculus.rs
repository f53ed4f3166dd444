use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use graph_calculus::calculus::{divergence, gradient, laplacian_apply, laplacian_matrix, EdgeField, VertexFunction};
use graph_calculus::graph::{build_weights, degrees, KernelConfig, PointCloud};
use graph_calculus::io::{matrix_to_csv, vector_to_csv, write_atomic};
use graph_calculus::lab::{self, ExperimentSpec, ModeKind, Sampling};
use graph_calculus::manifold::Manifold;
use graph_calculus::plot::plot_series;
use graph_calculus::verify::{verify, VerifyConfig};
use graph_calculus::Error;

/// Discrete calculus on Gaussian-kernel graphs and Laplace–Beltrami
/// convergence experiments.
#[derive(Parser, Debug)]
#[command(name = "graph-calculus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Dense,
    Sparse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SamplingArg {
    Random,
    Grid,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::Random => Sampling::Random,
            SamplingArg::Grid => Sampling::Grid,
        }
    }
}

#[derive(clap::Args, Debug)]
struct GraphArgs {
    /// Point cloud CSV (one point per row).
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    epsilon: f64,
    /// Truncation threshold; 0 keeps the exact dense kernel.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute an experiment spec and write results.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Overrides master_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        tau: Option<f64>,
        /// Record measured wall time in results.csv (breaks byte-identical reruns).
        #[arg(long)]
        timing: bool,
    },
    /// Check the exact operator identities on random clouds.
    Verify {
        #[arg(long = "n", default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_asymmetry: bool,
    },
    /// Degree normalization against the curvature prediction for one cloud.
    DegreeCheck {
        #[arg(long)]
        manifold: String,
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "random")]
        sampling: SamplingArg,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
    },
    /// Edge gradient of a vertex function; writes an N x N row-major CSV.
    Grad {
        #[command(flatten)]
        graph: GraphArgs,
        /// Vertex function CSV (one value per line).
        #[arg(long)]
        function: PathBuf,
    },
    /// Divergence of an edge field given as an N x N CSV.
    Div {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        field: PathBuf,
    },
    /// Apply Δ = D^-1/2 W D^-1/2 - I to a vertex function, or export the matrix.
    Laplacian {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, required_unless_present = "matrix")]
        function: Option<PathBuf>,
        /// Export the dense Laplacian matrix instead.
        #[arg(long)]
        matrix: bool,
    },
    /// Print the manifold registry as JSON.
    ListManifolds,
    /// Print the test-function registry as JSON.
    ListFunctions {
        #[arg(long)]
        manifold: Option<String>,
    },
    /// Split a results CSV into one (x, y) series file per group.
    PlotData {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "N")]
        x: String,
        #[arg(long, default_value = "err_rel_median")]
        y: String,
        #[arg(long, default_value = "epsilon")]
        group_by: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure with its exit code: 1 for configuration/input problems, 2 when
/// experiment cells failed.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: 1,
            msg: e.to_string(),
        }
    }
}

fn fail(msg: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        msg: msg.into(),
    }
}

fn init_logging() {
    let level = match std::env::var("GRAPH_CALCULUS_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool, Failure> {
    if parallelism == 0 {
        return Err(fail("--parallelism must be >= 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| fail(format!("cannot start thread pool: {e}")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(|e| fail(format!("cannot write output: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(
    g: &GraphArgs,
) -> Result<(graph_calculus::graph::WeightMatrix, graph_calculus::graph::DegreeVector), Failure> {
    let cloud = PointCloud::load_csv(&g.points)?;
    let w = build_weights(&cloud, &KernelConfig::new(g.epsilon, g.tau)?)?;
    let d = degrees(&w);
    Ok((w, d))
}

fn run_experiment(
    config: &Path,
    out: &Path,
    parallelism: usize,
    seed: Option<u64>,
    mode: Option<ModeArg>,
    tau: Option<f64>,
    timing: bool,
) -> Result<(), Failure> {
    let text = fs::read_to_string(config)
        .map_err(|e| fail(format!("cannot read config {}: {e}", config.display())))?;
    let mut spec = ExperimentSpec::from_json(&text)
        .map_err(|e| fail(format!("config {} violates the experiment schema: {e}", config.display())))?;
    if let Some(s) = seed {
        spec.master_seed = s;
    }
    if let Some(m) = mode {
        spec.mode = match m {
            ModeArg::Dense => ModeKind::Dense,
            ModeArg::Sparse => ModeKind::Sparse,
        };
    }
    if tau.is_some() {
        spec.tau = tau;
    }
    spec.validate()?;
    fs::create_dir_all(out).map_err(|e| fail(format!("cannot create output directory {}: {e}", out.display())))?;
    let probe = tempfile::NamedTempFile::new_in(out);
    if let Err(e) = probe {
        return Err(fail(format!("output directory {} is not writable: {e}", out.display())));
    }

    let result = pool(parallelism)?.install(|| lab::sweep(&spec))?;
    let summary = lab::summarize(&result, timing);
    write_atomic(&out.join("results.csv"), lab::results_csv(&result, timing).as_bytes())
        .map_err(|e| fail(format!("cannot write results: {e}")))?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| fail(e.to_string()))?;
    write_atomic(&out.join("summary.json"), json.as_bytes())
        .map_err(|e| fail(format!("cannot write summary: {e}")))?;

    let failed = result.failed();
    log::info!("{} cells, {failed} failed", result.cells.len());
    if failed > 0 {
        return Err(Failure {
            code: 2,
            msg: format!("{failed} of {} cells failed; see summary.json", result.cells.len()),
        });
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            config,
            out,
            parallelism,
            seed,
            mode,
            tau,
            timing,
        } => run_experiment(&config, &out, parallelism, seed, mode, tau, timing),
        Command::Verify {
            n,
            seeds,
            seed,
            inject_asymmetry,
        } => {
            let report = verify(&VerifyConfig {
                n,
                seeds,
                master_seed: seed,
                inject_asymmetry,
            })?;
            for r in &report.results {
                println!(
                    "{} {:<48} worst {:.3e} (tol {:.0e})",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.worst,
                    r.tolerance
                );
            }
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure {
                    code: 2,
                    msg: "invariant suite failed".into(),
                })
            }
        }
        Command::DegreeCheck {
            manifold,
            n,
            epsilon,
            seed,
            sampling,
            tau,
            parallelism,
        } => {
            let m = Manifold::from_id(&manifold)?;
            let report = pool(parallelism)?.install(|| lab::degree_check(m, n, epsilon, seed, sampling.into(), tau))?;
            let json = serde_json::json!({
                "manifold": m.id(),
                "N": n,
                "epsilon": epsilon,
                "seed": seed,
                "predicted_correction": epsilon * m.scalar_curvature(&m.anchor_point()) / 6.0,
                "report": report,
            });
            println!("{}", serde_json::to_string_pretty(&json).map_err(|e| fail(e.to_string()))?);
            Ok(())
        }
        Command::Grad { graph, function } => {
            let (w, d) = load_graph(&graph)?;
            let f = VertexFunction::load_csv(&function)?;
            let g = gradient(&f, &w, &d)?;
            emit(graph.out.as_deref(), &matrix_to_csv(&g.to_dense()))
        }
        Command::Div { graph, field } => {
            let (w, d) = load_graph(&graph)?;
            let f = EdgeField::load_csv(&field)?.restrict_to(&w)?;
            let div = divergence(&f, &w, &d)?;
            emit(graph.out.as_deref(), &vector_to_csv(div.values()))
        }
        Command::Laplacian {
            graph,
            function,
            matrix,
        } => {
            let (w, d) = load_graph(&graph)?;
            if matrix {
                emit(graph.out.as_deref(), &matrix_to_csv(&laplacian_matrix(&w, &d)?))
            } else {
                let path = function.ok_or_else(|| fail("--function is required"))?;
                let f = VertexFunction::load_csv(&path)?;
                let lap = laplacian_apply(&f, &w, &d)?;
                emit(graph.out.as_deref(), &vector_to_csv(lap.values()))
            }
        }
        Command::ListManifolds => {
            let infos: Vec<_> = Manifold::ALL.iter().map(|m| m.descriptor()).collect();
            println!("{}", serde_json::to_string_pretty(&infos).map_err(|e| fail(e.to_string()))?);
            Ok(())
        }
        Command::ListFunctions { manifold } => {
            let selected = match manifold {
                Some(id) => vec![Manifold::from_id(&id)?],
                None => Manifold::ALL.to_vec(),
            };
            let entries: Vec<_> = selected
                .iter()
                .flat_map(|m| {
                    m.functions().iter().map(move |f| {
                        serde_json::json!({
                            "manifold": m.id(),
                            "id": f.id,
                            "description": f.description,
                        })
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&entries).map_err(|e| fail(e.to_string()))?);
            Ok(())
        }
        Command::PlotData {
            results,
            x,
            y,
            group_by,
            out,
        } => {
            let table = lab::read_table(&results)?;
            let series = plot_series(&table, &x, &y, &group_by)?;
            fs::create_dir_all(&out)
                .map_err(|e| fail(format!("cannot create output directory {}: {e}", out.display())))?;
            let mut notes = String::new();
            for s in &series {
                let safe: String = s
                    .group
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
                    .collect();
                let mut csv = format!("{x},{y}\n");
                for (a, b) in &s.points {
                    csv.push_str(&format!("{},{}\n", graph_calculus::io::fmt_f64(*a), graph_calculus::io::fmt_f64(*b)));
                }
                write_atomic(&out.join(format!("{group_by}={safe}.csv")), csv.as_bytes())
                    .map_err(|e| fail(format!("cannot write series: {e}")))?;
                let line = match &s.fit {
                    Some(f) => format!(
                        "{group_by}={} points={} slope={} intercept={} r2={}\n",
                        s.group,
                        s.points.len(),
                        graph_calculus::io::fmt_f64(f.slope),
                        graph_calculus::io::fmt_f64(f.intercept),
                        graph_calculus::io::fmt_f64(f.r_squared)
                    ),
                    None => format!("{group_by}={} points={} slope=n/a\n", s.group, s.points.len()),
                };
                notes.push_str(&line);
            }
            print!("{notes}");
            write_atomic(&out.join("slopes.txt"), notes.as_bytes())
                .map_err(|e| fail(format!("cannot write slopes: {e}")))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
