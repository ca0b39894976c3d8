//! girg-lab command line: sample MCD / L-infinity GIRGs and run the
//! expansion, spectral, and spreading analyses described by a JSON config.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use girg_lab::config::{load_config, AnalysisKind, ExperimentConfig};
use girg_lab::error::Result;
use girg_lab::expansion::InducedMode;
use girg_lab::experiments::{run_experiment, sample_for_run, OutputFormat};
use girg_lab::io::save_graph;
use girg_lab::sampler::{sample_graph_naive, sample_induced_by_weight};
use girg_lab::Real;

#[derive(Parser)]
#[command(
    name = "girg-lab",
    version,
    about = "Minimum-component-distance GIRG sampling and expansion audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config (required by every subcommand).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Replace the config's seed list with this single seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (also env GIRG_LAB_THREADS; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Results table format.
    #[arg(long, global = true, value_enum, default_value_t = CliFormat::Csv)]
    format: CliFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

impl From<CliFormat> for OutputFormat {
    fn from(f: CliFormat) -> Self {
        match f {
            CliFormat::Csv => OutputFormat::Csv,
            CliFormat::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample graphs and write <out>/graph-<seed>.{edges,verts}.
    Generate {
        /// Use the quadratic reference sampler (same output, no strips).
        #[arg(long)]
        naive: bool,
    },
    /// Sample and write the configured induced subgraph per seed.
    Induce,
    /// Strip decomposition summary and the spread of the induced set.
    Strips,
    /// Analytic cover bound and its empirical frequency.
    CoverBound,
    /// Worst-set expansion probes against the predicted shape.
    Expansion,
    /// Normalized Laplacian gap with Cheeger bounds.
    Spectral,
    /// Lazy random walk mixing estimate.
    Walk,
    /// Synchronous push rumor rounds.
    Rumor,
    /// SI spread rounds.
    Si,
    /// Hyperplane cut sizes per coordinate of the full graph.
    CutContrast,
    /// Every configured analysis for every seed.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let from_env = std::env::var("GIRG_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(threads) = flag.or(from_env) {
        // Ignore a pool that some embedding already built.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn run(cli: Cli) -> Result<()> {
    let config_path = cli
        .config
        .ok_or_else(|| girg_lab::Error::InvalidParameter("--config is required".into()))?;
    let mut config = load_config(&config_path)?;
    if let Some(seed) = cli.seed {
        config.seeds = vec![seed];
    }
    let out = cli.out;
    let format: OutputFormat = cli.format.into();

    match cli.command {
        Command::Generate { naive } => generate(&config, &out, naive),
        Command::Induce => induce(&config, &out),
        Command::Strips => single(&config, &out, format, AnalysisKind::Strips),
        Command::CoverBound => single(&config, &out, format, AnalysisKind::CoverBound),
        Command::Expansion => single(&config, &out, format, AnalysisKind::Expansion),
        Command::Spectral => single(&config, &out, format, AnalysisKind::Spectral),
        Command::Walk => single(&config, &out, format, AnalysisKind::Walk),
        Command::Rumor => single(&config, &out, format, AnalysisKind::Rumor),
        Command::Si => single(&config, &out, format, AnalysisKind::Si),
        Command::CutContrast => single(&config, &out, format, AnalysisKind::CutContrast),
        Command::Run => {
            let art = run_experiment(&config, &out, format)?;
            println!(
                "wrote {} ({} rows) and {}",
                art.results_path.display(),
                art.rows,
                art.summary_path.display()
            );
            Ok(())
        }
    }
}

/// Run one analysis with the rest of the config unchanged.
fn single(
    config: &ExperimentConfig,
    out: &std::path::Path,
    format: OutputFormat,
    kind: AnalysisKind,
) -> Result<()> {
    let mut config = config.clone();
    config.experiments = vec![kind];
    let art = run_experiment(&config, out, format)?;
    println!(
        "wrote {} ({} rows) and {}",
        art.results_path.display(),
        art.rows,
        art.summary_path.display()
    );
    Ok(())
}

fn generate(config: &ExperimentConfig, out: &std::path::Path, naive: bool) -> Result<()> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    for &seed in &config.seeds {
        let graph = if naive {
            sample_graph_naive(&config.params_for_seed(seed))?
        } else {
            sample_for_run(config, seed)?.0
        };
        let stem = out.join(format!("graph-{seed}"));
        save_graph(&graph, &stem)?;
        println!(
            "wrote {} ({} vertices, {} edges)",
            stem.with_extension("edges").display(),
            graph.vertex_count(),
            graph.edge_count()
        );
    }
    Ok(())
}

fn induce(config: &ExperimentConfig, out: &std::path::Path) -> Result<()> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    let n = config.model.n;
    let scale = (n as Real).ln().powf(config.gamma);
    for &seed in &config.seeds {
        let params = config.params_for_seed(seed);
        // Weight modes admit the induced-sampling shortcut: only pairs
        // inside the band ever consult the tape, and the result equals the
        // induced subgraph of the full draw. Degree modes need the full
        // graph first.
        let (induced, kept) = match config.mode {
            InducedMode::WeightThreshold => {
                sample_induced_by_weight(&params, config.c_prime * scale, f64::INFINITY)?
            }
            InducedMode::WeightBand => sample_induced_by_weight(
                &params,
                config.c1_prime * scale,
                config.c2_prime * scale,
            )?,
            InducedMode::DegreeThreshold | InducedMode::DegreeBand => {
                let graph = sample_for_run(config, seed)?.0;
                let lo = match config.mode {
                    InducedMode::DegreeThreshold => (config.c_prime * scale).ceil() as usize,
                    _ => (config.c1_prime * scale).ceil() as usize,
                };
                let hi = match config.mode {
                    InducedMode::DegreeThreshold => usize::MAX,
                    _ => (config.c2_prime * scale).floor() as usize,
                };
                graph.induced_by_degree(lo, hi)?.to_graph()?
            }
        };
        let stem = out.join(format!("induced-{seed}"));
        save_graph(&induced, &stem)?;
        println!(
            "wrote {} ({} of {} vertices kept, {} edges)",
            stem.with_extension("edges").display(),
            kept.len(),
            n,
            induced.edge_count()
        );
    }
    Ok(())
}
