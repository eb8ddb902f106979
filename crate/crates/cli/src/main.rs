//! `dtsne` — generate synthetic benchmarks, embed them with t-SNE or
//! density-preserving t-SNE, score the result, and plot it.
//!
//! The four subcommands compose into a batch pipeline
//! (`generate | embed | evaluate | plot`) with no manual steps in between.
//! Exit codes are part of the contract: 0 on success, 2 for usage and
//! specification errors, 3 for I/O errors, 4 for numerical failures.

mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtsne::synthgen::{self, ClusterSpec, Distribution, GeneratorSpec};
use dtsne::{io, metrics, Embedding, EmbeddingConfig, Error, Method};

use plot::{render_svg, PlotSpec};

#[derive(Parser)]
#[command(
    name = "dtsne",
    version,
    about = "Density-preserving t-SNE: generate, embed, evaluate, plot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic clustered benchmark dataset
    Generate(GenerateArgs),
    /// Embed a dataset TSV into 2 or 3 dimensions
    Embed(EmbedArgs),
    /// Score an embedding against the original dataset
    Evaluate(EvaluateArgs),
    /// Render a 2-D embedding as an SVG scatter plot
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Built-in benchmark name (2d-density, 2d-samples, g3s, g3d, g10d, u5d)
    #[arg(long, conflicts_with_all = ["dim", "samples", "scales", "distribution"])]
    preset: Option<String>,
    /// Ambient dimension of a custom spec
    #[arg(long)]
    dim: Option<usize>,
    /// Per-cluster sample counts of a custom spec, comma-separated
    #[arg(long, value_delimiter = ',')]
    samples: Vec<usize>,
    /// Per-cluster scale factors of a custom spec, comma-separated
    #[arg(long, value_delimiter = ',')]
    scales: Vec<f64>,
    /// Offset distribution of a custom spec
    #[arg(long, value_enum, default_value_t = DistributionArg::Gaussian)]
    distribution: DistributionArg,
    /// RNG seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output TSV path for the points
    #[arg(long)]
    out: PathBuf,
    /// Optional output path for the cluster labels, one integer per line
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistributionArg {
    Gaussian,
    Uniform,
}

impl From<DistributionArg> for Distribution {
    fn from(arg: DistributionArg) -> Self {
        match arg {
            DistributionArg::Gaussian => Distribution::Gaussian,
            DistributionArg::Uniform => Distribution::Uniform,
        }
    }
}

#[derive(Args)]
struct EmbedArgs {
    /// Input dataset TSV
    #[arg(long = "in")]
    input: PathBuf,
    /// Output embedding TSV
    #[arg(long)]
    out: PathBuf,
    /// Embedding method
    #[arg(long, default_value = "dtsne")]
    method: Method,
    /// Target perplexity of the per-point neighbor distributions
    #[arg(long, default_value_t = 100.0)]
    perplexity: f64,
    /// Gradient-descent iterations
    #[arg(long, default_value_t = 750)]
    iters: usize,
    /// Gradient step size [default: n/12]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// RNG seed (fixed PCA initialization makes runs reproducible anyway)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Dimensions kept by the PCA preprocessing step
    #[arg(long, default_value_t = 50)]
    pca_dims: usize,
    /// Embedding dimension, 2 or 3
    #[arg(long, default_value_t = 2)]
    out_dim: usize,
    /// Early-exaggeration factor applied to attractive forces
    #[arg(long, default_value_t = 12.0)]
    exaggeration: f64,
    /// Iterations under early exaggeration [default: min(100, iters)]
    #[arg(long)]
    exaggeration_iters: Option<usize>,
    /// Optional output path for a tab-separated iteration/KL trace
    #[arg(long)]
    kl_trace: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Original high-dimensional dataset TSV
    #[arg(long)]
    data: PathBuf,
    /// Embedding TSV produced by `embed`
    #[arg(long)]
    embedding: PathBuf,
    /// Neighborhood size for the local metrics [default: min(100, n - 1)]
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// 2-column embedding TSV
    #[arg(long = "in")]
    input: PathBuf,
    /// Optional label file for categorical coloring
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
    /// Canvas width in pixels
    #[arg(long, default_value_t = 800)]
    width: u32,
    /// Canvas height in pixels
    #[arg(long, default_value_t = 800)]
    height: u32,
    /// Point radius in pixels
    #[arg(long, default_value_t = 3.0)]
    point_radius: f64,
    /// Point fill opacity in (0, 1]
    #[arg(long, default_value_t = 0.5)]
    opacity: f64,
}

/// Writes one line to stdout. A consumer that closed the pipe early
/// (`dtsne generate ... | head`) ends the process with the conventional
/// SIGPIPE code instead of a panic; other stdout failures are real errors.
fn say(args: std::fmt::Arguments<'_>) {
    use std::io::Write as _;
    let mut out = std::io::stdout();
    let result = out.write_fmt(args).and_then(|()| out.write_all(b"\n"));
    if let Err(err) = result {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        eprintln!("error: cannot write to stdout: {err}");
        std::process::exit(3);
    }
}

macro_rules! say {
    ($($arg:tt)*) => { say(format_args!($($arg)*)) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Maps every library error onto the documented exit-code vocabulary.
fn exit_code(err: &Error) -> u8 {
    match err {
        // Usage and specification errors.
        Error::InvalidConfig(_)
        | Error::SpecInvalid(_)
        | Error::LengthMismatch { .. }
        | Error::LabelLengthMismatch { .. }
        | Error::KTooLarge { .. }
        | Error::DimensionTooLarge { .. }
        | Error::TooFewSamples { .. }
        | Error::NonFinite { .. } => 2,
        // I/O and file-format errors.
        Error::FileNotFound { .. }
        | Error::Io { .. }
        | Error::Parse { .. }
        | Error::RaggedRows { .. } => 3,
        // Numerical failures.
        Error::NonFiniteIterate { .. }
        | Error::DegenerateRow { .. }
        | Error::ZeroRadius { .. }
        | Error::NotNormalized { .. } => 4,
    }
}

fn run(command: Command) -> dtsne::Result<()> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> dtsne::Result<()> {
    let spec = match &args.preset {
        Some(name) => synthgen::preset(name)?,
        None => custom_spec(&args)?,
    };
    let dataset = synthgen::generate(&spec, args.seed)?;

    io::write_matrix(&args.out, &dataset.points)?;
    if let Some(labels_path) = &args.labels {
        let labels = dataset.labels.as_ref().expect("generator always labels");
        io::write_labels(labels_path, labels)?;
    }

    let dist = match spec.distribution {
        Distribution::Gaussian => "gaussian",
        Distribution::Uniform => "uniform",
    };
    say!(
        "dataset {}: n={} m={} clusters={} distribution={} seed={}",
        spec.name,
        dataset.len(),
        spec.dim,
        spec.clusters.len(),
        dist,
        args.seed
    );
    for (i, c) in spec.clusters.iter().enumerate() {
        say!("  cluster {i}: {} samples, scale {}", c.samples, c.scale);
    }
    say!("points -> {}", args.out.display());
    if let Some(labels_path) = &args.labels {
        say!("labels -> {}", labels_path.display());
    }
    Ok(())
}

fn custom_spec(args: &GenerateArgs) -> dtsne::Result<GeneratorSpec> {
    let dim = args.dim.ok_or_else(|| {
        Error::SpecInvalid(format!(
            "pass --preset <{}> or a custom spec with --dim, --samples and --scales",
            synthgen::PRESET_NAMES.join("|")
        ))
    })?;
    if args.samples.is_empty() || args.samples.len() != args.scales.len() {
        return Err(Error::SpecInvalid(format!(
            "--samples ({}) and --scales ({}) must list one value per cluster",
            args.samples.len(),
            args.scales.len()
        )));
    }
    Ok(GeneratorSpec {
        name: "custom".into(),
        dim,
        distribution: args.distribution.into(),
        clusters: args
            .samples
            .iter()
            .zip(&args.scales)
            .map(|(&samples, &scale)| ClusterSpec {
                samples,
                scale,
                center: None,
            })
            .collect(),
    })
}

fn cmd_embed(args: EmbedArgs) -> dtsne::Result<()> {
    let dataset = io::read_dataset(&args.input, None)?;
    let n = dataset.len();

    let config = EmbeddingConfig {
        method: args.method,
        perplexity: args.perplexity,
        iterations: args.iters,
        learning_rate: args.learning_rate,
        // Keep the fixed momentum schedule meaningful on very short runs.
        momentum_switch_iter: 20.min(args.iters),
        exaggeration_iters: args.exaggeration_iters.unwrap_or(100.min(args.iters)),
        exaggeration_factor: args.exaggeration,
        pca_input_dims: args.pca_dims,
        out_dim: args.out_dim,
        seed: args.seed,
        ..EmbeddingConfig::default()
    };

    say!(
        "embedding {} with {}: n={} m={} out_dim={} perplexity={} iters={}",
        dataset.name,
        config.method,
        n,
        dataset.points.cols(),
        config.out_dim,
        config.perplexity,
        config.iterations
    );

    let start = Instant::now();
    let (embedding, stats) = dtsne::embedder::run_embedding(&dataset, &config)?;
    let runtime = start.elapsed().as_secs_f64();

    if !stats.unconverged_rows.is_empty() {
        eprintln!(
            "warning: bandwidth search hit its iteration cap for {} of {} points",
            stats.unconverged_rows.len(),
            n
        );
    }

    io::write_matrix(&args.out, &embedding.coords)?;
    if let Some(trace_path) = &args.kl_trace {
        let mut text = String::new();
        for (iter, kl) in &stats.kl_trace {
            text.push_str(&format!("{iter}\t{kl}\n"));
        }
        write_text(trace_path, &text)?;
    }

    say!("embedding -> {}", args.out.display());
    say!("final_kl={} runtime={runtime:.2}s", stats.final_kl());
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> dtsne::Result<()> {
    let dataset = io::read_dataset(&args.data, None)?;
    let coords = io::read_matrix(&args.embedding)?;
    let embedding = Embedding {
        coords,
        config_fingerprint: String::new(),
    };

    let report = metrics::evaluate(&dataset, &embedding, args.k)?;
    if report.k_clamped {
        eprintln!("note: k clamped to n - 1 = {} for this dataset", report.k);
    }
    say!(
        "rho={} rho_knn={} rho_r={} k={} rho_spearman={} rho_knn_spearman={} rho_r_spearman={}",
        fmt_metric(report.rho),
        fmt_metric(report.rho_knn),
        fmt_metric(report.rho_r),
        report.k,
        fmt_metric(report.rho_spearman),
        fmt_metric(report.rho_knn_spearman),
        fmt_metric(report.rho_r_spearman),
    );
    Ok(())
}

/// Degenerate correlations print as the word "undefined" rather than a
/// sentinel number, so downstream parsers fail loudly instead of silently.
fn fmt_metric(value: Option<f64>) -> String {
    match value {
        Some(v) => v.to_string(),
        None => "undefined".into(),
    }
}

fn cmd_plot(args: PlotArgs) -> dtsne::Result<()> {
    let coords = io::read_matrix(&args.input)?;
    let labels = match &args.labels {
        Some(path) => Some(io::read_labels(path)?),
        None => None,
    };
    let spec = PlotSpec {
        width_px: args.width,
        height_px: args.height,
        point_radius_px: args.point_radius,
        opacity: args.opacity,
    };
    let svg = render_svg(&coords, labels.as_deref(), &spec)?;
    write_text(&args.out, &svg)?;
    say!("plot -> {} ({} points)", args.out.display(), coords.rows());
    Ok(())
}

fn write_text(path: &Path, text: &str) -> dtsne::Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
