use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use costeval::cost_model::Orientation;
use costeval::datasets::write_csv;
use costeval::harness::config::{SchemaKind, SourceKind};
use costeval::harness::{
    emit_reports, evaluate_file, load_dataset, report, run_experiment, run_scaling, ExperimentConfig,
    Format, Method, ScoreKind,
};
use costeval::metrics::delta_histogram;
use costeval::synthetic::generate;
use costeval::{Error, Result};

/// Cost-sensitive evaluation of binary classifiers trained on signed costs.
#[derive(Parser)]
#[command(name = "costeval", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML experiment config (a run manifest works too).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides output.dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// First seed; seeds become seed..seed+n_seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report format written and printed: csv, text or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    #[command(flatten)]
    data: DataArgs,
}

/// Use a CSV dataset instead of the configured source.
#[derive(Args)]
struct DataArgs {
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// votes, threshold, rating or precomputed_delta.
    #[arg(long, global = true)]
    schema: Option<SchemaKind>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau: Option<f64>,
    #[arg(long, global = true)]
    midpoint: Option<f64>,
    /// midpoint_minus_score or score_minus_midpoint.
    #[arg(long, global = true)]
    orientation: Option<Orientation>,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate every method over all seeds.
    Run {
        /// Comma-separated methods, e.g. standard,weighted,tdown30.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        #[arg(long)]
        n_seeds: Option<usize>,
    },
    /// Learning curves: rerun on subsampled training sets.
    Scale {
        /// Comma-separated training-set sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        #[arg(long)]
        n_seeds: Option<usize>,
    },
    /// Histogram of Δ for the configured dataset.
    Hist {
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Write a synthetic dataset (precomputed_delta schema) and its true weights.
    Gen {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        noise_sigma: Option<f64>,
        #[arg(long)]
        weight_norm: Option<f64>,
    },
    /// Score a predictions file (index,label[,score]) against the dataset.
    Eval {
        #[arg(long)]
        predictions: PathBuf,
        /// How to read the score column: probability or delta.
        #[arg(long, default_value = "probability")]
        score_kind: ScoreKind,
    },
}

fn load_config(g: &Global) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &g.out {
        cfg.output.dir = out.clone();
    }
    if let Some(seed) = g.seed {
        cfg.experiment.base_seed = seed;
        cfg.experiment.seeds = None;
    }
    if let Some(f) = g.format {
        cfg.output.formats = vec![f];
    }
    let d = &g.data;
    if let Some(path) = &d.data {
        cfg.dataset.source = SourceKind::Csv;
        cfg.dataset.path = Some(path.clone());
    }
    if d.schema.is_some() {
        cfg.dataset.schema = d.schema;
    }
    if d.tau.is_some() {
        cfg.dataset.tau = d.tau;
    }
    if d.midpoint.is_some() {
        cfg.dataset.midpoint = d.midpoint;
    }
    if d.orientation.is_some() {
        cfg.dataset.orientation = d.orientation;
    }
    Ok(cfg)
}

fn set_methods(cfg: &mut ExperimentConfig, methods: Option<Vec<Method>>, n_seeds: Option<usize>) {
    if let Some(m) = methods {
        cfg.experiment.methods = m;
    }
    if let Some(n) = n_seeds {
        cfg.experiment.n_seeds = n;
        cfg.experiment.seeds = None;
    }
}

/// Text unless only other formats were asked for.
fn stdout_format(cfg: &ExperimentConfig) -> Format {
    let f = &cfg.output.formats;
    if f.contains(&Format::Text) || f.is_empty() {
        Format::Text
    } else {
        f[0]
    }
}

fn print_table(cfg: &ExperimentConfig, outcome: &costeval::harness::ExperimentOutcome) -> Result<()> {
    let text = match stdout_format(cfg) {
        Format::Csv => report::aggregate_csv(&outcome.aggregates)?,
        Format::Json => report::aggregate_json(&outcome.aggregates)?,
        Format::Text => report::aggregate_text(&outcome.aggregates)?,
    };
    print!("{text}");
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Run { methods, n_seeds } => {
            set_methods(&mut cfg, methods, n_seeds);
            let outcome = run_experiment(&cfg)?;
            emit_reports(&outcome, &cfg, &cfg.output.dir)?;
            print_table(&cfg, &outcome)?;
        }
        Command::Scale { sizes, methods, n_seeds } => {
            set_methods(&mut cfg, methods, n_seeds);
            if let Some(s) = sizes {
                cfg.experiment.scaling_sizes = s;
            }
            let outcome = run_scaling(&cfg)?;
            emit_reports(&outcome, &cfg, &cfg.output.dir)?;
            print_table(&cfg, &outcome)?;
        }
        Command::Hist { bins } => {
            let bins = bins.unwrap_or(cfg.experiment.histogram_bins);
            let hist = delta_histogram(&load_dataset(&cfg)?, bins)?;
            let text = report::histogram_csv(&hist);
            let dir = &cfg.output.dir;
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let path = dir.join("histogram.csv");
            std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
            print!("{text}");
        }
        Command::Gen { n, dim, noise_sigma, weight_norm } => {
            let mut params = cfg.synthetic;
            params.n = n.unwrap_or(params.n);
            params.dim = dim.unwrap_or(params.dim);
            params.noise_sigma = noise_sigma.unwrap_or(params.noise_sigma);
            params.weight_norm = weight_norm.unwrap_or(params.weight_norm);
            let synth = params.with_seed(cfg.experiment.base_seed);
            let (ds, w) = generate(&synth)?;
            let dir = &cfg.output.dir;
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let data_path = dir.join(format!("{}.csv", ds.name()));
            let file = std::fs::File::create(&data_path).map_err(|e| Error::io(&data_path, e))?;
            write_csv(&ds, std::io::BufWriter::new(file))?;
            let weights_path = dir.join(format!("{}.weights.txt", ds.name()));
            let body: String = w.iter().map(|x| format!("{x:?}\n")).collect();
            std::fs::write(&weights_path, body).map_err(|e| Error::io(&weights_path, e))?;
            println!("{}", data_path.display());
            println!("{}", weights_path.display());
        }
        Command::Eval { predictions, score_kind } => {
            if cfg.dataset.source == SourceKind::Synthetic && cli.global.config.is_none() {
                return Err(Error::Config(
                    "eval needs a dataset: pass --config or --data with --schema".into(),
                ));
            }
            let ds = load_dataset(&cfg)?;
            let r = evaluate_file(&ds, &predictions, score_kind)?;
            match stdout_format(&cfg) {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&r).map_err(|e| Error::Config(e.to_string()))?
                ),
                Format::Csv => {
                    println!("n,nec,error_rate,ratio,delta_mae");
                    let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
                    println!("{},{},{},{},{}", r.n, r.nec, r.error_rate, opt(r.ratio), opt(r.delta_mae));
                }
                Format::Text => {
                    println!("examples     {}", r.n);
                    println!("NEC          {:.4}%", 100.0 * r.nec);
                    println!("error rate   {:.4}%", 100.0 * r.error_rate);
                    match r.ratio {
                        Some(x) => println!("error/NEC    {x:.3}"),
                        None => println!("error/NEC    -"),
                    }
                    if let Some(m) = r.delta_mae {
                        println!("delta MAE    {m:.4}");
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
