use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use infoflow::config::Thresholds;
use infoflow::format::{opt_real, real};
use infoflow::pipeline::{run_pipeline_with, PipelineOptions};
use infoflow::report::track_csv;
use infoflow::{
    load_prices, rolling_te_par, te_both_par, with_threads, write_report, Error, Result,
    UniverseConfig,
};
use infoflow_core::rolling::summarize;
use infoflow_core::{
    align, amihud, describe, generate, lagged_pearson, log_returns, sfm_fit, AlignedPair, Binning,
    EdgeMode, Lags, PriceSeries, ProcessKind, ProcessSpec, RollingConfig,
};

#[derive(Parser)]
#[command(name = "infoflow", version, about = "Directional information flow between a driver asset and firm returns")]
struct Cli {
    /// Universe configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for shuffles and generators.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for written files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of daily log returns.
    Stats(Single),
    /// Same-day and one-day lead-lag Pearson correlations.
    Corr(Pair),
    /// Single-factor regression of the target on the driver.
    Sfm(Pair),
    /// Amihud illiquidity ratio and liquidity score.
    Amihud(Single),
    /// Transfer entropy in both directions with shuffle p-values.
    Te {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        te: TeArgs,
    },
    /// Rolling-window transfer entropy in both directions.
    RollingTe {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        te: TeArgs,
        #[arg(long, default_value_t = 252)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Fit bin edges once on the whole pair instead of per window.
        #[arg(long)]
        global_edges: bool,
    },
    /// Group every firm in the configured universe.
    Classify(ThresholdArgs),
    /// Full pipeline over the configured universe, written to --out-dir.
    Report(ThresholdArgs),
    /// Generate a synthetic price pair (x.csv, y.csv) into --out-dir.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Single {
    /// Price file with header date,close,dollar_volume.
    #[arg(long)]
    prices: PathBuf,
    #[command(flatten)]
    range: Range,
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    driver: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[command(flatten)]
    range: Range,
}

#[derive(Args)]
struct Range {
    #[arg(long)]
    start: Option<NaiveDate>,
    #[arg(long)]
    end: Option<NaiveDate>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinningKind {
    Tail,
    Quantile,
}

#[derive(Args)]
struct TeArgs {
    /// Driver history length j.
    #[arg(short = 'j', long, default_value_t = 1)]
    driver_lag: usize,
    /// Target history length k.
    #[arg(short = 'k', long, default_value_t = 1)]
    target_lag: usize,
    /// Prediction horizon h.
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    #[arg(long, default_value_t = 1000)]
    shuffles: usize,
    #[arg(long, value_enum, default_value_t = BinningKind::Tail)]
    binning: BinningKind,
    /// Bin count for quantile binning.
    #[arg(long, default_value_t = 3)]
    bins: usize,
    #[arg(long, default_value_t = 5.0)]
    lower_pct: f64,
    #[arg(long, default_value_t = 95.0)]
    upper_pct: f64,
}

impl TeArgs {
    fn lags(&self) -> Lags {
        Lags::new(self.driver_lag, self.target_lag, self.horizon)
    }

    fn binning(&self) -> Binning {
        match self.binning {
            BinningKind::Tail => Binning::TailQuantile {
                lower_pct: self.lower_pct,
                upper_pct: self.upper_pct,
            },
            BinningKind::Quantile => Binning::Quantile { q: self.bins },
        }
    }
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    gamma_threshold: Option<f64>,
    #[arg(long)]
    liquidity_threshold: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Independent,
    Copy,
    Linear,
    Threshold,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 1000)]
    length: usize,
    #[arg(long, default_value_t = 1)]
    lag: usize,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_eps: f64,
    #[arg(long, default_value_t = 0.1)]
    flip_prob: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(cli.threads, || run(&cli)).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Stats(s) => {
            let d = describe(&log_returns(&prices(s)?)?)?;
            emit(
                &["n", "mean", "median", "std", "skewness", "excess_kurtosis", "min", "max"],
                &[
                    d.n.to_string(),
                    real(d.mean),
                    real(d.median),
                    real(d.std),
                    opt_real(d.skewness),
                    opt_real(d.excess_kurtosis),
                    real(d.min),
                    real(d.max),
                ],
            )
        }
        Command::Corr(p) => {
            let c = lagged_pearson(&pair(p)?)?;
            let mut row = Vec::new();
            for r in [c.same_day, c.driver_leads, c.target_leads] {
                row.extend([real(r.rho), real(r.p_value), r.star.as_str().to_string()]);
            }
            emit(
                &[
                    "rho_same_day", "p_same_day", "star_same_day", "rho_driver_leads",
                    "p_driver_leads", "star_driver_leads", "rho_target_leads", "p_target_leads",
                    "star_target_leads",
                ],
                &row,
            )
        }
        Command::Sfm(p) => {
            let f = sfm_fit(&pair(p)?)?;
            emit(
                &["alpha", "beta", "r_squared", "n"],
                &[real(f.alpha), real(f.beta), real(f.r_squared), f.n.to_string()],
            )
        }
        Command::Amihud(s) => {
            let p = prices(s)?;
            let a = amihud(&p, &log_returns(&p)?)?;
            emit(
                &["delta", "liquidity_score", "days_used", "days_skipped"],
                &[
                    real(a.delta),
                    real(a.liquidity_score),
                    a.days_used.to_string(),
                    a.days_skipped.to_string(),
                ],
            )
        }
        Command::Te { pair: p, te } => {
            let (xy, yx) = te_both_par(&pair(p)?, te.binning(), te.lags(), te.shuffles, seed)?;
            let mut out = csv::Writer::from_writer(Vec::new());
            out.write_record([
                "direction", "te", "p_value", "null_mean", "null_std", "effective_te",
            ])
            .expect("write to memory");
            for t in [xy, yx] {
                out.write_record([
                    t.direction.as_str().to_string(),
                    real(t.te_observed),
                    real(t.p_value),
                    real(t.null_mean),
                    real(t.null_std),
                    real(t.effective_te),
                ])
                .expect("write to memory");
            }
            stdout(&out.into_inner().expect("flush to memory"))
        }
        Command::RollingTe {
            pair: p,
            te,
            window,
            stride,
            global_edges,
        } => {
            let config = RollingConfig {
                window: *window,
                stride: *stride,
                binning: te.binning(),
                lags: te.lags(),
                n_shuffles: te.shuffles,
                seed,
                edges: if *global_edges { EdgeMode::Global } else { EdgeMode::PerWindow },
            };
            let pair = pair(p)?;
            let (xy, yx) = rolling_te_par(&pair, config)?;
            let ticker = pair.target().ticker().to_string();
            let csv = track_csv([(ticker.as_str(), &xy), (ticker.as_str(), &yx)]);
            for t in [&xy, &yx] {
                let s = summarize(t)?;
                eprintln!(
                    "{} windows={} mean_te={} std_te={} significant_10pct={}",
                    t.direction.as_str(),
                    s.n_windows,
                    real(s.mean_te),
                    real(s.std_te),
                    s.n_significant_10pct
                );
            }
            match &cli.out_dir {
                Some(dir) => write_file(dir, "rolling_te.csv", &csv),
                None => stdout(&csv),
            }
        }
        Command::Classify(t) => {
            let config = universe(cli, t)?;
            let bundle = run_pipeline_with(
                &config,
                PipelineOptions {
                    transfer_entropy: false,
                    rolling: false,
                },
            )?;
            warn(&bundle.warnings);
            let mut out = csv::Writer::from_writer(Vec::new());
            out.write_record(["ticker", "beta", "liquidity_score", "gamma", "group"])
                .expect("write to memory");
            for f in &bundle.firms {
                out.write_record([
                    f.ticker.clone(),
                    real(f.sfm.beta),
                    opt_real(f.amihud.map(|a| a.liquidity_score)),
                    opt_real(f.gamma),
                    f.group.map(|g| g.as_str().to_string()).unwrap_or_default(),
                ])
                .expect("write to memory");
            }
            stdout(&out.into_inner().expect("flush to memory"))
        }
        Command::Report(t) => {
            let config = universe(cli, t)?;
            let bundle = run_pipeline_with(&config, PipelineOptions::default())?;
            warn(&bundle.warnings);
            let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("report"));
            write_report(&bundle, &dir)?;
            eprintln!("wrote {}", dir.display());
            Ok(())
        }
        Command::Synth(s) => {
            let kind = match s.kind {
                Kind::Independent => ProcessKind::Independent,
                Kind::Copy => ProcessKind::Copy { lag: s.lag },
                Kind::Linear => ProcessKind::LinearCoupled {
                    a: s.a,
                    sigma_eps: s.sigma_eps,
                },
                Kind::Threshold => ProcessKind::ThresholdCoupled {
                    lag: s.lag,
                    flip_prob: s.flip_prob,
                },
            };
            let pair = generate(&ProcessSpec::new(kind, s.length, seed))?;
            let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            let (x, y) = infoflow::synth::write_pair(&pair, &dir)?;
            println!("{}\n{}", x.display(), y.display());
            Ok(())
        }
    }
}

fn universe(cli: &Cli, t: &ThresholdArgs) -> Result<UniverseConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config is required for this command".into()))?;
    let mut config = UniverseConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.analysis.seed = seed;
    }
    config.thresholds = Thresholds {
        gamma: t.gamma_threshold.or(config.thresholds.gamma),
        liquidity: t.liquidity_threshold.or(config.thresholds.liquidity),
    };
    Ok(config)
}

fn restrict(p: PriceSeries, range: &Range) -> PriceSeries {
    match (range.start, range.end) {
        (None, None) => p,
        (s, e) => p.between(s.unwrap_or(NaiveDate::MIN), e.unwrap_or(NaiveDate::MAX)),
    }
}

fn prices(s: &Single) -> Result<PriceSeries> {
    Ok(restrict(load_prices(&s.prices)?, &s.range))
}

fn pair(p: &Pair) -> Result<AlignedPair> {
    let x = log_returns(&restrict(load_prices(&p.driver)?, &p.range))?;
    let y = log_returns(&restrict(load_prices(&p.target)?, &p.range))?;
    Ok(align(&x, &y)?)
}

fn warn(warnings: &[infoflow::pipeline::Warning]) {
    for w in warnings {
        eprintln!("{w}");
    }
}

fn emit(header: &[&str], row: &[String]) -> Result<()> {
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(header).expect("write to memory");
    out.write_record(row).expect("write to memory");
    stdout(&out.into_inner().expect("flush to memory"))
}

fn stdout(bytes: &[u8]) -> Result<()> {
    std::io::stdout()
        .write_all(bytes)
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))
}
