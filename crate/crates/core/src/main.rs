use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use nested_vt::bits::BitString;
use nested_vt::channel::{alpha_to_p, chop_and_shuffle, ChannelParams};
use nested_vt::codec::{encode_nested, ResidueScheme};
use nested_vt::erasure::{ec_encode, ErasureConfig};
use nested_vt::experiment::{
    csv_string, experiment_complexity, experiment_error_vs_alpha, experiment_residue_schemes, rate_row, rate_sweep,
    TrialConfig, ALPHA_HEADER, COMPLEXITY_HEADER, RATE_HEADER, SCHEME_HEADER,
};
use nested_vt::io::{parse_bitstrings, FragmentFile};
use nested_vt::layout::LayerSpec;
use nested_vt::plot::emit_svg;
use nested_vt::reassembly::{brute_force_oracle, decode_search, Collect, Recovery, SearchConfig};
use nested_vt::{Error, Result};

#[derive(Parser)]
#[command(name = "nested-vt", version, about = "Nested VT codes for the chop-and-shuffle channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode data words (one per line) into nested VT codewords.
    Encode(EncodeArgs),
    /// Chop and shuffle a codeword into a fragment file.
    Chop(ChopArgs),
    /// Reassemble a fragment file and print a JSON outcome record.
    Decode(DecodeArgs),
    /// List every valid ordering of a small fragment file by exhaustive search.
    Oracle(OracleArgs),
    /// Print the rate and its bounds as CSV.
    RateBounds(RateArgs),
    /// Run a Monte Carlo experiment and write CSV.
    Experiment(ExperimentCmd),
    /// Render columns of a CSV file as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args, Clone)]
struct SpecArgs {
    #[arg(long, default_value_t = 36)]
    d_sec: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    ell: usize,
    /// zero, distinct, fixed or fixed:<r>
    #[arg(long, default_value = "zero")]
    scheme: String,
    /// Residue for the fixed scheme.
    #[arg(long)]
    r0: Option<u64>,
}

impl SpecArgs {
    fn spec(&self) -> Result<LayerSpec> {
        LayerSpec::with_scheme(self.d_sec, self.m, self.ell, scheme(&self.scheme, self.r0)?)
    }
}

fn scheme(name: &str, r0: Option<u64>) -> Result<ResidueScheme> {
    match (name.parse::<ResidueScheme>()?, r0) {
        (ResidueScheme::FixedNonZero(_), Some(r)) => Ok(ResidueScheme::FixedNonZero(r)),
        (other, _) => Ok(other),
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// File with one data word per line.
    #[arg(long, conflicts_with = "data")]
    input: Option<PathBuf>,
    /// A single data word.
    #[arg(long)]
    data: Option<String>,
    /// Treat the input as payloads and apply the outer erasure code first.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Erasure generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChopArgs {
    /// File whose first line is the codeword.
    #[arg(long, conflicts_with = "data")]
    input: Option<PathBuf>,
    #[arg(long)]
    data: Option<String>,
    /// Per-boundary break probability.
    #[arg(long, conflicts_with = "alpha")]
    p: Option<f64>,
    /// Break probability as alpha / log2(n).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CollectArg {
    First,
    All,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Fragment file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    tau: usize,
    /// Budget in extension attempts.
    #[arg(long, default_value_t = 1_000_000)]
    delta: u64,
    #[arg(long, value_enum, default_value = "all")]
    collect: CollectArg,
    /// Optional wall-clock cap in milliseconds.
    #[arg(long)]
    time_limit_ms: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = nested_vt::reassembly::DEFAULT_ORACLE_CEILING)]
    ceiling: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Emit the three-layer sweep instead of a single row.
    #[arg(long)]
    sweep: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentCmd {
    #[command(subcommand)]
    kind: ExperimentKind,
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Outcome counts per alpha, including recovery by the outer erasure code
    ErrorVsAlpha(ExperimentArgs),
    /// Error rates with confidence intervals for each residue scheme
    Residues(ExperimentArgs),
    /// Decoder iterations against the exhaustive-search count
    Complexity(ExperimentArgs),
}

// Flags override values from `--config`.
#[derive(Args)]
struct ExperimentArgs {
    /// JSON file with experiment settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d_sec: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    r0: Option<u64>,
    /// Single alpha, or the grid for error-vs-alpha when given as a comma list.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Largest fragment count kept by the complexity experiment.
    #[arg(long)]
    ceiling: Option<usize>,
    /// Smallest fragment count kept by the complexity experiment.
    #[arg(long)]
    min_fragments: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentConfig {
    d_sec: usize,
    m: usize,
    ell: usize,
    scheme: String,
    r0: u64,
    alphas: Vec<f64>,
    epsilon: f64,
    tau: usize,
    delta: u64,
    seed: u64,
    trials: u64,
    ceiling: usize,
    min_fragments: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d_sec: 36,
            m: 2,
            ell: 3,
            scheme: "zero".into(),
            r0: 1,
            alphas: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            epsilon: 0.25,
            tau: 1,
            delta: 200_000,
            seed: 1,
            trials: 200,
            ceiling: 7,
            min_fragments: 3,
        }
    }
}

impl ExperimentConfig {
    fn resolve(args: &ExperimentArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(e.to_string()))?,
            None => ExperimentConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = args.$field.clone() { cfg.$field = v; } )* };
        }
        take!(d_sec, m, ell, scheme, r0, epsilon, tau, delta, seed, trials, ceiling, min_fragments);
        if let Some(a) = &args.alpha {
            cfg.alphas = a.clone();
        }
        Ok(cfg)
    }

    fn spec(&self) -> Result<LayerSpec> {
        let scheme = scheme(&self.scheme, Some(self.r0))?;
        LayerSpec::with_scheme(self.d_sec, self.m, self.ell, scheme)
    }

    fn alpha(&self) -> Result<f64> {
        match self.alphas.as_slice() {
            [a] => Ok(*a),
            _ => Err(Error::InvalidArgument("this experiment takes exactly one alpha".into())),
        }
    }

    fn trial_config(&self, alpha: f64) -> Result<TrialConfig> {
        Ok(TrialConfig {
            spec: self.spec()?,
            alpha,
            epsilon: self.epsilon,
            search: SearchConfig::new(self.tau, self.delta, Collect::All)?,
        })
    }
}

#[derive(Args)]
struct PlotArgs {
    /// CSV file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long, value_delimiter = ',', required = true)]
    y: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Decode(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn words(input: &Option<PathBuf>, data: &Option<String>) -> Result<Vec<BitString>> {
    match (input, data) {
        (_, Some(d)) => Ok(vec![d.parse()?]),
        (Some(path), None) => parse_bitstrings(&read(path)?),
        (None, None) => Err(Error::InvalidArgument("give --input or --data".into())),
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Encode(a) => {
            let spec = a.spec.spec()?;
            let mut text = String::new();
            for w in words(&a.input, &a.data)? {
                let d = match a.epsilon {
                    Some(eps) => ec_encode(&w, &ErasureConfig::for_code_length(spec.data_len(), eps, a.seed)?)?,
                    None => w,
                };
                text.push_str(&encode_nested(&d, &spec)?.to_string());
                text.push('\n');
            }
            emit(&a.out, &text)?;
        }
        Command::Chop(a) => {
            let x = words(&a.input, &a.data)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::InvalidArgument("no codeword in input".into()))?;
            let p = match (a.p, a.alpha) {
                (Some(p), None) => p,
                (None, Some(alpha)) => alpha_to_p(alpha, x.len())?,
                _ => return Err(Error::InvalidArgument("give exactly one of --p or --alpha".into()).into()),
            };
            let fragments = chop_and_shuffle(&x, &ChannelParams::new(p, a.seed)?)?;
            let file = FragmentFile {
                n: x.len(),
                seed: a.seed,
                p_break: p,
                fragments,
            };
            emit(&a.out, &file.to_text())?;
        }
        Command::Decode(a) => {
            let spec = a.spec.spec()?;
            let file = FragmentFile::parse(&read(&a.input)?)?;
            let collect = match a.collect {
                CollectArg::First => Collect::First,
                CollectArg::All => Collect::All,
            };
            let mut config = SearchConfig::new(a.tau, a.delta, collect)?;
            if let Some(ms) = a.time_limit_ms {
                config = config.with_time_limit(Duration::from_millis(ms));
            }
            let outcome = decode_search(&file.fragments, &spec, &config)?;
            let record = serde_json::json!({
                "outcome": outcome.kind(),
                "iterations": outcome.stats.iterations,
                "restarts": outcome.stats.restarts,
                "tau_final": outcome.stats.tau_final,
                "candidates_found": outcome.solutions.len(),
                "data": outcome.data().map(|d| d.to_string()),
            });
            emit(&a.out, &format!("{record}\n"))?;
            if matches!(outcome.recovery, Recovery::Timeout | Recovery::NoSolution) {
                return Err(Failure::Decode(format!("decode failed: {}", outcome.kind())));
            }
        }
        Command::Oracle(a) => {
            let spec = a.spec.spec()?;
            let file = FragmentFile::parse(&read(&a.input)?)?;
            let found = brute_force_oracle(&file.fragments, &spec, a.ceiling)?;
            let text: String = found.iter().map(|x| format!("{x}\n")).collect();
            emit(&a.out, &text)?;
        }
        Command::RateBounds(a) => {
            let text = if a.sweep {
                csv_string("rate-bounds", RATE_HEADER, &rate_sweep()?)?
            } else {
                csv_string("rate-bounds", RATE_HEADER, &[rate_row(&a.spec.spec()?)])?
            };
            emit(&a.out, &text)?;
        }
        Command::Experiment(e) => {
            let (args, text) = match &e.kind {
                ExperimentKind::ErrorVsAlpha(a) => {
                    let cfg = ExperimentConfig::resolve(a)?;
                    let rows = experiment_error_vs_alpha(&cfg.alphas, &cfg.trial_config(0.0)?, cfg.trials, cfg.seed)?;
                    (a, csv_string("error-vs-alpha", ALPHA_HEADER, &rows)?)
                }
                ExperimentKind::Residues(a) => {
                    let cfg = ExperimentConfig::resolve(a)?;
                    let schemes = [
                        ResidueScheme::AllZero,
                        ResidueScheme::FixedNonZero(cfg.r0),
                        ResidueScheme::Distinct,
                    ];
                    let rows = experiment_residue_schemes(&schemes, &cfg.trial_config(cfg.alpha()?)?, cfg.trials, cfg.seed)?;
                    (a, csv_string("residues", SCHEME_HEADER, &rows)?)
                }
                ExperimentKind::Complexity(a) => {
                    let cfg = ExperimentConfig::resolve(a)?;
                    let report = experiment_complexity(
                        &cfg.spec()?,
                        cfg.alpha()?,
                        cfg.trials,
                        cfg.min_fragments,
                        cfg.ceiling,
                        cfg.seed,
                    )?;
                    let mut text = csv_string("complexity", COMPLEXITY_HEADER, &report.rows)?;
                    text.push_str(&format!("# excluded={}\n", report.excluded));
                    if let Some(median) = report.median_ratio() {
                        text.push_str(&format!("# median_ratio={median:.6}\n"));
                    }
                    (a, text)
                }
            };
            emit(&args.out, &text)?;
        }
        Command::Plot(a) => {
            let cols: Vec<&str> = a.y.iter().map(String::as_str).collect();
            let svg = emit_svg(&read(&a.input)?, &a.x, &cols)?;
            emit(&a.out, &svg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Decode(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
