//! `salem` command line front end.
//!
//! Every subcommand reads a JSON config `{"q": int, "p": [real], "theta":
//! [int]}` and prints one result. Scalar results (`eval`, `integral`,
//! `moran`, `rate`) print a bare JSON number unless `--full` is given;
//! everything else prints a JSON object. Point clouds are written as JSON
//! lines or, with `--format csv`, as CSV with an `x,y` header.
//!
//! Exit codes: 0 on success, 2 for usage errors and unreadable configs, 3
//! when a value violates a domain invariant.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis;
use crate::error::SalemError;
use crate::ifs::{self, Generation};
use crate::numsys::{Cylinder, DigitPermutation, DigitString, SalemSystem};
use crate::salemfun::ModifiedSalem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] SalemError),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Io(_) => EXIT_DOMAIN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CloudMode {
    Deterministic,
    Chaos,
}

/// Settings shared by all subcommands after the config file is loaded.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SalemSystem<f64>,
    pub theta: DigitPermutation,
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub output: OutputFormat,
    pub out_path: Option<PathBuf>,
}

/// On-disk config. `theta` defaults to the identity.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    q: usize,
    p: Vec<f64>,
    #[serde(default)]
    theta: Option<Vec<usize>>,
}

#[derive(Debug, Parser)]
#[command(
    name = "salem",
    version,
    about = "Permutation-modified Salem functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config {"q": int, "p": [real], "theta": [int]}
    #[arg(long)]
    pub config: PathBuf,
    /// Write the result here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    #[arg(long, value_enum, default_value_t = CloudMode::Deterministic)]
    pub mode: CloudMode,
    /// Composition depth for deterministic clouds
    #[arg(long)]
    pub depth: Option<usize>,
    /// Number of chaos-game steps
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate f(x)
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        full: bool,
    },
    /// Greedy digit expansion of x
    Encode {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Value of a digit string such as 1,0(2)
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        digits: String,
    },
    /// One-sided limits at the rational with the given terminating digits
    Jump {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        digits: String,
    },
    /// Functional-equation residual at x for shift index n
    Residual {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Increment of f over the cylinder with the given base
    Increment {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        digits: String,
    },
    /// Singularity rate K; with --n, also a seeded decay check over n samples
    Rate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 200)]
        rank: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        full: bool,
    },
    /// Digit frequencies over the first n digits of x, of a digit string, or
    /// of a seeded typical sample
    Freq {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["digits", "seed"])]
        x: Option<f64>,
        #[arg(long, conflicts_with = "seed")]
        digits: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Lebesgue integral of f; --rank adds the Riemann-sum cross-check
    Integral {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        full: bool,
    },
    /// Moran dimension of the digit set given as a comma list
    Moran {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        digits: String,
        #[arg(long)]
        full: bool,
    },
    /// Graph-dimension bounds
    Dims {
        #[command(flatten)]
        common: Common,
    },
    /// Classification of the digitwise fixed-point set
    Fixedset {
        #[command(flatten)]
        common: Common,
    },
    /// Non-monotonicity witness among cylinder endpoints up to --rank
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// The affine maps whose attractor is the graph of f
    Ifs {
        #[command(flatten)]
        common: Common,
    },
    /// Point cloud on the graph of f
    Attractor {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cloud: CloudArgs,
    },
    /// Box-counting slope of a generated cloud
    Boxcount {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cloud: CloudArgs,
        /// Grid exponents k (size 2^-k): "2,3,4" or "2..8"
        #[arg(long, default_value = "2..8")]
        levels: String,
    },
    /// Area of the rank-r rectangle cover
    Cover {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rank: usize,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Eval { common, .. }
            | Command::Encode { common, .. }
            | Command::Decode { common, .. }
            | Command::Jump { common, .. }
            | Command::Residual { common, .. }
            | Command::Increment { common, .. }
            | Command::Rate { common, .. }
            | Command::Freq { common, .. }
            | Command::Integral { common, .. }
            | Command::Moran { common, .. }
            | Command::Dims { common }
            | Command::Fixedset { common }
            | Command::Witness { common, .. }
            | Command::Ifs { common }
            | Command::Attractor { common, .. }
            | Command::Boxcount { common, .. }
            | Command::Cover { common, .. } => common,
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Rate { seed, .. } | Command::Freq { seed, .. } => *seed,
            Command::Attractor { cloud, .. } | Command::Boxcount { cloud, .. } => cloud.seed,
            _ => None,
        }
    }

    fn depth(&self) -> Option<usize> {
        match self {
            Command::Eval { depth, .. } | Command::Encode { depth, .. } => *depth,
            Command::Residual { depth, .. } => Some(*depth),
            Command::Attractor { cloud, .. } | Command::Boxcount { cloud, .. } => cloud.depth,
            _ => None,
        }
    }
}

/// Result of a subcommand before formatting.
enum Output {
    Value(Value),
    Cloud(Vec<(f64, f64)>),
}

pub fn load_config(cmd: &Command) -> Result<RunConfig, CliError> {
    let common = cmd.common();
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
    let file: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
    let system = SalemSystem::validate(file.q, file.p)?;
    let theta = match file.theta {
        Some(map) => DigitPermutation::new(map)?,
        None => DigitPermutation::identity(system.q()),
    };
    if theta.len() != system.q() {
        return Err(SalemError::LengthMismatch {
            expected: system.q(),
            found: theta.len(),
        }
        .into());
    }
    let depth = cmd.depth();
    if depth == Some(0) {
        return Err(SalemError::ZeroDepth.into());
    }
    Ok(RunConfig {
        system,
        theta,
        seed: cmd.seed(),
        depth,
        output: common.format,
        out_path: common.out.clone(),
    })
}

/// Parses `argv` (program name first), runs the subcommand and writes to
/// `stdout`/`stderr`. Returns the process exit code.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(cmd)?;
    let output = dispatch(cmd, &cfg)?;
    let rendered = render(&output, cfg.output)?;
    match &cfg.out_path {
        Some(path) => fs::write(path, rendered)?,
        None => stdout.write_all(&rendered)?,
    }
    Ok(())
}

fn parse_digits(text: &str) -> Result<DigitString, CliError> {
    text.parse::<DigitString>()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("not a digit: {t:?}")))
        })
        .collect()
}

fn parse_levels(text: &str) -> Result<Vec<f64>, CliError> {
    let exponents: Vec<u32> = match text.split_once("..") {
        Some((a, b)) => {
            let lo = a.trim().parse::<u32>();
            let hi = b.trim().parse::<u32>();
            match (lo, hi) {
                (Ok(lo), Ok(hi)) => (lo..=hi).collect(),
                _ => return Err(CliError::Usage(format!("bad level range {text:?}"))),
            }
        }
        None => text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| CliError::Usage(format!("bad level {t:?}")))
            })
            .collect::<Result<_, _>>()?,
    };
    Ok(exponents.iter().map(|&k| 0.5f64.powi(k as i32)).collect())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize to JSON")
}

fn build_cloud(
    f: &ModifiedSalem<f64>,
    cloud: &CloudArgs,
    cfg: &RunConfig,
) -> Result<ifs::GraphCloud<f64>, CliError> {
    let generation = match cloud.mode {
        CloudMode::Deterministic => Generation::Deterministic {
            depth: cfg
                .depth
                .ok_or_else(|| CliError::Usage("deterministic mode needs --depth".into()))?,
        },
        CloudMode::Chaos => Generation::Chaos {
            steps: cloud
                .n
                .ok_or_else(|| CliError::Usage("chaos mode needs --n".into()))?,
            seed: cfg.seed.unwrap_or(0),
        },
    };
    Ok(ifs::attractor_points(f, generation)?)
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let f = ModifiedSalem::new(cfg.system.clone(), cfg.theta.clone())?;
    let s = f.system();
    let depth = cfg.depth.unwrap_or_else(|| s.default_depth());
    let out = match cmd {
        Command::Eval { x, full, .. } => {
            let y = f.eval(*x, depth)?;
            if *full {
                json!({ "x": x, "y": y, "depth": depth })
            } else {
                json!(y)
            }
        }
        Command::Encode { x, .. } => {
            let d = s.encode(*x, depth)?;
            json!({ "x": x, "depth": depth, "digits": to_value(&d), "text": d.to_string() })
        }
        Command::Decode { digits, .. } => {
            let d = parse_digits(digits)?;
            json!(s.decode(&d)?)
        }
        Command::Jump { digits, .. } => to_value(&f.one_sided_limits(&parse_digits(digits)?)?),
        Command::Residual { x, n, depth, .. } => {
            let d = s.encode(*x, *depth)?;
            let r = f.functional_eq_residual(&d, *n, *depth)?;
            json!({ "x": x, "n": n, "depth": depth, "residual": r })
        }
        Command::Increment { digits, .. } => {
            let c = Cylinder::new(parse_list(digits)?)?;
            to_value(&analysis::increment_on_cylinder(&f, &c)?)
        }
        Command::Rate { n, rank, full, .. } => match n {
            Some(samples) => to_value(&analysis::singularity_check(
                &f,
                *samples,
                *rank,
                1e-8,
                cfg.seed.unwrap_or(0),
            )?),
            None => {
                let k = analysis::singularity_rate(&f);
                if *full {
                    json!({ "rate": k })
                } else {
                    json!(k)
                }
            }
        },
        Command::Freq { n, x, digits, .. } => {
            let d = match (x, digits, cfg.seed) {
                (Some(x), _, _) => s.encode(*x, (*n).max(1))?,
                (None, Some(text), _) => parse_digits(text)?,
                (None, None, Some(seed)) => {
                    let mut rng = analysis::sample_rng(seed, 0);
                    analysis::sample_typical_digits(s, *n, &mut rng)
                }
                (None, None, None) => {
                    return Err(CliError::Usage("freq needs --x, --digits or --seed".into()))
                }
            };
            to_value(&analysis::digit_frequencies(s, &d, *n)?)
        }
        Command::Integral { rank, full, .. } => {
            let r = analysis::integral_closed_form(&f);
            match rank {
                Some(rank) => {
                    let riemann = analysis::integral_riemann(&f, *rank)?;
                    json!({
                        "value": r.value,
                        "numerator": r.numerator,
                        "denominator": r.denominator,
                        "riemann": riemann,
                        "rank": rank,
                    })
                }
                None if *full => to_value(&r),
                None => json!(r.value),
            }
        }
        Command::Moran { digits, full, .. } => {
            let r = analysis::moran_dimension(s, &parse_list(digits)?)?;
            if *full {
                to_value(&r)
            } else {
                json!(r.alpha)
            }
        }
        Command::Dims { .. } => to_value(&analysis::graph_dimension_bounds(&f)),
        Command::Fixedset { .. } => to_value(&analysis::fixed_point_set(&f)?),
        Command::Witness { rank, .. } => to_value(&analysis::monotonicity_witness(&f, *rank)?),
        Command::Ifs { .. } => to_value(&ifs::ifs_maps(&f)),
        Command::Attractor { cloud, .. } => {
            return Ok(Output::Cloud(build_cloud(&f, cloud, cfg)?.points))
        }
        Command::Boxcount { cloud, levels, .. } => {
            let c = build_cloud(&f, cloud, cfg)?;
            to_value(&ifs::box_count(&c, &parse_levels(levels)?)?)
        }
        Command::Cover { rank, .. } => to_value(&ifs::cover_area(&f, *rank)?),
    };
    Ok(Output::Value(out))
}

fn render(output: &Output, format: OutputFormat) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match (output, format) {
        (Output::Cloud(points), OutputFormat::Json) => ifs::write_json_lines(points, &mut buf)?,
        (Output::Cloud(points), OutputFormat::Csv) => {
            ifs::write_csv(points, &mut buf).map_err(|e| CliError::Io(e.into()))?
        }
        (Output::Value(v), OutputFormat::Json) => {
            serde_json::to_writer(&mut buf, v).map_err(io::Error::from)?;
            buf.push(b'\n');
        }
        (Output::Value(v), OutputFormat::Csv) => write_value_csv(v, &mut buf)?,
    }
    Ok(buf)
}

/// Flattens a JSON result into CSV: objects become one row (nested keys
/// joined with `.`), arrays of objects one row each, scalars a bare line.
fn write_value_csv(v: &Value, buf: &mut Vec<u8>) -> Result<(), CliError> {
    let rows: Vec<Vec<(String, String)>> = match v {
        Value::Array(items) if items.iter().all(Value::is_object) => {
            items.iter().map(|item| flatten("", item)).collect()
        }
        Value::Object(_) => vec![flatten("", v)],
        other => {
            writeln!(buf, "{}", scalar_cell(other))?;
            return Ok(());
        }
    };
    let mut w = csv::Writer::from_writer(buf);
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| k))
            .map_err(|e| CliError::Io(e.into()))?;
    }
    for row in &rows {
        w.write_record(row.iter().map(|(_, v)| v))
            .map_err(|e| CliError::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

fn flatten(prefix: &str, v: &Value) -> Vec<(String, String)> {
    match v {
        Value::Object(map) => map
            .iter()
            .flat_map(|(k, v)| {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v)
            })
            .collect(),
        other => vec![(prefix.to_string(), scalar_cell(other))],
    }
}

fn scalar_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::Array(_) | Value::Object(_) => i.to_string(),
                _ => scalar_cell(i),
            })
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    }
}
