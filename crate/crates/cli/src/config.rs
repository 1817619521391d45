//! Run configuration: defaults, then an optional TOML file, then flags.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use serde::{Deserialize, Serialize};
use tsallis_core::lab::{CheckKind, EXACT_TOLERANCE, ROOF_TOLERANCE};
use tsallis_core::OptimizerBudget;

#[derive(Parser, Debug, Default)]
#[command(name = "tsallis", version, about = "Tsallis-q entropies, roofs and polygamy checks")]
pub struct Cli {
    /// entropy, ccq-verify, roof, uq, scan, theorem1 or monogamy
    pub command: Option<String>,

    /// TOML file with any of the fields below; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Check to run for `scan`
    #[arg(long)]
    pub check: Option<String>,

    /// Entropic parameters, comma separated
    #[arg(long = "q", value_delimiter = ',', allow_negative_numbers = true)]
    pub q_values: Option<Vec<f64>>,

    /// Local dimensions of sampled states, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub dims: Option<Vec<i64>>,

    #[arg(long, allow_negative_numbers = true)]
    pub samples: Option<i64>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,

    #[arg(long)]
    pub restarts: Option<usize>,

    #[arg(long)]
    pub samples_per_restart: Option<usize>,

    #[arg(long)]
    pub refine_steps: Option<usize>,

    /// State file, or @bell, @ghzN, @wN
    #[arg(long = "input")]
    pub input_state: Option<String>,

    /// Table output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Full JSON report path
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// json-lines or csv
    #[arg(long)]
    pub format: Option<String>,

    /// tsallis, renyi or tangle
    #[arg(long)]
    pub measure: Option<String>,

    /// convex or concave (roof only)
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Entropy,
    CcqVerify,
    Roof,
    Uq,
    Scan,
    Theorem1,
    Monogamy,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Self::Entropy,
        Self::CcqVerify,
        Self::Roof,
        Self::Uq,
        Self::Scan,
        Self::Theorem1,
        Self::Monogamy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Entropy => "entropy",
            Self::CcqVerify => "ccq-verify",
            Self::Roof => "roof",
            Self::Uq => "uq",
            Self::Scan => "scan",
            Self::Theorem1 => "theorem1",
            Self::Monogamy => "monogamy",
        }
    }

    fn needs_input(self) -> bool {
        matches!(self, Self::Entropy | Self::CcqVerify | Self::Roof | Self::Uq)
    }

    /// The scan check used when the command runs without an input state.
    pub fn sampled_check(self, check: Option<CheckKind>) -> Option<CheckKind> {
        match self {
            Self::Scan => check,
            Self::Theorem1 => Some(CheckKind::Theorem1),
            Self::Monogamy => Some(CheckKind::Monogamy),
            _ => None,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn one_of<T: Copy>(field: &str, value: &str, all: &[T], name: impl Fn(T) -> &'static str) -> Result<T> {
    all.iter().copied().find(|&x| name(x) == value).ok_or_else(|| {
        let names: Vec<_> = all.iter().map(|&x| name(x)).collect();
        anyhow!("{field}: unknown value `{value}` (expected one of {})", names.join(", "))
    })
}

impl FromStr for Command {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        one_of("command", s, &Self::ALL, Self::as_str)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    JsonLines,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json-lines" | "jsonl" => Ok(Self::JsonLines),
            "csv" => Ok(Self::Csv),
            _ => bail!("format: unknown value `{s}` (expected json-lines or csv)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Tsallis,
    Renyi,
    Tangle,
}

impl FromStr for Measure {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        one_of("measure", s, &[Self::Tsallis, Self::Renyi, Self::Tangle], |m| match m {
            Self::Tsallis => "tsallis",
            Self::Renyi => "renyi",
            Self::Tangle => "tangle",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoofKind {
    Convex,
    Concave,
}

impl FromStr for RoofKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        one_of("kind", s, &[Self::Convex, Self::Concave], |k| match k {
            Self::Convex => "convex",
            Self::Concave => "concave",
        })
    }
}

/// A validated run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub check: Option<CheckKind>,
    pub q_values: Vec<f64>,
    pub dims: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Its seed always equals `seed`.
    pub budget: OptimizerBudget,
    pub input_state: Option<String>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub format: Format,
    pub measure: Measure,
    pub kind: RoofKind,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileBudget {
    restarts: Option<usize>,
    samples_per_restart: Option<usize>,
    refine_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    check: Option<String>,
    q_values: Option<Vec<f64>>,
    dims: Option<Vec<i64>>,
    samples: Option<i64>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    budget: Option<FileBudget>,
    input_state: Option<String>,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
    format: Option<String>,
    measure: Option<String>,
    kind: Option<String>,
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("config: cannot read {}", path.display()))?;
    toml::from_str(&text).map_err(|e| anyhow!("config: {}: {}", path.display(), e.message()))
}

/// Parses argv (including the program name) into a validated config.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| anyhow!("{}", e.to_string().trim_end()))?;
    RunConfig::from_cli(cli)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let command: Command = cli
            .command
            .or(file.command)
            .ok_or_else(|| anyhow!("command: missing (give it as the first argument or set `command` in the config file)"))?
            .parse()?;
        let check = cli
            .check
            .or(file.check)
            .map(|c| c.parse::<CheckKind>().map_err(|_| {
                let names: Vec<_> = CheckKind::ALL.iter().map(|k| k.as_str()).collect();
                anyhow!("check: unknown value `{c}` (expected one of {})", names.join(", "))
            }))
            .transpose()?;
        if command == Command::Scan && check.is_none() {
            bail!("check: required for the scan command (use --check)");
        }
        let input_state = cli.input_state.or(file.input_state);
        if command.needs_input() && input_state.is_none() {
            bail!("input_state: required for the {command} command (use --input)");
        }
        let sampled = if input_state.is_none() {
            command.sampled_check(check)
        } else {
            None
        };

        let q_values = cli
            .q_values
            .or(file.q_values)
            .unwrap_or_else(|| sampled.map_or_else(|| vec![2.0], |c| c.default_q_values()));
        if q_values.is_empty() {
            bail!("q_values: must not be empty");
        }
        if let Some(&bad) = q_values.iter().find(|q| !(q.is_finite() && **q > 0.0)) {
            bail!("q_values: every entry must be positive and finite (got {bad})");
        }

        let dims = match cli.dims.or(file.dims) {
            Some(d) => {
                if d.is_empty() {
                    bail!("dims: must not be empty");
                }
                if let Some(&bad) = d.iter().find(|&&x| x < 1) {
                    bail!("dims: every entry must be at least 1 (got {bad})");
                }
                d.into_iter().map(|x| x as usize).collect()
            }
            None => sampled.map_or_else(|| vec![2, 2], |c| c.default_dims()),
        };

        let samples = cli.samples.or(file.samples).unwrap_or(100);
        if samples < 1 {
            bail!("samples: must be at least 1 (got {samples})");
        }

        let tolerance = cli.tolerance.or(file.tolerance).unwrap_or_else(|| match (command, sampled) {
            (_, Some(c)) => c.default_tolerance(),
            (Command::Entropy | Command::CcqVerify, _) => EXACT_TOLERANCE,
            _ => ROOF_TOLERANCE,
        });
        if !(tolerance.is_finite() && tolerance > 0.0) {
            bail!("tolerance: must be positive (got {tolerance})");
        }

        let seed = cli.seed.or(file.seed).unwrap_or(0);
        let fb = file.budget.unwrap_or_default();
        let mut budget = OptimizerBudget::default().with_seed(seed);
        if let Some(r) = cli.restarts.or(fb.restarts) {
            budget.restarts = r;
        }
        if let Some(s) = cli.samples_per_restart.or(fb.samples_per_restart) {
            budget.samples_per_restart = s;
        }
        if let Some(s) = cli.refine_steps.or(fb.refine_steps) {
            budget.refine_steps = s;
        }
        if budget.restarts == 0 {
            bail!("budget.restarts: must be at least 1");
        }

        let format = cli.format.or(file.format).map(|f| f.parse()).transpose()?.unwrap_or(Format::Csv);
        let measure = cli
            .measure
            .or(file.measure)
            .map(|m| m.parse())
            .transpose()?
            .unwrap_or(Measure::Tsallis);
        let kind = cli.kind.or(file.kind).map(|k| k.parse()).transpose()?.unwrap_or(RoofKind::Convex);

        Ok(Self {
            command,
            check,
            q_values,
            dims,
            samples: samples as usize,
            seed,
            tolerance,
            budget,
            input_state,
            out: cli.out.or(file.out),
            report: cli.report.or(file.report),
            format,
            measure,
            kind,
        })
    }
}
