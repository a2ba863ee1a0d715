use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlmask_core::masking::{PolicySampling, Strategy};
use serde::Serialize;

/// Deterministic masked-language-modeling corruption pipeline.
#[derive(Debug, Parser)]
#[command(name = "mlmask", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML or JSON file whose keys mirror flags. Flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pack a corpus into fixed-length windows.
    Pack(PackArgs),
    /// Mine a PMI n-gram vocabulary.
    PmiBuild(PmiBuildArgs),
    /// Write corrupted examples for one or more epochs.
    Mask(MaskArgs),
    /// Coverage and span-length statistics of a mask stream.
    Stats {
        #[command(subcommand)]
        which: StatsCommand,
    },
    /// Masked perplexity of a scorer over one epoch.
    Ppl(PplArgs),
    /// Pseudo-log-likelihood scoring of minimal pairs.
    Pll(PllArgs),
    /// Rate-sweep metrics.
    Metric {
        #[command(subcommand)]
        which: MetricCommand,
    },
}

impl Command {
    /// Subcommand path as typed, e.g. `stats coverage`.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pack(_) => "pack",
            Command::PmiBuild(_) => "pmi-build",
            Command::Mask(_) => "mask",
            Command::Stats {
                which: StatsCommand::Coverage(_),
            } => "stats coverage",
            Command::Stats {
                which: StatsCommand::Spans(_),
            } => "stats spans",
            Command::Ppl(_) => "ppl",
            Command::Pll(_) => "pll",
            Command::Metric {
                which: MetricCommand::Normalize(_),
            } => "metric normalize",
            Command::Metric {
                which: MetricCommand::Relative(_),
            } => "metric relative",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Probability that a vocabulary n-gram is corrupted in full, by n-gram length.
    Coverage(StatsArgs),
    /// Histogram of contiguous corrupted run lengths.
    Spans(StatsArgs),
}

#[derive(Debug, Subcommand)]
pub enum MetricCommand {
    /// (x - x_baseline) / population standard deviation.
    Normalize(MetricArgs),
    /// x - x_baseline.
    Relative(MetricArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingArg {
    Exact,
    Bernoulli,
}

impl From<SamplingArg> for PolicySampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::Exact => PolicySampling::Exact,
            SamplingArg::Bernoulli => PolicySampling::Bernoulli,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn rate(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

fn strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: mlmask_core::Error| e.to_string())
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PackArgs {
    /// Corpus in JSONL or binary form.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    pub seq_len: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub vocab: VocabArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct VocabArgs {
    #[arg(long)]
    pub vocab_size: u32,
    #[arg(long)]
    pub mask_id: u32,
    #[arg(long)]
    pub pad_id: u32,
    #[arg(long)]
    pub sep_id: u32,
}

/// Vocabulary flags that may instead come from a packed file header.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OptionalVocabArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vocab_size: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_id: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad_id: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sep_id: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PmiBuildArgs {
    /// Packed dataset, or a raw corpus together with the vocabulary flags.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = mlmask_core::pmi::DEFAULT_N_MAX)]
    pub n_max: usize,
    #[arg(long, default_value_t = mlmask_core::pmi::DEFAULT_MIN_COUNT)]
    pub min_count: u64,
    #[arg(long, default_value_t = mlmask_core::pmi::DEFAULT_SIZE_CAP)]
    pub size_cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub vocab: OptionalVocabArgs,
}

/// Replacement policy and strategy parameters shared by every masking subcommand.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PolicyArgs {
    #[arg(long, default_value_t = 1.0, value_parser = rate)]
    pub p_mask: f64,
    #[arg(long, default_value_t = 0.0, value_parser = rate)]
    pub p_rand: f64,
    #[arg(long, default_value_t = 0.0, value_parser = rate)]
    pub p_same: f64,
    #[arg(long, value_enum, default_value_t = SamplingArg::Exact)]
    pub policy_sampling: SamplingArg,
    /// Extra same-token predictions as a fraction of maskable positions.
    #[arg(long, default_value_t = 0.0, value_parser = rate)]
    pub extra_same: f64,
    #[arg(long, default_value_t = mlmask_core::masking::DEFAULT_MEAN_SPAN)]
    pub mean_span: f64,
    /// PMI vocabulary TSV; required by the pmi strategy and by coverage statistics.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmi_vocab: Option<PathBuf>,
}

/// Rates of a single masking configuration.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RateArgs {
    #[arg(long, default_value = "uniform", value_parser = strategy)]
    pub strategy: Strategy,
    /// Coupled corruption and prediction rate.
    #[arg(long, default_value_t = 0.15, value_parser = rate)]
    pub mask_rate: f64,
    /// Overrides the corruption rate given by --mask-rate.
    #[arg(long, value_parser = rate)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corruption_rate: Option<f64>,
    /// Overrides the prediction rate given by --mask-rate.
    #[arg(long, value_parser = rate)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_rate: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MaskArgs {
    /// Packed dataset.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Expected window length; must match the packed dataset.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seq_len: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub epochs: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub rates: RateArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct StatsArgs {
    /// Packed dataset; mask plans are regenerated from it.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Repeat to compare strategies.
    #[arg(long, value_parser = strategy, default_value = "uniform")]
    pub strategy: Vec<Strategy>,
    /// Repeat to sweep rates.
    #[arg(long, value_parser = rate, required = true)]
    pub mask_rate: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub epoch: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[command(flatten)]
    #[serde(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PplArgs {
    /// Packed dataset.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// uniform, unigram, extern:<command> or fifo:<request path>:<response path>.
    #[arg(long, default_value = "unigram")]
    pub scorer: String,
    #[arg(long, default_value_t = 0)]
    pub epoch: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub rates: RateArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PllArgs {
    /// JSONL, one `{"good":[ids],"bad":[ids]}` per line.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "unigram")]
    pub scorer: String,
    /// Packed dataset supplying the vocabulary and unigram frequencies.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub vocab: OptionalVocabArgs,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MetricArgs {
    /// JSON object mapping masking rate to value, inline or as a file path.
    #[arg(long)]
    pub values: String,
    #[arg(long, default_value_t = 0.15)]
    pub baseline: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}
