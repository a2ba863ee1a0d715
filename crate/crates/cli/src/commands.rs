use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use mlmask_core::analysis::{
    normalized_performance, perplexity_of, pll_score, pmi_coverage, relative_metric,
    span_histogram, ProcessScorer, ProtocolScorer, Scorer, UniformScorer, UnigramScorer,
};
use mlmask_core::corpus::{load_tokens, pack_sequences, read_packed, write_packed};
use mlmask_core::masking::{Masker, MaskingConfig, ReplacementPolicy, Strategy};
use mlmask_core::pmi::{build_vocab, NgramCounts, PmiVocabulary};
use mlmask_core::{Error, PackedDataset, Result, TokenId, Vocab};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{
    MaskArgs, MetricArgs, OptionalVocabArgs, OutputFormat, PackArgs, PllArgs, PmiBuildArgs,
    PolicyArgs, PplArgs, RateArgs, StatsArgs,
};
use crate::figures::{coverage_csv, spans_csv, sweep_csv};

pub type Pmi = PmiVocabulary<f64>;

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_packed(path: &Path) -> Result<PackedDataset> {
    read_packed(open_input(path)?).map(|(ds, _)| ds)
}

fn load_pmi(path: Option<&PathBuf>, vocab: &Vocab) -> Result<Option<Pmi>> {
    path.map(|p| PmiVocabulary::read_tsv(open_input(p)?, Some(vocab)))
        .transpose()
}

fn provenance_line<W: Write + ?Sized>(out: &mut W, run_config: &Value) -> Result<()> {
    writeln!(out, "# {run_config}")?;
    Ok(())
}

pub fn pack(args: &PackArgs, run_config: &Value) -> Result<()> {
    let v = &args.vocab;
    let vocab = Vocab::new(v.vocab_size, v.mask_id, v.pad_id, v.sep_id)?;
    let docs = load_tokens(File::open(&args.input)?, &vocab)?;
    let ds = pack_sequences(&docs, args.seq_len, &vocab)?;
    let mut out = open_output(args.output.as_deref())?;
    write_packed(&ds, Some(run_config), &mut out)
}

fn resolve_vocab(args: &OptionalVocabArgs) -> Result<Vocab> {
    match (args.vocab_size, args.mask_id, args.pad_id, args.sep_id) {
        (Some(size), Some(mask), Some(pad), Some(sep)) => Vocab::new(size, mask, pad, sep),
        _ => Err(Error::Config(
            "--vocab-size, --mask-id, --pad-id and --sep-id are required without a packed input"
                .into(),
        )),
    }
}

/// True when the first line of `path` is a packed dataset header.
fn is_packed(path: &Path) -> Result<bool> {
    let mut first = String::new();
    open_input(path)?.read_line(&mut first)?;
    Ok(serde_json::from_str::<Value>(&first)
        .map(|v| v.get("packed").is_some())
        .unwrap_or(false))
}

pub fn pmi_build(args: &PmiBuildArgs, run_config: &Value) -> Result<()> {
    let counts = if is_packed(&args.input)? {
        let ds = load_packed(&args.input)?;
        NgramCounts::from_packed_sharded(&ds, args.n_max, rayon::current_num_threads())?
    } else {
        let vocab = resolve_vocab(&args.vocab)?;
        let docs = load_tokens(File::open(&args.input)?, &vocab)?;
        NgramCounts::from_sequences_sharded(
            &docs,
            args.n_max,
            &vocab,
            rayon::current_num_threads(),
        )?
    };
    let pmi = build_vocab::<f64>(&counts, args.size_cap, args.min_count)?;
    let mut out = open_output(args.output.as_deref())?;
    pmi.write_tsv(Some(run_config), &mut out)
}

fn masking_config(
    strategy: Strategy,
    corruption: f64,
    prediction: f64,
    policy: &PolicyArgs,
    seed: u64,
) -> Result<MaskingConfig> {
    let config = MaskingConfig::new(strategy, corruption)
        .with_rates(corruption, prediction)
        .with_policy(ReplacementPolicy::new(
            policy.p_mask,
            policy.p_rand,
            policy.p_same,
        )?)
        .with_extra_same(policy.extra_same)
        .with_mean_span(policy.mean_span)
        .with_seed(seed);
    let config = MaskingConfig {
        policy_sampling: policy.policy_sampling.into(),
        ..config
    };
    config.validate()?;
    Ok(config)
}

fn rates_config(rates: &RateArgs, policy: &PolicyArgs, seed: u64) -> Result<MaskingConfig> {
    masking_config(
        rates.strategy,
        rates.corruption_rate.unwrap_or(rates.mask_rate),
        rates.prediction_rate.unwrap_or(rates.mask_rate),
        policy,
        seed,
    )
}

pub fn mask(args: &MaskArgs, seed: u64, run_config: &Value) -> Result<()> {
    let config = rates_config(&args.rates, &args.policy, seed)?;
    let ds = load_packed(&args.input)?;
    if let Some(l) = args.seq_len {
        if l != ds.seq_len() {
            return Err(Error::Integrity(format!(
                "--seq-len {l} does not match the packed window length {}",
                ds.seq_len()
            )));
        }
    }
    let pmi = load_pmi(args.policy.pmi_vocab.as_ref(), ds.vocab())?;
    let masker = Masker::new(&ds, config, pmi.as_ref())?;
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer(&mut out, &json!({ "run_config": run_config }))
        .map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    for epoch in 0..args.epochs {
        masker.write_epoch(epoch, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn stats_coverage(args: &StatsArgs, seed: u64, run_config: &Value) -> Result<()> {
    let ds = load_packed(&args.input)?;
    let pmi = load_pmi(args.policy.pmi_vocab.as_ref(), ds.vocab())?
        .ok_or_else(|| Error::Config("coverage statistics need --pmi-vocab".into()))?;
    let mut reports = Vec::new();
    for &strategy in &args.strategy {
        for &m in &args.mask_rate {
            let config = masking_config(strategy, m, m, &args.policy, seed)?;
            let plans = Masker::new(&ds, config, Some(&pmi))?.plan_epoch(args.epoch)?;
            reports.push(pmi_coverage(&ds, &plans, &pmi, m, strategy)?);
        }
    }
    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        OutputFormat::Csv => {
            provenance_line(&mut out, run_config)?;
            coverage_csv(&reports, &mut out)?;
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let overall = r.overall();
                    json!({
                        "strategy": r.strategy,
                        "masking_rate": r.masking_rate,
                        "per_length": r.per_length.iter().map(|(n, c)| json!({
                            "ngram_len": n,
                            "fully_masked": c.fully_masked,
                            "occurrences": c.occurrences,
                            "coverage": c.probability::<f64>(),
                        })).collect::<Vec<_>>(),
                        "overall": {
                            "fully_masked": overall.fully_masked,
                            "occurrences": overall.occurrences,
                            "coverage": overall.probability::<f64>(),
                        },
                    })
                })
                .collect();
            write_json(
                &mut out,
                &json!({"run_config": run_config, "reports": rows}),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn stats_spans(args: &StatsArgs, seed: u64, run_config: &Value) -> Result<()> {
    let ds = load_packed(&args.input)?;
    let pmi = load_pmi(args.policy.pmi_vocab.as_ref(), ds.vocab())?;
    let mut histograms = Vec::new();
    for &strategy in &args.strategy {
        for &m in &args.mask_rate {
            let config = masking_config(strategy, m, m, &args.policy, seed)?;
            let plans = Masker::new(&ds, config, pmi.as_ref())?.plan_epoch(args.epoch)?;
            histograms.push((strategy, m, span_histogram(&plans)));
        }
    }
    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        OutputFormat::Csv => {
            provenance_line(&mut out, run_config)?;
            spans_csv(&histograms, &mut out)?;
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = histograms
                .iter()
                .map(|(s, m, h)| {
                    json!({
                        "strategy": s,
                        "masking_rate": m,
                        "mean_length": h.mean_length::<f64>(),
                        "counts": h.counts.iter().map(|(l, c)| json!([l, c])).collect::<Vec<_>>(),
                    })
                })
                .collect();
            write_json(
                &mut out,
                &json!({"run_config": run_config, "histograms": rows}),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_json<W: Write + ?Sized>(out: &mut W, value: &Value) -> Result<()> {
    serde_json::to_writer(&mut *out, value).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// `uniform`, `unigram`, `extern:<command>` or `fifo:<request path>:<response path>`.
fn make_scorer(
    source: &str,
    vocab: &Vocab,
    corpus: Option<&PackedDataset>,
) -> Result<Box<dyn Scorer<f64>>> {
    if let Some(cmd) = source.strip_prefix("extern:") {
        return Ok(Box::new(ProcessScorer::spawn(cmd)?));
    }
    if let Some(paths) = source.strip_prefix("fifo:") {
        let (req, resp) = paths.split_once(':').ok_or_else(|| {
            Error::Config("--scorer fifo: expects <request path>:<response path>".into())
        })?;
        // request side first, so a peer that opens its input before its output can proceed
        let writer = BufWriter::new(File::create(req)?);
        let reader = BufReader::new(File::open(resp)?);
        return Ok(Box::new(ProtocolScorer::new(reader, writer)));
    }
    match source {
        "uniform" => Ok(Box::new(UniformScorer::new(vocab.size))),
        "unigram" => {
            let ds = corpus
                .ok_or_else(|| Error::Config("the unigram scorer needs a packed corpus".into()))?;
            Ok(Box::new(UnigramScorer::from_packed(ds)?))
        }
        other => Err(Error::Config(format!(
            "unknown scorer {other:?}; expected uniform, unigram, extern:<cmd> or fifo:<req>:<resp>"
        ))),
    }
}

pub fn ppl(args: &PplArgs, seed: u64, run_config: &Value) -> Result<()> {
    let config = rates_config(&args.rates, &args.policy, seed)?;
    let ds = load_packed(&args.input)?;
    let pmi = load_pmi(args.policy.pmi_vocab.as_ref(), ds.vocab())?;
    let masker = Masker::new(&ds, config, pmi.as_ref())?;
    let mut scorer = make_scorer(&args.scorer, ds.vocab(), Some(&ds))?;
    let examples = masker.mask_epoch(args.epoch)?;
    let predictions: usize = examples.iter().map(|e| e.targets.len()).sum();
    let perplexity = perplexity_of(&examples, &mut scorer)?;
    let mut out = open_output(args.output.as_deref())?;
    write_json(
        &mut out,
        &json!({
            "run_config": run_config,
            "perplexity": perplexity,
            "predictions": predictions,
        }),
    )?;
    out.flush()?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairLine {
    good: Vec<TokenId>,
    bad: Vec<TokenId>,
}

#[derive(Serialize)]
struct PairScore {
    good: f64,
    bad: f64,
}

pub fn pll(args: &PllArgs, run_config: &Value) -> Result<()> {
    let corpus = args.corpus.as_deref().map(load_packed).transpose()?;
    let vocab = match &corpus {
        Some(ds) => *ds.vocab(),
        None => resolve_vocab(&args.vocab)?,
    };
    let mut pairs = Vec::new();
    for (i, line) in open_input(&args.pairs)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: PairLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        for &id in p.good.iter().chain(&p.bad) {
            vocab.check(id)?;
        }
        pairs.push((p.good, p.bad));
    }
    if pairs.is_empty() {
        return Err(Error::Config(format!(
            "{} holds no pairs",
            args.pairs.display()
        )));
    }
    let mut scorer = make_scorer(&args.scorer, &vocab, corpus.as_ref())?;
    let mut scores = Vec::with_capacity(pairs.len());
    for (good, bad) in &pairs {
        scores.push(PairScore {
            good: pll_score(good, &mut scorer, &vocab)?,
            bad: pll_score(bad, &mut scorer, &vocab)?,
        });
    }
    // ties count half, as in minimal_pair_accuracy
    let halves: u64 = scores
        .iter()
        .map(|s| match s.good.partial_cmp(&s.bad) {
            Some(std::cmp::Ordering::Greater) => 2,
            Some(std::cmp::Ordering::Equal) => 1,
            _ => 0,
        })
        .sum();
    let accuracy = halves as f64 / (2 * pairs.len()) as f64;
    let mut out = open_output(args.output.as_deref())?;
    write_json(
        &mut out,
        &json!({"run_config": run_config, "accuracy": accuracy, "pairs": scores}),
    )?;
    out.flush()?;
    Ok(())
}

/// Rate-to-value object, given inline or as a path to a JSON file.
fn parse_values(source: &str) -> Result<Vec<(f64, f64)>> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(source)?
    };
    let map: serde_json::Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: format!("--values: {e}"),
        })?;
    let mut values = Vec::with_capacity(map.len());
    for (k, v) in map {
        let rate: f64 = k
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("--values key {k:?} is not a masking rate")))?;
        let x = v
            .as_f64()
            .ok_or_else(|| Error::Config(format!("--values entry {k:?} is not a number")))?;
        values.push((rate, x));
    }
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(values)
}

pub fn metric(args: &MetricArgs, normalize: bool, run_config: &Value) -> Result<()> {
    let values = parse_values(&args.values)?;
    let (result, column) = if normalize {
        (
            normalized_performance(&values, args.baseline)?,
            "normalized_value",
        )
    } else {
        (relative_metric(&values, args.baseline)?, "relative_value")
    };
    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        OutputFormat::Csv => {
            provenance_line(&mut out, run_config)?;
            sweep_csv(&result, column, &mut out)?;
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = result
                .iter()
                .map(|(r, v)| json!({"masking_rate": r, column: v}))
                .collect();
            write_json(&mut out, &json!({"run_config": run_config, "values": rows}))?;
        }
    }
    out.flush()?;
    Ok(())
}
