//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any fails.

// `ensure!` negates comparisons on purpose so NaN fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::{mlmask_in, write_corpus, Lexicon, MASK, PAD, SEP, VOCAB_FLAGS};
use mlmask_core::analysis::{
    masked_perplexity, minimal_pair_accuracy, normalized_performance, pll_score, pmi_coverage,
    relative_metric, span_histogram, Scorer, UniformScorer, UnigramScorer,
};
use mlmask_core::corpus::{load_tokens, pack_sequences, PackedDataset, TokenSequence, Vocab};
use mlmask_core::masking::{effective_rates, Masker, MaskingConfig, ReplacementPolicy, Strategy};
use mlmask_core::pmi::{build_vocab, pmi_score, NgramCounts, PmiEntry, PmiVocabulary};
use mlmask_core::{Error, TokenId};
use num_rational::Ratio;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn vocab() -> Vocab {
    common::vocab()
}

fn lexicon_dataset(docs: usize, seed: u64) -> PackedDataset {
    let docs = Lexicon::new(seed).corpus(docs, 100, 300, seed + 1);
    pack_sequences(&docs, 128, &vocab()).unwrap()
}

/// Windows of 128 distinct non-special ids.
fn full_windows(count: usize) -> PackedDataset {
    let ids: Vec<TokenId> = (0..count).flat_map(|_| 3..131).collect();
    let starts = vec![true; ids.len()];
    PackedDataset::from_windows(128, vocab(), ids, starts).unwrap()
}

fn mine(ds: &PackedDataset, n_max: usize, min_count: u64) -> PmiVocabulary<f64> {
    let counts = NgramCounts::from_packed_sharded(ds, n_max, 8).unwrap();
    build_vocab(&counts, mlmask_core::pmi::DEFAULT_SIZE_CAP, min_count).unwrap()
}

/// `floor(m * maskable)` for `m = num / 100`, in integers.
fn floor_budget(percent: usize, maskable: usize) -> usize {
    percent * maskable / 100
}

fn count_exactness() -> Outcome {
    let ds = lexicon_dataset(5200, 10);
    ensure!(ds.len() >= 10_000, "only {} windows", ds.len());
    let pmi = mine(&ds, 3, 10);
    let start = Instant::now();
    let mut plans_checked = 0usize;
    for strategy in [
        Strategy::Uniform,
        Strategy::WholeWord,
        Strategy::Span,
        Strategy::Pmi,
    ] {
        for percent in [15usize, 20, 40, 80] {
            let config = MaskingConfig::new(strategy, percent as f64 / 100.0).with_seed(1);
            let plans = Masker::new(&ds, config, Some(&pmi))
                .unwrap()
                .plan_epoch(0)
                .unwrap();
            ensure!(
                plans.len() == ds.len(),
                "{} plans for {} windows",
                plans.len(),
                ds.len()
            );
            for plan in &plans {
                let w = ds.window(plan.source_sequence);
                let maskable = w.ids.iter().filter(|&&id| id != PAD && id != SEP).count();
                let want = floor_budget(percent, maskable);
                ensure!(
                    plan.corrupted_count() == want,
                    "{strategy} m={percent}% window {}: {} corrupted, expected {want}",
                    plan.source_sequence,
                    plan.corrupted_count()
                );
            }
            plans_checked += plans.len();
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{plans_checked} plans over {} windows, 4 strategies x 4 rates, {elapsed:.2?}",
        ds.len()
    ))
}

fn effective_rate_arithmetic() -> Outcome {
    let r = |n: i64| Ratio::new(n, 100);
    let exact = effective_rates(r(40), r(40), r(80), r(10));
    ensure!(exact == (r(36), r(36)), "got {exact:?}");
    let mask_and_random = effective_rates(r(40), r(40), Ratio::new(7, 8), Ratio::new(1, 8));
    ensure!(
        mask_and_random == (r(40), r(40)),
        "35% mask + 5% random gave {mask_and_random:?}"
    );

    let ds = full_windows(500);
    for policy in [ReplacementPolicy::ALL_MASK, ReplacementPolicy::BERT] {
        let config = MaskingConfig::new(Strategy::Uniform, 0.4)
            .with_policy(policy)
            .with_extra_same(0.05)
            .with_seed(3);
        let plans = Masker::<f64>::new(&ds, config, None)
            .unwrap()
            .plan_epoch(0)
            .unwrap();
        for plan in &plans {
            ensure!(
                plan.predictions.len() == 57,
                "{} predictions, expected 57",
                plan.predictions.len()
            );
        }
    }
    Ok(format!(
        "effective (0.36, 0.36) exact; +5% same predicts 57/128 = {:.3} on 500 windows",
        57.0 / 128.0
    ))
}

fn decoupling() -> Outcome {
    let ds = full_windows(1000);
    let config = MaskingConfig::new(Strategy::Uniform, 0.2)
        .with_rates(0.2, 0.4)
        .with_seed(4);
    let plans = Masker::<f64>::new(&ds, config, None)
        .unwrap()
        .plan_epoch(0)
        .unwrap();
    ensure!(
        plans.len() == 2000,
        "{} plans for 1000 windows",
        plans.len()
    );
    let mut by_window: HashMap<usize, Vec<&mlmask_core::masking::MaskPlan>> = HashMap::new();
    for p in &plans {
        by_window.entry(p.source_sequence).or_default().push(p);
    }
    for (w, ps) in &by_window {
        ensure!(ps.len() == 2, "window {w} has {} plans", ps.len());
        let a: HashSet<usize> = ps[0].corrupted_positions().collect();
        let b: HashSet<usize> = ps[1].corrupted_positions().collect();
        ensure!(
            a.len() == 25 && b.len() == 25,
            "window {w}: {} / {}",
            a.len(),
            b.len()
        );
        ensure!(a.is_disjoint(&b), "window {w}: duplicates overlap");
        ensure!(
            ps.iter().all(|p| p.predictions.len() == 25),
            "window {w}: predictions"
        );
    }
    let infeasible = MaskingConfig::new(Strategy::Uniform, 0.4)
        .with_rates(0.4, 0.9)
        .with_seed(4);
    let got = Masker::<f64>::new(&ds, infeasible, None).and_then(|m| m.plan_epoch(0));
    ensure!(
        matches!(got, Err(Error::Infeasible(_))),
        "(0.40, 0.90) gave {:?}",
        got.map(|p| p.len())
    );
    Ok("1000 windows: 2 disjoint plans of 25 each; (0.40, 0.90) infeasible".into())
}

fn hypergeometric_coverage() -> Outcome {
    let start = Instant::now();
    let ds = full_windows(100_000);
    let entries = (3u32..130)
        .map(|a| PmiEntry {
            gram: vec![a, a + 1].into(),
            score: 1.0,
            count: 1,
        })
        .collect();
    let pairs = PmiVocabulary::from_ranked(entries, 2, 127).unwrap();
    let mut coverage = Vec::new();
    for (m, k) in [(0.15, 19.0), (0.40, 51.0)] {
        let config = MaskingConfig::new(Strategy::Uniform, m).with_seed(17);
        let plans = Masker::new(&ds, config, Some(&pairs))
            .unwrap()
            .plan_epoch(0)
            .unwrap();
        let report = pmi_coverage(&ds, &plans, &pairs, m, Strategy::Uniform).unwrap();
        let got: f64 = report.probability(2);
        let want = k * (k - 1.0) / (128.0 * 127.0);
        ensure!(
            ((got - want) / want).abs() <= 0.02,
            "m={m}: {got:.5} vs closed form {want:.5}"
        );
        coverage.push(got);
    }
    let ratio = coverage[1] / coverage[0];
    ensure!((ratio - 7.45).abs() <= 0.15, "ratio {ratio:.3}");
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "1e5 windows: {:.5} / {:.5}, ratio {ratio:.3}, {elapsed:.2?}",
        coverage[0], coverage[1]
    ))
}

fn desk_corpus_coverage() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("desk.jsonl");
    write_corpus(&Lexicon::new(20).corpus(1600, 100, 350, 21), &path);
    let bytes = fs::metadata(&path).unwrap().len();
    ensure!(bytes >= 5_000_000, "desk corpus only {bytes} bytes");
    let docs = load_tokens(fs::File::open(&path).unwrap(), &vocab()).unwrap();
    let ds = pack_sequences(&docs, 128, &vocab()).unwrap();
    let pmi = mine(&ds, 5, 10);
    let overall = |strategy: Strategy, m: f64| -> f64 {
        let config = MaskingConfig::new(strategy, m).with_seed(9);
        let plans = Masker::new(&ds, config, Some(&pmi))
            .unwrap()
            .plan_epoch(0)
            .unwrap();
        pmi_coverage(&ds, &plans, &pmi, m, strategy)
            .unwrap()
            .overall()
            .probability()
    };
    let uni15 = overall(Strategy::Uniform, 0.15);
    let uni40 = overall(Strategy::Uniform, 0.40);
    let pmi15 = overall(Strategy::Pmi, 0.15);
    let ratio = uni40 / uni15;
    ensure!(
        (5.0..=12.0).contains(&ratio),
        "uniform 40%/15% ratio {ratio:.2}"
    );
    ensure!(
        pmi15 > uni15,
        "pmi 15% {pmi15:.4} <= uniform 15% {uni15:.4}"
    );
    Ok(format!(
        "{:.1} MB, {} vocabulary n-grams: uniform 40%/15% = {ratio:.2}, pmi 15% {pmi15:.3} > uniform 15% {uni15:.4}",
        bytes as f64 / 1e6,
        pmi.len()
    ))
}

fn span_statistics() -> Outcome {
    let ds = lexicon_dataset(5200, 30);
    ensure!(ds.len() >= 10_000, "only {} windows", ds.len());
    let mut means = Vec::new();
    for m in [0.15, 0.20, 0.40, 0.80] {
        let config = MaskingConfig::new(Strategy::Span, m).with_seed(31);
        let plans = Masker::<f64>::new(&ds, config, None)
            .unwrap()
            .plan_epoch(0)
            .unwrap();
        let mean: f64 = span_histogram(&plans).mean_length().unwrap();
        if m <= 0.40 {
            ensure!((2.5..=3.5).contains(&mean), "m={m}: mean run {mean:.3}");
        } else {
            ensure!(mean > 3.5, "m={m}: mean run {mean:.3}");
        }
        means.push(format!("{m}: {mean:.2}"));
    }
    Ok(format!("mean run length {}", means.join(", ")))
}

/// Small corpus over ids below 100.
fn small_corpus() -> (Vocab, Vec<TokenSequence>) {
    let vocab = Vocab::new(100, MASK, PAD, SEP).unwrap();
    let docs: Vec<TokenSequence> = (0..60)
        .map(|d| {
            let ids = (0..120u32)
                .map(|i| 3 + ((i * i + 7 * d + i / 5) % 97).min(96))
                .collect();
            TokenSequence::from_ids(ids, d as usize)
        })
        .collect();
    (vocab, docs)
}

fn perplexity_contracts() -> Outcome {
    let (vocab, docs) = small_corpus();
    let ds = pack_sequences(&docs, 128, &vocab).unwrap();
    ensure!(
        ds.content_tokens() <= 10_000,
        "{} tokens",
        ds.content_tokens()
    );
    let config = MaskingConfig::new(Strategy::Uniform, 0.15).with_seed(2);
    let masker = Masker::<f64>::new(&ds, config, None).unwrap();
    let uniform = masked_perplexity(&masker, 0, &mut UniformScorer::new(100)).unwrap();
    // exp(ln 100) is not 100 in binary floating point; see the notes in the README
    let ulps = ((uniform - 100.0) / (100f64.next_up() - 100.0)).abs();
    ensure!(
        ulps <= 8.0,
        "uniform perplexity {uniform:e}, {ulps} ulp from 100"
    );

    let mut freq: HashMap<u32, f64> = HashMap::new();
    let mut total = 0.0;
    for d in &docs {
        for &id in &d.ids {
            *freq.entry(id).or_insert(0.0) += 1.0;
            total += 1.0;
        }
    }
    let config = MaskingConfig::new(Strategy::Span, 0.4)
        .with_policy(ReplacementPolicy::BERT)
        .with_seed(6);
    let masker = Masker::<f64>::new(&ds, config, None).unwrap();
    let mut nll = 0.0;
    let mut n = 0.0;
    for ex in masker.mask_epoch(0).unwrap() {
        for (_, orig) in ex.targets {
            nll -= (freq[&orig] / total).ln();
            n += 1.0;
        }
    }
    let want = (nll / n).exp();
    let got = masked_perplexity(&masker, 0, &mut UnigramScorer::from_packed(&ds).unwrap()).unwrap();
    let rel = (got / want - 1.0).abs();
    ensure!(rel <= 1e-9, "unigram {got} vs brute force {want}");
    Ok(format!(
        "uniform V=100 -> {uniform} ({ulps} ulp); unigram {got:.6} vs brute force, rel err {rel:.1e}"
    ))
}

/// Probability one on every token of the good sentences, `1e-6` elsewhere.
struct Oracle<'a> {
    good: &'a [Vec<TokenId>],
    queries: usize,
}

impl Scorer<f64> for Oracle<'_> {
    fn score(&mut self, seq: &[TokenId], q: &[(usize, TokenId)]) -> mlmask_core::Result<Vec<f64>> {
        self.queries += q.len();
        Ok(q.iter()
            .map(|&(pos, orig)| {
                let mut restored = seq.to_vec();
                restored[pos] = orig;
                if seq[pos] == MASK && self.good.contains(&restored) {
                    0.0
                } else {
                    1e-6f64.ln()
                }
            })
            .collect())
    }
}

fn pll_contracts() -> Outcome {
    let (vocab, docs) = small_corpus();
    let pairs: Vec<(Vec<TokenId>, Vec<TokenId>)> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let good = d.ids[..5 + i % 20].to_vec();
            let mut bad = good.clone();
            bad.swap(0, 1 + i % 4);
            if bad == good {
                bad[0] = if good[0] == 3 { 4 } else { 3 };
            }
            (good, bad)
        })
        .collect();
    let good: Vec<Vec<TokenId>> = pairs.iter().map(|p| p.0.clone()).collect();
    let mut oracle = Oracle {
        good: &good,
        queries: 0,
    };
    for s in &good {
        let before = oracle.queries;
        let pll = pll_score(s, &mut oracle, &vocab).unwrap();
        ensure!(pll == 0.0, "oracle pll {pll}");
        ensure!(
            oracle.queries - before == s.len(),
            "{} queries for {} tokens",
            oracle.queries - before,
            s.len()
        );
    }
    let acc: f64 = minimal_pair_accuracy(&pairs, &mut oracle, &vocab).unwrap();
    ensure!(acc == 1.0, "oracle accuracy {acc}");

    let ds = pack_sequences(&docs, 128, &vocab).unwrap();
    let mut unigram = UnigramScorer::from_packed(&ds).unwrap();
    let mut counts: HashMap<TokenId, f64> = HashMap::new();
    for d in &docs {
        for &id in &d.ids {
            *counts.entry(id).or_default() += 1.0;
        }
    }
    let total: f64 = counts.values().sum();
    let mut worst = 0.0f64;
    for s in &good {
        let want: f64 = s.iter().map(|id| (counts[id] / total).ln()).sum();
        let got: f64 = pll_score(s, &mut unigram, &vocab).unwrap();
        worst = worst.max((got / want - 1.0).abs());
    }
    ensure!(worst <= 1e-9, "unigram pll rel err {worst:e}");
    Ok(format!(
        "oracle pll 0 and accuracy 1 over {} pairs, n queries per sentence; unigram rel err {worst:.1e}",
        pairs.len()
    ))
}

fn pmi_correctness() -> Outcome {
    let v = Vocab::new(12, MASK, PAD, SEP).unwrap();
    let abab = vec![TokenSequence::from_ids(vec![5, 6, 5, 6], 0)];
    let counts = NgramCounts::from_sequences(&abab, 2, &v).unwrap();
    let score: f64 = pmi_score(&[5, 6], &counts).unwrap();
    let want = (8.0f64 / 3.0).ln();
    ensure!((score - want).abs() <= 1e-12, "{score} vs ln(8/3) = {want}");

    let ds = lexicon_dataset(400, 40);
    let serial = NgramCounts::from_packed(&ds, 5).unwrap();
    for shards in [2, 3, 8, 17] {
        let sharded = NgramCounts::from_packed_sharded(&ds, 5, shards).unwrap();
        ensure!(
            sharded == serial,
            "{shards} shards differ from serial counts"
        );
    }
    Ok(format!(
        "abab bigram {score:.15}; sharded (2, 3, 8, 17) == serial over {} distinct n-grams",
        serial.distinct()
    ))
}

fn run_pipeline(dir: &Path, threads: &str) -> Result<(), String> {
    let steps: Vec<Vec<&str>> = vec![
        [
            &[
                "pack",
                "--input",
                "corpus.jsonl",
                "--output",
                "packed.jsonl",
            ][..],
            &VOCAB_FLAGS,
        ]
        .concat(),
        vec![
            "pmi-build",
            "--input",
            "packed.jsonl",
            "--output",
            "pmi.tsv",
            "--min-count",
            "5",
        ],
        vec![
            "mask",
            "--input",
            "packed.jsonl",
            "--output",
            "masked.jsonl",
            "--strategy",
            "pmi",
            "--pmi-vocab",
            "pmi.tsv",
            "--mask-rate",
            "0.4",
            "--p-mask",
            "0.8",
            "--p-rand",
            "0.1",
            "--p-same",
            "0.1",
            "--epochs",
            "2",
        ],
        vec![
            "mask",
            "--input",
            "packed.jsonl",
            "--output",
            "decoupled.jsonl",
            "--corruption-rate",
            "0.2",
            "--prediction-rate",
            "0.4",
            "--strategy",
            "span",
        ],
        vec![
            "stats",
            "coverage",
            "--input",
            "packed.jsonl",
            "--output",
            "coverage.csv",
            "--pmi-vocab",
            "pmi.tsv",
            "--strategy",
            "uniform",
            "--strategy",
            "pmi",
            "--mask-rate",
            "0.15",
            "--mask-rate",
            "0.4",
        ],
        vec![
            "stats",
            "spans",
            "--input",
            "packed.jsonl",
            "--output",
            "spans.json",
            "--strategy",
            "span",
            "--mask-rate",
            "0.4",
            "--format",
            "json",
        ],
        vec![
            "ppl",
            "--input",
            "packed.jsonl",
            "--output",
            "ppl.json",
            "--mask-rate",
            "0.4",
        ],
        vec![
            "pll",
            "--pairs",
            "pairs.jsonl",
            "--corpus",
            "packed.jsonl",
            "--output",
            "pll.json",
        ],
        vec![
            "metric",
            "normalize",
            "--values",
            r#"{"0.15": 84.2, "0.4": 84.5, "0.5": 84.7}"#,
            "--output",
            "metric.csv",
        ],
    ];
    for step in steps {
        let args: Vec<&str> = [&step[..], &["--seed", "5", "--threads", threads]].concat();
        let out = mlmask_in(dir, &args);
        if !out.status.success() {
            return Err(format!(
                "{:?}: {}",
                step,
                String::from_utf8_lossy(&out.stderr).trim()
            ));
        }
    }
    Ok(())
}

const PIPELINE_OUTPUTS: [&str; 9] = [
    "packed.jsonl",
    "pmi.tsv",
    "masked.jsonl",
    "decoupled.jsonl",
    "coverage.csv",
    "spans.json",
    "ppl.json",
    "pll.json",
    "metric.csv",
];

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let docs = Lexicon::new(50).corpus(1000, 20, 150, 51);
    let pairs: String = docs
        .iter()
        .take(50)
        .map(|d| {
            let good = &d.ids[..d.ids.len().min(12)];
            let mut bad = good.to_vec();
            bad.reverse();
            format!("{}\n", serde_json::json!({"good": good, "bad": bad}))
        })
        .collect();
    let runs = [("a", "1"), ("b", "1"), ("c", "8")];
    for (name, threads) in runs {
        let dir = root.path().join(name);
        fs::create_dir(&dir).unwrap();
        write_corpus(&docs, &dir.join("corpus.jsonl"));
        fs::write(dir.join("pairs.jsonl"), &pairs).unwrap();
        run_pipeline(&dir, threads)?;
    }
    let mut total = 0usize;
    for file in PIPELINE_OUTPUTS {
        let a = fs::read(root.path().join("a").join(file)).unwrap();
        total += a.len();
        for (name, threads) in &runs[1..] {
            let other = fs::read(root.path().join(name).join(file)).unwrap();
            ensure!(
                a == other,
                "{file} differs in run {name} (--threads {threads})"
            );
        }
    }
    Ok(format!(
        "1000 documents, {} outputs ({total} bytes) identical across 2 runs and --threads 1/8",
        PIPELINE_OUTPUTS.len()
    ))
}

fn throughput() -> Outcome {
    let ds = lexicon_dataset(2000, 60);
    let config = MaskingConfig::new(Strategy::Uniform, 0.15).with_seed(7);
    let masker = Masker::<f64>::new(&ds, config, None).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let tokens_per_epoch = ds.len() * ds.seq_len();
    let mut buf = Vec::new();
    let mut bytes = 0usize;
    let start = Instant::now();
    let mut epochs = 0u64;
    while start.elapsed() < Duration::from_secs(1) || epochs < 2 {
        buf.clear();
        let written = pool
            .install(|| masker.write_epoch(epochs, &mut buf))
            .unwrap();
        ensure!(
            written == ds.len(),
            "{written} examples for {} windows",
            ds.len()
        );
        bytes += buf.len();
        epochs += 1;
    }
    let rate = (tokens_per_epoch as u64 * epochs) as f64 / start.elapsed().as_secs_f64();
    ensure!(rate >= 200_000.0, "{rate:.0} tokens/s");
    Ok(format!(
        "{:.2}M tokens/s single-threaded ({epochs} epochs of {} windows, {:.0} MB of JSONL)",
        rate / 1e6,
        ds.len(),
        bytes as f64 / 1e6
    ))
}

fn metric_arithmetic() -> Outcome {
    let values = [(0.15, 84.2), (0.40, 84.5), (0.50, 84.7)];
    let norm = normalized_performance(&values, 0.15).unwrap();
    let mean = (84.2 + 84.5 + 84.7) / 3.0;
    let sigma = (values
        .iter()
        .map(|(_, x)| (x - mean) * (x - mean))
        .sum::<f64>()
        / 3.0)
        .sqrt();
    ensure!(norm[0].1 == 0.0, "baseline normalizes to {}", norm[0].1);
    for (i, &(_, x)) in values.iter().enumerate() {
        let want = (x - 84.2) / sigma;
        ensure!((norm[i].1 - want).abs() <= 1e-9, "{} vs {want}", norm[i].1);
    }
    ensure!((norm[2].1 - 2.43).abs() < 0.005, "50% gives {}", norm[2].1);
    let rel = relative_metric(&[(0.15, 88.0f64), (0.40, 89.8)], 0.15).unwrap();
    ensure!((rel[1].1 - 1.8).abs() <= 1e-9, "relative {}", rel[1].1);
    Ok(format!(
        "normalized at 50% = {:.4}; relative 89.8 - 88.0 = {:.10}",
        norm[2].1, rel[1].1
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("count exactness", count_exactness),
        ("effective-rate arithmetic", effective_rate_arithmetic),
        ("decoupled corruption and prediction", decoupling),
        ("hypergeometric pair coverage", hypergeometric_coverage),
        ("desk-corpus coverage", desk_corpus_coverage),
        ("span statistics", span_statistics),
        ("perplexity contracts", perplexity_contracts),
        ("pseudo-log-likelihood contracts", pll_contracts),
        ("pmi correctness", pmi_correctness),
        ("determinism", determinism),
        ("throughput", throughput),
        ("metric arithmetic", metric_arithmetic),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
