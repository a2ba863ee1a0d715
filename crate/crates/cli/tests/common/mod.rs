//! Synthetic corpora and a thin wrapper around the built binary.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use mlmask_core::corpus::{write_jsonl, TokenSequence, Vocab};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VOCAB_SIZE: u32 = 32_000;
pub const MASK: u32 = 2;
pub const PAD: u32 = 0;
pub const SEP: u32 = 1;

pub fn vocab() -> Vocab {
    Vocab::new(VOCAB_SIZE, MASK, PAD, SEP).unwrap()
}

/// Zipf-distributed words of one to three subwords, with a fixed set of multi-word
/// collocations spliced in.
pub struct Lexicon {
    words: Vec<Vec<u32>>,
    phrases: Vec<Vec<usize>>,
    zipf: WeightedIndex<f64>,
}

impl Lexicon {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words: Vec<Vec<u32>> = (0..6000)
            .map(|_| {
                let u: f64 = rng.random();
                let pieces = if u < 0.7 {
                    1
                } else if u < 0.95 {
                    2
                } else {
                    3
                };
                (0..pieces)
                    .map(|_| rng.random_range(3..VOCAB_SIZE))
                    .collect()
            })
            .collect();
        let phrases = (0..400)
            .map(|_| {
                let len = rng.random_range(2..=3);
                (0..len).map(|_| rng.random_range(200..3000)).collect()
            })
            .collect();
        let zipf = WeightedIndex::new((0..words.len()).map(|r| 1.0 / (r as f64 + 1.0))).unwrap();
        Self {
            words,
            phrases,
            zipf,
        }
    }

    /// `docs` documents of `min_words..max_words` word draws each.
    pub fn corpus(
        &self,
        docs: usize,
        min_words: usize,
        max_words: usize,
        seed: u64,
    ) -> Vec<TokenSequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..docs)
            .map(|d| {
                let mut ids = Vec::new();
                let mut starts = Vec::new();
                let mut push = |w: &[u32]| {
                    for (i, &id) in w.iter().enumerate() {
                        ids.push(id);
                        starts.push(i == 0);
                    }
                };
                for _ in 0..rng.random_range(min_words..max_words) {
                    if rng.random_bool(0.08) {
                        let p = &self.phrases[rng.random_range(0..self.phrases.len())];
                        for &w in p {
                            push(&self.words[w]);
                        }
                    } else {
                        push(&self.words[self.zipf.sample(&mut rng)]);
                    }
                }
                TokenSequence::new(ids, starts, d).unwrap()
            })
            .collect()
    }
}

pub fn write_corpus(docs: &[TokenSequence], path: &Path) {
    let file = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    write_jsonl(docs, file).unwrap();
}

pub fn mlmask<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlmask"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs `mlmask` inside `dir` so relative paths, and hence recorded configs, agree
/// across directories.
pub fn mlmask_in<S: AsRef<std::ffi::OsStr>>(dir: &Path, args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlmask"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs `mlmask` and panics with its stderr unless it exits 0.
pub fn mlmask_ok<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    let out = mlmask(args);
    assert!(
        out.status.success(),
        "mlmask {:?} failed: {}",
        args.iter()
            .map(|a| a.as_ref().to_owned())
            .collect::<Vec<_>>(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub const VOCAB_FLAGS: [&str; 8] = [
    "--vocab-size",
    "32000",
    "--mask-id",
    "2",
    "--pad-id",
    "0",
    "--sep-id",
    "1",
];
