use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::counts::{pmi_score, NgramCounts};
use crate::corpus::{TokenId, Vocab};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PmiEntry<T> {
    pub gram: Box<[TokenId]>,
    pub score: T,
    /// Corpus count at build time; zero when loaded from a vocabulary file.
    pub count: u64,
}

/// Ranked n-gram vocabulary with longest-match lookup.
#[derive(Debug, Clone)]
pub struct PmiVocabulary<T> {
    entries: Vec<PmiEntry<T>>,
    index: HashMap<Box<[TokenId]>, usize>,
    // every prefix (length >= 2) of every entry, for early exit during matching
    prefixes: HashSet<Box<[TokenId]>>,
    n_max: usize,
    size_cap: usize,
}

impl<T: Real> PmiVocabulary<T> {
    /// Builds a vocabulary from entries already in rank order.
    pub fn from_ranked(entries: Vec<PmiEntry<T>>, n_max: usize, size_cap: usize) -> Result<Self> {
        if entries.len() > size_cap {
            return Err(Error::Config(format!(
                "{} entries exceed size cap {size_cap}",
                entries.len()
            )));
        }
        let mut index = HashMap::with_capacity(entries.len());
        let mut prefixes = HashSet::new();
        for (rank, e) in entries.iter().enumerate() {
            if e.gram.len() < 2 || e.gram.len() > n_max {
                return Err(Error::Config(format!(
                    "entry {:?} has length outside [2, {n_max}]",
                    e.gram
                )));
            }
            if !e.score.is_finite() {
                return Err(Error::Config(format!(
                    "entry {:?} has a non-finite score",
                    e.gram
                )));
            }
            if index.insert(e.gram.clone(), rank).is_some() {
                return Err(Error::Config(format!("duplicate entry {:?}", e.gram)));
            }
            for n in 2..=e.gram.len() {
                prefixes.insert(e.gram[..n].into());
            }
        }
        Ok(Self {
            entries,
            index,
            prefixes,
            n_max,
            size_cap,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn size_cap(&self) -> usize {
        self.size_cap
    }

    pub fn entries(&self) -> &[PmiEntry<T>] {
        &self.entries
    }

    pub fn contains(&self, gram: &[TokenId]) -> bool {
        self.index.contains_key(gram)
    }

    pub fn score(&self, gram: &[TokenId]) -> Option<T> {
        self.index.get(gram).map(|&r| self.entries[r].score)
    }

    pub fn rank(&self, gram: &[TokenId]) -> Option<usize> {
        self.index.get(gram).copied()
    }

    /// Whether some entry starts with `gram` (length >= 2).
    pub fn is_prefix(&self, gram: &[TokenId]) -> bool {
        self.prefixes.contains(gram)
    }

    /// Length of the longest entry that is a prefix of `ids`, if any.
    pub fn longest_match(&self, ids: &[TokenId]) -> Option<usize> {
        let mut best = None;
        for n in 2..=self.n_max.min(ids.len()) {
            let probe = &ids[..n];
            if !self.prefixes.contains(probe) {
                break;
            }
            if self.index.contains_key(probe) {
                best = Some(n);
            }
        }
        best
    }

    /// TSV: `id1 id2 ... idN<TAB>score`, score at 9 significant digits, rank order.
    /// An optional provenance object is written as a leading `# ` comment line.
    pub fn write_tsv<W: Write>(
        &self,
        provenance: Option<&serde_json::Value>,
        mut out: W,
    ) -> Result<()> {
        if let Some(p) = provenance {
            writeln!(out, "# {p}")?;
        }
        for e in &self.entries {
            let ids: Vec<String> = e.gram.iter().map(u32::to_string).collect();
            let score = e.score.to_f64().expect("finite score");
            writeln!(out, "{}\t{}", ids.join(" "), format_significant(score, 9))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a TSV vocabulary, skipping `#` comment lines. Ids are range-checked when
    /// a vocabulary is supplied.
    pub fn read_tsv<R: BufRead>(reader: R, vocab: Option<&Vocab>) -> Result<Self> {
        let mut entries = Vec::new();
        let mut n_max = 2;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let (grams, score) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("missing tab separator".into()))?;
            let gram = grams
                .split(' ')
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|e| parse_err(format!("bad token id {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(v) = vocab {
                for &id in &gram {
                    v.check(id)?;
                }
            }
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad score {score:?}: {e}")))?;
            if gram.len() < 2 {
                return Err(parse_err("entries need at least two tokens".into()));
            }
            n_max = n_max.max(gram.len());
            entries.push(PmiEntry {
                gram: gram.into(),
                score: T::from_f64_lossy(score),
                count: 0,
            });
        }
        let cap = entries.len().max(1);
        Self::from_ranked(entries, n_max, cap).map_err(|e| match e {
            Error::Config(m) => Error::Parse {
                line: 0,
                message: m,
            },
            other => other,
        })
    }
}

/// Ranks all n-grams of length `2..=n_max` with `count >= min_count` by PMI
/// (descending), breaking ties by higher count and then lexicographic id order,
/// and keeps the top `size_cap`.
pub fn build_vocab<T: Real>(
    counts: &NgramCounts,
    size_cap: usize,
    min_count: u64,
) -> Result<PmiVocabulary<T>> {
    if size_cap == 0 {
        return Err(Error::Config("size_cap must be at least 1".into()));
    }
    let candidates: Vec<(&[TokenId], u64)> = counts
        .iter()
        .filter(|(g, c)| g.len() >= 2 && *c >= min_count.max(1))
        .collect();
    let mut scored = candidates
        .into_par_iter()
        .map(|(g, c)| {
            Ok(PmiEntry {
                gram: g.into(),
                score: pmi_score::<T>(g, counts)?,
                count: c,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scored.par_sort_unstable_by(rank_order);
    scored.truncate(size_cap);
    PmiVocabulary::from_ranked(scored, counts.n_max(), size_cap)
}

fn rank_order<T: Real>(a: &PmiEntry<T>, b: &PmiEntry<T>) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| b.count.cmp(&a.count))
        .then_with(|| a.gram.cmp(&b.gram))
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
