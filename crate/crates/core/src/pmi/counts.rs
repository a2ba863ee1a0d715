use std::collections::HashMap;

use rayon::prelude::*;

use crate::corpus::{PackedDataset, TokenId, TokenSequence, Vocab};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exact counts of every contiguous n-gram of length `1..=n_max`.
///
/// N-grams never span a separator, padding, or the edge of a document/window.
/// `slots[n]` is the number of positions where an n-gram of length `n` fits,
/// which is the denominator of every maximum-likelihood n-gram probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramCounts {
    n_max: usize,
    counts: HashMap<Box<[TokenId]>, u64>,
    slots: Vec<u64>,
}

impl NgramCounts {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::Config(format!("n_max {n_max} < 2")));
        }
        Ok(Self {
            n_max,
            counts: HashMap::new(),
            slots: vec![0; n_max + 1],
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn count(&self, gram: &[TokenId]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Number of n-gram slots of length `n` (zero outside `1..=n_max`).
    pub fn slots(&self, n: usize) -> u64 {
        self.slots.get(n).copied().unwrap_or(0)
    }

    pub fn total_unigrams(&self) -> u64 {
        self.slots(1)
    }

    /// Distinct n-grams counted (all lengths).
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[TokenId], u64)> + '_ {
        self.counts.iter().map(|(k, &v)| (&**k, v))
    }

    /// Maximum-likelihood probability of `gram` among slots of its length.
    pub fn probability<T: Real>(&self, gram: &[TokenId]) -> T {
        let slots = self.slots(gram.len());
        if slots == 0 {
            return T::zero();
        }
        T::from_count(self.count(gram)) / T::from_count(slots)
    }

    /// Counts one boundary-free run of tokens.
    pub fn add_segment(&mut self, seg: &[TokenId]) {
        for n in 1..=self.n_max.min(seg.len()) {
            self.slots[n] += (seg.len() - n + 1) as u64;
            for gram in seg.windows(n) {
                match self.counts.get_mut(gram) {
                    Some(c) => *c += 1,
                    None => {
                        self.counts.insert(gram.into(), 1);
                    }
                }
            }
        }
    }

    /// Counts a token run, splitting it at separator and padding ids.
    pub fn add_tokens(&mut self, ids: &[TokenId], vocab: &Vocab) {
        for seg in ids.split(|&id| vocab.is_boundary(id)) {
            if !seg.is_empty() {
                self.add_segment(seg);
            }
        }
    }

    /// Adds every count of `other` into `self`. Associative and commutative.
    pub fn merge(&mut self, other: NgramCounts) -> Result<()> {
        if other.n_max != self.n_max {
            return Err(Error::Config(format!(
                "cannot merge counts with n_max {} into n_max {}",
                other.n_max, self.n_max
            )));
        }
        for (n, s) in other.slots.into_iter().enumerate() {
            self.slots[n] += s;
        }
        if self.counts.len() < other.counts.len() {
            // fold the smaller map into the larger one
            let mine = std::mem::replace(&mut self.counts, other.counts);
            for (k, v) in mine {
                *self.counts.entry(k).or_insert(0) += v;
            }
        } else {
            for (k, v) in other.counts {
                *self.counts.entry(k).or_insert(0) += v;
            }
        }
        Ok(())
    }

    pub fn from_sequences(docs: &[TokenSequence], n_max: usize, vocab: &Vocab) -> Result<Self> {
        let mut counts = Self::new(n_max)?;
        for doc in docs {
            counts.add_tokens(&doc.ids, vocab);
        }
        Ok(counts)
    }

    /// Counts within each window; n-grams do not continue across window edges.
    pub fn from_packed(ds: &PackedDataset, n_max: usize) -> Result<Self> {
        let mut counts = Self::new(n_max)?;
        for w in ds.windows() {
            counts.add_tokens(w.ids, ds.vocab());
        }
        Ok(counts)
    }

    /// Counts `shards` contiguous groups of documents in parallel and merges them.
    pub fn from_sequences_sharded(
        docs: &[TokenSequence],
        n_max: usize,
        vocab: &Vocab,
        shards: usize,
    ) -> Result<Self> {
        Self::new(n_max)?;
        let chunk = docs.len().div_ceil(shards.max(1)).max(1);
        docs.par_chunks(chunk)
            .map(|part| Self::from_sequences(part, n_max, vocab))
            .try_reduce(
                || Self::new(n_max).expect("validated n_max"),
                |mut a, b| {
                    a.merge(b)?;
                    Ok(a)
                },
            )
    }

    /// Parallel counting over packed windows.
    pub fn from_packed_sharded(ds: &PackedDataset, n_max: usize, shards: usize) -> Result<Self> {
        Self::new(n_max)?;
        let n = ds.len();
        let chunk = n.div_ceil(shards.max(1)).max(1);
        let starts: Vec<usize> = (0..n).step_by(chunk).collect();
        starts
            .into_par_iter()
            .map(|start| {
                let mut c = Self::new(n_max)?;
                for i in start..(start + chunk).min(n) {
                    c.add_tokens(ds.window(i).ids, ds.vocab());
                }
                Ok(c)
            })
            .try_reduce(
                || Self::new(n_max).expect("validated n_max"),
                |mut a, b| {
                    a.merge(b)?;
                    Ok(a)
                },
            )
    }
}

/// Pointwise mutual information of `gram` in nats.
///
/// For a bigram this is `ln(p(w1 w2) / (p(w1) p(w2)))`. For longer n-grams it is the
/// minimum of `ln(p(gram) / (p(left) p(right)))` over every split into a non-empty
/// left and right part.
pub fn pmi_score<T: Real>(gram: &[TokenId], counts: &NgramCounts) -> Result<T> {
    if gram.len() < 2 || gram.len() > counts.n_max() {
        return Err(Error::Config(format!(
            "cannot score a {}-gram with n_max {}",
            gram.len(),
            counts.n_max()
        )));
    }
    if counts.count(gram) == 0 {
        return Err(Error::UndefinedScore(gram.to_vec()));
    }
    let p_gram = counts.probability::<T>(gram);
    let mut best: Option<T> = None;
    for split in 1..gram.len() {
        let (left, right) = gram.split_at(split);
        for part in [left, right] {
            if counts.count(part) == 0 {
                return Err(Error::UndefinedScore(part.to_vec()));
            }
        }
        let p_left = counts.probability::<T>(left);
        let p_right = counts.probability::<T>(right);
        let score = (p_gram / (p_left * p_right)).ln();
        best = Some(match best {
            Some(b) if b <= score => b,
            _ => score,
        });
    }
    Ok(best.expect("at least one split"))
}
