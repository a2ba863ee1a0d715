//! Tokenized corpus ingestion, fixed-length packing and seeded epoch iteration.

mod epoch;
mod format;
mod pack;

pub use epoch::{epoch_stream, EpochStream, SeqRng};
pub use format::{
    load_binary, load_jsonl, load_tokens, write_binary, write_id_list, write_jsonl, CorpusRecord,
    BINARY_MAGIC, BINARY_VERSION,
};
pub use pack::{pack_sequences, read_packed, write_packed, PackedDataset, PackedHeader, Window};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type TokenId = u32;

/// Vocabulary size plus the three special ids the pipeline relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocab {
    pub size: u32,
    pub mask_id: TokenId,
    pub pad_id: TokenId,
    pub sep_id: TokenId,
}

impl Vocab {
    pub fn new(size: u32, mask_id: TokenId, pad_id: TokenId, sep_id: TokenId) -> Result<Self> {
        let vocab = Self {
            size,
            mask_id,
            pad_id,
            sep_id,
        };
        vocab.validate()?;
        Ok(vocab)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            size,
            mask_id,
            pad_id,
            sep_id,
        } = *self;
        if mask_id == pad_id || mask_id == sep_id || pad_id == sep_id {
            return Err(Error::Config(format!(
                "special ids must be distinct (mask={mask_id}, pad={pad_id}, sep={sep_id})"
            )));
        }
        for (name, id) in [("mask", mask_id), ("pad", pad_id), ("sep", sep_id)] {
            if id >= size {
                return Err(Error::Config(format!(
                    "{name} id {id} not below vocabulary size {size}"
                )));
            }
        }
        Ok(())
    }

    /// Pad and separator positions are never masked and never counted in n-grams.
    #[inline]
    pub fn is_boundary(&self, id: TokenId) -> bool {
        id == self.pad_id || id == self.sep_id
    }

    #[inline]
    pub fn check(&self, id: TokenId) -> Result<()> {
        if id < self.size {
            Ok(())
        } else {
            Err(Error::Range {
                id,
                vocab_size: self.size,
            })
        }
    }

    /// Number of ids eligible as random replacements (everything except mask, pad and sep).
    pub fn replaceable_count(&self) -> u32 {
        self.size - 3
    }

    /// Maps `k` in `0..replaceable_count()` onto the k-th non-special id.
    pub fn nth_replaceable(&self, k: u32) -> TokenId {
        let mut specials = [self.mask_id, self.pad_id, self.sep_id];
        specials.sort_unstable();
        let mut id = k;
        for s in specials {
            if id >= s {
                id += 1;
            }
        }
        id
    }
}

/// One document: token ids with a flag per position marking where a word begins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub ids: Vec<TokenId>,
    pub word_starts: Vec<bool>,
    pub doc_index: usize,
}

impl TokenSequence {
    pub fn new(ids: Vec<TokenId>, word_starts: Vec<bool>, doc_index: usize) -> Result<Self> {
        if ids.len() != word_starts.len() {
            return Err(Error::Integrity(format!(
                "document {doc_index}: {} ids but {} word_starts flags",
                ids.len(),
                word_starts.len()
            )));
        }
        if word_starts.first() == Some(&false) {
            return Err(Error::Integrity(format!(
                "document {doc_index}: first position must start a word"
            )));
        }
        Ok(Self {
            ids,
            word_starts,
            doc_index,
        })
    }

    /// Every token starts its own word.
    pub fn from_ids(ids: Vec<TokenId>, doc_index: usize) -> Self {
        let word_starts = vec![true; ids.len()];
        Self {
            ids,
            word_starts,
            doc_index,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}
