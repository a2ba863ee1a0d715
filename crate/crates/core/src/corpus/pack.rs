use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::format::{write_record, CorpusRecord};
use super::{TokenId, TokenSequence, Vocab};
use crate::error::{Error, Result};

/// Documents concatenated with separators and cut into windows of `seq_len` tokens.
///
/// Storage is flat: window `i` occupies `ids[i * seq_len..(i + 1) * seq_len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedDataset {
    seq_len: usize,
    vocab: Vocab,
    ids: Vec<TokenId>,
    word_starts: Vec<bool>,
}

/// Borrowed view of one packed window.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub index: usize,
    pub ids: &'a [TokenId],
    pub word_starts: &'a [bool],
    pub vocab: &'a Vocab,
}

impl<'a> Window<'a> {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn is_maskable(&self, pos: usize) -> bool {
        !self.vocab.is_boundary(self.ids[pos])
    }

    pub fn maskable_positions(&self) -> Vec<usize> {
        (0..self.ids.len())
            .filter(|&p| self.is_maskable(p))
            .collect()
    }

    pub fn maskable_count(&self) -> usize {
        self.ids
            .iter()
            .filter(|&&id| !self.vocab.is_boundary(id))
            .count()
    }
}

impl PackedDataset {
    /// Builds a dataset from already-packed windows (flattened), validating shape and ids.
    pub fn from_windows(
        seq_len: usize,
        vocab: Vocab,
        ids: Vec<TokenId>,
        word_starts: Vec<bool>,
    ) -> Result<Self> {
        if seq_len < 2 {
            return Err(Error::Config(format!("sequence length {seq_len} < 2")));
        }
        if !ids.len().is_multiple_of(seq_len) || ids.len() != word_starts.len() {
            return Err(Error::Integrity(format!(
                "{} ids / {} flags do not form windows of {seq_len}",
                ids.len(),
                word_starts.len()
            )));
        }
        for &id in &ids {
            vocab.check(id)?;
        }
        Ok(Self {
            seq_len,
            vocab,
            ids,
            word_starts,
        })
    }

    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.ids.len() / self.seq_len
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn window(&self, index: usize) -> Window<'_> {
        let range = index * self.seq_len..(index + 1) * self.seq_len;
        Window {
            index,
            ids: &self.ids[range.clone()],
            word_starts: &self.word_starts[range],
            vocab: &self.vocab,
        }
    }

    pub fn windows(&self) -> impl ExactSizeIterator<Item = Window<'_>> + '_ {
        (0..self.len()).map(move |i| self.window(i))
    }

    /// Count of positions that are neither padding nor separator.
    pub fn content_tokens(&self) -> usize {
        self.ids
            .iter()
            .filter(|&&id| !self.vocab.is_boundary(id))
            .count()
    }

    pub fn header(&self) -> PackedHeader {
        PackedHeader {
            seq_len: self.seq_len,
            vocab: self.vocab,
            windows: self.len(),
        }
    }
}

/// Concatenates documents in order with `sep_id` between consecutive documents and
/// chunks the stream into windows of `seq_len`; the final window is right-padded.
pub fn pack_sequences(
    docs: &[TokenSequence],
    seq_len: usize,
    vocab: &Vocab,
) -> Result<PackedDataset> {
    if seq_len < 2 {
        return Err(Error::Config(format!("sequence length {seq_len} < 2")));
    }
    let total: usize = docs.iter().map(|d| d.len()).sum::<usize>() + docs.len().saturating_sub(1);
    let padded = total.div_ceil(seq_len) * seq_len;
    let mut ids = Vec::with_capacity(padded);
    let mut word_starts = Vec::with_capacity(padded);
    for (i, doc) in docs.iter().enumerate() {
        if i > 0 {
            ids.push(vocab.sep_id);
            word_starts.push(true);
        }
        for &id in &doc.ids {
            vocab.check(id)?;
        }
        ids.extend_from_slice(&doc.ids);
        word_starts.extend_from_slice(&doc.word_starts);
    }
    ids.resize(padded, vocab.pad_id);
    word_starts.resize(padded, true);
    Ok(PackedDataset {
        seq_len,
        vocab: *vocab,
        ids,
        word_starts,
    })
}

/// First line of a packed dataset file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedHeader {
    pub seq_len: usize,
    pub vocab: Vocab,
    pub windows: usize,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine<P> {
    packed: PackedHeader,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    run_config: Option<P>,
}

/// Writes the header line (with optional provenance) and one canonical record per window.
pub fn write_packed<W: Write>(
    ds: &PackedDataset,
    provenance: Option<&serde_json::Value>,
    mut out: W,
) -> Result<()> {
    let header = HeaderLine {
        packed: ds.header(),
        run_config: provenance,
    };
    serde_json::to_writer(&mut out, &header).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    for w in ds.windows() {
        write_record(&mut out, w.ids, w.word_starts)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a packed dataset, returning it with the provenance block of its header, if any.
pub fn read_packed<R: BufRead>(reader: R) -> Result<(PackedDataset, Option<serde_json::Value>)> {
    let mut lines = reader.lines();
    let first = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing packed dataset header".into(),
    })??;
    let header: HeaderLine<serde_json::Value> =
        serde_json::from_str(&first).map_err(|e| Error::Parse {
            line: 1,
            message: format!("bad packed header: {e}"),
        })?;
    let PackedHeader {
        seq_len,
        vocab,
        windows,
    } = header.packed;
    vocab.validate()?;
    let mut ids = Vec::with_capacity(windows * seq_len);
    let mut word_starts = Vec::with_capacity(windows * seq_len);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let record: CorpusRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if record.ids.len() != seq_len || record.word_starts.len() != seq_len {
            return Err(Error::Parse {
                line: lineno,
                message: format!("window is not {seq_len} positions long"),
            });
        }
        ids.extend_from_slice(&record.ids);
        word_starts.extend_from_slice(&record.word_starts);
    }
    let ds = PackedDataset::from_windows(seq_len, vocab, ids, word_starts)?;
    if ds.len() != windows {
        return Err(Error::Integrity(format!(
            "header announces {windows} windows, file holds {}",
            ds.len()
        )));
    }
    Ok((ds, header.run_config))
}
