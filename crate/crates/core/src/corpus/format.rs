//! Corpus file formats.
//!
//! Canonical JSONL, one document per line:
//! `{"ids":[5,6,7],"word_starts":[true,true,false]}`.
//!
//! Binary: magic `MLMC`, `u16` version, `u32` vocabulary size, then for each
//! document a `u32` length, `length` little-endian `u32` ids and a packed
//! LSB-first bitset of `word_starts` (`ceil(length / 8)` bytes). All integers
//! are little-endian.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::{TokenSequence, Vocab};
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"MLMC";
pub const BINARY_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub ids: Vec<u32>,
    pub word_starts: Vec<bool>,
}

impl CorpusRecord {
    pub(crate) fn into_sequence(self, vocab: &Vocab, doc_index: usize) -> Result<TokenSequence> {
        for &id in &self.ids {
            vocab.check(id)?;
        }
        TokenSequence::new(self.ids, self.word_starts, doc_index)
    }
}

/// Reads a corpus in either format, sniffing the binary magic.
pub fn load_tokens<R: Read>(source: R, vocab: &Vocab) -> Result<Vec<TokenSequence>> {
    let mut reader = BufReader::new(source);
    let head = reader.fill_buf()?;
    if head.starts_with(BINARY_MAGIC) {
        load_binary(reader, vocab)
    } else {
        load_jsonl(reader, vocab)
    }
}

pub fn load_jsonl<R: BufRead>(reader: R, vocab: &Vocab) -> Result<Vec<TokenSequence>> {
    let mut docs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        let doc_index = docs.len();
        let seq = record
            .into_sequence(vocab, doc_index)
            .map_err(|e| match e {
                Error::Integrity(message) => Error::Parse {
                    line: lineno + 1,
                    message,
                },
                other => other,
            })?;
        docs.push(seq);
    }
    Ok(docs)
}

pub fn write_jsonl<W: Write>(docs: &[TokenSequence], mut out: W) -> Result<()> {
    for doc in docs {
        write_record(&mut out, &doc.ids, &doc.word_starts)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes one `{"ids":...,"word_starts":...}` line without an intermediate allocation per field.
pub(crate) fn write_record<W: Write>(out: &mut W, ids: &[u32], word_starts: &[bool]) -> Result<()> {
    out.write_all(b"{\"ids\":[")?;
    write_id_list(out, ids)?;
    out.write_all(b"],\"word_starts\":[")?;
    for (i, &flag) in word_starts.iter().enumerate() {
        if i > 0 {
            out.write_all(b",")?;
        }
        out.write_all(if flag { b"true" } else { b"false" })?;
    }
    out.write_all(b"]}\n")?;
    Ok(())
}

pub fn write_id_list<W: Write>(out: &mut W, ids: &[u32]) -> std::io::Result<()> {
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{id}")?;
    }
    Ok(())
}

pub fn load_binary<R: Read>(mut reader: R, vocab: &Vocab) -> Result<Vec<TokenSequence>> {
    let mut magic = [0u8; 4];
    read_exact_or(&mut reader, &mut magic, "header")?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Binary(format!("bad magic {magic:?}")));
    }
    let mut buf2 = [0u8; 2];
    read_exact_or(&mut reader, &mut buf2, "version")?;
    let version = u16::from_le_bytes(buf2);
    if version != BINARY_VERSION {
        return Err(Error::Binary(format!("unsupported version {version}")));
    }
    let mut buf4 = [0u8; 4];
    read_exact_or(&mut reader, &mut buf4, "vocabulary size")?;
    let header_vocab = u32::from_le_bytes(buf4);
    if header_vocab != vocab.size {
        return Err(Error::Binary(format!(
            "file vocabulary size {header_vocab} differs from configured {}",
            vocab.size
        )));
    }

    let mut docs = Vec::new();
    loop {
        match read_u32_or_eof(&mut reader)? {
            None => break,
            Some(len) => {
                let len = len as usize;
                let doc_index = docs.len();
                let mut raw = vec![0u8; len * 4];
                read_exact_or(&mut reader, &mut raw, "document ids")?;
                let ids: Vec<u32> = raw
                    .chunks_exact(4)
                    .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                    .collect();
                let mut bits = vec![0u8; len.div_ceil(8)];
                read_exact_or(&mut reader, &mut bits, "word_starts bitset")?;
                let word_starts = (0..len).map(|i| bits[i / 8] >> (i % 8) & 1 == 1).collect();
                let record = CorpusRecord { ids, word_starts };
                docs.push(
                    record
                        .into_sequence(vocab, doc_index)
                        .map_err(|e| match e {
                            Error::Integrity(m) => Error::Binary(m),
                            other => other,
                        })?,
                );
            }
        }
    }
    Ok(docs)
}

pub fn write_binary<W: Write>(docs: &[TokenSequence], vocab: &Vocab, mut out: W) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&BINARY_VERSION.to_le_bytes())?;
    out.write_all(&vocab.size.to_le_bytes())?;
    for doc in docs {
        let len = u32::try_from(doc.len())
            .map_err(|_| Error::Binary(format!("document {} too long", doc.doc_index)))?;
        out.write_all(&len.to_le_bytes())?;
        for id in &doc.ids {
            out.write_all(&id.to_le_bytes())?;
        }
        let mut bits = vec![0u8; doc.len().div_ceil(8)];
        for (i, &flag) in doc.word_starts.iter().enumerate() {
            if flag {
                bits[i / 8] |= 1 << (i % 8);
            }
        }
        out.write_all(&bits)?;
    }
    out.flush()?;
    Ok(())
}

fn read_exact_or<R: Read>(reader: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    reader.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Binary(format!("truncated {what}")),
        _ => Error::Io(e),
    })
}

fn read_u32_or_eof<R: Read>(reader: &mut R) -> Result<Option<u32>> {
    let mut buf = [0u8; 4];
    let mut filled = 0;
    while filled < 4 {
        let n = reader.read(&mut buf[filled..])?;
        if n == 0 {
            return if filled == 0 {
                Ok(None)
            } else {
                Err(Error::Binary("truncated document length".into()))
            };
        }
        filled += n;
    }
    Ok(Some(u32::from_le_bytes(buf)))
}
