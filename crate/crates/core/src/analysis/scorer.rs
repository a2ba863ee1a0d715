use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::corpus::{PackedDataset, TokenId};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Source of `log p(original id at position | corrupted window)`, natural log.
///
/// Implementations return one value per query, in query order. Values must be `<= 0`;
/// callers reject anything else.
pub trait Scorer<T: Real> {
    fn score(&mut self, corrupted: &[TokenId], queries: &[(usize, TokenId)]) -> Result<Vec<T>>;
}

impl<T: Real, S: Scorer<T> + ?Sized> Scorer<T> for &mut S {
    fn score(&mut self, corrupted: &[TokenId], queries: &[(usize, TokenId)]) -> Result<Vec<T>> {
        (**self).score(corrupted, queries)
    }
}

impl<T: Real> Scorer<T> for Box<dyn Scorer<T> + '_> {
    fn score(&mut self, corrupted: &[TokenId], queries: &[(usize, TokenId)]) -> Result<Vec<T>> {
        (**self).score(corrupted, queries)
    }
}

/// Scores through `scorer` and enforces the contract: one finite-or-`-inf` value
/// `<= 0` per query.
pub(crate) fn checked_score<T: Real, S: Scorer<T> + ?Sized>(
    scorer: &mut S,
    corrupted: &[TokenId],
    queries: &[(usize, TokenId)],
) -> Result<Vec<T>> {
    let logp = scorer.score(corrupted, queries)?;
    if logp.len() != queries.len() {
        return Err(Error::ContractViolation(format!(
            "{} values returned for {} queries",
            logp.len(),
            queries.len()
        )));
    }
    if let Some((i, v)) = logp
        .iter()
        .enumerate()
        .find(|(_, v)| v.is_nan() || **v > T::zero())
    {
        return Err(Error::ContractViolation(format!(
            "log-probability {v} for query {i} is not <= 0"
        )));
    }
    Ok(logp)
}

/// Every id equally likely: `-ln V` for each query.
#[derive(Debug, Clone, Copy)]
pub struct UniformScorer<T> {
    logp: T,
}

impl<T: Real> UniformScorer<T> {
    pub fn new(vocab_size: u32) -> Self {
        Self {
            logp: -T::from_count(vocab_size as u64).ln(),
        }
    }
}

impl<T: Real> Scorer<T> for UniformScorer<T> {
    fn score(&mut self, _: &[TokenId], queries: &[(usize, TokenId)]) -> Result<Vec<T>> {
        Ok(vec![self.logp; queries.len()])
    }
}

/// Context-free maximum-likelihood unigram model. Ids never seen score `-inf`.
#[derive(Debug, Clone)]
pub struct UnigramScorer<T> {
    logp: Vec<T>,
}

impl<T: Real> UnigramScorer<T> {
    /// Frequencies over the non-padding, non-separator positions of `ds`.
    pub fn from_packed(ds: &PackedDataset) -> Result<Self> {
        let vocab = ds.vocab();
        let mut counts = vec![0u64; vocab.size as usize];
        for w in ds.windows() {
            for &id in w.ids {
                if !vocab.is_boundary(id) {
                    counts[id as usize] += 1;
                }
            }
        }
        Self::from_counts(&counts)
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Degenerate(
                "unigram model over an empty corpus".into(),
            ));
        }
        let total = T::from_count(total);
        let logp = counts
            .iter()
            .map(|&c| (T::from_count(c) / total).ln())
            .collect();
        Ok(Self { logp })
    }

    pub fn log_prob(&self, id: TokenId) -> T {
        self.logp
            .get(id as usize)
            .copied()
            .unwrap_or(T::neg_infinity())
    }
}

impl<T: Real> Scorer<T> for UnigramScorer<T> {
    fn score(&mut self, _: &[TokenId], queries: &[(usize, TokenId)]) -> Result<Vec<T>> {
        Ok(queries.iter().map(|&(_, id)| self.log_prob(id)).collect())
    }
}

#[derive(Serialize)]
struct Request<'a> {
    qid: u64,
    seq: &'a [TokenId],
    queries: &'a [(usize, TokenId)],
}

#[derive(Deserialize)]
struct Response {
    qid: u64,
    logp: Vec<f64>,
}

/// Line-delimited JSON scorer protocol over any reader/writer pair.
///
/// Request: `{"qid":n,"seq":[...],"queries":[[pos,orig],...]}`.
/// Response: `{"qid":n,"logp":[...]}`, one value per query in the same order.
#[derive(Debug)]
pub struct ProtocolScorer<R, W> {
    reader: R,
    writer: W,
    next_qid: u64,
    line: String,
}

impl<R: BufRead, W: Write> ProtocolScorer<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader,
            writer,
            next_qid: 0,
            line: String::new(),
        }
    }

    /// Requests issued so far.
    pub fn queries_sent(&self) -> u64 {
        self.next_qid
    }
}

impl<T: Real, R: BufRead, W: Write> Scorer<T> for ProtocolScorer<R, W> {
    fn score(&mut self, corrupted: &[TokenId], queries: &[(usize, TokenId)]) -> Result<Vec<T>> {
        let qid = self.next_qid;
        self.next_qid += 1;
        let request = Request {
            qid,
            seq: corrupted,
            queries,
        };
        serde_json::to_writer(&mut self.writer, &request).map_err(std::io::Error::from)?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;

        self.line.clear();
        if self.reader.read_line(&mut self.line)? == 0 {
            return Err(Error::ContractViolation(format!(
                "scorer closed its output before answering query {qid}"
            )));
        }
        let response: Response = serde_json::from_str(&self.line).map_err(|e| {
            Error::ContractViolation(format!("unreadable response to query {qid}: {e}"))
        })?;
        if response.qid != qid {
            return Err(Error::ContractViolation(format!(
                "response for query {} arrived while waiting for {qid}",
                response.qid
            )));
        }
        Ok(response.logp.into_iter().map(T::from_f64_lossy).collect())
    }
}

/// Protocol scorer talking to a child process (run through `sh -c`) on its stdio.
#[derive(Debug)]
pub struct ProcessScorer {
    child: Child,
    protocol: Option<ProtocolScorer<BufReader<ChildStdout>, BufWriter<ChildStdin>>>,
}

impl ProcessScorer {
    pub fn spawn(command: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        Ok(Self {
            child,
            protocol: Some(ProtocolScorer::new(
                BufReader::new(stdout),
                BufWriter::new(stdin),
            )),
        })
    }
}

impl<T: Real> Scorer<T> for ProcessScorer {
    fn score(&mut self, corrupted: &[TokenId], queries: &[(usize, TokenId)]) -> Result<Vec<T>> {
        self.protocol
            .as_mut()
            .expect("protocol open until drop")
            .score(corrupted, queries)
    }
}

impl Drop for ProcessScorer {
    fn drop(&mut self) {
        // closing stdin signals end of input
        self.protocol.take();
        let _ = self.child.wait();
    }
}
