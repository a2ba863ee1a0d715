use std::ops::Range;

use super::vocab::PmiVocabulary;
use crate::corpus::Window;
use crate::scalar::Real;

/// Contiguous run of positions that is masked as a whole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Unit {
    pub start: usize,
    pub len: usize,
}

impl Unit {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn positions(&self) -> Range<usize> {
        self.start..self.end()
    }
}

/// How a window is cut into maskable units.
#[derive(Debug, Clone, Copy)]
pub enum Segmentation<'a, T> {
    SingleToken,
    WholeWord,
    /// Greedy longest-leftmost vocabulary matches; everything else falls back to words.
    Pmi(&'a PmiVocabulary<T>),
}

/// Splits the maskable positions of `window` into units, left to right.
///
/// Units are disjoint, cover every maskable position, and never contain padding or
/// separators.
pub fn segment_units<T: Real>(window: &Window<'_>, mode: Segmentation<'_, T>) -> Vec<Unit> {
    let n = window.len();
    let mut units = Vec::with_capacity(n);
    let mut pos = 0;
    while pos < n {
        if !window.is_maskable(pos) {
            pos += 1;
            continue;
        }
        let len = match mode {
            Segmentation::SingleToken => 1,
            Segmentation::WholeWord => word_len(window, pos),
            Segmentation::Pmi(vocab) => {
                let run = maskable_run(window, pos, vocab.n_max());
                vocab
                    .longest_match(&window.ids[pos..pos + run])
                    .unwrap_or_else(|| word_len(window, pos))
            }
        };
        units.push(Unit { start: pos, len });
        pos += len;
    }
    units
}

/// Length of the word beginning at `start`: continues while positions are maskable
/// and not flagged as word starts.
fn word_len(window: &Window<'_>, start: usize) -> usize {
    let mut end = start + 1;
    while end < window.len() && window.is_maskable(end) && !window.word_starts[end] {
        end += 1;
    }
    end - start
}

fn maskable_run(window: &Window<'_>, start: usize, limit: usize) -> usize {
    let mut len = 0;
    while len < limit && start + len < window.len() && window.is_maskable(start + len) {
        len += 1;
    }
    len
}
