//! PMI n-gram mining and segmentation of windows into maskable units.

mod counts;
mod segment;
mod vocab;

pub use counts::{pmi_score, NgramCounts};
pub use segment::{segment_units, Segmentation, Unit};
pub use vocab::{build_vocab, format_significant, PmiEntry, PmiVocabulary};

pub const DEFAULT_N_MAX: usize = 5;
pub const DEFAULT_MIN_COUNT: u64 = 10;
pub const DEFAULT_SIZE_CAP: usize = 10_000;
