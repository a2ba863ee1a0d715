//! Deterministic masked-language-modeling corruption pipeline.
//!
//! * [`corpus`]: corpus formats, fixed-length packing and seeded epoch iteration.
//! * [`pmi`]: n-gram counting, PMI vocabulary mining and unit segmentation.
//! * [`masking`]: mask sampling strategies, decoupled corruption/prediction planning,
//!   replacement policies and materialization of corrupted examples.
//! * [`analysis`]: coverage and span statistics, masked perplexity, pseudo-log-likelihood
//!   scoring and rate-sweep metrics.
//!
//! Scores, log-probabilities and metrics are generic over [`Real`] (`f32` or `f64`);
//! the `*F64` / `*F32` aliases below fix the scalar.

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod masking;
pub mod pmi;
pub mod scalar;

pub use corpus::{PackedDataset, TokenId, TokenSequence, Vocab};
pub use error::{Error, Result};
pub use scalar::Real;

pub type PmiVocabularyF64 = pmi::PmiVocabulary<f64>;
pub type PmiVocabularyF32 = pmi::PmiVocabulary<f32>;
pub type PmiEntryF64 = pmi::PmiEntry<f64>;
pub type PmiEntryF32 = pmi::PmiEntry<f32>;
pub type MaskerF64<'a> = masking::Masker<'a, f64>;
pub type MaskerF32<'a> = masking::Masker<'a, f32>;
pub type UniformScorerF64 = analysis::UniformScorer<f64>;
pub type UniformScorerF32 = analysis::UniformScorer<f32>;
pub type UnigramScorerF64 = analysis::UnigramScorer<f64>;
pub type UnigramScorerF32 = analysis::UnigramScorer<f32>;
