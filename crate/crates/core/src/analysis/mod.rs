//! Statistics over mask streams and scorer-based evaluation.
//!
//! Count aggregation runs in parallel as commutative merges. Floating-point sums are
//! taken in a fixed left-to-right order with compensation, so results do not depend
//! on thread count.

mod coverage;
mod metrics;
mod scorer;
mod scoring;
mod spans;

pub use coverage::{pmi_coverage, vocabulary_occurrences, CoverageCount, CoverageReport};
pub use metrics::{normalized_performance, population_std, relative_metric, RATE_TOLERANCE};
pub use scorer::{ProcessScorer, ProtocolScorer, Scorer, UniformScorer, UnigramScorer};
pub use scoring::{masked_perplexity, minimal_pair_accuracy, perplexity_of, pll_score};
pub use spans::{span_histogram, SpanLengthHistogram};

use crate::scalar::Real;

/// Neumaier-compensated sum in iteration order.
pub fn ordered_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in values {
        let t = sum + x;
        if !t.is_finite() {
            // infinities propagate; compensation would turn them into NaN
            sum = t;
            comp = T::zero();
            continue;
        }
        if sum.abs() >= x.abs() {
            comp = comp + ((sum - t) + x);
        } else {
            comp = comp + ((x - t) + sum);
        }
        sum = t;
    }
    sum + comp
}
