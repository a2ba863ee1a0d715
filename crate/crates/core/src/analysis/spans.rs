use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::masking::MaskPlan;
use crate::scalar::Real;

/// Counts of maximal runs of adjacent corrupted positions, keyed by run length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SpanLengthHistogram {
    pub counts: BTreeMap<usize, u64>,
}

impl SpanLengthHistogram {
    pub fn runs(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Count-weighted mean run length; `None` without runs.
    pub fn mean_length<T: Real>(&self) -> Option<T> {
        let runs = self.runs();
        if runs == 0 {
            return None;
        }
        let positions: u64 = self.counts.iter().map(|(&l, &c)| l as u64 * c).sum();
        Some(T::from_count(positions) / T::from_count(runs))
    }

    pub fn record(&mut self, len: usize) {
        *self.counts.entry(len).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &SpanLengthHistogram) {
        for (&len, &c) in &other.counts {
            *self.counts.entry(len).or_insert(0) += c;
        }
    }
}

/// Tallies runs of corrupted positions within each plan. Same-token predictions are
/// not corruptions and break runs.
pub fn span_histogram(plans: &[MaskPlan]) -> SpanLengthHistogram {
    plans
        .par_iter()
        .map(|plan| {
            let mut h = SpanLengthHistogram::default();
            let mut run = 0;
            let mut prev = None;
            for p in plan.corrupted_positions() {
                if prev.is_some_and(|q| q + 1 == p) {
                    run += 1;
                } else {
                    if run > 0 {
                        h.record(run);
                    }
                    run = 1;
                }
                prev = Some(p);
            }
            if run > 0 {
                h.record(run);
            }
            h
        })
        .reduce(SpanLengthHistogram::default, |mut a, b| {
            a.merge(&b);
            a
        })
}
