use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{PackedDataset, Window};
use crate::error::{Error, Result};
use crate::masking::{MaskPlan, Strategy};
use crate::pmi::PmiVocabulary;
use crate::scalar::Real;

/// Occurrences of vocabulary n-grams of one length and how many were fully corrupted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CoverageCount {
    pub fully_masked: u64,
    pub occurrences: u64,
}

impl CoverageCount {
    /// `fully_masked / occurrences`; zero when nothing occurred.
    pub fn probability<T: Real>(&self) -> T {
        if self.occurrences == 0 {
            T::zero()
        } else {
            T::from_count(self.fully_masked) / T::from_count(self.occurrences)
        }
    }

    fn add(&mut self, other: CoverageCount) {
        self.fully_masked += other.fully_masked;
        self.occurrences += other.occurrences;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Keyed by n-gram length.
    pub per_length: BTreeMap<usize, CoverageCount>,
    pub masking_rate: f64,
    pub strategy: Strategy,
}

impl CoverageReport {
    /// Counts pooled over every n-gram length.
    pub fn overall(&self) -> CoverageCount {
        let mut total = CoverageCount::default();
        for c in self.per_length.values() {
            total.add(*c);
        }
        total
    }

    pub fn probability<T: Real>(&self, len: usize) -> T {
        self.per_length
            .get(&len)
            .map_or(T::zero(), CoverageCount::probability)
    }
}

/// Start and length of every occurrence of every vocabulary entry in `window`,
/// overlapping occurrences included.
pub fn vocabulary_occurrences<T: Real>(
    window: &Window<'_>,
    vocab: &PmiVocabulary<T>,
) -> Vec<(usize, usize)> {
    let ids = window.ids;
    let mut found = Vec::new();
    for start in 0..ids.len() {
        let limit = vocab.n_max().min(ids.len() - start);
        for n in 2..=limit {
            let gram = &ids[start..start + n];
            if !vocab.is_prefix(gram) {
                break;
            }
            if vocab.contains(gram) {
                found.push((start, n));
            }
        }
    }
    found
}

/// Fraction of vocabulary n-gram occurrences whose positions were all corrupted
/// (`[MASK]` or random replacement) by one epoch of plans.
///
/// Every plan is one corrupted view; duplicated windows contribute once per duplicate.
/// The plans must cover every window of `ds` and reference only maskable positions.
pub fn pmi_coverage<T: Real>(
    ds: &PackedDataset,
    plans: &[MaskPlan],
    vocab: &PmiVocabulary<T>,
    masking_rate: f64,
    strategy: Strategy,
) -> Result<CoverageReport> {
    check_alignment(ds, plans)?;
    let per_length = plans
        .par_iter()
        .map(|plan| {
            let window = ds.window(plan.source_sequence);
            let mut corrupted = vec![false; window.len()];
            for p in plan.corrupted_positions() {
                corrupted[p] = true;
            }
            let mut local: BTreeMap<usize, CoverageCount> = BTreeMap::new();
            for (start, n) in vocabulary_occurrences(&window, vocab) {
                let entry = local.entry(n).or_default();
                entry.occurrences += 1;
                if corrupted[start..start + n].iter().all(|&c| c) {
                    entry.fully_masked += 1;
                }
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (n, c) in b {
                a.entry(n).or_default().add(c);
            }
            a
        });
    Ok(CoverageReport {
        per_length,
        masking_rate,
        strategy,
    })
}

/// Plans must reference existing windows and maskable positions, and every window
/// must appear at least once.
pub(crate) fn check_alignment(ds: &PackedDataset, plans: &[MaskPlan]) -> Result<()> {
    let mut seen = vec![false; ds.len()];
    for plan in plans {
        let src = plan.source_sequence;
        if src >= ds.len() {
            return Err(Error::Integrity(format!(
                "plan references window {src} of a {}-window dataset",
                ds.len()
            )));
        }
        seen[src] = true;
        let window = ds.window(src);
        for &(pos, _) in &plan.actions {
            if pos >= window.len() || !window.is_maskable(pos) {
                return Err(Error::Integrity(format!(
                    "plan for window {src} touches position {pos}, which is not maskable"
                )));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Integrity(format!(
            "window {missing} has no plan in the mask stream"
        )));
    }
    Ok(())
}
