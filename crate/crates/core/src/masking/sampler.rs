//! Position samplers. Every sampler draws from a list of candidate positions and
//! returns exactly `budget` of them, sorted.

use rand::seq::index;
use rand::Rng;

use super::Strategy;
use crate::corpus::Window;
use crate::error::{Error, Result};
use crate::pmi::{segment_units, PmiVocabulary, Segmentation, Unit};
use crate::scalar::Real;

fn check_budget(budget: usize, available: usize) -> Result<()> {
    if budget > available {
        Err(Error::Infeasible(format!(
            "budget of {budget} positions exceeds the {available} available"
        )))
    } else {
        Ok(())
    }
}

/// `budget` positions drawn uniformly without replacement from `candidates`.
pub fn sample_uniform<R: Rng + ?Sized>(
    candidates: &[usize],
    budget: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_budget(budget, candidates.len())?;
    let mut picked: Vec<usize> = index::sample(rng, candidates.len(), budget)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Uniformly random composition of `total` into `parts` parts, each at least `min_part`.
pub fn random_composition<R: Rng + ?Sized>(
    total: usize,
    parts: usize,
    min_part: usize,
    rng: &mut R,
) -> Vec<usize> {
    assert!(
        parts >= 1 && total >= parts * min_part,
        "infeasible composition"
    );
    let free = total - parts * min_part;
    // stars and bars: choose the bar slots among free + parts - 1
    let mut bars: Vec<usize> = index::sample(rng, free + parts - 1, parts - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev: isize = -1;
    for &b in &bars {
        out.push((b as isize - prev - 1) as usize + min_part);
        prev = b as isize;
    }
    out.push(((free + parts - 1) as isize - prev - 1) as usize + min_part);
    out
}

/// Span corruption over the candidate list: noise spans and the gaps between them
/// are independent uniformly random compositions.
///
/// The number of spans is `round(budget / mean_span)` (at least one). Gaps, including
/// the two ends, are at least one position long; when the remainder cannot supply that
/// many gaps the span count is reduced, down to a single span whose end gaps may be
/// empty. Spans are contiguous in candidate order.
pub fn sample_span<R: Rng + ?Sized>(
    candidates: &[usize],
    budget: usize,
    mean_span: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_budget(budget, candidates.len())?;
    if budget == 0 {
        return Ok(Vec::new());
    }
    let n = candidates.len();
    let rest = n - budget;
    let wanted = ((budget as f64 / mean_span).round() as usize).max(1);
    let feasible = if rest >= 2 { rest - 1 } else { 1 };
    let spans = wanted.min(budget).min(feasible);
    let gap_min = usize::from(rest > spans);
    let span_lens = random_composition(budget, spans, 1, rng);
    let gap_lens = random_composition(rest, spans + 1, gap_min, rng);

    let mut picked = Vec::with_capacity(budget);
    let mut cursor = gap_lens[0];
    for (len, gap) in span_lens.iter().zip(&gap_lens[1..]) {
        picked.extend_from_slice(&candidates[cursor..cursor + len]);
        cursor += len + gap;
    }
    Ok(picked)
}

/// Units are visited in uniformly random order and accepted whole while they fit the
/// remaining budget. Whatever budget is left once no unit fits is filled with single
/// positions drawn uniformly from the unselected candidates.
pub fn sample_units<R: Rng + ?Sized>(
    units: &[Unit],
    candidates: &[usize],
    budget: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_budget(budget, candidates.len())?;
    let mut order: Vec<usize> = (0..units.len()).collect();
    let mut picked = Vec::with_capacity(budget);
    let mut remaining = budget;
    // lazy Fisher-Yates: stop shuffling as soon as the budget is spent
    for i in 0..order.len() {
        if remaining == 0 {
            break;
        }
        let j = rng.random_range(i..order.len());
        order.swap(i, j);
        let unit = units[order[i]];
        if unit.len <= remaining {
            picked.extend(unit.positions());
            remaining -= unit.len;
        }
    }
    if remaining > 0 {
        picked.sort_unstable();
        let leftover: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|p| picked.binary_search(p).is_err())
            .collect();
        picked.extend(sample_uniform(&leftover, remaining, rng)?);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Strategy-specific sampling for one window.
#[derive(Debug, Clone, Copy)]
pub struct Sampler<'a, T> {
    strategy: Strategy,
    mean_span: f64,
    pmi: Option<&'a PmiVocabulary<T>>,
}

/// Per-window state shared by every plan drawn from the same window.
#[derive(Debug, Clone)]
pub struct PreparedWindow {
    pub candidates: Vec<usize>,
    pub units: Vec<Unit>,
}

impl<'a, T: Real> Sampler<'a, T> {
    pub fn new(
        strategy: Strategy,
        mean_span: f64,
        pmi: Option<&'a PmiVocabulary<T>>,
    ) -> Result<Self> {
        if strategy == Strategy::Pmi && pmi.is_none() {
            return Err(Error::Config("pmi strategy needs a PMI vocabulary".into()));
        }
        if !(mean_span > 0.0 && mean_span.is_finite()) {
            return Err(Error::Config(format!(
                "mean span {mean_span} must be positive"
            )));
        }
        Ok(Self {
            strategy,
            mean_span,
            pmi,
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn prepare(&self, window: &Window<'_>) -> PreparedWindow {
        let candidates = window.maskable_positions();
        let units = match self.strategy {
            Strategy::WholeWord => segment_units::<T>(window, Segmentation::WholeWord),
            Strategy::Pmi => segment_units(window, Segmentation::Pmi(self.pmi.expect("checked"))),
            Strategy::Uniform | Strategy::Span => Vec::new(),
        };
        PreparedWindow { candidates, units }
    }

    /// Draws `budget` positions avoiding every position flagged in `taken`.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        prep: &PreparedWindow,
        taken: Option<&[bool]>,
        budget: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        let filtered;
        let candidates: &[usize] = match taken {
            Some(t) => {
                filtered = prep
                    .candidates
                    .iter()
                    .copied()
                    .filter(|&p| !t[p])
                    .collect::<Vec<_>>();
                &filtered
            }
            None => &prep.candidates,
        };
        match self.strategy {
            Strategy::Uniform => sample_uniform(candidates, budget, rng),
            Strategy::Span => sample_span(candidates, budget, self.mean_span, rng),
            Strategy::WholeWord | Strategy::Pmi => match taken {
                Some(t) => {
                    let free: Vec<Unit> = prep
                        .units
                        .iter()
                        .copied()
                        .filter(|u| u.positions().all(|p| !t[p]))
                        .collect();
                    sample_units(&free, candidates, budget, rng)
                }
                None => sample_units(&prep.units, candidates, budget, rng),
            },
        }
    }
}
