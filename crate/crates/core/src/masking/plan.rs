use rand::seq::index;
use rand::Rng;

use super::sampler::{PreparedWindow, Sampler};
use super::{budget, Action, MaskPlan};
use crate::corpus::Window;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Plans corruption at `corruption_rate` and prediction at `prediction_rate` for one window.
///
/// * equal rates: one plan predicting every corrupted position;
/// * prediction below corruption: one plan predicting a uniform subset of the corrupted
///   positions of size `floor(prediction_rate * maskable)`;
/// * prediction above corruption: `ceil(prediction_rate / corruption_rate)` duplicates with
///   pairwise disjoint corrupted sets, each predicting all of its corrupted positions.
///
/// All actions are `MaskToken`; replacement policies are applied afterwards.
pub fn plan_decoupled<T: Real, R: Rng + ?Sized>(
    window: &Window<'_>,
    prep: &PreparedWindow,
    sampler: &Sampler<'_, T>,
    corruption_rate: f64,
    prediction_rate: f64,
    rng: &mut R,
) -> Result<Vec<MaskPlan>> {
    let maskable = prep.candidates.len();
    let corrupt = budget(corruption_rate, maskable);
    let predict = budget(prediction_rate, maskable);

    let make_plan = |positions: Vec<usize>, predicted: Vec<usize>, dup: usize| MaskPlan {
        actions: positions.iter().map(|&p| (p, Action::MaskToken)).collect(),
        predictions: predicted.iter().map(|&p| (p, window.ids[p])).collect(),
        duplicate_index: dup,
        source_sequence: window.index,
    };

    if prediction_rate <= corruption_rate {
        let positions = sampler.draw(prep, None, corrupt, rng)?;
        let predicted = if prediction_rate == corruption_rate {
            positions.clone()
        } else {
            let mut subset: Vec<usize> =
                index::sample(rng, positions.len(), predict.min(positions.len()))
                    .into_iter()
                    .map(|i| positions[i])
                    .collect();
            subset.sort_unstable();
            subset
        };
        return Ok(vec![make_plan(positions, predicted, 0)]);
    }

    if corruption_rate <= 0.0 {
        return Err(Error::Config(
            "prediction rate above zero needs a non-zero corruption rate".into(),
        ));
    }
    let copies = (prediction_rate / corruption_rate - 1e-9).ceil() as usize;
    if copies * corrupt > maskable {
        return Err(Error::Infeasible(format!(
            "window {}: {copies} disjoint sets of {corrupt} positions need {} but only {maskable} are maskable",
            window.index,
            copies * corrupt
        )));
    }
    let mut taken = vec![false; window.len()];
    let mut plans = Vec::with_capacity(copies);
    for dup in 0..copies {
        let positions = sampler.draw(prep, Some(&taken), corrupt, rng)?;
        for &p in &positions {
            taken[p] = true;
        }
        plans.push(make_plan(positions.clone(), positions, dup));
    }
    Ok(plans)
}
