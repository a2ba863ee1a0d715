use num_traits::Num;
use rand::seq::index;
use rand::Rng;

use super::{budget, Action, MaskPlan, PolicySampling, ReplacementPolicy};
use crate::corpus::Window;
use crate::error::{Error, Result};

/// Largest-remainder apportionment of `total` items by `weights` (which sum to 1).
/// Ties in the remainders go to the earlier weight.
pub fn apportion<const N: usize>(total: usize, weights: [f64; N]) -> [usize; N] {
    let mut counts = [0usize; N];
    let mut remainders = [0f64; N];
    for i in 0..N {
        let quota = weights[i] * total as f64;
        let floor = (quota + 1e-9).floor();
        counts[i] = floor as usize;
        remainders[i] = quota - floor;
    }
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&a, &b| remainders[b].total_cmp(&remainders[a]).then(a.cmp(&b)));
    if assigned <= total {
        for &i in order.iter().cycle().take(total - assigned) {
            counts[i] += 1;
        }
    } else {
        // only reachable when the weights overshoot 1 by rounding
        let mut excess = assigned - total;
        for &i in order.iter().rev() {
            let take = excess.min(counts[i]);
            counts[i] -= take;
            excess -= take;
        }
    }
    counts
}

/// Effective `(corruption, prediction)` rates: same-token predictions count towards
/// neither, random replacements count towards both.
///
/// Generic so exact rational arithmetic can be used.
pub fn effective_rates<T: Num + Copy>(
    corruption_rate: T,
    prediction_rate: T,
    p_mask: T,
    p_rand: T,
) -> (T, T) {
    let destroying = p_mask + p_rand;
    (corruption_rate * destroying, prediction_rate * destroying)
}

/// Splits the `MaskToken` actions of `plan` into mask / random / same actions and adds
/// `floor(extra_same * maskable)` same-token predictions on untouched maskable positions.
///
/// Random replacements are uniform over the vocabulary minus the mask, pad and sep ids.
pub fn apply_policy<R: Rng + ?Sized>(
    mut plan: MaskPlan,
    policy: &ReplacementPolicy,
    sampling: PolicySampling,
    extra_same: f64,
    window: &Window<'_>,
    rng: &mut R,
) -> Result<MaskPlan> {
    if plan.actions.iter().any(|(_, a)| *a != Action::MaskToken) {
        return Err(Error::Integrity("replacement policy applied twice".into()));
    }
    let vocab = window.vocab;
    let corrupted = plan.actions.len();
    let mut kinds = vec![0u8; corrupted]; // 0 mask, 1 random, 2 same
    match sampling {
        PolicySampling::Exact => {
            let [_, n_rand, n_same] =
                apportion(corrupted, [policy.p_mask, policy.p_rand, policy.p_same]);
            let chosen = index::sample(rng, corrupted, n_rand + n_same);
            for (k, i) in chosen.into_iter().enumerate() {
                kinds[i] = if k < n_rand { 1 } else { 2 };
            }
        }
        PolicySampling::Bernoulli => {
            for kind in kinds.iter_mut() {
                let u: f64 = rng.random();
                *kind = if u < policy.p_mask {
                    0
                } else if u < policy.p_mask + policy.p_rand {
                    1
                } else {
                    2
                };
            }
        }
    }
    let replaceable = vocab.replaceable_count();
    for ((_, action), kind) in plan.actions.iter_mut().zip(&kinds) {
        *action = match kind {
            0 => Action::MaskToken,
            1 => {
                if replaceable == 0 {
                    return Err(Error::Infeasible(
                        "vocabulary has no non-special ids to sample replacements from".into(),
                    ));
                }
                Action::RandomToken(vocab.nth_replaceable(rng.random_range(0..replaceable)))
            }
            _ => Action::SamePrediction,
        };
    }

    let maskable = window.maskable_count();
    let extra = budget(extra_same, maskable);
    if extra > 0 {
        let untouched: Vec<usize> = (0..window.len())
            .filter(|&p| window.is_maskable(p))
            .filter(|p| plan.actions.binary_search_by_key(p, |&(q, _)| q).is_err())
            .collect();
        if extra > untouched.len() {
            return Err(Error::Infeasible(format!(
                "window {}: {extra} extra same-token predictions but only {} untouched positions",
                window.index,
                untouched.len()
            )));
        }
        let mut added: Vec<usize> = index::sample(rng, untouched.len(), extra)
            .into_iter()
            .map(|i| untouched[i])
            .collect();
        added.sort_unstable();
        plan.actions
            .extend(added.iter().map(|&p| (p, Action::SamePrediction)));
        plan.actions.sort_unstable_by_key(|&(p, _)| p);
        plan.predictions
            .extend(added.iter().map(|&p| (p, window.ids[p])));
        plan.predictions.sort_unstable_by_key(|&(p, _)| p);
    }
    Ok(plan)
}
