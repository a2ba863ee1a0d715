use super::ordered_sum;
use super::scorer::{checked_score, Scorer};
use crate::corpus::{TokenId, Vocab};
use crate::error::{Error, Result};
use crate::masking::{MaskedExample, Masker};
use crate::scalar::Real;

/// `exp(-mean log p)` over every prediction target of `examples`, scored in order.
pub fn perplexity_of<T: Real, S: Scorer<T> + ?Sized>(
    examples: &[MaskedExample],
    scorer: &mut S,
) -> Result<T> {
    let mut logps = Vec::new();
    for ex in examples {
        if ex.targets.is_empty() {
            continue;
        }
        logps.extend(checked_score(scorer, &ex.corrupted_ids, &ex.targets)?);
    }
    if logps.is_empty() {
        return Err(Error::Degenerate("no predictions to score".into()));
    }
    let mean = ordered_sum(logps.iter().copied()) / T::from_count(logps.len() as u64);
    Ok((-mean).exp())
}

/// Masked perplexity of one epoch produced by `masker`.
pub fn masked_perplexity<T: Real, S: Scorer<T> + ?Sized>(
    masker: &Masker<'_, T>,
    epoch: u64,
    scorer: &mut S,
) -> Result<T> {
    perplexity_of(&masker.mask_epoch(epoch)?, scorer)
}

/// Pseudo-log-likelihood: `sum_i log p(x_i | x with only position i masked)`,
/// one scorer query per position.
pub fn pll_score<T: Real, S: Scorer<T> + ?Sized>(
    sentence: &[TokenId],
    scorer: &mut S,
    vocab: &Vocab,
) -> Result<T> {
    if sentence.is_empty() {
        return Err(Error::Config("cannot score an empty sentence".into()));
    }
    let mut corrupted = sentence.to_vec();
    let mut logps = Vec::with_capacity(sentence.len());
    for (i, &orig) in sentence.iter().enumerate() {
        corrupted[i] = vocab.mask_id;
        logps.extend(checked_score(scorer, &corrupted, &[(i, orig)])?);
        corrupted[i] = orig;
    }
    Ok(ordered_sum(logps))
}

/// Fraction of pairs whose first sentence outscores the second; exact ties count half.
pub fn minimal_pair_accuracy<T: Real, S: Scorer<T> + ?Sized>(
    pairs: &[(Vec<TokenId>, Vec<TokenId>)],
    scorer: &mut S,
    vocab: &Vocab,
) -> Result<T> {
    if pairs.is_empty() {
        return Err(Error::Config(
            "minimal-pair accuracy needs at least one pair".into(),
        ));
    }
    let mut halves = 0u64;
    for (good, bad) in pairs {
        let g: T = pll_score(good, scorer, vocab)?;
        let b: T = pll_score(bad, scorer, vocab)?;
        halves += if g > b {
            2
        } else if g == b {
            1
        } else {
            0
        };
    }
    Ok(T::from_count(halves) / T::from_count(2 * pairs.len() as u64))
}
