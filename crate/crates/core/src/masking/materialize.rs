use serde::{Deserialize, Serialize};

use super::{Action, MaskPlan};
use crate::corpus::{TokenId, Window};
use crate::error::{Error, Result};

/// Corrupted window plus its prediction targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedExample {
    #[serde(rename = "seq")]
    pub corrupted_ids: Vec<TokenId>,
    pub targets: Vec<(usize, TokenId)>,
    #[serde(rename = "dup")]
    pub duplicate_index: usize,
    #[serde(rename = "src")]
    pub source_sequence: usize,
}

/// Writes `[MASK]` and random replacements into a copy of the window; same-token
/// predictions keep the original id.
pub fn materialize(window: &Window<'_>, plan: &MaskPlan) -> Result<MaskedExample> {
    if plan.source_sequence != window.index {
        return Err(Error::Integrity(format!(
            "plan for window {} applied to window {}",
            plan.source_sequence, window.index
        )));
    }
    let mut corrupted_ids = window.ids.to_vec();
    for &(pos, action) in &plan.actions {
        if pos >= window.len() {
            return Err(Error::Integrity(format!(
                "position {pos} outside window of length {}",
                window.len()
            )));
        }
        if !window.is_maskable(pos) {
            return Err(Error::Integrity(format!(
                "position {pos} is padding or a separator"
            )));
        }
        match action {
            Action::MaskToken => corrupted_ids[pos] = window.vocab.mask_id,
            Action::RandomToken(id) => corrupted_ids[pos] = id,
            Action::SamePrediction => {}
        }
    }
    for &(pos, original) in &plan.predictions {
        if window.ids.get(pos) != Some(&original) {
            return Err(Error::Integrity(format!(
                "prediction at {pos} expects id {original}, window holds {:?}",
                window.ids.get(pos)
            )));
        }
    }
    Ok(MaskedExample {
        corrupted_ids,
        targets: plan.predictions.clone(),
        duplicate_index: plan.duplicate_index,
        source_sequence: plan.source_sequence,
    })
}
