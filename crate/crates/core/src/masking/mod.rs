//! Mask planning: which positions are corrupted, how, and which ones are predicted.
//!
//! A window goes through three steps:
//!
//! 1. [`plan_decoupled`] draws corrupted positions with the configured strategy at the
//!    corruption rate and picks prediction targets at the prediction rate. When more
//!    predictions than corruptions are requested the window is duplicated and each
//!    duplicate gets a disjoint set of corrupted positions.
//! 2. [`apply_policy`] splits corrupted positions into `[MASK]`, random-token and
//!    same-token actions, and optionally adds extra same-token predictions.
//! 3. [`materialize`] writes the corrupted token ids and the prediction targets.

mod materialize;
mod pipeline;
mod plan;
mod policy;
mod sampler;

pub use materialize::{materialize, MaskedExample};
pub use pipeline::{write_example, Masker};
pub use plan::plan_decoupled;
pub use policy::{apply_policy, apportion, effective_rates};
pub use sampler::{
    random_composition, sample_span, sample_uniform, sample_units, PreparedWindow, Sampler,
};

use std::fmt;
use std::str::FromStr;

use crate::corpus::TokenId;
use crate::error::{Error, Result};

pub const DEFAULT_MEAN_SPAN: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Uniform,
    WholeWord,
    Span,
    Pmi,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::WholeWord => "wholeword",
            Strategy::Span => "span",
            Strategy::Pmi => "pmi",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Strategy::Uniform),
            "wholeword" | "whole_word" | "whole-word" => Ok(Strategy::WholeWord),
            "span" => Ok(Strategy::Span),
            "pmi" => Ok(Strategy::Pmi),
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Proportions of corrupted positions that become `[MASK]`, a random token, or stay unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplacementPolicy {
    pub p_mask: f64,
    pub p_rand: f64,
    pub p_same: f64,
}

impl ReplacementPolicy {
    pub const ALL_MASK: Self = Self {
        p_mask: 1.0,
        p_rand: 0.0,
        p_same: 0.0,
    };

    /// The classic 80% mask / 10% random / 10% same recipe.
    pub const BERT: Self = Self {
        p_mask: 0.8,
        p_rand: 0.1,
        p_same: 0.1,
    };

    pub fn new(p_mask: f64, p_rand: f64, p_same: f64) -> Result<Self> {
        let p = Self {
            p_mask,
            p_rand,
            p_same,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.p_mask, self.p_rand, self.p_same];
        if parts.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::Config(format!(
                "policy proportions {parts:?} must be non-negative"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "policy proportions sum to {sum}, not 1"
            )));
        }
        Ok(())
    }
}

/// How per-position replacement actions are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolicySampling {
    /// Exact counts by largest-remainder apportionment.
    #[default]
    Exact,
    /// Independent per-position draw, as in the original BERT data pipeline.
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskingConfig {
    pub strategy: Strategy,
    pub corruption_rate: f64,
    pub prediction_rate: f64,
    pub policy: ReplacementPolicy,
    pub policy_sampling: PolicySampling,
    pub extra_same: f64,
    pub mean_span: f64,
    pub seed: u64,
}

impl MaskingConfig {
    /// Coupled configuration: corruption and prediction rates both equal `m`, all `[MASK]`.
    pub fn new(strategy: Strategy, m: f64) -> Self {
        Self {
            strategy,
            corruption_rate: m,
            prediction_rate: m,
            policy: ReplacementPolicy::ALL_MASK,
            policy_sampling: PolicySampling::Exact,
            extra_same: 0.0,
            mean_span: DEFAULT_MEAN_SPAN,
            seed: 0,
        }
    }

    pub fn with_rates(mut self, corruption: f64, prediction: f64) -> Self {
        self.corruption_rate = corruption;
        self.prediction_rate = prediction;
        self
    }

    pub fn with_policy(mut self, policy: ReplacementPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_extra_same(mut self, extra_same: f64) -> Self {
        self.extra_same = extra_same;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mean_span(mut self, mean_span: f64) -> Self {
        self.mean_span = mean_span;
        self
    }

    pub fn is_coupled(&self) -> bool {
        self.corruption_rate == self.prediction_rate
    }

    pub fn validate(&self) -> Result<()> {
        for (name, rate) in [
            ("corruption rate", self.corruption_rate),
            ("prediction rate", self.prediction_rate),
            ("extra same rate", self.extra_same),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} {rate} outside [0, 1]")));
            }
        }
        if self.corruption_rate == 0.0 && self.prediction_rate > 0.0 {
            return Err(Error::Config(
                "prediction rate above zero needs a non-zero corruption rate".into(),
            ));
        }
        if !(self.mean_span > 0.0 && self.mean_span.is_finite()) {
            return Err(Error::Config(format!(
                "mean span {} must be positive",
                self.mean_span
            )));
        }
        self.policy.validate()
    }

    /// Effective `(corruption, prediction)` rates once same-token predictions are discounted.
    pub fn effective_rates(&self) -> (f64, f64) {
        effective_rates(
            self.corruption_rate,
            self.prediction_rate,
            self.policy.p_mask,
            self.policy.p_rand,
        )
    }
}

/// Number of positions selected at `rate` out of `maskable`: `floor(rate * maskable)`.
pub fn budget(rate: f64, maskable: usize) -> usize {
    // absorbs representation error such as 0.29 * 100 = 28.999999999999996
    (((rate * maskable as f64) + 1e-9).floor() as usize).min(maskable)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    MaskToken,
    RandomToken(TokenId),
    SamePrediction,
}

impl Action {
    /// `[MASK]` and random replacements destroy the input token; same-token predictions do not.
    pub fn is_corruption(&self) -> bool {
        !matches!(self, Action::SamePrediction)
    }
}

/// Corruption actions and prediction targets for one (possibly duplicated) window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskPlan {
    /// Sorted by position, positions unique.
    pub actions: Vec<(usize, Action)>,
    /// Sorted by position; each carries the original token id.
    pub predictions: Vec<(usize, TokenId)>,
    pub duplicate_index: usize,
    pub source_sequence: usize,
}

impl MaskPlan {
    pub fn corrupted_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.actions
            .iter()
            .filter(|(_, a)| a.is_corruption())
            .map(|&(p, _)| p)
    }

    pub fn corrupted_count(&self) -> usize {
        self.actions
            .iter()
            .filter(|(_, a)| a.is_corruption())
            .count()
    }

    /// Checks ordering, uniqueness, and that every prediction sits on an action.
    pub fn check_consistency(&self) -> Result<()> {
        if self.actions.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Integrity(
                "action positions not strictly increasing".into(),
            ));
        }
        if self.predictions.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Integrity(
                "prediction positions not strictly increasing".into(),
            ));
        }
        for &(p, _) in &self.predictions {
            if self.actions.binary_search_by_key(&p, |&(q, _)| q).is_err() {
                return Err(Error::Integrity(format!("prediction at {p} has no action")));
            }
        }
        Ok(())
    }
}
