use std::io::Write;

use rayon::prelude::*;

use super::materialize::{materialize, MaskedExample};
use super::plan::plan_decoupled;
use super::policy::apply_policy;
use super::sampler::Sampler;
use super::{MaskPlan, MaskingConfig};
use crate::corpus::{epoch_stream, write_id_list, EpochStream, PackedDataset, SeqRng};
use crate::error::Result;
use crate::pmi::PmiVocabulary;
use crate::scalar::Real;

/// Windows planned per parallel batch when streaming to a writer.
const CHUNK: usize = 4096;

/// Produces mask plans for a packed dataset, one epoch at a time.
///
/// Every window draws from its own substream keyed by `(seed, epoch, window index)`, so
/// output is identical for any degree of parallelism.
#[derive(Debug, Clone)]
pub struct Masker<'a, T> {
    ds: &'a PackedDataset,
    config: MaskingConfig,
    sampler: Sampler<'a, T>,
}

impl<'a, T: Real> Masker<'a, T> {
    pub fn new(
        ds: &'a PackedDataset,
        config: MaskingConfig,
        pmi: Option<&'a PmiVocabulary<T>>,
    ) -> Result<Self> {
        config.validate()?;
        let sampler = Sampler::new(config.strategy, config.mean_span, pmi)?;
        Ok(Self {
            ds,
            config,
            sampler,
        })
    }

    pub fn config(&self) -> &MaskingConfig {
        &self.config
    }

    pub fn dataset(&self) -> &PackedDataset {
        self.ds
    }

    pub fn stream(&self, epoch: u64) -> EpochStream {
        epoch_stream(self.ds.len(), self.config.seed, epoch)
    }

    /// All plans for one window: decoupled sampling, then the replacement policy per plan.
    pub fn plan_window(&self, index: usize, rng: &mut SeqRng) -> Result<Vec<MaskPlan>> {
        let window = self.ds.window(index);
        let prep = self.sampler.prepare(&window);
        let plans = plan_decoupled(
            &window,
            &prep,
            &self.sampler,
            self.config.corruption_rate,
            self.config.prediction_rate,
            rng,
        )?;
        plans
            .into_iter()
            .map(|plan| {
                apply_policy(
                    plan,
                    &self.config.policy,
                    self.config.policy_sampling,
                    self.config.extra_same,
                    &window,
                    rng,
                )
            })
            .collect()
    }

    fn plan_slice(&self, stream: &EpochStream, order: &[usize]) -> Result<Vec<MaskPlan>> {
        let batches: Vec<Result<Vec<MaskPlan>>> = order
            .par_iter()
            .map(|&i| self.plan_window(i, &mut stream.rng_for(i)))
            .collect();
        let mut plans = Vec::with_capacity(batches.len());
        for batch in batches {
            plans.extend(batch?);
        }
        Ok(plans)
    }

    /// Plans for every window of `epoch`, in stream order, duplicates adjacent.
    pub fn plan_epoch(&self, epoch: u64) -> Result<Vec<MaskPlan>> {
        let stream = self.stream(epoch);
        self.plan_slice(&stream, stream.order())
    }

    pub fn mask_epoch(&self, epoch: u64) -> Result<Vec<MaskedExample>> {
        self.plan_epoch(epoch)?
            .iter()
            .map(|p| materialize(&self.ds.window(p.source_sequence), p))
            .collect()
    }

    /// Streams one epoch of examples as JSONL, planning in parallel batches.
    /// Returns the number of examples written.
    pub fn write_epoch<W: Write>(&self, epoch: u64, out: &mut W) -> Result<usize> {
        let stream = self.stream(epoch);
        let mut written = 0;
        for part in stream.order().chunks(CHUNK) {
            let plans = self.plan_slice(&stream, part)?;
            let examples: Vec<Result<MaskedExample>> = plans
                .par_iter()
                .map(|p| materialize(&self.ds.window(p.source_sequence), p))
                .collect();
            for ex in examples {
                write_example(out, &ex?)?;
                written += 1;
            }
        }
        Ok(written)
    }
}

/// `{"seq":[...],"targets":[[pos,orig],...],"dup":d,"src":s}` plus newline.
pub fn write_example<W: Write>(out: &mut W, ex: &MaskedExample) -> std::io::Result<()> {
    out.write_all(b"{\"seq\":[")?;
    write_id_list(out, &ex.corrupted_ids)?;
    out.write_all(b"],\"targets\":[")?;
    for (i, (pos, orig)) in ex.targets.iter().enumerate() {
        if i > 0 {
            out.write_all(b",")?;
        }
        write!(out, "[{pos},{orig}]")?;
    }
    writeln!(
        out,
        "],\"dup\":{},\"src\":{}}}",
        ex.duplicate_index, ex.source_sequence
    )
}
