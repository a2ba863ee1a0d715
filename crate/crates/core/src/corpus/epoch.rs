//! Seeded epoch ordering with one independent random substream per window.
//!
//! Each substream is a ChaCha8 keystream keyed by `(seed, epoch, domain)` and
//! selected by the window index as the stream number, so the randomness a window
//! sees does not depend on which worker consumes it or in what order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random source handed to every per-window sampling routine.
pub type SeqRng = ChaCha8Rng;

const DOMAIN_PERMUTATION: u64 = 0x7065_726d; // "perm"
const DOMAIN_SEQUENCE: u64 = 0x7365_7173; // "seqs"

fn keyed(seed: u64, epoch: u64, domain: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&epoch.to_le_bytes());
    key[16..24].copy_from_slice(&domain.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone)]
pub struct EpochStream {
    seed: u64,
    epoch: u64,
    order: Vec<usize>,
}

/// Deterministic permutation of `0..num_sequences` for `(seed, epoch)`.
pub fn epoch_stream(num_sequences: usize, seed: u64, epoch: u64) -> EpochStream {
    let mut order: Vec<usize> = (0..num_sequences).collect();
    order.shuffle(&mut keyed(seed, epoch, DOMAIN_PERMUTATION));
    EpochStream { seed, epoch, order }
}

impl EpochStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Window indices in consumption order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn rng_for(&self, index: usize) -> SeqRng {
        let mut rng = keyed(self.seed, self.epoch, DOMAIN_SEQUENCE);
        rng.set_stream(index as u64);
        rng
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (usize, SeqRng)> + '_ {
        self.order.iter().map(move |&i| (i, self.rng_for(i)))
    }
}
