//! Reproducible randomness.
//!
//! Every random draw comes from ChaCha8 keyed by the 128 bits of
//! `(master, stream)` and positioned on a ChaCha stream selected by the
//! caller (the trial index for Monte Carlo loops). Trials therefore do not
//! depend on evaluation order, and results are identical whether they run
//! sequentially or in parallel.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RandomSeed {
    pub master: u64,
    pub stream: u64,
}

impl RandomSeed {
    pub const fn new(master: u64, stream: u64) -> Self {
        RandomSeed { master, stream }
    }

    pub const fn from_master(master: u64) -> Self {
        RandomSeed { master, stream: 0 }
    }

    /// Generator for sub-stream `index` of this seed.
    pub fn rng(self, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}

/// A uniformly random `m`-subset of the elements of `pool`.
pub fn sample_from<R: rand::Rng + ?Sized>(rng: &mut R, pool: Subset, m: usize) -> Result<Subset> {
    let avail = pool.to_vec();
    if m > avail.len() {
        return Err(Error::BadCardinality { m, n: avail.len() });
    }
    Ok(index::sample(rng, avail.len(), m)
        .into_iter()
        .map(|i| avail[i])
        .collect())
}
