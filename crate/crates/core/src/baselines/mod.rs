//! Reference importance measures: marginal permutation, sampled marginal
//! Shapley values and closed forms for a linear Gaussian model.

mod oracle;
mod permutation;
mod shapley;

pub use oracle::{oracle_linear3, OracleEntry, OracleVims};
pub use permutation::{
    marginal_permutation_vim, marginal_permutation_vim_from_base, marginal_permutation_vims,
    permutation_loss_increase,
};
pub use shapley::{marginal_shapley_values, marginal_shapley_vims};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineConfig {
    /// Permutation replicates `N`.
    pub replicates: usize,
    /// Shapley samples per observation `M`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            replicates: 50,
            samples: 100,
            seed: 0,
        }
    }
}

impl BaselineConfig {
    pub fn new(replicates: usize, samples: usize, seed: u64) -> Result<Self> {
        if replicates == 0 || samples == 0 {
            return Err(Error::InvalidArgument(
                "replicates and samples must be at least 1".into(),
            ));
        }
        Ok(BaselineConfig {
            replicates,
            samples,
            seed,
        })
    }
}

/// Generator for one `(task, predictor, replicate)` triple.
pub(crate) fn stream(seed: u64, task: u64, predictor: usize, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((task << 56) ^ ((predictor as u64) << 32) ^ replicate as u64);
    rng
}
