use rand::seq::SliceRandom;

use super::{stream, BaselineConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::ModelHandle;

const TASK: u64 = 1;

fn squared_losses(y: &[f64], pred: &[f64]) -> Vec<f64> {
    y.iter().zip(pred).map(|(a, b)| (a - b) * (a - b)).collect()
}

/// Mean increase in squared-error loss when column `j` is reordered by
/// `perm`, given the unpermuted predictions.
pub fn permutation_loss_increase(
    m: &ModelHandle,
    d: &Dataset,
    j: usize,
    perm: &[usize],
    base_pred: &[f64],
) -> Result<f64> {
    let y = d.response().ok_or(Error::MissingResponse)?;
    let n = d.n();
    if perm.len() != n || base_pred.len() != n {
        return Err(Error::InvalidArgument("permutation length must equal n".into()));
    }
    let mut rows = d.design_matrix();
    for (i, &p) in perm.iter().enumerate() {
        rows[[i, j]] = d.value(p, j);
    }
    let pred = m.eval(&rows)?;
    let base = squared_losses(y, base_pred);
    let permuted = squared_losses(y, &pred);
    Ok(permuted.iter().zip(&base).map(|(a, b)| a - b).sum::<f64>() / n as f64)
}

/// [`marginal_permutation_vim`] given the unpermuted predictions `base`;
/// `N n` model evaluations.
pub fn marginal_permutation_vim_from_base(
    m: &ModelHandle,
    d: &Dataset,
    j: usize,
    cfg: &BaselineConfig,
    base: &[f64],
) -> Result<f64> {
    let n = d.n();
    let mut total = 0.0;
    for r in 0..cfg.replicates {
        let mut rng = stream(cfg.seed, TASK, j, r);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        total += permutation_loss_increase(m, d, j, &perm, base)?;
    }
    Ok(total / cfg.replicates as f64)
}

/// Average loss increase over `N` random permutations of column `j`;
/// `(N + 1) n` model evaluations.
pub fn marginal_permutation_vim(m: &ModelHandle, d: &Dataset, j: usize, cfg: &BaselineConfig) -> Result<f64> {
    d.response().ok_or(Error::MissingResponse)?;
    let base = m.predict_dataset(d)?;
    marginal_permutation_vim_from_base(m, d, j, cfg, &base)
}

/// [`marginal_permutation_vim`] for every predictor, sharing the unpermuted
/// predictions.
pub fn marginal_permutation_vims(m: &ModelHandle, d: &Dataset, cfg: &BaselineConfig) -> Result<Vec<f64>> {
    d.response().ok_or(Error::MissingResponse)?;
    let base = m.predict_dataset(d)?;
    (0..d.d()).map(|j| marginal_permutation_vim_from_base(m, d, j, cfg, &base)).collect()
}
