use ndarray::Array2;

use super::{PathKind, PathSet};
use crate::ale::LocalEffects;
use crate::error::{Error, Result};

/// Path `l` takes, in every interval, the nearest-rank quantile of the local
/// effects at `u_l = (l - 1/2) / L`.
pub fn quantile_paths(e: &LocalEffects, l: usize) -> Result<PathSet> {
    if l == 0 {
        return Err(Error::InvalidArgument("L must be at least 1".into()));
    }
    let k = e.k();
    let mut increments = Array2::zeros((k, l));
    let mut provenance = Vec::with_capacity(k);
    for kk in 0..k {
        let mut sorted = e.interval(kk).to_vec();
        sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let nk = sorted.len();
        let mut rows = Vec::with_capacity(l);
        for ll in 0..l {
            // ceil(u_l n_k) with u_l = (2 ll + 1) / (2 L)
            let rank = ((2 * ll + 1) * nk).div_ceil(2 * l).max(1);
            let (row, effect) = sorted[rank - 1];
            increments[[kk, ll]] = effect;
            rows.push(vec![row]);
        }
        provenance.push(rows);
    }
    PathSet::build(
        e.predictor(),
        PathKind::Quantile,
        e.axis().clone(),
        increments,
        e.counts(),
        provenance,
    )
}
