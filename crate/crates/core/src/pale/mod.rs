//! Path-ALE total-effect importance.
//!
//! A [`PathSet`] holds `L` accumulated paths through the `K` intervals of a
//! predictor. [`spale_vim`] turns any path set into an importance value; the
//! quantile and connected constructions supply the paths.

mod categorical;
mod connected;
mod quantile;

pub use categorical::{
    categorical_local_effects, default_categorical_l, order_from_dissimilarity,
    reorder_categorical_levels, LevelOrder,
};
pub use connected::connected_paths;
pub use quantile::quantile_paths;

use ndarray::Array2;

use crate::ale::{accumulate, ale_main_curve, ale_main_vim, local_effects, AleCurve, Axis, Convention, LocalEffects};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::ModelHandle;
use crate::partition::QuantilePartition;
use crate::stats::{canonical_mean, weighted_mean, weighted_variance_of};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Quantile,
    Connected,
    Custom,
}

/// `K x L` path increments over an axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub predictor: usize,
    pub kind: PathKind,
    pub axis: Axis,
    increments: Array2<f64>,
    counts: Vec<usize>,
    provenance: Vec<Vec<Vec<usize>>>,
}

impl PathSet {
    /// Paths supplied by the caller. `provenance` may be empty.
    pub fn custom(
        predictor: usize,
        axis: Axis,
        increments: Array2<f64>,
        counts: Vec<usize>,
    ) -> Result<Self> {
        PathSet::build(predictor, PathKind::Custom, axis, increments, counts, Vec::new())
    }

    pub(crate) fn build(
        predictor: usize,
        kind: PathKind,
        axis: Axis,
        increments: Array2<f64>,
        counts: Vec<usize>,
        provenance: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if increments.nrows() != axis.k() || counts.len() != axis.k() {
            return Err(Error::InvalidArgument(
                "increment rows must match the axis intervals".into(),
            ));
        }
        if increments.ncols() == 0 {
            return Err(Error::InvalidArgument("a path set needs at least one path".into()));
        }
        if increments.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite path increment".into()));
        }
        if !(axis.total_weight() > 0.0) {
            return Err(Error::InvalidArgument("axis weights sum to zero".into()));
        }
        Ok(PathSet {
            predictor,
            kind,
            axis,
            increments,
            counts,
            provenance,
        })
    }

    pub fn k(&self) -> usize {
        self.increments.nrows()
    }

    pub fn l(&self) -> usize {
        self.increments.ncols()
    }

    /// `increments[[k, l]]` for interval `k` (0-based) and path `l`.
    pub fn increments(&self) -> &Array2<f64> {
        &self.increments
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Rows whose local effects produced increment `(k, l)`.
    pub fn provenance(&self, k: usize, l: usize) -> Option<&[usize]> {
        self.provenance.get(k).and_then(|r| r.get(l)).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaleResult {
    pub vim: f64,
    /// Point index of the centering value (1-based interval for numeric axes).
    pub k_star: usize,
    /// Centering objective per point; `None` where the point carries no weight.
    pub objective: Vec<Option<f64>>,
    /// Path functions at every point, centered at `k_star`, `(K+1) x L`.
    pub paths: Array2<f64>,
    /// Accumulated mean path (uncentered).
    pub mean_path: Vec<f64>,
}

/// Variance of the path functions, centered at the point minimizing it.
pub fn spale_vim(p: &PathSet, conv: Convention) -> PaleResult {
    let (kk, ll) = p.increments.dim();
    let w = &p.axis.weights;

    let mut g = Array2::<f64>::zeros((kk + 1, ll));
    for k in 0..kk {
        for l in 0..ll {
            g[[k + 1, l]] = g[[k, l]] + p.increments[[k, l]];
        }
    }
    let columns: Vec<Vec<f64>> = (0..ll)
        .map(|l| p.axis.values(&g.column(l).to_vec(), conv))
        .collect();

    let row_means: Vec<f64> = p
        .increments
        .rows()
        .into_iter()
        .map(|r| canonical_mean(r.as_slice().unwrap_or(&r.to_vec())))
        .collect();
    let mean_path = accumulate(&row_means);
    let mean_values = p.axis.values(&mean_path, conv);

    // Var = Var(mean path) + E_l Var(path_l - mean path) + objective(k*) / L
    let main = weighted_variance_of(&mean_values, w);
    let excess = columns
        .iter()
        .map(|c| {
            let dev: Vec<f64> = c.iter().zip(&mean_values).map(|(a, b)| a - b).collect();
            weighted_variance_of(&dev, w)
        })
        .sum::<f64>()
        / ll as f64;

    let col_means: Vec<f64> = columns.iter().map(|c| weighted_mean(c, w)).collect();
    let grand = canonical_mean(&col_means);
    let objective: Vec<Option<f64>> = (0..=kk)
        .map(|k| {
            (w[k] > 0.0).then(|| {
                (0..ll)
                    .map(|l| {
                        let b = (col_means[l] - grand) - (g[[k, l]] - mean_path[k]);
                        b * b
                    })
                    .sum::<f64>()
            })
        })
        .collect();
    let mut k_star = 0;
    let mut best = f64::INFINITY;
    for (k, o) in objective.iter().enumerate() {
        if let Some(o) = *o {
            if o < best {
                best = o;
                k_star = k;
            }
        }
    }

    let paths = Array2::from_shape_fn((kk + 1, ll), |(k, l)| g[[k, l]] - g[[k_star, l]]);
    PaleResult {
        vim: main + excess + best / ll as f64,
        k_star,
        objective,
        paths,
        mean_path,
    }
}

/// Default number of paths for `n` observations over `k` intervals.
pub fn default_l(n: usize, k: usize) -> usize {
    (n / k).clamp(1, 256)
}

/// Main-effect, quantile-path and connected-path importance from one set of
/// local effects.
#[derive(Debug, Clone, PartialEq)]
pub struct PathVims {
    pub curve: AleCurve,
    pub ale_main: f64,
    pub qpale: PaleResult,
    pub cpale: PaleResult,
}

pub fn path_vims(e: &LocalEffects, d: &Dataset, l: usize, conv: Convention) -> Result<PathVims> {
    let curve = ale_main_curve(e, conv);
    let ale_main = ale_main_vim(&curve);
    let qpale = spale_vim(&quantile_paths(e, l)?, conv);
    let cpale = spale_vim(&connected_paths(e, d, l)?, conv);
    Ok(PathVims {
        curve,
        ale_main,
        qpale,
        cpale,
    })
}

pub fn qpale_vim(
    m: &ModelHandle,
    d: &Dataset,
    p: &QuantilePartition,
    j: usize,
    l: usize,
    conv: Convention,
) -> Result<PaleResult> {
    let e = local_effects(m, d, p, j)?;
    Ok(spale_vim(&quantile_paths(&e, l)?, conv))
}

pub fn cpale_vim(
    m: &ModelHandle,
    d: &Dataset,
    p: &QuantilePartition,
    j: usize,
    l: usize,
    conv: Convention,
) -> Result<PaleResult> {
    let e = local_effects(m, d, p, j)?;
    Ok(spale_vim(&connected_paths(&e, d, l)?, conv))
}
