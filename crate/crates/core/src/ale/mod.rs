//! Accumulated local effects: per-observation finite differences, main-effect
//! curves and the main-effect importance.

mod second;

pub use second::{ale_second_surface, ale_second_vim, r2_ale2, AleSurface};

use ndarray::Array2;

use crate::dataset::{ColumnData, Dataset};
use crate::error::{Error, Result};
use crate::models::ModelHandle;
use crate::partition::QuantilePartition;
use crate::stats::{canonical_mean, weighted_mean, weighted_variance_of};

/// Where a piecewise-constant effect function takes its value on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// The accumulated value at the interval's right endpoint.
    #[default]
    RightEndpoint,
    /// The average of the values at both endpoints.
    Midpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisKind {
    Numeric,
    /// Levels in accumulation order; `position[code]` is a level's place in it.
    Categorical {
        labels: Vec<String>,
        position: Vec<usize>,
    },
}

/// The points `0..=K` an effect function is accumulated over, with the
/// weight each point carries in variances.
///
/// Numeric axes use the breakpoints `z_0..z_K` with weight `n(k)` on `z_k`
/// and none on `z_0`. Categorical axes place the ordered levels at
/// `0, 1, ..., K`, each weighted by its observation count.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: AxisKind,
}

impl Axis {
    pub fn k(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, AxisKind::Categorical { .. })
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Values carried by each point given the accumulated function `g`.
    pub fn values(&self, g: &[f64], conv: Convention) -> Vec<f64> {
        if self.is_categorical() || conv == Convention::RightEndpoint {
            return g.to_vec();
        }
        let mut v = Vec::with_capacity(g.len());
        v.push(g[0]);
        v.extend(g.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        v
    }

    /// Index of the point whose value applies to predictor value `x`
    /// (a level code for categorical axes). Numeric values outside the
    /// range are clamped to the end intervals.
    pub fn locate(&self, x: f64) -> usize {
        match &self.kind {
            AxisKind::Numeric => self.points.partition_point(|&b| b < x).clamp(1, self.k()),
            AxisKind::Categorical { position, .. } => position[x as usize],
        }
    }
}

/// Finite differences of the model across each interval, grouped by interval.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEffects {
    predictor: usize,
    axis: Axis,
    n: usize,
    /// Interval `k` (0-based): `(row, effect)` in increasing predictor value.
    intervals: Vec<Vec<(usize, f64)>>,
    evaluations: u64,
}

impl LocalEffects {
    /// Assembles effects computed elsewhere. Each interval must be nonempty.
    pub fn from_parts(
        predictor: usize,
        axis: Axis,
        n: usize,
        intervals: Vec<Vec<(usize, f64)>>,
        evaluations: u64,
    ) -> Result<Self> {
        if intervals.len() != axis.k() || axis.weights.len() != axis.points.len() {
            return Err(Error::InvalidArgument(
                "interval count does not match the axis".into(),
            ));
        }
        if intervals.iter().any(Vec::is_empty) {
            return Err(Error::InvalidArgument("empty interval".into()));
        }
        if intervals.iter().flatten().any(|(_, e)| !e.is_finite()) {
            return Err(Error::InvalidArgument("non-finite local effect".into()));
        }
        if !(axis.total_weight() > 0.0) {
            return Err(Error::InvalidArgument("axis weights sum to zero".into()));
        }
        Ok(LocalEffects {
            predictor,
            axis,
            n,
            intervals,
            evaluations,
        })
    }

    pub fn predictor(&self) -> usize {
        self.predictor
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    /// Number of dataset rows.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.intervals.iter().map(Vec::len).collect()
    }

    /// `(row, effect)` pairs of interval `k` (0-based).
    pub fn interval(&self, k: usize) -> &[(usize, f64)] {
        &self.intervals[k]
    }

    pub fn effects(&self, k: usize) -> Vec<f64> {
        self.intervals[k].iter().map(|&(_, e)| e).collect()
    }

    /// Model evaluations spent producing these effects.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Mean effect per interval.
    pub fn interval_means(&self) -> Vec<f64> {
        (0..self.k()).map(|k| canonical_mean(&self.effects(k))).collect()
    }
}

/// Cumulative sums with a leading zero.
pub(crate) fn accumulate(increments: &[f64]) -> Vec<f64> {
    let mut g = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    g.push(acc);
    for d in increments {
        acc += d;
        g.push(acc);
    }
    g
}

/// Local effects of numeric predictor `j` over partition `p`, in two batches
/// of `n` rows each.
pub fn local_effects(
    m: &ModelHandle,
    d: &Dataset,
    p: &QuantilePartition,
    j: usize,
) -> Result<LocalEffects> {
    m.check_dataset(d)?;
    if d.numeric(j).is_none() {
        return Err(Error::InvalidArgument(format!(
            "column `{}` is categorical; use categorical_local_effects",
            d.column(j).name
        )));
    }
    let n = d.n();
    if p.n() != n {
        return Err(Error::InvalidArgument(
            "partition was built on a different column".into(),
        ));
    }
    let z = p.breakpoints();
    let base = d.design_matrix();
    let mut upper = Array2::zeros((n, d.d()));
    let mut lower = Array2::zeros((n, d.d()));
    let mut slot = 0;
    for k in 0..p.k() {
        for &i in p.members(k) {
            upper.row_mut(slot).assign(&base.row(i));
            lower.row_mut(slot).assign(&base.row(i));
            upper[[slot, j]] = z[k + 1];
            lower[[slot, j]] = z[k];
            slot += 1;
        }
    }
    let hi = m.eval(&upper)?;
    let lo = m.eval(&lower)?;

    let mut intervals = Vec::with_capacity(p.k());
    let mut slot = 0;
    for k in 0..p.k() {
        let members = p.members(k);
        intervals.push(
            members
                .iter()
                .enumerate()
                .map(|(t, &i)| (i, hi[slot + t] - lo[slot + t]))
                .collect(),
        );
        slot += members.len();
    }
    let mut weights = vec![0.0];
    weights.extend(p.counts().iter().map(|&c| c as f64));
    let axis = Axis {
        points: z.to_vec(),
        weights,
        kind: AxisKind::Numeric,
    };
    LocalEffects::from_parts(j, axis, n, intervals, 2 * n as u64)
}

/// Accumulated and centered main-effect function on the points of an axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AleCurve {
    pub predictor: usize,
    pub axis: Axis,
    pub convention: Convention,
    /// Uncentered accumulation, `g[0] = 0`.
    pub accumulated: Vec<f64>,
    /// Value of each point under the convention, minus `constant`.
    pub centered: Vec<f64>,
    pub constant: f64,
}

/// `(values - m, m)` with `m` the weighted mean.
pub(crate) fn center(values: &[f64], weights: &[f64]) -> (Vec<f64>, f64) {
    let m = weighted_mean(values, weights);
    (values.iter().map(|v| v - m).collect(), m)
}

pub fn ale_main_curve(e: &LocalEffects, conv: Convention) -> AleCurve {
    let accumulated = accumulate(&e.interval_means());
    let values = e.axis.values(&accumulated, conv);
    let (centered, constant) = center(&values, &e.axis.weights);
    AleCurve {
        predictor: e.predictor,
        axis: e.axis.clone(),
        convention: conv,
        accumulated,
        centered,
        constant,
    }
}

impl AleCurve {
    /// Centered effect at predictor value `x` (a level code when categorical).
    pub fn eval(&self, x: f64) -> f64 {
        self.centered[self.axis.locate(x)]
    }
}

/// Weighted variance of the centered curve over the data.
pub fn ale_main_vim(c: &AleCurve) -> f64 {
    let values = c.axis.values(&c.accumulated, c.convention);
    weighted_variance_of(&values, &c.axis.weights)
}

/// Default number of intervals for `n` observations.
pub fn default_k(n: usize) -> usize {
    (n / 50).clamp(1, 100)
}

/// Default per-axis interval count for second-order surfaces.
pub fn default_k_pair(k: usize) -> usize {
    k.min(40)
}

/// Column `j` values if numeric.
pub(crate) fn numeric_column(d: &Dataset, j: usize) -> Result<&[f64]> {
    match &d.column(j).data {
        ColumnData::Numeric(v) => Ok(v),
        ColumnData::Categorical { .. } => Err(Error::InvalidArgument(format!(
            "column `{}` must be numeric",
            d.column(j).name
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::build_partition;

    fn toy_effects(means: &[f64], counts: &[usize]) -> LocalEffects {
        let mut row = 0;
        let intervals: Vec<Vec<(usize, f64)>> = means
            .iter()
            .zip(counts)
            .map(|(&m, &c)| {
                (0..c)
                    .map(|_| {
                        row += 1;
                        (row - 1, m)
                    })
                    .collect()
            })
            .collect();
        let mut weights = vec![0.0];
        weights.extend(counts.iter().map(|&c| c as f64));
        let points = (0..=means.len()).map(|k| k as f64).collect();
        let axis = Axis {
            points,
            weights,
            kind: AxisKind::Numeric,
        };
        LocalEffects::from_parts(0, axis, row, intervals, 0).unwrap()
    }

    #[test]
    fn hand_accumulation() {
        let c = ale_main_curve(&toy_effects(&[1.0, 3.0], &[1, 1]), Convention::RightEndpoint);
        assert_eq!(c.accumulated, vec![0.0, 1.0, 4.0]);
        assert_eq!(&c.centered[1..], &[-1.5, 1.5]);
        assert_eq!(ale_main_vim(&c), 2.25);
    }

    #[test]
    fn zero_effects() {
        let c = ale_main_curve(&toy_effects(&[0.0, 0.0, 0.0], &[2, 1, 3]), Convention::Midpoint);
        assert!(c.centered.iter().all(|&v| v == 0.0));
        assert_eq!(ale_main_vim(&c), 0.0);
    }

    #[test]
    fn midpoint_values() {
        let e = toy_effects(&[2.0, 4.0], &[1, 1]);
        let c = ale_main_curve(&e, Convention::Midpoint);
        // interval values 1 and 4
        assert_eq!(&c.centered[1..], &[-1.5, 1.5]);
    }

    #[test]
    fn two_batches_of_n() {
        let d = Dataset::from_rows(
            &[vec![0.1, 1.0], vec![0.5, 2.0], vec![0.9, 3.0], vec![0.3, 4.0]],
            None,
        )
        .unwrap();
        let m = ModelHandle::from_fn("f", 2, |r| r[0] * r[1]);
        let p = build_partition(d.numeric(0).unwrap(), 2).unwrap();
        let e = local_effects(&m, &d, &p, 0).unwrap();
        assert_eq!(m.evaluations(), 8);
        assert_eq!(e.evaluations(), 8);
        assert_eq!(e.counts(), vec![2, 2]);
        // interval 1 is (z0, 0.3] holding rows 0 and 3
        let z = p.breakpoints();
        assert_eq!(e.interval(0)[0].0, 0);
        assert!((e.interval(0)[1].1 - (z[1] - z[0]) * 4.0).abs() < 1e-12);
    }

    #[test]
    fn defaults() {
        assert_eq!(default_k(20), 1);
        assert_eq!(default_k(500), 10);
        assert_eq!(default_k(1_000_000), 100);
        assert_eq!(default_k_pair(100), 40);
    }
}
