//! Connected paths by simultaneous median splits of all intervals.

use std::collections::BTreeMap;

use ndarray::Array2;

use super::{PathKind, PathSet};
use crate::ale::LocalEffects;
use crate::dataset::{ColumnData, Dataset};
use crate::error::{Error, Result};
use crate::stats::canonical_mean;

/// One region per interval; entries index into that interval's effects.
type Leaf = Vec<Vec<usize>>;
/// Left and right row sets of one region after a split.
type Halves = (Vec<usize>, Vec<usize>);

struct Splitter<'a> {
    e: &'a LocalEffects,
    d: &'a Dataset,
    features: Vec<usize>,
}

impl Splitter<'_> {
    fn row(&self, k: usize, t: usize) -> usize {
        self.e.interval(k)[t].0
    }

    fn effect(&self, k: usize, t: usize) -> f64 {
        self.e.interval(k)[t].1
    }

    fn region_mean(&self, k: usize, region: &[usize]) -> f64 {
        let v: Vec<f64> = region.iter().map(|&t| self.effect(k, t)).collect();
        canonical_mean(&v)
    }

    /// Left and right parts of a region, or `None` when one side is empty.
    fn split_region(&self, k: usize, region: &[usize], m: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        if region.len() < 2 {
            return None;
        }
        let goes_left: Vec<bool> = match &self.d.column(m).data {
            ColumnData::Numeric(x) => {
                let mut vals: Vec<f64> = region.iter().map(|&t| x[self.row(k, t)]).collect();
                vals.sort_by(f64::total_cmp);
                let median = vals[vals.len() / 2];
                region.iter().map(|&t| x[self.row(k, t)] < median).collect()
            }
            ColumnData::Categorical { codes, .. } => {
                // levels ordered by their mean local effect in this region
                let mut by_level: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
                for &t in region {
                    by_level.entry(codes[self.row(k, t)]).or_default().push(self.effect(k, t));
                }
                let mut levels: Vec<(f64, u32, usize)> = by_level
                    .iter()
                    .map(|(&c, v)| (canonical_mean(v), c, v.len()))
                    .collect();
                levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let target = region.len() / 2;
                let mut seen = 0;
                let mut rank_of = BTreeMap::new();
                let mut median_rank = 0;
                for (r, &(_, c, cnt)) in levels.iter().enumerate() {
                    rank_of.insert(c, r);
                    if seen <= target && target < seen + cnt {
                        median_rank = r;
                    }
                    seen += cnt;
                }
                region
                    .iter()
                    .map(|&t| rank_of[&codes[self.row(k, t)]] < median_rank)
                    .collect()
            }
        };
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (&t, l) in region.iter().zip(goes_left) {
            if l {
                left.push(t);
            } else {
                right.push(t);
            }
        }
        (!left.is_empty()).then_some((left, right))
    }

    fn split_leaf(&self, leaf: &Leaf) -> Option<(Leaf, Leaf)> {
        let mut best: Option<(f64, Vec<Option<Halves>>)> = None;
        for &m in &self.features {
            let parts: Vec<_> = leaf
                .iter()
                .enumerate()
                .map(|(k, region)| self.split_region(k, region, m))
                .collect();
            if parts.iter().all(Option::is_none) {
                continue;
            }
            let score: f64 = parts
                .iter()
                .enumerate()
                .filter_map(|(k, p)| {
                    p.as_ref()
                        .map(|(l, r)| (self.region_mean(k, l) - self.region_mean(k, r)).abs())
                })
                .sum();
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, parts));
            }
        }
        let (_, parts) = best?;
        let mut left = Vec::with_capacity(leaf.len());
        let mut right = Vec::with_capacity(leaf.len());
        for (region, part) in leaf.iter().zip(parts) {
            match part {
                Some((l, r)) => {
                    left.push(l);
                    right.push(r);
                }
                None => {
                    left.push(region.clone());
                    right.push(region.clone());
                }
            }
        }
        Some((left, right))
    }
}

/// Paths from breadth-first simultaneous splitting of the intervals' regions
/// until `l_target` leaf sets exist or no region can be split further.
///
/// Each path's increment in an interval is the mean local effect of its
/// region there.
pub fn connected_paths(e: &LocalEffects, d: &Dataset, l_target: usize) -> Result<PathSet> {
    if l_target == 0 {
        return Err(Error::InvalidArgument("L must be at least 1".into()));
    }
    if e.n() != d.n() {
        return Err(Error::InvalidArgument(
            "local effects were computed on a different dataset".into(),
        ));
    }
    let splitter = Splitter {
        e,
        d,
        features: (0..d.d()).filter(|&m| m != e.predictor()).collect(),
    };
    let k = e.k();
    let root: Leaf = (0..k).map(|kk| (0..e.interval(kk).len()).collect()).collect();
    let mut leaves = vec![root];
    while leaves.len() < l_target {
        let total = leaves.len();
        let mut next = Vec::with_capacity(2 * total);
        let mut changed = false;
        for (idx, leaf) in leaves.into_iter().enumerate() {
            if next.len() + (total - idx) < l_target {
                if let Some((a, b)) = splitter.split_leaf(&leaf) {
                    next.push(a);
                    next.push(b);
                    changed = true;
                    continue;
                }
            }
            next.push(leaf);
        }
        leaves = next;
        if !changed {
            break;
        }
    }

    let l = leaves.len();
    let mut increments = Array2::zeros((k, l));
    let mut provenance = vec![Vec::with_capacity(l); k];
    for (ll, leaf) in leaves.iter().enumerate() {
        for (kk, region) in leaf.iter().enumerate() {
            increments[[kk, ll]] = splitter.region_mean(kk, region);
            let mut rows: Vec<usize> = region.iter().map(|&t| splitter.row(kk, t)).collect();
            rows.sort_unstable();
            provenance[kk].push(rows);
        }
    }
    PathSet::build(
        e.predictor(),
        PathKind::Connected,
        e.axis().clone(),
        increments,
        e.counts(),
        provenance,
    )
}
