//! Categorical predictors: level ordering and local effects between
//! neighbouring levels.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;

use crate::ale::{Axis, AxisKind, LocalEffects};
use crate::dataset::{ColumnData, Dataset};
use crate::error::{Error, Result};
use crate::models::{ColumnKind, ModelHandle};

/// Levels of categorical predictor `predictor` in accumulation order.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelOrder {
    pub predictor: usize,
    /// Level codes, first to last.
    pub order: Vec<u32>,
    /// Level-by-level dissimilarity, indexed by level code.
    pub dissimilarity: Array2<f64>,
}

fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

fn tv_distance(a: &[u32], b: &[u32], levels: usize) -> f64 {
    let mut pa = vec![0.0; levels];
    let mut pb = vec![0.0; levels];
    for &c in a {
        pa[c as usize] += 1.0 / a.len() as f64;
    }
    for &c in b {
        pb[c as usize] += 1.0 / b.len() as f64;
    }
    0.5 * pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Orders items along the first principal coordinate of classical MDS on
/// `dissimilarity`, with item 0 on the negative side. All-zero input keeps
/// the original order.
pub fn order_from_dissimilarity(dissimilarity: &Array2<f64>) -> Vec<usize> {
    let q = dissimilarity.nrows();
    let identity: Vec<usize> = (0..q).collect();
    if q < 2 || dissimilarity.iter().all(|&v| v == 0.0) {
        return identity;
    }
    let sq = DMatrix::from_fn(q, q, |a, b| dissimilarity[[a, b]].powi(2));
    let centering = DMatrix::<f64>::identity(q, q) - DMatrix::from_element(q, q, 1.0 / q as f64);
    let b = -0.5 * &centering * sq * &centering;
    let eig = SymmetricEigen::new(b);
    let top = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1).then(y.0.cmp(&x.0)))
        .map(|(i, _)| i)
        .unwrap();
    let mut coord: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    let pivot = coord.iter().copied().find(|c| c.abs() > 1e-12).unwrap_or(0.0);
    let flip = if coord[0].abs() > 1e-12 { coord[0] > 0.0 } else { pivot > 0.0 };
    if flip {
        coord.iter_mut().for_each(|c| *c = -*c);
    }
    let mut order = identity;
    order.sort_by(|&a, &b| coord[a].total_cmp(&coord[b]).then(a.cmp(&b)));
    order
}

/// Orders the levels of categorical column `j` so that levels whose other
/// predictors are distributed alike sit next to each other.
pub fn reorder_categorical_levels(d: &Dataset, j: usize) -> Result<LevelOrder> {
    let (levels, codes) = match &d.column(j).data {
        ColumnData::Categorical { levels, codes } => (levels, codes),
        ColumnData::Numeric(_) => {
            return Err(Error::InvalidArgument(format!(
                "column `{}` is not categorical",
                d.column(j).name
            )))
        }
    };
    let q = levels.len();
    let mut rows_of: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (i, &c) in codes.iter().enumerate() {
        rows_of[c as usize].push(i);
    }
    if let Some(a) = rows_of.iter().position(Vec::is_empty) {
        return Err(Error::EmptyLevel(levels[a].clone()));
    }

    let mut dis = Array2::<f64>::zeros((q, q));
    for m in (0..d.d()).filter(|&m| m != j) {
        for a in 0..q {
            for b in a + 1..q {
                let v = match &d.column(m).data {
                    ColumnData::Numeric(x) => {
                        let xa: Vec<f64> = rows_of[a].iter().map(|&i| x[i]).collect();
                        let xb: Vec<f64> = rows_of[b].iter().map(|&i| x[i]).collect();
                        ks_distance(&xa, &xb)
                    }
                    ColumnData::Categorical { levels: lv, codes: cm } => {
                        let xa: Vec<u32> = rows_of[a].iter().map(|&i| cm[i]).collect();
                        let xb: Vec<u32> = rows_of[b].iter().map(|&i| cm[i]).collect();
                        tv_distance(&xa, &xb, lv.len())
                    }
                };
                dis[[a, b]] += v;
                dis[[b, a]] += v;
            }
        }
    }
    let order = order_from_dissimilarity(&dis)
        .into_iter()
        .map(|c| c as u32)
        .collect();
    Ok(LevelOrder {
        predictor: j,
        order,
        dissimilarity: dis,
    })
}

/// Local effects between consecutive levels of `o`. Observations at an
/// interior level enter both intervals touching it.
pub fn categorical_local_effects(
    m: &ModelHandle,
    d: &Dataset,
    j: usize,
    o: &LevelOrder,
) -> Result<LocalEffects> {
    m.check_dataset(d)?;
    let (levels, codes) = match &d.column(j).data {
        ColumnData::Categorical { levels, codes } => (levels, codes),
        ColumnData::Numeric(_) => {
            return Err(Error::InvalidArgument(format!(
                "column `{}` is not categorical",
                d.column(j).name
            )))
        }
    };
    if let ColumnKind::Categorical(known) = &m.schema().0[j].kind {
        if let Some(bad) = levels.iter().find(|l| !known.contains(l)) {
            return Err(Error::SchemaMismatch(format!(
                "level `{bad}` of column `{}` is unknown to the model",
                d.column(j).name
            )));
        }
        if known != levels {
            return Err(Error::SchemaMismatch(format!(
                "model levels of column `{}` differ from the data",
                d.column(j).name
            )));
        }
    }
    let q = levels.len();
    let mut sorted_order = o.order.clone();
    sorted_order.sort_unstable();
    if o.predictor != j || sorted_order != (0..q as u32).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument("level order does not match the column".into()));
    }
    let mut position = vec![0; q];
    for (r, &c) in o.order.iter().enumerate() {
        position[c as usize] = r;
    }
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (i, &c) in codes.iter().enumerate() {
        at[position[c as usize]].push(i);
    }
    if let Some(r) = at.iter().position(Vec::is_empty) {
        return Err(Error::EmptyLevel(levels[o.order[r] as usize].clone()));
    }

    let base = d.design_matrix();
    let total: usize = (0..q - 1).map(|k| at[k].len() + at[k + 1].len()).sum();
    let mut upper = Array2::zeros((total, d.d()));
    let mut lower = Array2::zeros((total, d.d()));
    let mut members = Vec::with_capacity(q - 1);
    let mut slot = 0;
    for k in 0..q - 1 {
        let rows: Vec<usize> = at[k].iter().chain(&at[k + 1]).copied().collect();
        for &i in &rows {
            upper.row_mut(slot).assign(&base.row(i));
            lower.row_mut(slot).assign(&base.row(i));
            upper[[slot, j]] = o.order[k + 1] as f64;
            lower[[slot, j]] = o.order[k] as f64;
            slot += 1;
        }
        members.push(rows);
    }
    let hi = m.eval(&upper)?;
    let lo = m.eval(&lower)?;
    let mut slot = 0;
    let intervals = members
        .into_iter()
        .map(|rows| {
            rows.into_iter()
                .map(|i| {
                    slot += 1;
                    (i, hi[slot - 1] - lo[slot - 1])
                })
                .collect()
        })
        .collect();
    let axis = Axis {
        points: (0..q).map(|r| r as f64).collect(),
        weights: at.iter().map(|v| v.len() as f64).collect(),
        kind: AxisKind::Categorical {
            labels: o.order.iter().map(|&c| levels[c as usize].clone()).collect(),
            position,
        },
    };
    LocalEffects::from_parts(j, axis, d.n(), intervals, 2 * total as u64)
}

/// Default path count for a categorical predictor.
pub fn default_categorical_l(e: &LocalEffects) -> usize {
    let counts = e.counts();
    let mean = counts.iter().sum::<usize>().div_ceil(counts.len());
    mean.min(256)
}
