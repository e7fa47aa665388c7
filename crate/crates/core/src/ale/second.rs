//! Second-order ALE interaction surfaces.

use ndarray::Array2;

use super::{numeric_column, AleCurve, Axis, AxisKind, Convention};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::ModelHandle;
use crate::partition::build_partition;
use crate::stats::{canonical_mean, variance};

/// Pure second-order effect of a predictor pair on a `K_a x K_b` cell grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AleSurface {
    pub pair: (usize, usize),
    pub axes: (Axis, Axis),
    pub convention: Convention,
    /// Observations per cell.
    pub counts: Array2<usize>,
    /// Centered value of each cell.
    pub cells: Array2<f64>,
    /// Centered value at every grid point `(z_a, z_b)`, `(K_a+1) x (K_b+1)`.
    pub grid: Array2<f64>,
    pub evaluations: u64,
}

impl AleSurface {
    /// Centered value at `(x_a, x_b)` for the pair in stored order.
    pub fn eval(&self, xa: f64, xb: f64) -> f64 {
        self.cells[[self.axes.0.locate(xa) - 1, self.axes.1.locate(xb) - 1]]
    }

    fn eval_for(&self, j: usize, xj: f64, xl: f64) -> f64 {
        if self.pair.0 == j {
            self.eval(xj, xl)
        } else {
            self.eval(xl, xj)
        }
    }
}

fn nearest_filled(filled: &Array2<bool>, a: usize, b: usize) -> (usize, usize) {
    let mut best = None;
    let mut best_d = usize::MAX;
    // row-major scan keeps the lowest indices on ties
    for ((p, q), &ok) in filled.indexed_iter() {
        if ok {
            let d = p.abs_diff(a).pow(2) + q.abs_diff(b).pow(2);
            if d < best_d {
                best_d = d;
                best = Some((p, q));
            }
        }
    }
    best.expect("at least one cell is occupied")
}

pub fn ale_second_surface(
    m: &ModelHandle,
    d: &Dataset,
    j: usize,
    l: usize,
    k_pair: usize,
    conv: Convention,
) -> Result<AleSurface> {
    m.check_dataset(d)?;
    if j == l {
        return Err(Error::InvalidArgument("surface needs two distinct predictors".into()));
    }
    let xj = numeric_column(d, j)?;
    let xl = numeric_column(d, l)?;
    let n = d.n();
    let pj = build_partition(xj, k_pair.min(n))?;
    let pl = build_partition(xl, k_pair.min(n))?;
    let (ka, kb) = (pj.k(), pl.k());
    let (za, zb) = (pj.breakpoints(), pl.breakpoints());

    let mut cell_of = vec![(0, 0); n];
    for a in 0..ka {
        for &i in pj.members(a) {
            cell_of[i].0 = a;
        }
    }
    for b in 0..kb {
        for &i in pl.members(b) {
            cell_of[i].1 = b;
        }
    }

    let base = d.design_matrix();
    let corner = |da: usize, db: usize| -> Result<Vec<f64>> {
        let mut rows = base.clone();
        for (i, &(a, b)) in cell_of.iter().enumerate() {
            rows[[i, j]] = za[a + da];
            rows[[i, l]] = zb[b + db];
        }
        m.eval(&rows)
    };
    let f11 = corner(1, 1)?;
    let f01 = corner(0, 1)?;
    let f10 = corner(1, 0)?;
    let f00 = corner(0, 0)?;

    let mut diffs: Vec<Vec<f64>> = vec![Vec::new(); ka * kb];
    for (i, &(a, b)) in cell_of.iter().enumerate() {
        diffs[a * kb + b].push(f11[i] - f01[i] - f10[i] + f00[i]);
    }
    let counts = Array2::from_shape_fn((ka, kb), |(a, b)| diffs[a * kb + b].len());
    let filled = counts.mapv(|c| c > 0);
    let mut local = Array2::from_shape_fn((ka, kb), |(a, b)| {
        let v = &diffs[a * kb + b];
        if v.is_empty() {
            0.0
        } else {
            canonical_mean(v)
        }
    });
    for a in 0..ka {
        for b in 0..kb {
            if !filled[[a, b]] {
                local[[a, b]] = local[nearest_filled(&filled, a, b)];
            }
        }
    }

    // double accumulation over the grid points
    let mut h = Array2::<f64>::zeros((ka + 1, kb + 1));
    for a in 1..=ka {
        for b in 1..=kb {
            h[[a, b]] = local[[a - 1, b - 1]] + h[[a - 1, b]] + h[[a, b - 1]] - h[[a - 1, b - 1]];
        }
    }

    // main effects of the accumulated surface along each axis
    let na: Vec<f64> = counts.rows().into_iter().map(|r| r.sum() as f64).collect();
    let nb: Vec<f64> = counts.columns().into_iter().map(|c| c.sum() as f64).collect();
    let mut main_a = vec![0.0; ka + 1];
    for a in 1..=ka {
        let s: f64 = (1..=kb)
            .map(|b| counts[[a - 1, b - 1]] as f64 * (h[[a, b]] - h[[a - 1, b]]))
            .sum();
        main_a[a] = main_a[a - 1] + s / na[a - 1];
    }
    let mut main_b = vec![0.0; kb + 1];
    for b in 1..=kb {
        let s: f64 = (1..=ka)
            .map(|a| counts[[a - 1, b - 1]] as f64 * (h[[a, b]] - h[[a, b - 1]]))
            .sum();
        main_b[b] = main_b[b - 1] + s / nb[b - 1];
    }
    let mut grid = Array2::from_shape_fn((ka + 1, kb + 1), |(a, b)| h[[a, b]] - main_a[a] - main_b[b]);

    let mut cells = Array2::from_shape_fn((ka, kb), |(a, b)| match conv {
        Convention::RightEndpoint => grid[[a + 1, b + 1]],
        Convention::Midpoint => {
            0.25 * (grid[[a, b]] + grid[[a + 1, b]] + grid[[a, b + 1]] + grid[[a + 1, b + 1]])
        }
    });
    let mean = cells
        .iter()
        .zip(counts.iter())
        .map(|(v, &c)| v * c as f64)
        .sum::<f64>()
        / n as f64;
    cells.mapv_inplace(|v| v - mean);
    grid.mapv_inplace(|v| v - mean);

    let axis = |p: &crate::partition::QuantilePartition, marg: &[f64]| {
        let mut weights = vec![0.0];
        weights.extend_from_slice(marg);
        Axis {
            points: p.breakpoints().to_vec(),
            weights,
            kind: AxisKind::Numeric,
        }
    };
    Ok(AleSurface {
        pair: (j, l),
        axes: (axis(&pj, &na), axis(&pl, &nb)),
        convention: conv,
        counts,
        cells,
        grid,
        evaluations: 4 * n as u64,
    })
}

fn curve_for(curves: &[AleCurve], j: usize) -> Result<&AleCurve> {
    curves
        .iter()
        .find(|c| c.predictor == j)
        .ok_or_else(|| Error::InvalidArgument(format!("no main-effect curve for predictor {j}")))
}

fn surface_for(surfaces: &[AleSurface], j: usize, l: usize) -> Result<&AleSurface> {
    surfaces
        .iter()
        .find(|s| s.pair == (j, l) || s.pair == (l, j))
        .ok_or(Error::MissingSurface(j, l))
}

/// Variance over the data of predictor `j`'s main effect plus every
/// second-order surface involving it.
pub fn ale_second_vim(
    j: usize,
    curves: &[AleCurve],
    surfaces: &[AleSurface],
    d: &Dataset,
) -> Result<f64> {
    let curve = curve_for(curves, j)?;
    let mut total: Vec<f64> = (0..d.n()).map(|i| curve.eval(d.value(i, j))).collect();
    for l in (0..d.d()).filter(|&l| l != j) {
        let s = surface_for(surfaces, j, l)?;
        for (i, t) in total.iter_mut().enumerate() {
            *t += s.eval_for(j, d.value(i, j), d.value(i, l));
        }
    }
    Ok(variance(&total))
}

/// Share of the prediction variance explained by all main effects and
/// second-order surfaces.
pub fn r2_ale2(
    m: &ModelHandle,
    d: &Dataset,
    curves: &[AleCurve],
    surfaces: &[AleSurface],
) -> Result<f64> {
    let f = m.predict_dataset(d)?;
    let var_f = variance(&f);
    if var_f <= 0.0 {
        return Err(Error::ConstantModel);
    }
    let mean_f = f.iter().sum::<f64>() / f.len() as f64;
    let mut resid: Vec<f64> = f.iter().map(|v| v - mean_f).collect();
    for j in 0..d.d() {
        let c = curve_for(curves, j)?;
        for (i, r) in resid.iter_mut().enumerate() {
            *r -= c.eval(d.value(i, j));
        }
        for l in j + 1..d.d() {
            let s = surface_for(surfaces, j, l)?;
            for (i, r) in resid.iter_mut().enumerate() {
                *r -= s.eval_for(j, d.value(i, j), d.value(i, l));
            }
        }
    }
    Ok(1.0 - variance(&resid) / var_f)
}
