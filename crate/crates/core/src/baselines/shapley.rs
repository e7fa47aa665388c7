use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{stream, BaselineConfig};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::models::ModelHandle;

const TASK: u64 = 2;

/// Sampled marginal Shapley value of predictor `j` at every observation;
/// `2 M n` model evaluations.
///
/// Each sample draws a feature ordering and a donor row. Features after `j`
/// in the ordering come from the donor; the sample is the change in
/// prediction when `j` also comes from the donor.
pub fn marginal_shapley_values(m: &ModelHandle, d: &Dataset, j: usize, cfg: &BaselineConfig) -> Result<Vec<f64>> {
    m.check_dataset(d)?;
    let (n, dd, mm) = (d.n(), d.d(), cfg.samples);
    let x = d.design_matrix();
    let mut rng = stream(cfg.seed, TASK, j, 0);
    let mut with_j = Array2::zeros((n * mm, dd));
    let mut without_j = Array2::zeros((n * mm, dd));
    let mut order: Vec<usize> = (0..dd).collect();
    for i in 0..n {
        for t in 0..mm {
            order.shuffle(&mut rng);
            let w = rng.random_range(0..n);
            let slot = i * mm + t;
            let pos = order.iter().position(|&f| f == j).unwrap();
            let mut row = x.row(i).to_owned();
            for &f in &order[pos + 1..] {
                row[f] = x[[w, f]];
            }
            with_j.row_mut(slot).assign(&row);
            row[j] = x[[w, j]];
            without_j.row_mut(slot).assign(&row);
        }
    }
    let a = m.eval(&with_j)?;
    let b = m.eval(&without_j)?;
    Ok((0..n)
        .map(|i| {
            let s = i * mm;
            (s..s + mm).map(|k| a[k] - b[k]).sum::<f64>() / mm as f64
        })
        .collect())
}

/// Mean squared sampled Shapley value per predictor.
pub fn marginal_shapley_vims(m: &ModelHandle, d: &Dataset, cfg: &BaselineConfig) -> Result<Vec<f64>> {
    (0..d.d())
        .map(|j| {
            let phi = marginal_shapley_values(m, d, j, cfg)?;
            Ok(phi.iter().map(|p| p * p).sum::<f64>() / phi.len() as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_model_is_zero() {
        let d = Dataset::from_rows(&[vec![0.0, 1.0], vec![1.0, 3.0], vec![2.0, 2.0]], None).unwrap();
        let m = ModelHandle::from_fn("c", 2, |_| 4.0);
        let cfg = BaselineConfig::new(1, 20, 3).unwrap();
        assert_eq!(marginal_shapley_vims(&m, &d, &cfg).unwrap(), vec![0.0, 0.0]);
        assert_eq!(m.evaluations(), 2 * 2 * 20 * 3);
    }
}
