//! Weighted means and variances.

use crate::error::{Error, Result};

/// Values paired with nonnegative weights of positive total.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSeries {
    values: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
}

impl WeightedSeries {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("weights must have a positive sum".into()));
        }
        Ok(WeightedSeries {
            values,
            weights,
            total,
        })
    }

    /// Equal weights.
    pub fn unweighted(values: Vec<f64>) -> Result<Self> {
        let w = vec![1.0; values.len()];
        WeightedSeries::new(values, w)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        weighted_mean(&self.values, &self.weights)
    }
}

/// `sum w_i v_i / sum w_i`. Callers guarantee a positive weight total.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total
}

/// Population-style weighted variance `sum w (v - m)^2 / sum w`, two-pass.
pub fn weighted_variance(s: &WeightedSeries) -> f64 {
    weighted_variance_of(&s.values, &s.weights)
}

/// Slice form of [`weighted_variance`]. Callers guarantee a positive weight total.
pub fn weighted_variance_of(values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let m = weighted_mean(values, weights);
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v - m) * (v - m))
        .sum::<f64>()
        / total
}

/// Mean that depends only on the multiset of `values`: they are summed in
/// sorted order as offsets from the smallest, so equal inputs give that
/// value exactly.
pub fn canonical_mean(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let base = v[0];
    base + v.iter().map(|x| x - base).sum::<f64>() / v.len() as f64
}

/// Unweighted population variance.
pub fn variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
}
