//! Closed-form response functions used by the synthetic scenarios.

use ndarray::ArrayView2;

use super::{Model, ModelHandle, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinModel {
    /// `x1 + x2`
    Example1,
    /// `x1 + x2^2`
    Example2,
    /// `x1 + x2 + 2 (x1 - 0.5)(x2 - 0.5)`
    Example3Interaction,
    /// `4 x1 + 3.87 x2^2 + 2.97 logistic(10 x3 - 5) + 13.86 (x1 - 0.5)(x2 - 0.5)`;
    /// `x4` is accepted and ignored.
    Example5,
    Linear(Vec<f64>),
    /// Sum of all predictors plus reproducible high-frequency noise with
    /// standard deviation `sigma`, keyed by the row's bits and `seed`.
    NoisyAdditive { sigma: f64, seed: u64, arity: usize },
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform(-sqrt(3), sqrt(3)) pseudo-noise (mean 0, variance 1) keyed by the
/// exact bit pattern of `row`.
fn row_noise(row: &[f64], seed: u64) -> f64 {
    let mut h = splitmix64(seed);
    for x in row {
        // +0.0 and -0.0 hash alike
        let bits = if *x == 0.0 { 0 } else { x.to_bits() };
        h = splitmix64(h ^ bits);
    }
    let u = ((h >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    (u - 0.5) * 12f64.sqrt()
}

impl BuiltinModel {
    pub fn arity(&self) -> usize {
        match self {
            BuiltinModel::Example1 | BuiltinModel::Example2 | BuiltinModel::Example3Interaction => 2,
            BuiltinModel::Example5 => 4,
            BuiltinModel::Linear(beta) => beta.len(),
            BuiltinModel::NoisyAdditive { arity, .. } => *arity,
        }
    }

    pub fn name(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",");
        match self {
            BuiltinModel::Example1 => "example1".into(),
            BuiltinModel::Example2 => "example2".into(),
            BuiltinModel::Example3Interaction => "example3_interaction".into(),
            BuiltinModel::Example5 => "example5".into(),
            BuiltinModel::Linear(beta) => format!("linear:{}", list(beta)),
            BuiltinModel::NoisyAdditive { sigma, seed, arity } => {
                format!("noisy_additive:{sigma},{seed},{arity}")
            }
        }
    }

    pub fn eval_row(&self, x: &[f64]) -> f64 {
        match self {
            BuiltinModel::Example1 => x[0] + x[1],
            BuiltinModel::Example2 => x[0] + x[1] * x[1],
            BuiltinModel::Example3Interaction => x[0] + x[1] + 2.0 * (x[0] - 0.5) * (x[1] - 0.5),
            BuiltinModel::Example5 => {
                4.0 * x[0]
                    + 3.87 * x[1] * x[1]
                    + 2.97 * logistic(-5.0 + 10.0 * x[2])
                    + 13.86 * (x[0] - 0.5) * (x[1] - 0.5)
            }
            BuiltinModel::Linear(beta) => beta.iter().zip(x).map(|(b, v)| b * v).sum(),
            BuiltinModel::NoisyAdditive { sigma, seed, .. } => {
                x.iter().sum::<f64>() + sigma * row_noise(x, *seed)
            }
        }
    }
}

impl Model for BuiltinModel {
    fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(rows
            .rows()
            .into_iter()
            .map(|r| match r.as_slice() {
                Some(s) => self.eval_row(s),
                None => self.eval_row(&r.to_vec()),
            })
            .collect())
    }
}

fn expect_params(name: &str, params: &[f64], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&params.len()) {
        Ok(())
    } else {
        Err(Error::ModelParameters {
            name: name.into(),
            expected: allowed
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(" or "),
            got: params.len(),
        })
    }
}

/// Resolves a builtin by name.
///
/// `linear` takes its coefficients; `noisy_additive` takes `sigma, seed` and an
/// optional arity (default 2). The other names take no parameters.
pub fn parse_builtin(name: &str, params: &[f64]) -> Result<BuiltinModel> {
    let model = match name {
        "example1" | "example2" | "example3_interaction" | "example5" => {
            expect_params(name, params, &[0])?;
            match name {
                "example1" => BuiltinModel::Example1,
                "example2" => BuiltinModel::Example2,
                "example3_interaction" => BuiltinModel::Example3Interaction,
                _ => BuiltinModel::Example5,
            }
        }
        "linear" => {
            if params.is_empty() {
                return Err(Error::ModelParameters {
                    name: name.into(),
                    expected: "at least 1".into(),
                    got: 0,
                });
            }
            BuiltinModel::Linear(params.to_vec())
        }
        "noisy_additive" => {
            expect_params(name, params, &[2, 3])?;
            let (sigma, seed) = (params[0], params[1]);
            let arity = params.get(2).copied().unwrap_or(2.0);
            if !(sigma >= 0.0) || seed < 0.0 || seed.fract() != 0.0 || arity < 1.0 || arity.fract() != 0.0 {
                return Err(Error::InvalidArgument(
                    "noisy_additive needs sigma >= 0, an integer seed and a positive arity".into(),
                ));
            }
            BuiltinModel::NoisyAdditive {
                sigma,
                seed: seed as u64,
                arity: arity as usize,
            }
        }
        other => return Err(Error::UnknownModel(other.into())),
    };
    Ok(model)
}

/// A [`ModelHandle`] for a builtin function with an `x1..xd` numeric schema.
pub fn make_builtin(name: &str, params: &[f64]) -> Result<ModelHandle> {
    let model = parse_builtin(name, params)?;
    Ok(ModelHandle::new(model.name(), Schema::numeric(model.arity()), model))
}
