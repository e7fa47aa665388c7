//! Prediction functions and the data they are evaluated on.
//!
//! Every estimator talks to a model through [`ModelHandle::eval_batch`],
//! which validates the query, counts the rows served and rejects non-finite
//! predictions.

mod builtin;
mod csv_io;
mod normal;
mod scenario;
mod subprocess;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};

use crate::dataset::{ColumnData, Dataset};
use crate::error::{Error, Result};

pub use builtin::{make_builtin, parse_builtin, BuiltinModel};
pub use csv_io::{load_dataset, load_dataset_with, write_dataset};
pub use normal::{normal_cdf, standard_normal_pair};
pub use scenario::{generate_scenario, Scenario, ScenarioSpec};
pub use subprocess::{render_protocol_input, spawn_subprocess_model, SubprocessModel};

/// Anything that maps rows of predictor values to real predictions.
///
/// Implementations must be pure: the same row always yields the same value.
pub trait Model: Send + Sync {
    fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>>;
}

/// A model built from a closure over a single row.
pub struct FnModel<F>(pub F);

impl<F> Model for FnModel<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(rows
            .rows()
            .into_iter()
            .map(|r| match r.as_slice() {
                Some(s) => (self.0)(s),
                None => (self.0)(&r.to_vec()),
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    Numeric,
    Categorical(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

/// Ordered predictor names and kinds a model expects.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema(pub Vec<ColumnSpec>);

impl Schema {
    /// `x1..xd`, all numeric.
    pub fn numeric(d: usize) -> Self {
        Schema(
            (1..=d)
                .map(|j| ColumnSpec {
                    name: format!("x{j}"),
                    kind: ColumnKind::Numeric,
                })
                .collect(),
        )
    }

    pub fn of_dataset(data: &Dataset) -> Self {
        Schema(
            data.columns()
                .iter()
                .map(|c| ColumnSpec {
                    name: c.name.clone(),
                    kind: match &c.data {
                        ColumnData::Numeric(_) => ColumnKind::Numeric,
                        ColumnData::Categorical { levels, .. } => {
                            ColumnKind::Categorical(levels.clone())
                        }
                    },
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A named model with a schema and a counter of predictions served.
pub struct ModelHandle {
    name: String,
    schema: Schema,
    inner: Arc<dyn Model>,
    evaluations: AtomicU64,
}

impl fmt::Debug for ModelHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelHandle")
            .field("name", &self.name)
            .field("arity", &self.schema.len())
            .field("evaluations", &self.evaluations())
            .finish()
    }
}

impl ModelHandle {
    pub fn new(name: impl Into<String>, schema: Schema, model: impl Model + 'static) -> Self {
        ModelHandle {
            name: name.into(),
            schema,
            inner: Arc::new(model),
            evaluations: AtomicU64::new(0),
        }
    }

    /// Wraps a row closure with an all-numeric schema of width `d`.
    pub fn from_fn<F>(name: impl Into<String>, d: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ModelHandle::new(name, Schema::numeric(d), FnModel(f))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Total number of rows evaluated so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::SeqCst)
    }

    /// Checks the model can be evaluated on rows of `data`.
    pub fn check_dataset(&self, data: &Dataset) -> Result<()> {
        if data.d() != self.arity() {
            return Err(Error::SchemaMismatch(format!(
                "model `{}` takes {} predictors, dataset has {}",
                self.name,
                self.arity(),
                data.d()
            )));
        }
        Ok(())
    }

    /// Predictions for `rows`, in row order.
    pub fn eval_batch(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if rows.ncols() != self.arity() {
            return Err(Error::SchemaMismatch(format!(
                "row width {} does not match model arity {}",
                rows.ncols(),
                self.arity()
            )));
        }
        for (j, spec) in self.schema.0.iter().enumerate() {
            if let ColumnKind::Categorical(levels) = &spec.kind {
                let bad = rows.column(j).iter().any(|&c| {
                    !(c >= 0.0 && c.fract() == 0.0 && (c as usize) < levels.len())
                });
                if bad {
                    return Err(Error::SchemaMismatch(format!(
                        "column `{}` holds an unknown level",
                        spec.name
                    )));
                }
            }
        }
        if rows.nrows() == 0 {
            return Ok(Vec::new());
        }
        let out = self.inner.predict(rows)?;
        self.evaluations
            .fetch_add(rows.nrows() as u64, Ordering::SeqCst);
        if out.len() != rows.nrows() {
            return Err(Error::PredictionCount {
                expected: rows.nrows(),
                got: out.len(),
            });
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinitePrediction);
        }
        Ok(out)
    }

    /// Convenience wrapper for an owned matrix.
    pub fn eval(&self, rows: &Array2<f64>) -> Result<Vec<f64>> {
        self.eval_batch(rows.view())
    }

    /// Predictions at every row of `data`.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check_dataset(data)?;
        self.eval(&data.design_matrix())
    }
}
