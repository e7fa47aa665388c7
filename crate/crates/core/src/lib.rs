//! Model-agnostic variable importance from accumulated local effects.
//!
//! * [`ale`]: ALE main-effect curves, second-order surfaces and the VIMs
//!   built on them.
//! * [`pale`]: path-ALE total-effect VIMs (quantile and connected paths).
//! * [`baselines`]: marginal permutation and sampled marginal Shapley VIMs,
//!   plus closed-form values for a linear Gaussian model.
//! * [`models`]: model adapters, CSV ingestion and synthetic scenarios.

pub mod ale;
pub mod baselines;
pub mod dataset;
pub mod error;
pub mod models;
pub mod pale;
pub mod partition;
pub mod stats;

pub use dataset::{Column, ColumnData, Dataset};
pub use error::{Error, Result};
pub use models::ModelHandle;
pub use partition::{build_partition, interval_index, QuantilePartition};
pub use stats::{canonical_mean, weighted_variance, weighted_variance_of, WeightedSeries};
