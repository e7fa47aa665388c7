//! Seeded synthetic data-generating processes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::builtin::BuiltinModel;
use super::normal::{normal_cdf, standard_normal_pair};
use crate::dataset::{Column, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// Uniform on the segment `x1 = x2` in `[0, 1]` plus independent
    /// `N(0, 0.05^2)` jitter on each coordinate; truth `x1 + x2^2`.
    Segment2,
    /// Four Uniform[0,1] marginals joined by a Gaussian copula with
    /// correlation matrix `corr`; truth is the example-5 function.
    Copula4 { corr: [[f64; 4]; 4] },
    /// Standard bivariate normal `(X1, X2)` with correlation `rho` and an
    /// independent standard normal `X3`; truth `beta . x`.
    Gauss3 { rho: f64, beta: [f64; 3] },
    /// `d` independent Uniform[0,1] predictors; truth is their sum.
    IidUniform { d: usize },
}

impl Scenario {
    pub fn copula4_default() -> Self {
        Scenario::Copula4 {
            corr: copula4_matrix(0.2, 0.9),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Scenario::Segment2 => 2,
            Scenario::Copula4 { .. } => 4,
            Scenario::Gauss3 { .. } => 3,
            Scenario::IidUniform { d } => *d,
        }
    }

    pub fn true_model(&self) -> BuiltinModel {
        match self {
            Scenario::Segment2 => BuiltinModel::Example2,
            Scenario::Copula4 { .. } => BuiltinModel::Example5,
            Scenario::Gauss3 { beta, .. } => BuiltinModel::Linear(beta.to_vec()),
            Scenario::IidUniform { d } => BuiltinModel::Linear(vec![1.0; *d]),
        }
    }

    /// Parses `name[:key=value]...`, e.g. `gauss3:rho=0.9:beta=1,1,0.5`,
    /// `copula4:rho13=0.2:rho23=0.9`, `iid_uniform:d=3`, `segment2`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split(':');
        let name = parts.next().unwrap_or_default().trim();
        let mut kv = Vec::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got `{p}`")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("not a number: `{v}`")))
        };
        let unknown = |k: &str| Error::InvalidArgument(format!("unknown parameter `{k}` for {name}"));
        match name {
            "segment2" => match kv.first() {
                Some((k, _)) => Err(unknown(k)),
                None => Ok(Scenario::Segment2),
            },
            "copula4" => {
                let (mut r13, mut r23) = (0.2, 0.9);
                for (k, v) in &kv {
                    match k.as_str() {
                        "rho13" => r13 = num(v)?,
                        "rho23" => r23 = num(v)?,
                        _ => return Err(unknown(k)),
                    }
                }
                Ok(Scenario::Copula4 {
                    corr: copula4_matrix(r13, r23),
                })
            }
            "gauss3" => {
                let mut rho = 0.0;
                let mut beta = [1.0, 1.0, 0.5];
                for (k, v) in &kv {
                    match k.as_str() {
                        "rho" => rho = num(v)?,
                        "beta" => {
                            let b: Vec<f64> = v.split(',').map(num).collect::<Result<_>>()?;
                            if b.len() != 3 {
                                return Err(Error::InvalidArgument("beta needs 3 values".into()));
                            }
                            beta = [b[0], b[1], b[2]];
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                Ok(Scenario::Gauss3 { rho, beta })
            }
            "iid_uniform" => {
                let mut d = 2;
                for (k, v) in &kv {
                    match k.as_str() {
                        "d" => {
                            d = v.parse().map_err(|_| {
                                Error::InvalidArgument(format!("d must be a positive integer, got `{v}`"))
                            })?
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                if d == 0 {
                    return Err(Error::InvalidArgument("d must be positive".into()));
                }
                Ok(Scenario::IidUniform { d })
            }
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

fn copula4_matrix(r13: f64, r23: f64) -> [[f64; 4]; 4] {
    [
        [1.0, 0.0, r13, 0.0],
        [0.0, 1.0, r23, 0.0],
        [r13, r23, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    /// Noise standard deviation; when set a response `y = f_true + eps` is added.
    pub sigma: Option<f64>,
}

impl ScenarioSpec {
    pub fn new(scenario: Scenario, n: usize, seed: u64) -> Self {
        ScenarioSpec {
            scenario,
            n,
            seed,
            sigma: None,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }
}

/// Lower Cholesky factor of a correlation matrix; errors unless symmetric
/// positive definite with unit diagonal.
fn correlation_factor(corr: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = corr.nrows();
    for i in 0..d {
        if (corr[(i, i)] - 1.0).abs() > 1e-12 {
            return Err(Error::NotPositiveDefinite);
        }
        for j in 0..i {
            if (corr[(i, j)] - corr[(j, i)]).abs() > 1e-12 || corr[(i, j)].abs() >= 1.0 {
                return Err(Error::NotPositiveDefinite);
            }
        }
    }
    corr.cholesky()
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NormalStream { rng, spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (a, b) = standard_normal_pair(&mut self.rng);
        self.spare = Some(b);
        a
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Draws the scenario's predictors (and response, when `sigma` is set).
///
/// Predictors come from RNG stream 0 and response noise from stream 1, so
/// adding a response does not change the predictors.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Dataset> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    if let Some(s) = spec.sigma {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument("sigma must be finite and nonnegative".into()));
        }
    }
    let d = spec.scenario.d();
    let mut cols = vec![Vec::with_capacity(n); d];
    let mut rs = NormalStream::new(spec.seed, 0);

    match &spec.scenario {
        Scenario::Segment2 => {
            for _ in 0..n {
                let t = rs.uniform();
                cols[0].push(t + 0.05 * rs.next());
                cols[1].push(t + 0.05 * rs.next());
            }
        }
        Scenario::Copula4 { corr } => {
            let m = DMatrix::from_fn(4, 4, |i, j| corr[i][j]);
            let l = correlation_factor(m)?;
            for _ in 0..n {
                let z = DVector::from_fn(4, |_, _| rs.next());
                let x = &l * z;
                for j in 0..4 {
                    cols[j].push(normal_cdf(x[j]));
                }
            }
        }
        Scenario::Gauss3 { rho, .. } => {
            let m = DMatrix::from_row_slice(2, 2, &[1.0, *rho, *rho, 1.0]);
            correlation_factor(m)?;
            let s = (1.0 - rho * rho).sqrt();
            for _ in 0..n {
                let (z1, z2, z3) = (rs.next(), rs.next(), rs.next());
                cols[0].push(z1);
                cols[1].push(rho * z1 + s * z2);
                cols[2].push(z3);
            }
        }
        Scenario::IidUniform { .. } => {
            for _ in 0..n {
                for c in cols.iter_mut() {
                    c.push(rs.uniform());
                }
            }
        }
    }

    let columns: Vec<Column> = cols
        .into_iter()
        .enumerate()
        .map(|(j, v)| Column::numeric(format!("x{}", j + 1), v))
        .collect();
    let mut data = Dataset::new(columns, None)?;
    if let Some(sigma) = spec.sigma {
        let f = spec.scenario.true_model();
        let mut noise = NormalStream::new(spec.seed, 1);
        let mut row = vec![0.0; d];
        let y = (0..n)
            .map(|i| {
                for (j, r) in row.iter_mut().enumerate() {
                    *r = data.value(i, j);
                }
                f.eval_row(&row) + sigma * noise.next()
            })
            .collect();
        data = data.with_response(y)?;
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let (ma, mb) = (mean(a), mean(b));
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn gauss3_independent_when_rho_zero() {
        let spec = ScenarioSpec::new(Scenario::Gauss3 { rho: 0.0, beta: [1.0, 1.0, 0.5] }, 10_000, 11);
        let d = generate_scenario(&spec).unwrap();
        let r = pearson(d.numeric(0).unwrap(), d.numeric(1).unwrap());
        assert!(r.abs() < 0.05, "{r}");
    }

    #[test]
    fn gauss3_correlation() {
        let spec = ScenarioSpec::new(Scenario::Gauss3 { rho: 0.9, beta: [1.0, 1.0, 0.5] }, 10_000, 3);
        let d = generate_scenario(&spec).unwrap();
        let r = pearson(d.numeric(0).unwrap(), d.numeric(1).unwrap());
        assert!((r - 0.9).abs() < 0.02, "{r}");
    }

    #[test]
    fn copula_marginals_and_dependence() {
        let spec = ScenarioSpec::new(Scenario::copula4_default(), 10_000, 5);
        let d = generate_scenario(&spec).unwrap();
        for j in 0..4 {
            let v = d.numeric(j).unwrap();
            assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!((mean(v) - 0.5).abs() < 0.02);
        }
        // Pearson correlation of copula-transformed normals: (6/pi) asin(rho/2)
        let target = 6.0 / std::f64::consts::PI * (0.9f64 / 2.0).asin();
        let r = pearson(d.numeric(1).unwrap(), d.numeric(2).unwrap());
        assert!((r - target).abs() < 0.02, "{r} vs {target}");
        let r12 = pearson(d.numeric(0).unwrap(), d.numeric(1).unwrap());
        assert!(r12.abs() < 0.03);
    }

    #[test]
    fn deterministic_and_response_does_not_move_predictors() {
        let spec = ScenarioSpec::new(Scenario::Segment2, 50, 9);
        let a = generate_scenario(&spec).unwrap();
        let b = generate_scenario(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate_scenario(&spec.clone().with_sigma(0.1)).unwrap();
        assert_eq!(a.numeric(0), c.numeric(0));
        assert_eq!(c.response().unwrap().len(), 50);
        let other = generate_scenario(&ScenarioSpec::new(Scenario::Segment2, 50, 10)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn non_pd_rejected() {
        let spec = ScenarioSpec::new(
            Scenario::Copula4 { corr: copula4_matrix(0.9, 0.9) },
            10,
            1,
        );
        // [[1,0,.9],[0,1,.9],[.9,.9,1]] has determinant 1 - 0.81 - 0.81 < 0
        assert!(matches!(generate_scenario(&spec), Err(Error::NotPositiveDefinite)));
        let spec = ScenarioSpec::new(Scenario::Gauss3 { rho: 1.0, beta: [1.0; 3] }, 10, 1);
        assert!(generate_scenario(&spec).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(Scenario::parse("segment2").unwrap(), Scenario::Segment2);
        assert_eq!(
            Scenario::parse("gauss3:rho=0.9:beta=1,0,0.5").unwrap(),
            Scenario::Gauss3 { rho: 0.9, beta: [1.0, 0.0, 0.5] }
        );
        assert_eq!(Scenario::parse("iid_uniform:d=3").unwrap(), Scenario::IidUniform { d: 3 });
        assert_eq!(Scenario::parse("copula4").unwrap(), Scenario::copula4_default());
        assert!(matches!(Scenario::parse("nope"), Err(Error::UnknownScenario(_))));
        assert!(Scenario::parse("gauss3:foo=1").is_err());
    }
}
