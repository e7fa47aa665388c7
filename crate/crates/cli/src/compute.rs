use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::Args;
use rayon::prelude::*;

use palevim_core::ale::{
    ale_second_surface, ale_second_vim, default_k, default_k_pair, local_effects, r2_ale2,
    AleCurve, AleSurface, Convention,
};
use palevim_core::baselines::{
    marginal_permutation_vim_from_base, marginal_shapley_values, BaselineConfig,
};
use palevim_core::models::{
    generate_scenario, load_dataset_with, make_builtin, spawn_subprocess_model, Scenario,
    ScenarioSpec, Schema,
};
use palevim_core::pale::{
    categorical_local_effects, default_categorical_l, default_l, path_vims,
    reorder_categorical_levels, PathVims,
};
use palevim_core::{build_partition, Dataset, Error, ModelHandle};

use crate::export::{write_plot_files, PlotData};
use crate::report::{
    Evaluations, Meta, Method, MethodValue, PredictorReport, Statistic, VimReport,
};
use crate::{CliResult, Failure};

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Headed CSV with one column per predictor.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    pub data: Option<PathBuf>,
    /// Synthetic scenario to draw the data from.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Rows to draw with --scenario.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noise standard deviation of the scenario response.
    #[arg(long, requires = "scenario")]
    pub sigma: Option<f64>,
    /// `builtin:<name>[:p1,p2,...]` or `cmd:<shell command>`.
    #[arg(long)]
    pub model: String,
    /// Comma-separated methods: ale_main, ale_second, qpale, cpale, mp, shm.
    #[arg(long, default_value = "ale_main,qpale,cpale")]
    pub vims: String,
    /// Response column of --data (the scenario response is `y`).
    #[arg(long)]
    pub response: Option<String>,
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "K-pair")]
    pub k_pair: Option<usize>,
    /// Represent each interval by its midpoint instead of its right endpoint.
    #[arg(long)]
    pub midpoint: bool,
    /// Columns of --data to treat as categorical.
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Report file (standard output if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for plot data files.
    #[arg(long)]
    pub plots: Option<PathBuf>,
    /// Permutations per predictor for mp.
    #[arg(long, default_value_t = 50)]
    pub replicates: usize,
    /// Samples per observation for shm.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Use only the first R rows for shm.
    #[arg(long)]
    pub shm_rows: Option<usize>,
}

struct Setup {
    data: Dataset,
    model: ModelHandle,
    methods: Vec<Method>,
    conv: Convention,
    k: usize,
    l: usize,
    k_pair: usize,
}

fn load(args: &ComputeArgs) -> CliResult<Dataset> {
    match (&args.data, &args.scenario) {
        (Some(path), _) => {
            if args.n.is_some() {
                return Err(Failure::usage("--n only applies to --scenario"));
            }
            let cats: Vec<&str> = args.categorical.iter().map(String::as_str).collect();
            Ok(load_dataset_with(path, args.response.as_deref(), &cats)?)
        }
        (None, Some(text)) => {
            let n = args
                .n
                .ok_or_else(|| Failure::usage("--scenario needs --n"))?;
            if !args.categorical.is_empty() {
                return Err(Failure::usage("--categorical only applies to --data"));
            }
            if let Some(r) = &args.response {
                if r != "y" || args.sigma.is_none() {
                    return Err(Failure::usage(
                        "a scenario response is named `y` and needs --sigma",
                    ));
                }
            }
            let mut spec = ScenarioSpec::new(Scenario::parse(text)?, n, args.seed);
            if let Some(s) = args.sigma {
                spec = spec.with_sigma(s);
            }
            Ok(generate_scenario(&spec)?)
        }
        (None, None) => Err(Failure::usage("one of --data or --scenario is required")),
    }
}

fn build_model(spec: &str, data: &Dataset) -> CliResult<ModelHandle> {
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let (name, params) = match rest.split_once(':') {
            Some((name, list)) => {
                let params = list
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| Failure::usage(format!("bad model parameter `{p}`")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                (name, params)
            }
            None => (rest, Vec::new()),
        };
        let model = make_builtin(name, &params)?;
        model.check_dataset(data)?;
        Ok(model)
    } else if let Some(cmd) = spec.strip_prefix("cmd:") {
        if cmd.trim().is_empty() {
            return Err(Failure::usage("empty model command"));
        }
        Ok(spawn_subprocess_model(cmd, Schema::of_dataset(data))?)
    } else {
        Err(Failure::usage(format!(
            "model must be builtin:<name>[:params] or cmd:<command>, got `{spec}`"
        )))
    }
}

fn parse_methods(list: &str) -> CliResult<Vec<Method>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m = Method::parse(name).ok_or_else(|| {
            Failure::usage(format!(
                "unknown method `{name}` (expected ale_main, ale_second, qpale, cpale, mp or shm)"
            ))
        })?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out.sort_by_key(|m| Method::ALL.iter().position(|a| a == m));
    Ok(out)
}

fn positive(v: Option<usize>, flag: &str) -> CliResult<Option<usize>> {
    match v {
        Some(0) => Err(Failure::usage(format!("{flag} must be at least 1"))),
        v => Ok(v),
    }
}

fn setup(args: &ComputeArgs) -> CliResult<Setup> {
    let methods = parse_methods(&args.vims)?;
    positive(args.k, "--K")?;
    positive(args.l, "--L")?;
    positive(args.k_pair, "--K-pair")?;
    positive(args.shm_rows, "--shm-rows")?;
    if args.replicates == 0 || args.samples == 0 {
        return Err(Failure::usage("--replicates and --samples must be at least 1"));
    }
    if methods.contains(&Method::Mp) && args.response.is_none() && args.sigma.is_none() {
        return Err(Failure::usage(
            "mp needs a response: pass --response <column> (or --sigma with --scenario)",
        ));
    }
    let data = load(args)?;
    let model = build_model(&args.model, &data)?;
    let n = data.n();
    let k = args.k.unwrap_or_else(|| default_k(n)).min(n);
    Ok(Setup {
        k,
        l: args.l.unwrap_or_else(|| default_l(n, k)),
        k_pair: args.k_pair.unwrap_or_else(|| default_k_pair(k)).min(n),
        conv: if args.midpoint {
            Convention::Midpoint
        } else {
            Convention::RightEndpoint
        },
        methods,
        data,
        model,
    })
}

/// Keeps protocol failures fatal; anything else becomes a reported reason.
fn soften<T>(r: palevim_core::Result<T>) -> CliResult<Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.is_model_protocol() => Err(e.into()),
        Err(Error::DegenerateColumn) => Ok(Err("constant column".into())),
        Err(e) => Ok(Err(e.to_string())),
    }
}

struct AleFamily {
    k: usize,
    l: usize,
    vims: PathVims,
}

fn ale_family(s: &Setup, j: usize) -> palevim_core::Result<AleFamily> {
    let d = &s.data;
    let e = if d.column(j).data.is_categorical() {
        let order = reorder_categorical_levels(d, j)?;
        categorical_local_effects(&s.model, d, j, &order)?
    } else {
        let x = d.numeric(j).expect("numeric column");
        let p = build_partition(x, s.k)?;
        local_effects(&s.model, d, &p, j)?
    };
    let l = if d.column(j).data.is_categorical() {
        default_categorical_l(&e)
    } else {
        s.l
    };
    let vims = path_vims(&e, d, l, s.conv)?;
    Ok(AleFamily { k: e.k(), l, vims })
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PALEVIM_THREADS") {
        let t: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Failure::usage(format!("PALEVIM_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(t);
    }
    builder
        .build()
        .map_err(|e| Failure::from(anyhow::anyhow!("thread pool: {e}")))
}

pub fn run(args: ComputeArgs) -> CliResult<()> {
    let start = Instant::now();
    let s = setup(&args)?;
    let pool = thread_pool()?;
    let (report, plots) = pool.install(|| compute(&s, &args))?;
    let mut report = report;
    report.meta.wall_time_seconds = start.elapsed().as_secs_f64();

    let mut text = serde_json::to_string_pretty(&report).context("serializing report")?;
    text.push('\n');
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(dir) = &args.plots {
        write_plot_files(dir, &plots)?;
    }
    Ok(())
}

fn compute(s: &Setup, args: &ComputeArgs) -> CliResult<(VimReport, PlotData)> {
    let d = &s.data;
    let dd = d.d();
    let names: Vec<String> = d.names().iter().map(|n| n.to_string()).collect();
    let wants = |m: Method| s.methods.contains(&m);
    let mut predictors: Vec<PredictorReport> = names.iter().map(|n| PredictorReport::new(n)).collect();
    let mut evaluations = Evaluations::default();
    let mut plots = PlotData::default();
    let mut r2 = None;

    let need_family = [Method::AleMain, Method::AleSecond, Method::Qpale, Method::Cpale]
        .into_iter()
        .any(wants);
    if need_family {
        let before = s.model.evaluations();
        let family: Vec<_> = (0..dd)
            .into_par_iter()
            .map(|j| soften(ale_family(s, j)))
            .collect::<CliResult<_>>()?;
        evaluations.local_effects = s.model.evaluations() - before;

        let mut curves: Vec<AleCurve> = Vec::new();
        for (j, f) in family.into_iter().enumerate() {
            let p = &mut predictors[j];
            match f {
                Ok(f) => {
                    p.k = Some(f.k);
                    p.l = Some(f.l);
                    if wants(Method::AleMain) {
                        p.ale_main = Some(MethodValue::of(f.vims.ale_main));
                    }
                    if wants(Method::Qpale) {
                        p.qpale = Some(MethodValue::of(f.vims.qpale.vim));
                    }
                    if wants(Method::Cpale) {
                        p.cpale = Some(MethodValue::of(f.vims.cpale.vim));
                    }
                    curves.push(f.vims.curve.clone());
                    let paths = if wants(Method::Cpale) || !wants(Method::Qpale) {
                        f.vims.cpale.paths.clone()
                    } else {
                        f.vims.qpale.paths.clone()
                    };
                    let axis = f.vims.curve.axis.clone();
                    plots.curves.push((names[j].clone(), f.vims.curve));
                    plots.paths.push((names[j].clone(), paths, axis));
                }
                Err(reason) => {
                    for m in [Method::AleMain, Method::Qpale, Method::Cpale] {
                        if wants(m) {
                            *p.slot(m) = Some(MethodValue::missing(reason.clone()));
                        }
                    }
                }
            }
        }

        if wants(Method::AleSecond) {
            let before = s.model.evaluations();
            r2 = Some(second_order(s, &curves, &mut predictors, &mut plots)?);
            evaluations.ale_second = s.model.evaluations() - before;
        }
        if !wants(Method::AleMain) && !wants(Method::Qpale) && !wants(Method::Cpale) {
            plots.curves.clear();
            plots.paths.clear();
        } else if !wants(Method::Qpale) && !wants(Method::Cpale) {
            plots.paths.clear();
        }
    }

    let cfg = BaselineConfig::new(args.replicates, args.samples, args.seed)?;
    if wants(Method::Mp) {
        let before = s.model.evaluations();
        if d.response().is_none() {
            return Err(Failure::usage(
                "mp needs a response: pass --response <column> (or --sigma with --scenario)",
            ));
        }
        let base = s.model.predict_dataset(d)?;
        let vims: Vec<f64> = (0..dd)
            .into_par_iter()
            .map(|j| marginal_permutation_vim_from_base(&s.model, d, j, &cfg, &base))
            .collect::<palevim_core::Result<_>>()?;
        for (p, v) in predictors.iter_mut().zip(vims) {
            p.mp = Some(MethodValue::of(v));
        }
        evaluations.mp = s.model.evaluations() - before;
    }
    if wants(Method::Shm) {
        let before = s.model.evaluations();
        let rows = args.shm_rows.unwrap_or(d.n()).min(d.n());
        let sub = if rows < d.n() {
            d.select_rows(&(0..rows).collect::<Vec<_>>())?
        } else {
            d.clone()
        };
        let vims: Vec<f64> = (0..dd)
            .into_par_iter()
            .map(|j| {
                let phi = marginal_shapley_values(&s.model, &sub, j, &cfg)?;
                Ok(phi.iter().map(|p| p * p).sum::<f64>() / phi.len() as f64)
            })
            .collect::<palevim_core::Result<_>>()?;
        for (p, v) in predictors.iter_mut().zip(vims) {
            p.shm = Some(MethodValue::of(v));
        }
        evaluations.shm = s.model.evaluations() - before;
    }

    let report = VimReport {
        meta: Meta {
            n: d.n(),
            d: dd,
            k: s.k,
            l: s.l,
            k_pair: s.k_pair,
            seed: args.seed,
            model: args.model.clone(),
            convention: match s.conv {
                Convention::RightEndpoint => "right_endpoint".into(),
                Convention::Midpoint => "midpoint".into(),
            },
            methods: s.methods.iter().map(|m| m.name().to_string()).collect(),
            evaluations,
            wall_time_seconds: 0.0,
        },
        predictors,
        r2_ale2: r2,
    };
    Ok((report, plots))
}

fn second_order(
    s: &Setup,
    curves: &[AleCurve],
    predictors: &mut [PredictorReport],
    plots: &mut PlotData,
) -> CliResult<Statistic> {
    let d = &s.data;
    let dd = d.d();
    let unavailable = |predictors: &mut [PredictorReport], reason: &str| {
        for p in predictors.iter_mut() {
            p.ale_second = Some(MethodValue::missing(reason));
        }
        Statistic {
            value: None,
            reason: Some(reason.to_string()),
        }
    };
    if d.columns().iter().any(|c| c.data.is_categorical()) {
        return Ok(unavailable(
            predictors,
            "second-order surfaces need numeric predictors",
        ));
    }
    if curves.len() < dd {
        return Ok(unavailable(predictors, "a main-effect curve is unavailable"));
    }
    let pairs: Vec<(usize, usize)> = (0..dd)
        .flat_map(|a| (a + 1..dd).map(move |b| (a, b)))
        .collect();
    let surfaces = pairs
        .par_iter()
        .map(|&(a, b)| soften(ale_second_surface(&s.model, d, a, b, s.k_pair, s.conv)))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .collect::<Result<Vec<AleSurface>, String>>();
    let surfaces = match surfaces {
        Ok(v) => v,
        Err(reason) => return Ok(unavailable(predictors, &reason)),
    };
    for (j, p) in predictors.iter_mut().enumerate() {
        p.ale_second = Some(match soften(ale_second_vim(j, curves, &surfaces, d))? {
            Ok(v) => MethodValue::of(v),
            Err(reason) => MethodValue::missing(reason),
        });
    }
    let names = d.names();
    for surface in &surfaces {
        let (a, b) = surface.pair;
        plots
            .surfaces
            .push((names[a].to_string(), names[b].to_string(), surface.clone()));
    }
    Ok(match soften(r2_ale2(&s.model, d, curves, &surfaces))? {
        Ok(v) => Statistic {
            value: Some(v),
            reason: None,
        },
        Err(reason) => Statistic {
            value: None,
            reason: Some(reason),
        },
    })
}
