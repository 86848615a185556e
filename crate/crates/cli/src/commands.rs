use std::path::PathBuf;

use percolab_core::coupling::{verify_apriori_equivalence, verify_equivalence, CouplingError};
use percolab_core::ctp::{estimate_sbp, expected_load, CtpError};
use percolab_core::experiments::output::SCHEMA_VERSION;
use percolab_core::experiments::{
    exact_accessibility_small, mc_accessibility, mc_reduced_fpp_cdf, run_sweep, AccessPath, CiMethod,
    ExperimentConfig, ExperimentError, GraphSpec, TargetSpec,
};
use percolab_core::fpp::{
    bond_passage_times, site_passage_times, CostDistribution, CostField, FppError,
};
use percolab_core::landscape::{accessible_set, FitnessLandscape, LandscapeError};
use percolab_core::numerics::{
    critical_x_star, easy_x_bound, endpoint_curve, theta_curve, theta_n, theta_of_x, theta_residual,
    NumericsError, ThetaConfig,
};
use percolab_core::rng::substream;
use percolab_core::{coupling::fitness_from_costs, Execution, VertexId};
use serde::Serialize;
use thiserror::Error;

use crate::output::Sink;
use crate::{
    AccessArgs, Cli, Command, Costs, CtpArgs, CurveArgs, CurveKind, ExactArgs, FppArgs, Kind, PathChoice,
    SweepArgs, ThetaArgs, VerifyArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Json(PathBuf, serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Experiment(e.into())
            }
        }
    )*};
}

from_core!(NumericsError, FppError, LandscapeError, CouplingError, CtpError);

pub enum Status {
    Ok,
    Mismatch(u64),
}

pub fn run(cli: &Cli, sink: &Sink) -> Result<Status, CliError> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let reps = |default: u64| cli.reps.unwrap_or(default);
    match &cli.command {
        Command::Theta(a) => theta(a, sink),
        Command::Xstar => xstar(sink),
        Command::Curve(a) => curve(a, sink),
        Command::Fpp(a) => fpp(a, cli.seed, reps(1000), exec, sink),
        Command::Access(a) => access(a, cli.seed, reps(1000), exec, sink),
        Command::VerifyCoupling(a) => verify(a, cli.seed, reps(200), sink),
        Command::Ctp(a) => ctp(a, cli.seed, reps(1000), exec, sink),
        Command::Sweep(a) => sweep(a, exec, sink),
        Command::Exact(a) => exact(a, sink),
    }
}

/// theta CSV, version 1: `schema_version, x, n, k, theta, residual`.
#[derive(Serialize)]
struct ThetaRow {
    schema_version: u32,
    x: f64,
    n: Option<u32>,
    k: Option<u32>,
    theta: f64,
    residual: f64,
}

fn theta(a: &ThetaArgs, sink: &Sink) -> Result<Status, CliError> {
    let cfg = ThetaConfig::default();
    let row = match (a.x, a.n, a.k) {
        (_, Some(n), Some(k)) => {
            let t = theta_n(n, k, &cfg)?;
            let residual = percolab_core::numerics::m_value(n, k, t) - 1.0 / f64::from(n);
            ThetaRow { schema_version: SCHEMA_VERSION, x: f64::from(k) / f64::from(n), n: Some(n), k: Some(k), theta: t, residual }
        }
        (Some(x), _, _) => {
            let t = theta_of_x(x, &cfg)?;
            ThetaRow { schema_version: SCHEMA_VERSION, x, n: None, k: None, theta: t, residual: theta_residual(x, t) }
        }
        _ => return Err(CliError::Usage("give --x, or --n and --k".into())),
    };
    sink.table("theta", &[row])?;
    Ok(Status::Ok)
}

/// xstar CSV, version 1: `schema_version, theta_star, x_star, easy_x_bound`.
#[derive(Serialize)]
struct XStarRow {
    schema_version: u32,
    theta_star: f64,
    x_star: f64,
    easy_x_bound: f64,
}

fn xstar(sink: &Sink) -> Result<Status, CliError> {
    let (theta_star, x_star) = critical_x_star(&ThetaConfig::default())?;
    sink.table(
        "xstar",
        &[XStarRow { schema_version: SCHEMA_VERSION, theta_star, x_star, easy_x_bound: easy_x_bound() }],
    )?;
    Ok(Status::Ok)
}

/// theta curve CSV, version 1: `schema_version, x, theta`.
#[derive(Serialize)]
struct ThetaCurveRow {
    schema_version: u32,
    x: f64,
    theta: f64,
}

/// endpoint curve CSV, version 1: `schema_version, theta, x, value, value_over_x`.
#[derive(Serialize)]
struct EndpointRow {
    schema_version: u32,
    theta: f64,
    x: f64,
    value: f64,
    value_over_x: f64,
}

fn curve(a: &CurveArgs, sink: &Sink) -> Result<Status, CliError> {
    match a.what {
        CurveKind::Theta => {
            let pts = theta_curve(a.from.unwrap_or(0.0), a.to.unwrap_or(1.0), a.points, &ThetaConfig::default())?;
            let rows: Vec<_> =
                pts.into_iter().map(|(x, theta)| ThetaCurveRow { schema_version: SCHEMA_VERSION, x, theta }).collect();
            sink.table("theta_curve", &rows)?;
        }
        CurveKind::Bastardized => {
            let pts = endpoint_curve(a.from.unwrap_or(0.01), a.to.unwrap_or(0.3), a.points)?;
            let rows: Vec<_> = pts
                .into_iter()
                .map(|p| EndpointRow {
                    schema_version: SCHEMA_VERSION,
                    theta: p.theta,
                    x: p.x,
                    value: p.value,
                    value_over_x: p.value_over_x,
                })
                .collect();
            sink.table("endpoint_curve", &rows)?;
        }
    }
    Ok(Status::Ok)
}

/// fpp CSV, version 1: `schema_version, vertex, weight, cost, time, reduced_time`.
/// Bond runs leave `cost` empty.
#[derive(Serialize)]
struct FppRow {
    schema_version: u32,
    vertex: u32,
    weight: u32,
    cost: Option<f64>,
    time: f64,
    reduced_time: Option<f64>,
}

/// fpp CDF CSV, version 1: `schema_version, graph, target, distribution,
/// threshold, value, half_width_95, reps, seed, ci_method`.
#[derive(Serialize)]
struct CdfRow {
    schema_version: u32,
    graph: String,
    target: String,
    distribution: CostDistribution,
    threshold: f64,
    value: f64,
    half_width_95: f64,
    reps: u64,
    seed: u64,
    ci_method: CiMethod,
}

fn distribution(c: Costs) -> CostDistribution {
    match c {
        Costs::Uniform => CostDistribution::Uniform01,
        Costs::Exp => CostDistribution::Exp1,
    }
}

fn fpp(a: &FppArgs, seed: u64, reps: u64, exec: Execution, sink: &Sink) -> Result<Status, CliError> {
    let dist = distribution(a.costs);
    if !a.thresholds.is_empty() {
        if a.kind == Kind::Bond {
            return Err(CliError::Usage("the CDF mode uses site costs".into()));
        }
        let mut cfg = ExperimentConfig::new(a.graph.clone());
        cfg.target = a.target;
        cfg.distribution = dist;
        cfg.reps = reps;
        cfg.seed = seed;
        let rows: Vec<CdfRow> = mc_reduced_fpp_cdf(&cfg, &a.thresholds, exec)?
            .iter()
            .map(|p| CdfRow {
                schema_version: SCHEMA_VERSION,
                graph: a.graph.to_string(),
                target: a.target.to_string(),
                distribution: dist,
                threshold: p.threshold,
                value: p.estimate.mean,
                half_width_95: p.estimate.half_width_95,
                reps: p.estimate.reps,
                seed: p.estimate.seed,
                ci_method: p.estimate.ci_method,
            })
            .collect();
        sink.table("reduced_fpp_cdf", &rows)?;
        return Ok(Status::Ok);
    }
    let g = a.graph.build()?;
    let mut rng = substream(seed, 0);
    let rows: Vec<FppRow> = match a.kind {
        Kind::Site => {
            let c = CostField::sample_site(&g, dist, &mut rng);
            let t = site_passage_times(&g, &c, g.source())?;
            if let Some(path) = &a.landscape_out {
                if dist != CostDistribution::Uniform01 {
                    return Err(CliError::Usage("--landscape-out needs uniform costs".into()));
                }
                let l = fitness_from_costs(&g, &c, a.alpha, None)?;
                std::fs::write(path, l.to_json()?).map_err(|e| CliError::Io(path.clone(), e))?;
            }
            g.vertices()
                .map(|v| FppRow {
                    schema_version: SCHEMA_VERSION,
                    vertex: v.0,
                    weight: v.weight(),
                    cost: Some(c.site_cost(v)),
                    time: t.get(v),
                    reduced_time: if v == g.source() { None } else { t.reduced(&g, v).ok() },
                })
                .collect()
        }
        Kind::Bond => {
            if a.landscape_out.is_some() {
                return Err(CliError::Usage("--landscape-out needs site costs".into()));
            }
            let w = CostField::sample_bond(&g, dist, &mut rng);
            let t = bond_passage_times(&g, &w, g.source())?;
            g.vertices()
                .map(|v| FppRow {
                    schema_version: SCHEMA_VERSION,
                    vertex: v.0,
                    weight: v.weight(),
                    cost: None,
                    time: t.get(v),
                    reduced_time: None,
                })
                .collect()
        }
    };
    sink.table("passage_times", &rows)?;
    Ok(Status::Ok)
}

/// access CSV, version 1: `schema_version, graph, alpha, target, apriori_max,
/// path, value, half_width_95, reps, seed, ci_method`.
#[derive(Serialize)]
struct AccessRow {
    schema_version: u32,
    graph: String,
    alpha: String,
    target: String,
    apriori_max: bool,
    path: AccessPath,
    value: f64,
    half_width_95: f64,
    reps: u64,
    seed: u64,
    ci_method: CiMethod,
}

/// landscape CSV, version 1: `schema_version, vertex, fitness, accessible`.
#[derive(Serialize)]
struct LandscapeRow {
    schema_version: u32,
    vertex: u32,
    fitness: f64,
    accessible: bool,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))
}

fn access(a: &AccessArgs, seed: u64, reps: u64, exec: Execution, sink: &Sink) -> Result<Status, CliError> {
    if let Some(path) = &a.landscape {
        let l = FitnessLandscape::from_json(&read(path)?)?;
        let set = accessible_set(&l);
        let rows: Vec<_> = l
            .graph()
            .vertices()
            .map(|v| LandscapeRow {
                schema_version: SCHEMA_VERSION,
                vertex: v.0,
                fitness: l.fitness(v),
                accessible: set.contains(v),
            })
            .collect();
        sink.table("accessible_set", &rows)?;
        return Ok(Status::Ok);
    }
    let mut cfg = ExperimentConfig::new(a.graph.clone());
    cfg.alpha = a.alpha;
    cfg.target = a.target;
    cfg.apriori_max = a.apriori_max;
    cfg.access_path = match a.path {
        PathChoice::Fast => AccessPath::Fast,
        PathChoice::Slow => AccessPath::Slow,
    };
    cfg.reps = reps;
    cfg.seed = seed;
    let e = mc_accessibility(&cfg, exec)?;
    let row = AccessRow {
        schema_version: SCHEMA_VERSION,
        graph: a.graph.to_string(),
        alpha: a.alpha.to_string(),
        target: a.target.to_string(),
        apriori_max: a.apriori_max,
        path: cfg.access_path,
        value: e.mean,
        half_width_95: e.half_width_95,
        reps: e.reps,
        seed: e.seed,
        ci_method: e.ci_method,
    };
    sink.table("accessibility", &[row])?;
    Ok(Status::Ok)
}

/// verify-coupling CSV, version 1: `schema_version, graph, check, alpha,
/// samples, mismatches, first_mismatch`.
#[derive(Serialize)]
struct VerifyRow {
    schema_version: u32,
    graph: String,
    check: &'static str,
    alpha: f64,
    samples: u64,
    mismatches: u64,
    first_mismatch: Option<u64>,
}

fn verify(a: &VerifyArgs, seed: u64, reps: u64, sink: &Sink) -> Result<Status, CliError> {
    let g = a.graph.build()?;
    let top = match a.apriori_target {
        Some(TargetSpec::Uniform) => return Err(CliError::Usage("--apriori-target needs a fixed vertex".into())),
        Some(t) => t.fixed(&g)?,
        None => None,
    };
    let mut rows = Vec::new();
    for &alpha in &a.alpha {
        let mut sets = VerifyRow {
            schema_version: SCHEMA_VERSION,
            graph: a.graph.to_string(),
            check: "accessible_set",
            alpha,
            samples: reps,
            mismatches: 0,
            first_mismatch: None,
        };
        let mut apriori = VerifyRow { check: "apriori_max", mismatches: 0, first_mismatch: None, graph: sets.graph.clone(), ..sets };
        for r in 0..reps {
            let mut rng = substream(seed, r);
            if !verify_equivalence(&g, alpha, &mut rng)?.equal {
                sets.mismatches += 1;
                sets.first_mismatch.get_or_insert(r);
            }
            if let Some(top) = top {
                if !verify_apriori_equivalence(&g, top, alpha, &mut rng)? {
                    apriori.mismatches += 1;
                    apriori.first_mismatch.get_or_insert(r);
                }
            }
        }
        rows.push(sets);
        if top.is_some() {
            rows.push(apriori);
        }
    }
    sink.table("verify_coupling", &rows)?;
    let total: u64 = rows.iter().map(|r| r.mismatches).sum();
    Ok(if total == 0 { Status::Ok } else { Status::Mismatch(total) })
}

/// ctp CSV, version 1: `schema_version, n, target, t, statistic, value,
/// half_width_95, reps, seed, truncated`.
#[derive(Serialize)]
struct CtpRow {
    schema_version: u32,
    n: u32,
    target: u32,
    t: f64,
    statistic: String,
    value: f64,
    half_width_95: Option<f64>,
    reps: u64,
    seed: u64,
    truncated: u64,
}

fn ctp(a: &CtpArgs, seed: u64, reps: u64, exec: Execution, sink: &Sink) -> Result<Status, CliError> {
    let spec = GraphSpec::Hypercube { n: a.n, oriented: false };
    let g = spec.build()?;
    let target = match a.target {
        TargetSpec::Uniform => return Err(CliError::Usage("the CTP target must be fixed".into())),
        t => t.fixed(&g)?.expect("fixed targets resolve"),
    };
    if target == VertexId::ZERO {
        return Err(CliError::Usage("the CTP target must differ from the source".into()));
    }
    let t = match a.tmax {
        Some(t) => t,
        None => theta_n(a.n, target.weight(), &ThetaConfig::default())?,
    };
    eprintln!("expected particles per run: {:.0}", expected_load(a.n, t));
    let e = estimate_sbp(a.n, target, t, reps, a.budget, seed, exec)?;
    let mut rows = Vec::new();
    for name in &a.stats {
        let (value, hw) = match name.as_str() {
            "S" => (e.s.mean, Some(e.s.half_width_95)),
            "B" => (e.b.mean, Some(e.b.half_width_95)),
            "P" => (e.p.mean, Some(e.p.half_width_95)),
            "alive" => (e.alive.mean, Some(e.alive.half_width_95)),
            "occupancy" => (e.occupancy.mean, Some(e.occupancy.half_width_95)),
            "bound" => (e.lower_bound, None),
            other => return Err(CliError::Usage(format!("unknown statistic {other:?}"))),
        };
        rows.push(CtpRow {
            schema_version: SCHEMA_VERSION,
            n: a.n,
            target: target.0,
            t,
            statistic: name.clone(),
            value,
            half_width_95: hw,
            reps,
            seed,
            truncated: e.truncated,
        });
    }
    sink.table("ctp", &rows)?;
    Ok(Status::Ok)
}

fn sweep(a: &SweepArgs, exec: Execution, sink: &Sink) -> Result<Status, CliError> {
    let text = read(&a.config)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Json(a.config.clone(), e))?;
    let configs: Vec<ExperimentConfig> = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|c| vec![c])
    }
    .map_err(|e| CliError::Json(a.config.clone(), e))?;
    let table = run_sweep(&configs, exec)?;
    if table.failures() > 0 {
        eprintln!("{} rows failed; see the error column", table.failures());
    }
    sink.table("sweep", &table.rows)?;
    Ok(Status::Ok)
}

/// exact CSV, version 1: `schema_version, graph, target, apriori_max,
/// numerator, denominator, value`.
#[derive(Serialize)]
struct ExactRow {
    schema_version: u32,
    graph: String,
    target: u32,
    apriori_max: bool,
    numerator: u64,
    denominator: u64,
    value: f64,
}

fn exact(a: &ExactArgs, sink: &Sink) -> Result<Status, CliError> {
    let g = a.graph.build()?;
    let target = a
        .target
        .fixed(&g)?
        .ok_or_else(|| CliError::Usage("the exact oracle needs a fixed target".into()))?;
    let p = exact_accessibility_small(&g, target, a.apriori_max)?;
    let row = ExactRow {
        schema_version: SCHEMA_VERSION,
        graph: a.graph.to_string(),
        target: target.0,
        apriori_max: a.apriori_max,
        numerator: *p.numer(),
        denominator: *p.denom(),
        value: *p.numer() as f64 / *p.denom() as f64,
    };
    sink.table("exact", &[row])?;
    Ok(Status::Ok)
}
