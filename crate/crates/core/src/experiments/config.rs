//! Experiment descriptions and their textual forms.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fpp::CostDistribution;
use crate::graph::{Edge, GraphModel, VertexId};

use super::ExperimentError;

/// Graph description, written `hypercube:n=12,oriented=false`,
/// `tree:degree=3,height=5` or `file:<path>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GraphSpec {
    Hypercube { n: u32, oriented: bool },
    Tree { degree: u32, height: u32 },
    File(PathBuf),
}

impl GraphSpec {
    pub fn build(&self) -> Result<GraphModel, ExperimentError> {
        Ok(match self {
            GraphSpec::Hypercube { n, oriented: false } => GraphModel::hypercube(*n)?,
            GraphSpec::Hypercube { n, oriented: true } => GraphModel::oriented_hypercube(*n)?,
            GraphSpec::Tree { degree, height } => GraphModel::regular_tree(*degree, *height)?,
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
                parse_edge_list(&text)?
            }
        })
    }
}

/// Edge list with one `u v d|u` line per arc (`d` directed, `u`
/// undirected). Blank lines and lines starting with `#` are skipped; the
/// vertex count is one more than the largest id.
pub fn parse_edge_list(text: &str) -> Result<GraphModel, ExperimentError> {
    let mut edges = Vec::new();
    let mut max_id = 0u32;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || ExperimentError::Parse(format!("edge list line {}: {line:?}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, kind] = fields[..] else { return Err(bad()) };
        let u: u32 = u.parse().map_err(|_| bad())?;
        let v: u32 = v.parse().map_err(|_| bad())?;
        let edge = match kind {
            "d" => Edge::directed(u, v),
            "u" => Edge::undirected(u, v),
            _ => return Err(bad()),
        };
        max_id = max_id.max(u).max(v);
        edges.push(edge);
    }
    if edges.is_empty() {
        return Err(ExperimentError::Parse("edge list is empty".into()));
    }
    Ok(GraphModel::explicit(max_id as usize + 1, edges)?)
}

fn key_values(body: &str) -> Result<Vec<(&str, &str)>, ExperimentError> {
    body.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ExperimentError::Parse(format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T, ExperimentError> {
    value.parse().map_err(|_| ExperimentError::Parse(format!("bad value {value:?} for {key}")))
}

impl FromStr for GraphSpec {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "hypercube" => {
                let (mut n, mut oriented) = (None, false);
                for (k, v) in key_values(body)? {
                    match k {
                        "n" => n = Some(parse_field(k, v)?),
                        "oriented" => oriented = parse_field(k, v)?,
                        _ => return Err(ExperimentError::Parse(format!("unknown key {k:?}"))),
                    }
                }
                let n = n.ok_or_else(|| ExperimentError::Parse("hypercube needs n".into()))?;
                Ok(GraphSpec::Hypercube { n, oriented })
            }
            "tree" => {
                let (mut degree, mut height) = (None, None);
                for (k, v) in key_values(body)? {
                    match k {
                        "degree" => degree = Some(parse_field(k, v)?),
                        "height" => height = Some(parse_field(k, v)?),
                        _ => return Err(ExperimentError::Parse(format!("unknown key {k:?}"))),
                    }
                }
                match (degree, height) {
                    (Some(degree), Some(height)) => Ok(GraphSpec::Tree { degree, height }),
                    _ => Err(ExperimentError::Parse("tree needs degree and height".into())),
                }
            }
            "file" if !body.is_empty() => Ok(GraphSpec::File(PathBuf::from(body))),
            _ => Err(ExperimentError::Parse(format!("unknown graph spec {s:?}"))),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Hypercube { n, oriented } => write!(f, "hypercube:n={n},oriented={oriented}"),
            GraphSpec::Tree { degree, height } => write!(f, "tree:degree={degree},height={height}"),
            GraphSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl TryFrom<String> for GraphSpec {
    type Error = ExperimentError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GraphSpec> for String {
    fn from(g: GraphSpec) -> String {
        g.to_string()
    }
}

/// Source fitness: a fixed anchor, or `U(0,1)` drawn per replication.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlphaSpec {
    Fixed(f64),
    Uniform,
}

impl AlphaSpec {
    pub(crate) fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            AlphaSpec::Fixed(a) => a,
            AlphaSpec::Uniform => rng.random::<f64>(),
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "uniform" {
            return Ok(AlphaSpec::Uniform);
        }
        let a: f64 = parse_field("alpha", s)?;
        if (0.0..=1.0).contains(&a) {
            Ok(AlphaSpec::Fixed(a))
        } else {
            Err(ExperimentError::Parse(format!("alpha {a} is outside [0, 1]")))
        }
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Fixed(a) => write!(f, "{a}"),
            AlphaSpec::Uniform => f.write_str("uniform"),
        }
    }
}

impl TryFrom<String> for AlphaSpec {
    type Error = ExperimentError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<AlphaSpec> for String {
    fn from(a: AlphaSpec) -> String {
        a.to_string()
    }
}

/// Target vertex: all-ones, uniform over non-source vertices (drawn per
/// replication), or a fixed id.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TargetSpec {
    AtOnes,
    Uniform,
    Vertex(u32),
}

impl TargetSpec {
    pub(crate) fn draw<R: Rng + ?Sized>(
        self,
        g: &GraphModel,
        rng: &mut R,
    ) -> Result<VertexId, ExperimentError> {
        let v = match self {
            TargetSpec::AtOnes => {
                VertexId::ones(g.dimension().ok_or(ExperimentError::OnesNeedsHypercube)?)
            }
            TargetSpec::Uniform => {
                if g.vertex_count() < 2 {
                    return Err(ExperimentError::Config("no non-source vertex to target".into()));
                }
                VertexId(rng.random_range(1..g.vertex_count() as u32))
            }
            TargetSpec::Vertex(id) => VertexId(id),
        };
        g.check_vertex(v)?;
        Ok(v)
    }

    /// The fixed target, if any.
    pub fn fixed(self, g: &GraphModel) -> Result<Option<VertexId>, ExperimentError> {
        let v = match self {
            TargetSpec::Uniform => return Ok(None),
            TargetSpec::AtOnes => {
                VertexId::ones(g.dimension().ok_or(ExperimentError::OnesNeedsHypercube)?)
            }
            TargetSpec::Vertex(id) => VertexId(id),
        };
        g.check_vertex(v)?;
        Ok(Some(v))
    }
}

impl FromStr for TargetSpec {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ones" => Ok(TargetSpec::AtOnes),
            "uniform" => Ok(TargetSpec::Uniform),
            _ => Ok(TargetSpec::Vertex(parse_field("target", s)?)),
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::AtOnes => f.write_str("ones"),
            TargetSpec::Uniform => f.write_str("uniform"),
            TargetSpec::Vertex(v) => write!(f, "{v}"),
        }
    }
}

impl TryFrom<String> for TargetSpec {
    type Error = ExperimentError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TargetSpec> for String {
    fn from(t: TargetSpec) -> String {
        t.to_string()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Probability that the target is accessible.
    Accessibility,
    /// CDF of the reduced site passage time to the target at each threshold.
    ReducedFppThreshold,
    /// Mean number of accessible paths to the target.
    PathCount,
    /// Mean minimal number of descents to the target.
    DescentCount,
    /// CTP estimates of S, B and P at the target.
    CtpStats,
    /// The curve `theta(x)` on an even grid of `points` values of `x`.
    ThetaCurve,
}

impl FromStr for Observable {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
            .map_err(|_| ExperimentError::Parse(format!("unknown observable {s:?}")))
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variants serialize");
        f.write_str(v.as_str().expect("unit variants serialize to strings"))
    }
}

/// How accessibility is decided per replication.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessPath {
    /// Threshold on site passage times.
    #[default]
    Fast,
    /// Build the coupled landscape and search it.
    Slow,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(ExperimentError::Parse(format!("unknown format {s:?}"))),
        }
    }
}

fn default_reps() -> u64 {
    1000
}

fn default_points() -> usize {
    200
}

fn default_budget() -> usize {
    crate::ctp::DEFAULT_BUDGET
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Accessibility]
}

fn default_distribution() -> CostDistribution {
    CostDistribution::Uniform01
}

/// One experiment. Deserializes from JSON with defaults for everything but
/// the graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(default = "uniform_alpha")]
    pub alpha: AlphaSpec,
    #[serde(default = "ones_target")]
    pub target: TargetSpec,
    /// Force the target fitness to 1.
    #[serde(default)]
    pub apriori_max: bool,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    #[serde(default = "default_distribution")]
    pub distribution: CostDistribution,
    #[serde(default)]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub access_path: AccessPath,
    /// CTP horizon; defaults to `theta_n` of the target weight.
    #[serde(default)]
    pub ctp_time: Option<f64>,
    #[serde(default = "default_budget")]
    pub ctp_budget: usize,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_reps")]
    pub reps: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
}

fn uniform_alpha() -> AlphaSpec {
    AlphaSpec::Uniform
}

fn ones_target() -> TargetSpec {
    TargetSpec::AtOnes
}

impl ExperimentConfig {
    pub fn new(graph: GraphSpec) -> Self {
        ExperimentConfig {
            graph,
            alpha: uniform_alpha(),
            target: ones_target(),
            apriori_max: false,
            observables: default_observables(),
            distribution: default_distribution(),
            thresholds: Vec::new(),
            access_path: AccessPath::Fast,
            ctp_time: None,
            ctp_budget: default_budget(),
            points: default_points(),
            reps: default_reps(),
            seed: 0,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.reps == 0 {
            return Err(ExperimentError::Config("reps must be positive".into()));
        }
        if self.observables.is_empty() {
            return Err(ExperimentError::Config("observable list is empty".into()));
        }
        if self.thresholds.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(ExperimentError::Config("thresholds must be sorted".into()));
        }
        if self.apriori_max && self.target == TargetSpec::Vertex(0) {
            return Err(ExperimentError::Config("the a priori maximum cannot be the source".into()));
        }
        Ok(())
    }
}
