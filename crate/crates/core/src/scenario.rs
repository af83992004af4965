//! JSON scenario files: chart, metric, fields and the analyses to run.
//! The format is documented in `docs/scenario.md`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exprdsl::{Expr, Jet2};
use crate::geometry::{Chart, Extent, Manifold, MetricSpec, Signature, UnitNormal, VectorField, VectorFieldSpec};
use crate::integrate::{GridSpec, Region};
use crate::lorentz::{FluidParams, SliceSpec};

/// Points at which the declared signature is checked on load.
pub const SIGNATURE_PROBES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Green,
    Eq4,
    Volume,
    Flow,
    Soliton,
    Raychaudhuri,
    Eq7,
    Energy,
    Boundary,
    Diagnose,
}

impl Analysis {
    pub const ALL: [Analysis; 10] = [
        Analysis::Green,
        Analysis::Eq4,
        Analysis::Volume,
        Analysis::Flow,
        Analysis::Soliton,
        Analysis::Raychaudhuri,
        Analysis::Eq7,
        Analysis::Energy,
        Analysis::Boundary,
        Analysis::Diagnose,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Analysis::Green => "green",
            Analysis::Eq4 => "eq4",
            Analysis::Volume => "volume",
            Analysis::Flow => "flow",
            Analysis::Soliton => "soliton",
            Analysis::Raychaudhuri => "raychaudhuri",
            Analysis::Eq7 => "eq7",
            Analysis::Energy => "energy",
            Analysis::Boundary => "boundary",
            Analysis::Diagnose => "diagnose",
        }
    }
}

impl std::fmt::Display for Analysis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    signature: Signature,
    coordinates: Vec<RawCoordinate>,
    metric: RawMetric,
    #[serde(default)]
    vector_field: Option<Vec<String>>,
    #[serde(default)]
    soliton: Option<RawSoliton>,
    #[serde(default)]
    fluid: Option<RawFluid>,
    #[serde(default)]
    slice: Option<RawSlice>,
    #[serde(default)]
    region: Option<BTreeMap<String, [f64; 2]>>,
    #[serde(default)]
    grid: Option<RawGrid>,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    flow: Option<RawFlow>,
    #[serde(default)]
    analyses: Vec<Analysis>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoordinate {
    name: String,
    #[serde(default)]
    period: Option<f64>,
    #[serde(default)]
    bounds: Option<[f64; 2]>,
    #[serde(default)]
    sample: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMetric {
    Rows(Vec<Vec<String>>),
    Diagonal { diagonal: Vec<String> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSoliton {
    lambda: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFluid {
    mu: String,
    rho: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlice {
    coordinate: String,
    value: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawGrid {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlow {
    start: Vec<f64>,
    t_final: f64,
    steps: usize,
}

/// The vector field a scenario studies: explicit components, or the unit
/// normal of its time slices.
#[derive(Clone, Debug)]
pub enum FieldSource {
    Components(VectorFieldSpec),
    UnitNormal(UnitNormal),
}

impl VectorField for FieldSource {
    fn dim(&self) -> usize {
        match self {
            FieldSource::Components(f) => f.dim(),
            FieldSource::UnitNormal(f) => f.dim(),
        }
    }

    fn jets_at(&self, x: &[Jet2]) -> Result<Vec<Jet2>> {
        match self {
            FieldSource::Components(f) => f.jets_at(x),
            FieldSource::UnitNormal(f) => f.jets_at(x),
        }
    }

    fn values(&self, p: &[f64]) -> Result<Vec<f64>> {
        match self {
            FieldSource::Components(f) => f.values(p),
            FieldSource::UnitNormal(f) => f.values(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSettings {
    pub start: Vec<f64>,
    pub t_final: f64,
    pub steps: usize,
}

/// A fully validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub manifold: Manifold,
    pub field: Option<FieldSource>,
    pub lambda: Option<f64>,
    pub fluid: Option<FluidParams>,
    pub slice: Option<SliceSpec>,
    pub region: Option<Region>,
    pub grid: GridSpec,
    pub samples: usize,
    pub seed: u64,
    pub flow: Option<FlowSettings>,
    pub analyses: Vec<Analysis>,
    /// Per-axis box random sample points are drawn from.
    pub sample_box: Vec<(f64, f64)>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::Json(inner.to_string())
        } else {
            schema(if path == "." { "<root>".into() } else { path }, inner.to_string())
        }
    })?;
    build(raw)
}

fn parse_expr(chart: &Chart, src: &str, path: String) -> Result<Expr> {
    chart.parse(src).map_err(|source| Error::Expression { path, source })
}

fn build(raw: RawScenario) -> Result<Scenario> {
    if raw.name.trim().is_empty() {
        return Err(schema("name", "must not be empty"));
    }
    let n = raw.coordinates.len();
    if !(2..=crate::linalg::MAX_DIM).contains(&n) {
        return Err(schema("coordinates", format!("need 2 to {} coordinates, got {n}", crate::linalg::MAX_DIM)));
    }
    let mut names = Vec::with_capacity(n);
    let mut extents = Vec::with_capacity(n);
    let mut sample_box = Vec::with_capacity(n);
    for (i, c) in raw.coordinates.iter().enumerate() {
        let at = |key: &str| format!("coordinates[{i}].{key}");
        let extent = match (c.period, c.bounds) {
            (Some(_), Some(_)) => return Err(schema(at("period"), "a coordinate is periodic or bounded, not both")),
            (Some(p), None) => {
                if !(p.is_finite() && p > 0.0) {
                    return Err(schema(at("period"), "must be positive"));
                }
                Extent::Periodic(p)
            }
            (None, Some([lo, hi])) => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(schema(at("bounds"), "must satisfy lo < hi"));
                }
                Extent::Bounded(lo, hi)
            }
            (None, None) => Extent::Unbounded,
        };
        let default_box = match extent {
            Extent::Periodic(p) => (0.0, p),
            Extent::Bounded(lo, hi) => {
                let margin = 0.05 * (hi - lo);
                (lo + margin, hi - margin)
            }
            Extent::Unbounded => (-1.0, 1.0),
        };
        let sbox = match c.sample {
            Some([lo, hi]) => {
                let inside = match extent {
                    Extent::Bounded(blo, bhi) => lo >= blo && hi <= bhi,
                    _ => true,
                };
                if !(lo.is_finite() && hi.is_finite() && lo <= hi && inside) {
                    return Err(schema(at("sample"), "must satisfy lo <= hi inside the coordinate bounds"));
                }
                (lo, hi)
            }
            None => default_box,
        };
        names.push(c.name.as_str());
        extents.push(extent);
        sample_box.push(sbox);
    }
    let chart = Chart::new(&names, raw.signature, extents).map_err(|e| match e {
        Error::InvalidChart(m) => schema("coordinates", m),
        other => other,
    })?;

    let metric = match &raw.metric {
        RawMetric::Diagonal { diagonal } => {
            if diagonal.len() != n {
                return Err(schema("metric.diagonal", format!("expected {n} entries, got {}", diagonal.len())));
            }
            let mut lower = Vec::with_capacity(n * (n + 1) / 2);
            for (i, d) in diagonal.iter().enumerate() {
                for _ in 0..i {
                    lower.push(chart.zero_expr());
                }
                lower.push(parse_expr(&chart, d, format!("metric.diagonal[{i}]"))?);
            }
            MetricSpec::from_exprs(n, lower)?
        }
        RawMetric::Rows(rows) => {
            if rows.len() != n {
                return Err(schema("metric", format!("expected {n} rows, got {}", rows.len())));
            }
            let full = rows.iter().all(|r| r.len() == n);
            let mut lower = Vec::with_capacity(n * (n + 1) / 2);
            for (i, row) in rows.iter().enumerate() {
                if !full && row.len() != i + 1 {
                    return Err(schema(
                        format!("metric[{i}]"),
                        format!("expected {} entries (lower triangle) or {n} (full matrix), got {}", i + 1, row.len()),
                    ));
                }
                for (j, src) in row.iter().enumerate().take(i + 1) {
                    lower.push(parse_expr(&chart, src, format!("metric[{i}][{j}]"))?);
                }
            }
            if full {
                for i in 0..n {
                    for j in i + 1..n {
                        let upper = parse_expr(&chart, &rows[i][j], format!("metric[{i}][{j}]"))?;
                        let mirror = &lower[j * (j + 1) / 2 + i];
                        if upper.to_string() != mirror.to_string() {
                            return Err(schema(format!("metric[{i}][{j}]"), format!("differs from metric[{j}][{i}]")));
                        }
                    }
                }
            }
            MetricSpec::from_exprs(n, lower)?
        }
    };
    let manifold = Manifold::new(chart.clone(), metric)?;

    let slice = match &raw.slice {
        None => None,
        Some(s) => {
            let axis = chart
                .axis(&s.coordinate)
                .ok_or_else(|| schema("slice.coordinate", format!("unknown coordinate `{}`", s.coordinate)))?;
            if let Extent::Bounded(lo, hi) = chart.extent(axis) {
                if !(lo..=hi).contains(&s.value) {
                    return Err(schema("slice.value", "outside the coordinate bounds"));
                }
            }
            Some(SliceSpec::new(manifold.clone(), axis, s.value)?)
        }
    };

    let field = match (&raw.vector_field, &slice) {
        (Some(components), _) => {
            if components.len() != n {
                return Err(schema("vector_field", format!("expected {n} components, got {}", components.len())));
            }
            let exprs = components
                .iter()
                .enumerate()
                .map(|(i, s)| parse_expr(&chart, s, format!("vector_field[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Some(FieldSource::Components(VectorFieldSpec::new(exprs)))
        }
        (None, Some(s)) => Some(FieldSource::UnitNormal(s.normal().clone())),
        (None, None) => None,
    };

    let lambda = raw.soliton.as_ref().map(|s| s.lambda);
    if lambda.is_some_and(|l| !l.is_finite()) {
        return Err(schema("soliton.lambda", "must be finite"));
    }
    let fluid = match &raw.fluid {
        None => None,
        Some(f) => Some(FluidParams {
            mu: parse_expr(&chart, &f.mu, "fluid.mu".into())?,
            rho: parse_expr(&chart, &f.rho, "fluid.rho".into())?,
        }),
    };

    let region = match &raw.region {
        None => None,
        Some(map) => {
            let mut bounds = vec![None; n];
            for (key, [lo, hi]) in map {
                let axis = chart.axis(key).ok_or_else(|| schema(format!("region.{key}"), "unknown coordinate"))?;
                bounds[axis] = Some((*lo, *hi));
            }
            Some(Region::new(&chart, bounds).map_err(|e| match e {
                Error::InvalidRegion(m) => schema("region", m),
                Error::NonCompactDomain { axis } => {
                    schema("region", format!("unbounded coordinate `{axis}` needs bounds"))
                }
                other => other,
            })?)
        }
    };

    let grid = match raw.grid {
        None => GridSpec::uniform(n, 16)?,
        Some(RawGrid::Uniform(c)) => GridSpec::uniform(n, c)?,
        Some(RawGrid::PerAxis(c)) => {
            if c.len() != n {
                return Err(schema("grid", format!("expected {n} counts, got {}", c.len())));
            }
            GridSpec::new(c)?
        }
    };

    let samples = raw.samples.unwrap_or(20);
    if samples == 0 {
        return Err(schema("samples", "must be at least 1"));
    }

    let flow = match raw.flow {
        None => None,
        Some(f) => {
            if f.start.len() != n {
                return Err(schema("flow.start", format!("expected {n} coordinates, got {}", f.start.len())));
            }
            if f.steps == 0 || !(f.t_final.is_finite() && f.t_final > 0.0) {
                return Err(schema("flow", "need steps >= 1 and a positive t_final"));
            }
            Some(FlowSettings { start: f.start, t_final: f.t_final, steps: f.steps })
        }
    };

    let mut analyses = raw.analyses;
    let mut seen = std::collections::BTreeSet::new();
    analyses.retain(|a| seen.insert(*a));

    let scenario = Scenario {
        name: raw.name,
        manifold,
        field,
        lambda,
        fluid,
        slice,
        region,
        grid,
        samples,
        seed: raw.seed.unwrap_or(0),
        flow,
        analyses,
        sample_box,
    };
    for p in scenario.random_points(SIGNATURE_PROBES, 0x5EED) {
        scenario.manifold.metric_at(&p)?;
    }
    Ok(scenario)
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn chart(&self) -> &Chart {
        self.manifold.chart()
    }

    /// `count` points drawn uniformly from the sample box; `stream` separates
    /// independent uses of the same seed.
    pub fn random_points(&self, count: usize, stream: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        (0..count)
            .map(|_| {
                self.sample_box.iter().map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo }).collect()
            })
            .collect()
    }

    /// The scenario's sample points for pointwise checks.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        self.random_points(self.samples, 1)
    }

    pub fn field(&self, analysis: Analysis) -> Result<&FieldSource> {
        self.field.as_ref().ok_or_else(|| Error::NotApplicable {
            analysis: analysis.to_string(),
            reason: "the scenario has no vector field and no slice".into(),
        })
    }

    pub fn slice(&self, analysis: Analysis) -> Result<&SliceSpec> {
        self.slice.as_ref().ok_or_else(|| Error::NotApplicable {
            analysis: analysis.to_string(),
            reason: "the scenario declares no slice".into(),
        })
    }

    pub fn region(&self, analysis: Analysis) -> Result<&Region> {
        self.region.as_ref().ok_or_else(|| Error::NotApplicable {
            analysis: analysis.to_string(),
            reason: "the scenario declares no region".into(),
        })
    }
}
