//! Dispatch from analysis ids to the numerical checks, with default
//! tolerances and report assembly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{self, PullbackQuantity};
use crate::geometry::{LogRateField, Signature};
use crate::integrate::{self, GridSpec};
use crate::lorentz::{self, DiagnosticInputs, SliceSamples};
use crate::report::{AnalysisRecord, Entry, Report, Sample};
use crate::scenario::{Analysis, FieldSource, Scenario};
use crate::soliton::{self, SolitonSpec};
use crate::verdict::{Hypothesis, StatementReport, Verdict, HYPOTHESIS_TOL};

/// Step of the pullback oracle.
pub const PULLBACK_STEP: f64 = 1e-3;
/// Stretch factor for the truncated L¹ study.
pub const L1_STRETCH: f64 = 4.0 / 3.0;
/// Threshold on `max |div ξ|` for an incompressible conclusion.
pub const INCOMPRESSIBLE_TOL: f64 = 1e-8;

/// Default tolerance of an analysis' primary checks.
pub fn default_tolerance(analysis: Analysis) -> f64 {
    match analysis {
        Analysis::Volume => 1e-12,
        Analysis::Green | Analysis::Eq4 => 1e-10,
        Analysis::Flow => 1e-4,
        Analysis::Soliton | Analysis::Raychaudhuri | Analysis::Eq7 | Analysis::Boundary => 1e-6,
        Analysis::Energy => 1e-7,
        Analysis::Diagnose => 0.0,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Uniform node count overriding the scenario grid.
    pub grid: Option<usize>,
    /// Overrides the primary tolerance of every analysis run.
    pub tol: Option<f64>,
}

struct Record {
    analysis: Analysis,
    entries: Vec<Entry>,
    details: serde_json::Map<String, serde_json::Value>,
    samples: Vec<Sample>,
}

impl Record {
    fn new(analysis: Analysis) -> Record {
        Record { analysis, entries: Vec::new(), details: serde_json::Map::new(), samples: Vec::new() }
    }

    /// `|value| <= tolerance`
    fn check_abs(&mut self, name: &str, value: f64, tolerance: f64) {
        let passed = value.abs() <= tolerance;
        self.entries.push(Entry { name: name.into(), value, tolerance: Some(tolerance), passed: Some(passed) });
    }

    /// `value >= -tolerance`
    fn check_nonnegative(&mut self, name: &str, value: f64, tolerance: f64) {
        let passed = value >= -tolerance;
        self.entries.push(Entry { name: name.into(), value, tolerance: Some(tolerance), passed: Some(passed) });
    }

    fn telemetry(&mut self, name: &str, value: f64) {
        self.entries.push(Entry { name: name.into(), value, tolerance: None, passed: None });
    }

    fn sample(&mut self, point: &[f64], quantity: &str, value: f64) {
        self.samples.push(Sample { point: point.to_vec(), quantity: quantity.into(), value });
    }

    fn detail(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| Error::Json(e.to_string()))?;
        self.details.insert(key.into(), v);
        Ok(())
    }

    fn finish(self) -> AnalysisRecord {
        AnalysisRecord {
            analysis: self.analysis.to_string(),
            passed: self.entries.iter().all(|e| e.passed != Some(false)),
            entries: self.entries,
            details: serde_json::Value::Object(self.details),
            samples: self.samples,
        }
    }
}

fn effective_grid(s: &Scenario, opts: &RunOptions) -> Result<GridSpec> {
    match opts.grid {
        Some(n) => GridSpec::uniform(s.dim(), n),
        None => Ok(s.grid.clone()),
    }
}

fn not_applicable(analysis: Analysis, reason: &str) -> Error {
    Error::NotApplicable { analysis: analysis.to_string(), reason: reason.into() }
}

/// Run the listed analyses (the scenario's own list when empty).
pub fn run(s: &Scenario, analyses: &[Analysis], opts: &RunOptions) -> Result<Report> {
    let list = if analyses.is_empty() { &s.analyses[..] } else { analyses };
    if list.is_empty() {
        return Err(Error::Schema { path: "analyses".into(), message: "no analyses requested".into() });
    }
    let grid = effective_grid(s, opts)?;
    let records = list.iter().map(|a| run_analysis(s, *a, opts)).collect::<Result<Vec<_>>>()?;
    Ok(Report {
        tool: "volex".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: s.name.clone(),
        coordinates: s.chart().names().to_vec(),
        grid: grid.counts().to_vec(),
        samples: s.samples,
        seed: s.seed,
        passed: records.iter().all(|r| r.passed),
        analyses: records,
    })
}

pub fn run_analysis(s: &Scenario, analysis: Analysis, opts: &RunOptions) -> Result<AnalysisRecord> {
    let tol = opts.tol.unwrap_or_else(|| default_tolerance(analysis));
    let grid = effective_grid(s, opts)?;
    let mut r = Record::new(analysis);
    match analysis {
        Analysis::Volume => volume(s, tol, &grid, &mut r)?,
        Analysis::Flow => flow_check(s, tol, &mut r)?,
        Analysis::Green => green(s, tol, &grid, &mut r)?,
        Analysis::Eq4 => eq4(s, tol, &grid, &mut r)?,
        Analysis::Soliton => soliton_check(s, tol, &mut r)?,
        Analysis::Raychaudhuri => raychaudhuri(s, tol, &mut r)?,
        Analysis::Eq7 => eq7(s, tol, &grid, &mut r)?,
        Analysis::Energy => energy(s, tol, &grid, &mut r)?,
        Analysis::Boundary => boundary(s, tol, &grid, &mut r)?,
        Analysis::Diagnose => diagnose(s, &grid, &mut r)?,
    }
    r.detail("tolerance", tol)?;
    Ok(r.finish())
}

fn volume(s: &Scenario, tol: f64, grid: &GridSpec, r: &mut Record) -> Result<()> {
    let m = &s.manifold;
    if m.chart().is_compact() {
        r.telemetry("total_volume", integrate::total_volume(m, grid)?);
    }
    if let Some(field) = &s.field {
        let mut gap: f64 = 0.0;
        for p in s.sample_points() {
            let a = m.divergence(field, &p)?;
            let b = m.lie_volume_rate(field, &p)?;
            gap = gap.max((a - b).abs() / (1.0 + a.abs()));
            r.sample(&p, "divergence", a);
            r.sample(&p, "lie_volume_rate", b);
        }
        r.check_abs("max_dual_path_gap", gap, tol);
    }
    Ok(())
}

fn flow_check(s: &Scenario, tol: f64, r: &mut Record) -> Result<()> {
    let m = &s.manifold;
    let field = s.field(Analysis::Flow)?;
    let mut worst: f64 = 0.0;
    let mut min_order = f64::INFINITY;
    let mut exact = 0usize;
    for p in s.sample_points() {
        let formula = m.lie_volume_rate(field, &p)?;
        let est = |h| flow::lie_pullback_estimate(m, field, &PullbackQuantity::VolumeCoefficient, &p, h);
        let err = (est(PULLBACK_STEP)? - formula).abs();
        let coarse = (est(2e-2)? - formula).abs();
        let fine = (est(1e-2)? - formula).abs();
        if fine > 1e-11 {
            min_order = min_order.min((coarse / fine).log2());
        } else {
            exact += 1;
        }
        worst = worst.max(err);
        r.sample(&p, "pullback_error", err);
    }
    r.check_abs("max_pullback_error", worst, tol);
    if min_order.is_finite() {
        r.telemetry("observed_order_min", min_order);
    }
    r.telemetry("points_exact_at_coarse_steps", exact as f64);
    if let Some(f) = &s.flow {
        let path = flow::integrate_trajectory(m.chart(), field, &f.start, f.t_final, f.steps)?;
        let profile = flow::monotonicity_profile(m, field, &path)?;
        for (p, (d, l)) in path.points.iter().zip(profile.expansion_samples.iter().zip(&profile.expansion_rate_samples))
        {
            r.sample(p, "div_xi", *d);
            r.sample(p, "lie_div_xi", *l);
        }
        r.detail("endpoint", path.endpoint())?;
        r.detail("expansion", &profile.expansion)?;
        r.detail("expansion_rate", &profile.expansion_rate)?;
    }
    Ok(())
}

fn require_closed(s: &Scenario, a: Analysis) -> Result<()> {
    if !s.chart().is_closed() {
        return Err(not_applicable(a, "needs every coordinate periodic (closed manifold)"));
    }
    Ok(())
}

fn green(s: &Scenario, tol: f64, grid: &GridSpec, r: &mut Record) -> Result<()> {
    require_closed(s, Analysis::Green)?;
    let res = integrate::green_check(&s.manifold, s.field(Analysis::Green)?, grid)?;
    r.check_abs("residual", res.residual, tol * (1.0 + res.abs_integral));
    r.telemetry("abs_integral", res.abs_integral);
    Ok(())
}

/// Sign statements for closed manifolds drawn from the log-rate integral.
fn closed_flow_statements(lg: &integrate::LogRateGreen, closed: bool) -> Vec<StatementReport> {
    let closed_h = Hypothesis::new("manifold closed", closed, None);
    let rate_h = Hypothesis::new("L_xi(div xi) >= 0 everywhere", lg.lie_min >= -HYPOTHESIS_TOL, None);
    let strict_h = Hypothesis::new("L_xi(div xi) > 0 somewhere", lg.lie_max > HYPOTHESIS_TOL, None);
    let div_max = lg.div_max.abs().max(lg.div_min.abs());
    vec![
        StatementReport::judge(
            "no_accelerating_flow_on_closed_manifold",
            vec![closed_h.clone(), rate_h.clone(), strict_h],
            "no such flow exists",
            false,
            true,
            format!("L_xi(div xi) ranges over [{:.3e}, {:.3e}]", lg.lie_min, lg.lie_max),
        ),
        StatementReport::judge(
            "nondecreasing_rate_forces_incompressibility",
            vec![closed_h, rate_h],
            "div xi vanishes identically",
            div_max <= INCOMPRESSIBLE_TOL,
            true,
            format!("max |div xi| on the grid {div_max:.3e}"),
        ),
    ]
}

fn eq4(s: &Scenario, tol: f64, grid: &GridSpec, r: &mut Record) -> Result<()> {
    require_closed(s, Analysis::Eq4)?;
    let lg = integrate::log_rate_green_check(&s.manifold, s.field(Analysis::Eq4)?, grid)?;
    r.check_abs("residual", lg.residual, tol * (1.0 + lg.abs_integral));
    r.telemetry("abs_integral", lg.abs_integral);
    r.telemetry("integrand_min", lg.integrand_min);
    r.telemetry("integrand_max", lg.integrand_max);
    r.detail("statements", closed_flow_statements(&lg, true))?;
    Ok(())
}

fn soliton_spec(s: &Scenario) -> Result<SolitonSpec> {
    let lambda =
        s.lambda.ok_or_else(|| not_applicable(Analysis::Soliton, "the scenario declares no soliton constant"))?;
    match s.field(Analysis::Soliton)? {
        FieldSource::Components(xi) => SolitonSpec::new(s.manifold.clone(), xi.clone(), lambda),
        FieldSource::UnitNormal(_) => Err(not_applicable(Analysis::Soliton, "needs an explicit vector field")),
    }
}

fn soliton_rigidity_run(s: &Scenario, spec: &SolitonSpec, grid: &GridSpec) -> Result<Option<soliton::SolitonRigidity>> {
    let Some(f) = &s.flow else { return Ok(None) };
    let path = flow::integrate_trajectory(s.chart(), spec.xi(), &f.start, f.t_final, f.steps)?;
    let l1 = match &s.region {
        Some(region) if !s.chart().is_compact() => {
            let field = LogRateField::new(spec.manifold(), spec.xi());
            Some(integrate::l1_growth_study(spec.manifold(), &field, region, L1_STRETCH, grid)?)
        }
        _ => None,
    };
    Ok(Some(soliton::soliton_rigidity(spec, &path, l1)?))
}

fn soliton_check(s: &Scenario, tol: f64, r: &mut Record) -> Result<()> {
    let spec = soliton_spec(s)?;
    let mut sol_max: f64 = 0.0;
    let mut id_max: f64 = 0.0;
    let points = s.sample_points();
    for p in &points {
        let sr = soliton::soliton_residual(&spec, p)?;
        let e = soliton::log_rate_identity(&spec, p)?;
        sol_max = sol_max.max(sr.max_abs);
        id_max = id_max.max(e.residual.abs());
        r.sample(p, "lhs", e.lhs);
        r.sample(p, "rhs", e.rhs);
    }
    r.check_abs("max_soliton_residual", sol_max, tol);
    r.check_abs("max_identity_residual", id_max, tol);
    let first = soliton::log_rate_identity(&spec, &points[0])?;
    r.telemetry("lhs_first_point", first.lhs);
    r.telemetry("rhs_first_point", first.rhs);
    r.telemetry("scalar_curvature_first_point", first.scalar_curvature);
    Ok(())
}

fn anchor_point(s: &Scenario, slice: &lorentz::SliceSpec) -> Vec<f64> {
    let spatial: Vec<f64> = slice
        .spatial_axes()
        .map(|a| {
            let (lo, hi) = s.sample_box[a];
            0.5 * (lo + hi)
        })
        .collect();
    slice.embed(&spatial)
}

fn raychaudhuri(s: &Scenario, tol: f64, r: &mut Record) -> Result<()> {
    let slice = s.slice(Analysis::Raychaudhuri)?;
    let anchor = lorentz::raychaudhuri_residual(slice, &anchor_point(s, slice))?;
    let (mut res, mut gap, mut trace, mut shear_min) = (0.0_f64, 0.0_f64, 0.0_f64, f64::INFINITY);
    for p in s.sample_points() {
        let v = lorentz::raychaudhuri_residual(slice, &p)?;
        let sh = lorentz::extrinsic_geometry(slice, &p)?;
        res = res.max(v.residual.abs());
        gap = gap.max(v.theta_gap.abs());
        trace = trace.max(sh.sigma_trace.abs());
        shear_min = shear_min.min(v.shear);
        r.sample(&p, "lhs", v.lhs);
        r.sample(&p, "rhs", v.rhs());
    }
    r.check_abs("max_residual", res, tol);
    r.check_abs("max_theta_minus_divergence", gap, 1e-10);
    r.check_abs("max_shear_trace", trace, 1e-10);
    r.check_nonnegative("min_shear_norm2", shear_min, 1e-12);
    r.telemetry("slice_lhs", anchor.lhs);
    r.telemetry("slice_ricci_xi_xi", anchor.ricci);
    r.telemetry("slice_shear_norm2", anchor.shear);
    r.telemetry("slice_expansion_term", anchor.expansion);
    r.telemetry("slice_expansion_rate", anchor.expansion_rate);
    r.telemetry("slice_residual", anchor.residual);
    r.detail("anchor_point", anchor_point(s, slice))?;
    Ok(())
}

fn eq7(s: &Scenario, tol: f64, grid: &GridSpec, r: &mut Record) -> Result<()> {
    let slice = s.slice(Analysis::Eq7)?;
    let e = lorentz::slice_integral(slice, grid)?;
    r.check_abs("integral_minus_acceleration_flux", e.integral - e.acceleration_flux, tol * e.volume);
    r.telemetry("integral", e.integral);
    r.telemetry("integral_over_volume", e.integral / e.volume);
    r.telemetry("acceleration_flux", e.acceleration_flux);
    r.telemetry("lhs_integral", e.lhs_integral);
    r.telemetry("slice_volume", e.volume);
    r.telemetry("integrand_min", e.integrand_min);
    r.telemetry("integrand_max", e.integrand_max);
    r.detail("geodesic_normal_flow", e.acceleration_flux <= tol * e.volume)?;
    Ok(())
}

fn energy(s: &Scenario, tol: f64, grid: &GridSpec, r: &mut Record) -> Result<()> {
    let slice = s.slice(Analysis::Energy)?;
    let bounds = s.region.as_ref().map(|reg| reg.bounds());
    let samples = SliceSamples::collect(slice, &slice.grid(bounds, grid)?)?;
    let scan = lorentz::energy_from_samples(&samples);
    r.telemetry("ricci_min", scan.min);
    r.telemetry("ricci_max", scan.max);
    r.telemetry("violation_fraction", scan.violation_fraction);
    r.detail("energy_condition_satisfied", scan.satisfied)?;
    if let Some(fluid) = &s.fluid {
        let mut gap: f64 = 0.0;
        for p in s.sample_points() {
            let c = lorentz::perfect_fluid_ricci(slice, fluid, &p)?;
            gap = gap.max(c.gap);
            r.sample(&p, "fluid_model", c.model);
            r.sample(&p, "ricci_xi_xi", c.geometric);
        }
        r.check_abs("max_fluid_gap", gap, tol);
    }
    Ok(())
}

fn boundary(s: &Scenario, tol: f64, grid: &GridSpec, r: &mut Record) -> Result<()> {
    let region = s.region(Analysis::Boundary)?;
    let field = s.field(Analysis::Boundary)?;
    let m = &s.manifold;
    let log_rate = integrate::boundary_check(m, region, &LogRateField::new(m, field), grid)?;
    let plain = integrate::boundary_check(m, region, field, grid)?;
    r.check_abs("log_rate_relative_residual", log_rate.relative_residual(), tol);
    r.check_abs("field_relative_residual", plain.relative_residual(), tol);
    r.telemetry("log_rate_bulk", log_rate.bulk);
    r.telemetry("log_rate_boundary", log_rate.boundary);
    r.telemetry("field_bulk", plain.bulk);
    r.telemetry("field_boundary", plain.boundary);
    r.detail("log_rate_faces", &log_rate.faces)?;
    r.detail("field_faces", &plain.faces)?;
    Ok(())
}

fn diagnose(s: &Scenario, grid: &GridSpec, r: &mut Record) -> Result<()> {
    let mut statements: Vec<StatementReport> = Vec::new();
    if let Some(slice) = &s.slice {
        let bounds = s.region.as_ref().map(|reg| reg.bounds());
        let samples = SliceSamples::collect(slice, &slice.grid(bounds, grid)?)?;
        let region = match &s.region {
            Some(reg) => Some(lorentz::region_telemetry(slice, reg, grid)?),
            None => None,
        };
        let flow = match &s.flow {
            Some(f) => {
                let path = flow::integrate_trajectory(s.chart(), slice.normal(), &f.start, f.t_final, f.steps)?;
                Some(flow::monotonicity_profile(&s.manifold, slice.normal(), &path)?)
            }
            None => None,
        };
        let input = DiagnosticInputs {
            dim: s.dim(),
            slice_closed: slice.is_closed(),
            spacetime_closed: s.chart().is_closed(),
            samples,
            region,
            flow,
        };
        let report = lorentz::slice_diagnostics(&input);
        r.telemetry("slice_integral", report.integral.integral);
        r.telemetry("slice_volume", report.integral.volume);
        statements.extend(report.statements);
    } else if s.chart().signature() == Signature::Riemannian {
        if let (true, Some(field)) = (s.chart().is_closed(), &s.field) {
            let lg = integrate::log_rate_green_check(&s.manifold, field, grid)?;
            statements.extend(closed_flow_statements(&lg, true));
        }
        if s.lambda.is_some() && s.field.is_some() {
            let spec = soliton_spec(s)?;
            if let Some(rigidity) = soliton_rigidity_run(s, &spec, grid)? {
                r.detail("soliton_rigidity", &rigidity)?;
                r.telemetry("soliton_scalar_gap_max", rigidity.conclusions.scalar_gap);
                r.telemetry("soliton_expansion_max", rigidity.conclusions.expansion);
                let verdict_ok = rigidity.verdict != Verdict::Contradiction;
                r.check_abs("soliton_rigidity_contradiction", if verdict_ok { 0.0 } else { 1.0 }, 0.0);
            }
        }
    }
    let unsound = statements.iter().filter(|st| st.applicable && st.hypotheses.iter().any(|h| !h.holds)).count();
    let contradictions = statements.iter().filter(|st| st.verdict == Verdict::Contradiction).count();
    r.check_abs("unsound_statements", unsound as f64, 0.0);
    r.check_abs("contradictions", contradictions as f64, 0.0);
    r.detail("statements", &statements)?;
    Ok(())
}
