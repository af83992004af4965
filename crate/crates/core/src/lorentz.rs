//! Coordinate slices `t = c` of shift-free Lorentzian metrics
//! `g = -N^2 dt^2 + h_ij dx^i dx^j` and the flow of their unit normal
//! `ξ = N^{-1} ∂_t`: extrinsic curvature and shear, the Raychaudhuri
//! identity, the closed-slice integral relation, energy conditions and the
//! rigidity diagnostics built from them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprdsl::Expr;
use crate::flow::MonotonicityReport;
use crate::geometry::{self, Extent, Manifold, Signature, UnitNormal, VectorField};
use crate::integrate::{AxisRule, BoundaryBalance, GridSpec, ProductGrid};
use crate::linalg::{self, Mat, ZERO_MAT};
use crate::sum::pairwise_sum;
use crate::verdict::{Hypothesis, StatementReport, Witness, HYPOTHESIS_TOL};

/// Tolerance for null vectors and for vanishing shift components.
pub const NULL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalType {
    Timelike,
    Spacelike,
    Null,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausalReport {
    pub kind: CausalType,
    /// `g(X, X)`
    pub norm2: f64,
    /// `X / sqrt|g(X,X)|` unless null.
    pub unit: Option<Vec<f64>>,
}

pub fn causal_classify(manifold: &Manifold, x: &[f64], p: &[f64]) -> Result<CausalReport> {
    let m = manifold.metric_at(p)?;
    let norm2 = m.dot(x, x);
    let kind = if norm2.abs() <= NULL_TOL {
        CausalType::Null
    } else if norm2 < 0.0 {
        CausalType::Timelike
    } else {
        CausalType::Spacelike
    };
    let unit = (kind != CausalType::Null).then(|| {
        let s = norm2.abs().sqrt();
        x.iter().map(|v| v / s).collect()
    });
    Ok(CausalReport { kind, norm2, unit })
}

/// A time slice of a lapse-form chart together with its unit normal field.
#[derive(Clone, Debug)]
pub struct SliceSpec {
    manifold: Manifold,
    time: usize,
    value: f64,
    normal: UnitNormal,
}

impl SliceSpec {
    /// Validates lapse form (no shift, `N > 0`, `h` positive definite) at a
    /// lattice of points on the slice.
    pub fn new(manifold: Manifold, time: usize, value: f64) -> Result<SliceSpec> {
        let chart = manifold.chart();
        if chart.signature() != Signature::Lorentzian {
            return Err(Error::NotApplicable {
                analysis: "slice".into(),
                reason: "time slices need a Lorentzian chart".into(),
            });
        }
        if chart.dim() < 3 {
            return Err(Error::NotApplicable {
                analysis: "slice".into(),
                reason: "hypersurface analyses need dimension at least 3".into(),
            });
        }
        if time >= chart.dim() {
            return Err(Error::InvalidChart(format!("time axis {time} out of range")));
        }
        let normal = UnitNormal::new(manifold.metric(), time);
        let slice = SliceSpec { manifold, time, value, normal };
        for p in slice.probe_points() {
            slice.check_lapse_form(&p)?;
        }
        Ok(slice)
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn time_axis(&self) -> usize {
        self.time
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn normal(&self) -> &UnitNormal {
        &self.normal
    }

    pub fn spatial_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.manifold.dim()).filter(move |&a| a != self.time)
    }

    /// Spacetime point on the slice with the given spatial coordinates.
    pub fn embed(&self, spatial: &[f64]) -> Vec<f64> {
        let mut p = Vec::with_capacity(spatial.len() + 1);
        p.extend_from_slice(&spatial[..self.time]);
        p.push(self.value);
        p.extend_from_slice(&spatial[self.time..]);
        p
    }

    /// Every spatial axis periodic: the slice models a closed hypersurface.
    pub fn is_closed(&self) -> bool {
        self.spatial_axes().all(|a| matches!(self.manifold.chart().extent(a), Extent::Periodic(_)))
    }

    fn probe_points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .spatial_axes()
            .map(|a| match self.manifold.chart().extent(a) {
                Extent::Periodic(p) => (0..4).map(|i| p * i as f64 / 4.0).collect(),
                Extent::Bounded(lo, hi) => (0..4).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 4.0).collect(),
                Extent::Unbounded => vec![-1.0, -0.3, 0.4, 1.0],
            })
            .collect();
        let mut out = vec![Vec::new()];
        for nodes in &axes {
            out = out.into_iter().flat_map(|p| nodes.iter().map(move |x| [p.clone(), vec![*x]].concat())).collect();
        }
        out.into_iter().map(|s| self.embed(&s)).collect()
    }

    fn check_lapse_form(&self, p: &[f64]) -> Result<()> {
        let g = self.manifold.metric().values(p)?;
        let t = self.time;
        for a in self.spatial_axes() {
            if g[t][a].abs() > NULL_TOL {
                return Err(Error::NotLapseForm(format!("g_{t}{a} = {:e} at {p:?} (shift present)", g[t][a])));
            }
        }
        if !(g[t][t] < 0.0) {
            return Err(Error::NotLapseForm(format!("g_{t}{t} = {} at {p:?} is not negative", g[t][t])));
        }
        let (h, k) = self.spatial_block(&g);
        let inertia = linalg::inertia(&h, k);
        if inertia.positive != k {
            return Err(Error::NotLapseForm(format!("spatial metric not positive definite at {p:?}")));
        }
        Ok(())
    }

    fn spatial_block(&self, g: &Mat) -> (Mat, usize) {
        let axes: Vec<usize> = self.spatial_axes().collect();
        let mut h = ZERO_MAT;
        for (i, &a) in axes.iter().enumerate() {
            for (j, &b) in axes.iter().enumerate() {
                h[i][j] = g[a][b];
            }
        }
        (h, axes.len())
    }

    /// Quadrature grid over the slice. `bounds[a]` restricts spatial axis
    /// `a`; unrestricted unbounded axes are rejected.
    pub fn grid(&self, bounds: Option<&[Option<(f64, f64)>]>, grid: &GridSpec) -> Result<ProductGrid> {
        let chart = self.manifold.chart();
        let counts = grid.counts();
        if counts.len() != chart.dim() {
            return Err(Error::Schema { path: "grid".into(), message: "one count per coordinate".into() });
        }
        let axes = (0..chart.dim())
            .map(|a| {
                if a == self.time {
                    return Ok(AxisRule::fixed(self.value));
                }
                match (bounds.and_then(|b| b[a]), chart.extent(a)) {
                    (Some((lo, hi)), _) | (None, Extent::Bounded(lo, hi)) => Ok(AxisRule::simpson(lo, hi, counts[a])),
                    (None, Extent::Periodic(p)) => Ok(AxisRule::periodic(p, counts[a])),
                    (None, Extent::Unbounded) => Err(Error::NonCompactDomain { axis: chart.names()[a].clone() }),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductGrid::new(axes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShearPack {
    /// `K_ij = (1/2N) ∂_t h_ij` over the spatial axes.
    pub k: Vec<Vec<f64>>,
    pub theta: f64,
    /// Traceless part `K - θ h / (n-1)`.
    pub sigma: Vec<Vec<f64>>,
    /// `h^{ik} h^{jl} σ_ij σ_kl`
    pub sigma_norm2: f64,
    pub sigma_trace: f64,
    /// `div ξ` computed from the volume element, for comparison with θ.
    pub divergence: f64,
}

impl ShearPack {
    pub fn max_abs_k(&self) -> f64 {
        self.k.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Extrinsic geometry of the slice through `p` (any spacetime point; the
/// slice is the coordinate slice containing it).
pub fn extrinsic_geometry(slice: &SliceSpec, p: &[f64]) -> Result<ShearPack> {
    let m = slice.manifold.metric_at(p)?;
    let xi = slice.normal.jets(p)?;
    Ok(shear_from(slice, &m, geometry::divergence_jet(&m, &xi).value()))
}

fn shear_from(slice: &SliceSpec, m: &geometry::MetricAt, divergence: f64) -> ShearPack {
    let t = slice.time;
    let lapse = (-m.g[t][t]).sqrt();
    let axes: Vec<usize> = slice.spatial_axes().collect();
    let k_dim = axes.len();
    let (h, _) = slice.spatial_block(&m.g);
    let h_inv = linalg::inverse(&h, k_dim).expect("spatial metric checked positive definite");
    let mut k = ZERO_MAT;
    for (i, &a) in axes.iter().enumerate() {
        for (j, &b) in axes.iter().enumerate() {
            k[i][j] = m.dg(t, a, b) / (2.0 * lapse);
        }
    }
    let mut theta = 0.0;
    for i in 0..k_dim {
        for j in 0..k_dim {
            theta += h_inv[i][j] * k[i][j];
        }
    }
    let mut sigma = ZERO_MAT;
    for i in 0..k_dim {
        for j in 0..k_dim {
            sigma[i][j] = k[i][j] - theta / k_dim as f64 * h[i][j];
        }
    }
    // raise both indices: S = h^{-1} σ h^{-1}
    let mut raised = ZERO_MAT;
    for i in 0..k_dim {
        for j in 0..k_dim {
            let mut s = 0.0;
            for a in 0..k_dim {
                for b in 0..k_dim {
                    s += h_inv[i][a] * sigma[a][b] * h_inv[b][j];
                }
            }
            raised[i][j] = s;
        }
    }
    let mut norm2 = 0.0;
    let mut trace = 0.0;
    for i in 0..k_dim {
        for j in 0..k_dim {
            norm2 += raised[i][j] * sigma[i][j];
            trace += h_inv[i][j] * sigma[i][j];
        }
    }
    ShearPack {
        k: linalg::to_rows(&k, k_dim),
        theta,
        sigma: linalg::to_rows(&sigma, k_dim),
        sigma_norm2: norm2,
        sigma_trace: trace,
        divergence,
    }
}

/// Every pointwise quantity of the normal flow at one spacetime point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Raychaudhuri {
    /// `div ξ̇` with `ξ̇ = ∇_ξ ξ`
    pub lhs: f64,
    /// `Ric(ξ, ξ)`
    pub ricci: f64,
    /// `g(σ, σ)`
    pub shear: f64,
    /// `(div ξ)^2 / (n-1)`
    pub expansion: f64,
    /// `L_ξ(div ξ)`
    pub expansion_rate: f64,
    pub residual: f64,
    /// `div ξ`
    pub theta: f64,
    /// θ from the extrinsic curvature minus `div ξ`.
    pub theta_gap: f64,
    /// `g(ξ̇, ξ̇)`
    pub acceleration_norm2: f64,
    pub max_abs_k: f64,
    /// `sqrt(det h)`, the density of the slice volume element.
    pub slice_density: f64,
}

impl Raychaudhuri {
    pub fn rhs(&self) -> f64 {
        self.ricci + self.shear + self.expansion + self.expansion_rate
    }
}

pub fn raychaudhuri_residual(slice: &SliceSpec, p: &[f64]) -> Result<Raychaudhuri> {
    let m = slice.manifold.metric_at(p)?;
    let n = m.n;
    let conn = geometry::connection(&m);
    let (ric, _) = geometry::ricci(&m, &conn);
    let xi = slice.normal.jets(p)?;
    let accel = geometry::acceleration_jets(&m, &conn, &xi);
    let lhs = geometry::divergence(&m, &accel);
    let theta_jet = geometry::divergence_jet(&m, &xi);
    let theta = theta_jet.value();
    let rate: f64 = (0..n).map(|l| xi[l].value() * theta_jet.d(l)).sum();
    let v: Vec<f64> = xi.iter().map(|j| j.value()).collect();
    let mut ricci = 0.0;
    for i in 0..n {
        for j in 0..n {
            ricci += ric[i][j] * v[i] * v[j];
        }
    }
    let a: Vec<f64> = accel.iter().map(|j| j.value()).collect();
    let shear = shear_from(slice, &m, theta);
    let expansion = theta * theta / (n - 1) as f64;
    let lapse = (-m.g[slice.time][slice.time]).sqrt();
    let mut out = Raychaudhuri {
        lhs,
        ricci,
        shear: shear.sigma_norm2,
        expansion,
        expansion_rate: rate,
        residual: 0.0,
        theta,
        theta_gap: shear.theta - theta,
        acceleration_norm2: m.dot(&a, &a),
        max_abs_k: shear.max_abs_k(),
        slice_density: m.sqrt_abs_det() / lapse,
    };
    out.residual = out.lhs - out.rhs();
    Ok(out)
}

/// Per-node samples of the normal flow over a slice grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceSamples {
    pub points: Vec<Vec<f64>>,
    /// Quadrature weight times `sqrt(det h)`.
    pub weights: Vec<f64>,
    pub values: Vec<Raychaudhuri>,
}

impl SliceSamples {
    pub fn collect(slice: &SliceSpec, grid: &ProductGrid) -> Result<SliceSamples> {
        let nodes = grid.map(|p, w| {
            let r = raychaudhuri_residual(slice, p)?;
            Ok((p.to_vec(), w * r.slice_density, r))
        })?;
        let mut out = SliceSamples { points: Vec::new(), weights: Vec::new(), values: Vec::new() };
        for (p, w, r) in nodes {
            out.points.push(p);
            out.weights.push(w);
            out.values.push(r);
        }
        Ok(out)
    }

    pub fn integrate(&self, f: impl Fn(&Raychaudhuri) -> f64) -> f64 {
        pairwise_sum(&self.values.iter().zip(&self.weights).map(|(v, w)| w * f(v)).collect::<Vec<_>>())
    }

    pub fn volume(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    fn argmin(&self, f: impl Fn(&Raychaudhuri) -> f64) -> Option<Witness> {
        self.extreme(f, |a, b| a < b)
    }

    fn argmax(&self, f: impl Fn(&Raychaudhuri) -> f64) -> Option<Witness> {
        self.extreme(f, |a, b| a > b)
    }

    fn extreme(&self, f: impl Fn(&Raychaudhuri) -> f64, better: impl Fn(f64, f64) -> bool) -> Option<Witness> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.values.iter().enumerate() {
            let x = f(v);
            if best.is_none_or(|(_, b)| better(x, b)) {
                best = Some((i, x));
            }
        }
        best.map(|(i, value)| Witness { point: self.points[i].clone(), value })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceIntegral {
    /// `∫ (Ric(ξ,ξ) + g(σ,σ) + (div ξ)^2/(n-1) + L_ξ(div ξ)) dv'`
    pub integral: f64,
    /// `∫ div ξ̇ dv'`, the same integral through the identity's left side.
    pub lhs_integral: f64,
    /// `∫ g(ξ̇, ξ̇) dv'`. On a closed slice `∫ div ξ̇ dv'` equals this term,
    /// which vanishes only when the lapse is constant along the slice.
    pub acceleration_flux: f64,
    pub volume: f64,
    pub integrand_min: f64,
    pub integrand_max: f64,
}

pub fn slice_integral(slice: &SliceSpec, grid: &GridSpec) -> Result<SliceIntegral> {
    if !slice.is_closed() {
        return Err(Error::NotApplicable {
            analysis: "eq7".into(),
            reason: "the integral relation needs every spatial coordinate periodic".into(),
        });
    }
    let samples = SliceSamples::collect(slice, &slice.grid(None, grid)?)?;
    Ok(slice_integral_from_samples(&samples))
}

pub fn slice_integral_from_samples(samples: &SliceSamples) -> SliceIntegral {
    let (lo, hi) = samples
        .values
        .iter()
        .map(Raychaudhuri::rhs)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    SliceIntegral {
        integral: samples.integrate(Raychaudhuri::rhs),
        lhs_integral: samples.integrate(|r| r.lhs),
        acceleration_flux: samples.integrate(|r| r.acceleration_norm2),
        volume: samples.volume(),
        integrand_min: lo,
        integrand_max: hi,
    }
}

/// Perfect-fluid model: energy density `mu` and pressure `rho` as
/// expressions on the chart.
#[derive(Clone, Debug)]
pub struct FluidParams {
    pub mu: Expr,
    pub rho: Expr,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluidCheck {
    /// `4π(μ + 3ρ)`
    pub model: f64,
    /// `Ric(ξ, ξ)`
    pub geometric: f64,
    pub gap: f64,
}

pub fn perfect_fluid_ricci(slice: &SliceSpec, fluid: &FluidParams, p: &[f64]) -> Result<FluidCheck> {
    let model = 4.0 * std::f64::consts::PI * (fluid.mu.eval(p)? + 3.0 * fluid.rho.eval(p)?);
    let geometric = raychaudhuri_residual(slice, p)?.ricci;
    Ok(FluidCheck { model, geometric, gap: (model - geometric).abs() })
}

/// `Ric(ξ,ξ)` below `-ENERGY_TOL` counts as a violation.
pub const ENERGY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyScan {
    pub min: f64,
    pub max: f64,
    pub violation_fraction: f64,
    pub samples: usize,
    pub satisfied: bool,
}

pub fn energy_condition_scan(slice: &SliceSpec, grid: &GridSpec) -> Result<EnergyScan> {
    let samples = SliceSamples::collect(slice, &slice.grid(None, grid)?)?;
    Ok(energy_from_samples(&samples))
}

pub fn energy_from_samples(samples: &SliceSamples) -> EnergyScan {
    let ric: Vec<f64> = samples.values.iter().map(|r| r.ricci).collect();
    let violations = ric.iter().filter(|v| **v < -ENERGY_TOL).count();
    EnergyScan {
        min: ric.iter().copied().fold(f64::INFINITY, f64::min),
        max: ric.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        violation_fraction: violations as f64 / ric.len().max(1) as f64,
        samples: ric.len(),
        satisfied: violations == 0,
    }
}

/// Threshold on `max |K_ij|` for a totally geodesic slice.
pub const GEODESIC_SLICE_TOL: f64 = 1e-8;

/// Everything the rigidity statements look at, gathered beforehand so the
/// judgement itself is a pure function of the samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticInputs {
    pub dim: usize,
    pub slice_closed: bool,
    /// Every coordinate, time included, periodic.
    pub spacetime_closed: bool,
    pub samples: SliceSamples,
    pub region: Option<RegionTelemetry>,
    pub flow: Option<MonotonicityReport>,
}

/// Values over a region `N` whose boundary contains the slice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionTelemetry {
    /// `∫_N (L_ξ(div ξ) + (div ξ)^2) dv` against the boundary integral of `div ξ`.
    pub balance: BoundaryBalance,
    pub accel_min: f64,
    pub accel_max: f64,
    pub accel_witness_min: Witness,
    pub accel_witness_max: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceDiagnostics {
    pub statements: Vec<StatementReport>,
    pub integral: SliceIntegral,
}

fn energy_hypothesis(s: &SliceSamples) -> Hypothesis {
    let w = s.argmin(|r| r.ricci).expect("nonempty samples");
    Hypothesis::new("Ric(xi,xi) >= 0 on the slice", w.value >= -HYPOTHESIS_TOL, Some(w))
}

fn rate_hypothesis(s: &SliceSamples) -> Hypothesis {
    let w = s.argmin(|r| r.expansion_rate).expect("nonempty samples");
    Hypothesis::new("L_xi(div xi) >= 0 on the slice", w.value >= -HYPOTHESIS_TOL, Some(w))
}

fn strict_rate_hypothesis(s: &SliceSamples) -> Hypothesis {
    let w = s.argmax(|r| r.expansion_rate).expect("nonempty samples");
    Hypothesis::new("L_xi(div xi) > 0 somewhere on the slice", w.value > HYPOTHESIS_TOL, Some(w))
}

fn geodesic_flow_hypothesis(s: &SliceSamples) -> Hypothesis {
    let w = s.argmax(|r| r.acceleration_norm2).expect("nonempty samples");
    Hypothesis::new("normal flow geodesic on the slice (g(xi_dot,xi_dot) = 0)", w.value <= HYPOTHESIS_TOL, Some(w))
}

fn dimension_hypothesis(dim: usize, four: bool) -> Hypothesis {
    if four {
        Hypothesis::new("spacetime dimension 4", dim == 4, None)
    } else {
        Hypothesis::new("dimension n >= 3", dim >= 3, None)
    }
}

/// Judge every rigidity statement against the gathered samples. A statement
/// is marked applicable only when each of its hypotheses holds.
pub fn slice_diagnostics(input: &DiagnosticInputs) -> SliceDiagnostics {
    let s = &input.samples;
    let integral = slice_integral_from_samples(s);
    let mut statements = Vec::new();

    let closed_note = if input.slice_closed { "slice is closed" } else { "slice is not closed" };
    for (name, four) in [("closed_slice_excluded", false), ("closed_slice_excluded_4d", true)] {
        let hyps = vec![
            dimension_hypothesis(input.dim, four),
            energy_hypothesis(s),
            rate_hypothesis(s),
            strict_rate_hypothesis(s),
            geodesic_flow_hypothesis(s),
        ];
        let note = format!(
            "{closed_note}; integral relation value {:.6e} against volume {:.6e}",
            integral.integral, integral.volume
        );
        statements.push(StatementReport::judge(name, hyps, "the slice is not closed", !input.slice_closed, true, note));
    }

    let k_max = s.values.iter().fold(0.0_f64, |m, r| m.max(r.max_abs_k));
    for (name, four) in [("totally_geodesic_slice", false), ("totally_geodesic_slice_4d", true)] {
        let hyps = vec![
            dimension_hypothesis(input.dim, four),
            energy_hypothesis(s),
            rate_hypothesis(s),
            geodesic_flow_hypothesis(s),
        ];
        let note = if input.slice_closed {
            format!("closed slice, integrability automatic; max |K| = {k_max:.3e}")
        } else {
            format!("noncompact slice: completeness and |xi_dot| in L1 not checkable on a truncation; max |K| = {k_max:.3e}")
        };
        statements.push(StatementReport::judge(
            name,
            hyps,
            "the slice is totally geodesic (K = 0)",
            k_max <= GEODESIC_SLICE_TOL,
            input.slice_closed,
            note,
        ));
    }

    {
        let theta_max = s.argmax(|r| r.theta.abs()).expect("nonempty samples");
        let hyps = vec![
            Hypothesis::new("dimension n >= 3", input.dim >= 3, None),
            Hypothesis::new("slice is closed", input.slice_closed, None),
            Hypothesis::new("region bounded by the slice supplied", input.region.is_some(), None),
        ];
        let (conclusion_holds, note) = match &input.region {
            Some(r) => {
                let grows = r.accel_min >= -HYPOTHESIS_TOL && r.accel_max.abs() > HYPOTHESIS_TOL;
                let stalls = theta_max.value <= HYPOTHESIS_TOL;
                let note = format!(
                    "condition 1 (acceleration >= 0 in the region, nonzero somewhere): {grows}; \
                     condition 2 (div xi = 0 on the slice): {stalls}, max |div xi| {:.3e}; \
                     bulk {:.6e}, boundary {:.6e}",
                    theta_max.value, r.balance.bulk, r.balance.boundary
                );
                (!(grows && stalls), note)
            }
            None => (true, "no region telemetry".into()),
        };
        statements.push(StatementReport::judge(
            "region_growth_and_stall_exclusive",
            hyps,
            "conditions 1 and 2 do not hold together",
            conclusion_holds,
            true,
            note,
        ));
    }

    {
        let hyps = vec![
            Hypothesis::new("dimension n >= 3", input.dim >= 3, None),
            Hypothesis::new("flow compactly supported (every coordinate periodic)", input.spacetime_closed, None),
            Hypothesis::new("trajectory samples available", input.flow.is_some(), None),
        ];
        let (holds, note) = match &input.flow {
            Some(f) => {
                let increasing = f.expansion.nondecreasing && f.expansion.max - f.expansion.min > HYPOTHESIS_TOL;
                (!increasing, format!("div xi along the trajectory: {:?}", f.expansion.trend))
            }
            None => (true, "no trajectory".into()),
        };
        statements.push(StatementReport::judge(
            "expansion_nonincreasing_on_closed_flow",
            hyps,
            "div xi does not increase along trajectories",
            holds,
            true,
            note,
        ));
    }

    SliceDiagnostics { statements, integral }
}

/// Fill the region telemetry for [`slice_diagnostics`]: the balance
/// `∫_N (L_ξθ + θ²) dv` versus the face integrals, and the sign range of the
/// bulk integrand.
pub fn region_telemetry(
    slice: &SliceSpec,
    region: &crate::integrate::Region,
    grid: &GridSpec,
) -> Result<RegionTelemetry> {
    let manifold = &slice.manifold;
    let field = geometry::LogRateField::new(manifold, &slice.normal);
    let nodes = region.grid(manifold.chart(), grid).map(|p, w| {
        let m = manifold.metric_at(p)?;
        let accel = geometry::expansion_acceleration(&m, &slice.normal.jets(p)?).1;
        Ok((p.to_vec(), accel, accel * w * m.sqrt_abs_det()))
    })?;
    let bulk = pairwise_sum(&nodes.iter().map(|n| n.2).collect::<Vec<_>>());
    let balance = BoundaryBalance::new(bulk, crate::integrate::face_fluxes(manifold, region, &field, grid)?);
    let mut lo = Witness { point: Vec::new(), value: f64::INFINITY };
    let mut hi = Witness { point: Vec::new(), value: f64::NEG_INFINITY };
    for (p, v, _) in nodes {
        if v < lo.value {
            lo = Witness { point: p.clone(), value: v };
        }
        if v > hi.value {
            hi = Witness { point: p, value: v };
        }
    }
    Ok(RegionTelemetry {
        balance,
        accel_min: lo.value,
        accel_max: hi.value,
        accel_witness_min: lo,
        accel_witness_max: hi,
    })
}
