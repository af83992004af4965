//! Tensor-product quadrature over compact chart domains and the integral
//! identities that follow from the divergence theorem.
//!
//! Periodic axes use the composite trapezoid rule (spectrally accurate for
//! smooth periodic integrands); bounded axes use composite Simpson with the
//! node count rounded up to an odd number. Node values may be computed in
//! parallel but are always reduced by the same pairwise tree.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, Chart, Extent, FluxField, Manifold, VectorField};
use crate::linalg::MAX_DIM;
use crate::sum::pairwise_sum;

/// Per-axis node counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(counts: Vec<usize>) -> Result<GridSpec> {
        if let Some(c) = counts.iter().find(|&&c| c < 4) {
            return Err(Error::Schema { path: "grid".into(), message: format!("node count {c} below 4") });
        }
        Ok(GridSpec { counts })
    }

    pub fn uniform(dim: usize, count: usize) -> Result<GridSpec> {
        Self::new(vec![count; dim])
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// `n` equal intervals on `[0, period)`, no duplicated endpoint.
    pub fn periodic(period: f64, n: usize) -> AxisRule {
        let h = period / n as f64;
        AxisRule { nodes: (0..n).map(|i| i as f64 * h).collect(), weights: vec![h; n] }
    }

    /// Composite Simpson on `[lo, hi]` with both endpoints; `n` is rounded up
    /// to the next odd count.
    pub fn simpson(lo: f64, hi: f64, n: usize) -> AxisRule {
        let n = if n.is_multiple_of(2) { n + 1 } else { n }.max(5);
        let h = (hi - lo) / (n - 1) as f64;
        let nodes = (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * h }).collect();
        let weights = (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        AxisRule { nodes, weights }
    }

    /// A single node with unit weight (a coordinate held fixed).
    pub fn fixed(value: f64) -> AxisRule {
        AxisRule { nodes: vec![value], weights: vec![1.0] }
    }
}

#[derive(Clone, Debug)]
pub struct ProductGrid {
    axes: Vec<AxisRule>,
}

impl ProductGrid {
    pub fn new(axes: Vec<AxisRule>) -> ProductGrid {
        ProductGrid { axes }
    }

    pub fn axes(&self) -> &[AxisRule] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `idx` (last axis fastest) and its weight.
    pub fn node(&self, mut idx: usize, out: &mut [f64]) -> f64 {
        let mut w = 1.0;
        for (a, axis) in self.axes.iter().enumerate().rev() {
            let k = idx % axis.nodes.len();
            idx /= axis.nodes.len();
            out[a] = axis.nodes[k];
            w *= axis.weights[k];
        }
        w
    }

    /// Evaluate `f(point, weight)` at every node, in node order.
    pub fn map<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&[f64], f64) -> Result<T> + Sync,
    {
        let n = self.axes.len();
        (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let mut p = [0.0; MAX_DIM];
                let w = self.node(idx, &mut p);
                f(&p[..n], w)
            })
            .collect()
    }

    /// `Σ w_i f(x_i)` with a deterministic pairwise reduction.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let terms = self.map(|p, w| Ok(w * f(p)?))?;
        Ok(pairwise_sum(&terms))
    }
}

/// Integration domain `N`: per-axis sub-bounds, with boundary faces on every
/// bounded axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    bounds: Vec<Option<(f64, f64)>>,
    faces: Vec<Face>,
}

/// A coordinate slice `x^axis = value` bounding a region. `orientation` is
/// +1 on the upper face and -1 on the lower one (outer minus inner).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Face {
    pub axis: usize,
    pub value: f64,
    pub orientation: f64,
}

impl Region {
    /// `bounds[i] = None` takes the full extent of axis `i`, which must then
    /// be periodic (no faces) or bounded (faces at the chart bounds).
    pub fn new(chart: &Chart, bounds: Vec<Option<(f64, f64)>>) -> Result<Region> {
        if bounds.len() != chart.dim() {
            return Err(Error::InvalidRegion(format!("{} bounds for dimension {}", bounds.len(), chart.dim())));
        }
        let mut resolved = Vec::with_capacity(bounds.len());
        let mut faces = Vec::new();
        for (axis, b) in bounds.into_iter().enumerate() {
            let name = &chart.names()[axis];
            let b = match (b, chart.extent(axis)) {
                (Some((lo, hi)), ext) => {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(Error::InvalidRegion(format!("`{name}` bounds must satisfy lo < hi")));
                    }
                    match ext {
                        Extent::Bounded(clo, chi) if lo < clo || hi > chi => {
                            return Err(Error::InvalidRegion(format!("`{name}` bounds leave the chart")));
                        }
                        Extent::Periodic(p) if hi - lo > p => {
                            return Err(Error::InvalidRegion(format!("`{name}` interval exceeds its period")));
                        }
                        _ => {}
                    }
                    Some((lo, hi))
                }
                (None, Extent::Periodic(_)) => None,
                (None, Extent::Bounded(lo, hi)) => Some((lo, hi)),
                (None, Extent::Unbounded) => return Err(Error::NonCompactDomain { axis: name.clone() }),
            };
            if let Some((lo, hi)) = b {
                faces.push(Face { axis, value: lo, orientation: -1.0 });
                faces.push(Face { axis, value: hi, orientation: 1.0 });
            }
            resolved.push(b);
        }
        Ok(Region { bounds: resolved, faces })
    }

    /// The whole chart; fails on unbounded axes.
    pub fn whole(chart: &Chart) -> Result<Region> {
        Self::new(chart, vec![None; chart.dim()])
    }

    pub fn bounds(&self) -> &[Option<(f64, f64)>] {
        &self.bounds
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    fn axis_rule(&self, chart: &Chart, axis: usize, count: usize) -> AxisRule {
        match (self.bounds[axis], chart.extent(axis)) {
            (Some((lo, hi)), _) => AxisRule::simpson(lo, hi, count),
            (None, Extent::Periodic(p)) => AxisRule::periodic(p, count),
            _ => unreachable!("resolved in Region::new"),
        }
    }

    pub fn grid(&self, chart: &Chart, grid: &GridSpec) -> ProductGrid {
        ProductGrid::new((0..chart.dim()).map(|a| self.axis_rule(chart, a, grid.counts[a])).collect())
    }

    /// Grid over a face: the face axis held fixed, the others as in the region.
    pub fn face_grid(&self, chart: &Chart, face: &Face, grid: &GridSpec) -> ProductGrid {
        ProductGrid::new(
            (0..chart.dim())
                .map(|a| {
                    if a == face.axis {
                        AxisRule::fixed(face.value)
                    } else {
                        self.axis_rule(chart, a, grid.counts[a])
                    }
                })
                .collect(),
        )
    }

    /// Same region with every axis that is unbounded in the chart stretched
    /// about its centre by `factor`.
    pub fn stretched(&self, chart: &Chart, factor: f64) -> Result<Region> {
        let bounds = self
            .bounds
            .iter()
            .enumerate()
            .map(|(a, b)| match (b, chart.extent(a)) {
                (Some((lo, hi)), Extent::Unbounded) => {
                    let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo) * factor);
                    Some((c - r, c + r))
                }
                (b, _) => *b,
            })
            .collect();
        Region::new(chart, bounds)
    }
}

fn check_grid(chart: &Chart, grid: &GridSpec) -> Result<()> {
    if grid.counts.len() != chart.dim() {
        return Err(Error::Schema {
            path: "grid".into(),
            message: format!("{} counts for dimension {}", grid.counts.len(), chart.dim()),
        });
    }
    Ok(())
}

/// `∫_M f ω` over the whole (compact) chart.
pub fn quad(manifold: &Manifold, f: &(dyn Fn(&[f64]) -> Result<f64> + Sync), grid: &GridSpec) -> Result<f64> {
    let region = Region::whole(manifold.chart())?;
    quad_region(manifold, &region, f, grid)
}

pub fn quad_region(
    manifold: &Manifold,
    region: &Region,
    f: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    grid: &GridSpec,
) -> Result<f64> {
    check_grid(manifold.chart(), grid)?;
    region.grid(manifold.chart(), grid).integrate(|p| Ok(f(p)? * manifold.metric_at(p)?.sqrt_abs_det()))
}

/// `Vol_ω(M) = ∫_M ω`.
pub fn total_volume(manifold: &Manifold, grid: &GridSpec) -> Result<f64> {
    quad(manifold, &|_| Ok(1.0), grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenResidual {
    /// `∫ div X dv`, zero for a closed manifold.
    pub residual: f64,
    /// `∫ |div X| dv`, the scale the residual is judged against.
    pub abs_integral: f64,
}

impl GreenResidual {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual.abs() <= tol * (1.0 + self.abs_integral)
    }
}

pub fn green_check(manifold: &Manifold, x: &dyn FluxField, grid: &GridSpec) -> Result<GreenResidual> {
    let chart = manifold.chart();
    check_grid(chart, grid)?;
    let region = Region::whole(chart)?;
    let terms = region.grid(chart, grid).map(|p, w| {
        let m = manifold.metric_at(p)?;
        let div = geometry::divergence(&m, &x.flux_jets_with(&m, p)?);
        let dv = w * m.sqrt_abs_det();
        Ok((div * dv, div.abs() * dv))
    })?;
    let (signed, abs): (Vec<f64>, Vec<f64>) = terms.into_iter().unzip();
    Ok(GreenResidual { residual: pairwise_sum(&signed), abs_integral: pairwise_sum(&abs) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogRateGreen {
    /// `∫ (L_ξ(div ξ) + (div ξ)^2) dv`
    pub residual: f64,
    pub abs_integral: f64,
    pub integrand_min: f64,
    pub integrand_max: f64,
    /// Extremes of `L_ξ(div ξ)` and `div ξ` over the grid, for sign reports.
    pub lie_min: f64,
    pub lie_max: f64,
    pub div_min: f64,
    pub div_max: f64,
}

impl LogRateGreen {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual.abs() <= tol * (1.0 + self.abs_integral)
    }
}

pub fn log_rate_green_check(manifold: &Manifold, xi: &dyn VectorField, grid: &GridSpec) -> Result<LogRateGreen> {
    let chart = manifold.chart();
    check_grid(chart, grid)?;
    let region = Region::whole(chart)?;
    let nodes = region.grid(chart, grid).map(|p, w| {
        let m = manifold.metric_at(p)?;
        let jets = xi.jets(p)?;
        let theta = geometry::divergence_jet(&m, &jets);
        let lie: f64 = (0..m.n).map(|l| jets[l].value() * theta.d(l)).sum();
        let accel = lie + theta.value() * theta.value();
        Ok((accel, w * m.sqrt_abs_det(), lie, theta.value()))
    })?;
    let signed: Vec<f64> = nodes.iter().map(|n| n.0 * n.1).collect();
    let abs: Vec<f64> = nodes.iter().map(|n| n.0.abs() * n.1).collect();
    let fold = |f: fn(&(f64, f64, f64, f64)) -> f64| {
        nodes.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (integrand_min, integrand_max) = fold(|n| n.0);
    let (lie_min, lie_max) = fold(|n| n.2);
    let (div_min, div_max) = fold(|n| n.3);
    Ok(LogRateGreen {
        residual: pairwise_sum(&signed),
        abs_integral: pairwise_sum(&abs),
        integrand_min,
        integrand_max,
        lie_min,
        lie_max,
        div_min,
        div_max,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceFlux {
    pub axis: String,
    pub value: f64,
    pub orientation: f64,
    /// `∫ g(X, n) dv'` over the face with `n` the unit normal dual to the
    /// coordinate gradient; equals `∫ sqrt|g| X^axis` in coordinates.
    pub flux: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryBalance {
    pub bulk: f64,
    pub boundary: f64,
    pub residual: f64,
    pub faces: Vec<FaceFlux>,
}

impl BoundaryBalance {
    pub fn new(bulk: f64, faces: Vec<FaceFlux>) -> BoundaryBalance {
        let boundary = pairwise_sum(&faces.iter().map(|f| f.orientation * f.flux).collect::<Vec<_>>());
        BoundaryBalance { bulk, boundary, residual: bulk - boundary, faces }
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / self.bulk.abs().max(self.boundary.abs()).max(1.0)
    }
}

/// Divergence theorem on a region: `∫_N div X dv` against the oriented sum
/// of face fluxes.
///
/// On a face `x^a = c` the outward flux density is `sqrt|g| X^a` (up to the
/// face orientation). For a spacelike face of a Lorentzian chart this is
/// `-g(X, 𝒩) dv'` with `𝒩` the future-pointing unit normal, which is how the
/// boundary term of the volume divergence theorem reads for time slices.
pub fn boundary_check(
    manifold: &Manifold,
    region: &Region,
    x: &dyn FluxField,
    grid: &GridSpec,
) -> Result<BoundaryBalance> {
    let chart = manifold.chart();
    check_grid(chart, grid)?;
    let bulk = region.grid(chart, grid).integrate(|p| {
        let m = manifold.metric_at(p)?;
        Ok(geometry::divergence(&m, &x.flux_jets_with(&m, p)?) * m.sqrt_abs_det())
    })?;
    Ok(BoundaryBalance::new(bulk, face_fluxes(manifold, region, x, grid)?))
}

/// Flux of `x` through each face of `region`, before orientation.
pub fn face_fluxes(manifold: &Manifold, region: &Region, x: &dyn FluxField, grid: &GridSpec) -> Result<Vec<FaceFlux>> {
    let chart = manifold.chart();
    check_grid(chart, grid)?;
    let mut faces = Vec::with_capacity(region.faces().len());
    for face in region.faces() {
        let flux = region.face_grid(chart, face, grid).integrate(|p| {
            let m = manifold.metric_at(p)?;
            Ok(m.sqrt_abs_det() * x.flux_values(p)?[face.axis])
        })?;
        faces.push(FaceFlux {
            axis: chart.names()[face.axis].clone(),
            value: face.value,
            orientation: face.orientation,
            flux,
        });
    }
    Ok(faces)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L1Estimate {
    /// `∫_region |X| dv` with `|X| = sqrt|g(X,X)|`.
    pub value: f64,
    /// `∫_region dv`
    pub measure: f64,
    pub bounds: Vec<Option<(f64, f64)>>,
    /// Set when `g(X,X) < 0` somewhere (timelike field on a Lorentzian chart).
    pub causal_warning: bool,
}

pub fn truncated_l1(manifold: &Manifold, x: &dyn FluxField, region: &Region, grid: &GridSpec) -> Result<L1Estimate> {
    let chart = manifold.chart();
    check_grid(chart, grid)?;
    let nodes = region.grid(chart, grid).map(|p, w| {
        let m = manifold.metric_at(p)?;
        let v = x.flux_values(p)?;
        let norm2 = m.dot(&v, &v);
        let dv = w * m.sqrt_abs_det();
        Ok((norm2.abs().sqrt() * dv, dv, norm2 < 0.0))
    })?;
    Ok(L1Estimate {
        value: pairwise_sum(&nodes.iter().map(|n| n.0).collect::<Vec<_>>()),
        measure: pairwise_sum(&nodes.iter().map(|n| n.1).collect::<Vec<_>>()),
        bounds: region.bounds().to_vec(),
        causal_warning: nodes.iter().any(|n| n.2),
    })
}

/// Relative change below which a truncated L¹ norm is called converged.
pub const L1_CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L1Study {
    pub inner: L1Estimate,
    pub outer: L1Estimate,
    pub relative_change: f64,
    /// Only a statement about these two truncations, never about the
    /// untruncated manifold.
    pub converged: bool,
}

/// Compare the truncated L¹ norm on `region` with the one on the region
/// stretched by `factor` along the chart's unbounded axes.
pub fn l1_growth_study(
    manifold: &Manifold,
    x: &dyn FluxField,
    region: &Region,
    factor: f64,
    grid: &GridSpec,
) -> Result<L1Study> {
    let inner = truncated_l1(manifold, x, region, grid)?;
    let outer = truncated_l1(manifold, x, &region.stretched(manifold.chart(), factor)?, grid)?;
    let change = (outer.value - inner.value).abs();
    let converged = change <= L1_CONVERGENCE_TOL * outer.value.abs().max(1.0);
    let relative_change = if outer.value == 0.0 { 0.0 } else { change / outer.value.abs() };
    Ok(L1Study { inner, outer, relative_change, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_rounds_up_and_integrates_cubics() {
        let r = AxisRule::simpson(0.0, 2.0, 8);
        assert_eq!(r.nodes.len(), 9);
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x * x).sum();
        assert!((s - 4.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_rule_has_no_duplicate_endpoint() {
        let r = AxisRule::periodic(1.0, 4);
        assert_eq!(r.nodes, vec![0.0, 0.25, 0.5, 0.75]);
        assert_eq!(r.weights.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn grid_rejects_tiny_counts() {
        assert!(GridSpec::new(vec![3, 8]).is_err());
    }
}
