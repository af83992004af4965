//! Trajectories of the local flow `φ_t` generated by a vector field, and a
//! pullback-based oracle for Lie derivatives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprdsl::Jet2;
use crate::geometry::{self, seed, Chart, Manifold, VectorField};
use crate::linalg::{self, ZERO_MAT};

/// Sampled trajectory `t ↦ φ_t(x0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowPath {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl FlowPath {
    pub fn endpoint(&self) -> &[f64] {
        self.points.last().expect("a flow path has at least one point")
    }
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(y, x)| y + a * x).collect()
}

fn check_inside(chart: &Chart, p: &[f64], t: f64) -> Result<()> {
    if let Some(axis) = chart.violated_axis(p) {
        return Err(Error::LeftDomain { axis: chart.names()[axis].clone(), exit_time: t });
    }
    Ok(())
}

/// Classic fixed-step fourth-order Runge-Kutta, wrapping periodic
/// coordinates after every step.
pub fn integrate_trajectory(
    chart: &Chart,
    xi: &dyn VectorField,
    x0: &[f64],
    t_final: f64,
    steps: usize,
) -> Result<FlowPath> {
    if steps == 0 || !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::Schema {
            path: "flow".into(),
            message: "need steps >= 1 and a positive finite t_final".into(),
        });
    }
    check_inside(chart, x0, 0.0)?;
    let dt = t_final / steps as f64;
    let mut x = x0.to_vec();
    chart.wrap(&mut x);
    let mut times = vec![0.0];
    let mut points = vec![x.clone()];
    for s in 0..steps {
        let t = s as f64 * dt;
        let k1 = xi.values(&x)?;
        let k2 = xi.values(&axpy(&x, 0.5 * dt, &k1))?;
        let k3 = xi.values(&axpy(&x, 0.5 * dt, &k2))?;
        let k4 = xi.values(&axpy(&x, dt, &k3))?;
        let next: Vec<f64> =
            (0..x.len()).map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(crate::exprdsl::EvalError::NonFinite { expr: "trajectory".into() }.into());
        }
        if let Some(axis) = chart.violated_axis(&next) {
            let exit_time = match chart.extent(axis) {
                geometry::Extent::Bounded(lo, hi) => {
                    let wall = if next[axis] > hi { hi } else { lo };
                    t + dt * (wall - x[axis]) / (next[axis] - x[axis])
                }
                _ => t + dt,
            };
            return Err(Error::LeftDomain { axis: chart.names()[axis].clone(), exit_time });
        }
        x = next;
        chart.wrap(&mut x);
        times.push(if s + 1 == steps { t_final } else { t + dt });
        points.push(x.clone());
    }
    Ok(FlowPath { times, points })
}

/// One RK4 step of size `h` from `p`, carried out on jets so the result
/// holds the flow map and its Jacobian.
pub fn rk4_step_jets(xi: &dyn VectorField, p: &[f64], h: f64) -> Result<Vec<Jet2>> {
    let x = seed(p);
    let shift =
        |base: &[Jet2], a: f64, k: &[Jet2]| -> Vec<Jet2> { base.iter().zip(k).map(|(b, k)| *b + k.scale(a)).collect() };
    let k1 = xi.jets_at(&x)?;
    let k2 = xi.jets_at(&shift(&x, 0.5 * h, &k1))?;
    let k3 = xi.jets_at(&shift(&x, 0.5 * h, &k2))?;
    let k4 = xi.jets_at(&shift(&x, h, &k3))?;
    Ok((0..x.len()).map(|i| x[i] + (k1[i] + k2[i].scale(2.0) + k3[i].scale(2.0) + k4[i]).scale(h / 6.0)).collect())
}

/// Quantity whose Lie derivative the pullback oracle estimates.
pub enum PullbackQuantity<'a> {
    /// The coefficient of the volume element; the estimate is `div_ω ξ`.
    VolumeCoefficient,
    Scalar(&'a (dyn Fn(&[f64]) -> Result<f64> + Sync)),
}

/// Central difference of the pulled-back quantity,
/// `(Q(φ_h p) J_h - Q(φ_{-h} p) J_{-h}) / (2h)`, where the Jacobian factor
/// `J = det Dφ` enters only for the volume coefficient. The volume estimate is
/// divided by `Q(p)` so it is directly comparable to `div_ω ξ`.
pub fn lie_pullback_estimate(
    manifold: &Manifold,
    xi: &dyn VectorField,
    quantity: &PullbackQuantity<'_>,
    p: &[f64],
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Schema { path: "h".into(), message: "step must be positive".into() });
    }
    let chart = manifold.chart();
    let n = chart.dim();
    let mut pulled = [0.0; 2];
    for (slot, step) in [h, -h].into_iter().enumerate() {
        let jets = rk4_step_jets(xi, p, step)?;
        let mut q: Vec<f64> = jets.iter().map(Jet2::value).collect();
        check_inside(chart, &q, step)?;
        chart.wrap(&mut q);
        pulled[slot] = match quantity {
            PullbackQuantity::VolumeCoefficient => {
                let mut jac = ZERO_MAT;
                for i in 0..n {
                    for j in 0..n {
                        jac[i][j] = jets[i].d(j);
                    }
                }
                manifold.metric_at(&q)?.sqrt_abs_det() * linalg::det(&jac, n)
            }
            PullbackQuantity::Scalar(f) => f(&q)?,
        };
    }
    let diff = (pulled[0] - pulled[1]) / (2.0 * h);
    Ok(match quantity {
        PullbackQuantity::VolumeCoefficient => diff / manifold.metric_at(p)?.sqrt_abs_det(),
        PullbackQuantity::Scalar(_) => diff,
    })
}

/// Tolerance for monotonicity classification of sampled sequences.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    Nondecreasing,
    Nonincreasing,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesProfile {
    pub min: f64,
    pub max: f64,
    pub nondecreasing: bool,
    pub nonincreasing: bool,
    pub trend: Trend,
}

impl SeriesProfile {
    pub fn classify(values: &[f64], tol: f64) -> SeriesProfile {
        let nondecreasing = values.windows(2).all(|w| w[1] - w[0] >= -tol);
        let nonincreasing = values.windows(2).all(|w| w[1] - w[0] <= tol);
        let trend = match (nondecreasing, nonincreasing) {
            (true, true) => Trend::Constant,
            (true, false) => Trend::Nondecreasing,
            (false, true) => Trend::Nonincreasing,
            (false, false) => Trend::Mixed,
        };
        SeriesProfile {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            nondecreasing,
            nonincreasing,
            trend,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// `div ξ` along the path.
    pub expansion: SeriesProfile,
    /// `L_ξ(div ξ)` along the path.
    pub expansion_rate: SeriesProfile,
    pub times: Vec<f64>,
    pub expansion_samples: Vec<f64>,
    pub expansion_rate_samples: Vec<f64>,
}

pub fn monotonicity_profile(manifold: &Manifold, xi: &dyn VectorField, path: &FlowPath) -> Result<MonotonicityReport> {
    let mut div = Vec::with_capacity(path.points.len());
    let mut rate = Vec::with_capacity(path.points.len());
    for p in &path.points {
        let m = manifold.metric_at(p)?;
        let jets = xi.jets(p)?;
        let theta = geometry::divergence_jet(&m, &jets);
        div.push(theta.value());
        rate.push((0..m.n).map(|l| jets[l].value() * theta.d(l)).sum());
    }
    Ok(MonotonicityReport {
        expansion: SeriesProfile::classify(&div, MONOTONE_TOL),
        expansion_rate: SeriesProfile::classify(&rate, MONOTONE_TOL),
        times: path.times.clone(),
        expansion_samples: div,
        expansion_rate_samples: rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Extent, Signature, VectorFieldSpec};
    use std::f64::consts::PI;

    #[test]
    fn straight_flow_wraps_on_torus() {
        let chart = Chart::new(&["x", "y"], Signature::Riemannian, vec![Extent::Periodic(2.0 * PI); 2]).unwrap();
        let xi = VectorFieldSpec::parse(&chart, &["1", "0"]).unwrap();
        let path = integrate_trajectory(&chart, &xi, &[0.0, 0.0], 7.0, 70).unwrap();
        assert!((path.endpoint()[0] - (7.0 - 2.0 * PI)).abs() < 1e-12);
        assert_eq!(path.endpoint()[1], 0.0);
        assert_eq!(path.times.len(), 71);
    }

    #[test]
    fn leaving_a_bounded_axis() {
        let chart =
            Chart::new(&["x", "y"], Signature::Riemannian, vec![Extent::Bounded(0.0, 1.0), Extent::Unbounded]).unwrap();
        let xi = VectorFieldSpec::parse(&chart, &["1", "0"]).unwrap();
        match integrate_trajectory(&chart, &xi, &[0.5, 0.0], 2.0, 20) {
            Err(Error::LeftDomain { axis, exit_time }) => {
                assert_eq!(axis, "x");
                assert!((exit_time - 0.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classification() {
        assert_eq!(SeriesProfile::classify(&[3.0, 3.0, 3.0], 1e-9).trend, Trend::Constant);
        assert_eq!(SeriesProfile::classify(&[2.0, 1.5, 1.0], 1e-9).trend, Trend::Nonincreasing);
        assert_eq!(SeriesProfile::classify(&[0.0, 1.0, 0.5], 1e-9).trend, Trend::Mixed);
    }
}
