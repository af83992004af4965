//! Pointwise tensor calculus on a chart: metric, volume element, Levi-Civita
//! connection, Ricci curvature, divergences and Lie derivatives.
//!
//! All derivatives of the metric and of vector fields come from order-2
//! jets, so Christoffel symbols, their first derivatives and the Ricci
//! tensor are exact up to roundoff.
//!
//! Curvature convention: `R^a_{bcd} = ∂_c Γ^a_{db} - ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} - Γ^a_{de} Γ^e_{cb}`
//! and `Ric_{bd} = R^a_{bad}`, which gives the unit sphere scalar curvature +2
//! and matter-filled FLRW a positive `Ric(ξ,ξ)` for the unit normal ξ.

mod chart;
mod fields;

pub use chart::{Chart, Extent, Signature};
pub(crate) use fields::seed;
pub use fields::{FluxField, MetricSpec, UnitNormal, VectorField, VectorFieldSpec};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprdsl::{Jet1, Jet2};
use crate::linalg::{self, Mat, Vector, MAX_DIM, ZERO_MAT};

/// Determinants below this magnitude are treated as degenerate.
pub const SINGULAR_DET: f64 = 1e-14;

type Rank3 = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];
type Rank4 = [[[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// A chart together with a metric on it.
#[derive(Clone, Debug)]
pub struct Manifold {
    chart: Chart,
    metric: MetricSpec,
}

/// Metric data at a point: values, inverse, determinant and the jets of
/// every component and of the volume density `sqrt|det g|`.
#[derive(Clone, Debug)]
pub struct MetricAt {
    pub n: usize,
    pub point: Vector,
    pub jets: [[Jet2; MAX_DIM]; MAX_DIM],
    pub g: Mat,
    pub inv: Mat,
    pub det: f64,
    /// `sqrt|det g|` with exact gradient and Hessian.
    pub volume: Jet2,
}

impl MetricAt {
    pub fn sqrt_abs_det(&self) -> f64 {
        self.volume.value()
    }

    /// `∂_k g_ij`
    #[inline]
    pub fn dg(&self, k: usize, i: usize, j: usize) -> f64 {
        self.jets[i][j].d(k)
    }

    /// `∂_k ∂_l g_ij`
    #[inline]
    pub fn ddg(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.jets[i][j].dd(k, l)
    }

    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.g[i][j] * a[i] * b[j];
            }
        }
        s
    }
}

/// Christoffel symbols `Γ^k_ij` and their first derivatives `∂_m Γ^k_ij`
/// (indexed `[m][k][i][j]`).
#[derive(Clone, Debug)]
pub struct Connection {
    pub n: usize,
    pub gamma: Rank3,
    pub dgamma: Rank4,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvaturePack {
    /// `gamma[k][i][j] = Γ^k_ij`
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
}

impl Manifold {
    pub fn new(chart: Chart, metric: MetricSpec) -> Result<Manifold> {
        if chart.dim() != metric.dim() {
            return Err(Error::InvalidChart(format!(
                "metric of dimension {} on a chart of dimension {}",
                metric.dim(),
                chart.dim()
            )));
        }
        Ok(Manifold { chart, metric })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Metric at `p`, rejecting degenerate points and points where the
    /// eigenvalue signs disagree with the declared signature.
    pub fn metric_at(&self, p: &[f64]) -> Result<MetricAt> {
        let n = self.dim();
        let jets = self.metric.jets_at(&seed(p))?;
        let mut g = ZERO_MAT;
        for i in 0..n {
            for j in 0..n {
                g[i][j] = jets[i][j].value();
            }
        }
        let det_jet = linalg::jet_det(&jets, n);
        let det = det_jet.value();
        if !(det.abs() >= SINGULAR_DET) {
            return Err(Error::SingularMetric { point: p.to_vec(), det });
        }
        self.check_signature(&g, p)?;
        let inv = linalg::inverse(&g, n).ok_or_else(|| Error::SingularMetric { point: p.to_vec(), det })?;
        let abs_det = if det < 0.0 { -det_jet } else { det_jet };
        let s = abs_det.value().sqrt();
        let volume = abs_det.chain(s, 0.5 / s, -0.25 / (s * abs_det.value()));
        let mut point = [0.0; MAX_DIM];
        point[..n].copy_from_slice(p);
        Ok(MetricAt { n, point, jets, g, inv, det, volume })
    }

    fn check_signature(&self, g: &Mat, p: &[f64]) -> Result<()> {
        let n = self.dim();
        let inertia = linalg::inertia(g, n);
        let expected_negative = match self.chart.signature() {
            Signature::Riemannian => 0,
            Signature::Lorentzian => 1,
        };
        if inertia.negative != expected_negative || inertia.zero != 0 {
            return Err(Error::SignatureMismatch {
                point: p.to_vec(),
                expected: self.chart.signature().to_string(),
                positive: inertia.positive,
                negative: inertia.negative,
                zero: inertia.zero,
            });
        }
        Ok(())
    }

    pub fn connection(&self, p: &[f64]) -> Result<Connection> {
        Ok(connection(&self.metric_at(p)?))
    }

    pub fn christoffel(&self, p: &[f64]) -> Result<Rank3> {
        Ok(christoffel(&self.metric_at(p)?))
    }

    pub fn curvature(&self, p: &[f64]) -> Result<CurvaturePack> {
        let m = self.metric_at(p)?;
        let conn = connection(&m);
        let (ricci, scalar) = ricci(&m, &conn);
        Ok(CurvaturePack {
            gamma: (0..m.n).map(|k| linalg::to_rows(&conn.gamma[k], m.n)).collect(),
            ricci: linalg::to_rows(&ricci, m.n),
            scalar,
        })
    }

    /// `(1/sqrt|g|) ∂_k(sqrt|g| X^k)`.
    pub fn divergence(&self, x: &dyn FluxField, p: &[f64]) -> Result<f64> {
        let m = self.metric_at(p)?;
        Ok(divergence(&m, &x.flux_jets_with(&m, p)?))
    }

    /// The coefficient `div_ω ξ` in `L_ξ ω = (div_ω ξ) ω`, evaluated as
    /// `∂_k ξ^k + ξ^k ∂_k log sqrt|g|` with the log-volume gradient from
    /// Jacobi's formula; an independent route to [`Manifold::divergence`].
    pub fn lie_volume_rate(&self, xi: &dyn VectorField, p: &[f64]) -> Result<f64> {
        let m = self.metric_at(p)?;
        Ok(lie_volume_rate(&m, &xi.jets(p)?))
    }

    /// `(L_ξ(div ξ), L_ξ(div ξ) + (div ξ)^2)`
    pub fn expansion_acceleration(&self, xi: &dyn VectorField, p: &[f64]) -> Result<(f64, f64)> {
        let m = self.metric_at(p)?;
        Ok(expansion_acceleration(&m, &xi.jets(p)?))
    }

    pub fn lie_metric(&self, xi: &dyn VectorField, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let m = self.metric_at(p)?;
        Ok(linalg::to_rows(&lie_metric(&m, &xi.jets(p)?), m.n))
    }

    /// `∇_ξ ξ`
    pub fn acceleration_vector(&self, xi: &dyn VectorField, p: &[f64]) -> Result<Vec<f64>> {
        let m = self.metric_at(p)?;
        let gamma = christoffel(&m);
        let a = acceleration_vector(&m, &gamma, &xi.jets(p)?);
        Ok(a[..m.n].to_vec())
    }
}

/// Christoffel symbols of the first kind, `[l][i][j] = Γ_{l,ij}`.
fn first_kind(m: &MetricAt) -> Rank3 {
    let n = m.n;
    let mut c = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (m.dg(i, j, l) + m.dg(j, i, l) - m.dg(l, i, j));
                c[l][i][j] = v;
                c[l][j][i] = v;
            }
        }
    }
    c
}

pub fn christoffel(m: &MetricAt) -> Rank3 {
    let n = m.n;
    let c = first_kind(m);
    let mut gamma = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n).map(|l| m.inv[k][l] * c[l][i][j]).sum();
                gamma[k][i][j] = v;
                gamma[k][j][i] = v;
            }
        }
    }
    gamma
}

/// Christoffel symbols with exact first derivatives, using
/// `∂_m g^{kl} = -g^{ka} ∂_m g_ab g^{bl}`.
pub fn connection(m: &MetricAt) -> Connection {
    let n = m.n;
    let c = first_kind(m);
    let gamma = christoffel(m);
    let mut dinv = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for d in 0..n {
        for k in 0..n {
            for l in k..n {
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        s += m.inv[k][a] * m.dg(d, a, b) * m.inv[b][l];
                    }
                }
                dinv[d][k][l] = -s;
                dinv[d][l][k] = -s;
            }
        }
    }
    let mut dgamma = [[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for d in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        let dc = 0.5 * (m.ddg(d, i, j, l) + m.ddg(d, j, i, l) - m.ddg(d, l, i, j));
                        s += dinv[d][k][l] * c[l][i][j] + m.inv[k][l] * dc;
                    }
                    dgamma[d][k][i][j] = s;
                    dgamma[d][k][j][i] = s;
                }
            }
        }
    }
    Connection { n, gamma, dgamma }
}

/// Ricci tensor (symmetric by construction) and scalar curvature.
pub fn ricci(m: &MetricAt, conn: &Connection) -> (Mat, f64) {
    let n = m.n;
    let (g, dg) = (&conn.gamma, &conn.dgamma);
    let mut ric = ZERO_MAT;
    for b in 0..n {
        for d in b..n {
            let mut s = 0.0;
            for a in 0..n {
                s += dg[a][a][d][b] - dg[d][a][a][b];
                for e in 0..n {
                    s += g[a][a][e] * g[e][d][b] - g[a][d][e] * g[e][a][b];
                }
            }
            ric[b][d] = s;
            ric[d][b] = s;
        }
    }
    let mut scalar = 0.0;
    for i in 0..n {
        for j in 0..n {
            scalar += m.inv[i][j] * ric[i][j];
        }
    }
    (ric, scalar)
}

/// Coordinate-formula divergence of a first-order field.
pub fn divergence(m: &MetricAt, x: &[Jet1]) -> f64 {
    let s = &m.volume;
    let mut acc = 0.0;
    for (k, xk) in x.iter().enumerate().take(m.n) {
        acc += s.d(k) * xk.value() + s.value() * xk.d(k);
    }
    acc / s.value()
}

/// Divergence of an order-2 field, together with its gradient.
pub fn divergence_jet(m: &MetricAt, xi: &[Jet2]) -> Jet1 {
    let n = m.n;
    let s = m.volume;
    let mut d = 0.0;
    let mut dd = [0.0; MAX_DIM];
    for (k, xk) in xi.iter().enumerate().take(n) {
        if xk.is_constant() && xk.value() == 0.0 {
            continue;
        }
        let flux = s * *xk;
        d += flux.d(k);
        for (l, ddl) in dd.iter_mut().enumerate().take(n) {
            *ddl += flux.dd(k, l);
        }
    }
    let sv = s.value();
    let mut grad = [0.0; MAX_DIM];
    for l in 0..n {
        grad[l] = dd[l] / sv - d * s.d(l) / (sv * sv);
    }
    Jet1::from_parts(d / sv, &grad[..n])
}

pub fn lie_volume_rate(m: &MetricAt, xi: &[Jet2]) -> f64 {
    let n = m.n;
    let mut acc = 0.0;
    for k in 0..n {
        let mut log_vol = 0.0;
        for i in 0..n {
            for j in 0..n {
                log_vol += m.inv[i][j] * m.dg(k, i, j);
            }
        }
        acc += xi[k].d(k) + xi[k].value() * 0.5 * log_vol;
    }
    acc
}

pub fn expansion_acceleration(m: &MetricAt, xi: &[Jet2]) -> (f64, f64) {
    let theta = divergence_jet(m, xi);
    let lie: f64 = (0..m.n).map(|l| xi[l].value() * theta.d(l)).sum();
    (lie, lie + theta.value() * theta.value())
}

/// `(L_ξ g)_ij = ξ^k ∂_k g_ij + g_kj ∂_i ξ^k + g_ik ∂_j ξ^k`
pub fn lie_metric(m: &MetricAt, xi: &[Jet2]) -> Mat {
    let n = m.n;
    let mut out = ZERO_MAT;
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                s += xi[k].value() * m.dg(k, i, j) + m.g[k][j] * xi[k].d(i) + m.g[i][k] * xi[k].d(j);
            }
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    out
}

/// `ξ̇^k = ξ^i ∂_i ξ^k + Γ^k_ij ξ^i ξ^j`
pub fn acceleration_vector(m: &MetricAt, gamma: &Rank3, xi: &[Jet2]) -> Vector {
    let n = m.n;
    let mut a = [0.0; MAX_DIM];
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            s += xi[i].value() * xi[k].d(i);
            for j in 0..n {
                s += gamma[k][i][j] * xi[i].value() * xi[j].value();
            }
        }
        a[k] = s;
    }
    a
}

/// `∇_ξ ξ` as a first-order field, for taking its divergence.
pub fn acceleration_jets(m: &MetricAt, conn: &Connection, xi: &[Jet2]) -> Vec<Jet1> {
    let n = m.n;
    let a = acceleration_vector(m, &conn.gamma, xi);
    (0..n)
        .map(|k| {
            let mut grad = [0.0; MAX_DIM];
            for (l, gl) in grad.iter_mut().enumerate().take(n) {
                let mut s = 0.0;
                for i in 0..n {
                    s += xi[i].d(l) * xi[k].d(i) + xi[i].value() * xi[k].dd(i, l);
                    for j in 0..n {
                        s += conn.dgamma[l][k][i][j] * xi[i].value() * xi[j].value()
                            + 2.0 * conn.gamma[k][i][j] * xi[i].d(l) * xi[j].value();
                    }
                }
                *gl = s;
            }
            Jet1::from_parts(a[k], &grad[..n])
        })
        .collect()
}

/// `(div ξ) ξ` to first order; its divergence is the acceleration of
/// volumetric expansion `L_ξ(div ξ) + (div ξ)^2`.
pub struct LogRateField<'a> {
    manifold: &'a Manifold,
    xi: &'a dyn VectorField,
}

impl<'a> LogRateField<'a> {
    pub fn new(manifold: &'a Manifold, xi: &'a dyn VectorField) -> Self {
        LogRateField { manifold, xi }
    }
}

impl FluxField for LogRateField<'_> {
    fn dim(&self) -> usize {
        self.manifold.dim()
    }

    fn flux_jets(&self, p: &[f64]) -> Result<Vec<Jet1>> {
        self.flux_jets_with(&self.manifold.metric_at(p)?, p)
    }

    fn flux_jets_with(&self, m: &MetricAt, p: &[f64]) -> Result<Vec<Jet1>> {
        let xi = self.xi.jets(p)?;
        let theta = divergence_jet(m, &xi);
        Ok(xi.into_iter().map(|x| theta * Jet1::from(x)).collect())
    }
}
