use crate::error::{Error, Result};
use crate::exprdsl::{Expr, Jet1, Jet2};
use crate::linalg::MAX_DIM;

use super::chart::Chart;

/// Metric components `g_ij` as expressions; only the lower triangle is
/// stored, so the metric is symmetric by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    n: usize,
    lower: Vec<Expr>,
}

fn tri(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

impl MetricSpec {
    /// `rows[i]` holds `g_i0 ... g_ii`.
    pub fn from_lower(chart: &Chart, rows: &[Vec<&str>]) -> Result<MetricSpec> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().enumerate().any(|(i, r)| r.len() != i + 1) {
            return Err(Error::InvalidChart("metric must be given as a lower triangle".into()));
        }
        let lower = rows.iter().flatten().map(|s| chart.parse(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(MetricSpec { n, lower })
    }

    pub fn diagonal(chart: &Chart, diag: &[&str]) -> Result<MetricSpec> {
        let n = chart.dim();
        if diag.len() != n {
            return Err(Error::InvalidChart(format!("{} diagonal entries for dimension {n}", diag.len())));
        }
        let mut lower = Vec::with_capacity(n * (n + 1) / 2);
        for (i, d) in diag.iter().enumerate() {
            for _ in 0..i {
                lower.push(chart.zero_expr());
            }
            lower.push(chart.parse(d)?);
        }
        Ok(MetricSpec { n, lower })
    }

    /// Build from already-parsed lower-triangle entries.
    pub fn from_exprs(n: usize, lower: Vec<Expr>) -> Result<MetricSpec> {
        if lower.len() != n * (n + 1) / 2 {
            return Err(Error::InvalidChart("wrong number of metric components".into()));
        }
        Ok(MetricSpec { n, lower })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.lower[tri(i, j)]
    }

    pub fn values(&self, p: &[f64]) -> Result<crate::linalg::Mat> {
        let mut g = crate::linalg::ZERO_MAT;
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.component(i, j).eval(p)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }

    pub fn jets_at(&self, x: &[Jet2]) -> Result<[[Jet2; MAX_DIM]; MAX_DIM]> {
        let zero = Jet2::constant(x.len(), 0.0);
        let mut g = [[zero; MAX_DIM]; MAX_DIM];
        for i in 0..self.n {
            for j in 0..=i {
                let e = self.component(i, j);
                let v = if e.is_zero_literal() { zero } else { e.eval_at_jets(x)? };
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }
}

pub(crate) fn seed(p: &[f64]) -> Vec<Jet2> {
    (0..p.len()).map(|i| Jet2::variable(p.len(), i, p[i])).collect()
}

/// A vector field whose components can be evaluated as order-2 jets.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;

    /// Components evaluated at a jet-valued point (composition).
    fn jets_at(&self, x: &[Jet2]) -> Result<Vec<Jet2>>;

    fn jets(&self, p: &[f64]) -> Result<Vec<Jet2>> {
        self.jets_at(&seed(p))
    }

    fn values(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jets(p)?.iter().map(Jet2::value).collect())
    }
}

/// A vector field known to first order, which is all a divergence or a
/// flux integral needs.
pub trait FluxField: Send + Sync {
    fn dim(&self) -> usize;
    fn flux_jets(&self, p: &[f64]) -> Result<Vec<Jet1>>;
    /// Same as [`FluxField::flux_jets`] when the metric at `p` is already known.
    fn flux_jets_with(&self, _m: &super::MetricAt, p: &[f64]) -> Result<Vec<Jet1>> {
        self.flux_jets(p)
    }
    fn flux_values(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.flux_jets(p)?.iter().map(Jet1::value).collect())
    }
}

impl<T: VectorField + ?Sized> FluxField for T {
    fn dim(&self) -> usize {
        VectorField::dim(self)
    }
    fn flux_jets(&self, p: &[f64]) -> Result<Vec<Jet1>> {
        Ok(self.jets(p)?.into_iter().map(Jet1::from).collect())
    }
    fn flux_values(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.values(p)
    }
}

/// Vector field components `X^k` as expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpec {
    components: Vec<Expr>,
}

impl VectorFieldSpec {
    pub fn new(components: Vec<Expr>) -> VectorFieldSpec {
        VectorFieldSpec { components }
    }

    pub fn parse(chart: &Chart, components: &[&str]) -> Result<VectorFieldSpec> {
        if components.len() != chart.dim() {
            return Err(Error::InvalidChart(format!(
                "{} vector components for dimension {}",
                components.len(),
                chart.dim()
            )));
        }
        let components = components.iter().map(|s| chart.parse(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(VectorFieldSpec { components })
    }

    pub fn zero(chart: &Chart) -> VectorFieldSpec {
        VectorFieldSpec { components: vec![chart.zero_expr(); chart.dim()] }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero_literal)
    }
}

impl VectorField for VectorFieldSpec {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn jets_at(&self, x: &[Jet2]) -> Result<Vec<Jet2>> {
        let zero = Jet2::constant(x.len(), 0.0);
        self.components.iter().map(|e| if e.is_zero_literal() { Ok(zero) } else { Ok(e.eval_at_jets(x)?) }).collect()
    }

    fn values(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.components.iter().map(|e| e.eval(p)).collect::<Result<Vec<_>, _>>()?)
    }
}

/// The future unit normal `N^{-1} ∂_t` to the slices `t = const` of a
/// shift-free metric, with lapse `N = sqrt(-g_tt)`.
#[derive(Clone, Debug)]
pub struct UnitNormal {
    g_tt: Expr,
    time: usize,
    n: usize,
}

impl UnitNormal {
    pub fn new(metric: &MetricSpec, time: usize) -> UnitNormal {
        UnitNormal { g_tt: metric.component(time, time).clone(), time, n: metric.dim() }
    }

    pub fn time_axis(&self) -> usize {
        self.time
    }
}

impl VectorField for UnitNormal {
    fn dim(&self) -> usize {
        self.n
    }

    fn jets_at(&self, x: &[Jet2]) -> Result<Vec<Jet2>> {
        let lapse_sq = -self.g_tt.eval_at_jets(x)?;
        let w = lapse_sq.value();
        if w <= 0.0 {
            return Err(Error::NotLapseForm(format!("g_tt = {} is not negative", -w)));
        }
        // w^{-1/2}
        let r = w.sqrt().recip();
        let xi_t = lapse_sq.chain(r, -0.5 * r / w, 0.75 * r / (w * w));
        let mut out = vec![Jet2::constant(x.len(), 0.0); self.n];
        out[self.time] = xi_t;
        Ok(out)
    }
}
