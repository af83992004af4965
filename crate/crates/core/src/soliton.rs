//! Ricci-soliton structure: the defining equation `-2 Ric = L_ξ g + 2λ g`,
//! the pointwise identity `div((div ξ) ξ) = -L_ξ s + (s + nλ)^2` it implies,
//! and a trajectory diagnostic for the rigidity statement built on it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{FlowPath, SeriesProfile, MONOTONE_TOL};
use crate::geometry::{self, LogRateField, Manifold, Signature, VectorField, VectorFieldSpec};
use crate::integrate::L1Study;
use crate::linalg;
use crate::verdict::Verdict;

/// Below this max-abs residual a point counts as satisfying the soliton equation.
pub const SOLITON_TOL: f64 = 1e-6;

/// Step used for the directional derivative of the scalar curvature.
pub const SCALAR_STEP: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct SolitonSpec {
    manifold: Manifold,
    xi: VectorFieldSpec,
    lambda: f64,
}

impl SolitonSpec {
    pub fn new(manifold: Manifold, xi: VectorFieldSpec, lambda: f64) -> Result<SolitonSpec> {
        if manifold.chart().signature() != Signature::Riemannian {
            return Err(Error::NotApplicable {
                analysis: "soliton".into(),
                reason: "soliton checks need a Riemannian chart".into(),
            });
        }
        if VectorField::dim(&xi) != manifold.dim() {
            return Err(Error::InvalidChart("vector field dimension differs from the chart".into()));
        }
        if !lambda.is_finite() {
            return Err(Error::Schema { path: "soliton.lambda".into(), message: "must be finite".into() });
        }
        Ok(SolitonSpec { manifold, xi, lambda })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn xi(&self) -> &VectorFieldSpec {
        &self.xi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolitonResidual {
    /// `2 Ric + L_ξ g + 2λ g`
    pub matrix: Vec<Vec<f64>>,
    pub max_abs: f64,
}

pub fn soliton_residual(s: &SolitonSpec, p: &[f64]) -> Result<SolitonResidual> {
    let m = s.manifold.metric_at(p)?;
    let conn = geometry::connection(&m);
    let (ric, _) = geometry::ricci(&m, &conn);
    let lie = geometry::lie_metric(&m, &s.xi.jets(p)?);
    let n = m.n;
    let mut out = linalg::ZERO_MAT;
    let mut max_abs: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            out[i][j] = 2.0 * ric[i][j] + lie[i][j] + 2.0 * s.lambda * m.g[i][j];
            max_abs = max_abs.max(out[i][j].abs());
        }
    }
    Ok(SolitonResidual { matrix: linalg::to_rows(&out, n), max_abs })
}

fn scalar_curvature(manifold: &Manifold, p: &[f64]) -> Result<f64> {
    let m = manifold.metric_at(p)?;
    Ok(geometry::ricci(&m, &geometry::connection(&m)).1)
}

/// `ξ^k ∂_k s` by a Richardson-extrapolated central difference of the exact
/// scalar curvature along the straight line through `p` in direction `ξ(p)`.
pub fn scalar_curvature_rate(manifold: &Manifold, xi: &dyn VectorField, p: &[f64]) -> Result<f64> {
    let v = xi.values(p)?;
    if v.iter().all(|c| *c == 0.0) {
        return Ok(0.0);
    }
    let central = |h: f64| -> Result<f64> {
        let fwd: Vec<f64> = p.iter().zip(&v).map(|(x, v)| x + h * v).collect();
        let bwd: Vec<f64> = p.iter().zip(&v).map(|(x, v)| x - h * v).collect();
        Ok((scalar_curvature(manifold, &fwd)? - scalar_curvature(manifold, &bwd)?) / (2.0 * h))
    };
    let coarse = central(SCALAR_STEP)?;
    let fine = central(0.5 * SCALAR_STEP)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogRateIdentity {
    /// `div((div ξ) ξ)`
    pub lhs: f64,
    /// `-L_ξ s + (s + nλ)^2`
    pub rhs: f64,
    pub residual: f64,
    pub scalar_curvature: f64,
    pub scalar_curvature_rate: f64,
    pub soliton_residual: f64,
    /// Whether the point satisfies the soliton equation; the identity is
    /// only expected to hold when it does.
    pub hypothesis_met: bool,
}

pub fn log_rate_identity(s: &SolitonSpec, p: &[f64]) -> Result<LogRateIdentity> {
    let n = s.manifold.dim() as f64;
    let lhs = s.manifold.divergence(&LogRateField::new(&s.manifold, &s.xi), p)?;
    let scalar = scalar_curvature(&s.manifold, p)?;
    let rate = scalar_curvature_rate(&s.manifold, &s.xi, p)?;
    let shifted = scalar + n * s.lambda;
    let rhs = -rate + shifted * shifted;
    let soliton = soliton_residual(s, p)?.max_abs;
    Ok(LogRateIdentity {
        lhs,
        rhs,
        residual: lhs - rhs,
        scalar_curvature: scalar,
        scalar_curvature_rate: rate,
        soliton_residual: soliton,
        hypothesis_met: soliton < SOLITON_TOL,
    })
}

/// Threshold for the forced conclusions `s = -nλ` and `div ξ = 0`.
pub const RIGIDITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForcedConclusions {
    /// `max |s + nλ|` along the path.
    pub scalar_gap: f64,
    pub scalar_gap_passed: bool,
    /// `max |div ξ|` along the path.
    pub expansion: f64,
    pub expansion_passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolitonRigidity {
    pub times: Vec<f64>,
    pub scalar_curvature: Vec<f64>,
    pub scalar_curvature_rate: Vec<f64>,
    pub scalar_profile: SeriesProfile,
    /// `L_ξ s <= 0` at every sample, i.e. `s` nonincreasing along the flow.
    pub scalar_nonincreasing: bool,
    /// Chart compact, so completeness and integrability hold automatically.
    pub compact: bool,
    pub soliton_residual_max: f64,
    pub l1: Option<L1Study>,
    pub conclusions: ForcedConclusions,
    pub verdict: Verdict,
}

/// Evaluate the rigidity hypotheses along `path` and, only where they all
/// hold, judge the forced conclusions.
pub fn soliton_rigidity(s: &SolitonSpec, path: &FlowPath, l1: Option<L1Study>) -> Result<SolitonRigidity> {
    let n = s.manifold.dim() as f64;
    let mut rates = Vec::with_capacity(path.points.len());
    let mut scalars = Vec::with_capacity(path.points.len());
    let mut scalar_gap: f64 = 0.0;
    let mut expansion: f64 = 0.0;
    let mut soliton_max: f64 = 0.0;
    for p in &path.points {
        rates.push(scalar_curvature_rate(&s.manifold, &s.xi, p)?);
        let scalar = scalar_curvature(&s.manifold, p)?;
        scalars.push(scalar);
        scalar_gap = scalar_gap.max((scalar + n * s.lambda).abs());
        expansion = expansion.max(s.manifold.divergence(&s.xi, p)?.abs());
        soliton_max = soliton_max.max(soliton_residual(s, p)?.max_abs);
    }
    let scalar_profile = SeriesProfile::classify(&scalars, MONOTONE_TOL);
    let scalar_nonincreasing = rates.iter().all(|r| *r <= MONOTONE_TOL);
    let compact = s.manifold.chart().is_compact();
    let conclusions = ForcedConclusions {
        scalar_gap,
        scalar_gap_passed: scalar_gap < RIGIDITY_TOL,
        expansion,
        expansion_passed: expansion < RIGIDITY_TOL,
    };
    let verdict = if !scalar_nonincreasing || soliton_max >= SOLITON_TOL {
        Verdict::NotApplicable
    } else if !compact {
        Verdict::HypothesesUnverifiable
    } else if conclusions.scalar_gap_passed && conclusions.expansion_passed {
        Verdict::ConclusionConsistent
    } else {
        Verdict::Contradiction
    };
    Ok(SolitonRigidity {
        times: path.times.clone(),
        scalar_curvature: scalars,
        scalar_curvature_rate: rates,
        scalar_profile,
        scalar_nonincreasing,
        compact,
        soliton_residual_max: soliton_max,
        l1,
        conclusions,
        verdict,
    })
}
