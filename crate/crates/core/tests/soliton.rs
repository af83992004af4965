use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volex_core::flow::integrate_trajectory;
use volex_core::geometry::{Chart, Extent, Manifold, MetricSpec, Signature, VectorFieldSpec};
use volex_core::soliton::{log_rate_identity, soliton_residual, soliton_rigidity, SolitonSpec};
use volex_core::verdict::Verdict;

fn spec(names: &[&str], extents: Vec<Extent>, diag: &[&str], xi: &[&str], lambda: f64) -> SolitonSpec {
    let chart = Chart::new(names, Signature::Riemannian, extents).unwrap();
    let g = MetricSpec::diagonal(&chart, diag).unwrap();
    let xi = VectorFieldSpec::parse(&chart, xi).unwrap();
    SolitonSpec::new(Manifold::new(chart, g).unwrap(), xi, lambda).unwrap()
}

fn gaussian() -> SolitonSpec {
    spec(&["x", "y"], vec![Extent::Unbounded; 2], &["1", "1"], &["-x", "-y"], 1.0)
}

fn sphere() -> SolitonSpec {
    spec(
        &["th", "ph"],
        vec![Extent::Bounded(0.001, PI - 0.001), Extent::Periodic(2.0 * PI)],
        &["1", "sin(th)^2"],
        &["0", "0"],
        -1.0,
    )
}

#[test]
fn gaussian_identity_at_random_points() {
    let s = gaussian();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let r = log_rate_identity(&s, &p).unwrap();
        assert!(r.hypothesis_met);
        assert!((r.lhs - 4.0).abs() < 1e-7 && (r.rhs - 4.0).abs() < 1e-7, "{r:?}");
    }
}

#[test]
fn sphere_identity_is_zero_equals_zero() {
    let s = sphere();
    for k in 0..20 {
        let p = [0.2 + 0.13 * k as f64, 0.3 * k as f64];
        let r = log_rate_identity(&s, &p).unwrap();
        assert!(r.soliton_residual < 1e-9);
        assert!(r.lhs.abs() < 1e-6 && r.rhs.abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn non_solitons_are_flagged() {
    let s = spec(&["x", "y"], vec![Extent::Unbounded; 2], &["1", "1"], &["y", "0"], 1.0);
    let r = log_rate_identity(&s, &[0.5, 0.5]).unwrap();
    assert!(!r.hypothesis_met);
    assert!(soliton_residual(&s, &[0.5, 0.5]).unwrap().max_abs > 1.0);
}

#[test]
fn riemannian_chart_required() {
    let chart = Chart::new(&["t", "x"], Signature::Lorentzian, vec![Extent::Unbounded; 2]).unwrap();
    let g = MetricSpec::diagonal(&chart, &["-1", "1"]).unwrap();
    let xi = VectorFieldSpec::zero(&chart);
    assert!(SolitonSpec::new(Manifold::new(chart, g).unwrap(), xi, 0.0).is_err());
}

#[test]
fn rigidity_on_a_compact_chart_is_consistent() {
    let s = sphere();
    let path = integrate_trajectory(s.manifold().chart(), s.xi(), &[1.0, 0.5], 1.0, 10).unwrap();
    let r = soliton_rigidity(&s, &path, None).unwrap();
    assert!(r.compact && r.scalar_nonincreasing);
    assert_eq!(r.verdict, Verdict::ConclusionConsistent);
    assert!(r.conclusions.scalar_gap < 1e-6);
}

#[test]
fn rigidity_on_the_plane_cannot_be_verified() {
    let s = gaussian();
    let path = integrate_trajectory(s.manifold().chart(), s.xi(), &[1.0, -0.5], 1.0, 20).unwrap();
    let r = soliton_rigidity(&s, &path, None).unwrap();
    assert!(!r.compact);
    assert_eq!(r.verdict, Verdict::HypothesesUnverifiable);
    // s = 0 but div ξ = -2, so the conclusions would fail on a truncation
    assert!(!r.conclusions.expansion_passed);
}

#[test]
fn failed_soliton_hypothesis_is_not_applicable() {
    let s = spec(&["x", "y"], vec![Extent::Periodic(2.0 * PI); 2], &["1", "1"], &["sin(y)", "0"], 0.0);
    let path = integrate_trajectory(s.manifold().chart(), s.xi(), &[0.3, 1.0], 1.0, 10).unwrap();
    assert_eq!(soliton_rigidity(&s, &path, None).unwrap().verdict, Verdict::NotApplicable);
}
