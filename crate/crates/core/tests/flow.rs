use std::f64::consts::PI;

use proptest::prelude::*;
use volex_core::flow::{integrate_trajectory, lie_pullback_estimate, PullbackQuantity};
use volex_core::geometry::{Chart, Extent, Manifold, MetricSpec, Signature, VectorFieldSpec};
use volex_core::Error;

fn plane() -> Manifold {
    let chart = Chart::new(&["x", "y"], Signature::Riemannian, vec![Extent::Unbounded; 2]).unwrap();
    let g = MetricSpec::diagonal(&chart, &["1", "1"]).unwrap();
    Manifold::new(chart, g).unwrap()
}

fn curved() -> Manifold {
    let chart = Chart::new(&["x", "y"], Signature::Riemannian, vec![Extent::Unbounded; 2]).unwrap();
    let g = MetricSpec::from_lower(&chart, &[vec!["2 + sin(x)"], vec!["0.2 * y", "1 + x^2"]]).unwrap();
    Manifold::new(chart, g).unwrap()
}

fn endpoint_error(steps: usize) -> f64 {
    let m = plane();
    let rot = VectorFieldSpec::parse(m.chart(), &["-y", "x"]).unwrap();
    let path = integrate_trajectory(m.chart(), &rot, &[1.0, 0.0], PI / 2.0, steps).unwrap();
    let e = path.endpoint();
    (e[0] - 0.0).hypot(e[1] - 1.0)
}

#[test]
fn rotation_reaches_quarter_turn() {
    assert!(endpoint_error(2000) < 1e-10);
}

#[test]
fn rk4_is_fourth_order() {
    let order = (endpoint_error(20) / endpoint_error(40)).log2();
    assert!(order >= 3.9, "observed order {order}");
}

#[test]
fn leaving_a_bounded_chart_is_reported() {
    let chart =
        Chart::new(&["x", "y"], Signature::Riemannian, vec![Extent::Bounded(0.0, 1.0), Extent::Unbounded]).unwrap();
    let xi = VectorFieldSpec::parse(&chart, &["1", "0"]).unwrap();
    match integrate_trajectory(&chart, &xi, &[0.5, 0.0], 2.0, 10) {
        Err(Error::LeftDomain { axis, exit_time }) => {
            assert_eq!(axis, "x");
            assert!((exit_time - 0.5).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn periodic_axes_wrap() {
    let chart = Chart::new(&["x", "y"], Signature::Riemannian, vec![Extent::Periodic(1.0); 2]).unwrap();
    let xi = VectorFieldSpec::parse(&chart, &["1", "0"]).unwrap();
    let path = integrate_trajectory(&chart, &xi, &[0.5, 0.25], 1.75, 7).unwrap();
    assert!((path.endpoint()[0] - 0.25).abs() < 1e-12);
}

#[test]
fn scalar_pullback_of_cosine() {
    let m = plane();
    let xi = VectorFieldSpec::parse(m.chart(), &["1", "0"]).unwrap();
    let f = |p: &[f64]| Ok(p[0].cos());
    for x in [0.0, 0.4, 1.3, 2.9] {
        let est = lie_pullback_estimate(&m, &xi, &PullbackQuantity::Scalar(&f), &[x, 0.5], 1e-3).unwrap();
        assert!((est + x.sin()).abs() < 1e-6, "{est} vs {}", -x.sin());
    }
}

#[test]
fn zero_field_has_zero_lie_derivatives() {
    let m = curved();
    let zero = VectorFieldSpec::zero(m.chart());
    let p = [0.3, -0.6];
    assert_eq!(lie_pullback_estimate(&m, &zero, &PullbackQuantity::VolumeCoefficient, &p, 1e-3).unwrap(), 0.0);
    assert_eq!(m.divergence(&zero, &p).unwrap(), 0.0);
}

#[test]
fn volume_pullback_converges_at_second_order() {
    let m = curved();
    let xi = VectorFieldSpec::parse(m.chart(), &["sin(y) + x", "x * y"]).unwrap();
    let p = [0.2, 0.7];
    let exact = m.divergence(&xi, &p).unwrap();
    let err = |h| (lie_pullback_estimate(&m, &xi, &PullbackQuantity::VolumeCoefficient, &p, h).unwrap() - exact).abs();
    let (e1, e2) = (err(2e-2), err(1e-2));
    assert!((e1 / e2).log2() >= 1.9, "{e1} {e2}");
    assert!(err(1e-3) < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn divergence_is_linear(a in -3.0f64..3.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let m = curved();
        let u = VectorFieldSpec::parse(m.chart(), &["sin(y)", "x^2"]).unwrap();
        let v = VectorFieldSpec::parse(m.chart(), &["x * y", "cos(x)"]).unwrap();
        let sum = VectorFieldSpec::parse(
            m.chart(),
            &[&format!("sin(y) + ({a}) * x * y"), &format!("x^2 + ({a}) * cos(x)")],
        ).unwrap();
        let p = [x, y];
        let lhs = m.divergence(&sum, &p).unwrap();
        let rhs = m.divergence(&u, &p).unwrap() + a * m.divergence(&v, &p).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }
}
