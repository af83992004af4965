use std::f64::consts::PI;

use volex_core::geometry::{Chart, Extent, LogRateField, Manifold, MetricSpec, Signature, VectorFieldSpec};
use volex_core::integrate::{
    boundary_check, green_check, l1_growth_study, log_rate_green_check, quad, total_volume, GridSpec, Region,
};

fn torus(periods: [f64; 2], diag: [&str; 2]) -> Manifold {
    let chart =
        Chart::new(&["x", "y"], Signature::Riemannian, periods.iter().map(|p| Extent::Periodic(*p)).collect()).unwrap();
    let g = MetricSpec::diagonal(&chart, &diag).unwrap();
    Manifold::new(chart, g).unwrap()
}

fn plane() -> Manifold {
    let chart = Chart::new(&["x", "y"], Signature::Riemannian, vec![Extent::Unbounded; 2]).unwrap();
    Manifold::new(chart.clone(), MetricSpec::diagonal(&chart, &["1", "1"]).unwrap()).unwrap()
}

fn grid(n: usize) -> GridSpec {
    GridSpec::uniform(2, n).unwrap()
}

#[test]
fn torus_volumes() {
    let flat = torus([2.0 * PI, 2.0 * PI], ["1", "1"]);
    assert!((total_volume(&flat, &grid(8)).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
    // sqrt(det g) = 2 + cos(x), whose mean over a period is 2
    let warped = torus([2.0 * PI, 1.0], ["(2 + cos(x))^2", "1"]);
    assert!((total_volume(&warped, &grid(16)).unwrap() - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn trig_integrals_on_the_torus() {
    let m = torus([2.0 * PI, 2.0 * PI], ["1", "1"]);
    let sin2 = quad(&m, &|p| Ok(p[0].sin().powi(2)), &grid(16)).unwrap();
    assert!((sin2 - 2.0 * PI * PI).abs() < 1e-12);
    let odd = quad(&m, &|p| Ok(p[0].sin() * p[1].cos()), &grid(16)).unwrap();
    assert!(odd.abs() < 1e-12);
}

#[test]
fn sphere_area() {
    let chart =
        Chart::new(&["th", "ph"], Signature::Riemannian, vec![Extent::Bounded(0.0, PI), Extent::Periodic(2.0 * PI)])
            .unwrap();
    // avoid the coordinate singularity at the poles by integrating sin(th) directly
    let flat = Manifold::new(chart.clone(), MetricSpec::diagonal(&chart, &["1", "1"]).unwrap()).unwrap();
    let area = quad(&flat, &|p| Ok(p[0].sin()), &grid(32)).unwrap();
    assert!((area - 4.0 * PI).abs() < 1e-2);
}

#[test]
fn periodic_rule_converges_spectrally() {
    let m = torus([2.0 * PI, 1.0], ["1", "1"]);
    let f = |p: &[f64]| Ok(p[0].sin().exp());
    // 2π I0(1)
    let exact = 2.0 * PI * 1.266_065_877_752_008_4;
    let errs: Vec<f64> = [4, 8, 16].iter().map(|&n| (quad(&m, &f, &grid(n)).unwrap() - exact).abs()).collect();
    assert!(errs[0] > 1e-2 && errs[1] < 1e-5 && errs[2] < 1e-13, "{errs:?}");
    assert!(errs[1] < 1e-4 * errs[0]);
}

#[test]
fn green_residuals_on_the_torus() {
    let m = torus([2.0 * PI, 2.0 * PI], ["1", "1"]);
    let g = GridSpec::uniform(2, 64).unwrap();
    for comps in [["cos(x)", "sin(y)"], ["sin(x)^2 + sin(2*y)", "0"], ["exp(sin(x))", "cos(x) * sin(y)"]] {
        let xi = VectorFieldSpec::parse(m.chart(), &comps).unwrap();
        assert!(green_check(&m, &xi, &g).unwrap().residual.abs() < 1e-10, "{comps:?}");
        assert!(log_rate_green_check(&m, &xi, &g).unwrap().residual.abs() < 1e-10, "{comps:?}");
    }
}

#[test]
fn warped_torus_green_residual() {
    let m = torus([2.0 * PI, 2.0 * PI], ["1 + 0.5 * sin(y)^2", "2 + cos(x)"]);
    let xi = VectorFieldSpec::parse(m.chart(), &["sin(x + y)", "cos(x) * exp(sin(y))"]).unwrap();
    let r = green_check(&m, &xi, &GridSpec::uniform(2, 64).unwrap()).unwrap();
    assert!(r.residual.abs() < 1e-10 && r.abs_integral > 1.0, "{r:?}");
}

#[test]
fn euclidean_box_balance() {
    let m = plane();
    let region = Region::new(m.chart(), vec![Some((-2.0, 2.0)), Some((-2.0, 2.0))]).unwrap();
    let xi = VectorFieldSpec::parse(m.chart(), &["-x", "-y"]).unwrap();
    let g = GridSpec::uniform(2, 16).unwrap();
    // div ξ = -2 over area 16
    let plain = boundary_check(&m, &region, &xi, &g).unwrap();
    assert!((plain.bulk + 32.0).abs() < 1e-12 && (plain.boundary + 32.0).abs() < 1e-12);
    // div((div ξ) ξ) = 4 over area 16
    let log_rate = boundary_check(&m, &region, &LogRateField::new(&m, &xi), &g).unwrap();
    assert!((log_rate.bulk - 64.0).abs() < 1e-12 && (log_rate.boundary - 64.0).abs() < 1e-12);
    assert_eq!(log_rate.faces.len(), 4);
}

#[test]
fn unbounded_axis_needs_a_region() {
    let m = plane();
    assert!(Region::whole(m.chart()).is_err());
    assert!(green_check(&m, &VectorFieldSpec::zero(m.chart()), &grid(8)).is_err());
}

#[test]
fn truncated_l1_of_a_gaussian_stabilises() {
    let m = plane();
    let x = VectorFieldSpec::parse(m.chart(), &["exp(-(x^2 + y^2) / 2)", "0"]).unwrap();
    let region = Region::new(m.chart(), vec![Some((-6.0, 6.0)), Some((-6.0, 6.0))]).unwrap();
    let study = l1_growth_study(&m, &x, &region, 4.0 / 3.0, &GridSpec::uniform(2, 64).unwrap()).unwrap();
    assert_eq!(study.outer.bounds, vec![Some((-8.0, 8.0)), Some((-8.0, 8.0))]);
    assert!(study.converged, "{study:?}");
    assert!((study.outer.value - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn truncated_l1_of_a_constant_field_grows() {
    let m = plane();
    let x = VectorFieldSpec::parse(m.chart(), &["1", "0"]).unwrap();
    let region = Region::new(m.chart(), vec![Some((-6.0, 6.0)), Some((-6.0, 6.0))]).unwrap();
    let study = l1_growth_study(&m, &x, &region, 4.0 / 3.0, &GridSpec::uniform(2, 16).unwrap()).unwrap();
    assert!(!study.converged);
    assert!((study.inner.value - 144.0).abs() < 1e-9 && (study.outer.value - 256.0).abs() < 1e-9);
}

#[test]
fn summation_is_thread_count_independent() {
    let m = torus([2.0 * PI, 2.0 * PI], ["1 + 0.5 * sin(y)^2", "2 + cos(x)"]);
    let f = |p: &[f64]| Ok((p[0] * 3.0).sin() + p[1].cos().exp());
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| quad(&m, &f, &grid(48)).unwrap());
    let b = four.install(|| quad(&m, &f, &grid(48)).unwrap());
    assert_eq!(a.to_bits(), b.to_bits());
}
