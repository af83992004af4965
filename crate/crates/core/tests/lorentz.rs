use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volex_core::geometry::{Chart, Extent, Manifold, MetricSpec, Signature};
use volex_core::integrate::GridSpec;
use volex_core::lorentz::{
    causal_classify, energy_condition_scan, extrinsic_geometry, raychaudhuri_residual, slice_diagnostics,
    slice_integral, CausalType, DiagnosticInputs, SliceSamples, SliceSpec,
};
use volex_core::verdict::Verdict;
use volex_core::Error;

const NAMES: [&str; 4] = ["t", "x", "y", "z"];

fn closed_chart(t: (f64, f64)) -> Chart {
    let mut extents = vec![Extent::Bounded(t.0, t.1)];
    extents.extend([Extent::Periodic(1.0); 3]);
    Chart::new(&NAMES, Signature::Lorentzian, extents).unwrap()
}

fn slice(diag: [&str; 4], t: (f64, f64), at: f64) -> SliceSpec {
    let chart = closed_chart(t);
    let g = MetricSpec::diagonal(&chart, &diag).unwrap();
    SliceSpec::new(Manifold::new(chart, g).unwrap(), 0, at).unwrap()
}

fn matter() -> SliceSpec {
    slice(["-1", "t^(4/3)", "t^(4/3)", "t^(4/3)"], (0.5, 3.0), 1.0)
}

#[test]
fn causal_character_of_vectors() {
    let m = matter().manifold().clone();
    let p = [1.0, 0.0, 0.0, 0.0];
    let time = causal_classify(&m, &[1.0, 0.0, 0.0, 0.0], &p).unwrap();
    assert_eq!(time.kind, CausalType::Timelike);
    assert_eq!(time.unit, Some(vec![1.0, 0.0, 0.0, 0.0]));
    assert_eq!(causal_classify(&m, &[0.0, 2.0, 0.0, 0.0], &p).unwrap().kind, CausalType::Spacelike);
    let null = causal_classify(&m, &[1.0, 1.0, 0.0, 0.0], &p).unwrap();
    assert_eq!(null.kind, CausalType::Null);
    assert!(null.unit.is_none());
}

#[test]
fn extrinsic_curvature_of_flrw_and_static_slices() {
    let k = extrinsic_geometry(&matter(), &[1.0, 0.1, 0.2, 0.3]).unwrap();
    // K_ij = (1/2) d/dt t^(4/3) δ_ij = (2/3) δ_ij at t = 1
    assert!((k.k[0][0] - 2.0 / 3.0).abs() < 1e-12 && k.k[0][1].abs() < 1e-15);
    assert!((k.theta - 2.0).abs() < 1e-12 && (k.divergence - 2.0).abs() < 1e-12);
    assert!(k.sigma_norm2.abs() < 1e-12);
    let flat = slice(["-1", "1", "1", "1"], (-1.0, 1.0), 0.0);
    assert_eq!(extrinsic_geometry(&flat, &[0.0, 0.5, 0.5, 0.5]).unwrap().max_abs_k(), 0.0);
}

#[test]
fn de_sitter_terms() {
    let s = slice(["-1", "exp(2*t)", "exp(2*t)", "exp(2*t)"], (-1.0, 2.0), 0.0);
    let r = raychaudhuri_residual(&s, &[0.0, 0.3, 0.6, 0.9]).unwrap();
    assert!((r.ricci + 3.0).abs() < 1e-8 && r.shear.abs() < 1e-8);
    assert!((r.expansion - 3.0).abs() < 1e-8 && r.expansion_rate.abs() < 1e-8);
    assert!(r.residual.abs() < 1e-8);
    let scan = energy_condition_scan(&s, &GridSpec::new(vec![4, 8, 8, 8]).unwrap()).unwrap();
    assert_eq!(scan.violation_fraction, 1.0);
    assert!(!scan.satisfied);
}

/// Lapse and spatial metric both vary in space and time, with random coefficients.
fn random_lapse_slice(rng: &mut ChaCha8Rng) -> SliceSpec {
    let mut c = || rng.random_range(-0.3f64..0.3);
    let lapse = format!("(1 + {} * sin(2*pi*x + {} * t) + {} * cos(2*pi*y))^2", c(), c(), c());
    let hx = format!("exp({} * t + {} * sin(2*pi*z))", c(), c());
    let hy = format!("t^(1 + {}) * (1 + {} * cos(2*pi*x))", c(), c());
    let hz = format!("1 + {} * t^2 + {} * sin(2*pi*(x + y))", c().abs(), c());
    let neg = format!("-{lapse}");
    slice([&neg, &hx, &hy, &hz], (0.5, 3.0), 1.0)
}

#[test]
fn identity_holds_for_random_lapse_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let s = random_lapse_slice(&mut rng);
        let p = [rng.random_range(0.8..2.0), rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
        let r = raychaudhuri_residual(&s, &p).unwrap();
        let scale = 1.0 + r.lhs.abs() + r.ricci.abs() + r.expansion_rate.abs();
        assert!(r.residual.abs() < 1e-6 * scale, "{r:?}");
        assert!(r.theta_gap.abs() < 1e-9);
    }
}

#[test]
fn varying_lapse_integral_equals_acceleration_flux() {
    let s = slice(["-(1 + 0.3 * sin(2*pi*x))^2", "t^(4/3)", "t^(4/3)", "t^(4/3)"], (0.5, 3.0), 1.0);
    let r = slice_integral(&s, &GridSpec::new(vec![4, 32, 32, 32]).unwrap()).unwrap();
    assert!(r.acceleration_flux > 1e-2);
    assert!((r.integral - r.acceleration_flux).abs() < 1e-6 * r.volume, "{r:?}");
    assert!((r.lhs_integral - r.acceleration_flux).abs() < 1e-6 * r.volume);
}

#[test]
fn constant_lapse_integral_vanishes() {
    let r = slice_integral(&matter(), &GridSpec::new(vec![4, 32, 32, 32]).unwrap()).unwrap();
    assert!(r.integral.abs() < 1e-6 * r.volume);
    assert!((r.volume - 1.0).abs() < 1e-12);
}

#[test]
fn open_slices_have_no_integral_relation() {
    let chart = Chart::new(&NAMES, Signature::Lorentzian, vec![Extent::Unbounded; 4]).unwrap();
    let g = MetricSpec::diagonal(&chart, &["-1", "1", "1", "1"]).unwrap();
    let s = SliceSpec::new(Manifold::new(chart, g).unwrap(), 0, 0.0).unwrap();
    assert!(matches!(slice_integral(&s, &GridSpec::uniform(4, 8).unwrap()), Err(Error::NotApplicable { .. })));
}

#[test]
fn shift_and_riemannian_charts_rejected() {
    let chart = closed_chart((0.0, 1.0));
    let g =
        MetricSpec::from_lower(&chart, &[vec!["-1"], vec!["0.1", "1"], vec!["0", "0", "1"], vec!["0", "0", "0", "1"]])
            .unwrap();
    assert!(matches!(SliceSpec::new(Manifold::new(chart, g).unwrap(), 0, 0.5), Err(Error::NotLapseForm(_))));
    let chart = Chart::new(&NAMES, Signature::Riemannian, vec![Extent::Unbounded; 4]).unwrap();
    let g = MetricSpec::diagonal(&chart, &["1", "1", "1", "1"]).unwrap();
    assert!(SliceSpec::new(Manifold::new(chart, g).unwrap(), 0, 0.0).is_err());
}

fn inputs(s: &SliceSpec) -> DiagnosticInputs {
    let grid = s.grid(None, &GridSpec::new(vec![4, 6, 6, 6]).unwrap()).unwrap();
    DiagnosticInputs {
        dim: 4,
        slice_closed: s.is_closed(),
        spacetime_closed: false,
        samples: SliceSamples::collect(s, &grid).unwrap(),
        region: None,
        flow: None,
    }
}

fn statement<'a>(r: &'a volex_core::lorentz::SliceDiagnostics, name: &str) -> &'a volex_core::verdict::StatementReport {
    r.statements.iter().find(|s| s.statement == name).unwrap()
}

#[test]
fn matter_flrw_fails_the_rate_hypothesis_with_witness() {
    let report = slice_diagnostics(&inputs(&matter()));
    let t1 = statement(&report, "closed_slice_excluded");
    assert_eq!(t1.verdict, Verdict::NotApplicable);
    let rate = t1.hypotheses.iter().find(|h| h.name.starts_with("L_xi(div xi) >= 0")).unwrap();
    assert!(!rate.holds);
    let w = rate.witness.as_ref().unwrap();
    assert!((w.value + 2.0).abs() < 1e-9 && w.point[0] == 1.0);
}

#[test]
fn static_flat_slice_is_totally_geodesic() {
    let s = slice(["-1", "1", "1", "1"], (-1.0, 1.0), 0.0);
    let report = slice_diagnostics(&inputs(&s));
    for name in ["totally_geodesic_slice", "totally_geodesic_slice_4d"] {
        assert_eq!(statement(&report, name).verdict, Verdict::ConclusionConsistent, "{name}");
    }
    // no point with strictly positive rate, so the non-closure statements do not apply
    assert_eq!(statement(&report, "closed_slice_excluded").verdict, Verdict::NotApplicable);
}

#[test]
fn inconsistent_samples_are_contradictions() {
    let s = slice(["-1", "1", "1", "1"], (-1.0, 1.0), 0.0);
    let mut input = inputs(&s);
    input.samples.values[3].expansion_rate = 1.0;
    input.samples.values[5].max_abs_k = 0.5;
    let report = slice_diagnostics(&input);
    assert_eq!(statement(&report, "closed_slice_excluded").verdict, Verdict::Contradiction);
    assert_eq!(statement(&report, "totally_geodesic_slice").verdict, Verdict::Contradiction);
    for st in &report.statements {
        assert_eq!(st.applicable, st.hypotheses.iter().all(|h| h.holds), "{}", st.statement);
    }
}
