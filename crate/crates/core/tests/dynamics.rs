use enttime::*;

fn fock_excited(n: usize) -> JcmSpec {
    JcmSpec::new(1.0, AtomState::excited(), FieldState::Fock(n)).with_omega(1.0)
}

/// Atom populations for an excited atom and a Fock field are `cos^2` and `sin^2`
/// of `lambda sqrt(N+1) t`, so every Renyi entropy is known in closed form.
fn exact_renyi(n: usize, alpha: u32, t: f64) -> f64 {
    let phase = ((n + 1) as f64).sqrt() * t;
    let (pe, pg) = (phase.cos().powi(2), phase.sin().powi(2));
    (pe.powi(alpha as i32) + pg.powi(alpha as i32)).ln() / (1.0 - alpha as f64)
}

#[test]
fn series_matches_rabi_populations() {
    let (h, s) = build_jcm(&fock_excited(3)).unwrap();
    let grid: Vec<f64> = (0..61).map(|k| k as f64 * 0.05).collect();
    let orders = [EntropyOrder::Renyi(2), EntropyOrder::Renyi(3), EntropyOrder::Renyi(4)];
    let series = entropy_series(&h, &s, &orders, &grid, true).unwrap();
    for (sr, alpha) in series.iter().zip([2, 3, 4]) {
        for (&t, &v) in sr.times.iter().zip(&sr.values) {
            assert!((v - exact_renyi(3, alpha, t)).abs() < 1e-9, "alpha {alpha} t {t}");
        }
    }
    for k in 0..grid.len() {
        assert!(series[0].values[k] >= series[1].values[k] - 1e-12);
        assert!(series[1].values[k] >= series[2].values[k] - 1e-12);
    }
    let spectra = series[0].spectra.as_ref().unwrap();
    assert_eq!(spectra.len(), grid.len());
    assert!(spectra.iter().all(|p| p.windows(2).all(|w| w[0] >= w[1])));
}

#[test]
fn largest_eigenvalue_curvature() {
    // p_1 = 1 - t^2 / T_ent^2 + ..., so d^2 p_1 / dt^2 = -2 T_ent^-2
    let (h, s) = build_jcm(&fock_excited(2)).unwrap();
    let inv_sq = entanglement_timescale(&h, &s).unwrap().t_ent_inv_sq;
    let evolution = Evolution::new(&h, &s).unwrap();
    let p1 = |t: f64| evolution.spectrum_at(t).unwrap().probabilities()[0];
    let step = inv_sq.sqrt().recip() / 50.0;
    let d2 = (-(p1(-2.0 * step) + p1(2.0 * step)) / 12.0 + 4.0 * (p1(-step) + p1(step)) / 3.0 - 2.5 * p1(0.0))
        / (step * step);
    assert!((d2 + 2.0 * inv_sq).abs() / (2.0 * inv_sq) < 1e-3, "{d2}");
}

#[test]
fn short_time_entanglement_is_small() {
    // below the timescale the second Renyi entropy stays under a few percent of ln 2
    let (h, s) = build_jcm(&fock_excited(3)).unwrap();
    let t_ent = entanglement_timescale(&h, &s).unwrap().t_ent.unwrap();
    let evolution = Evolution::new(&h, &s).unwrap();
    let s2 = evolution.entropy_at(EntropyOrder::Renyi(2), 0.1 * t_ent).unwrap();
    let quadratic = 2.0 * 0.01;
    assert!((s2 - quadratic).abs() / quadratic < 1e-2);
    let svn = evolution.entropy_at(EntropyOrder::VonNeumann, 0.1 * t_ent).unwrap();
    assert!(svn > s2);
}

#[test]
fn measured_curvature_uses_timescale_step() {
    let (h, s) = build_jcm(&fock_excited(1)).unwrap();
    let report = entanglement_timescale(&h, &s).unwrap();
    for alpha in [2, 5] {
        let measured = measured_curvature(&h, &s, EntropyOrder::Renyi(alpha), None).unwrap();
        let predicted = predicted_curvature(&report, alpha).unwrap().curvature;
        assert!((measured - predicted).abs() / predicted < 1e-3);
    }
}

#[test]
fn detuned_jcm_keeps_the_timescale() {
    // local terms never enter the covariance sum
    let spec = fock_excited(3).with_omega(7.5);
    let (h, s) = build_jcm(&spec).unwrap();
    let inv_sq = entanglement_timescale(&h, &s).unwrap().t_ent_inv_sq;
    assert!((inv_sq - 4.0).abs() < 1e-12);
}

#[test]
fn truncation_errors_are_reported() {
    let spec = JcmSpec::new(1.0, AtomState::excited(), FieldState::Coherent(C64::new(3.0, 0.0))).with_n_max(10);
    match build_jcm(&spec) {
        Err(Error::Truncation { required_n_max, .. }) => assert!(required_n_max > 10),
        other => panic!("{other:?}"),
    }
    let spec = fock_excited(4).with_n_max(4);
    assert!(matches!(build_jcm(&spec), Err(Error::Truncation { .. })));
}
