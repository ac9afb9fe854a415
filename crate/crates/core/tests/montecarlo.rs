use membrane::drift::{
    builtin_drift, calibrate_l, hitting_prob_analytic, CalibrationMode, DriftFamily,
};
use membrane::montecarlo::{
    crossing_split_mc, estimate_hitting_prob, flip_count_check, zeta_laplace_check,
    ExperimentConfig, McOptions, McReport,
};
use membrane::{Side, TimeGrid};

fn numbers(
    r: &McReport,
) -> (
    f64,
    Option<f64>,
    Option<f64>,
    Option<f64>,
    Option<f64>,
    bool,
) {
    (r.estimate, r.stderr, r.ci_lo, r.ci_hi, r.statistic, r.pass)
}

#[test]
fn wilson_intervals_cover_the_driftless_split() {
    let d = builtin_drift(DriftFamily::Step).unwrap();
    let covered = (0..100u64)
        .filter(|&seed| {
            let r = estimate_hitting_prob(&d, 0.0, 0.1, &McOptions::new(2_000, 500 + seed), None)
                .unwrap();
            r.ci_lo.unwrap() <= 1.0 / 3.0 && 1.0 / 3.0 <= r.ci_hi.unwrap()
        })
        .count();
    assert!(covered >= 99, "covered {covered} of 100");
}

#[test]
fn config_runs_are_independent_of_worker_count() {
    let mut cfg = ExperimentConfig::default();
    cfg.n_paths = 3_000;
    cfg.seed = 4242;
    let d = cfg.drift_spec().unwrap();
    let eps = cfg.experiment.epsilon;
    let l = cfg.strength(&d, eps).unwrap();
    let grid = TimeGrid::new(1.0, 2_000).unwrap();
    let mut runs = Vec::new();
    for threads in [Some(1), Some(3), None] {
        cfg.threads = threads;
        let o = cfg.options();
        runs.push((
            numbers(&estimate_hitting_prob(&d, l, eps, &o, None).unwrap()),
            numbers(&flip_count_check(1.0, &grid, 0.0, &o).unwrap()),
        ));
    }
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn calibrated_hitting_matches_quadrature() {
    let d = builtin_drift(DriftFamily::Step).unwrap();
    let eps = 0.1;
    let l = calibrate_l(&d, 1.0, eps, CalibrationMode::TwoSided)
        .unwrap()
        .l_epsilon;
    let exact = hitting_prob_analytic(&d, l, eps, Side::Positive).unwrap();
    // at eps^2/25 the estimate sits about 5 standard errors low
    let r = estimate_hitting_prob(
        &d,
        l,
        eps,
        &McOptions::new(100_000, 9),
        Some(eps * eps / 400.0),
    )
    .unwrap()
    .against(exact, 3.0, 0.0);
    assert!(r.pass, "exact {exact}: {r:?}");
}

#[test]
fn symmetric_and_driftless_splits_are_even() {
    let sym = builtin_drift(DriftFamily::Signpower {
        lambda: 1.0,
        c_plus: 1.0,
        c_minus: 1.0,
    })
    .unwrap();
    let eps = 0.1;
    let l = calibrate_l(&sym, 1.0, eps, CalibrationMode::TwoSided)
        .unwrap()
        .l_epsilon;
    let r = crossing_split_mc(&sym, l, eps, &McOptions::new(20_000, 13), None).unwrap();
    assert!(
        r.pass && r.critical.unwrap() <= 3.0 * r.stderr.unwrap() + 1e-12,
        "{r:?}"
    );
    let r = crossing_split_mc(&sym, 0.0, eps, &McOptions::new(20_000, 14), None).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn zeta_transform_tends_to_one_as_theta_vanishes() {
    let mut last = 0.0;
    for theta in [0.5, 0.05, 0.005] {
        let r = zeta_laplace_check(1.0, theta, &McOptions::new(10_000, 15), 1e-3).unwrap();
        assert!(r.pass, "theta {theta}: {r:?}");
        assert!(r.estimate > last);
        last = r.estimate;
    }
    assert!(last > 0.88);
}

#[test]
fn doubling_the_rate_doubles_the_flips() {
    let grid = TimeGrid::new(1.0, 5_000).unwrap();
    let o = McOptions::new(5_000, 16);
    let one = flip_count_check(1.0, &grid, 0.0, &o).unwrap();
    let two = flip_count_check(2.0, &grid, 0.0, &o).unwrap();
    assert!(one.pass && two.pass);
    let ratio = two.estimate / one.estimate;
    let se = ratio
        * ((two.stderr.unwrap() / two.estimate).powi(2)
            + (one.stderr.unwrap() / one.estimate).powi(2))
        .sqrt();
    assert!((ratio - 2.0).abs() <= 3.0 * se, "ratio {ratio} se {se}");
}
