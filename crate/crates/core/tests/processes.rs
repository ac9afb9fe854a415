use membrane::montecarlo::samplers::{killed_ladder_marginal, killed_reflected_marginal};
use membrane::montecarlo::{marginal_convergence, par_map, McOptions, McReport};
use membrane::processes::{
    first_hitting, sample_geometric, sample_hard_membrane, sample_skew_bm, skew_step, Barrier,
    EulerStepper, HardMembraneParams, SkewParams,
};
use membrane::rng::Channel;
use membrane::stats::{
    half_normal_cdf, ks_critical, ks_critical_two_sample, ks_statistic, ks_two_sample, KsLevel,
};
use membrane::wiener::{BridgeExtrema, Increments};
use membrane::{Path, RngStream, TimeGrid};

const Z: f64 = 3.0;

#[test]
fn fully_reflecting_skew_is_half_normal() {
    let grid = TimeGrid::new(1.0, 10).unwrap();
    let p = SkewParams::new(1.0).unwrap();
    let xs: Vec<f64> = par_map(100_000, None, |i| {
        sample_skew_bm(&grid, 0.0, p, RngStream::new(3, i)).last()
    })
    .unwrap();
    assert!(xs.iter().all(|&x| x > 0.0));
    let d = ks_statistic(&xs, |y| half_normal_cdf(y, 1.0)).unwrap();
    assert!(d <= ks_critical(xs.len(), KsLevel::OnePercent), "ks {d}");
}

#[test]
fn skew_chapman_kolmogorov() {
    let (x0, dt, gamma) = (0.3, 0.25, -0.6);
    let n = 100_000;
    let one: Vec<f64> = (0..n)
        .map(|i| {
            skew_step(
                x0,
                2.0 * dt,
                gamma,
                RngStream::new(10, i).rng(Channel::Inversion).open01(),
            )
        })
        .collect();
    let two: Vec<f64> = (0..n)
        .map(|i| {
            let mut u = RngStream::new(11, i).rng(Channel::Inversion);
            let mid = skew_step(x0, dt, gamma, u.open01());
            skew_step(mid, dt, gamma, u.open01())
        })
        .collect();
    let d = ks_two_sample(&one, &two).unwrap();
    assert!(
        d <= ks_critical_two_sample(n as usize, n as usize, KsLevel::OnePercent),
        "ks {d}"
    );
}

#[test]
fn completed_phases_have_exponential_local_time() {
    // total local time does not depend on the thresholds, so on {l(T) >= c}
    // a first phase shorter than c is an Exp(rate) draw truncated to [0, c)
    let grid = TimeGrid::new(1.0, 10_000).unwrap();
    let c = 0.5;
    for (sign, rate, n) in [(1, 3.0, 25_000), (-1, 1.5, 36_000)] {
        let params = HardMembraneParams::new(3.0, 1.5, sign).unwrap();
        let phases: Vec<f64> = par_map(n, None, |i| {
            let hm = sample_hard_membrane(&grid, 0.0, params, RngStream::new(21, i)).unwrap();
            match hm.phase_local_times.first() {
                Some(&ell) if ell < c && hm.local_time.last() >= c => Some(ell),
                _ => None,
            }
        })
        .unwrap()
        .into_iter()
        .flatten()
        .take(10_000)
        .collect();
        assert_eq!(phases.len(), 10_000);
        let mass = 1.0 - (-rate * c).exp();
        let d = ks_statistic(&phases, |y| (1.0 - (-rate * y).exp()) / mass).unwrap();
        assert!(
            d <= ks_critical(phases.len(), KsLevel::OnePercent),
            "rate {rate}: ks {d}"
        );
    }
}

#[test]
fn flip_count_tracks_local_time() {
    let grid = TimeGrid::new(1.0, 10_000).unwrap();
    let alpha = 1.5;
    let params = HardMembraneParams::new(alpha, alpha, 1).unwrap();
    let diffs: Vec<f64> = par_map(10_000, None, |i| {
        let hm = sample_hard_membrane(&grid, 0.0, params, RngStream::new(31, i)).unwrap();
        hm.flip_times.len() as f64 - alpha * hm.local_time.last()
    })
    .unwrap();
    let r = McReport::mean("flips_minus_alpha_l", &diffs, Z)
        .unwrap()
        .against(0.0, Z, 0.0);
    assert!(r.pass, "{r:?}");
}

#[test]
fn scaled_geometric_is_exponential() {
    let eps = 1e-3;
    let xs: Vec<f64> = (0..100_000)
        .map(|i| eps * sample_geometric(eps, RngStream::new(41, i)).unwrap() as f64)
        .collect();
    let d = ks_statistic(&xs, |y| 1.0 - (-y).exp()).unwrap();
    assert!(d <= ks_critical(xs.len(), KsLevel::OnePercent), "ks {d}");
}

#[test]
fn driftless_exit_split_from_scanned_paths() {
    let eps = 0.1;
    let dt = eps * eps / 2500.0;
    let n = 100_000;
    let lower: Vec<bool> = par_map(n, None, |i| {
        let mut st = EulerStepper::new(eps, dt, |_| 0.0, RngStream::new(51, i));
        let mut v = vec![eps];
        while v.last().is_some_and(|&x| x > -eps && x < 2.0 * eps) {
            v.push(st.step());
        }
        let grid = TimeGrid::new(dt * (v.len() - 1) as f64, v.len() - 1).unwrap();
        let hit = first_hitting(&Path::new(grid, v).unwrap(), -eps, 2.0 * eps)
            .unwrap()
            .unwrap();
        hit.barrier == Barrier::Lower
    })
    .unwrap();
    let k = lower.iter().filter(|&&b| b).count();
    let r = McReport::proportion("p_lower", k, n, Z).against(1.0 / 3.0, Z, 0.0);
    assert!(r.pass, "{r:?}");
}

#[test]
fn killed_ladder_approaches_killed_reflection() {
    let t = 0.5;
    let grid = TimeGrid::new(t, 2_000).unwrap();
    let fine = TimeGrid::new(t, 10_000).unwrap();
    let rep = marginal_convergence(
        |eps, s| killed_ladder_marginal(&fine, 0.3, eps, 1.0, t, s),
        |s| Ok(killed_reflected_marginal(&grid, 0.3, 1.0, t, s)),
        &[0.2, 0.1, 0.05],
        &McOptions::new(10_000, 61),
        KsLevel::OnePercent,
    )
    .unwrap();
    assert!(rep.decreasing, "{:?}", rep.distances());
}

/// Exact `(g, l)` of reflected Brownian motion at grid points, using the
/// bridge minimum within each step; `ζ` is the first grid time with
/// `l >= Exp(α)`.
fn brute_force_zeta(alpha: f64, dt: f64, horizon: f64, stream: RngStream) -> Option<f64> {
    let level = stream.rng(Channel::Aux).exponential(alpha);
    let mut inc = Increments::new(stream, dt);
    let mut bridge = BridgeExtrema::new(stream, dt);
    let (mut g, mut l) = (0.0f64, 0.0f64);
    let steps = (horizon / dt).ceil() as u64;
    for k in 1..=steps {
        let b = g + inc.next();
        let m = bridge.min(g, b);
        let push = (-m).max(0.0);
        l += push;
        g = b + push;
        if l >= level {
            return Some(k as f64 * dt);
        }
    }
    None
}

#[test]
#[ignore = "fine-grid oracle for the killing-time transform; about 30 minutes on one core"]
fn killing_time_transform_by_brute_force() {
    let (alpha, theta, dt, horizon) = (1.0, 0.5, 1e-6, 12.0);
    let vals: Vec<(f64, bool)> = par_map(10_000, None, |i| {
        match brute_force_zeta(alpha, dt, horizon, RngStream::new(71, i)) {
            Some(z) => ((-theta * z).exp(), false),
            None => (0.5 * (-theta * horizon).exp(), true),
        }
    })
    .unwrap();
    let censored = vals.iter().filter(|v| v.1).count();
    let xs: Vec<f64> = vals.iter().map(|v| v.0).collect();
    let slack = 0.5 * (-theta * horizon).exp() * censored as f64 / xs.len() as f64;
    let target = alpha / (alpha + (2.0 * theta).sqrt());
    let r = McReport::mean("brute_zeta_transform", &xs, Z)
        .unwrap()
        .against(target, Z, slack);
    println!(
        "estimate={} stderr={} censored={censored} target={target}",
        r.estimate,
        r.stderr.unwrap()
    );
    assert!(r.pass, "{r:?}");
}
