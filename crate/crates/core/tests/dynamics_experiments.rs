//! Dynamical signatures: ballistic vs localized spreading, directional flow
//! and growth in the broken phase, no-loss-state dynamics, and the
//! photon-count resampling check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uamo_core::dynamics::{
    evolve, observables, overall_probability_series, poisson_resample, prepare_no_loss_initial,
    random_state, short_time_projection_check, similarity,
};
use uamo_core::spectral::{eigendecompose, linear_fit, NO_LOSS_TOL};
use uamo_core::{FloquetOperator, FluxSpec, Lattice, ModelParams, SpinorState, Variant};

fn golden(l1: f64, l2: f64, eta: f64) -> ModelParams {
    ModelParams::new(l1, l2, 0.0, eta, FluxSpec::golden()).unwrap()
}

fn run_observables(l1: f64, l2: f64, eta: f64, t_max: usize, n: usize) -> uamo_core::dynamics::ObservableSeries {
    let lat = Lattice::open(n).unwrap();
    let init = SpinorState::default_initial(lat).unwrap();
    let op = FloquetOperator::new(golden(l1, l2, eta), lat, Variant::Standard).unwrap();
    observables(&evolve(&init, &op, t_max).unwrap()).unwrap()
}

#[test]
fn metallic_spread_is_linear_localized_is_flat() {
    let m = run_observables(0.67, 0.2, 0.0, 50, 128);
    let ts: Vec<f64> = (5..=50).map(|t| t as f64).collect();
    let (slope, _, r2) = linear_fit(&ts, &m.sigma[5..=50]);
    assert!(slope > 0.3, "ballistic slope {slope}");
    assert!(r2 > 0.99, "ballistic fit R^2 {r2}");

    let l = run_observables(0.2, 0.67, 0.0, 50, 128);
    let max_sigma = l.sigma.iter().fold(0.0f64, |a, &b| a.max(b));
    assert!(
        max_sigma < 2.0 * l.sigma[6],
        "localized plateau violated: max {max_sigma} vs 2 sigma(6) = {}",
        2.0 * l.sigma[6]
    );
}

#[test]
fn broken_phase_flows_right_and_grows() {
    let m = run_observables(0.5, 0.25, 0.05, 6, 17);
    for t in 1..=6 {
        assert!(m.overall_p[t] > m.overall_p[t - 1], "P(t) not monotone at t = {t}");
    }
    for t in 3..=6 {
        assert!(m.mean_x[t] > m.mean_x[t - 1], "<x> not increasing at t = {t}");
    }
    // growth rate of ln P is positive (exponential-like amplification)
    let ts: Vec<f64> = (0..=6).map(|t| t as f64).collect();
    let lnp: Vec<f64> = m.overall_p.iter().map(|p| p.ln()).collect();
    let (rate, _, _) = linear_fit(&ts, &lnp);
    assert!(rate > 0.05, "growth rate {rate}");

    let l = run_observables(0.25, 0.5, 0.05, 6, 17);
    let max = l.overall_p.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = l.overall_p.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    assert!(max / min < 1.5, "unbroken pair drifted by {}", max / min);
}

#[test]
fn poisson_resampled_similarity_stays_high() {
    let lat = Lattice::open_for_steps(6).unwrap();
    let init = SpinorState::default_initial(lat).unwrap();
    let op = FloquetOperator::new(golden(0.67, 0.2, 0.0), lat, Variant::Standard).unwrap();
    let traj = evolve(&init, &op, 6).unwrap();
    let obs = observables(&traj).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20000);
    let mut sims = Vec::new();
    for _ in 0..100 {
        let mut worst = f64::INFINITY;
        for t in 1..=6 {
            let resampled = poisson_resample(&obs.distributions[t], 20000.0, &mut rng).unwrap();
            worst = worst.min(similarity(&obs.distributions[t], &resampled).unwrap());
        }
        sims.push(worst);
    }
    let mean = sims.iter().sum::<f64>() / sims.len() as f64;
    let var = sims.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / sims.len() as f64;
    let bound = mean - 3.0 * var.sqrt();
    assert!(bound > 0.9, "similarity mean {mean}, 3-sigma lower bound {bound}");
}

#[test]
fn no_loss_preparation_controls_growth_between_transitions() {
    let flux = FluxSpec::approximant(55, 89).unwrap();
    let lat = Lattice::periodic(89, flux).unwrap();
    let p = ModelParams::new(0.25, 0.5, 0.0, 0.135, flux).unwrap();
    let op = FloquetOperator::new(p, lat, Variant::Standard).unwrap();
    let spec = eigendecompose(&op, true).unwrap();

    let (prepared, chosen) = prepare_no_loss_initial(&spec, lat, NO_LOSS_TOL).unwrap();
    // single-site spinor by construction
    let weights = prepared.site_weights();
    let support = weights.iter().filter(|w| **w > 1e-12).count();
    assert_eq!(support, 1);
    assert!(chosen.quasienergy.im.abs() < NO_LOSS_TOL);

    let series = overall_probability_series(&prepared, &op, 6).unwrap();
    let max = series.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = series.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    assert!(max / min < 3.0, "no-loss band {}", max / min);

    // a generic initial state keeps growing instead
    let default_series =
        overall_probability_series(&SpinorState::default_initial(lat).unwrap(), &op, 6).unwrap();
    for t in 1..=6 {
        assert!(
            default_series[t] > default_series[t - 1],
            "generic state stopped growing at t = {t}"
        );
    }
    assert!(default_series[6] > max, "generic growth should exceed the no-loss band");
}

#[test]
fn beyond_second_transition_everything_amplifies() {
    let flux = FluxSpec::approximant(55, 89).unwrap();
    let lat = Lattice::periodic(89, flux).unwrap();
    let p = ModelParams::new(0.25, 0.5, 0.0, 0.335, flux).unwrap();
    let op = FloquetOperator::new(p, lat, Variant::Standard).unwrap();
    let spec = eigendecompose(&op, true).unwrap();

    assert!(prepare_no_loss_initial(&spec, lat, NO_LOSS_TOL).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut states = vec![SpinorState::default_initial(lat).unwrap()];
    for _ in 0..5 {
        states.push(random_state(lat, &mut rng));
    }
    for st in &states {
        let series = overall_probability_series(st, &op, 6).unwrap();
        for t in 3..=6 {
            assert!(
                series[t] > series[t - 1] * 1.0,
                "amplification stalled at t = {t}: {} -> {}",
                series[t - 1],
                series[t]
            );
        }
        assert!(series[6] / series[0] > 10.0, "growth {}", series[6] / series[0]);
    }
}

#[test]
fn projection_check_separates_no_loss_from_bulk() {
    let flux = FluxSpec::approximant(55, 89).unwrap();
    let lat = Lattice::periodic(89, flux).unwrap();
    let p = ModelParams::new(0.25, 0.5, 0.0, 0.135, flux).unwrap();
    let op = FloquetOperator::new(p, lat, Variant::Standard).unwrap();
    let spec = eigendecompose(&op, true).unwrap();
    let (prepared, chosen) = prepare_no_loss_initial(&spec, lat, NO_LOSS_TOL).unwrap();
    let report = short_time_projection_check(&prepared, &spec, chosen.index, 6, 1e12).unwrap();
    // the prepared state keeps a dominant share on the chosen mode
    assert!(report.initial_weight > 0.05, "initial weight {}", report.initial_weight);
    let w6 = report.per_step[6].0;
    assert!(w6 > report.initial_weight / 3.0, "weight decayed too fast: {w6}");
}
