//! Time evolution and dynamical observables: position distributions,
//! spreading moments, overall probability, distribution similarity, and
//! preparation of no-loss initial states.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{CoreError, Result};
use crate::linalg;
use crate::model::{Boundary, FloquetOperator, Lattice, SpinorState};
use crate::spectral::{NoLossState, SpectrumResult};

/// Iterate the walk, returning all states t = 0..=t_max (unnormalized).
pub fn evolve(
    initial: &SpinorState,
    op: &FloquetOperator,
    t_max: usize,
) -> Result<Vec<SpinorState>> {
    let lattice = initial.lattice();
    if lattice.boundary() == Boundary::Open && lattice.size() < 2 * t_max + 5 {
        return Err(CoreError::InvalidLattice(format!(
            "open lattice of {} sites cannot hold {} steps without edge effects (needs >= {})",
            lattice.size(),
            t_max,
            2 * t_max + 5
        )));
    }
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(initial.clone());
    for _ in 0..t_max {
        let next = op.apply(out.last().unwrap());
        out.push(next);
    }
    Ok(out)
}

/// Normalized position distribution P(x).
pub fn position_distribution(state: &SpinorState) -> Result<Vec<f64>> {
    let total = state.norm_sq();
    if total <= 0.0 {
        return Err(CoreError::InvalidState("zero state has no distribution".into()));
    }
    Ok(state.site_weights().iter().map(|w| w / total).collect())
}

pub fn mean_position(p: &[f64], lattice: Lattice) -> f64 {
    p.iter()
        .enumerate()
        .map(|(i, v)| v * lattice.coord(i) as f64)
        .sum()
}

/// Uncentered second moment <x^2>.
pub fn second_moment(p: &[f64], lattice: Lattice) -> f64 {
    p.iter()
        .enumerate()
        .map(|(i, v)| {
            let x = lattice.coord(i) as f64;
            v * x * x
        })
        .sum()
}

/// Centered spread sigma = sqrt(<x^2> - <x>^2).
pub fn standard_deviation(p: &[f64], lattice: Lattice) -> f64 {
    let m = mean_position(p, lattice);
    (second_moment(p, lattice) - m * m).max(0.0).sqrt()
}

/// Overall probability: the squared norm (growth factor under non-unitary
/// evolution).
pub fn overall_probability(state: &SpinorState) -> f64 {
    state.norm_sq()
}

/// Per-step observables of a trajectory.
#[derive(Clone, Debug)]
pub struct ObservableSeries {
    pub distributions: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub overall_p: Vec<f64>,
}

pub fn observables(trajectory: &[SpinorState]) -> Result<ObservableSeries> {
    let mut out = ObservableSeries {
        distributions: Vec::with_capacity(trajectory.len()),
        sigma: Vec::with_capacity(trajectory.len()),
        second_moment: Vec::with_capacity(trajectory.len()),
        mean_x: Vec::with_capacity(trajectory.len()),
        overall_p: Vec::with_capacity(trajectory.len()),
    };
    for state in trajectory {
        let lattice = state.lattice();
        let p = position_distribution(state)?;
        out.sigma.push(standard_deviation(&p, lattice));
        out.second_moment.push(second_moment(&p, lattice));
        out.mean_x.push(mean_position(&p, lattice));
        out.overall_p.push(overall_probability(state));
        out.distributions.push(p);
    }
    Ok(out)
}

/// Bhattacharyya-squared overlap of two normalized distributions.
pub fn similarity(p_a: &[f64], p_b: &[f64]) -> Result<f64> {
    if p_a.len() != p_b.len() {
        return Err(CoreError::InvalidState("distribution lengths differ".into()));
    }
    for (name, p) in [("first", p_a), ("second", p_b)] {
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidState(format!(
                "{name} distribution is not normalized (sum = {total})"
            )));
        }
    }
    let s: f64 = p_a
        .iter()
        .zip(p_b.iter())
        .map(|(a, b)| (a * b).max(0.0).sqrt())
        .sum();
    Ok(s * s)
}

/// Resample a distribution as Poisson photon counts with the given expected
/// total, then renormalize. Empirical-noise stand-in for detector statistics.
pub fn poisson_resample<R: Rng + ?Sized>(
    p: &[f64],
    total_counts: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if total_counts <= 0.0 {
        return Err(CoreError::InvalidParams("total_counts must be positive".into()));
    }
    let mut counts = vec![0.0f64; p.len()];
    let mut sum = 0.0;
    for (c, &prob) in counts.iter_mut().zip(p.iter()) {
        let mean = prob * total_counts;
        if mean > 0.0 {
            let draw = Poisson::new(mean)
                .map_err(|e| CoreError::InvalidParams(format!("poisson mean {mean}: {e}")))?
                .sample(rng);
            *c = draw;
            sum += draw;
        }
    }
    if sum == 0.0 {
        return Err(CoreError::InvalidState("all resampled counts are zero".into()));
    }
    Ok(counts.into_iter().map(|c| c / sum).collect())
}

/// Single-site initial state built from the most concentrated no-loss
/// eigenstate: project onto its peak site and renormalize.
pub fn prepare_no_loss_initial(
    spectrum: &SpectrumResult,
    lattice: Lattice,
    tolerance: f64,
) -> Result<(SpinorState, NoLossState)> {
    let candidates = crate::spectral::find_no_loss_states(spectrum, lattice, tolerance)?;
    let best = candidates
        .into_iter()
        .max_by(|a, b| {
            a.peak_probability
                .total_cmp(&b.peak_probability)
                .then(b.center.cmp(&a.center))
        })
        .ok_or(CoreError::NoNoLossState {
            tolerance,
            closest: spectrum.min_abs_log_modulus,
        })?;
    let vectors = spectrum
        .eigenvectors
        .as_ref()
        .expect("find_no_loss_states already required eigenvectors");
    let slot = lattice
        .slot(best.center)
        .expect("localization center lies on the lattice");
    let spinor = [
        vectors[[2 * slot, best.index]],
        vectors[[2 * slot + 1, best.index]],
    ];
    let mut state = SpinorState::point(lattice, best.center, spinor)?;
    state.normalize();
    Ok((state, best))
}

/// Expansion weights of a trajectory on a chosen eigenstate.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    /// Eigenbasis condition number (sigma_max / sigma_min).
    pub condition: f64,
    /// Weight on the chosen eigenstate at t = 0.
    pub initial_weight: f64,
    /// Per step t = 0..=t_max: (weight on chosen state, total weight).
    pub per_step: Vec<(f64, f64)>,
}

/// Expand the evolving state in the (generally non-orthogonal) eigenbasis
/// and report how much stays on the chosen mode.
pub fn short_time_projection_check(
    initial: &SpinorState,
    spectrum: &SpectrumResult,
    chosen: usize,
    t_max: usize,
    condition_cap: f64,
) -> Result<ProjectionReport> {
    let vectors = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| CoreError::InvalidState("spectrum carries no eigenvectors".into()))?;
    let d = vectors.dim().0;
    if initial.amplitudes.len() != d {
        return Err(CoreError::InvalidState("state/spectrum dimension mismatch".into()));
    }
    let condition = linalg::one_norm_condition(vectors)?;
    if condition > condition_cap {
        return Err(CoreError::IllConditionedEigenbasis { condition });
    }
    let lu = linalg::lu_factorize(vectors)?;
    let rhs: Vec<C64> = initial.amplitudes.iter().copied().collect();
    let coeffs = lu.solve(&rhs)?;
    let mut per_step = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut total = 0.0;
        let mut on_chosen = 0.0;
        for (m, c) in coeffs.iter().enumerate() {
            let z = spectrum.eigenvalues[m];
            let w = (c * z.powu(t as u32)).norm_sqr();
            total += w;
            if m == chosen {
                on_chosen = w;
            }
        }
        per_step.push((on_chosen / total, total));
    }
    Ok(ProjectionReport {
        condition,
        initial_weight: per_step[0].0,
        per_step,
    })
}

/// Convenience: evolve on the lattice of `initial` and return the overall
/// probability series (t = 0..=t_max), used by growth-contrast experiments.
pub fn overall_probability_series(
    initial: &SpinorState,
    op: &FloquetOperator,
    t_max: usize,
) -> Result<Vec<f64>> {
    Ok(evolve(initial, op, t_max)?
        .iter()
        .map(overall_probability)
        .collect())
}

/// Random normalized state, for growth-contrast experiments.
pub fn random_state<R: Rng + ?Sized>(lattice: Lattice, rng: &mut R) -> SpinorState {
    let mut s = SpinorState::zeros(lattice);
    let n = 2 * lattice.size();
    let mut v = Array1::zeros(n);
    for a in v.iter_mut() {
        *a = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    }
    s.amplitudes = v;
    s.normalize();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FluxSpec, ModelParams, Variant};

    fn golden_params(l1: f64, l2: f64, eta: f64) -> ModelParams {
        ModelParams::new(l1, l2, 0.0, eta, FluxSpec::golden()).unwrap()
    }

    #[test]
    fn zero_steps_returns_initial_only() {
        let lat = Lattice::open(9).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let op = FloquetOperator::new(golden_params(0.5, 0.5, 0.0), lat, Variant::Standard)
            .unwrap();
        let traj = evolve(&init, &op, 0).unwrap();
        assert_eq!(traj.len(), 1);
        assert!((traj[0].norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_norm_is_conserved() {
        let lat = Lattice::open_for_steps(8).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let op = FloquetOperator::new(golden_params(0.67, 0.2, 0.0), lat, Variant::Standard)
            .unwrap();
        for s in evolve(&init, &op, 8).unwrap() {
            assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_too_small_rejected() {
        let lat = Lattice::open(9).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let op = FloquetOperator::new(golden_params(0.5, 0.5, 0.0), lat, Variant::Standard)
            .unwrap();
        assert!(evolve(&init, &op, 10).is_err());
    }

    #[test]
    fn ballistic_profile_is_double_peaked() {
        let lat = Lattice::open_for_steps(6).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let op = FloquetOperator::new(golden_params(0.67, 0.2, 0.0), lat, Variant::Standard)
            .unwrap();
        let traj = evolve(&init, &op, 6).unwrap();
        let p = position_distribution(&traj[6]).unwrap();
        let peak = p
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| lat.coord(i))
            .unwrap();
        assert!(peak.unsigned_abs() >= 3, "ballistic peak at {peak}");
    }

    #[test]
    fn moment_reference_values() {
        let lat = Lattice::open(9).unwrap();
        let point = SpinorState::default_initial(lat).unwrap();
        let p = position_distribution(&point).unwrap();
        assert!(standard_deviation(&p, lat) < 1e-12);
        assert!(second_moment(&p, lat) < 1e-12);

        let r = 0.5f64.sqrt();
        let mut two = SpinorState::zeros(lat);
        let a = lat.slot(-1).unwrap();
        let b = lat.slot(1).unwrap();
        two.amplitudes[2 * a] = C64::new(r, 0.0);
        two.amplitudes[2 * b] = C64::new(r, 0.0);
        let p = position_distribution(&two).unwrap();
        assert!((standard_deviation(&p, lat) - 1.0).abs() < 1e-12);
        assert!((second_moment(&p, lat) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_state_rejected() {
        let lat = Lattice::open(9).unwrap();
        let z = SpinorState::zeros(lat);
        assert!(position_distribution(&z).is_err());
    }

    #[test]
    fn similarity_bounds_and_extremes() {
        let a = vec![0.25, 0.25, 0.5];
        assert!((similarity(&a, &a).unwrap() - 1.0).abs() < 1e-14);
        let b = vec![0.5, 0.5, 0.0];
        let c = vec![0.0, 0.0, 1.0];
        assert!(similarity(&b, &c).unwrap() < 1e-14);
        let bad = vec![0.5, 0.4, 0.0];
        assert!(similarity(&a, &bad).is_err());
    }

    #[test]
    fn poisson_resample_is_close_at_high_counts() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let p = vec![0.1, 0.2, 0.3, 0.25, 0.15];
        let q = poisson_resample(&p, 2e7, &mut rng).unwrap();
        let s = similarity(&p, &q).unwrap();
        assert!(s > 0.999, "similarity {s}");
    }
}
