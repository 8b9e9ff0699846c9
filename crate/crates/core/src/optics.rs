//! Wave-plate decomposition of the coin, displacer/partial-polarizer
//! decomposition of the shift, and the lossy realized walk with its
//! probability-reconstruction bookkeeping.
//!
//! Conventions proven against the operator definitions (the published
//! component list carries a few slips, see the decomposition functions):
//! the composite shift identity used here is
//!
//! ```text
//! S_{l1,eta} = exp(2 pi eta) M_E S'_2 h(acos(l1)/2) S'_1 h(0) M_E
//! ```
//!
//! with S'_1 displacing spin-0 one site right, S'_2 displacing spin-1 one
//! site left, and M_E = diag(1, exp(-2 pi eta)) per site.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::model::{
    build_shift, coin_at, Boundary, FloquetOperator, Lattice, Mat2, ModelParams, SpinorState,
    Variant,
};

/// Half-wave plate Jones matrix.
pub fn hwp(phi: f64) -> Mat2 {
    let (s, c) = (2.0 * phi).sin_cos();
    Mat2([
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [C64::new(s, 0.0), C64::new(-c, 0.0)],
    ])
}

/// Quarter-wave plate Jones matrix.
pub fn qwp(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    let off = C64::new(1.0, -1.0) * s * c;
    Mat2([
        [C64::new(c * c, s * s), off],
        [off, C64::new(s * s, c * c)],
    ])
}

/// Plate angles realizing the coin at one site and the shift couplers.
#[derive(Clone, Copy, Debug)]
pub struct WavePlateAngles {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl WavePlateAngles {
    pub fn for_site(x: i64, params: &ModelParams) -> Self {
        let drive = (x as f64 * params.flux.value() + params.theta) * PI;
        WavePlateAngles {
            phi1: PI / 4.0 - drive,
            phi2: PI / 4.0 - params.lambda2.acos() / 2.0,
            phi3: PI / 4.0 + drive,
            theta1: 0.0,
            // half of acos(lambda1): the plate angle that makes the
            // displacer sandwich reproduce the shift couplings exactly
            theta2: params.lambda1.acos() / 2.0,
        }
    }
}

/// Angles plus the max-abs residual of q(phi3) h(phi2) q(phi1) against the
/// coin itself.
pub fn coin_decomposition(x: i64, params: &ModelParams) -> (WavePlateAngles, f64) {
    let angles = WavePlateAngles::for_site(x, params);
    let product = qwp(angles.phi3).mul(&hwp(angles.phi2)).mul(&qwp(angles.phi1));
    let residual = product.max_abs_diff(&coin_at(x, params));
    (angles, residual)
}

/// Dense operator on `lat` from a per-site map yielding (target slot, block).
fn dense_from_blocks(
    lat: Lattice,
    f: impl Fn(usize) -> Vec<(i64, Mat2)>,
) -> Array2<C64> {
    let n = lat.size();
    let d = 2 * n;
    let mut m = Array2::zeros((d, d));
    for i in 0..n {
        for (dx, blk) in f(i) {
            let tgt = lat.slot(lat.coord(i) + dx);
            if let Some(j) = tgt {
                for r in 0..2 {
                    for c in 0..2 {
                        m[[2 * j + r, 2 * i + c]] += blk.0[r][c];
                    }
                }
            }
        }
    }
    m
}

fn spin_diag(a: C64, b: C64) -> Mat2 {
    Mat2([[a, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), b]])
}

/// The product operator of the displacer/plate/partial-polarizer chain and
/// its max-abs residual against the shift, evaluated away from the window
/// edges (the chain is built on a lattice widened by one site per displacer
/// so truncation cannot leak into the comparison window).
pub fn shift_decomposition(params: &ModelParams, lattice: Lattice) -> Result<(Array2<C64>, f64)> {
    if lattice.size() < 5 {
        return Err(CoreError::InvalidLattice(
            "shift decomposition needs at least 5 sites".into(),
        ));
    }
    let eta = params.eta;
    let gain = C64::new((2.0 * PI * eta).exp(), 0.0);
    let me = spin_diag(C64::new(1.0, 0.0), C64::new((-2.0 * PI * eta).exp(), 0.0));
    let theta2 = params.lambda1.acos() / 2.0;
    let h1 = hwp(0.0);
    let h2 = hwp(theta2);

    let build = |lat: Lattice| -> Array2<C64> {
        let m_me = dense_from_blocks(lat, |_| vec![(0, me)]);
        let m_h1 = dense_from_blocks(lat, |_| vec![(0, h1)]);
        let m_h2 = dense_from_blocks(lat, |_| vec![(0, h2)]);
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        // S'_1: spin-0 one site right, spin-1 in place
        let m_s1 = dense_from_blocks(lat, |_| {
            vec![(1, spin_diag(one, zero)), (0, spin_diag(zero, one))]
        });
        // S'_2: spin-1 one site left, spin-0 in place
        let m_s2 = dense_from_blocks(lat, |_| {
            vec![(-1, spin_diag(zero, one)), (0, spin_diag(one, zero))]
        });
        let mut p = m_me.dot(&m_s2).dot(&m_h2).dot(&m_s1).dot(&m_h1).dot(&m_me);
        p.mapv_inplace(|v| v * gain);
        p
    };

    match lattice.boundary() {
        Boundary::Periodic => {
            let product = build(lattice);
            let target = build_shift(params, lattice)?;
            let residual = max_abs_diff(&product, &target);
            Ok((product, residual))
        }
        Boundary::Open => {
            let wide = Lattice::open(lattice.size() + 2)?;
            let product_wide = build(wide);
            let target = build_shift(params, lattice)?;
            let d = 2 * lattice.size();
            let mut product = Array2::zeros((d, d));
            // interior window: slot i of `lattice` = slot i+1 of `wide`
            for i in 0..d {
                for j in 0..d {
                    product[[i, j]] = product_wide[[i + 2, j + 2]];
                }
            }
            let mut residual: f64 = 0.0;
            // compare along columns whose hops stay inside the window; the
            // outermost column on each side feels the widened sites
            for j in 2..(d - 2) {
                for i in 0..d {
                    residual = residual.max((product[[i, j]] - target[[i, j]]).norm());
                }
            }
            Ok((product, residual))
        }
    }
}

/// Per-step loss bookkeeping of the realized walk.
#[derive(Clone, Copy, Debug)]
pub struct LossyStepRecord {
    pub step: usize,
    /// Squared norm after this step.
    pub surviving_norm_sq: f64,
    /// Probability removed by the two mode-selective-loss passes this step.
    pub lost_prob: f64,
    /// Total removed up to and including this step.
    pub cumulative_lost: f64,
}

/// Evolve with the factorized lossy chain, recording the probability removed
/// at each partial-polarizer pass. States are returned unnormalized.
pub fn simulate_lossy_walk(
    initial: &SpinorState,
    params: &ModelParams,
    t_max: usize,
) -> Result<(Vec<SpinorState>, Vec<LossyStepRecord>)> {
    if params.eta < 0.0 {
        return Err(CoreError::InvalidParams(
            "the lossy realization implements loss, not gain: eta must be >= 0".into(),
        ));
    }
    let lattice = initial.lattice();
    if lattice.boundary() == Boundary::Open && lattice.size() < 2 * t_max + 5 {
        return Err(CoreError::InvalidLattice(format!(
            "open lattice of {} sites cannot hold {} steps (needs >= {})",
            lattice.size(),
            t_max,
            2 * t_max + 5
        )));
    }
    let n = lattice.size();
    let periodic = lattice.boundary() == Boundary::Periodic;
    let me_v = (-2.0 * PI * params.eta).exp();
    let theta2 = params.lambda1.acos() / 2.0;
    let (s2t, c2t) = (2.0 * theta2).sin_cos();

    let apply_me = |v: &mut Array1<C64>| -> f64 {
        let mut lost = 0.0;
        for i in 0..n {
            let before = v[2 * i + 1].norm_sqr();
            v[2 * i + 1] *= me_v;
            lost += before - v[2 * i + 1].norm_sqr();
        }
        lost
    };
    let apply_hwp = |v: &mut Array1<C64>, c: f64, s: f64| {
        for i in 0..n {
            let a = v[2 * i];
            let b = v[2 * i + 1];
            v[2 * i] = a * c + b * s;
            v[2 * i + 1] = a * s - b * c;
        }
    };
    let shift_spin0_right = |v: &Array1<C64>| -> Array1<C64> {
        let mut out = Array1::zeros(2 * n);
        for i in 0..n {
            if i + 1 < n {
                out[2 * (i + 1)] = v[2 * i];
            } else if periodic {
                out[0] = v[2 * i];
            }
            out[2 * i + 1] = v[2 * i + 1];
        }
        out
    };
    let shift_spin1_left = |v: &Array1<C64>| -> Array1<C64> {
        let mut out = Array1::zeros(2 * n);
        for i in 0..n {
            if i > 0 {
                out[2 * (i - 1) + 1] = v[2 * i + 1];
            } else if periodic {
                out[2 * (n - 1) + 1] = v[2 * i + 1];
            }
            out[2 * i] = v[2 * i];
        }
        out
    };

    let coins: Vec<Mat2> = (0..n).map(|i| coin_at(lattice.coord(i), params)).collect();

    let mut states = Vec::with_capacity(t_max + 1);
    let mut records = Vec::with_capacity(t_max);
    let mut v = initial.amplitudes.clone();
    states.push(initial.clone());
    let mut cumulative = 0.0;
    for t in 1..=t_max {
        for i in 0..n {
            let r = coins[i].mul_vec([v[2 * i], v[2 * i + 1]]);
            v[2 * i] = r[0];
            v[2 * i + 1] = r[1];
        }
        let mut lost = apply_me(&mut v);
        apply_hwp(&mut v, 1.0, 0.0);
        v = shift_spin0_right(&v);
        apply_hwp(&mut v, c2t, s2t);
        v = shift_spin1_left(&v);
        lost += apply_me(&mut v);
        cumulative += lost;
        let state = SpinorState::from_amplitudes(lattice, v.clone())?;
        records.push(LossyStepRecord {
            step: t,
            surviving_norm_sq: state.norm_sq(),
            lost_prob: lost,
            cumulative_lost: cumulative,
        });
        states.push(state);
    }
    Ok((states, records))
}

/// Reconstruct the overall probability P(t) from loss records:
/// the surviving intensity rescaled by the per-step gain of the ideal walk
/// over the realized one, normalized by total detected intensity.
pub fn reconstruct_overall_probability(records: &[LossyStepRecord], eta: f64) -> Vec<f64> {
    records
        .iter()
        .map(|r| {
            let total = r.surviving_norm_sq + r.cumulative_lost;
            (4.0 * PI * eta * r.step as f64).exp() * r.surviving_norm_sq / total
        })
        .collect()
}

fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max-abs deviation between the rescaled realized trajectory and the ideal
/// one: exp(2 pi eta t) (W_exp)^t psi vs W^t psi.
pub fn realized_vs_ideal_deviation(
    initial: &SpinorState,
    params: &ModelParams,
    t_max: usize,
) -> Result<f64> {
    let lattice = initial.lattice();
    let (states, _) = simulate_lossy_walk(initial, params, t_max)?;
    let ideal = FloquetOperator::new(*params, lattice, Variant::Standard)?;
    let mut psi = initial.clone();
    let mut dev: f64 = 0.0;
    for (t, realized) in states.iter().enumerate().skip(1) {
        psi = ideal.apply(&psi);
        let gain = (2.0 * PI * params.eta * t as f64).exp();
        for i in 0..psi.amplitudes.len() {
            dev = dev.max((realized.amplitudes[i] * gain - psi.amplitudes[i]).norm());
        }
    }
    Ok(dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FluxSpec;

    fn params(l1: f64, l2: f64, theta: f64, eta: f64) -> ModelParams {
        ModelParams::new(l1, l2, theta, eta, FluxSpec::golden()).unwrap()
    }

    #[test]
    fn plate_matrices_at_zero() {
        let h = hwp(0.0);
        assert!((h.0[0][0].re - 1.0).abs() < 1e-15 && (h.0[1][1].re + 1.0).abs() < 1e-15);
        let q = qwp(0.0);
        assert!((q.0[0][0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((q.0[1][1] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn hwp_is_an_involution() {
        for k in 0..20 {
            let phi = 0.1 + 0.31 * k as f64;
            let h = hwp(phi);
            assert!(h.mul(&h).max_abs_diff(&Mat2::identity()) < 1e-14);
        }
    }

    #[test]
    fn coin_decomposition_reference_points() {
        let (_, r) = coin_decomposition(0, &params(0.5, 0.5, 0.0, 0.0));
        assert!(r < 1e-12, "residual {r}");
        let (_, r) = coin_decomposition(0, &params(0.5, 1.0, 0.0, 0.0));
        assert!(r < 1e-12, "lambda2 = 1 residual {r}");
    }

    #[test]
    fn coin_decomposition_sweep() {
        let mut worst: f64 = 0.0;
        let mut s = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for x in -20..=20 {
            let p = params(0.5, rnd(), rnd() * 0.999, 0.0);
            let (_, r) = coin_decomposition(x, &p);
            worst = worst.max(r);
        }
        assert!(worst < 1e-12, "sweep residual {worst}");
    }

    #[test]
    fn shift_decomposition_reference_points() {
        let lat = Lattice::open(11).unwrap();
        for (l1, eta) in [(1.0, 0.0), (0.5, 0.0), (0.5, 0.1)] {
            let (_, r) = shift_decomposition(&params(l1, 0.5, 0.0, eta), lat).unwrap();
            assert!(r < 1e-12, "l1={l1} eta={eta} residual {r}");
        }
    }

    #[test]
    fn lossy_walk_zero_eta_is_unitary() {
        let lat = Lattice::open_for_steps(5).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let p = params(0.5, 0.25, 0.0, 0.0);
        let (states, records) = simulate_lossy_walk(&init, &p, 5).unwrap();
        for r in &records {
            assert!(r.lost_prob.abs() < 1e-14);
            assert!((r.surviving_norm_sq - 1.0).abs() < 1e-12);
        }
        let ideal = FloquetOperator::new(p, lat, Variant::Standard).unwrap();
        let mut psi = init;
        for s in states.iter().skip(1) {
            psi = ideal.apply(&psi);
            for i in 0..psi.amplitudes.len() {
                assert!((psi.amplitudes[i] - s.amplitudes[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn v_polarized_loss_fractions() {
        // lambda1 = 1, lambda2 = 0 keeps a V photon in V; the only decay is
        // the two loss passes: intensity factor exp(-8 pi eta) per step.
        let eta = 0.07;
        let lat = Lattice::open_for_steps(3).unwrap();
        let init =
            SpinorState::point(lat, 0, [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let p = params(1.0, 0.0, 0.0, eta);
        let (_, records) = simulate_lossy_walk(&init, &p, 3).unwrap();
        let per_step = (-8.0 * PI * eta).exp();
        for (t, r) in records.iter().enumerate() {
            let expect = per_step.powi(t as i32 + 1);
            assert!(
                (r.surviving_norm_sq - expect).abs() < 1e-12,
                "step {} surviving {} vs {}",
                t + 1,
                r.surviving_norm_sq,
                expect
            );
        }
        assert!((records[0].lost_prob - (1.0 - per_step)).abs() < 1e-12);
    }

    #[test]
    fn probability_accounting_closes() {
        let lat = Lattice::open_for_steps(6).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let p = params(0.25, 0.5, 0.0, 0.05);
        let (_, records) = simulate_lossy_walk(&init, &p, 6).unwrap();
        for r in &records {
            assert!((r.surviving_norm_sq + r.cumulative_lost - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_matches_ideal_overall_probability() {
        let lat = Lattice::open_for_steps(6).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        for (l1, l2) in [(0.25, 0.5), (0.5, 0.25)] {
            let p = params(l1, l2, 0.0, 0.05);
            let (_, records) = simulate_lossy_walk(&init, &p, 6).unwrap();
            let rec = reconstruct_overall_probability(&records, 0.05);
            let ideal = FloquetOperator::new(p, lat, Variant::Standard).unwrap();
            let mut psi = init.clone();
            for (t, r) in rec.iter().enumerate() {
                psi = ideal.apply(&psi);
                assert!(
                    (r - psi.norm_sq()).abs() < 1e-10,
                    "t={} rec {} ideal {}",
                    t + 1,
                    r,
                    psi.norm_sq()
                );
            }
        }
    }

    #[test]
    fn eta_zero_reconstruction_is_flat() {
        let lat = Lattice::open_for_steps(5).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let (_, records) = simulate_lossy_walk(&init, &params(0.4, 0.6, 0.0, 0.0), 5).unwrap();
        for v in reconstruct_overall_probability(&records, 0.0) {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_eta_rejected() {
        let lat = Lattice::open_for_steps(3).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        assert!(simulate_lossy_walk(&init, &params(0.5, 0.5, 0.0, -0.1), 3).is_err());
    }

    #[test]
    fn realized_equals_ideal_after_rescaling() {
        let lat = Lattice::open_for_steps(6).unwrap();
        let init = SpinorState::default_initial(lat).unwrap();
        let dev = realized_vs_ideal_deviation(&init, &params(0.5, 0.25, 0.0, 0.05), 6).unwrap();
        assert!(dev < 1e-10, "deviation {dev}");
    }
}
