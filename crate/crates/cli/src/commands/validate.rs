//! `validate`: the definitional identity suite. Exit code 1 if any check
//! fails; the per-check report goes to stdout (and to disk with --out).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

use uamo_core::analytics::{
    hatano_nelson_lyapunov, hn_on_spectrum_energies, transfer_matrix_lyapunov_hn,
    HatanoNelsonParams,
};
use uamo_core::dynamics::similarity;
use uamo_core::optics::{
    coin_decomposition, hwp, qwp, realized_vs_ideal_deviation, reconstruct_overall_probability,
    shift_decomposition, simulate_lossy_walk, WavePlateAngles,
};
use uamo_core::spectral::{dense_spectrum_unchecked, spectral_matching_distance};
use uamo_core::{
    coin_at, verify_pt_symmetry, FloquetOperator, FluxSpec, Lattice, ModelParams,
    SpinorState, Variant,
};

use crate::output::write_json_file;
use crate::{AppError, Cli};

#[derive(Clone, Debug, Serialize)]
struct CheckResult {
    check: &'static str,
    max_residual: f64,
    tolerance: Option<f64>,
    pass: bool,
}

fn gated(check: &'static str, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        check,
        max_residual: residual,
        tolerance: Some(tolerance),
        pass: residual < tolerance,
    }
}

fn golden(l1: f64, l2: f64, theta: f64, eta: f64) -> ModelParams {
    ModelParams::new(l1, l2, theta, eta, FluxSpec::golden()).unwrap()
}

fn unitarity_check(seed: u64) -> Result<CheckResult, AppError> {
    let flux = FluxSpec::approximant(21, 34).unwrap();
    let lat = Lattice::periodic(34, flux).map_err(AppError::config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for (l1, l2, theta) in [(0.67, 0.2, 0.0), (0.25, 0.5, 0.31), (0.435, 0.435, 0.77)] {
        let p = ModelParams::new(l1, l2, theta, 0.0, flux).map_err(AppError::config)?;
        let op = FloquetOperator::new(p, lat, Variant::Standard)?;
        for _ in 0..100 {
            let mut st = SpinorState::zeros(lat);
            for a in st.amplitudes.iter_mut() {
                *a = num_complex::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
            st.normalize();
            worst = worst.max((op.apply(&st).norm_sq() - 1.0).abs());
        }
    }
    Ok(gated("unitarity_eta_zero", worst, 1e-12))
}

fn coin_det_check() -> CheckResult {
    let mut worst: f64 = 0.0;
    for x in -40..=40 {
        for k in 0..8 {
            let p = golden(0.5, 0.125 * k as f64, 0.1 * k as f64, 0.0);
            let d = coin_at(x, &p).det();
            worst = worst.max((d - num_complex::Complex64::new(1.0, 0.0)).norm());
        }
    }
    gated("coin_determinant", worst, 1e-14)
}

fn coin_decomposition_check(inject_fault: bool) -> CheckResult {
    let mut worst: f64 = 0.0;
    for x in -20..=20 {
        for k in 0..6 {
            let p = golden(0.5, 0.02 + 0.16 * k as f64, 0.13 * k as f64, 0.0);
            let r = if inject_fault {
                let a = WavePlateAngles::for_site(x, &p);
                let mut h = hwp(a.phi2);
                h.0[0][0] = -h.0[0][0];
                let product = qwp(a.phi3).mul(&h).mul(&qwp(a.phi1));
                product.max_abs_diff(&coin_at(x, &p))
            } else {
                coin_decomposition(x, &p).1
            };
            worst = worst.max(r);
        }
    }
    gated("coin_decomposition", worst, 1e-12)
}

fn shift_decomposition_check() -> Result<CheckResult, AppError> {
    let lat = Lattice::open(11).map_err(AppError::config)?;
    let mut worst: f64 = 0.0;
    for (l1, eta) in [(1.0, 0.0), (0.5, 0.0), (0.5, 0.1), (0.25, 0.2)] {
        let (_, r) = shift_decomposition(&golden(l1, 0.5, 0.0, eta), lat)?;
        worst = worst.max(r);
    }
    Ok(gated("shift_decomposition", worst, 1e-12))
}

fn skin_checks() -> Result<Vec<CheckResult>, AppError> {
    let lat = Lattice::open(21).map_err(AppError::config)?;
    let eta = 0.08;
    let w0 = FloquetOperator::new(golden(0.25, 0.5, 0.0, 0.0), lat, Variant::Standard)?;
    let weta = FloquetOperator::new(golden(0.25, 0.5, 0.0, eta), lat, Variant::Standard)?;
    let d0 = w0.to_dense();
    let de = weta.to_dense();
    let mut matrix_dev: f64 = 0.0;
    for i in 0..42 {
        for j in 0..42 {
            let scale = (2.0 * PI * eta * (lat.coord(i / 2) - lat.coord(j / 2)) as f64).exp();
            matrix_dev = matrix_dev.max((d0[[i, j]] * scale - de[[i, j]]).norm());
        }
    }
    let spectra = spectral_matching_distance(
        &dense_spectrum_unchecked(&w0)?,
        &dense_spectrum_unchecked(&weta)?,
    );
    Ok(vec![
        gated("skin_similarity_matrix", matrix_dev, 1e-10),
        gated("skin_similarity_spectra", spectra, 1e-8),
    ])
}

fn duality_check() -> Result<CheckResult, AppError> {
    let flux = FluxSpec::approximant(55, 89).unwrap();
    let lat = Lattice::periodic(89, flux).map_err(AppError::config)?;
    let mut worst: f64 = 0.0;
    for (l1, l2) in [(0.25, 0.5), (0.67, 0.2)] {
        let a = FloquetOperator::new(
            ModelParams::new(l1, l2, 0.0, 0.0, flux).map_err(AppError::config)?,
            lat,
            Variant::Standard,
        )?;
        let b = FloquetOperator::new(
            ModelParams::new(l2, l1, 0.0, 0.0, flux).map_err(AppError::config)?,
            lat,
            Variant::Standard,
        )?;
        worst = worst.max(spectral_matching_distance(
            &dense_spectrum_unchecked(&a)?,
            &dense_spectrum_unchecked(&b)?,
        ));
    }
    Ok(gated("duality_spectra", worst, 1e-9))
}

fn pt_checks() -> Result<Vec<CheckResult>, AppError> {
    let flux = FluxSpec::approximant(55, 89).unwrap();
    let lat = Lattice::periodic(89, flux).map_err(AppError::config)?;
    let mut chiral: f64 = 0.0;
    let mut antilinear = f64::INFINITY;
    for eta in [0.0, 0.3] {
        let p = ModelParams::new(0.5, 0.25, 0.0, eta, flux).map_err(AppError::config)?;
        let rep = verify_pt_symmetry(&p, lat)?;
        chiral = chiral.max(rep.chiral_deviation);
        antilinear = antilinear.min(rep.antilinear_deviation);
    }
    Ok(vec![
        gated("pt_relation_symmetrized_frame", chiral, 1e-10),
        // informational: the textbook antilinear form does not close for
        // this model; record its size without gating the suite on it
        CheckResult {
            check: "pt_antilinear_form_diagnostic",
            max_residual: antilinear,
            tolerance: None,
            pass: true,
        },
    ])
}

fn bloch_check() -> Result<CheckResult, AppError> {
    let flux = FluxSpec::approximant(21, 34).unwrap();
    let lat = Lattice::periodic(34, flux).map_err(AppError::config)?;
    let mut worst: f64 = 0.0;
    for l1 in [0.35, 0.6, 0.95] {
        let p = ModelParams::new(l1, 0.0, 0.0, 0.0, flux).map_err(AppError::config)?;
        let op = FloquetOperator::new(p, lat, Variant::Standard)?;
        let got = dense_spectrum_unchecked(&op)?;
        let mut predicted = Vec::new();
        for j in 0..34 {
            let k = 2.0 * PI * j as f64 / 34.0;
            let s = l1 * k.sin();
            let root = (1.0 - s * s).max(0.0).sqrt();
            predicted.push(num_complex::Complex64::new(s, root));
            predicted.push(num_complex::Complex64::new(s, -root));
        }
        worst = worst.max(spectral_matching_distance(&got, &predicted));
    }
    Ok(gated("bloch_dispersion", worst, 1e-9))
}

fn frame_isospectrality_check() -> Result<CheckResult, AppError> {
    let flux = FluxSpec::approximant(34, 55).unwrap();
    let lat = Lattice::periodic(55, flux).map_err(AppError::config)?;
    let p = ModelParams::new(0.25, 0.5, 0.0, 0.12, flux).map_err(AppError::config)?;
    let a = FloquetOperator::new(p, lat, Variant::Standard)?;
    let b = FloquetOperator::new(p, lat, Variant::Symmetrized)?;
    Ok(gated(
        "frame_isospectrality",
        spectral_matching_distance(&dense_spectrum_unchecked(&a)?, &dense_spectrum_unchecked(&b)?),
        1e-9,
    ))
}

fn hatano_nelson_check() -> Result<CheckResult, AppError> {
    let flux = FluxSpec::approximant(144, 233).unwrap();
    let es = hn_on_spectrum_energies(2.0, 0.0, flux, 233)?;
    let energy = es[es.len() / 3];
    let p = HatanoNelsonParams::new(2.0, 0.0, 0.41, FluxSpec::golden()).map_err(AppError::config)?;
    let tm = transfer_matrix_lyapunov_hn(&p, energy, 100_000)?;
    let closed = hatano_nelson_lyapunov(2.0, 0.0).map_err(AppError::config)?;
    Ok(gated("hatano_nelson_oracle", (tm - closed).abs(), 1e-2))
}

fn lossy_checks() -> Result<Vec<CheckResult>, AppError> {
    let lat = Lattice::open_for_steps(6).map_err(AppError::config)?;
    let init = SpinorState::default_initial(lat).map_err(AppError::config)?;
    let p = golden(0.25, 0.5, 0.0, 0.05);
    let (_, records) = simulate_lossy_walk(&init, &p, 6)?;
    let mut accounting: f64 = 0.0;
    for r in &records {
        accounting = accounting.max((r.surviving_norm_sq + r.cumulative_lost - 1.0).abs());
    }
    let rec = reconstruct_overall_probability(&records, 0.05);
    let ideal = FloquetOperator::new(p, lat, Variant::Standard)?;
    let mut psi = init.clone();
    let mut rec_dev: f64 = 0.0;
    for r in rec.iter() {
        psi = ideal.apply(&psi);
        rec_dev = rec_dev.max((r - psi.norm_sq()).abs());
    }
    let equivalence = realized_vs_ideal_deviation(&init, &p, 6)?;
    Ok(vec![
        gated("lossy_probability_accounting", accounting, 1e-12),
        gated("lossy_reconstruction_matches_ideal", rec_dev, 1e-10),
        gated("realized_vs_ideal_rescaling", equivalence, 1e-10),
    ])
}

fn similarity_bounds_check() -> CheckResult {
    let a = vec![0.25, 0.25, 0.5];
    let b = vec![0.5, 0.5, 0.0];
    let self_sim = (similarity(&a, &a).unwrap() - 1.0).abs();
    let cross = similarity(&a, &b).unwrap();
    let worst = self_sim.max(if (0.0..=1.0).contains(&cross) { 0.0 } else { 1.0 });
    gated("similarity_bounds", worst, 1e-12)
}

pub fn run(cli: &Cli, out_dir: &Path, inject_fault: bool) -> Result<(), AppError> {
    let mut results = Vec::new();
    results.push(unitarity_check(cli.seed)?);
    results.push(coin_det_check());
    results.push(coin_decomposition_check(inject_fault));
    results.push(shift_decomposition_check()?);
    results.extend(skin_checks()?);
    results.push(duality_check()?);
    results.extend(pt_checks()?);
    results.push(bloch_check()?);
    results.push(frame_isospectrality_check()?);
    results.push(hatano_nelson_check()?);
    results.extend(lossy_checks()?);
    results.push(similarity_bounds_check());

    let all_pass = results.iter().all(|r| r.pass);
    let doc = serde_json::json!({
        "command": "validate",
        "fault_injection": inject_fault,
        "pass": all_pass,
        "checks": results,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    if cli.out.is_some() {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| AppError::io(format!("create {}: {e}", out_dir.display())))?;
        write_json_file(&out_dir.join("validate.json"), &doc)?;
    }
    if all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.check).collect();
        Err(AppError::validation(format!("failed checks: {}", failed.join(", "))))
    }
}
