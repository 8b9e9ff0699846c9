//! Closed forms against independent numerical oracles.

use uamo_core::analytics::{
    hatano_nelson_lyapunov, hn_on_spectrum_energies, transfer_matrix_lyapunov_hn,
    HatanoNelsonParams,
};
use uamo_core::FluxSpec;

fn on_spectrum_energy(lambda: f64) -> f64 {
    let flux = FluxSpec::approximant(144, 233).unwrap();
    let es = hn_on_spectrum_energies(lambda, 0.0, flux, 233).unwrap();
    // an interior eigenvalue, away from band edges
    es[es.len() / 3]
}

#[test]
fn closed_form_matches_transfer_matrix_on_spectrum() {
    for (lambda, eta) in [(2.0, 0.0), (1.5, 0.05), (1.5, 0.0)] {
        let energy = on_spectrum_energy(lambda);
        let p = HatanoNelsonParams::new(lambda, eta, 0.41, FluxSpec::golden()).unwrap();
        let tm = transfer_matrix_lyapunov_hn(&p, energy, 100_000).unwrap();
        let closed = hatano_nelson_lyapunov(lambda, eta).unwrap();
        assert!(
            (tm - closed).abs() < 1e-2,
            "lambda = {lambda}, eta = {eta}: transfer matrix {tm} vs closed {closed}"
        );
    }
}

#[test]
fn off_spectrum_energy_has_larger_exponent() {
    let lambda = 1.5;
    let energy = on_spectrum_energy(lambda);
    let p = HatanoNelsonParams::new(lambda, 0.0, 0.41, FluxSpec::golden()).unwrap();
    let on = transfer_matrix_lyapunov_hn(&p, energy, 100_000).unwrap();
    let off = transfer_matrix_lyapunov_hn(&p, 25.0, 100_000).unwrap();
    assert!(off > on + 0.3, "off-spectrum {off} vs on-spectrum {on}");
}
