//! Closed-form quantities: the localization parameter lambda0, Lyapunov
//! exponents, the two critical values of the non-Hermitian parameter, the
//! finite-eta localization boundary, and the quasiperiodic Hatano-Nelson
//! comparison model with its transfer-matrix oracle.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::linalg;
use crate::model::FluxSpec;

/// The closed-form critical data of a coupling pair.
#[derive(Clone, Copy, Debug)]
pub struct CriticalPoints {
    /// lambda0 = lambda2 (1 + lambda1') / (lambda1 (1 + lambda2')).
    pub lambda0: f64,
    /// Hermitian Lyapunov exponent on the spectrum, max{0, log lambda0}.
    pub lyapunov: f64,
    /// First transition: eta_pt = max{0, log lambda0} / (2 pi).
    pub eta_pt: f64,
    /// Second transition: eta0 = arcsinh(lambda1'/lambda1) / (2 pi).
    pub eta0: f64,
}

fn check_couplings(lambda1: f64, lambda2: f64) -> Result<()> {
    if lambda1 <= 0.0 || lambda1 > 1.0 || !lambda1.is_finite() {
        return Err(CoreError::InvalidParams(format!(
            "lambda1 = {lambda1} outside (0, 1] (decoupled walk has no lambda0)"
        )));
    }
    if !(0.0..=1.0).contains(&lambda2) || !lambda2.is_finite() {
        return Err(CoreError::InvalidParams(format!("lambda2 = {lambda2} outside [0, 1]")));
    }
    Ok(())
}

pub fn lambda0(lambda1: f64, lambda2: f64) -> Result<f64> {
    check_couplings(lambda1, lambda2)?;
    let l1p = (1.0 - lambda1 * lambda1).max(0.0).sqrt();
    let l2p = (1.0 - lambda2 * lambda2).max(0.0).sqrt();
    Ok(lambda2 * (1.0 + l1p) / (lambda1 * (1.0 + l2p)))
}

pub fn critical_points(lambda1: f64, lambda2: f64) -> Result<CriticalPoints> {
    let l0 = lambda0(lambda1, lambda2)?;
    let l1p = (1.0 - lambda1 * lambda1).max(0.0).sqrt();
    let lyap = l0.ln().max(0.0);
    // arcsinh(l1p / l1) = ln((1 + l1p) / l1) since l1^2 + l1p^2 = 1
    let eta0 = ((1.0 + l1p) / lambda1).ln() / (2.0 * PI);
    Ok(CriticalPoints { lambda0: l0, lyapunov: lyap, eta_pt: lyap / (2.0 * PI), eta0 })
}

/// Lyapunov exponent of the coupling-swapped dual as a function of eta:
/// piecewise linear with turning points at eta_pt and eta0.
pub fn dual_lyapunov(lambda1: f64, lambda2: f64, eta: f64) -> Result<f64> {
    let cp = critical_points(lambda1, lambda2)?;
    let ae = eta.abs();
    let v = -cp.lambda0.ln() + 2.0 * PI * ae - 2.0 * PI * (ae - cp.eta0).max(0.0);
    Ok(v.max(0.0))
}

/// Lyapunov exponent of the model itself at finite eta,
/// max{0, log lambda0 - 2 pi |eta|}.
pub fn lyapunov_at_eta(lambda1: f64, lambda2: f64, eta: f64) -> Result<f64> {
    let l0 = lambda0(lambda1, lambda2)?;
    Ok((l0.ln() - 2.0 * PI * eta.abs()).max(0.0))
}

/// Critical coin coupling above which the walk localizes at fixed eta.
/// Returns 1 when the boundary leaves the unit square.
pub fn localization_boundary(lambda1: f64, eta: f64) -> Result<f64> {
    if lambda1 <= 0.0 || lambda1 > 1.0 || !lambda1.is_finite() {
        return Err(CoreError::InvalidParams(format!("lambda1 = {lambda1} outside (0, 1]")));
    }
    let ae = eta.abs();
    let threshold = 2.0 * (2.0 * PI * ae).exp() / (1.0 + (4.0 * PI * ae).exp());
    if lambda1 > threshold {
        return Ok(1.0);
    }
    let l1p = (1.0 - lambda1 * lambda1).max(0.0).sqrt();
    let num = 2.0 * (2.0 * PI * eta.abs()).exp() * lambda1 * (1.0 + l1p);
    let den = 2.0 * (1.0 + l1p) + lambda1 * lambda1 * ((4.0 * PI * ae).exp() - 1.0);
    Ok(num / den)
}

/// Non-reciprocal quasiperiodic tight-binding chain (Hatano-Nelson with an
/// incommensurate cosine potential).
#[derive(Clone, Copy, Debug)]
pub struct HatanoNelsonParams {
    pub lambda: f64,
    pub eta: f64,
    pub theta: f64,
    pub flux: FluxSpec,
}

impl HatanoNelsonParams {
    pub fn new(lambda: f64, eta: f64, theta: f64, flux: FluxSpec) -> Result<Self> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(CoreError::InvalidParams(format!("lambda = {lambda} must be positive")));
        }
        Ok(HatanoNelsonParams { lambda, eta, theta, flux })
    }

    fn potential(&self, n: i64) -> f64 {
        2.0 * self.lambda * (2.0 * PI * (self.flux.value() * n as f64 + self.theta)).cos()
    }
}

/// Dense matrix of the chain on `size` sites, open or with wrapped corner
/// terms.
pub fn hatano_nelson_matrix(
    params: &HatanoNelsonParams,
    size: usize,
    periodic: bool,
) -> Result<Array2<C64>> {
    if size < 2 {
        return Err(CoreError::InvalidLattice(format!("size {size} too small")));
    }
    let right = ((2.0 * PI * params.eta).exp(), 0.0);
    let left = ((-2.0 * PI * params.eta).exp(), 0.0);
    let mut h = Array2::zeros((size, size));
    for n in 0..size {
        h[[n, n]] = C64::new(params.potential(n as i64), 0.0);
        if n + 1 < size {
            h[[n, n + 1]] = C64::new(right.0, right.1);
            h[[n + 1, n]] = C64::new(left.0, left.1);
        } else if periodic {
            h[[n, 0]] = C64::new(right.0, right.1);
            h[[0, n]] = C64::new(left.0, left.1);
        }
    }
    Ok(h)
}

/// Closed-form Lyapunov exponent on the spectrum: log lambda + 2 pi |eta|.
pub fn hatano_nelson_lyapunov(lambda: f64, eta: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(CoreError::InvalidParams(format!("lambda = {lambda} must be positive")));
    }
    Ok(lambda.ln() + 2.0 * PI * eta.abs())
}

/// Numerical Lyapunov exponent of the 2x2 transfer cocycle at real energy
/// `energy`, QR-renormalized every 16 steps. Returns the largest decay rate
/// (the max of the absolute values of the two exponents).
pub fn transfer_matrix_lyapunov_hn(
    params: &HatanoNelsonParams,
    energy: f64,
    steps: usize,
) -> Result<f64> {
    if steps < 10_000 {
        return Err(CoreError::InvalidParams(format!(
            "transfer-matrix cocycle needs >= 1e4 steps for convergence, got {steps}"
        )));
    }
    let a = (-2.0 * PI * params.eta).exp();
    let a2 = a * a;
    // column frame
    let mut v1 = [1.0f64, 0.0];
    let mut v2 = [0.0f64, 1.0];
    let mut s1 = 0.0f64;
    let mut s2 = 0.0f64;
    for n in 1..=steps {
        let t00 = a * (energy - params.potential(n as i64));
        // T = [[a (E - V_n), -a^2], [1, 0]]
        v1 = [t00 * v1[0] - a2 * v1[1], v1[0]];
        v2 = [t00 * v2[0] - a2 * v2[1], v2[0]];
        if n % 16 == 0 || n == steps {
            let r1 = (v1[0] * v1[0] + v1[1] * v1[1]).sqrt();
            s1 += r1.ln();
            v1 = [v1[0] / r1, v1[1] / r1];
            let proj = v1[0] * v2[0] + v1[1] * v2[1];
            v2 = [v2[0] - proj * v1[0], v2[1] - proj * v1[1]];
            let r2 = (v2[0] * v2[0] + v2[1] * v2[1]).sqrt();
            s2 += r2.ln();
            v2 = [v2[0] / r2, v2[1] / r2];
        }
    }
    let e1 = s1 / steps as f64;
    let e2 = s2 / steps as f64;
    Ok(e1.abs().max(e2.abs()))
}

/// Real eigenvalues of the Hermitian (eta = 0) chain, used to pick
/// on-spectrum energies for the oracle.
pub fn hn_on_spectrum_energies(
    lambda: f64,
    theta: f64,
    flux: FluxSpec,
    size: usize,
) -> Result<Vec<f64>> {
    let p = HatanoNelsonParams::new(lambda, 0.0, theta, flux)?;
    let h = hatano_nelson_matrix(&p, size, true)?;
    let (vals, _) = linalg::eig(&h, false)?;
    let mut es: Vec<f64> = vals.iter().map(|z| z.re).collect();
    es.sort_by(f64::total_cmp);
    Ok(es)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_critical_values() {
        let cp = critical_points(0.25, 0.5).unwrap();
        assert!((cp.lambda0 - 2.1095).abs() < 5e-4, "lambda0 = {}", cp.lambda0);
        assert!((cp.lyapunov - 0.7463).abs() < 5e-4);
        assert!((cp.eta_pt - 0.1188).abs() < 5e-4);
        assert!((cp.eta0 - 0.3284).abs() < 5e-4);
    }

    #[test]
    fn self_dual_line() {
        let cp = critical_points(0.435, 0.435).unwrap();
        assert!((cp.lambda0 - 1.0).abs() < 1e-14);
        assert_eq!(cp.lyapunov, 0.0);
        assert_eq!(cp.eta_pt, 0.0);
    }

    #[test]
    fn reciprocity_of_swapped_couplings() {
        let a = lambda0(0.25, 0.5).unwrap();
        let b = lambda0(0.5, 0.25).unwrap();
        assert!((a * b - 1.0).abs() < 1e-14);
        assert!(b < 1.0);
        assert_eq!(critical_points(0.5, 0.25).unwrap().eta_pt, 0.0);
    }

    #[test]
    fn lambda1_zero_rejected() {
        assert!(critical_points(0.0, 0.5).is_err());
    }

    #[test]
    fn dual_lyapunov_piecewise_values() {
        // below the first transition the dual is delocalized
        assert_eq!(dual_lyapunov(0.25, 0.5, 0.0).unwrap(), 0.0);
        // linear segment
        let v = dual_lyapunov(0.25, 0.5, 0.2).unwrap();
        let expect = 2.0 * PI * 0.2 - 2.1095f64.ln();
        assert!((v - expect).abs() < 5e-4, "{v} vs {expect}");
        assert!((v - 0.5103).abs() < 5e-4);
        // saturated segment: log[(1 + lambda2')/lambda2], independent of eta
        let v1 = dual_lyapunov(0.25, 0.5, 0.4).unwrap();
        let v2 = dual_lyapunov(0.25, 0.5, 0.9).unwrap();
        assert!((v1 - 3.7321f64.ln()).abs() < 5e-4);
        assert!((v1 - 1.3170).abs() < 5e-4);
        assert!((v1 - v2).abs() < 1e-12);
    }

    #[test]
    fn boundary_reduces_to_self_dual_at_eta_zero() {
        for l1 in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            assert!((localization_boundary(l1, 0.0).unwrap() - l1).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_threshold_and_saturation() {
        let thr = 2.0 * (0.2 * PI).exp() / (1.0 + (0.4 * PI).exp());
        assert!((thr - 0.8306).abs() < 1e-4);
        assert_eq!(localization_boundary(0.9, 0.1).unwrap(), 1.0);
        assert!(localization_boundary(0.8, 0.1).unwrap() < 1.0);
    }

    #[test]
    fn boundary_consistent_with_lyapunov_sign() {
        for l1 in [0.2, 0.4, 0.6] {
            for eta in [0.05, 0.1] {
                let b = localization_boundary(l1, eta).unwrap();
                if b < 1.0 {
                    let above = lyapunov_at_eta(l1, (b + 0.02).min(1.0), eta).unwrap();
                    let below = lyapunov_at_eta(l1, (b - 0.02).max(0.0), eta).unwrap();
                    assert!(above > 0.0, "localized above the boundary");
                    assert_eq!(below, 0.0, "delocalized below the boundary");
                }
            }
        }
    }

    #[test]
    fn hn_closed_form_values() {
        assert!((hatano_nelson_lyapunov(1.5, 0.0).unwrap() - 0.4055).abs() < 1e-4);
        assert!(hatano_nelson_lyapunov(1.0, 0.0).unwrap().abs() < 1e-14);
        // lam < 1: boundary L = 0 at eta = -ln(lam)/(2 pi)
        let lam = 0.7f64;
        let eta = -lam.ln() / (2.0 * PI);
        assert!(hatano_nelson_lyapunov(lam, eta).unwrap().abs() < 1e-14);
    }

    #[test]
    fn hn_matrix_structure() {
        let p = HatanoNelsonParams::new(1.5, 0.1, 0.0, FluxSpec::golden()).unwrap();
        let h = hatano_nelson_matrix(&p, 5, true).unwrap();
        assert!((h[[0, 1]].re - (0.2 * PI).exp()).abs() < 1e-14);
        assert!((h[[1, 0]].re - (-0.2 * PI).exp()).abs() < 1e-14);
        assert!((h[[4, 0]].re - (0.2 * PI).exp()).abs() < 1e-14);
        assert!((h[[0, 0]].re - 3.0).abs() < 1e-14);
        assert!(HatanoNelsonParams::new(0.0, 0.1, 0.0, FluxSpec::golden()).is_err());
    }

    #[test]
    fn transfer_matrix_rejects_short_runs() {
        let p = HatanoNelsonParams::new(1.5, 0.0, 0.41, FluxSpec::golden()).unwrap();
        assert!(transfer_matrix_lyapunov_hn(&p, 0.0, 100).is_err());
    }
}
