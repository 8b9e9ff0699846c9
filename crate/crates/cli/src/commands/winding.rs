//! `winding`: quantized winding numbers over base points and eta values,
//! plus spectral transition estimates.

use std::path::Path;

use uamo_core::analytics::critical_points;
use uamo_core::spectral::{transition_scan, winding_transition_scan};
use uamo_core::ModelParams;

use crate::config::{load_config, WindingConfig};
use crate::output::{Cell, Table, Writer};
use crate::{AppError, Cli};

pub fn run(cli: &Cli, out_dir: &Path) -> Result<(), AppError> {
    let cfg: WindingConfig = load_config(super::require_config(cli)?)?;
    execute(&cfg, out_dir, cli.format)
}

pub fn execute(
    cfg: &WindingConfig,
    out_dir: &Path,
    format: crate::output::OutputFormat,
) -> Result<(), AppError> {
    if cfg.etas.is_empty() {
        return Err(AppError::config_msg("etas must not be empty"));
    }
    let flux = cfg.flux.to_spec()?;
    let size = match (cfg.lattice_size, flux) {
        (Some(n), _) => n,
        (None, uamo_core::FluxSpec::Approximant { q, .. }) => q as usize,
        _ => {
            return Err(AppError::config_msg(
                "winding needs an approximant flux (or explicit lattice_size)",
            ))
        }
    };
    let lattice = uamo_core::Lattice::periodic(size, flux).map_err(AppError::config)?;
    let base = ModelParams::new(cfg.lambda1, cfg.lambda2, cfg.theta, 0.0, flux)
        .map_err(AppError::config)?;

    let (first, second, profiles) =
        winding_transition_scan(&base, lattice, &cfg.etas, cfg.base_points, cfg.samples)?;

    let writer = Writer::new(out_dir, format, "winding", cfg)?;
    let mut table = Table::new(vec!["eta", "re_z", "im_z", "nu_raw", "nu_quantized", "valid"]);
    for (eta, profile) in &profiles {
        for (z, r) in profile.base_points.iter().zip(profile.results.iter()) {
            match r {
                Some(w) => table.push(vec![
                    Cell::Float(*eta),
                    Cell::Float(z.re),
                    Cell::Float(z.im),
                    Cell::Float(w.winding_raw),
                    Cell::Int(i64::from(w.quantized)),
                    Cell::Int(1),
                ]),
                None => table.push(vec![
                    Cell::Float(*eta),
                    Cell::Float(z.re),
                    Cell::Float(z.im),
                    Cell::Float(0.0),
                    Cell::Int(0),
                    Cell::Int(0),
                ]),
            }
        }
    }
    writer.table("winding", &table)?;

    let mut summary = serde_json::json!({
        "first_nontrivial_eta": first,
        "all_nontrivial_eta": second,
    });
    if cfg.scan_transitions {
        let est = transition_scan(&base, lattice, cfg.scan_eta_max, cfg.scan_resolution)?;
        let cp = critical_points(cfg.lambda1, cfg.lambda2).map_err(AppError::config)?;
        summary["bisection"] = serde_json::json!({
            "eta_pt": est.eta_pt,
            "eta0": est.eta0,
            "resolution": est.resolution,
        });
        summary["closed_form"] = serde_json::json!({
            "eta_pt": cp.eta_pt,
            "eta0": cp.eta0,
        });
    }
    writer.json("summary", summary)?;
    Ok(())
}
