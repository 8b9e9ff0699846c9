//! `spectrum`: eigenvalues, quasienergies and three-way classification.

use std::path::Path;

use uamo_core::spectral::eigendecompose;
use uamo_core::{FloquetOperator, ModelParams, Variant};

use crate::config::{load_config, SpectrumConfig};
use crate::output::{Cell, Table, Writer};
use crate::{AppError, Cli};

pub fn run(cli: &Cli, out_dir: &Path) -> Result<(), AppError> {
    let cfg: SpectrumConfig = load_config(super::require_config(cli)?)?;
    execute(&cfg, out_dir, cli.format)
}

pub fn execute(
    cfg: &SpectrumConfig,
    out_dir: &Path,
    format: crate::output::OutputFormat,
) -> Result<(), AppError> {
    let etas = cfg.eta_list()?;
    let (flux, lattice) = cfg.ring()?;
    let single = etas.len() == 1;
    let mut summary = Vec::new();
    for (k, &eta) in etas.iter().enumerate() {
        let params = ModelParams::new(cfg.lambda1, cfg.lambda2, cfg.theta, eta, flux)
            .map_err(AppError::config)?;
        let op = FloquetOperator::new(params, lattice, Variant::Standard)?;
        let spec = eigendecompose(&op, false)?;

        let dir = if single {
            out_dir.to_path_buf()
        } else {
            out_dir.join(format!("eta_{k:03}"))
        };
        let writer = Writer::new(&dir, format, "spectrum", cfg)?;
        let mut table = Table::new(vec!["re_z", "im_z", "re_E", "im_E"]);
        for (z, e) in spec.eigenvalues.iter().zip(spec.quasienergies.iter()) {
            table.push(vec![
                Cell::Float(z.re),
                Cell::Float(z.im),
                Cell::Float(e.re),
                Cell::Float(e.im),
            ]);
        }
        writer.table("eigenvalues", &table)?;
        let body = serde_json::json!({
            "eta": eta,
            "classification": spec.classification.to_string(),
            "boundary_zone": spec.boundary_zone,
            "tol_unit": spec.tol_unit,
            "tol_gap": spec.tol_gap,
            "max_abs_unit_deviation": spec.max_abs_unit_deviation,
            "min_abs_log_modulus": spec.min_abs_log_modulus,
            "max_abs_im_quasienergy": spec.max_abs_im_quasienergy,
            "near_unit_count": spec.near_unit_count,
        });
        writer.json("classification", body.clone())?;
        summary.push(body);
    }
    if !single {
        let writer = Writer::new(out_dir, format, "spectrum", cfg)?;
        writer.json("classification", serde_json::Value::Array(summary))?;
    }
    Ok(())
}
