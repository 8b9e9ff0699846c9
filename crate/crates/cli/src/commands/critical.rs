//! `critical`: closed-form lambda0, Lyapunov exponent and both critical eta
//! values for one coupling pair.

use std::path::Path;

use uamo_core::analytics::critical_points;

use crate::config::{load_config, CriticalConfig};
use crate::output::Writer;
use crate::{AppError, Cli};

pub fn run(
    cli: &Cli,
    out_dir: &Path,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
) -> Result<(), AppError> {
    let cfg = match (lambda1, lambda2, &cli.config) {
        (Some(l1), Some(l2), None) => CriticalConfig { lambda1: l1, lambda2: l2 },
        (None, None, Some(path)) => load_config(path)?,
        _ => {
            return Err(AppError::config_msg(
                "pass both --lambda1 and --lambda2, or a --config file, not a mixture",
            ))
        }
    };
    let cp = critical_points(cfg.lambda1, cfg.lambda2).map_err(AppError::config)?;
    let body = serde_json::json!({
        "lambda0": cp.lambda0,
        "lyapunov": cp.lyapunov,
        "eta_pt": cp.eta_pt,
        "eta0": cp.eta0,
    });
    println!("{body}");
    if cli.out.is_some() {
        let writer = Writer::new(out_dir, cli.format, "critical", &cfg)?;
        writer.json("critical", body)?;
    }
    Ok(())
}
