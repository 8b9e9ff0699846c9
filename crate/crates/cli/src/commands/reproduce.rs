//! `reproduce`: canned configurations that regenerate the datasets behind
//! each figure with one command.

use std::path::Path;

use uamo_core::dynamics::{overall_probability_series, prepare_no_loss_initial};
use uamo_core::spectral::{eigendecompose, NO_LOSS_TOL};
use uamo_core::{FloquetOperator, Lattice, ModelParams, SpinorState, Variant};

use crate::config::{
    BoundaryConfig, CriticalConfig, EvolveConfig, FluxConfig, PhaseDiagramConfig, PhaseObservable,
    SpectrumConfig, WindingConfig,
};
use crate::output::{Cell, Table, Writer};
use crate::{commands, AppError, Cli};

const RING: FluxConfig = FluxConfig::Approximant { p: 55, q: 89 };

fn evolve_cfg(l1: f64, l2: f64, eta: f64) -> EvolveConfig {
    EvolveConfig {
        lambda1: l1,
        lambda2: l2,
        theta: 0.0,
        eta,
        flux: FluxConfig::Golden,
        boundary: BoundaryConfig::Open,
        lattice_size: None,
        steps: 6,
        poisson_counts: None,
    }
}

fn spectrum_cfg(l1: f64, l2: f64, etas: Vec<f64>) -> SpectrumConfig {
    SpectrumConfig {
        lambda1: l1,
        lambda2: l2,
        theta: 0.0,
        eta: None,
        etas: Some(etas),
        flux: RING,
        lattice_size: None,
    }
}

pub fn run(cli: &Cli, out_root: &Path, figure: &str, threads: usize) -> Result<(), AppError> {
    let fmt = cli.format;
    let out = out_root.join(figure);
    match figure {
        "fig1a" => {
            let cfg = spectrum_cfg(0.25, 0.5, vec![0.0, 0.05, 0.119, 0.135, 0.2, 0.328, 0.335, 0.4]);
            commands::spectrum::execute(&cfg, &out, fmt)
        }
        "fig2g" => {
            commands::evolve::execute(&evolve_cfg(0.67, 0.2, 0.0), &out.join("metallic"), fmt, cli.seed)?;
            commands::evolve::execute(
                &evolve_cfg(0.435, 0.435, 0.0),
                &out.join("critical"),
                fmt,
                cli.seed,
            )?;
            commands::evolve::execute(&evolve_cfg(0.2, 0.67, 0.0), &out.join("localized"), fmt, cli.seed)
        }
        "fig2h" => {
            let cfg = PhaseDiagramConfig {
                grid: 32,
                eta: 0.0,
                steps: 6,
                theta: 0.0,
                flux: FluxConfig::Golden,
                observable: PhaseObservable::Sigma,
            };
            commands::phase_diagram::execute(&cfg, &out, fmt, threads)
        }
        "fig3" => {
            commands::spectrum::execute(&spectrum_cfg(0.5, 0.25, vec![0.05]), &out.join("metallic"), fmt)?;
            commands::spectrum::execute(&spectrum_cfg(0.25, 0.5, vec![0.05]), &out.join("localized"), fmt)?;
            commands::evolve::execute(
                &evolve_cfg(0.5, 0.25, 0.05),
                &out.join("metallic"),
                fmt,
                cli.seed,
            )?;
            commands::evolve::execute(
                &evolve_cfg(0.25, 0.5, 0.05),
                &out.join("localized"),
                fmt,
                cli.seed,
            )
        }
        "fig4" => {
            for (tag, eta) in [("between", 0.135), ("beyond", 0.335)] {
                let dir = out.join(tag);
                commands::spectrum::execute(&spectrum_cfg(0.25, 0.5, vec![eta]), &dir, fmt)?;
                no_loss_dynamics(&dir, fmt, eta)?;
            }
            Ok(())
        }
        "figS3" => {
            let cfg = PhaseDiagramConfig {
                grid: 32,
                eta: 0.1,
                steps: 6,
                theta: 0.0,
                flux: FluxConfig::Golden,
                observable: PhaseObservable::SecondMoment,
            };
            commands::phase_diagram::execute(&cfg, &out, fmt, threads)
        }
        "critical" => {
            // not a figure, but handy: the headline coupling pair
            let cfg = CriticalConfig { lambda1: 0.25, lambda2: 0.5 };
            let cp = uamo_core::analytics::critical_points(cfg.lambda1, cfg.lambda2)
                .map_err(AppError::config)?;
            let w = Writer::new(&out, fmt, "reproduce", &cfg)?;
            w.json(
                "critical",
                serde_json::json!({
                    "lambda0": cp.lambda0,
                    "lyapunov": cp.lyapunov,
                    "eta_pt": cp.eta_pt,
                    "eta0": cp.eta0,
                }),
            )?;
            Ok(())
        }
        other => Err(AppError::config_msg(format!(
            "unknown figure `{other}`; expected one of fig1a, fig2g, fig2h, fig3, fig4, figS3"
        ))),
    }
}

/// Overall probability of the no-loss-prepared state vs the default initial
/// state on the spectrum's own ring.
fn no_loss_dynamics(
    dir: &Path,
    fmt: crate::output::OutputFormat,
    eta: f64,
) -> Result<(), AppError> {
    let cfg = WindingConfig {
        lambda1: 0.25,
        lambda2: 0.5,
        theta: 0.0,
        etas: vec![eta],
        flux: RING,
        lattice_size: None,
        base_points: 0,
        samples: 0,
        scan_transitions: false,
        scan_eta_max: 0.0,
        scan_resolution: 0.0,
    };
    let flux = RING.to_spec()?;
    let lattice = Lattice::periodic(89, flux).map_err(AppError::config)?;
    let params = ModelParams::new(0.25, 0.5, 0.0, eta, flux).map_err(AppError::config)?;
    let op = FloquetOperator::new(params, lattice, Variant::Standard)?;
    let spec = eigendecompose(&op, true)?;
    let prepared = prepare_no_loss_initial(&spec, lattice, NO_LOSS_TOL).ok();
    let p_prepared = match &prepared {
        Some((state, _)) => Some(overall_probability_series(state, &op, 6)?),
        None => None,
    };
    let p_default = overall_probability_series(
        &SpinorState::default_initial(lattice).map_err(AppError::config)?,
        &op,
        6,
    )?;
    let writer = Writer::new(dir, fmt, "reproduce", &cfg)?;
    let mut table = Table::new(vec!["t", "p_no_loss", "p_default"]);
    for t in 0..=6usize {
        table.push(vec![
            Cell::Int(t as i64),
            Cell::Float(p_prepared.as_ref().map_or(f64::NAN, |s| s[t])),
            Cell::Float(p_default[t]),
        ]);
    }
    writer.table("dynamics", &table)?;
    Ok(())
}
