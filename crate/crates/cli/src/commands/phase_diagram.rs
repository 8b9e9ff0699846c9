//! `phase-diagram`: grid of a spreading observable over the coupling plane,
//! with the analytic localization boundary attached per row.

use rayon::prelude::*;
use std::path::Path;

use uamo_core::analytics::localization_boundary;
use uamo_core::dynamics::{evolve, position_distribution, second_moment, standard_deviation};
use uamo_core::{FloquetOperator, Lattice, ModelParams, SpinorState, Variant};

use crate::config::{load_config, PhaseDiagramConfig, PhaseObservable};
use crate::output::{Cell, Table, Writer};
use crate::{AppError, Cli};

pub fn run(cli: &Cli, out_dir: &Path, threads: usize) -> Result<(), AppError> {
    let cfg: PhaseDiagramConfig = load_config(super::require_config(cli)?)?;
    execute(&cfg, out_dir, cli.format, threads)
}

pub fn execute(
    cfg: &PhaseDiagramConfig,
    out_dir: &Path,
    format: crate::output::OutputFormat,
    threads: usize,
) -> Result<(), AppError> {
    if cfg.grid == 0 {
        return Err(AppError::config_msg("grid must be at least 1"));
    }
    let flux = cfg.flux.to_spec()?;
    let lattice = Lattice::open_for_steps(cfg.steps).map_err(AppError::config)?;
    let axis: Vec<f64> = if cfg.grid == 1 {
        vec![0.5]
    } else {
        (0..cfg.grid)
            .map(|i| i as f64 / (cfg.grid - 1) as f64)
            .collect()
    };

    let pool = crate::build_thread_pool(threads)?;
    let points: Vec<(usize, usize)> = (0..cfg.grid)
        .flat_map(|i| (0..cfg.grid).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = pool.install(|| {
        points
            .par_iter()
            .map(|&(i, j)| -> Result<f64, AppError> {
                let params =
                    ModelParams::new(axis[i], axis[j], cfg.theta, cfg.eta, flux)
                        .map_err(AppError::config)?;
                let op = FloquetOperator::new(params, lattice, Variant::Standard)?;
                let init = SpinorState::default_initial(lattice).map_err(AppError::config)?;
                let traj = evolve(&init, &op, cfg.steps)?;
                let p = position_distribution(traj.last().unwrap())?;
                Ok(match cfg.observable {
                    PhaseObservable::Sigma => standard_deviation(&p, lattice),
                    PhaseObservable::SecondMoment => second_moment(&p, lattice),
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let writer = Writer::new(out_dir, format, "phase-diagram", cfg)?;
    let column = match cfg.observable {
        PhaseObservable::Sigma => "sigma_t",
        PhaseObservable::SecondMoment => "x2_t",
    };
    let mut table = Table::new(vec!["lambda1", "lambda2", column, "boundary_lambda2"]);
    for (k, &(i, j)) in points.iter().enumerate() {
        let boundary = if axis[i] > 0.0 {
            localization_boundary(axis[i], cfg.eta).map_err(AppError::config)?
        } else {
            f64::NAN
        };
        table.push(vec![
            Cell::Float(axis[i]),
            Cell::Float(axis[j]),
            Cell::Float(values[k]),
            Cell::Float(boundary),
        ]);
    }
    writer.table("phase", &table)?;
    Ok(())
}
