//! `evolve`: walker trajectories, position distributions and observables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

use uamo_core::dynamics::{evolve, observables, poisson_resample, similarity};
use uamo_core::{FloquetOperator, Lattice, SpinorState, Variant};

use crate::config::{load_config, BoundaryConfig, EvolveConfig};
use crate::output::{Cell, Table, Writer};
use crate::{AppError, Cli};

pub fn run(cli: &Cli, out_dir: &Path) -> Result<(), AppError> {
    let cfg: EvolveConfig = load_config(super::require_config(cli)?)?;
    execute(&cfg, out_dir, cli.format, cli.seed)
}

pub fn execute(
    cfg: &EvolveConfig,
    out_dir: &Path,
    format: crate::output::OutputFormat,
    seed: u64,
) -> Result<(), AppError> {
    let params = cfg.params()?;
    let lattice = match cfg.boundary {
        BoundaryConfig::Open => match cfg.lattice_size {
            Some(n) => Lattice::open(n).map_err(AppError::config)?,
            None => Lattice::open_for_steps(cfg.steps).map_err(AppError::config)?,
        },
        BoundaryConfig::Periodic => {
            let n = cfg.lattice_size.ok_or_else(|| {
                AppError::config_msg("periodic evolution needs an explicit lattice_size")
            })?;
            Lattice::periodic(n, params.flux).map_err(AppError::config)?
        }
    };
    let op = FloquetOperator::new(params, lattice, Variant::Standard)?;
    let initial = SpinorState::default_initial(lattice).map_err(AppError::config)?;
    let trajectory = evolve(&initial, &op, cfg.steps)?;
    let obs = observables(&trajectory)?;

    let writer = Writer::new(out_dir, format, "evolve", cfg)?;

    let mut dist = Table::new(vec!["t", "x", "p"]);
    for (t, p) in obs.distributions.iter().enumerate() {
        for (i, v) in p.iter().enumerate() {
            dist.push(vec![
                Cell::Int(t as i64),
                Cell::Int(lattice.coord(i)),
                Cell::Float(*v),
            ]);
        }
    }
    writer.table("distribution", &dist)?;

    let resampled = match cfg.poisson_counts {
        Some(counts) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut per_step = Vec::with_capacity(obs.distributions.len());
            for p in &obs.distributions {
                per_step.push(poisson_resample(p, counts, &mut rng)?);
            }
            Some(per_step)
        }
        None => None,
    };

    let mut table = if resampled.is_some() {
        Table::new(vec!["t", "sigma", "x2", "overallP", "similarity"])
    } else {
        Table::new(vec!["t", "sigma", "x2", "overallP"])
    };
    for t in 0..obs.sigma.len() {
        let mut row = vec![
            Cell::Int(t as i64),
            Cell::Float(obs.sigma[t]),
            Cell::Float(obs.second_moment[t]),
            Cell::Float(obs.overall_p[t]),
        ];
        if let Some(rs) = &resampled {
            row.push(Cell::Float(similarity(&obs.distributions[t], &rs[t])?));
        }
        table.push(row);
    }
    writer.table("observables", &table)?;

    if let Some(rs) = &resampled {
        let mut table = Table::new(vec!["t", "x", "p"]);
        for (t, p) in rs.iter().enumerate() {
            for (i, v) in p.iter().enumerate() {
                table.push(vec![
                    Cell::Int(t as i64),
                    Cell::Int(lattice.coord(i)),
                    Cell::Float(*v),
                ]);
            }
        }
        writer.table("distribution_resampled", &table)?;
    }
    Ok(())
}
