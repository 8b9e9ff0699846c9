pub mod critical;
pub mod evolve;
pub mod phase_diagram;
pub mod reproduce;
pub mod spectrum;
pub mod validate;
pub mod winding;

use crate::AppError;
use std::path::Path;

pub(crate) fn require_config(cli: &crate::Cli) -> Result<&Path, AppError> {
    cli.config
        .as_deref()
        .ok_or_else(|| AppError::config_msg("this command needs --config <path>"))
}
