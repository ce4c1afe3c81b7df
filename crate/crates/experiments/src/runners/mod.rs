//! One runner per experiment kind. Each returns its tables and summary
//! values; [`run`] adds provenance.

use chrono::Utc;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::record::ResultRecord;

pub mod common;
pub mod expressibility;
pub mod gradvar;
pub mod grid;
pub mod max_fidelity;
pub mod noisy;
pub mod time_optimal;
pub mod trotter;

use common::Context;

/// Validates `cfg` and runs the experiment it names.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let started_at = Utc::now().to_rfc3339();
    let ctx = Context::new(cfg)?;
    let (tables, summary) = match cfg.experiment {
        ExperimentKind::MaxFidelity => max_fidelity::run(&ctx)?,
        ExperimentKind::TimeOptimal => time_optimal::run(&ctx)?,
        ExperimentKind::OptimalityGrid => grid::run(&ctx)?,
        ExperimentKind::Expressibility => expressibility::run(&ctx)?,
        ExperimentKind::Gradvar => gradvar::run(&ctx)?,
        ExperimentKind::TrotterError => trotter::run(&ctx)?,
        ExperimentKind::Noisy => noisy::run(&ctx)?,
    };
    Ok(ResultRecord {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        started_at,
        finished_at: Utc::now().to_rfc3339(),
        tables,
        summary,
    })
}
