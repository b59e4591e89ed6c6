//! Build, solve, decode and certify, resampling `delta` when certification
//! fails on an unlucky sample.

use serde::Serialize;

use super::model::{build_model, ModelConfig, RealizationModel};
use super::verify::{decode, RealizationResult};
use crate::analysis::kinetic_dim;
use crate::error::{Error, Result};
use crate::milp::{solve_milp, MilpSolution, MilpStatus, SolveOptions, SolveStats};
use crate::network::{build_matrices, MassActionSystem};

pub const DEFAULT_RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct FindOptions {
    pub config: ModelConfig,
    pub solve: SolveOptions,
    /// Fresh-seed rebuilds allowed after a certification failure.
    pub max_retries: usize,
}

impl Default for FindOptions {
    fn default() -> Self {
        Self { config: ModelConfig::default(), solve: SolveOptions::default(), max_retries: DEFAULT_RETRIES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FindStatus {
    /// A certified realization, proven optimal for the objective.
    Optimal,
    /// A certified realization found before a limit stopped the search.
    Feasible,
    Infeasible,
    /// A limit stopped the search before any realization was found.
    Limit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FindOutcome {
    pub status: FindStatus,
    pub result: Option<RealizationResult>,
    /// Seed of the attempt that produced this outcome.
    pub seed: u64,
    pub attempts: usize,
    pub stats: SolveStats,
    pub objective: Option<crate::rational::Rational>,
}

pub fn model_for(sys: &MassActionSystem, config: &ModelConfig) -> Result<RealizationModel> {
    let mats = build_matrices(sys);
    build_model(&mats.y, mats.kinetic.matrix(), kinetic_dim(sys), config)
}

/// Decodes and certifies a solution of `rm`.
pub fn finish(sys: &MassActionSystem, rm: &RealizationModel, solution: &MilpSolution) -> Result<Option<RealizationResult>> {
    match &solution.values {
        Some(values) => {
            rm.model.check(values)?;
            decode(values, rm, sys).map(Some)
        }
        None => Ok(None),
    }
}

pub fn find(sys: &MassActionSystem, opts: &FindOptions) -> Result<FindOutcome> {
    let mut config = opts.config.clone();
    let mut attempts = 0;
    loop {
        attempts += 1;
        let rm = model_for(sys, &config)?;
        let solution = solve_milp(&rm.model, &opts.solve)?;
        let result = finish(sys, &rm, &solution)?;
        let certified = result.as_ref().map_or(false, |r| r.verification.certified);
        let status = match (solution.status, &result) {
            (MilpStatus::Infeasible, _) => FindStatus::Infeasible,
            (MilpStatus::Limit, None) => FindStatus::Limit,
            (MilpStatus::Limit, Some(_)) | (MilpStatus::Feasible, _) => FindStatus::Feasible,
            (MilpStatus::Optimal, _) => FindStatus::Optimal,
        };
        if result.is_none() || certified {
            return Ok(FindOutcome { status, result, seed: config.seed, attempts, stats: solution.stats, objective: solution.objective });
        }
        if attempts > opts.max_retries {
            return Err(Error::Solver(format!(
                "realization failed certification after {attempts} attempts (last seed {})",
                config.seed
            )));
        }
        config.seed = config.seed.wrapping_add(1);
        config.deltas = None;
    }
}
