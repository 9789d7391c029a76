//! Table generation behind the `weakseq` command line.
//!
//! Three commands, each producing serializable rows:
//!
//! - `exact`: closed-form parameters, CHSH value and witness for every node.
//! - `simulate`: Poisson-count estimates with propagated standard deviations.
//! - `tree`: the branch tree with reach probabilities and sharpness limits.
//!
//! CSV headers are the struct field names below; JSON output is an array of
//! objects with the same keys.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use weakseq::analysis::{chsh_closed_form, witness_expectation};
use weakseq::montecarlo::{estimate_chsh, estimate_witness, simulate_counts, simulate_witness_counts};
use weakseq::protocol::{amplification_condition, enumerate_tree, max_sharpness};
use weakseq::{ExperimentPlan, ProtocolConfig, TreeNode};

/// Closed-form CHSH values at or above this are measured as CHSH in
/// `simulate`; the rest are certified with the witness.
pub const CHSH_SIMULATION_THRESHOLD: f64 = 2.1;

/// Sharpness schedule used when none is given.
pub const DEFAULT_SCHEDULE: [f64; 3] = [0.34, 0.19, 0.0];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] weakseq::Error),
    #[error("--steps {steps} does not match the {len} sharpness values given")]
    StepsMismatch { steps: usize, len: usize },
    #[error("--steps {0} exceeds the default three-step schedule; pass --mu explicitly")]
    StepsWithoutSchedule(usize),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a command needs, resolved from flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub schedule: Vec<f64>,
    pub seed: u64,
    pub pairs: f64,
    pub visibility_z: f64,
    pub visibility_x: f64,
    pub format: Format,
    /// Print angles in degrees instead of radians.
    pub degrees: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            schedule: DEFAULT_SCHEDULE.to_vec(),
            seed: 0,
            pairs: weakseq::montecarlo::DEFAULT_PAIRS,
            visibility_z: 1.0,
            visibility_x: 1.0,
            format: Format::Csv,
            degrees: false,
        }
    }
}

impl RunSpec {
    /// Resolves `--steps` against `--mu`. Without `--mu` the default schedule
    /// is truncated to `steps`.
    pub fn resolve_schedule(steps: Option<usize>, mu: Option<Vec<f64>>) -> Result<Vec<f64>> {
        match (steps, mu) {
            (None, None) => Ok(DEFAULT_SCHEDULE.to_vec()),
            (None, Some(mu)) => Ok(mu),
            (Some(steps), Some(mu)) if steps == mu.len() => Ok(mu),
            (Some(steps), Some(mu)) => Err(CliError::StepsMismatch { steps, len: mu.len() }),
            (Some(steps), None) if steps <= DEFAULT_SCHEDULE.len() => Ok(DEFAULT_SCHEDULE[..steps].to_vec()),
            (Some(steps), None) => Err(CliError::StepsWithoutSchedule(steps)),
        }
    }

    pub fn config(&self) -> Result<ProtocolConfig> {
        Ok(ProtocolConfig::new(self.schedule.clone())?)
    }

    pub fn plan(&self) -> Result<ExperimentPlan> {
        let plan = ExperimentPlan {
            pairs_per_config: self.pairs,
            seed: self.seed,
            stream: 0,
            visibility_z: self.visibility_z,
            visibility_x: self.visibility_x,
        };
        plan.validate()?;
        Ok(plan)
    }

    fn angle(&self, radians: f64) -> f64 {
        if self.degrees {
            radians.to_degrees()
        } else {
            radians
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactRow {
    pub step: usize,
    pub history: String,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub mu: f64,
    pub s_chsh: f64,
    pub witness: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Chsh,
    Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRow {
    pub step: usize,
    pub history: String,
    pub quantity: Quantity,
    pub value: f64,
    pub sd: f64,
    /// `(value − 2)/sd` for CHSH, `−value/sd` for the witness.
    pub significance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeRow {
    pub step: usize,
    pub history: String,
    pub probability: f64,
    pub outcome_probability: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub mu: f64,
    pub mu_max: Option<f64>,
    pub amplifies: bool,
}

fn all_nodes(config: &ProtocolConfig) -> Result<Vec<(usize, TreeNode)>> {
    let mut out = Vec::new();
    for depth in 1..=config.steps() {
        out.extend(enumerate_tree(config, depth)?.into_iter().map(|n| (depth, n)));
    }
    Ok(out)
}

/// One row per (step, history) with the closed-form quantities.
pub fn cmd_exact(spec: &RunSpec) -> Result<Vec<ExactRow>> {
    let config = spec.config()?;
    all_nodes(&config)?
        .into_iter()
        .map(|(step, node)| {
            let p = node.params;
            Ok(ExactRow {
                step,
                history: node.history.to_string(),
                eta: spec.angle(p.eta),
                alpha: spec.angle(p.alpha),
                beta: spec.angle(p.beta),
                theta: spec.angle(p.theta),
                mu: spec.angle(p.mu),
                s_chsh: chsh_closed_form(p.eta, p.mu),
                witness: witness_expectation(&p)?.expectation,
            })
        })
        .collect()
}

/// Simulated estimates; each row draws from its own RNG stream so rows are
/// independent and reproducible under `--seed`.
pub fn cmd_simulate(spec: &RunSpec) -> Result<Vec<SimRow>> {
    let config = spec.config()?;
    let base = spec.plan()?;
    let mut rows = Vec::new();
    for (index, (step, node)) in all_nodes(&config)?.into_iter().enumerate() {
        let plan = ExperimentPlan {
            stream: index as u64,
            ..base
        };
        let p = node.params;
        let (quantity, estimate) = if chsh_closed_form(p.eta, p.mu) >= CHSH_SIMULATION_THRESHOLD {
            (Quantity::Chsh, estimate_chsh(&simulate_counts(&p, &plan)?)?)
        } else {
            (
                Quantity::Witness,
                estimate_witness(&simulate_witness_counts(&p, &plan)?)?,
            )
        };
        let significance = match quantity {
            Quantity::Chsh => estimate.significance(2.0),
            Quantity::Witness => -estimate.value / estimate.std_dev,
        };
        rows.push(SimRow {
            step,
            history: node.history.to_string(),
            quantity,
            value: estimate.value,
            sd: estimate.std_dev,
            significance,
        });
    }
    Ok(rows)
}

/// Every node of the tree with its reach probability.
pub fn cmd_tree(spec: &RunSpec) -> Result<Vec<TreeRow>> {
    let config = spec.config()?;
    Ok(all_nodes(&config)?
        .into_iter()
        .map(|(step, node)| {
            let p = node.params;
            TreeRow {
                step,
                history: node.history.to_string(),
                probability: node.probability,
                outcome_probability: node.outcome_probability,
                eta: spec.angle(p.eta),
                alpha: spec.angle(p.alpha),
                beta: spec.angle(p.beta),
                theta: spec.angle(p.theta),
                mu: spec.angle(p.mu),
                mu_max: max_sharpness(p.eta).ok().map(|m| spec.angle(m)),
                amplifies: amplification_condition(p.eta, p.mu),
            }
        })
        .collect())
}

pub fn write_rows<R: Serialize, W: Write>(rows: &[R], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Rounds half away from zero at `decimals` places.
pub fn round_half_away(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}
