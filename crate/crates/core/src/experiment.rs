//! Parameter sweeps over the enrollment ratio and the forgetting rate.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, OdeError};
use crate::model::{initial_bsir_state, BlockRateParams, BsirState, Epsilon, PopulationConfig};
use crate::ode::{integrate, IntegratorConfig, Trajectory};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub epsilon_values: Vec<Epsilon>,
    pub delta_values: Vec<f64>,
    #[serde(default = "default_snapshot_day")]
    pub snapshot_day: f64,
}

fn default_snapshot_day() -> f64 {
    2.0
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            epsilon_values: [0.0, 0.1, 0.5, 1.0, 2.0]
                .into_iter()
                .map(Epsilon::Finite)
                .chain([Epsilon::Infinite])
                .collect(),
            delta_values: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            snapshot_day: default_snapshot_day(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, t_end: f64) -> Result<(), ModelError> {
        if self.epsilon_values.is_empty() {
            return Err(ModelError::field("epsilon_values", "must not be empty"));
        }
        if self.delta_values.is_empty() {
            return Err(ModelError::field("delta_values", "must not be empty"));
        }
        for eps in &self.epsilon_values {
            eps.validate()?;
        }
        if let Some(bad) = self.delta_values.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(ModelError::field(
                "delta_values",
                format!("must be finite and >= 0, got {bad}"),
            ));
        }
        if !(self.snapshot_day >= 0.0 && self.snapshot_day <= t_end) {
            return Err(ModelError::field(
                "snapshot_day",
                format!("must lie in [0, t_end = {t_end}], got {}", self.snapshot_day),
            ));
        }
        Ok(())
    }
}

/// Integrates the blockchain model once per enrollment ratio, in input order.
pub fn epsilon_sweep(
    pop: &PopulationConfig,
    rates: &BlockRateParams,
    integrator: &IntegratorConfig,
    epsilons: &[Epsilon],
    execution: Execution,
) -> Result<Vec<(Epsilon, Trajectory<BsirState>)>, OdeError> {
    rates.validate(false)?;
    execution.try_map(epsilons, |&epsilon| {
        let pop = PopulationConfig { epsilon, ..*pop };
        let initial = initial_bsir_state(&pop)?;
        integrate(initial, rates, integrator).map(|traj| (epsilon, traj))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub epsilon: Epsilon,
    pub delta: f64,
    pub s: f64,
    pub r: f64,
}

/// Spreader and stifler densities at `spec.snapshot_day` over the full
/// epsilon × delta grid, epsilon-major.
///
/// Each point integrates only up to the snapshot day.
pub fn epsilon_delta_grid(
    pop: &PopulationConfig,
    rates: &BlockRateParams,
    integrator: &IntegratorConfig,
    spec: &SweepSpec,
    execution: Execution,
) -> Result<Vec<GridPoint>, OdeError> {
    integrator.validate()?;
    spec.validate(integrator.t_end)?;
    let steps = (spec.snapshot_day / integrator.dt).round();
    let horizon = IntegratorConfig {
        t_end: steps * integrator.dt,
        ..*integrator
    };
    let points: Vec<(Epsilon, f64)> = spec
        .epsilon_values
        .iter()
        .flat_map(|&e| spec.delta_values.iter().map(move |&d| (e, d)))
        .collect();
    execution.try_map(&points, |&(epsilon, delta)| {
        let rates = BlockRateParams { delta, ..*rates };
        rates.validate(false)?;
        let initial = initial_bsir_state(&PopulationConfig { epsilon, ..*pop })?;
        let traj = integrate(initial, &rates, &horizon)?;
        let last = traj.states.last().expect("trajectory is never empty");
        Ok(GridPoint {
            epsilon,
            delta,
            s: last.s,
            r: last.r,
        })
    })
}
