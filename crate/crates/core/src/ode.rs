//! Fixed-step classical Runge-Kutta integration and trajectory analytics.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, OdeError};
use crate::model::{Density, RumorModel};

/// Largest admissible step, in days.
pub const MAX_DT: f64 = 0.1;

/// Drift of the component sum beyond which a step is rescaled onto the simplex.
const RENORMALIZE_DRIFT: f64 = 1e-12;

/// A post-clamp component above `1 + OVERSHOOT` means the step is unstable.
const OVERSHOOT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Step size in days.
    pub dt: f64,
    /// Horizon in days. Zero yields a single-state trajectory.
    pub t_end: f64,
    /// Spreader density below which the rumor counts as extinct.
    pub extinction_threshold: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 0.01,
            t_end: 100.0,
            extinction_threshold: 1e-4,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, extinction_threshold: f64) -> Result<Self, ModelError> {
        let config = IntegratorConfig {
            dt,
            t_end,
            extinction_threshold,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(ModelError::field(
                "dt",
                format!("must lie in (0, {MAX_DT}], got {}", self.dt),
            ));
        }
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(ModelError::field(
                "t_end",
                format!("must be finite and >= 0, got {}", self.t_end),
            ));
        }
        if self.t_end > 0.0 && self.t_end < self.dt {
            return Err(ModelError::field(
                "t_end",
                format!("must be 0 or >= dt, got {}", self.t_end),
            ));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(ModelError::field(
                "t_end",
                format!("must be a whole number of steps of dt={}, got {}", self.dt, self.t_end),
            ));
        }
        if !(self.extinction_threshold > 0.0 && self.extinction_threshold < 1.0) {
            return Err(ModelError::field(
                "extinction_threshold",
                format!("must lie in (0, 1), got {}", self.extinction_threshold),
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// States sampled on a uniform time grid starting at day 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S: Density> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State at the grid point nearest to `day`, if it lies within the horizon.
    pub fn at_day(&self, day: f64) -> Option<&S> {
        if day < 0.0 {
            return None;
        }
        self.states.get((day / self.dt).round() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(&self.states)
    }
}

/// The offending component of a step that left the simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFailure {
    pub component: usize,
    pub value: f64,
}

/// One classical fourth-order Runge-Kutta step, projected back onto the simplex.
///
/// Negative and subnormal components are clamped to zero; the result is then
/// rescaled to sum to one whenever the drift exceeds `1e-12`.
pub fn rk4_step<M: RumorModel>(state: &M::State, model: &M, dt: f64) -> Result<M::State, StepFailure> {
    let y = state.to_array();
    let k1 = model.rates(y);
    let k2 = model.rates(offset(y, k1, 0.5 * dt));
    let k3 = model.rates(offset(y, k2, 0.5 * dt));
    let k4 = model.rates(offset(y, k3, dt));

    let mut next = y;
    for (idx, out) in next.as_mut().iter_mut().enumerate() {
        let slope = k1.as_ref()[idx] + 2.0 * k2.as_ref()[idx] + 2.0 * k3.as_ref()[idx] + k4.as_ref()[idx];
        *out += dt / 6.0 * slope;
    }

    for (component, value) in next.as_mut().iter_mut().enumerate() {
        if value.is_nan() || *value > 1.0 + OVERSHOOT {
            return Err(StepFailure {
                component,
                value: *value,
            });
        }
        // Subnormals would otherwise make long extinct tails very slow to step.
        if *value < f64::MIN_POSITIVE {
            *value = 0.0;
        }
    }
    let sum: f64 = next.as_ref().iter().sum();
    if (sum - 1.0).abs() > RENORMALIZE_DRIFT {
        for value in next.as_mut() {
            *value /= sum;
        }
    }
    Ok(M::State::from_array(next))
}

fn offset<A: Copy + AsRef<[f64]> + AsMut<[f64]>>(y: A, slope: A, h: f64) -> A {
    let mut out = y;
    for (o, k) in out.as_mut().iter_mut().zip(slope.as_ref()) {
        *o += h * k;
    }
    out
}

/// Integrates from day 0 to `config.t_end`, one stored state per step.
pub fn integrate<M: RumorModel>(
    initial: M::State,
    model: &M,
    config: &IntegratorConfig,
) -> Result<Trajectory<M::State>, OdeError> {
    initial.validate()?;
    config.validate()?;
    let steps = config.steps();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(initial);
    let mut current = initial;
    for k in 0..steps {
        current = rk4_step(&current, model, config.dt).map_err(|f| OdeError::Diverged {
            t: k as f64 * config.dt,
            component: f.component,
            value: f.value,
        })?;
        times.push((k + 1) as f64 * config.dt);
        states.push(current);
    }
    Ok(Trajectory {
        dt: config.dt,
        times,
        states,
    })
}

/// Earliest time at which the selected component attains its maximum.
pub fn peak<S, F>(trajectory: &Trajectory<S>, select: F) -> (f64, f64)
where
    S: Density,
    F: Fn(&S) -> f64,
{
    let mut best = (trajectory.times[0], select(&trajectory.states[0]));
    for (t, state) in trajectory.iter().skip(1) {
        let value = select(state);
        if value > best.1 {
            best = (t, value);
        }
    }
    best
}

/// Earliest `t > 0` from which the spreader density stays below `threshold`
/// for the rest of the horizon.
pub fn extinction_time<S: Density>(trajectory: &Trajectory<S>, threshold: f64) -> Option<f64> {
    let last_above = trajectory.states.iter().rposition(|s| s.spreaders() >= threshold);
    let first_below = match last_above {
        Some(idx) => idx + 1,
        None => 1,
    };
    trajectory.times.get(first_below.max(1)).copied()
}

pub fn terminal_state<S: Density>(trajectory: &Trajectory<S>) -> S {
    *trajectory.states.last().expect("trajectory is never empty")
}

/// Step-doubling error estimates for one setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfConvergence {
    /// Sup-norm distance between the `dt` and `dt/2` solutions on the coarse grid.
    pub coarse_vs_half: f64,
    /// Sup-norm distance between the `dt/2` and `dt/4` solutions on the coarse grid.
    pub half_vs_quarter: f64,
}

impl SelfConvergence {
    /// Error reduction under halving; about 16 for a fourth-order method.
    pub fn ratio(&self) -> f64 {
        self.coarse_vs_half / self.half_vs_quarter
    }
}

/// Runs the `dt`, `dt/2` and `dt/4` integrations in lockstep without storing them.
pub fn self_convergence<M: RumorModel>(
    initial: M::State,
    model: &M,
    config: &IntegratorConfig,
) -> Result<SelfConvergence, OdeError> {
    config.validate()?;
    let dt = config.dt;
    let fail = |k: usize| {
        move |f: StepFailure| OdeError::Diverged {
            t: k as f64 * dt,
            component: f.component,
            value: f.value,
        }
    };
    let (mut coarse, mut half, mut quarter) = (initial, initial, initial);
    let mut result = SelfConvergence {
        coarse_vs_half: 0.0,
        half_vs_quarter: 0.0,
    };
    for k in 0..config.steps() {
        coarse = rk4_step(&coarse, model, dt).map_err(fail(k))?;
        for _ in 0..2 {
            half = rk4_step(&half, model, dt / 2.0).map_err(fail(k))?;
        }
        for _ in 0..4 {
            quarter = rk4_step(&quarter, model, dt / 4.0).map_err(fail(k))?;
        }
        result.coarse_vs_half = result.coarse_vs_half.max(sup_distance(&coarse, &half));
        result.half_vs_quarter = result.half_vs_quarter.max(sup_distance(&half, &quarter));
    }
    Ok(result)
}

fn sup_distance<S: Density>(a: &S, b: &S) -> f64 {
    a.to_array()
        .as_ref()
        .iter()
        .zip(b.to_array().as_ref())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
