//! Stochastic individual-level rumor dynamics on an explicit contact graph.
//!
//! Each step of length `dt` works on a snapshot of the agent states:
//!
//! * every spreader–ignorant edge is one contact; the ignorant becomes a
//!   spreader with probability `lambda_x * dt`, otherwise a stifler with
//!   probability `eta_x * dt`, where `x` is its enrollment class;
//! * every spreader adjacent to a spreader or stifler stops spreading with
//!   probability `gamma * dt` per such neighbor;
//! * every spreader forgets with probability `delta * dt`.
//!
//! Outcomes are applied simultaneously. An ignorant triggered several times
//! prefers the spreader outcome, and among spreader triggers the lowest
//! spreader id.
//!
//! In [`SimMode::Ledger`] the enrolled class has no rates of its own: a
//! spreader trigger (probability `lambda_n * dt`) opens a contract negotiation
//! with the triggering spreader, and a declined negotiation turns the receiver
//! into a stifler. The enrolled rates therefore emerge as
//! `lambda_eff = lambda_n * p_accept` and `eta_eff = eta_n + lambda_n - lambda_eff`.
//!
//! Random numbers come from one [`crate::rng`] stream per run, consumed in
//! ascending vertex id and ascending neighbor id order.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, SimError};
use crate::graph::{generate_graph, SocialGraph};
use crate::ledger::{negotiate_private_contract, LedgerParams, Negotiation, PrivateContract, PublicLedger};
use crate::model::{BlockRateParams, Epsilon, PopulationConfig};
use crate::par::Execution;
use crate::rng::{self, RunRng};

/// Identifier of the information seeded with the initial spreaders.
pub const SEEDED_INFO: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentState {
    IgnorantB,
    IgnorantN,
    Spreader,
    Stifler,
}

impl AgentState {
    pub fn is_ignorant(self) -> bool {
        matches!(self, AgentState::IgnorantB | AgentState::IgnorantN)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: u32,
    pub state: AgentState,
    /// Signed the blockchain contract.
    pub enrolled: bool,
    pub credit: u64,
    pub known_info: BTreeSet<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// Enrolled ignorants use the fixed `lambda_b`, `eta_b` probabilities.
    #[default]
    Parametric,
    /// Enrolled ignorants buy information through the credit ledger.
    Ledger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbmConfig {
    pub pop: PopulationConfig,
    pub rates: BlockRateParams,
    pub graph_seed: u64,
    pub sim_seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub mode: SimMode,
    pub ledger: LedgerParams,
    /// Ground truth about the seeded information, revealed at settlement.
    pub is_rumor: bool,
}

/// Upper bound on any per-step transition probability.
pub const MAX_STEP_PROBABILITY: f64 = 0.1;

impl AbmConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.pop.validate()?;
        self.rates.validate(false)?;
        self.ledger.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ModelError::field("dt", format!("must be > 0, got {}", self.dt)).into());
        }
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(ModelError::field("t_end", format!("must be >= 0, got {}", self.t_end)).into());
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(ModelError::field("t_end", "must be a whole number of steps").into());
        }
        let r = &self.rates;
        let fastest = [r.lambda_b, r.eta_b, r.lambda_n, r.eta_n, r.gamma * r.k_bar, r.delta]
            .into_iter()
            .fold(0.0, f64::max);
        if self.dt * fastest > MAX_STEP_PROBABILITY + 1e-12 {
            return Err(ModelError::field(
                "dt",
                format!(
                    "dt * fastest rate = {} exceeds {MAX_STEP_PROBABILITY}",
                    self.dt * fastest
                ),
            )
            .into());
        }
        if self.pop.n > u32::MAX as u64 {
            return Err(ModelError::field("n", "too large for the agent simulator").into());
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Number of agents per compartment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CompartmentCounts {
    pub ignorant_b: u64,
    pub ignorant_n: u64,
    pub spreaders: u64,
    pub stiflers: u64,
}

impl CompartmentCounts {
    pub fn total(&self) -> u64 {
        self.ignorant_b + self.ignorant_n + self.spreaders + self.stiflers
    }

    /// Densities in `(i_b, i_n, s, r)` order.
    pub fn densities(&self) -> [f64; 4] {
        let n = self.total() as f64;
        [
            self.ignorant_b as f64 / n,
            self.ignorant_n as f64 / n,
            self.spreaders as f64 / n,
            self.stiflers as f64 / n,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentPopulation {
    pub agents: Vec<Agent>,
    /// Enrolled count after half-up rounding of `(n - a) * eps / (1 + eps)`.
    pub enrolled: u64,
}

impl AgentPopulation {
    pub fn counts(&self) -> CompartmentCounts {
        let mut c = CompartmentCounts::default();
        for agent in &self.agents {
            match agent.state {
                AgentState::IgnorantB => c.ignorant_b += 1,
                AgentState::IgnorantN => c.ignorant_n += 1,
                AgentState::Spreader => c.spreaders += 1,
                AgentState::Stifler => c.stiflers += 1,
            }
        }
        c
    }

    pub fn total_credit(&self) -> u64 {
        self.agents.iter().map(|a| a.credit).sum()
    }
}

/// Enrolled agent count for a population: `round_half_up((n - a) * eps / (1 + eps))`.
pub fn enrolled_count(pop: &PopulationConfig) -> u64 {
    let ignorants = pop.n - pop.a;
    match pop.epsilon {
        Epsilon::Infinite => ignorants,
        Epsilon::Finite(_) => {
            let exact = ignorants as f64 * pop.epsilon.enrolled_fraction();
            ((exact + 0.5).floor() as u64).min(ignorants)
        }
    }
}

/// Places `a` seed spreaders uniformly at random, then enrolls a uniformly
/// random subset of the remaining vertices (see [`enrolled_count`]).
pub fn init_agents(
    graph: &SocialGraph,
    pop: &PopulationConfig,
    ledger: &LedgerParams,
    rng: &mut RunRng,
) -> Result<AgentPopulation, SimError> {
    pop.validate()?;
    if graph.n() as u64 != pop.n {
        return Err(ModelError::field(
            "n",
            format!("population {} does not match graph size {}", pop.n, graph.n()),
        )
        .into());
    }
    let n = graph.n();
    let spreaders = pop.a as usize;
    let enrolled = enrolled_count(pop);
    // Partial Fisher-Yates: the first `a` slots are spreaders, the next `enrolled` are enrolled.
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in 0..(spreaders + enrolled as usize).min(n - 1) {
        let j = rng.random_range(i..n);
        order.swap(i, j);
    }
    let mut agents: Vec<Agent> = (0..n as u32)
        .map(|id| Agent {
            id,
            state: AgentState::IgnorantN,
            enrolled: false,
            credit: 0,
            known_info: BTreeSet::new(),
        })
        .collect();
    for &v in &order[..spreaders] {
        let agent = &mut agents[v as usize];
        agent.state = AgentState::Spreader;
        agent.known_info.insert(SEEDED_INFO);
    }
    for &v in &order[spreaders..spreaders + enrolled as usize] {
        let agent = &mut agents[v as usize];
        agent.state = AgentState::IgnorantB;
        agent.enrolled = true;
        agent.credit = ledger.initial_credit;
    }
    Ok(AgentPopulation { agents, enrolled })
}

/// Transition and contact tallies of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepReport {
    /// Spreader contacts with enrolled / non-enrolled ignorants.
    pub contacts_b: u64,
    pub contacts_n: u64,
    pub new_spreaders_b: u64,
    pub new_spreaders_n: u64,
    pub new_stiflers_b: u64,
    pub new_stiflers_n: u64,
    /// Spreaders that stopped after meeting a spreader or stifler.
    pub stifled: u64,
    /// Spreaders that stopped by forgetting alone.
    pub forgot: u64,
    pub contracts: u64,
    pub declined_credit: u64,
    pub declined_risk: u64,
    /// Exchanges settled during this step.
    pub settlements: u64,
    /// Whether the ledger already held a published block when the step began.
    pub ledger_active: bool,
}

impl StepReport {
    pub fn transitions(&self) -> u64 {
        self.new_spreaders_b
            + self.new_spreaders_n
            + self.new_stiflers_b
            + self.new_stiflers_n
            + self.stifled
            + self.forgot
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trigger {
    None,
    Stifle,
    Spread(u32),
}

/// Advances the population by one step of `config.dt`, starting at day `t`.
///
/// In ledger mode `ledger` must be provided; due exchanges are settled and
/// this step's contracts are published in one block stamped `t + dt`.
pub fn simulate_step(
    population: &mut AgentPopulation,
    graph: &SocialGraph,
    config: &AbmConfig,
    ledger: Option<&mut PublicLedger>,
    t: f64,
    rng: &mut RunRng,
) -> Result<StepReport, SimError> {
    let dt = config.dt;
    let rates = &config.rates;
    let contract_mode = config.mode == SimMode::Ledger && ledger.is_some();
    let mut report = StepReport {
        ledger_active: ledger.as_ref().is_some_and(|l| l.block_count() > 1),
        ..StepReport::default()
    };

    let n = population.agents.len();
    let mut triggers = vec![Trigger::None; n];
    let mut retire = vec![(false, false); n];
    let (spread_b, lose_b) = if contract_mode {
        (rates.lambda_n * dt, (rates.lambda_n + rates.eta_n) * dt)
    } else {
        (rates.lambda_b * dt, (rates.lambda_b + rates.eta_b) * dt)
    };
    let (spread_n, lose_n) = (rates.lambda_n * dt, (rates.lambda_n + rates.eta_n) * dt);
    let p_stifle = rates.gamma * dt;
    let p_forget = rates.delta * dt;

    let agents = &population.agents;
    for v in 0..n as u32 {
        if agents[v as usize].state != AgentState::Spreader {
            continue;
        }
        for &w in graph.neighbors(v) {
            match agents[w as usize].state {
                state @ (AgentState::IgnorantB | AgentState::IgnorantN) => {
                    let (spread, lose) = if state == AgentState::IgnorantB {
                        report.contacts_b += 1;
                        (spread_b, lose_b)
                    } else {
                        report.contacts_n += 1;
                        (spread_n, lose_n)
                    };
                    let u: f64 = rng.random();
                    let slot = &mut triggers[w as usize];
                    if u < spread {
                        if !matches!(slot, Trigger::Spread(_)) {
                            *slot = Trigger::Spread(v);
                        }
                    } else if u < lose && *slot == Trigger::None {
                        *slot = Trigger::Stifle;
                    }
                }
                AgentState::Spreader | AgentState::Stifler => {
                    let u: f64 = rng.random();
                    if u < p_stifle {
                        retire[v as usize].0 = true;
                    }
                }
            }
        }
        let u: f64 = rng.random();
        if u < p_forget {
            retire[v as usize].1 = true;
        }
    }

    let when = t + dt;
    let mut contracts: Vec<PrivateContract> = Vec::new();
    for (w, &trigger) in triggers.iter().enumerate() {
        if trigger == Trigger::None {
            continue;
        }
        let enrolled_class = population.agents[w].state == AgentState::IgnorantB;
        let becomes_spreader = match trigger {
            Trigger::Spread(from) if contract_mode && enrolled_class => {
                let ledger = ledger.as_deref().expect("contract mode has a ledger");
                let draw: f64 = rng.random();
                let (spreader, receiver) = pair_mut(&mut population.agents, from as usize, w);
                match negotiate_private_contract(spreader, receiver, ledger, &config.ledger, SEEDED_INFO, when, draw)? {
                    Negotiation::Formed(contract) => {
                        contracts.push(contract);
                        report.contracts += 1;
                        true
                    }
                    Negotiation::Declined(reason) => {
                        match reason {
                            crate::ledger::DeclineReason::InsufficientCredit => report.declined_credit += 1,
                            crate::ledger::DeclineReason::RiskRefusal => report.declined_risk += 1,
                        }
                        false
                    }
                }
            }
            Trigger::Spread(_) => true,
            _ => false,
        };
        let agent = &mut population.agents[w];
        agent.state = if becomes_spreader {
            agent.known_info.insert(SEEDED_INFO);
            AgentState::Spreader
        } else {
            AgentState::Stifler
        };
        match (enrolled_class, becomes_spreader) {
            (true, true) => report.new_spreaders_b += 1,
            (true, false) => report.new_stiflers_b += 1,
            (false, true) => report.new_spreaders_n += 1,
            (false, false) => report.new_stiflers_n += 1,
        }
    }

    for (v, &(stifled, forgot)) in retire.iter().enumerate() {
        if stifled || forgot {
            population.agents[v].state = AgentState::Stifler;
            if stifled {
                report.stifled += 1;
            } else {
                report.forgot += 1;
            }
        }
    }

    if let Some(ledger) = ledger {
        if config.mode == SimMode::Ledger {
            let settled = ledger.settle_contracts(&mut population.agents, when, &config.ledger, config.is_rumor);
            report.settlements = settled.settlements.len() as u64;
            ledger.publish_contracts(&contracts, when)?;
        }
    }
    Ok(report)
}

fn pair_mut(agents: &mut [Agent], a: usize, b: usize) -> (&mut Agent, &mut Agent) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = agents.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = agents.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Ledger state visible after a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    /// Chain length including genesis; zero without a ledger.
    pub blocks: u64,
    pub c_max: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbmTrajectory {
    pub times: Vec<f64>,
    pub counts: Vec<CompartmentCounts>,
    pub ledger: Vec<LedgerSnapshot>,
    /// `reports[k]` describes the step from `times[k]` to `times[k + 1]`.
    pub reports: Vec<StepReport>,
    pub enrolled: u64,
}

impl AbmTrajectory {
    pub fn densities(&self) -> Vec<[f64; 4]> {
        self.counts.iter().map(CompartmentCounts::densities).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbmRun {
    pub trajectory: AbmTrajectory,
    pub population: AgentPopulation,
    /// Present in ledger mode.
    pub ledger: Option<PublicLedger>,
}

/// Builds the graph and agents, then steps to `t_end`, recording counts after every step.
pub fn run_simulation(config: &AbmConfig) -> Result<AbmRun, SimError> {
    config.validate()?;
    let graph = generate_graph(config.pop.n as usize, config.rates.k_bar, config.graph_seed)?;
    let mut rng = rng::stream(config.sim_seed, rng::DYNAMICS_STREAM);
    let mut population = init_agents(&graph, &config.pop, &config.ledger, &mut rng)?;
    let mut ledger = (config.mode == SimMode::Ledger).then(PublicLedger::new);

    let steps = config.steps();
    let snapshot = |ledger: &Option<PublicLedger>| match ledger {
        Some(l) => LedgerSnapshot {
            blocks: l.block_count() as u64,
            c_max: l.c_max(),
        },
        None => LedgerSnapshot::default(),
    };
    let mut trajectory = AbmTrajectory {
        times: Vec::with_capacity(steps + 1),
        counts: Vec::with_capacity(steps + 1),
        ledger: Vec::with_capacity(steps + 1),
        reports: Vec::with_capacity(steps),
        enrolled: population.enrolled,
    };
    trajectory.times.push(0.0);
    trajectory.counts.push(population.counts());
    trajectory.ledger.push(snapshot(&ledger));

    for k in 0..steps {
        let t = k as f64 * config.dt;
        let counts = trajectory.counts[k];
        // Without spreaders nothing can change except pending settlements.
        let idle = counts.spreaders == 0 && ledger.is_none();
        let report = if idle {
            StepReport::default()
        } else {
            simulate_step(&mut population, &graph, config, ledger.as_mut(), t, &mut rng)?
        };
        trajectory.times.push((k + 1) as f64 * config.dt);
        trajectory.counts.push(if idle { counts } else { population.counts() });
        trajectory.ledger.push(snapshot(&ledger));
        trajectory.reports.push(report);
    }
    Ok(AbmRun {
        trajectory,
        population,
        ledger,
    })
}

/// Pointwise mean and sample standard deviation of density trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub times: Vec<f64>,
    /// `(i_b, i_n, s, r)` means per time.
    pub mean: Vec<[f64; 4]>,
    pub std_dev: Vec<[f64; 4]>,
    pub runs: usize,
}

pub fn ensemble_stats(runs: &[AbmTrajectory]) -> Result<EnsembleSummary, SimError> {
    if runs.len() < 2 {
        return Err(SimError::TooFewRuns(runs.len()));
    }
    let len = runs[0].counts.len();
    if let Some(bad) = runs.iter().find(|r| r.counts.len() != len) {
        return Err(SimError::HorizonMismatch {
            expected: len,
            found: bad.counts.len(),
        });
    }
    let m = runs.len() as f64;
    let densities: Vec<Vec<[f64; 4]>> = runs.iter().map(AbmTrajectory::densities).collect();
    let mut mean = vec![[0.0; 4]; len];
    let mut std_dev = vec![[0.0; 4]; len];
    for k in 0..len {
        for c in 0..4 {
            let mu = densities.iter().map(|d| d[k][c]).sum::<f64>() / m;
            let var = densities.iter().map(|d| (d[k][c] - mu).powi(2)).sum::<f64>() / (m - 1.0);
            mean[k][c] = mu;
            std_dev[k][c] = var.sqrt();
        }
    }
    Ok(EnsembleSummary {
        times: runs[0].times.clone(),
        mean,
        std_dev,
        runs: runs.len(),
    })
}

/// Runs `config` once per seed (used as both graph and dynamics seed) and
/// summarizes the density trajectories.
pub fn ensemble_mean(config: &AbmConfig, seeds: &[u64], execution: Execution) -> Result<EnsembleSummary, SimError> {
    if seeds.len() < 2 {
        return Err(SimError::TooFewRuns(seeds.len()));
    }
    let runs = execution.try_map(seeds, |&seed| {
        let cfg = AbmConfig {
            graph_seed: seed,
            sim_seed: seed,
            ..config.clone()
        };
        run_simulation(&cfg).map(|run| run.trajectory)
    })?;
    ensemble_stats(&runs)
}
