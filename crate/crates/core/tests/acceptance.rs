//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rumorsim::abm::{ensemble_stats, run_simulation, AbmConfig, AbmTrajectory, SimMode};
use rumorsim::graph::{generate_graph, poisson_tv_distance};
use rumorsim::ledger::{validate_chain, Chain, LedgerParams, LedgerSummary, Transaction, ORACLE_ID};
use rumorsim::model::{
    bsir_derivative, initial_bsir_state, initial_sir_state, poisson_pmf, sir_derivative, BlockRateParams, BsirState,
    Density, Epsilon, PopulationConfig, RateParams, SirState,
};
use rumorsim::ode::{extinction_time, integrate, peak, self_convergence, terminal_state, IntegratorConfig, Trajectory};
use rumorsim::rng;
use rumorsim::Execution;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

const N: u64 = 10_000;
const EPSILONS: [Epsilon; 6] = [
    Epsilon::Finite(0.0),
    Epsilon::Finite(0.1),
    Epsilon::Finite(0.5),
    Epsilon::Finite(1.0),
    Epsilon::Finite(2.0),
    Epsilon::Infinite,
];
const DELTAS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
const DEGREES: [f64; 2] = [10.0, 50.0];

fn pop(epsilon: Epsilon) -> PopulationConfig {
    PopulationConfig::new(N, 1, epsilon).unwrap()
}

/// Step size used by the sweeps: the fastest contact rate scales with the mean degree.
fn sweep_dt(k_bar: f64) -> f64 {
    0.05 / k_bar
}

/// Near-certain spreading among non-enrolled ignorants.
fn slow_decay(gamma: f64, delta: f64) -> BlockRateParams {
    BlockRateParams {
        lambda_b: 0.3,
        eta_b: 0.7,
        lambda_n: 0.99,
        eta_n: 0.01,
        gamma,
        delta,
        k_bar: 10.0,
    }
}

/// (gamma, delta) settings for the enrollment ordering check.
const ORDERING_PAIRS: [(f64, f64); 5] = [(0.01, 0.01), (0.1, 0.3), (0.05, 0.1), (0.001, 0.01), (0.2, 0.5)];

fn baseline_rates() -> BlockRateParams {
    BlockRateParams::reference(0.1, 0.3, 10.0)
}

fn run_ode(epsilon: Epsilon, rates: &BlockRateParams, dt: f64, t_end: f64) -> Trajectory<BsirState> {
    let config = IntegratorConfig::new(dt, t_end, 1e-4).unwrap();
    integrate(initial_bsir_state(&pop(epsilon)).unwrap(), rates, &config).unwrap()
}

// Independent transcriptions of the rate equations.
fn sir_oracle(y: [f64; 3], p: &RateParams) -> [f64; 3] {
    let [i, s, r] = y;
    let k = p.k_bar;
    [
        -(p.lambda + p.eta) * k * i * s,
        p.lambda * k * i * s - p.gamma * k * s * (s + r) - p.delta * s,
        p.eta * k * i * s + p.gamma * k * s * (s + r) + p.delta * s,
    ]
}

fn bsir_oracle(y: [f64; 4], p: &BlockRateParams) -> [f64; 4] {
    let [ib, inn, s, r] = y;
    let k = p.k_bar;
    [
        -(p.lambda_b + p.eta_b) * k * ib * s,
        -(p.lambda_n + p.eta_n) * k * inn * s,
        (p.lambda_b * ib + p.lambda_n * inn) * k * s - p.gamma * k * s * (s + r) - p.delta * s,
        (p.eta_b * ib + p.eta_n * inn) * k * s + p.gamma * k * s * (s + r) + p.delta * s,
    ]
}

fn simplex<const D: usize>(rng: &mut impl Rng) -> [f64; D] {
    let mut y = [0.0; D];
    for v in &mut y {
        *v = -(1.0 - rng.random::<f64>()).ln();
    }
    let sum: f64 = y.iter().sum();
    y.map(|v| v / sum)
}

/// Splits a unit budget into a spread/stifle pair with sum at most 1.
fn rate_pair(rng: &mut impl Rng) -> (f64, f64) {
    let a: f64 = rng.random();
    let b: f64 = rng.random::<f64>() * (1.0 - a);
    (a, b)
}

fn criterion_1() -> Outcome {
    let mut rng = rng::stream(101, 0);
    let mut worst_sum = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for _ in 0..1000 {
        let (lambda, eta) = rate_pair(&mut rng);
        let p = RateParams::new(
            lambda,
            eta,
            rng.random(),
            rng.random(),
            1.0 + 49.0 * rng.random::<f64>(),
        )
        .unwrap();
        let y = simplex::<3>(&mut rng);
        let state = SirState::new(y[0], y[1], y[2]).unwrap();
        let d = sir_derivative(&state, &p).unwrap();
        let got = [d.di, d.ds, d.dr];
        worst_sum = worst_sum.max(got.iter().sum::<f64>().abs());
        let want = sir_oracle(y, &p);
        for c in 0..3 {
            worst_oracle = worst_oracle.max((got[c] - want[c]).abs());
        }

        let (lambda_b, eta_b) = rate_pair(&mut rng);
        let (lambda_n, eta_n) = rate_pair(&mut rng);
        let p = BlockRateParams {
            lambda_b,
            eta_b,
            lambda_n,
            eta_n,
            gamma: rng.random(),
            delta: rng.random(),
            k_bar: 1.0 + 49.0 * rng.random::<f64>(),
        };
        let y = simplex::<4>(&mut rng);
        let state = BsirState::new(y[0], y[1], y[2], y[3]).unwrap();
        let d = bsir_derivative(&state, &p).unwrap();
        let got = [d.di_b, d.di_n, d.ds, d.dr];
        worst_sum = worst_sum.max(got.iter().sum::<f64>().abs());
        let want = bsir_oracle(y, &p);
        for c in 0..4 {
            worst_oracle = worst_oracle.max((got[c] - want[c]).abs());
        }
    }

    let mut worst_drift = 0.0f64;
    let config = IntegratorConfig::new(0.01, 20.0, 1e-4).unwrap();
    for run in 0..100 {
        let eps = Epsilon::Finite(rng.random::<f64>() * 3.0);
        let population = PopulationConfig::new(rng.random_range(2..1000), 1, eps).unwrap();
        let k_bar = 1.0 + 19.0 * rng.random::<f64>();
        let (gamma, delta) = (rng.random::<f64>(), rng.random::<f64>());
        let drift = if run % 2 == 0 {
            let (lambda, eta) = rate_pair(&mut rng);
            let p = RateParams::new(lambda, eta, gamma, delta, k_bar).unwrap();
            let traj = integrate(initial_sir_state(&population).unwrap(), &p, &config).unwrap();
            max_drift(&traj)
        } else {
            let (lambda_b, eta_b) = rate_pair(&mut rng);
            let (lambda_n, eta_n) = rate_pair(&mut rng);
            let p = BlockRateParams {
                lambda_b,
                eta_b,
                lambda_n,
                eta_n,
                gamma,
                delta,
                k_bar,
            };
            let traj = integrate(initial_bsir_state(&population).unwrap(), &p, &config).unwrap();
            max_drift(&traj)
        };
        worst_drift = worst_drift.max(drift);
    }
    Outcome::new(
        worst_sum <= 1e-12 && worst_oracle <= 1e-12 && worst_drift <= 1e-9,
        format!("max |sum dy| = {worst_sum:.2e}, max |dy - oracle| = {worst_oracle:.2e}, max |sum y - 1| = {worst_drift:.2e}"),
    )
}

fn max_drift<S: Density>(traj: &Trajectory<S>) -> f64 {
    traj.states
        .iter()
        .map(|s| (s.to_array().as_ref().iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn criterion_2() -> Outcome {
    let traj = run_ode(Epsilon::Finite(0.1), &baseline_rates(), 0.01, 20.0);
    let (t_peak, s_peak) = peak(&traj, |s| s.s);
    let extinct = extinction_time(&traj, 1e-4);
    let pass = (s_peak - 0.48).abs() <= 0.10 && extinct.is_some_and(|t| t <= 10.0);
    Outcome::new(
        pass,
        format!(
            "peak S = {s_peak:.4} at day {t_peak:.2}, S < 1e-4 from day {:.2}",
            extinct.unwrap_or(f64::NAN)
        ),
    )
}

fn criterion_3() -> Outcome {
    let dt = sweep_dt(10.0);
    let traj = run_ode(Epsilon::Finite(0.0), &slow_decay(0.01, 0.01), dt, 120.0);
    let (_, s_peak) = peak(&traj, |s| s.s);
    let s_100 = traj.at_day(100.0).unwrap().s;
    let lasting = traj.iter().filter(|(t, _)| *t >= 100.0).all(|(_, s)| s.s >= 1e-4);
    let witness = s_peak >= 0.80 && lasting;

    let mut ordered = true;
    let mut margins = Vec::new();
    for (gamma, delta) in ORDERING_PAIRS {
        let r = slow_decay(gamma, delta);
        let p0 = peak(&run_ode(Epsilon::Finite(0.0), &r, dt, 60.0), |s| s.s).1;
        let p1 = peak(&run_ode(Epsilon::Finite(0.1), &r, dt, 60.0), |s| s.s).1;
        ordered &= p0 > p1;
        margins.push(p0 - p1);
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome::new(
        witness && ordered,
        format!(
            "gamma=delta=0.01: peak S = {s_peak:.4}, S(100) = {s_100:.3e} (needs >= 1e-4); eps 0 vs 0.1 peak ordering {} (min margin {min_margin:.4})",
            if ordered { "holds" } else { "violated" }
        ),
    )
}

struct SweepPoint {
    peak_t: f64,
    peak_s: f64,
    terminal_r: f64,
    s_day2: f64,
}

fn criterion_4() -> Outcome {
    let settings: Vec<(f64, f64, Epsilon)> = DEGREES
        .iter()
        .flat_map(|&k| {
            DELTAS
                .iter()
                .flat_map(move |&d| EPSILONS.iter().map(move |&e| (k, d, e)))
        })
        .collect();
    let points = Execution::Parallel.map(&settings, |&(k_bar, delta, eps)| {
        let rates = BlockRateParams::reference(0.1, delta, k_bar);
        let traj = run_ode(eps, &rates, sweep_dt(k_bar), 200.0);
        let (peak_t, peak_s) = peak(&traj, |s| s.s);
        SweepPoint {
            peak_t,
            peak_s,
            terminal_r: terminal_state(&traj).r,
            s_day2: traj.at_day(2.0).unwrap().s,
        }
    });
    let at = |ki: usize, di: usize, ei: usize| &points[(ki * DELTAS.len() + di) * EPSILONS.len() + ei];

    let mut failures = Vec::new();
    for ki in 0..DEGREES.len() {
        for di in 0..DELTAS.len() {
            for ei in 1..EPSILONS.len() {
                let (prev, cur) = (at(ki, di, ei - 1), at(ki, di, ei));
                let tag = format!(
                    "k={} delta={} eps {}->{}",
                    DEGREES[ki],
                    DELTAS[di],
                    EPSILONS[ei - 1],
                    EPSILONS[ei]
                );
                if cur.peak_s >= prev.peak_s {
                    failures.push(format!("peak S not decreasing at {tag}"));
                }
                if cur.peak_t < prev.peak_t {
                    failures.push(format!("peak time decreasing at {tag}"));
                }
                if cur.terminal_r >= prev.terminal_r {
                    failures.push(format!("terminal R not decreasing at {tag}"));
                }
            }
        }
        for ei in 0..EPSILONS.len() {
            for di in 1..DELTAS.len() {
                if at(ki, di, ei).s_day2 > at(ki, di - 1, ei).s_day2 {
                    failures.push(format!(
                        "day-2 S increasing in delta at k={} eps={}",
                        DEGREES[ki], EPSILONS[ei]
                    ));
                }
            }
        }
    }
    for di in 0..DELTAS.len() {
        for ei in 0..EPSILONS.len() {
            if at(1, di, ei).peak_t >= at(0, di, ei).peak_t {
                failures.push(format!("k=50 not earlier at delta={} eps={}", DELTAS[di], EPSILONS[ei]));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{} settings, all orderings hold", points.len())
    } else {
        format!("{} violations, first: {}", failures.len(), failures[0])
    };
    Outcome::new(failures.is_empty(), detail)
}

fn criterion_5() -> Outcome {
    let mut settings: Vec<(String, Epsilon, BlockRateParams, f64, f64)> =
        vec![("baseline".into(), Epsilon::Finite(0.1), baseline_rates(), 0.01, 20.0)];
    for eps in [Epsilon::Finite(0.0), Epsilon::Finite(0.1)] {
        let long = (
            format!("slow-decay eps={eps}"),
            eps,
            slow_decay(0.01, 0.01),
            sweep_dt(10.0),
            120.0,
        );
        settings.push(long);
        for (gamma, delta) in ORDERING_PAIRS {
            let tag = format!("slow-decay gamma={gamma} delta={delta} eps={eps}");
            settings.push((tag, eps, slow_decay(gamma, delta), sweep_dt(10.0), 60.0));
        }
    }
    for &k_bar in &DEGREES {
        for &delta in &DELTAS {
            for &eps in &EPSILONS {
                let rates = BlockRateParams::reference(0.1, delta, k_bar);
                settings.push((
                    format!("k={k_bar} delta={delta} eps={eps}"),
                    eps,
                    rates,
                    sweep_dt(k_bar),
                    200.0,
                ));
            }
        }
    }
    let results = Execution::Parallel.map(&settings, |(_, eps, rates, dt, t_end)| {
        let config = IntegratorConfig::new(*dt, *t_end, 1e-4).unwrap();
        self_convergence(initial_bsir_state(&pop(*eps)).unwrap(), rates, &config).unwrap()
    });
    let mut worst_error = (0.0, 0);
    let mut worst_ratio = (f64::INFINITY, 0);
    for (i, r) in results.iter().enumerate() {
        if r.coarse_vs_half > worst_error.0 {
            worst_error = (r.coarse_vs_half, i);
        }
        if r.ratio() < worst_ratio.0 {
            worst_ratio = (r.ratio(), i);
        }
    }
    Outcome::new(
        worst_error.0 < 1e-6 && worst_ratio.0 >= 8.0,
        format!(
            "{} settings; max |y_dt - y_dt/2| = {:.2e} ({}), min halving ratio = {:.1} ({})",
            results.len(),
            worst_error.0,
            settings[worst_error.1].0,
            worst_ratio.0,
            settings[worst_ratio.1].0
        ),
    )
}

fn counts_bytes(traj: &AbmTrajectory) -> String {
    let mut out = String::new();
    for (t, c) in traj.times.iter().zip(&traj.counts) {
        writeln!(
            out,
            "{t},{},{},{},{}",
            c.ignorant_b, c.ignorant_n, c.spreaders, c.stiflers
        )
        .unwrap();
    }
    out
}

fn abm_config(mode: SimMode, epsilon: Epsilon, seed: u64, t_end: f64) -> AbmConfig {
    AbmConfig {
        pop: pop(epsilon),
        rates: baseline_rates(),
        graph_seed: seed,
        sim_seed: seed,
        dt: 0.01,
        t_end,
        mode,
        ledger: LedgerParams::default(),
        is_rumor: false,
    }
}

fn criterion_6() -> Outcome {
    let t_end = 15.0;
    let seeds: Vec<u64> = (1..=30).collect();
    let runs = Execution::Parallel.map(&seeds, |&seed| {
        run_simulation(&abm_config(SimMode::Parametric, Epsilon::Finite(0.1), seed, t_end))
            .unwrap()
            .trajectory
    });
    let conserved = runs.iter().all(|r| r.counts.iter().all(|c| c.total() == N));
    let replay = run_simulation(&abm_config(SimMode::Parametric, Epsilon::Finite(0.1), seeds[0], t_end)).unwrap();
    let reproducible = counts_bytes(&replay.trajectory) == counts_bytes(&runs[0]);

    let summary = ensemble_stats(&runs).unwrap();
    let ode = run_ode(Epsilon::Finite(0.1), &baseline_rates(), 0.01, t_end);
    let mut sup = (0.0f64, 0.0, 0);
    for (k, mean) in summary.mean.iter().enumerate() {
        let reference = ode.states[k].to_array();
        for c in 0..4 {
            let d = (mean[c] - reference[c]).abs();
            if d > sup.0 {
                sup = (d, summary.times[k], c);
            }
        }
    }
    let mean_peak = summary.mean.iter().map(|d| d[2]).fold(0.0, f64::max);
    let ode_peak = peak(&ode, |s| s.s).1;
    Outcome::new(
        sup.0 <= 0.05 && conserved && reproducible,
        format!(
            "sup |mean - ode| = {:.4} ({} at day {:.2}); mean peak S {mean_peak:.4} vs ode {ode_peak:.4}; counts conserved: {conserved}; seed replay identical: {reproducible}",
            sup.0,
            BsirState::LABELS[sup.2],
            sup.1
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut pooled: Vec<u64> = Vec::new();
    let mut worst_mean = 0.0f64;
    let mut worst_single_tv = 0.0f64;
    for seed in 1..=10 {
        let graph = generate_graph(N as usize, 10.0, seed).unwrap();
        worst_mean = worst_mean.max((graph.mean_degree() - 10.0).abs() / 10.0);
        let hist = graph.degree_histogram();
        worst_single_tv = worst_single_tv.max(poisson_tv_distance(&hist, 10.0).unwrap());
        if pooled.len() < hist.len() {
            pooled.resize(hist.len(), 0);
        }
        for (k, c) in hist.iter().enumerate() {
            pooled[k] += c;
        }
    }
    // Independent TV computation over a support wide enough to hold all Poisson mass.
    let total: u64 = pooled.iter().sum();
    let tv: f64 = 0.5
        * (0..200u64)
            .map(|k| {
                let empirical = pooled.get(k as usize).copied().unwrap_or(0) as f64 / total as f64;
                (empirical - poisson_pmf(k, 10.0).unwrap()).abs()
            })
            .sum::<f64>();
    let library_tv = poisson_tv_distance(&pooled, 10.0).unwrap();
    Outcome::new(
        worst_mean <= 0.02 && tv <= 0.02 && (tv - library_tv).abs() < 1e-9,
        format!(
            "max relative mean-degree error = {:.4}, pooled TV = {tv:.4} (max single-seed TV {worst_single_tv:.4})",
            worst_mean
        ),
    )
}

fn synthetic_chain(rng: &mut impl Rng) -> Chain {
    let mut chain = Chain::new();
    let mut tx_id = 1;
    for b in 1..100 {
        let txs = (0..rng.random_range(1..6))
            .map(|_| {
                let spreader = rng.random_range(0..500);
                let tx = Transaction {
                    tx_id,
                    time: b as f64 * 0.01,
                    spreader_id: spreader,
                    receiver_id: spreader + 1 + rng.random_range(0..500),
                    credit_amount: rng.random_range(1..200),
                    info_id: 0,
                };
                tx_id += 1;
                tx
            })
            .collect();
        chain.push(txs, b as f64 * 0.01).unwrap();
    }
    chain
}

/// Changes one field of one block so that its canonical form differs.
fn mutate(chain: &mut Chain, rng: &mut impl Rng) -> String {
    let b = rng.random_range(0..chain.len());
    let block = &mut chain.blocks[b];
    let choices = if block.transactions.is_empty() { 4 } else { 10 };
    let bump = rng.random_range(1..1000u64);
    match rng.random_range(0..choices) {
        0 => block.index += bump,
        1 => block.timestamp += bump as f64 * 1e-3,
        2 => block.prev_hash[rng.random_range(0..32)] ^= 1 << rng.random_range(0..8),
        3 => block.hash[rng.random_range(0..32)] ^= 1 << rng.random_range(0..8),
        field => {
            let t = rng.random_range(0..block.transactions.len());
            let tx = &mut block.transactions[t];
            match field {
                4 => tx.tx_id += bump,
                5 => tx.time += bump as f64 * 1e-3,
                6 => tx.spreader_id += bump,
                7 => tx.receiver_id += bump,
                8 => tx.credit_amount += bump,
                _ => tx.info_id += bump,
            }
        }
    }
    format!("block {b}")
}

/// Recomputes credit balances and the largest exchange amount directly from the transactions.
fn brute_force_summary(blocks: &[rumorsim::ledger::Block]) -> (BTreeMap<u64, u64>, u64) {
    let mut cred = BTreeMap::new();
    let mut c_max = 0;
    for tx in blocks.iter().flat_map(|b| &b.transactions) {
        if tx.spreader_id == ORACLE_ID {
            *cred.entry(tx.receiver_id).or_insert(0) += tx.credit_amount;
        } else {
            *cred.entry(tx.spreader_id).or_insert(0) += tx.credit_amount;
            c_max = c_max.max(tx.credit_amount);
        }
    }
    (cred, c_max)
}

fn criterion_8() -> Outcome {
    let mut rng = rng::stream(808, 0);
    let chain = synthetic_chain(&mut rng);
    let clean = validate_chain(&chain).is_ok() && chain.len() == 100;
    let mut missed = Vec::new();
    for _ in 0..1000 {
        let mut tampered = chain.clone();
        let place = mutate(&mut tampered, &mut rng);
        if validate_chain(&tampered).is_ok() {
            missed.push(place);
        }
    }

    // Ledger-mode runs: replay, zero-sum exchanges, and c_max after every block.
    let mut replay_ok = true;
    let mut zero_sum = true;
    let mut c_max_ok = true;
    let mut blocks_checked = 0;
    for seed in 1..=3 {
        let config = abm_config(SimMode::Ledger, Epsilon::Finite(1.0), seed, 6.0);
        let run = run_simulation(&config).unwrap();
        let mut ledger = run.ledger.unwrap();
        // Flush payouts that were settled but not yet published.
        ledger.publish_contracts(&[], config.t_end).unwrap();
        let chain = ledger.chain();
        let replayed = LedgerSummary::replay(chain).unwrap();
        let (cred, c_max) = brute_force_summary(&chain.blocks);
        replay_ok &= &replayed == ledger.summary() && replayed.cred_list == cred && replayed.c_max == c_max;

        let payouts: u64 = chain
            .transactions()
            .filter(|t| t.is_settlement())
            .map(|t| t.credit_amount)
            .sum();
        let initial = run.trajectory.enrolled * config.ledger.initial_credit;
        zero_sum &= run.population.total_credit() == initial + payouts;

        for end in 1..=chain.len() {
            let prefix = Chain {
                blocks: chain.blocks[..end].to_vec(),
            };
            c_max_ok &= LedgerSummary::replay(&prefix).unwrap().c_max == brute_force_summary(&prefix.blocks).1;
        }
        for snap in &run.trajectory.ledger {
            c_max_ok &= snap.c_max == brute_force_summary(&chain.blocks[..snap.blocks as usize]).1;
        }
        blocks_checked += chain.len();
    }
    Outcome::new(
        clean && missed.is_empty() && replay_ok && zero_sum && c_max_ok,
        format!(
            "undetected mutations: {}/1000; replay matches: {replay_ok}; exchange credit conserved: {zero_sum}; c_max oracle over {blocks_checked} blocks: {c_max_ok}",
            missed.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let seeds: Vec<u64> = (1..=10).collect();
    let runs = Execution::Parallel.map(&seeds, |&seed| {
        run_simulation(&abm_config(SimMode::Ledger, Epsilon::Finite(1.0), seed, 15.0))
            .unwrap()
            .trajectory
    });
    let (mut contacts, mut spread, mut stifle) = ([0u64; 2], [0u64; 2], [0u64; 2]);
    for report in runs.iter().flat_map(|r| &r.reports).filter(|r| r.ledger_active) {
        contacts[0] += report.contacts_b;
        contacts[1] += report.contacts_n;
        spread[0] += report.new_spreaders_b;
        spread[1] += report.new_spreaders_n;
        stifle[0] += report.new_stiflers_b;
        stifle[1] += report.new_stiflers_n;
    }
    let freq = |x: [u64; 2], i: usize| x[i] as f64 / contacts[i] as f64;
    let enough = contacts[0] >= 10_000 && contacts[1] >= 10_000;
    Outcome::new(
        enough && freq(spread, 0) < freq(spread, 1) && freq(stifle, 0) > freq(stifle, 1),
        format!(
            "contacts enrolled/other = {}/{}; spreader conversion {:.5} vs {:.5}; stifler conversion {:.5} vs {:.5}",
            contacts[0],
            contacts[1],
            freq(spread, 0),
            freq(spread, 1),
            freq(stifle, 0),
            freq(stifle, 1)
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("conservation", criterion_1, Duration::from_secs(10)),
        ("baseline ODE peak and extinction", criterion_2, Duration::from_secs(1)),
        (
            "slow-decay witness and enrollment ordering",
            criterion_3,
            Duration::from_secs(5),
        ),
        ("sweep orderings", criterion_4, Duration::from_secs(60)),
        ("RK4 self-convergence", criterion_5, Duration::from_secs(30)),
        ("agent ensemble tracks ODE", criterion_6, Duration::from_secs(240)),
        ("degree law", criterion_7, Duration::from_secs(60)),
        ("ledger integrity", criterion_8, Duration::from_secs(10)),
        ("contract-driven rate shift", criterion_9, Duration::from_secs(120)),
    ];
    let suite_start = Instant::now();
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= *limit;
        failed += usize::from(!pass);
        println!(
            "{} criterion {}: {name}: {} [{:.2}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    let total = suite_start.elapsed();
    let pass = total <= Duration::from_secs(360);
    failed += usize::from(!pass);
    println!(
        "{} criterion 10: suite wall-clock {:.1}s (limit 360s)",
        if pass { "PASS" } else { "FAIL" },
        total.as_secs_f64()
    );
    println!("{} of 10 criteria failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
