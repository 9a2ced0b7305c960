use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::chain::{validate_chain, Chain, ChainViolation, Transaction, ORACLE_ID};
use crate::abm::Agent;
use crate::error::LedgerError;

/// Pricing, risk and settlement knobs of the contract layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerParams {
    /// Price of a first sale, in credit units.
    pub base_price: u64,
    /// Relative price increase per prior resale of the same information.
    pub markup: f64,
    /// Weight of the price-to-`C_max` ratio in the refusal probability.
    pub risk_aversion: f64,
    /// Credit handed to every enrolled agent at the start of a run.
    pub initial_credit: u64,
    /// Days between a contract and its validation.
    pub validation_delay_days: f64,
    /// Payout factor for information validated as trustworthy.
    pub reward_multiplier: f64,
}

impl Default for LedgerParams {
    fn default() -> Self {
        LedgerParams {
            base_price: 10,
            markup: 0.5,
            risk_aversion: 0.7,
            initial_credit: 100,
            validation_delay_days: 1.0,
            reward_multiplier: 2.0,
        }
    }
}

impl LedgerParams {
    pub fn validate(&self) -> Result<(), LedgerError> {
        let bad = |field, reason: &str| {
            Err(LedgerError::InvalidParams {
                field,
                reason: reason.to_string(),
            })
        };
        if self.base_price < 1 {
            return bad("base_price", "must be >= 1");
        }
        if !(self.markup.is_finite() && self.markup >= 0.0) {
            return bad("markup", "must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.risk_aversion) {
            return bad("risk_aversion", "must lie in [0, 1]");
        }
        if !(self.validation_delay_days.is_finite() && self.validation_delay_days >= 0.0) {
            return bad("validation_delay_days", "must be >= 0");
        }
        if !(self.reward_multiplier.is_finite() && self.reward_multiplier >= 1.0) {
            return bad("reward_multiplier", "must be >= 1");
        }
        Ok(())
    }
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Pairwise agreement formed offline between a spreader and an enrolled receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivateContract {
    pub spreader_id: u32,
    pub receiver_id: u32,
    pub credit_amount: u64,
    pub info_id: u64,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclineReason {
    InsufficientCredit,
    RiskRefusal,
}

impl fmt::Display for DeclineReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeclineReason::InsufficientCredit => "insufficient credit",
            DeclineReason::RiskRefusal => "risk refusal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Negotiation {
    Formed(PrivateContract),
    Declined(DeclineReason),
}

/// Everything that can be recomputed from the chain alone.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LedgerSummary {
    /// Highest credit amount of any exchange (non-settlement) transaction.
    pub c_max: u64,
    /// Credit accumulated per vertex: sale proceeds and settlement payouts.
    pub cred_list: BTreeMap<u64, u64>,
    /// Exchange transaction ids per information id.
    pub info_list: BTreeMap<u64, Vec<u64>>,
    /// Completed sales per (spreader, information).
    pub resale_count: BTreeMap<(u64, u64), u64>,
}

impl LedgerSummary {
    fn apply(&mut self, tx: &Transaction) {
        // Sellers are credited for exchanges, receivers for payouts.
        let credited = if tx.is_settlement() {
            tx.receiver_id
        } else {
            tx.spreader_id
        };
        *self.cred_list.entry(credited).or_default() += tx.credit_amount;
        if !tx.is_settlement() {
            self.c_max = self.c_max.max(tx.credit_amount);
            self.info_list.entry(tx.info_id).or_default().push(tx.tx_id);
            *self.resale_count.entry((tx.spreader_id, tx.info_id)).or_default() += 1;
        }
    }

    /// Folds every transaction of a valid chain from genesis.
    pub fn replay(chain: &Chain) -> Result<Self, ChainViolation> {
        validate_chain(chain)?;
        let mut summary = LedgerSummary::default();
        for tx in chain.transactions() {
            summary.apply(tx);
        }
        Ok(summary)
    }
}

/// A due exchange resolved at validation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settlement {
    pub tx_id: u64,
    pub receiver_id: u64,
    pub credit_amount: u64,
    /// Credit returned to the receiver; zero when the information was a rumor.
    pub payout: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SettlementReport {
    pub settlements: Vec<Settlement>,
}

impl SettlementReport {
    pub fn is_empty(&self) -> bool {
        self.settlements.is_empty()
    }

    pub fn total_payout(&self) -> u64 {
        self.settlements.iter().map(|s| s.payout).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct PendingPayout {
    receiver_id: u64,
    amount: u64,
    info_id: u64,
    time: f64,
}

/// The single-writer public contract: chain plus the state derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicLedger {
    chain: Chain,
    summary: LedgerSummary,
    next_tx_id: u64,
    /// Exchange transactions awaiting validation, in chain order.
    unsettled: VecDeque<Transaction>,
    settled: BTreeSet<u64>,
    /// Payout entries waiting for the next published block.
    pending_payouts: Vec<PendingPayout>,
}

impl Default for PublicLedger {
    fn default() -> Self {
        PublicLedger::new()
    }
}

impl PublicLedger {
    pub fn new() -> Self {
        PublicLedger {
            chain: Chain::new(),
            summary: LedgerSummary::default(),
            next_tx_id: 0,
            unsettled: VecDeque::new(),
            settled: BTreeSet::new(),
            pending_payouts: Vec::new(),
        }
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn summary(&self) -> &LedgerSummary {
        &self.summary
    }

    pub fn c_max(&self) -> u64 {
        self.summary.c_max
    }

    pub fn block_count(&self) -> usize {
        self.chain.len()
    }

    pub fn resale_count(&self, spreader_id: u64, info_id: u64) -> u64 {
        self.summary
            .resale_count
            .get(&(spreader_id, info_id))
            .copied()
            .unwrap_or(0)
    }

    pub fn settled(&self) -> &BTreeSet<u64> {
        &self.settled
    }

    /// Appends one block holding queued payouts and then `contracts`, with
    /// transaction ids assigned in that order. Publishes nothing when both are
    /// empty. Returns the index of the new block, if any.
    pub fn publish_contracts(
        &mut self,
        contracts: &[PrivateContract],
        timestamp: f64,
    ) -> Result<Option<u64>, LedgerError> {
        if contracts.is_empty() && self.pending_payouts.is_empty() {
            return Ok(None);
        }
        if let Some(last) = self.chain.last() {
            if timestamp < last.timestamp {
                return Err(LedgerError::TimestampRegression {
                    timestamp,
                    previous: last.timestamp,
                });
            }
        }
        let mut next_id = self.next_tx_id;
        let mut assign = || {
            next_id += 1;
            next_id
        };
        let mut txs: Vec<Transaction> = self
            .pending_payouts
            .iter()
            .map(|p| Transaction {
                tx_id: assign(),
                time: p.time,
                spreader_id: ORACLE_ID,
                receiver_id: p.receiver_id,
                credit_amount: p.amount,
                info_id: p.info_id,
            })
            .collect();
        txs.extend(contracts.iter().map(|c| Transaction {
            tx_id: assign(),
            time: c.time,
            spreader_id: c.spreader_id as u64,
            receiver_id: c.receiver_id as u64,
            credit_amount: c.credit_amount,
            info_id: c.info_id,
        }));
        let index = self.chain.push(txs, timestamp)?.index;
        self.next_tx_id = next_id;
        self.pending_payouts.clear();
        for tx in &self.chain.last().expect("just pushed").transactions {
            self.summary.apply(tx);
            if !tx.is_settlement() {
                self.unsettled.push_back(tx.clone());
            }
        }
        Ok(Some(index))
    }

    /// Settles every chained exchange whose validation delay has elapsed by
    /// `current_time`, exactly once. Trustworthy information pays the receiver
    /// `reward_multiplier * credit_amount`; a rumor pays nothing. Payouts are
    /// queued for the next published block under [`ORACLE_ID`].
    pub fn settle_contracts(
        &mut self,
        agents: &mut [Agent],
        current_time: f64,
        params: &LedgerParams,
        is_rumor: bool,
    ) -> SettlementReport {
        let mut report = SettlementReport::default();
        while let Some(tx) = self.unsettled.front() {
            if tx.time + params.validation_delay_days > current_time + 1e-9 {
                break;
            }
            let tx = self.unsettled.pop_front().expect("front exists");
            let fresh = self.settled.insert(tx.tx_id);
            assert!(fresh, "transaction {} settled twice", tx.tx_id);
            let payout = if is_rumor {
                0
            } else {
                round_half_up(params.reward_multiplier * tx.credit_amount as f64)
            };
            if payout > 0 {
                if let Some(agent) = agents.get_mut(tx.receiver_id as usize) {
                    agent.credit += payout;
                }
                self.pending_payouts.push(PendingPayout {
                    receiver_id: tx.receiver_id,
                    amount: payout,
                    info_id: tx.info_id,
                    time: current_time,
                });
            }
            report.settlements.push(Settlement {
                tx_id: tx.tx_id,
                receiver_id: tx.receiver_id,
                credit_amount: tx.credit_amount,
                payout,
            });
        }
        report
    }
}

/// `base_price * (1 + markup * resales)`, rounded half-up.
pub fn asking_price(ledger: &PublicLedger, spreader_id: u64, info_id: u64, params: &LedgerParams) -> u64 {
    let resales = ledger.resale_count(spreader_id, info_id) as f64;
    round_half_up(params.base_price as f64 * (1.0 + params.markup * resales))
}

/// `1 - risk_aversion * min(1, price / max(c_max, price))`.
///
/// A price at or above the public maximum triggers full risk aversion;
/// cheaper offers relative to an established `C_max` are accepted more often.
pub fn acceptance_probability(price: u64, c_max: u64, params: &LedgerParams) -> f64 {
    let price = price.max(1) as f64;
    let ratio = (price / (c_max as f64).max(price)).min(1.0);
    1.0 - params.risk_aversion * ratio
}

/// Negotiates one information-for-credit exchange.
///
/// `rng_draw` is a uniform `[0, 1)` value supplied by the caller. On success
/// the receiver pays the asking price to the spreader and learns `info_id`.
#[allow(clippy::too_many_arguments)]
pub fn negotiate_private_contract(
    spreader: &mut Agent,
    receiver: &mut Agent,
    ledger: &PublicLedger,
    params: &LedgerParams,
    info_id: u64,
    time: f64,
    rng_draw: f64,
) -> Result<Negotiation, LedgerError> {
    if !receiver.enrolled {
        return Err(LedgerError::ReceiverNotEnrolled(receiver.id));
    }
    if !spreader.known_info.contains(&info_id) {
        return Err(LedgerError::MissingInformation {
            spreader: spreader.id,
            info_id,
        });
    }
    let price = asking_price(ledger, spreader.id as u64, info_id, params);
    if receiver.credit < price {
        return Ok(Negotiation::Declined(DeclineReason::InsufficientCredit));
    }
    if rng_draw >= acceptance_probability(price, ledger.c_max(), params) {
        return Ok(Negotiation::Declined(DeclineReason::RiskRefusal));
    }
    receiver.credit -= price;
    spreader.credit += price;
    receiver.known_info.insert(info_id);
    Ok(Negotiation::Formed(PrivateContract {
        spreader_id: spreader.id,
        receiver_id: receiver.id,
        credit_amount: price,
        info_id,
        time,
    }))
}
