//! Hash-chained public record of credit-for-information contracts.
//!
//! [`chain`] holds the block structure, canonical hashing and validation.
//! [`contract`] holds the pairwise contract negotiation, the public ledger
//! state derived from the chain, and delayed settlement.

pub mod chain;
pub mod contract;

pub use chain::{
    append_block, canonical_payload, compute_block_hash, validate_chain, Block, Chain, ChainViolation, Digest,
    Transaction, ViolationKind, ORACLE_ID, ZERO_HASH,
};
pub use contract::{
    acceptance_probability, asking_price, negotiate_private_contract, DeclineReason, LedgerParams, LedgerSummary,
    Negotiation, PrivateContract, PublicLedger, Settlement, SettlementReport,
};
