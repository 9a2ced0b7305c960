use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::error::LedgerError;

pub type Digest = [u8; 32];

pub const ZERO_HASH: Digest = [0; 32];

/// Reserved spreader id marking settlement entries paid out by the validation oracle.
pub const ORACLE_ID: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transaction {
    pub tx_id: u64,
    /// Day the contract (or settlement) took effect.
    pub time: f64,
    pub spreader_id: u64,
    pub receiver_id: u64,
    pub credit_amount: u64,
    pub info_id: u64,
}

impl Transaction {
    pub fn is_settlement(&self) -> bool {
        self.spreader_id == ORACLE_ID
    }

    fn is_well_formed(&self) -> bool {
        self.credit_amount >= 1 && self.spreader_id != self.receiver_id && valid_time(self.time)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub index: u64,
    pub timestamp: f64,
    pub transactions: Vec<Transaction>,
    #[serde(with = "hex_digest")]
    pub prev_hash: Digest,
    #[serde(with = "hex_digest")]
    pub hash: Digest,
}

impl Block {
    pub fn genesis() -> Self {
        Block {
            index: 0,
            timestamp: 0.0,
            transactions: Vec::new(),
            prev_hash: ZERO_HASH,
            hash: compute_block_hash(0, 0.0, &[], &ZERO_HASH),
        }
    }

    pub fn recompute_hash(&self) -> Digest {
        compute_block_hash(self.index, self.timestamp, &self.transactions, &self.prev_hash)
    }
}

fn valid_time(t: f64) -> bool {
    t.is_finite() && t >= 0.0
}

/// Decimal with exactly six fractional digits; `-0` prints as `0.000000`.
fn write_day(out: &mut String, t: f64) {
    write!(out, "{:.6}", t + 0.0).expect("writing to a String cannot fail");
}

/// Canonical ASCII serialization hashed into each block:
///
/// `index|timestamp|tx;tx;...|prev_hash`, where each transaction is
/// `tx_id,time,spreader_id,receiver_id,credit_amount,info_id`, times carry
/// six fractional digits and `prev_hash` is 64 lowercase hex characters.
pub fn canonical_payload(index: u64, timestamp: f64, transactions: &[Transaction], prev_hash: &Digest) -> String {
    let mut out = String::with_capacity(96 + 48 * transactions.len());
    write!(out, "{index}|").unwrap();
    write_day(&mut out, timestamp);
    out.push('|');
    for (k, tx) in transactions.iter().enumerate() {
        if k > 0 {
            out.push(';');
        }
        write!(out, "{},", tx.tx_id).unwrap();
        write_day(&mut out, tx.time);
        write!(
            out,
            ",{},{},{},{}",
            tx.spreader_id, tx.receiver_id, tx.credit_amount, tx.info_id
        )
        .unwrap();
    }
    out.push('|');
    out.push_str(&hex::encode(prev_hash));
    out
}

/// SHA-256 of the canonical payload.
pub fn compute_block_hash(index: u64, timestamp: f64, transactions: &[Transaction], prev_hash: &Digest) -> Digest {
    Sha256::digest(canonical_payload(index, timestamp, transactions, prev_hash).as_bytes()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chain {
    pub blocks: Vec<Block>,
}

impl Chain {
    pub fn new() -> Self {
        Chain {
            blocks: vec![Block::genesis()],
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn last(&self) -> Option<&Block> {
        self.blocks.last()
    }

    /// Appends in place; see [`append_block`] for the value-returning form.
    pub fn push(&mut self, transactions: Vec<Transaction>, timestamp: f64) -> Result<&Block, LedgerError> {
        if !valid_time(timestamp) {
            return Err(LedgerError::InvalidTimestamp(timestamp));
        }
        let last = self.blocks.last().ok_or(LedgerError::MissingGenesis)?;
        if timestamp < last.timestamp {
            return Err(LedgerError::TimestampRegression {
                timestamp,
                previous: last.timestamp,
            });
        }
        let index = last.index + 1;
        let prev_hash = last.hash;
        let hash = compute_block_hash(index, timestamp, &transactions, &prev_hash);
        self.blocks.push(Block {
            index,
            timestamp,
            transactions,
            prev_hash,
            hash,
        });
        Ok(self.blocks.last().unwrap())
    }

    pub fn transactions(&self) -> impl Iterator<Item = &Transaction> {
        self.blocks.iter().flat_map(|b| b.transactions.iter())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl Default for Chain {
    fn default() -> Self {
        Chain::new()
    }
}

/// Returns a new chain with one more block; `chain` is left untouched.
pub fn append_block(chain: &Chain, transactions: Vec<Transaction>, timestamp: f64) -> Result<Chain, LedgerError> {
    let mut next = chain.clone();
    next.push(transactions, timestamp)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyChain,
    MalformedGenesis,
    IndexMismatch,
    PrevHashMismatch,
    HashMismatch,
    TimestampRegression,
    InvalidTransaction,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::EmptyChain => "empty chain",
            ViolationKind::MalformedGenesis => "malformed genesis",
            ViolationKind::IndexMismatch => "index mismatch",
            ViolationKind::PrevHashMismatch => "prev_hash mismatch",
            ViolationKind::HashMismatch => "hash mismatch",
            ViolationKind::TimestampRegression => "timestamp regression",
            ViolationKind::InvalidTransaction => "invalid transaction",
        })
    }
}

/// First failing block (by position) and the check it failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainViolation {
    pub block: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for ChainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block {}: {}", self.block, self.kind)
    }
}

impl std::error::Error for ChainViolation {}

/// Checks, block by block: index continuity, hash link, hash recomputation,
/// timestamp monotonicity and transaction well-formedness.
pub fn validate_chain(chain: &Chain) -> Result<(), ChainViolation> {
    let violation = |block, kind| Err(ChainViolation { block, kind });
    let Some(genesis) = chain.blocks.first() else {
        return violation(0, ViolationKind::EmptyChain);
    };
    if genesis.prev_hash != ZERO_HASH || !genesis.transactions.is_empty() || !valid_time(genesis.timestamp) {
        return violation(0, ViolationKind::MalformedGenesis);
    }
    for (pos, block) in chain.blocks.iter().enumerate() {
        if block.index != pos as u64 {
            return violation(pos, ViolationKind::IndexMismatch);
        }
        if pos > 0 && block.prev_hash != chain.blocks[pos - 1].hash {
            return violation(pos, ViolationKind::PrevHashMismatch);
        }
        if block.recompute_hash() != block.hash {
            return violation(pos, ViolationKind::HashMismatch);
        }
        if !valid_time(block.timestamp) || (pos > 0 && block.timestamp < chain.blocks[pos - 1].timestamp) {
            return violation(pos, ViolationKind::TimestampRegression);
        }
        if !block.transactions.iter().all(Transaction::is_well_formed) {
            return violation(pos, ViolationKind::InvalidTransaction);
        }
    }
    Ok(())
}

mod hex_digest {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::Digest;

    pub fn serialize<S: Serializer>(digest: &Digest, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(digest))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Digest, D::Error> {
        let text = String::deserialize(deserializer)?;
        if text.len() != 64 || text.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(D::Error::custom("expected 64 lowercase hex characters"));
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(&text, &mut out).map_err(D::Error::custom)?;
        Ok(out)
    }
}
