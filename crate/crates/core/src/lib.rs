//! Rumor propagation with and without a blockchain credit mechanism.
//!
//! * [`model`]: compartmental rate equations and population setup.
//! * [`ode`]: fixed-step RK4 integration and trajectory readouts.
//! * [`graph`] and [`abm`]: agent-level simulation on random contact graphs.
//! * [`ledger`]: hash-chained public ledger and private credit contracts.
//! * [`experiment`]: enrollment-ratio and forgetting-rate sweeps.

pub mod abm;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod ledger;
pub mod model;
pub mod ode;
pub mod par;
pub mod rng;

pub use error::{LedgerError, ModelError, OdeError, SimError};
pub use par::Execution;
