//! Deterministic multi-chain simulator and adversarial explorer for atomic
//! commitment protocols: two-phase commit, hashed timelock swaps, swaps with
//! premiums and a naive option-transfer protocol.
//!
//! Time advances in rounds of one maximal propagation delay. Every chain is
//! a [`ledger::Ledger`] inside one [`ledger::World`]; parties act through
//! [`protocols`] scripts, deviate through [`adversary`] strategies, and
//! [`explorer`] sweeps whole deviation catalogs and classifies the outcome
//! for every compliant party.

pub mod adversary;
pub mod cli;
pub mod contracts;
pub mod error;
pub mod explorer;
pub mod ledger;
pub mod primitives;
pub mod protocols;
pub mod scenario;
pub mod tpc;

pub use error::{Error, Result};
pub use primitives::{hashlock, make_secret, verify, Amount, ChainId, ContractId, Hashlock, PartyId, Round, Secret};
