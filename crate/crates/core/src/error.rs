use thiserror::Error;

use crate::primitives::{ChainId, PartyId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("seed must not be empty")]
    EmptySeed,
    #[error("amount overflow")]
    Overflow,
    #[error("amount underflow")]
    Underflow,
    #[error("scenario defines no chains")]
    NoChains,
    #[error("duplicate chain `{0}`")]
    DuplicateChain(ChainId),
    #[error("duplicate party `{0}`")]
    DuplicateParty(PartyId),
    #[error("duplicate balance for `{party}` on chain `{chain}`")]
    DuplicateBalance { chain: ChainId, party: PartyId },
    #[error("unknown party `{0}`")]
    UnknownParty(PartyId),
    #[error("unknown chain `{0}`")]
    UnknownChain(ChainId),
    #[error("contracts still live on chain `{0}`")]
    NonTerminalContracts(ChainId),
    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),
    #[error("protocol `{protocol}` has no script for `{party}`")]
    NoScript { protocol: String, party: PartyId },
    #[error("unknown step `{step}` for `{party}`")]
    UnknownStep { party: PartyId, step: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid fault schedule: {0}")]
    InvalidFaults(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
