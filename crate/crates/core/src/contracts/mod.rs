//! On-chain state machines hosted by the simulated ledgers.
//!
//! Contracts never touch balances themselves. Every transition returns the
//! payouts it releases from custody and the ledger credits them, so the
//! custody accounting lives in one place.

mod escrow;
mod premium;

pub use escrow::{Clause, EscrowContract, EscrowState};
pub use premium::{PremiumPhase, PremiumSwapContract, PremiumTerms};

use serde::{Deserialize, Serialize};

use crate::primitives::{Amount, PartyId, Round};

/// Coins released from contract custody to a party.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Payout {
    pub to: PartyId,
    pub amount: Amount,
}

/// Why a submitted action was turned down. Rejections are traced, never
/// silently dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    #[error("insufficient balance")]
    InsufficientBalance,
    #[error("empty clause list")]
    EmptyClauses,
    #[error("deadline must be positive")]
    ZeroDeadline,
    #[error("contract id already in use")]
    DuplicateContract,
    #[error("no such contract")]
    UnknownContract,
    #[error("wrong contract kind")]
    WrongContractKind,
    #[error("no clause matches the secret")]
    NoMatchingClause,
    #[error("every matching clause has expired")]
    ClauseExpired,
    #[error("contract already terminated")]
    NotLive,
    #[error("refund requested before deadline")]
    RefundTooEarly,
    #[error("caller is not the depositor")]
    NotDepositor,
    #[error("new clause would shorten a deadline")]
    DeadlineShortened,
    #[error("deadlines must be strictly increasing")]
    InvalidDeadlines,
    #[error("payer and counterparty must differ")]
    SameParty,
    #[error("caller is not the designated payer")]
    WrongPayer,
    #[error("action not allowed in the current phase")]
    WrongPhase,
    #[error("deposit submitted after its deadline")]
    DepositLate,
    #[error("redeem submitted after its deadline")]
    RedeemLate,
    #[error("secret does not open the hashlock")]
    WrongSecret,
    #[error("amount overflow")]
    Overflow,
}

/// Any contract a chain can host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Contract {
    Escrow(EscrowContract),
    PremiumSwap(PremiumSwapContract),
}

impl Contract {
    /// Coins currently in custody.
    pub fn held(&self) -> Amount {
        match self {
            Contract::Escrow(c) => c.held(),
            Contract::PremiumSwap(c) => c.held(),
        }
    }

    pub fn is_terminal(&self) -> bool {
        match self {
            Contract::Escrow(c) => !c.is_live(),
            Contract::PremiumSwap(c) => c.phase.is_terminal(),
        }
    }

    /// Fires any timeout whose deadline is at or before `now`.
    pub fn settle(&mut self, now: Round) -> Vec<Payout> {
        match self {
            Contract::Escrow(c) => c.settle(now).into_iter().collect(),
            Contract::PremiumSwap(c) => c.settle(now),
        }
    }

    /// Stable name of the current state, as it appears in traces.
    pub fn state_name(&self) -> &'static str {
        match self {
            Contract::Escrow(c) => c.state.name(),
            Contract::PremiumSwap(c) => c.phase.name(),
        }
    }

    pub fn as_escrow(&self) -> Option<&EscrowContract> {
        match self {
            Contract::Escrow(c) => Some(c),
            Contract::PremiumSwap(_) => None,
        }
    }

    pub fn as_premium(&self) -> Option<&PremiumSwapContract> {
        match self {
            Contract::PremiumSwap(c) => Some(c),
            Contract::Escrow(_) => None,
        }
    }
}
