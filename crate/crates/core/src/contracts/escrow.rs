use serde::{Deserialize, Serialize};

use super::{Payout, Rejection};
use crate::primitives::{verify, Amount, ChainId, ContractId, Hashlock, PartyId, Round, Secret};

/// A trigger: the escrowed asset moves if `lock` is opened before `deadline`.
/// Written `owner: kΔ` in protocol tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    /// Creator of the secret; informational only.
    pub owner: PartyId,
    pub lock: Hashlock,
    pub deadline: Round,
}

impl Clause {
    pub fn new(owner: impl Into<PartyId>, lock: Hashlock, deadline: Round) -> Self {
        Self { owner: owner.into(), lock, deadline }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "state")]
pub enum EscrowState {
    Live,
    Claimed { clause: usize },
    Refunded,
}

impl EscrowState {
    pub fn name(&self) -> &'static str {
        match self {
            EscrowState::Live => "Live",
            EscrowState::Claimed { .. } => "Claimed",
            EscrowState::Refunded => "Refunded",
        }
    }
}

/// Hashlocked escrow with one or more trigger clauses and a refund path.
///
/// The asset goes to `beneficiary` if any clause is opened in time, and back
/// to `depositor` once the latest clause deadline has passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscrowContract {
    pub id: ContractId,
    pub chain: ChainId,
    pub depositor: PartyId,
    pub beneficiary: PartyId,
    pub amount: Amount,
    pub clauses: Vec<Clause>,
    pub refund_deadline: Round,
    #[serde(flatten)]
    pub state: EscrowState,
    /// Round from which the deposit is visible on chain.
    pub funded_at: Round,
    /// Round from which the terminal transition is visible.
    pub closed_at: Option<Round>,
}

impl EscrowContract {
    pub fn new(
        id: ContractId,
        chain: ChainId,
        depositor: PartyId,
        beneficiary: PartyId,
        amount: Amount,
        clauses: Vec<Clause>,
        funded_at: Round,
    ) -> Result<Self, Rejection> {
        let refund_deadline = clauses
            .iter()
            .map(|c| c.deadline)
            .max()
            .ok_or(Rejection::EmptyClauses)?;
        if clauses.iter().any(|c| c.deadline == Round::ZERO) {
            return Err(Rejection::ZeroDeadline);
        }
        Ok(Self {
            id,
            chain,
            depositor,
            beneficiary,
            amount,
            clauses,
            refund_deadline,
            state: EscrowState::Live,
            funded_at,
            closed_at: None,
        })
    }

    pub fn is_live(&self) -> bool {
        self.state == EscrowState::Live
    }

    pub fn held(&self) -> Amount {
        if self.is_live() {
            self.amount
        } else {
            Amount::ZERO
        }
    }

    /// Clauses that `secret` opens and that are still timely for a claim
    /// submitted in `submitted`.
    pub fn timely_clause(&self, secret: &Secret, submitted: Round) -> Result<usize, Rejection> {
        let mut matched = false;
        for (i, clause) in self.clauses.iter().enumerate() {
            if verify(&clause.lock, secret) {
                matched = true;
                if submitted < clause.deadline {
                    return Ok(i);
                }
            }
        }
        Err(if matched { Rejection::ClauseExpired } else { Rejection::NoMatchingClause })
    }

    /// Any party may present the secret; funds always go to the beneficiary.
    pub fn claim(&mut self, secret: &Secret, submitted: Round, now: Round) -> Result<Payout, Rejection> {
        if !self.is_live() {
            return Err(Rejection::NotLive);
        }
        let clause = self.timely_clause(secret, submitted)?;
        self.state = EscrowState::Claimed { clause };
        self.closed_at = Some(now);
        Ok(Payout { to: self.beneficiary.clone(), amount: self.amount })
    }

    pub fn refund(&mut self, submitted: Round, now: Round) -> Result<Payout, Rejection> {
        if !self.is_live() {
            return Err(Rejection::NotLive);
        }
        if submitted < self.refund_deadline {
            return Err(Rejection::RefundTooEarly);
        }
        self.state = EscrowState::Refunded;
        self.closed_at = Some(now);
        Ok(Payout { to: self.depositor.clone(), amount: self.amount })
    }

    pub fn add_clause(&mut self, caller: &PartyId, clause: Clause) -> Result<(), Rejection> {
        if !self.is_live() {
            return Err(Rejection::NotLive);
        }
        if *caller != self.depositor {
            return Err(Rejection::NotDepositor);
        }
        if clause.deadline < self.refund_deadline {
            return Err(Rejection::DeadlineShortened);
        }
        self.refund_deadline = clause.deadline;
        self.clauses.push(clause);
        Ok(())
    }

    /// Automatic refund once `now` reaches the refund deadline.
    pub fn settle(&mut self, now: Round) -> Option<Payout> {
        if self.is_live() && now >= self.refund_deadline {
            self.state = EscrowState::Refunded;
            self.closed_at = Some(now);
            Some(Payout { to: self.depositor.clone(), amount: self.amount })
        } else {
            None
        }
    }
}
