use serde::{Deserialize, Serialize};

use super::{Payout, Rejection};
use crate::primitives::{verify, Amount, ChainId, ContractId, Hashlock, PartyId, Round, Secret};

/// Parameters fixed when a premium swap contract is deployed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremiumTerms {
    pub premium_payer: PartyId,
    pub premium_amount: Amount,
    pub principal_payer: PartyId,
    pub principal_amount: Amount,
    pub lock: Hashlock,
    pub premium_deadline: Round,
    pub principal_deadline: Round,
    pub redeem_deadline: Round,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PremiumPhase {
    AwaitPremium,
    AwaitPrincipal,
    AwaitRedeem,
    SettledComplete,
    #[serde(rename = "SettledPrincipalRefund+PremiumForfeit")]
    SettledPrincipalRefundPremiumForfeit,
    SettledPremiumRefund,
    /// The premium never arrived; nothing was ever held.
    Expired,
}

impl PremiumPhase {
    pub fn name(&self) -> &'static str {
        match self {
            PremiumPhase::AwaitPremium => "AwaitPremium",
            PremiumPhase::AwaitPrincipal => "AwaitPrincipal",
            PremiumPhase::AwaitRedeem => "AwaitRedeem",
            PremiumPhase::SettledComplete => "SettledComplete",
            PremiumPhase::SettledPrincipalRefundPremiumForfeit => "SettledPrincipalRefund+PremiumForfeit",
            PremiumPhase::SettledPremiumRefund => "SettledPremiumRefund",
            PremiumPhase::Expired => "Expired",
        }
    }

    pub fn is_terminal(&self) -> bool {
        !matches!(
            self,
            PremiumPhase::AwaitPremium | PremiumPhase::AwaitPrincipal | PremiumPhase::AwaitRedeem
        )
    }
}

/// One chain's half of a two-party swap with premiums.
///
/// The premium payer buys the right to redeem the principal payer's coins.
/// Disposition of the premium:
/// - principal never deposited: premium back to its payer;
/// - principal deposited, never redeemed: premium and principal to the
///   principal payer;
/// - redeemed in time: principal and premium to the premium payer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PremiumSwapContract {
    pub id: ContractId,
    pub chain: ChainId,
    #[serde(flatten)]
    pub terms: PremiumTerms,
    pub phase: PremiumPhase,
    pub premium_at: Option<Round>,
    pub principal_at: Option<Round>,
    pub closed_at: Option<Round>,
}

impl PremiumSwapContract {
    pub fn new(id: ContractId, chain: ChainId, terms: PremiumTerms) -> Result<Self, Rejection> {
        if terms.premium_deadline == Round::ZERO {
            return Err(Rejection::ZeroDeadline);
        }
        if !(terms.premium_deadline < terms.principal_deadline
            && terms.principal_deadline < terms.redeem_deadline)
        {
            return Err(Rejection::InvalidDeadlines);
        }
        if terms.premium_payer == terms.principal_payer {
            return Err(Rejection::SameParty);
        }
        Ok(Self {
            id,
            chain,
            terms,
            phase: PremiumPhase::AwaitPremium,
            premium_at: None,
            principal_at: None,
            closed_at: None,
        })
    }

    pub fn held(&self) -> Amount {
        match self.phase {
            PremiumPhase::AwaitPrincipal => self.terms.premium_amount,
            PremiumPhase::AwaitRedeem => Amount(self.terms.premium_amount.0 + self.terms.principal_amount.0),
            _ => Amount::ZERO,
        }
    }

    /// Returns the amount to debit from `payer`.
    pub fn deposit_premium(&mut self, payer: &PartyId, submitted: Round, now: Round) -> Result<Amount, Rejection> {
        if *payer != self.terms.premium_payer {
            return Err(Rejection::WrongPayer);
        }
        if self.phase != PremiumPhase::AwaitPremium {
            return Err(Rejection::WrongPhase);
        }
        if submitted >= self.terms.premium_deadline {
            return Err(Rejection::DepositLate);
        }
        self.phase = PremiumPhase::AwaitPrincipal;
        self.premium_at = Some(now);
        Ok(self.terms.premium_amount)
    }

    /// Returns the amount to debit from `payer`.
    pub fn deposit_principal(&mut self, payer: &PartyId, submitted: Round, now: Round) -> Result<Amount, Rejection> {
        if *payer != self.terms.principal_payer {
            return Err(Rejection::WrongPayer);
        }
        if self.phase != PremiumPhase::AwaitPrincipal {
            return Err(Rejection::WrongPhase);
        }
        if submitted >= self.terms.principal_deadline {
            return Err(Rejection::DepositLate);
        }
        self.phase = PremiumPhase::AwaitRedeem;
        self.principal_at = Some(now);
        Ok(self.terms.principal_amount)
    }

    /// Submitter-agnostic: the principal always goes to the premium payer.
    pub fn redeem(&mut self, secret: &Secret, submitted: Round, now: Round) -> Result<Vec<Payout>, Rejection> {
        if self.phase != PremiumPhase::AwaitRedeem {
            return Err(if self.phase.is_terminal() { Rejection::NotLive } else { Rejection::WrongPhase });
        }
        if submitted >= self.terms.redeem_deadline {
            return Err(Rejection::RedeemLate);
        }
        if !verify(&self.terms.lock, secret) {
            return Err(Rejection::WrongSecret);
        }
        self.phase = PremiumPhase::SettledComplete;
        self.closed_at = Some(now);
        let to = self.terms.premium_payer.clone();
        Ok(vec![
            Payout { to: to.clone(), amount: self.terms.principal_amount },
            Payout { to, amount: self.terms.premium_amount },
        ])
    }

    pub fn settle(&mut self, now: Round) -> Vec<Payout> {
        let t = &self.terms;
        let (phase, payouts) = match self.phase {
            PremiumPhase::AwaitPremium if now >= t.premium_deadline => (PremiumPhase::Expired, vec![]),
            PremiumPhase::AwaitPrincipal if now >= t.principal_deadline => (
                PremiumPhase::SettledPremiumRefund,
                vec![Payout { to: t.premium_payer.clone(), amount: t.premium_amount }],
            ),
            PremiumPhase::AwaitRedeem if now >= t.redeem_deadline => (
                PremiumPhase::SettledPrincipalRefundPremiumForfeit,
                vec![
                    Payout { to: t.principal_payer.clone(), amount: t.principal_amount },
                    Payout { to: t.principal_payer.clone(), amount: t.premium_amount },
                ],
            ),
            _ => return vec![],
        };
        self.phase = phase;
        self.closed_at = Some(now);
        payouts
    }
}
