use serde::{Deserialize, Serialize};

use super::{escrow_matches, Ctx, Holdings, PartyRole, Plan, Script, StepSpec};
use crate::contracts::Clause;
use crate::error::{Error, Result};
use crate::ledger::{Action, Setup};
use crate::primitives::{Amount, ChainId, ContractId, PartyId, Round};

/// Escrow timeouts, counted from the start of the commit phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HtlcTimeouts {
    pub alice: u32,
    pub bob: u32,
}

pub const HTLC_TIMEOUTS: HtlcTimeouts = HtlcTimeouts { alice: 2, bob: 1 };

/// Round in which the commit phase starts: both escrows (one round each)
/// are visible by then.
pub const HTLC_COMMIT_START: u32 = 2;

const CONTRACT: &str = "htlc";

/// Two-party hashed timelock swap. Alice escrows `alice_amount` on
/// `alice_chain` for Bob; Bob escrows `bob_amount` on `bob_chain` for Alice;
/// both escrows are locked by Alice's secret.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HtlcParams {
    pub alice: PartyId,
    pub bob: PartyId,
    pub alice_chain: ChainId,
    pub bob_chain: ChainId,
    pub alice_amount: Amount,
    pub bob_amount: Amount,
    pub timeouts: HtlcTimeouts,
    pub commit_start: u32,
}

impl Default for HtlcParams {
    fn default() -> Self {
        HtlcParams {
            alice: "alice".into(),
            bob: "bob".into(),
            alice_chain: "guilder".into(),
            bob_chain: "florin".into(),
            alice_amount: Amount(100),
            bob_amount: Amount(100),
            timeouts: HTLC_TIMEOUTS,
            commit_start: HTLC_COMMIT_START,
        }
    }
}

impl HtlcParams {
    pub fn alice_deadline(&self) -> Round {
        Round(self.commit_start + self.timeouts.alice)
    }

    pub fn bob_deadline(&self) -> Round {
        Round(self.commit_start + self.timeouts.bob)
    }

    fn alice_clause(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        vec![Clause::new(self.alice.clone(), ctx.lock_of(&self.alice), self.alice_deadline())]
    }

    fn bob_clause(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        vec![Clause::new(self.alice.clone(), ctx.lock_of(&self.alice), self.bob_deadline())]
    }
}

impl Script for HtlcParams {
    fn parties(&self) -> Vec<PartyId> {
        vec![self.alice.clone(), self.bob.clone()]
    }

    fn default_setup(&self) -> Setup {
        Setup::with_parties(&[self.alice.as_str(), self.bob.as_str()])
            .chain(self.alice_chain.as_str(), &[(self.alice.as_str(), self.alice_amount.0)])
            .chain(self.bob_chain.as_str(), &[(self.bob.as_str(), self.bob_amount.0)])
    }

    fn steps(&self, party: &PartyId) -> Vec<StepSpec> {
        let forward_until = self.alice_deadline().index().saturating_sub(1);
        if *party == self.alice {
            vec![StepSpec::new("escrow", 0, 0), StepSpec::new("claim", 2, 2)]
        } else if *party == self.bob {
            vec![StepSpec::new("escrow", 1, 1), StepSpec::new("forward", 2, forward_until.max(2))]
        } else {
            vec![]
        }
    }

    fn plan(&self, party: &PartyId, step: &str, ctx: &Ctx<'_>) -> Plan {
        let id = ContractId::new(CONTRACT);
        match (party == &self.alice, step) {
            (true, "escrow") => Plan::one(
                &self.alice_chain,
                Action::DeployEscrow {
                    id,
                    beneficiary: self.bob.clone(),
                    amount: self.alice_amount,
                    clauses: self.alice_clause(ctx),
                },
            ),
            (true, "claim") => {
                let ok = ctx.escrow(&self.bob_chain, CONTRACT).is_some_and(|e| {
                    escrow_matches(e, &self.bob, &self.alice, self.bob_amount, &self.bob_clause(ctx))
                });
                if ok && ctx.round() < self.bob_deadline() {
                    Plan::one(&self.bob_chain, Action::Claim { contract: id, secret: *ctx.secret })
                } else {
                    Plan::Halt
                }
            }
            (false, "escrow") => {
                let ok = ctx.escrow(&self.alice_chain, CONTRACT).is_some_and(|e| {
                    escrow_matches(e, &self.alice, &self.bob, self.alice_amount, &self.alice_clause(ctx))
                });
                if ok {
                    Plan::one(
                        &self.bob_chain,
                        Action::DeployEscrow {
                            id,
                            beneficiary: self.alice.clone(),
                            amount: self.bob_amount,
                            clauses: self.bob_clause(ctx),
                        },
                    )
                } else {
                    Plan::Halt
                }
            }
            (false, "forward") => {
                if !ctx.escrow(&self.alice_chain, CONTRACT).is_some_and(|e| e.is_live()) {
                    return Plan::Skip;
                }
                match ctx.known_secret(&self.alice) {
                    Some(secret) => Plan::one(&self.alice_chain, Action::Claim { contract: id, secret }),
                    None => Plan::Wait,
                }
            }
            _ => Plan::Skip,
        }
    }

    fn max_deadline(&self) -> Round {
        self.alice_deadline().max(self.bob_deadline())
    }

    fn contracts(&self) -> Vec<(ChainId, ContractId)> {
        vec![
            (self.alice_chain.clone(), CONTRACT.into()),
            (self.bob_chain.clone(), CONTRACT.into()),
        ]
    }

    fn roles(&self) -> Vec<PartyRole> {
        let a = self.alice_amount.signed();
        let b = self.bob_amount.signed();
        vec![
            PartyRole {
                party: self.alice.clone(),
                completions: vec![Holdings::from([(self.alice_chain.clone(), -a), (self.bob_chain.clone(), b)])],
                outlay: Holdings::new(),
                entitlement: 0,
            },
            PartyRole {
                party: self.bob.clone(),
                completions: vec![Holdings::from([(self.alice_chain.clone(), a), (self.bob_chain.clone(), -b)])],
                outlay: Holdings::new(),
                entitlement: 0,
            },
        ]
    }

    fn validate(&self) -> Result<()> {
        if self.alice == self.bob || self.alice_chain == self.bob_chain {
            return Err(Error::InvalidParams("htlc needs two parties and two chains".into()));
        }
        if self.timeouts.alice == 0 || self.timeouts.bob == 0 {
            return Err(Error::InvalidParams("htlc timeouts must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{Edit, Strategy};
    use crate::contracts::EscrowState;
    use crate::protocols::{run, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

    fn go(params: HtlcParams, strategies: &[Strategy]) -> crate::protocols::RunResult {
        let setup = params.default_setup();
        run(&SwapProtocol::Htlc(params), &setup, strategies, DEFAULT_SEED, DEFAULT_MAX_ROUNDS).unwrap()
    }

    fn bal(r: &crate::protocols::RunResult, chain: &str, party: &str) -> u64 {
        r.world.read(&chain.into()).unwrap().balance(&party.into()).0
    }

    #[test]
    fn default_timeouts_are_two_and_one() {
        assert_eq!(HTLC_TIMEOUTS, HtlcTimeouts { alice: 2, bob: 1 });
        let p = HtlcParams::default();
        assert!(p.bob_deadline() < p.alice_deadline());
    }

    #[test]
    fn compliant_swap_completes() {
        let r = go(HtlcParams::default(), &[]);
        assert_eq!(bal(&r, "guilder", "bob"), 100);
        assert_eq!(bal(&r, "florin", "alice"), 100);
        for chain in ["guilder", "florin"] {
            let e = r.world.read(&chain.into()).unwrap().escrow(&"htlc".into()).unwrap().clone();
            assert_eq!(e.state, EscrowState::Claimed { clause: 0 });
        }
    }

    #[test]
    fn bob_never_escrows_alice_refunded() {
        let r = go(HtlcParams::default(), &[Strategy::new("bob", vec![Edit::Omit { step: "escrow".into() }])]);
        assert_eq!(bal(&r, "guilder", "alice"), 100);
        assert_eq!(bal(&r, "florin", "bob"), 100);
        let e = r.world.read(&"guilder".into()).unwrap().escrow(&"htlc".into()).unwrap().clone();
        assert_eq!(e.state, EscrowState::Refunded);
        assert_eq!(e.closed_at, Some(HtlcParams::default().alice_deadline()));
    }

    #[test]
    fn bob_asleep_loses_both_chains() {
        let r = go(HtlcParams::default(), &[Strategy::new("bob", vec![Edit::Omit { step: "forward".into() }])]);
        assert_eq!(bal(&r, "guilder", "alice"), 100);
        assert_eq!(bal(&r, "florin", "alice"), 100);
        assert_eq!(bal(&r, "guilder", "bob"), 0);
        assert_eq!(bal(&r, "florin", "bob"), 0);
    }

    #[test]
    fn late_claim_with_equal_timeouts_strands_bob() {
        let params = HtlcParams { timeouts: HtlcTimeouts { alice: 2, bob: 2 }, ..HtlcParams::default() };
        let alice = Strategy::new("alice", vec![Edit::DelayTo { step: "claim".into(), round: Round(3) }]);
        let r = go(params, &[alice]);
        assert_eq!(bal(&r, "guilder", "alice"), 100);
        assert_eq!(bal(&r, "florin", "alice"), 100);
        assert_eq!(bal(&r, "florin", "bob"), 0);
    }

    #[test]
    fn same_late_claim_is_harmless_with_default_timeouts() {
        let alice = Strategy::new("alice", vec![Edit::DelayTo { step: "claim".into(), round: Round(3) }]);
        let r = go(HtlcParams::default(), &[alice]);
        assert_eq!(bal(&r, "guilder", "alice"), 100);
        assert_eq!(bal(&r, "florin", "bob"), 100);
    }
}
