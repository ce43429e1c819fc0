use serde::{Deserialize, Serialize};

use super::{premium_step, Ctx, Holdings, PartyRole, Plan, Script, StepSpec};
use crate::contracts::{PremiumPhase, PremiumTerms};
use crate::error::{Error, Result};
use crate::ledger::{PremiumAction, Setup};
use crate::primitives::{Amount, ChainId, ContractId, PartyId, Round};

/// Deadline of each of the six steps, in protocol order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PremiumDeadlines(pub [u32; 6]);

pub const PREMIUM_DEADLINES: PremiumDeadlines = PremiumDeadlines([1, 2, 3, 4, 5, 6]);

const CONTRACT: &str = "swap";

/// Premium charged when a scenario does not give one: 2% of the principal
/// it protects, rounded down.
pub fn default_premium(principal: Amount) -> Amount {
    Amount(principal.0 / 50)
}

/// Two-party swap with premiums.
///
/// Alice owns `alice_principal` on `alice_chain`, Bob owns `bob_principal` on
/// `bob_chain`. `premium_a` protects Bob's principal and `premium_b` protects
/// Alice's; Alice deposits both on Bob's chain, Bob deposits `premium_b` on
/// Alice's chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PremiumParams {
    pub alice: PartyId,
    pub bob: PartyId,
    pub alice_chain: ChainId,
    pub bob_chain: ChainId,
    pub alice_principal: Amount,
    pub bob_principal: Amount,
    pub premium_a: Option<Amount>,
    pub premium_b: Option<Amount>,
    pub deadlines: PremiumDeadlines,
}

impl Default for PremiumParams {
    fn default() -> Self {
        PremiumParams {
            alice: "alice".into(),
            bob: "bob".into(),
            alice_chain: "guilder".into(),
            bob_chain: "florin".into(),
            alice_principal: Amount(100),
            bob_principal: Amount(100),
            premium_a: None,
            premium_b: None,
            deadlines: PREMIUM_DEADLINES,
        }
    }
}

impl PremiumParams {
    pub fn p_a(&self) -> Amount {
        self.premium_a.unwrap_or_else(|| default_premium(self.bob_principal))
    }

    pub fn p_b(&self) -> Amount {
        self.premium_b.unwrap_or_else(|| default_premium(self.alice_principal))
    }

    fn deadline(&self, step: usize) -> Round {
        Round(self.deadlines.0[step - 1])
    }

    /// Terms of the contract on Bob's chain: Alice buys the right to redeem
    /// Bob's principal.
    pub fn bob_chain_terms(&self, ctx: &Ctx<'_>) -> PremiumTerms {
        PremiumTerms {
            premium_payer: self.alice.clone(),
            premium_amount: Amount(self.p_a().0 + self.p_b().0),
            principal_payer: self.bob.clone(),
            principal_amount: self.bob_principal,
            lock: ctx.lock_of(&self.alice),
            premium_deadline: self.deadline(1),
            principal_deadline: self.deadline(4),
            redeem_deadline: self.deadline(5),
        }
    }

    /// Terms of the contract on Alice's chain.
    pub fn alice_chain_terms(&self, ctx: &Ctx<'_>) -> PremiumTerms {
        PremiumTerms {
            premium_payer: self.bob.clone(),
            premium_amount: self.p_b(),
            principal_payer: self.alice.clone(),
            principal_amount: self.alice_principal,
            lock: ctx.lock_of(&self.alice),
            premium_deadline: self.deadline(2),
            principal_deadline: self.deadline(3),
            redeem_deadline: self.deadline(6),
        }
    }

    fn phase(&self, ctx: &Ctx<'_>, chain: &ChainId, terms: &PremiumTerms) -> Option<PremiumPhase> {
        ctx.view
            .premium(chain, &ContractId::new(CONTRACT))
            .filter(|c| c.terms == *terms)
            .map(|c| c.phase)
    }

    fn window(&self, step: usize) -> StepSpec {
        const NAMES: [&str; 6] = ["step1", "step2", "step3", "step4", "step5", "step6"];
        let at = self.deadline(step).index() - 1;
        if step == 6 {
            // Bob may redeem as soon as the secret could be public.
            StepSpec::new(NAMES[5], self.deadline(5).index().min(at), at)
        } else {
            StepSpec::new(NAMES[step - 1], at, at)
        }
    }
}

impl Script for PremiumParams {
    fn parties(&self) -> Vec<PartyId> {
        vec![self.alice.clone(), self.bob.clone()]
    }

    fn default_setup(&self) -> Setup {
        let (a, b) = (self.alice.as_str(), self.bob.as_str());
        Setup::with_parties(&[a, b])
            .chain(self.bob_chain.as_str(), &[(a, self.p_a().0 + self.p_b().0), (b, self.bob_principal.0)])
            .chain(self.alice_chain.as_str(), &[(a, self.alice_principal.0), (b, self.p_b().0)])
    }

    fn steps(&self, party: &PartyId) -> Vec<StepSpec> {
        if *party == self.alice {
            vec![self.window(1), self.window(3), self.window(5)]
        } else if *party == self.bob {
            vec![self.window(2), self.window(4), self.window(6)]
        } else {
            vec![]
        }
    }

    fn plan(&self, _party: &PartyId, step: &str, ctx: &Ctx<'_>) -> Plan {
        let id = || ContractId::new(CONTRACT);
        let on_bob = self.bob_chain_terms(ctx);
        let on_alice = self.alice_chain_terms(ctx);
        let bob_side = self.phase(ctx, &self.bob_chain, &on_bob);
        let alice_side = self.phase(ctx, &self.alice_chain, &on_alice);
        match step {
            "step1" => Plan::Act(vec![
                (self.bob_chain.clone(), premium_step(PremiumAction::Deploy { id: id(), terms: on_bob })),
                (self.bob_chain.clone(), premium_step(PremiumAction::DepositPremium { contract: id() })),
            ]),
            "step2" if bob_side == Some(PremiumPhase::AwaitPrincipal) => Plan::Act(vec![
                (self.alice_chain.clone(), premium_step(PremiumAction::Deploy { id: id(), terms: on_alice })),
                (self.alice_chain.clone(), premium_step(PremiumAction::DepositPremium { contract: id() })),
            ]),
            "step3" if bob_side == Some(PremiumPhase::AwaitPrincipal)
                && alice_side == Some(PremiumPhase::AwaitPrincipal) =>
            {
                Plan::one(&self.alice_chain, premium_step(PremiumAction::DepositPrincipal { contract: id() }))
            }
            "step4" if bob_side == Some(PremiumPhase::AwaitPrincipal)
                && alice_side == Some(PremiumPhase::AwaitRedeem) =>
            {
                Plan::one(&self.bob_chain, premium_step(PremiumAction::DepositPrincipal { contract: id() }))
            }
            "step5" if bob_side == Some(PremiumPhase::AwaitRedeem) => Plan::one(
                &self.bob_chain,
                premium_step(PremiumAction::Redeem { contract: id(), secret: *ctx.secret }),
            ),
            "step6" => {
                if alice_side != Some(PremiumPhase::AwaitRedeem) {
                    return Plan::Skip;
                }
                match ctx.known_secret(&self.alice) {
                    Some(secret) => {
                        Plan::one(&self.alice_chain, premium_step(PremiumAction::Redeem { contract: id(), secret }))
                    }
                    None => Plan::Wait,
                }
            }
            _ => Plan::Halt,
        }
    }

    fn max_deadline(&self) -> Round {
        Round(self.deadlines.0.iter().copied().max().unwrap_or(0))
    }

    fn contracts(&self) -> Vec<(ChainId, ContractId)> {
        vec![
            (self.bob_chain.clone(), CONTRACT.into()),
            (self.alice_chain.clone(), CONTRACT.into()),
        ]
    }

    fn roles(&self) -> Vec<PartyRole> {
        let (pa, pb) = (self.p_a().signed(), self.p_b().signed());
        let (big_a, big_b) = (self.alice_principal.signed(), self.bob_principal.signed());
        vec![
            PartyRole {
                party: self.alice.clone(),
                completions: vec![Holdings::from([
                    (self.alice_chain.clone(), -big_a),
                    (self.bob_chain.clone(), big_b),
                ])],
                outlay: Holdings::from([(self.bob_chain.clone(), pa + pb)]),
                entitlement: pb,
            },
            PartyRole {
                party: self.bob.clone(),
                completions: vec![Holdings::from([
                    (self.bob_chain.clone(), -big_b),
                    (self.alice_chain.clone(), big_a),
                ])],
                outlay: Holdings::from([(self.alice_chain.clone(), pb)]),
                entitlement: pa,
            },
        ]
    }

    fn validate(&self) -> Result<()> {
        if self.alice == self.bob || self.alice_chain == self.bob_chain {
            return Err(Error::InvalidParams("premium swap needs two parties and two chains".into()));
        }
        let d = self.deadlines.0;
        if d[0] == 0 || d.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("premium deadlines must be positive and strictly increasing".into()));
        }
        self.p_a().checked_add(self.p_b())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{Edit, Strategy};
    use crate::protocols::{run, RunResult, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

    fn go(params: &PremiumParams, strategies: &[Strategy]) -> RunResult {
        let setup = params.default_setup();
        run(&SwapProtocol::Premium(params.clone()), &setup, strategies, DEFAULT_SEED, DEFAULT_MAX_ROUNDS).unwrap()
    }

    fn delta(r: &RunResult, chain: &str, party: &str) -> i64 {
        let c = ChainId::from(chain);
        let p = PartyId::from(party);
        r.world.read(&c).unwrap().balance(&p).signed() - r.initial.read(&c).unwrap().balance(&p).signed()
    }

    fn omit(party: &str, step: &str) -> Strategy {
        Strategy::new(party, vec![Edit::Omit { step: step.into() }])
    }

    #[test]
    fn default_deadlines_are_one_through_six() {
        assert_eq!(PREMIUM_DEADLINES.0, [1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn two_percent_default() {
        assert_eq!(default_premium(Amount(100)), Amount(2));
        assert_eq!(default_premium(Amount(150)), Amount(3));
        let p = PremiumParams { alice_principal: Amount(250), bob_principal: Amount(500), ..Default::default() };
        assert_eq!((p.p_a(), p.p_b()), (Amount(10), Amount(5)));
    }

    #[test]
    fn compliant_run_refunds_premiums() {
        let p = PremiumParams::default();
        let r = go(&p, &[]);
        assert_eq!(delta(&r, "guilder", "alice"), -100);
        assert_eq!(delta(&r, "florin", "alice"), 100);
        assert_eq!(delta(&r, "guilder", "bob"), 100);
        assert_eq!(delta(&r, "florin", "bob"), -100);
    }

    #[test]
    fn alice_walks_at_step5_pays_bob_net_pa() {
        let p = PremiumParams { alice_principal: Amount(100), bob_principal: Amount(200), ..Default::default() };
        let (pa, pb) = (p.p_a().signed(), p.p_b().signed());
        let r = go(&p, &[omit("alice", "step5")]);
        assert_eq!(delta(&r, "florin", "bob"), pa + pb);
        assert_eq!(delta(&r, "guilder", "bob"), -pb);
        assert_eq!(delta(&r, "florin", "alice"), -(pa + pb));
        assert_eq!(delta(&r, "guilder", "alice"), pb);
    }

    #[test]
    fn bob_walks_at_step4_pays_alice_pb() {
        let p = PremiumParams { alice_principal: Amount(100), bob_principal: Amount(200), ..Default::default() };
        let pb = p.p_b().signed();
        let r = go(&p, &[omit("bob", "step4")]);
        assert_eq!(delta(&r, "florin", "alice"), 0);
        assert_eq!(delta(&r, "guilder", "alice"), pb);
        assert_eq!(delta(&r, "guilder", "bob"), -pb);
        assert_eq!(delta(&r, "florin", "bob"), 0);
    }

    #[test]
    fn bob_skips_premium_alice_refunded_at_principal_deadline() {
        let p = PremiumParams::default();
        let r = go(&p, &[omit("bob", "step2")]);
        assert_eq!(delta(&r, "florin", "alice"), 0);
        let c = r.world.read(&"florin".into()).unwrap().premium(&"swap".into()).unwrap().clone();
        assert_eq!(c.phase, PremiumPhase::SettledPremiumRefund);
        assert_eq!(c.closed_at, Some(Round(4)));
    }

    #[test]
    fn deadlines_must_increase() {
        let p = PremiumParams { deadlines: PremiumDeadlines([1, 2, 2, 4, 5, 6]), ..Default::default() };
        assert!(p.validate().is_err());
    }
}
