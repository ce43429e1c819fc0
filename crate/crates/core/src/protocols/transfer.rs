use serde::{Deserialize, Serialize};

use super::{escrow_matches, Ctx, Holdings, PartyRole, Plan, Script, StepSpec};
use crate::contracts::{Clause, EscrowContract};
use crate::error::{Error, Result};
use crate::ledger::{Action, Setup};
use crate::primitives::{Amount, ChainId, ContractId, PartyId, Round};

/// Clause deadlines of the naive transfer table. `xy_k` is the deadline of
/// the clause on edge XY triggered by K's secret.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferDeadlines {
    pub ab_a: u32,
    pub ba_a: u32,
    pub ca_c: u32,
    pub ab_c: u32,
    pub ba_c: u32,
    pub ac_c: u32,
}

pub const TRANSFER_DEADLINES: TransferDeadlines =
    TransferDeadlines { ab_a: 7, ba_a: 6, ca_c: 9, ab_c: 8, ba_c: 7, ac_c: 7 };

/// Rounds at which each row of the table is scheduled.
pub mod schedule {
    pub const OPEN_AB: u32 = 0;
    pub const OPEN_BA: u32 = 1;
    pub const CAROL_ENTERS: u32 = 2;
    pub const MODIFY_AB: u32 = 3;
    pub const MODIFY_BA: u32 = 4;
    pub const OPEN_AC: u32 = 5;
    pub const CAROL_REVEALS: u32 = 6;
    pub const ALICE_REVEALS: u32 = 7;
}

const AB: &str = "AB";
const BA: &str = "BA";
const CA: &str = "CA";
const AC: &str = "AC";

/// Alice and Bob start a swap (edges AB, BA, locked by Alice's secret);
/// Carol may buy Alice's position (edge CA is her payment, AC hands her
/// Alice's side), after which both original edges also accept Carol's
/// secret.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferParams {
    pub alice: PartyId,
    pub bob: PartyId,
    pub carol: PartyId,
    /// Chain of AB and CA.
    pub alice_chain: ChainId,
    /// Chain of BA and AC.
    pub bob_chain: ChainId,
    pub ab_amount: Amount,
    pub ba_amount: Amount,
    pub ca_amount: Amount,
    pub ac_amount: Amount,
    pub deadlines: TransferDeadlines,
    pub carol_participates: bool,
}

impl Default for TransferParams {
    fn default() -> Self {
        TransferParams {
            alice: "alice".into(),
            bob: "bob".into(),
            carol: "carol".into(),
            alice_chain: "guilder".into(),
            bob_chain: "florin".into(),
            ab_amount: Amount(100),
            ba_amount: Amount(100),
            ca_amount: Amount(10),
            ac_amount: Amount(100),
            deadlines: TRANSFER_DEADLINES,
            carol_participates: true,
        }
    }
}

impl TransferParams {
    fn clause(&self, ctx: &Ctx<'_>, owner: &PartyId, deadline: u32) -> Clause {
        Clause::new(owner.clone(), ctx.lock_of(owner), Round(deadline))
    }

    fn ab_original(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        vec![self.clause(ctx, &self.alice, self.deadlines.ab_a)]
    }

    fn ba_original(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        vec![self.clause(ctx, &self.alice, self.deadlines.ba_a)]
    }

    fn ab_modified(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        let mut v = self.ab_original(ctx);
        v.push(self.clause(ctx, &self.carol, self.deadlines.ab_c));
        v
    }

    fn ba_modified(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        let mut v = self.ba_original(ctx);
        v.push(self.clause(ctx, &self.carol, self.deadlines.ba_c));
        v
    }

    fn ca_clauses(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        vec![self.clause(ctx, &self.carol, self.deadlines.ca_c)]
    }

    fn ac_clauses(&self, ctx: &Ctx<'_>) -> Vec<Clause> {
        vec![self.clause(ctx, &self.carol, self.deadlines.ac_c)]
    }

    fn edge<'a>(&self, ctx: &Ctx<'a>, id: &str) -> Option<&'a EscrowContract> {
        let chain = if id == AB || id == CA { &self.alice_chain } else { &self.bob_chain };
        ctx.escrow(chain, id)
    }

    fn ab_is(&self, ctx: &Ctx<'_>, clauses: &[Clause]) -> bool {
        self.edge(ctx, AB).is_some_and(|e| escrow_matches(e, &self.alice, &self.bob, self.ab_amount, clauses))
    }

    fn ba_is(&self, ctx: &Ctx<'_>, clauses: &[Clause]) -> bool {
        self.edge(ctx, BA).is_some_and(|e| escrow_matches(e, &self.bob, &self.alice, self.ba_amount, clauses))
    }

    fn ca_ok(&self, ctx: &Ctx<'_>) -> bool {
        self.edge(ctx, CA)
            .is_some_and(|e| escrow_matches(e, &self.carol, &self.alice, self.ca_amount, &self.ca_clauses(ctx)))
    }

    fn ac_ok(&self, ctx: &Ctx<'_>) -> bool {
        self.edge(ctx, AC)
            .is_some_and(|e| escrow_matches(e, &self.alice, &self.carol, self.ac_amount, &self.ac_clauses(ctx)))
    }

    fn deploy(&self, chain: &ChainId, id: &str, beneficiary: &PartyId, amount: Amount, clauses: Vec<Clause>) -> Plan {
        Plan::one(chain, Action::DeployEscrow { id: id.into(), beneficiary: beneficiary.clone(), amount, clauses })
    }

    /// Claims `id` with the first clause whose secret we know and that is
    /// still timely.
    fn claim_any(&self, ctx: &Ctx<'_>, id: &str) -> Plan {
        let Some(e) = self.edge(ctx, id).filter(|e| e.is_live()) else {
            return Plan::Skip;
        };
        for c in &e.clauses {
            if ctx.round() < c.deadline {
                if let Some(secret) = ctx.known_secret(&c.owner).filter(|s| s.lock() == c.lock) {
                    return Plan::one(&e.chain, Action::Claim { contract: id.into(), secret });
                }
            }
        }
        Plan::Wait
    }

    fn alice_plan(&self, step: &str, ctx: &Ctx<'_>) -> Plan {
        let d = &self.deadlines;
        match step {
            "open" => self.deploy(&self.alice_chain, AB, &self.bob, self.ab_amount, self.ab_original(ctx)),
            "modify" => {
                if !self.ba_is(ctx, &self.ba_original(ctx)) {
                    Plan::Halt
                } else if self.ca_ok(ctx) {
                    Plan::one(
                        &self.alice_chain,
                        Action::AddClause { contract: AB.into(), clause: self.clause(ctx, &self.carol, d.ab_c) },
                    )
                } else {
                    Plan::Skip
                }
            }
            "claim-BA" => {
                let carol_path = self.ca_ok(ctx);
                if carol_path && ctx.round() < Round(schedule::OPEN_AC) {
                    return Plan::Wait;
                }
                if carol_path && self.ba_is(ctx, &self.ba_modified(ctx)) {
                    // Carol's purchase is on track; she will trigger BA.
                    return Plan::Skip;
                }
                // No buyer, or Bob did not extend BA: finish as a plain swap.
                let alice_clause = self.ba_original(ctx);
                let live_ba = self.edge(ctx, BA).filter(|e| e.is_live() && e.clauses.starts_with(&alice_clause));
                if live_ba.is_some() && ctx.round() < Round(d.ba_a) {
                    Plan::one(&self.bob_chain, Action::Claim { contract: BA.into(), secret: *ctx.secret })
                } else {
                    Plan::Skip
                }
            }
            "sell" => {
                if self.ca_ok(ctx) && self.ab_is(ctx, &self.ab_modified(ctx)) && self.ba_is(ctx, &self.ba_modified(ctx)) {
                    self.deploy(&self.bob_chain, AC, &self.carol, self.ac_amount, self.ac_clauses(ctx))
                } else {
                    Plan::Skip
                }
            }
            "collect" => {
                if !self.ca_ok(ctx) {
                    return Plan::Skip;
                }
                self.claim_any(ctx, CA)
            }
            _ => Plan::Skip,
        }
    }

    fn bob_plan(&self, step: &str, ctx: &Ctx<'_>) -> Plan {
        match step {
            "open" if self.ab_is(ctx, &self.ab_original(ctx)) => {
                self.deploy(&self.bob_chain, BA, &self.alice, self.ba_amount, self.ba_original(ctx))
            }
            "open" => Plan::Halt,
            "modify" if self.ab_is(ctx, &self.ab_modified(ctx)) => Plan::one(
                &self.bob_chain,
                Action::AddClause { contract: BA.into(), clause: self.clause(ctx, &self.carol, self.deadlines.ba_c) },
            ),
            "claim" => self.claim_any(ctx, AB),
            _ => Plan::Skip,
        }
    }

    fn carol_plan(&self, step: &str, ctx: &Ctx<'_>) -> Plan {
        match step {
            "enter" if self.ab_is(ctx, &self.ab_original(ctx)) && self.ba_is(ctx, &self.ba_original(ctx)) => {
                self.deploy(&self.alice_chain, CA, &self.alice, self.ca_amount, self.ca_clauses(ctx))
            }
            "enter" => Plan::Halt,
            "reveal-AC" if self.ac_ok(ctx) => {
                Plan::one(&self.bob_chain, Action::Claim { contract: AC.into(), secret: *ctx.secret })
            }
            "reveal-AC" => Plan::Halt,
            // Triggering BA only pays Alice, so any live BA that C opens in
            // time is worth claiming, extra clauses or not.
            "reveal-BA"
                if self.edge(ctx, BA).is_some_and(|e| {
                    e.is_live() && e.beneficiary == self.alice && e.timely_clause(ctx.secret, ctx.round()).is_ok()
                }) =>
            {
                Plan::one(&self.bob_chain, Action::Claim { contract: BA.into(), secret: *ctx.secret })
            }
            _ => Plan::Skip,
        }
    }
}

impl Script for TransferParams {
    fn parties(&self) -> Vec<PartyId> {
        vec![self.alice.clone(), self.bob.clone(), self.carol.clone()]
    }

    fn default_setup(&self) -> Setup {
        let (a, b, c) = (self.alice.as_str(), self.bob.as_str(), self.carol.as_str());
        Setup::with_parties(&[a, b, c])
            .chain(self.alice_chain.as_str(), &[(a, self.ab_amount.0), (c, self.ca_amount.0)])
            .chain(self.bob_chain.as_str(), &[(a, self.ac_amount.0), (b, self.ba_amount.0)])
    }

    fn steps(&self, party: &PartyId) -> Vec<StepSpec> {
        use schedule::*;
        let d = &self.deadlines;
        if *party == self.alice {
            vec![
                StepSpec::new("open", OPEN_AB, OPEN_AB),
                StepSpec::new("modify", MODIFY_AB, MODIFY_AB),
                StepSpec::new("claim-BA", MODIFY_AB, OPEN_AC),
                StepSpec::new("sell", OPEN_AC, OPEN_AC),
                StepSpec::new("collect", MODIFY_AB, d.ca_c.saturating_sub(1).max(MODIFY_AB)),
            ]
        } else if *party == self.bob {
            vec![
                StepSpec::new("open", OPEN_BA, OPEN_BA),
                StepSpec::new("modify", MODIFY_BA, MODIFY_BA),
                StepSpec::new("claim", CAROL_ENTERS, d.ab_a.max(d.ab_c).saturating_sub(1).max(CAROL_ENTERS)),
            ]
        } else if *party == self.carol && self.carol_participates {
            vec![
                StepSpec::new("enter", CAROL_ENTERS, CAROL_ENTERS),
                StepSpec::new("reveal-AC", CAROL_REVEALS, CAROL_REVEALS),
                StepSpec::new("reveal-BA", CAROL_REVEALS, CAROL_REVEALS),
            ]
        } else {
            vec![]
        }
    }

    fn plan(&self, party: &PartyId, step: &str, ctx: &Ctx<'_>) -> Plan {
        if *party == self.alice {
            self.alice_plan(step, ctx)
        } else if *party == self.bob {
            self.bob_plan(step, ctx)
        } else {
            self.carol_plan(step, ctx)
        }
    }

    fn max_deadline(&self) -> Round {
        let d = &self.deadlines;
        Round([d.ab_a, d.ba_a, d.ca_c, d.ab_c, d.ba_c, d.ac_c].into_iter().max().unwrap_or(0))
    }

    fn contracts(&self) -> Vec<(ChainId, ContractId)> {
        vec![
            (self.alice_chain.clone(), AB.into()),
            (self.bob_chain.clone(), BA.into()),
            (self.alice_chain.clone(), CA.into()),
            (self.bob_chain.clone(), AC.into()),
        ]
    }

    fn roles(&self) -> Vec<PartyRole> {
        let (ab, ba, ca, ac) =
            (self.ab_amount.signed(), self.ba_amount.signed(), self.ca_amount.signed(), self.ac_amount.signed());
        let (g, f) = (self.alice_chain.clone(), self.bob_chain.clone());
        let mut alice = vec![Holdings::from([(g.clone(), -ab), (f.clone(), ba)])];
        let mut roles = Vec::new();
        if self.carol_participates {
            alice.push(Holdings::from([(g.clone(), ca - ab), (f.clone(), ba - ac)]));
        }
        roles.push(PartyRole { party: self.alice.clone(), completions: alice, outlay: Holdings::new(), entitlement: 0 });
        roles.push(PartyRole {
            party: self.bob.clone(),
            completions: vec![Holdings::from([(f.clone(), -ba), (g.clone(), ab)])],
            outlay: Holdings::new(),
            entitlement: 0,
        });
        if self.carol_participates {
            roles.push(PartyRole {
                party: self.carol.clone(),
                completions: vec![Holdings::from([(g, -ca), (f, ac)])],
                outlay: Holdings::new(),
                entitlement: 0,
            });
        }
        roles
    }

    fn validate(&self) -> Result<()> {
        let p = [&self.alice, &self.bob, &self.carol];
        if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] || self.alice_chain == self.bob_chain {
            return Err(Error::InvalidParams("transfer needs three parties and two chains".into()));
        }
        let d = &self.deadlines;
        if [d.ab_a, d.ba_a, d.ca_c, d.ab_c, d.ba_c, d.ac_c].contains(&0) {
            return Err(Error::InvalidParams("clause deadlines must be positive".into()));
        }
        if d.ab_c < d.ab_a || d.ba_c < d.ba_a {
            return Err(Error::InvalidParams("added clauses may not shorten an edge's deadline".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{Edit, ExtraAction, Strategy};
    use crate::contracts::EscrowState;
    use crate::protocols::{run, RunResult, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

    fn go(params: &TransferParams, strategies: &[Strategy]) -> RunResult {
        let setup = params.default_setup();
        run(&SwapProtocol::Transfer(params.clone()), &setup, strategies, DEFAULT_SEED, DEFAULT_MAX_ROUNDS).unwrap()
    }

    fn delta(r: &RunResult, chain: &str, party: &str) -> i64 {
        let c = ChainId::from(chain);
        let p = PartyId::from(party);
        r.world.read(&c).unwrap().balance(&p).signed() - r.initial.read(&c).unwrap().balance(&p).signed()
    }

    fn state(r: &RunResult, chain: &str, id: &str) -> EscrowState {
        r.world.read(&chain.into()).unwrap().escrow(&id.into()).unwrap().state
    }

    #[test]
    fn table_deadlines_verbatim() {
        let d = TRANSFER_DEADLINES;
        assert_eq!([d.ab_a, d.ba_a, d.ca_c, d.ab_c, d.ba_c, d.ac_c], [7, 6, 9, 8, 7, 7]);
    }

    #[test]
    fn without_carol_is_a_plain_swap() {
        let p = TransferParams { carol_participates: false, ..Default::default() };
        let r = go(&p, &[]);
        assert_eq!(delta(&r, "guilder", "alice"), -100);
        assert_eq!(delta(&r, "florin", "alice"), 100);
        assert_eq!(delta(&r, "guilder", "bob"), 100);
        assert_eq!(delta(&r, "florin", "bob"), -100);
        assert_eq!(state(&r, "guilder", "AB"), EscrowState::Claimed { clause: 0 });
        assert!(r.world.read(&"guilder".into()).unwrap().escrow(&"CA".into()).is_none());
    }

    #[test]
    fn with_carol_every_edge_fires() {
        let r = go(&TransferParams::default(), &[]);
        for (chain, id) in [("guilder", "AB"), ("florin", "BA"), ("guilder", "CA"), ("florin", "AC")] {
            assert!(matches!(state(&r, chain, id), EscrowState::Claimed { .. }), "{id}");
        }
        assert_eq!(delta(&r, "guilder", "alice"), -100 + 10);
        assert_eq!(delta(&r, "florin", "alice"), 0);
        assert_eq!(delta(&r, "guilder", "bob"), 100);
        assert_eq!(delta(&r, "florin", "bob"), -100);
        assert_eq!(delta(&r, "guilder", "carol"), -10);
        assert_eq!(delta(&r, "florin", "carol"), 100);
    }

    #[test]
    fn bob_not_extending_ba_falls_back_to_plain_swap() {
        let bob = Strategy::new("bob", vec![Edit::Omit { step: "modify".into() }]);
        let r = go(&TransferParams::default(), &[bob]);
        assert_eq!(delta(&r, "florin", "alice"), 100);
        assert_eq!(delta(&r, "guilder", "alice"), -100);
        assert_eq!(delta(&r, "guilder", "carol"), 0);
        assert!(r.world.read(&"florin".into()).unwrap().escrow(&"AC".into()).is_none());
    }

    #[test]
    fn carol_revealing_only_on_ac_strands_alice() {
        let carol = Strategy::new("carol", vec![Edit::Omit { step: "reveal-BA".into() }]);
        let r = go(&TransferParams::default(), &[carol]);
        // BA's last clause expires before C is public, so Bob gets BA back
        // while AB and AC both pay out.
        assert_eq!(state(&r, "florin", "BA"), EscrowState::Refunded);
        assert_eq!(delta(&r, "florin", "alice"), -100);
        assert_eq!(delta(&r, "guilder", "alice"), -100 + 10);
    }

    #[test]
    fn leaked_secret_lets_alice_collect_early() {
        let carol = Strategy::new(
            "carol",
            vec![Edit::Extra {
                round: Round(3),
                action: ExtraAction::Claim { chain: "guilder".into(), contract: "CA".into(), secret_owner: "carol".into() },
            }],
        );
        let r = go(&TransferParams::default(), &[carol]);
        assert_eq!(delta(&r, "guilder", "carol"), -10);
        assert_eq!(delta(&r, "guilder", "alice"), 10 - 100);
    }
}
