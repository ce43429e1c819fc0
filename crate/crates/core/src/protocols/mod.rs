//! Compliant party scripts and the runner that drives them over a [`World`].
//!
//! A script is a list of named steps per party. Each step has a round
//! window and a decision function over finalized state ([`Ctx`]); it never
//! sees the pending queue. Each round, every unresolved step whose window is
//! open is asked for a [`Plan`], in declaration order.

mod htlc;
mod premium;
mod transfer;

pub use htlc::{HtlcParams, HtlcTimeouts, HTLC_COMMIT_START, HTLC_TIMEOUTS};
pub use premium::{default_premium, PremiumDeadlines, PremiumParams, PREMIUM_DEADLINES};
pub use transfer::{schedule as transfer_schedule, TransferDeadlines, TransferParams, TRANSFER_DEADLINES};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::adversary::{Edit, ExtraAction, Strategy};
use crate::contracts::{Clause, EscrowContract};
use crate::error::{Error, Result};
use crate::ledger::{Action, PremiumAction, Setup, View, World};
use crate::primitives::{make_secret, Amount, ChainId, ContractId, Hashlock, PartyId, Round, Secret};

pub const DEFAULT_MAX_ROUNDS: u32 = 16;
pub const DEFAULT_SEED: &str = "xswap";

/// A scripted step and the rounds in which it may act.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepSpec {
    pub name: &'static str,
    pub earliest: Round,
    pub latest: Round,
}

impl StepSpec {
    pub const fn new(name: &'static str, earliest: u32, latest: u32) -> Self {
        StepSpec { name, earliest: Round(earliest), latest: Round(latest) }
    }
}

/// A step's decision for the current round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    Act(Vec<(ChainId, Action)>),
    /// Not yet; ask again next round while the window is open.
    Wait,
    /// Nothing to do for this step; later steps still run.
    Skip,
    /// An expected counterparty action is missing: stop participating.
    Halt,
}

impl Plan {
    pub fn one(chain: &ChainId, action: Action) -> Plan {
        Plan::Act(vec![(chain.clone(), action)])
    }
}

/// One secret per party, derived from the run seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretBook {
    secrets: BTreeMap<PartyId, Secret>,
}

impl SecretBook {
    pub fn new(seed: &str, parties: &[PartyId]) -> Result<Self> {
        let secrets = parties
            .iter()
            .map(|p| Ok((p.clone(), make_secret(format!("{seed}:{p}").as_bytes())?)))
            .collect::<Result<_>>()?;
        Ok(SecretBook { secrets })
    }

    pub fn secret(&self, party: &PartyId) -> Option<&Secret> {
        self.secrets.get(party)
    }

    /// Hashlocks are public; every party may know every lock.
    pub fn locks(&self) -> BTreeMap<PartyId, Hashlock> {
        self.secrets.iter().map(|(p, s)| (p.clone(), s.lock())).collect()
    }
}

/// What a step may consult: finalized chain state, its own secret, and
/// everyone's public hashlocks.
pub struct Ctx<'a> {
    pub view: View<'a>,
    pub me: &'a PartyId,
    pub secret: &'a Secret,
    pub locks: &'a BTreeMap<PartyId, Hashlock>,
}

impl<'a> Ctx<'a> {
    pub fn round(&self) -> Round {
        self.view.round()
    }

    pub fn lock_of(&self, party: &PartyId) -> Hashlock {
        self.locks[party]
    }

    /// A secret usable now: our own, or one already public.
    pub fn known_secret(&self, owner: &PartyId) -> Option<Secret> {
        if owner == self.me {
            Some(*self.secret)
        } else {
            self.locks.get(owner).and_then(|l| self.view.public_secret(l)).copied()
        }
    }

    pub fn escrow(&self, chain: &ChainId, id: &str) -> Option<&'a EscrowContract> {
        self.view.escrow(chain, &ContractId::new(id))
    }
}

/// True if `e` is live and has exactly the expected parties, amount and
/// clauses (in order).
pub fn escrow_matches(
    e: &EscrowContract,
    depositor: &PartyId,
    beneficiary: &PartyId,
    amount: Amount,
    clauses: &[Clause],
) -> bool {
    e.is_live() && e.depositor == *depositor && e.beneficiary == *beneficiary && e.amount == amount && e.clauses == clauses
}

/// Expected change of one party's holdings, per chain.
pub type Holdings = BTreeMap<ChainId, i64>;

/// What classification needs to know about a party's stake.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartyRole {
    pub party: PartyId,
    /// Payoffs that count as a completed swap; any payoff at least as good
    /// componentwise also counts.
    pub completions: Vec<Holdings>,
    /// Premiums the party puts at risk, per chain.
    pub outlay: Holdings,
    /// Compensation the protocol promises if the counterparty walks away
    /// after this party is exposed.
    pub entitlement: i64,
}

/// Per-protocol compliant behaviour.
pub trait Script {
    fn parties(&self) -> Vec<PartyId>;
    fn default_setup(&self) -> Setup;
    fn steps(&self, party: &PartyId) -> Vec<StepSpec>;
    fn plan(&self, party: &PartyId, step: &str, ctx: &Ctx<'_>) -> Plan;
    /// Largest deadline in the protocol; bounds the deviation catalog.
    fn max_deadline(&self) -> Round;
    /// Every contract the protocol can create.
    fn contracts(&self) -> Vec<(ChainId, ContractId)>;
    fn roles(&self) -> Vec<PartyRole>;
    fn validate(&self) -> Result<()>;
}

/// The cross-chain protocols the runner can drive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "protocol", content = "params", rename_all = "snake_case")]
pub enum SwapProtocol {
    Htlc(HtlcParams),
    Premium(PremiumParams),
    Transfer(TransferParams),
}

impl SwapProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            SwapProtocol::Htlc(_) => "htlc",
            SwapProtocol::Premium(_) => "premium",
            SwapProtocol::Transfer(_) => "transfer",
        }
    }

    pub fn script(&self) -> &dyn Script {
        match self {
            SwapProtocol::Htlc(p) => p,
            SwapProtocol::Premium(p) => p,
            SwapProtocol::Transfer(p) => p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StepStatus {
    Pending,
    Done,
    Dropped,
}

#[derive(Clone, Debug)]
struct StepState {
    spec: StepSpec,
    /// Set by `DelayTo`: only this round, and anything but `Act` drops it.
    pinned: bool,
    status: StepStatus,
}

/// One party's script with a strategy's edits applied.
#[derive(Clone, Debug)]
struct Executor {
    party: PartyId,
    steps: Vec<StepState>,
    extras: Vec<(Round, ExtraAction)>,
    silent_from: Option<Round>,
    halted: bool,
}

impl Executor {
    fn new(script: &dyn Script, party: &PartyId, strategy: Option<&Strategy>) -> Result<Self> {
        let mut steps: Vec<StepState> = script
            .steps(party)
            .into_iter()
            .map(|spec| StepState { spec, pinned: false, status: StepStatus::Pending })
            .collect();
        let mut extras = Vec::new();
        let mut silent_from: Option<Round> = None;
        for edit in strategy.map(|s| s.edits.as_slice()).unwrap_or_default() {
            let find = |steps: &mut Vec<StepState>, name: &str| -> Result<usize> {
                steps.iter().position(|s| s.spec.name == name).ok_or_else(|| Error::UnknownStep {
                    party: party.clone(),
                    step: name.to_owned(),
                })
            };
            match edit {
                Edit::Omit { step } => {
                    let i = find(&mut steps, step)?;
                    steps[i].status = StepStatus::Dropped;
                }
                Edit::DelayTo { step, round } => {
                    let i = find(&mut steps, step)?;
                    steps[i].spec.earliest = *round;
                    steps[i].spec.latest = *round;
                    steps[i].pinned = true;
                }
                Edit::Extra { round, action } => extras.push((*round, action.clone())),
                Edit::SilentFrom { round } => {
                    silent_from = Some(silent_from.map_or(*round, |r| r.min(*round)));
                }
            }
        }
        Ok(Executor { party: party.clone(), steps, extras, silent_from, halted: false })
    }

    fn act(&mut self, script: &dyn Script, ctx: &Ctx<'_>) -> Vec<(ChainId, Action)> {
        let r = ctx.round();
        if self.silent_from.is_some_and(|s| s <= r) {
            self.halted = true;
            return Vec::new();
        }
        let mut out = Vec::new();
        for (at, extra) in &self.extras {
            if *at == r {
                if let Some(a) = extra.resolve(ctx) {
                    out.push(a);
                }
            }
        }
        if self.halted {
            return out;
        }
        for step in &mut self.steps {
            if step.status != StepStatus::Pending || r < step.spec.earliest {
                continue;
            }
            if r > step.spec.latest {
                step.status = StepStatus::Dropped;
                continue;
            }
            match script.plan(&self.party, step.spec.name, ctx) {
                Plan::Act(actions) => {
                    out.extend(actions);
                    step.status = StepStatus::Done;
                }
                Plan::Wait if !step.pinned && r < step.spec.latest => {}
                Plan::Wait | Plan::Skip => step.status = StepStatus::Dropped,
                Plan::Halt => {
                    step.status = StepStatus::Dropped;
                    self.halted = true;
                    break;
                }
            }
        }
        out
    }

    fn exhausted(&self, r: Round) -> bool {
        let steps_done = self.halted || self.steps.iter().all(|s| s.status != StepStatus::Pending);
        let silent = self.silent_from.is_some_and(|s| s <= r);
        silent || (steps_done && self.extras.iter().all(|(at, _)| *at < r))
    }
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub initial: World,
    pub world: World,
    pub secrets: SecretBook,
}

/// Drives `protocol` from `setup` until every contract is terminal and every
/// party has nothing left to do, or `max_rounds` is reached. Parties without
/// a strategy follow their compliant script.
pub fn run(
    protocol: &SwapProtocol,
    setup: &Setup,
    strategies: &[Strategy],
    seed: &str,
    max_rounds: u32,
) -> Result<RunResult> {
    let script = protocol.script();
    script.validate()?;
    let roster = script.parties();
    for p in &roster {
        if !setup.parties.contains(p) {
            return Err(Error::UnknownParty(p.clone()));
        }
    }
    for (i, s) in strategies.iter().enumerate() {
        if !roster.contains(&s.party) {
            return Err(Error::NoScript { protocol: protocol.name().into(), party: s.party.clone() });
        }
        if strategies[..i].iter().any(|o| o.party == s.party) {
            return Err(Error::DuplicateParty(s.party.clone()));
        }
    }
    let secrets = SecretBook::new(seed, &setup.parties)?;
    let locks = secrets.locks();
    // Submission order within a round follows the scenario's party order.
    let mut executors = setup
        .parties
        .iter()
        .filter(|p| roster.contains(p))
        .map(|p| Executor::new(script, p, strategies.iter().find(|s| s.party == *p)))
        .collect::<Result<Vec<_>>>()?;

    let mut world = World::new(setup)?;
    let initial = world.clone();
    while world.round().index() < max_rounds {
        let r = world.round();
        let mut batch = Vec::new();
        {
            let view = View::new(&world);
            for ex in &mut executors {
                let me = ex.party.clone();
                let ctx = Ctx {
                    view,
                    me: &me,
                    secret: secrets.secret(&me).expect("secret per party"),
                    locks: &locks,
                };
                for (chain, action) in ex.act(script, &ctx) {
                    batch.push((me.clone(), chain, action));
                }
            }
        }
        if batch.is_empty() && world.all_contracts_terminal() && executors.iter().all(|e| e.exhausted(r)) {
            break;
        }
        for (party, chain, action) in batch {
            world.submit(&party, &chain, action)?;
        }
        world.advance_round();
    }
    Ok(RunResult { initial, world, secrets })
}

/// Shorthand for a premium-contract operation.
pub(crate) fn premium_step(op: PremiumAction) -> Action {
    Action::PremiumStep(op)
}
