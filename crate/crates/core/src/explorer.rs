//! Exhaustive strategy sweeps, payoffs and verdicts.
//!
//! Classification of a compliant party's payoff, checked in order:
//! 1. `SwapCompleted`: at least as good, on every chain, as some completed
//!    swap for that party;
//! 2. `MadeWholeRefund`: no change on any chain;
//! 3. `CompensatedAsVictim(net)`: on every chain it lost at most its own
//!    premium outlay, and its valued net gain is positive and at least the
//!    compensation the protocol promises;
//! 4. `LOSS` otherwise.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adversary::{enumerate, no_clairvoyance_check, Strategy};
use crate::contracts::Contract;
use crate::error::{Error, Result};
use crate::ledger::{to_jsonl, Setup, TraceAction, World};
use crate::primitives::{ChainId, PartyId, Round};
use crate::protocols::{run, Holdings, PartyRole, RunResult, SwapProtocol, TransferParams};
use crate::tpc::{tpc_run, Decision, Fault, FaultKind, FaultSchedule, TpcConfig, Vote};

/// Per-party, per-chain balance change over a run.
pub type Payoff = BTreeMap<PartyId, Holdings>;

/// Per-chain unit values used to net a payoff across chains. Missing chains
/// are worth 1 per coin.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(pub BTreeMap<ChainId, i64>);

impl Valuation {
    pub fn net(&self, h: &Holdings) -> i64 {
        h.iter().map(|(c, v)| v * self.0.get(c).copied().unwrap_or(1)).sum()
    }
}

/// Balance changes between two worlds of the same scenario. Every contract
/// in `end` must be terminal, so custody is fully resolved.
pub fn payoffs(start: &World, end: &World) -> Result<Payoff> {
    let mut out = Payoff::new();
    for (chain, ledger) in end.ledgers() {
        if ledger.contracts.values().any(|c| !c.is_terminal()) {
            return Err(Error::NonTerminalContracts(chain.clone()));
        }
        let before = start.read(chain)?;
        for party in end.parties() {
            let d = ledger.balance(party).signed() - before.balance(party).signed();
            out.entry(party.clone()).or_default().insert(chain.clone(), d);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum Classification {
    SwapCompleted,
    MadeWholeRefund,
    CompensatedAsVictim { amount: i64 },
    #[serde(rename = "LOSS")]
    Loss { details: String },
}

impl Classification {
    pub fn is_loss(&self) -> bool {
        matches!(self, Classification::Loss { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::SwapCompleted => "SwapCompleted",
            Classification::MadeWholeRefund => "MadeWholeRefund",
            Classification::CompensatedAsVictim { .. } => "CompensatedAsVictim",
            Classification::Loss { .. } => "LOSS",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::CompensatedAsVictim { amount } => write!(f, "CompensatedAsVictim({amount})"),
            Classification::Loss { details } => write!(f, "LOSS({details})"),
            other => f.write_str(other.label()),
        }
    }
}

fn get(h: &Holdings, c: &ChainId) -> i64 {
    h.get(c).copied().unwrap_or(0)
}

fn dominates(h: &Holdings, target: &Holdings) -> bool {
    let chains = h.keys().chain(target.keys());
    chains.into_iter().all(|c| get(h, c) >= get(target, c))
}

fn render(h: &Holdings) -> String {
    let parts: Vec<String> = h.iter().map(|(c, v)| format!("{c}: {v:+}")).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn classify(h: &Holdings, role: &PartyRole, valuation: &Valuation) -> Classification {
    if role.completions.iter().any(|c| dominates(h, c)) {
        return Classification::SwapCompleted;
    }
    if h.values().all(|v| *v == 0) {
        return Classification::MadeWholeRefund;
    }
    let net = valuation.net(h);
    let within_outlay = h.iter().all(|(c, v)| *v >= -get(&role.outlay, c));
    if within_outlay && net > 0 && net >= role.entitlement {
        return Classification::CompensatedAsVictim { amount: net };
    }
    Classification::Loss { details: format!("payoff {}, net {net:+}", render(h)) }
}

/// Gain of a deviating party over the better of not trading and trading as
/// agreed.
pub fn deviator_gain(h: &Holdings, role: &PartyRole, valuation: &Valuation) -> i64 {
    let baseline = role.completions.iter().map(|c| valuation.net(c)).max().unwrap_or(0).max(0);
    valuation.net(h) - baseline
}

/// Rounds each party's own coins spent in contract custody, per contract,
/// maximized per party.
pub fn lockups(world: &World) -> BTreeMap<PartyId, u32> {
    let mut out = BTreeMap::new();
    for (_, ledger) in world.ledgers() {
        for c in ledger.contracts.values() {
            let (owner, from, to) = match c {
                Contract::Escrow(e) => (&e.depositor, Some(e.funded_at), e.closed_at),
                Contract::PremiumSwap(p) => (&p.terms.principal_payer, p.principal_at, p.closed_at),
            };
            if let Some(from) = from {
                let to = to.unwrap_or(world.round());
                let len = to.index().saturating_sub(from.index());
                let e = out.entry(owner.clone()).or_insert(0);
                *e = (*e).max(len);
            }
        }
    }
    out
}

/// Round by which everything `party` takes part in has closed.
fn resolution(world: &World) -> BTreeMap<PartyId, Round> {
    let mut out: BTreeMap<PartyId, Round> = BTreeMap::new();
    for (_, ledger) in world.ledgers() {
        for c in ledger.contracts.values() {
            let (a, b, closed) = match c {
                Contract::Escrow(e) => (&e.depositor, &e.beneficiary, e.closed_at),
                Contract::PremiumSwap(p) => (&p.terms.premium_payer, &p.terms.principal_payer, p.closed_at),
            };
            let closed = closed.unwrap_or(world.round());
            for p in [a, b] {
                let e = out.entry(p.clone()).or_insert(Round::ZERO);
                *e = (*e).max(closed);
            }
        }
    }
    out
}

/// The verdict on one complete run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunVerdict {
    pub strategies: Vec<Strategy>,
    pub payoffs: Payoff,
    /// Compliant parties only.
    pub classifications: BTreeMap<PartyId, Classification>,
    /// Deviating parties only.
    pub deviator_gain: BTreeMap<PartyId, i64>,
    pub resolution: BTreeMap<PartyId, Round>,
    pub lockup: BTreeMap<PartyId, u32>,
    pub conserved: bool,
    pub clairvoyance_free: bool,
    pub rounds: Round,
    /// SHA-256 of the JSONL trace; equal digests mean identical traces.
    pub trace_digest: String,
}

impl RunVerdict {
    pub fn has_loss(&self) -> bool {
        self.classifications.values().any(Classification::is_loss)
    }

    pub fn is_unverdicted(&self) -> bool {
        self.classifications.is_empty()
    }
}

/// Runs one strategy profile and judges it.
pub fn evaluate(
    protocol: &SwapProtocol,
    setup: &Setup,
    strategies: &[Strategy],
    seed: &str,
    max_rounds: u32,
    valuation: &Valuation,
) -> Result<(RunVerdict, RunResult)> {
    let result = run(protocol, setup, strategies, seed, max_rounds)?;
    let payoffs = payoffs(&result.initial, &result.world)?;
    let deviating = |p: &PartyId| strategies.iter().any(|s| s.party == *p && !s.is_compliant());
    let mut classifications = BTreeMap::new();
    let mut gains = BTreeMap::new();
    for role in protocol.script().roles() {
        let h = payoffs.get(&role.party).cloned().unwrap_or_default();
        if deviating(&role.party) {
            gains.insert(role.party.clone(), deviator_gain(&h, &role, valuation));
        } else {
            classifications.insert(role.party.clone(), classify(&h, &role, valuation));
        }
    }
    let conserved = result
        .world
        .chain_ids()
        .iter()
        .all(|c| result.world.supply(c).ok() == result.initial.supply(c).ok());
    let clairvoyance_free = result.world.parties().iter().all(|p| {
        let own = result.secrets.secret(p).expect("secret per party");
        no_clairvoyance_check(p, own, result.world.trace())
    });
    let verdict = RunVerdict {
        strategies: strategies.to_vec(),
        payoffs,
        classifications,
        deviator_gain: gains,
        resolution: resolution(&result.world),
        lockup: lockups(&result.world),
        conserved,
        clairvoyance_free,
        rounds: result.world.round(),
        trace_digest: hex::encode(Sha256::digest(to_jsonl(result.world.trace()))),
    };
    Ok((verdict, result))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    #[serde(rename = "SwapCompleted")]
    pub swap_completed: usize,
    #[serde(rename = "MadeWholeRefund")]
    pub made_whole_refund: usize,
    #[serde(rename = "CompensatedAsVictim")]
    pub compensated_as_victim: usize,
    #[serde(rename = "LOSS")]
    pub loss: usize,
    /// Runs with no compliant party left to judge.
    pub unverdicted: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LockupStats {
    /// Longest custody of this party's own coins in any run.
    pub max_rounds: u32,
    /// Runs in which it was compliant.
    pub runs: usize,
}

/// A run in which some compliant party ended with a LOSS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub strategies: Vec<Strategy>,
    pub classifications: BTreeMap<PartyId, Classification>,
    pub payoffs: Payoff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SafetyReport {
    pub protocol: String,
    pub deviating: Vec<PartyId>,
    /// Number of strategy profiles run.
    pub catalog_size: usize,
    pub catalog_sizes: BTreeMap<PartyId, usize>,
    /// One count per compliant party per run.
    pub classifications: ClassCounts,
    /// Compliant parties only.
    pub lockup: BTreeMap<PartyId, LockupStats>,
    pub max_deviator_gain: BTreeMap<PartyId, i64>,
    pub conservation_violations: usize,
    pub clairvoyance_violations: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl SafetyReport {
    pub fn loss_free(&self) -> bool {
        self.classifications.loss == 0
    }
}

/// Inputs shared by every run of a sweep.
#[derive(Clone, Debug)]
pub struct Sweep<'a> {
    pub protocol: &'a SwapProtocol,
    pub setup: &'a Setup,
    pub seed: &'a str,
    pub max_rounds: u32,
    pub valuation: &'a Valuation,
}

/// Counterexamples kept in a report; `classifications.loss` stays exact.
pub const MAX_COUNTEREXAMPLES: usize = 1000;

/// Profiles evaluated in parallel before being folded into the report.
const CHUNK: usize = 4096;

/// Runs the Cartesian product of the deviating parties' catalogs, everyone
/// else compliant.
pub fn explore(sweep: &Sweep<'_>, deviating: &[PartyId]) -> Result<SafetyReport> {
    explore_with(sweep, deviating, |_| {})
}

/// As [`explore`], also handing every verdict to `visit` in catalog order
/// (the first deviating party varies slowest). Runs execute in parallel;
/// the report does not depend on the thread count.
pub fn explore_with(
    sweep: &Sweep<'_>,
    deviating: &[PartyId],
    mut visit: impl FnMut(&RunVerdict),
) -> Result<SafetyReport> {
    let mut catalogs = Vec::new();
    for (i, p) in deviating.iter().enumerate() {
        if deviating[..i].contains(p) {
            return Err(Error::DuplicateParty(p.clone()));
        }
        catalogs.push(enumerate(sweep.protocol, p)?);
    }
    let total: usize = catalogs.iter().map(Vec::len).product();
    let profile_at = |mut idx: usize| {
        let mut profile = vec![Strategy::identity(""); catalogs.len()];
        for (slot, cat) in profile.iter_mut().zip(&catalogs).rev() {
            *slot = cat[idx % cat.len()].clone();
            idx /= cat.len();
        }
        // Compliant members of the profile are dropped so verdicts treat
        // them as compliant parties.
        profile.retain(|s| !s.is_compliant());
        profile
    };

    let mut report = SafetyReport {
        protocol: sweep.protocol.name().into(),
        deviating: deviating.to_vec(),
        catalog_size: total,
        catalog_sizes: deviating.iter().cloned().zip(catalogs.iter().map(Vec::len)).collect(),
        classifications: ClassCounts::default(),
        lockup: BTreeMap::new(),
        max_deviator_gain: BTreeMap::new(),
        conservation_violations: 0,
        clairvoyance_violations: 0,
        counterexamples: Vec::new(),
    };
    for start in (0..total).step_by(CHUNK) {
        let verdicts = (start..total.min(start + CHUNK))
            .into_par_iter()
            .map(|idx| {
                let profile = profile_at(idx);
                evaluate(sweep.protocol, sweep.setup, &profile, sweep.seed, sweep.max_rounds, sweep.valuation)
                    .map(|(v, _)| v)
            })
            .collect::<Result<Vec<_>>>()?;
        for v in &verdicts {
            report.absorb(v);
            visit(v);
        }
    }
    Ok(report)
}

impl SafetyReport {
    fn absorb(&mut self, v: &RunVerdict) {
        let counts = &mut self.classifications;
        if v.is_unverdicted() {
            counts.unverdicted += 1;
        }
        for (party, c) in &v.classifications {
            match c {
                Classification::SwapCompleted => counts.swap_completed += 1,
                Classification::MadeWholeRefund => counts.made_whole_refund += 1,
                Classification::CompensatedAsVictim { .. } => counts.compensated_as_victim += 1,
                Classification::Loss { .. } => counts.loss += 1,
            }
            let stats = self.lockup.entry(party.clone()).or_default();
            stats.runs += 1;
            stats.max_rounds = stats.max_rounds.max(v.lockup.get(party).copied().unwrap_or(0));
        }
        for (party, g) in &v.deviator_gain {
            let e = self.max_deviator_gain.entry(party.clone()).or_insert(i64::MIN);
            *e = (*e).max(*g);
        }
        self.conservation_violations += usize::from(!v.conserved);
        self.clairvoyance_violations += usize::from(!v.clairvoyance_free);
        if v.has_loss() && self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(Counterexample {
                strategies: v.strategies.clone(),
                classifications: v.classifications.clone(),
                payoffs: v.payoffs.clone(),
            });
        }
    }
}

/// Every non-empty subset of `parties`, smallest first.
pub fn nonempty_subsets(parties: &[PartyId]) -> Vec<Vec<PartyId>> {
    let mut out: Vec<Vec<PartyId>> = (1u32..(1 << parties.len()))
        .map(|mask| parties.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| p.clone()).collect())
        .collect();
    out.sort_by_key(Vec::len);
    out
}

/// Round of the last accepted party action.
pub fn protocol_length(world: &World) -> Option<Round> {
    world
        .trace()
        .iter()
        .filter(|e| e.result.is_accepted() && matches!(e.action, TraceAction::Submitted(_)))
        .map(|e| e.round)
        .max()
}

/// Largest total a party has in its own escrows at any single round.
pub fn peak_escrow(world: &World, party: &PartyId) -> u64 {
    let escrows: Vec<_> = world
        .ledgers()
        .flat_map(|(_, l)| l.contracts.values())
        .filter_map(Contract::as_escrow)
        .filter(|e| e.depositor == *party)
        .collect();
    (0..=world.round().index())
        .map(|r| {
            escrows
                .iter()
                .filter(|e| e.funded_at.index() <= r && e.closed_at.is_none_or(|c| r < c.index()))
                .map(|e| e.amount.0)
                .sum()
        })
        .max()
        .unwrap_or(0)
}

/// Cost of the naive transfer protocol, with and without a buyer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferMetrics {
    pub length_with_carol: Round,
    pub length_without_carol: Round,
    pub extra_rounds: u32,
    pub alice_peak_escrow_with_carol: u64,
    pub alice_peak_escrow_without_carol: u64,
    /// Rounds after Carol's entry in which Alice still has to act.
    pub alice_rounds_after_entry: Vec<Round>,
    pub alice_rounds_after_entry_without_carol: Vec<Round>,
}

pub fn transfer_metrics(params: &TransferParams, setup: &Setup, seed: &str, max_rounds: u32) -> Result<TransferMetrics> {
    use crate::protocols::Script;
    let entry = Round(crate::protocols::transfer_schedule::CAROL_ENTERS);
    let mut with = params.clone();
    with.carol_participates = true;
    let mut without = params.clone();
    without.carol_participates = false;
    with.validate()?;
    let a = run(&SwapProtocol::Transfer(with), setup, &[], seed, max_rounds)?;
    let b = run(&SwapProtocol::Transfer(without), setup, &[], seed, max_rounds)?;
    let acts_after = |w: &World| -> Vec<Round> {
        let mut v: Vec<Round> = w
            .trace()
            .iter()
            .filter(|e| e.actor == params.alice && e.result.is_accepted() && e.round > entry)
            .filter(|e| matches!(e.action, TraceAction::Submitted(_)))
            .map(|e| e.round)
            .collect();
        v.dedup();
        v
    };
    let la = protocol_length(&a.world).unwrap_or(Round::ZERO);
    let lb = protocol_length(&b.world).unwrap_or(Round::ZERO);
    Ok(TransferMetrics {
        length_with_carol: la,
        length_without_carol: lb,
        extra_rounds: la.index().saturating_sub(lb.index()),
        alice_peak_escrow_with_carol: peak_escrow(&a.world, &params.alice),
        alice_peak_escrow_without_carol: peak_escrow(&b.world, &params.alice),
        alice_rounds_after_entry: acts_after(&a.world),
        alice_rounds_after_entry_without_carol: acts_after(&b.world),
    })
}

/// Outcome of sweeping fault schedules and vote assignments through 2PC.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TpcSweepReport {
    pub schedules: usize,
    pub runs: usize,
    pub divergent: Vec<TpcCase>,
    pub validity_violations: Vec<TpcCase>,
    /// Runs in which some participant was still blocked at the horizon.
    pub blocked_at_horizon: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TpcCase {
    pub votes: Vec<Vote>,
    pub faults: FaultSchedule,
}

/// All well-formed schedules of at most `max_events` crash/recover events in
/// rounds `0..horizon`.
pub fn fault_schedules(nodes: &[PartyId], horizon: u32, max_events: usize) -> Vec<FaultSchedule> {
    let events: Vec<Fault> = (0..horizon)
        .flat_map(|r| {
            nodes.iter().flat_map(move |n| {
                [FaultKind::Crash, FaultKind::Recover].map(|k| Fault { round: Round(r), node: n.clone(), event: k })
            })
        })
        .collect();
    let mut out = vec![FaultSchedule::none()];
    let mut frontier = vec![FaultSchedule::none()];
    for _ in 0..max_events {
        let mut next = Vec::new();
        for base in &frontier {
            let last = base.0.last().map(|f| f.round);
            for e in &events {
                if last.is_some_and(|r| e.round < r) || base.0.contains(e) {
                    continue;
                }
                let mut s = base.clone();
                s.0.push(e.clone());
                if s.validate(nodes).is_ok() {
                    next.push(s);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Checks agreement and validity for every vote assignment under every
/// schedule from [`fault_schedules`].
pub fn explore_tpc(base: &TpcConfig, fault_horizon: u32, max_events: usize) -> Result<TpcSweepReport> {
    let nodes = base.nodes();
    let schedules = fault_schedules(&nodes, fault_horizon, max_events);
    let n = base.participants.len();
    let assignments: Vec<Vec<Vote>> = (0u32..(1 << n))
        .map(|m| (0..n).map(|i| if m & (1 << i) == 0 { Vote::Yes } else { Vote::No }).collect())
        .collect();
    let cases: Vec<(Vec<Vote>, FaultSchedule)> = assignments
        .iter()
        .flat_map(|v| schedules.iter().map(move |s| (v.clone(), s.clone())))
        .collect();
    let outcomes = cases
        .par_iter()
        .map(|(votes, faults)| {
            let mut cfg = base.clone();
            cfg.votes = cfg.participants.iter().cloned().zip(votes.iter().copied()).collect();
            cfg.faults = faults.clone();
            tpc_run(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = TpcSweepReport { schedules: schedules.len(), runs: cases.len(), ..Default::default() };
    for ((votes, faults), out) in cases.into_iter().zip(outcomes) {
        let case = || TpcCase { votes: votes.clone(), faults: faults.clone() };
        if !out.agreement {
            report.divergent.push(case());
        }
        let any_no = votes.contains(&Vote::No);
        let commits = out.decisions().contains(&Decision::Commit);
        let all_commit = out.nodes.iter().all(|n| n.decision == Some(Decision::Commit));
        if (any_no && commits) || (!any_no && faults.0.is_empty() && !all_commit) {
            report.validity_violations.push(case());
        }
        if out.nodes.iter().any(|n| n.status == crate::tpc::NodeStatus::Blocked) {
            report.blocked_at_horizon += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{HtlcParams, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

    fn role(completion: &[(&str, i64)], outlay: &[(&str, i64)], entitlement: i64) -> PartyRole {
        let h = |v: &[(&str, i64)]| v.iter().map(|(c, x)| (ChainId::from(*c), *x)).collect::<Holdings>();
        PartyRole { party: "p".into(), completions: vec![h(completion)], outlay: h(outlay), entitlement }
    }

    fn h(v: &[(&str, i64)]) -> Holdings {
        v.iter().map(|(c, x)| (ChainId::from(*c), *x)).collect()
    }

    #[test]
    fn classification_order() {
        let r = role(&[("g", -100), ("f", 100)], &[("f", 4)], 2);
        let v = Valuation::default();
        assert_eq!(classify(&h(&[("g", -100), ("f", 100)]), &r, &v), Classification::SwapCompleted);
        assert_eq!(classify(&h(&[("g", 0), ("f", 100)]), &r, &v), Classification::SwapCompleted);
        assert_eq!(classify(&h(&[("g", 0), ("f", 0)]), &r, &v), Classification::MadeWholeRefund);
        assert_eq!(
            classify(&h(&[("g", 2), ("f", 0)]), &r, &v),
            Classification::CompensatedAsVictim { amount: 2 }
        );
        assert!(classify(&h(&[("g", 1), ("f", 0)]), &r, &v).is_loss());
        assert!(classify(&h(&[("g", 10), ("f", -5)]), &r, &v).is_loss());
        assert!(classify(&h(&[("g", -100), ("f", 0)]), &r, &v).is_loss());
    }

    #[test]
    fn payoffs_need_terminal_contracts() {
        let p = SwapProtocol::Htlc(HtlcParams::default());
        let setup = p.script().default_setup();
        let r = run(&p, &setup, &[], DEFAULT_SEED, 2).unwrap();
        assert!(matches!(payoffs(&r.initial, &r.world), Err(Error::NonTerminalContracts(_))));
    }

    #[test]
    fn idle_run_pays_nothing() {
        let p = SwapProtocol::Htlc(HtlcParams::default());
        let setup = p.script().default_setup();
        let w = World::new(&setup).unwrap();
        let pay = payoffs(&w, &w).unwrap();
        assert!(pay.values().flat_map(|h| h.values()).all(|v| *v == 0));
    }

    #[test]
    fn compliant_htlc_payoff() {
        let p = SwapProtocol::Htlc(HtlcParams::default());
        let setup = p.script().default_setup();
        let (v, _) = evaluate(&p, &setup, &[], DEFAULT_SEED, DEFAULT_MAX_ROUNDS, &Valuation::default()).unwrap();
        assert_eq!(v.payoffs[&PartyId::from("alice")], h(&[("guilder", -100), ("florin", 100)]));
        assert_eq!(v.payoffs[&PartyId::from("bob")], h(&[("guilder", 100), ("florin", -100)]));
        assert!(v.classifications.values().all(|c| *c == Classification::SwapCompleted));
    }

    #[test]
    fn subsets_are_all_nonempty_ones() {
        let ps: Vec<PartyId> = vec!["a".into(), "b".into(), "c".into()];
        let s = nonempty_subsets(&ps);
        assert_eq!(s.len(), 7);
        assert_eq!(s[0].len(), 1);
        assert_eq!(s[6].len(), 3);
    }

    #[test]
    fn schedules_are_well_formed_and_counted() {
        let nodes: Vec<PartyId> = vec!["c".into(), "a".into()];
        let s = fault_schedules(&nodes, 2, 2);
        assert!(s.iter().all(|f| f.validate(&nodes).is_ok()));
        // 0 events: 1; 1 event: crash by either node in either round (4);
        // 2 events: crash+recover same node (3 orderings of rounds per node,
        // incl. same round) plus crash of both nodes (ordered by round).
        let ones = s.iter().filter(|f| f.0.len() == 1).count();
        assert_eq!(ones, 4);
        assert_eq!(s.len(), 1 + 4 + s.iter().filter(|f| f.0.len() == 2).count());
    }
}
