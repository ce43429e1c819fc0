//! The simulated multi-chain world.
//!
//! Submissions made during round `r` sit in a pending queue and are applied,
//! in submission order, at the `r -> r+1` boundary. Contract timeouts whose
//! deadline has been reached fire right after. Everything applied at a
//! boundary becomes visible to every party from round `r+1` on; reads never
//! see the pending queue.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::contracts::{
    Clause, Contract, EscrowContract, Payout, PremiumSwapContract, PremiumTerms, Rejection,
};
use crate::error::{Error, Result};
use crate::primitives::{Amount, ChainId, ContractId, Hashlock, PartyId, Round, Secret};
use crate::tpc::TpcEvent;

/// Initial balances for one chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSetup {
    pub name: ChainId,
    #[serde(default)]
    pub balances: Vec<Balance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Balance {
    pub party: PartyId,
    pub amount: Amount,
}

/// Parties (in submission order) and chains a world starts from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setup {
    pub parties: Vec<PartyId>,
    pub chains: Vec<ChainSetup>,
}

impl Setup {
    pub fn chain(mut self, name: &str, balances: &[(&str, u64)]) -> Self {
        self.chains.push(ChainSetup {
            name: name.into(),
            balances: balances
                .iter()
                .map(|(p, a)| Balance { party: (*p).into(), amount: Amount(*a) })
                .collect(),
        });
        self
    }

    pub fn with_parties(parties: &[&str]) -> Self {
        Setup { parties: parties.iter().map(|p| (*p).into()).collect(), chains: vec![] }
    }
}

/// Premium swap operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PremiumAction {
    Deploy { id: ContractId, terms: PremiumTerms },
    DepositPremium { contract: ContractId },
    DepositPrincipal { contract: ContractId },
    Redeem { contract: ContractId, secret: Secret },
}

/// A transaction a party can send to one chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    DeployEscrow { id: ContractId, beneficiary: PartyId, amount: Amount, clauses: Vec<Clause> },
    Claim { contract: ContractId, secret: Secret },
    Refund { contract: ContractId },
    AddClause { contract: ContractId, clause: Clause },
    PremiumStep(PremiumAction),
    Noop,
}

impl Action {
    /// The secret carried by this transaction, if any. Transaction data is
    /// public once included, whether or not the contract accepts it.
    pub fn revealed_secret(&self) -> Option<&Secret> {
        match self {
            Action::Claim { secret, .. } => Some(secret),
            Action::PremiumStep(PremiumAction::Redeem { secret, .. }) => Some(secret),
            _ => None,
        }
    }

    pub fn contract(&self) -> Option<&ContractId> {
        match self {
            Action::DeployEscrow { id, .. } => Some(id),
            Action::Claim { contract, .. }
            | Action::Refund { contract }
            | Action::AddClause { contract, .. } => Some(contract),
            Action::PremiumStep(p) => Some(match p {
                PremiumAction::Deploy { id, .. } => id,
                PremiumAction::DepositPremium { contract }
                | PremiumAction::DepositPrincipal { contract }
                | PremiumAction::Redeem { contract, .. } => contract,
            }),
            Action::Noop => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmittedAction {
    pub actor: PartyId,
    pub chain: ChainId,
    pub action: Action,
    pub submit_round: Round,
}

/// A contract timeout firing at a round boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename = "settle")]
pub struct Settlement {
    pub contract: ContractId,
    pub state: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TraceAction {
    Submitted(Action),
    Settled(Settlement),
    Tpc(TpcEvent),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EventResult {
    Accepted,
    Rejected { reason: Rejection },
}

impl EventResult {
    pub fn is_accepted(&self) -> bool {
        matches!(self, EventResult::Accepted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Delta {
    pub party: PartyId,
    pub amount: i64,
}

/// Actor recorded for automatic settlements.
pub const SYSTEM_ACTOR: &str = "system";

/// One applied action (or timeout) and its effect on balances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    /// Submission round for party actions; the boundary round for timeouts.
    pub round: Round,
    pub actor: PartyId,
    pub chain: ChainId,
    pub action: TraceAction,
    pub result: EventResult,
    pub deltas: Vec<Delta>,
}

/// Writes events as JSON Lines.
pub fn write_jsonl<W: std::io::Write>(events: &[TraceEvent], mut out: W) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl(events: &[TraceEvent]) -> String {
    let mut buf = Vec::new();
    write_jsonl(events, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("json is utf-8")
}

/// State of a single chain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Ledger {
    pub balances: BTreeMap<PartyId, Amount>,
    pub contracts: BTreeMap<ContractId, Contract>,
}

impl Ledger {
    pub fn balance(&self, party: &PartyId) -> Amount {
        self.balances.get(party).copied().unwrap_or_default()
    }

    pub fn contract(&self, id: &ContractId) -> Option<&Contract> {
        self.contracts.get(id)
    }

    pub fn escrow(&self, id: &ContractId) -> Option<&EscrowContract> {
        self.contracts.get(id).and_then(Contract::as_escrow)
    }

    pub fn premium(&self, id: &ContractId) -> Option<&PremiumSwapContract> {
        self.contracts.get(id).and_then(Contract::as_premium)
    }

    /// Balances plus everything in contract custody.
    pub fn supply(&self) -> u128 {
        let balances: u128 = self.balances.values().map(|a| a.0 as u128).sum();
        let held: u128 = self.contracts.values().map(|c| c.held().0 as u128).sum();
        balances + held
    }

    fn credit(&mut self, party: &PartyId, amount: Amount) -> std::result::Result<(), Rejection> {
        let bal = self.balances.entry(party.clone()).or_default();
        *bal = bal.checked_add(amount).map_err(|_| Rejection::Overflow)?;
        Ok(())
    }

    fn debit(&mut self, party: &PartyId, amount: Amount) -> std::result::Result<(), Rejection> {
        let bal = self.balance(party);
        let rest = bal.checked_sub(amount).map_err(|_| Rejection::InsufficientBalance)?;
        self.balances.insert(party.clone(), rest);
        Ok(())
    }
}

/// A secret that has appeared on some chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Publication {
    pub secret: Secret,
    /// First round in which every party can see it.
    pub visible_from: Round,
    pub chain: ChainId,
}

/// The global simulation state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    round: Round,
    parties: Vec<PartyId>,
    chains: BTreeMap<ChainId, Ledger>,
    chain_order: Vec<ChainId>,
    pending: Vec<SubmittedAction>,
    trace: Vec<TraceEvent>,
    published: BTreeMap<Hashlock, Publication>,
}

impl World {
    pub fn new(setup: &Setup) -> Result<Self> {
        if setup.chains.is_empty() {
            return Err(Error::NoChains);
        }
        let mut seen = BTreeSet::new();
        for p in &setup.parties {
            if !seen.insert(p) {
                return Err(Error::DuplicateParty(p.clone()));
            }
        }
        let mut chains = BTreeMap::new();
        let mut chain_order = Vec::new();
        for cs in &setup.chains {
            if chains.contains_key(&cs.name) {
                return Err(Error::DuplicateChain(cs.name.clone()));
            }
            let mut ledger = Ledger::default();
            for b in &cs.balances {
                if !seen.contains(&b.party) {
                    return Err(Error::UnknownParty(b.party.clone()));
                }
                if ledger.balances.insert(b.party.clone(), b.amount).is_some() {
                    return Err(Error::DuplicateBalance { chain: cs.name.clone(), party: b.party.clone() });
                }
            }
            chains.insert(cs.name.clone(), ledger);
            chain_order.push(cs.name.clone());
        }
        Ok(World {
            round: Round::ZERO,
            parties: setup.parties.clone(),
            chains,
            chain_order,
            pending: Vec::new(),
            trace: Vec::new(),
            published: BTreeMap::new(),
        })
    }

    pub fn round(&self) -> Round {
        self.round
    }

    pub fn parties(&self) -> &[PartyId] {
        &self.parties
    }

    pub fn chain_ids(&self) -> &[ChainId] {
        &self.chain_order
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn pending(&self) -> &[SubmittedAction] {
        &self.pending
    }

    /// Finalized state of `chain`; same-round submissions are not included.
    pub fn read(&self, chain: &ChainId) -> Result<&Ledger> {
        self.chains.get(chain).ok_or_else(|| Error::UnknownChain(chain.clone()))
    }

    pub fn ledgers(&self) -> impl Iterator<Item = (&ChainId, &Ledger)> {
        self.chain_order.iter().map(move |c| (c, &self.chains[c]))
    }

    pub fn publications(&self) -> &BTreeMap<Hashlock, Publication> {
        &self.published
    }

    /// The preimage of `lock`, if it has become public by the current round.
    pub fn public_secret(&self, lock: &Hashlock) -> Option<&Secret> {
        self.published
            .get(lock)
            .filter(|p| p.visible_from <= self.round)
            .map(|p| &p.secret)
    }

    pub fn supply(&self, chain: &ChainId) -> Result<u128> {
        Ok(self.read(chain)?.supply())
    }

    pub fn all_contracts_terminal(&self) -> bool {
        self.chains.values().all(|l| l.contracts.values().all(Contract::is_terminal))
    }

    pub fn submit(&mut self, actor: &PartyId, chain: &ChainId, action: Action) -> Result<()> {
        if !self.parties.contains(actor) {
            return Err(Error::UnknownParty(actor.clone()));
        }
        if !self.chains.contains_key(chain) {
            return Err(Error::UnknownChain(chain.clone()));
        }
        self.pending.push(SubmittedAction {
            actor: actor.clone(),
            chain: chain.clone(),
            action,
            submit_round: self.round,
        });
        Ok(())
    }

    /// Applies the pending queue, fires due timeouts and moves to the next
    /// round.
    pub fn advance_round(&mut self) {
        let now = self.round.next();
        for sub in std::mem::take(&mut self.pending) {
            let ledger = self.chains.get_mut(&sub.chain).expect("chain checked at submit");
            let mut deltas = Vec::new();
            let result = match apply(ledger, &sub, now, &mut deltas) {
                Ok(()) => EventResult::Accepted,
                Err(reason) => {
                    deltas.clear();
                    EventResult::Rejected { reason }
                }
            };
            if let Some(secret) = sub.action.revealed_secret() {
                self.published.entry(secret.lock()).or_insert_with(|| Publication {
                    secret: *secret,
                    visible_from: now,
                    chain: sub.chain.clone(),
                });
            }
            self.trace.push(TraceEvent {
                round: sub.submit_round,
                actor: sub.actor,
                chain: sub.chain,
                action: TraceAction::Submitted(sub.action),
                result,
                deltas,
            });
        }
        for chain in &self.chain_order {
            let ledger = self.chains.get_mut(chain).expect("known chain");
            let ids: Vec<ContractId> = ledger.contracts.keys().cloned().collect();
            for id in ids {
                let contract = ledger.contracts.get_mut(&id).expect("listed id");
                if contract.is_terminal() {
                    continue;
                }
                let payouts = contract.settle(now);
                if !contract.is_terminal() {
                    continue;
                }
                let state = contract.state_name().to_owned();
                let mut deltas = Vec::new();
                for p in payouts {
                    ledger.credit(&p.to, p.amount).expect("custody never exceeds supply");
                    push_delta(&mut deltas, &p.to, p.amount.signed());
                }
                self.trace.push(TraceEvent {
                    round: now,
                    actor: PartyId::new(SYSTEM_ACTOR),
                    chain: chain.clone(),
                    action: TraceAction::Settled(Settlement { contract: id, state }),
                    result: EventResult::Accepted,
                    deltas,
                });
            }
        }
        self.round = now;
    }
}

fn push_delta(deltas: &mut Vec<Delta>, party: &PartyId, amount: i64) {
    if let Some(d) = deltas.iter_mut().find(|d| d.party == *party) {
        d.amount += amount;
    } else {
        deltas.push(Delta { party: party.clone(), amount });
    }
}

fn pay(ledger: &mut Ledger, payouts: Vec<Payout>, deltas: &mut Vec<Delta>) -> std::result::Result<(), Rejection> {
    for p in payouts {
        ledger.credit(&p.to, p.amount)?;
        push_delta(deltas, &p.to, p.amount.signed());
    }
    Ok(())
}

/// Applies one submission. On error the ledger is left untouched.
fn apply(
    ledger: &mut Ledger,
    sub: &SubmittedAction,
    now: Round,
    deltas: &mut Vec<Delta>,
) -> std::result::Result<(), Rejection> {
    let submitted = sub.submit_round;
    let actor = &sub.actor;
    match &sub.action {
        Action::Noop => Ok(()),
        Action::DeployEscrow { id, beneficiary, amount, clauses } => {
            if ledger.contracts.contains_key(id) {
                return Err(Rejection::DuplicateContract);
            }
            let c = EscrowContract::new(
                id.clone(),
                sub.chain.clone(),
                actor.clone(),
                beneficiary.clone(),
                *amount,
                clauses.clone(),
                now,
            )?;
            ledger.debit(actor, *amount)?;
            push_delta(deltas, actor, -amount.signed());
            ledger.contracts.insert(id.clone(), Contract::Escrow(c));
            Ok(())
        }
        Action::Claim { contract, secret } => {
            let mut c = escrow_mut(ledger, contract)?.clone();
            let payout = c.claim(secret, submitted, now)?;
            pay(ledger, vec![payout], deltas)?;
            ledger.contracts.insert(contract.clone(), Contract::Escrow(c));
            Ok(())
        }
        Action::Refund { contract } => {
            let mut c = escrow_mut(ledger, contract)?.clone();
            let payout = c.refund(submitted, now)?;
            pay(ledger, vec![payout], deltas)?;
            ledger.contracts.insert(contract.clone(), Contract::Escrow(c));
            Ok(())
        }
        Action::AddClause { contract, clause } => {
            let mut c = escrow_mut(ledger, contract)?.clone();
            c.add_clause(actor, clause.clone())?;
            ledger.contracts.insert(contract.clone(), Contract::Escrow(c));
            Ok(())
        }
        Action::PremiumStep(op) => apply_premium(ledger, sub, op, now, deltas),
    }
}

fn apply_premium(
    ledger: &mut Ledger,
    sub: &SubmittedAction,
    op: &PremiumAction,
    now: Round,
    deltas: &mut Vec<Delta>,
) -> std::result::Result<(), Rejection> {
    let submitted = sub.submit_round;
    let actor = &sub.actor;
    match op {
        PremiumAction::Deploy { id, terms } => {
            if ledger.contracts.contains_key(id) {
                return Err(Rejection::DuplicateContract);
            }
            let c = PremiumSwapContract::new(id.clone(), sub.chain.clone(), terms.clone())?;
            ledger.contracts.insert(id.clone(), Contract::PremiumSwap(c));
            Ok(())
        }
        PremiumAction::DepositPremium { contract } => {
            let mut c = premium_mut(ledger, contract)?.clone();
            let amount = c.deposit_premium(actor, submitted, now)?;
            ledger.debit(actor, amount)?;
            push_delta(deltas, actor, -amount.signed());
            ledger.contracts.insert(contract.clone(), Contract::PremiumSwap(c));
            Ok(())
        }
        PremiumAction::DepositPrincipal { contract } => {
            let mut c = premium_mut(ledger, contract)?.clone();
            let amount = c.deposit_principal(actor, submitted, now)?;
            ledger.debit(actor, amount)?;
            push_delta(deltas, actor, -amount.signed());
            ledger.contracts.insert(contract.clone(), Contract::PremiumSwap(c));
            Ok(())
        }
        PremiumAction::Redeem { contract, secret } => {
            let mut c = premium_mut(ledger, contract)?.clone();
            let payouts = c.redeem(secret, submitted, now)?;
            pay(ledger, payouts, deltas)?;
            ledger.contracts.insert(contract.clone(), Contract::PremiumSwap(c));
            Ok(())
        }
    }
}

fn escrow_mut<'a>(ledger: &'a Ledger, id: &ContractId) -> std::result::Result<&'a EscrowContract, Rejection> {
    ledger
        .contracts
        .get(id)
        .ok_or(Rejection::UnknownContract)?
        .as_escrow()
        .ok_or(Rejection::WrongContractKind)
}

fn premium_mut<'a>(ledger: &'a Ledger, id: &ContractId) -> std::result::Result<&'a PremiumSwapContract, Rejection> {
    ledger
        .contracts
        .get(id)
        .ok_or(Rejection::UnknownContract)?
        .as_premium()
        .ok_or(Rejection::WrongContractKind)
}

/// Read-only window onto finalized world state handed to party scripts.
///
/// There is deliberately no path from a `View` to the pending queue.
#[derive(Clone, Copy, Debug)]
pub struct View<'w> {
    world: &'w World,
}

impl<'w> View<'w> {
    pub fn new(world: &'w World) -> Self {
        View { world }
    }

    pub fn round(&self) -> Round {
        self.world.round
    }

    pub fn ledger(&self, chain: &ChainId) -> Option<&'w Ledger> {
        self.world.read(chain).ok()
    }

    pub fn balance(&self, chain: &ChainId, party: &PartyId) -> Amount {
        self.ledger(chain).map(|l| l.balance(party)).unwrap_or_default()
    }

    pub fn escrow(&self, chain: &ChainId, id: &ContractId) -> Option<&'w EscrowContract> {
        self.ledger(chain)?.escrow(id)
    }

    pub fn premium(&self, chain: &ChainId, id: &ContractId) -> Option<&'w PremiumSwapContract> {
        self.ledger(chain)?.premium(id)
    }

    pub fn public_secret(&self, lock: &Hashlock) -> Option<&'w Secret> {
        self.world.public_secret(lock)
    }
}
