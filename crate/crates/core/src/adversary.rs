//! Deviations from the compliant scripts.
//!
//! A [`Strategy`] is a party's compliant script plus a list of edits. The
//! empty edit list is the compliant script itself. Extra actions can only
//! use secrets the party owns or that are already public when submitted;
//! an extra whose secret is unknown at its round is silently dropped.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::contracts::Clause;
use crate::error::{Error, Result};
use crate::ledger::{Action, PremiumAction, TraceAction, TraceEvent};
use crate::primitives::{ChainId, ContractId, Hashlock, PartyId, Round, Secret};
use crate::protocols::{Ctx, SwapProtocol};

/// A single extra submission template.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExtraAction {
    Claim { chain: ChainId, contract: ContractId, secret_owner: PartyId },
    Redeem { chain: ChainId, contract: ContractId, secret_owner: PartyId },
    Refund { chain: ChainId, contract: ContractId },
    AddClause { chain: ChainId, contract: ContractId, clause_owner: PartyId, deadline: Round },
}

impl ExtraAction {
    /// The concrete submission, if the party can make it now.
    pub fn resolve(&self, ctx: &Ctx<'_>) -> Option<(ChainId, Action)> {
        match self {
            ExtraAction::Claim { chain, contract, secret_owner } => {
                let secret = ctx.known_secret(secret_owner)?;
                Some((chain.clone(), Action::Claim { contract: contract.clone(), secret }))
            }
            ExtraAction::Redeem { chain, contract, secret_owner } => {
                let secret = ctx.known_secret(secret_owner)?;
                let op = PremiumAction::Redeem { contract: contract.clone(), secret };
                Some((chain.clone(), Action::PremiumStep(op)))
            }
            ExtraAction::Refund { chain, contract } => {
                Some((chain.clone(), Action::Refund { contract: contract.clone() }))
            }
            ExtraAction::AddClause { chain, contract, clause_owner, deadline } => {
                let lock = *ctx.locks.get(clause_owner)?;
                let clause = Clause::new(clause_owner.clone(), lock, *deadline);
                Some((chain.clone(), Action::AddClause { contract: contract.clone(), clause }))
            }
        }
    }
}

impl fmt::Display for ExtraAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtraAction::Claim { chain, contract, secret_owner } => {
                write!(f, "claim {chain}/{contract} with {secret_owner}'s secret")
            }
            ExtraAction::Redeem { chain, contract, secret_owner } => {
                write!(f, "redeem {chain}/{contract} with {secret_owner}'s secret")
            }
            ExtraAction::Refund { chain, contract } => write!(f, "refund {chain}/{contract}"),
            ExtraAction::AddClause { chain, contract, clause_owner, deadline } => {
                write!(f, "add {clause_owner}:{deadline} to {chain}/{contract}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "edit", rename_all = "snake_case", deny_unknown_fields)]
pub enum Edit {
    /// The step never acts.
    Omit { step: String },
    /// The step may act only in `round`.
    DelayTo { step: String, round: Round },
    /// One additional submission in `round`.
    Extra { round: Round, action: ExtraAction },
    /// Nothing at all is submitted from `round` on.
    SilentFrom { round: Round },
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edit::Omit { step } => write!(f, "omit {step}"),
            Edit::DelayTo { step, round } => write!(f, "delay {step} to {round}"),
            Edit::Extra { round, action } => write!(f, "at {round}: {action}"),
            Edit::SilentFrom { round } => write!(f, "silent from {round}"),
        }
    }
}

/// A party's behaviour: the compliant script with `edits` applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Strategy {
    pub party: PartyId,
    #[serde(default)]
    pub edits: Vec<Edit>,
}

impl Strategy {
    pub fn new(party: &str, edits: Vec<Edit>) -> Self {
        Strategy { party: party.into(), edits }
    }

    pub fn identity(party: &str) -> Self {
        Strategy::new(party, Vec::new())
    }

    pub fn is_compliant(&self) -> bool {
        self.edits.is_empty()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edits.is_empty() {
            return write!(f, "{}: compliant", self.party);
        }
        write!(f, "{}: ", self.party)?;
        for (i, e) in self.edits.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Checks that `strategy` names a protocol party and only its steps.
pub fn check_strategy(protocol: &SwapProtocol, strategy: &Strategy) -> Result<()> {
    let script = protocol.script();
    if !script.parties().contains(&strategy.party) {
        return Err(Error::NoScript { protocol: protocol.name().into(), party: strategy.party.clone() });
    }
    let steps = script.steps(&strategy.party);
    for e in &strategy.edits {
        if let Edit::Omit { step } | Edit::DelayTo { step, .. } = e {
            if !steps.iter().any(|s| s.name == step) {
                return Err(Error::UnknownStep { party: strategy.party.clone(), step: step.clone() });
            }
        }
    }
    Ok(())
}

/// The deviation catalog for `party`, in a fixed order: identity, omissions,
/// delays, silences, then extras by round.
pub fn enumerate(protocol: &SwapProtocol, party: &PartyId) -> Result<Vec<Strategy>> {
    let script = protocol.script();
    if !script.parties().contains(party) {
        return Err(Error::NoScript { protocol: protocol.name().into(), party: party.clone() });
    }
    let steps = script.steps(party);
    let horizon = script.max_deadline();
    let one = |e: Edit| Strategy { party: party.clone(), edits: vec![e] };

    let mut out = vec![Strategy { party: party.clone(), edits: vec![] }];
    out.extend(steps.iter().map(|s| one(Edit::Omit { step: s.name.into() })));
    for s in &steps {
        for r in s.earliest.index() + 1..=horizon.index() {
            out.push(one(Edit::DelayTo { step: s.name.into(), round: Round(r) }));
        }
    }
    if !steps.is_empty() {
        for r in 0..=horizon.index() {
            out.push(one(Edit::SilentFrom { round: Round(r) }));
        }
    }

    let contracts = script.contracts();
    let owners = secret_owners(protocol);
    let redeem = matches!(protocol, SwapProtocol::Premium(_));
    let add_targets = own_edges(protocol, party);
    let deadlines = clause_deadlines(protocol);
    for r in 0..=horizon.index() {
        let round = Round(r);
        for (chain, contract) in &contracts {
            for owner in &owners {
                let (chain, contract, secret_owner) = (chain.clone(), contract.clone(), owner.clone());
                let action = if redeem {
                    ExtraAction::Redeem { chain, contract, secret_owner }
                } else {
                    ExtraAction::Claim { chain, contract, secret_owner }
                };
                out.push(one(Edit::Extra { round, action }));
            }
            let action = ExtraAction::Refund { chain: chain.clone(), contract: contract.clone() };
            out.push(one(Edit::Extra { round, action }));
        }
        for (chain, contract) in &add_targets {
            for owner in &owners {
                for d in &deadlines {
                    let action = ExtraAction::AddClause {
                        chain: chain.clone(),
                        contract: contract.clone(),
                        clause_owner: owner.clone(),
                        deadline: *d,
                    };
                    out.push(one(Edit::Extra { round, action }));
                }
            }
        }
    }
    Ok(out)
}

/// Parties whose hashlocks guard some contract.
fn secret_owners(protocol: &SwapProtocol) -> Vec<PartyId> {
    match protocol {
        SwapProtocol::Htlc(p) => vec![p.alice.clone()],
        SwapProtocol::Premium(p) => vec![p.alice.clone()],
        SwapProtocol::Transfer(p) => vec![p.alice.clone(), p.carol.clone()],
    }
}

/// Escrow edges `party` deposits into, i.e. the only ones it may extend.
fn own_edges(protocol: &SwapProtocol, party: &PartyId) -> Vec<(ChainId, ContractId)> {
    match protocol {
        SwapProtocol::Htlc(p) if *party == p.alice => vec![(p.alice_chain.clone(), "htlc".into())],
        SwapProtocol::Htlc(p) if *party == p.bob => vec![(p.bob_chain.clone(), "htlc".into())],
        SwapProtocol::Transfer(p) if *party == p.alice => {
            vec![(p.alice_chain.clone(), "AB".into()), (p.bob_chain.clone(), "AC".into())]
        }
        SwapProtocol::Transfer(p) if *party == p.bob => vec![(p.bob_chain.clone(), "BA".into())],
        SwapProtocol::Transfer(p) if *party == p.carol => vec![(p.alice_chain.clone(), "CA".into())],
        _ => vec![],
    }
}

fn clause_deadlines(protocol: &SwapProtocol) -> Vec<Round> {
    let mut v: Vec<Round> = match protocol {
        SwapProtocol::Htlc(p) => vec![p.bob_deadline(), p.alice_deadline()],
        SwapProtocol::Premium(_) => vec![],
        SwapProtocol::Transfer(p) => {
            let d = &p.deadlines;
            [d.ab_a, d.ba_a, d.ca_c, d.ab_c, d.ba_c, d.ac_c].into_iter().map(Round).collect()
        }
    };
    v.sort();
    v.dedup();
    v
}

/// True iff every secret `party` submitted in `trace` was its own or had
/// become public in an earlier round.
pub fn no_clairvoyance_check(party: &PartyId, own: &Secret, trace: &[TraceEvent]) -> bool {
    let mut visible_from: BTreeMap<Hashlock, Round> = BTreeMap::new();
    for ev in trace {
        let TraceAction::Submitted(action) = &ev.action else { continue };
        let Some(secret) = action.revealed_secret() else { continue };
        if ev.actor == *party && secret != own {
            match visible_from.get(&secret.lock()) {
                Some(r) if *r <= ev.round => {}
                _ => return false,
            }
        }
        visible_from.entry(secret.lock()).or_insert(ev.round.next());
    }
    true
}
