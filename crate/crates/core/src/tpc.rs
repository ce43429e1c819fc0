//! Classical two-phase commit with crash/recover faults.
//!
//! Nodes exchange messages through a round scheduler: a message sent in
//! round `r` is delivered in round `r+1`, and only if the recipient is up.
//! Each node keeps a stable log that survives crashes and volatile state
//! (tentative changes, collected votes, query progress) that does not.
//!
//! Coordinator policy: it waits [`DEFAULT_VOTE_TIMEOUT`] rounds for votes and
//! treats a missing vote as `no`; a coordinator that recovers without a
//! logged decision aborts. A participant that recovers prepared but
//! undecided asks the coordinator, then each peer, one query per round.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::{EventResult, TraceAction, TraceEvent};
use crate::primitives::{ChainId, PartyId, Round};

pub const DEFAULT_VOTE_TIMEOUT: u32 = 2;
pub const DEFAULT_HORIZON: u32 = 16;
/// Chain name used for TPC events in the shared trace format.
pub const TPC_CHAIN: &str = "tpc";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vote {
    Yes,
    No,
}

impl FromStr for Vote {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" | "y" => Ok(Vote::Yes),
            "no" | "n" => Ok(Vote::No),
            other => Err(Error::InvalidParams(format!("vote must be yes or no, got `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Commit,
    Abort,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Commit => "commit",
            Decision::Abort => "abort",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Coordinator,
    Participant,
}

/// Stable-memory record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum LogRecord {
    Prepared,
    Voted { vote: Vote },
    Decided { decision: Decision },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MessageKind {
    PrepareRequest,
    Vote { vote: Vote },
    Decision { decision: Decision },
    OutcomeQuery,
    OutcomeReply { decision: Decision },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TpcMessage {
    pub from: PartyId,
    pub to: PartyId,
    pub kind: MessageKind,
    pub sent: Round,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultKind {
    Crash,
    Recover,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub round: Round,
    pub node: PartyId,
    pub event: FaultKind,
}

/// Crash/recover events, applied at the start of their round in list order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaultSchedule(pub Vec<Fault>);

impl FaultSchedule {
    pub fn none() -> Self {
        FaultSchedule(Vec::new())
    }

    pub fn crash(mut self, node: &str, round: u32) -> Self {
        self.0.push(Fault { round: Round(round), node: node.into(), event: FaultKind::Crash });
        self
    }

    pub fn recover(mut self, node: &str, round: u32) -> Self {
        self.0.push(Fault { round: Round(round), node: node.into(), event: FaultKind::Recover });
        self
    }

    /// Events sorted by round (stable, so same-round order is preserved).
    fn ordered(&self) -> Vec<Fault> {
        let mut v = self.0.clone();
        v.sort_by_key(|f| f.round);
        v
    }

    /// Crash only when up, recover only when crashed, known nodes only.
    pub fn validate(&self, nodes: &[PartyId]) -> Result<()> {
        let mut up: BTreeMap<&PartyId, bool> = nodes.iter().map(|n| (n, true)).collect();
        for f in self.ordered() {
            let Some(state) = up.get_mut(&f.node) else {
                return Err(Error::InvalidFaults(format!("unknown node `{}`", f.node)));
            };
            match (f.event, *state) {
                (FaultKind::Crash, true) => *state = false,
                (FaultKind::Recover, false) => *state = true,
                (FaultKind::Crash, false) => {
                    return Err(Error::InvalidFaults(format!("`{}` crashes at {} while down", f.node, f.round)))
                }
                (FaultKind::Recover, true) => {
                    return Err(Error::InvalidFaults(format!("`{}` recovers at {} while up", f.node, f.round)))
                }
            }
        }
        Ok(())
    }

    /// Parses a comma-separated list of `crash:<node>@<round>`,
    /// `recover:<node>@<round>` or `<node>@after-prepare` items. The name
    /// `coordinator` stands for the configured coordinator.
    pub fn parse(spec: &str, coordinator: &PartyId, vote_timeout: u32) -> Result<Self> {
        let mut out = FaultSchedule::none();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (event, rest) = match item.split_once(':') {
                Some(("crash", rest)) => (FaultKind::Crash, rest),
                Some(("recover", rest)) => (FaultKind::Recover, rest),
                Some((other, _)) => return Err(Error::InvalidFaults(format!("unknown event `{other}`"))),
                None => (FaultKind::Crash, item),
            };
            let (node, when) = rest
                .split_once('@')
                .ok_or_else(|| Error::InvalidFaults(format!("missing `@round` in `{item}`")))?;
            let node = if node == "coordinator" { coordinator.clone() } else { PartyId::new(node) };
            let round = match when {
                "after-prepare" => vote_timeout,
                n => n
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidFaults(format!("bad round `{n}` in `{item}`")))?,
            };
            out.0.push(Fault { round: Round(round), node, event });
        }
        Ok(out)
    }
}

/// Trace payload for TPC runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TpcEvent {
    Send { to: PartyId, message: MessageKind },
    Deliver { from: PartyId, message: MessageKind },
    Drop { to: PartyId, message: MessageKind },
    Log { entry: LogRecord },
    Crash,
    Recover,
    /// A node was told a decision different from the one it had logged.
    Conflict { logged: Decision, received: Decision },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TpcConfig {
    pub coordinator: PartyId,
    pub participants: Vec<PartyId>,
    pub votes: BTreeMap<PartyId, Vote>,
    #[serde(default)]
    pub faults: FaultSchedule,
    #[serde(default = "default_horizon")]
    pub horizon: u32,
    #[serde(default = "default_vote_timeout")]
    pub vote_timeout: u32,
}

fn default_horizon() -> u32 {
    DEFAULT_HORIZON
}

fn default_vote_timeout() -> u32 {
    DEFAULT_VOTE_TIMEOUT
}

impl TpcConfig {
    pub fn new(coordinator: &str, participants: &[&str], votes: &[Vote]) -> Self {
        let participants: Vec<PartyId> = participants.iter().map(|p| (*p).into()).collect();
        let votes = participants.iter().cloned().zip(votes.iter().copied()).collect();
        TpcConfig {
            coordinator: coordinator.into(),
            participants,
            votes,
            faults: FaultSchedule::none(),
            horizon: DEFAULT_HORIZON,
            vote_timeout: DEFAULT_VOTE_TIMEOUT,
        }
    }

    pub fn with_faults(mut self, faults: FaultSchedule) -> Self {
        self.faults = faults;
        self
    }

    pub fn nodes(&self) -> Vec<PartyId> {
        std::iter::once(self.coordinator.clone()).chain(self.participants.iter().cloned()).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.participants.is_empty() {
            return Err(Error::InvalidParams("at least one participant required".into()));
        }
        let nodes = self.nodes();
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(Error::DuplicateParty(n.clone()));
            }
        }
        for p in &self.participants {
            if !self.votes.contains_key(p) {
                return Err(Error::InvalidParams(format!("no vote for `{p}`")));
            }
        }
        self.faults.validate(&nodes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    Decided,
    /// Prepared and still waiting for the outcome.
    Blocked,
    /// Never prepared and never told an outcome.
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeOutcome {
    pub node: PartyId,
    pub role: Role,
    pub decision: Option<Decision>,
    pub decided_round: Option<Round>,
    pub status: NodeStatus,
    pub up: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockedRound {
    pub round: Round,
    pub participants: Vec<PartyId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TpcOutcome {
    pub nodes: Vec<NodeOutcome>,
    /// Rounds in which at least one up participant was prepared but undecided.
    pub blocked: Vec<BlockedRound>,
    pub agreement: bool,
    #[serde(skip)]
    pub trace: Vec<TraceEvent>,
}

impl TpcOutcome {
    pub fn node(&self, id: &str) -> Option<&NodeOutcome> {
        self.nodes.iter().find(|n| n.node.as_str() == id)
    }

    pub fn decisions(&self) -> Vec<Decision> {
        self.nodes.iter().filter_map(|n| n.decision).collect()
    }

    pub fn blocked_rounds_of(&self, participant: &str) -> Vec<Round> {
        self.blocked
            .iter()
            .filter(|b| b.participants.iter().any(|p| p.as_str() == participant))
            .map(|b| b.round)
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Node {
    id: PartyId,
    role: Role,
    up: bool,
    // volatile
    tentative: bool,
    votes: BTreeMap<PartyId, Vote>,
    querying: bool,
    query_cursor: usize,
    // stable
    log: Vec<LogRecord>,
    decided_round: Option<Round>,
    conflict: bool,
}

impl Node {
    fn new(id: PartyId, role: Role) -> Self {
        Node {
            id,
            role,
            up: true,
            tentative: role == Role::Participant,
            votes: BTreeMap::new(),
            querying: false,
            query_cursor: 0,
            log: Vec::new(),
            decided_round: None,
            conflict: false,
        }
    }

    fn decision(&self) -> Option<Decision> {
        self.log.iter().find_map(|r| match r {
            LogRecord::Decided { decision } => Some(*decision),
            _ => None,
        })
    }

    fn prepared(&self) -> bool {
        self.log.contains(&LogRecord::Prepared)
    }

    fn voted(&self) -> bool {
        self.log.iter().any(|r| matches!(r, LogRecord::Voted { .. }))
    }
}

struct Sim<'c> {
    cfg: &'c TpcConfig,
    nodes: Vec<Node>,
    inflight: Vec<TpcMessage>,
    round: Round,
    trace: Vec<TraceEvent>,
}

impl<'c> Sim<'c> {
    fn idx(&self, id: &PartyId) -> usize {
        self.nodes.iter().position(|n| n.id == *id).expect("validated node")
    }

    fn event(&mut self, actor: &PartyId, ev: TpcEvent) {
        self.trace.push(TraceEvent {
            round: self.round,
            actor: actor.clone(),
            chain: ChainId::new(TPC_CHAIN),
            action: TraceAction::Tpc(ev),
            result: EventResult::Accepted,
            deltas: Vec::new(),
        });
    }

    fn send(&mut self, from: &PartyId, to: &PartyId, kind: MessageKind) {
        self.event(from, TpcEvent::Send { to: to.clone(), message: kind });
        self.inflight.push(TpcMessage { from: from.clone(), to: to.clone(), kind, sent: self.round });
    }

    fn log(&mut self, i: usize, entry: LogRecord) {
        self.nodes[i].log.push(entry);
        if let LogRecord::Decided { .. } = entry {
            self.nodes[i].decided_round = Some(self.round);
            self.nodes[i].querying = false;
        }
        let id = self.nodes[i].id.clone();
        self.event(&id, TpcEvent::Log { entry });
    }

    fn adopt(&mut self, i: usize, d: Decision) {
        match self.nodes[i].decision() {
            None => self.log(i, LogRecord::Decided { decision: d }),
            Some(logged) if logged != d => {
                self.nodes[i].conflict = true;
                let id = self.nodes[i].id.clone();
                self.event(&id, TpcEvent::Conflict { logged, received: d });
            }
            Some(_) => {}
        }
    }

    fn broadcast_decision(&mut self, d: Decision) {
        let from = self.cfg.coordinator.clone();
        for p in self.cfg.participants.clone() {
            self.send(&from, &p, MessageKind::Decision { decision: d });
        }
    }

    fn coordinator_decide(&mut self, d: Decision) {
        let c = self.idx(&self.cfg.coordinator.clone());
        // Stable first, then tell everyone.
        self.log(c, LogRecord::Decided { decision: d });
        self.broadcast_decision(d);
    }

    fn crash(&mut self, i: usize) {
        let n = &mut self.nodes[i];
        n.up = false;
        n.tentative = false;
        n.votes.clear();
        n.querying = false;
        n.query_cursor = 0;
        let id = n.id.clone();
        self.event(&id, TpcEvent::Crash);
    }

    fn recover(&mut self, i: usize) {
        self.nodes[i].up = true;
        let id = self.nodes[i].id.clone();
        self.event(&id, TpcEvent::Recover);
        match self.nodes[i].role {
            Role::Coordinator => match self.nodes[i].decision() {
                Some(d) => self.broadcast_decision(d),
                None => self.coordinator_decide(Decision::Abort),
            },
            Role::Participant => {
                if self.nodes[i].decision().is_some() {
                    return;
                }
                if self.nodes[i].prepared() {
                    // Tentative changes come back from stable storage, but the
                    // outcome must be learned before resuming.
                    self.nodes[i].tentative = true;
                    self.nodes[i].querying = true;
                    self.nodes[i].query_cursor = 0;
                } else {
                    // Never voted yes, so the coordinator cannot commit.
                    self.log(i, LogRecord::Decided { decision: Decision::Abort });
                }
            }
        }
    }

    fn deliver(&mut self, m: TpcMessage) {
        let i = self.idx(&m.to);
        if !self.nodes[i].up {
            self.event(&m.to.clone(), TpcEvent::Drop { to: m.to.clone(), message: m.kind });
            return;
        }
        self.event(&m.to.clone(), TpcEvent::Deliver { from: m.from.clone(), message: m.kind });
        let me = m.to.clone();
        match (self.nodes[i].role, m.kind) {
            (Role::Participant, MessageKind::PrepareRequest) => {
                if self.nodes[i].voted() {
                    return;
                }
                let vote = self.cfg.votes[&me];
                let coordinator = self.cfg.coordinator.clone();
                if let Some(Decision::Abort) = self.nodes[i].decision() {
                    self.log(i, LogRecord::Voted { vote: Vote::No });
                    self.send(&me, &coordinator, MessageKind::Vote { vote: Vote::No });
                } else if vote == Vote::Yes && self.nodes[i].tentative {
                    self.log(i, LogRecord::Prepared);
                    self.log(i, LogRecord::Voted { vote: Vote::Yes });
                    self.send(&me, &coordinator, MessageKind::Vote { vote: Vote::Yes });
                } else {
                    self.log(i, LogRecord::Voted { vote: Vote::No });
                    self.log(i, LogRecord::Decided { decision: Decision::Abort });
                    self.send(&me, &coordinator, MessageKind::Vote { vote: Vote::No });
                }
            }
            (Role::Participant, MessageKind::Decision { decision })
            | (Role::Participant, MessageKind::OutcomeReply { decision })
            | (Role::Coordinator, MessageKind::OutcomeReply { decision }) => self.adopt(i, decision),
            (_, MessageKind::OutcomeQuery) => {
                if let Some(d) = self.nodes[i].decision() {
                    self.send(&me, &m.from, MessageKind::OutcomeReply { decision: d });
                }
            }
            (Role::Coordinator, MessageKind::Vote { vote }) => {
                if self.nodes[i].decision().is_none() {
                    self.nodes[i].votes.insert(m.from.clone(), vote);
                    if vote == Vote::No {
                        self.coordinator_decide(Decision::Abort);
                    }
                }
            }
            (Role::Coordinator, _) | (Role::Participant, MessageKind::Vote { .. }) => {}
        }
    }

    fn step(&mut self) {
        let r = self.round;
        for f in self.cfg.faults.ordered().into_iter().filter(|f| f.round == r) {
            let i = self.idx(&f.node);
            match f.event {
                FaultKind::Crash => self.crash(i),
                FaultKind::Recover => self.recover(i),
            }
        }

        let (due, later): (Vec<_>, Vec<_>) =
            std::mem::take(&mut self.inflight).into_iter().partition(|m| m.sent.next() == r);
        self.inflight = later;
        for m in due {
            self.deliver(m);
        }

        let c = self.idx(&self.cfg.coordinator.clone());
        if self.nodes[c].up && self.nodes[c].decision().is_none() {
            if r == Round::ZERO {
                let from = self.cfg.coordinator.clone();
                for p in self.cfg.participants.clone() {
                    self.send(&from, &p, MessageKind::PrepareRequest);
                }
            } else {
                let all_yes = self
                    .cfg
                    .participants
                    .iter()
                    .all(|p| self.nodes[c].votes.get(p) == Some(&Vote::Yes));
                if all_yes {
                    self.coordinator_decide(Decision::Commit);
                } else if r.index() >= self.cfg.vote_timeout {
                    self.coordinator_decide(Decision::Abort);
                }
            }
        }

        // Outcome queries: coordinator first, then peers, one per round.
        for i in 0..self.nodes.len() {
            let n = &self.nodes[i];
            if !(n.up && n.querying && n.decision().is_none()) {
                continue;
            }
            let targets: Vec<PartyId> = std::iter::once(self.cfg.coordinator.clone())
                .chain(self.cfg.participants.iter().filter(|p| **p != n.id).cloned())
                .collect();
            let target = targets[n.query_cursor % targets.len()].clone();
            self.nodes[i].query_cursor += 1;
            let me = self.nodes[i].id.clone();
            self.send(&me, &target, MessageKind::OutcomeQuery);
        }
    }

    fn blocked_now(&self) -> Vec<PartyId> {
        self.nodes
            .iter()
            .filter(|n| n.role == Role::Participant && n.up && n.prepared() && n.decision().is_none())
            .map(|n| n.id.clone())
            .collect()
    }
}

/// Runs one commit attempt for `horizon` rounds.
pub fn tpc_run(cfg: &TpcConfig) -> Result<TpcOutcome> {
    cfg.validate()?;
    let mut nodes = vec![Node::new(cfg.coordinator.clone(), Role::Coordinator)];
    nodes.extend(cfg.participants.iter().map(|p| Node::new(p.clone(), Role::Participant)));
    let mut sim = Sim { cfg, nodes, inflight: Vec::new(), round: Round::ZERO, trace: Vec::new() };
    let mut blocked = Vec::new();
    for r in 0..cfg.horizon {
        sim.round = Round(r);
        sim.step();
        let b = sim.blocked_now();
        if !b.is_empty() {
            blocked.push(BlockedRound { round: Round(r), participants: b });
        }
    }

    let decisions: Vec<Decision> = sim.nodes.iter().filter_map(Node::decision).collect();
    let agreement = decisions.windows(2).all(|w| w[0] == w[1]) && sim.nodes.iter().all(|n| !n.conflict);
    let nodes = sim
        .nodes
        .iter()
        .map(|n| NodeOutcome {
            node: n.id.clone(),
            role: n.role,
            decision: n.decision(),
            decided_round: n.decided_round,
            status: match (n.decision(), n.prepared()) {
                (Some(_), _) => NodeStatus::Decided,
                (None, true) => NodeStatus::Blocked,
                (None, false) => NodeStatus::Undecided,
            },
            up: n.up,
        })
        .collect();
    Ok(TpcOutcome { nodes, blocked, agreement, trace: sim.trace })
}

/// Result of [`tpc_blocking_probe`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingReport {
    pub crash_coordinator_after_prepare: bool,
    pub recover_at: Option<Round>,
    pub blocked: Vec<BlockedRound>,
    /// First round in which every participant has an outcome, if any.
    pub resolved_at: Option<Round>,
    pub outcome: TpcOutcome,
}

/// All participants vote yes; optionally the coordinator crashes once votes
/// are in flight and before it can log a decision.
pub fn tpc_blocking_probe(
    participants: &[&str],
    crash_coordinator_after_prepare: bool,
    recover_at: Option<Round>,
) -> Result<BlockingReport> {
    let votes = vec![Vote::Yes; participants.len()];
    let mut cfg = TpcConfig::new("carol", participants, &votes);
    if crash_coordinator_after_prepare {
        let mut faults = FaultSchedule::none().crash("carol", cfg.vote_timeout);
        if let Some(r) = recover_at {
            faults = faults.recover("carol", r.index());
        }
        cfg.faults = faults;
    }
    let outcome = tpc_run(&cfg)?;
    let resolved_at = outcome
        .nodes
        .iter()
        .filter(|n| n.role == Role::Participant)
        .map(|n| n.decided_round)
        .collect::<Option<Vec<_>>>()
        .and_then(|v| v.into_iter().max());
    Ok(BlockingReport {
        crash_coordinator_after_prepare,
        recover_at,
        blocked: outcome.blocked.clone(),
        resolved_at,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(votes: [Vote; 2]) -> TpcConfig {
        TpcConfig::new("carol", &["alice", "bob"], &votes)
    }

    #[test]
    fn all_yes_commits() {
        let out = tpc_run(&two([Vote::Yes, Vote::Yes])).unwrap();
        assert!(out.agreement);
        assert_eq!(out.decisions(), vec![Decision::Commit; 3]);
        assert_eq!(out.node("alice").unwrap().decided_round, Some(Round(3)));
        assert_eq!(out.node("carol").unwrap().decided_round, Some(Round(2)));
    }

    #[test]
    fn a_no_vote_aborts_everyone() {
        let out = tpc_run(&two([Vote::Yes, Vote::No])).unwrap();
        assert!(out.agreement);
        assert_eq!(out.decisions(), vec![Decision::Abort; 3]);
    }

    #[test]
    fn prepared_participant_recovers_and_learns_outcome() {
        let cfg = two([Vote::Yes, Vote::Yes]).with_faults(FaultSchedule::none().crash("alice", 2).recover("alice", 5));
        let out = tpc_run(&cfg).unwrap();
        assert!(out.agreement);
        let alice = out.node("alice").unwrap();
        assert_eq!(alice.decision, Some(Decision::Commit));
        // Query sent at 5, answered at 6, adopted at 7.
        assert_eq!(alice.decided_round, Some(Round(7)));
    }

    #[test]
    fn coordinator_crash_after_prepare_blocks_until_recovery() {
        let report = tpc_blocking_probe(&["alice", "bob"], true, Some(Round(6))).unwrap();
        assert_eq!(report.outcome.blocked_rounds_of("alice"), (1..=6).map(Round).collect::<Vec<_>>());
        assert_eq!(report.outcome.blocked_rounds_of("bob"), (1..=6).map(Round).collect::<Vec<_>>());
        assert_eq!(report.outcome.decisions(), vec![Decision::Abort; 3]);
        assert_eq!(report.resolved_at, Some(Round(7)));
    }

    #[test]
    fn coordinator_never_recovering_blocks_forever() {
        let report = tpc_blocking_probe(&["alice", "bob"], true, None).unwrap();
        assert_eq!(report.resolved_at, None);
        assert_eq!(report.outcome.node("alice").unwrap().status, NodeStatus::Blocked);
        assert_eq!(report.blocked.last().unwrap().round, Round(DEFAULT_HORIZON - 1));
    }

    #[test]
    fn no_crash_means_no_blocking_after_decision() {
        let report = tpc_blocking_probe(&["alice", "bob"], false, None).unwrap();
        let decided = report.resolved_at.unwrap();
        assert!(report.blocked.iter().all(|b| b.round < decided));
    }

    #[test]
    fn malformed_schedules_rejected() {
        let bad = two([Vote::Yes, Vote::Yes]).with_faults(FaultSchedule::none().recover("alice", 1));
        assert!(matches!(tpc_run(&bad), Err(Error::InvalidFaults(_))));
        let bad = two([Vote::Yes, Vote::Yes]).with_faults(FaultSchedule::none().crash("alice", 1).crash("alice", 2));
        assert!(matches!(tpc_run(&bad), Err(Error::InvalidFaults(_))));
        let bad = two([Vote::Yes, Vote::Yes]).with_faults(FaultSchedule::none().crash("dave", 1));
        assert!(matches!(tpc_run(&bad), Err(Error::InvalidFaults(_))));
    }

    #[test]
    fn parse_fault_spec() {
        let c = PartyId::from("carol");
        let f = FaultSchedule::parse("coordinator@after-prepare", &c, 2).unwrap();
        assert_eq!(f, FaultSchedule::none().crash("carol", 2));
        let f = FaultSchedule::parse("crash:alice@2, recover:alice@5", &c, 2).unwrap();
        assert_eq!(f, FaultSchedule::none().crash("alice", 2).recover("alice", 5));
        assert!(FaultSchedule::parse("explode:alice@2", &c, 2).is_err());
        assert!(FaultSchedule::parse("alice", &c, 2).is_err());
        assert!(FaultSchedule::parse("alice@soon", &c, 2).is_err());
    }

    #[test]
    fn participant_crash_before_prepare_votes_no() {
        // Alice loses her tentative changes before the prepare arrives.
        let cfg = two([Vote::Yes, Vote::Yes]).with_faults(FaultSchedule::none().crash("alice", 0).recover("alice", 1));
        let out = tpc_run(&cfg).unwrap();
        assert!(out.agreement);
        assert_eq!(out.decisions(), vec![Decision::Abort; 3]);
    }

    #[test]
    fn decisions_survive_crash() {
        let cfg = two([Vote::Yes, Vote::Yes]).with_faults(FaultSchedule::none().crash("carol", 4).recover("carol", 6));
        let out = tpc_run(&cfg).unwrap();
        assert_eq!(out.node("carol").unwrap().decision, Some(Decision::Commit));
        assert_eq!(out.node("carol").unwrap().decided_round, Some(Round(2)));
        assert!(out.agreement);
    }
}
