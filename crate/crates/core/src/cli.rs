//! Command-line driver. Exit codes: 0 success, 2 malformed input, 3 a
//! compliant party lost or 2PC nodes disagreed.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explorer::{evaluate, explore, explore_tpc, nonempty_subsets, RunVerdict, SafetyReport, Sweep};
use crate::ledger::write_jsonl;
use crate::primitives::{PartyId, Round};
use crate::scenario::{Resolved, Scenario, SwapRun};
use crate::tpc::{tpc_run, FaultSchedule, TpcConfig, TpcOutcome, Vote};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_LOSS: i32 = 3;

/// Most counterexample scenarios written by one `explore`.
pub const MAX_COUNTEREXAMPLE_FILES: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    #[default]
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "xswap", version, about = "Simulate and attack atomic cross-chain swap protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    #[arg(long, value_enum, default_value_t)]
    pub format: ReportFormat,
    /// Overrides the scenario's secret seed.
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub max_rounds: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and judge the outcome.
    Run {
        scenario: PathBuf,
        /// Write the JSONL trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the deviation catalog of some parties against everyone else.
    Explore {
        scenario: PathBuf,
        /// Comma-separated deviating parties; if omitted, every non-empty
        /// subset that leaves some party compliant.
        #[arg(long, value_delimiter = ',')]
        deviating: Vec<String>,
        /// Write replayable scenario files for LOSS runs into this directory.
        #[arg(long)]
        counterexamples: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Two-phase commit with optional faults.
    Tpc {
        /// e.g. `coordinator@after-prepare` or `crash:alice@2,recover:alice@5`.
        #[arg(long, default_value = "")]
        faults: String,
        /// One vote per participant, in order.
        #[arg(long, value_delimiter = ',', default_value = "yes,yes")]
        votes: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "alice,bob")]
        participants: Vec<String>,
        #[arg(long, default_value = "carol")]
        coordinator: String,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: ReportFormat,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_MALFORMED;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_MALFORMED
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Run { scenario, trace, common } => cmd_run(&scenario, trace.as_deref(), &common, out),
        Command::Explore { scenario, deviating, counterexamples, common } => {
            cmd_explore(&scenario, &deviating, counterexamples.as_deref(), &common, out)
        }
        Command::Tpc { faults, votes, participants, coordinator, trace, format } => {
            let coordinator = PartyId::new(coordinator);
            let participants: Vec<&str> = participants.iter().map(String::as_str).collect();
            let votes = votes.iter().map(|v| v.parse()).collect::<Result<Vec<Vote>>>()?;
            if votes.len() != participants.len() {
                return Err(Error::InvalidParams(format!(
                    "{} votes for {} participants",
                    votes.len(),
                    participants.len()
                )));
            }
            let mut cfg = TpcConfig::new(coordinator.as_str(), &participants, &votes);
            cfg.faults = FaultSchedule::parse(&faults, &coordinator, cfg.vote_timeout)?;
            cmd_tpc(&cfg, trace.as_deref(), format, out)
        }
    }
}

fn load(path: &Path, common: &Common) -> Result<(Scenario, Resolved)> {
    let mut scenario = Scenario::load(path)?;
    if let Some(seed) = &common.seed {
        scenario.seed = Some(seed.clone());
    }
    if let Some(m) = common.max_rounds {
        scenario.max_rounds = Some(m);
    }
    let resolved = scenario.resolve()?;
    Ok((scenario, resolved))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[derive(Serialize)]
struct RunReport<'a> {
    protocol: &'a str,
    seed: &'a str,
    #[serde(flatten)]
    verdict: &'a RunVerdict,
}

pub fn cmd_run(path: &Path, trace: Option<&Path>, common: &Common, out: &mut dyn Write) -> Result<i32> {
    let (_, resolved) = load(path, common)?;
    let run = match resolved {
        Resolved::Tpc(cfg) => return cmd_tpc(&cfg, trace, common.format, out),
        Resolved::Swap(run) => *run,
    };
    let SwapRun { protocol, setup, strategies, valuation, seed, max_rounds } = &run;
    let (verdict, result) = evaluate(protocol, setup, strategies, seed, *max_rounds, valuation)?;
    if let Some(path) = trace {
        let mut buf = Vec::new();
        write_jsonl(result.world.trace(), &mut buf)?;
        write_file(path, &buf)?;
    }
    match common.format {
        ReportFormat::Json => {
            let report = RunReport { protocol: protocol.name(), seed, verdict: &verdict };
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        ReportFormat::Table => print_run_table(&run, &verdict, out)?,
    }
    Ok(if verdict.has_loss() { EXIT_LOSS } else { EXIT_OK })
}

fn print_run_table(run: &SwapRun, v: &RunVerdict, out: &mut dyn Write) -> Result<()> {
    let chains: Vec<_> = run.setup.chains.iter().map(|c| c.name.clone()).collect();
    writeln!(out, "protocol {}  seed {}  rounds {}", run.protocol.name(), run.seed, v.rounds)?;
    for s in &v.strategies {
        writeln!(out, "strategy  {s}")?;
    }
    write!(out, "{:<8}", "party")?;
    for c in &chains {
        write!(out, "{:>10}", c.as_str())?;
    }
    writeln!(out, "{:>8}  {:<8}  verdict", "net", "lockup")?;
    for (party, h) in &v.payoffs {
        write!(out, "{:<8}", party.as_str())?;
        for c in &chains {
            write!(out, "{:>+10}", h.get(c).copied().unwrap_or(0))?;
        }
        let verdict = match (v.classifications.get(party), v.deviator_gain.get(party)) {
            (Some(c), _) => c.to_string(),
            (None, Some(g)) => format!("deviating (gain {g:+})"),
            (None, None) => "-".into(),
        };
        let lockup = v.lockup.get(party).map_or("-".to_string(), |l| l.to_string());
        writeln!(out, "{:>+8}  {:<8}  {verdict}", run.valuation.net(h), lockup)?;
    }
    writeln!(out, "conserved {}  clairvoyance-free {}", v.conserved, v.clairvoyance_free)?;
    Ok(())
}

#[derive(Serialize)]
struct ExploreOutput<'a> {
    reports: &'a [SafetyReport],
}

pub fn cmd_explore(
    path: &Path,
    deviating: &[String],
    counterexamples: Option<&Path>,
    common: &Common,
    out: &mut dyn Write,
) -> Result<i32> {
    let (scenario, resolved) = load(path, common)?;
    let run = match resolved {
        Resolved::Tpc(cfg) => return cmd_explore_tpc(&cfg, common.format, out),
        Resolved::Swap(run) => *run,
    };
    let subsets = if deviating.is_empty() {
        // The full coalition leaves nobody to judge; it is only run on request.
        let parties = run.protocol.script().parties();
        nonempty_subsets(&parties).into_iter().filter(|s| s.len() < parties.len()).collect()
    } else {
        vec![deviating.iter().map(PartyId::new).collect()]
    };
    let sweep = Sweep {
        protocol: &run.protocol,
        setup: &run.setup,
        seed: &run.seed,
        max_rounds: run.max_rounds,
        valuation: &run.valuation,
    };
    let mut reports = Vec::new();
    for subset in &subsets {
        reports.push(explore(&sweep, subset)?);
    }
    if let Some(dir) = counterexamples {
        std::fs::create_dir_all(dir)?;
        let all = reports.iter().flat_map(|r| r.counterexamples.iter());
        for (i, ce) in all.take(MAX_COUNTEREXAMPLE_FILES).enumerate() {
            let replay = scenario.with_strategies(ce.strategies.clone());
            let file = dir.join(format!("{}-loss-{i:03}.json", run.protocol.name()));
            write_file(&file, replay.to_json_pretty().as_bytes())?;
        }
    }
    match common.format {
        ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&ExploreOutput { reports: &reports })?)?,
        ReportFormat::Table => {
            for r in &reports {
                print_report_table(r, out)?;
            }
        }
    }
    Ok(if reports.iter().all(SafetyReport::loss_free) { EXIT_OK } else { EXIT_LOSS })
}

fn print_report_table(r: &SafetyReport, out: &mut dyn Write) -> Result<()> {
    let names: Vec<&str> = r.deviating.iter().map(PartyId::as_str).collect();
    writeln!(out, "protocol {}  deviating {}  runs {}", r.protocol, names.join(","), r.catalog_size)?;
    let c = &r.classifications;
    writeln!(
        out,
        "  SwapCompleted {}  MadeWholeRefund {}  CompensatedAsVictim {}  LOSS {}  unverdicted {}",
        c.swap_completed, c.made_whole_refund, c.compensated_as_victim, c.loss, c.unverdicted
    )?;
    for (p, l) in &r.lockup {
        writeln!(out, "  lockup {p}: max {} rounds over {} runs", l.max_rounds, l.runs)?;
    }
    for (p, g) in &r.max_deviator_gain {
        writeln!(out, "  best deviation gain {p}: {g:+}")?;
    }
    if r.conservation_violations + r.clairvoyance_violations > 0 {
        writeln!(
            out,
            "  conservation violations {}  clairvoyance violations {}",
            r.conservation_violations, r.clairvoyance_violations
        )?;
    }
    for ce in r.counterexamples.iter().take(5) {
        let s: Vec<String> = ce.strategies.iter().map(ToString::to_string).collect();
        let v: Vec<String> = ce.classifications.iter().map(|(p, c)| format!("{p} {c}")).collect();
        writeln!(out, "  counterexample [{}] -> {}", s.join(" | "), v.join(", "))?;
    }
    if r.counterexamples.len() > 5 {
        writeln!(out, "  ... {} more counterexamples", r.counterexamples.len() - 5)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TpcReport<'a> {
    agreement: bool,
    #[serde(flatten)]
    outcome: &'a TpcOutcome,
}

pub fn cmd_tpc(cfg: &TpcConfig, trace: Option<&Path>, format: ReportFormat, out: &mut dyn Write) -> Result<i32> {
    let outcome = tpc_run(cfg)?;
    if let Some(path) = trace {
        let mut buf = Vec::new();
        write_jsonl(&outcome.trace, &mut buf)?;
        write_file(path, &buf)?;
    }
    match format {
        ReportFormat::Json => {
            let report = TpcReport { agreement: outcome.agreement, outcome: &outcome };
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        ReportFormat::Table => {
            writeln!(out, "{:<8}{:<13}{:<10}{:<7}status", "node", "role", "decision", "round")?;
            for n in &outcome.nodes {
                let role = format!("{:?}", n.role).to_lowercase();
                let decision = n.decision.map_or("-".to_string(), |d| d.to_string());
                let round = n.decided_round.map_or("-".to_string(), |r: Round| r.to_string());
                let status = format!("{:?}", n.status).to_lowercase();
                writeln!(out, "{:<8}{:<13}{:<10}{:<7}{status}", n.node.as_str(), role, decision, round)?;
            }
            if outcome.blocked.is_empty() {
                writeln!(out, "blocked: none")?;
            } else {
                let mut by_party: BTreeMap<&PartyId, Vec<u32>> = BTreeMap::new();
                for b in &outcome.blocked {
                    for p in &b.participants {
                        by_party.entry(p).or_default().push(b.round.index());
                    }
                }
                for (p, rounds) in by_party {
                    writeln!(out, "blocked {p}: rounds {}", compress(&rounds))?;
                }
            }
            writeln!(out, "agreement: {}", if outcome.agreement { "yes" } else { "NO" })?;
        }
    }
    Ok(if outcome.agreement { EXIT_OK } else { EXIT_LOSS })
}

/// Renders sorted integers as ranges, e.g. `1-6, 9`.
fn compress(v: &[u32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[j] + 1 {
            j += 1;
        }
        parts.push(if i == j { v[i].to_string() } else { format!("{}-{}", v[i], v[j]) });
        i = j + 1;
    }
    parts.join(", ")
}

fn cmd_explore_tpc(cfg: &TpcConfig, format: ReportFormat, out: &mut dyn Write) -> Result<i32> {
    let report = explore_tpc(cfg, 10, 2)?;
    match format {
        ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        ReportFormat::Table => writeln!(
            out,
            "tpc sweep: {} schedules, {} runs, {} divergent, {} validity violations, {} blocked at horizon",
            report.schedules,
            report.runs,
            report.divergent.len(),
            report.validity_violations.len(),
            report.blocked_at_horizon
        )?,
    }
    let ok = report.divergent.is_empty() && report.validity_violations.is_empty();
    Ok(if ok { EXIT_OK } else { EXIT_LOSS })
}
