//! Acceptance criteria. Runs without the test harness so the PASS/FAIL line
//! of every criterion is always printed; exits non-zero if any fails.
//!
//! Every swap run made for criteria 1-7 is recorded with its trace digest and
//! conservation flag; criterion 8 replays all of them and compares digests.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use xswap::adversary::{Edit, Strategy};
use xswap::explorer::{
    evaluate, explore_with, explore_tpc, fault_schedules, transfer_metrics, Classification, RunVerdict, SafetyReport,
    Sweep, Valuation,
};
use xswap::ledger::to_jsonl;
use xswap::protocols::{
    HtlcParams, HtlcTimeouts, PremiumParams, Script, SwapProtocol, TransferParams, DEFAULT_MAX_ROUNDS, DEFAULT_SEED,
};
use xswap::scenario::{Resolved, Scenario};
use xswap::tpc::{tpc_run, Decision, TpcConfig, Vote};
use xswap::{Amount, PartyId};

type Outcome = Result<String, String>;
type Criterion = Box<dyn Fn(&mut Journal) -> Outcome>;

/// A sweep made by some criterion, kept for the determinism replay.
struct Recorded {
    protocol: SwapProtocol,
    deviating: Vec<PartyId>,
    digests: Vec<String>,
}

#[derive(Default)]
struct Journal {
    sweeps: Vec<Recorded>,
    single_runs: Vec<(SwapProtocol, Vec<Strategy>, String)>,
    tpc_configs: Vec<TpcConfig>,
    runs: usize,
    unconserved: usize,
}

impl Journal {
    fn sweep(&mut self, protocol: &SwapProtocol, deviating: &[&str]) -> Result<SafetyReport, String> {
        let setup = protocol.script().default_setup();
        let valuation = Valuation::default();
        let sweep = Sweep { protocol, setup: &setup, seed: DEFAULT_SEED, max_rounds: DEFAULT_MAX_ROUNDS, valuation: &valuation };
        let deviating: Vec<PartyId> = deviating.iter().map(|p| PartyId::from(*p)).collect();
        let mut digests = Vec::new();
        let report = explore_with(&sweep, &deviating, |v| digests.push(v.trace_digest.clone()))
            .map_err(|e| e.to_string())?;
        self.runs += report.catalog_size;
        self.unconserved += report.conservation_violations;
        self.sweeps.push(Recorded { protocol: protocol.clone(), deviating, digests });
        Ok(report)
    }

    fn single(&mut self, protocol: &SwapProtocol, strategies: &[Strategy]) -> Result<RunVerdict, String> {
        let v = run_once(protocol, strategies)?;
        self.runs += 1;
        self.unconserved += usize::from(!v.conserved);
        self.single_runs.push((protocol.clone(), strategies.to_vec(), v.trace_digest.clone()));
        Ok(v)
    }
}

fn run_once(protocol: &SwapProtocol, strategies: &[Strategy]) -> Result<RunVerdict, String> {
    let setup = protocol.script().default_setup();
    evaluate(protocol, &setup, strategies, DEFAULT_SEED, DEFAULT_MAX_ROUNDS, &Valuation::default())
        .map(|(v, _)| v)
        .map_err(|e| e.to_string())
}

fn htlc(timeouts: HtlcTimeouts) -> SwapProtocol {
    SwapProtocol::Htlc(HtlcParams { timeouts, ..Default::default() })
}

fn holdings(v: &RunVerdict, party: &str) -> BTreeMap<String, i64> {
    v.payoffs
        .get(&PartyId::from(party))
        .map(|h| h.iter().map(|(c, x)| (c.as_str().to_string(), *x)).collect())
        .unwrap_or_default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_htlc_safety(j: &mut Journal) -> Outcome {
    let start = Instant::now();
    let p = htlc(HtlcTimeouts { alice: 2, bob: 1 });
    let mut total = 0;
    for subset in [&["alice"][..], &["bob"], &["alice", "bob"]] {
        let r = j.sweep(&p, subset)?;
        ensure(r.classifications.loss == 0, || {
            format!("{subset:?}: {} LOSS, first {:?}", r.classifications.loss, r.counterexamples.first())
        })?;
        total += r.catalog_size;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{total} profiles over 3 coalitions, 0 LOSS, {elapsed:.2?}"))
}

fn c2_bob_asleep(j: &mut Journal) -> Outcome {
    let p = HtlcParams::default();
    let principal = p.bob_amount.signed();
    let asleep = Strategy::new("bob", vec![Edit::Omit { step: "forward".into() }]);
    let v = j.single(&SwapProtocol::Htlc(p), &[asleep])?;
    let bob = holdings(&v, "bob");
    let alice = holdings(&v, "alice");
    let want_bob = BTreeMap::from([("guilder".to_string(), 0), ("florin".to_string(), -principal)]);
    let want_alice = BTreeMap::from([("guilder".to_string(), 0), ("florin".to_string(), principal)]);
    ensure(bob == want_bob && alice == want_alice, || format!("bob {bob:?}, alice {alice:?}"))?;
    Ok(format!("bob {bob:?}, alice {alice:?}"))
}

fn c3_timeout_criticality(j: &mut Journal) -> Outcome {
    let bad = j.sweep(&htlc(HtlcTimeouts { alice: 2, bob: 2 }), &["alice"])?;
    let bob_losses = bad
        .counterexamples
        .iter()
        .filter(|c| c.classifications.get(&PartyId::from("bob")).is_some_and(Classification::is_loss))
        .count();
    ensure(bob_losses >= 1, || "no LOSS for bob with bob's timeout at 2".into())?;
    let good = j.sweep(&htlc(HtlcTimeouts { alice: 2, bob: 1 }), &["alice"])?;
    ensure(good.classifications.loss == 0, || format!("{} LOSS with default timeouts", good.classifications.loss))?;
    let first: Vec<String> = bad.counterexamples[0].strategies.iter().map(ToString::to_string).collect();
    Ok(format!("timeouts {{2,2}}: {bob_losses} bob LOSS (e.g. {}); {{2,1}}: none", first.join("; ")))
}

fn c4_premium_compensation(j: &mut Journal) -> Outcome {
    let mut checked = 0;
    for (a, b) in [(100, 100), (100, 200), (250, 1000)] {
        let params = PremiumParams { alice_principal: Amount(a), bob_principal: Amount(b), ..Default::default() };
        let (pa, pb) = (params.p_a().signed(), params.p_b().signed());
        let protocol = SwapProtocol::Premium(params);
        for (deviator, victim, owed) in [("alice", "bob", pa), ("bob", "alice", pb)] {
            let setup = protocol.script().default_setup();
            let valuation = Valuation::default();
            let sweep =
                Sweep { protocol: &protocol, setup: &setup, seed: DEFAULT_SEED, max_rounds: DEFAULT_MAX_ROUNDS, valuation: &valuation };
            let mut bad = Vec::new();
            let mut digests = Vec::new();
            let report = explore_with(&sweep, &[PartyId::from(deviator)], |v| {
                digests.push(v.trace_digest.clone());
                let class = &v.classifications[&PartyId::from(victim)];
                let class_ok = match class {
                    Classification::SwapCompleted | Classification::MadeWholeRefund => true,
                    Classification::CompensatedAsVictim { amount } => *amount == owed,
                    Classification::Loss { .. } => false,
                };
                let gain_ok = v.deviator_gain.get(&PartyId::from(deviator)).is_none_or(|g| *g <= 0);
                if !class_ok || !gain_ok {
                    bad.push(format!("{:?} -> {class}, gain {:?}", v.strategies, v.deviator_gain));
                }
            })
            .map_err(|e| e.to_string())?;
            j.runs += report.catalog_size;
            j.unconserved += report.conservation_violations;
            j.sweeps.push(Recorded { protocol: protocol.clone(), deviating: vec![deviator.into()], digests });
            ensure(bad.is_empty(), || format!("principals {a}/{b}, {deviator} deviating: {}", bad[0]))?;
            ensure(report.classifications.compensated_as_victim > 0, || {
                format!("principals {a}/{b}: {deviator} never triggers compensation")
            })?;
            checked += report.catalog_size;
        }
    }
    Ok(format!("{checked} single-party deviations over 3 principal pairs; victims get exactly p_a/p_b"))
}

fn c5_premium_default() -> Outcome {
    let mut n = 0;
    for principal in (50..=10_000).step_by(50) {
        let json = format!(
            r#"{{"version": 1, "protocol": "premium", "params": {{"alice_principal": {principal}, "bob_principal": {}}}}}"#,
            principal * 3
        );
        let Resolved::Swap(run) = Scenario::from_json(&json).and_then(|s| s.resolve()).map_err(|e| e.to_string())?
        else {
            return Err("premium scenario resolved to tpc".into());
        };
        let SwapProtocol::Premium(p) = run.protocol else { return Err("not premium".into()) };
        // p_b is premised on Alice's principal, p_a on Bob's.
        ensure(p.p_b().0 * 100 == 2 * principal && p.p_a().0 * 100 == 2 * principal * 3, || {
            format!("principal {principal}: p_a {}, p_b {}", p.p_a(), p.p_b())
        })?;
        n += 1;
    }
    Ok(format!("{n} principals from 50 to 10000: premium = 2%"))
}

fn c6_transfer(j: &mut Journal) -> Outcome {
    let params = TransferParams::default();
    let setup = params.default_setup();
    let m = transfer_metrics(&params, &setup, DEFAULT_SEED, DEFAULT_MAX_ROUNDS).map_err(|e| e.to_string())?;
    for carol in [true, false] {
        let p = TransferParams { carol_participates: carol, ..params.clone() };
        j.single(&SwapProtocol::Transfer(p), &[])?;
    }
    let peak = params.ab_amount.0 + params.ac_amount.0;
    let rounds: Vec<u32> = m.alice_rounds_after_entry.iter().map(|r| r.index()).collect();
    ensure(m.extra_rounds == 3, || format!("extra rounds {}", m.extra_rounds))?;
    ensure(m.alice_peak_escrow_with_carol == peak, || format!("peak escrow {}", m.alice_peak_escrow_with_carol))?;
    ensure(rounds == [3, 5, 7], || format!("alice acts at {rounds:?}"))?;
    Ok(format!("extra rounds 3, alice peak escrow {peak}, alice acts at {rounds:?} after carol enters"))
}

fn c7_tpc(j: &mut Journal) -> Outcome {
    let start = Instant::now();
    let base = TpcConfig::new("carol", &["alice", "bob"], &[Vote::Yes, Vote::Yes]);
    let report = explore_tpc(&base, 10, 2).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(report.divergent.is_empty(), || format!("divergent: {:?}", report.divergent[0]))?;
    ensure(report.validity_violations.is_empty(), || format!("invalid: {:?}", report.validity_violations[0]))?;
    ensure(report.runs == 4 * report.schedules, || "not every vote assignment was run".into())?;

    // Validity spelled out directly, independent of the sweep's own check.
    let all_yes = tpc_run(&base).map_err(|e| e.to_string())?;
    ensure(all_yes.nodes.iter().all(|n| n.decision == Some(Decision::Commit)), || "all-yes did not commit".into())?;
    for votes in [[Vote::No, Vote::Yes], [Vote::Yes, Vote::No], [Vote::No, Vote::No]] {
        let cfg = TpcConfig::new("carol", &["alice", "bob"], &votes);
        let out = tpc_run(&cfg).map_err(|e| e.to_string())?;
        ensure(out.nodes.iter().all(|n| n.decision == Some(Decision::Abort)), || format!("{votes:?} did not abort"))?;
    }
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    j.tpc_configs.push(base);
    Ok(format!(
        "{} schedules x 4 vote assignments, 0 divergent, 0 validity violations, {elapsed:.2?}",
        report.schedules
    ))
}

fn tpc_digest(cfg: &TpcConfig) -> Result<String, String> {
    let out = tpc_run(cfg).map_err(|e| e.to_string())?;
    Ok(hex::encode(Sha256::digest(to_jsonl(&out.trace))))
}

fn c8_conservation_determinism(j: &mut Journal) -> Outcome {
    ensure(j.unconserved == 0, || format!("{} runs broke supply conservation", j.unconserved))?;
    let mut replayed = 0;
    for rec in &j.sweeps {
        let setup = rec.protocol.script().default_setup();
        let valuation = Valuation::default();
        let sweep = Sweep {
            protocol: &rec.protocol,
            setup: &setup,
            seed: DEFAULT_SEED,
            max_rounds: DEFAULT_MAX_ROUNDS,
            valuation: &valuation,
        };
        let mut again = Vec::new();
        explore_with(&sweep, &rec.deviating, |v| again.push(v.trace_digest.clone())).map_err(|e| e.to_string())?;
        ensure(again == rec.digests, || format!("{} {:?} traces differ on replay", rec.protocol.name(), rec.deviating))?;
        replayed += again.len();
    }
    for (protocol, strategies, digest) in &j.single_runs {
        let v = run_once(protocol, strategies)?;
        ensure(v.trace_digest == *digest, || format!("{} {strategies:?} trace differs", protocol.name()))?;
        replayed += 1;
    }
    // Every 2PC run of criterion 7, twice each.
    let mut tpc_runs = 0;
    for base in &j.tpc_configs {
        let nodes = base.nodes();
        for faults in fault_schedules(&nodes, 10, 2) {
            for votes in [[Vote::Yes, Vote::Yes], [Vote::Yes, Vote::No], [Vote::No, Vote::Yes], [Vote::No, Vote::No]] {
                let mut cfg = TpcConfig::new(base.coordinator.as_str(), &["alice", "bob"], &votes);
                cfg.faults = faults.clone();
                ensure(tpc_digest(&cfg)? == tpc_digest(&cfg)?, || format!("2PC trace differs under {faults:?}"))?;
                tpc_runs += 1;
            }
        }
    }
    Ok(format!("{} swap runs conserve supply; {replayed} swap and {tpc_runs} 2PC traces replay bit-identically", j.runs))
}

fn main() {
    let mut journal = Journal::default();
    let criteria: [(&str, Criterion); 8] = [
        ("1 htlc safety", Box::new(c1_htlc_safety)),
        ("2 bob asleep", Box::new(c2_bob_asleep)),
        ("3 timeout criticality", Box::new(c3_timeout_criticality)),
        ("4 premium compensation", Box::new(c4_premium_compensation)),
        ("5 premium default", Box::new(|_| c5_premium_default())),
        ("6 transfer deficiencies", Box::new(c6_transfer)),
        ("7 2pc agreement and validity", Box::new(c7_tpc)),
        ("8 conservation and determinism", Box::new(c8_conservation_determinism)),
    ];
    let mut failed = Vec::new();
    for (name, check) in &criteria {
        match check(&mut journal) {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                println!("FAIL criterion {name}: {why}");
                failed.push(*name);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
