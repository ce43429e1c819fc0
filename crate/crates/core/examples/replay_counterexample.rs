//! Finds a LOSS with the explorer, writes it out as a scenario file and
//! replays that file from disk.

use xswap::explorer::{evaluate, explore, Sweep};
use xswap::scenario::{Resolved, Scenario};

fn main() -> xswap::Result<()> {
    let scenario = Scenario::from_json(r#"{"version": 1, "protocol": "htlc", "params": {"timeouts": {"alice": 2, "bob": 2}}}"#)?;
    let Resolved::Swap(run) = scenario.resolve()? else { unreachable!("htlc is a swap") };
    let sweep = Sweep {
        protocol: &run.protocol,
        setup: &run.setup,
        seed: &run.seed,
        max_rounds: run.max_rounds,
        valuation: &run.valuation,
    };
    let report = explore(&sweep, &["alice".into()])?;
    let ce = report.counterexamples.first().expect("misconfigured timeouts admit a loss");

    let path = std::env::temp_dir().join("xswap-counterexample.json");
    std::fs::write(&path, scenario.with_strategies(ce.strategies.clone()).to_json_pretty())?;
    println!("wrote {}", path.display());

    let Resolved::Swap(replay) = Scenario::load(&path)?.resolve()? else { unreachable!() };
    let (v, _) = evaluate(&replay.protocol, &replay.setup, &replay.strategies, &replay.seed, replay.max_rounds, &replay.valuation)?;
    for (party, c) in &v.classifications {
        println!("{party}: {c}");
    }
    assert!(v.has_loss());
    Ok(())
}
