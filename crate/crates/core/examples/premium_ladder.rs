//! Bootstrapped premiums: Bob's 1-coin premium protects Alice's 100-coin
//! principal, and Alice's 100-coin premium protects Bob's 1000. Loads the
//! bundled scenario and shows that each victim is paid exactly the premium
//! that protected it.

use std::path::Path;

use xswap::explorer::{explore_with, Classification, Sweep};
use xswap::scenario::{Resolved, Scenario};

fn main() -> xswap::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/premium_ladder.json");
    let Resolved::Swap(run) = Scenario::load(path)?.resolve()? else { unreachable!("premium is a swap") };
    let sweep = Sweep {
        protocol: &run.protocol,
        setup: &run.setup,
        seed: &run.seed,
        max_rounds: run.max_rounds,
        valuation: &run.valuation,
    };
    for (deviator, victim) in [("alice", "bob"), ("bob", "alice")] {
        let mut paid = std::collections::BTreeSet::new();
        let report = explore_with(&sweep, &[deviator.into()], |v| {
            if let Some(Classification::CompensatedAsVictim { amount }) = v.classifications.get(&victim.into()) {
                paid.insert(*amount);
            }
        })?;
        println!(
            "{deviator} deviating over {} strategies: {} LOSS, {victim} compensated with {paid:?}",
            report.catalog_size, report.classifications.loss
        );
    }
    Ok(())
}
