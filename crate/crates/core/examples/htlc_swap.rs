//! A compliant two-party hashed-timelock swap, step by step.
//!
//! Prints every trace event and the final payoffs: Alice trades 100 guilder
//! for Bob's 100 florin in four rounds.

use xswap::explorer::{evaluate, Valuation};
use xswap::protocols::{HtlcParams, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

fn main() -> xswap::Result<()> {
    let protocol = SwapProtocol::Htlc(HtlcParams::default());
    let setup = protocol.script().default_setup();
    let (verdict, run) = evaluate(&protocol, &setup, &[], DEFAULT_SEED, DEFAULT_MAX_ROUNDS, &Valuation::default())?;

    for e in run.world.trace() {
        println!("r{} {:<6} {:<8} {}", e.round, e.actor.as_str(), e.chain.as_str(), serde_json::to_string(&e.action)?);
    }
    for (party, payoff) in &verdict.payoffs {
        println!("{party}: {} -> {}", serde_json::to_string(payoff)?, verdict.classifications[party]);
    }
    Ok(())
}
