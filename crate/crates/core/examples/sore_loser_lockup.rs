//! Bob escrows and then walks away. Alice still ends up whole, but her coins
//! sat in escrow until the timeout; the sweep over Bob's whole catalog shows
//! the worst case.

use xswap::adversary::{Edit, Strategy};
use xswap::explorer::{evaluate, explore, Sweep, Valuation};
use xswap::protocols::{HtlcParams, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

fn main() -> xswap::Result<()> {
    let protocol = SwapProtocol::Htlc(HtlcParams::default());
    let setup = protocol.script().default_setup();
    let valuation = Valuation::default();

    let bob = Strategy::new("bob", vec![Edit::SilentFrom { round: xswap::Round(2) }]);
    let (v, _) = evaluate(&protocol, &setup, std::slice::from_ref(&bob), DEFAULT_SEED, DEFAULT_MAX_ROUNDS, &valuation)?;
    println!("{bob}");
    for (party, payoff) in &v.payoffs {
        println!("  {party}: {}, coins locked {} rounds", serde_json::to_string(payoff)?, v.lockup[party]);
    }

    let sweep = Sweep { protocol: &protocol, setup: &setup, seed: DEFAULT_SEED, max_rounds: DEFAULT_MAX_ROUNDS, valuation: &valuation };
    let report = explore(&sweep, &["bob".into()])?;
    let alice = &report.lockup[&"alice".into()];
    println!(
        "over {} strategies for bob: alice never loses ({} LOSS), worst lock-up {} rounds",
        report.catalog_size, report.classifications.loss, alice.max_rounds
    );
    Ok(())
}
