//! Why the first escrow must time out later than the second. With Bob's
//! timeout raised to Alice's, a late claim by Alice leaves Bob no time to
//! forward the secret.

use xswap::explorer::{explore, Sweep, Valuation};
use xswap::protocols::{HtlcParams, HtlcTimeouts, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

fn main() -> xswap::Result<()> {
    for bob in [1, 2] {
        let timeouts = HtlcTimeouts { alice: 2, bob };
        let protocol = SwapProtocol::Htlc(HtlcParams { timeouts, ..Default::default() });
        let setup = protocol.script().default_setup();
        let valuation = Valuation::default();
        let sweep =
            Sweep { protocol: &protocol, setup: &setup, seed: DEFAULT_SEED, max_rounds: DEFAULT_MAX_ROUNDS, valuation: &valuation };
        let report = explore(&sweep, &["alice".into()])?;
        println!("timeouts alice {}, bob {}: {} LOSS over {} strategies", timeouts.alice, bob, report.classifications.loss, report.catalog_size);
        for ce in &report.counterexamples {
            let s: Vec<String> = ce.strategies.iter().map(ToString::to_string).collect();
            println!("  {} => bob {}", s.join("; "), ce.classifications[&"bob".into()]);
        }
    }
    Ok(())
}
