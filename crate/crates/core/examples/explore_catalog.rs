//! The deviation catalog and a full coalition sweep. Lists a few of Bob's
//! strategies, then sweeps every coalition in the HTLC and the premium swap.

use xswap::adversary::enumerate;
use xswap::explorer::{explore, nonempty_subsets, Sweep, Valuation};
use xswap::protocols::{HtlcParams, PremiumParams, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

fn main() -> xswap::Result<()> {
    let htlc = SwapProtocol::Htlc(HtlcParams::default());
    let catalog = enumerate(&htlc, &"bob".into())?;
    println!("bob has {} HTLC strategies, e.g.:", catalog.len());
    for s in catalog.iter().step_by(catalog.len() / 6) {
        println!("  {s}");
    }

    for protocol in [htlc, SwapProtocol::Premium(PremiumParams::default())] {
        let setup = protocol.script().default_setup();
        let valuation = Valuation::default();
        let sweep =
            Sweep { protocol: &protocol, setup: &setup, seed: DEFAULT_SEED, max_rounds: DEFAULT_MAX_ROUNDS, valuation: &valuation };
        for coalition in nonempty_subsets(&protocol.script().parties()) {
            let r = explore(&sweep, &coalition)?;
            let names: Vec<&str> = coalition.iter().map(|p| p.as_str()).collect();
            println!("{} [{}]: {}", protocol.name(), names.join(","), serde_json::to_string(&r.classifications)?);
        }
    }
    Ok(())
}
