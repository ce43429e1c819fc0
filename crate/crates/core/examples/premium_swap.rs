//! Swaps with premiums: whoever walks away mid-protocol pays the other for
//! the lost option. Prints the victim's compensation for every single-step
//! omission, with unequal principals.

use xswap::adversary::{Edit, Strategy};
use xswap::explorer::{evaluate, Valuation};
use xswap::protocols::{PremiumParams, SwapProtocol, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};
use xswap::Amount;

fn main() -> xswap::Result<()> {
    let params = PremiumParams { alice_principal: Amount(100), bob_principal: Amount(200), ..Default::default() };
    println!("p_a = {} (2% of Bob's principal), p_b = {} (2% of Alice's)", params.p_a(), params.p_b());
    let protocol = SwapProtocol::Premium(params);
    let setup = protocol.script().default_setup();

    for (party, step) in [("alice", "step1"), ("bob", "step2"), ("alice", "step3"), ("bob", "step4"), ("alice", "step5"), ("bob", "step6")] {
        let s = Strategy::new(party, vec![Edit::Omit { step: step.into() }]);
        let (v, _) = evaluate(&protocol, &setup, std::slice::from_ref(&s), DEFAULT_SEED, DEFAULT_MAX_ROUNDS, &Valuation::default())?;
        let verdicts: Vec<String> = v.classifications.iter().map(|(p, c)| format!("{p} {c}")).collect();
        println!("{s:<20} {} (deviator gain {:+})", verdicts.join(", "), v.deviator_gain[&party.into()]);
    }
    Ok(())
}
