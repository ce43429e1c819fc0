//! Alice sells her side of a pending swap to Carol by adding Carol's
//! hashlock to both escrows. Shows what the transfer costs, and the run in
//! which Carol withholds her secret from Bob's escrow.

use xswap::adversary::{Edit, Strategy};
use xswap::explorer::{evaluate, transfer_metrics, Valuation};
use xswap::protocols::{SwapProtocol, TransferParams, DEFAULT_MAX_ROUNDS, DEFAULT_SEED};

fn main() -> xswap::Result<()> {
    let params = TransferParams::default();
    let protocol = SwapProtocol::Transfer(params.clone());
    let setup = protocol.script().default_setup();

    let m = transfer_metrics(&params, &setup, DEFAULT_SEED, DEFAULT_MAX_ROUNDS)?;
    println!("{}", serde_json::to_string_pretty(&m)?);

    let carol = Strategy::new("carol", vec![Edit::Omit { step: "reveal-BA".into() }]);
    let (v, _) = evaluate(&protocol, &setup, std::slice::from_ref(&carol), DEFAULT_SEED, DEFAULT_MAX_ROUNDS, &Valuation::default())?;
    println!("{carol}:");
    for (party, c) in &v.classifications {
        println!("  {party}: {c}");
    }
    Ok(())
}
