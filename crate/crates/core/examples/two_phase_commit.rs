//! Two-phase commit: unanimous yes commits, any no aborts, and a coordinator
//! that crashes after asking for votes leaves yes-voters blocked until it
//! recovers.

use xswap::tpc::{tpc_blocking_probe, tpc_run, FaultSchedule, TpcConfig, Vote};

fn main() -> xswap::Result<()> {
    for votes in [[Vote::Yes, Vote::Yes], [Vote::Yes, Vote::No]] {
        let out = tpc_run(&TpcConfig::new("carol", &["alice", "bob"], &votes))?;
        let d: Vec<String> = out.nodes.iter().map(|n| format!("{}={}", n.node, n.decision.map_or("-".into(), |x| x.to_string()))).collect();
        println!("votes {votes:?}: {}", d.join(" "));
    }

    for recover in [None, Some(xswap::Round(6))] {
        let r = tpc_blocking_probe(&["alice", "bob"], true, recover)?;
        println!(
            "coordinator crash after prepare, recovery {recover:?}: alice blocked {} rounds, resolved {:?}",
            r.outcome.blocked_rounds_of("alice").len(),
            r.resolved_at
        );
    }

    let crash = FaultSchedule::none().crash("alice", 1).recover("alice", 4);
    let out = tpc_run(&TpcConfig::new("carol", &["alice", "bob"], &[Vote::Yes, Vote::Yes]).with_faults(crash))?;
    println!("participant crash 1..4: agreement {}, decisions {:?}", out.agreement, out.decisions());
    Ok(())
}
