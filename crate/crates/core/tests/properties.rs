//! Invariants under random inputs: hashing, clause monotonicity, supply
//! conservation and determinism of arbitrary strategy profiles.

use proptest::prelude::*;
use xswap::adversary::{enumerate, Strategy as Plan};
use xswap::contracts::{Clause, EscrowContract};
use xswap::explorer::{evaluate, Valuation};
use xswap::protocols::{HtlcParams, PremiumParams, SwapProtocol, TransferParams, DEFAULT_MAX_ROUNDS};
use xswap::{hashlock, make_secret, verify, Amount, PartyId, Round, Secret};

// Computed independently with Python's hashlib.
const ALICE_SECRET: &str = "3f601bffc285f4998c2b1c0ed169bffbe877676ca05c45035252a3e4cebe3865";
const ALICE_LOCK: &str = "4dbd7b75546118e1635540e0f7a21b4769cd8f19edea048f93ec3ac76b9ddee8";

#[test]
fn known_hash_vectors() {
    let s = make_secret(b"xswap:alice").unwrap();
    assert_eq!(s.to_hex(), ALICE_SECRET);
    assert_eq!(hashlock(&s).to_hex(), ALICE_LOCK);
}

fn protocols() -> Vec<SwapProtocol> {
    vec![
        SwapProtocol::Htlc(HtlcParams::default()),
        SwapProtocol::Premium(PremiumParams {
            alice_principal: Amount(150),
            bob_principal: Amount(400),
            ..Default::default()
        }),
        SwapProtocol::Transfer(TransferParams::default()),
    ]
}

/// A random profile: for each party, either compliant or one catalog entry.
fn profile(protocol: &SwapProtocol, picks: &[(bool, usize)]) -> Vec<Plan> {
    protocol
        .script()
        .parties()
        .iter()
        .zip(picks)
        .filter(|(_, (deviate, _))| *deviate)
        .map(|(p, (_, i))| {
            let cat = enumerate(protocol, p).unwrap();
            cat[i % cat.len()].clone()
        })
        .collect()
}

proptest! {
    #[test]
    fn secrets_open_only_their_own_lock(a in proptest::collection::vec(any::<u8>(), 1..64),
                                        b in proptest::collection::vec(any::<u8>(), 1..64)) {
        let sa = make_secret(&a).unwrap();
        let sb = make_secret(&b).unwrap();
        prop_assert!(verify(&hashlock(&sa), &sa));
        prop_assert_eq!(verify(&hashlock(&sa), &sb), a == b);
        prop_assert_eq!(Secret::from_hex(&sa.to_hex()).unwrap(), sa);
    }

    #[test]
    fn added_clauses_never_shorten_custody(base in 1u32..20, adds in proptest::collection::vec(0u32..30, 0..6)) {
        let s = make_secret(b"p").unwrap();
        let mut e = EscrowContract::new(
            "x".into(), "c".into(), "alice".into(), "bob".into(), Amount(5),
            vec![Clause::new("alice", s.lock(), Round(base))], Round(0),
        ).unwrap();
        for d in adds {
            let before = (e.clauses.clone(), e.refund_deadline);
            let ok = e.add_clause(&"alice".into(), Clause::new("carol", s.lock(), Round(d))).is_ok();
            prop_assert_eq!(ok, Round(d) >= before.1);
            prop_assert!(e.refund_deadline >= before.1);
            prop_assert_eq!(&e.clauses[..before.0.len()], &before.0[..]);
            // Only the depositor may add.
            prop_assert!(e.add_clause(&"bob".into(), Clause::new("bob", s.lock(), Round(99))).is_err());
        }
    }

    #[test]
    fn random_profiles_conserve_and_replay(
        which in 0usize..3,
        picks in proptest::collection::vec((any::<bool>(), any::<usize>()), 3),
        seed in "[a-z]{1,8}",
    ) {
        let protocol = &protocols()[which];
        let strategies = profile(protocol, &picks);
        let setup = protocol.script().default_setup();
        let val = Valuation::default();
        let (v1, r1) = evaluate(protocol, &setup, &strategies, &seed, DEFAULT_MAX_ROUNDS, &val).unwrap();
        let (v2, _) = evaluate(protocol, &setup, &strategies, &seed, DEFAULT_MAX_ROUNDS, &val).unwrap();
        prop_assert!(v1.conserved);
        prop_assert!(v1.clairvoyance_free);
        prop_assert_eq!(&v1, &v2);
        prop_assert!(r1.world.all_contracts_terminal());
        // Payoffs are zero-sum on every chain.
        for chain in r1.world.chain_ids() {
            let total: i64 = v1.payoffs.values().map(|h| h.get(chain).copied().unwrap_or(0)).sum();
            prop_assert_eq!(total, 0, "chain {}", chain);
        }
        // Someone who follows the script never ends with a LOSS unless the
        // profile includes the known transfer withholding by Carol.
        let carol_deviates = strategies.iter().any(|s| s.party == PartyId::from("carol"));
        if !(matches!(protocol, SwapProtocol::Transfer(_)) && carol_deviates) {
            prop_assert!(!v1.has_loss(), "{:?}", v1);
        }
    }
}
