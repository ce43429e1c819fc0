//! Shared domain types: the round clock, party and chain identifiers, coin
//! amounts, and the hashlock gadget.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A point on the simulation clock. One round is one synchrony bound Δ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Round(pub u32);

impl Round {
    pub const ZERO: Round = Round(0);

    pub fn next(self) -> Round {
        Round(self.0 + 1)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl Add<u32> for Round {
    type Output = Round;

    fn add(self, rhs: u32) -> Round {
        Round(self.0 + rhs)
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                Self(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

name_type!(
    /// A protocol participant, e.g. `alice`.
    PartyId
);
name_type!(
    /// A blockchain, e.g. `florin`.
    ChainId
);
name_type!(
    /// Contract identifier, unique per chain.
    ContractId
);

/// A non-negative count of indivisible coin units on one chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Amount(pub u64);

impl Amount {
    pub const ZERO: Amount = Amount(0);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn checked_add(self, rhs: Amount) -> Result<Amount> {
        self.0.checked_add(rhs.0).map(Amount).ok_or(Error::Overflow)
    }

    pub fn checked_sub(self, rhs: Amount) -> Result<Amount> {
        self.0.checked_sub(rhs.0).map(Amount).ok_or(Error::Underflow)
    }

    pub fn signed(self) -> i64 {
        i64::try_from(self.0).unwrap_or(i64::MAX)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! digest_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub [u8; 32]);

        impl $name {
            pub fn as_bytes(&self) -> &[u8; 32] {
                &self.0
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }

            pub fn from_hex(s: &str) -> std::result::Result<Self, hex::FromHexError> {
                let mut out = [0u8; 32];
                hex::decode_to_slice(s, &mut out)?;
                Ok(Self(out))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({}…)", stringify!($name), &self.to_hex()[..8])
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                Self::from_hex(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

digest_type!(
    /// A hashkey: the preimage whose publication triggers hashlocked transfers.
    Secret
);
digest_type!(
    /// SHA-256 digest of a [`Secret`].
    Hashlock
);

fn sha256(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

/// Derives a secret deterministically from a seed.
pub fn make_secret(seed: &[u8]) -> Result<Secret> {
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    Ok(Secret(sha256(seed)))
}

pub fn hashlock(secret: &Secret) -> Hashlock {
    Hashlock(sha256(&secret.0))
}

pub fn verify(lock: &Hashlock, secret: &Secret) -> bool {
    hashlock(secret) == *lock
}

impl Secret {
    pub fn lock(&self) -> Hashlock {
        hashlock(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_secret_is_deterministic() {
        let a = make_secret(b"alice-run1").unwrap();
        let b = make_secret(b"alice-run1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.as_bytes().len(), 32);
    }

    #[test]
    fn distinct_seeds_give_distinct_secrets() {
        assert_ne!(make_secret(b"a").unwrap(), make_secret(b"b").unwrap());
    }

    #[test]
    fn empty_seed_rejected() {
        assert!(matches!(make_secret(b""), Err(Error::EmptySeed)));
    }

    #[test]
    fn sha256_known_vector() {
        // SHA-256("abc")
        let s = make_secret(b"abc").unwrap();
        assert_eq!(
            s.to_hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn verify_rejects_wrong_secret_and_zero_digest() {
        let s = make_secret(b"x").unwrap();
        let other = make_secret(b"y").unwrap();
        assert!(verify(&hashlock(&s), &s));
        assert!(!verify(&hashlock(&s), &other));
        let zero = Hashlock([0u8; 32]);
        for seed in [b"x".as_slice(), b"y", b"alice", b"bob"] {
            assert!(!verify(&zero, &make_secret(seed).unwrap()));
        }
    }

    #[test]
    fn hex_serialization_is_lowercase() {
        let s = make_secret(b"x").unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, format!("\"{}\"", s.to_hex()));
        assert_eq!(json, json.to_lowercase());
        let back: Secret = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn amount_arithmetic_is_checked() {
        assert!(Amount(u64::MAX).checked_add(Amount(1)).is_err());
        assert!(Amount(1).checked_sub(Amount(2)).is_err());
        assert_eq!(Amount(3).checked_sub(Amount(2)).unwrap(), Amount(1));
    }

    proptest! {
        #[test]
        fn secret_round_trips_through_its_lock(seed in proptest::collection::vec(any::<u8>(), 1..64)) {
            let s = make_secret(&seed).unwrap();
            prop_assert!(verify(&hashlock(&s), &s));
            prop_assert_eq!(hashlock(&s), hashlock(&make_secret(&seed).unwrap()));
        }
    }
}
