//! Scenario files: which protocol to run, from which balances, and with
//! which strategy overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adversary::Strategy;
use crate::error::{Error, Result};
use crate::explorer::Valuation;
use crate::ledger::{ChainSetup, Setup, World};
use crate::primitives::PartyId;
use crate::protocols::{
    HtlcParams, PremiumParams, SwapProtocol, TransferParams, DEFAULT_MAX_ROUNDS, DEFAULT_SEED,
};
use crate::tpc::{FaultSchedule, TpcConfig, Vote, DEFAULT_HORIZON, DEFAULT_VOTE_TIMEOUT};

pub const SCENARIO_VERSION: u32 = 1;

/// On-disk scenario. Omitted fields take the protocol's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub protocol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parties: Option<Vec<PartyId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<Vec<ChainSetup>>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strategies: Vec<Strategy>,
    #[serde(default, skip_serializing_if = "is_default_valuation")]
    pub valuation: Valuation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
}

fn is_default_valuation(v: &Valuation) -> bool {
    v.0.is_empty()
}

/// TPC parameters as written in a scenario; missing votes are `yes`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TpcParams {
    pub coordinator: PartyId,
    pub participants: Vec<PartyId>,
    pub votes: std::collections::BTreeMap<PartyId, Vote>,
    pub faults: FaultSchedule,
    pub horizon: u32,
    pub vote_timeout: u32,
}

impl Default for TpcParams {
    fn default() -> Self {
        TpcParams {
            coordinator: "carol".into(),
            participants: vec!["alice".into(), "bob".into()],
            votes: Default::default(),
            faults: FaultSchedule::none(),
            horizon: DEFAULT_HORIZON,
            vote_timeout: DEFAULT_VOTE_TIMEOUT,
        }
    }
}

impl TpcParams {
    pub fn into_config(self) -> TpcConfig {
        let votes = self
            .participants
            .iter()
            .map(|p| (p.clone(), self.votes.get(p).copied().unwrap_or(Vote::Yes)))
            .collect();
        TpcConfig {
            coordinator: self.coordinator,
            participants: self.participants,
            votes,
            faults: self.faults,
            horizon: self.horizon,
            vote_timeout: self.vote_timeout,
        }
    }
}

/// A swap scenario with every default filled in and references checked.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapRun {
    pub protocol: SwapProtocol,
    pub setup: Setup,
    pub strategies: Vec<Strategy>,
    pub valuation: Valuation,
    pub seed: String,
    pub max_rounds: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Resolved {
    Swap(Box<SwapRun>),
    Tpc(TpcConfig),
}

fn params<T: serde::de::DeserializeOwned + Default>(v: &serde_json::Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidScenario(format!("params: {e}")))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// The same scenario with different strategy overrides.
    pub fn with_strategies(&self, strategies: Vec<Strategy>) -> Scenario {
        Scenario { strategies, ..self.clone() }
    }

    pub fn resolve(&self) -> Result<Resolved> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::InvalidScenario(format!(
                "unsupported version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        let protocol = match self.protocol.as_str() {
            "tpc" => {
                if !self.strategies.is_empty() || self.chains.is_some() {
                    return Err(Error::InvalidScenario("tpc scenarios take no chains or strategies".into()));
                }
                return Ok(Resolved::Tpc(params::<TpcParams>(&self.params)?.into_config()));
            }
            "htlc" => SwapProtocol::Htlc(params::<HtlcParams>(&self.params)?),
            "premium" => SwapProtocol::Premium(params::<PremiumParams>(&self.params)?),
            "transfer" => SwapProtocol::Transfer(params::<TransferParams>(&self.params)?),
            other => return Err(Error::UnknownProtocol(other.into())),
        };
        let script = protocol.script();
        script.validate()?;
        let mut setup = script.default_setup();
        if let Some(parties) = &self.parties {
            setup.parties = parties.clone();
        }
        if let Some(chains) = &self.chains {
            setup.chains = chains.clone();
        }
        // Duplicate names, unknown balance holders, empty chain list.
        World::new(&setup)?;
        for p in script.parties() {
            if !setup.parties.contains(&p) {
                return Err(Error::InvalidScenario(format!("protocol party `{p}` missing from parties")));
            }
        }
        for (chain, _) in script.contracts() {
            if !setup.chains.iter().any(|c| c.name == chain) {
                return Err(Error::UnknownChain(chain));
            }
        }
        for s in &self.strategies {
            crate::adversary::check_strategy(&protocol, s)?;
        }
        let seed = self.seed.clone().unwrap_or_else(|| DEFAULT_SEED.into());
        if seed.is_empty() {
            return Err(Error::EmptySeed);
        }
        Ok(Resolved::Swap(Box::new(SwapRun {
            protocol,
            setup,
            strategies: self.strategies.clone(),
            valuation: self.valuation.clone(),
            seed,
            max_rounds: self.max_rounds.unwrap_or(DEFAULT_MAX_ROUNDS),
        })))
    }
}
