//! Random completions, crossings and pivotal items.

pub mod crossing;
pub mod pivotal;
pub mod sampling;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use crossing::{has_crossing, CrossingResult};
pub use pivotal::{pivotal_sites, pivotal_sites_oracle, PivotalFinder};
pub use sampling::{
    crossing_probability_mc, estimate_pivotal, sample_completion, shortest_crossing_mc, Completer, PivotSearch,
    PivotalEstimate,
};

/// A full assignment of every item to a player; `true` is player I.
/// Serializes as an array of `+1` / `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub colors: Vec<bool>,
}

impl Configuration {
    pub fn new(colors: Vec<bool>) -> Self {
        Self { colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.colors.iter().map(|&b| if b { 1 } else { -1 }).collect()
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.signs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let signs = Vec::<i8>::deserialize(d)?;
        signs
            .into_iter()
            .map(|v| match v {
                1 => Ok(true),
                -1 => Ok(false),
                other => Err(D::Error::custom(format!("configuration entries must be +1 or -1, got {other}"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Configuration::new)
    }
}
