//! Operational state algebra: every entity is at 0 (failed), 1 (reduced),
//! or 2 (full operation). No other values are representable.

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum OperationalState {
    Failed = 0,
    Reduced = 1,
    Full = 2,
}

impl OperationalState {
    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn from_value(v: u8) -> Result<Self, Error> {
        match v {
            0 => Ok(OperationalState::Failed),
            1 => Ok(OperationalState::Reduced),
            2 => Ok(OperationalState::Full),
            other => Err(Error::BadStateValue(other)),
        }
    }

    pub fn is_operational(self) -> bool {
        self != OperationalState::Failed
    }
}

impl Serialize for OperationalState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.value())
    }
}

impl<'de> Deserialize<'de> for OperationalState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = u8::deserialize(deserializer)?;
        OperationalState::from_value(v).map_err(serde::de::Error::custom)
    }
}

/// Which dependency algebra evaluates the IDRs.
///
/// MIIM is the three-valued model with min-AND, max-OR, and new-XOR.
/// IIM is the binary predecessor: plain AND/OR over {0, 2}, where both
/// min-AND and new-XOR degrade to minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalModel {
    Miim,
    Iim,
}

impl std::fmt::Display for EvalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalModel::Miim => write!(f, "miim"),
            EvalModel::Iim => write!(f, "iim"),
        }
    }
}
