use thiserror::Error;

use crate::entity::EntityId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unrecognized entity token `{0}`")]
    BadEntityToken(String),

    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("entity `{0}` is not declared in the network")]
    UnknownEntity(EntityId),

    #[error("IDR for `{0}` depends on itself")]
    SelfDependency(EntityId),

    #[error("duplicate IDR for target `{0}`")]
    DuplicateIdr(EntityId),

    #[error("edge references undeclared entity `{0}`")]
    DanglingEdge(EntityId),

    #[error("malformed edge: {0}")]
    MalformedEdge(String),

    #[error("no state recorded for entity `{0}`")]
    MissingState(EntityId),

    #[error("state value {0} is not one of 0, 1, 2")]
    BadStateValue(u8),

    #[error("IIM evaluation requires binary states, but `{0}` is at 1")]
    IimNonBinary(EntityId),

    #[error("cannot fail hardened entity `{0}`")]
    HardenedFailure(EntityId),

    #[error("k = {k} exceeds the {eligible} eligible entities")]
    KExceedsEligible { k: usize, eligible: usize },

    #[error("the power subgraph has no eligible vertices")]
    EmptyPowerGraph,

    #[error("entity `{0}` is not operational")]
    NotOperational(EntityId),

    #[error("event at t={0}ms references unknown entity `{1}`")]
    UnknownEventEntity(u64, EntityId),

    #[error("invalid scenario: {0}")]
    BadScenario(String),

    #[error("payoff table violates dominance for target `{0}`")]
    PayoffDominance(String),

    #[error("malformed document: {0}")]
    BadDocument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
