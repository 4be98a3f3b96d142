use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed triple: {0}")]
    MalformedTriple(String),

    #[error("malformed edit: {0}")]
    MalformedEdit(String),

    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("oracle timed out after {attempts} attempt(s)")]
    OracleTimeout { attempts: u32 },

    #[error("oracle returned a malformed body: {0}")]
    OracleProtocol(String),

    #[error("oracle configuration: {0}")]
    OracleConfig(String),

    #[error("no scripted rule matches the request")]
    ScriptMiss,

    #[error("invalid oracle request: {0}")]
    InvalidRequest(String),

    #[error("malformed reasoning chain: {0}")]
    MalformedChain(String),

    #[error("malformed reasoning skeleton: {0}")]
    MalformedSkeleton(String),

    #[error("malformed prompt template {name}: {reason}")]
    MalformedTemplate { name: String, reason: String },

    #[error("unparseable selection: empty reply")]
    UnparseableSelection,

    #[error("entity not found: {0}")]
    EntityNotFound(String),

    #[error("dead end: entity {0} has no outgoing relations")]
    DeadEnd(String),

    #[error("ambiguous fan-out at ({subject}, {relation}): {count} objects")]
    AmbiguousFanout {
        subject: String,
        relation: String,
        count: usize,
    },

    #[error("skeleton has {hops} hops, limit is {limit}")]
    HopLimitExceeded { hops: usize, limit: usize },

    #[error("dataset unreadable: {path}: {reason}")]
    DatasetUnreadable { path: PathBuf, reason: String },

    #[error("schema mismatch at {field}: {reason}")]
    SchemaMismatch { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
