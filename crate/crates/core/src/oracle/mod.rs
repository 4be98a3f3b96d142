//! Language-model oracle contract.
//!
//! Every prompt the pipeline or baseline issues goes through [`Oracle::complete`].
//! Three implementations ship with the crate:
//!
//! - [`ScriptedOracle`]: rule table over the user text, for deterministic runs
//! - [`RecordingOracle`]: wraps any oracle and keeps an ordered transcript
//! - [`RemoteOracle`]: chat-completion HTTP client with transport retries

use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};

mod recorder;
mod remote;
mod scripted;

pub use recorder::{RecordingOracle, TranscriptEntry};
pub use remote::{OracleConfig, RemoteOracle, ENV_API_KEY, ENV_ENDPOINT};
pub use scripted::{RuleMatcher, ScriptRule, ScriptedOracle};

pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRequest {
    pub system_text: String,
    pub user_text: String,
    pub max_output_tokens: u32,
    pub temperature: f64,
}

impl OracleRequest {
    /// Request with temperature 0 and the default output budget.
    pub fn new(system_text: impl Into<String>, user_text: impl Into<String>) -> Self {
        Self {
            system_text: system_text.into(),
            user_text: user_text.into(),
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            temperature: 0.0,
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_max_output_tokens(mut self, max_output_tokens: u32) -> Self {
        self.max_output_tokens = max_output_tokens;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.user_text.trim().is_empty() {
            return Err(Error::InvalidRequest("user_text is empty".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(Error::InvalidRequest("max_output_tokens must be positive".into()));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "temperature must be a non-negative number, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResponse {
    pub text: String,
    #[serde(rename = "latency_s", serialize_with = "serialize_secs")]
    pub latency: Duration,
    pub token_counts: Option<(u64, u64)>,
}

impl OracleResponse {
    pub fn new(text: impl Into<String>, latency: Duration) -> Self {
        Self {
            text: text.into(),
            latency,
            token_counts: None,
        }
    }
}

fn serialize_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Anything that turns a prompt into text.
///
/// Implementations must tolerate overlapping calls from several threads.
pub trait Oracle: Send + Sync {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse>;
}

impl<T: Oracle + ?Sized> Oracle for &T {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse> {
        (**self).complete(request)
    }
}

impl<T: Oracle + ?Sized> Oracle for Box<T> {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse> {
        (**self).complete(request)
    }
}

impl<T: Oracle + ?Sized> Oracle for Arc<T> {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse> {
        (**self).complete(request)
    }
}
