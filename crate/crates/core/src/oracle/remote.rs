use std::fmt;
use std::time::{Duration, Instant};

use serde::Deserialize;
use serde_json::json;

use super::{Oracle, OracleRequest, OracleResponse};
use crate::error::{Error, Result};

pub const ENV_API_KEY: &str = "ORACLE_API_KEY";
pub const ENV_ENDPOINT: &str = "ORACLE_ENDPOINT";

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Full chat-completions URL, e.g. `https://host/v1/chat/completions`.
    pub endpoint_url: String,
    pub model_name: String,
    pub timeout: Duration,
    pub max_retries: u32,
    pub temperature_default: f64,
    /// First retry delay; doubles on every further retry.
    pub backoff_base: Duration,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            endpoint_url: String::new(),
            model_name: String::new(),
            timeout: Duration::from_secs(60),
            max_retries: 3,
            temperature_default: 0.0,
            backoff_base: Duration::from_secs(1),
        }
    }
}

impl OracleConfig {
    pub fn new(endpoint_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        Self {
            endpoint_url: endpoint_url.into(),
            model_name: model_name.into(),
            ..Self::default()
        }
    }

    /// Takes the endpoint from `ORACLE_ENDPOINT` when `endpoint` is `None`.
    pub fn from_env(endpoint: Option<String>, model_name: impl Into<String>) -> Result<Self> {
        let endpoint = endpoint
            .or_else(|| std::env::var(ENV_ENDPOINT).ok())
            .filter(|e| !e.trim().is_empty())
            .ok_or_else(|| {
                Error::OracleConfig(format!("no endpoint given and {ENV_ENDPOINT} is unset"))
            })?;
        Ok(Self::new(endpoint, model_name))
    }

    /// Request carrying this configuration's default temperature.
    pub fn request(&self, system_text: &str, user_text: &str) -> OracleRequest {
        OracleRequest::new(system_text, user_text).with_temperature(self.temperature_default)
    }

    pub fn validate(&self) -> Result<()> {
        if self.timeout.is_zero() {
            return Err(Error::OracleConfig("timeout must be positive".into()));
        }
        if self.endpoint_url.trim().is_empty() {
            return Err(Error::OracleConfig("endpoint_url is empty".into()));
        }
        if self.model_name.trim().is_empty() {
            return Err(Error::OracleConfig("model_name is empty".into()));
        }
        Ok(())
    }
}

/// Chat-completion client.
///
/// Transport failures (connect errors, timeouts, HTTP 429 and 5xx) are
/// retried up to `max_retries` times with exponential backoff. Any other
/// response is final: a 200 whose content is useless downstream is still
/// returned as-is.
pub struct RemoteOracle {
    config: OracleConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl fmt::Debug for RemoteOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RemoteOracle")
            .field("config", &self.config)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

enum Failure {
    Transport(String),
    Timeout,
    Fatal(Error),
}

#[derive(Deserialize)]
struct CompletionBody {
    choices: Vec<Choice>,
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

impl RemoteOracle {
    pub fn new(config: OracleConfig, api_key: Option<String>) -> Result<Self> {
        config.validate()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self {
            config,
            api_key,
            agent,
        })
    }

    /// Reads the API key from `ORACLE_API_KEY` (optional for local servers).
    pub fn from_env(config: OracleConfig) -> Result<Self> {
        let key = std::env::var(ENV_API_KEY).ok().filter(|k| !k.is_empty());
        Self::new(config, key)
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    fn body(&self, request: &OracleRequest) -> serde_json::Value {
        let mut messages = Vec::with_capacity(2);
        if !request.system_text.is_empty() {
            messages.push(json!({"role": "system", "content": request.system_text}));
        }
        messages.push(json!({"role": "user", "content": request.user_text}));
        json!({
            "model": self.config.model_name,
            "messages": messages,
            "max_tokens": request.max_output_tokens,
            "temperature": request.temperature,
        })
    }

    fn attempt(&self, body: &serde_json::Value) -> std::result::Result<OracleResponse, Failure> {
        let mut req = self
            .agent
            .post(&self.config.endpoint_url)
            .header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(classify)?;
        let status = resp.status().as_u16();
        if status == 429 || (500..600).contains(&status) {
            return Err(Failure::Transport(format!("HTTP {status}")));
        }
        let text = resp.body_mut().read_to_string().map_err(classify)?;
        if !(200..300).contains(&status) {
            let snippet: String = text.chars().take(200).collect();
            return Err(Failure::Fatal(Error::OracleUnavailable(format!(
                "HTTP {status}: {snippet}"
            ))));
        }
        let parsed: CompletionBody = serde_json::from_str(&text)
            .map_err(|e| Failure::Fatal(Error::OracleProtocol(e.to_string())))?;
        let choice = parsed.choices.into_iter().next().ok_or_else(|| {
            Failure::Fatal(Error::OracleProtocol("response has no choices".into()))
        })?;
        Ok(OracleResponse {
            text: choice.message.content.unwrap_or_default(),
            latency: Duration::ZERO,
            token_counts: parsed.usage.map(|u| (u.prompt_tokens, u.completion_tokens)),
        })
    }
}

fn classify(err: ureq::Error) -> Failure {
    match err {
        ureq::Error::Timeout(_) => Failure::Timeout,
        ureq::Error::Io(e) if e.kind() == std::io::ErrorKind::TimedOut => Failure::Timeout,
        ureq::Error::Io(_)
        | ureq::Error::ConnectionFailed
        | ureq::Error::HostNotFound
        | ureq::Error::Protocol(_) => Failure::Transport(err.to_string()),
        other => Failure::Fatal(Error::OracleUnavailable(other.to_string())),
    }
}

impl Oracle for RemoteOracle {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse> {
        request.validate()?;
        let body = self.body(request);
        let started = Instant::now();
        let mut retries = 0;
        loop {
            let failure = match self.attempt(&body) {
                Ok(mut resp) => {
                    resp.latency = started.elapsed();
                    return Ok(resp);
                }
                Err(Failure::Fatal(e)) => return Err(e),
                Err(f) => f,
            };
            if retries >= self.config.max_retries {
                return Err(match failure {
                    Failure::Timeout => Error::OracleTimeout {
                        attempts: retries + 1,
                    },
                    Failure::Transport(msg) => Error::OracleUnavailable(format!(
                        "{msg} (after {} attempt(s))",
                        retries + 1
                    )),
                    Failure::Fatal(e) => e,
                });
            }
            let delay = self.config.backoff_base.saturating_mul(1 << retries.min(16));
            log::warn!("oracle transport failure, retrying in {delay:?}");
            std::thread::sleep(delay);
            retries += 1;
        }
    }
}
