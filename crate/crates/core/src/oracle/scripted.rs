use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Oracle, OracleRequest, OracleResponse};
use crate::error::{Error, Result};

/// How a rule is matched against `user_text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleMatcher {
    Contains(String),
    Exact(String),
    /// The text ends with this string. Prompt tails are unique per
    /// question even when a demo repeats the question verbatim.
    EndsWith(String),
    /// Every fragment must appear somewhere in the text.
    AllOf(Vec<String>),
}

impl RuleMatcher {
    fn matches(&self, text: &str) -> bool {
        match self {
            RuleMatcher::Contains(needle) => text.contains(needle.as_str()),
            RuleMatcher::Exact(key) => text == key,
            RuleMatcher::EndsWith(tail) => text.ends_with(tail.as_str()),
            RuleMatcher::AllOf(needles) => needles.iter().all(|n| text.contains(n.as_str())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptRule {
    pub matcher: RuleMatcher,
    pub response: String,
}

/// Deterministic oracle driven by an ordered rule table; first match wins.
///
/// Reported latency is a fixed simulated value (zero by default), so runs
/// against a script are reproducible down to the timing fields.
#[derive(Debug, Clone, Default)]
pub struct ScriptedOracle {
    rules: Vec<ScriptRule>,
    fallback: Option<String>,
    simulated_latency: Duration,
}

impl ScriptedOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rule(mut self, matcher: RuleMatcher, response: impl Into<String>) -> Self {
        self.push_rule(matcher, response);
        self
    }

    pub fn when_contains(self, needle: impl Into<String>, response: impl Into<String>) -> Self {
        self.rule(RuleMatcher::Contains(needle.into()), response)
    }

    pub fn when_exact(self, key: impl Into<String>, response: impl Into<String>) -> Self {
        self.rule(RuleMatcher::Exact(key.into()), response)
    }

    pub fn when_ends_with(self, tail: impl Into<String>, response: impl Into<String>) -> Self {
        self.rule(RuleMatcher::EndsWith(tail.into()), response)
    }

    pub fn with_fallback(mut self, response: impl Into<String>) -> Self {
        self.fallback = Some(response.into());
        self
    }

    pub fn with_simulated_latency(mut self, latency: Duration) -> Self {
        self.simulated_latency = latency;
        self
    }

    pub fn push_rule(&mut self, matcher: RuleMatcher, response: impl Into<String>) {
        self.rules.push(ScriptRule {
            matcher,
            response: response.into(),
        });
    }

    pub fn rules(&self) -> &[ScriptRule] {
        &self.rules
    }

    pub fn fallback(&self) -> Option<&str> {
        self.fallback.as_deref()
    }

    fn lookup(&self, user_text: &str) -> Option<&str> {
        self.rules
            .iter()
            .find(|r| r.matcher.matches(user_text))
            .map(|r| r.response.as_str())
            .or(self.fallback.as_deref())
    }

    /// Reads a JSON script file (see [`ScriptFile`] for the layout).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::OracleConfig(format!("cannot read script {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScriptFile = serde_json::from_str(text)
            .map_err(|e| Error::OracleConfig(format!("invalid script: {e}")))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        let file = ScriptFile::from(self);
        serde_json::to_string_pretty(&file).expect("script serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

impl Oracle for ScriptedOracle {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse> {
        request.validate()?;
        let text = self.lookup(&request.user_text).ok_or(Error::ScriptMiss)?;
        Ok(OracleResponse::new(text, self.simulated_latency))
    }
}

/// On-disk script layout:
///
/// ```json
/// {"rules": [{"contains": "...", "reply": "..."},
///            {"exact": "...", "reply": "..."},
///            {"ends_with": "...", "reply": "..."},
///            {"all_of": ["...", "..."], "reply": "..."}],
///  "fallback": "...", "simulated_latency_s": 0.0}
/// ```
#[derive(Debug, Serialize, Deserialize)]
pub struct ScriptFile {
    #[serde(default)]
    rules: Vec<RuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fallback: Option<String>,
    #[serde(default)]
    simulated_latency_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RuleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contains: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ends_with: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    all_of: Option<Vec<String>>,
    reply: String,
}

impl TryFrom<ScriptFile> for ScriptedOracle {
    type Error = Error;

    fn try_from(file: ScriptFile) -> Result<Self> {
        if !(file.simulated_latency_s >= 0.0 && file.simulated_latency_s.is_finite()) {
            return Err(Error::OracleConfig("simulated_latency_s must be >= 0".into()));
        }
        let mut oracle = ScriptedOracle {
            rules: Vec::with_capacity(file.rules.len()),
            fallback: file.fallback,
            simulated_latency: Duration::from_secs_f64(file.simulated_latency_s),
        };
        for (i, spec) in file.rules.into_iter().enumerate() {
            let matcher = match (spec.contains, spec.exact, spec.ends_with, spec.all_of) {
                (Some(c), None, None, None) => RuleMatcher::Contains(c),
                (None, Some(x), None, None) => RuleMatcher::Exact(x),
                (None, None, Some(t), None) => RuleMatcher::EndsWith(t),
                (None, None, None, Some(all)) => RuleMatcher::AllOf(all),
                _ => {
                    return Err(Error::OracleConfig(format!(
                        "rule {i}: exactly one of contains/exact/ends_with/all_of is required"
                    )))
                }
            };
            oracle.push_rule(matcher, spec.reply);
        }
        Ok(oracle)
    }
}

impl From<&ScriptedOracle> for ScriptFile {
    fn from(oracle: &ScriptedOracle) -> Self {
        let rules = oracle
            .rules
            .iter()
            .map(|r| {
                let mut spec = RuleSpec {
                    contains: None,
                    exact: None,
                    ends_with: None,
                    all_of: None,
                    reply: r.response.clone(),
                };
                match &r.matcher {
                    RuleMatcher::Contains(c) => spec.contains = Some(c.clone()),
                    RuleMatcher::Exact(x) => spec.exact = Some(x.clone()),
                    RuleMatcher::EndsWith(t) => spec.ends_with = Some(t.clone()),
                    RuleMatcher::AllOf(all) => spec.all_of = Some(all.clone()),
                }
                spec
            })
            .collect();
        ScriptFile {
            rules,
            fallback: oracle.fallback.clone(),
            simulated_latency_s: oracle.simulated_latency.as_secs_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ask(oracle: &ScriptedOracle, text: &str) -> Result<String> {
        oracle
            .complete(&OracleRequest::new("", text))
            .map(|r| r.text)
    }

    #[test]
    fn rule_lookup() {
        let oracle = ScriptedOracle::new().when_contains("Which candidate entity", "c_1");
        assert_eq!(
            ask(&oracle, "Which candidate entity best matches the entity X?\nc_1: X").unwrap(),
            "c_1"
        );
    }

    #[test]
    fn no_rules_no_fallback_misses() {
        assert!(matches!(ask(&ScriptedOracle::new(), "anything"), Err(Error::ScriptMiss)));
    }

    #[test]
    fn first_match_wins_then_fallback() {
        let oracle = ScriptedOracle::new()
            .when_contains("a", "first")
            .when_contains("ab", "second")
            .when_exact("zzz", "exact")
            .rule(RuleMatcher::AllOf(vec!["x".into(), "y".into()]), "both")
            .with_fallback("fb");
        assert_eq!(ask(&oracle, "ab").unwrap(), "first");
        assert_eq!(ask(&oracle, "zzz").unwrap(), "exact");
        assert_eq!(ask(&oracle, "zzzz").unwrap(), "fb");
        assert_eq!(ask(&oracle, "y then x").unwrap(), "both");
        assert_eq!(ask(&oracle, "just x").unwrap(), "fb");
    }

    #[test]
    fn ends_with_ignores_earlier_occurrences() {
        let oracle = ScriptedOracle::new()
            .when_ends_with("Q: one", "1")
            .when_ends_with("Q: two", "2");
        assert_eq!(ask(&oracle, "Q: one\n\nQ: two").unwrap(), "2");
    }

    #[test]
    fn identical_requests_identical_text() {
        let oracle = ScriptedOracle::new().when_contains("q", "reply");
        let req = OracleRequest::new("s", "q?");
        assert_eq!(oracle.complete(&req).unwrap(), oracle.complete(&req).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let oracle = ScriptedOracle::new()
            .when_contains("a", "1")
            .when_exact("b", "2")
            .when_ends_with("tail", "2b")
            .rule(RuleMatcher::AllOf(vec!["c".into(), "d".into()]), "3")
            .with_fallback("4")
            .with_simulated_latency(Duration::from_millis(250));
        let back = ScriptedOracle::from_json(&oracle.to_json()).unwrap();
        assert_eq!(back.rules(), oracle.rules());
        assert_eq!(back.fallback(), Some("4"));
        assert_eq!(back.simulated_latency, Duration::from_millis(250));
    }

    #[test]
    fn json_rule_needs_exactly_one_matcher() {
        let err = ScriptedOracle::from_json(r#"{"rules":[{"contains":"a","exact":"b","reply":"x"}]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::OracleConfig(_)));
    }
}
