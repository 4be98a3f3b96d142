use std::sync::{Mutex, MutexGuard};
use std::time::Duration;

use serde::Serialize;

use super::{Oracle, OracleRequest, OracleResponse};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptEntry {
    pub request: OracleRequest,
    pub response: OracleResponse,
}

/// Transparent wrapper that records every successful call in order.
#[derive(Debug, Default)]
pub struct RecordingOracle<O> {
    inner: O,
    transcript: Mutex<Vec<TranscriptEntry>>,
}

impl<O: Oracle> RecordingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            transcript: Mutex::new(Vec::new()),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    fn entries(&self) -> MutexGuard<'_, Vec<TranscriptEntry>> {
        self.transcript.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn transcript(&self) -> Vec<TranscriptEntry> {
        self.entries().clone()
    }

    pub fn take_transcript(&self) -> Vec<TranscriptEntry> {
        std::mem::take(&mut *self.entries())
    }

    pub fn call_count(&self) -> usize {
        self.entries().len()
    }

    pub fn total_latency(&self) -> Duration {
        self.entries().iter().map(|e| e.response.latency).sum()
    }
}

impl<O: Oracle> Oracle for RecordingOracle<O> {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse> {
        let response = self.inner.complete(request)?;
        self.entries().push(TranscriptEntry {
            request: request.clone(),
            response: response.clone(),
        });
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::oracle::ScriptedOracle;

    #[test]
    fn empty_transcript() {
        let rec = RecordingOracle::new(ScriptedOracle::new());
        assert!(rec.transcript().is_empty());
        assert_eq!(rec.call_count(), 0);
        assert_eq!(rec.total_latency(), Duration::ZERO);
    }

    #[test]
    fn three_calls_recorded_in_order() {
        let rec = RecordingOracle::new(
            ScriptedOracle::new()
                .when_contains("one", "1")
                .when_contains("two", "2")
                .with_simulated_latency(Duration::from_millis(5)),
        );
        for q in ["one", "two", "one"] {
            rec.complete(&OracleRequest::new("", q)).unwrap();
        }
        let t = rec.transcript();
        assert_eq!(t.len(), 3);
        let texts: Vec<&str> = t.iter().map(|e| e.response.text.as_str()).collect();
        assert_eq!(texts, ["1", "2", "1"]);
        assert!(t.iter().all(|e| e.response.latency >= Duration::ZERO));
        let summed: Duration = t.iter().map(|e| e.response.latency).sum();
        assert_eq!(rec.total_latency(), summed);
        assert_eq!(summed, Duration::from_millis(15));
    }

    #[test]
    fn transparent_and_propagates_errors() {
        let inner = ScriptedOracle::new().when_contains("x", "y");
        let rec = RecordingOracle::new(inner.clone());
        let req = OracleRequest::new("", "x");
        assert_eq!(rec.complete(&req).unwrap().text, inner.complete(&req).unwrap().text);
        assert!(matches!(
            rec.complete(&OracleRequest::new("", "nope")),
            Err(Error::ScriptMiss)
        ));
        assert_eq!(rec.call_count(), 1);
    }

    #[test]
    fn concurrent_callers_all_recorded() {
        let rec = RecordingOracle::new(ScriptedOracle::new().with_fallback("ok"));
        std::thread::scope(|s| {
            for i in 0..4 {
                let rec = &rec;
                s.spawn(move || {
                    for j in 0..25 {
                        rec.complete(&OracleRequest::new("", format!("{i}-{j}"))).unwrap();
                    }
                });
            }
        });
        assert_eq!(rec.call_count(), 100);
    }
}
