//! Remote model providers reached over JSON/HTTP.
//!
//! Every model-backed operation has a local heuristic implementation. When a
//! remote endpoint is configured it is tried first; any failure falls back to
//! the heuristic and the result is marked degraded.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("provider transport error: {0}")]
    Transport(String),
    #[error("provider response malformed: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct ProviderRequest<'a> {
    pub utterance: &'a str,
    pub hypotheses: &'a [String],
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ProviderResponse {
    #[serde(default)]
    pub scores: Vec<f64>,
    #[serde(default)]
    pub texts: Vec<String>,
}

/// A model server accepting `{utterance, hypotheses[]}` and answering
/// `{scores[], texts[]}`.
#[derive(Clone)]
pub struct RemoteProvider {
    endpoint: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for RemoteProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteProvider").field("endpoint", &self.endpoint).finish()
    }
}

impl RemoteProvider {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        Self { endpoint: endpoint.into(), agent }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn call(&self, utterance: &str, hypotheses: &[String]) -> Result<ProviderResponse, ProviderError> {
        let request = ProviderRequest { utterance, hypotheses };
        let mut response =
            self.agent.post(&self.endpoint).send_json(&request).map_err(|e| ProviderError::Transport(e.to_string()))?;
        response.body_mut().read_json::<ProviderResponse>().map_err(|e| ProviderError::Malformed(e.to_string()))
    }

    /// One score in `[0, 1]` per hypothesis.
    pub fn scores(&self, utterance: &str, hypotheses: &[String]) -> Result<Vec<f64>, ProviderError> {
        let response = self.call(utterance, hypotheses)?;
        if response.scores.len() != hypotheses.len() {
            return Err(ProviderError::Malformed(format!("expected {} scores, got {}", hypotheses.len(), response.scores.len())));
        }
        if response.scores.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(ProviderError::Malformed("score outside [0, 1]".into()));
        }
        Ok(response.scores)
    }

    /// The first generated text.
    pub fn text(&self, utterance: &str, hypotheses: &[String]) -> Result<String, ProviderError> {
        self.call(utterance, hypotheses)?.texts.into_iter().next().ok_or_else(|| ProviderError::Malformed("no texts".into()))
    }
}

/// Where an operation gets its model output.
#[derive(Debug, Clone, Default)]
pub enum Provider {
    #[default]
    Heuristic,
    Remote(RemoteProvider),
}

impl Provider {
    pub fn remote(endpoint: impl Into<String>, timeout: Duration) -> Self {
        Provider::Remote(RemoteProvider::new(endpoint, timeout))
    }
}

/// A value plus whether it came from the heuristic fallback after a remote
/// failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored<T> {
    pub value: T,
    pub degraded: bool,
}

/// Try the remote provider, falling back to `heuristic` on any error.
pub(crate) fn with_fallback<T>(
    provider: &Provider,
    remote: impl FnOnce(&RemoteProvider) -> Result<T, ProviderError>,
    heuristic: impl FnOnce() -> T,
) -> Scored<T> {
    match provider {
        Provider::Heuristic => Scored { value: heuristic(), degraded: false },
        Provider::Remote(r) => match remote(r) {
            Ok(value) => Scored { value, degraded: false },
            Err(e) => {
                log::warn!("{}: {e}; using heuristic provider", r.endpoint());
                Scored { value: heuristic(), degraded: true }
            }
        },
    }
}

#[cfg(test)]
pub(crate) mod fake {
    //! A one-thread HTTP server answering every request with a fixed body.

    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::thread;

    pub fn serve(body: &'static str, requests: usize) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        thread::spawn(move || {
            for stream in listener.incoming().take(requests) {
                let mut stream = stream.unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut length = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap() == 0 {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                    if line == "\r\n" {
                        break;
                    }
                }
                let mut buf = vec![0; length];
                reader.read_exact(&mut buf).unwrap();
                let reply = format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
        });
        format!("http://{addr}/")
    }

    /// An address nothing listens on.
    pub fn dead_endpoint() -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        drop(listener);
        format!("http://{addr}/")
    }
}
