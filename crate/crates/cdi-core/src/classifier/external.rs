//! Plug-in scorer contract: swap the built-in model for an external one
//! reachable over line-delimited JSON on stdio or a single-endpoint HTTP
//! service. Requests carry `{"text": ...}` and replies carry
//! `{"score": ...}` with the score in [0, 1].

use super::ClassifierError;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::time::Duration;

#[derive(Serialize)]
struct ScoreRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreResponse {
    score: f64,
}

/// Anything that can score a statement's acceptability.
pub trait ExternalScorer {
    fn score_text(&mut self, text: &str) -> Result<f64, ClassifierError>;
}

impl<F> ExternalScorer for F
where
    F: FnMut(&str) -> Result<f64, ClassifierError>,
{
    fn score_text(&mut self, text: &str) -> Result<f64, ClassifierError> {
        self(text)
    }
}

/// Query an external scorer and validate the reply. Scores outside
/// [0, 1] or NaN are rejected as malformed.
pub fn external_score(scorer: &mut dyn ExternalScorer, text: &str) -> Result<f64, ClassifierError> {
    let score = scorer.score_text(text)?;
    if !(0.0..=1.0).contains(&score) {
        return Err(ClassifierError::MalformedScore(format!("{score} outside [0, 1]")));
    }
    Ok(score)
}

/// Scorer speaking line-delimited JSON over a child process's stdio.
pub struct StdioScorer {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl StdioScorer {
    /// Spawn `program args...` and hold its pipes open for the session.
    pub fn spawn(program: &str, args: &[&str]) -> Result<Self, ClassifierError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| ClassifierError::ScorerUnavailable(format!("spawn {program}: {e}")))?;
        let stdin = child
            .stdin
            .take()
            .ok_or_else(|| ClassifierError::ScorerUnavailable("child stdin unavailable".into()))?;
        let stdout = child
            .stdout
            .take()
            .ok_or_else(|| ClassifierError::ScorerUnavailable("child stdout unavailable".into()))?;
        Ok(StdioScorer { child, stdin, stdout: BufReader::new(stdout) })
    }
}

impl ExternalScorer for StdioScorer {
    fn score_text(&mut self, text: &str) -> Result<f64, ClassifierError> {
        let mut line = serde_json::to_string(&ScoreRequest { text })
            .map_err(|e| ClassifierError::ScorerUnavailable(e.to_string()))?;
        line.push('\n');
        self.stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.flush())
            .map_err(|e| ClassifierError::ScorerUnavailable(format!("write: {e}")))?;
        let mut reply = String::new();
        self.stdout
            .read_line(&mut reply)
            .map_err(|e| ClassifierError::ScorerUnavailable(format!("read: {e}")))?;
        if reply.is_empty() {
            return Err(ClassifierError::ScorerUnavailable("scorer closed its stdout".into()));
        }
        let parsed: ScoreResponse = serde_json::from_str(reply.trim_end())
            .map_err(|e| ClassifierError::MalformedScore(format!("{e}: {}", reply.trim_end())))?;
        Ok(parsed.score)
    }
}

impl Drop for StdioScorer {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Scorer behind `POST endpoint` with a JSON body.
pub struct HttpScorer {
    endpoint: String,
    client: reqwest::blocking::Client,
    max_retries: u32,
}

impl HttpScorer {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpScorer {
            endpoint: endpoint.into(),
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(30))
                .build()
                .expect("default client"),
            max_retries: 2,
        }
    }
}

impl ExternalScorer for HttpScorer {
    fn score_text(&mut self, text: &str) -> Result<f64, ClassifierError> {
        let mut last_err = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(100 << attempt));
            }
            let sent = self.client.post(&self.endpoint).json(&ScoreRequest { text }).send();
            match sent {
                Ok(resp) if resp.status().is_success() => {
                    let body = resp
                        .text()
                        .map_err(|e| ClassifierError::ScorerUnavailable(e.to_string()))?;
                    let parsed: ScoreResponse = serde_json::from_str(&body)
                        .map_err(|e| ClassifierError::MalformedScore(format!("{e}: {body}")))?;
                    return Ok(parsed.score);
                }
                Ok(resp) => last_err = format!("status {}", resp.status()),
                Err(e) => last_err = e.to_string(),
            }
        }
        Err(ClassifierError::ScorerUnavailable(last_err))
    }
}
