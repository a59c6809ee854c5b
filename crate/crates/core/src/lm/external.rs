use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::lm::{LmScore, Scorer};
use crate::protocol::{Connection, Endpoint};
use crate::text::Sentence;

/// Scorer backed by a protocol endpoint. Batches larger than `batch_size`
/// are split into several requests on the same connection.
pub struct ExternalScorer {
    conn: Mutex<Connection>,
    batch_size: usize,
}

impl ExternalScorer {
    /// Connects and checks that the endpoint answers an empty score request.
    pub fn connect(endpoint: &Endpoint, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        let mut conn = Connection::open(endpoint)?;
        let probe = conn.call("score", Vec::new())?;
        if probe.logprobs.as_ref().is_none_or(|v| !v.is_empty()) {
            return Err(Error::Protocol(
                "endpoint did not answer an empty score request".into(),
            ));
        }
        Ok(Self {
            conn: Mutex::new(conn),
            batch_size,
        })
    }
}

impl Scorer for ExternalScorer {
    fn score_batch(&self, xs: &[Sentence]) -> Result<Vec<LmScore>> {
        let mut conn = self.conn.lock().unwrap_or_else(|e| e.into_inner());
        let mut out = Vec::with_capacity(xs.len());
        for chunk in xs.chunks(self.batch_size) {
            let resp = conn.call("score", chunk.iter().map(Sentence::text).collect())?;
            let logprobs = resp
                .logprobs
                .ok_or_else(|| Error::Protocol("score response without logprobs".into()))?;
            if logprobs.len() != chunk.len() {
                return Err(Error::Protocol(format!(
                    "sent {} sentences, got {} logprobs",
                    chunk.len(),
                    logprobs.len()
                )));
            }
            let mut per_token = resp.per_token.unwrap_or_default();
            if !per_token.is_empty() && per_token.len() != chunk.len() {
                return Err(Error::Protocol(
                    "per_token length does not match the batch".into(),
                ));
            }
            per_token.resize(chunk.len(), Vec::new());
            for (logprob, per_token) in logprobs.into_iter().zip(per_token) {
                if !logprob.is_finite() {
                    return Err(Error::Protocol(format!("non-finite logprob {logprob}")));
                }
                out.push(LmScore { logprob, per_token });
            }
        }
        Ok(out)
    }
}
