//! Sentence log-probability scoring.
//!
//! The built-in scorer is an interpolated Kneser–Ney n-gram model
//! ([`LmModel`]). Any process speaking the line-delimited JSON scorer
//! protocol can stand in for it through [`ExternalScorer`]; both implement
//! [`Scorer`], which is all the critic needs.

mod external;
mod format;
mod ngram;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use external::ExternalScorer;
pub use format::{load, save, FORMAT_VERSION, MAGIC};
pub use ngram::{CharModel, LmConfig, LmModel, BOS, EOS, UNK};

use crate::error::{Error, Result};
use crate::protocol::Endpoint;
use crate::text::Sentence;

/// Natural-log joint probability of a sentence including `</s>`.
///
/// `per_token` has one entry per token plus the end-of-sentence term. It is
/// empty when the scorer only reports sentence totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmScore {
    pub logprob: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_token: Vec<f64>,
}

impl LmScore {
    pub fn from_per_token(per_token: Vec<f64>) -> Self {
        let logprob = per_token.iter().sum();
        Self { logprob, per_token }
    }
}

/// Anything that can score sentences. Implementations must be pure: the
/// same sentence always receives the same score.
pub trait Scorer: Send + Sync {
    /// Scores `xs` in order. A failure anywhere fails the whole batch.
    fn score_batch(&self, xs: &[Sentence]) -> Result<Vec<LmScore>>;

    fn score(&self, x: &Sentence) -> Result<LmScore> {
        let mut out = self.score_batch(std::slice::from_ref(x))?;
        out.pop()
            .ok_or_else(|| Error::Protocol("scorer returned no result".into()))
    }
}

impl Scorer for LmModel {
    fn score_batch(&self, xs: &[Sentence]) -> Result<Vec<LmScore>> {
        Ok(xs.iter().map(|x| LmModel::score(self, x)).collect())
    }

    fn score(&self, x: &Sentence) -> Result<LmScore> {
        Ok(LmModel::score(self, x))
    }
}

impl<T: Scorer + ?Sized> Scorer for Arc<T> {
    fn score_batch(&self, xs: &[Sentence]) -> Result<Vec<LmScore>> {
        (**self).score_batch(xs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    Builtin,
    External,
}

/// Where sentence scores come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerHandle {
    pub kind: ScorerKind,
    /// Model file for builtin scorers, protocol endpoint for external ones.
    pub endpoint: String,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
}

fn default_batch_size() -> usize {
    100
}

impl ScorerHandle {
    pub fn builtin(model_path: impl Into<String>) -> Self {
        Self {
            kind: ScorerKind::Builtin,
            endpoint: model_path.into(),
            batch_size: default_batch_size(),
        }
    }

    pub fn external(endpoint: impl Into<String>) -> Self {
        Self {
            kind: ScorerKind::External,
            endpoint: endpoint.into(),
            batch_size: default_batch_size(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "scorer batch_size must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Loads the model or connects to the endpoint.
    pub fn open(&self) -> Result<Arc<dyn Scorer>> {
        self.validate()?;
        match self.kind {
            ScorerKind::Builtin => Ok(Arc::new(load(&self.endpoint)?)),
            ScorerKind::External => {
                let endpoint: Endpoint = self.endpoint.parse()?;
                Ok(Arc::new(ExternalScorer::connect(
                    &endpoint,
                    self.batch_size,
                )?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_batch_matches_single_scores() {
        let corpus: Vec<Sentence> = ["a b c", "a b c", "b c a", "c a b"]
            .iter()
            .map(|s| Sentence::new(*s))
            .collect();
        let m = LmModel::train(&corpus, 2).unwrap();
        assert!(Scorer::score_batch(&m, &[]).unwrap().is_empty());
        let xs: Vec<Sentence> = ["a b", "c", "a b", "zz top"]
            .iter()
            .map(|s| Sentence::new(*s))
            .collect();
        let batch = Scorer::score_batch(&m, &xs).unwrap();
        for (x, s) in xs.iter().zip(&batch) {
            assert_eq!(*s, m.score(x));
        }
        assert_eq!(batch[0], batch[2]);
    }

    #[test]
    fn handle_validation() {
        let mut h = ScorerHandle::external("tcp:127.0.0.1:1");
        h.batch_size = 0;
        assert!(h.validate().is_err());
        assert!(matches!(
            ScorerHandle::builtin("/nonexistent/model.lmc").open(),
            Err(Error::Io(_))
        ));
    }
}
