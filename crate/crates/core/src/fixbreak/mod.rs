//! Fixers map bad sentences to good ones, breakers go the other way.
//!
//! Built in: the LM-guided hill climber ([`hillclimb_fix`]), random
//! corruption ([`synth_corrupt`]) and learned [`EditPatternModel`]s. Anything
//! else can be plugged in over the wire protocol.

mod edit_model;
mod hillclimb;

use std::collections::HashSet;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use edit_model::{
    apply_model, train_edit_model, Direction, EditModelBreaker, EditModelFixer, EditPatternModel,
    Pattern, Template, TokenClass, EDIT_MODEL_VERSION,
};
pub use hillclimb::{hillclimb_fix, synth_corrupt, HillclimbFixer, SynthBreaker};

use crate::critic::LmCritic;
use crate::error::{Error, Result};
use crate::perturb::PerturberConfig;
use crate::protocol::{Connection, Endpoint};
use crate::text::{detokenize, Sentence};

pub trait Fixer: Send + Sync {
    fn fix(&self, x: &Sentence) -> Result<Sentence>;

    /// Fixes in parallel; results keep the input order.
    fn fix_batch(&self, xs: &[Sentence]) -> Result<Vec<Sentence>> {
        xs.par_iter().map(|x| self.fix(x)).collect()
    }
}

pub trait Breaker: Send + Sync {
    fn corrupt(&self, y: &Sentence) -> Result<Sentence>;

    fn break_batch(&self, ys: &[Sentence]) -> Result<Vec<Sentence>> {
        ys.par_iter().map(|y| self.corrupt(y)).collect()
    }
}

impl<T: Fixer + ?Sized> Fixer for Arc<T> {
    fn fix(&self, x: &Sentence) -> Result<Sentence> {
        (**self).fix(x)
    }
    fn fix_batch(&self, xs: &[Sentence]) -> Result<Vec<Sentence>> {
        (**self).fix_batch(xs)
    }
}

impl<T: Breaker + ?Sized> Breaker for Arc<T> {
    fn corrupt(&self, y: &Sentence) -> Result<Sentence> {
        (**self).corrupt(y)
    }
    fn break_batch(&self, ys: &[Sentence]) -> Result<Vec<Sentence>> {
        (**self).break_batch(ys)
    }
}

/// Returns its input. Useful as a null fixer or breaker.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Fixer for Identity {
    fn fix(&self, x: &Sentence) -> Result<Sentence> {
        Ok(x.clone())
    }
}

impl Breaker for Identity {
    fn corrupt(&self, y: &Sentence) -> Result<Sentence> {
        Ok(y.clone())
    }
}

/// Rebuilds a sentence from edited tokens through its canonical text, so
/// in-process outputs match what a protocol peer would send back.
pub(crate) fn resentence<S: AsRef<str>>(tokens: &[S], id: &Option<String>) -> Sentence {
    let mut s = Sentence::new(detokenize(tokens));
    s.id = id.clone();
    s
}

/// Fixer or breaker served over the wire protocol.
pub struct ExternalModel {
    conn: Mutex<Connection>,
    batch_size: usize,
}

impl ExternalModel {
    pub fn connect(endpoint: &Endpoint, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        Ok(Self {
            conn: Mutex::new(Connection::open(endpoint)?),
            batch_size,
        })
    }

    fn call(&self, op: &str, xs: &[Sentence]) -> Result<Vec<Sentence>> {
        let mut conn = self.conn.lock().unwrap_or_else(|e| e.into_inner());
        let mut out = Vec::with_capacity(xs.len());
        for chunk in xs.chunks(self.batch_size) {
            let resp = conn.call(op, chunk.iter().map(Sentence::text).collect())?;
            let outputs = resp
                .outputs
                .ok_or_else(|| Error::Protocol(format!("{op} response without outputs")))?;
            if outputs.len() != chunk.len() {
                return Err(Error::Protocol(format!(
                    "sent {} sentences, got {} outputs",
                    chunk.len(),
                    outputs.len()
                )));
            }
            for (x, text) in chunk.iter().zip(outputs) {
                let mut s = Sentence::new(text);
                s.id = x.id.clone();
                out.push(s);
            }
        }
        Ok(out)
    }
}

impl Fixer for ExternalModel {
    fn fix(&self, x: &Sentence) -> Result<Sentence> {
        Ok(self.call("fix", std::slice::from_ref(x))?.remove(0))
    }
    fn fix_batch(&self, xs: &[Sentence]) -> Result<Vec<Sentence>> {
        self.call("fix", xs)
    }
}

impl Breaker for ExternalModel {
    fn corrupt(&self, y: &Sentence) -> Result<Sentence> {
        Ok(self.call("break", std::slice::from_ref(y))?.remove(0))
    }
    fn break_batch(&self, ys: &[Sentence]) -> Result<Vec<Sentence>> {
        self.call("break", ys)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Identity,
    Hillclimb,
    Synthetic,
    EditModel,
    External,
}

/// Configured fixer or breaker. Unused fields are ignored by each kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHandle {
    pub kind: ModelKind,
    /// Hill-climbing steps.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Random edits per corruption.
    #[serde(default = "default_n_edits")]
    pub n_edits: usize,
    /// Edit-pattern model file.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default)]
    pub seed: u64,
}

pub type FixerHandle = ModelHandle;
pub type BreakerHandle = ModelHandle;

fn default_max_steps() -> usize {
    4
}

fn default_n_edits() -> usize {
    1
}

fn default_batch_size() -> usize {
    100
}

impl ModelHandle {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            max_steps: default_max_steps(),
            n_edits: default_n_edits(),
            model: None,
            endpoint: None,
            batch_size: default_batch_size(),
            seed: 0,
        }
    }

    pub fn hillclimb(max_steps: usize) -> Self {
        Self {
            max_steps,
            ..Self::new(ModelKind::Hillclimb)
        }
    }

    pub fn edit_model(path: impl Into<String>) -> Self {
        Self {
            model: Some(path.into()),
            ..Self::new(ModelKind::EditModel)
        }
    }

    pub fn external(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: Some(endpoint.into()),
            ..Self::new(ModelKind::External)
        }
    }

    fn endpoint(&self) -> Result<Endpoint> {
        self.endpoint
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("external model needs an endpoint".into()))?
            .parse()
    }

    fn load_model(&self) -> Result<EditPatternModel> {
        let path = self
            .model
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("edit_model needs a model path".into()))?;
        EditPatternModel::load(path)
    }

    /// Builds the fixer. `critic` supplies the scorer and neighborhood;
    /// `vocab` enables spelling candidates for edit-model fixers.
    pub fn open_fixer(
        &self,
        critic: &LmCritic,
        vocab: Option<Arc<HashSet<String>>>,
    ) -> Result<Arc<dyn Fixer>> {
        Ok(match self.kind {
            ModelKind::Identity => Arc::new(Identity),
            ModelKind::Hillclimb => Arc::new(HillclimbFixer::new(critic.clone(), self.max_steps)?),
            ModelKind::EditModel => Arc::new(EditModelFixer::new(
                self.load_model()?,
                critic.scorer().clone(),
                vocab,
            )),
            ModelKind::External => {
                Arc::new(ExternalModel::connect(&self.endpoint()?, self.batch_size)?)
            }
            ModelKind::Synthetic => {
                return Err(Error::InvalidConfig(
                    "synthetic corruption is a breaker, not a fixer".into(),
                ))
            }
        })
    }

    pub fn open_breaker(&self, perturber: &PerturberConfig) -> Result<Arc<dyn Breaker>> {
        Ok(match self.kind {
            ModelKind::Identity => Arc::new(Identity),
            ModelKind::Synthetic => Arc::new(SynthBreaker::new(perturber.clone(), self.n_edits)?),
            ModelKind::EditModel => Arc::new(EditModelBreaker::new(self.load_model()?, self.seed)),
            ModelKind::External => {
                Arc::new(ExternalModel::connect(&self.endpoint()?, self.batch_size)?)
            }
            ModelKind::Hillclimb => {
                return Err(Error::InvalidConfig(
                    "hill climbing is a fixer, not a breaker".into(),
                ))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_identity() {
        let xs = vec![Sentence::new("a b ."), Sentence::with_id("c", "7")];
        assert_eq!(Identity.fix_batch(&xs).unwrap(), xs);
        assert_eq!(Identity.break_batch(&xs).unwrap(), xs);
    }

    #[test]
    fn handle_kinds_are_checked() {
        let p = PerturberConfig::default();
        assert!(matches!(
            ModelHandle::hillclimb(4).open_breaker(&p),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            ModelHandle::new(ModelKind::EditModel).open_breaker(&p),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            ModelHandle::new(ModelKind::External).open_breaker(&p),
            Err(Error::InvalidConfig(_))
        ));
        let json = serde_json::to_string(&ModelHandle::hillclimb(3)).unwrap();
        let back: ModelHandle = serde_json::from_str(&json).unwrap();
        assert_eq!(back.max_steps, 3);
        let sparse: ModelHandle = serde_json::from_str(r#"{"kind":"synthetic"}"#).unwrap();
        assert_eq!(sparse.n_edits, 1);
    }
}
