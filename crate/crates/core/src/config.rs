//! Flat JSON run configuration shared by every pipeline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bifi::BifiConfig;
use crate::critic::CriticConfig;
use crate::error::{Error, Result};
use crate::fixbreak::{ModelHandle, ModelKind};
use crate::lm::ScorerHandle;
use crate::perturb::{PerturbMode, PerturberConfig, WordDicts};
use crate::seed::digest_hex;

/// Everything a run needs, as one flat document. Missing keys take their
/// defaults; unknown keys are an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub log_level: String,
    /// Worker threads. Never affects output bytes.
    pub jobs: Option<usize>,

    pub mode: PerturbMode,
    pub sample_size: usize,
    /// Word dictionary JSON; the bundled one if unset.
    pub dictionaries: Option<PathBuf>,

    /// Built-in model file. Ignored when `scorer_endpoint` is set.
    pub lm: Option<PathBuf>,
    pub scorer_endpoint: Option<String>,
    pub scorer_batch_size: usize,
    pub tie_tolerance: f64,
    /// n-gram order for `lm train`.
    pub order: usize,

    pub fixer: ModelHandle,
    pub breaker: ModelHandle,

    pub rounds: usize,
    /// Defaults to `seed`.
    pub breaker_seed: Option<u64>,
    pub no_critic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            log_level: "info".into(),
            jobs: None,
            mode: PerturbMode::Ed1Word,
            sample_size: 100,
            dictionaries: None,
            lm: None,
            scorer_endpoint: None,
            scorer_batch_size: 100,
            tie_tolerance: 0.0,
            order: 3,
            fixer: ModelHandle::hillclimb(4),
            breaker: ModelHandle::new(ModelKind::Synthetic),
            rounds: 1,
            breaker_seed: None,
            no_critic: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(Error::InvalidConfig(
                "sample_size must be at least 1".into(),
            ));
        }
        if self.scorer_batch_size == 0 {
            return Err(Error::InvalidConfig(
                "scorer_batch_size must be at least 1".into(),
            ));
        }
        if !self.tie_tolerance.is_finite() || self.tie_tolerance < 0.0 {
            return Err(Error::InvalidConfig(
                "tie_tolerance must be finite and non-negative".into(),
            ));
        }
        if !(1..=5).contains(&self.order) {
            return Err(Error::InvalidConfig("order must be between 1 and 5".into()));
        }
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// The JSON form without keys that cannot change results (`jobs`,
    /// `log_level`).
    pub fn effective(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("jobs");
            map.remove("log_level");
        }
        value
    }

    /// SHA-256 of [`RunConfig::effective`].
    pub fn digest(&self) -> String {
        digest_hex(self.effective().to_string().as_bytes())
    }

    pub fn perturber(&self) -> Result<PerturberConfig> {
        let dictionaries = match &self.dictionaries {
            Some(path) => WordDicts::load(path)?,
            None => WordDicts::default(),
        };
        let cfg = PerturberConfig {
            mode: self.mode,
            sample_size: self.sample_size,
            seed: self.seed,
            dictionaries,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn scorer(&self) -> Result<ScorerHandle> {
        let mut handle = match (&self.scorer_endpoint, &self.lm) {
            (Some(endpoint), _) => ScorerHandle::external(endpoint.clone()),
            (None, Some(path)) => ScorerHandle::builtin(path.to_string_lossy()),
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "no scorer configured: set lm or scorer_endpoint".into(),
                ))
            }
        };
        handle.batch_size = self.scorer_batch_size;
        Ok(handle)
    }

    pub fn critic(&self) -> Result<CriticConfig> {
        Ok(CriticConfig {
            perturber: self.perturber()?,
            scorer: self.scorer()?,
            tie_tolerance: self.tie_tolerance,
        })
    }

    pub fn bifi(&self, output_dir: impl Into<PathBuf>) -> Result<BifiConfig> {
        let cfg = BifiConfig {
            rounds: self.rounds,
            critic: self.critic()?,
            initial_fixer: self.fixer.clone(),
            breaker_seed: self.breaker_seed.unwrap_or(self.seed),
            output_dir: output_dir.into(),
            no_critic: self.no_critic,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Writes the effective configuration and its digest.
    pub fn persist(&self, path: impl AsRef<Path>) -> Result<()> {
        let doc = serde_json::json!({ "digest": self.digest(), "config": self.effective() });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_documents_take_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"seed": 7, "sample_size": 400}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.sample_size, 400);
        assert_eq!(cfg.order, 3);
        assert_eq!(cfg.fixer.kind, ModelKind::Hillclimb);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sead": 7}"#).is_err());
    }

    #[test]
    fn digest_ignores_parallelism_only() {
        let a = RunConfig::default();
        let b = RunConfig {
            jobs: Some(8),
            log_level: "debug".into(),
            ..a.clone()
        };
        assert_eq!(a.digest(), b.digest());
        let c = RunConfig {
            seed: 1,
            ..a.clone()
        };
        assert_ne!(a.digest(), c.digest());
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back.digest(), a.digest());
    }

    #[test]
    fn scorer_needs_a_source() {
        let cfg = RunConfig::default();
        assert!(matches!(cfg.scorer(), Err(Error::InvalidConfig(_))));
        let cfg = RunConfig {
            lm: Some("m.lmc".into()),
            ..cfg
        };
        assert_eq!(cfg.critic().unwrap().scorer, ScorerHandle::builtin("m.lmc"));
        assert_eq!(cfg.bifi("out").unwrap().breaker_seed, 0);
    }
}
