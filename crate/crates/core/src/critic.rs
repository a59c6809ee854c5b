//! Grammaticality critics.
//!
//! [`LmCritic`] calls a sentence good when no sampled neighbor scores higher
//! under the language model. [`AbsThrCritic`] is the naive alternative that
//! thresholds the sentence's own log-probability.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lm::{Scorer, ScorerHandle};
use crate::metrics::{f05, ratio};
use crate::perturb::{sample_neighborhood, PerturberConfig};
use crate::seed::digest_hex;
use crate::text::{Sentence, SentencePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Bad = 0,
    Good = 1,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Good => "good",
            Label::Bad => "bad",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticVerdict {
    pub label: Label,
    pub center_logprob: f64,
    /// Highest-scoring neighbor, if any neighbor was scored.
    pub best_variant: Option<(String, f64)>,
    /// Center minus best neighbor; `+inf` when there was nothing to compare.
    pub margin: f64,
}

impl CriticVerdict {
    pub fn is_good(&self) -> bool {
        self.label == Label::Good
    }
}

/// JSON verdict record: `{"id", "label", "center_logprob", "margin", "best_variant"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub id: Option<String>,
    pub label: Label,
    pub center_logprob: f64,
    pub margin: Option<f64>,
    pub best_variant: Option<BestVariant>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestVariant {
    pub text: String,
    pub logprob: f64,
}

impl VerdictRecord {
    pub fn new(x: &Sentence, v: &CriticVerdict) -> Self {
        Self {
            id: x.id.clone(),
            label: v.label,
            center_logprob: v.center_logprob,
            margin: v.margin.is_finite().then_some(v.margin),
            best_variant: v.best_variant.as_ref().map(|(text, logprob)| BestVariant {
                text: text.clone(),
                logprob: *logprob,
            }),
        }
    }
}

/// A binary judge of grammaticality.
pub trait Critic: Send + Sync {
    fn judge(&self, x: &Sentence) -> Result<CriticVerdict>;

    /// Judges in parallel; results keep the input order.
    fn judge_batch(&self, xs: &[Sentence]) -> Result<Vec<CriticVerdict>> {
        xs.par_iter().map(|x| self.judge(x)).collect()
    }

    /// Identifies the configuration, for caching and provenance.
    fn digest(&self) -> String;
}

impl<C: Critic + ?Sized> Critic for Arc<C> {
    fn judge(&self, x: &Sentence) -> Result<CriticVerdict> {
        (**self).judge(x)
    }

    fn judge_batch(&self, xs: &[Sentence]) -> Result<Vec<CriticVerdict>> {
        (**self).judge_batch(xs)
    }

    fn digest(&self) -> String {
        (**self).digest()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticConfig {
    pub perturber: PerturberConfig,
    pub scorer: ScorerHandle,
    #[serde(default)]
    pub tie_tolerance: f64,
}

impl CriticConfig {
    pub fn validate(&self) -> Result<()> {
        self.perturber.validate()?;
        self.scorer.validate()?;
        if !self.tie_tolerance.is_finite() || self.tie_tolerance < 0.0 {
            return Err(Error::InvalidConfig(
                "tie_tolerance must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Local-optimum critic over a sampled neighborhood.
#[derive(Clone)]
pub struct LmCritic {
    perturber: PerturberConfig,
    tie_tolerance: f64,
    scorer: Arc<dyn Scorer>,
    scorer_id: String,
}

impl LmCritic {
    /// `scorer_id` names the scorer in the critic's digest.
    pub fn new(
        perturber: PerturberConfig,
        scorer: Arc<dyn Scorer>,
        scorer_id: impl Into<String>,
    ) -> Result<Self> {
        perturber.validate()?;
        Ok(Self {
            perturber,
            tie_tolerance: 0.0,
            scorer,
            scorer_id: scorer_id.into(),
        })
    }

    pub fn from_config(cfg: &CriticConfig) -> Result<Self> {
        cfg.validate()?;
        let scorer = cfg.scorer.open()?;
        Ok(
            Self::new(cfg.perturber.clone(), scorer, cfg.scorer.endpoint.clone())?
                .with_tie_tolerance(cfg.tie_tolerance),
        )
    }

    pub fn with_tie_tolerance(mut self, tol: f64) -> Self {
        self.tie_tolerance = tol;
        self
    }

    pub fn tie_tolerance(&self) -> f64 {
        self.tie_tolerance
    }

    pub fn perturber(&self) -> &PerturberConfig {
        &self.perturber
    }

    pub fn scorer(&self) -> &Arc<dyn Scorer> {
        &self.scorer
    }

    /// Scores the center and its sampled neighborhood. The first score is
    /// the center's.
    pub fn score_neighborhood(&self, x: &Sentence) -> Result<(Vec<String>, Vec<f64>)> {
        let cfg = self.perturber.for_sentence(&x.text());
        let hood = sample_neighborhood(x, &cfg);
        let mut batch = Vec::with_capacity(hood.variants.len() + 1);
        batch.push(x.clone());
        batch.extend(hood.variants.iter().map(|v| Sentence::new(v.as_str())));
        let scores = self.scorer.score_batch(&batch)?;
        Ok((
            hood.variants,
            scores.into_iter().map(|s| s.logprob).collect(),
        ))
    }
}

/// Judges `x` with the local-optimum criterion. Ties favor "good".
pub fn lm_critic(x: &Sentence, critic: &LmCritic) -> Result<CriticVerdict> {
    let (variants, scores) = critic.score_neighborhood(x)?;
    let center = scores[0];
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores[1..].iter().enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    let margin = best.map_or(f64::INFINITY, |(_, b)| center - b);
    let label = if margin >= -critic.tie_tolerance {
        Label::Good
    } else {
        Label::Bad
    };
    Ok(CriticVerdict {
        label,
        center_logprob: center,
        best_variant: best.map(|(i, s)| (variants[i].clone(), s)),
        margin,
    })
}

impl Critic for LmCritic {
    fn judge(&self, x: &Sentence) -> Result<CriticVerdict> {
        lm_critic(x, self)
    }

    fn digest(&self) -> String {
        let desc = serde_json::json!({
            "critic": "lm",
            "perturber": self.perturber,
            "tie_tolerance": self.tie_tolerance,
            "scorer": self.scorer_id,
        });
        digest_hex(desc.to_string().as_bytes())
    }
}

/// Judges `x` good iff its log-probability exceeds `delta`.
pub fn absthr_critic(x: &Sentence, scorer: &dyn Scorer, delta: f64) -> Result<CriticVerdict> {
    let logprob = scorer.score(x)?.logprob;
    Ok(CriticVerdict {
        label: if logprob > delta {
            Label::Good
        } else {
            Label::Bad
        },
        center_logprob: logprob,
        best_variant: None,
        margin: logprob - delta,
    })
}

#[derive(Clone)]
pub struct AbsThrCritic {
    pub scorer: Arc<dyn Scorer>,
    pub delta: f64,
}

impl Critic for AbsThrCritic {
    fn judge(&self, x: &Sentence) -> Result<CriticVerdict> {
        absthr_critic(x, self.scorer.as_ref(), self.delta)
    }

    fn digest(&self) -> String {
        digest_hex(format!("absthr:{}", self.delta).as_bytes())
    }
}

/// Accepts everything. Stands in for the critic in filter ablations.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptAll;

impl Critic for AcceptAll {
    fn judge(&self, _x: &Sentence) -> Result<CriticVerdict> {
        Ok(CriticVerdict {
            label: Label::Good,
            center_logprob: 0.0,
            best_variant: None,
            margin: f64::INFINITY,
        })
    }

    fn digest(&self) -> String {
        "accept-all".into()
    }
}

/// Mean log-probability over every bad and good sentence in `pairs`.
pub fn calibrate_delta(pairs: &[SentencePair], scorer: &dyn Scorer) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyEvalSet);
    }
    let sentences: Vec<Sentence> = pairs
        .iter()
        .flat_map(|p| [p.bad.clone(), p.good.clone()])
        .collect();
    let scores = scorer.score_batch(&sentences)?;
    Ok(scores.iter().map(|s| s.logprob).sum::<f64>() / scores.len() as f64)
}

/// Memoizes verdicts by canonical sentence text. Valid because every critic
/// here is deterministic in its input.
pub struct CachedCritic<C> {
    inner: C,
    cache: RwLock<HashMap<String, CriticVerdict>>,
}

impl<C: Critic> CachedCritic<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.cache.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<C: Critic> Critic for CachedCritic<C> {
    fn judge(&self, x: &Sentence) -> Result<CriticVerdict> {
        let key = x.text();
        if let Some(v) = self
            .cache
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(v.clone());
        }
        let v = self.inner.judge(x)?;
        self.cache
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, v.clone());
        Ok(v)
    }

    fn digest(&self) -> String {
        self.inner.digest()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub bad_judged_bad: u64,
    pub bad_judged_good: u64,
    pub good_judged_bad: u64,
    pub good_judged_good: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.bad_judged_bad + self.bad_judged_good + self.good_judged_bad + self.good_judged_good
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub p_bad: f64,
    pub r_bad: f64,
    pub f05_bad: f64,
    pub p_good: f64,
    pub r_good: f64,
    pub f05_good: f64,
    pub counts: Confusion,
    /// Set when some precision or recall had an empty denominator.
    pub degenerate: bool,
}

impl EvalReport {
    pub fn from_counts(counts: Confusion) -> Self {
        let mut degenerate = false;
        let c = counts;
        let p_bad = ratio(
            c.bad_judged_bad,
            c.bad_judged_bad + c.good_judged_bad,
            &mut degenerate,
        );
        let r_bad = ratio(
            c.bad_judged_bad,
            c.bad_judged_bad + c.bad_judged_good,
            &mut degenerate,
        );
        let p_good = ratio(
            c.good_judged_good,
            c.good_judged_good + c.bad_judged_good,
            &mut degenerate,
        );
        let r_good = ratio(
            c.good_judged_good,
            c.good_judged_good + c.good_judged_bad,
            &mut degenerate,
        );
        if degenerate {
            log::warn!(
                "critic evaluation had an empty precision or recall denominator; reporting 0"
            );
        }
        Self {
            p_bad,
            r_bad,
            f05_bad: f05(p_bad, r_bad),
            p_good,
            r_good,
            f05_good: f05(p_good, r_good),
            counts,
            degenerate,
        }
    }

    /// Aligned text table with values in percent.
    pub fn table(&self) -> String {
        format!(
            "{:<6} {:>6} {:>6} {:>6}\n{:<6} {:>6.1} {:>6.1} {:>6.1}\n{:<6} {:>6.1} {:>6.1} {:>6.1}\n",
            "",
            "P",
            "R",
            "F0.5",
            "bad",
            100.0 * self.p_bad,
            100.0 * self.r_bad,
            100.0 * self.f05_bad,
            "good",
            100.0 * self.p_good,
            100.0 * self.r_good,
            100.0 * self.f05_good,
        )
    }
}

/// Runs `critic` on both sides of every pair and scores it as a detector
/// of bad and of good sentences.
pub fn evaluate_critic<C: Critic + ?Sized>(
    pairs: &[SentencePair],
    critic: &C,
) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyEvalSet);
    }
    let bad: Vec<Sentence> = pairs.iter().map(|p| p.bad.clone()).collect();
    let good: Vec<Sentence> = pairs.iter().map(|p| p.good.clone()).collect();
    let bad_v = critic.judge_batch(&bad)?;
    let good_v = critic.judge_batch(&good)?;
    let mut counts = Confusion::default();
    for v in &bad_v {
        match v.label {
            Label::Bad => counts.bad_judged_bad += 1,
            Label::Good => counts.bad_judged_good += 1,
        }
    }
    for v in &good_v {
        match v.label {
            Label::Bad => counts.good_judged_bad += 1,
            Label::Good => counts.good_judged_good += 1,
        }
    }
    Ok(EvalReport::from_counts(counts))
}
