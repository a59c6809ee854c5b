//! Break-It-Fix-It: critic-filtered pair generation from unlabeled text.
//!
//! Each round applies the current fixer to the sentences the critic calls
//! bad and keeps the outputs it calls good (`P_f`), trains a breaker on those
//! pairs, applies it to the good sentences and keeps outputs the critic calls
//! bad (`P_b`), then trains the next fixer on `P_f ∪ P_b`.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critic::{CachedCritic, Critic, CriticConfig, CriticVerdict, Label, LmCritic};
use crate::error::{Error, Result};
use crate::fixbreak::{
    train_edit_model, Breaker, Direction, EditModelBreaker, EditModelFixer, EditPatternModel,
    Fixer, FixerHandle,
};
use crate::io::write_pairs;
use crate::lm::ScorerKind;
use crate::seed::{derive_seed, digest_hex};
use crate::text::{PairSource, Sentence, SentencePair};

/// The unlabeled corpus partitioned by critic verdict.
#[derive(Debug, Clone)]
pub struct CorpusSplit {
    pub d_bad: Vec<Sentence>,
    pub d_good: Vec<Sentence>,
    /// One verdict per input sentence, in input order. Empty for an
    /// unfiltered split.
    pub provenance: Vec<CriticVerdict>,
}

impl CorpusSplit {
    /// Every sentence on both sides, with no verdicts. This is what the
    /// pipeline sees when the critic is switched off.
    pub fn unfiltered(sentences: &[Sentence]) -> Self {
        Self {
            d_bad: sentences.to_vec(),
            d_good: sentences.to_vec(),
            provenance: Vec::new(),
        }
    }
}

/// Judges every sentence and partitions the corpus by label.
pub fn split_corpus<C: Critic + ?Sized>(unlabeled: &[Sentence], critic: &C) -> Result<CorpusSplit> {
    if unlabeled.is_empty() {
        log::warn!("splitting an empty corpus");
    }
    let verdicts = critic.judge_batch(unlabeled)?;
    let mut split = CorpusSplit {
        d_bad: Vec::new(),
        d_good: Vec::new(),
        provenance: Vec::with_capacity(verdicts.len()),
    };
    for (x, v) in unlabeled.iter().zip(verdicts) {
        match v.label {
            Label::Good => split.d_good.push(x.clone()),
            Label::Bad => split.d_bad.push(x.clone()),
        }
        split.provenance.push(v);
    }
    Ok(split)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    #[serde(rename = "P_f")]
    Pf,
    #[serde(rename = "P_b")]
    Pb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub pairs: Vec<SentencePair>,
    pub origin: Origin,
    pub round: usize,
}

/// What happened to the inputs of one generation step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCounts {
    pub inputs: usize,
    /// Inputs the fixer or breaker failed on; skipped.
    pub failed: usize,
    /// Outputs equal to their input; never kept.
    pub identity: usize,
    pub rejected: usize,
    pub kept: usize,
}

impl FilterCounts {
    /// Fraction of non-identity outputs the critic accepted.
    pub fn acceptance_rate(&self) -> f64 {
        let judged = self.kept + self.rejected;
        if judged == 0 {
            0.0
        } else {
            self.kept as f64 / judged as f64
        }
    }
}

/// Runs `batch` over `xs`; if it fails on local data, retries one by one and
/// skips the failures. Remote failures abort.
fn map_skipping<B, S>(xs: &[Sentence], batch: B, single: S) -> Result<Vec<Option<Sentence>>>
where
    B: Fn(&[Sentence]) -> Result<Vec<Sentence>>,
    S: Fn(&Sentence) -> Result<Sentence> + Sync,
{
    match batch(xs) {
        Ok(out) => Ok(out.into_iter().map(Some).collect()),
        Err(e) if e.is_remote() => Err(e),
        Err(_) => xs
            .par_iter()
            .map(|x| match single(x) {
                Ok(y) => Ok(Some(y)),
                Err(e) if e.is_remote() => Err(e),
                Err(e) => {
                    log::warn!("skipping {:?}: {e}", x.text());
                    Ok(None)
                }
            })
            .collect(),
    }
}

/// Keeps `(input, output)` where the output differs and the critic, if
/// any, gives the judged side the wanted label.
fn filter_pairs(
    inputs: &[Sentence],
    outputs: Vec<Option<Sentence>>,
    critic: Option<&dyn Critic>,
    origin: Origin,
    round: usize,
) -> Result<(PairDataset, FilterCounts)> {
    let mut counts = FilterCounts {
        inputs: inputs.len(),
        ..FilterCounts::default()
    };
    let mut candidates = Vec::new();
    for (x, y) in inputs.iter().zip(outputs) {
        match y {
            None => counts.failed += 1,
            Some(y) if y.text() == x.text() => counts.identity += 1,
            Some(y) => candidates.push((x, y)),
        }
    }
    let judged: Vec<Sentence> = candidates.iter().map(|(_, y)| y.clone()).collect();
    let verdicts: Vec<Option<Label>> = match critic {
        Some(c) => c
            .judge_batch(&judged)?
            .into_iter()
            .map(|v| Some(v.label))
            .collect(),
        None => vec![None; judged.len()],
    };
    let (want, source) = match origin {
        Origin::Pf => (Label::Good, PairSource::BifiFixer),
        Origin::Pb => (Label::Bad, PairSource::BifiBreaker),
    };
    let mut pairs = Vec::new();
    for ((x, y), v) in candidates.into_iter().zip(verdicts) {
        if v.is_some_and(|label| label != want) {
            counts.rejected += 1;
            continue;
        }
        counts.kept += 1;
        pairs.push(match origin {
            Origin::Pf => SentencePair::new(x.clone(), y, source),
            Origin::Pb => SentencePair::new(y, x.clone(), source),
        });
    }
    Ok((
        PairDataset {
            pairs,
            origin,
            round,
        },
        counts,
    ))
}

/// Fixes every bad sentence and keeps the non-identity fixes the critic
/// accepts.
pub fn generate_pf<F, C>(
    d_bad: &[Sentence],
    fixer: &F,
    critic: &C,
    round: usize,
) -> Result<(PairDataset, FilterCounts)>
where
    F: Fixer + ?Sized,
    C: Critic + Sized,
{
    pf_with(d_bad, fixer, Some(critic), round)
}

fn pf_with<F: Fixer + ?Sized>(
    d_bad: &[Sentence],
    fixer: &F,
    critic: Option<&dyn Critic>,
    round: usize,
) -> Result<(PairDataset, FilterCounts)> {
    let outputs = map_skipping(d_bad, |xs| fixer.fix_batch(xs), |x| fixer.fix(x))?;
    filter_pairs(d_bad, outputs, critic, Origin::Pf, round)
}

/// Breaks every good sentence and keeps the non-identity corruptions the
/// critic rejects.
pub fn generate_pb<B, C>(
    d_good: &[Sentence],
    breaker: &B,
    critic: &C,
    round: usize,
) -> Result<(PairDataset, FilterCounts)>
where
    B: Breaker + ?Sized,
    C: Critic + Sized,
{
    pb_with(d_good, breaker, Some(critic), round)
}

fn pb_with<B: Breaker + ?Sized>(
    d_good: &[Sentence],
    breaker: &B,
    critic: Option<&dyn Critic>,
    round: usize,
) -> Result<(PairDataset, FilterCounts)> {
    let outputs = map_skipping(d_good, |ys| breaker.break_batch(ys), |y| breaker.corrupt(y))?;
    filter_pairs(d_good, outputs, critic, Origin::Pb, round)
}

/// Words seen at least `min_count` times. Spelling candidates for the
/// trained fixers come from here.
pub fn corpus_vocab(sentences: &[Sentence], min_count: usize) -> HashSet<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in sentences {
        for t in &s.tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(w, _)| w.to_string())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifiConfig {
    pub rounds: usize,
    pub critic: CriticConfig,
    pub initial_fixer: FixerHandle,
    pub breaker_seed: u64,
    pub output_dir: PathBuf,
    /// Replace both critic filters (and the split) with accept-all.
    #[serde(default)]
    pub no_critic: bool,
}

impl BifiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        self.critic.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundCounts {
    pub d_bad: usize,
    pub d_good: usize,
    pub pf: FilterCounts,
    pub pb: FilterCounts,
    pub fixer_training_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceRates {
    pub pf: f64,
    pub pb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSeeds {
    pub perturber: u64,
    pub breaker: u64,
}

/// Persisted as `report.json`. Wall time is kept out of the file so that
/// identical runs write identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    pub no_critic: bool,
    pub counts: RoundCounts,
    pub acceptance_rates: AcceptanceRates,
    pub seeds: RoundSeeds,
    pub config_digest: String,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Input to one round: the split and the previous fixer.
pub struct RoundState {
    pub round: usize,
    pub split: CorpusSplit,
    pub fixer: Arc<dyn Fixer>,
}

pub struct RoundOutput {
    pub pf: PairDataset,
    pub pb: PairDataset,
    pub breaker: EditPatternModel,
    pub fixer_model: EditPatternModel,
    pub fixer: Arc<EditModelFixer>,
    pub report: RoundReport,
}

pub struct BifiOutcome {
    pub split: CorpusSplit,
    pub rounds: Vec<RoundOutput>,
}

impl BifiOutcome {
    /// The fixer trained in the last round.
    pub fn final_fixer(&self) -> Arc<EditModelFixer> {
        self.rounds
            .last()
            .expect("at least one round")
            .fixer
            .clone()
    }
}

/// A configured BIFI run.
pub struct Bifi {
    critic: LmCritic,
    filter: Option<Arc<dyn Critic>>,
    initial_fixer: Arc<dyn Fixer>,
    rounds: usize,
    breaker_seed: u64,
    no_critic: bool,
    vocab: Option<Arc<HashSet<String>>>,
    config_digest: String,
}

impl Bifi {
    pub fn new(critic: LmCritic, initial_fixer: Arc<dyn Fixer>) -> Self {
        let digest = critic.digest();
        Self {
            filter: Some(Arc::new(CachedCritic::new(critic.clone()))),
            critic,
            initial_fixer,
            rounds: 1,
            breaker_seed: 0,
            no_critic: false,
            vocab: None,
            config_digest: digest,
        }
    }

    /// Opens the critic and initial fixer named in `cfg`. A built-in
    /// scorer also supplies the spelling vocabulary.
    pub fn from_config(cfg: &BifiConfig) -> Result<Self> {
        cfg.validate()?;
        let (critic, vocab) = match cfg.critic.scorer.kind {
            ScorerKind::Builtin => {
                let lm = crate::lm::load(&cfg.critic.scorer.endpoint)?;
                let vocab: HashSet<String> = lm.vocab_words().map(str::to_string).collect();
                let critic = LmCritic::new(
                    cfg.critic.perturber.clone(),
                    Arc::new(lm),
                    cfg.critic.scorer.endpoint.clone(),
                )?
                .with_tie_tolerance(cfg.critic.tie_tolerance);
                (critic, Some(Arc::new(vocab)))
            }
            ScorerKind::External => (LmCritic::from_config(&cfg.critic)?, None),
        };
        let fixer = cfg.initial_fixer.open_fixer(&critic, vocab.clone())?;
        let mut digest_cfg = cfg.clone();
        digest_cfg.output_dir = PathBuf::new();
        let digest = digest_hex(serde_json::to_string(&digest_cfg)?.as_bytes());
        Ok(Self::new(critic, fixer)
            .rounds(cfg.rounds)
            .breaker_seed(cfg.breaker_seed)
            .no_critic(cfg.no_critic)
            .vocab(vocab)
            .config_digest(digest))
    }

    pub fn rounds(mut self, k: usize) -> Self {
        self.rounds = k;
        self
    }

    pub fn breaker_seed(mut self, seed: u64) -> Self {
        self.breaker_seed = seed;
        self
    }

    pub fn no_critic(mut self, on: bool) -> Self {
        self.no_critic = on;
        self.filter = if on {
            None
        } else {
            Some(Arc::new(CachedCritic::new(self.critic.clone())))
        };
        self
    }

    /// Words the trained fixers may spell-correct to. Defaults to the words
    /// seen at least twice in the unlabeled corpus.
    pub fn vocab(mut self, vocab: Option<Arc<HashSet<String>>>) -> Self {
        self.vocab = vocab;
        self
    }

    /// Recorded in every round report.
    pub fn config_digest(mut self, digest: impl Into<String>) -> Self {
        self.config_digest = digest.into();
        self
    }

    /// The critic used for splitting and filtering; `None` when it is
    /// switched off.
    pub fn filter(&self) -> Option<&Arc<dyn Critic>> {
        self.filter.as_ref()
    }

    pub fn split(&self, unlabeled: &[Sentence]) -> Result<CorpusSplit> {
        match &self.filter {
            Some(critic) => split_corpus(unlabeled, critic),
            None => Ok(CorpusSplit::unfiltered(unlabeled)),
        }
    }

    /// Splits once, then runs every round. With `output_dir`, each round is
    /// persisted under `round_k/` before the next starts.
    pub fn run(&self, unlabeled: &[Sentence], output_dir: Option<&Path>) -> Result<BifiOutcome> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        let split = self.split(unlabeled)?;
        let vocab = self
            .vocab
            .clone()
            .unwrap_or_else(|| Arc::new(corpus_vocab(unlabeled, 2)));
        let mut state = RoundState {
            round: 1,
            split,
            fixer: self.initial_fixer.clone(),
        };
        let mut rounds = Vec::with_capacity(self.rounds);
        for k in 1..=self.rounds {
            state.round = k;
            let out = self.run_round(&state, vocab.clone())?;
            if let Some(dir) = output_dir {
                persist_round(dir, &out)?;
            }
            log::info!(
                "round {k}: {} P_f pairs, {} P_b pairs in {:.1?}",
                out.pf.pairs.len(),
                out.pb.pairs.len(),
                out.report.wall_time
            );
            state.fixer = out.fixer.clone();
            rounds.push(out);
        }
        Ok(BifiOutcome {
            split: state.split,
            rounds,
        })
    }

    /// Fix, train breaker, break, train fixer.
    pub fn run_round(
        &self,
        state: &RoundState,
        vocab: Arc<HashSet<String>>,
    ) -> Result<RoundOutput> {
        let start = Instant::now();
        let k = state.round;
        let (pf, pf_counts) = pf_with(
            &state.split.d_bad,
            state.fixer.as_ref(),
            self.filter.as_deref(),
            k,
        )?;
        let breaker = train_edit_model(&pf.pairs, Direction::GoodToBad)?;
        let breaker_seed = derive_seed(self.breaker_seed, &format!("round{k}"));
        let (pb, pb_counts) = pb_with(
            &state.split.d_good,
            &EditModelBreaker::new(breaker.clone(), breaker_seed),
            self.filter.as_deref(),
            k,
        )?;
        let training: Vec<SentencePair> = pf.pairs.iter().chain(&pb.pairs).cloned().collect();
        let fixer_model = train_edit_model(&training, Direction::BadToGood)?;
        let fixer = Arc::new(EditModelFixer::new(
            fixer_model.clone(),
            self.critic.scorer().clone(),
            Some(vocab),
        ));
        let report = RoundReport {
            round: k,
            no_critic: self.no_critic,
            counts: RoundCounts {
                d_bad: state.split.d_bad.len(),
                d_good: state.split.d_good.len(),
                pf: pf_counts,
                pb: pb_counts,
                fixer_training_pairs: training.len(),
            },
            acceptance_rates: AcceptanceRates {
                pf: pf_counts.acceptance_rate(),
                pb: pb_counts.acceptance_rate(),
            },
            seeds: RoundSeeds {
                perturber: self.critic.perturber().seed,
                breaker: breaker_seed,
            },
            config_digest: self.config_digest.clone(),
            wall_time: start.elapsed(),
        };
        Ok(RoundOutput {
            pf,
            pb,
            breaker,
            fixer_model,
            fixer,
            report,
        })
    }
}

/// Writes `round_k/` through a scratch directory so a failed write leaves
/// nothing behind.
fn persist_round(dir: &Path, out: &RoundOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let k = out.report.round;
    let final_dir = dir.join(format!("round_{k}"));
    let partial = dir.join(format!(".round_{k}.partial"));
    let write = || -> Result<()> {
        if partial.exists() {
            std::fs::remove_dir_all(&partial)?;
        }
        std::fs::create_dir_all(&partial)?;
        write_pairs(partial.join("pf.jsonl"), &out.pf.pairs)?;
        write_pairs(partial.join("pb.jsonl"), &out.pb.pairs)?;
        out.breaker.save(partial.join("breaker.json"))?;
        out.fixer_model.save(partial.join("fixer.json"))?;
        let mut report = serde_json::to_string_pretty(&out.report)?;
        report.push('\n');
        std::fs::write(partial.join("report.json"), report)?;
        if final_dir.exists() {
            std::fs::remove_dir_all(&final_dir)?;
        }
        std::fs::rename(&partial, &final_dir)?;
        Ok(())
    };
    let result = write();
    if result.is_err() {
        let _ = std::fs::remove_dir_all(&partial);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixbreak::Identity;
    use crate::lm::LmModel;
    use crate::perturb::{PerturbMode, PerturberConfig};

    fn critic() -> LmCritic {
        let corpus: Vec<Sentence> = [
            "the cat sat .",
            "the dog sat .",
            "a cat ran .",
            "the cat ran .",
        ]
        .iter()
        .cycle()
        .take(40)
        .map(|s| Sentence::new(*s))
        .collect();
        let lm = LmModel::train(&corpus, 3).unwrap();
        LmCritic::new(
            PerturberConfig::new(PerturbMode::Ed1Word, 200, 1),
            Arc::new(lm),
            "desk",
        )
        .unwrap()
    }

    struct Failing;
    impl Fixer for Failing {
        fn fix(&self, x: &Sentence) -> Result<Sentence> {
            if x.text().contains("caat") {
                Err(Error::InvalidEdit("no".into()))
            } else {
                Ok(Sentence::new("the cat sat."))
            }
        }
    }

    #[test]
    fn split_partitions_by_verdict() {
        let c = critic();
        let xs: Vec<Sentence> = ["the cat sat .", "the caat sat .", "the dog ran ."]
            .iter()
            .map(|s| Sentence::new(*s))
            .collect();
        let split = split_corpus(&xs, &c).unwrap();
        assert_eq!(split.d_bad.len() + split.d_good.len(), 3);
        assert_eq!(split.provenance.len(), 3);
        assert!(split.d_bad.iter().any(|s| s.text() == "the caat sat."));
        assert!(split_corpus(&[], &c).unwrap().provenance.is_empty());
    }

    #[test]
    fn identity_outputs_are_never_kept() {
        let c = critic();
        let xs = vec![Sentence::new("the caat sat .")];
        let (pf, counts) = generate_pf(&xs, &Identity, &c, 1).unwrap();
        assert!(pf.pairs.is_empty());
        assert_eq!(counts.identity, 1);
        let (pb, counts) = pb_with(&xs, &Identity, None, 1).unwrap();
        assert!(pb.pairs.is_empty());
        assert_eq!(counts.identity, 1);
    }

    #[test]
    fn failures_are_skipped_and_counted() {
        let c = critic();
        let xs: Vec<Sentence> = ["the caat sat .", "teh cat sat ."]
            .iter()
            .map(|s| Sentence::new(*s))
            .collect();
        let (pf, counts) = generate_pf(&xs, &Failing, &c, 2).unwrap();
        assert_eq!(counts.failed, 1);
        assert_eq!(counts.kept, 1);
        assert_eq!(pf.pairs[0].good.text(), "the cat sat.");
        assert_eq!(pf.round, 2);
        assert_eq!(counts.acceptance_rate(), 1.0);
    }

    #[test]
    fn breaker_outputs_judged_good_are_dropped() {
        struct ToDog;
        impl Breaker for ToDog {
            fn corrupt(&self, _y: &Sentence) -> Result<Sentence> {
                Ok(Sentence::new("the dog sat."))
            }
        }
        let c = critic();
        let (pb, counts) = generate_pb(&[Sentence::new("the cat sat.")], &ToDog, &c, 1).unwrap();
        assert!(pb.pairs.is_empty());
        assert_eq!(counts.rejected, 1);
        assert_eq!(counts.acceptance_rate(), 0.0);
    }
}
