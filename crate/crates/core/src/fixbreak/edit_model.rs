//! Categorical models over token-edit templates.
//!
//! Training pairs are aligned with [`extract_edits`] and each edit is
//! abstracted into a [`Template`]. Closed-class words stay literal; edits
//! between two open-class words become a suffix toggle or a spelling edit
//! when they look like one, so the model can apply them to words it never
//! saw in training.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixbreak::{resentence, Breaker, Fixer};
use crate::lm::Scorer;
use crate::perturb::{default_alphabet, ed1_enumerate};
use crate::seed::rng_for;
use crate::text::{detokenize, extract_edits, EditKind, EditOp, Sentence, SentencePair};

pub const EDIT_MODEL_VERSION: u32 = 1;
const FORMAT_NAME: &str = "edit-pattern-model";

const ARTICLES: &[&str] = &["a", "an", "the"];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "to", "for", "of", "with", "from", "by", "about", "into", "over",
];
const AUXILIARIES: &[&str] = &[
    "is", "are", "am", "was", "were", "be", "been", "has", "have", "had", "do", "does", "did",
    "will", "can",
];
const OTHER_CLOSED: &[&str] = &[
    "not", "never", "no", "their", "there", "they're", "its", "it's", "then", "than",
];
const SUFFIXES: &[&str] = &["", "s", "es", "ed", "ing"];
const MIN_STEM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    GoodToBad,
    BadToGood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenClass {
    Article,
    Preposition,
    Auxiliary,
    SuffixToggle,
    Spelling,
    Literal,
}

impl TokenClass {
    pub fn of(token: &str) -> TokenClass {
        if ARTICLES.contains(&token) {
            TokenClass::Article
        } else if PREPOSITIONS.contains(&token) {
            TokenClass::Preposition
        } else if AUXILIARIES.contains(&token) {
            TokenClass::Auxiliary
        } else {
            TokenClass::Literal
        }
    }
}

/// Alphabetic word outside the closed classes.
fn is_open(token: &str) -> bool {
    !token.is_empty()
        && token.chars().all(char::is_alphabetic)
        && TokenClass::of(token) == TokenClass::Literal
        && !OTHER_CLOSED.contains(&token)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Template {
    Insert {
        token: String,
    },
    Delete {
        token: String,
    },
    Substitute {
        before: String,
        after: String,
    },
    /// Replace the ending `from` of an open-class word with `to`.
    SuffixToggle {
        from: String,
        to: String,
    },
    /// One character edit turning an open-class word into another.
    CharEdit,
}

impl Template {
    pub fn from_edit(op: &EditOp) -> Template {
        let before = op.before.clone().unwrap_or_default();
        let after = op.after.clone().unwrap_or_default();
        match op.kind {
            EditKind::Insert => Template::Insert { token: after },
            EditKind::Delete => Template::Delete { token: before },
            EditKind::Substitute => {
                if is_open(&before) && is_open(&after) {
                    if let Some((from, to)) = suffix_toggle(&before, &after) {
                        return Template::SuffixToggle { from, to };
                    }
                    if damerau1(&before, &after) {
                        return Template::CharEdit;
                    }
                }
                Template::Substitute { before, after }
            }
        }
    }

    pub fn class(&self) -> TokenClass {
        match self {
            Template::Insert { token } | Template::Delete { token } => TokenClass::of(token),
            Template::Substitute { before, .. } => TokenClass::of(before),
            Template::SuffixToggle { .. } => TokenClass::SuffixToggle,
            Template::CharEdit => TokenClass::Spelling,
        }
    }

    /// Positions where the template applies: gaps for insertions, token
    /// indices otherwise.
    pub fn sites(&self, tokens: &[String]) -> Vec<usize> {
        match self {
            Template::Insert { .. } => (0..=tokens.len()).collect(),
            Template::Delete { token } | Template::Substitute { before: token, .. } => {
                (0..tokens.len()).filter(|&i| &tokens[i] == token).collect()
            }
            Template::SuffixToggle { from, to } => (0..tokens.len())
                .filter(|&i| toggled(&tokens[i], from, to).is_some())
                .collect(),
            Template::CharEdit => (0..tokens.len())
                .filter(|&i| is_open(&tokens[i]) && tokens[i].chars().count() >= 2)
                .collect(),
        }
    }
}

fn toggled(word: &str, from: &str, to: &str) -> Option<String> {
    if !is_open(word) {
        return None;
    }
    let stem = word.strip_suffix(from)?;
    (stem.chars().count() >= MIN_STEM).then(|| format!("{stem}{to}"))
}

/// The suffix swap relating two words, taking the longest shared stem.
fn suffix_toggle(before: &str, after: &str) -> Option<(String, String)> {
    let mut best: Option<(usize, &str, &str)> = None;
    for &from in SUFFIXES {
        for &to in SUFFIXES {
            if from == to {
                continue;
            }
            let (Some(a), Some(b)) = (before.strip_suffix(from), after.strip_suffix(to)) else {
                continue;
            };
            let len = a.chars().count();
            if a == b && len >= MIN_STEM && best.is_none_or(|(l, _, _)| len > l) {
                best = Some((len, from, to));
            }
        }
    }
    best.map(|(_, f, t)| (f.to_string(), t.to_string()))
}

/// True if one insertion, deletion, substitution or adjacent swap of
/// characters turns `a` into `b`.
fn damerau1(a: &str, b: &str) -> bool {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let prefix = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (ra, rb) = (a.len() - prefix - suffix, b.len() - prefix - suffix);
    match (ra, rb) {
        (1, 0) | (0, 1) | (1, 1) => true,
        (2, 2) => a[prefix] == b[prefix + 1] && a[prefix + 1] == b[prefix],
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub template: Template,
    pub class: TokenClass,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditPatternModel {
    pub format: String,
    pub version: u32,
    pub direction: Direction,
    pub alpha: f64,
    pub max_edits_per_sentence: usize,
    /// `edits_per_pair[k - 1]` counts training pairs with `k` edits, the
    /// last bucket absorbing everything longer.
    pub edits_per_pair: Vec<u64>,
    /// Sorted by template.
    pub patterns: Vec<Pattern>,
}

/// Counts edit templates over `pairs`, oriented by `direction`.
pub fn train_edit_model(pairs: &[SentencePair], direction: Direction) -> Result<EditPatternModel> {
    EditPatternModel::train(pairs, direction, 0.5, 2)
}

impl EditPatternModel {
    pub fn train(
        pairs: &[SentencePair],
        direction: Direction,
        alpha: f64,
        max_edits: usize,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !(alpha > 0.0 && alpha.is_finite()) || max_edits == 0 {
            return Err(Error::InvalidConfig(
                "edit model needs alpha > 0 and max_edits_per_sentence >= 1".into(),
            ));
        }
        let mut counts: BTreeMap<Template, u64> = BTreeMap::new();
        let mut edits_per_pair = vec![0u64; max_edits];
        for pair in pairs {
            let (src, tgt) = match direction {
                Direction::GoodToBad => (&pair.good, &pair.bad),
                Direction::BadToGood => (&pair.bad, &pair.good),
            };
            let script = extract_edits(&src.tokens, &tgt.tokens);
            if script.is_empty() {
                continue;
            }
            edits_per_pair[script.len().min(max_edits) - 1] += 1;
            for op in &script.ops {
                *counts.entry(Template::from_edit(op)).or_default() += 1;
            }
        }
        Ok(Self {
            format: FORMAT_NAME.into(),
            version: EDIT_MODEL_VERSION,
            direction,
            alpha,
            max_edits_per_sentence: max_edits,
            edits_per_pair,
            patterns: counts
                .into_iter()
                .map(|(template, count)| Pattern {
                    class: template.class(),
                    template,
                    count,
                })
                .collect(),
        })
    }

    pub fn total(&self) -> u64 {
        self.patterns.iter().map(|p| p.count).sum()
    }

    pub fn count(&self, t: &Template) -> u64 {
        self.patterns
            .binary_search_by(|p| p.template.cmp(t))
            .map_or(0, |i| self.patterns[i].count)
    }

    /// Smoothed probability of pattern `i` among the known templates.
    pub fn prob(&self, i: usize) -> f64 {
        let n = self.patterns.len() as f64;
        (self.patterns[i].count as f64 + self.alpha) / (self.total() as f64 + self.alpha * n)
    }

    pub fn top(&self) -> Option<&Pattern> {
        self.patterns
            .iter()
            .max_by(|a, b| a.count.cmp(&b.count).then(b.template.cmp(&a.template)))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("edit model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: EditPatternModel = serde_json::from_str(s)?;
        if m.format != FORMAT_NAME {
            return Err(Error::InvalidConfig(format!(
                "not an edit model file (format {:?})",
                m.format
            )));
        }
        if m.version != EDIT_MODEL_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported edit model version: expected {EDIT_MODEL_VERSION}, found {}",
                m.version
            )));
        }
        if m.max_edits_per_sentence == 0 || m.edits_per_pair.len() != m.max_edits_per_sentence {
            return Err(Error::InvalidConfig(
                "edit model has inconsistent edit-count buckets".into(),
            ));
        }
        if !m.patterns.windows(2).all(|w| w[0].template < w[1].template) {
            return Err(Error::InvalidConfig(
                "edit model patterns are not sorted and unique".into(),
            ));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn sample_edit_count<R: Rng>(&self, rng: &mut R) -> usize {
        match WeightedIndex::new(&self.edits_per_pair) {
            Ok(dist) => dist.sample(rng) + 1,
            Err(_) => 1,
        }
    }
}

/// Applies one template at `site`. Spelling edits draw a random variant.
fn apply_template<R: Rng>(t: &Template, tokens: &mut Vec<String>, site: usize, rng: &mut R) {
    match t {
        Template::Insert { token } => tokens.insert(site, token.clone()),
        Template::Delete { .. } => {
            tokens.remove(site);
        }
        Template::Substitute { after, .. } => tokens[site] = after.clone(),
        Template::SuffixToggle { from, to } => {
            if let Some(w) = toggled(&tokens[site], from, to) {
                tokens[site] = w;
            }
        }
        Template::CharEdit => {
            let options: Vec<String> = ed1_enumerate(&tokens[site], &default_alphabet())
                .into_iter()
                .collect();
            if !options.is_empty() {
                tokens[site] = options[rng.random_range(0..options.len())].clone();
            }
        }
    }
}

/// Samples up to the model's edit budget of templates, each at a uniformly
/// chosen applicable site. Returns `x` unchanged when nothing applies.
pub fn apply_model(m: &EditPatternModel, x: &Sentence, seed: u64) -> Sentence {
    let mut rng = rng_for(seed, &format!("apply\u{1f}{}", x.text()));
    let mut tokens = x.tokens.clone();
    let k = m.sample_edit_count(&mut rng);
    for _ in 0..k {
        let sites: Vec<Vec<usize>> = m
            .patterns
            .iter()
            .map(|p| p.template.sites(&tokens))
            .collect();
        let weights: Vec<f64> = sites
            .iter()
            .enumerate()
            .map(|(i, s)| if s.is_empty() { 0.0 } else { m.prob(i) })
            .collect();
        let Ok(dist) = WeightedIndex::new(&weights) else {
            break;
        };
        let i = dist.sample(&mut rng);
        let site = sites[i][rng.random_range(0..sites[i].len())];
        apply_template(&m.patterns[i].template, &mut tokens, site, &mut rng);
    }
    resentence(&tokens, &x.id)
}

/// Breaker that samples from a good-to-bad model.
#[derive(Debug, Clone)]
pub struct EditModelBreaker {
    model: Arc<EditPatternModel>,
    seed: u64,
}

impl EditModelBreaker {
    pub fn new(model: EditPatternModel, seed: u64) -> Self {
        Self {
            model: Arc::new(model),
            seed,
        }
    }
}

impl Breaker for EditModelBreaker {
    fn corrupt(&self, y: &Sentence) -> Result<Sentence> {
        Ok(apply_model(&self.model, y, self.seed))
    }
}

/// Noisy-channel fixer over a bad-to-good model.
///
/// Each step enumerates every single-template edit of the current sentence
/// and moves to the one maximizing `LM(y) + prior_weight * ln P(edit)`,
/// provided that beats `LM(current)`. `P(edit)` is the chance that sampling
/// from the model, as [`apply_model`] does, produces that edit: the template
/// probability split evenly over its sites and, for spelling edits, over the
/// character variants. Spelling candidates are restricted to words in
/// `vocab`; without a vocabulary they are skipped.
pub struct EditModelFixer {
    model: EditPatternModel,
    scorer: Arc<dyn Scorer>,
    vocab: Option<Arc<HashSet<String>>>,
    pub prior_weight: f64,
    /// Templates seen fewer times than this are not proposed.
    pub min_count: u64,
    /// Split template probabilities over sites and variants. When off,
    /// every edit gets its template's full probability.
    pub site_prior: bool,
}

impl EditModelFixer {
    pub fn new(
        model: EditPatternModel,
        scorer: Arc<dyn Scorer>,
        vocab: Option<Arc<HashSet<String>>>,
    ) -> Self {
        Self {
            model,
            scorer,
            vocab,
            prior_weight: 1.0,
            min_count: 1,
            site_prior: true,
        }
    }

    pub fn model(&self) -> &EditPatternModel {
        &self.model
    }

    /// Every single-edit rewrite of `tokens`, keyed by canonical text, with
    /// the best log prior among templates producing it.
    pub fn candidates(&self, tokens: &[String]) -> BTreeMap<String, f64> {
        let mut out: BTreeMap<String, f64> = BTreeMap::new();
        let mut push = |toks: &[String], lp: f64| {
            let text = detokenize(toks);
            let e = out.entry(text).or_insert(f64::NEG_INFINITY);
            if lp > *e {
                *e = lp;
            }
        };
        for (i, p) in self.model.patterns.iter().enumerate() {
            if p.count < self.min_count {
                continue;
            }
            let sites = p.template.sites(tokens);
            let mut lp = self.model.prob(i).ln();
            if self.site_prior && !sites.is_empty() {
                lp -= (sites.len() as f64).ln();
            }
            for site in sites {
                let mut toks = tokens.to_vec();
                match &p.template {
                    Template::CharEdit => {
                        let Some(vocab) = &self.vocab else { break };
                        let variants = ed1_enumerate(&tokens[site], &default_alphabet());
                        let lp = if self.site_prior {
                            lp - (variants.len().max(1) as f64).ln()
                        } else {
                            lp
                        };
                        for w in variants {
                            if is_open(&w) && vocab.contains(&w) {
                                toks[site] = w;
                                push(&toks, lp);
                            }
                        }
                    }
                    Template::Insert { token } => {
                        toks.insert(site, token.clone());
                        push(&toks, lp);
                    }
                    Template::Delete { .. } => {
                        toks.remove(site);
                        push(&toks, lp);
                    }
                    Template::Substitute { after, .. } => {
                        toks[site] = after.clone();
                        push(&toks, lp);
                    }
                    Template::SuffixToggle { from, to } => {
                        if let Some(w) = toggled(&tokens[site], from, to) {
                            toks[site] = w;
                            push(&toks, lp);
                        }
                    }
                }
            }
        }
        out.remove(&detokenize(tokens));
        out
    }
}

impl Fixer for EditModelFixer {
    fn fix(&self, x: &Sentence) -> Result<Sentence> {
        let mut current = resentence(&x.tokens, &x.id);
        let mut current_lp = self.scorer.score(&current)?.logprob;
        for _ in 0..self.model.max_edits_per_sentence {
            let cands = self.candidates(&current.tokens);
            if cands.is_empty() {
                break;
            }
            let batch: Vec<Sentence> = cands.keys().map(|t| Sentence::new(t.as_str())).collect();
            let scores = self.scorer.score_batch(&batch)?;
            let mut best: Option<(usize, f64, f64)> = None;
            for (i, (s, lp)) in scores.iter().zip(cands.values()).enumerate() {
                let total = s.logprob + self.prior_weight * lp;
                if best.is_none_or(|(_, b, _)| total > b) {
                    best = Some((i, total, s.logprob));
                }
            }
            match best {
                Some((i, total, lm)) if total > current_lp => {
                    current = batch[i].clone();
                    current.id = x.id.clone();
                    current_lp = lm;
                }
                _ => break,
            }
        }
        Ok(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lm::LmModel;
    use crate::text::{token_distance, PairSource};

    fn pair(bad: &str, good: &str) -> SentencePair {
        SentencePair::new(
            Sentence::new(bad),
            Sentence::new(good),
            PairSource::Synthetic,
        )
    }

    fn a_to_an() -> EditPatternModel {
        let pairs = vec![
            pair("a apple fell .", "an apple fell ."),
            pair("I saw a owl .", "I saw an owl ."),
        ];
        train_edit_model(&pairs, Direction::BadToGood).unwrap()
    }

    #[test]
    fn templates_abstract_open_class_edits() {
        let t = |b: &str, a: &str| Template::from_edit(&EditOp::substitute(0, b, a));
        assert_eq!(
            t("cat", "cats"),
            Template::SuffixToggle {
                from: "".into(),
                to: "s".into()
            }
        );
        assert_eq!(
            t("walks", "walked"),
            Template::SuffixToggle {
                from: "s".into(),
                to: "ed".into()
            }
        );
        assert_eq!(t("recieve", "receive"), Template::CharEdit);
        assert_eq!(t("houes", "house"), Template::CharEdit);
        assert_eq!(
            t("a", "an"),
            Template::Substitute {
                before: "a".into(),
                after: "an".into()
            }
        );
        assert_eq!(
            t("dog", "piano"),
            Template::Substitute {
                before: "dog".into(),
                after: "piano".into()
            }
        );
        assert_eq!(t("in", "on").class(), TokenClass::Preposition);
        assert!(
            damerau1("ab", "ba")
                && damerau1("abc", "abxc")
                && !damerau1("abc", "cab")
                && !damerau1("a", "a")
        );
    }

    #[test]
    fn forced_top_pattern_and_application() {
        let m = a_to_an();
        assert_eq!(m.direction, Direction::BadToGood);
        let top = m.top().unwrap();
        assert_eq!(
            top.template,
            Template::Substitute {
                before: "a".into(),
                after: "an".into()
            }
        );
        assert_eq!(top.count, 2);
        assert_eq!(
            apply_model(&m, &Sentence::new("the cat"), 1).text(),
            "the cat"
        );
        assert_eq!(apply_model(&m, &Sentence::new("a cat"), 1).text(), "an cat");
        let sum: f64 = (0..m.patterns.len()).map(|i| m.prob(i)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_training_set() {
        assert!(matches!(
            train_edit_model(&[], Direction::GoodToBad),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let m = train_edit_model(
            &[
                pair("he walk home .", "he walks home ."),
                pair("the cat sat", "the cat sat ."),
            ],
            Direction::GoodToBad,
        )
        .unwrap();
        let back = EditPatternModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let bumped = m.to_json().replace("\"version\": 1", "\"version\": 9");
        match EditPatternModel::from_json(&bumped) {
            Err(Error::InvalidConfig(msg)) => assert!(msg.contains("found 9")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn breaker_stays_within_budget() {
        let m = train_edit_model(
            &[
                pair("he walk to the home .", "he walks home ."),
                pair("cat sat on mat .", "the cat sat on the mat ."),
                pair("she recieve it .", "she receives it ."),
            ],
            Direction::GoodToBad,
        )
        .unwrap();
        let y = Sentence::new("the dog walks to the park with a ball .");
        for seed in 0..50 {
            let x = apply_model(&m, &y, seed);
            assert!(token_distance(&y.tokens, &x.tokens) <= m.max_edits_per_sentence);
            assert_eq!(apply_model(&m, &y, seed), x);
        }
    }

    #[test]
    fn prior_is_split_over_sites() {
        let m = a_to_an();
        let lm = LmModel::train(&[Sentence::new("an owl .")], 2).unwrap();
        let toks: Vec<String> = ["a", "owl", "a"].iter().map(|t| t.to_string()).collect();
        let base = m.prob(0).ln();
        let mut fixer = EditModelFixer::new(m, Arc::new(lm), None);
        let split = fixer.candidates(&toks);
        assert_eq!(split.len(), 2);
        assert!(split
            .values()
            .all(|lp| (lp - (base - 2f64.ln())).abs() < 1e-12));
        fixer.site_prior = false;
        assert!(fixer
            .candidates(&toks)
            .values()
            .all(|lp| (lp - base).abs() < 1e-12));
    }

    #[test]
    fn fixer_repairs_with_learned_patterns() {
        let corpus: Vec<Sentence> = [
            "an apple fell .",
            "an owl sat .",
            "a cat sat .",
            "the owl fell .",
        ]
        .iter()
        .cycle()
        .take(40)
        .map(|s| Sentence::new(*s))
        .collect();
        let lm = LmModel::train(&corpus, 3).unwrap();
        let vocab: HashSet<String> = lm.vocab_words().map(str::to_string).collect();
        let fixer = EditModelFixer::new(a_to_an(), Arc::new(lm), Some(Arc::new(vocab)));
        assert_eq!(
            fixer.fix(&Sentence::new("a owl fell .")).unwrap().text(),
            "an owl fell."
        );
        assert_eq!(
            fixer.fix(&Sentence::new("a cat sat .")).unwrap().text(),
            "a cat sat."
        );
    }
}
