//! Sentence neighborhoods: character edit-distance-one variants plus
//! dictionary-driven word-level edits, sampled without replacement.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::text::{canonicalize, detokenize, Sentence};

const DEFAULT_DICTS: &str = include_str!("../assets/word_dicts.json");

/// Lowercase ASCII letters, the insertion/replacement alphabet for typos.
pub fn default_alphabet() -> Vec<char> {
    ('a'..='z').collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbMode {
    /// Character edits only.
    Ed1,
    /// Character edits plus every word heuristic, including ones that can
    /// flip the meaning of the sentence.
    Ed1WordAll,
    /// Character edits plus meaning-preserving word heuristics.
    Ed1Word,
}

impl PerturbMode {
    pub fn uses_words(self) -> bool {
        !matches!(self, PerturbMode::Ed1)
    }

    pub fn keeps_meaning(self) -> bool {
        matches!(self, PerturbMode::Ed1Word)
    }
}

impl std::str::FromStr for PerturbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ed1" => Ok(PerturbMode::Ed1),
            "ed1_word_all" => Ok(PerturbMode::Ed1WordAll),
            "ed1_word" => Ok(PerturbMode::Ed1Word),
            other => Err(Error::InvalidConfig(format!(
                "unknown perturbation mode {other:?} (expected ed1, ed1_word_all or ed1_word)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordDicts {
    pub insertable: Vec<String>,
    pub deletable: Vec<String>,
    pub replaceable: BTreeMap<String, Vec<String>>,
    pub meaning_altering: Vec<String>,
}

impl Default for WordDicts {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_DICTS).expect("bundled dictionary asset is valid")
    }
}

impl WordDicts {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let dicts: WordDicts = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        dicts.validate()?;
        Ok(dicts)
    }

    /// Every meaning-altering word must be reachable by some heuristic so
    /// that the two word modes actually differ.
    pub fn validate(&self) -> Result<()> {
        for word in &self.meaning_altering {
            let covered = self.insertable.contains(word)
                || self.deletable.contains(word)
                || self.replaceable.contains_key(word);
            if !covered {
                return Err(Error::InvalidConfig(format!(
                    "meaning-altering word {word:?} is not insertable, deletable or replaceable"
                )));
            }
        }
        Ok(())
    }

    fn is_meaning_altering(&self, word: &str) -> bool {
        self.meaning_altering.iter().any(|w| w == word)
    }

    /// The dictionaries with meaning-altering entries removed everywhere.
    pub fn without_meaning_altering(&self) -> WordDicts {
        let keep = |w: &String| !self.is_meaning_altering(w);
        WordDicts {
            insertable: self
                .insertable
                .iter()
                .filter(|w| keep(w))
                .cloned()
                .collect(),
            deletable: self.deletable.iter().filter(|w| keep(w)).cloned().collect(),
            replaceable: self
                .replaceable
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.iter().filter(|w| keep(w)).cloned().collect()))
                .collect(),
            meaning_altering: self.meaning_altering.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturberConfig {
    pub mode: PerturbMode,
    pub sample_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub dictionaries: WordDicts,
}

impl Default for PerturberConfig {
    fn default() -> Self {
        Self {
            mode: PerturbMode::Ed1Word,
            sample_size: 100,
            seed: 0,
            dictionaries: WordDicts::default(),
        }
    }
}

impl PerturberConfig {
    pub fn new(mode: PerturbMode, sample_size: usize, seed: u64) -> Self {
        Self {
            mode,
            sample_size,
            seed,
            dictionaries: WordDicts::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(Error::InvalidConfig(
                "sample_size must be at least 1".into(),
            ));
        }
        if self.mode == PerturbMode::Ed1WordAll {
            self.dictionaries.validate()?;
        }
        Ok(())
    }

    /// The same configuration with the seed derived for one sentence.
    pub fn for_sentence(&self, text: &str) -> PerturberConfig {
        PerturberConfig {
            seed: seed::derive_seed(self.seed, text),
            ..self.clone()
        }
    }
}

/// The sampled neighborhood of a sentence. Variants are canonical strings,
/// distinct and different from the center's canonical text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub center: Sentence,
    pub variants: Vec<String>,
}

/// All strings at character edit distance one from `s` under insertion of
/// an alphabet letter, deletion, replacement by a different alphabet letter,
/// and swapping two adjacent distinct characters. `s` itself is excluded.
pub fn ed1_enumerate(s: &str, alphabet: &[char]) -> BTreeSet<String> {
    let chars: Vec<char> = s.chars().collect();
    let n = chars.len();
    let mut out = BTreeSet::new();
    let mut buf: Vec<char> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        for &c in alphabet {
            buf.clear();
            buf.extend_from_slice(&chars[..i]);
            buf.push(c);
            buf.extend_from_slice(&chars[i..]);
            out.insert(buf.iter().collect());
        }
    }
    for i in 0..n {
        buf.clear();
        buf.extend_from_slice(&chars[..i]);
        buf.extend_from_slice(&chars[i + 1..]);
        out.insert(buf.iter().collect());
        for &c in alphabet {
            if c != chars[i] {
                buf.clear();
                buf.extend_from_slice(&chars);
                buf[i] = c;
                out.insert(buf.iter().collect());
            }
        }
        if i + 1 < n && chars[i] != chars[i + 1] {
            buf.clear();
            buf.extend_from_slice(&chars);
            buf.swap(i, i + 1);
            out.insert(buf.iter().collect());
        }
    }
    out.remove(s);
    out
}

fn is_alphabetic(token: &str) -> bool {
    !token.is_empty() && token.chars().all(char::is_alphabetic)
}

/// Suffix toggles for one token: add or strip a final "s", and swap among
/// the "", "ed" and "ing" endings when the stem has at least three letters.
pub fn morph_variants(token: &str) -> Vec<String> {
    if !is_alphabetic(token) {
        return Vec::new();
    }
    let mut out = Vec::new();
    match token.strip_suffix('s') {
        Some(stem) if !stem.is_empty() => out.push(stem.to_string()),
        Some(_) => {}
        None => out.push(format!("{token}s")),
    }
    let (stem, suffix) = if let Some(stem) = token.strip_suffix("ing") {
        (stem, "ing")
    } else if let Some(stem) = token.strip_suffix("ed") {
        (stem, "ed")
    } else {
        (token, "")
    };
    if stem.chars().count() >= 3 {
        for alt in ["", "ed", "ing"] {
            if alt != suffix {
                out.push(format!("{stem}{alt}"));
            }
        }
    }
    out.retain(|v| v != token);
    out
}

/// Word-level variants of `x`: dictionary insertions, deletions and
/// replacements plus suffix toggles. Output is detokenized and excludes
/// the sentence itself.
pub fn word_perturb_enumerate(
    x: &Sentence,
    dicts: &WordDicts,
    include_meaning_altering: bool,
) -> BTreeSet<String> {
    let filtered;
    let dicts = if include_meaning_altering {
        dicts
    } else {
        filtered = dicts.without_meaning_altering();
        &filtered
    };
    let tokens = &x.tokens;
    let mut out = BTreeSet::new();
    if tokens.is_empty() {
        return out;
    }
    let mut buf: Vec<&str> = Vec::with_capacity(tokens.len() + 1);
    let mut emit = |buf: &[&str]| {
        out.insert(detokenize(buf));
    };
    for gap in 0..=tokens.len() {
        for word in &dicts.insertable {
            buf.clear();
            buf.extend(tokens[..gap].iter().map(String::as_str));
            buf.push(word);
            buf.extend(tokens[gap..].iter().map(String::as_str));
            emit(&buf);
        }
    }
    for (i, token) in tokens.iter().enumerate() {
        let mut replace = |with: Option<&str>| {
            let mut edited: Vec<&str> = Vec::with_capacity(tokens.len());
            edited.extend(tokens[..i].iter().map(String::as_str));
            edited.extend(with);
            edited.extend(tokens[i + 1..].iter().map(String::as_str));
            emit(&edited);
        };
        if dicts.deletable.contains(token) {
            replace(None);
        }
        if let Some(candidates) = dicts.replaceable.get(token) {
            for cand in candidates {
                replace(Some(cand));
            }
        }
        for morph in morph_variants(token) {
            replace(Some(&morph));
        }
    }
    out.remove(&x.text());
    out
}

fn meaning_altering_counts<'a>(
    tokens: impl Iterator<Item = &'a str>,
    dicts: &WordDicts,
) -> Vec<usize> {
    let mut counts = vec![0; dicts.meaning_altering.len()];
    for tok in tokens {
        if let Some(i) = dicts.meaning_altering.iter().position(|w| w == tok) {
            counts[i] += 1;
        }
    }
    counts
}

/// The full, sorted perturbation space of `x` for `cfg.mode`, as canonical
/// strings excluding the center. In meaning-preserving mode, variants that
/// change how often a meaning-altering word occurs are dropped, whichever
/// heuristic produced them.
pub fn perturbation_space(x: &Sentence, cfg: &PerturberConfig) -> Vec<String> {
    let center = x.text();
    let mut raw = ed1_enumerate(&center, &default_alphabet());
    if cfg.mode.uses_words() {
        raw.extend(word_perturb_enumerate(
            x,
            &cfg.dictionaries,
            !cfg.mode.keeps_meaning(),
        ));
    }
    let mut space: BTreeSet<String> = raw.iter().map(|v| canonicalize(v)).collect();
    space.remove(&center);
    if cfg.mode.keeps_meaning() {
        let dicts = &cfg.dictionaries;
        let reference = meaning_altering_counts(x.tokens.iter().map(String::as_str), dicts);
        let center_has_none = reference.iter().all(|&c| c == 0);
        space.retain(|v| {
            if center_has_none
                && !dicts
                    .meaning_altering
                    .iter()
                    .any(|w| v.contains(w.as_str()))
            {
                return true;
            }
            meaning_altering_counts(crate::text::token_slices(v).into_iter(), dicts) == reference
        });
    }
    space.into_iter().collect()
}

/// Samples up to `cfg.sample_size` distinct variants uniformly without
/// replacement. Deterministic in `(x, cfg)`.
pub fn sample_neighborhood(x: &Sentence, cfg: &PerturberConfig) -> Neighborhood {
    let space = perturbation_space(x, cfg);
    let variants = if space.len() <= cfg.sample_size {
        space
    } else {
        let mut rng = seed::rng_for(cfg.seed, "neighborhood");
        let mut picked = index::sample(&mut rng, space.len(), cfg.sample_size).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| space[i].clone()).collect()
    };
    Neighborhood {
        center: x.clone(),
        variants,
    }
}

/// One uniformly drawn variant of `x`, or `None` if the space is empty.
pub fn sample_one<R: Rng + ?Sized>(
    x: &Sentence,
    cfg: &PerturberConfig,
    rng: &mut R,
) -> Option<String> {
    let space = perturbation_space(x, cfg);
    if space.is_empty() {
        return None;
    }
    let i = rng.random_range(0..space.len());
    Some(space[i].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ed1_of_empty_string_is_the_alphabet() {
        let got = ed1_enumerate("", &default_alphabet());
        assert_eq!(got.len(), 26);
        assert!(got.contains("a") && got.contains("z"));
    }

    #[test]
    fn ed1_membership() {
        let got = ed1_enumerate("ab", &default_alphabet());
        assert!(got.contains("ba"));
        assert!(got.contains("a"));
        assert!(got.contains("b"));
        assert!(!got.contains("ab"));
    }

    #[test]
    fn ed1_never_swaps_equal_characters() {
        let got = ed1_enumerate("aa", &['a']);
        // insert -> "aaa", delete -> "a"; no replacement or swap applies.
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec!["a", "aaa"]);
    }

    #[test]
    fn morph_toggles() {
        assert_eq!(morph_variants("cats"), vec!["cat", "catsed", "catsing"]);
        assert_eq!(morph_variants("walked"), vec!["walkeds", "walk", "walking"]);
        assert_eq!(morph_variants("go"), vec!["gos"]);
        assert!(morph_variants(",").is_empty());
        assert!(morph_variants("it's").is_empty());
    }

    #[test]
    fn word_variants_follow_dictionaries() {
        let mut dicts = WordDicts {
            insertable: vec![],
            deletable: vec![],
            replaceable: BTreeMap::new(),
            meaning_altering: vec![],
        };
        dicts
            .replaceable
            .insert("the".into(), vec!["a".into(), "an".into()]);
        let got = word_perturb_enumerate(&Sentence::new("the cat"), &dicts, true);
        assert!(got.contains("a cat"));
        assert!(got.contains("an cat"));
        assert!(!got.contains("the cat"));
        assert!(word_perturb_enumerate(&Sentence::new(""), &dicts, true).is_empty());
    }

    #[test]
    fn meaning_altering_words_are_excluded_on_request() {
        let dicts = WordDicts::default();
        let x = Sentence::new("cats sleep");
        let strict = word_perturb_enumerate(&x, &dicts, false);
        assert!(strict.iter().all(|v| !v.split(' ').any(|t| t == "not")));
        let all = word_perturb_enumerate(&x, &dicts, true);
        assert!(all.contains("cats not sleep"));

        let negated = Sentence::new("cats do not sleep");
        let strict = word_perturb_enumerate(&negated, &dicts, false);
        assert!(strict.iter().all(|v| v.contains("not")));
        assert!(word_perturb_enumerate(&negated, &dicts, true).contains("cats do sleep"));
    }

    #[test]
    fn default_dicts_are_valid() {
        let dicts = WordDicts::default();
        dicts.validate().unwrap();
        let stripped = dicts.without_meaning_altering();
        for w in &dicts.meaning_altering {
            assert!(!stripped.insertable.contains(w));
            assert!(!stripped.deletable.contains(w));
            assert!(!stripped.replaceable.contains_key(w));
            assert!(stripped.replaceable.values().all(|v| !v.contains(w)));
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = PerturberConfig::new(PerturbMode::Ed1, 0, 1);
        assert!(cfg.validate().is_err());
        cfg.sample_size = 1;
        cfg.mode = PerturbMode::Ed1WordAll;
        cfg.dictionaries.insertable.clear();
        cfg.dictionaries.deletable.clear();
        cfg.dictionaries.replaceable.clear();
        assert!(cfg.validate().is_err());
        assert!("ed2".parse::<PerturbMode>().is_err());
    }

    #[test]
    fn sampling_examples() {
        let x = Sentence::new("A cat sat on the mat.");
        assert_eq!(x.text().chars().count(), 21);
        let cfg = PerturberConfig::new(PerturbMode::Ed1, 100, 42);
        let hood = sample_neighborhood(&x, &cfg);
        assert_eq!(hood.variants.len(), 100);
        assert!(!hood.variants.contains(&x.text()));
        let unique: BTreeSet<_> = hood.variants.iter().collect();
        assert_eq!(unique.len(), 100);
        assert_eq!(hood, sample_neighborhood(&x, &cfg));

        let empty = Sentence::new("");
        let hood = sample_neighborhood(&empty, &PerturberConfig::new(PerturbMode::Ed1, 1000, 1));
        assert_eq!(hood.variants.len(), 26);
    }

    #[test]
    fn seeds_change_the_sample() {
        let x = Sentence::new("The dog barked at the mailman.");
        let a = sample_neighborhood(&x, &PerturberConfig::new(PerturbMode::Ed1Word, 50, 1));
        let b = sample_neighborhood(&x, &PerturberConfig::new(PerturbMode::Ed1Word, 50, 2));
        assert_ne!(a.variants, b.variants);
    }
}
