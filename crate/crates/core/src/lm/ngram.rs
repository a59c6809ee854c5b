//! Interpolated Kneser–Ney word n-gram model with a character-level
//! back-off for out-of-vocabulary spellings.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lm::LmScore;
use crate::text::Sentence;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

pub(crate) const BOS_ID: u32 = 0;
pub(crate) const EOS_ID: u32 = 1;
pub(crate) const UNK_ID: u32 = 2;
pub(crate) const FIRST_WORD_ID: u32 = 3;

const ID_BITS: u32 = 24;
pub(crate) const MAX_ORDER: usize = 5;

pub(crate) fn pack(ids: &[u32]) -> u128 {
    ids.iter()
        .fold(0u128, |key, &id| (key << ID_BITS) | u128::from(id))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmConfig {
    pub order: usize,
    /// Absolute discount per order, lowest order first.
    pub discounts: Vec<f64>,
    /// Words seen fewer times than this are trained as `<unk>`.
    pub min_count: u32,
    pub char_order: usize,
    pub char_alpha: f64,
    pub char_weight: f64,
    pub unk_floor: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self::with_order(3)
    }
}

impl LmConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            discounts: vec![0.75; order],
            min_count: 2,
            char_order: 4,
            char_alpha: 0.1,
            char_weight: 0.5,
            unk_floor: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ORDER).contains(&self.order) {
            return Err(Error::InvalidConfig(format!(
                "LM order must be in [1, {MAX_ORDER}], got {}",
                self.order
            )));
        }
        if self.discounts.len() != self.order {
            return Err(Error::InvalidConfig(format!(
                "expected {} discounts, got {}",
                self.order,
                self.discounts.len()
            )));
        }
        if self.discounts.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return Err(Error::InvalidConfig("discounts must lie in (0, 1)".into()));
        }
        if !(1..=MAX_ORDER).contains(&self.char_order) {
            return Err(Error::InvalidConfig("char_order must be in [1, 5]".into()));
        }
        if !(self.char_alpha > 0.0 && self.char_alpha.is_finite()) {
            return Err(Error::InvalidConfig("char_alpha must be positive".into()));
        }
        if !(self.char_weight > 0.0 && self.char_weight < 1.0) {
            return Err(Error::InvalidConfig(
                "char_weight must lie in (0, 1)".into(),
            ));
        }
        if !(self.unk_floor > 0.0 && self.unk_floor < 1.0) {
            return Err(Error::InvalidConfig("unk_floor must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct ContextStats {
    pub total: u64,
    pub distinct: u32,
}

/// Counts for one order: raw counts at the top order, continuation counts
/// below it.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct OrderTable {
    pub counts: HashMap<u128, u32>,
    pub contexts: HashMap<u128, ContextStats>,
}

impl OrderTable {
    pub(crate) fn from_counts(order: usize, counts: HashMap<u128, u32>) -> Self {
        let mut contexts: HashMap<u128, ContextStats> = HashMap::new();
        for (&key, &count) in &counts {
            let ctx = if order == 1 { 0 } else { key >> ID_BITS };
            let stats = contexts.entry(ctx).or_default();
            stats.total += u64::from(count);
            stats.distinct += 1;
        }
        Self { counts, contexts }
    }
}

/// Add-α character n-gram model over word spellings.
#[derive(Debug, Clone, PartialEq)]
pub struct CharModel {
    pub(crate) order: usize,
    pub(crate) alpha: f64,
    pub(crate) symbols: BTreeMap<char, u32>,
    pub(crate) counts: HashMap<u128, u32>,
    pub(crate) totals: HashMap<u128, u32>,
}

const CHAR_PAD: u32 = 0;
const CHAR_END: u32 = 1;
const CHAR_UNK: u32 = 2;
pub(crate) const CHAR_FIRST: u32 = 3;

impl CharModel {
    pub(crate) fn train<'a>(
        words: impl IntoIterator<Item = &'a str>,
        order: usize,
        alpha: f64,
    ) -> Self {
        let words: BTreeSet<&str> = words.into_iter().collect();
        let chars: BTreeSet<char> = words.iter().flat_map(|w| w.chars()).collect();
        let symbols: BTreeMap<char, u32> = chars.into_iter().zip(CHAR_FIRST..).collect();
        let mut model = CharModel {
            order,
            alpha,
            symbols,
            counts: HashMap::new(),
            totals: HashMap::new(),
        };
        let mut counts = HashMap::new();
        for word in words {
            let ids = model.encode(word);
            for i in (order - 1)..ids.len() {
                *counts.entry(pack(&ids[i + 1 - order..=i])).or_insert(0u32) += 1;
            }
        }
        model.set_counts(counts);
        model
    }

    pub(crate) fn set_counts(&mut self, counts: HashMap<u128, u32>) {
        let mut totals = HashMap::new();
        for (&key, &c) in &counts {
            *totals.entry(key >> ID_BITS).or_insert(0u32) += c;
        }
        self.counts = counts;
        self.totals = totals;
    }

    fn encode(&self, word: &str) -> Vec<u32> {
        let mut ids = vec![CHAR_PAD; self.order - 1];
        ids.extend(
            word.chars()
                .map(|c| self.symbols.get(&c).copied().unwrap_or(CHAR_UNK)),
        );
        ids.push(CHAR_END);
        ids
    }

    /// Number of predictable symbols: observed characters, the unknown
    /// character and the end-of-word marker.
    fn support(&self) -> f64 {
        (self.symbols.len() + 2) as f64
    }

    pub fn logprob(&self, word: &str) -> f64 {
        let ids = self.encode(word);
        let support = self.support();
        let mut total = 0.0;
        for i in (self.order - 1)..ids.len() {
            let gram = pack(&ids[i + 1 - self.order..=i]);
            let count = f64::from(self.counts.get(&gram).copied().unwrap_or(0));
            let ctx_total = f64::from(self.totals.get(&(gram >> ID_BITS)).copied().unwrap_or(0));
            total += ((count + self.alpha) / (ctx_total + self.alpha * support)).ln();
        }
        total
    }
}

/// A trained, immutable n-gram language model.
#[derive(Debug, Clone, PartialEq)]
pub struct LmModel {
    pub(crate) config: LmConfig,
    pub(crate) vocab: HashMap<String, u32>,
    /// Word strings indexed by `id - FIRST_WORD_ID`.
    pub(crate) words: Vec<String>,
    /// Tables for orders 1..=n.
    pub(crate) tables: Vec<OrderTable>,
    pub(crate) chars: CharModel,
}

impl LmModel {
    /// Trains with default settings at the given order.
    pub fn train<'a, I>(corpus: I, order: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        Self::train_with(corpus, &LmConfig::with_order(order))
    }

    pub fn train_with<'a, I>(corpus: I, config: &LmConfig) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        config.validate()?;
        let corpus: Vec<&Sentence> = corpus.into_iter().collect();
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut freq: HashMap<&str, u32> = HashMap::new();
        for s in &corpus {
            for t in &s.tokens {
                *freq.entry(t.as_str()).or_insert(0) += 1;
            }
        }
        let kept: BTreeSet<&str> = freq
            .iter()
            .filter(|(w, &c)| c >= config.min_count && !is_reserved(w))
            .map(|(w, _)| *w)
            .collect();
        let words: Vec<String> = kept.iter().map(|w| w.to_string()).collect();
        if words.len() as u64 + u64::from(FIRST_WORD_ID) >= 1 << ID_BITS {
            return Err(Error::InvalidConfig("vocabulary too large".into()));
        }
        let vocab: HashMap<String, u32> = words.iter().cloned().zip(FIRST_WORD_ID..).collect();
        let chars = CharModel::train(freq.keys().copied(), config.char_order, config.char_alpha);

        let n = config.order;
        let mut top: HashMap<u128, u32> = HashMap::new();
        for s in &corpus {
            let mut ids = vec![BOS_ID; n - 1];
            ids.extend(
                s.tokens
                    .iter()
                    .map(|t| vocab.get(t).copied().unwrap_or(UNK_ID)),
            );
            ids.push(EOS_ID);
            for i in (n - 1)..ids.len() {
                *top.entry(pack(&ids[i + 1 - n..=i])).or_insert(0) += 1;
            }
        }
        let mut tables = vec![OrderTable::default(); n];
        tables[n - 1] = OrderTable::from_counts(n, top);
        for k in (1..n).rev() {
            let mask = (1u128 << (ID_BITS as usize * k)) - 1;
            let mut cont: HashMap<u128, u32> = HashMap::new();
            for &key in tables[k].counts.keys() {
                *cont.entry(key & mask).or_insert(0) += 1;
            }
            tables[k - 1] = OrderTable::from_counts(k, cont);
        }
        Ok(LmModel {
            config: config.clone(),
            vocab,
            words,
            tables,
            chars,
        })
    }

    pub fn config(&self) -> &LmConfig {
        &self.config
    }

    pub fn order(&self) -> usize {
        self.config.order
    }

    pub fn vocab_len(&self) -> usize {
        self.words.len()
    }

    /// In-vocabulary word types, excluding reserved symbols.
    pub fn vocab_words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vocab.contains_key(word)
    }

    pub fn char_model(&self) -> &CharModel {
        &self.chars
    }

    /// Size of the predicted vocabulary: words plus `</s>` and `<unk>`.
    fn support(&self) -> f64 {
        (self.words.len() + 2) as f64
    }

    fn id_of(&self, token: &str) -> u32 {
        match token {
            EOS => EOS_ID,
            UNK => UNK_ID,
            BOS => BOS_ID,
            _ => self.vocab.get(token).copied().unwrap_or(UNK_ID),
        }
    }

    /// Interpolated KN probability of `word` after the last `order - 1` ids
    /// of `history`.
    pub(crate) fn prob_id(&self, history: &[u32], word: u32) -> f64 {
        let n = self.config.order;
        let mut p = 1.0 / self.support();
        for k in 1..=n {
            let table = &self.tables[k - 1];
            let ctx = &history[history.len() + 1 - k..];
            let ctx_key = pack(ctx);
            if let Some(stats) = table.contexts.get(&ctx_key) {
                let d = self.config.discounts[k - 1];
                let key = (ctx_key << ID_BITS) | u128::from(word);
                let c = f64::from(table.counts.get(&key).copied().unwrap_or(0));
                p = ((c - d).max(0.0) + d * f64::from(stats.distinct) * p) / stats.total as f64;
            }
        }
        p
    }

    /// Conditional probability of a word given preceding tokens. Reserved
    /// symbols are accepted by name; the context is padded with `<s>`.
    pub fn prob(&self, context: &[&str], word: &str) -> f64 {
        let n = self.config.order;
        let mut history = vec![BOS_ID; n - 1];
        history.extend(context.iter().map(|t| self.id_of(t)));
        let history = &history[history.len() + 1 - n..];
        self.prob_id(history, self.id_of(word))
    }

    /// Log-probability of `<s> tokens </s>`. Unknown tokens pay the
    /// `<unk>` n-gram probability times a spelling probability mixed from
    /// the character model and a uniform floor.
    pub fn score_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> LmScore {
        let n = self.config.order;
        let mut history = vec![BOS_ID; n - 1];
        let mut per_token = Vec::with_capacity(tokens.len() + 1);
        for token in tokens {
            let token = token.as_ref();
            let id = self.vocab.get(token).copied().unwrap_or(UNK_ID);
            let mut lp = self.prob_id(&history[history.len() + 1 - n..], id).ln();
            if id == UNK_ID {
                let spelling = self.config.char_weight * self.chars.logprob(token).exp()
                    + (1.0 - self.config.char_weight) * self.config.unk_floor;
                lp += spelling.ln();
            }
            per_token.push(lp);
            history.push(id);
        }
        per_token.push(self.prob_id(&history[history.len() + 1 - n..], EOS_ID).ln());
        LmScore::from_per_token(per_token)
    }

    pub fn score(&self, x: &Sentence) -> LmScore {
        self.score_tokens(&x.tokens)
    }
}

fn is_reserved(word: &str) -> bool {
    matches!(word, BOS | EOS | UNK)
}
