//! Tokenization, sentence records and token-level edit scripts.
//!
//! Tokens are whitespace-separated chunks with leading and trailing
//! punctuation split off one character at a time. Text is never lowercased
//! and non-ASCII characters pass through unchanged.

use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Punctuation characters split off word boundaries by default.
pub const DEFAULT_PUNCTUATION: &str = ".,!?;:\"'()";

/// Whitespace + boundary-punctuation tokenizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenizer {
    punctuation: Vec<char>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self::new(DEFAULT_PUNCTUATION)
    }
}

impl Tokenizer {
    pub fn new(punctuation: &str) -> Self {
        let mut punctuation: Vec<char> =
            punctuation.chars().filter(|c| !c.is_whitespace()).collect();
        punctuation.sort_unstable();
        punctuation.dedup();
        Self { punctuation }
    }

    pub fn punctuation(&self) -> String {
        self.punctuation.iter().collect()
    }

    pub fn is_punct(&self, c: char) -> bool {
        self.punctuation.binary_search(&c).is_ok()
    }

    fn is_punct_token(&self, token: &str) -> bool {
        let mut chars = token.chars();
        matches!((chars.next(), chars.next()), (Some(c), None) if self.is_punct(c))
    }

    pub fn tokenize(&self, raw: &str) -> Vec<String> {
        self.token_slices(raw)
            .into_iter()
            .map(str::to_string)
            .collect()
    }

    /// Like [`Tokenizer::tokenize`], borrowing from `raw`.
    pub fn token_slices<'a>(&self, raw: &'a str) -> Vec<&'a str> {
        let mut tokens = Vec::new();
        for chunk in raw.split_whitespace() {
            let mut body = chunk;
            let mut lead = 0;
            while let Some(c) = body.chars().next().filter(|&c| self.is_punct(c)) {
                body = &body[c.len_utf8()..];
                lead += c.len_utf8();
            }
            let mut trail = Vec::new();
            while let Some(c) = body.chars().next_back().filter(|&c| self.is_punct(c)) {
                let cut = body.len() - c.len_utf8();
                trail.push(&body[cut..]);
                body = &body[..cut];
            }
            let mut i = 0;
            while i < lead {
                let n = chunk[i..].chars().next().map_or(1, char::len_utf8);
                tokens.push(&chunk[i..i + n]);
                i += n;
            }
            if !body.is_empty() {
                tokens.push(body);
            }
            tokens.extend(trail.into_iter().rev());
        }
        tokens
    }

    /// Joins tokens with single spaces. Punctuation attaches to the preceding
    /// token, except opening brackets and opening double quotes, which attach
    /// to the following one.
    pub fn detokenize<S: AsRef<str>>(&self, tokens: &[S]) -> String {
        let mut out = String::new();
        let mut glue_next = false;
        let mut quote_open = false;
        for token in tokens {
            let token = token.as_ref();
            let punct = self.is_punct_token(token);
            let opener =
                punct && (matches!(token, "(" | "[" | "{") || (token == "\"" && !quote_open));
            if token == "\"" {
                quote_open = !quote_open;
            }
            let attach_left = punct && !opener && !out.is_empty();
            if !out.is_empty() && !attach_left && !glue_next {
                out.push(' ');
            }
            out.push_str(token);
            glue_next = opener;
        }
        out
    }
}

static DEFAULT_TOKENIZER: LazyLock<Tokenizer> = LazyLock::new(Tokenizer::default);

pub fn tokenize(raw: &str) -> Vec<String> {
    DEFAULT_TOKENIZER.tokenize(raw)
}

pub fn token_slices(raw: &str) -> Vec<&str> {
    DEFAULT_TOKENIZER.token_slices(raw)
}

pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    DEFAULT_TOKENIZER.detokenize(tokens)
}

/// Canonical surface form of `raw`: the detokenization of its tokens.
pub fn canonicalize(raw: &str) -> String {
    DEFAULT_TOKENIZER.detokenize(&DEFAULT_TOKENIZER.token_slices(raw))
}

/// A tokenized utterance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sentence {
    pub raw: String,
    pub tokens: Vec<String>,
    pub id: Option<String>,
}

impl Sentence {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Self {
            raw,
            tokens,
            id: None,
        }
    }

    pub fn with_id(raw: impl Into<String>, id: impl Into<String>) -> Self {
        Self {
            id: Some(id.into()),
            ..Self::new(raw)
        }
    }

    pub fn from_tokens(tokens: Vec<String>) -> Self {
        Self {
            raw: detokenize(&tokens),
            tokens,
            id: None,
        }
    }

    /// Canonical text, independent of the spacing in `raw`.
    pub fn text(&self) -> String {
        detokenize(&self.tokens)
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl From<&str> for Sentence {
    fn from(raw: &str) -> Self {
        Sentence::new(raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    Labeled,
    Synthetic,
    BifiFixer,
    BifiBreaker,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub bad: Sentence,
    pub good: Sentence,
    pub source: PairSource,
}

impl SentencePair {
    pub fn new(bad: Sentence, good: Sentence, source: PairSource) -> Self {
        Self { bad, good, source }
    }

    pub fn is_identity(&self) -> bool {
        self.bad.tokens == self.good.tokens
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    Insert,
    Delete,
    Substitute,
}

/// One token edit. `position` indexes source tokens for deletions and
/// substitutions, and the gap before that source token for insertions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EditOp {
    pub position: usize,
    pub kind: EditKind,
    pub before: Option<String>,
    pub after: Option<String>,
}

impl EditOp {
    pub fn insert(position: usize, token: impl Into<String>) -> Self {
        Self {
            position,
            kind: EditKind::Insert,
            before: None,
            after: Some(token.into()),
        }
    }

    pub fn delete(position: usize, token: impl Into<String>) -> Self {
        Self {
            position,
            kind: EditKind::Delete,
            before: Some(token.into()),
            after: None,
        }
    }

    pub fn substitute(
        position: usize,
        before: impl Into<String>,
        after: impl Into<String>,
    ) -> Self {
        Self {
            position,
            kind: EditKind::Substitute,
            before: Some(before.into()),
            after: Some(after.into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

impl EditScript {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Applies the script to `src`. Ops must be position-sorted, with
    /// insertions at a gap preceding any edit of the token after that gap.
    pub fn apply<S: AsRef<str>>(&self, src: &[S]) -> Result<Vec<String>> {
        let mut out = Vec::with_capacity(src.len() + self.ops.len());
        let mut cursor = 0;
        for op in &self.ops {
            if op.position < cursor || op.position > src.len() {
                return Err(Error::InvalidEdit(format!(
                    "op at position {} out of order or out of range (cursor {cursor}, len {})",
                    op.position,
                    src.len()
                )));
            }
            out.extend(
                src[cursor..op.position]
                    .iter()
                    .map(|s| s.as_ref().to_string()),
            );
            cursor = op.position;
            match op.kind {
                EditKind::Insert => {
                    let token = op
                        .after
                        .as_ref()
                        .ok_or_else(|| Error::InvalidEdit("insert without token".into()))?;
                    out.push(token.clone());
                }
                EditKind::Delete | EditKind::Substitute => {
                    let current = src
                        .get(cursor)
                        .ok_or_else(|| Error::InvalidEdit(format!("no source token at {cursor}")))?
                        .as_ref();
                    if op.before.as_deref() != Some(current) {
                        return Err(Error::InvalidEdit(format!(
                            "expected {:?} at {cursor}, found {current:?}",
                            op.before
                        )));
                    }
                    if op.kind == EditKind::Substitute {
                        let token = op.after.as_ref().ok_or_else(|| {
                            Error::InvalidEdit("substitution without token".into())
                        })?;
                        out.push(token.clone());
                    }
                    cursor += 1;
                }
            }
        }
        out.extend(src[cursor..].iter().map(|s| s.as_ref().to_string()));
        Ok(out)
    }
}

fn distance_table<S: AsRef<str>, T: AsRef<str>>(src: &[S], tgt: &[T]) -> Vec<Vec<usize>> {
    let (n, m) = (src.len(), tgt.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = usize::from(src[i - 1].as_ref() != tgt[j - 1].as_ref());
            d[i][j] = (d[i - 1][j - 1] + sub)
                .min(d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1);
        }
    }
    d
}

/// Token Levenshtein distance with unit costs.
pub fn token_distance<S: AsRef<str>, T: AsRef<str>>(src: &[S], tgt: &[T]) -> usize {
    distance_table(src, tgt)[src.len()][tgt.len()]
}

/// Minimal token edit script turning `src` into `tgt`.
///
/// The alignment is traced back from the end of both sequences; at each
/// step a free match is taken first, then substitution, deletion and
/// insertion, in that order of preference.
pub fn extract_edits<S: AsRef<str>, T: AsRef<str>>(src: &[S], tgt: &[T]) -> EditScript {
    let d = distance_table(src, tgt);
    let (mut i, mut j) = (src.len(), tgt.len());
    let mut ops = Vec::new();
    while i > 0 || j > 0 {
        let here = d[i][j];
        if i > 0 && j > 0 && src[i - 1].as_ref() == tgt[j - 1].as_ref() && d[i - 1][j - 1] == here {
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && d[i - 1][j - 1] + 1 == here {
            ops.push(EditOp::substitute(
                i - 1,
                src[i - 1].as_ref(),
                tgt[j - 1].as_ref(),
            ));
            i -= 1;
            j -= 1;
        } else if i > 0 && d[i - 1][j] + 1 == here {
            ops.push(EditOp::delete(i - 1, src[i - 1].as_ref()));
            i -= 1;
        } else {
            ops.push(EditOp::insert(i, tgt[j - 1].as_ref()));
            j -= 1;
        }
    }
    ops.reverse();
    EditScript { ops }
}

/// Character-level Levenshtein distance (insert, delete, substitute).
pub fn char_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = usize::from(a[i - 1] != b[j - 1]);
            cur[j] = (prev[j - 1] + sub).min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("Alice likes cats."),
            toks(&["Alice", "likes", "cats", "."])
        );
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("it's \"fine\""),
            toks(&["it's", "\"", "fine", "\""])
        );
        assert_eq!(
            tokenize("  (hi),  there!! "),
            toks(&["(", "hi", ")", ",", "there", "!", "!"])
        );
        assert_eq!(tokenize("naïve café."), toks(&["naïve", "café", "."]));
    }

    #[test]
    fn detokenize_examples() {
        assert_eq!(
            detokenize(&toks(&["Alice", "likes", "cats", "."])),
            "Alice likes cats."
        );
        assert_eq!(detokenize::<String>(&[]), "");
        assert_eq!(detokenize(&toks(&["a", ",", "b"])), "a, b");
        assert_eq!(
            detokenize(&toks(&["it's", "\"", "fine", "\""])),
            "it's \"fine\""
        );
        assert_eq!(detokenize(&toks(&["a", "(", "b", ")", "c"])), "a (b) c");
        assert_eq!(detokenize(&toks(&[".", "a"])), ". a");
    }

    #[test]
    fn canonical_round_trip() {
        for s in [
            "Alice likes cats.",
            "it's \"fine\"",
            "a (b) c",
            "Well, no: yes!",
            "",
        ] {
            assert_eq!(canonicalize(s), s);
        }
    }

    #[test]
    fn custom_punctuation() {
        let tok = Tokenizer::new("-.");
        assert_eq!(tok.tokenize("-a-b-."), vec!["-", "a-b", "-", "."]);
        assert_eq!(tok.tokenize("(a)"), vec!["(a)"]);
    }

    #[test]
    fn edit_examples() {
        assert!(extract_edits(&["a", "cat"], &["a", "cat"]).is_empty());
        let script = extract_edits(&["a", "cat"], &["an", "cat"]);
        assert_eq!(script.ops, vec![EditOp::substitute(0, "a", "an")]);
        let src = ["the", "cats", "sleep"];
        let tgt = ["the", "cat", "sleeps"];
        let script = extract_edits(&src, &tgt);
        assert_eq!(script.len(), 2);
        assert_eq!(script.apply(&src).unwrap(), toks(&tgt));
    }

    #[test]
    fn tie_break_prefers_substitution_then_deletion() {
        // "a b" -> "b": deleting "a" is the only minimal script.
        assert_eq!(
            extract_edits(&["a", "b"], &["b"]).ops,
            vec![EditOp::delete(0, "a")]
        );
        // "a" -> "b c": substitute + insert ties with insert + substitute.
        let ops = extract_edits(&["a"], &["b", "c"]).ops;
        assert_eq!(
            ops,
            vec![EditOp::insert(0, "b"), EditOp::substitute(0, "a", "c")]
        );
    }

    #[test]
    fn apply_rejects_mismatched_script() {
        let script = EditScript {
            ops: vec![EditOp::delete(0, "x")],
        };
        assert!(matches!(script.apply(&["a"]), Err(Error::InvalidEdit(_))));
        let script = EditScript {
            ops: vec![EditOp::delete(3, "x")],
        };
        assert!(script.apply(&["a"]).is_err());
    }

    #[test]
    fn char_distance_basics() {
        assert_eq!(char_distance("", "abc"), 3);
        assert_eq!(char_distance("kitten", "sitting"), 3);
        assert_eq!(char_distance("ab", "ba"), 2);
    }
}
