//! Token-edit precision, recall and F0.5 for correction output.
//!
//! Hypothesis and gold edits are both extracted against the source with
//! [`extract_edits`]. An edit matches when kind, source position and
//! inserted token agree. Counts are pooled over the corpus.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::f05;
use crate::text::{extract_edits, EditKind, EditOp, Sentence};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GecScore {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f05: f64,
}

impl GecScore {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = div(tp, tp + fp);
        let recall = div(tp, tp + fn_);
        Self {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f05: f05(precision, recall),
        }
    }

    pub fn table(&self) -> String {
        format!(
            "{:>6} {:>6} {:>6} {:>7} {:>7} {:>7}\n{:>6} {:>6} {:>6} {:>7.2} {:>7.2} {:>7.2}\n",
            "TP",
            "FP",
            "FN",
            "P",
            "R",
            "F0.5",
            self.tp,
            self.fp,
            self.fn_,
            100.0 * self.precision,
            100.0 * self.recall,
            100.0 * self.f05
        )
    }
}

type EditKey<'a> = (EditKind, usize, Option<&'a str>);

fn key(op: &EditOp) -> EditKey<'_> {
    (op.kind, op.position, op.after.as_deref())
}

/// (tp, fp, fn) for one sentence; matching is multiset intersection.
pub fn sentence_counts(
    source: &Sentence,
    hypothesis: &Sentence,
    reference: &Sentence,
) -> (u64, u64, u64) {
    let hyp = extract_edits(&source.tokens, &hypothesis.tokens);
    let gold = extract_edits(&source.tokens, &reference.tokens);
    let mut pool: HashMap<EditKey<'_>, u64> = HashMap::new();
    for op in &gold.ops {
        *pool.entry(key(op)).or_default() += 1;
    }
    let mut tp = 0;
    for op in &hyp.ops {
        if let Some(n) = pool.get_mut(&key(op)) {
            if *n > 0 {
                *n -= 1;
                tp += 1;
            }
        }
    }
    (tp, hyp.len() as u64 - tp, gold.len() as u64 - tp)
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch {
            what: what.into(),
            expected,
            found,
        });
    }
    Ok(())
}

/// Scores aligned source, hypothesis and reference lists.
pub fn score_corpus(
    sources: &[Sentence],
    hypotheses: &[Sentence],
    references: &[Sentence],
) -> Result<GecScore> {
    check_len("hypotheses", sources.len(), hypotheses.len())?;
    check_len("references", sources.len(), references.len())?;
    let (tp, fp, fn_) = (0..sources.len())
        .into_par_iter()
        .map(|i| sentence_counts(&sources[i], &hypotheses[i], &references[i]))
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(GecScore::from_counts(tp, fp, fn_))
}

/// Like [`score_corpus`] with several references per sentence. Each
/// sentence uses the reference with the most matches, then the fewest
/// misses, then the first listed.
pub fn score_corpus_multi(
    sources: &[Sentence],
    hypotheses: &[Sentence],
    references: &[Vec<Sentence>],
) -> Result<GecScore> {
    check_len("hypotheses", sources.len(), hypotheses.len())?;
    check_len("references", sources.len(), references.len())?;
    let per: Vec<(u64, u64, u64)> = (0..sources.len())
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(u64, u64, u64)> = None;
            for r in &references[i] {
                let c = sentence_counts(&sources[i], &hypotheses[i], r);
                if best.is_none_or(|b| c.0 > b.0 || (c.0 == b.0 && c.2 < b.2)) {
                    best = Some(c);
                }
            }
            best.ok_or_else(|| Error::InvalidConfig(format!("sentence {i} has no reference")))
        })
        .collect::<Result<_>>()?;
    let (tp, fp, fn_) = per
        .iter()
        .fold((0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(GecScore::from_counts(tp, fp, fn_))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(xs: &[&str]) -> Vec<Sentence> {
        xs.iter().map(|x| Sentence::new(*x)).collect()
    }

    #[test]
    fn trivial_cases() {
        let src = s(&["he go to school .", "a apple"]);
        let gold = s(&["he goes to school .", "an apple"]);
        let perfect = score_corpus(&src, &gold, &gold).unwrap();
        assert_eq!((perfect.tp, perfect.fp, perfect.fn_), (2, 0, 0));
        assert_eq!(perfect.f05, 1.0);
        let lazy = score_corpus(&src, &src, &gold).unwrap();
        assert_eq!(lazy.recall, 0.0);
        assert_eq!(lazy.f05, 0.0);
    }

    #[test]
    fn half_recall_full_precision() {
        let src = s(&["he go to school .", "a apple"]);
        let gold = s(&["he goes to school .", "an apple"]);
        let hyp = s(&["he goes to school .", "a apple"]);
        let r = score_corpus(&src, &hyp, &gold).unwrap();
        assert_eq!((r.precision, r.recall), (1.0, 0.5));
        assert!((r.f05 - 0.8333333333333334).abs() < 1e-12);
    }

    #[test]
    fn swapping_roles_swaps_errors() {
        let src = s(&["the cat sit on mat"]);
        let a = s(&["the cat sits on the mat"]);
        let b = s(&["the cat sat on mat ."]);
        let ab = score_corpus(&src, &a, &b).unwrap();
        let ba = score_corpus(&src, &b, &a).unwrap();
        assert_eq!((ab.tp, ab.fp, ab.fn_), (ba.tp, ba.fn_, ba.fp));
    }

    #[test]
    fn length_mismatch() {
        let src = s(&["a", "b"]);
        assert!(matches!(
            score_corpus(&src, &s(&["a"]), &src),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn multi_reference_takes_best_match() {
        let src = s(&["a apple"]);
        let hyp = s(&["the apple"]);
        let refs = vec![s(&["an apple", "the apple"])];
        let r = score_corpus_multi(&src, &hyp, &refs).unwrap();
        assert_eq!(r.f05, 1.0);
    }
}
