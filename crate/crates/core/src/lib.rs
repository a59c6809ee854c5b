//! Unsupervised grammaticality judgement and error correction.
//!
//! The pieces, bottom up:
//!
//! - [`text`]: tokenization, sentence pairs and token edit scripts.
//! - [`perturb`]: the local neighborhood of a sentence (character and word edits).
//! - [`lm`]: an interpolated Kneser–Ney n-gram scorer and the external scorer client.
//! - [`critic`]: the local-optimum critic and the absolute-threshold baseline.
//! - [`fixbreak`]: hill-climbing fixer, random corruption, learned edit models.
//! - [`bifi`]: critic-filtered rounds of break-it-fix-it training.
//! - [`geceval`]: edit-level precision/recall/F0.5.
//! - [`desk`]: a small synthetic English corpus and learner-error channel for
//!   running everything end to end without downloads.

pub mod bifi;
pub mod config;
pub mod critic;
pub mod desk;
pub mod error;
pub mod fixbreak;
pub mod geceval;
pub mod io;
pub mod lm;
pub mod metrics;
pub mod perturb;
pub mod protocol;
pub mod seed;
pub mod text;

pub use error::{Error, Result};
pub use text::{Sentence, SentencePair};
