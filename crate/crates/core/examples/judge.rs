//! Judge sentences with the local-optimum critic.
//!
//!     cargo run --release --example judge -- "the boys plays in the park ."

use std::sync::Arc;

use lmcritic::critic::{Critic, LmCritic, VerdictRecord};
use lmcritic::desk;
use lmcritic::lm::LmModel;
use lmcritic::perturb::{PerturbMode, PerturberConfig};
use lmcritic::text::Sentence;

fn main() -> lmcritic::Result<()> {
    let all = desk::clean_corpus(20003, 1);
    let lm = Arc::new(LmModel::train(&all[..20000], 3)?);
    let critic = LmCritic::new(
        PerturberConfig::new(PerturbMode::Ed1Word, 100, 0),
        lm,
        "desk-20k",
    )?;

    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        for p in desk::learner_pairs(&all[20000..], 4) {
            inputs.push(p.good.text());
            inputs.push(p.bad.text());
        }
    }
    let xs: Vec<Sentence> = inputs.iter().map(|t| Sentence::new(t.as_str())).collect();
    for (x, v) in xs.iter().zip(critic.judge_batch(&xs)?) {
        println!(
            "{}",
            serde_json::to_string(&VerdictRecord::new(x, &v)).unwrap()
        );
    }
    Ok(())
}
