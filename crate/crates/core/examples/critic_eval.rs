//! Compare the local-optimum critic with a calibrated absolute threshold
//! on corrupted held-out sentences.
//!
//!     cargo run --release --example critic_eval

use std::sync::Arc;

use lmcritic::critic::{calibrate_delta, evaluate_critic, AbsThrCritic, LmCritic};
use lmcritic::desk;
use lmcritic::fixbreak::synth_corrupt;
use lmcritic::lm::LmModel;
use lmcritic::perturb::{PerturbMode, PerturberConfig};
use lmcritic::text::{PairSource, SentencePair};

fn main() -> lmcritic::Result<()> {
    let all = desk::clean_corpus(21000, 1);
    let lm = Arc::new(LmModel::train(&all[..20000], 3)?);

    let pairs: Vec<SentencePair> = all[20000..]
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let cfg = PerturberConfig::new(PerturbMode::Ed1Word, 1, i as u64);
            SentencePair::new(
                synth_corrupt(y, &cfg, 1 + i % 2),
                y.clone(),
                PairSource::Synthetic,
            )
        })
        .filter(|p| !p.is_identity())
        .take(300)
        .collect();

    let critic = LmCritic::new(
        PerturberConfig::new(PerturbMode::Ed1Word, 100, 0),
        lm.clone(),
        "desk",
    )?;
    println!(
        "LM-Critic on {} pairs\n{}",
        pairs.len(),
        evaluate_critic(&pairs, &critic)?.table()
    );

    let delta = calibrate_delta(&pairs, lm.as_ref())?;
    let absthr = AbsThrCritic { scorer: lm, delta };
    println!(
        "absolute threshold, delta {delta:.3}\n{}",
        evaluate_critic(&pairs, &absthr)?.table()
    );
    Ok(())
}
