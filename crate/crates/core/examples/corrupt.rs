//! Synthetic breakers: random neighborhood edits, and the learner-error
//! channel used for desk test sets.
//!
//!     cargo run --example corrupt

use lmcritic::desk;
use lmcritic::fixbreak::{synth_corrupt, Breaker, SynthBreaker};
use lmcritic::perturb::{PerturbMode, PerturberConfig};

fn main() -> lmcritic::Result<()> {
    let clean = desk::clean_corpus(6, 1);
    let breaker = SynthBreaker::new(PerturberConfig::new(PerturbMode::Ed1Word, 1, 3), 2)?;
    for (y, x) in clean.iter().zip(breaker.break_batch(&clean)?) {
        println!(
            "{y}\n  random:  {x}\n  learner: {}",
            desk::learner_corrupt(y, 3)
        );
    }
    let cfg = PerturberConfig::new(PerturbMode::Ed1, 1, 9);
    println!("\ncharacters only: {}", synth_corrupt(&clean[0], &cfg, 1));
    Ok(())
}
