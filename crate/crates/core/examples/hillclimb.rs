//! The unsupervised baseline fixer: climb to the best neighbor until the
//! critic accepts.
//!
//!     cargo run --release --example hillclimb

use std::sync::Arc;

use lmcritic::critic::LmCritic;
use lmcritic::desk;
use lmcritic::fixbreak::{hillclimb_fix, Fixer, HillclimbFixer};
use lmcritic::lm::LmModel;
use lmcritic::perturb::{PerturbMode, PerturberConfig};
use lmcritic::text::Sentence;

fn main() -> lmcritic::Result<()> {
    let all = desk::clean_corpus(20008, 1);
    let lm = Arc::new(LmModel::train(&all[..20000], 3)?);
    let critic = LmCritic::new(
        PerturberConfig::new(PerturbMode::Ed1Word, 100, 0),
        lm,
        "desk",
    )?;

    let x = Sentence::new("they was happy .");
    println!("{x}  ->  {}", hillclimb_fix(&x, &critic, 4)?);

    let fixer = HillclimbFixer::new(critic, 4)?;
    let pairs = desk::learner_pairs(&all[20000..], 6);
    let xs: Vec<Sentence> = pairs.iter().map(|p| p.bad.clone()).collect();
    for ((x, y), p) in xs.iter().zip(fixer.fix_batch(&xs)?).zip(&pairs) {
        println!("{x}\n  -> {y}\n  gold {}", p.good);
    }
    Ok(())
}
