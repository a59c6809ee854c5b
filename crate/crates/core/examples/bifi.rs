//! One break-it-fix-it round on a small unlabeled corpus, with and without
//! critic filtering.
//!
//!     cargo run --release --example bifi -- [OUT_DIR]

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::Arc;

use lmcritic::bifi::Bifi;
use lmcritic::critic::LmCritic;
use lmcritic::desk;
use lmcritic::fixbreak::{Fixer, HillclimbFixer};
use lmcritic::geceval::score_corpus;
use lmcritic::lm::LmModel;
use lmcritic::perturb::{PerturbMode, PerturberConfig};
use lmcritic::text::Sentence;

fn main() -> lmcritic::Result<()> {
    let out: Option<PathBuf> = std::env::args().nth(1).map(PathBuf::from);
    let all = desk::clean_corpus(22000, 1);
    let lm = Arc::new(LmModel::train(&all[..20000], 3)?);
    let vocab: Arc<HashSet<String>> = Arc::new(lm.vocab_words().map(str::to_string).collect());
    let unlabeled = desk::unlabeled_mix(&all[20000..21000], 0.5, 2);
    let test = desk::learner_pairs(&all[21000..], 3);
    let src: Vec<Sentence> = test.iter().map(|p| p.bad.clone()).collect();
    let refs: Vec<Sentence> = test.iter().map(|p| p.good.clone()).collect();

    let critic = LmCritic::new(
        PerturberConfig::new(PerturbMode::Ed1Word, 100, 0),
        lm,
        "desk",
    )?;
    let f0: Arc<dyn Fixer> = Arc::new(HillclimbFixer::new(critic.clone(), 4)?);
    println!(
        "f_0: F0.5 {:.3}",
        score_corpus(&src, &f0.fix_batch(&src)?, &refs)?.f05
    );

    for no_critic in [false, true] {
        let dir = out
            .as_ref()
            .map(|d| d.join(if no_critic { "no_critic" } else { "critic" }));
        let outcome = Bifi::new(critic.clone(), f0.clone())
            .no_critic(no_critic)
            .vocab(Some(vocab.clone()))
            .run(&unlabeled, dir.as_deref())?;
        let report = &outcome.rounds[0].report;
        println!(
            "no_critic={no_critic}: P_f {} P_b {} (accept {:.2}/{:.2})",
            report.counts.pf.kept,
            report.counts.pb.kept,
            report.acceptance_rates.pf,
            report.acceptance_rates.pb
        );
        let hyp = outcome.final_fixer().fix_batch(&src)?;
        println!(
            "  fixer_1: F0.5 {:.3}",
            score_corpus(&src, &hyp, &refs)?.f05
        );
    }
    Ok(())
}
