//! Train, save, reload and query the Kneser-Ney n-gram scorer.
//!
//!     cargo run --release --example language_model

use lmcritic::desk;
use lmcritic::lm::{self, LmModel};

fn main() -> lmcritic::Result<()> {
    let corpus = desk::clean_corpus(20000, 1);
    let model = LmModel::train(&corpus, 3)?;
    println!(
        "order {} with {} word types",
        model.order(),
        model.vocab_len()
    );

    let path = std::env::temp_dir().join("language_model_example.lmc");
    lm::save(&model, &path)?;
    let model = lm::load(&path)?;

    // Held-out sentences and learner-error copies of them.
    for pair in desk::learner_pairs(&desk::clean_corpus(20004, 1)[20000..], 2) {
        for x in [&pair.good, &pair.bad] {
            let s = model.score(x);
            let per: Vec<String> = s.per_token.iter().map(|p| format!("{p:.1}")).collect();
            println!("{:>8.3}  {x}\n          [{}]", s.logprob, per.join(" "));
        }
    }
    println!(
        "p(the | walks to) = {:.4}",
        model.prob(&["walks", "to"], "the")
    );
    Ok(())
}
