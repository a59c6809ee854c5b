//! Learn edit patterns from pairs and use them in both directions.
//!
//!     cargo run --release --example edit_model

use std::collections::HashSet;
use std::sync::Arc;

use lmcritic::desk;
use lmcritic::fixbreak::{
    train_edit_model, Breaker, Direction, EditModelBreaker, EditModelFixer, Fixer,
};
use lmcritic::lm::LmModel;

fn main() -> lmcritic::Result<()> {
    let all = desk::clean_corpus(21000, 1);
    let pairs = desk::learner_pairs(&all[20000..], 5);

    let breaker_model = train_edit_model(&pairs, Direction::GoodToBad)?;
    let mut by_count: Vec<_> = breaker_model.patterns.iter().collect();
    by_count.sort_by_key(|p| std::cmp::Reverse(p.count));
    println!("{} templates; most frequent:", by_count.len());
    for p in by_count.iter().take(8) {
        println!("  {:>4}  {:?}", p.count, p.template);
    }
    let breaker = EditModelBreaker::new(breaker_model, 1);
    for y in &all[..4] {
        println!("{y}  =>  {}", breaker.corrupt(y)?);
    }

    let lm = Arc::new(LmModel::train(&all[..20000], 3)?);
    let vocab: HashSet<String> = lm.vocab_words().map(str::to_string).collect();
    let fixer = EditModelFixer::new(
        train_edit_model(&pairs, Direction::BadToGood)?,
        lm,
        Some(Arc::new(vocab)),
    );
    for p in desk::learner_pairs(&all[..10], 8) {
        println!("{}  ->  {}   (gold: {})", p.bad, fixer.fix(&p.bad)?, p.good);
    }
    Ok(())
}
