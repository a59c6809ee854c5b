//! Edit-level precision, recall and F0.5.
//!
//!     cargo run --example gec_eval

use lmcritic::geceval::{score_corpus, sentence_counts};
use lmcritic::text::Sentence;

fn main() -> lmcritic::Result<()> {
    let s = |t: &str| Sentence::new(t);
    let src = vec![
        s("he go to school ."),
        s("a apple fell ."),
        s("the cat sat ."),
    ];
    let refs = vec![
        s("he goes to school ."),
        s("an apple fell ."),
        s("the cat sat ."),
    ];
    let hyp = vec![
        s("he goes to the school ."),
        s("a apple fell ."),
        s("the cat sat ."),
    ];

    for ((x, h), r) in src.iter().zip(&hyp).zip(&refs) {
        let (tp, fp, fn_) = sentence_counts(x, h, r);
        println!("{x:<22} tp {tp} fp {fp} fn {fn_}");
    }
    print!("{}", score_corpus(&src, &hyp, &refs)?.table());
    Ok(())
}
