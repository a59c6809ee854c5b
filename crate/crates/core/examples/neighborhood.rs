//! The local neighborhood a critic compares a sentence against.
//!
//!     cargo run --example neighborhood -- "the cat sit on the mat ."

use lmcritic::perturb::{
    default_alphabet, ed1_enumerate, perturbation_space, sample_neighborhood,
    word_perturb_enumerate, PerturbMode, PerturberConfig, WordDicts,
};
use lmcritic::text::Sentence;

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "the cat sit on the mat .".into());
    let x = Sentence::new(text);

    let ed1 = ed1_enumerate("cat", &default_alphabet());
    println!(
        "ED1(\"cat\"): {} strings, e.g. {:?}",
        ed1.len(),
        ed1.iter().take(8).collect::<Vec<_>>()
    );

    let words = word_perturb_enumerate(&x, &WordDicts::default(), false);
    println!("word edits of {x:?}: {}", words.len());
    for w in words.iter().take(10) {
        println!("  {w}");
    }

    for mode in [
        PerturbMode::Ed1,
        PerturbMode::Ed1Word,
        PerturbMode::Ed1WordAll,
    ] {
        let cfg = PerturberConfig::new(mode, 10, 0).for_sentence(&x.text());
        println!("\n{mode:?}: space {}", perturbation_space(&x, &cfg).len());
        for v in sample_neighborhood(&x, &cfg).variants {
            println!("  {v}");
        }
    }
}
