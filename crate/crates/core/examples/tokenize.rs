//! Tokenization, canonical text and token edit scripts.
//!
//!     cargo run --example tokenize

use lmcritic::text::{canonicalize, extract_edits, token_distance, tokenize, Sentence};

fn main() {
    let raw = "She said: \"I like cats,dogs and (most) birds.\"";
    let tokens = tokenize(raw);
    println!("tokens:    {tokens:?}");
    println!("canonical: {}", canonicalize(raw));

    let bad = Sentence::new("he go to school every days .");
    let good = Sentence::new("he goes to school every day .");
    let script = extract_edits(&bad.tokens, &good.tokens);
    println!("\n{bad}  ->  {good}");
    for op in &script.ops {
        println!("  {op:?}");
    }
    println!("distance {}", token_distance(&bad.tokens, &good.tokens));
    assert_eq!(script.apply(&bad.tokens).unwrap(), good.tokens);
}
