//! Serve a model over the line-delimited JSON protocol and score through
//! it as an external scorer.
//!
//!     cargo run --example scorer_server

use std::net::TcpListener;
use std::sync::Arc;

use lmcritic::desk;
use lmcritic::lm::{ExternalScorer, LmModel, Scorer};
use lmcritic::protocol::{serve_tcp, Backend, Endpoint};
use lmcritic::text::Sentence;

fn main() -> lmcritic::Result<()> {
    let lm = Arc::new(LmModel::train(&desk::clean_corpus(5000, 1), 3)?);
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let backend = Backend {
        scorer: Some(lm.clone()),
        ..Backend::default()
    };
    std::thread::spawn(move || serve_tcp(backend, listener));

    let endpoint: Endpoint = format!("tcp:{addr}").parse()?;
    let remote = ExternalScorer::connect(&endpoint, 2)?;
    let xs: Vec<Sentence> = ["the dog runs .", "the dog run .", "dog the runs ."]
        .iter()
        .map(|t| Sentence::new(*t))
        .collect();
    for (x, (r, l)) in xs
        .iter()
        .zip(remote.score_batch(&xs)?.iter().zip(lm.score_batch(&xs)?))
    {
        println!("{:>9.4} {:>9.4}  {x}", r.logprob, l.logprob);
        assert_eq!(r.logprob.to_bits(), l.logprob.to_bits());
    }
    Ok(())
}
