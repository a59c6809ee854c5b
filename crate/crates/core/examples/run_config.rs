//! Build every pipeline from one flat JSON config.
//!
//!     cargo run --example run_config

use lmcritic::config::RunConfig;

fn main() -> lmcritic::Result<()> {
    let cfg: RunConfig = serde_json::from_str(
        r#"{"seed": 7, "sample_size": 200, "lm": "model.lmc", "rounds": 2, "jobs": 4}"#,
    )?;
    cfg.validate()?;
    println!("digest {}", cfg.digest());
    println!("critic: {:?}", cfg.critic()?.perturber.mode);
    let bifi = cfg.bifi("out")?;
    println!(
        "bifi: {} rounds, breaker seed {}",
        bifi.rounds, bifi.breaker_seed
    );
    println!("{}", serde_json::to_string_pretty(&cfg.effective())?);
    Ok(())
}
