use crate::critic::LmCritic;
use crate::error::{Error, Result};
use crate::fixbreak::{resentence, Breaker, Fixer};
use crate::perturb::{sample_one, PerturberConfig};
use crate::seed::rng_for;
use crate::text::Sentence;

/// Moves to the best sampled neighbor while it beats the current sentence
/// by more than the critic's tie tolerance. Uses the critic's own
/// neighborhoods, so a converged output is one the critic calls good.
pub fn hillclimb_fix(x: &Sentence, critic: &LmCritic, max_steps: usize) -> Result<Sentence> {
    if max_steps == 0 {
        return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
    }
    let tol = critic.tie_tolerance();
    let mut current = resentence(&x.tokens, &x.id);
    for _ in 0..max_steps {
        let (variants, scores) = critic.score_neighborhood(&current)?;
        let center = scores[0];
        let mut best: Option<(usize, f64)> = None;
        for (i, &s) in scores[1..].iter().enumerate() {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        match best {
            Some((i, s)) if s - center > tol => {
                let mut next = Sentence::new(variants[i].as_str());
                next.id = x.id.clone();
                current = next;
            }
            _ => break,
        }
    }
    Ok(current)
}

#[derive(Clone)]
pub struct HillclimbFixer {
    critic: LmCritic,
    max_steps: usize,
}

impl HillclimbFixer {
    pub fn new(critic: LmCritic, max_steps: usize) -> Result<Self> {
        if max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(Self { critic, max_steps })
    }
}

impl Fixer for HillclimbFixer {
    fn fix(&self, x: &Sentence) -> Result<Sentence> {
        hillclimb_fix(x, &self.critic, self.max_steps)
    }
}

/// Applies `n_edits` random perturbations in sequence, each drawn uniformly
/// from the current sentence's perturbation space. The randomness is keyed
/// by `cfg.seed` and the sentence text. Stops early if the space is empty.
pub fn synth_corrupt(y: &Sentence, cfg: &PerturberConfig, n_edits: usize) -> Sentence {
    let mut rng = rng_for(cfg.seed, &format!("corrupt\u{1f}{}", y.text()));
    let mut current = resentence(&y.tokens, &y.id);
    for _ in 0..n_edits {
        match sample_one(&current, cfg, &mut rng) {
            Some(v) => {
                current = Sentence::new(v);
                current.id = y.id.clone();
            }
            None => break,
        }
    }
    current
}

/// Random-corruption breaker.
#[derive(Debug, Clone)]
pub struct SynthBreaker {
    cfg: PerturberConfig,
    n_edits: usize,
}

impl SynthBreaker {
    pub fn new(cfg: PerturberConfig, n_edits: usize) -> Result<Self> {
        cfg.validate()?;
        if n_edits == 0 {
            return Err(Error::InvalidConfig("n_edits must be at least 1".into()));
        }
        Ok(Self { cfg, n_edits })
    }
}

impl Breaker for SynthBreaker {
    fn corrupt(&self, y: &Sentence) -> Result<Sentence> {
        Ok(synth_corrupt(y, &self.cfg, self.n_edits))
    }
}
