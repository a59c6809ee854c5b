//! Break-it-fix-it rounds end to end on a small desk corpus.

use std::collections::HashSet;
use std::sync::Arc;

use lmcritic::bifi::Bifi;
use lmcritic::critic::{Critic, Label, LmCritic};
use lmcritic::desk;
use lmcritic::fixbreak::{EditPatternModel, Fixer, HillclimbFixer};
use lmcritic::io::read_pairs;
use lmcritic::lm::LmModel;
use lmcritic::perturb::{PerturbMode, PerturberConfig};
use lmcritic::text::Sentence;

struct Setup {
    critic: LmCritic,
    f0: Arc<dyn Fixer>,
    vocab: Arc<HashSet<String>>,
    unlabeled: Vec<Sentence>,
}

fn setup() -> Setup {
    let all = desk::clean_corpus(5200, 8);
    let lm = Arc::new(LmModel::train(&all[..5000], 3).unwrap());
    let vocab = Arc::new(lm.vocab_words().map(str::to_string).collect());
    let critic = LmCritic::new(
        PerturberConfig::new(PerturbMode::Ed1Word, 40, 1),
        lm,
        "desk-5k",
    )
    .unwrap();
    Setup {
        f0: Arc::new(HillclimbFixer::new(critic.clone(), 3).unwrap()),
        critic,
        vocab,
        unlabeled: desk::unlabeled_mix(&all[5000..], 0.5, 4),
    }
}

#[test]
fn rounds_filter_chain_and_persist() {
    let s = setup();
    let dir = tempfile::tempdir().unwrap();
    let outcome = Bifi::new(s.critic.clone(), s.f0.clone())
        .rounds(2)
        .breaker_seed(9)
        .vocab(Some(s.vocab.clone()))
        .run(&s.unlabeled, Some(dir.path()))
        .unwrap();

    let split = &outcome.split;
    assert_eq!(split.d_bad.len() + split.d_good.len(), s.unlabeled.len());
    assert!(!split.d_bad.is_empty() && !split.d_good.is_empty());
    assert_eq!(outcome.rounds.len(), 2);

    for (k, round) in outcome.rounds.iter().enumerate() {
        let r = &round.report;
        assert_eq!(r.round, k + 1);
        for c in [&r.counts.pf, &r.counts.pb] {
            assert_eq!(c.inputs, c.failed + c.identity + c.rejected + c.kept);
        }
        assert_eq!(r.counts.pf.kept, round.pf.pairs.len());
        assert_eq!(
            r.counts.fixer_training_pairs,
            round.pf.pairs.len() + round.pb.pairs.len()
        );

        let goods: Vec<Sentence> = round.pf.pairs.iter().map(|p| p.good.clone()).collect();
        let bads: Vec<Sentence> = round.pb.pairs.iter().map(|p| p.bad.clone()).collect();
        assert!(s
            .critic
            .judge_batch(&goods)
            .unwrap()
            .iter()
            .all(|v| v.label == Label::Good));
        assert!(s
            .critic
            .judge_batch(&bads)
            .unwrap()
            .iter()
            .all(|v| v.label == Label::Bad));
        assert!(round
            .pf
            .pairs
            .iter()
            .chain(&round.pb.pairs)
            .all(|p| !p.is_identity()));

        let rd = dir.path().join(format!("round_{}", k + 1));
        assert_eq!(
            read_pairs(rd.join("pf.jsonl")).unwrap().len(),
            round.pf.pairs.len()
        );
        assert_eq!(
            read_pairs(rd.join("pb.jsonl")).unwrap().len(),
            round.pb.pairs.len()
        );
        assert_eq!(
            EditPatternModel::load(rd.join("fixer.json")).unwrap(),
            round.fixer_model
        );
        assert_eq!(
            EditPatternModel::load(rd.join("breaker.json")).unwrap(),
            round.breaker
        );
    }

    // Round 2 fixes with the fixer trained in round 1.
    let fixer_1 = &outcome.rounds[0].fixer;
    for p in outcome.rounds[1].pf.pairs.iter().take(20) {
        assert_eq!(fixer_1.fix(&p.bad).unwrap().text(), p.good.text());
    }

    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with('.'))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn without_the_critic_nothing_is_rejected() {
    let s = setup();
    let outcome = Bifi::new(s.critic.clone(), s.f0.clone())
        .no_critic(true)
        .vocab(Some(s.vocab.clone()))
        .run(&s.unlabeled, None)
        .unwrap();
    assert!(
        outcome.split.d_bad.len() == s.unlabeled.len()
            && outcome.split.d_good.len() == s.unlabeled.len()
    );
    let r = &outcome.rounds[0].report;
    assert!(r.no_critic);
    assert_eq!((r.counts.pf.rejected, r.counts.pb.rejected), (0, 0));
    assert_eq!(r.counts.pf.kept + r.counts.pf.identity, s.unlabeled.len());
    assert_eq!(r.acceptance_rates.pb, 1.0);
}

#[test]
fn same_seeds_same_outcome() {
    let s = setup();
    let run = |seed| {
        Bifi::new(s.critic.clone(), s.f0.clone())
            .breaker_seed(seed)
            .vocab(Some(s.vocab.clone()))
            .run(&s.unlabeled, None)
            .unwrap()
    };
    let (a, b, c) = (run(1), run(1), run(2));
    assert_eq!(a.rounds[0].pb.pairs, b.rounds[0].pb.pairs);
    assert_eq!(a.rounds[0].fixer_model, b.rounds[0].fixer_model);
    assert_eq!(a.rounds[0].pf.pairs, c.rounds[0].pf.pairs);
    assert_ne!(
        a.rounds[0].report.seeds.breaker,
        c.rounds[0].report.seeds.breaker
    );
}
