//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any failed.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lmcritic::critic::{
    calibrate_delta, evaluate_critic, AbsThrCritic, Critic, EvalReport, Label, LmCritic,
};
use lmcritic::desk;
use lmcritic::fixbreak::{synth_corrupt, EditModelFixer, EditPatternModel, Fixer, HillclimbFixer};
use lmcritic::geceval::score_corpus;
use lmcritic::io::{read_pairs, write_sentences};
use lmcritic::lm::{LmModel, Scorer};
use lmcritic::metrics::f05;
use lmcritic::perturb::{default_alphabet, ed1_enumerate, PerturbMode, PerturberConfig};
use lmcritic::text::{PairSource, Sentence, SentencePair};

const BIN: &str = env!("CARGO_BIN_EXE_lmcritic");

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Shared desk setup: an order-3 LM on 50k clean sentences plus held-out
/// material for evaluation and BIFI.
struct Desk {
    dir: tempfile::TempDir,
    all: Vec<Sentence>,
    lm: Arc<LmModel>,
    lm_path: PathBuf,
    train_time: Duration,
    eval_pairs: Vec<SentencePair>,
}

impl Desk {
    fn build() -> Desk {
        let dir = tempfile::tempdir().unwrap();
        let all = desk::clean_corpus(56000, 1);
        let train = &all[..50000];
        let corpus_path = dir.path().join("train.jsonl");
        write_sentences(&corpus_path, train).unwrap();
        let lm_path = dir.path().join("lm.lmc");
        let t = Instant::now();
        let out = Command::new(BIN)
            .args(["lm", "train", "--order", "3", "--corpus"])
            .arg(&corpus_path)
            .arg("--out")
            .arg(&lm_path)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "lm train: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let lm = Arc::new(lmcritic::lm::load(&lm_path).unwrap());
        let train_time = t.elapsed();

        // Held-out sentences never seen in training, corrupted with one or
        // two ED1/word edits.
        let seen: HashSet<String> = train.iter().map(Sentence::text).collect();
        let mut eval_pairs = Vec::new();
        let mut used = HashSet::new();
        for (i, y) in all[50000..].iter().enumerate() {
            if eval_pairs.len() == 500 {
                break;
            }
            if seen.contains(&y.text()) || !used.insert(y.text()) {
                continue;
            }
            let cfg = PerturberConfig::new(PerturbMode::Ed1Word, 100, 100 + i as u64);
            let x = synth_corrupt(y, &cfg, 1 + i % 2);
            let pair = SentencePair::new(x, y.clone(), PairSource::Synthetic);
            if !pair.is_identity() {
                eval_pairs.push(pair);
            }
        }
        assert_eq!(eval_pairs.len(), 500);
        Desk {
            dir,
            all,
            lm,
            lm_path,
            train_time,
            eval_pairs,
        }
    }

    fn critic(&self, sample_size: usize) -> LmCritic {
        let perturber = PerturberConfig::new(PerturbMode::Ed1Word, sample_size, 0);
        LmCritic::new(perturber, self.lm.clone(), "desk").unwrap()
    }

    fn vocab(&self) -> Arc<HashSet<String>> {
        Arc::new(self.lm.vocab_words().map(str::to_string).collect())
    }
}

fn fmt_report(r: &EvalReport) -> String {
    format!(
        "bad {:.1} good {:.1}",
        100.0 * r.f05_bad,
        100.0 * r.f05_good
    )
}

// ---------------------------------------------------------------- criterion 1

/// True iff `t` is one insertion, deletion, substitution or adjacent swap
/// away from `s`, and differs from it.
fn is_ed1(s: &[char], t: &[char]) -> bool {
    if s == t {
        return false;
    }
    let (n, m) = (s.len(), t.len());
    if n == m {
        let diffs: Vec<usize> = (0..n).filter(|&i| s[i] != t[i]).collect();
        return match diffs.as_slice() {
            [_] => true,
            [i, j] => *j == i + 1 && s[*i] == t[*j] && s[*j] == t[*i],
            _ => false,
        };
    }
    let (long, short) = if n > m { (s, t) } else { (t, s) };
    if long.len() != short.len() + 1 {
        return false;
    }
    let prefix = long.iter().zip(short).take_while(|(a, b)| a == b).count();
    let suffix = long
        .iter()
        .rev()
        .zip(short.iter().rev())
        .take_while(|(a, b)| a == b)
        .count();
    prefix + suffix >= short.len()
}

/// Every string obtained by replacing a window of at most two characters of
/// `s` with at most two alphabet characters, kept if it passes `is_ed1`.
fn brute_ed1(s: &str, alphabet: &[char]) -> BTreeSet<String> {
    let chars: Vec<char> = s.chars().collect();
    let mut fillers: Vec<Vec<char>> = vec![vec![]];
    for &a in alphabet {
        fillers.push(vec![a]);
        for &b in alphabet {
            fillers.push(vec![a, b]);
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..=chars.len() {
        for j in i..=(i + 2).min(chars.len()) {
            for w in &fillers {
                let mut t = chars[..i].to_vec();
                t.extend_from_slice(w);
                t.extend_from_slice(&chars[j..]);
                if is_ed1(&chars, &t) {
                    out.insert(t.into_iter().collect());
                }
            }
        }
    }
    out
}

fn criterion_1() -> Verdict {
    let small = ['a', 'b', 'c', 'd'];
    let mut checked = 0usize;
    let mut layer: Vec<String> = vec![String::new()];
    for _len in 0..=8 {
        for s in &layer {
            if ed1_enumerate(s, &small) != brute_ed1(s, &small) {
                return verdict(false, format!("mismatch on {s:?} over abcd"));
            }
            checked += 1;
        }
        layer = layer
            .iter()
            .flat_map(|s| small.iter().map(move |c| format!("{s}{c}")))
            .collect();
    }
    let full = default_alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let len = rng.random_range(0..=12);
        let s: String = (0..len)
            .map(|_| full[rng.random_range(0..full.len())])
            .collect();
        if ed1_enumerate(&s, &full) != brute_ed1(&s, &full) {
            return verdict(false, format!("mismatch on {s:?}"));
        }
        checked += 1;
    }
    verdict(true, format!("{checked} strings agree"))
}

// ---------------------------------------------------------------- criteria 2, 3, 6

fn criterion_2(desk: &Desk) -> Verdict {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let t = Instant::now();
    let (lm, abs) = pool.install(|| {
        let lm = evaluate_critic(&desk.eval_pairs, &desk.critic(100)).unwrap();
        let delta = calibrate_delta(&desk.eval_pairs, desk.lm.as_ref()).unwrap();
        let abs = evaluate_critic(
            &desk.eval_pairs,
            &AbsThrCritic {
                scorer: desk.lm.clone(),
                delta,
            },
        )
        .unwrap();
        (lm, abs)
    });
    let elapsed = t.elapsed() + desk.train_time;
    let pass = lm.f05_bad >= 0.60
        && lm.f05_good >= 0.60
        && lm.f05_bad > abs.f05_bad
        && lm.f05_good > abs.f05_good
        && elapsed < Duration::from_secs(600);
    verdict(
        pass,
        format!(
            "LM-Critic {}; absthr {}; {:.0}s single-threaded incl. LM training",
            fmt_report(&lm),
            fmt_report(&abs),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3(desk: &Desk) -> Verdict {
    let t = Instant::now();
    let bad: Vec<Sentence> = desk.eval_pairs.iter().map(|p| p.bad.clone()).collect();
    let good: Vec<Sentence> = desk.eval_pairs.iter().map(|p| p.good.clone()).collect();
    let sb = desk.lm.score_batch(&bad).unwrap();
    let sg = desk.lm.score_batch(&good).unwrap();
    let lower = sb
        .iter()
        .zip(&sg)
        .filter(|(b, g)| b.logprob < g.logprob)
        .count();
    let frac = lower as f64 / desk.eval_pairs.len() as f64;
    let elapsed = t.elapsed();
    verdict(
        frac >= 0.85 && elapsed < Duration::from_secs(60),
        format!(
            "p(bad) < p(good) on {lower}/{} pairs ({:.1}%)",
            desk.eval_pairs.len(),
            100.0 * frac
        ),
    )
}

fn criterion_6(desk: &Desk) -> Verdict {
    let r100 = evaluate_critic(&desk.eval_pairs, &desk.critic(100)).unwrap();
    let r400 = evaluate_critic(&desk.eval_pairs, &desk.critic(400)).unwrap();
    verdict(
        100.0 * r400.f05_good >= 100.0 * r100.f05_good - 1.0,
        format!(
            "good F0.5 {:.1} at 400 vs {:.1} at 100",
            100.0 * r400.f05_good,
            100.0 * r100.f05_good
        ),
    )
}

// ---------------------------------------------------------------- criteria 4, 5

struct BifiRuns {
    critic_dir: PathBuf,
    critic_time: Duration,
}

fn bifi_cli(desk: &Desk, unlabeled: &Path, out: &Path, no_critic: bool) {
    let mut cmd = Command::new(BIN);
    cmd.args([
        "--seed",
        "0",
        "bifi",
        "run",
        "--sample-size",
        "100",
        "--unlabeled",
    ])
    .arg(unlabeled)
    .arg("--out")
    .arg(out)
    .arg("--lm")
    .arg(&desk.lm_path);
    if no_critic {
        cmd.arg("--no-critic");
    }
    let res = cmd.output().unwrap();
    assert!(
        res.status.success(),
        "bifi run: {}",
        String::from_utf8_lossy(&res.stderr)
    );
}

fn unlabeled_path(desk: &Desk) -> PathBuf {
    let path = desk.dir.path().join("unlabeled.jsonl");
    if !path.exists() {
        let mixed = desk::unlabeled_mix(&desk.all[50000..55000], 0.5, 11);
        write_sentences(&path, &mixed).unwrap();
    }
    path
}

fn criterion_4(desk: &Desk, runs: &mut Option<BifiRuns>) -> Verdict {
    let unlabeled = unlabeled_path(desk);
    let out = desk.dir.path().join("bifi_critic");
    let t = Instant::now();
    bifi_cli(desk, &unlabeled, &out, false);
    *runs = Some(BifiRuns {
        critic_dir: out.clone(),
        critic_time: t.elapsed(),
    });

    let critic = desk.critic(100);
    let pf = read_pairs(out.join("round_1/pf.jsonl")).unwrap();
    let pb = read_pairs(out.join("round_1/pb.jsonl")).unwrap();
    let goods: Vec<Sentence> = pf.iter().map(|p| p.good.clone()).collect();
    let bads: Vec<Sentence> = pb.iter().map(|p| p.bad.clone()).collect();
    let pf_bad = critic
        .judge_batch(&goods)
        .unwrap()
        .iter()
        .filter(|v| v.label != Label::Good)
        .count();
    let pb_good = critic
        .judge_batch(&bads)
        .unwrap()
        .iter()
        .filter(|v| v.label != Label::Bad)
        .count();
    verdict(
        pf_bad == 0 && pb_good == 0 && !pf.is_empty() && !pb.is_empty(),
        format!(
            "P_f {} pairs, {pf_bad} violations; P_b {} pairs, {pb_good} violations",
            pf.len(),
            pb.len()
        ),
    )
}

fn gec_f05(fixer: &dyn Fixer, test: &[SentencePair]) -> f64 {
    let src: Vec<Sentence> = test.iter().map(|p| p.bad.clone()).collect();
    let refs: Vec<Sentence> = test.iter().map(|p| p.good.clone()).collect();
    let hyp = fixer.fix_batch(&src).unwrap();
    score_corpus(&src, &hyp, &refs).unwrap().f05
}

fn criterion_5(desk: &Desk, runs: &Option<BifiRuns>) -> Verdict {
    let Some(runs) = runs else {
        return verdict(false, "critic-arm BIFI run is missing");
    };
    let t = Instant::now();
    let unlabeled = unlabeled_path(desk);
    let nocrit_dir = desk.dir.path().join("bifi_nocrit");
    bifi_cli(desk, &unlabeled, &nocrit_dir, true);

    let test: Vec<SentencePair> = desk::learner_pairs(&desk.all[55000..], 12)
        .into_iter()
        .take(500)
        .collect();
    let f0 = HillclimbFixer::new(desk.critic(100), 4).unwrap();
    let load = |dir: &Path| {
        let model = EditPatternModel::load(dir.join("round_1/fixer.json")).unwrap();
        EditModelFixer::new(model, desk.lm.clone(), Some(desk.vocab()))
    };
    let base = gec_f05(&f0, &test);
    let with_critic = gec_f05(&load(&runs.critic_dir), &test);
    let without = gec_f05(&load(&nocrit_dir), &test);
    let elapsed = t.elapsed() + runs.critic_time;
    let pass = with_critic > base
        && with_critic - base > without - base
        && elapsed < Duration::from_secs(1200);
    verdict(
        pass,
        format!(
            "F0.5 f_0 {:.2}, fixer_1 {:.2}, no-critic fixer_1 {:.2} on {} pairs; {:.0}s",
            100.0 * base,
            100.0 * with_critic,
            100.0 * without,
            test.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Verdict {
    let mut failures = Vec::new();
    if (f05(1.0, 0.5) - 5.0 / 6.0).abs() > 1e-9 {
        failures.push(format!("F0.5(1, 0.5) = {}", f05(1.0, 0.5)));
    }
    for p in [0.0, 0.3, 1.0] {
        if (f05(p, p) - p).abs() > 1e-12 {
            failures.push(format!("F0.5({p}, {p}) = {}", f05(p, p)));
        }
    }
    let pairs: Vec<SentencePair> = desk::learner_pairs(&desk::clean_corpus(100, 3), 4);
    let src: Vec<Sentence> = pairs.iter().map(|p| p.bad.clone()).collect();
    let refs: Vec<Sentence> = pairs.iter().map(|p| p.good.clone()).collect();
    let perfect = score_corpus(&src, &refs, &refs).unwrap();
    if perfect.f05 != 1.0 {
        failures.push(format!("perfect hypothesis scored {}", perfect.f05));
    }
    let none = score_corpus(&src, &src, &refs).unwrap();
    if none.f05 != 0.0 || none.recall != 0.0 {
        failures.push(format!("no-edit hypothesis scored {}", none.f05));
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("exact on {} desk pairs", pairs.len())
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------- criterion 8

fn cli_in(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Train, split, run two BIFI rounds, fix and evaluate, all through the CLI.
fn pipeline(dir: &Path, jobs: &str) {
    let run = |args: &[&str]| {
        let mut full = vec!["--seed", "7", "--jobs", jobs];
        full.extend_from_slice(args);
        cli_in(dir, &full)
    };
    run(&["desk", "clean", "--n", "4000", "--out", "train.jsonl"]);
    run(&[
        "desk",
        "unlabeled",
        "--n",
        "300",
        "--offset",
        "4000",
        "--out",
        "unlabeled.jsonl",
    ]);
    run(&[
        "desk",
        "pairs",
        "--n",
        "200",
        "--offset",
        "4300",
        "--out",
        "test.jsonl",
    ]);
    run(&[
        "desk",
        "clean",
        "--n",
        "300",
        "--offset",
        "4500",
        "--out",
        "held.jsonl",
    ]);
    run(&["lm", "train", "--corpus", "train.jsonl", "--out", "lm.lmc"]);
    run(&[
        "corrupt",
        "--input",
        "held.jsonl",
        "--out",
        "synthetic.jsonl",
    ]);
    let eval = run(&[
        "--json",
        "critic",
        "eval",
        "--pairs",
        "synthetic.jsonl",
        "--lm",
        "lm.lmc",
    ]);
    std::fs::write(dir.join("critic_eval.json"), eval).unwrap();
    run(&[
        "bifi",
        "run",
        "--unlabeled",
        "unlabeled.jsonl",
        "--out",
        "bifi",
        "--lm",
        "lm.lmc",
        "--rounds",
        "2",
    ]);
    let test = read_pairs(dir.join("test.jsonl")).unwrap();
    let src: Vec<Sentence> = test.iter().map(|p| p.bad.clone()).collect();
    let refs: Vec<Sentence> = test.iter().map(|p| p.good.clone()).collect();
    write_sentences(dir.join("src.jsonl"), &src).unwrap();
    write_sentences(dir.join("ref.jsonl"), &refs).unwrap();
    run(&[
        "fix",
        "--input",
        "src.jsonl",
        "--out",
        "hyp.jsonl",
        "--lm",
        "lm.lmc",
        "--kind",
        "edit-model",
        "--model",
        "bifi/round_2/fixer.json",
    ]);
    let score = run(&[
        "--json",
        "gec",
        "eval",
        "--src",
        "src.jsonl",
        "--hyp",
        "hyp.jsonl",
        "--ref",
        "ref.jsonl",
    ]);
    std::fs::write(dir.join("gec_eval.json"), score).unwrap();
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_8() -> Verdict {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path(), "4");
    pipeline(b.path(), "1");
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    let names_a: BTreeSet<_> = ta.keys().collect();
    let names_b: BTreeSet<_> = tb.keys().collect();
    if names_a != names_b {
        return verdict(
            false,
            format!("file sets differ: {names_a:?} vs {names_b:?}"),
        );
    }
    let differing: Vec<String> = ta
        .iter()
        .filter(|(k, v)| tb[*k] != **v)
        .map(|(k, _)| k.display().to_string())
        .collect();
    verdict(
        differing.is_empty(),
        if differing.is_empty() {
            format!(
                "{} files byte-identical across two runs (--jobs 4 and 1)",
                ta.len()
            )
        } else {
            format!("differing: {}", differing.join(", "))
        },
    )
}

// ---------------------------------------------------------------- driver

type Criterion<'a> = Box<dyn FnOnce() -> Verdict + 'a>;

fn guarded(f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let t = Instant::now();
    let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into());
        verdict(false, msg)
    });
    (v, t.elapsed())
}

fn main() {
    // libtest-style filter arguments are accepted and ignored.
    let t = Instant::now();
    let desk = Desk::build();
    eprintln!("desk setup {:.0}s", t.elapsed().as_secs_f64());
    let mut runs = None;
    let criteria: Vec<(u32, &str, Criterion<'_>)> = vec![
        (1, "ED1 oracle equivalence", Box::new(criterion_1)),
        (
            2,
            "critic beats absolute threshold",
            Box::new(|| criterion_2(&desk)),
        ),
        (
            3,
            "probability correlation",
            Box::new(|| criterion_3(&desk)),
        ),
        (
            4,
            "BIFI filter soundness",
            Box::new(|| criterion_4(&desk, &mut runs)),
        ),
        (
            6,
            "sample-size non-degradation",
            Box::new(|| criterion_6(&desk)),
        ),
        (7, "metric arithmetic", Box::new(criterion_7)),
        (8, "pipeline determinism", Box::new(criterion_8)),
    ];
    let mut results: Vec<(u32, String, Verdict, Duration)> = Vec::new();
    for (id, name, f) in criteria {
        let (v, d) = guarded(f);
        results.push((id, name.to_string(), v, d));
    }
    let (v, d) = guarded(|| criterion_5(&desk, &runs));
    results.push((5, "BIFI improves on f_0, critic helps".into(), v, d));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (id, name, v, d) in &results {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failed += 1;
        }
        println!("{tag} {id}. {name}: {} [{:.1}s]", v.detail, d.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
}
