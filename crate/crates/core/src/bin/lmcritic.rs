use std::collections::HashSet;
use std::io::Write;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lmcritic::bifi::Bifi;
use lmcritic::config::RunConfig;
use lmcritic::critic::{
    calibrate_delta, evaluate_critic, AbsThrCritic, Critic, EvalReport, LmCritic, VerdictRecord,
};
use lmcritic::desk;
use lmcritic::fixbreak::{ModelHandle, ModelKind};
use lmcritic::geceval::score_corpus;
use lmcritic::io::{read_pairs, read_sentences, write_pairs, write_sentences};
use lmcritic::lm::{self, LmConfig, LmModel, Scorer, ScorerKind};
use lmcritic::perturb::{sample_neighborhood, PerturbMode};
use lmcritic::protocol::{serve, serve_tcp, Backend};
use lmcritic::text::{PairSource, Sentence, SentencePair};
use lmcritic::Error;

#[derive(Parser)]
#[command(
    name = "lmcritic",
    version,
    about = "Grammaticality critic and Break-It-Fix-It toolkit"
)]
struct Cli {
    /// Global seed. Overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads. Output bytes never depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train, score with, or inspect n-gram language models.
    #[command(subcommand)]
    Lm(LmCommand),
    /// Judge sentences, evaluate critics, calibrate the threshold baseline.
    #[command(subcommand)]
    Critic(CriticCommand),
    /// Inspect perturbation neighborhoods.
    #[command(subcommand)]
    Perturb(PerturbCommand),
    /// Corrupt clean sentences into (bad, good) pairs with a breaker.
    Corrupt(CorruptArgs),
    /// Correct sentences with a fixer.
    Fix(FixArgs),
    /// Run Break-It-Fix-It rounds.
    #[command(subcommand)]
    Bifi(BifiCommand),
    /// Edit-based GEC scoring.
    #[command(subcommand)]
    Gec(GecCommand),
    /// Generate the built-in synthetic corpora.
    #[command(subcommand)]
    Desk(DeskCommand),
    /// Serve the wire protocol (score, and optionally fix and break).
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum LmCommand {
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    Score {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scorer: ScorerArgs,
    },
}

#[derive(Subcommand)]
enum CriticCommand {
    Judge {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scorer: ScorerArgs,
        #[command(flatten)]
        perturb: PerturbArgs,
    },
    Eval {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, value_enum, default_value = "lm")]
        critic: CriticKind,
        /// Threshold for the absolute critic; calibrated on the pairs if unset.
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[command(flatten)]
        scorer: ScorerArgs,
        #[command(flatten)]
        perturb: PerturbArgs,
    },
    Calibrate {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        scorer: ScorerArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CriticKind {
    Lm,
    Absthr,
}

#[derive(Subcommand)]
enum PerturbCommand {
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        perturb: PerturbArgs,
    },
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    input: PathBuf,
    /// Pair file to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    perturb: PerturbArgs,
}

#[derive(Args)]
struct FixArgs {
    #[arg(long)]
    input: PathBuf,
    /// Sentence file to write, aligned with the input.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    scorer: ScorerArgs,
    #[command(flatten)]
    perturb: PerturbArgs,
}

#[derive(Subcommand)]
enum BifiCommand {
    Run {
        #[arg(long)]
        unlabeled: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rounds: Option<usize>,
        /// Disable both critic filters and the critic split.
        #[arg(long)]
        no_critic: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        scorer: ScorerArgs,
        #[command(flatten)]
        perturb: PerturbArgs,
    },
}

#[derive(Subcommand)]
enum GecCommand {
    Eval {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
    },
}

#[derive(Subcommand)]
enum DeskCommand {
    /// Clean sentences `offset..offset+n` of the generator stream.
    Clean(DeskArgs),
    /// Clean sentences with a fraction replaced by learner-error copies.
    Unlabeled {
        #[command(flatten)]
        range: DeskArgs,
        #[arg(long, default_value_t = 0.5)]
        bad_fraction: f64,
    },
    /// (learner-error, clean) pairs.
    Pairs(DeskArgs),
}

#[derive(Args)]
struct DeskArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    /// Serve over TCP on this port instead of stdio.
    #[arg(long)]
    port: Option<u16>,
    /// Also answer `fix` with the configured fixer.
    #[arg(long)]
    with_fixer: bool,
    /// Also answer `break` with the configured breaker.
    #[arg(long)]
    with_breaker: bool,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    scorer: ScorerArgs,
    #[command(flatten)]
    perturb: PerturbArgs,
}

#[derive(Args)]
struct InputArgs {
    /// A single sentence.
    #[arg(long, conflicts_with = "input")]
    text: Option<String>,
    /// JSON Lines sentence file.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl InputArgs {
    fn sentences(&self) -> Result<Vec<Sentence>, CliError> {
        match (&self.text, &self.input) {
            (Some(t), _) => Ok(vec![Sentence::with_id(t.as_str(), "0")]),
            (None, Some(p)) => Ok(read_sentences(p)?),
            (None, None) => Err(CliError::Usage(
                "one of --text or --input is required".into(),
            )),
        }
    }
}

#[derive(Args)]
struct ScorerArgs {
    /// Built-in model file.
    #[arg(long)]
    lm: Option<PathBuf>,
    /// Protocol endpoint, `tcp:HOST:PORT` or `cmd:PROGRAM ARGS`.
    #[arg(long)]
    scorer_endpoint: Option<String>,
    #[arg(long)]
    tie_tolerance: Option<f64>,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    mode: Option<PerturbMode>,
    #[arg(long)]
    sample_size: Option<usize>,
    /// Word dictionary JSON.
    #[arg(long)]
    dictionaries: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// Fixer or breaker kind.
    #[arg(long)]
    kind: Option<ModelKindArg>,
    /// Edit-pattern model file.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Protocol endpoint for external models.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    n_edits: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKindArg {
    Identity,
    Hillclimb,
    Synthetic,
    EditModel,
    External,
}

impl From<ModelKindArg> for ModelKind {
    fn from(k: ModelKindArg) -> Self {
        match k {
            ModelKindArg::Identity => ModelKind::Identity,
            ModelKindArg::Hillclimb => ModelKind::Hillclimb,
            ModelKindArg::Synthetic => ModelKind::Synthetic,
            ModelKindArg::EditModel => ModelKind::EditModel,
            ModelKindArg::External => ModelKind::External,
        }
    }
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lib(e.into())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

impl ScorerArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = &self.lm {
            cfg.lm = Some(p.clone());
            cfg.scorer_endpoint = None;
        }
        if let Some(e) = &self.scorer_endpoint {
            cfg.scorer_endpoint = Some(e.clone());
        }
        if let Some(t) = self.tie_tolerance {
            cfg.tie_tolerance = t;
        }
    }
}

impl PerturbArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(n) = self.sample_size {
            cfg.sample_size = n;
        }
        if let Some(d) = &self.dictionaries {
            cfg.dictionaries = Some(d.clone());
        }
    }
}

impl ModelArgs {
    fn apply(&self, handle: &mut ModelHandle) {
        if let Some(k) = self.kind {
            handle.kind = k.into();
        }
        if let Some(m) = &self.model {
            handle.model = Some(m.to_string_lossy().into_owned());
        }
        if let Some(e) = &self.endpoint {
            handle.endpoint = Some(e.clone());
        }
        if let Some(s) = self.max_steps {
            handle.max_steps = s;
        }
        if let Some(n) = self.n_edits {
            handle.n_edits = n;
        }
    }
}

/// The scorer named by `cfg`, plus the model's vocabulary when it is built in.
type Vocab = Option<Arc<HashSet<String>>>;

fn open_scorer(cfg: &RunConfig) -> CliResult<(Arc<dyn Scorer>, Vocab)> {
    let handle = cfg.scorer()?;
    match handle.kind {
        ScorerKind::Builtin => {
            let model = lm::load(&handle.endpoint)?;
            let vocab: HashSet<String> = model.vocab_words().map(str::to_string).collect();
            Ok((Arc::new(model), Some(Arc::new(vocab))))
        }
        ScorerKind::External => Ok((handle.open()?, None)),
    }
}

fn open_critic(cfg: &RunConfig) -> CliResult<(LmCritic, Vocab)> {
    let (scorer, vocab) = open_scorer(cfg)?;
    let id = cfg.scorer()?.endpoint;
    let critic = LmCritic::new(cfg.perturber()?, scorer, id)?.with_tie_tolerance(cfg.tie_tolerance);
    Ok((critic, vocab))
}

fn print_json(value: &impl serde::Serialize) -> CliResult {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn print_report(json: bool, report: &EvalReport) -> CliResult {
    if json {
        print_json(report)
    } else {
        print!("{}", report.table());
        if report.degenerate {
            println!("warning: some metric had a zero denominator and was set to 0");
        }
        Ok(())
    }
}

fn run(cli: Cli, mut cfg: RunConfig) -> CliResult {
    match cli.command {
        Command::Lm(LmCommand::Train { corpus, out, order }) => {
            let order = order.unwrap_or(cfg.order);
            cfg.order = order;
            let sentences = read_sentences(&corpus)?;
            let model = LmModel::train_with(&sentences, &LmConfig::with_order(order))?;
            lm::save(&model, &out)?;
            persist_beside(&cfg, &out)?;
            let summary = json!({
                "model": out,
                "order": order,
                "sentences": sentences.len(),
                "vocab": model.vocab_len(),
            });
            if cli.json {
                print_json(&summary)?;
            } else {
                println!(
                    "trained order-{order} model on {} sentences, {} word types -> {}",
                    sentences.len(),
                    model.vocab_len(),
                    out.display()
                );
            }
        }
        Command::Lm(LmCommand::Score { input, scorer }) => {
            scorer.apply(&mut cfg);
            let xs = input.sentences()?;
            let (scorer, _) = open_scorer(&cfg)?;
            let scores = scorer.score_batch(&xs)?;
            for (x, s) in xs.iter().zip(scores) {
                if cli.json {
                    print_json(
                        &json!({"id": x.id, "text": x.raw, "logprob": s.logprob, "per_token": s.per_token}),
                    )?;
                } else {
                    println!("{:.4}\t{}", s.logprob, x.raw);
                }
            }
        }
        Command::Critic(CriticCommand::Judge {
            input,
            scorer,
            perturb,
        }) => {
            scorer.apply(&mut cfg);
            perturb.apply(&mut cfg);
            let xs = input.sentences()?;
            let (critic, _) = open_critic(&cfg)?;
            let verdicts = critic.judge_batch(&xs)?;
            for (x, v) in xs.iter().zip(&verdicts) {
                print_json(&VerdictRecord::new(x, v))?;
            }
        }
        Command::Critic(CriticCommand::Eval {
            pairs,
            critic,
            delta,
            scorer,
            perturb,
        }) => {
            scorer.apply(&mut cfg);
            perturb.apply(&mut cfg);
            let pairs = read_pairs(&pairs)?;
            let report = match critic {
                CriticKind::Lm => evaluate_critic(&pairs, &open_critic(&cfg)?.0)?,
                CriticKind::Absthr => {
                    let (scorer, _) = open_scorer(&cfg)?;
                    let delta = match delta {
                        Some(d) => d,
                        None => calibrate_delta(&pairs, scorer.as_ref())?,
                    };
                    evaluate_critic(&pairs, &AbsThrCritic { scorer, delta })?
                }
            };
            print_report(cli.json, &report)?;
        }
        Command::Critic(CriticCommand::Calibrate { pairs, scorer }) => {
            scorer.apply(&mut cfg);
            let pairs = read_pairs(&pairs)?;
            let (scorer, _) = open_scorer(&cfg)?;
            let delta = calibrate_delta(&pairs, scorer.as_ref())?;
            if cli.json {
                print_json(&json!({"delta": delta, "pairs": pairs.len()}))?;
            } else {
                println!("{delta}");
            }
        }
        Command::Perturb(PerturbCommand::Sample { input, perturb }) => {
            perturb.apply(&mut cfg);
            let pcfg = cfg.perturber()?;
            for x in input.sentences()? {
                let hood = sample_neighborhood(&x, &pcfg.for_sentence(&x.text()));
                if cli.json {
                    print_json(&json!({"id": x.id, "text": x.raw, "variants": hood.variants}))?;
                } else {
                    for v in hood.variants {
                        println!("{v}");
                    }
                }
            }
        }
        Command::Corrupt(args) => {
            args.perturb.apply(&mut cfg);
            args.model.apply(&mut cfg.breaker);
            if args.model.kind.is_none()
                && args.model.model.is_none()
                && cfg.breaker.kind == ModelKind::Hillclimb
            {
                cfg.breaker.kind = ModelKind::Synthetic;
            }
            cfg.breaker.seed = cfg.seed;
            let ys = read_sentences(&args.input)?;
            let breaker = cfg.breaker.open_breaker(&cfg.perturber()?)?;
            let xs = breaker.break_batch(&ys)?;
            let pairs: Vec<SentencePair> = xs
                .into_iter()
                .zip(ys)
                .map(|(x, y)| SentencePair::new(x, y, PairSource::Synthetic))
                .filter(|p| !p.is_identity())
                .collect();
            write_pairs(&args.out, &pairs)?;
            persist_beside(&cfg, &args.out)?;
            summary(cli.json, json!({"out": args.out, "pairs": pairs.len()}))?;
        }
        Command::Fix(args) => {
            args.scorer.apply(&mut cfg);
            args.perturb.apply(&mut cfg);
            args.model.apply(&mut cfg.fixer);
            let xs = read_sentences(&args.input)?;
            let (critic, vocab) = open_critic(&cfg)?;
            let fixer = cfg.fixer.open_fixer(&critic, vocab)?;
            let ys = fixer.fix_batch(&xs)?;
            write_sentences(&args.out, &ys)?;
            persist_beside(&cfg, &args.out)?;
            let changed = xs
                .iter()
                .zip(&ys)
                .filter(|(x, y)| x.text() != y.text())
                .count();
            summary(
                cli.json,
                json!({"out": args.out, "sentences": ys.len(), "changed": changed}),
            )?;
        }
        Command::Bifi(BifiCommand::Run {
            unlabeled,
            out,
            rounds,
            no_critic,
            model,
            scorer,
            perturb,
        }) => {
            scorer.apply(&mut cfg);
            perturb.apply(&mut cfg);
            model.apply(&mut cfg.fixer);
            if let Some(k) = rounds {
                cfg.rounds = k;
            }
            cfg.no_critic |= no_critic;
            cfg.validate()?;
            let bifi_cfg = cfg.bifi(&out)?;
            let xs = read_sentences(&unlabeled)?;
            let bifi = Bifi::from_config(&bifi_cfg)?;
            std::fs::create_dir_all(&out)?;
            cfg.persist(out.join("config.json"))?;
            let outcome = bifi.run(&xs, Some(&out))?;
            let reports: Vec<_> = outcome.rounds.iter().map(|r| &r.report).collect();
            if cli.json {
                print_json(&reports)?;
            } else {
                println!(
                    "split: {} bad, {} good",
                    outcome.split.d_bad.len(),
                    outcome.split.d_good.len()
                );
                for r in reports {
                    println!(
                        "round {}: P_f {} (accept {:.3}), P_b {} (accept {:.3})",
                        r.round,
                        r.counts.pf.kept,
                        r.acceptance_rates.pf,
                        r.counts.pb.kept,
                        r.acceptance_rates.pb
                    );
                }
                println!("outputs in {}", out.display());
            }
        }
        Command::Gec(GecCommand::Eval {
            src,
            hyp,
            reference,
        }) => {
            let score = score_corpus(
                &read_sentences(&src)?,
                &read_sentences(&hyp)?,
                &read_sentences(&reference)?,
            )?;
            if cli.json {
                print_json(&score)?;
            } else {
                print!("{}", score.table());
            }
        }
        Command::Desk(cmd) => {
            let seed = cfg.seed;
            let (range, sentences_or_pairs) = match &cmd {
                DeskCommand::Clean(r) => (r, None),
                DeskCommand::Unlabeled {
                    range,
                    bad_fraction,
                } => (range, Some(*bad_fraction)),
                DeskCommand::Pairs(r) => (r, None),
            };
            let clean: Vec<Sentence> = (range.offset..range.offset + range.n)
                .map(|i| desk::clean_sentence(seed, i))
                .collect();
            let written = match cmd {
                DeskCommand::Clean(_) => {
                    write_sentences(&range.out, &clean)?;
                    clean.len()
                }
                DeskCommand::Unlabeled { .. } => {
                    let frac = sentences_or_pairs.unwrap_or(0.5);
                    if !(0.0..=1.0).contains(&frac) {
                        return Err(CliError::Usage(format!(
                            "--bad-fraction {frac} is outside [0, 1]"
                        )));
                    }
                    let mixed = desk::unlabeled_mix(&clean, frac, seed);
                    write_sentences(&range.out, &mixed)?;
                    mixed.len()
                }
                DeskCommand::Pairs(_) => {
                    let pairs = desk::learner_pairs(&clean, seed);
                    write_pairs(&range.out, &pairs)?;
                    pairs.len()
                }
            };
            persist_beside(&cfg, &range.out)?;
            summary(cli.json, json!({"out": range.out, "written": written}))?;
        }
        Command::Serve(args) => {
            args.scorer.apply(&mut cfg);
            args.perturb.apply(&mut cfg);
            let (critic, vocab) = open_critic(&cfg)?;
            let mut backend = Backend {
                scorer: Some(critic.scorer().clone()),
                ..Backend::default()
            };
            if args.with_fixer {
                let mut handle = cfg.fixer.clone();
                args.model.apply(&mut handle);
                backend.fixer = Some(handle.open_fixer(&critic, vocab)?);
            }
            if args.with_breaker {
                let mut handle = cfg.breaker.clone();
                args.model.apply(&mut handle);
                handle.seed = cfg.seed;
                backend.breaker = Some(handle.open_breaker(critic.perturber())?);
            }
            match args.port {
                Some(port) => {
                    let listener = TcpListener::bind(("127.0.0.1", port))?;
                    log::info!("serving on {}", listener.local_addr()?);
                    serve_tcp(backend, listener)?;
                }
                None => {
                    let stdin = std::io::stdin();
                    serve(&backend, stdin.lock(), std::io::stdout().lock())?;
                }
            }
        }
    }
    Ok(())
}

/// Records the effective config as `<out>.config.json`.
fn persist_beside(cfg: &RunConfig, out: &Path) -> CliResult {
    let mut name = out.as_os_str().to_owned();
    name.push(".config.json");
    cfg.persist(PathBuf::from(name))?;
    Ok(())
}

fn summary(json: bool, value: serde_json::Value) -> CliResult {
    if json {
        print_json(&value)
    } else {
        let parts: Vec<String> = value
            .as_object()
            .map(|m| m.iter().map(|(k, v)| format!("{k}: {v}")).collect())
            .unwrap_or_default();
        println!("{}", parts.join(", "));
        Ok(())
    }
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    match path {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

/// Exit codes: 0 success, 1 usage, 2 data, 3 scorer or protocol failure.
fn exit_code(e: &Error) -> u8 {
    if e.is_remote() {
        3
    } else if matches!(e, Error::InvalidConfig(_)) {
        1
    } else {
        2
    }
}

fn usage_line(err: &clap::Error) -> String {
    use clap::error::ContextKind;
    let rendered = err.render().to_string();
    let first = rendered
        .lines()
        .next()
        .unwrap_or("error")
        .trim()
        .to_string();
    let arg = err
        .get(ContextKind::InvalidArg)
        .map(|a| a.to_string())
        .filter(|a| !first.contains(a.as_str()));
    match arg {
        Some(a) => format!("{first} {a}"),
        None => first,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                let _ = e.print();
                return ExitCode::from(1);
            }
            eprintln!("{}", usage_line(&e));
            return ExitCode::from(1);
        }
    };
    let mut cfg = match load_config(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => return report(e),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = Some(jobs);
    }
    env_logger::Builder::new()
        .parse_filters(&cfg.log_level)
        .parse_env("RUST_LOG")
        .init();
    if let Err(e) = cfg.validate() {
        return report(e.into());
    }
    if let Some(jobs) = cfg.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match run(cli, cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    match e {
        CliError::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        CliError::Lib(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
