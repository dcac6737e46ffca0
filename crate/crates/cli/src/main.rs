mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dehn_core::decision::{closure_stream, coset_decide, CosetOutcome, DecisionError};
use dehn_core::density::{
    cogrowth_profile, DensityError, DensityReport, MembershipPredicate, PredicateSpec,
    DEFAULT_ENUMERATION_CAP,
};
use dehn_core::enumerators::EnumeratorError;
use dehn_core::forcing::{
    certify_gs, checkpoint_load, checkpoint_save, resolved_depth, verify_l, verify_m,
    ForcingConfig, ForcingEngine, ForcingError, ForcingState,
};
use dehn_core::gs::{
    dhat, find_t0, find_t0_min_k, histogram, parse_rational, GsCertificate, GsError,
};
use dehn_core::magnus::{magnus_embed, SeriesContext, SeriesError, DEFAULT_MONOMIAL_CAP};
use dehn_core::words::{Alphabet, Word, WordError};
use dehn_core::zassenhaus::{degree, equal_mod_dn};
use dehn_core::{INTERFACE_VERSION, SCHEMA_VERSION};
use serde_json::json;
use thiserror::Error;

use crate::config::{DensityModeConfig, RunConfig};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (interface 1.0, schema 1)");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    NoWitness(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::NoWitness(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Cap(_) => 4,
        }
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::UniverseTooLarge { .. } => CliError::Cap(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<GsError> for CliError {
    fn from(e: GsError) -> Self {
        match e {
            GsError::NotGolodShafarevich(h) => {
                CliError::NoWitness(format!("no GS witness: H(t0) = {h} is not negative"))
            }
            GsError::Series(s) => s.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ForcingError> for CliError {
    fn from(e: ForcingError) -> Self {
        match e {
            ForcingError::Gs(g) => g.into(),
            ForcingError::Series(s) => s.into(),
            ForcingError::Word(w) => w.into(),
            ForcingError::Enumerator(EnumeratorError::WordTooLong { .. }) => {
                CliError::Cap(e.to_string())
            }
            ForcingError::Io(io) => CliError::Io(io),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::CapExceeded { .. } => CliError::Cap(format!("{e}; use --sample")),
            DensityError::Series(s) => s.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DecisionError> for CliError {
    fn from(e: DecisionError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "dehn", version = VERSION, about = "Magnus embedding, Zassenhaus filtration and Golod-Shafarevich forcing over free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Magnus image of a word, truncated at degree N.
    Magnus {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "N")]
        order: usize,
        word: String,
    },
    /// Print the degree of a word in the Zassenhaus filtration.
    Deg {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "N", default_value_t = 16)]
        order: usize,
        word: String,
    },
    /// Decide whether two words are equal in F / D_n F.
    Eq {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        u: String,
        v: String,
    },
    /// Find or check a Golod-Shafarevich witness for the base relators.
    GsCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the staged construction, then verify its output.
    Forge(ForgeArgs),
    /// Sphere densities of a predicate.
    Density(DensityArgs),
    /// Cogrowth profile |N n S_k|^(1/k) of a predicate.
    Cogrowth(CogrowthArgs),
    /// Budgeted coset membership in F / <<R>>.
    DecideCoset(CosetArgs),
    /// Dump the start of the normal closure enumeration as JSONL.
    Closure(ClosureArgs),
}

#[derive(Args)]
struct ForgeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Continue from a checkpoint written for the same configuration.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long)]
    stage_budget: Option<u64>,
    /// Relator log (JSONL); overrides the config.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Checkpoint file; overrides the config.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Also checkpoint after every this many stages.
    #[arg(long)]
    checkpoint_every: Option<u64>,
}

#[derive(Args)]
struct PredicateArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Predicate as JSON, e.g. '{"kind":"kernel","level":2,"p":2}'.
    #[arg(long, conflicts_with_all = ["kernel_level", "config"])]
    predicate: Option<String>,
    /// Shorthand for the kernel of F -> F / D_n F.
    #[arg(long, requires = "p", conflicts_with = "config")]
    kernel_level: Option<usize>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    pred: PredicateArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Estimate from this many samples per sphere instead of enumerating.
    #[arg(long)]
    sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the JSON header here.
    #[arg(long)]
    header: Option<PathBuf>,
}

#[derive(Args)]
struct CogrowthArgs {
    #[command(flatten)]
    pred: PredicateArgs,
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long)]
    k_max: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
}

#[derive(Args)]
struct CosetArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long = "relator", required = true)]
    relators: Vec<String>,
    #[arg(long = "rep", required = true)]
    reps: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    word: String,
}

#[derive(Args)]
struct ClosureArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long = "relator", required = true)]
    relators: Vec<String>,
    #[arg(long, default_value_t = 100)]
    count: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<u8, CliError> {
    match command {
        Command::Magnus { p, d, order, word } => {
            let a = Alphabet::new(d)?;
            let ctx = SeriesContext::new(p, d, order)?;
            writeln!(out, "{}", magnus_embed(&a.parse(&word)?, &ctx)?)?;
        }
        Command::Deg { p, d, order, word } => {
            let a = Alphabet::new(d)?;
            let order = order
                .min(SeriesContext::max_order_within(d, DEFAULT_MONOMIAL_CAP).unwrap_or(order));
            let ctx = SeriesContext::new(p, d, order)?;
            writeln!(out, "{}", degree(&a.parse(&word)?, &ctx)?)?;
        }
        Command::Eq { p, d, n, u, v } => {
            let a = Alphabet::new(d)?;
            writeln!(out, "{}", equal_mod_dn(&a.parse(&u)?, &a.parse(&v)?, n, p)?)?;
        }
        Command::GsCheck { config } => gs_check(&RunConfig::load(&config)?, out)?,
        Command::Forge(args) => forge(args, out)?,
        Command::Density(args) => density(args, out)?,
        Command::Cogrowth(args) => cogrowth(args, out)?,
        Command::DecideCoset(args) => {
            let a = Alphabet::new(args.d)?;
            let relators = parse_words(&a, &args.relators)?;
            let reps = parse_words(&a, &args.reps)?;
            match coset_decide(&a.parse(&args.word)?, &reps, &relators, args.budget)? {
                CosetOutcome::Index(i) => writeln!(out, "index={i}")?,
                CosetOutcome::Timeout { .. } => writeln!(out, "timeout")?,
            }
        }
        Command::Closure(args) => {
            let a = Alphabet::new(args.d)?;
            let relators = parse_words(&a, &args.relators)?;
            for (i, w) in closure_stream(&relators)?.take(args.count).enumerate() {
                writeln!(out, "{}", json!({"n": i, "word": a.format(&w)}))?;
            }
        }
    }
    Ok(0)
}

fn parse_words(a: &Alphabet, raw: &[String]) -> Result<Vec<Word>, CliError> {
    Ok(raw.iter().map(|w| a.parse(w)).collect::<Result<_, _>>()?)
}

/// The certificate the config asks for: its `t0` if given, else the grid search.
fn certificate_for(cfg: &RunConfig, truncation: usize) -> Result<GsCertificate, CliError> {
    let a = cfg.alphabet()?;
    let relators = cfg.relators(&a)?;
    let order = truncation
        .min(SeriesContext::max_order_within(a.rank(), DEFAULT_MONOMIAL_CAP).unwrap_or(truncation));
    let ctx = SeriesContext::new(cfg.p, a.rank(), order)?;
    let hist = histogram(&relators, &ctx)?;
    let dh = dhat(&relators, cfg.p, a.rank())?;
    let t0 = match &cfg.gs.t0 {
        Some(t) => parse_rational(t)?,
        None if cfg.gs.minimize_k => find_t0_min_k(&hist, dh, cfg.gs.grid_resolution)
            .ok_or_else(|| CliError::NoWitness("no GS witness on the grid".into()))?,
        None => find_t0(&hist, dh, cfg.gs.grid_resolution)
            .ok_or_else(|| CliError::NoWitness("no GS witness on the grid".into()))?,
    };
    Ok(GsCertificate::new(&hist, dh, t0)?)
}

fn gs_check(cfg: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
    let truncation = cfg
        .forcing
        .as_ref()
        .map_or(dehn_core::forcing::DEFAULT_BASE_TRUNCATION, |f| {
            f.truncation
        });
    let cert = certificate_for(cfg, truncation)?;
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&cert).expect("certificate serializes")
    )?;
    Ok(())
}

fn forge(args: ForgeArgs, out: &mut impl Write) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let section = cfg
        .forcing
        .clone()
        .ok_or_else(|| CliError::Config("config has no forcing section".into()))?;
    let cert = certificate_for(&cfg, section.truncation)?;
    let a = cfg.alphabet()?;
    let budget = args.stage_budget.unwrap_or(section.stage_budget);
    let fc = ForcingConfig::with_base_truncation(
        a.clone(),
        cfg.p,
        cfg.relators(&a)?,
        cert.t0.clone(),
        section.enumerators.clone(),
        budget,
        section.truncation,
    )?;
    let log_path = args.log.or(cfg.output.log.clone());
    let ck_path = args.checkpoint.or(cfg.output.checkpoint.clone());

    let mut state = match &args.resume {
        Some(p) => checkpoint_load(p, &fc)?,
        None => ForcingState::default(),
    };
    let mut log = match &log_path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(state.log(&a).as_bytes())?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut engine = ForcingEngine::new(&fc)?;
    while state.next_stage < budget {
        for r in engine.step(&mut state)? {
            if let Some(w) = log.as_mut() {
                writeln!(w, "{}", r.log_line(&a))?;
                w.flush()?;
            }
        }
        if let (Some(every), Some(p)) = (args.checkpoint_every, &ck_path) {
            if every > 0 && state.next_stage % every == 0 {
                checkpoint_save(&state, &fc, p)?;
            }
        }
    }
    if let Some(p) = &ck_path {
        checkpoint_save(&state, &fc, p)?;
    }

    let depth = resolved_depth(&state.relators, fc.k());
    let l = verify_l(&state.relators, fc.k(), depth);
    let m = verify_m(&state, &fc)?;
    let gs = certify_gs(&state, &fc)?;
    let summary = json!({
        "interface_version": INTERFACE_VERSION,
        "schema_version": SCHEMA_VERSION,
        "certificate": fc.certificate(),
        "stages": state.next_stage,
        "relators": state.relators.len(),
        "satisfied": state.satisfied,
        "verify_l": {"depth": depth, "passes": l.passes(), "violations": l.violations.iter().map(|v| json!({"e": v.e, "count": v.count, "bound": v.bound})).collect::<Vec<_>>(), "indeterminate": l.indeterminate},
        "verify_m": {"passes": m.passes(), "problems": m.global.iter().cloned().chain(m.entries.iter().flat_map(|(e, entry)| match entry {
            dehn_core::forcing::MEntry::Satisfied { problems, .. } => problems.iter().map(|p| format!("e={e}: {p}")).collect(),
            _ => Vec::new(),
        })).collect::<Vec<_>>(), "unsatisfied": m.entries.iter().filter_map(|(e, entry)| match entry {
            dehn_core::forcing::MEntry::Unsatisfied { candidates_examined } => Some(json!({"e": e, "candidates_examined": candidates_examined})),
            _ => None,
        }).collect::<Vec<_>>()},
        "certify_gs": {"passes": gs.passes(), "report": gs},
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    writeln!(out, "{text}")?;
    if !(l.passes() && m.passes() && gs.passes()) {
        return Err(CliError::Verification(format!(
            "verification failed:\n{text}"
        )));
    }
    Ok(())
}

struct ResolvedPredicate {
    alphabet: Alphabet,
    spec: PredicateSpec,
}

fn resolve_predicate(
    args: &PredicateArgs,
) -> Result<(ResolvedPredicate, Option<RunConfig>), CliError> {
    if let Some(path) = &args.config {
        let cfg = RunConfig::load(path)?;
        let section = cfg
            .density
            .clone()
            .ok_or_else(|| CliError::Config("config has no density section".into()))?;
        let alphabet = cfg.alphabet()?;
        return Ok((
            ResolvedPredicate {
                alphabet,
                spec: section.predicate,
            },
            Some(cfg),
        ));
    }
    let spec = match (&args.predicate, args.kernel_level) {
        (Some(json), _) => {
            serde_json::from_str(json).map_err(|e| CliError::Config(format!("predicate: {e}")))?
        }
        (None, Some(level)) => PredicateSpec::Kernel {
            level,
            p: args.p.expect("clap enforces --p"),
        },
        (None, None) => PredicateSpec::All {},
    };
    Ok((
        ResolvedPredicate {
            alphabet: Alphabet::new(args.d)?,
            spec,
        },
        None,
    ))
}

fn density(args: DensityArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (pred, cfg) = resolve_predicate(&args.pred)?;
    let section = cfg.as_ref().and_then(|c| c.density.clone());
    let (lo, hi) = match (args.n, args.n_min, args.n_max, &section) {
        (Some(n), _, _, _) => (n, n),
        (None, Some(a), Some(b), _) => (a, b),
        (None, None, None, Some(s)) => (s.n_min, s.n_max),
        _ => return Err(CliError::Config("give --n, or --n-min and --n-max".into())),
    };
    if lo > hi {
        return Err(CliError::Config(format!("empty range {lo}..={hi}")));
    }
    let sampled = args.sample.or(section
        .as_ref()
        .filter(|s| s.mode == DensityModeConfig::Sampled)
        .map(|s| s.samples.unwrap_or(100_000)));
    let seed = section.as_ref().map_or(args.seed, |s| s.seed);
    let report = match sampled {
        Some(samples) => {
            DensityReport::sampled(&pred.spec, &pred.alphabet, lo..=hi, samples, seed)?
        }
        None => DensityReport::exact(&pred.spec, &pred.alphabet, lo..=hi, args.cap)?,
    };
    let mut header = report.header();
    header["interface_version"] = json!(INTERFACE_VERSION);
    header["schema_version"] = json!(SCHEMA_VERSION);
    let csv_path = args.csv.or(cfg.as_ref().and_then(|c| c.output.csv.clone()));
    let header_path = args
        .header
        .or(cfg.as_ref().and_then(|c| c.output.header.clone()));
    match csv_path {
        Some(p) => fs::write(p, report.csv())?,
        None => out.write_all(report.csv().as_bytes())?,
    }
    if let Some(p) = header_path {
        write_json(&p, &header)?;
    }
    Ok(())
}

fn cogrowth(args: CogrowthArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (pred, _) = resolve_predicate(&args.pred)?;
    let compiled = MembershipPredicate::compile(&pred.spec, &pred.alphabet)?;
    let profile = cogrowth_profile(
        &compiled,
        pred.alphabet.rank(),
        args.k_min..=args.k_max,
        args.cap,
    )?;
    let doc = json!({
        "interface_version": INTERFACE_VERSION,
        "schema_version": SCHEMA_VERSION,
        "predicate": pred.spec.describe(),
        "reference": profile.reference,
        "points": profile.points,
    });
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&doc).expect("profile serializes")
    )?;
    Ok(())
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), CliError> {
    fs::write(
        path,
        serde_json::to_string_pretty(v).expect("json serializes") + "\n",
    )?;
    Ok(())
}
