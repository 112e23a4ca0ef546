//! `misere`: command-line front end for misere-core.
//!
//! Exit codes: 0 when the analysis is verified or periodic, 2 when it is
//! undetermined within the caps, 1 on usage or input errors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use misere_core::games::{builtin, Arena, GameId, PlayConvention};
use misere_core::monoid::random::random_monoid;
use misere_core::monoid::{iso, structure_report, BipartiteMonoid};
use misere_core::octal::{detect_normal_period, grundy_sequence, OctalCode};
use misere_core::quotient::{
    compute_quotient_with, detect_misere_period, pretending_function, ClosedContext, OutcomeOracle, QuotientCaps,
    QuotientResult,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Directory for persistent outcome-memo snapshots.
const CACHE_ENV: &str = "MISERE_CACHE_DIR";

#[derive(Parser)]
#[command(name = "misere", version, about = "Impartial game analysis in normal and misere play")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the misere quotient of the closure of some games.
    Quotient(QuotientArgs),
    /// Grundy sequence, pretending function or period of an octal game.
    Octal(OctalArgs),
    /// Outcome of a single game.
    Eval(EvalArgs),
    /// Operations on bipartite monoids stored as JSON.
    Monoid {
        #[command(subcommand)]
        op: MonoidOp,
    },
}

#[derive(Args)]
struct CapArgs {
    /// Largest exponent considered in test positions.
    #[arg(long, default_value_t = QuotientCaps::default().r_max)]
    cap_r: u32,
    /// Largest quotient order considered.
    #[arg(long, default_value_t = QuotientCaps::default().q_max)]
    cap_q: usize,
    /// Largest number of memoized outcomes.
    #[arg(long, default_value_t = QuotientCaps::default().memo_max)]
    cap_memo: usize,
}

impl CapArgs {
    fn caps(&self) -> Result<QuotientCaps> {
        if self.cap_r == 0 || self.cap_q == 0 || self.cap_memo == 0 {
            bail!("caps must be positive");
        }
        Ok(QuotientCaps {
            r_max: self.cap_r,
            r_init: QuotientCaps::default().r_init.min(self.cap_r),
            q_max: self.cap_q,
            memo_max: self.cap_memo,
            ..QuotientCaps::default()
        })
    }
}

#[derive(Args)]
struct QuotientArgs {
    /// Game in bracket notation, or a built-in name (A..E, star2sharp320).
    #[arg(long = "game", required = true)]
    games: Vec<String>,
    #[command(flatten)]
    caps: CapArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    out: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct OctalArgs {
    /// Octal code such as 0.77.
    code: String,
    /// Largest heap size.
    #[arg(long)]
    heaps: usize,
    #[arg(long, conflicts_with = "misere", required_unless_present = "misere")]
    normal: bool,
    #[arg(long)]
    misere: bool,
    /// Print a periodicity certificate (JSON) instead of the sequence.
    #[arg(long)]
    period: bool,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Game in bracket notation or a built-in name.
    game: String,
    #[arg(long, value_enum, default_value_t = Play::Misere)]
    play: Play,
}

#[derive(Clone, Copy, ValueEnum)]
enum Play {
    Normal,
    Misere,
}

#[derive(Subcommand)]
enum MonoidOp {
    /// Reduce a monoid; prints the reduced monoid and the projection.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Structure report: idempotents, kernel, archimedean components.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decide isomorphism of two monoids.
    Iso {
        #[arg(long = "in", num_args = 2, required = true)]
        inputs: Vec<PathBuf>,
    },
    /// A seeded random bipartite monoid.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether the result is determined.
fn run(cli: Cli) -> Result<bool> {
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let determined = match cli.command {
        Command::Quotient(args) => quotient(&args, &mut out)?,
        Command::Octal(args) => octal(&args, &mut out)?,
        Command::Eval(args) => {
            let mut a = Arena::new();
            let g = resolve(&mut a, &args.game)?;
            let play = match args.play {
                Play::Normal => PlayConvention::Normal,
                Play::Misere => PlayConvention::Misere,
            };
            writeln!(out, "{}", a.outcome(g, play))?;
            true
        }
        Command::Monoid { op } => {
            monoid(op, &mut out)?;
            true
        }
    };
    out.flush()?;
    Ok(determined)
}

fn resolve(a: &mut Arena, text: &str) -> Result<GameId> {
    if let Some(g) = builtin(text, a) {
        return Ok(g);
    }
    a.parse(text).with_context(|| format!("cannot read game '{text}'"))
}

fn json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cache_path(fingerprint: u64) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(Path::new(&dir).join(format!("{fingerprint:016x}.memo")))
}

fn quotient<W: Write>(args: &QuotientArgs, out: &mut W) -> Result<bool> {
    let caps = args.caps.caps()?;
    let mut a = Arena::new();
    let games = args
        .games
        .iter()
        .map(|g| resolve(&mut a, g))
        .collect::<Result<Vec<_>>>()?;
    let ctx = ClosedContext::from_games(&a, &games)?;
    let mut oracle = OutcomeOracle::new(caps.memo_max);
    let cache = cache_path(ctx.fingerprint());
    if let Some(path) = cache.as_deref().filter(|p| p.exists()) {
        let loaded = File::open(path)
            .map_err(anyhow::Error::from)
            .and_then(|f| Ok(oracle.read_snapshot(&mut BufReader::new(f), ctx.fingerprint())?));
        if let Err(e) = loaded {
            eprintln!("warning: ignoring memo snapshot {}: {e}", path.display());
        }
    }
    let result = compute_quotient_with(&ctx, &mut oracle, caps, &[])?;
    if let Some(path) = cache {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(File::create(&path)?);
        oracle.write_snapshot(&mut w, ctx.fingerprint())?;
        w.flush()?;
    }
    match args.out {
        Format::Json => json(out, &result)?,
        Format::Text => quotient_text(&result, out)?,
    }
    Ok(result.is_verified())
}

fn quotient_text<W: Write>(r: &QuotientResult, out: &mut W) -> Result<()> {
    let Some(m) = &r.monoid else {
        match r.evidence.reason {
            Some(reason) => writeln!(out, "status: undetermined ({reason:?})")?,
            None => writeln!(out, "status: undetermined")?,
        }
        writeln!(out, "classes found: {}", r.evidence.classes)?;
        for f in &r.evidence.families {
            writeln!(out, "distinguishable multiples of {}: {:?}", f.name, f.multiples)?;
        }
        return Ok(());
    };
    writeln!(out, "status: verified")?;
    writeln!(out, "order: {}", m.size())?;
    let elements: Vec<String> = (0..m.size()).map(|x| m.label(x)).collect();
    writeln!(out, "elements: {}", elements.join(" "))?;
    let p: Vec<String> = m.p_elements().iter().map(|&x| m.label(x)).collect();
    writeln!(out, "P: {}", p.join(" "))?;
    for (name, &x) in r.components.iter().zip(&r.phi) {
        writeln!(out, "phi({name}) = {}", m.label(x))?;
    }
    Ok(())
}

fn octal<W: Write>(args: &OctalArgs, out: &mut W) -> Result<bool> {
    let code: OctalCode = args.code.parse().with_context(|| format!("bad octal code '{}'", args.code))?;
    if args.normal {
        let values = grundy_sequence(&code, args.heaps);
        if args.period {
            return match detect_normal_period(&code, &values) {
                Some(cert) => json(out, &cert).map(|_| true),
                None => {
                    eprintln!("no period certified with heaps up to {}", args.heaps);
                    Ok(false)
                }
            };
        }
        writeln!(out, "n\tvalue")?;
        for (n, v) in values.iter().enumerate() {
            writeln!(out, "{n}\t{v}")?;
        }
        return Ok(true);
    }
    let data = pretending_function(&code, args.heaps, args.caps.caps()?)?;
    if let Some(t) = &data.truncated {
        eprintln!("stopped at heap {}: {}", t.heap, t.reason);
    }
    if args.period {
        return match detect_misere_period(&data) {
            Some(cert) => json(out, &cert).map(|_| true),
            None => {
                eprintln!("no misere period certified with heaps up to {}", data.max_heap());
                Ok(false)
            }
        };
    }
    writeln!(out, "n\tvalue")?;
    for e in &data.entries {
        writeln!(out, "{}\t{}", e.heap, e.label)?;
    }
    Ok(data.truncated.is_none())
}

fn read_monoid(path: &Path) -> Result<BipartiteMonoid> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(f)).with_context(|| format!("cannot read monoid from {}", path.display()))
}

#[derive(Serialize)]
struct Reduced {
    monoid: BipartiteMonoid,
    projection: Vec<usize>,
}

#[derive(Serialize)]
struct IsoReport {
    isomorphic: bool,
    map: Option<Vec<usize>>,
}

fn monoid<W: Write>(op: MonoidOp, out: &mut W) -> Result<()> {
    match op {
        MonoidOp::Reduce { input } => {
            let (monoid, projection) = read_monoid(&input)?.reduce();
            json(out, &Reduced { monoid, projection })
        }
        MonoidOp::Report { input } => json(out, &structure_report(&read_monoid(&input)?)),
        MonoidOp::Iso { inputs } => {
            let map = iso(&read_monoid(&inputs[0])?, &read_monoid(&inputs[1])?)?;
            json(out, &IsoReport { isomorphic: map.is_some(), map })
        }
        MonoidOp::Random { seed, max_size } => {
            if max_size == 0 {
                bail!("--max-size must be positive");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            json(out, &random_monoid(&mut rng, max_size))
        }
    }
}
