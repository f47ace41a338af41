use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hourglass::graph::{build_region_graph, check_emptiness, GraphError, GraphOptions, Verdict};
use hourglass::oracle::{
    check_constraint_map_suite, check_lemma_suite, cross_check_batch, cross_check_emptiness, enumerate_regions,
    region_count_report, three_clock_counterexample, translation_bisim_batch, translation_bisim_check, GeneratorParams,
    Report,
};
use hourglass::regions::{region_count_bound, EquivalenceOptions};
use hourglass::semantics::run_word;
use hourglass::{translate, ClockBounds, HourglassAutomaton, Rational, Scalar};

use crate::format::{parse_automaton_bytes, parse_word, serialize_word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
/// `simulate` rejected the word, or an oracle suite failed.
pub const EXIT_NEGATIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hga", version, about = "Hourglass automata: simulation, translation and emptiness checking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the automaton accepts some timed word.
    Check {
        file: PathBuf,
        /// Use the half-point refinement (required when clocks are toggled).
        #[arg(long)]
        refine: bool,
        /// Build the graph for three or more clocks even though delay successors are unsound there.
        #[arg(long)]
        unsound: bool,
        /// Write an accepting timed word here when the language is nonempty.
        #[arg(long, value_name = "OUT")]
        witness: Option<PathBuf>,
    },
    /// Run a timed word on the automaton.
    Simulate {
        file: PathBuf,
        #[arg(long, value_name = "WFILE")]
        word: PathBuf,
    },
    /// Print the equivalent timed automaton over forward clocks.
    Translate { file: PathBuf },
    /// Region information: the count bound, the region graph, or enumerated regions.
    Regions {
        file: PathBuf,
        /// Dump the reachable region graph.
        #[arg(long)]
        graph: bool,
        /// Print the region count bound for the automaton's clocks.
        #[arg(long)]
        count: bool,
        /// Print every region met by valuations on this grid, e.g. `1/16`.
        #[arg(long, value_name = "GRID")]
        enumerate: Option<String>,
        #[arg(long)]
        refine: bool,
        #[arg(long)]
        unsound: bool,
    },
    /// Run randomized and exhaustive consistency checks.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// Equivalent three-clock valuations with different delay futures.
    ThreeClock,
    /// Equivalence axioms and the five region properties on random valuations.
    Lemmas,
    /// Flip updates keep equivalent valuations equivalent.
    ConsistentUpdate,
    /// Enumerated region count against the bound.
    Regions,
    /// Graph verdicts against random concrete exploration.
    CrossCheck,
    /// Acceptance agreement with the translated automaton.
    Bisim,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Automaton to cross-check; omit when using --builtin.
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Trials per suite, or automata per batch [default: 10000 for lemmas and
    /// consistent-update, 100 for cross-check, 20 for bisim]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed [default: $HGA_SEED, else 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Clock bounds as a comma list [default: 3,4; 1,1 for regions]
    #[arg(long, value_delimiter = ',')]
    pub bounds: Option<Vec<u32>>,
    /// Use the half-point refinement in the lemma suites and region enumeration.
    #[arg(long)]
    pub refine: bool,
    /// Delay grid for exploration and word enumeration [default: 1 for
    /// cross-check, 1/2 for bisim, 1/16 for regions]
    #[arg(long)]
    pub grid: Option<String>,
    /// Exploration budget of the concrete search.
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Longest enumerated word in the bisimulation check.
    #[arg(long, default_value_t = 3)]
    pub max_len: usize,
}

/// Why a command stopped early.
enum Failure {
    Refused(String),
    Error(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// code. Results go to `out`, diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Refused(msg)) => {
            let _ = writeln!(err, "refused: {msg}");
            EXIT_REFUSED
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Check { file, refine, unsound, witness } => {
            check(&file, refine, unsound, witness.as_deref(), out, err)
        }
        Command::Simulate { file, word } => simulate(&file, &word, out),
        Command::Translate { file } => {
            let a = load(&file)?;
            write!(out, "{}", translate(&a)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Regions { file, graph, count, enumerate, refine, unsound } => regions(
            &file,
            graph,
            count,
            enumerate.as_deref(),
            GraphOptions { refine_half_points: refine, unsound },
            out,
            err,
        ),
        Command::Oracle(args) => oracle(&args, out),
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Error(anyhow!(e).context("cannot write output"))
}

fn load(path: &Path) -> Result<HourglassAutomaton, Failure> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_automaton_bytes(&bytes).map_err(|e| Failure::Error(anyhow!("{}:{e}", path.display())))
}

fn parse_grid(text: &str) -> Result<Rational, Failure> {
    let grid = Rational::parse_exact(text).map_err(|e| Failure::Error(anyhow!("grid `{text}`: {e}")))?;
    if grid <= Rational::from_int(0) {
        return Err(Failure::Error(anyhow!("grid `{text}` must be positive")));
    }
    Ok(grid)
}

fn graph_failure(e: GraphError) -> Failure {
    if e.is_refusal() {
        Failure::Refused(e.to_string())
    } else {
        Failure::Error(anyhow!(e))
    }
}

fn check(
    file: &Path,
    refine: bool,
    unsound: bool,
    witness: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let a = load(file)?;
    let opts = GraphOptions { refine_half_points: refine, unsound };
    let result = check_emptiness::<Rational>(&a, &opts).map_err(graph_failure)?;
    for w in &result.warnings {
        writeln!(err, "warning: {w}").map_err(io)?;
    }
    writeln!(
        err,
        "states={} edges={} time={:.3}s",
        result.stats.states,
        result.stats.edges,
        result.stats.wall_time.as_secs_f64()
    )
    .map_err(io)?;
    writeln!(out, "{}", result.verdict).map_err(io)?;
    if let Some(path) = witness {
        match (&result.verdict, &result.word) {
            (Verdict::NonEmpty, Some(word)) => {
                fs::write(path, serialize_word(word)).with_context(|| format!("cannot write {}", path.display()))?;
                if let Some(replay) = &result.replay {
                    writeln!(err, "witness: {replay}").map_err(io)?;
                }
            }
            _ => writeln!(err, "no witness: the language is empty").map_err(io)?,
        }
    }
    Ok(EXIT_OK)
}

fn simulate(file: &Path, word: &Path, out: &mut dyn Write) -> Outcome {
    let a = load(file)?;
    let text = fs::read_to_string(word).with_context(|| format!("cannot read {}", word.display()))?;
    let w = parse_word::<Rational>(&text).map_err(|e| Failure::Error(anyhow!("{}:{e}", word.display())))?;
    let trace = run_word(&a, &w);
    writeln!(out, "{trace}").map_err(io)?;
    Ok(if trace.accepting { EXIT_OK } else { EXIT_NEGATIVE })
}

fn regions(
    file: &Path,
    graph: bool,
    count: bool,
    enumerate: Option<&str>,
    opts: GraphOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let a = load(file)?;
    let bounds = a.bounds();
    let show_count = count || (!graph && enumerate.is_none());
    if show_count {
        writeln!(
            out,
            "clocks={} bounds={:?} bound={}",
            bounds.len(),
            bounds.as_slice(),
            region_count_bound(bounds, bounds.len())
        )
        .map_err(io)?;
    }
    if let Some(text) = enumerate {
        let grid = parse_grid(text)?;
        let found = enumerate_regions(bounds, &opts.equivalence(), &grid);
        for r in &found {
            let tag = if r.is_half_sum_band() { " half-sum-band" } else { "" };
            writeln!(out, "{r}{tag}").map_err(io)?;
        }
        writeln!(out, "regions={} grid={grid}", found.len()).map_err(io)?;
    }
    if graph {
        let g = build_region_graph::<Rational>(&translate(&a), &opts).map_err(graph_failure)?;
        for w in g.warnings() {
            writeln!(err, "warning: {w}").map_err(io)?;
        }
        write!(out, "{}", g.dump()).map_err(io)?;
        writeln!(err, "states={} edges={}", g.len(), g.edge_count()).map_err(io)?;
    }
    Ok(EXIT_OK)
}

/// `HGA_SEED` when set and numeric, else 1.
pub fn default_seed() -> u64 {
    std::env::var("HGA_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(1)
}

fn oracle(args: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let seed = args.seed.unwrap_or_else(default_seed);
    let bounds = |default: &[u32]| -> Result<ClockBounds, Failure> {
        let c = args.bounds.clone().unwrap_or_else(|| default.to_vec());
        ClockBounds::new(c).map_err(|e| Failure::Error(anyhow!(e)))
    };
    let grid = |default: &str| parse_grid(args.grid.as_deref().unwrap_or(default));
    let eq = EquivalenceOptions { refine_half_points: args.refine, ..Default::default() };
    let reports: Vec<Report> = match (args.builtin, &args.file) {
        (Some(Builtin::ThreeClock), _) => vec![three_clock_counterexample::<Rational>()],
        (Some(Builtin::Lemmas), _) => {
            vec![check_lemma_suite::<Rational>(&bounds(&[3, 4])?, &eq, args.trials.unwrap_or(10_000), seed)]
        }
        (Some(Builtin::ConsistentUpdate), _) => {
            vec![check_constraint_map_suite::<Rational>(&bounds(&[3, 4])?, args.trials.unwrap_or(10_000), seed)]
        }
        (Some(Builtin::Regions), _) => vec![region_count_report(&bounds(&[1, 1])?, &eq, &grid("1/16")?)],
        (Some(Builtin::CrossCheck), _) => {
            let params = match &args.bounds {
                Some(c) => GeneratorParams {
                    clocks: c.len(),
                    max_bound: c.iter().copied().max().unwrap_or(1),
                    ..Default::default()
                },
                None => GeneratorParams::default(),
            };
            vec![cross_check_batch::<Rational>(args.trials.unwrap_or(100), args.budget, seed, &params)]
        }
        (Some(Builtin::Bisim), _) => {
            vec![translation_bisim_batch(args.trials.unwrap_or(20), args.max_len, &grid("1/2")?, seed)]
        }
        (None, Some(file)) => {
            let a = load(file)?;
            vec![
                cross_check_emptiness::<Rational>(&a, args.budget, seed),
                translation_bisim_check(&a, args.max_len, &grid("1/2")?),
            ]
        }
        (None, None) => return Err(Failure::Error(anyhow!("give an automaton file or --builtin NAME"))),
    };
    let mut passed = true;
    for r in &reports {
        write!(out, "{r}").map_err(io)?;
        passed &= r.passed();
    }
    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
}
