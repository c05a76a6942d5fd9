//! Command-line front end: query files in, verdicts and certificates out.
//!
//! Query file format: one `lhs <= rhs` or `lhs == rhs` per line (`==`
//! expands to both directions), `#` comments, and an optional leading
//! `mode: extended|pointed` header. Exit codes: 0 all queries answered,
//! 10 some verdict was Invalid and `--fail-on-invalid` was given, 2 input
//! error, 3 position budget exceeded, 1 internal error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::axioms;
use crate::decide::{decide_with_arena, DecideError, Decision, Query};
use crate::dot::{emit_dot, replay_certificate, ReplayError};
use crate::game::{self, Player};
use crate::reductions;
use crate::simulation::{BuildError, Mode, DEFAULT_MAX_POSITIONS};
use crate::term::TermPool;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVALID: i32 = 10;

#[derive(Debug, Parser)]
#[command(
    name = "wdec",
    version,
    about = "Decides inequations between regular-expression-like terms over the (extended or pointed) Weihrauch degrees by solving their Büchi simulation game, and emits checkable winning-strategy certificates."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Extended,
    Pointed,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Extended => Mode::Extended,
            ModeArg::Pointed => Mode::Pointed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the queries in a file (or stdin)
    Decide(DecideArgs),
    /// Replay a DOT certificate against a freshly rebuilt arena
    CheckCert {
        /// Certificate emitted by `decide --cert`
        cert: PathBuf,
    },
    /// Generate query files
    Gen {
        #[command(subcommand)]
        target: GenTarget,
    },
    /// Cross-check the optimized solver against the naive fixpoint solver
    /// on random arenas
    OracleCompare {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 40)]
        max_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct DecideArgs {
    /// Query file; `-` or absent reads stdin
    input: Option<PathBuf>,
    /// Validity semantics; overrides the file's `mode:` header
    #[arg(long)]
    mode: Option<ModeArg>,
    /// Abort a query once this many positions are reachable
    #[arg(long, default_value_t = DEFAULT_MAX_POSITIONS)]
    max_positions: usize,
    /// Write the winner's certificate(s) here (query i > 0 gets `.i`
    /// inserted before the extension)
    #[arg(long)]
    cert: Option<PathBuf>,
    /// One JSON object per query on stdout
    #[arg(long)]
    json: bool,
    /// Append exploration statistics to human-readable output
    #[arg(long)]
    stats: bool,
    /// Exit 10 if any query is Invalid
    #[arg(long)]
    fail_on_invalid: bool,
    /// Decide queries concurrently (output order is unaffected)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Subcommand)]
enum GenTarget {
    /// Pointed-mode encoding of a quantified Boolean formula.
    ///
    /// Input is QDIMACS-like: `c` comments and a `p` header are skipped,
    /// every other line is one DNF clause of signed integers (optional
    /// trailing 0). Quantifiers alternate strictly starting with an
    /// universal x1.
    QbfPointed {
        /// QBF file; `-` or absent reads stdin
        input: Option<PathBuf>,
        /// Unroll the iterated literals on the right-hand side
        #[arg(long)]
        dediamond: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extended-mode encoding of a quantified Boolean formula (same input
    /// format as qbf-pointed)
    QbfExtended {
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The n-th member of the family whose winning strategies have
    /// exponentially long cycles
    Expfamily {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The axiom corpus plus the fixed derived inequations, as an
    /// extended-mode query file
    Axioms {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path too
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Decide(args) => cmd_decide(args),
        Command::CheckCert { cert } => cmd_check_cert(&cert),
        Command::Gen { target } => cmd_gen(target),
        Command::OracleCompare {
            count,
            max_nodes,
            seed,
        } => cmd_oracle_compare(count, max_nodes, seed),
    }
}

fn read_input(path: Option<&Path>) -> std::io::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p),
        _ => {
            use std::io::Read;
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

struct FileQuery {
    line: usize,
    lhs: String,
    rhs: String,
    equality: bool,
}

fn parse_query_file(text: &str) -> Result<(Option<Mode>, Vec<FileQuery>), String> {
    let mut mode = None;
    let mut queries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("mode:") {
            if !queries.is_empty() {
                return Err(format!("line {}: mode header must precede queries", i + 1));
            }
            if mode.is_some() {
                return Err(format!("line {}: duplicate mode header", i + 1));
            }
            mode = Some(match rest.trim() {
                "extended" => Mode::Extended,
                "pointed" => Mode::Pointed,
                other => {
                    return Err(format!(
                        "line {}: unknown mode {:?} (expected extended or pointed)",
                        i + 1,
                        other
                    ))
                }
            });
            continue;
        }
        let (lhs, rhs, equality) = if let Some((l, r)) = line.split_once("<=") {
            (l, r, false)
        } else if let Some((l, r)) = line.split_once("==") {
            (l, r, true)
        } else {
            return Err(format!(
                "line {}: expected `lhs <= rhs` or `lhs == rhs`",
                i + 1
            ));
        };
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if lhs.is_empty() || rhs.is_empty() {
            return Err(format!("line {}: missing a side of the inequation", i + 1));
        }
        queries.push(FileQuery {
            line: i + 1,
            lhs: lhs.to_owned(),
            rhs: rhs.to_owned(),
            equality,
        });
    }
    Ok((mode, queries))
}

fn cert_path_for(base: &Path, index: usize) -> PathBuf {
    if index == 0 {
        return base.to_owned();
    }
    match base.extension() {
        Some(ext) => {
            let mut stem = base.with_extension("").into_os_string();
            stem.push(format!(".{index}."));
            stem.push(ext);
            PathBuf::from(stem)
        }
        None => {
            let mut p = base.as_os_str().to_owned();
            p.push(format!(".{index}"));
            PathBuf::from(p)
        }
    }
}

#[derive(serde::Serialize)]
struct JsonRecord<'a> {
    lhs: &'a str,
    rhs: &'a str,
    mode: &'a str,
    valid: bool,
    positions_explored: usize,
    elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cert_path: Option<String>,
}

type TimedDecision = Result<(Decision, u64), DecideError>;

struct Outcome {
    line: usize,
    lhs: String,
    rhs: String,
    result: TimedDecision,
}

fn cmd_decide(args: DecideArgs) -> i32 {
    let text = match read_input(args.input.as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read input: {e}");
            return EXIT_INPUT;
        }
    };
    let (file_mode, file_queries) = match parse_query_file(&text) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let mode: Mode = args
        .mode
        .map(Mode::from)
        .or(file_mode)
        .unwrap_or(Mode::Extended);

    let pool = TermPool::new();
    let mut queries: Vec<(usize, Query)> = Vec::new();
    for fq in &file_queries {
        let lhs = match pool.parse(&fq.lhs) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: line {}: left-hand side: {e}", fq.line);
                return EXIT_INPUT;
            }
        };
        let rhs = match pool.parse(&fq.rhs) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: line {}: right-hand side: {e}", fq.line);
                return EXIT_INPUT;
            }
        };
        queries.push((fq.line, Query { lhs, rhs, mode }));
        if fq.equality {
            queries.push((
                fq.line,
                Query {
                    lhs: rhs,
                    rhs: lhs,
                    mode,
                },
            ));
        }
    }
    if queries.is_empty() {
        eprintln!("error: no queries in input");
        return EXIT_INPUT;
    }

    // decide, possibly across threads; slots keep input order
    let slots: Vec<Mutex<Option<TimedDecision>>> =
        queries.iter().map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    let workers = args.jobs.max(1).min(queries.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= queries.len() {
                    break;
                }
                let started = Instant::now();
                let r = decide_with_arena(&pool, &queries[i].1, args.max_positions)
                    .map(|d| (d, started.elapsed().as_millis() as u64));
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    let outcomes: Vec<Outcome> = queries
        .iter()
        .zip(slots)
        .map(|(&(line, q), slot)| Outcome {
            line,
            lhs: pool.display(q.lhs),
            rhs: pool.display(q.rhs),
            result: slot.into_inner().unwrap().expect("all slots filled"),
        })
        .collect();

    let mut any_invalid = false;
    let mut any_budget = false;
    let mut any_input_error = false;
    let mut any_internal = false;
    for (i, outcome) in outcomes.iter().enumerate() {
        match &outcome.result {
            Ok((decision, elapsed_ms)) => {
                let v = &decision.verdict;
                any_invalid |= !v.valid;
                // Invalid verdicts carry certificates too: Spoiler's
                // strategy is the refutation.
                let cert_path = match &args.cert {
                    Some(base) => {
                        let path = cert_path_for(base, i);
                        let dot = emit_dot(&pool, decision);
                        if let Err(e) = std::fs::write(&path, dot) {
                            eprintln!("error: cannot write certificate {}: {e}", path.display());
                            return EXIT_INPUT;
                        }
                        Some(path.display().to_string())
                    }
                    None => None,
                };
                if args.json {
                    let record = JsonRecord {
                        lhs: &outcome.lhs,
                        rhs: &outcome.rhs,
                        mode: queries[i].1.mode.as_str(),
                        valid: v.valid,
                        positions_explored: v.positions_explored,
                        elapsed_ms: *elapsed_ms,
                        cert_path,
                    };
                    println!("{}", serde_json::to_string(&record).unwrap());
                } else {
                    let mut line = format!(
                        "{} {} <= {}",
                        if v.valid { "VALID  " } else { "INVALID" },
                        outcome.lhs,
                        outcome.rhs
                    );
                    if args.stats {
                        write!(
                            line,
                            "  [positions={}, elapsed={}ms, digest={:016x}]",
                            v.positions_explored, elapsed_ms, v.arena_digest
                        )
                        .unwrap();
                    }
                    if let Some(p) = cert_path {
                        write!(line, "  [cert={p}]").unwrap();
                    }
                    println!("{line}");
                }
            }
            Err(e) => {
                eprintln!("error: line {}: {e}", outcome.line);
                match e {
                    DecideError::Build(BuildError::PositionBudgetExceeded { .. }) => {
                        any_budget = true
                    }
                    DecideError::Build(BuildError::PointedModeUnsupportedTerm { .. }) => {
                        any_input_error = true
                    }
                    DecideError::CertificateRejected(_) => any_internal = true,
                }
            }
        }
    }

    if any_internal {
        EXIT_INTERNAL
    } else if any_input_error {
        EXIT_INPUT
    } else if any_budget {
        EXIT_BUDGET
    } else if any_invalid && args.fail_on_invalid {
        EXIT_INVALID
    } else {
        EXIT_OK
    }
}

fn cmd_check_cert(path: &Path) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_INPUT;
        }
    };
    match replay_certificate(&text) {
        Ok(report) => {
            println!(
                "certificate OK: winner={} ({}), mode={}, positions={}",
                match report.winner {
                    Player::Duplicator => "duplicator",
                    Player::Spoiler => "spoiler",
                },
                if report.valid_claim { "VALID" } else { "INVALID" },
                report.mode.as_str(),
                report.positions
            );
            EXIT_OK
        }
        Err(e @ ReplayError::Rejected(_)) | Err(e @ ReplayError::AmbiguousChoice(_)) => {
            eprintln!("certificate REJECTED: {e}");
            EXIT_INTERNAL
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn write_output(out: Option<&Path>, content: &str) -> i32 {
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, content) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        None => {
            print!("{content}");
            EXIT_OK
        }
    }
}

fn cmd_gen(target: GenTarget) -> i32 {
    let pool = TermPool::new();
    match target {
        GenTarget::QbfPointed {
            input,
            dediamond,
            out,
        } => {
            let text = match read_input(input.as_deref()) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read input: {e}");
                    return EXIT_INPUT;
                }
            };
            let instance = match reductions::parse_qbf(&text) {
                Ok(q) => q,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let mut query = reductions::encode_pointed(&pool, &instance);
            if dediamond {
                query = reductions::dediamond_query(&pool, &query);
            }
            let content = format!(
                "# pointed encoding of a {}-variable quantified Boolean formula\nmode: pointed\n{} <= {}\n",
                instance.var_count(),
                pool.display(query.lhs),
                pool.display(query.rhs)
            );
            write_output(out.as_deref(), &content)
        }
        GenTarget::QbfExtended { input, out } => {
            let text = match read_input(input.as_deref()) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read input: {e}");
                    return EXIT_INPUT;
                }
            };
            let instance = match reductions::parse_qbf(&text) {
                Ok(q) => q,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let query = reductions::encode_extended(&pool, &instance);
            let content = format!(
                "# extended encoding of a {}-variable quantified Boolean formula\nmode: extended\n{} <= {}\n",
                instance.var_count(),
                pool.display(query.lhs),
                pool.display(query.rhs)
            );
            write_output(out.as_deref(), &content)
        }
        GenTarget::Expfamily { n, out } => {
            if n == 0 {
                eprintln!("error: the family is indexed from 1");
                return EXIT_INPUT;
            }
            let query = reductions::gen_expfamily(&pool, n);
            let content = format!(
                "# member {n} of the exponential-cycle family\nmode: pointed\n{} <= {}\n",
                pool.display(query.lhs),
                pool.display(query.rhs)
            );
            write_output(out.as_deref(), &content)
        }
        GenTarget::Axioms { out } => {
            let mut content = String::from("# axiom corpus (variables are the letters a..d)\nmode: extended\n");
            for def in axioms::UNCONDITIONAL {
                writeln!(content, "# {}", def.name).unwrap();
                writeln!(content, "{} <= {}", def.conclusion.0, def.conclusion.1).unwrap();
            }
            for entry in axioms::derived_corpus(&pool) {
                if entry.query.mode != Mode::Extended || !entry.expect_valid {
                    continue;
                }
                writeln!(content, "# {} (derived)", entry.name).unwrap();
                writeln!(
                    content,
                    "{} <= {}",
                    pool.display(entry.query.lhs),
                    pool.display(entry.query.rhs)
                )
                .unwrap();
            }
            write_output(out.as_deref(), &content)
        }
    }
}

fn cmd_oracle_compare(count: usize, max_nodes: usize, seed: u64) -> i32 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut nodes_compared = 0usize;
    for i in 0..count {
        let arena = game::random_arena(&mut rng, max_nodes).normalize_dead_ends();
        let fast = game::solve(&arena);
        let slow = game::naive_solve(&arena);
        for v in arena.nodes() {
            if fast.winner(v) != slow[v.index()] {
                eprintln!(
                    "MISMATCH in arena {i} at node {}: solver says {:?}, oracle says {:?}\n{}",
                    v.0,
                    fast.winner(v),
                    slow[v.index()],
                    arena.dump()
                );
                return EXIT_INTERNAL;
            }
            nodes_compared += 1;
        }
        for v in arena.nodes() {
            let w = fast.winner(v);
            if let Err(e) = game::check_certificate(&arena, v, w, fast.strategy(w)) {
                eprintln!(
                    "REJECTED certificate in arena {i} from node {}: {e}\n{}",
                    v.0,
                    arena.dump()
                );
                return EXIT_INTERNAL;
            }
        }
    }
    println!(
        "oracle-compare: {count} arenas (≤ {max_nodes} nodes, seed {seed}), {nodes_compared} nodes compared, solvers agree everywhere, all extracted certificates verified"
    );
    EXIT_OK
}
