//! Graphviz rendering of winning-strategy certificates, and the reverse
//! direction: parsing an emitted certificate back and replaying it against
//! a freshly rebuilt arena.
//!
//! The rendered graph is the induced strategy subgraph (winner-owned
//! positions keep only the chosen move, opponent positions keep all moves,
//! restricted to what is reachable from the initial position), condensed
//! by contracting positions at which nobody has a decision — single-move
//! bookkeeping steps such as trailing `*1` collapses. A contracted chain
//! renders as one edge carrying the label of its first move. Every actual
//! choice of the winner is additionally recorded in a `// choice:` header
//! line, so replaying needs no guesswork.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::decide::Decision;
use crate::game::{check_certificate, CertificateError, NodeId, Player, PositionalStrategy};
use crate::hash::Fnv64;
use crate::simulation::{build_arena, BuildError, Mode, SimArena, DEFAULT_MAX_POSITIONS};
use crate::term::{ParseError, TermPool};

const FORMAT_TAG: &str = "wdec-cert v1";

fn node_dot_id(rendered: &str) -> String {
    let mut h = Fnv64::new();
    h.write_str(rendered);
    format!("n{:016x}", h.finish())
}

fn induced_successors(
    sim: &SimArena,
    winner: Player,
    strategy: &PositionalStrategy,
    v: NodeId,
) -> Vec<NodeId> {
    if sim.arena.controller(v) == winner && !sim.arena.moves(v).is_empty() {
        match strategy.choice(v) {
            Some(m) => vec![m],
            None if sim.arena.moves(v).len() == 1 => vec![sim.arena.moves(v)[0]],
            None => Vec::new(),
        }
    } else {
        sim.arena.moves(v).to_vec()
    }
}

/// Renders the strategy certificate of a decided query. The strategy must
/// already be verified; rendering follows the usual conventions: Spoiler
/// positions orange, Duplicator positions violet, accepting positions
/// double-bordered, edges labelled by the rule that generated them.
pub fn emit_dot(pool: &TermPool, decision: &Decision) -> String {
    let sim = &decision.sim;
    let winner = decision.verdict.winner;
    let strategy = &decision.verdict.certificate;

    // reachable cone of the exact induced subgraph, in BFS order
    let mut reachable = vec![false; sim.len()];
    let mut cone = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    reachable[sim.initial.index()] = true;
    queue.push_back(sim.initial);
    while let Some(v) = queue.pop_front() {
        cone.push(v);
        for w in induced_successors(sim, winner, strategy, v) {
            if !reachable[w.index()] {
                reachable[w.index()] = true;
                queue.push_back(w);
            }
        }
    }

    // nobody decides anything at a single-move position (other than the
    // initial one); contract those, except when a forced chain is a cycle
    let forced =
        |v: NodeId| v != sim.initial && sim.arena.moves(v).len() == 1 && sim.arena.moves(v)[0] != v;
    let rep = |mut v: NodeId| -> NodeId {
        let mut steps = 0;
        while forced(v) {
            v = sim.arena.moves(v)[0];
            steps += 1;
            if steps > sim.len() {
                break; // forced cycle; keep the entry node
            }
        }
        v
    };

    let initial_pos = sim.position(sim.initial);
    let lhs = pool.display(initial_pos.xs()[0]);
    let rhs = pool.display(initial_pos.rhs());
    let id_of = |v: NodeId| node_dot_id(&sim.position(v).render(pool, sim.mode));

    let mut out = String::new();
    writeln!(out, "digraph wdec_cert {{").unwrap();
    writeln!(out, "  // {FORMAT_TAG}").unwrap();
    writeln!(out, "  // mode: {}", sim.mode.as_str()).unwrap();
    writeln!(out, "  // lhs: {lhs}").unwrap();
    writeln!(out, "  // rhs: {rhs}").unwrap();
    writeln!(
        out,
        "  // winner: {}",
        match winner {
            Player::Duplicator => "duplicator",
            Player::Spoiler => "spoiler",
        }
    )
    .unwrap();
    writeln!(out, "  // digest: {:016x}", sim.digest(pool)).unwrap();
    for &v in &cone {
        if sim.arena.controller(v) == winner && sim.arena.moves(v).len() >= 2 {
            if let Some(m) = strategy.choice(v) {
                writeln!(out, "  // choice: {} {}", id_of(v), id_of(m)).unwrap();
            }
        }
    }
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=box, style=filled];").unwrap();
    for &v in &cone {
        if forced(v) {
            continue;
        }
        let rendered = sim.position(v).render(pool, sim.mode);
        let color = match sim.arena.controller(v) {
            Player::Duplicator => "fillcolor=\"#ede7f6\", color=\"#7e57c2\"",
            Player::Spoiler => "fillcolor=\"#fff3e0\", color=\"#ef6c00\"",
        };
        let peripheries = if sim.arena.is_accepting(v) {
            ", peripheries=2"
        } else {
            ""
        };
        let marker = if v == sim.initial { ", penwidth=2.5" } else { "" };
        writeln!(
            out,
            "  \"{}\" [label=\"{}\", {}{}{}];",
            node_dot_id(&rendered),
            rendered,
            color,
            peripheries,
            marker
        )
        .unwrap();
    }
    for &v in &cone {
        if forced(v) {
            continue;
        }
        for w in induced_successors(sim, winner, strategy, v) {
            let label = sim.label(v, w).map(|l| l.as_str());
            let to = id_of(rep(w));
            match label {
                Some(l) => {
                    writeln!(out, "  \"{}\" -> \"{to}\" [label=\"{l}\"];", id_of(v)).unwrap()
                }
                None => writeln!(out, "  \"{}\" -> \"{to}\";", id_of(v)).unwrap(),
            }
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

/// Parsed form of an emitted certificate.
#[derive(Debug, Clone)]
pub struct CertificateFile {
    pub mode: Mode,
    pub lhs: String,
    pub rhs: String,
    pub winner: Player,
    pub digest: u64,
    pub choices: Vec<(String, String)>,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ReplayError {
    #[error("certificate line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("certificate does not carry the {0} header")]
    MissingHeader(&'static str),
    #[error("failed to parse the recorded {side} term: {source}")]
    Term {
        side: &'static str,
        source: ParseError,
    },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(
        "arena digest mismatch: certificate says {expected:016x}, rebuilt arena is {found:016x}"
    )]
    DigestMismatch { expected: u64, found: u64 },
    #[error("certificate mentions node {0} which is not a reachable position")]
    UnknownNode(String),
    #[error("two distinct choices recorded at winner position {0}")]
    AmbiguousChoice(String),
    #[error("distinct positions collide on one node id; cannot replay")]
    HashCollision,
    #[error(transparent)]
    Rejected(#[from] CertificateError),
}

fn quoted(part: &str) -> Option<(&str, &str)> {
    let rest = part.trim_start().strip_prefix('"')?;
    let end = rest.find('"')?;
    Some((&rest[..end], &rest[end + 1..]))
}

/// Parses a DOT certificate as emitted by [`emit_dot`].
pub fn parse_certificate(text: &str) -> Result<CertificateFile, ReplayError> {
    let mut mode = None;
    let mut lhs = None;
    let mut rhs = None;
    let mut winner = None;
    let mut digest = None;
    let mut tagged = false;
    let mut choices = Vec::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let fail = |message: String| ReplayError::Format {
            line: i + 1,
            message,
        };
        if let Some(comment) = line.strip_prefix("//") {
            let comment = comment.trim();
            if comment == FORMAT_TAG {
                tagged = true;
            } else if let Some(v) = comment.strip_prefix("mode:") {
                mode = Some(match v.trim() {
                    "extended" => Mode::Extended,
                    "pointed" => Mode::Pointed,
                    other => return Err(fail(format!("unknown mode {other:?}"))),
                });
            } else if let Some(v) = comment.strip_prefix("lhs:") {
                lhs = Some(v.trim().to_owned());
            } else if let Some(v) = comment.strip_prefix("rhs:") {
                rhs = Some(v.trim().to_owned());
            } else if let Some(v) = comment.strip_prefix("winner:") {
                winner = Some(match v.trim() {
                    "duplicator" => Player::Duplicator,
                    "spoiler" => Player::Spoiler,
                    other => return Err(fail(format!("unknown winner {other:?}"))),
                });
            } else if let Some(v) = comment.strip_prefix("digest:") {
                digest = Some(
                    u64::from_str_radix(v.trim(), 16)
                        .map_err(|e| fail(format!("bad digest: {e}")))?,
                );
            } else if let Some(v) = comment.strip_prefix("choice:") {
                let mut parts = v.split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some(a), Some(b)) => choices.push((a.to_owned(), b.to_owned())),
                    _ => return Err(fail("choice line needs two node ids".into())),
                }
            }
            continue;
        }
        if !line.starts_with('"') {
            continue;
        }
        let (from, rest) = quoted(line).ok_or_else(|| fail("unterminated node id".into()))?;
        if let Some(rest) = rest.trim_start().strip_prefix("->") {
            let (to, _) = quoted(rest).ok_or_else(|| fail("unterminated edge target".into()))?;
            edges.push((from.to_owned(), to.to_owned()));
        } else {
            nodes.push(from.to_owned());
        }
    }

    if !tagged {
        return Err(ReplayError::MissingHeader("format"));
    }
    Ok(CertificateFile {
        mode: mode.ok_or(ReplayError::MissingHeader("mode"))?,
        lhs: lhs.ok_or(ReplayError::MissingHeader("lhs"))?,
        rhs: rhs.ok_or(ReplayError::MissingHeader("rhs"))?,
        winner: winner.ok_or(ReplayError::MissingHeader("winner"))?,
        digest: digest.ok_or(ReplayError::MissingHeader("digest"))?,
        choices,
        nodes,
        edges,
    })
}

/// Successful replay summary. `positions` counts the nodes drawn in the
/// certificate graph.
#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub mode: Mode,
    pub winner: Player,
    pub valid_claim: bool,
    pub positions: usize,
}

/// Rebuilds the arena named by the certificate, verifies the digest, lifts
/// the recorded choices back into a positional strategy (single-move
/// positions are forced and need no record) and runs the independent
/// checker on it.
pub fn replay_certificate(text: &str) -> Result<ReplayReport, ReplayError> {
    let cert = parse_certificate(text)?;
    let pool = TermPool::new();
    let lhs = pool.parse(&cert.lhs).map_err(|source| ReplayError::Term {
        side: "lhs",
        source,
    })?;
    let rhs = pool.parse(&cert.rhs).map_err(|source| ReplayError::Term {
        side: "rhs",
        source,
    })?;
    let mut sim = build_arena(&pool, lhs, rhs, cert.mode, DEFAULT_MAX_POSITIONS)?;
    sim.arena = std::mem::take(&mut sim.arena).normalize_dead_ends();
    let found = sim.digest(&pool);
    if found != cert.digest {
        return Err(ReplayError::DigestMismatch {
            expected: cert.digest,
            found,
        });
    }

    let mut by_id: HashMap<String, NodeId> = HashMap::new();
    for (n, pos) in sim.positions() {
        let id = node_dot_id(&pos.render(&pool, sim.mode));
        if by_id.insert(id, n).is_some() {
            return Err(ReplayError::HashCollision);
        }
    }

    let mut strategy = PositionalStrategy::new(cert.winner);
    for n in sim.arena.nodes() {
        if sim.arena.controller(n) == cert.winner && sim.arena.moves(n).len() == 1 {
            strategy.set(n, sim.arena.moves(n)[0]);
        }
    }
    for (from, to) in &cert.choices {
        let f = *by_id
            .get(from)
            .ok_or_else(|| ReplayError::UnknownNode(from.clone()))?;
        let t = *by_id
            .get(to)
            .ok_or_else(|| ReplayError::UnknownNode(to.clone()))?;
        if let Some(prev) = strategy.choice(f) {
            if prev != t {
                return Err(ReplayError::AmbiguousChoice(from.clone()));
            }
        }
        strategy.set(f, t);
    }

    check_certificate(&sim.arena, sim.initial, cert.winner, &strategy)?;
    Ok(ReplayReport {
        mode: cert.mode,
        winner: cert.winner,
        valid_claim: cert.winner == Player::Duplicator,
        positions: cert.nodes.len(),
    })
}
