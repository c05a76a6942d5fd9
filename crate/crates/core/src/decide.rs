//! Top-level decision procedure: build the simulation arena, solve the
//! Büchi game, extract the winner's positional strategy and re-verify it
//! with the independent checker before answering.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::game::{self, Player, PositionalStrategy};
use crate::simulation::{build_arena, BuildError, Mode, SimArena};
use crate::term::{TermId, TermPool};

/// One validity question: is `lhs ≤ rhs` universally valid?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Query {
    pub lhs: TermId,
    pub rhs: TermId,
    pub mode: Mode,
}

/// Decision outcome. The certificate is the winner's positional strategy
/// over the (dead-end-normalized) arena and has already been verified.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub valid: bool,
    pub winner: Player,
    pub certificate: PositionalStrategy,
    pub positions_explored: usize,
    pub arena_digest: u64,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum DecideError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("internal error: the solver produced a certificate the checker rejects: {0}")]
    CertificateRejected(String),
}

/// A verdict together with the arena it was decided on, for callers that
/// render or replay certificates.
pub struct Decision {
    pub verdict: Verdict,
    pub sim: SimArena,
}

pub fn decide_with_arena(
    pool: &TermPool,
    query: &Query,
    max_positions: usize,
) -> Result<Decision, DecideError> {
    let mut sim = build_arena(pool, query.lhs, query.rhs, query.mode, max_positions)?;
    sim.arena = std::mem::take(&mut sim.arena).normalize_dead_ends();
    let solved = game::solve(&sim.arena);
    let winner = solved.winner(sim.initial);
    let certificate = solved.strategy(winner).clone();
    game::check_certificate(&sim.arena, sim.initial, winner, &certificate)
        .map_err(|e| DecideError::CertificateRejected(e.to_string()))?;
    let verdict = Verdict {
        valid: winner == Player::Duplicator,
        winner,
        certificate,
        positions_explored: sim.len(),
        arena_digest: sim.digest(pool),
    };
    Ok(Decision { verdict, sim })
}

pub fn decide(
    pool: &TermPool,
    query: &Query,
    max_positions: usize,
) -> Result<Verdict, DecideError> {
    decide_with_arena(pool, query, max_positions).map(|d| d.verdict)
}

/// Decides a batch of queries, optionally across threads. Verdicts come
/// back in input order and are identical to sequential results; per-query
/// errors do not abort the rest of the batch.
pub fn decide_batch(
    pool: &TermPool,
    queries: &[Query],
    parallelism: usize,
    max_positions: usize,
) -> Vec<Result<Verdict, DecideError>> {
    if parallelism <= 1 || queries.len() <= 1 {
        return queries
            .iter()
            .map(|q| decide(pool, q, max_positions))
            .collect();
    }
    let slots: Vec<Mutex<Option<Result<Verdict, DecideError>>>> =
        queries.iter().map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..parallelism.min(queries.len()) {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= queries.len() {
                    break;
                }
                let r = decide(pool, &queries[i], max_positions);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}
