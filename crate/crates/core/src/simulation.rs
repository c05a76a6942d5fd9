//! The simulation game between two terms. A position holds the set of
//! claims `X` that remain to be simulated, the simulator term on the right,
//! and (in extended mode) the set `Γ` of letters for which an input has
//! already been exhibited. Duplicator wins from the initial position
//! exactly when `lhs ≤ rhs` is universally valid for the chosen mode.

use std::collections::HashMap;

use crate::game::{Arena, ArenaBuilder, NodeId, Player};
use crate::term::{Letter, Polarity, TermId, TermPool};

/// Which class of degrees validity is decided over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Extended,
    Pointed,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Extended => "extended",
            Mode::Pointed => "pointed",
        }
    }
}

/// Rule that generated a move. Kept only for certificate rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveLabel {
    Explore,
    Fork,
    Alea,
    Choose,
    Junk,
    Fill,
}

impl MoveLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveLabel::Explore => "explore",
            MoveLabel::Fork => "fork",
            MoveLabel::Alea => "alea",
            MoveLabel::Choose => "choose",
            MoveLabel::Junk => "junk",
            MoveLabel::Fill => "fill",
        }
    }
}

/// A game position. `gamma` is sorted by letter name and stays empty in
/// pointed mode; `xs` is a canonically sorted, deduplicated set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Position {
    gamma: Box<[Letter]>,
    xs: Box<[TermId]>,
    rhs: TermId,
}

impl Position {
    pub fn new(pool: &TermPool, gamma: Vec<Letter>, xs: Vec<TermId>, rhs: TermId) -> Position {
        let mut gamma = gamma;
        gamma.sort_by_key(|l| l.index());
        gamma.dedup();
        pool.sort_letters(&mut gamma);
        let mut xs = xs;
        pool.canonical_set(&mut xs);
        Position {
            gamma: gamma.into(),
            xs: xs.into(),
            rhs,
        }
    }

    pub fn initial(pool: &TermPool, lhs: TermId, rhs: TermId) -> Position {
        Position::new(pool, Vec::new(), vec![lhs], rhs)
    }

    pub fn gamma(&self) -> &[Letter] {
        &self.gamma
    }

    pub fn xs(&self) -> &[TermId] {
        &self.xs
    }

    pub fn rhs(&self) -> TermId {
        self.rhs
    }

    fn with_rhs(&self, rhs: TermId) -> Position {
        Position {
            gamma: self.gamma.clone(),
            xs: self.xs.clone(),
            rhs,
        }
    }

    fn replace_claim(&self, pool: &TermPool, t: TermId, items: &[TermId], rhs: TermId) -> Position {
        let mut xs: Vec<TermId> = self.xs.iter().copied().filter(|&u| u != t).collect();
        xs.extend_from_slice(items);
        pool.canonical_set(&mut xs);
        Position {
            gamma: self.gamma.clone(),
            xs: xs.into(),
            rhs,
        }
    }

    fn with_letter(self, pool: &TermPool, a: Letter) -> Position {
        if self.gamma.contains(&a) {
            return self;
        }
        let mut gamma = self.gamma.into_vec();
        gamma.push(a);
        pool.sort_letters(&mut gamma);
        Position {
            gamma: gamma.into(),
            xs: self.xs,
            rhs: self.rhs,
        }
    }

    /// `Γ={a,b} | X={t1,t2} |- rhs` in extended mode, `X={...} |- rhs` in
    /// pointed mode.
    pub fn render(&self, pool: &TermPool, mode: Mode) -> String {
        let xs = self
            .xs
            .iter()
            .map(|&t| pool.display(t))
            .collect::<Vec<_>>()
            .join(",");
        let rhs = pool.display(self.rhs);
        match mode {
            Mode::Extended => {
                let gamma = self
                    .gamma
                    .iter()
                    .map(|&l| pool.letter_name(l))
                    .collect::<Vec<_>>()
                    .join(",");
                format!("Γ={{{gamma}}} | X={{{xs}}} |- {rhs}")
            }
            Mode::Pointed => format!("X={{{xs}}} |- {rhs}"),
        }
    }
}

/// Does some claim other than `1` have a non-oracle polarity? Such claims
/// must be decomposed by the controller before the simulator may advance.
fn has_undecomposed_claim(pool: &TermPool, p: &Position) -> bool {
    p.xs
        .iter()
        .any(|&t| t != pool.one() && !pool.polarity(t).is_oracle())
}

/// Who moves at `p`.
pub fn position_controller(pool: &TermPool, p: &Position) -> Player {
    if has_undecomposed_claim(pool, p) {
        return Player::Spoiler;
    }
    match pool.polarity(p.rhs) {
        Polarity::Forall => Player::Spoiler,
        Polarity::Exists => Player::Duplicator,
        Polarity::Oracle(_) => Player::Duplicator,
    }
}

fn alea_available(pool: &TermPool, p: &Position) -> bool {
    pool.polarity(p.rhs) == Polarity::Forall
        && !has_undecomposed_claim(pool, p)
        && !pool.successors(p.rhs).is_empty()
}

/// Accepting positions: Spoiler-controlled positions from which no `alea`
/// move exists, plus completed simulations (`rhs = 1` with `1 ∈ X`). The
/// second disjunct makes `1 ≤ 1` come out valid, as it must.
pub fn is_accepting(pool: &TermPool, p: &Position) -> bool {
    let spoiler_stuck =
        position_controller(pool, p) == Player::Spoiler && !alea_available(pool, p);
    spoiler_stuck || (p.rhs == pool.one() && p.xs.contains(&pool.one()))
}

/// All moves from `p`, labelled by the rule that generated them, in a
/// deterministic order. Distinct rules reaching the same position are
/// merged, first label winning.
pub fn moves(pool: &TermPool, p: &Position, mode: Mode) -> Vec<(MoveLabel, Position)> {
    let mut out: Vec<(MoveLabel, Position)> = Vec::new();
    let push = |label: MoveLabel, pos: Position, out: &mut Vec<(MoveLabel, Position)>| {
        if !out.iter().any(|(_, q)| *q == pos) {
            out.push((label, pos));
        }
    };

    // explore: the controller commits one existential claim to one step
    for &t in p.xs.iter() {
        if pool.polarity(t) == Polarity::Exists {
            for &t2 in pool.successors(t).iter() {
                push(
                    MoveLabel::Explore,
                    p.replace_claim(pool, t, &[t2], p.rhs),
                    &mut out,
                );
            }
        }
    }
    // fork: a universal claim is split into all its steps at once
    for &t in p.xs.iter() {
        if pool.polarity(t) == Polarity::Forall {
            let succ = pool.successors(t);
            push(
                MoveLabel::Fork,
                p.replace_claim(pool, t, &succ, p.rhs),
                &mut out,
            );
        }
    }
    // alea: the simulator's output-side nondeterminism resolves
    if alea_available(pool, p) {
        for &r2 in pool.successors(p.rhs).iter() {
            push(MoveLabel::Alea, p.with_rhs(r2), &mut out);
        }
    }

    let duplicator_turn = position_controller(pool, p) == Player::Duplicator;
    match pool.polarity(p.rhs) {
        // choose: the simulator's input-side nondeterminism resolves
        Polarity::Exists if duplicator_turn => {
            for &r2 in pool.successors(p.rhs).iter() {
                push(MoveLabel::Choose, p.with_rhs(r2), &mut out);
            }
        }
        Polarity::Oracle(a) if duplicator_turn => {
            // junk: call the oracle and discard the answer; needs a
            // previously seen input for the letter (always there in
            // pointed mode)
            let junk_allowed = mode == Mode::Pointed || p.gamma.contains(&a);
            if junk_allowed {
                for &r2 in pool.successors(p.rhs).iter() {
                    push(MoveLabel::Junk, p.with_rhs(r2), &mut out);
                }
            }
            // fill: a claim waiting on the same oracle advances in lockstep
            for &t in p.xs.iter() {
                if pool.polarity(t) == Polarity::Oracle(a) {
                    for &t2 in pool.successors(t).iter() {
                        for &r2 in pool.successors(p.rhs).iter() {
                            let mut pos = p.replace_claim(pool, t, &[t2], r2);
                            if mode == Mode::Extended {
                                pos = pos.with_letter(pool, a);
                            }
                            push(MoveLabel::Fill, pos, &mut out);
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum BuildError {
    #[error("{explored} reachable positions exceed the budget of {budget}")]
    PositionBudgetExceeded { budget: usize, explored: usize },
    #[error("pointed mode does not support terms containing T or 0; {side} is {term}")]
    PointedModeUnsupportedTerm { side: &'static str, term: String },
}

pub const DEFAULT_MAX_POSITIONS: usize = 1 << 22;

/// The explicit game graph for one inequation, with the bidirectional
/// node ↔ position index and the move labels.
#[derive(Debug)]
pub struct SimArena {
    pub arena: Arena,
    pub initial: NodeId,
    pub mode: Mode,
    positions: Vec<Position>,
    index: HashMap<Position, NodeId>,
    labels: HashMap<(NodeId, NodeId), MoveLabel>,
}

impl SimArena {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, n: NodeId) -> &Position {
        &self.positions[n.index()]
    }

    pub fn node_of(&self, p: &Position) -> Option<NodeId> {
        self.index.get(p).copied()
    }

    pub fn label(&self, from: NodeId, to: NodeId) -> Option<MoveLabel> {
        self.labels.get(&(from, to)).copied()
    }

    pub fn positions(&self) -> impl Iterator<Item = (NodeId, &Position)> {
        self.positions
            .iter()
            .enumerate()
            .map(|(i, p)| (NodeId(i as u32), p))
    }

    /// Stable hash of the graph structure *and* the rendered positions;
    /// two queries whose arenas merely happen to be isomorphic still get
    /// distinct digests.
    pub fn digest(&self, pool: &TermPool) -> u64 {
        let mut h = crate::hash::Fnv64::new();
        h.write_u64(self.arena.digest());
        for p in &self.positions {
            h.write_str(&p.render(pool, self.mode));
        }
        h.finish()
    }
}

/// Breadth-first closure of the move relation from the initial position.
/// Dead ends are left raw; callers normalize before solving.
pub fn build_arena(
    pool: &TermPool,
    lhs: TermId,
    rhs: TermId,
    mode: Mode,
    max_positions: usize,
) -> Result<SimArena, BuildError> {
    if mode == Mode::Pointed {
        for (side, t) in [("lhs", lhs), ("rhs", rhs)] {
            if pool.contains_top_or_zero(t) {
                return Err(BuildError::PointedModeUnsupportedTerm {
                    side,
                    term: pool.display(t),
                });
            }
        }
    }

    let mut builder = ArenaBuilder::new();
    let mut positions: Vec<Position> = Vec::new();
    let mut index: HashMap<Position, NodeId> = HashMap::new();
    let mut labels: HashMap<(NodeId, NodeId), MoveLabel> = HashMap::new();

    let add_node = |p: Position,
                        builder: &mut ArenaBuilder,
                        positions: &mut Vec<Position>,
                        index: &mut HashMap<Position, NodeId>|
     -> Result<(NodeId, bool), BuildError> {
        if let Some(&n) = index.get(&p) {
            return Ok((n, false));
        }
        if positions.len() >= max_positions {
            return Err(BuildError::PositionBudgetExceeded {
                budget: max_positions,
                explored: positions.len() + 1,
            });
        }
        let controller = position_controller(pool, &p);
        let accepting = is_accepting(pool, &p);
        let n = builder.add_node(controller, accepting);
        positions.push(p.clone());
        index.insert(p, n);
        Ok((n, true))
    };

    let init = Position::initial(pool, lhs, rhs);
    let (initial, _) = add_node(init, &mut builder, &mut positions, &mut index)?;
    let mut cursor = 0usize;
    while cursor < positions.len() {
        let from = NodeId(cursor as u32);
        let p = positions[cursor].clone();
        cursor += 1;
        for (label, q) in moves(pool, &p, mode) {
            let (to, _) = add_node(q, &mut builder, &mut positions, &mut index)?;
            builder.add_move(from, to);
            labels.entry((from, to)).or_insert(label);
        }
    }

    Ok(SimArena {
        arena: builder.build(),
        initial,
        mode,
        positions,
        index,
        labels,
    })
}
