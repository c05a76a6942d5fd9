//! Finite Büchi games: explicit arenas, attractor computation, a quadratic
//! solver extracting positional strategies for both players, a naive
//! fixpoint solver used as an independent oracle, and a certificate checker
//! that validates a claimed winning strategy without trusting the solver.
//!
//! Winning convention: an infinite play is won by Duplicator iff it visits
//! accepting positions infinitely often; a finite maximal play is won by
//! Duplicator iff it ends in an accepting position.

use std::collections::HashMap;

use crate::hash::Fnv64;

/// Dense node handle within one arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Duplicator,
    Spoiler,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Duplicator => Player::Spoiler,
            Player::Spoiler => Player::Duplicator,
        }
    }
}

/// Explicit Büchi game graph. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Arena {
    moves: Vec<Vec<NodeId>>,
    controller: Vec<Player>,
    accepting: Vec<bool>,
}

#[derive(Debug, Default)]
pub struct ArenaBuilder {
    moves: Vec<Vec<NodeId>>,
    controller: Vec<Player>,
    accepting: Vec<bool>,
}

impl ArenaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, controller: Player, accepting: bool) -> NodeId {
        let id = NodeId(self.controller.len() as u32);
        self.controller.push(controller);
        self.accepting.push(accepting);
        self.moves.push(Vec::new());
        id
    }

    pub fn set_accepting(&mut self, n: NodeId, accepting: bool) {
        self.accepting[n.index()] = accepting;
    }

    pub fn add_move(&mut self, from: NodeId, to: NodeId) {
        assert!(
            from.index() < self.controller.len() && to.index() < self.controller.len(),
            "move endpoints must be existing nodes"
        );
        self.moves[from.index()].push(to);
    }

    pub fn build(mut self) -> Arena {
        for adj in &mut self.moves {
            adj.sort_unstable();
            adj.dedup();
        }
        Arena {
            moves: self.moves,
            controller: self.controller,
            accepting: self.accepting,
        }
    }
}

impl Arena {
    pub fn len(&self) -> usize {
        self.controller.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controller.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.controller.len() as u32).map(NodeId)
    }

    pub fn controller(&self, n: NodeId) -> Player {
        self.controller[n.index()]
    }

    pub fn is_accepting(&self, n: NodeId) -> bool {
        self.accepting[n.index()]
    }

    /// Outgoing moves, sorted ascending and deduplicated.
    pub fn moves(&self, n: NodeId) -> &[NodeId] {
        &self.moves[n.index()]
    }

    pub fn is_dead_end(&self, n: NodeId) -> bool {
        self.moves[n.index()].is_empty()
    }

    pub fn has_dead_ends(&self) -> bool {
        self.moves.iter().any(|adj| adj.is_empty())
    }

    /// Compiles the finite-play rule into the pure Büchi condition: every
    /// dead end gets a self-loop, so a former dead end is Duplicator-won
    /// exactly when it is accepting.
    pub fn normalize_dead_ends(mut self) -> Arena {
        for (i, adj) in self.moves.iter_mut().enumerate() {
            if adj.is_empty() {
                adj.push(NodeId(i as u32));
            }
        }
        self
    }

    fn reverse_moves(&self) -> Vec<Vec<NodeId>> {
        let mut rev = vec![Vec::new(); self.len()];
        for v in self.nodes() {
            for &w in self.moves(v) {
                rev[w.index()].push(v);
            }
        }
        rev
    }

    /// Debug dump, one line per node: `id controller accepting succ,succ,...`.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for v in self.nodes() {
            let ctrl = match self.controller(v) {
                Player::Duplicator => 'D',
                Player::Spoiler => 'S',
            };
            let succs = self
                .moves(v)
                .iter()
                .map(|m| m.0.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "{} {} {} {}", v.0, ctrl, u8::from(self.is_accepting(v)), succs).unwrap();
        }
        out
    }

    /// Stable structural hash, used to tie certificates to the arena they
    /// were extracted from.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(self.len() as u64);
        for v in self.nodes() {
            h.write_u8(match self.controller(v) {
                Player::Duplicator => 0,
                Player::Spoiler => 1,
            });
            h.write_u8(u8::from(self.is_accepting(v)));
            h.write_u64(self.moves(v).len() as u64);
            for &w in self.moves(v) {
                h.write_u64(w.0 as u64);
            }
        }
        h.finish()
    }
}

/// Positional strategy for one player: a choice of successor at each node
/// the player wins and controls.
#[derive(Debug, Clone)]
pub struct PositionalStrategy {
    pub owner: Player,
    choice: HashMap<NodeId, NodeId>,
}

impl PositionalStrategy {
    pub fn new(owner: Player) -> Self {
        PositionalStrategy {
            owner,
            choice: HashMap::new(),
        }
    }

    pub fn choice(&self, n: NodeId) -> Option<NodeId> {
        self.choice.get(&n).copied()
    }

    pub fn set(&mut self, n: NodeId, m: NodeId) {
        self.choice.insert(n, m);
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.choice.iter().map(|(&k, &v)| (k, v))
    }
}

/// Result of an attractor computation.
pub struct Attractor {
    pub contains: Vec<bool>,
    rank: Vec<u32>,
}

impl Attractor {
    /// Lowest-id successor strictly closer to the target; the deterministic
    /// witness used for strategy extraction.
    fn witness(&self, arena: &Arena, mask: &[bool], v: NodeId) -> Option<NodeId> {
        arena
            .moves(v)
            .iter()
            .copied()
            .find(|&w| mask[w.index()] && self.contains[w.index()] && self.rank[w.index()] < self.rank[v.index()])
    }
}

fn attractor_in(arena: &Arena, mask: &[bool], target: &[bool], player: Player) -> Attractor {
    let n = arena.len();
    let rev = arena.reverse_moves();
    let mut contains = vec![false; n];
    let mut rank = vec![u32::MAX; n];
    let mut counts = vec![0usize; n];
    for v in arena.nodes() {
        counts[v.index()] = arena
            .moves(v)
            .iter()
            .filter(|w| mask[w.index()])
            .count();
    }
    let mut queue: std::collections::VecDeque<NodeId> = std::collections::VecDeque::new();
    for v in arena.nodes() {
        if mask[v.index()] && target[v.index()] {
            contains[v.index()] = true;
            rank[v.index()] = 0;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &rev[u.index()] {
            if !mask[v.index()] || contains[v.index()] {
                continue;
            }
            if arena.controller(v) == player {
                contains[v.index()] = true;
                rank[v.index()] = rank[u.index()] + 1;
                queue.push_back(v);
            } else {
                counts[v.index()] -= 1;
                if counts[v.index()] == 0 {
                    contains[v.index()] = true;
                    rank[v.index()] = rank[u.index()] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    Attractor { contains, rank }
}

/// An attractor set together with the forcing edges that witness it.
pub struct AttractorResult {
    pub nodes: Vec<NodeId>,
    /// For each node `player` controls inside the set (targets excluded), a
    /// move strictly closer to the target.
    witness: Vec<Option<NodeId>>,
}

impl AttractorResult {
    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn witness(&self, v: NodeId) -> Option<NodeId> {
        self.witness[v.index()]
    }
}

/// Least set from which `player` can force reaching `target`.
pub fn attractor(arena: &Arena, target: &[NodeId], player: Player) -> AttractorResult {
    let mask = vec![true; arena.len()];
    let mut tgt = vec![false; arena.len()];
    for &v in target {
        tgt[v.index()] = true;
    }
    let attr = attractor_in(arena, &mask, &tgt, player);
    let witness = arena
        .nodes()
        .map(|v| {
            if attr.contains[v.index()] && !tgt[v.index()] && arena.controller(v) == player {
                attr.witness(arena, &mask, v)
            } else {
                None
            }
        })
        .collect();
    AttractorResult {
        nodes: arena.nodes().filter(|v| attr.contains[v.index()]).collect(),
        witness,
    }
}

/// Winning regions plus positional strategies for both players.
pub struct SolveResult {
    winner: Vec<Player>,
    pub duplicator_strategy: PositionalStrategy,
    pub spoiler_strategy: PositionalStrategy,
}

impl SolveResult {
    pub fn winner(&self, n: NodeId) -> Player {
        self.winner[n.index()]
    }

    pub fn region(&self, p: Player) -> Vec<NodeId> {
        self.winner
            .iter()
            .enumerate()
            .filter(|(_, &w)| w == p)
            .map(|(i, _)| NodeId(i as u32))
            .collect()
    }

    pub fn strategy(&self, p: Player) -> &PositionalStrategy {
        match p {
            Player::Duplicator => &self.duplicator_strategy,
            Player::Spoiler => &self.spoiler_strategy,
        }
    }
}

fn min_move_satisfying(
    arena: &Arena,
    v: NodeId,
    pred: impl Fn(NodeId) -> bool,
) -> Option<NodeId> {
    arena.moves(v).iter().copied().find(|&w| pred(w))
}

/// Solves the Büchi game by the classical attractor recurrence. The arena
/// must be dead-end normalized.
pub fn solve(arena: &Arena) -> SolveResult {
    assert!(
        !arena.has_dead_ends(),
        "solve requires a dead-end-normalized arena"
    );
    let n = arena.len();
    let mut alive = vec![true; n];
    let mut winner = vec![Player::Duplicator; n];
    let mut dup = PositionalStrategy::new(Player::Duplicator);
    let mut spo = PositionalStrategy::new(Player::Spoiler);

    loop {
        let targets: Vec<bool> = arena
            .nodes()
            .map(|v| alive[v.index()] && arena.is_accepting(v))
            .collect();
        let reach = attractor_in(arena, &alive, &targets, Player::Duplicator);
        let escaped: Vec<bool> = arena
            .nodes()
            .map(|v| alive[v.index()] && !reach.contains[v.index()])
            .collect();

        if escaped.iter().all(|&b| !b) {
            // Fixpoint: everything still alive is Duplicator-won. At
            // accepting nodes re-enter the attractor through any surviving
            // successor, elsewhere follow the attractor witness.
            for v in arena.nodes() {
                if alive[v.index()] && arena.controller(v) == Player::Duplicator {
                    let m = if targets[v.index()] {
                        min_move_satisfying(arena, v, |w| alive[w.index()])
                    } else {
                        reach.witness(arena, &alive, v)
                    };
                    dup.set(v, m.expect("winning region node must keep a winning move"));
                }
            }
            break;
        }

        let trap = attractor_in(arena, &alive, &escaped, Player::Spoiler);
        for v in arena.nodes() {
            if !(alive[v.index()] && trap.contains[v.index()]) {
                continue;
            }
            winner[v.index()] = Player::Spoiler;
            if arena.controller(v) == Player::Spoiler {
                let m = if escaped[v.index()] {
                    // Stay clear of the accepting set forever: some move
                    // remains inside the escaped region.
                    min_move_satisfying(arena, v, |w| alive[w.index()] && escaped[w.index()])
                } else {
                    trap.witness(arena, &alive, v)
                };
                spo.set(v, m.expect("spoiler-won node must keep a winning move"));
            }
        }
        for v in arena.nodes() {
            if trap.contains[v.index()] {
                alive[v.index()] = false;
            }
        }
    }

    SolveResult {
        winner,
        duplicator_strategy: dup,
        spoiler_strategy: spo,
    }
}

/// Winner of every node, computed as the greatest fixpoint
/// `Z = Attr_D(F ∩ Pre_D(Z))` by plain unoptimized iteration. Independent
/// oracle for [`solve`]; extracts no strategies.
pub fn naive_solve(arena: &Arena) -> Vec<Player> {
    assert!(
        !arena.has_dead_ends(),
        "naive_solve requires a dead-end-normalized arena"
    );
    let n = arena.len();

    let pre_d = |z: &[bool]| -> Vec<bool> {
        arena
            .nodes()
            .map(|v| match arena.controller(v) {
                Player::Duplicator => arena.moves(v).iter().any(|w| z[w.index()]),
                Player::Spoiler => arena.moves(v).iter().all(|w| z[w.index()]),
            })
            .collect()
    };
    let naive_attr_d = |target: &[bool]| -> Vec<bool> {
        let mut a = target.to_vec();
        loop {
            let mut changed = false;
            for v in arena.nodes() {
                if a[v.index()] {
                    continue;
                }
                let admit = match arena.controller(v) {
                    Player::Duplicator => arena.moves(v).iter().any(|w| a[w.index()]),
                    Player::Spoiler => arena.moves(v).iter().all(|w| a[w.index()]),
                };
                if admit {
                    a[v.index()] = true;
                    changed = true;
                }
            }
            if !changed {
                return a;
            }
        }
    };

    let mut z = vec![true; n];
    loop {
        let pre = pre_d(&z);
        let target: Vec<bool> = arena
            .nodes()
            .map(|v| arena.is_accepting(v) && pre[v.index()])
            .collect();
        let next = naive_attr_d(&target);
        if next == z {
            break;
        }
        z = next;
    }
    arena
        .nodes()
        .map(|v| {
            if z[v.index()] {
                Player::Duplicator
            } else {
                Player::Spoiler
            }
        })
        .collect()
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum CertificateError {
    #[error("certificate owner {owner:?} does not match claimed winner {winner:?}")]
    OwnerMismatch { owner: Player, winner: Player },
    #[error("no choice at reachable node {node:?} owned by {owner:?} with {successors} successors")]
    MissingChoice {
        node: NodeId,
        owner: Player,
        successors: usize,
    },
    #[error("choice {choice:?} at node {node:?} is not a move of the arena")]
    InvalidChoice { node: NodeId, choice: NodeId },
    #[error("reachable dead end {node:?} is losing for {owner:?}")]
    LosingDeadEnd { node: NodeId, owner: Player },
    #[error("induced subgraph has an accepting-free cycle through {node:?}")]
    AcceptingFreeCycle { node: NodeId },
    #[error("accepting node {node:?} lies on a cycle of the induced subgraph")]
    AcceptingCycle { node: NodeId },
}

struct InducedSubgraph {
    reachable: Vec<NodeId>,
    succs: HashMap<NodeId, Vec<NodeId>>,
}

fn induced_subgraph(
    arena: &Arena,
    initial: NodeId,
    winner: Player,
    strategy: &PositionalStrategy,
) -> Result<InducedSubgraph, CertificateError> {
    let mut succs: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    let mut reachable = Vec::new();
    let mut seen = vec![false; arena.len()];
    let mut stack = vec![initial];
    seen[initial.index()] = true;
    while let Some(v) = stack.pop() {
        reachable.push(v);
        let out: Vec<NodeId> = if arena.controller(v) == winner && !arena.moves(v).is_empty() {
            match strategy.choice(v) {
                Some(m) => {
                    if !arena.moves(v).contains(&m) {
                        return Err(CertificateError::InvalidChoice { node: v, choice: m });
                    }
                    vec![m]
                }
                None => {
                    return Err(CertificateError::MissingChoice {
                        node: v,
                        owner: winner,
                        successors: arena.moves(v).len(),
                    })
                }
            }
        } else {
            arena.moves(v).to_vec()
        };
        for &w in &out {
            if !seen[w.index()] {
                seen[w.index()] = true;
                stack.push(w);
            }
        }
        succs.insert(v, out);
    }
    reachable.sort_unstable();
    Ok(InducedSubgraph { reachable, succs })
}

/// Does the subgraph restricted to nodes passing `keep` contain a cycle?
/// Kahn-style peeling; returns a node on a cycle if one exists.
fn find_cycle_node(g: &InducedSubgraph, keep: impl Fn(NodeId) -> bool) -> Option<NodeId> {
    let mut indeg: HashMap<NodeId, usize> = HashMap::new();
    for &v in &g.reachable {
        if !keep(v) {
            continue;
        }
        indeg.entry(v).or_insert(0);
        for &w in &g.succs[&v] {
            if keep(w) {
                *indeg.entry(w).or_insert(0) += 1;
            }
        }
    }
    let mut queue: Vec<NodeId> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut removed = 0usize;
    while let Some(v) = queue.pop() {
        removed += 1;
        for &w in &g.succs[&v] {
            if keep(w) {
                let d = indeg.get_mut(&w).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(w);
                }
            }
        }
    }
    if removed == indeg.len() {
        None
    } else {
        let mut leftover: Vec<NodeId> = indeg
            .iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&v, _)| v)
            .collect();
        leftover.sort_unstable();
        leftover.first().copied()
    }
}

/// Strongly connected components of the induced subgraph (iterative Tarjan).
/// Returns for each node its component id and the component sizes.
fn sccs(g: &InducedSubgraph) -> (HashMap<NodeId, usize>, Vec<usize>) {
    #[derive(Clone, Copy)]
    struct Frame {
        node: NodeId,
        next: usize,
    }
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    let mut low: HashMap<NodeId, usize> = HashMap::new();
    let mut on_stack: HashMap<NodeId, bool> = HashMap::new();
    let mut stack: Vec<NodeId> = Vec::new();
    let mut comp: HashMap<NodeId, usize> = HashMap::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut counter = 0usize;

    for &root in &g.reachable {
        if index.contains_key(&root) {
            continue;
        }
        let mut frames = vec![Frame { node: root, next: 0 }];
        index.insert(root, counter);
        low.insert(root, counter);
        counter += 1;
        stack.push(root);
        on_stack.insert(root, true);
        while let Some(frame) = frames.last().copied() {
            let v = frame.node;
            if frame.next < g.succs[&v].len() {
                let w = g.succs[&v][frame.next];
                frames.last_mut().unwrap().next += 1;
                if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(w) {
                    slot.insert(counter);
                    low.insert(w, counter);
                    counter += 1;
                    stack.push(w);
                    on_stack.insert(w, true);
                    frames.push(Frame { node: w, next: 0 });
                } else if on_stack[&w] {
                    let lw = index[&w];
                    let lv = low[&v];
                    low.insert(v, lv.min(lw));
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    let lv = low[&v];
                    let lp = low[&parent.node];
                    low.insert(parent.node, lp.min(lv));
                }
                if low[&v] == index[&v] {
                    let id = sizes.len();
                    let mut size = 0;
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack.insert(w, false);
                        comp.insert(w, id);
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    sizes.push(size);
                }
            }
        }
    }
    (comp, sizes)
}

/// Checks a claimed winning strategy with no reference to the solver.
///
/// The induced subgraph keeps only the chosen edge at winner-owned nodes and
/// all edges at opponent nodes, restricted to what is reachable from
/// `initial`. Duplicator certificates need every reachable dead end
/// accepting and every induced cycle to pass through an accepting node;
/// Spoiler certificates need the duals.
pub fn check_certificate(
    arena: &Arena,
    initial: NodeId,
    winner: Player,
    strategy: &PositionalStrategy,
) -> Result<(), CertificateError> {
    if strategy.owner != winner {
        return Err(CertificateError::OwnerMismatch {
            owner: strategy.owner,
            winner,
        });
    }
    let g = induced_subgraph(arena, initial, winner, strategy)?;
    for &v in &g.reachable {
        if g.succs[&v].is_empty() {
            let ok = match winner {
                Player::Duplicator => arena.is_accepting(v),
                Player::Spoiler => !arena.is_accepting(v),
            };
            if !ok {
                return Err(CertificateError::LosingDeadEnd {
                    node: v,
                    owner: winner,
                });
            }
        }
    }
    match winner {
        Player::Duplicator => {
            if let Some(v) = find_cycle_node(&g, |v| !arena.is_accepting(v)) {
                return Err(CertificateError::AcceptingFreeCycle { node: v });
            }
        }
        Player::Spoiler => {
            let (comp, sizes) = sccs(&g);
            for &v in &g.reachable {
                if !arena.is_accepting(v) {
                    continue;
                }
                let on_cycle = sizes[comp[&v]] > 1 || g.succs[&v].contains(&v);
                if on_cycle {
                    return Err(CertificateError::AcceptingCycle { node: v });
                }
            }
        }
    }
    Ok(())
}

/// Uniform random arena for cross-checking the solvers. May contain dead
/// ends; normalize before solving.
pub fn random_arena(rng: &mut impl rand::Rng, max_nodes: usize) -> Arena {
    use rand::seq::SliceRandom;
    let n = rng.gen_range(1..=max_nodes.max(1));
    let density = rng.gen_range(0.1..0.5);
    let mut b = ArenaBuilder::new();
    for _ in 0..n {
        let ctrl = *[Player::Duplicator, Player::Spoiler]
            .choose(rng)
            .unwrap();
        b.add_node(ctrl, rng.gen_bool(0.5));
    }
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                b.add_move(NodeId(i as u32), NodeId(j as u32));
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn single(accepting: bool) -> Arena {
        let mut b = ArenaBuilder::new();
        b.add_node(Player::Spoiler, accepting);
        b.build()
    }

    #[test]
    fn normalize_gives_self_loops_only_to_dead_ends() {
        let a = single(true).normalize_dead_ends();
        assert_eq!(a.moves(NodeId(0)), &[NodeId(0)]);
        assert!(a.is_accepting(NodeId(0)));

        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Duplicator, true);
        b.add_move(v0, v1);
        b.add_move(v1, v0);
        let a = b.build().normalize_dead_ends();
        assert_eq!(a.moves(v0), &[v1]);
        assert_eq!(a.moves(v1), &[v0]);
    }

    #[test]
    fn dead_end_winner_matches_finite_play_rule() {
        let a = single(true).normalize_dead_ends();
        assert_eq!(solve(&a).winner(NodeId(0)), Player::Duplicator);
        let a = single(false).normalize_dead_ends();
        assert_eq!(solve(&a).winner(NodeId(0)), Player::Spoiler);
    }

    #[test]
    fn attractor_whole_graph_and_empty_target() {
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Spoiler, false);
        b.add_move(v0, v1);
        b.add_move(v1, v0);
        let a = b.build();
        assert_eq!(attractor(&a, &[v0, v1], Player::Duplicator).nodes, vec![v0, v1]);
        assert!(attractor(&a, &[], Player::Duplicator).nodes.is_empty());
        assert!(attractor(&a, &[], Player::Spoiler).nodes.is_empty());
    }

    #[test]
    fn attractor_three_node_chain() {
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Duplicator, false);
        let v2 = b.add_node(Player::Duplicator, false);
        b.add_move(v0, v1);
        b.add_move(v1, v2);
        let a = b.build();
        let attr = attractor(&a, &[v2], Player::Duplicator);
        assert_eq!(attr.nodes, vec![v0, v1, v2]);
        // witnesses walk the chain, and targets carry none
        assert_eq!(attr.witness(v0), Some(v1));
        assert_eq!(attr.witness(v1), Some(v2));
        assert_eq!(attr.witness(v2), None);
        // single moves force even the opponent along the chain
        assert_eq!(attractor(&a, &[v2], Player::Spoiler).nodes, vec![v0, v1, v2]);

        // an escape hatch at v1 breaks the forcing
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Duplicator, false);
        let v2 = b.add_node(Player::Duplicator, false);
        let v3 = b.add_node(Player::Duplicator, false);
        b.add_move(v0, v1);
        b.add_move(v1, v2);
        b.add_move(v1, v3);
        let a = b.build();
        assert_eq!(attractor(&a, &[v2], Player::Duplicator).nodes, vec![v0, v1, v2]);
        assert_eq!(attractor(&a, &[v2], Player::Spoiler).nodes, vec![v2]);
    }

    #[test]
    fn attractor_is_monotone_and_idempotent() {
        let mut rng = crate::testutil::rng(11);
        for _ in 0..50 {
            let a = random_arena(&mut rng, 25).normalize_dead_ends();
            let k = rng.gen_range(0..=a.len());
            let target: Vec<NodeId> = a.nodes().take(k).collect();
            let attr = attractor(&a, &target, Player::Duplicator);
            for &t in &target {
                assert!(attr.contains(t));
            }
            let again = attractor(&a, &attr.nodes, Player::Duplicator);
            assert_eq!(attr.nodes, again.nodes);
        }
    }

    #[test]
    fn solve_simple_games() {
        // one accepting node with a self-loop: Duplicator wins
        let mut b = ArenaBuilder::new();
        let v = b.add_node(Player::Spoiler, true);
        b.add_move(v, v);
        assert_eq!(solve(&b.build()).winner(v), Player::Duplicator);

        // two-node cycle, nothing accepting: Spoiler wins
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Spoiler, false);
        b.add_move(v0, v1);
        b.add_move(v1, v0);
        let r = solve(&b.build());
        assert_eq!(r.winner(v0), Player::Spoiler);
        assert_eq!(r.winner(v1), Player::Spoiler);
    }

    #[test]
    fn naive_solve_trivia() {
        // empty accepting set: Spoiler everywhere
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Spoiler, false);
        b.add_move(v0, v1);
        b.add_move(v1, v0);
        assert!(naive_solve(&b.build())
            .iter()
            .all(|&w| w == Player::Spoiler));

        // everything accepting and on a cycle: Duplicator everywhere
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, true);
        let v1 = b.add_node(Player::Spoiler, true);
        b.add_move(v0, v1);
        b.add_move(v1, v0);
        assert!(naive_solve(&b.build())
            .iter()
            .all(|&w| w == Player::Duplicator));
    }

    #[test]
    fn solvers_agree_on_random_arenas() {
        let mut rng = crate::testutil::rng(23);
        for _ in 0..120 {
            let a = random_arena(&mut rng, 30).normalize_dead_ends();
            let fast = solve(&a);
            let slow = naive_solve(&a);
            for v in a.nodes() {
                assert_eq!(fast.winner(v), slow[v.index()], "arena:\n{}", a.dump());
            }
        }
    }

    #[test]
    fn extracted_strategies_pass_the_checker() {
        let mut rng = crate::testutil::rng(37);
        for _ in 0..120 {
            let a = random_arena(&mut rng, 30).normalize_dead_ends();
            let r = solve(&a);
            for v in a.nodes() {
                let w = r.winner(v);
                check_certificate(&a, v, w, r.strategy(w))
                    .unwrap_or_else(|e| panic!("{e} at {v:?} in:\n{}", a.dump()));
            }
        }
    }

    #[test]
    fn checker_accepts_spoiler_guarded_accepting_loop() {
        // accepting self-loop owned by the opponent: empty Duplicator
        // strategy is a valid certificate
        let mut b = ArenaBuilder::new();
        let v = b.add_node(Player::Spoiler, true);
        b.add_move(v, v);
        let a = b.build();
        let s = PositionalStrategy::new(Player::Duplicator);
        assert!(check_certificate(&a, v, Player::Duplicator, &s).is_ok());
    }

    #[test]
    fn checker_rejects_accepting_free_cycle() {
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Spoiler, false);
        let v2 = b.add_node(Player::Spoiler, true);
        b.add_move(v0, v1);
        b.add_move(v0, v2);
        b.add_move(v1, v0);
        b.add_move(v2, v2);
        let a = b.build();
        let mut s = PositionalStrategy::new(Player::Duplicator);
        s.set(v0, v1);
        let err = check_certificate(&a, v0, Player::Duplicator, &s).unwrap_err();
        assert!(matches!(err, CertificateError::AcceptingFreeCycle { .. }));
        // while choosing the accepting loop is fine
        let mut s = PositionalStrategy::new(Player::Duplicator);
        s.set(v0, v2);
        assert!(check_certificate(&a, v0, Player::Duplicator, &s).is_ok());
    }

    #[test]
    fn checker_rejects_missing_and_invalid_choices() {
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, true);
        let v1 = b.add_node(Player::Spoiler, true);
        b.add_move(v0, v1);
        b.add_move(v1, v1);
        let a = b.build();
        let s = PositionalStrategy::new(Player::Duplicator);
        assert!(matches!(
            check_certificate(&a, v0, Player::Duplicator, &s),
            Err(CertificateError::MissingChoice { .. })
        ));
        let mut s = PositionalStrategy::new(Player::Duplicator);
        s.set(v0, v0);
        assert!(matches!(
            check_certificate(&a, v0, Player::Duplicator, &s),
            Err(CertificateError::InvalidChoice { .. })
        ));
    }

    #[test]
    fn solve_scales_to_ten_thousand_nodes() {
        // sparse 10k-node arena; the quadratic solver should clear it in
        // seconds even unoptimized
        let mut rng = crate::testutil::rng(41);
        let n = 10_000usize;
        let mut b = ArenaBuilder::new();
        for _ in 0..n {
            let ctrl = if rng.gen_bool(0.5) {
                Player::Duplicator
            } else {
                Player::Spoiler
            };
            b.add_node(ctrl, rng.gen_bool(0.3));
        }
        for i in 0..n {
            for _ in 0..rng.gen_range(1..=5) {
                b.add_move(NodeId(i as u32), NodeId(rng.gen_range(0..n) as u32));
            }
        }
        let arena = b.build().normalize_dead_ends();
        let started = std::time::Instant::now();
        let result = solve(&arena);
        let elapsed = started.elapsed();
        assert!(
            elapsed < std::time::Duration::from_secs(20),
            "solve took {elapsed:?}"
        );
        // sanity: someone wins every node
        assert_eq!(
            result.region(Player::Duplicator).len() + result.region(Player::Spoiler).len(),
            n
        );
    }

    #[test]
    fn dump_format() {
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Spoiler, true);
        b.add_move(v0, v1);
        b.add_move(v0, v0);
        b.add_move(v1, v0);
        let a = b.build();
        assert_eq!(a.dump(), "0 D 0 0,1\n1 S 1 0\n");
    }

    #[test]
    fn digest_is_sensitive_to_structure() {
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, false);
        let v1 = b.add_node(Player::Spoiler, true);
        b.add_move(v0, v1);
        let a1 = b.build();
        let mut b = ArenaBuilder::new();
        let v0 = b.add_node(Player::Duplicator, true);
        let v1 = b.add_node(Player::Spoiler, true);
        b.add_move(v0, v1);
        let a2 = b.build();
        assert_ne!(a1.digest(), a2.digest());
        assert_eq!(a1.digest(), a1.clone().digest());
    }
}
