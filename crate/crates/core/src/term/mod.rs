//! The term language: letters, lattice operations, composition and its
//! iteration, together with the transition relation that turns a term into
//! a right-to-left alternating automaton.
//!
//! All terms live in a [`TermPool`] and are referred to by [`TermId`]
//! handles. Interning is canonical: structurally equal terms always share
//! one handle, so handle equality is structural equality.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, RwLock};

mod parser;

pub use parser::ParseError;

/// Interned alphabet symbol. Compares by name through the owning pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Handle to an interned term. Only meaningful together with its pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Shape of a single term node. Children are interned handles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermNode {
    Letter(Letter),
    Zero,
    One,
    Top,
    Join(TermId, TermId),
    Meet(TermId, TermId),
    Comp(TermId, TermId),
    Diamond(TermId),
}

/// Polarity of a term: who resolves its next transition step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Input-side choice.
    Exists,
    /// Output-side choice.
    Forall,
    /// The next step is an oracle call to the given letter.
    Oracle(Letter),
}

impl Polarity {
    pub fn is_oracle(self) -> bool {
        matches!(self, Polarity::Oracle(_))
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("invalid letter name {name:?}: must match [a-z][a-zA-Z0-9_]*")]
pub struct InvalidLetterName {
    pub name: String,
}

struct TermRecord {
    node: TermNode,
    size: u32,
    polarity: Polarity,
    has_top: bool,
    has_zero: bool,
}

#[derive(Default)]
struct PoolInner {
    records: Vec<TermRecord>,
    ids: HashMap<TermNode, TermId>,
    letter_names: Vec<String>,
    letter_ids: HashMap<String, Letter>,
}

/// Intern pool for terms. All operations take `&self`; the pool is safe to
/// share across threads, and handles from one pool must not be mixed with
/// handles from another.
pub struct TermPool {
    inner: RwLock<PoolInner>,
    succ: RwLock<HashMap<TermId, Arc<[TermId]>>>,
}

impl Default for TermPool {
    fn default() -> Self {
        Self::new()
    }
}

fn tag_rank(node: &TermNode) -> u8 {
    match node {
        TermNode::Letter(_) => 0,
        TermNode::Zero => 1,
        TermNode::One => 2,
        TermNode::Top => 3,
        TermNode::Join(..) => 4,
        TermNode::Meet(..) => 5,
        TermNode::Comp(..) => 6,
        TermNode::Diamond(_) => 7,
    }
}

fn cmp_in(inner: &PoolInner, a: TermId, b: TermId) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let na = inner.records[a.index()].node;
    let nb = inner.records[b.index()].node;
    match (na, nb) {
        (TermNode::Letter(x), TermNode::Letter(y)) => {
            inner.letter_names[x.index()].cmp(&inner.letter_names[y.index()])
        }
        (TermNode::Join(al, ar), TermNode::Join(bl, br))
        | (TermNode::Meet(al, ar), TermNode::Meet(bl, br))
        | (TermNode::Comp(al, ar), TermNode::Comp(bl, br)) => {
            cmp_in(inner, al, bl).then_with(|| cmp_in(inner, ar, br))
        }
        (TermNode::Diamond(x), TermNode::Diamond(y)) => cmp_in(inner, x, y),
        _ => tag_rank(&na).cmp(&tag_rank(&nb)),
    }
}

const PREC_JOIN: u8 = 1;
const PREC_MEET: u8 = 2;
const PREC_COMP: u8 = 3;
const PREC_DIAMOND: u8 = 4;
const PREC_ATOM: u8 = 5;

fn fmt_in(inner: &PoolInner, t: TermId, min_prec: u8, out: &mut String) {
    let node = inner.records[t.index()].node;
    let prec = match node {
        TermNode::Join(..) => PREC_JOIN,
        TermNode::Meet(..) => PREC_MEET,
        TermNode::Comp(..) => PREC_COMP,
        TermNode::Diamond(_) => PREC_DIAMOND,
        _ => PREC_ATOM,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match node {
        TermNode::Letter(l) => out.push_str(&inner.letter_names[l.index()]),
        TermNode::Zero => out.push('0'),
        TermNode::One => out.push('1'),
        TermNode::Top => out.push('T'),
        TermNode::Join(l, r) => {
            fmt_in(inner, l, prec, out);
            out.push('|');
            fmt_in(inner, r, prec + 1, out);
        }
        TermNode::Meet(l, r) => {
            fmt_in(inner, l, prec, out);
            out.push('&');
            fmt_in(inner, r, prec + 1, out);
        }
        TermNode::Comp(l, r) => {
            fmt_in(inner, l, prec, out);
            out.push('*');
            fmt_in(inner, r, prec + 1, out);
        }
        TermNode::Diamond(body) => {
            fmt_in(inner, body, PREC_DIAMOND, out);
            out.push('^');
        }
    }
    if parens {
        out.push(')');
    }
}

fn valid_letter_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TermPool {
    pub fn new() -> Self {
        TermPool {
            inner: RwLock::new(PoolInner::default()),
            succ: RwLock::new(HashMap::new()),
        }
    }

    /// Number of distinct terms interned so far.
    pub fn term_count(&self) -> usize {
        self.inner.read().unwrap().records.len()
    }

    /// Reconstructs a handle from its raw index, if such a term exists.
    /// The inverse of [`TermId::index`]; useful at FFI boundaries.
    pub fn lookup(&self, raw: u32) -> Option<TermId> {
        if (raw as usize) < self.term_count() {
            Some(TermId(raw))
        } else {
            None
        }
    }

    /// Interns a letter, validating the identifier rule.
    pub fn letter(&self, name: &str) -> Result<Letter, InvalidLetterName> {
        if !valid_letter_name(name) {
            return Err(InvalidLetterName {
                name: name.to_owned(),
            });
        }
        {
            let inner = self.inner.read().unwrap();
            if let Some(&l) = inner.letter_ids.get(name) {
                return Ok(l);
            }
        }
        let mut inner = self.inner.write().unwrap();
        if let Some(&l) = inner.letter_ids.get(name) {
            return Ok(l);
        }
        let l = Letter(inner.letter_names.len() as u32);
        inner.letter_names.push(name.to_owned());
        inner.letter_ids.insert(name.to_owned(), l);
        Ok(l)
    }

    pub fn letter_name(&self, l: Letter) -> String {
        self.inner.read().unwrap().letter_names[l.index()].clone()
    }

    /// Sorts letters by name; the canonical order used everywhere.
    pub fn sort_letters(&self, letters: &mut [Letter]) {
        let inner = self.inner.read().unwrap();
        letters.sort_by(|a, b| inner.letter_names[a.index()].cmp(&inner.letter_names[b.index()]));
    }

    /// Interns a node, reusing the existing handle for equal structure.
    pub fn mk(&self, node: TermNode) -> TermId {
        {
            let inner = self.inner.read().unwrap();
            if let Some(&t) = inner.ids.get(&node) {
                return t;
            }
        }
        let mut inner = self.inner.write().unwrap();
        if let Some(&t) = inner.ids.get(&node) {
            return t;
        }
        let (size, polarity, has_top, has_zero) = match node {
            TermNode::Letter(l) => (1, Polarity::Oracle(l), false, false),
            TermNode::Zero => (1, Polarity::Exists, false, true),
            TermNode::One => (1, Polarity::Exists, false, false),
            TermNode::Top => (1, Polarity::Forall, true, false),
            TermNode::Join(l, r) => {
                let (a, b) = (&inner.records[l.index()], &inner.records[r.index()]);
                (
                    1 + a.size + b.size,
                    Polarity::Exists,
                    a.has_top || b.has_top,
                    a.has_zero || b.has_zero,
                )
            }
            TermNode::Meet(l, r) => {
                let (a, b) = (&inner.records[l.index()], &inner.records[r.index()]);
                (
                    1 + a.size + b.size,
                    Polarity::Forall,
                    a.has_top || b.has_top,
                    a.has_zero || b.has_zero,
                )
            }
            TermNode::Comp(l, r) => {
                let (a, b) = (&inner.records[l.index()], &inner.records[r.index()]);
                (
                    1 + a.size + b.size,
                    b.polarity,
                    a.has_top || b.has_top,
                    a.has_zero || b.has_zero,
                )
            }
            TermNode::Diamond(body) => {
                let a = &inner.records[body.index()];
                (1 + a.size, Polarity::Exists, a.has_top, a.has_zero)
            }
        };
        let t = TermId(inner.records.len() as u32);
        inner.records.push(TermRecord {
            node,
            size,
            polarity,
            has_top,
            has_zero,
        });
        inner.ids.insert(node, t);
        t
    }

    pub fn zero(&self) -> TermId {
        self.mk(TermNode::Zero)
    }

    pub fn one(&self) -> TermId {
        self.mk(TermNode::One)
    }

    pub fn top(&self) -> TermId {
        self.mk(TermNode::Top)
    }

    pub fn atom(&self, l: Letter) -> TermId {
        self.mk(TermNode::Letter(l))
    }

    pub fn join(&self, l: TermId, r: TermId) -> TermId {
        self.mk(TermNode::Join(l, r))
    }

    pub fn meet(&self, l: TermId, r: TermId) -> TermId {
        self.mk(TermNode::Meet(l, r))
    }

    pub fn comp(&self, l: TermId, r: TermId) -> TermId {
        self.mk(TermNode::Comp(l, r))
    }

    pub fn diamond(&self, body: TermId) -> TermId {
        self.mk(TermNode::Diamond(body))
    }

    /// Left-associated join of a nonempty list.
    pub fn join_all(&self, terms: &[TermId]) -> TermId {
        let mut it = terms.iter().copied();
        let first = it.next().expect("join_all of empty list");
        it.fold(first, |acc, t| self.join(acc, t))
    }

    /// Left-associated meet of a nonempty list.
    pub fn meet_all(&self, terms: &[TermId]) -> TermId {
        let mut it = terms.iter().copied();
        let first = it.next().expect("meet_all of empty list");
        it.fold(first, |acc, t| self.meet(acc, t))
    }

    /// Left-associated composition of a nonempty list.
    pub fn comp_all(&self, terms: &[TermId]) -> TermId {
        let mut it = terms.iter().copied();
        let first = it.next().expect("comp_all of empty list");
        it.fold(first, |acc, t| self.comp(acc, t))
    }

    pub fn node(&self, t: TermId) -> TermNode {
        self.inner.read().unwrap().records[t.index()].node
    }

    /// Number of abstract-syntax nodes.
    pub fn size(&self, t: TermId) -> u32 {
        self.inner.read().unwrap().records[t.index()].size
    }

    pub fn polarity(&self, t: TermId) -> Polarity {
        self.inner.read().unwrap().records[t.index()].polarity
    }

    pub fn contains_top_or_zero(&self, t: TermId) -> bool {
        let r = &self.inner.read().unwrap().records[t.index()];
        r.has_top || r.has_zero
    }

    /// Structural lexicographic order: constructor tag, then children,
    /// letters by name. Total and stable within one pool.
    pub fn cmp_terms(&self, a: TermId, b: TermId) -> Ordering {
        cmp_in(&self.inner.read().unwrap(), a, b)
    }

    /// Sorts and deduplicates into the canonical set representation.
    pub fn canonical_set(&self, terms: &mut Vec<TermId>) {
        let inner = self.inner.read().unwrap();
        terms.sort_by(|&a, &b| cmp_in(&inner, a, b));
        terms.dedup();
    }

    /// One-step successors of `t` under the transition relation, as a
    /// canonically ordered, deduplicated set.
    pub fn successors(&self, t: TermId) -> Arc<[TermId]> {
        if let Some(s) = self.succ.read().unwrap().get(&t) {
            return Arc::clone(s);
        }
        let mut out: Vec<TermId> = match self.node(t) {
            TermNode::Letter(_) => vec![self.one()],
            TermNode::Zero | TermNode::One | TermNode::Top => vec![],
            TermNode::Join(l, r) | TermNode::Meet(l, r) => vec![l, r],
            TermNode::Diamond(body) => vec![self.one(), self.comp(t, body)],
            TermNode::Comp(g, e) => {
                if e == self.one() {
                    vec![g]
                } else {
                    self.successors(e)
                        .iter()
                        .map(|&f| self.comp(g, f))
                        .collect()
                }
            }
        };
        self.canonical_set(&mut out);
        let arc: Arc<[TermId]> = out.into();
        self.succ
            .write()
            .unwrap()
            .entry(t)
            .or_insert_with(|| Arc::clone(&arc))
            .clone()
    }

    /// Reflexive-transitive closure of `successors`, canonically ordered.
    ///
    /// Panics if the closure exceeds `10 * size(t) + 16` terms: the theory
    /// bounds it by `2 * size(t)`, so overshooting that by this margin can
    /// only mean the transition rules are broken.
    pub fn subobjects(&self, t: TermId) -> Vec<TermId> {
        let cap = 10 * self.size(t) as usize + 16;
        let mut seen: HashSet<TermId> = HashSet::new();
        let mut queue: VecDeque<TermId> = VecDeque::new();
        seen.insert(t);
        queue.push_back(t);
        while let Some(u) = queue.pop_front() {
            for &v in self.successors(u).iter() {
                if seen.insert(v) {
                    if seen.len() > cap {
                        panic!(
                            "subobject closure of {} exceeded sanity cap {}: transition rules are buggy",
                            self.display(t),
                            cap
                        );
                    }
                    queue.push_back(v);
                }
            }
        }
        let mut out: Vec<TermId> = seen.into_iter().collect();
        self.canonical_set(&mut out);
        out
    }

    /// Letters occurring in `t`, sorted by name.
    pub fn letters_of(&self, t: TermId) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        let mut seen = HashSet::new();
        while let Some(u) = stack.pop() {
            if !seen.insert(u) {
                continue;
            }
            match self.node(u) {
                TermNode::Letter(l) => {
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
                TermNode::Join(a, b) | TermNode::Meet(a, b) | TermNode::Comp(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                TermNode::Diamond(a) => stack.push(a),
                _ => {}
            }
        }
        self.sort_letters(&mut out);
        out
    }

    /// Replaces every occurrence of the mapped letters by the given terms.
    pub fn substitute(&self, t: TermId, subst: &HashMap<Letter, TermId>) -> TermId {
        match self.node(t) {
            TermNode::Letter(l) => subst.get(&l).copied().unwrap_or(t),
            TermNode::Zero | TermNode::One | TermNode::Top => t,
            TermNode::Join(a, b) => {
                let (a, b) = (self.substitute(a, subst), self.substitute(b, subst));
                self.join(a, b)
            }
            TermNode::Meet(a, b) => {
                let (a, b) = (self.substitute(a, subst), self.substitute(b, subst));
                self.meet(a, b)
            }
            TermNode::Comp(a, b) => {
                let (a, b) = (self.substitute(a, subst), self.substitute(b, subst));
                self.comp(a, b)
            }
            TermNode::Diamond(a) => {
                let a = self.substitute(a, subst);
                self.diamond(a)
            }
        }
    }

    /// Renders `t` in the concrete ASCII syntax with minimal parentheses.
    pub fn display(&self, t: TermId) -> String {
        let mut out = String::new();
        fmt_in(&self.inner.read().unwrap(), t, 0, &mut out);
        out
    }

    /// Parses the concrete syntax, interning letters on sight.
    pub fn parse(&self, text: &str) -> Result<TermId, ParseError> {
        parser::parse(self, text, None)
    }

    /// Parses against a declared alphabet; letters outside it are rejected.
    pub fn parse_with_alphabet(
        &self,
        text: &str,
        alphabet: &HashSet<Letter>,
    ) -> Result<TermId, ParseError> {
        parser::parse(self, text, Some(alphabet))
    }
}
