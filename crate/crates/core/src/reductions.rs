//! Adversarial test-case generators: encodings of quantified Boolean
//! formulas as validity queries (one per mode), the de-diamond rewriting
//! that eliminates iteration from the pointed encoding, the family of
//! inequations whose winning strategies have exponentially long cycles,
//! and a brute-force QBF evaluator serving as the independent truth oracle.

use std::collections::HashMap;

use crate::decide::Query;
use crate::simulation::Mode;
use crate::term::{Letter, TermId, TermPool};

/// A literal over variables `x1..xN`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Lit {
        Lit {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Lit {
        Lit {
            var,
            positive: false,
        }
    }

    /// Rank in the literal order x1 < x̄1 < x2 < x̄2 < …
    fn key(self) -> usize {
        2 * self.var + usize::from(!self.positive)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum QbfError {
    #[error("variable count must be positive and even, got {0}")]
    BadVarCount(usize),
    #[error("a formula body needs at least one clause")]
    NoClauses,
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("literal mentions variable {var}, outside 1..={max}")]
    VarOutOfRange { var: usize, max: usize },
    #[error("exhaustive evaluation is limited to 20 variables, got {0}")]
    EvalBudget(usize),
}

/// A prenex quantified Boolean formula `∀x1 ∃x2 ∀x3 … ∃xN φ` with strictly
/// alternating quantifiers (odd variables universal, even existential) and
/// a DNF body. Clause literal lists are kept sorted descending in the
/// literal order and deduplicated, so the innermost literal of each clause
/// composition is the smallest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfInstance {
    var_count: usize,
    clauses: Vec<Vec<Lit>>,
}

impl QbfInstance {
    pub fn new(var_count: usize, clauses: Vec<Vec<Lit>>) -> Result<QbfInstance, QbfError> {
        if var_count == 0 || !var_count.is_multiple_of(2) {
            return Err(QbfError::BadVarCount(var_count));
        }
        if clauses.is_empty() {
            return Err(QbfError::NoClauses);
        }
        let mut normalized = Vec::with_capacity(clauses.len());
        for (index, mut clause) in clauses.into_iter().enumerate() {
            if clause.is_empty() {
                return Err(QbfError::EmptyClause { index });
            }
            for l in &clause {
                if l.var == 0 || l.var > var_count {
                    return Err(QbfError::VarOutOfRange {
                        var: l.var,
                        max: var_count,
                    });
                }
            }
            clause.sort_by_key(|l| std::cmp::Reverse(l.key()));
            clause.dedup();
            normalized.push(clause);
        }
        Ok(QbfInstance {
            var_count,
            clauses: normalized,
        })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Total number of literal occurrences; the natural input size.
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(|c| c.len()).sum()
    }
}

fn body_holds(q: &QbfInstance, assignment: &[bool]) -> bool {
    q.clauses.iter().any(|clause| {
        clause
            .iter()
            .all(|l| assignment[l.var - 1] == l.positive)
    })
}

fn eval_from(q: &QbfInstance, var: usize, assignment: &mut Vec<bool>) -> bool {
    if var > q.var_count {
        return body_holds(q, assignment);
    }
    let universal = var % 2 == 1;
    let mut outcome = universal;
    for value in [false, true] {
        assignment.push(value);
        let sub = eval_from(q, var + 1, assignment);
        assignment.pop();
        if universal {
            outcome &= sub;
            if !outcome {
                break;
            }
        } else {
            outcome |= sub;
            if outcome {
                break;
            }
        }
    }
    outcome
}

/// Truth value by exhaustive game-tree evaluation.
pub fn qbf_eval(q: &QbfInstance) -> Result<bool, QbfError> {
    if q.var_count > 20 {
        return Err(QbfError::EvalBudget(q.var_count));
    }
    Ok(eval_from(q, 1, &mut Vec::with_capacity(q.var_count)))
}

/// Letter for a literal: `x3` or `nx3`.
pub fn literal_letter(pool: &TermPool, l: Lit) -> Letter {
    let name = if l.positive {
        format!("x{}", l.var)
    } else {
        format!("nx{}", l.var)
    };
    pool.letter(&name).expect("literal letters are valid identifiers")
}

fn literal_atom(pool: &TermPool, l: Lit) -> TermId {
    pool.atom(literal_letter(pool, l))
}

fn clause_composition(pool: &TermPool, clause: &[Lit]) -> TermId {
    let parts: Vec<TermId> = clause.iter().map(|&l| literal_atom(pool, l)).collect();
    pool.comp_all(&parts)
}

/// Pointed-mode encoding. The left side is the meet of the clause
/// compositions; the right side steps through the quantifier prefix
/// innermost-first, offering a meet of iterated literals at universal
/// variables and a join at existential ones.
pub fn encode_pointed(pool: &TermPool, q: &QbfInstance) -> Query {
    let lhs_parts: Vec<TermId> = q
        .clauses
        .iter()
        .map(|c| clause_composition(pool, c))
        .collect();
    let lhs = pool.meet_all(&lhs_parts);

    let mut factors = Vec::with_capacity(q.var_count);
    for var in (1..=q.var_count).rev() {
        let pos = pool.diamond(literal_atom(pool, Lit::pos(var)));
        let neg = pool.diamond(literal_atom(pool, Lit::neg(var)));
        let factor = if var % 2 == 1 {
            pool.meet(pos, neg)
        } else {
            pool.join(pos, neg)
        };
        factors.push(factor);
    }
    let rhs = pool.comp_all(&factors);
    Query {
        lhs,
        rhs,
        mode: Mode::Pointed,
    }
}

/// Extended-mode encoding over the literal letters plus a fresh `dot`.
/// Existential variables contribute `(x*dot)&(nx*dot)` on the left and
/// `(x|nx)*dot` on the right; universal variables contribute `x|nx` on
/// both sides; the clause join goes in front of the right side.
pub fn encode_extended(pool: &TermPool, q: &QbfInstance) -> Query {
    let dot = pool.atom(pool.letter("dot").unwrap());

    let mut left = Vec::with_capacity(q.var_count + 1);
    let mut right = Vec::with_capacity(q.var_count + 2);

    let clause_parts: Vec<TermId> = q
        .clauses
        .iter()
        .map(|c| clause_composition(pool, c))
        .collect();
    right.push(pool.join_all(&clause_parts));

    for var in (1..=q.var_count).rev() {
        let x = literal_atom(pool, Lit::pos(var));
        let nx = literal_atom(pool, Lit::neg(var));
        let choice = pool.join(x, nx);
        if var % 2 == 1 {
            left.push(choice);
            right.push(choice);
        } else {
            left.push(pool.meet(pool.comp(x, dot), pool.comp(nx, dot)));
            right.push(pool.comp(choice, dot));
        }
    }
    left.push(dot);
    right.push(dot);

    Query {
        lhs: pool.comp_all(&left),
        rhs: pool.comp_all(&right),
        mode: Mode::Extended,
    }
}

/// Occurrences of each letter in `t`, counted with multiplicity.
pub fn letter_occurrences(pool: &TermPool, t: TermId) -> HashMap<Letter, usize> {
    use crate::term::TermNode;
    let mut counts = HashMap::new();
    let mut stack = vec![t];
    while let Some(u) = stack.pop() {
        match pool.node(u) {
            TermNode::Letter(l) => *counts.entry(l).or_insert(0) += 1,
            TermNode::Join(a, b) | TermNode::Meet(a, b) | TermNode::Comp(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            TermNode::Diamond(a) => stack.push(a),
            _ => {}
        }
    }
    counts
}

/// Replaces each iterated letter `l^` by the N-fold product
/// `(1|l)*…*(1|l)` where N is one more than the number of occurrences of
/// `l` recorded in `occurrences` — just enough unrollings to be
/// indistinguishable from the iteration against the paired left side.
pub fn dediamond(
    pool: &TermPool,
    t: TermId,
    occurrences: &HashMap<Letter, usize>,
) -> TermId {
    use crate::term::TermNode;
    match pool.node(t) {
        TermNode::Diamond(body) => {
            if let TermNode::Letter(l) = pool.node(body) {
                let n = occurrences.get(&l).copied().unwrap_or(0) + 1;
                let unit = pool.join(pool.one(), body);
                pool.comp_all(&vec![unit; n])
            } else {
                let body = dediamond(pool, body, occurrences);
                pool.diamond(body)
            }
        }
        TermNode::Join(a, b) => {
            let (a, b) = (dediamond(pool, a, occurrences), dediamond(pool, b, occurrences));
            pool.join(a, b)
        }
        TermNode::Meet(a, b) => {
            let (a, b) = (dediamond(pool, a, occurrences), dediamond(pool, b, occurrences));
            pool.meet(a, b)
        }
        TermNode::Comp(a, b) => {
            let (a, b) = (dediamond(pool, a, occurrences), dediamond(pool, b, occurrences));
            pool.comp(a, b)
        }
        _ => t,
    }
}

/// The pointed query with the right side's iterated literals unrolled.
pub fn dediamond_query(pool: &TermPool, q: &Query) -> Query {
    let occurrences = letter_occurrences(pool, q.lhs);
    Query {
        lhs: q.lhs,
        rhs: dediamond(pool, q.rhs, &occurrences),
        mode: q.mode,
    }
}

/// The n-indexed family of valid pointed inequations whose positional
/// winning strategies contain cycles of exponential size: two halves of
/// iterated two-letter compositions against one iterated meet of joins.
pub fn gen_expfamily(pool: &TermPool, n: usize) -> Query {
    assert!(n >= 1, "the family is indexed from 1");
    let x = |i: usize| pool.atom(pool.letter(&format!("x{i}")).unwrap());
    let y = |i: usize| pool.atom(pool.letter(&format!("y{i}")).unwrap());

    let half = |from: usize, to: usize| {
        let parts: Vec<TermId> = (from..=to).map(|i| pool.comp(x(i), y(i))).collect();
        pool.diamond(pool.meet_all(&parts))
    };
    let lhs = pool.meet(half(1, n), half(n + 1, 2 * n));

    let parts: Vec<TermId> = (1..=2 * n).map(|i| pool.join(x(i), y(i))).collect();
    let rhs = pool.diamond(pool.meet_all(&parts));

    Query {
        lhs,
        rhs,
        mode: Mode::Pointed,
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum QbfParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] QbfError),
}

/// Parses the restricted QDIMACS-like format: `c` comment lines and an
/// optional `p` header are skipped; every other nonempty line is one DNF
/// clause of signed integers (an optional trailing 0 terminator is
/// ignored). Variable count is the largest index, rounded up to even;
/// quantifiers strictly alternate starting from `∀x1`.
pub fn parse_qbf(text: &str) -> Result<QbfInstance, QbfParseError> {
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut max_var = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('p') {
            continue;
        }
        let mut clause = Vec::new();
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| QbfParseError::Line {
                line: i + 1,
                message: format!("expected a signed integer, found {tok:?}"),
            })?;
            if v == 0 {
                break;
            }
            let var = v.unsigned_abs() as usize;
            max_var = max_var.max(var);
            clause.push(Lit {
                var,
                positive: v > 0,
            });
        }
        if clause.is_empty() {
            return Err(QbfParseError::Line {
                line: i + 1,
                message: "empty clause".into(),
            });
        }
        clauses.push(clause);
    }
    let var_count = max_var + max_var % 2;
    Ok(QbfInstance::new(var_count.max(2), clauses)?)
}
