//! The axiom corpus of the validity theory: a Kleene-algebra-like system
//! with meets whose lattice operations only distribute one-sidedly over
//! composition. Axioms instantiate with arbitrary terms; a fixed list of
//! derived inequations and a seeded random term generator round out the
//! soundness and Horn-closure sweeps.

use std::collections::HashMap;

use rand::Rng;

use crate::decide::Query;
use crate::simulation::Mode;
use crate::term::{Letter, TermId, TermPool};

/// One axiom row. Templates are concrete syntax over the variable letters
/// `a`, `b`, `c`, `d`; equalities of the source theory appear pre-expanded
/// into `-le`/`-ge` pairs.
#[derive(Debug, Clone, Copy)]
pub struct AxiomDef {
    pub name: &'static str,
    pub premises: &'static [(&'static str, &'static str)],
    pub conclusion: (&'static str, &'static str),
}

pub const UNCONDITIONAL: &[AxiomDef] = &[
    AxiomDef { name: "bottom", premises: &[], conclusion: ("0", "a") },
    AxiomDef { name: "top", premises: &[], conclusion: ("a", "T") },
    AxiomDef { name: "join-upper-left", premises: &[], conclusion: ("a", "a|b") },
    AxiomDef { name: "join-upper-right", premises: &[], conclusion: ("b", "a|b") },
    AxiomDef { name: "meet-lower-left", premises: &[], conclusion: ("a&b", "a") },
    AxiomDef { name: "meet-lower-right", premises: &[], conclusion: ("a&b", "b") },
    AxiomDef { name: "lattice-distributivity", premises: &[], conclusion: ("a&(b|c)", "(a&b)|(a&c)") },
    AxiomDef { name: "unit-right-le", premises: &[], conclusion: ("a*1", "a") },
    AxiomDef { name: "unit-right-ge", premises: &[], conclusion: ("a", "a*1") },
    AxiomDef { name: "unit-left-le", premises: &[], conclusion: ("1*a", "a") },
    AxiomDef { name: "unit-left-ge", premises: &[], conclusion: ("a", "1*a") },
    AxiomDef { name: "comp-assoc-le", premises: &[], conclusion: ("a*(b*c)", "(a*b)*c") },
    AxiomDef { name: "comp-assoc-ge", premises: &[], conclusion: ("(a*b)*c", "a*(b*c)") },
    AxiomDef { name: "zero-absorption", premises: &[], conclusion: ("a*0", "0") },
    AxiomDef { name: "top-absorption", premises: &[], conclusion: ("T", "a*T") },
    AxiomDef { name: "join-right-distributivity", premises: &[], conclusion: ("a*(b|c)", "(a*b)|(a*c)") },
    AxiomDef { name: "meet-right-distributivity", premises: &[], conclusion: ("(a*b)&(a*c)", "a*(b&c)") },
    AxiomDef { name: "half-distributivity", premises: &[], conclusion: ("(a*b)&c", "(a&c)*b") },
    AxiomDef { name: "diamond-unit", premises: &[], conclusion: ("1", "a^") },
    AxiomDef { name: "diamond-unfold", premises: &[], conclusion: ("a^*a", "a^") },
];

pub const CONDITIONAL: &[AxiomDef] = &[
    AxiomDef {
        name: "transitivity",
        premises: &[("a", "b"), ("b", "c")],
        conclusion: ("a", "c"),
    },
    AxiomDef {
        name: "join-least-upper-bound",
        premises: &[("b", "a"), ("c", "a")],
        conclusion: ("b|c", "a"),
    },
    AxiomDef {
        name: "meet-greatest-lower-bound",
        premises: &[("a", "b"), ("a", "c")],
        conclusion: ("a", "b&c"),
    },
    AxiomDef {
        name: "comp-monotonicity",
        premises: &[("a", "b"), ("c", "d")],
        conclusion: ("a*c", "b*d"),
    },
    AxiomDef {
        name: "diamond-induction",
        premises: &[("a&(b*c)", "b")],
        conclusion: ("a&(b*c^)", "b"),
    },
];

pub fn axiom_by_name(name: &str) -> Option<&'static AxiomDef> {
    UNCONDITIONAL
        .iter()
        .chain(CONDITIONAL)
        .find(|a| a.name == name)
}

/// A fully substituted axiom: premises and conclusion as term pairs.
#[derive(Debug, Clone)]
pub struct AxiomInstance {
    pub name: &'static str,
    pub premises: Vec<(TermId, TermId)>,
    pub conclusion: (TermId, TermId),
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("axiom {axiom} uses variable {variable:?} with no binding")]
pub struct MissingBinding {
    pub axiom: &'static str,
    pub variable: String,
}

/// Substitutes terms for the axiom's variables.
pub fn instantiate(
    pool: &TermPool,
    def: &AxiomDef,
    subst: &HashMap<Letter, TermId>,
) -> Result<AxiomInstance, MissingBinding> {
    let apply = |template: &str| -> Result<TermId, MissingBinding> {
        let t = pool
            .parse(template)
            .expect("axiom templates are well-formed");
        for l in pool.letters_of(t) {
            if !subst.contains_key(&l) {
                return Err(MissingBinding {
                    axiom: def.name,
                    variable: pool.letter_name(l),
                });
            }
        }
        Ok(pool.substitute(t, subst))
    };
    let mut premises = Vec::with_capacity(def.premises.len());
    for (l, r) in def.premises {
        premises.push((apply(l)?, apply(r)?));
    }
    let conclusion = (apply(def.conclusion.0)?, apply(def.conclusion.1)?);
    Ok(AxiomInstance {
        name: def.name,
        premises,
        conclusion,
    })
}

/// Binds the axiom variables `a..d` to the given terms, in order.
pub fn standard_binding(pool: &TermPool, terms: &[TermId]) -> HashMap<Letter, TermId> {
    ["a", "b", "c", "d"]
        .iter()
        .zip(terms)
        .map(|(name, &t)| (pool.letter(name).unwrap(), t))
        .collect()
}

/// A named query with its expected verdict.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub query: Query,
    pub expect_valid: bool,
}

/// Inequations derivable (or refutable) by hand, kept as a fixed
/// regression corpus.
pub fn derived_corpus(pool: &TermPool) -> Vec<CorpusEntry> {
    let entry = |name, lhs: &str, rhs: &str, mode, expect_valid| CorpusEntry {
        name,
        query: Query {
            lhs: pool.parse(lhs).unwrap(),
            rhs: pool.parse(rhs).unwrap(),
            mode,
        },
        expect_valid,
    };
    vec![
        entry("diamond-square", "a^*a^", "a^", Mode::Extended, true),
        entry(
            "meet-comp-diamond",
            "(b*a^)&(c*a^)",
            "(b&c)*a^",
            Mode::Extended,
            true,
        ),
        entry("diamond-meet", "a^&b^", "(a&b)^", Mode::Extended, true),
        entry(
            "diamond-induction-instance",
            "(c*b^)*b^",
            "c*b^",
            Mode::Extended,
            true,
        ),
        // Valid in both modes: the first oracle call records an input for
        // the letter, which lets the final call be answered and discarded.
        entry("sandwich-pointed", "b*a", "a*b*a", Mode::Pointed, true),
        entry("sandwich-extended", "b*a", "a*b*a", Mode::Extended, true),
        // With a fresh letter up front there is nothing to reuse.
        entry("no-free-prefix", "a", "b*a", Mode::Extended, false),
    ]
}

/// Size-bounded random term generator with configurable constructor
/// weights. Deterministic given the RNG.
#[derive(Debug, Clone)]
pub struct TermGen {
    pub letters: Vec<Letter>,
    pub max_size: u32,
    pub allow_top_zero: bool,
    /// Weights for join, meet, comp, diamond, in that order.
    pub operator_weights: [u32; 4],
}

impl TermGen {
    pub fn new(pool: &TermPool, letter_names: &[&str], max_size: u32) -> TermGen {
        TermGen {
            letters: letter_names
                .iter()
                .map(|n| pool.letter(n).unwrap())
                .collect(),
            max_size,
            allow_top_zero: true,
            operator_weights: [3, 3, 4, 2],
        }
    }

    pub fn without_top_zero(mut self) -> TermGen {
        self.allow_top_zero = false;
        self
    }

    fn leaf(&self, pool: &TermPool, rng: &mut impl Rng) -> TermId {
        let constants = if self.allow_top_zero { 3 } else { 1 };
        let pick = rng.gen_range(0..self.letters.len() + constants);
        if pick < self.letters.len() {
            pool.atom(self.letters[pick])
        } else {
            match pick - self.letters.len() {
                0 => pool.one(),
                1 => pool.zero(),
                _ => pool.top(),
            }
        }
    }

    fn gen_sized(&self, pool: &TermPool, rng: &mut impl Rng, budget: u32) -> TermId {
        let diamond_weight = self.operator_weights[3];
        let binary_weight: u32 = self.operator_weights[..3].iter().sum();
        if budget <= 1 || binary_weight + diamond_weight == 0 {
            return self.leaf(pool, rng);
        }
        // a budget of 2 only fits a unary node over a leaf
        if budget == 2 {
            if diamond_weight > 0 && rng.gen_ratio(diamond_weight, diamond_weight + binary_weight)
            {
                return pool.diamond(self.leaf(pool, rng));
            }
            return self.leaf(pool, rng);
        }
        let mut pick = rng.gen_range(0..binary_weight + diamond_weight);
        let mut op = 3;
        for (i, &w) in self.operator_weights[..3].iter().enumerate() {
            if pick < w {
                op = i;
                break;
            }
            pick -= w;
        }
        if op == 3 {
            let body = self.gen_sized(pool, rng, budget - 1);
            return pool.diamond(body);
        }
        let left_budget = rng.gen_range(1..budget - 1);
        let l = self.gen_sized(pool, rng, left_budget);
        let r = self.gen_sized(pool, rng, budget - 1 - left_budget);
        match op {
            0 => pool.join(l, r),
            1 => pool.meet(l, r),
            _ => pool.comp(l, r),
        }
    }

    pub fn gen(&self, pool: &TermPool, rng: &mut impl Rng) -> TermId {
        let budget = rng.gen_range(1..=self.max_size.max(1));
        self.gen_sized(pool, rng, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::decide;
    use crate::testutil::rng;

    #[test]
    fn instantiate_substitutes_literally() {
        let p = TermPool::new();
        let cd = p.parse("c|d").unwrap();
        let inst = instantiate(
            &p,
            axiom_by_name("top-absorption").unwrap(),
            &standard_binding(&p, &[cd]),
        )
        .unwrap();
        assert_eq!(p.display(inst.conclusion.0), "T");
        assert_eq!(p.display(inst.conclusion.1), "(c|d)*T");

        let bd = p.parse("b^").unwrap();
        let le = instantiate(
            &p,
            axiom_by_name("unit-right-le").unwrap(),
            &standard_binding(&p, &[bd]),
        )
        .unwrap();
        let ge = instantiate(
            &p,
            axiom_by_name("unit-right-ge").unwrap(),
            &standard_binding(&p, &[bd]),
        )
        .unwrap();
        assert_eq!(p.display(le.conclusion.0), "b^*1");
        assert_eq!(p.display(le.conclusion.1), "b^");
        assert_eq!((ge.conclusion.0, ge.conclusion.1), (le.conclusion.1, le.conclusion.0));
    }

    #[test]
    fn instantiate_diamond_induction() {
        let p = TermPool::new();
        let terms: Vec<TermId> = ["x", "y", "z"].iter().map(|s| p.parse(s).unwrap()).collect();
        let inst = instantiate(
            &p,
            axiom_by_name("diamond-induction").unwrap(),
            &standard_binding(&p, &terms),
        )
        .unwrap();
        assert_eq!(inst.premises.len(), 1);
        assert_eq!(p.display(inst.premises[0].0), "x&y*z");
        assert_eq!(p.display(inst.premises[0].1), "y");
        assert_eq!(p.display(inst.conclusion.0), "x&y*z^");
        assert_eq!(p.display(inst.conclusion.1), "y");
    }

    #[test]
    fn missing_bindings_are_reported() {
        let p = TermPool::new();
        let x = p.parse("x").unwrap();
        let err = instantiate(
            &p,
            axiom_by_name("transitivity").unwrap(),
            &standard_binding(&p, &[x, x]),
        )
        .unwrap_err();
        assert_eq!(err.variable, "c");
    }

    #[test]
    fn every_axiom_template_parses() {
        let p = TermPool::new();
        for def in UNCONDITIONAL.iter().chain(CONDITIONAL) {
            for (l, r) in def.premises.iter().chain(std::iter::once(&def.conclusion)) {
                p.parse(l).unwrap();
                p.parse(r).unwrap();
            }
        }
        assert_eq!(UNCONDITIONAL.len(), 20);
        assert_eq!(CONDITIONAL.len(), 5);
    }

    #[test]
    fn axioms_hold_on_small_samples() {
        let p = TermPool::new();
        let gen = TermGen::new(&p, &["a", "b"], 3);
        let mut r = rng(7);
        for def in UNCONDITIONAL {
            for _ in 0..5 {
                let terms: Vec<TermId> = (0..4).map(|_| gen.gen(&p, &mut r)).collect();
                let inst = instantiate(&p, def, &standard_binding(&p, &terms)).unwrap();
                let q = Query {
                    lhs: inst.conclusion.0,
                    rhs: inst.conclusion.1,
                    mode: Mode::Extended,
                };
                let v = decide(&p, &q, 1 << 20).unwrap();
                assert!(
                    v.valid,
                    "{} failed on {} <= {}",
                    def.name,
                    p.display(q.lhs),
                    p.display(q.rhs)
                );
            }
        }
    }

    #[test]
    fn derived_corpus_verdicts() {
        let p = TermPool::new();
        for entry in derived_corpus(&p) {
            let v = decide(&p, &entry.query, 1 << 20).unwrap();
            assert_eq!(
                v.valid,
                entry.expect_valid,
                "{}: {} <= {}",
                entry.name,
                p.display(entry.query.lhs),
                p.display(entry.query.rhs)
            );
        }
    }

    #[test]
    fn pointed_units_are_below_everything() {
        let p = TermPool::new();
        let gen = TermGen::new(&p, &["a", "b", "c"], 4).without_top_zero();
        let mut r = rng(13);
        let one = p.one();
        for _ in 0..20 {
            let t = gen.gen(&p, &mut r);
            let q = Query {
                lhs: one,
                rhs: t,
                mode: Mode::Pointed,
            };
            let v = decide(&p, &q, 1 << 20).unwrap();
            assert!(v.valid, "1 <= {}", p.display(t));
        }
    }

    #[test]
    fn generator_respects_the_size_bound() {
        let p = TermPool::new();
        let gen = TermGen::new(&p, &["a", "b", "c"], 9);
        let mut r = rng(99);
        for _ in 0..500 {
            let t = gen.gen(&p, &mut r);
            assert!(p.size(t) <= 9);
        }
        let gen = gen.without_top_zero();
        for _ in 0..200 {
            let t = gen.gen(&p, &mut r);
            assert!(!p.contains_top_or_zero(t));
        }
    }
}
