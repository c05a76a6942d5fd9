//! Decision engine for inequations between regular-expression-like terms
//! interpreted over the (extended or pointed) Weihrauch degrees.
//!
//! An inequation `e ≤ f` is universally valid exactly when Duplicator wins
//! a finite Büchi game built from the two terms. This crate builds that
//! game, solves it, and backs every verdict with a positional winning
//! strategy that an independent checker (and the `check-cert` subcommand)
//! can validate without trusting the solver.

pub mod axioms;
pub mod cli;
pub mod decide;
pub mod dot;
pub mod game;
pub mod reductions;
pub mod simulation;
pub mod term;

mod hash;
#[cfg(test)]
mod testutil;
