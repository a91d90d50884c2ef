//! Learning probabilistic task specifications from demonstrations under
//! safety constraints, and synthesizing Pareto-optimal strategies for them.

pub mod automata;
pub mod game;
pub mod learning;
pub mod pareto_synthesis;
pub mod safety_spec;
pub mod scenarios;
pub mod symbols;
