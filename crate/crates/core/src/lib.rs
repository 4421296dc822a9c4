//! Adaptive multi-paradigm reasoning: decompose a natural-language problem into
//! typed sub-problems, route each to a logic-programming, first-order,
//! constraint or SMT solver, and map the solver verdicts back to answers.

pub mod config;
pub mod decomposer;
pub mod engines;
pub mod formalizer;
pub mod harness;
pub mod llm;
pub mod logiclang;
pub mod pipeline;
pub mod router;
pub mod taxonomy;
pub mod trace;
pub mod types;
