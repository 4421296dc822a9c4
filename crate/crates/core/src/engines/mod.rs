//! Built-in solvers for the four paradigms plus an adapter for external binaries.

pub mod csp;
pub mod external;
pub mod fol;
pub mod lp;
pub mod smt;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logiclang::FormalProgram;
use crate::types::SolverVerdict;

pub use csp::solve_csp;
pub use external::{run_external, EngineKind, ExternalEngine};
pub use fol::solve_fol;
pub use lp::solve_lp;
pub use smt::solve_smt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineLimits {
    pub max_derived_facts: usize,
    pub max_resolution_steps: usize,
    pub max_clause_size: usize,
    pub max_solutions: usize,
    pub bool_enumeration_cap: u64,
    pub numeric_probe_bound: i64,
    #[serde(with = "secs")]
    pub timeout: Duration,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits {
            max_derived_facts: 10_000,
            max_resolution_steps: 10_000,
            max_clause_size: 12,
            max_solutions: 10_000,
            bool_enumeration_cap: 1 << 20,
            numeric_probe_bound: 1_000_000,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("engine limit `{0}` must be positive")]
pub struct InvalidLimit(pub &'static str);

impl EngineLimits {
    pub fn validate(&self) -> Result<(), InvalidLimit> {
        let checks = [
            ("max_derived_facts", self.max_derived_facts > 0),
            ("max_resolution_steps", self.max_resolution_steps > 0),
            ("max_clause_size", self.max_clause_size > 0),
            ("max_solutions", self.max_solutions > 0),
            ("bool_enumeration_cap", self.bool_enumeration_cap > 0),
            ("numeric_probe_bound", self.numeric_probe_bound > 0),
            ("timeout", !self.timeout.is_zero()),
        ];
        match checks.into_iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(InvalidLimit(name)),
            None => Ok(()),
        }
    }

    pub(crate) fn deadline(&self) -> Deadline {
        Deadline(Instant::now().checked_add(self.timeout))
    }
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

/// Wall-clock budget checked inside engine loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// Runs the built-in engine matching the program's language.
pub fn solve(program: &FormalProgram, limits: &EngineLimits) -> SolverVerdict {
    match program {
        FormalProgram::Lp(p) => solve_lp(p, limits),
        FormalProgram::Fol(p) => solve_fol(p, limits),
        FormalProgram::Csp(m) => solve_csp(m, limits),
        FormalProgram::Smt(s) => solve_smt(s, limits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_limits() {
        let l = EngineLimits::default();
        assert_eq!(l.max_derived_facts, 10_000);
        assert_eq!(l.max_resolution_steps, 10_000);
        assert_eq!(l.max_clause_size, 12);
        assert_eq!(l.max_solutions, 10_000);
        assert_eq!(l.bool_enumeration_cap, 1 << 20);
        assert_eq!(l.numeric_probe_bound, 1_000_000);
        assert_eq!(l.timeout, Duration::from_secs(10));
        assert!(l.validate().is_ok());
        assert_eq!(EngineLimits { max_solutions: 0, ..l }.validate(), Err(InvalidLimit("max_solutions")));
    }
}
