//! Append-only record of one pipeline run.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::types::{Answer, ProblemId, ReasoningType, SolverVerdict};

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub backend: String,
    /// Raw backend output (LLM text); absent for the heuristic backend.
    pub raw_output: Option<String>,
    pub attempts: u32,
    /// Parsed sub-problem types in order; `None` when decomposition failed.
    pub parsed: Option<Vec<(ProblemId, ReasoningType)>>,
    pub error: Option<String>,
    pub at_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub backend: String,
    pub raw_output: Option<String>,
    /// Plan in wire form, when one could be produced.
    pub plan_json: Option<String>,
    pub violations: Vec<String>,
    /// Solver kind (agent name without instance suffix) selected per problem.
    pub routes: Vec<(ProblemId, Option<String>)>,
    pub at_ms: u64,
}

impl PlanRecord {
    pub fn is_valid(&self) -> bool {
        self.plan_json.is_some() && self.violations.is_empty()
    }

    pub fn route_for(&self, id: &ProblemId) -> Option<&str> {
        self.routes.iter().find(|(p, _)| p == id).and_then(|(_, s)| s.as_deref())
    }
}

/// One formalization attempt; empty `diagnostics` means the program was accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalizationAttempt {
    pub index: u32,
    pub program_text: String,
    pub diagnostics: Vec<String>,
}

impl FormalizationAttempt {
    pub fn accepted(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub problem_id: ProblemId,
    /// Plan node that handled the problem, e.g. `csp_solver:1`.
    pub node: String,
    pub attempts: Vec<FormalizationAttempt>,
    pub verdict: Option<SolverVerdict>,
    pub answer: Answer,
    pub failure: Option<String>,
    pub elapsed_ms: u64,
}

impl ProblemRecord {
    pub fn formalization_exhausted(&self) -> bool {
        !self.attempts.is_empty() && self.attempts.iter().all(|a| !a.accepted())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub input: String,
    pub started_ms: u64,
    pub finished_ms: Option<u64>,
    pub decomposition: Option<DecompositionRecord>,
    pub plan: Option<PlanRecord>,
    pub problems: Vec<ProblemRecord>,
    pub usage: Vec<TokenUsage>,
}

impl RunTrace {
    pub fn new(input: impl Into<String>) -> Self {
        RunTrace {
            input: input.into(),
            started_ms: now_ms(),
            finished_ms: None,
            decomposition: None,
            plan: None,
            problems: Vec::new(),
            usage: Vec::new(),
        }
    }

    pub fn record_decomposition(&mut self, rec: DecompositionRecord) {
        debug_assert!(self.decomposition.is_none(), "decomposition recorded twice");
        self.decomposition.get_or_insert(rec);
    }

    pub fn record_plan(&mut self, rec: PlanRecord) {
        debug_assert!(self.plan.is_none(), "plan recorded twice");
        self.plan.get_or_insert(rec);
    }

    pub fn push_problem(&mut self, rec: ProblemRecord) {
        self.problems.push(rec);
    }

    pub fn push_usage(&mut self, usage: TokenUsage) {
        self.usage.push(usage);
    }

    pub fn finish(&mut self) {
        if self.finished_ms.is_none() {
            self.finished_ms = Some(now_ms());
        }
    }

    pub fn problem(&self, id: &ProblemId) -> Option<&ProblemRecord> {
        self.problems.iter().find(|p| &p.problem_id == id)
    }

    /// Final answers in problem order.
    pub fn answers(&self) -> Vec<Answer> {
        let mut recs: Vec<&ProblemRecord> = self.problems.iter().collect();
        recs.sort_by_key(|r| r.problem_id.index());
        recs.into_iter().map(|r| r.answer.clone()).collect()
    }
}
