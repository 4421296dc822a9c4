//! One end-to-end run: decompose, route, execute.

use crate::decomposer::{decompose, DecomposerBackend};
use crate::engines::EngineLimits;
use crate::formalizer::{AnswerPolicy, FormalizerBackend};
use crate::router::{execute, route, ExecOptions, MemoryStore, RouterBackend, Routing, SolverRegistry};
use crate::trace::{ProblemRecord, RunTrace};
use crate::types::{Answer, DecomposedInput, ProblemId};

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub decomposer: DecomposerBackend,
    pub router: RouterBackend,
    pub registry: SolverRegistry,
    pub exec: ExecOptions,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// One answer per decomposed problem, in problem order.
    pub answers: Vec<(ProblemId, Answer)>,
    pub input: Option<DecomposedInput>,
    pub trace: RunTrace,
}

impl RunOutcome {
    /// True when every problem got an option label.
    pub fn complete(&self) -> bool {
        !self.answers.is_empty() && self.answers.iter().all(|(_, a)| a.label().is_some())
    }
}

/// Decomposition and routing without execution.
#[derive(Debug, Clone)]
pub struct PlannedRun {
    pub input: Option<DecomposedInput>,
    pub routing: Option<Routing>,
    pub trace: RunTrace,
}

impl Pipeline {
    /// Heuristic decomposer, type router and template formalizers.
    pub fn offline() -> Self {
        Pipeline {
            decomposer: DecomposerBackend::default(),
            router: RouterBackend::Types,
            registry: SolverRegistry::builtin(
                FormalizerBackend::Template,
                EngineLimits::default(),
                AnswerPolicy::default(),
                &Default::default(),
            ),
            exec: ExecOptions::default(),
        }
    }

    pub fn plan(&self, text: &str) -> PlannedRun {
        let mut trace = RunTrace::new(text);
        let input = match decompose(text, &self.decomposer) {
            Ok(d) => {
                trace.record_decomposition(d.record);
                d.usage.into_iter().for_each(|u| trace.push_usage(u));
                d.input
            }
            Err(f) => {
                trace.record_decomposition(f.record);
                f.usage.into_iter().for_each(|u| trace.push_usage(u));
                return PlannedRun { input: None, routing: None, trace };
            }
        };
        let routing = route(&input, &self.router, &self.registry);
        trace.record_plan(routing.record.clone());
        routing.usage.iter().for_each(|u| trace.push_usage(*u));
        PlannedRun { input: Some(input), routing: Some(routing), trace }
    }

    pub fn run(&self, text: &str) -> RunOutcome {
        let PlannedRun { input, routing, mut trace } = self.plan(text);
        let Some(input) = input else {
            trace.finish();
            return RunOutcome { answers: vec![], input: None, trace };
        };
        let plan = routing.and_then(|r| r.plan);
        let executed = plan.map(|p| execute(&p, &input, &MemoryStore::new(), &self.registry, &self.exec));
        let mut answers: Vec<(ProblemId, Answer)> = Vec::new();
        match executed {
            Some(Ok(ex)) => {
                ex.records.into_iter().for_each(|r| trace.push_problem(r));
                ex.usage.into_iter().for_each(|u| trace.push_usage(u));
                for q in &input.sub_problems {
                    let a = ex.answers.iter().find(|(id, _)| *id == q.problem_id).map_or(Answer::Unknown, |(_, a)| a.clone());
                    answers.push((q.problem_id.clone(), a));
                }
            }
            other => {
                let reason = match other {
                    Some(Err(e)) => e.to_string(),
                    _ => "no valid plan".to_string(),
                };
                for q in &input.sub_problems {
                    trace.push_problem(ProblemRecord {
                        problem_id: q.problem_id.clone(),
                        node: String::new(),
                        attempts: vec![],
                        verdict: None,
                        answer: Answer::Unknown,
                        failure: Some(reason.clone()),
                        elapsed_ms: 0,
                    });
                    answers.push((q.problem_id.clone(), Answer::Unknown));
                }
            }
        }
        trace.finish();
        RunOutcome { answers, input: Some(input), trace }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ReasoningType;

    const GOLF: &str = "STATEMENT:\nThree objects are placed in a fixed order, and every statement below holds.\n\n\
        In a golf tournament, there were three golfers: Ada, Joe and Rob. Joe finished first. Rob finished below Ada.\n\n\
        Which of the following is true?\nA) Ada finished second\nB) Joe finished second\nC) Rob finished second";

    #[test]
    fn offline_run_answers_csp() {
        let out = Pipeline::offline().run(GOLF);
        assert_eq!(out.answers, vec![(ProblemId::new(1), Answer::Label("A)".into()))], "{:#?}", out.trace);
        assert!(out.complete());
        assert_eq!(out.trace.plan.as_ref().unwrap().route_for(&ProblemId::new(1)), Some("csp_solver"));
        assert!(out.trace.finished_ms.is_some());
    }

    #[test]
    fn empty_input_fails_decomposition() {
        let out = Pipeline::offline().run("   ");
        assert!(out.answers.is_empty());
        assert!(!out.complete());
        assert!(out.trace.decomposition.as_ref().unwrap().parsed.is_none());
    }

    #[test]
    fn missing_solver_marks_every_problem() {
        let mut p = Pipeline::offline();
        p.registry.remove(ReasoningType::Csp);
        let out = p.run(GOLF);
        assert_eq!(out.answers, vec![(ProblemId::new(1), Answer::Unknown)]);
        assert_eq!(out.trace.problems[0].failure.as_deref(), Some("no valid plan"));
    }
}
