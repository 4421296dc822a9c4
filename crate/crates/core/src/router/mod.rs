//! Routing: plan construction, validation and execution.

pub mod execute;
pub mod memory;
pub mod plan;
pub mod registry;

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::llm::{extract_structured, ChatClient};
use crate::trace::{now_ms, PlanRecord, TokenUsage};
use crate::types::{DecomposedInput, ReasoningType};

pub use execute::{execute, ExecOptions, ExecuteError, Execution};
pub use memory::{result_key, AlreadyWritten, MemoryStore};
pub use plan::{build_plan, check_coverage, validate_plan, NodeId, NodeKind, PlanningFailed, RoutingPlan, END, NEURAL_SOLVER, START};
pub use registry::{EngineChoice, NeuralSolver, SolveOutput, Solver, SolverFactory, SolverRegistry, TypedSolver};

const PROMPT: &str = include_str!("../../assets/prompts/route.txt");
const SYSTEM: &str = "You plan workflows as JSON graphs. Output only JSON.";

#[derive(Clone)]
pub enum RouterBackend {
    /// Plan straight from the sub-problem types.
    Types,
    /// Each problem goes to a uniformly random available solver.
    Random { seed: u64 },
    LanguageModel { client: Arc<dyn ChatClient> },
}

impl fmt::Debug for RouterBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RouterBackend::Types => f.write_str("Types"),
            RouterBackend::Random { seed } => write!(f, "Random({seed})"),
            RouterBackend::LanguageModel { client } => write!(f, "LanguageModel({})", client.model()),
        }
    }
}

impl RouterBackend {
    pub fn name(&self) -> &'static str {
        match self {
            RouterBackend::Types => "types",
            RouterBackend::Random { .. } => "random",
            RouterBackend::LanguageModel { .. } => "llm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Routing {
    /// Present only when the plan passed validation.
    pub plan: Option<RoutingPlan>,
    pub record: PlanRecord,
    pub usage: Vec<TokenUsage>,
}

fn finish(backend: &RouterBackend, raw: Option<String>, plan: Option<RoutingPlan>, mut violations: Vec<String>, input: &DecomposedInput, registry: &SolverRegistry, usage: Vec<TokenUsage>) -> Routing {
    if let Some(p) = &plan {
        if let Err(v) = validate_plan(p) {
            violations.extend(v);
        }
        violations.extend(check_coverage(p, input, |n| registry.knows(n)));
    }
    let routes = match &plan {
        Some(p) => input
            .sub_problems
            .iter()
            .map(|q| {
                let r = p.routes().into_iter().find(|(id, _)| *id == q.problem_id).and_then(|(_, s)| s);
                (q.problem_id.clone(), r.and_then(|n| n.solver_name().map(str::to_string)))
            })
            .collect(),
        None => input.sub_problems.iter().map(|q| (q.problem_id.clone(), None)).collect(),
    };
    let record = PlanRecord {
        backend: backend.name().into(),
        raw_output: raw,
        plan_json: plan.as_ref().map(RoutingPlan::to_wire_string),
        violations: if plan.is_none() && violations.is_empty() { vec!["no plan produced".into()] } else { violations },
        routes,
        at_ms: now_ms(),
    };
    let plan = plan.filter(|_| record.violations.is_empty());
    Routing { plan, record, usage }
}

pub fn route(input: &DecomposedInput, backend: &RouterBackend, registry: &SolverRegistry) -> Routing {
    match backend {
        RouterBackend::Types => match build_plan(input, |t| registry.has(t), registry.has_fallback()) {
            Ok(p) => finish(backend, None, Some(p), vec![], input, registry, vec![]),
            Err(e) => finish(backend, None, None, vec![e.to_string()], input, registry, vec![]),
        },
        RouterBackend::Random { seed } => {
            let choices: Vec<ReasoningType> = ReasoningType::ALL.into_iter().filter(|t| registry.has(*t)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut shuffled = input.clone();
            for q in &mut shuffled.sub_problems {
                if let Some(t) = choices.choose(&mut rng) {
                    q.reasoning_type = *t;
                }
            }
            match build_plan(&shuffled, |t| registry.has(t), registry.has_fallback()) {
                Ok(p) => finish(backend, None, Some(p), vec![], input, registry, vec![]),
                Err(e) => finish(backend, None, None, vec![e.to_string()], input, registry, vec![]),
            }
        }
        RouterBackend::LanguageModel { client } => {
            let agents: Vec<&str> = ReasoningType::ALL
                .into_iter()
                .filter(|t| registry.has(*t))
                .map(ReasoningType::solver_name)
                .chain(registry.has_fallback().then_some(NEURAL_SOLVER))
                .collect();
            let problems: Vec<String> =
                input.sub_problems.iter().map(|q| format!("- {}: {}", q.problem_id, q.reasoning_type)).collect();
            let prompt = PROMPT.replace("{agents}", &agents.join(", ")).replace("{problems}", &problems.join("\n"));
            let resp = match client.chat(&client.request(SYSTEM, &prompt)) {
                Ok(r) => r,
                Err(e) => return finish(backend, None, None, vec![e.to_string()], input, registry, vec![]),
            };
            let usage: Vec<TokenUsage> = resp.usage.into_iter().collect();
            let parsed = extract_structured(&resp.text)
                .map_err(|e| e.to_string())
                .and_then(|obj| RoutingPlan::from_wire(obj).map_err(|e| e.to_string()));
            match parsed {
                Ok(p) => finish(backend, Some(resp.text), Some(p), vec![], input, registry, usage),
                Err(e) => finish(backend, Some(resp.text), None, vec![e], input, registry, usage),
            }
        }
    }
}

/// Share of problems whose plan solver matches the gold type's solver.
pub fn routing_accuracy(record: &PlanRecord, gold: &[ReasoningType]) -> f64 {
    if gold.is_empty() {
        return 0.0;
    }
    let hits = gold
        .iter()
        .zip(&record.routes)
        .filter(|(g, (_, r))| r.as_deref() == Some(g.solver_name()))
        .count();
    hits as f64 / gold.len() as f64
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::engines::EngineLimits;
    use crate::formalizer::{AnswerPolicy, FormalizerBackend};
    use crate::llm::scripted;
    use crate::types::{AnswerOption, Components, ProblemId, SubProblem};

    fn input(types: &[ReasoningType]) -> DecomposedInput {
        DecomposedInput {
            sub_problems: types
                .iter()
                .enumerate()
                .map(|(i, t)| SubProblem {
                    problem_id: ProblemId::new(i + 1),
                    reasoning_type: *t,
                    components: Components::for_type(*t, "a".into(), "b".into()),
                    options: AnswerOption::label_all(&["True", "False"]),
                    type_alias: None,
                })
                .collect(),
            overall_goal: "g".into(),
        }
    }

    fn registry() -> SolverRegistry {
        SolverRegistry::builtin(FormalizerBackend::Template, EngineLimits::default(), AnswerPolicy::default(), &BTreeMap::new())
    }

    #[test]
    fn type_routing_is_exact() {
        use ReasoningType::*;
        let gold = [Csp, Fol, Smt, Lp];
        let r = route(&input(&gold), &RouterBackend::Types, &registry());
        assert!(r.plan.is_some());
        assert_eq!(routing_accuracy(&r.record, &gold), 1.0);
    }

    #[test]
    fn random_routing_is_seeded() {
        use ReasoningType::*;
        let inp = input(&[Csp, Fol, Smt, Lp, Lp, Csp]);
        let a = route(&inp, &RouterBackend::Random { seed: 7 }, &registry());
        let b = route(&inp, &RouterBackend::Random { seed: 7 }, &registry());
        assert_eq!(a.record.routes, b.record.routes);
        assert!(a.plan.is_some());
    }

    #[test]
    fn llm_plan_is_validated() {
        let inp = input(&[ReasoningType::Csp]);
        let good = r#"Plan: {"agents":["ques_1","csp_solver:1","<END>"],"edges":[["ques_1","csp_solver:1"],["csp_solver:1","<END>"]]}"#;
        let r = route(&inp, &RouterBackend::LanguageModel { client: Arc::new(scripted([Ok(good.to_string())])) }, &registry());
        assert!(r.plan.is_some(), "{:?}", r.record.violations);
        assert_eq!(r.record.route_for(&ProblemId::new(1)), Some("csp_solver"));
        let bad = r#"{"agents":["ques_1","csp_solver:1"],"edges":[["ques_1","csp_solver:1"]]}"#;
        let r = route(&inp, &RouterBackend::LanguageModel { client: Arc::new(scripted([Ok(bad.to_string())])) }, &registry());
        assert!(r.plan.is_none());
        assert!(r.record.violations.contains(&"no terminal marker".to_string()));
        assert!(!r.record.is_valid());
    }
}
