//! Runs a validated plan over a shared memory.

use std::collections::HashMap;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use serde_json::json;
use thiserror::Error;

use super::memory::MemoryStore;
use super::plan::{validate_plan, NodeId, NodeKind, RoutingPlan};
use super::registry::{SolveOutput, SolverRegistry};
use crate::trace::{ProblemRecord, TokenUsage};
use crate::types::{Answer, DecomposedInput, ProblemId, SubProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct ExecOptions {
    pub node_timeout: Duration,
    /// Maximum number of nodes run at once; 1 runs strictly in plan order.
    pub jobs: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { node_timeout: Duration::from_secs(10), jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    /// Answers of the problems in the plan, in problem-id order.
    pub answers: Vec<(ProblemId, Answer)>,
    pub records: Vec<ProblemRecord>,
    pub usage: Vec<TokenUsage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecuteError {
    #[error("plan is invalid: {}", .0.join("; "))]
    InvalidPlan(Vec<String>),
}

struct NodeResult {
    records: Vec<ProblemRecord>,
    usage: Vec<TokenUsage>,
}

fn run_with_timeout(
    registry: &SolverRegistry,
    node: &NodeId,
    name: &str,
    q: &SubProblem,
    context: &[String],
    timeout: Duration,
) -> (SolveOutput, u64) {
    let started = Instant::now();
    let Some(mut solver) = registry.instantiate(name) else {
        return (SolveOutput::failed(format!("no solver registered for agent `{node}`")), 0);
    };
    let (tx, rx) = mpsc::channel();
    let (q, context) = (q.clone(), context.to_vec());
    // The worker is detached on timeout; engines stop at their own deadline.
    thread::spawn(move || {
        let _ = tx.send(solver.solve(&q, &context));
    });
    let out = match rx.recv_timeout(timeout) {
        Ok(out) => out,
        Err(mpsc::RecvTimeoutError::Timeout) => SolveOutput::failed(format!("node timed out after {}s", timeout.as_secs_f64())),
        Err(mpsc::RecvTimeoutError::Disconnected) => SolveOutput::failed("solver panicked"),
    };
    (out, started.elapsed().as_millis() as u64)
}

fn run_node(
    plan: &RoutingPlan,
    node: &NodeId,
    input: &DecomposedInput,
    memory: &MemoryStore,
    registry: &SolverRegistry,
    opts: &ExecOptions,
) -> NodeResult {
    let mut result = NodeResult { records: vec![], usage: vec![] };
    match node.kind() {
        NodeKind::Start | NodeKind::End | NodeKind::Invalid => {}
        NodeKind::Problem(id) => {
            let payload = input.get(&id).map_or_else(
                || json!({ "error": format!("unknown problem {id}") }).to_string(),
                |p| serde_json::to_string(p).expect("sub-problems serialize"),
            );
            let _ = memory.write(node, payload);
        }
        NodeKind::Solver { name, .. } => {
            let mut problems = Vec::new();
            let mut context = Vec::new();
            for pred in plan.predecessors(node) {
                let Some(raw) = memory.read(pred) else { continue };
                match pred.kind() {
                    NodeKind::Problem(_) => problems.extend(serde_json::from_str::<SubProblem>(&raw).ok()),
                    NodeKind::Solver { .. } => context.push(raw),
                    _ => {}
                }
            }
            let mut outputs = Vec::new();
            for q in &problems {
                let (out, elapsed_ms) = run_with_timeout(registry, node, name, q, &context, opts.node_timeout);
                outputs.push(json!({
                    "problem_id": q.problem_id,
                    "answer": out.answer,
                    "verdict": out.verdict,
                    "failure": out.failure,
                }));
                result.usage.extend(out.usage.iter().copied());
                result.records.push(ProblemRecord {
                    problem_id: q.problem_id.clone(),
                    node: node.to_string(),
                    attempts: out.attempts,
                    verdict: out.verdict,
                    answer: out.answer,
                    failure: out.failure,
                    elapsed_ms,
                });
            }
            let _ = memory.write(node, json!(outputs).to_string());
        }
    }
    result
}

/// Runs every node after its predecessors. With `jobs > 1`, nodes whose
/// predecessors are all done run concurrently; results do not depend on it.
pub fn execute(
    plan: &RoutingPlan,
    input: &DecomposedInput,
    memory: &MemoryStore,
    registry: &SolverRegistry,
    opts: &ExecOptions,
) -> Result<Execution, ExecuteError> {
    validate_plan(plan).map_err(ExecuteError::InvalidPlan)?;
    let position: HashMap<&NodeId, usize> = plan.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let preds: Vec<Vec<usize>> =
        plan.nodes.iter().map(|n| plan.predecessors(n).into_iter().filter_map(|p| position.get(p).copied()).collect()).collect();
    let mut done = vec![false; plan.nodes.len()];
    let mut results: Vec<Option<NodeResult>> = (0..plan.nodes.len()).map(|_| None).collect();
    let jobs = opts.jobs.max(1);
    while done.iter().any(|d| !d) {
        // Ready nodes in plan order.
        let wave: Vec<usize> = (0..plan.nodes.len())
            .filter(|&i| !done[i] && preds[i].iter().all(|&p| done[p]))
            .take(jobs)
            .collect();
        if wave.is_empty() {
            break;
        }
        if wave.len() == 1 {
            let i = wave[0];
            results[i] = Some(run_node(plan, &plan.nodes[i], input, memory, registry, opts));
        } else {
            let outs: Vec<(usize, NodeResult)> = thread::scope(|s| {
                let handles: Vec<_> = wave
                    .iter()
                    .map(|&i| s.spawn(move || (i, run_node(plan, &plan.nodes[i], input, memory, registry, opts))))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("node runner does not panic")).collect()
            });
            for (i, r) in outs {
                results[i] = Some(r);
            }
        }
        for i in wave {
            done[i] = true;
        }
    }
    let mut records: Vec<ProblemRecord> = Vec::new();
    let mut usage = Vec::new();
    for r in results.into_iter().flatten() {
        records.extend(r.records);
        usage.extend(r.usage);
    }
    let mut problem_ids: Vec<ProblemId> = plan
        .nodes
        .iter()
        .filter_map(|n| match n.kind() {
            NodeKind::Problem(id) => Some(id),
            _ => None,
        })
        .collect();
    problem_ids.sort_by_key(ProblemId::index);
    let answers: Vec<(ProblemId, Answer)> = problem_ids
        .into_iter()
        .map(|id| {
            let answer = records.iter().find(|r| r.problem_id == id).map_or(Answer::Unknown, |r| r.answer.clone());
            (id, answer)
        })
        .collect();
    let end = NodeId::end();
    let summary: Vec<_> = answers.iter().map(|(id, a)| json!({ "problem_id": id, "answer": a })).collect();
    let _ = memory.write(&end, json!(summary).to_string());
    records.sort_by_key(|r| r.problem_id.index());
    Ok(Execution { answers, records, usage })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::engines::EngineLimits;
    use crate::formalizer::{AnswerPolicy, FormalizerBackend};
    use crate::router::plan::build_plan;
    use crate::router::registry::Solver;
    use crate::types::{AnswerOption, Components, ReasoningType};

    struct Fixed(&'static str);

    impl Solver for Fixed {
        fn solve(&mut self, _q: &SubProblem, _c: &[String]) -> SolveOutput {
            SolveOutput { attempts: vec![], verdict: None, answer: Answer::Label(self.0.into()), failure: None, usage: vec![] }
        }
    }

    struct Sleepy;

    impl Solver for Sleepy {
        fn solve(&mut self, _q: &SubProblem, _c: &[String]) -> SolveOutput {
            thread::sleep(Duration::from_millis(400));
            SolveOutput::failed("late")
        }
    }

    fn input(types: &[ReasoningType]) -> DecomposedInput {
        DecomposedInput {
            sub_problems: types
                .iter()
                .enumerate()
                .map(|(i, t)| SubProblem {
                    problem_id: ProblemId::new(i + 1),
                    reasoning_type: *t,
                    components: Components::for_type(*t, "a".into(), "b".into()),
                    options: AnswerOption::label_all(&["True", "False", "Other"]),
                    type_alias: None,
                })
                .collect(),
            overall_goal: "g".into(),
        }
    }

    fn registry() -> SolverRegistry {
        let mut r = SolverRegistry::empty();
        r.register(ReasoningType::Csp, Arc::new(|| Box::new(Fixed("A)"))));
        r.register(ReasoningType::Fol, Arc::new(|| Box::new(Sleepy)));
        r.register(ReasoningType::Lp, Arc::new(|| Box::new(Fixed("C)"))));
        r
    }

    #[test]
    fn timeout_is_isolated() {
        use ReasoningType::*;
        let inp = input(&[Csp, Fol, Lp]);
        let reg = registry();
        let plan = build_plan(&inp, |t| reg.has(t), false).unwrap();
        let opts = ExecOptions { node_timeout: Duration::from_millis(100), jobs: 1 };
        let mem = MemoryStore::new();
        let ex = execute(&plan, &inp, &mem, &reg, &opts).unwrap();
        let answers: Vec<Answer> = ex.answers.iter().map(|(_, a)| a.clone()).collect();
        assert_eq!(answers, vec![Answer::Label("A)".into()), Answer::Unknown, Answer::Label("C)".into())]);
        assert!(ex.records[1].failure.as_deref().unwrap().contains("timed out"));
        assert!(mem.read(&NodeId::new("fol_solver:1")).is_some());
        assert!(mem.read(&NodeId::end()).is_some());
    }

    #[test]
    fn vacuous_plan() {
        let plan = RoutingPlan { nodes: vec![NodeId::start(), NodeId::end()], edges: vec![] };
        let ex = execute(&plan, &input(&[]), &MemoryStore::new(), &registry(), &ExecOptions::default()).unwrap();
        assert!(ex.answers.is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        use ReasoningType::*;
        let inp = input(&[Csp, Lp, Csp, Lp]);
        let reg = registry();
        let plan = build_plan(&inp, |t| reg.has(t), false).unwrap();
        let (m1, m2) = (MemoryStore::new(), MemoryStore::new());
        let a = execute(&plan, &inp, &m1, &reg, &ExecOptions::default()).unwrap();
        let b = execute(&plan, &inp, &m2, &reg, &ExecOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(a.answers, b.answers);
        assert_eq!(m1.snapshot(), m2.snapshot());
    }

    #[test]
    fn invalid_plan_is_refused() {
        let plan = RoutingPlan { nodes: vec![NodeId::start()], edges: vec![] };
        assert!(matches!(
            execute(&plan, &input(&[]), &MemoryStore::new(), &registry(), &ExecOptions::default()),
            Err(ExecuteError::InvalidPlan(_))
        ));
    }

    #[test]
    fn builtin_registry_runs_template_problems() {
        let reg = SolverRegistry::builtin(FormalizerBackend::Template, EngineLimits::default(), AnswerPolicy::default(), &BTreeMap::new());
        let mut inp = input(&[ReasoningType::Lp]);
        inp.sub_problems[0].components = Components::for_type(
            ReasoningType::Lp,
            "Every cat is cold. Tom is a cat.".into(),
            "Tom is cold.".into(),
        );
        let plan = build_plan(&inp, |t| reg.has(t), false).unwrap();
        let ex = execute(&plan, &inp, &MemoryStore::new(), &reg, &ExecOptions::default()).unwrap();
        assert_eq!(ex.answers[0].1, Answer::Label("A)".into()));
        assert_eq!(ex.records[0].verdict, Some(crate::types::SolverVerdict::Proved));
    }
}
