//! Workflow plans: nodes, edges and a total execution order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::types::{DecomposedInput, ProblemId, ReasoningType};

pub const START: &str = "<START>";
pub const END: &str = "<END>";
pub const NEURAL_SOLVER: &str = "neural_solver";

/// A plan node: problem id, solver instance `name:k`, or a virtual marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind<'a> {
    Start,
    End,
    Problem(ProblemId),
    Solver { name: &'a str, instance: u32 },
    Invalid,
}

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        NodeId(name.into())
    }

    pub fn start() -> Self {
        NodeId(START.into())
    }

    pub fn end() -> Self {
        NodeId(END.into())
    }

    pub fn problem(id: &ProblemId) -> Self {
        NodeId(id.as_str().into())
    }

    pub fn solver(name: &str, instance: u32) -> Self {
        NodeId(format!("{name}:{instance}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn kind(&self) -> NodeKind<'_> {
        match self.0.as_str() {
            START => NodeKind::Start,
            END => NodeKind::End,
            s => {
                if let Some(id) = ProblemId::parse(s) {
                    return NodeKind::Problem(id);
                }
                match s.rsplit_once(':') {
                    Some((name, k))
                        if !name.is_empty()
                            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                            && !k.starts_with('0') =>
                    {
                        k.parse().map_or(NodeKind::Invalid, |instance| NodeKind::Solver { name, instance })
                    }
                    _ => NodeKind::Invalid,
                }
            }
        }
    }

    /// Solver kind name without the instance suffix.
    pub fn solver_name(&self) -> Option<&str> {
        match self.kind() {
            NodeKind::Solver { name, .. } => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `nodes` is listed in execution order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoutingPlan {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("planning failed: {0}")]
pub struct PlanningFailed(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanParseError {
    #[error("plan is not valid JSON: {0}")]
    Json(String),
    #[error("plan does not follow the agents/edges layout: {0}")]
    Shape(String),
}

impl RoutingPlan {
    pub fn predecessors(&self, n: &NodeId) -> Vec<&NodeId> {
        self.edges.iter().filter(|(_, t)| t == n).map(|(s, _)| s).collect()
    }

    pub fn successors(&self, n: &NodeId) -> Vec<&NodeId> {
        self.edges.iter().filter(|(s, _)| s == n).map(|(_, t)| t).collect()
    }

    /// Solver node handling each problem, in problem order.
    pub fn routes(&self) -> Vec<(ProblemId, Option<NodeId>)> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind() {
                NodeKind::Problem(id) => {
                    let solver = self.successors(n).into_iter().find(|s| s.solver_name().is_some()).cloned();
                    Some((id, solver))
                }
                _ => None,
            })
            .collect()
    }

    /// Wire form: agents without `<START>`, edges as pairs.
    pub fn to_wire(&self) -> Value {
        let agents: Vec<&str> = self.nodes.iter().filter(|n| n.as_str() != START).map(NodeId::as_str).collect();
        let edges: Vec<[&str; 2]> = self
            .edges
            .iter()
            .filter(|(s, _)| s.as_str() != START)
            .map(|(s, t)| [s.as_str(), t.as_str()])
            .collect();
        json!({ "agents": agents, "edges": edges })
    }

    pub fn to_wire_string(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("plan values always serialize")
    }

    /// Reads the wire form, adds `<START>` in front of every problem node and
    /// orders nodes topologically (ties keep agent order).
    pub fn from_wire(raw: &str) -> Result<Self, PlanParseError> {
        let v: Value = serde_json::from_str(raw).map_err(|e| PlanParseError::Json(e.to_string()))?;
        let shape = |m: &str| PlanParseError::Shape(m.to_string());
        let obj = v.as_object().ok_or_else(|| shape("top level must be an object"))?;
        let agents: Vec<NodeId> = obj
            .get("agents")
            .and_then(Value::as_array)
            .ok_or_else(|| shape("`agents` must be an array"))?
            .iter()
            .map(|a| a.as_str().map(NodeId::new).ok_or_else(|| shape("agent names must be strings")))
            .collect::<Result<_, _>>()?;
        let mut edges: Vec<(NodeId, NodeId)> = obj
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| shape("`edges` must be an array"))?
            .iter()
            .map(|e| match e.as_array().map(Vec::as_slice) {
                Some([Value::String(s), Value::String(t)]) => Ok((NodeId::new(s.as_str()), NodeId::new(t.as_str()))),
                _ => Err(shape("each edge must be a [source, target] pair of strings")),
            })
            .collect::<Result<_, _>>()?;
        let mut nodes = vec![NodeId::start()];
        nodes.extend(agents.iter().filter(|a| a.as_str() != START).cloned());
        let start_edges: Vec<(NodeId, NodeId)> = agents
            .iter()
            .filter(|a| matches!(a.kind(), NodeKind::Problem(_)))
            .map(|a| (NodeId::start(), a.clone()))
            .collect();
        edges.splice(0..0, start_edges);
        let mut plan = RoutingPlan { nodes, edges };
        plan.nodes = topological(&plan).unwrap_or(plan.nodes.clone());
        Ok(plan)
    }
}

/// Stable topological order; `None` when the graph has a cycle among listed nodes.
fn topological(plan: &RoutingPlan) -> Option<Vec<NodeId>> {
    let index: HashMap<&NodeId, usize> = plan.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut indeg = vec![0usize; plan.nodes.len()];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); plan.nodes.len()];
    for (s, t) in &plan.edges {
        if let (Some(&a), Some(&b)) = (index.get(s), index.get(t)) {
            indeg[b] += 1;
            out[a].push(b);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..plan.nodes.len()).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(plan.nodes.len());
    while let Some(i) = ready.pop_first() {
        order.push(plan.nodes[i].clone());
        for &j in &out[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    (order.len() == plan.nodes.len()).then_some(order)
}

/// Deterministic plan from sub-problem types.
///
/// `available(ty)` tells whether the portfolio has a solver for `ty`;
/// `fallback` whether an LLM solver may stand in.
pub fn build_plan(
    input: &DecomposedInput,
    available: impl Fn(ReasoningType) -> bool,
    fallback: bool,
) -> Result<RoutingPlan, PlanningFailed> {
    let mut counters: BTreeMap<&str, u32> = BTreeMap::new();
    let mut nodes = vec![NodeId::start()];
    let mut solvers = Vec::new();
    let mut edges = Vec::new();
    for p in &input.sub_problems {
        let name = if available(p.reasoning_type) {
            p.reasoning_type.solver_name()
        } else if fallback {
            NEURAL_SOLVER
        } else {
            return Err(PlanningFailed(format!("no solver for {} problem {}", p.reasoning_type, p.problem_id)));
        };
        let k = counters.entry(name).or_insert(0);
        *k += 1;
        let pid = NodeId::problem(&p.problem_id);
        let sid = NodeId::solver(name, *k);
        nodes.push(pid.clone());
        edges.push((NodeId::start(), pid.clone()));
        edges.push((pid, sid.clone()));
        edges.push((sid.clone(), NodeId::end()));
        solvers.push(sid);
    }
    nodes.extend(solvers);
    nodes.push(NodeId::end());
    // Start edges first, then problem->solver, then solver->end.
    edges.sort_by_key(|(s, t)| match (s.kind(), t.kind()) {
        (NodeKind::Start, _) => 0,
        (_, NodeKind::End) => 2,
        _ => 1,
    });
    Ok(RoutingPlan { nodes, edges })
}

/// Structural checks. Every violation is reported.
pub fn validate_plan(plan: &RoutingPlan) -> Result<(), Vec<String>> {
    let mut v = Vec::new();
    let ends = plan.nodes.iter().filter(|n| n.as_str() == END).count();
    if ends == 0 {
        v.push("no terminal marker".to_string());
    } else if ends > 1 {
        v.push(format!("{END} appears {ends} times"));
    }
    let starts = plan.nodes.iter().filter(|n| n.as_str() == START).count();
    if starts > 1 {
        v.push(format!("{START} appears {starts} times"));
    }
    let mut seen = HashSet::new();
    for n in &plan.nodes {
        if !seen.insert(n) && n.as_str() != END && n.as_str() != START {
            v.push(format!("duplicate node `{n}`"));
        }
        if n.kind() == NodeKind::Invalid {
            v.push(format!("unknown agent `{n}`"));
        }
    }
    for (s, t) in &plan.edges {
        for e in [s, t] {
            if !seen.contains(e) {
                v.push(format!("edge endpoint `{e}` is not a node"));
            }
        }
        if t.as_str() == START {
            v.push(format!("edge `{s}` -> `{t}` enters {START}"));
        }
        if s.as_str() == END {
            v.push(format!("edge `{s}` -> `{t}` leaves {END}"));
        }
    }
    match topological(plan) {
        None => v.push("plan contains a cycle".to_string()),
        Some(_) => {
            let pos: HashMap<&NodeId, usize> = plan.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
            if plan.edges.iter().any(|(s, t)| matches!((pos.get(s), pos.get(t)), (Some(a), Some(b)) if a >= b)) {
                v.push("node order is not a topological order of the edges".to_string());
            }
        }
    }
    if ends == 1 {
        let mut reach: HashSet<&NodeId> = HashSet::from([plan.nodes.iter().find(|n| n.as_str() == END).expect("one end")]);
        let mut changed = true;
        while changed {
            changed = false;
            for (s, t) in &plan.edges {
                if reach.contains(t) && reach.insert(s) {
                    changed = true;
                }
            }
        }
        for n in &plan.nodes {
            if n.as_str() != START && !reach.contains(n) {
                v.push(format!("node `{n}` does not reach {END}"));
            }
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Checks that every sub-problem is routed to exactly one known solver.
pub fn check_coverage(plan: &RoutingPlan, input: &DecomposedInput, known: impl Fn(&str) -> bool) -> Vec<String> {
    let mut v = Vec::new();
    for p in &input.sub_problems {
        let node = NodeId::problem(&p.problem_id);
        if !plan.nodes.contains(&node) {
            v.push(format!("problem `{}` is missing from the plan", p.problem_id));
            continue;
        }
        let solvers: Vec<&NodeId> = plan.successors(&node).into_iter().filter(|s| s.solver_name().is_some()).collect();
        match solvers.as_slice() {
            [] => v.push(format!("problem `{}` is not routed to a solver", p.problem_id)),
            [_] => {}
            _ => v.push(format!("problem `{}` is routed to several solvers", p.problem_id)),
        }
    }
    for n in &plan.nodes {
        if let NodeKind::Problem(id) = n.kind() {
            if input.get(&id).is_none() {
                v.push(format!("plan names unknown problem `{id}`"));
            }
        }
        if let Some(name) = n.solver_name() {
            if !known(name) {
                v.push(format!("unknown agent `{name}`"));
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{AnswerOption, Components, SubProblem};

    pub(crate) fn input(types: &[ReasoningType]) -> DecomposedInput {
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

    fn names(ns: &[NodeId]) -> Vec<&str> {
        ns.iter().map(NodeId::as_str).collect()
    }

    #[test]
    fn mixed_plan_matches_reference_edges() {
        use ReasoningType::*;
        let plan = build_plan(&input(&[Csp, Fol, Csp]), |_| true, false).unwrap();
        assert_eq!(
            names(&plan.nodes),
            ["<START>", "ques_1", "ques_2", "ques_3", "csp_solver:1", "fol_solver:1", "csp_solver:2", "<END>"]
        );
        let wire = plan.to_wire();
        assert_eq!(
            wire["edges"],
            json!([
                ["ques_1", "csp_solver:1"],
                ["ques_2", "fol_solver:1"],
                ["ques_3", "csp_solver:2"],
                ["csp_solver:1", "<END>"],
                ["fol_solver:1", "<END>"],
                ["csp_solver:2", "<END>"]
            ])
        );
        assert_eq!(validate_plan(&plan), Ok(()));
        assert_eq!(RoutingPlan::from_wire(&plan.to_wire_string()).unwrap(), plan);
    }

    #[test]
    fn minimal_and_fallback() {
        let plan = build_plan(&input(&[ReasoningType::Lp]), |_| true, false).unwrap();
        assert_eq!(plan.edges.len(), 3);
        let plan = build_plan(&input(&[ReasoningType::Csp]), |t| t != ReasoningType::Csp, true).unwrap();
        assert!(plan.nodes.contains(&NodeId::new("neural_solver:1")));
        assert!(build_plan(&input(&[ReasoningType::Csp]), |t| t != ReasoningType::Csp, false).is_err());
    }

    #[test]
    fn violations() {
        let plan = RoutingPlan::from_wire(r#"{"agents":["ques_1","lp_solver:1"],"edges":[["ques_1","lp_solver:1"]]}"#).unwrap();
        assert!(validate_plan(&plan).unwrap_err().contains(&"no terminal marker".to_string()));
        let dup = RoutingPlan::from_wire(
            r#"{"agents":["ques_1","csp_solver:1","csp_solver:1","<END>"],"edges":[["ques_1","csp_solver:1"],["csp_solver:1","<END>"]]}"#,
        )
        .unwrap();
        assert!(validate_plan(&dup).unwrap_err().iter().any(|m| m.contains("duplicate node `csp_solver:1`")));
        let cyc = RoutingPlan {
            nodes: vec![NodeId::new("a:1"), NodeId::new("b:1"), NodeId::end()],
            edges: vec![(NodeId::new("a:1"), NodeId::new("b:1")), (NodeId::new("b:1"), NodeId::new("a:1"))],
        };
        assert!(validate_plan(&cyc).unwrap_err().contains(&"plan contains a cycle".to_string()));
    }

    #[test]
    fn coverage() {
        let inp = input(&[ReasoningType::Lp, ReasoningType::Fol]);
        let plan = RoutingPlan::from_wire(
            r#"{"agents":["ques_1","magic_solver:1","<END>"],"edges":[["ques_1","magic_solver:1"],["magic_solver:1","<END>"]]}"#,
        )
        .unwrap();
        let v = check_coverage(&plan, &inp, |n| ReasoningType::from_solver_name(n).is_some());
        assert!(v.contains(&"problem `ques_2` is missing from the plan".to_string()));
        assert!(v.contains(&"unknown agent `magic_solver`".to_string()));
    }

    #[test]
    fn node_kinds() {
        assert_eq!(NodeId::new("csp_solver:2").kind(), NodeKind::Solver { name: "csp_solver", instance: 2 });
        assert_eq!(NodeId::new("csp_solver:0").kind(), NodeKind::Invalid);
        assert_eq!(NodeId::new("hello").kind(), NodeKind::Invalid);
        assert!(matches!(NodeId::new("ques_3").kind(), NodeKind::Problem(_)));
    }
}
