//! Solver portfolio: typed formalize-solve-convert solvers plus an optional LLM fallback.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use regex::Regex;
use serde::Serialize;

use super::plan::NEURAL_SOLVER;
use crate::engines::{run_external, solve, EngineLimits, ExternalEngine};
use crate::formalizer::{convert_answer, formalize, AnswerPolicy, FormalizeError, FormalizerBackend};
use crate::llm::ChatClient;
use crate::trace::{FormalizationAttempt, TokenUsage};
use crate::types::{Answer, Components, ReasoningType, SolverVerdict, SubProblem};

const NEURAL_PROMPT: &str = include_str!("../../assets/prompts/neural.txt");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutput {
    pub attempts: Vec<FormalizationAttempt>,
    pub verdict: Option<SolverVerdict>,
    pub answer: Answer,
    pub failure: Option<String>,
    #[serde(skip)]
    pub usage: Vec<TokenUsage>,
}

impl SolveOutput {
    pub fn failed(reason: impl Into<String>) -> Self {
        SolveOutput { attempts: vec![], verdict: None, answer: Answer::Unknown, failure: Some(reason.into()), usage: vec![] }
    }
}

/// One solver instance. `context` holds outputs of upstream solver nodes.
pub trait Solver: Send {
    fn solve(&mut self, q: &SubProblem, context: &[String]) -> SolveOutput;
}

pub type SolverFactory = Arc<dyn Fn() -> Box<dyn Solver> + Send + Sync>;

#[derive(Debug, Clone)]
pub enum EngineChoice {
    Builtin,
    External(ExternalEngine),
}

/// Formalize, run an engine, map the verdict to an option.
#[derive(Debug, Clone)]
pub struct TypedSolver {
    pub ty: ReasoningType,
    pub formalizer: FormalizerBackend,
    pub engine: EngineChoice,
    pub limits: EngineLimits,
    pub policy: AnswerPolicy,
}

impl Solver for TypedSolver {
    fn solve(&mut self, q: &SubProblem, _context: &[String]) -> SolveOutput {
        // A misrouted problem is formalized in this solver's language anyway.
        let retyped;
        let q = if q.reasoning_type == self.ty {
            q
        } else {
            let (a, b) = q.components.texts();
            retyped = SubProblem {
                reasoning_type: self.ty,
                components: Components::for_type(self.ty, a.to_string(), b.to_string()),
                ..q.clone()
            };
            &retyped
        };
        let f = match formalize(q, &self.formalizer) {
            Ok(f) => f,
            Err(e) => {
                let reason = match &e {
                    FormalizeError::Exhausted { .. } => e.to_string(),
                    FormalizeError::Llm { source, .. } => format!("language model call failed: {source}"),
                };
                return SolveOutput {
                    attempts: e.attempts().to_vec(),
                    verdict: None,
                    answer: Answer::Unknown,
                    failure: Some(reason),
                    usage: e.usage().to_vec(),
                };
            }
        };
        let verdict = match &self.engine {
            EngineChoice::Builtin => solve(&f.program, &self.limits),
            EngineChoice::External(ext) => run_external(ext, &f.program.to_string(), &self.limits),
        };
        let (answer, failure) = match convert_answer(&verdict, q, Some(&f.program), self.policy) {
            Ok(a) => (a, None),
            Err(e) => (Answer::Unknown, Some(e.to_string())),
        };
        SolveOutput { attempts: f.attempts, verdict: Some(verdict), answer, failure, usage: f.usage }
    }
}

/// Asks the language model for an option directly.
pub struct NeuralSolver {
    pub client: Arc<dyn ChatClient>,
}

impl Solver for NeuralSolver {
    fn solve(&mut self, q: &SubProblem, _context: &[String]) -> SolveOutput {
        let prompt = NEURAL_PROMPT.replace("{problem}", &q.full_text());
        let resp = match self.client.chat(&self.client.request("You answer multiple-choice questions.", &prompt)) {
            Ok(r) => r,
            Err(e) => return SolveOutput::failed(format!("language model call failed: {e}")),
        };
        let usage: Vec<TokenUsage> = resp.usage.into_iter().collect();
        match pick_label(&resp.text, q) {
            Some(label) => SolveOutput { attempts: vec![], verdict: None, answer: Answer::Label(label), failure: None, usage },
            None => SolveOutput { usage, ..SolveOutput::failed("no option label in the model reply") },
        }
    }
}

/// Finds the chosen option label in a free-form reply.
pub fn pick_label(text: &str, q: &SubProblem) -> Option<String> {
    let re = Regex::new(r"(?i)answer\s*:\s*\(?([A-Z])\)?").expect("valid regex");
    let any = Regex::new(r"\(?\b([A-Z])\)").expect("valid regex");
    let found = re.captures_iter(text).last().or_else(|| any.captures_iter(text).last())?;
    let label = format!("{})", found[1].to_ascii_uppercase());
    q.option(&label).map(|o| o.label.clone())
}

#[derive(Clone, Default)]
pub struct SolverRegistry {
    portfolio: BTreeMap<ReasoningType, SolverFactory>,
    fallback: Option<SolverFactory>,
}

impl fmt::Debug for SolverRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverRegistry")
            .field("portfolio", &self.portfolio.keys().collect::<Vec<_>>())
            .field("fallback", &self.fallback.is_some())
            .finish()
    }
}

impl SolverRegistry {
    pub fn empty() -> Self {
        SolverRegistry::default()
    }

    /// The four typed solvers. `external` overrides the built-in engine per type.
    pub fn builtin(
        formalizer: FormalizerBackend,
        limits: EngineLimits,
        policy: AnswerPolicy,
        external: &BTreeMap<ReasoningType, ExternalEngine>,
    ) -> Self {
        let mut r = SolverRegistry::empty();
        for ty in ReasoningType::ALL {
            let solver = TypedSolver {
                ty,
                formalizer: formalizer.clone(),
                engine: external.get(&ty).cloned().map_or(EngineChoice::Builtin, EngineChoice::External),
                limits: limits.clone(),
                policy,
            };
            r.register(ty, Arc::new(move || Box::new(solver.clone())));
        }
        r
    }

    pub fn register(&mut self, ty: ReasoningType, factory: SolverFactory) {
        self.portfolio.insert(ty, factory);
    }

    pub fn remove(&mut self, ty: ReasoningType) {
        self.portfolio.remove(&ty);
    }

    pub fn set_fallback(&mut self, factory: SolverFactory) {
        self.fallback = Some(factory);
    }

    pub fn neural_fallback(&mut self, client: Arc<dyn ChatClient>) {
        self.set_fallback(Arc::new(move || Box::new(NeuralSolver { client: client.clone() })));
    }

    pub fn has(&self, ty: ReasoningType) -> bool {
        self.portfolio.contains_key(&ty)
    }

    pub fn has_fallback(&self) -> bool {
        self.fallback.is_some()
    }

    /// Whether a plan agent name refers to an available solver.
    pub fn knows(&self, name: &str) -> bool {
        match ReasoningType::from_solver_name(name) {
            Some(ty) => self.has(ty),
            None => name == NEURAL_SOLVER && self.has_fallback(),
        }
    }

    /// Fresh solver instance for an agent name.
    pub fn instantiate(&self, name: &str) -> Option<Box<dyn Solver>> {
        match ReasoningType::from_solver_name(name) {
            Some(ty) => self.portfolio.get(&ty).map(|f| f()),
            None if name == NEURAL_SOLVER => self.fallback.as_ref().map(|f| f()),
            None => None,
        }
    }
}
