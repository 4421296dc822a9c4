//! Sub-problem to formal program translation.
//!
//! Two backends: a template backend that reads the controlled English produced
//! by the generators, and a language-model backend with a refinement loop that
//! feeds parser diagnostics back until the program parses.

pub mod answer;
pub mod cnl;
pub mod options;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::llm::{strip_fences, ChatClient, LlmError};
use crate::logiclang::{FormalProgram, Language};
use crate::trace::{FormalizationAttempt, TokenUsage};
use crate::types::{ReasoningType, SubProblem};

pub use answer::{convert_answer, AnswerError, AnswerPolicy, UnknownPolicy};
pub use options::{parse_csp_option, OptionPredicate, UnrecognizedOptionPhrase};

pub const DEFAULT_MAX_RETRIES: u32 = 3;

const PROMPT_LP: &str = include_str!("../../assets/prompts/lp.txt");
const PROMPT_FOL: &str = include_str!("../../assets/prompts/fol.txt");
const PROMPT_CSP: &str = include_str!("../../assets/prompts/csp.txt");
const PROMPT_SMT: &str = include_str!("../../assets/prompts/smt.txt");
const PROMPT_REFINE: &str = include_str!("../../assets/prompts/refine.txt");

const SYSTEM: &str = "You write programs in small formal languages. Output only the program.";

pub fn prompt_template(ty: ReasoningType) -> &'static str {
    match ty {
        ReasoningType::Lp => PROMPT_LP,
        ReasoningType::Fol => PROMPT_FOL,
        ReasoningType::Csp => PROMPT_CSP,
        ReasoningType::Smt => PROMPT_SMT,
    }
}

#[derive(Clone)]
pub enum FormalizerBackend {
    Template,
    LanguageModel { client: Arc<dyn ChatClient>, max_retries: u32 },
}

impl fmt::Debug for FormalizerBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormalizerBackend::Template => f.write_str("Template"),
            FormalizerBackend::LanguageModel { client, max_retries } => f
                .debug_struct("LanguageModel")
                .field("model", &client.model())
                .field("max_retries", max_retries)
                .finish(),
        }
    }
}

impl FormalizerBackend {
    pub fn name(&self) -> &'static str {
        match self {
            FormalizerBackend::Template => "template",
            FormalizerBackend::LanguageModel { .. } => "llm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Formalization {
    pub program: FormalProgram,
    pub attempts: Vec<FormalizationAttempt>,
    pub usage: Vec<TokenUsage>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormalizeError {
    #[error("formalization exhausted after {} attempt(s)", attempts.len())]
    Exhausted { attempts: Vec<FormalizationAttempt>, usage: Vec<TokenUsage> },
    #[error("language model call failed: {source}")]
    Llm { source: LlmError, attempts: Vec<FormalizationAttempt>, usage: Vec<TokenUsage> },
}

impl FormalizeError {
    pub fn attempts(&self) -> &[FormalizationAttempt] {
        match self {
            FormalizeError::Exhausted { attempts, .. } | FormalizeError::Llm { attempts, .. } => attempts,
        }
    }

    pub fn usage(&self) -> &[TokenUsage] {
        match self {
            FormalizeError::Exhausted { usage, .. } | FormalizeError::Llm { usage, .. } => usage,
        }
    }
}

/// Reads the controlled English of a generated problem into its program.
pub fn template_program(q: &SubProblem) -> Result<FormalProgram, cnl::CnlError> {
    let (a, b) = q.components.texts();
    Ok(match q.reasoning_type {
        ReasoningType::Lp => FormalProgram::Lp(cnl::lp::LpText::parse(a, b)?.build()),
        ReasoningType::Fol => FormalProgram::Fol(cnl::fol::FolText::parse(a, b)?.build()),
        ReasoningType::Csp => FormalProgram::Csp(cnl::csp::CspText::parse(a)?.build()),
        ReasoningType::Smt => FormalProgram::Smt(cnl::smt::SmtText::parse(a, b)?.build()?),
    })
}

/// Text handed to the model: the components plus options.
pub fn problem_text(q: &SubProblem) -> String {
    q.full_text()
}

pub fn formalize(q: &SubProblem, backend: &FormalizerBackend) -> Result<Formalization, FormalizeError> {
    match backend {
        FormalizerBackend::Template => match template_program(q) {
            Ok(program) => {
                let attempt = FormalizationAttempt { index: 0, program_text: program.to_string(), diagnostics: vec![] };
                Ok(Formalization { program, attempts: vec![attempt], usage: vec![] })
            }
            Err(e) => Err(FormalizeError::Exhausted {
                attempts: vec![FormalizationAttempt {
                    index: 0,
                    program_text: String::new(),
                    diagnostics: vec![e.to_string()],
                }],
                usage: vec![],
            }),
        },
        FormalizerBackend::LanguageModel { client, max_retries } => refine(q, client.as_ref(), *max_retries),
    }
}

fn refine(q: &SubProblem, client: &dyn ChatClient, max_retries: u32) -> Result<Formalization, FormalizeError> {
    let lang = Language::for_type(q.reasoning_type);
    let first = prompt_template(q.reasoning_type).replace("{problem}", &problem_text(q));
    let mut attempts = Vec::new();
    let mut usage = Vec::new();
    let mut prompt = first.clone();
    for index in 0..=max_retries {
        let resp = match client.chat(&client.request(SYSTEM, &prompt)) {
            Ok(r) => r,
            Err(source) => return Err(FormalizeError::Llm { source, attempts, usage }),
        };
        usage.extend(resp.usage);
        let text = strip_fences(&resp.text).to_string();
        match lang.parse(&text) {
            Ok(program) => {
                attempts.push(FormalizationAttempt { index, program_text: text, diagnostics: vec![] });
                return Ok(Formalization { program, attempts, usage });
            }
            Err(diags) => {
                let lines: Vec<String> = diags.lines();
                let lines = if lines.is_empty() { vec!["the program could not be parsed".to_string()] } else { lines };
                prompt = format!(
                    "{first}\n\n{}",
                    PROMPT_REFINE.replace("{diagnostics}", &lines.join("\n")).replace("{program}", &text)
                );
                attempts.push(FormalizationAttempt { index, program_text: text, diagnostics: lines });
            }
        }
    }
    Err(FormalizeError::Exhausted { attempts, usage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{solve, EngineLimits};
    use crate::llm::{scripted, ScriptedTransport};
    use crate::logiclang::parse_lp;
    use crate::types::{AnswerOption, Components, ProblemId, SolverVerdict};

    fn lp_problem() -> SubProblem {
        SubProblem {
            problem_id: ProblemId::new(1),
            reasoning_type: ReasoningType::Lp,
            components: Components::for_type(
                ReasoningType::Lp,
                "Every dumpus is not red. Tumpuses are red. Dumpuses are impuses. Impuses are not feisty. \
                 Impuses are yumpuses. Stella is a dumpus."
                    .into(),
                "Stella is not red.".into(),
            ),
            options: AnswerOption::label_all(&["True", "False"]),
            type_alias: None,
        }
    }

    #[test]
    fn template_backend_reads_generated_text() {
        let f = formalize(&lp_problem(), &FormalizerBackend::Template).unwrap();
        assert_eq!(f.attempts.len(), 1);
        assert!(f.attempts[0].accepted());
        assert_eq!(solve(&f.program, &EngineLimits::default()), SolverVerdict::Proved);
    }

    #[test]
    fn garbage_exhausts_the_budget() {
        let client = Arc::new(scripted([Ok("I am not sure.".to_string())]));
        let backend = FormalizerBackend::LanguageModel { client, max_retries: 2 };
        let err = formalize(&lp_problem(), &backend).unwrap_err();
        let FormalizeError::Exhausted { attempts, .. } = err else { panic!("{err:?}") };
        assert_eq!(attempts.len(), 3);
        assert!(attempts.iter().all(|a| !a.accepted()));
    }

    #[test]
    fn diagnostics_are_fed_back() {
        let good = parse_lp(crate::logiclang::lp::tests::STELLA).unwrap().to_string();
        let transport = Arc::new(ScriptedTransport::new([Ok("Predicates:\nbroken(".to_string()), Ok(format!("```\n{good}```"))]));
        let client = Arc::new(crate::llm::Client::new(transport.clone(), Default::default()));
        let backend = FormalizerBackend::LanguageModel { client, max_retries: 3 };
        let f = formalize(&lp_problem(), &backend).unwrap();
        assert_eq!(f.attempts.len(), 2);
        assert!(!f.attempts[0].accepted());
        let sent = transport.requests();
        assert_eq!(sent.len(), 2);
        assert!(sent[0].user.contains("Stella is a dumpus."));
        assert!(sent[1].user.contains(&f.attempts[0].diagnostics[0]));
        assert!(sent[1].user.contains("Predicates:\nbroken("));
    }
}
