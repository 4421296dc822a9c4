//! Natural-language input to typed sub-problems.

pub mod heuristic;
pub mod schema;
pub mod segment;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::llm::{extract_structured, ChatClient};
use crate::trace::{now_ms, DecompositionRecord, TokenUsage};
use crate::types::{AnswerOption, Components, DecomposedInput, ProblemId, SubProblem};

pub use heuristic::{classify_heuristic, CueError, Cues, FeatureScore};
pub use schema::{serialize, to_wire, validate_schema, SchemaError, MULTI_GOAL};
pub use segment::{segment, Block, Shape, BATCH_HEADER};

const PROMPT: &str = include_str!("../../assets/prompts/decompose.txt");
const SYSTEM: &str = "You turn reasoning problems into structured JSON. Output only JSON.";

#[derive(Clone)]
pub enum DecomposerBackend {
    Heuristic(Cues),
    LanguageModel { client: Arc<dyn ChatClient> },
}

impl Default for DecomposerBackend {
    fn default() -> Self {
        DecomposerBackend::Heuristic(Cues::default())
    }
}

impl fmt::Debug for DecomposerBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposerBackend::Heuristic(c) => write!(f, "Heuristic({} cues)", c.len()),
            DecomposerBackend::LanguageModel { client } => write!(f, "LanguageModel({})", client.model()),
        }
    }
}

impl DecomposerBackend {
    pub fn name(&self) -> &'static str {
        match self {
            DecomposerBackend::Heuristic(_) => "heuristic",
            DecomposerBackend::LanguageModel { .. } => "llm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub input: DecomposedInput,
    pub record: DecompositionRecord,
    pub usage: Vec<TokenUsage>,
}

#[derive(Debug, Clone, Error)]
#[error("decomposition failed: {reason}")]
pub struct DecompositionFailed {
    pub reason: String,
    pub record: DecompositionRecord,
    pub usage: Vec<TokenUsage>,
}

fn record(backend: &DecomposerBackend, raw: Option<String>, attempts: u32, input: Result<&DecomposedInput, &str>) -> DecompositionRecord {
    DecompositionRecord {
        backend: backend.name().into(),
        raw_output: raw,
        attempts,
        parsed: input.ok().map(|d| d.sub_problems.iter().map(|p| (p.problem_id.clone(), p.reasoning_type)).collect()),
        error: input.err().map(str::to_string),
        at_ms: now_ms(),
    }
}

#[allow(clippy::result_large_err)]
pub fn decompose(text: &str, backend: &DecomposerBackend) -> Result<Decomposition, DecompositionFailed> {
    let fail = |reason: String, raw, attempts, usage| DecompositionFailed {
        record: record(backend, raw, attempts, Err(&reason)),
        reason,
        usage,
    };
    if text.trim().is_empty() {
        return Err(fail("empty input".into(), None, 0, vec![]));
    }
    match backend {
        DecomposerBackend::Heuristic(cues) => {
            let input = decompose_heuristic(text, cues);
            if input.sub_problems.is_empty() {
                return Err(fail("no question found".into(), None, 1, vec![]));
            }
            let raw = serialize(&input);
            match validate_schema(&raw) {
                Ok(checked) => {
                    Ok(Decomposition { record: record(backend, Some(raw), 1, Ok(&checked)), input: checked, usage: vec![] })
                }
                Err(e) => Err(fail(e.to_string(), Some(raw), 1, vec![])),
            }
        }
        DecomposerBackend::LanguageModel { client } => {
            let prompt = PROMPT.replace("{input}", text);
            let mut usage = Vec::new();
            let mut user = prompt.clone();
            let mut last = (String::new(), String::new());
            for attempt in 1..=2u32 {
                let resp = match client.chat(&client.request(SYSTEM, &user)) {
                    Ok(r) => r,
                    Err(e) => return Err(fail(e.to_string(), None, attempt, usage)),
                };
                usage.extend(resp.usage);
                let parsed = extract_structured(&resp.text)
                    .map_err(|e| e.to_string())
                    .and_then(|obj| validate_schema(obj).map_err(|e| e.to_string()));
                match parsed {
                    Ok(input) => {
                        return Ok(Decomposition {
                            record: record(backend, Some(resp.text), attempt, Ok(&input)),
                            input,
                            usage,
                        })
                    }
                    Err(e) => {
                        user = format!(
                            "{prompt}\n\nYour previous reply could not be used: {e}\n\nPrevious reply:\n{}\n\n\
                             Reply again with one corrected JSON object.",
                            resp.text
                        );
                        last = (e, resp.text);
                    }
                }
            }
            Err(fail(last.0, Some(last.1), 2, usage))
        }
    }
}

/// Offline decomposition: segmentation plus the cue classifier.
pub fn decompose_heuristic(text: &str, cues: &Cues) -> DecomposedInput {
    let (header, blocks) = segment(text);
    let sub_problems: Vec<SubProblem> = blocks
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let (ty, _) = classify_heuristic(&b.text, cues);
            let options = if b.options.is_empty() { vec!["True".to_string(), "False".to_string()] } else { b.options };
            SubProblem {
                problem_id: ProblemId::new(i + 1),
                reasoning_type: ty,
                components: Components::for_type(ty, b.first, b.second),
                options: AnswerOption::label_all(&options),
                type_alias: None,
            }
        })
        .collect();
    let overall_goal = header.unwrap_or_else(|| schema::fallback_goal(sub_problems.len()).to_string());
    DecomposedInput { sub_problems, overall_goal }
}
