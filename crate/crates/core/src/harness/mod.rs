//! Synthetic datasets, rendering, mixing, batching and evaluation.

pub mod csp;
pub mod eval;
pub mod fol;
pub mod lexicon;
pub mod lp;
pub mod render;
pub mod smt;

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engines::{solve, EngineLimits};
use crate::formalizer::{convert_answer, template_program, AnswerPolicy};
use crate::logiclang::{Diagnostics, FormalProgram, Language};
use crate::types::{AnswerOption, Components, ProblemId, ReasoningType, SubProblem};

pub use csp::gen_csp_ordering;
pub use eval::{evaluate, run_items, summarize_seeds, EvalError, EvalItem, EvalReport, RunResult, SeedSummary, SlotGold};
pub use fol::{gen_fol, model_check, ModelCheck};
pub use lp::{gen_lp_chain, gen_lp_open};
pub use render::{batch_multi, mix, render_nl, Batch};
pub use smt::gen_smt_eligibility;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    pub index: usize,
}

/// One generated problem with its gold label and ground-truth program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub gold_type: ReasoningType,
    pub gold_answer: String,
    pub nl_text: String,
    pub program_text: String,
    pub provenance: Provenance,
}

impl Instance {
    pub fn program(&self) -> Result<FormalProgram, Diagnostics> {
        Language::for_type(self.gold_type).parse(&self.program_text)
    }
}

/// A problem before rendering: the two text components, options and gold data.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub ty: ReasoningType,
    pub first: String,
    pub second: String,
    pub options: Vec<String>,
    pub program: FormalProgram,
    pub gold: String,
}

impl Problem {
    pub fn sub_problem(&self) -> SubProblem {
        SubProblem {
            problem_id: ProblemId::new(1),
            reasoning_type: self.ty,
            components: Components::for_type(self.ty, self.first.clone(), self.second.clone()),
            options: AnswerOption::label_all(&self.options),
            type_alias: None,
        }
    }

    /// Engine plus answer conversion reproduces the gold label, and the
    /// template formalizer recovers the ground-truth program from the text.
    pub fn self_check(&self, limits: &EngineLimits) -> Result<(), String> {
        let q = self.sub_problem();
        match template_program(&q) {
            Ok(p) if p == self.program => {}
            Ok(_) => return Err("template program differs from the ground truth".into()),
            Err(e) => return Err(e.to_string()),
        }
        let verdict = solve(&self.program, limits);
        let answer = convert_answer(&verdict, &q, Some(&self.program), AnswerPolicy::default()).map_err(|e| e.to_string())?;
        if answer.label() == Some(self.gold.as_str()) {
            Ok(())
        } else {
            Err(format!("engine says {verdict}, answer {answer}, gold {}", self.gold))
        }
    }

    pub fn into_instance(self, generator: &str, seed: u64, index: usize) -> Instance {
        Instance {
            id: format!("{generator}-{seed}-{index:04}"),
            gold_type: self.ty,
            gold_answer: self.gold.clone(),
            nl_text: render_nl(&self),
            program_text: self.program.to_string(),
            provenance: Provenance { generator: generator.to_string(), seed, index },
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("generator `{generator}` gave up after {tries} draws without a valid instance")]
    Exhausted { generator: String, tries: usize },
}

/// Draws problems until `n` pass the self-check. `draw` gets the index of
/// the instance being filled and may decline by returning `None`.
pub(crate) fn collect<R>(
    generator: &str,
    seed: u64,
    n: usize,
    rng: &mut R,
    mut draw: impl FnMut(&mut R, usize) -> Option<Problem>,
) -> Result<Vec<Instance>, GenError> {
    let limits = EngineLimits::default();
    let max_tries = 200 * n.max(1);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > max_tries {
            return Err(GenError::Exhausted { generator: generator.to_string(), tries: max_tries });
        }
        let Some(p) = draw(rng, out.len()) else { continue };
        if p.self_check(&limits).is_ok() {
            out.push(p.into_instance(generator, seed, out.len()));
        }
    }
    Ok(out)
}

/// Named dataset shapes with their default sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dataset {
    LpChain { hops: usize },
    LpOpen,
    Fol,
    Csp { objects: usize },
    Smt,
}

impl Dataset {
    /// The five standard shapes and sizes.
    pub const STANDARD: [(Dataset, usize); 5] = [
        (Dataset::LpChain { hops: 5 }, 500),
        (Dataset::LpOpen, 600),
        (Dataset::Fol, 204),
        (Dataset::Csp { objects: 7 }, 700),
        (Dataset::Smt, 300),
    ];

    pub fn name(&self) -> String {
        match self {
            Dataset::LpChain { hops } => format!("lp-chain-{hops}"),
            Dataset::LpOpen => "lp-open".into(),
            Dataset::Fol => "fol".into(),
            Dataset::Csp { objects } => format!("csp-{objects}"),
            Dataset::Smt => "smt".into(),
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Vec<Instance>, GenError> {
        match *self {
            Dataset::LpChain { hops } => gen_lp_chain(hops, n, seed),
            Dataset::LpOpen => gen_lp_open(n, seed),
            Dataset::Fol => gen_fol(n, seed),
            Dataset::Csp { objects } => gen_csp_ordering(objects, n, seed),
            Dataset::Smt => gen_smt_eligibility(n, seed),
        }
    }
}

/// Dataset name of an instance: the generator recorded in its provenance.
pub fn dataset_of(instance: &Instance) -> &str {
    &instance.provenance.generator
}

#[derive(Debug, Error)]
pub enum DatasetIoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, DatasetIoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| DatasetIoError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it).expect("instances serialize"));
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    // Symlinks and special files (pipes, /dev/stdout) are written through, not replaced.
    if std::fs::symlink_metadata(path).is_ok_and(|m| !m.is_file()) {
        return std::fs::write(path, contents);
    }
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
