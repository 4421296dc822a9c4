//! Run configuration read from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposer::{Cues, DecomposerBackend};
use crate::engines::{EngineKind, EngineLimits, ExternalEngine};
use crate::formalizer::{AnswerPolicy, FormalizerBackend, DEFAULT_MAX_RETRIES};
use crate::llm::{ChatClient, Client, ClientPolicy};
use crate::pipeline::Pipeline;
use crate::router::{ExecOptions, RouterBackend, SolverRegistry};
use crate::types::ReasoningType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecomposerKind {
    #[default]
    Heuristic,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouterKind {
    #[default]
    Types,
    Random,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormalizerKind {
    #[default]
    Template,
    Llm,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposerConfig {
    pub backend: DecomposerKind,
    /// Cue file replacing the bundled one.
    pub cues: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RouterConfig {
    pub backend: RouterKind,
    pub seed: u64,
    /// Register the language-model solver for problems with no typed solver.
    pub neural_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormalizerConfig {
    pub backend: FormalizerKind,
    pub max_retries: u32,
}

impl Default for FormalizerConfig {
    fn default() -> Self {
        FormalizerConfig { backend: FormalizerKind::Template, max_retries: DEFAULT_MAX_RETRIES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecConfig {
    pub node_timeout_secs: f64,
    pub jobs: usize,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig { node_timeout_secs: 10.0, jobs: 1 }
    }
}

/// An external engine: a named preset or a full description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ExternalBlock {
    Preset { preset: String },
    Custom(ExternalEngine),
}

impl ExternalBlock {
    pub fn engine(&self) -> Result<ExternalEngine, ConfigError> {
        match self {
            ExternalBlock::Preset { preset } => ExternalEngine::preset(preset)
                .ok_or_else(|| ConfigError::Invalid(format!("unknown external engine preset `{preset}`"))),
            ExternalBlock::Custom(e) => Ok(e.clone()),
        }
    }
}

pub fn engine_type(kind: EngineKind) -> ReasoningType {
    match kind {
        EngineKind::LpEngine => ReasoningType::Lp,
        EngineKind::FolProver => ReasoningType::Fol,
        EngineKind::CspEngine => ReasoningType::Csp,
        EngineKind::SmtEngine => ReasoningType::Smt,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub decomposer: DecomposerConfig,
    pub router: RouterConfig,
    pub formalizer: FormalizerConfig,
    pub answer: AnswerPolicy,
    pub limits: EngineLimits,
    pub execution: ExecConfig,
    pub llm: ClientPolicy,
    pub external: Vec<ExternalBlock>,
    pub seeds: Vec<u64>,
    pub datasets: Vec<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            decomposer: DecomposerConfig::default(),
            router: RouterConfig::default(),
            formalizer: FormalizerConfig::default(),
            answer: AnswerPolicy::default(),
            limits: EngineLimits::default(),
            execution: ExecConfig::default(),
            llm: ClientPolicy::default(),
            external: Vec::new(),
            seeds: vec![1, 2, 3],
            datasets: Vec::new(),
            output_dir: PathBuf::from("runs"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let cfg = Self::from_toml(&text).map_err(|source| ConfigError::Toml { path: path.to_path_buf(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.limits.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.execution.jobs == 0 {
            return Err(ConfigError::Invalid("execution.jobs must be at least 1".into()));
        }
        if !(self.execution.node_timeout_secs.is_finite() && self.execution.node_timeout_secs > 0.0) {
            return Err(ConfigError::Invalid("execution.node_timeout_secs must be positive".into()));
        }
        let mut seen = BTreeMap::new();
        for block in &self.external {
            let e = block.engine()?;
            for p in &e.patterns {
                regex::Regex::new(&p.regex)
                    .map_err(|err| ConfigError::Invalid(format!("external engine pattern `{}`: {err}", p.regex)))?;
            }
            if seen.insert(engine_type(e.kind), ()).is_some() {
                return Err(ConfigError::Invalid(format!("two external engines for {}", engine_type(e.kind))));
            }
        }
        Ok(())
    }

    fn needs_llm(&self) -> bool {
        self.decomposer.backend == DecomposerKind::Llm
            || self.router.backend == RouterKind::Llm
            || self.formalizer.backend == FormalizerKind::Llm
            || self.router.neural_fallback
    }

    /// Builds the pipeline; `client` replaces the HTTP client when given.
    pub fn pipeline_with(&self, client: Option<Arc<dyn ChatClient>>) -> Result<Pipeline, ConfigError> {
        self.validate()?;
        let client: Option<Arc<dyn ChatClient>> = match client {
            Some(c) => Some(c),
            None if self.needs_llm() => Some(Arc::new(
                Client::from_env(self.llm.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))?,
            )),
            None => None,
        };
        let llm = || client.clone().expect("client built when a backend needs it");
        let decomposer = match self.decomposer.backend {
            DecomposerKind::Heuristic => match &self.decomposer.cues {
                Some(p) => DecomposerBackend::Heuristic(Cues::load(p).map_err(|e| ConfigError::Invalid(e.to_string()))?),
                None => DecomposerBackend::default(),
            },
            DecomposerKind::Llm => DecomposerBackend::LanguageModel { client: llm() },
        };
        let router = match self.router.backend {
            RouterKind::Types => RouterBackend::Types,
            RouterKind::Random => RouterBackend::Random { seed: self.router.seed },
            RouterKind::Llm => RouterBackend::LanguageModel { client: llm() },
        };
        let formalizer = match self.formalizer.backend {
            FormalizerKind::Template => FormalizerBackend::Template,
            FormalizerKind::Llm => FormalizerBackend::LanguageModel { client: llm(), max_retries: self.formalizer.max_retries },
        };
        let mut external = BTreeMap::new();
        for block in &self.external {
            let e = block.engine()?;
            external.insert(engine_type(e.kind), e);
        }
        let mut registry = SolverRegistry::builtin(formalizer, self.limits.clone(), self.answer, &external);
        if self.router.neural_fallback {
            registry.neural_fallback(llm());
        }
        Ok(Pipeline {
            decomposer,
            router,
            registry,
            exec: ExecOptions {
                node_timeout: Duration::from_secs_f64(self.execution.node_timeout_secs),
                jobs: self.execution.jobs,
            },
        })
    }

    pub fn pipeline(&self) -> Result<Pipeline, ConfigError> {
        self.pipeline_with(None)
    }
}
