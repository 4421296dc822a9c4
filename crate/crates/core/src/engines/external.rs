//! Adapter for external solver binaries: spawn, enforce a timeout, and map the
//! output to a verdict through a regex table.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::{Arc, Mutex, OnceLock};
use std::thread;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use crate::logiclang::fol::{FolProgram, Formula, Term};
use crate::logiclang::{parse_csp, parse_fol};
use crate::types::{Assignment, SolverVerdict};

use super::EngineLimits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    LpEngine,
    FolProver,
    CspEngine,
    SmtEngine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternVerdict {
    Proved,
    Disproved,
    Unknown,
    Sat,
    Unsat,
    /// Marks the solution stream of a constraint engine as exhausted.
    SolutionsComplete,
    /// The model has no solutions.
    NoSolutions,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPattern {
    pub regex: String,
    pub verdict: PatternVerdict,
}

impl OutputPattern {
    fn new(regex: &str, verdict: PatternVerdict) -> Self {
        OutputPattern { regex: regex.to_string(), verdict }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalEngine {
    pub kind: EngineKind,
    pub path: PathBuf,
    /// Arguments; `{input}` is replaced by a temporary file holding the
    /// program. Without the placeholder the program is written to stdin.
    pub args: Vec<String>,
    #[serde(default = "default_extension")]
    pub file_extension: String,
    /// Overrides the engine-limits timeout, in seconds.
    #[serde(default)]
    pub timeout_secs: Option<f64>,
    /// Tried in order against stdout; the first match decides.
    pub patterns: Vec<OutputPattern>,
    /// When false, calls to the same executable are serialized.
    #[serde(default = "default_true")]
    pub reentrant: bool,
}

fn default_extension() -> String {
    "txt".into()
}

fn default_true() -> bool {
    true
}

impl ExternalEngine {
    pub fn z3() -> Self {
        ExternalEngine {
            kind: EngineKind::SmtEngine,
            path: "z3".into(),
            args: vec!["-smt2".into(), "{input}".into()],
            file_extension: "smt2".into(),
            timeout_secs: None,
            patterns: vec![
                OutputPattern::new(r"(?m)^\s*unsat\s*$", PatternVerdict::Unsat),
                OutputPattern::new(r"(?m)^\s*sat\s*$", PatternVerdict::Sat),
                OutputPattern::new(r"(?m)^\s*unknown\s*$", PatternVerdict::Unknown),
                OutputPattern::new(r"\(error ", PatternVerdict::Error),
            ],
            reentrant: true,
        }
    }

    pub fn minizinc() -> Self {
        ExternalEngine {
            kind: EngineKind::CspEngine,
            path: "minizinc".into(),
            args: vec!["--all-solutions".into(), "{input}".into()],
            file_extension: "mzn".into(),
            timeout_secs: None,
            patterns: vec![
                OutputPattern::new(r"=====UNSATISFIABLE=====", PatternVerdict::NoSolutions),
                OutputPattern::new(r"(?m)^==========\s*$", PatternVerdict::SolutionsComplete),
                OutputPattern::new(r"(?i)error", PatternVerdict::Error),
            ],
            reentrant: true,
        }
    }

    /// Programs are translated to the prover's input syntax before the call.
    pub fn prover9() -> Self {
        ExternalEngine {
            kind: EngineKind::FolProver,
            path: "prover9".into(),
            args: vec!["-f".into(), "{input}".into()],
            file_extension: "in".into(),
            timeout_secs: None,
            patterns: vec![
                OutputPattern::new(r"THEOREM PROVED", PatternVerdict::Proved),
                OutputPattern::new(r"SEARCH FAILED", PatternVerdict::Unknown),
                OutputPattern::new(r"%%ERROR|Fatal error", PatternVerdict::Error),
            ],
            reentrant: true,
        }
    }

    /// Expects a user-supplied wrapper that runs a rule engine on the program
    /// and prints `PROVED`, `DISPROVED` or `UNKNOWN`.
    pub fn pyke_wrapper() -> Self {
        ExternalEngine {
            kind: EngineKind::LpEngine,
            path: "pyke-run".into(),
            args: vec!["{input}".into()],
            file_extension: "lp".into(),
            timeout_secs: None,
            patterns: vec![
                OutputPattern::new(r"(?m)^DISPROVED\b", PatternVerdict::Disproved),
                OutputPattern::new(r"(?m)^PROVED\b", PatternVerdict::Proved),
                OutputPattern::new(r"(?m)^UNKNOWN\b", PatternVerdict::Unknown),
            ],
            reentrant: true,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "z3" => Some(Self::z3()),
            "minizinc" => Some(Self::minizinc()),
            "prover9" => Some(Self::prover9()),
            "pyke" => Some(Self::pyke_wrapper()),
            _ => None,
        }
    }

    /// Resolves the executable against `PATH` when it has no directory part.
    pub fn resolve_path(&self) -> Option<PathBuf> {
        if self.path.components().count() > 1 {
            return self.path.is_file().then(|| self.path.clone());
        }
        let paths = std::env::var_os("PATH")?;
        std::env::split_paths(&paths).map(|d| d.join(&self.path)).find(|p| p.is_file())
    }

    pub fn is_available(&self) -> bool {
        self.resolve_path().is_some()
    }
}

/// Renders a first-order program in the input syntax of Prover9-style provers.
pub fn to_prover9(premises: &[Formula], goal: &Formula) -> String {
    fn term(t: &Term) -> String {
        t.name().to_string()
    }
    fn f(x: &Formula) -> String {
        match x {
            Formula::Atom { predicate, args } => {
                let args: Vec<String> = args.iter().map(term).collect();
                format!("{}({})", predicate, args.join(", "))
            }
            Formula::Not(g) => format!("-({})", f(g)),
            Formula::And(a, b) => format!("({} & {})", f(a), f(b)),
            Formula::Or(a, b) => format!("({} | {})", f(a), f(b)),
            Formula::Implies(a, b) => format!("({} -> {})", f(a), f(b)),
            Formula::Iff(a, b) => format!("({} <-> {})", f(a), f(b)),
            Formula::Forall(v, g) => format!("(all {} {})", v, f(g)),
            Formula::Exists(v, g) => format!("(exists {} {})", v, f(g)),
        }
    }
    let mut out = String::from("formulas(assumptions).\n");
    for p in premises {
        out.push_str(&format!("  {}.\n", f(p)));
    }
    out.push_str("end_of_list.\n\nformulas(goals).\n");
    out.push_str(&format!("  {}.\nend_of_list.\n", f(goal)));
    out
}

fn exec_locks() -> &'static Mutex<HashMap<PathBuf, Arc<Mutex<()>>>> {
    static LOCKS: OnceLock<Mutex<HashMap<PathBuf, Arc<Mutex<()>>>>> = OnceLock::new();
    LOCKS.get_or_init(Default::default)
}

struct RawOutput {
    stdout: String,
    stderr: String,
    success: bool,
}

fn spawn(engine: &ExternalEngine, exe: &Path, program: &str, timeout: Duration) -> Result<RawOutput, String> {
    let uses_file = engine.args.iter().any(|a| a.contains("{input}"));
    let file = if uses_file {
        let mut f = tempfile::Builder::new()
            .suffix(&format!(".{}", engine.file_extension))
            .tempfile()
            .map_err(|e| format!("cannot create temporary file: {e}"))?;
        f.write_all(program.as_bytes()).map_err(|e| format!("cannot write temporary file: {e}"))?;
        Some(f)
    } else {
        None
    };
    let args: Vec<String> = engine
        .args
        .iter()
        .map(|a| match &file {
            Some(f) => a.replace("{input}", &f.path().to_string_lossy()),
            None => a.clone(),
        })
        .collect();
    let mut child = Command::new(exe)
        .args(&args)
        .stdin(if uses_file { Stdio::null() } else { Stdio::piped() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("cannot start {}: {e}", exe.display()))?;
    if let Some(mut stdin) = child.stdin.take() {
        let text = program.to_string();
        thread::spawn(move || {
            let _ = stdin.write_all(text.as_bytes());
        });
    }
    let mut out_pipe = child.stdout.take().expect("piped");
    let mut err_pipe = child.stderr.take().expect("piped");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = out_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });
    let status = match child.wait_timeout(timeout).map_err(|e| format!("wait failed: {e}"))? {
        Some(status) => status,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(format!("timeout after {:.1}s", timeout.as_secs_f64()));
        }
    };
    Ok(RawOutput {
        stdout: out_reader.join().unwrap_or_default(),
        stderr: err_reader.join().unwrap_or_default(),
        success: status.success(),
    })
}

fn first_match(engine: &ExternalEngine, text: &str) -> Result<Option<PatternVerdict>, String> {
    for p in &engine.patterns {
        let re = Regex::new(&p.regex).map_err(|e| format!("bad output pattern `{}`: {e}", p.regex))?;
        if re.is_match(text) {
            return Ok(Some(p.verdict));
        }
    }
    Ok(None)
}

fn error_detail(raw: &RawOutput) -> String {
    let stderr = raw.stderr.trim();
    if stderr.is_empty() {
        raw.stdout.trim().to_string()
    } else {
        stderr.to_string()
    }
}

/// Parses `name = [..];` / `name = v;` blocks separated by `----------`.
fn parse_solutions(stdout: &str, member_names: &HashMap<String, Vec<String>>) -> Vec<Assignment> {
    let array_re = Regex::new(r"(\w+)\s*=\s*(?:array1d\([^,]*,\s*)?\[([^\]]*)\]").expect("valid regex");
    let scalar_re = Regex::new(r"(?m)^\s*(\w+)\s*=\s*(-?\d+)\s*;").expect("valid regex");
    let mut out = Vec::new();
    for block in stdout.split("----------") {
        if block.contains("==========") && !array_re.is_match(block) && !scalar_re.is_match(block) {
            continue;
        }
        let mut pairs = Vec::new();
        for cap in array_re.captures_iter(block) {
            let name = &cap[1];
            let values: Vec<i64> = cap[2].split(',').filter_map(|v| v.trim().parse().ok()).collect();
            for (k, v) in values.into_iter().enumerate() {
                let idx = member_names.get(name).and_then(|m| m.get(k).cloned()).unwrap_or_else(|| (k + 1).to_string());
                pairs.push((format!("{name}[{idx}]"), v));
            }
        }
        for cap in scalar_re.captures_iter(block) {
            if let Ok(v) = cap[2].parse() {
                pairs.push((cap[1].to_string(), v));
            }
        }
        if !pairs.is_empty() {
            out.push(Assignment(pairs));
        }
    }
    out.sort_by(|a, b| a.0.iter().map(|p| p.1).cmp(b.0.iter().map(|p| p.1)));
    out
}

fn run_once(engine: &ExternalEngine, exe: &Path, program: &str, timeout: Duration) -> Result<(RawOutput, Option<PatternVerdict>), SolverVerdict> {
    let raw = spawn(engine, exe, program, timeout).map_err(|detail| SolverVerdict::EngineError { detail })?;
    let verdict = first_match(engine, &raw.stdout).map_err(|detail| SolverVerdict::EngineError { detail })?;
    Ok((raw, verdict))
}

/// Runs an external engine on a program and maps its output to a verdict.
pub fn run_external(engine: &ExternalEngine, program_text: &str, limits: &EngineLimits) -> SolverVerdict {
    let Some(exe) = engine.resolve_path() else {
        return SolverVerdict::EngineError { detail: format!("executable `{}` not found", engine.path.display()) };
    };
    let timeout = engine.timeout_secs.and_then(|s| Duration::try_from_secs_f64(s).ok()).unwrap_or(limits.timeout);
    let lock = (!engine.reentrant).then(|| {
        let mut map = exec_locks().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(exe.clone()).or_default().clone()
    });
    let _guard = lock.as_ref().map(|l| l.lock().unwrap_or_else(|e| e.into_inner()));

    match engine.kind {
        EngineKind::FolProver => run_prover(engine, &exe, program_text, timeout),
        EngineKind::CspEngine => {
            let (raw, verdict) = match run_once(engine, &exe, program_text, timeout) {
                Ok(r) => r,
                Err(v) => return v,
            };
            let names: HashMap<String, Vec<String>> = parse_csp(program_text)
                .map(|m| {
                    m.vars
                        .iter()
                        .filter_map(|v| Some((v.name.clone(), m.enum_named(v.index.as_ref()?)?.members.clone())))
                        .collect()
                })
                .unwrap_or_default();
            match verdict {
                Some(PatternVerdict::NoSolutions) => SolverVerdict::Solutions { assignments: vec![], complete: true },
                Some(PatternVerdict::SolutionsComplete) => {
                    let assignments = parse_solutions(&raw.stdout, &names);
                    let complete = assignments.len() <= limits.max_solutions;
                    SolverVerdict::Solutions { assignments: assignments.into_iter().take(limits.max_solutions).collect(), complete }
                }
                Some(PatternVerdict::Error) | None => SolverVerdict::EngineError { detail: error_detail(&raw) },
                Some(other) => SolverVerdict::EngineError { detail: format!("unexpected verdict {other:?} from a constraint engine") },
            }
        }
        EngineKind::LpEngine | EngineKind::SmtEngine => match run_once(engine, &exe, program_text, timeout) {
            Err(v) => v,
            Ok((raw, verdict)) => map_simple(verdict, &raw),
        },
    }
}

fn map_simple(verdict: Option<PatternVerdict>, raw: &RawOutput) -> SolverVerdict {
    match verdict {
        Some(PatternVerdict::Proved) => SolverVerdict::Proved,
        Some(PatternVerdict::Disproved) => SolverVerdict::Disproved,
        Some(PatternVerdict::Unknown) => SolverVerdict::unknown_with("external engine"),
        Some(PatternVerdict::Sat) => SolverVerdict::Sat,
        Some(PatternVerdict::Unsat) => SolverVerdict::Unsat,
        Some(PatternVerdict::Error) | None => {
            let mut detail = error_detail(raw);
            if detail.is_empty() {
                detail = if raw.success { "unrecognized engine output".into() } else { "engine exited with failure".into() };
            }
            SolverVerdict::EngineError { detail }
        }
        Some(other) => SolverVerdict::EngineError { detail: format!("unexpected verdict {other:?}") },
    }
}

/// Runs the prover on the goal and, failing that, on its negation.
fn run_prover(engine: &ExternalEngine, exe: &Path, program_text: &str, timeout: Duration) -> SolverVerdict {
    let Ok(p): Result<FolProgram, _> = parse_fol(program_text) else {
        // Already in the prover's own syntax: a single run.
        return match run_once(engine, exe, program_text, timeout) {
            Err(v) => v,
            Ok((raw, verdict)) => map_simple(verdict, &raw),
        };
    };
    let premises: Vec<Formula> = p.premises.iter().map(|s| s.formula.clone()).collect();
    let goal = &p.conclusion.formula;
    for (target, on_proof) in [(goal.clone(), SolverVerdict::Proved), (Formula::negate(goal.clone()), SolverVerdict::Disproved)] {
        match run_once(engine, exe, &to_prover9(&premises, &target), timeout) {
            Err(v) => return v,
            Ok((_, Some(PatternVerdict::Proved))) => return on_proof,
            Ok((_, Some(PatternVerdict::Unknown))) => {}
            Ok((raw, _)) => return SolverVerdict::EngineError { detail: error_detail(&raw) },
        }
    }
    SolverVerdict::unknown_with("external prover found no proof")
}

#[cfg(all(test, unix))]
mod tests {
    use super::*;
    use std::os::unix::fs::PermissionsExt;

    fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, format!("#!/bin/sh\n{body}\n")).unwrap();
        std::fs::set_permissions(&p, std::fs::Permissions::from_mode(0o755)).unwrap();
        p
    }

    #[test]
    fn maps_smt_output() {
        let dir = tempfile::tempdir().unwrap();
        let fake = script(dir.path(), "fake-z3", "grep -q 'x 80' \"$2\" && echo unsat || echo sat");
        let engine = ExternalEngine { path: fake, ..ExternalEngine::z3() };
        let limits = EngineLimits::default();
        assert_eq!(run_external(&engine, "(assert (> x 1))", &limits), SolverVerdict::Sat);
        assert_eq!(run_external(&engine, "(assert (> x 80))", &limits), SolverVerdict::Unsat);
    }

    #[test]
    fn stdin_mode_and_error_propagation() {
        let dir = tempfile::tempdir().unwrap();
        let fake = script(dir.path(), "fake", "cat >/dev/null; echo 'syntax error near line 1' >&2; exit 1");
        let engine = ExternalEngine { path: fake, args: vec![], ..ExternalEngine::z3() };
        match run_external(&engine, "garbage", &EngineLimits::default()) {
            SolverVerdict::EngineError { detail } => assert!(detail.contains("syntax error"), "{detail}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn timeout_kills_engine() {
        let dir = tempfile::tempdir().unwrap();
        let fake = script(dir.path(), "slow", "sleep 5; echo sat");
        let engine = ExternalEngine { path: fake, timeout_secs: Some(0.2), reentrant: false, ..ExternalEngine::z3() };
        match run_external(&engine, "x", &EngineLimits::default()) {
            SolverVerdict::EngineError { detail } => assert!(detail.contains("timeout"), "{detail}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_executable() {
        let engine = ExternalEngine { path: "/nonexistent/solver".into(), ..ExternalEngine::z3() };
        assert!(!engine.is_available());
        assert!(matches!(run_external(&engine, "", &EngineLimits::default()), SolverVerdict::EngineError { .. }));
    }

    #[test]
    fn constraint_solutions_are_named_by_enum() {
        let dir = tempfile::tempdir().unwrap();
        let body = "printf 'pos = [1, 2, 5, 4, 3];\\n----------\\n==========\\n'";
        let fake = script(dir.path(), "fake-mzn", body);
        let engine = ExternalEngine { path: fake, ..ExternalEngine::minizinc() };
        let model = crate::logiclang::csp::tests::GOLFERS;
        match run_external(&engine, model, &EngineLimits::default()) {
            SolverVerdict::Solutions { assignments, complete } => {
                assert!(complete);
                assert_eq!(assignments.len(), 1);
                assert_eq!(assignments[0].get("pos[Mel]"), Some(3));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn prover_runs_goal_then_negation() {
        let dir = tempfile::tempdir().unwrap();
        // Proves only goals whose formula list contains a negated conclusion.
        let fake = script(dir.path(), "fake-p9", "if grep -A1 'formulas(goals)' \"$2\" | grep -q '^  -('; then echo 'THEOREM PROVED'; else echo 'SEARCH FAILED'; fi");
        let engine = ExternalEngine { path: fake, ..ExternalEngine::prover9() };
        let text = "Predicates:\nP(x)\nPremises:\n¬P(a)\nConclusion:\nP(a)\n";
        assert_eq!(run_external(&engine, text, &EngineLimits::default()), SolverVerdict::Disproved);
    }

    #[test]
    fn prover9_syntax() {
        let p = parse_fol(crate::logiclang::fol::tests::JOHN).unwrap();
        let premises: Vec<Formula> = p.premises.iter().map(|s| s.formula.clone()).collect();
        let text = to_prover9(&premises, &p.conclusion.formula);
        assert!(text.contains("(all x (Bird(x) -> Wings(x)))."), "{text}");
        assert!(text.contains("formulas(goals).\n  Reptile(john)."), "{text}");
    }
}
