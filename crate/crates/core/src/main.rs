use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use polyreason::config::RunConfig;
use polyreason::harness::{
    batch_multi, evaluate, mix, read_jsonl, run_items, summarize_seeds, to_jsonl, write_atomic, Dataset, EvalItem,
    EvalReport, Instance,
};
use polyreason::logiclang::Language;
use polyreason::pipeline::{Pipeline, RunOutcome};
use polyreason::router::RouterBackend;
use polyreason::trace::now_ms;
use polyreason::types::Answer;

/// Prints a line to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            return Err(fail(format!("cannot write to stdout: {e}")));
        }
    }};
}

#[derive(Parser)]
#[command(name = "polyreason", version, about = "Decompose, route, formalize and solve reasoning problems")]
struct Cli {
    /// TOML run configuration; defaults are fully offline.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    LpChain,
    LpOpen,
    Fol,
    Csp,
    Smt,
    /// All five shapes at their standard sizes plus the mixed set.
    Standard,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lang {
    Lp,
    Fol,
    Csp,
    Smt,
}

#[derive(Subcommand)]
enum Command {
    /// Answer the problem in INPUT (or stdin).
    Solve {
        input: Option<PathBuf>,
        /// Trace file; defaults to a timestamped file in the output directory.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        no_trace: bool,
    },
    /// Write a synthetic dataset.
    Gen {
        generator: Generator,
        #[arg(long, default_value_t = 5)]
        hops: usize,
        #[arg(long, default_value_t = 7)]
        objects: usize,
        /// Instance count; defaults to the standard size of the shape.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file, or directory for `standard`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the pipeline over datasets and write a report.
    Eval {
        /// Dataset files; defaults to the config's datasets.
        datasets: Vec<PathBuf>,
        /// Number of seeds to run (taken from the config, then 1, 2, 3, ...).
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Group questions into multi-question inputs of this size.
        #[arg(long)]
        batch: Option<usize>,
        /// Use at most this many instances per seed.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_trace: bool,
    },
    /// Parse a formal program and print diagnostics.
    Check {
        file: PathBuf,
        #[arg(long)]
        lang: Lang,
    },
    /// Print the routing plan for INPUT (or stdin).
    Route { input: Option<PathBuf> },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn fail(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn read_input(input: &Option<PathBuf>) -> Result<String, Failure> {
    match input {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| fail(format!("cannot read {}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| fail(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    write_atomic(path, contents).map_err(|e| fail(format!("cannot write {}: {e}", path.display())))
}

fn answer_line(out: &RunOutcome, index: usize) -> String {
    let (id, answer) = &out.answers[index];
    let text = match answer {
        Answer::Label(l) => {
            let option = out.input.as_ref().and_then(|i| i.get(id)).and_then(|q| q.option(l));
            option.map_or_else(|| l.clone(), ToString::to_string)
        }
        Answer::Unknown => "Unknown".to_string(),
    };
    if out.answers.len() == 1 {
        text
    } else {
        format!("Q{}: {text}", id.index())
    }
}

fn cmd_solve(cfg: &RunConfig, input: &Option<PathBuf>, trace: &Option<PathBuf>, no_trace: bool) -> Result<u8, Failure> {
    let pipeline = cfg.pipeline().map_err(|e| fail(e.to_string()))?;
    let text = read_input(input)?;
    let out = pipeline.run(&text);
    for i in 0..out.answers.len() {
        out!("{}", answer_line(&out, i));
    }
    if !no_trace {
        let path = trace.clone().unwrap_or_else(|| cfg.output_dir.join(format!("trace-{}.json", now_ms())));
        write(&path, &serde_json::to_string_pretty(&out.trace).expect("trace serializes"))?;
        eprintln!("trace written to {}", path.display());
    }
    if out.answers.is_empty() {
        eprintln!("no problems could be extracted from the input");
        return Ok(2);
    }
    Ok(if out.complete() { 0 } else { 2 })
}

fn generate(generator: Generator, hops: usize, objects: usize, n: Option<usize>, seed: u64) -> Result<Vec<Instance>, Failure> {
    let dataset = match generator {
        Generator::LpChain => Dataset::LpChain { hops },
        Generator::LpOpen => Dataset::LpOpen,
        Generator::Fol => Dataset::Fol,
        Generator::Csp => Dataset::Csp { objects },
        Generator::Smt => Dataset::Smt,
        Generator::Standard => unreachable!("handled by the caller"),
    };
    let default_n = Dataset::STANDARD
        .iter()
        .find(|(d, _)| std::mem::discriminant(d) == std::mem::discriminant(&dataset))
        .map_or(100, |(_, n)| *n);
    dataset.generate(n.unwrap_or(default_n), seed).map_err(|e| fail(e.to_string()))
}

fn cmd_gen(generator: Generator, hops: usize, objects: usize, n: Option<usize>, seed: u64, out: &Path) -> Result<u8, Failure> {
    if let Generator::Standard = generator {
        let mut all = Vec::new();
        for (d, size) in Dataset::STANDARD {
            let set = d.generate(n.unwrap_or(size), seed).map_err(|e| fail(e.to_string()))?;
            let path = out.join(format!("{}.jsonl", d.name()));
            write(&path, &to_jsonl(&set))?;
            eprintln!("{} instances written to {}", set.len(), path.display());
            all.push(set);
        }
        let mixed = mix(&all, seed);
        let path = out.join("mixed.jsonl");
        write(&path, &to_jsonl(&mixed))?;
        eprintln!("{} instances written to {}", mixed.len(), path.display());
        return Ok(0);
    }
    let set = generate(generator, hops, objects, n, seed)?;
    write(out, &to_jsonl(&set))?;
    eprintln!("{} instances written to {}", set.len(), out.display());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    cfg: &RunConfig,
    datasets: &[PathBuf],
    seeds: usize,
    jobs: usize,
    batch: Option<usize>,
    limit: Option<usize>,
    out: &Option<PathBuf>,
    no_trace: bool,
) -> Result<u8, Failure> {
    let paths = if datasets.is_empty() { cfg.datasets.clone() } else { datasets.to_vec() };
    if paths.is_empty() {
        return Err(fail("no dataset given"));
    }
    let mut sets = Vec::new();
    for p in &paths {
        sets.push(read_jsonl::<Instance>(p).map_err(|e| fail(format!("{}: {e}", p.display())))?);
    }
    let base = cfg.pipeline().map_err(|e| fail(e.to_string()))?;
    let seed_list: Vec<u64> = cfg.seeds.iter().copied().chain(1..).take(seeds.max(1)).collect();
    let out_dir = out.clone().unwrap_or_else(|| cfg.output_dir.join(format!("eval-{}", now_ms())));
    let mut reports: Vec<(u64, EvalReport)> = Vec::new();
    for &seed in &seed_list {
        let mut pipeline: Pipeline = base.clone();
        if let RouterBackend::Random { .. } = pipeline.router {
            pipeline.router = RouterBackend::Random { seed };
        }
        let mut mixed = mix(&sets, seed);
        if let Some(l) = limit {
            mixed.truncate(l);
        }
        let items: Vec<EvalItem> = match batch {
            Some(k) if k > 1 => batch_multi(&mixed, k, seed).iter().map(EvalItem::batch).collect(),
            _ => mixed.iter().map(EvalItem::single).collect(),
        };
        let results = run_items(&pipeline, &items, jobs);
        let report = evaluate(&results, &items).map_err(|e| fail(e.to_string()))?;
        out!("seed {seed}\n{}", report.to_table());
        write(&out_dir.join(format!("report-{seed}.json")), &serde_json::to_string_pretty(&report).expect("report serializes"))?;
        write(&out_dir.join(format!("report-{seed}.txt")), &report.to_table())?;
        if !no_trace {
            write(&out_dir.join(format!("runs-{seed}.jsonl")), &to_jsonl(&results))?;
        }
        reports.push((seed, report));
    }
    let refs: Vec<(u64, &EvalReport)> = reports.iter().map(|(s, r)| (*s, r)).collect();
    let summary = summarize_seeds(&refs);
    out!(
        "accuracy over {} seed(s): mean {:.4}, std {:.4}; routing mean {:.4}",
        summary.seeds.len(),
        summary.mean,
        summary.std,
        summary.routing_mean
    );
    write(&out_dir.join("summary.json"), &serde_json::to_string_pretty(&summary).expect("summary serializes"))?;
    eprintln!("reports written to {}", out_dir.display());
    Ok(0)
}

fn cmd_check(file: &Path, lang: Lang) -> Result<u8, Failure> {
    let bytes = std::fs::read(file).map_err(|e| fail(format!("cannot read {}: {e}", file.display())))?;
    let language = match lang {
        Lang::Lp => Language::Lp,
        Lang::Fol => Language::Fol,
        Lang::Csp => Language::Csp,
        Lang::Smt => Language::Smt,
    };
    match language.parse_bytes(&bytes) {
        Ok(_) => {
            out!("{}: ok", file.display());
            Ok(0)
        }
        Err(diags) => {
            out!("{diags}");
            Ok(2)
        }
    }
}

fn cmd_route(cfg: &RunConfig, input: &Option<PathBuf>) -> Result<u8, Failure> {
    let pipeline = cfg.pipeline().map_err(|e| fail(e.to_string()))?;
    let planned = pipeline.plan(&read_input(input)?);
    let Some(routing) = planned.routing else {
        let reason = planned.trace.decomposition.and_then(|d| d.error).unwrap_or_default();
        eprintln!("decomposition failed: {reason}");
        return Ok(2);
    };
    match routing.plan {
        Some(plan) => {
            out!("{}", serde_json::to_string_pretty(&plan.to_wire()).expect("plan serializes"));
            Ok(0)
        }
        None => {
            for v in &routing.record.violations {
                eprintln!("plan violation: {v}");
            }
            Ok(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    };
    let result = cfg.map_err(|e| fail(e.to_string())).and_then(|cfg| match &cli.command {
        Command::Solve { input, trace, no_trace } => cmd_solve(&cfg, input, trace, *no_trace),
        Command::Gen { generator, hops, objects, n, seed, out } => cmd_gen(*generator, *hops, *objects, *n, *seed, out),
        Command::Eval { datasets, seeds, jobs, batch, limit, out, no_trace } => {
            cmd_eval(&cfg, datasets, *seeds, *jobs, *batch, *limit, out, *no_trace)
        }
        Command::Check { file, lang } => cmd_check(file, *lang),
        Command::Route { input } => cmd_route(&cfg, input),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
