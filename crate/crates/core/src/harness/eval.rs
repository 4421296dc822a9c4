//! Running pipelines over datasets and scoring the results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::render::Batch;
use super::Instance;
use crate::pipeline::Pipeline;
use crate::taxonomy::{classify_slot, ErrorCategory};
use crate::trace::RunTrace;
use crate::types::{Answer, ProblemId, ReasoningType};

/// Gold data for one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotGold {
    pub instance_id: String,
    pub dataset: String,
    pub gold_type: ReasoningType,
    pub gold_answer: String,
}

impl SlotGold {
    pub fn of(i: &Instance) -> Self {
        SlotGold {
            instance_id: i.id.clone(),
            dataset: i.provenance.generator.clone(),
            gold_type: i.gold_type,
            gold_answer: i.gold_answer.clone(),
        }
    }
}

/// One pipeline input with the gold data of each question in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalItem {
    pub id: String,
    pub text: String,
    pub slots: Vec<SlotGold>,
}

impl EvalItem {
    pub fn single(i: &Instance) -> Self {
        EvalItem { id: i.id.clone(), text: i.nl_text.clone(), slots: vec![SlotGold::of(i)] }
    }

    pub fn batch(b: &Batch) -> Self {
        EvalItem { id: b.id.clone(), text: b.nl_text.clone(), slots: b.slots.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub id: String,
    pub answers: Vec<(ProblemId, Answer)>,
    pub trace: RunTrace,
    pub elapsed_ms: u64,
}

impl RunResult {
    pub fn answer(&self, slot: usize) -> &Answer {
        let id = ProblemId::new(slot + 1);
        self.answers.iter().find(|(p, _)| *p == id).map_or(&Answer::Unknown, |(_, a)| a)
    }
}

/// Runs every item through `pipeline`, `jobs` at a time. Results keep the
/// order of `items`.
pub fn run_items(pipeline: &Pipeline, items: &[EvalItem], jobs: usize) -> Vec<RunResult> {
    let run = |item: &EvalItem| {
        let started = Instant::now();
        let out = pipeline.run(&item.text);
        RunResult { id: item.id.clone(), answers: out.answers, trace: out.trace, elapsed_ms: started.elapsed().as_millis() as u64 }
    };
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(run).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunResult>>> = Mutex::new(vec![None; items.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = run(item);
                slots.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap_or_else(|e| e.into_inner()).into_iter().map(|r| r.expect("every item ran")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{results} results for {items} items")]
    LengthMismatch { results: usize, items: usize },
    #[error("result {index} is for `{result}` but the item is `{item}`")]
    IdMismatch { index: usize, result: String, item: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetScore {
    pub name: String,
    pub questions: usize,
    pub correct: usize,
    pub routed: usize,
    pub accuracy: f64,
    pub routing_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub total_ms: u64,
    pub mean_ms: f64,
    pub max_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub runs: usize,
    pub questions: usize,
    pub correct: usize,
    /// Runs whose every question was answered correctly.
    pub runs_all_correct: usize,
    pub datasets: Vec<DatasetScore>,
    /// Accuracy over all questions of all datasets.
    pub mixed_accuracy: f64,
    pub routing_accuracy: f64,
    /// Share of runs with every question correct.
    pub overall_accuracy: f64,
    /// Failure category of each wrong answer.
    pub errors: BTreeMap<ErrorCategory, usize>,
    pub runtime: RuntimeStats,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn evaluate(results: &[RunResult], items: &[EvalItem]) -> Result<EvalReport, EvalError> {
    if results.len() != items.len() {
        return Err(EvalError::LengthMismatch { results: results.len(), items: items.len() });
    }
    let mut per: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    let mut errors: BTreeMap<ErrorCategory, usize> = ErrorCategory::ALL.into_iter().map(|c| (c, 0)).collect();
    let (mut questions, mut correct, mut routed, mut all_correct) = (0, 0, 0, 0);
    for (index, (r, item)) in results.iter().zip(items).enumerate() {
        if r.id != item.id {
            return Err(EvalError::IdMismatch { index, result: r.id.clone(), item: item.id.clone() });
        }
        let mut every = true;
        for (slot, gold) in item.slots.iter().enumerate() {
            let id = ProblemId::new(slot + 1);
            let ok = r.answer(slot).label() == Some(gold.gold_answer.as_str());
            let route_ok = r.trace.plan.as_ref().and_then(|p| p.route_for(&id)) == Some(gold.gold_type.solver_name());
            let e = per.entry(gold.dataset.clone()).or_default();
            e.0 += 1;
            e.1 += usize::from(ok);
            e.2 += usize::from(route_ok);
            questions += 1;
            correct += usize::from(ok);
            routed += usize::from(route_ok);
            if !ok {
                every = false;
                let cat = classify_slot(&r.trace, &id, Some(gold.gold_type), Some(&gold.gold_answer))
                    .unwrap_or(ErrorCategory::SemanticError);
                *errors.entry(cat).or_default() += 1;
            }
        }
        all_correct += usize::from(every && !item.slots.is_empty());
    }
    let total_ms: u64 = results.iter().map(|r| r.elapsed_ms).sum();
    Ok(EvalReport {
        runs: results.len(),
        questions,
        correct,
        runs_all_correct: all_correct,
        datasets: per
            .into_iter()
            .map(|(name, (q, c, r))| DatasetScore {
                name,
                questions: q,
                correct: c,
                routed: r,
                accuracy: ratio(c, q),
                routing_accuracy: ratio(r, q),
            })
            .collect(),
        mixed_accuracy: ratio(correct, questions),
        routing_accuracy: ratio(routed, questions),
        overall_accuracy: ratio(all_correct, results.len()),
        errors,
        runtime: RuntimeStats {
            total_ms,
            mean_ms: if results.is_empty() { 0.0 } else { total_ms as f64 / results.len() as f64 },
            max_ms: results.iter().map(|r| r.elapsed_ms).max().unwrap_or(0),
        },
    })
}

impl EvalReport {
    /// Fixed-width summary with a text histogram of error categories.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {:>9} {:>9} {:>9} {:>9}", "dataset", "questions", "correct", "accuracy", "routing");
        for d in &self.datasets {
            let _ = writeln!(
                out,
                "{:<16} {:>9} {:>9} {:>9.4} {:>9.4}",
                d.name, d.questions, d.correct, d.accuracy, d.routing_accuracy
            );
        }
        let _ = writeln!(
            out,
            "{:<16} {:>9} {:>9} {:>9.4} {:>9.4}",
            "mixed", self.questions, self.correct, self.mixed_accuracy, self.routing_accuracy
        );
        let _ = writeln!(out, "overall accuracy {:.4} ({} of {} runs)", self.overall_accuracy, self.runs_all_correct, self.runs);
        let _ = writeln!(out, "runtime total {} ms, mean {:.1} ms, max {} ms", self.runtime.total_ms, self.runtime.mean_ms, self.runtime.max_ms);
        let _ = writeln!(out, "errors");
        let widest = self.errors.values().copied().max().unwrap_or(0).max(1);
        for (cat, n) in &self.errors {
            let bar = "#".repeat((n * 40).div_ceil(widest));
            let _ = writeln!(out, "  {:<24} {:>6} {bar}", cat.as_str(), n);
        }
        out
    }
}

/// Accuracy spread over repeated runs with different seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seeds: Vec<u64>,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub routing_mean: f64,
}

pub fn summarize_seeds(runs: &[(u64, &EvalReport)]) -> SeedSummary {
    let n = runs.len().max(1) as f64;
    let accuracies: Vec<f64> = runs.iter().map(|(_, r)| r.mixed_accuracy).collect();
    let mean = accuracies.iter().sum::<f64>() / n;
    let var = accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    SeedSummary {
        seeds: runs.iter().map(|(s, _)| *s).collect(),
        accuracies,
        mean,
        std: var.sqrt(),
        routing_mean: runs.iter().map(|(_, r)| r.routing_accuracy).sum::<f64>() / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{batch_multi, gen_csp_ordering, gen_lp_chain, gen_smt_eligibility, mix};
    use crate::trace::PlanRecord;

    fn fake(item: &EvalItem, right: &[bool]) -> RunResult {
        let mut trace = RunTrace::new(&item.text);
        trace.record_plan(PlanRecord {
            backend: "types".into(),
            raw_output: None,
            plan_json: Some("{}".into()),
            violations: vec![],
            routes: item
                .slots
                .iter()
                .enumerate()
                .map(|(i, s)| (ProblemId::new(i + 1), Some(s.gold_type.solver_name().to_string())))
                .collect(),
            at_ms: 0,
        });
        let answers = item
            .slots
            .iter()
            .zip(right)
            .enumerate()
            .map(|(i, (s, ok))| (ProblemId::new(i + 1), Answer::Label(if *ok { s.gold_answer.clone() } else { "Z)".into() })))
            .collect();
        RunResult { id: item.id.clone(), answers, trace, elapsed_ms: 1 }
    }

    fn mixed() -> Vec<Instance> {
        mix(&[gen_lp_chain(2, 3, 1).unwrap(), gen_csp_ordering(3, 3, 1).unwrap(), gen_smt_eligibility(3, 1).unwrap()], 3)
    }

    #[test]
    fn two_of_three_is_not_overall_correct() {
        let items: Vec<EvalItem> = batch_multi(&mixed(), 3, 1).iter().map(EvalItem::batch).collect();
        let results: Vec<RunResult> = items.iter().map(|it| fake(it, &[true, false, true])).collect();
        let r = evaluate(&results, &items).unwrap();
        assert_eq!(r.overall_accuracy, 0.0);
        assert_eq!(r.routing_accuracy, 1.0);
        assert_eq!(r.correct, 6);
        assert_eq!(r.errors.values().sum::<usize>() + r.correct, r.questions);
    }

    #[test]
    fn misaligned_inputs_are_rejected() {
        let items: Vec<EvalItem> = mixed().iter().map(EvalItem::single).collect();
        let results: Vec<RunResult> = items.iter().map(|it| fake(it, &[true])).collect();
        assert!(matches!(evaluate(&results[1..], &items), Err(EvalError::LengthMismatch { .. })));
        let mut swapped = results.clone();
        swapped.swap(0, 1);
        assert!(matches!(evaluate(&swapped, &items), Err(EvalError::IdMismatch { index: 0, .. })));
        let r = evaluate(&results, &items).unwrap();
        assert_eq!(r.mixed_accuracy, 1.0);
        assert_eq!(r.overall_accuracy, 1.0);
        assert!(r.to_table().contains("mixed"));
    }

    #[test]
    fn offline_pipeline_scores_generated_sets() {
        let items: Vec<EvalItem> = mixed().iter().map(EvalItem::single).collect();
        let results = run_items(&Pipeline::offline(), &items, 3);
        let r = evaluate(&results, &items).unwrap();
        assert_eq!(r.mixed_accuracy, 1.0, "{}", r.to_table());
        assert_eq!(r.routing_accuracy, 1.0);
    }

    #[test]
    fn seed_summary() {
        let items: Vec<EvalItem> = mixed().iter().map(EvalItem::single).collect();
        let all: Vec<RunResult> = items.iter().map(|it| fake(it, &[true])).collect();
        let half: Vec<RunResult> = items.iter().enumerate().map(|(i, it)| fake(it, &[i % 3 != 0])).collect();
        let (a, b) = (evaluate(&all, &items).unwrap(), evaluate(&half, &items).unwrap());
        let s = summarize_seeds(&[(1, &a), (2, &b)]);
        assert!((s.mean - (1.0 + b.mixed_accuracy) / 2.0).abs() < 1e-12);
        assert!((s.std - (1.0 - b.mixed_accuracy) / 2.0).abs() < 1e-12);
    }
}
