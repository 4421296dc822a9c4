//! Natural-language rendering, dataset mixing and multi-question batches.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eval::SlotGold;
use super::{Instance, Problem};
use crate::decomposer::segment::BATCH_HEADER;
use crate::types::{AnswerOption, ReasoningType};

/// The problem text in the fixed per-type layout.
pub fn render_nl(p: &Problem) -> String {
    let options: Vec<String> = AnswerOption::label_all(&p.options).iter().map(ToString::to_string).collect();
    let options = options.join("\n");
    match p.ty {
        ReasoningType::Lp | ReasoningType::Fol => {
            format!("STATEMENT:\n{}\n\nQUESTION:\n{}\n\n{options}", p.first, p.second)
        }
        ReasoningType::Csp => format!("STATEMENT:\n{}\n\nWhich of the following is true?\n{options}", p.first),
        ReasoningType::Smt => format!(
            "You get a trial and a patient and have to say if there is a match:\n\nTRIAL: {}\n\nPATIENT: {}\n\nDoes the patient match the trial?\nA) True\nB) False",
            p.first, p.second
        ),
    }
}

/// Seeded shuffle of the union of `datasets`.
pub fn mix(datasets: &[Vec<Instance>], seed: u64) -> Vec<Instance> {
    let mut all: Vec<Instance> = datasets.iter().flatten().cloned().collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    all
}

/// Several questions posed in one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub id: String,
    pub nl_text: String,
    pub slots: Vec<SlotGold>,
}

/// Joins question texts under the batch header with `Q<i>:` markers.
pub fn batch_text<S: AsRef<str>>(questions: &[S]) -> String {
    let mut out = BATCH_HEADER.to_string();
    for (i, q) in questions.iter().enumerate() {
        out.push_str(&format!("\n\nQ{}:{}", i + 1, q.as_ref()));
    }
    out
}

/// Shuffles `mixed` with `seed` and groups it into batches of `k`. A
/// trailing group smaller than `k` is dropped.
pub fn batch_multi(mixed: &[Instance], k: usize, seed: u64) -> Vec<Batch> {
    let k = k.max(1);
    let mut items: Vec<&Instance> = mixed.iter().collect();
    items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    items
        .chunks_exact(k)
        .enumerate()
        .map(|(i, group)| Batch {
            id: format!("batch-{seed}-{i:04}"),
            nl_text: batch_text(&group.iter().map(|g| g.nl_text.as_str()).collect::<Vec<_>>()),
            slots: group.iter().map(|g| SlotGold::of(g)).collect(),
        })
        .collect()
}
