//! Cue-based paradigm classifier.

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::ReasoningType;

const DEFAULT_CUES: &str = include_str!("../../assets/cues.toml");

#[derive(Debug, Error)]
pub enum CueError {
    #[error("cannot read cue file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed cue file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("cue `{name}` has a bad pattern: {source}")]
    Pattern { name: String, source: regex::Error },
    #[error("cue `{0}` has a negative or non-finite weight")]
    Weight(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CueFile {
    cue: Vec<CueSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CueSpec {
    #[serde(rename = "type")]
    ty: ReasoningType,
    name: String,
    pattern: String,
    weight: f64,
    #[serde(default)]
    cap: Option<usize>,
}

#[derive(Debug, Clone)]
struct Cue {
    ty: ReasoningType,
    name: String,
    pattern: Regex,
    weight: f64,
    cap: usize,
}

/// A compiled cue lexicon.
#[derive(Debug, Clone)]
pub struct Cues(Vec<Cue>);

impl Default for Cues {
    fn default() -> Self {
        Cues::from_toml(DEFAULT_CUES).expect("bundled cue file is valid")
    }
}

impl Cues {
    pub fn from_toml(text: &str) -> Result<Self, CueError> {
        let file: CueFile = toml::from_str(text)?;
        let cues = file
            .cue
            .into_iter()
            .map(|c| {
                if !c.weight.is_finite() || c.weight < 0.0 {
                    return Err(CueError::Weight(c.name));
                }
                let pattern = Regex::new(&c.pattern).map_err(|source| CueError::Pattern { name: c.name.clone(), source })?;
                Ok(Cue { ty: c.ty, name: c.name, pattern, weight: c.weight, cap: c.cap.unwrap_or(8) })
            })
            .collect::<Result<_, _>>()?;
        Ok(Cues(cues))
    }

    pub fn load(path: &Path) -> Result<Self, CueError> {
        Cues::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-type scores plus the cues that fired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    /// Scores in `ReasoningType::ALL` order.
    pub scores: Vec<(ReasoningType, f64)>,
    /// `TYPE:cue_name xN` entries.
    pub evidence: Vec<String>,
}

impl FeatureScore {
    pub fn score(&self, ty: ReasoningType) -> f64 {
        self.scores.iter().find(|(t, _)| *t == ty).map_or(0.0, |(_, s)| *s)
    }
}

/// Highest-scoring type; ties go to the earlier type in LP, FOL, CSP, SMT order.
pub fn classify_heuristic(text: &str, cues: &Cues) -> (ReasoningType, FeatureScore) {
    let mut scores: Vec<(ReasoningType, f64)> = ReasoningType::ALL.iter().map(|t| (*t, 0.0)).collect();
    let mut evidence = Vec::new();
    for cue in &cues.0 {
        let hits = cue.pattern.find_iter(text).take(cue.cap).count();
        if hits > 0 && cue.weight > 0.0 {
            let slot = scores.iter_mut().find(|(t, _)| *t == cue.ty).expect("all types present");
            slot.1 += cue.weight * hits as f64;
            evidence.push(format!("{}:{} x{hits}", cue.ty, cue.name));
        }
    }
    let mut best = ReasoningType::Lp;
    let mut best_score = f64::NEG_INFINITY;
    for (t, s) in &scores {
        if *s > best_score {
            best = *t;
            best_score = *s;
        }
    }
    (best, FeatureScore { scores, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(text: &str) -> ReasoningType {
        classify_heuristic(text, &Cues::default()).0
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(
            classify("Every dumpus is not red. Tumpuses are red. Dumpuses are impuses. Stella is a dumpus. Stella is not red."),
            ReasoningType::Lp
        );
        assert_eq!(
            classify(
                "All birds have wings. No animal with wings is a reptile. Some animals that fly are birds. \
                 If something is an iguana, then it is a reptile. John is neither an iguana nor a bird."
            ),
            ReasoningType::Fol
        );
        assert_eq!(
            classify(
                "The following paragraphs each describe a set of five objects arranged in a fixed order. \
                 In a golf tournament, there were five golfers: Rob, Ada, Dan, Joe, and Mel. Ada finished above Mel."
            ),
            ReasoningType::Csp
        );
        assert_eq!(
            classify("TRIAL: Inclusion criteria: adults.\n\nPATIENT: a 57 year old.\n\nDoes the patient match the trial?"),
            ReasoningType::Smt
        );
    }

    #[test]
    fn evidence_accompanies_positive_scores() {
        let (_, s) = classify_heuristic("Some cats are black.", &Cues::default());
        assert!(s.score(ReasoningType::Fol) > 0.0);
        assert!(s.evidence.iter().any(|e| e.starts_with("FOL:")));
    }

    #[test]
    fn ties_prefer_lp() {
        let (t, s) = classify_heuristic("Nothing to see.", &Cues::default());
        assert_eq!(t, ReasoningType::Lp);
        assert!(s.evidence.is_empty());
    }

    #[test]
    fn rejects_bad_cue_files() {
        assert!(matches!(
            Cues::from_toml("[[cue]]\ntype = \"LP\"\nname = \"x\"\npattern = \"(\"\nweight = 1.0\n"),
            Err(CueError::Pattern { .. })
        ));
        assert!(matches!(
            Cues::from_toml("[[cue]]\ntype = \"LP\"\nname = \"x\"\npattern = \"a\"\nweight = -1.0\n"),
            Err(CueError::Weight(_))
        ));
        assert!(Cues::from_toml("[[cue]]\ntype = \"XYZ\"\nname = \"x\"\npattern = \"a\"\nweight = 1.0\n").is_err());
    }
}
