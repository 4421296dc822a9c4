//! Quantified class English for first-order programs.
//!
//! Classes are nouns (`wumpus` becomes predicate `Wumpus`); individuals are
//! capitalized names in text and lowercase constants in formulas.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{article, capitalize, decapitalize, pluralize, sentences, singularize, CnlError};
use crate::logiclang::fol::{FolPredicate, FolProgram, FolStatement, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FolSentence {
    /// `All wumpuses are zumpuses.`
    All { a: String, b: String },
    /// `No wumpuses are zumpuses.`
    No { a: String, b: String },
    /// `Some wumpuses are zumpuses.`
    Some { a: String, b: String },
    /// `Everything that is a wumpus or a zumpus is a rompus.`
    AllEither { a: String, b: String, c: String },
    /// `Everything that is both a wumpus and a zumpus is a rompus.`
    AllBoth { a: String, b: String, c: String },
    /// `Alex is a wumpus.` / `Alex is not a wumpus.`
    Is { name: String, class: String, positive: bool },
    /// `Alex is either a wumpus or a zumpus.`
    Either { name: String, a: String, b: String },
    /// `Alex is neither a wumpus nor a zumpus.`
    Neither { name: String, a: String, b: String },
    /// `Alex is both a wumpus and a zumpus.`
    Both { name: String, a: String, b: String },
}

fn np(w: &str) -> String {
    format!("{} {w}", article(w))
}

impl fmt::Display for FolSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FolSentence::All { a, b } => write!(f, "All {} are {}.", pluralize(a), pluralize(b)),
            FolSentence::No { a, b } => write!(f, "No {} are {}.", pluralize(a), pluralize(b)),
            FolSentence::Some { a, b } => write!(f, "Some {} are {}.", pluralize(a), pluralize(b)),
            FolSentence::AllEither { a, b, c } => {
                write!(f, "Everything that is {} or {} is {}.", np(a), np(b), np(c))
            }
            FolSentence::AllBoth { a, b, c } => {
                write!(f, "Everything that is both {} and {} is {}.", np(a), np(b), np(c))
            }
            FolSentence::Is { name, class, positive } => {
                write!(f, "{name} is {}{}.", if *positive { "" } else { "not " }, np(class))
            }
            FolSentence::Either { name, a, b } => write!(f, "{name} is either {} or {}.", np(a), np(b)),
            FolSentence::Neither { name, a, b } => write!(f, "{name} is neither {} nor {}.", np(a), np(b)),
            FolSentence::Both { name, a, b } => write!(f, "{name} is both {} and {}.", np(a), np(b)),
        }
    }
}

pub fn predicate_name(class: &str) -> String {
    capitalize(class)
}

pub fn constant_name(name: &str) -> String {
    name.to_lowercase()
}

impl FolSentence {
    /// Class words in order of appearance.
    pub fn classes(&self) -> Vec<&str> {
        match self {
            FolSentence::All { a, b } | FolSentence::No { a, b } | FolSentence::Some { a, b } => vec![a, b],
            FolSentence::AllEither { a, b, c } | FolSentence::AllBoth { a, b, c } => vec![a, b, c],
            FolSentence::Is { class, .. } => vec![class],
            FolSentence::Either { a, b, .. } | FolSentence::Neither { a, b, .. } | FolSentence::Both { a, b, .. } => {
                vec![a, b]
            }
        }
    }

    pub fn individual(&self) -> Option<&str> {
        match self {
            FolSentence::Is { name, .. }
            | FolSentence::Either { name, .. }
            | FolSentence::Neither { name, .. }
            | FolSentence::Both { name, .. } => Some(name),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.individual().is_some()
    }

    pub fn formula(&self) -> Formula {
        let on = |class: &str, t: &str| Formula::atom(&predicate_name(class), &[t]);
        match self {
            FolSentence::All { a, b } => Formula::forall("x", Formula::implies(on(a, "x"), on(b, "x"))),
            FolSentence::No { a, b } => Formula::forall("x", Formula::implies(on(a, "x"), Formula::negate(on(b, "x")))),
            FolSentence::Some { a, b } => Formula::exists("x", Formula::and(on(a, "x"), on(b, "x"))),
            FolSentence::AllEither { a, b, c } => {
                Formula::forall("x", Formula::implies(Formula::or(on(a, "x"), on(b, "x")), on(c, "x")))
            }
            FolSentence::AllBoth { a, b, c } => {
                Formula::forall("x", Formula::implies(Formula::and(on(a, "x"), on(b, "x")), on(c, "x")))
            }
            FolSentence::Is { name, class, positive } => {
                let atom = on(class, &constant_name(name));
                if *positive {
                    atom
                } else {
                    Formula::negate(atom)
                }
            }
            FolSentence::Either { name, a, b } => {
                let c = constant_name(name);
                Formula::or(on(a, &c), on(b, &c))
            }
            FolSentence::Neither { name, a, b } => {
                let c = constant_name(name);
                Formula::and(Formula::negate(on(a, &c)), Formula::negate(on(b, &c)))
            }
            FolSentence::Both { name, a, b } => {
                let c = constant_name(name);
                Formula::and(on(a, &c), on(b, &c))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolText {
    pub premises: Vec<FolSentence>,
    pub conclusion: FolSentence,
}

impl FolText {
    pub fn premise_text(&self) -> String {
        self.premises.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    }

    pub fn conclusion_text(&self) -> String {
        self.conclusion.to_string()
    }

    pub fn parse(premise: &str, hypothesis: &str) -> Result<Self, CnlError> {
        let premises = sentences(premise).into_iter().map(parse_sentence).collect::<Result<Vec<_>, _>>()?;
        let hyp = sentences(hypothesis);
        let [c] = hyp.as_slice() else {
            return Err(CnlError::new(hypothesis, "expected exactly one conclusion sentence"));
        };
        let conclusion = parse_sentence(c)?;
        if !conclusion.is_ground() {
            return Err(CnlError::new(c, "the conclusion must be about a named individual"));
        }
        Ok(FolText { premises, conclusion })
    }

    pub fn build(&self) -> FolProgram {
        let mut predicates: Vec<FolPredicate> = Vec::new();
        for s in self.premises.iter().chain(std::iter::once(&self.conclusion)) {
            for class in s.classes() {
                let name = predicate_name(class);
                if !predicates.iter().any(|p| p.name == name) {
                    predicates.push(FolPredicate {
                        name,
                        params: vec!["x".into()],
                        gloss: Some(format!("x is {}.", np(class))),
                    });
                }
            }
        }
        let statement = |s: &FolSentence| FolStatement { formula: s.formula(), gloss: Some(s.to_string()) };
        FolProgram {
            predicates,
            premises: self.premises.iter().map(statement).collect(),
            conclusion: statement(&self.conclusion),
        }
    }
}

fn noun_phrase(words: &[&str], sentence: &str) -> Result<String, CnlError> {
    match words {
        [art @ ("a" | "an"), w] if *art == article(w) => Ok(w.to_string()),
        _ => Err(CnlError::new(sentence, format!("expected `a <class>`, found `{}`", words.join(" ")))),
    }
}

fn split_on<'a>(words: &'a [&'a str], sep: &str) -> Option<(&'a [&'a str], &'a [&'a str])> {
    let i = words.iter().position(|w| *w == sep)?;
    Some((&words[..i], &words[i + 1..]))
}

fn is_word(w: &str) -> bool {
    !w.is_empty() && w.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_sentence(sentence: &str) -> Result<FolSentence, CnlError> {
    let body = sentence.trim().trim_end_matches('.');
    let words: Vec<&str> = body.split_whitespace().collect();
    if let Some(w) = words.iter().find(|w| !is_word(w)) {
        return Err(CnlError::new(sentence, format!("unexpected token `{w}`")));
    }
    let plural = |w: &str| singularize(&decapitalize(w));
    match words.as_slice() {
        ["All", a, "are", b] => Ok(FolSentence::All { a: plural(a), b: plural(b) }),
        ["No", a, "are", b] => Ok(FolSentence::No { a: plural(a), b: plural(b) }),
        ["Some", a, "are", b] => Ok(FolSentence::Some { a: plural(a), b: plural(b) }),
        ["Everything", "that", "is", "both", rest @ ..] => {
            let (ab, c) = split_on(rest, "is").ok_or_else(|| CnlError::new(sentence, "missing `is`"))?;
            let (a, b) = split_on(ab, "and").ok_or_else(|| CnlError::new(sentence, "missing `and`"))?;
            Ok(FolSentence::AllBoth {
                a: noun_phrase(a, sentence)?,
                b: noun_phrase(b, sentence)?,
                c: noun_phrase(c, sentence)?,
            })
        }
        ["Everything", "that", "is", rest @ ..] => {
            let (ab, c) = split_on(rest, "is").ok_or_else(|| CnlError::new(sentence, "missing `is`"))?;
            let (a, b) = split_on(ab, "or").ok_or_else(|| CnlError::new(sentence, "missing `or`"))?;
            Ok(FolSentence::AllEither {
                a: noun_phrase(a, sentence)?,
                b: noun_phrase(b, sentence)?,
                c: noun_phrase(c, sentence)?,
            })
        }
        [name, "is", rest @ ..] if name.starts_with(|c: char| c.is_ascii_uppercase()) => {
            let name = name.to_string();
            match rest {
                ["either", tail @ ..] => {
                    let (a, b) = split_on(tail, "or").ok_or_else(|| CnlError::new(sentence, "missing `or`"))?;
                    Ok(FolSentence::Either { name, a: noun_phrase(a, sentence)?, b: noun_phrase(b, sentence)? })
                }
                ["neither", tail @ ..] => {
                    let (a, b) = split_on(tail, "nor").ok_or_else(|| CnlError::new(sentence, "missing `nor`"))?;
                    Ok(FolSentence::Neither { name, a: noun_phrase(a, sentence)?, b: noun_phrase(b, sentence)? })
                }
                ["both", tail @ ..] => {
                    let (a, b) = split_on(tail, "and").ok_or_else(|| CnlError::new(sentence, "missing `and`"))?;
                    Ok(FolSentence::Both { name, a: noun_phrase(a, sentence)?, b: noun_phrase(b, sentence)? })
                }
                ["not", tail @ ..] => Ok(FolSentence::Is { name, class: noun_phrase(tail, sentence)?, positive: false }),
                _ => Ok(FolSentence::Is { name, class: noun_phrase(rest, sentence)?, positive: true }),
            }
        }
        _ => Err(CnlError::new(sentence, "unrecognized sentence form")),
    }
}
