//! Fact/rule English for logic programs.
//!
//! Class words are nouns and take an article in the singular; property words
//! are adjectives and must not end in `s`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{article, capitalize, decapitalize, pluralize, sentences, singularize, CnlError};
use crate::logiclang::lp::{LpAtom, LpFact, LpPredicate, LpProgram, LpRule, LpTerm};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Property {
    pub word: String,
    pub noun: bool,
}

impl Property {
    pub fn noun(word: &str) -> Self {
        Property { word: word.to_string(), noun: true }
    }

    pub fn adjective(word: &str) -> Self {
        Property { word: word.to_string(), noun: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub property: Property,
    pub positive: bool,
}

impl Literal {
    pub fn new(property: Property, positive: bool) -> Self {
        Literal { property, positive }
    }

    fn singular(&self) -> String {
        let not = if self.positive { "" } else { "not " };
        let w = &self.property.word;
        if self.property.noun {
            format!("{not}{} {w}", article(w))
        } else {
            format!("{not}{w}")
        }
    }

    fn plural(&self) -> String {
        let not = if self.positive { "" } else { "not " };
        if self.property.noun {
            format!("{not}{}", pluralize(&self.property.word))
        } else {
            format!("{not}{}", self.property.word)
        }
    }

    fn atom(&self, subject: LpTerm) -> LpAtom {
        LpAtom { predicate: self.property.word.clone(), args: vec![subject], value: self.positive }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpSentence {
    /// `Stella is a dumpus.`
    Fact { name: String, literal: Literal },
    /// `Every dumpus is not red.`
    Every { class: String, literal: Literal },
    /// `Dumpuses are impuses.`
    Plural { class: String, literal: Literal },
    /// `If someone is big and not cold then they are red.`
    Conditional { body: Vec<Literal>, head: Literal },
}

impl fmt::Display for LpSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpSentence::Fact { name, literal } => write!(f, "{name} is {}.", literal.singular()),
            LpSentence::Every { class, literal } => write!(f, "Every {class} is {}.", literal.singular()),
            LpSentence::Plural { class, literal } => {
                write!(f, "{} are {}.", capitalize(&pluralize(class)), literal.plural())
            }
            LpSentence::Conditional { body, head } => {
                let body: Vec<String> = body.iter().map(Literal::singular).collect();
                write!(f, "If someone is {} then they are {}.", body.join(" and "), head.plural())
            }
        }
    }
}

/// A logic problem: premises plus a single queried fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpText {
    pub premises: Vec<LpSentence>,
    pub query_name: String,
    pub query: Literal,
}

impl LpText {
    pub fn premise_text(&self) -> String {
        self.premises.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    }

    pub fn query_text(&self) -> String {
        LpSentence::Fact { name: self.query_name.clone(), literal: self.query.clone() }.to_string()
    }

    pub fn parse(premise: &str, hypothesis: &str) -> Result<Self, CnlError> {
        let premises = sentences(premise).into_iter().map(parse_sentence).collect::<Result<Vec<_>, _>>()?;
        let hyp = sentences(hypothesis);
        let [q] = hyp.as_slice() else {
            return Err(CnlError::new(hypothesis, "expected exactly one query sentence"));
        };
        match parse_sentence(q)? {
            LpSentence::Fact { name, literal } => Ok(LpText { premises, query_name: name, query: literal }),
            _ => Err(CnlError::new(q, "the query must be a statement about one individual")),
        }
    }

    pub fn build(&self) -> LpProgram {
        let mut predicates: Vec<LpPredicate> = Vec::new();
        let mut declare = |p: &Property| {
            if !predicates.iter().any(|d| d.name == p.word) {
                let gloss = if p.noun { format!("Is x {} {}?", article(&p.word), p.word) } else { format!("Is x {}?", p.word) };
                predicates.push(LpPredicate { name: p.word.clone(), params: vec!["x".into()], gloss: Some(gloss) });
            }
        };
        let x = || LpTerm::Var("x".into());
        let mut facts = Vec::new();
        let mut rules = Vec::new();
        for s in &self.premises {
            let gloss = Some(s.to_string());
            match s {
                LpSentence::Fact { name, literal } => {
                    declare(&literal.property);
                    facts.push(LpFact { atom: literal.atom(LpTerm::Const(name.clone())), gloss });
                }
                LpSentence::Every { class, literal } | LpSentence::Plural { class, literal } => {
                    let class = Literal::new(Property::noun(class), true);
                    declare(&class.property);
                    declare(&literal.property);
                    rules.push(LpRule { antecedent: vec![class.atom(x())], consequent: literal.atom(x()), gloss });
                }
                LpSentence::Conditional { body, head } => {
                    for l in body.iter().chain(std::iter::once(head)) {
                        declare(&l.property);
                    }
                    let antecedent = body.iter().map(|l| l.atom(x())).collect();
                    rules.push(LpRule { antecedent, consequent: head.atom(x()), gloss });
                }
            }
        }
        declare(&self.query.property);
        let query = LpFact { atom: self.query.atom(LpTerm::Const(self.query_name.clone())), gloss: Some(self.query_text()) };
        LpProgram { predicates, facts, rules, query }
    }
}

fn parse_singular(words: &[&str], sentence: &str) -> Result<Literal, CnlError> {
    let (positive, rest) = match words.first() {
        Some(&"not") => (false, &words[1..]),
        _ => (true, words),
    };
    match rest {
        [art @ ("a" | "an"), w] => {
            if *art != article(w) {
                return Err(CnlError::new(sentence, format!("wrong article `{art}` for `{w}`")));
            }
            Ok(Literal::new(Property::noun(w), positive))
        }
        [w] => Ok(Literal::new(Property::adjective(w), positive)),
        _ => Err(CnlError::new(sentence, "expected `[not] [a|an] word`")),
    }
}

fn parse_plural(words: &[&str], sentence: &str) -> Result<Literal, CnlError> {
    let (positive, rest) = match words.first() {
        Some(&"not") => (false, &words[1..]),
        _ => (true, words),
    };
    match rest {
        [w] if w.ends_with('s') => Ok(Literal::new(Property::noun(&singularize(w)), positive)),
        [w] => Ok(Literal::new(Property::adjective(w), positive)),
        _ => Err(CnlError::new(sentence, "expected `[not] word`")),
    }
}

fn is_word(w: &str) -> bool {
    !w.is_empty() && w.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_sentence(sentence: &str) -> Result<LpSentence, CnlError> {
    let body = sentence.trim().trim_end_matches('.');
    let words: Vec<&str> = body.split_whitespace().collect();
    if let Some(w) = words.iter().find(|w| !is_word(w)) {
        return Err(CnlError::new(sentence, format!("unexpected token `{w}`")));
    }
    if let Some(rest) = body.strip_prefix("If someone is ") {
        let (cond, head) =
            rest.split_once(" then they are ").ok_or_else(|| CnlError::new(sentence, "missing `then they are`"))?;
        let body = cond
            .split(" and ")
            .map(|part| parse_singular(&part.split_whitespace().collect::<Vec<_>>(), sentence))
            .collect::<Result<Vec<_>, _>>()?;
        let head = parse_plural(&head.split_whitespace().collect::<Vec<_>>(), sentence)?;
        return Ok(LpSentence::Conditional { body, head });
    }
    match words.as_slice() {
        ["Every", class, "is", rest @ ..] => {
            Ok(LpSentence::Every { class: class.to_string(), literal: parse_singular(rest, sentence)? })
        }
        [subject, "are", rest @ ..] => {
            let class = singularize(&decapitalize(subject));
            Ok(LpSentence::Plural { class, literal: parse_plural(rest, sentence)? })
        }
        [name, "is", rest @ ..] if name.starts_with(|c: char| c.is_ascii_uppercase()) => {
            Ok(LpSentence::Fact { name: name.to_string(), literal: parse_singular(rest, sentence)? })
        }
        _ => Err(CnlError::new(sentence, "unrecognized sentence form")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logiclang::lp::parse_lp;

    const STELLA_PREMISE: &str = "Every dumpus is not red. Tumpuses are red. Dumpuses are impuses. \
        Impuses are not feisty. Impuses are yumpuses. Stella is a dumpus.";

    #[test]
    fn stella_text_builds_the_reference_program() {
        let t = LpText::parse(STELLA_PREMISE, "Stella is not red.").unwrap();
        assert_eq!(t.premise_text(), STELLA_PREMISE.split_whitespace().collect::<Vec<_>>().join(" "));
        let p = t.build();
        let mut reference = parse_lp(crate::logiclang::lp::tests::STELLA).unwrap();
        // The reference declares an extra, unused `isA` predicate.
        reference.predicates.retain(|d| d.name != "isA");
        assert_eq!(p, reference);
    }

    #[test]
    fn conditional_round_trip() {
        let s = LpSentence::Conditional {
            body: vec![Literal::new(Property::adjective("big"), true), Literal::new(Property::adjective("cold"), false)],
            head: Literal::new(Property::adjective("red"), true),
        };
        assert_eq!(s.to_string(), "If someone is big and not cold then they are red.");
        assert_eq!(parse_sentence(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rejects_unknown_forms() {
        assert!(parse_sentence("All dumpuses are red.").is_err());
        assert!(parse_sentence("Stella is a impus.").is_err());
        assert!(LpText::parse("Stella is big.", "Every cat is red.").is_err());
    }
}
