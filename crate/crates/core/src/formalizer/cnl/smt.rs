//! Eligibility English: trial criteria lists and patient records.
//!
//! Numbers written with a decimal point are real-valued; bare integers are
//! integer-valued. A variable keeps one sort across the whole problem.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::CnlError;
use crate::logiclang::csp::CmpOp;
use crate::logiclang::smt::{format_rational, Rational, SmtDecl, SmtScript, SmtTerm, Sort};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: Rational,
    pub real: bool,
}

impl Quantity {
    pub fn int(n: i128) -> Self {
        Quantity { value: Rational::from_integer(n), real: false }
    }

    pub fn real(value: Rational) -> Self {
        Quantity { value, real: true }
    }

    fn sort(&self) -> Sort {
        if self.real {
            Sort::Real
        } else {
            Sort::Int
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        let (neg, digits) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int, frac) = match digits.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (digits, None),
        };
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut value = Rational::from_integer(int.parse().ok()?);
        if let Some(f) = frac {
            if f.is_empty() || f.len() > 12 || !f.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            value += Rational::new(f.parse().ok()?, 10i128.pow(f.len() as u32));
        }
        Some(Quantity { value: if neg { -value } else { value }, real: frac.is_some() })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format_rational(&self.value.abs());
        let sign = if self.value < Rational::zero() { "-" } else { "" };
        if self.real && !s.contains('.') {
            write!(f, "{sign}{s}.0")
        } else {
            write!(f, "{sign}{s}")
        }
    }
}

const RELATIONS: [(&str, CmpOp); 4] =
    [(" greater than ", CmpOp::Gt), (" at least ", CmpOp::Ge), (" less than ", CmpOp::Lt), (" at most ", CmpOp::Le)];

fn relation_word(op: CmpOp) -> &'static str {
    RELATIONS.iter().find(|(_, o)| *o == op).map_or(" equal to ", |(w, _)| w).trim()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// A condition the patient either has or not.
    Flag(String),
    /// A measurement compared with a threshold.
    Threshold { phrase: String, op: CmpOp, value: Quantity },
    /// Either of two conditions.
    Either(String, String),
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Flag(p) => f.write_str(p),
            Criterion::Threshold { phrase, op, value } => write!(f, "{phrase} {} {value}", relation_word(*op)),
            Criterion::Either(a, b) => write!(f, "{a} or {b}"),
        }
    }
}

impl Criterion {
    pub fn phrases(&self) -> Vec<&str> {
        match self {
            Criterion::Flag(p) | Criterion::Threshold { phrase: p, .. } => vec![p],
            Criterion::Either(a, b) => vec![a, b],
        }
    }

    pub fn term(&self) -> SmtTerm {
        match self {
            Criterion::Flag(p) => SmtTerm::konst(&variable_name(p)),
            Criterion::Threshold { phrase, op, value } => {
                SmtTerm::cmp(*op, SmtTerm::konst(&variable_name(phrase)), SmtTerm::Num(value.value))
            }
            Criterion::Either(a, b) => {
                SmtTerm::Or(vec![SmtTerm::konst(&variable_name(a)), SmtTerm::konst(&variable_name(b))])
            }
        }
    }

    /// Truth under a patient record; `None` when a needed value is missing.
    pub fn holds(&self, patient: &[(String, Reading)]) -> Option<bool> {
        let get = |p: &str| patient.iter().find(|(k, _)| k == p).map(|(_, r)| r);
        match self {
            Criterion::Flag(p) => match get(p)? {
                Reading::Present(b) => Some(*b),
                Reading::Measured(_) => None,
            },
            Criterion::Threshold { phrase, op, value } => match get(phrase)? {
                Reading::Measured(q) => Some(op.holds(q.value, value.value)),
                Reading::Present(_) => None,
            },
            Criterion::Either(a, b) => {
                let fa = Criterion::Flag(a.clone()).holds(patient);
                let fb = Criterion::Flag(b.clone()).holds(patient);
                match (fa, fb) {
                    (Some(true), _) | (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                }
            }
        }
    }

    fn parse(line: &str) -> Result<Self, CnlError> {
        let text = line.trim();
        for (word, op) in RELATIONS {
            if let Some((phrase, value)) = text.split_once(word) {
                let value =
                    Quantity::parse(value).ok_or_else(|| CnlError::new(line, format!("`{value}` is not a number")))?;
                return Ok(Criterion::Threshold { phrase: check_phrase(phrase, line)?, op, value });
            }
        }
        if let Some((a, b)) = text.split_once(" or ") {
            return Ok(Criterion::Either(check_phrase(a, line)?, check_phrase(b, line)?));
        }
        Ok(Criterion::Flag(check_phrase(text, line)?))
    }
}

fn check_phrase(phrase: &str, line: &str) -> Result<String, CnlError> {
    let p = phrase.trim();
    if p.is_empty() || !p.chars().all(|c| c.is_ascii_alphanumeric() || c == ' ' || c == '-') {
        return Err(CnlError::new(line, format!("`{p}` is not a plain condition phrase")));
    }
    if !p.starts_with(|c: char| c.is_ascii_alphabetic()) {
        return Err(CnlError::new(line, "a condition phrase must start with a letter"));
    }
    Ok(p.to_string())
}

/// `time of debut of symptoms` becomes `time_of_debut_of_symptoms`.
pub fn variable_name(phrase: &str) -> String {
    phrase.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reading {
    Present(bool),
    Measured(Quantity),
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reading::Present(true) => f.write_str("yes"),
            Reading::Present(false) => f.write_str("no"),
            Reading::Measured(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmtText {
    pub inclusion: Vec<Criterion>,
    pub exclusion: Vec<Criterion>,
    pub patient: Vec<(String, Reading)>,
}

const INCLUSION: &str = "Inclusion criteria:";
const EXCLUSION: &str = "Exclusion criteria:";
const RECORD: &str = "The patient record lists:";

impl SmtText {
    pub fn trial_text(&self) -> String {
        let mut out = String::from(INCLUSION);
        for c in &self.inclusion {
            out.push_str(&format!("\n- {c}"));
        }
        out.push('\n');
        out.push_str(EXCLUSION);
        for c in &self.exclusion {
            out.push_str(&format!("\n- {c}"));
        }
        out
    }

    pub fn patient_text(&self) -> String {
        let items: Vec<String> = self.patient.iter().map(|(p, r)| format!("{p} {r}")).collect();
        format!("{RECORD} {}.", items.join("; "))
    }

    /// Whether the patient meets the trial; `None` if the record is insufficient.
    pub fn eligible(&self) -> Option<bool> {
        let mut unknown = false;
        for c in &self.inclusion {
            match c.holds(&self.patient) {
                Some(false) => return Some(false),
                None => unknown = true,
                Some(true) => {}
            }
        }
        for c in &self.exclusion {
            match c.holds(&self.patient) {
                Some(true) => return Some(false),
                None => unknown = true,
                Some(false) => {}
            }
        }
        (!unknown).then_some(true)
    }

    pub fn parse(trial: &str, patient: &str) -> Result<Self, CnlError> {
        let mut inclusion = Vec::new();
        let mut exclusion = Vec::new();
        let mut section: Option<bool> = None;
        for raw in trial.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line.eq_ignore_ascii_case(INCLUSION) {
                section = Some(true);
                continue;
            }
            if line.eq_ignore_ascii_case(EXCLUSION) {
                section = Some(false);
                continue;
            }
            let item = line.strip_prefix("- ").ok_or_else(|| CnlError::new(line, "expected a `- ` criterion line"))?;
            let c = Criterion::parse(item)?;
            match section {
                Some(true) => inclusion.push(c),
                Some(false) => exclusion.push(c),
                None => return Err(CnlError::new(line, "criterion outside an inclusion or exclusion list")),
            }
        }
        if section.is_none() {
            return Err(CnlError::new(trial, "no criteria lists found"));
        }
        let body = patient
            .trim()
            .strip_prefix(RECORD)
            .ok_or_else(|| CnlError::new(patient, "expected the patient record sentence"))?
            .trim()
            .trim_end_matches('.');
        let mut record = Vec::new();
        for item in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (phrase, value) =
                item.rsplit_once(' ').ok_or_else(|| CnlError::new(item, "expected `<condition> <value>`"))?;
            let reading = match value {
                "yes" => Reading::Present(true),
                "no" => Reading::Present(false),
                v => Reading::Measured(
                    Quantity::parse(v).ok_or_else(|| CnlError::new(item, format!("`{v}` is not yes, no or a number")))?,
                ),
            };
            record.push((check_phrase(phrase, item)?, reading));
        }
        let text = SmtText { inclusion, exclusion, patient: record };
        text.sorts()?;
        Ok(text)
    }

    /// Sort of each variable in first-appearance order.
    fn sorts(&self) -> Result<Vec<(String, Sort)>, CnlError> {
        let mut out: Vec<(String, Sort)> = Vec::new();
        let mut note = |phrase: &str, sort: Sort| -> Result<(), CnlError> {
            match out.iter().find(|(p, _)| p == phrase) {
                Some((_, s)) if *s != sort => Err(CnlError::new(
                    phrase,
                    format!("used both as {} and as {}", s.as_str(), sort.as_str()),
                )),
                Some(_) => Ok(()),
                None => {
                    out.push((phrase.to_string(), sort));
                    Ok(())
                }
            }
        };
        for c in self.inclusion.iter().chain(&self.exclusion) {
            match c {
                Criterion::Threshold { phrase, value, .. } => note(phrase, value.sort())?,
                other => {
                    for p in other.phrases() {
                        note(p, Sort::Bool)?;
                    }
                }
            }
        }
        for (p, r) in &self.patient {
            match r {
                Reading::Present(_) => note(p, Sort::Bool)?,
                Reading::Measured(q) => note(p, q.sort())?,
            }
        }
        Ok(out)
    }

    pub fn build(&self) -> Result<SmtScript, CnlError> {
        let decls = self.sorts()?.into_iter().map(|(p, sort)| SmtDecl { name: variable_name(&p), sort }).collect();
        let mut assertions = Vec::new();
        let mut incl: Vec<SmtTerm> = self.inclusion.iter().map(Criterion::term).collect();
        match incl.len() {
            0 => {}
            1 => assertions.push(incl.remove(0)),
            _ => assertions.push(SmtTerm::And(incl)),
        }
        let excl: Vec<SmtTerm> = self.exclusion.iter().map(Criterion::term).collect();
        match excl.len() {
            0 => {}
            1 => assertions.push(SmtTerm::negate(excl.into_iter().next().expect("one item"))),
            _ => assertions.push(SmtTerm::negate(SmtTerm::Or(excl))),
        }
        for (p, r) in &self.patient {
            let v = SmtTerm::konst(&variable_name(p));
            assertions.push(match r {
                Reading::Present(b) => SmtTerm::Iff(Box::new(v), Box::new(SmtTerm::Bool(*b))),
                Reading::Measured(q) => SmtTerm::cmp(CmpOp::Eq, v, SmtTerm::Num(q.value)),
            });
        }
        Ok(SmtScript { logic: None, decls, assertions })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logiclang::smt::tests::{patient, TRIAL};
    use crate::logiclang::parse_smt;

    const TRIAL_TEXT: &str = "Inclusion criteria:
- age in years greater than 18
- acute pancreatitis
- informed consent
- time of debut of symptoms greater than 0.0
Exclusion criteria:
- chronic pancreatitis
- pregnancy
- malignant disease
- time of debut of symptoms greater than 72.0";

    const PATIENT_TEXT: &str = "The patient record lists: age in years 57; acute pancreatitis yes; informed consent yes; \
        time of debut of symptoms 20.0; chronic pancreatitis no; pregnancy no; malignant disease no.";

    #[test]
    fn trial_text_builds_reference_script() {
        let t = SmtText::parse(TRIAL_TEXT, PATIENT_TEXT).unwrap();
        assert_eq!(t.trial_text(), TRIAL_TEXT);
        assert_eq!(SmtText::parse(&t.trial_text(), &t.patient_text()).unwrap(), t);
        let reference = parse_smt(&format!("{TRIAL}{}", patient(20))).unwrap();
        let built = t.build().unwrap();
        assert_eq!(built.decls, reference.decls);
        assert_eq!(built.assertions, reference.assertions);
        assert_eq!(t.eligible(), Some(true));
    }

    #[test]
    fn eligibility_follows_criteria() {
        let late = PATIENT_TEXT.replace("symptoms 20.0", "symptoms 80.0");
        assert_eq!(SmtText::parse(TRIAL_TEXT, &late).unwrap().eligible(), Some(false));
        let missing = PATIENT_TEXT.replace(" pregnancy no;", "");
        assert_eq!(SmtText::parse(TRIAL_TEXT, &missing).unwrap().eligible(), None);
    }

    #[test]
    fn quantities() {
        assert_eq!(Quantity::parse("72.0"), Some(Quantity::real(Rational::from_integer(72))));
        assert_eq!(Quantity::parse("-3"), Some(Quantity::int(-3)));
        assert_eq!(Quantity::parse("1.25").unwrap().to_string(), "1.25");
        assert_eq!(Quantity::real(Rational::from_integer(-2)).to_string(), "-2.0");
        assert_eq!(Quantity::parse("x1"), None);
        assert_eq!(Quantity::parse("1."), None);
    }

    #[test]
    fn rejects_mixed_sorts_and_bad_lines() {
        assert!(SmtText::parse("Inclusion criteria:\n- weight at least 50\n- weight", "The patient record lists: weight 60.").is_err());
        assert!(SmtText::parse("Inclusion criteria:\nweight", "The patient record lists: weight 60.").is_err());
        assert!(SmtText::parse("Inclusion criteria:\n- weight at least 50", "weight 60").is_err());
    }
}
