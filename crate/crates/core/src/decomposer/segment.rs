//! Splits raw input into question blocks and each block into its parts.

use std::sync::LazyLock;

use regex::Regex;

pub const BATCH_HEADER: &str = "Answer the following questions one by one.";
pub const CHOICE_QUESTION: &str = "Which of the following is true?";
pub const MATCH_QUESTION: &str = "Does the patient match the trial?";

static MARKER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?m)^[ \t]*Q(\d+):").expect("valid regex"));
static OPTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\(?[A-Z]\)\s").expect("valid regex"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `STATEMENT:` / `QUESTION:`
    Deductive,
    /// `STATEMENT:` plus a which-is-true question
    Choice,
    /// `TRIAL:` / `PATIENT:`
    Eligibility,
    /// No recognizable headers.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub text: String,
    pub shape: Shape,
    pub first: String,
    pub second: String,
    pub options: Vec<String>,
}

/// Returns the instruction line (if any) and the question blocks.
pub fn segment(text: &str) -> (Option<String>, Vec<Block>) {
    let markers: Vec<_> = MARKER.find_iter(text).collect();
    if markers.is_empty() {
        let t = text.trim();
        return (None, if t.is_empty() { vec![] } else { vec![split_block(t)] });
    }
    let header = text[..markers[0].start()].trim();
    let mut blocks = Vec::new();
    for (i, m) in markers.iter().enumerate() {
        let end = markers.get(i + 1).map_or(text.len(), |n| n.start());
        let body = text[m.end()..end].trim();
        if !body.is_empty() {
            blocks.push(split_block(body));
        }
    }
    ((!header.is_empty()).then(|| header.to_string()), blocks)
}

fn take_options(body: &str) -> (String, Vec<String>) {
    let lines: Vec<&str> = body.lines().collect();
    let mut cut = lines.len();
    while cut > 0 {
        let l = lines[cut - 1].trim();
        if l.is_empty() || OPTION.is_match(l) {
            cut -= 1;
        } else {
            break;
        }
    }
    let options = lines[cut..].iter().map(|l| l.trim()).filter(|l| !l.is_empty()).map(str::to_string).collect();
    (lines[..cut].join("\n").trim().to_string(), options)
}

fn after<'a>(text: &'a str, header: &str) -> Option<(&'a str, &'a str)> {
    let at = if text.starts_with(header) {
        0
    } else {
        text.find(&format!("\n{header}"))? + 1
    };
    Some((&text[..at], &text[at + header.len()..]))
}

pub fn split_block(body: &str) -> Block {
    let (main, options) = take_options(body);
    let block = |shape, first: &str, second: &str| Block {
        text: body.to_string(),
        shape,
        first: first.trim().to_string(),
        second: second.trim().to_string(),
        options: options.clone(),
    };
    if let Some((_, rest)) = after(&main, "TRIAL:") {
        if let Some((trial, patient)) = after(rest, "PATIENT:") {
            let patient = patient.trim();
            let patient = patient.strip_suffix(MATCH_QUESTION).unwrap_or(patient);
            return block(Shape::Eligibility, trial, patient);
        }
    }
    if let Some((_, rest)) = after(&main, "STATEMENT:") {
        if let Some((statement, question)) = after(rest, "QUESTION:") {
            return block(Shape::Deductive, statement, question);
        }
        if let Some(at) = rest.find(CHOICE_QUESTION) {
            return block(Shape::Choice, &rest[..at], CHOICE_QUESTION);
        }
        return block(Shape::Free, rest, "");
    }
    match main.trim_end().rsplit_once('\n') {
        Some((first, last)) if last.trim().ends_with('?') => block(Shape::Free, first, last),
        _ => {
            let sentences = crate::formalizer::cnl::sentences(&main);
            match sentences.split_last() {
                Some((last, init)) if !init.is_empty() => block(Shape::Free, &init.join(" "), last),
                _ => block(Shape::Free, &main, ""),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deductive_template() {
        let (goal, b) = segment("STATEMENT:\nStella is a dumpus.\n\nQUESTION:\nStella is not red.\n\nA) True\nB) False");
        assert_eq!(goal, None);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].shape, Shape::Deductive);
        assert_eq!(b[0].first, "Stella is a dumpus.");
        assert_eq!(b[0].second, "Stella is not red.");
        assert_eq!(b[0].options, vec!["A) True", "B) False"]);
    }

    #[test]
    fn choice_and_eligibility_templates() {
        let (_, b) = segment("STATEMENT:\nFive golfers.\n\nWhich of the following is true?\nA) Rob finished first\nB) Ada finished first");
        assert_eq!((b[0].shape, b[0].first.as_str(), b[0].second.as_str()), (Shape::Choice, "Five golfers.", CHOICE_QUESTION));
        assert_eq!(b[0].options.len(), 2);
        let (_, b) = segment(
            "You get a trial and a patient and have to say if there is a match:\n\nTRIAL: Inclusion criteria:\n- adult\n\n\
             PATIENT: The record.\n\nDoes the patient match the trial?\nA) True\nB) False",
        );
        assert_eq!(b[0].shape, Shape::Eligibility);
        assert_eq!(b[0].first, "Inclusion criteria:\n- adult");
        assert_eq!(b[0].second, "The record.");
    }

    #[test]
    fn batch_markers() {
        let text = format!("{BATCH_HEADER}\n\nQ1:STATEMENT:\na.\n\nQUESTION:\nb.\n\nA) True\nB) False\n\nQ2:free text here. Is it?\n\nQ3:x.");
        let (goal, b) = segment(&text);
        assert_eq!(goal.as_deref(), Some(BATCH_HEADER));
        assert_eq!(b.len(), 3);
        assert_eq!(b[0].options.len(), 2);
        assert_eq!(b[1].shape, Shape::Free);
    }

    #[test]
    fn empty_input() {
        assert!(segment("  \n").1.is_empty());
    }
}
