//! Controlled natural language for the four paradigms.
//!
//! Each submodule defines a sentence-level description of a problem, renders it
//! to English, parses that English back, and builds the formal program. The
//! harness generates descriptions; the template formalizer parses rendered text.

pub mod csp;
pub mod fol;
pub mod lp;
pub mod smt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot read sentence `{sentence}`: {reason}")]
pub struct CnlError {
    pub sentence: String,
    pub reason: String,
}

impl CnlError {
    pub fn new(sentence: &str, reason: impl Into<String>) -> Self {
        CnlError { sentence: sentence.to_string(), reason: reason.into() }
    }
}

pub fn article(word: &str) -> &'static str {
    match word.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

pub fn pluralize(word: &str) -> String {
    if word.ends_with("us") || word.ends_with("ch") || word.ends_with("sh") || word.ends_with('x') || word.ends_with('s') {
        format!("{word}es")
    } else if word.ends_with('y') && !word.ends_with("ay") && !word.ends_with("ey") && !word.ends_with("oy") {
        format!("{}ies", &word[..word.len() - 1])
    } else {
        format!("{word}s")
    }
}

pub fn singularize(word: &str) -> String {
    for suffix in ["uses", "ches", "shes", "xes", "sses"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            return format!("{stem}{}", &suffix[..suffix.len() - 2]);
        }
    }
    if let Some(stem) = word.strip_suffix("ies") {
        return format!("{stem}y");
    }
    word.strip_suffix('s').unwrap_or(word).to_string()
}

pub fn capitalize(word: &str) -> String {
    let mut c = word.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn decapitalize(word: &str) -> String {
    let mut c = word.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Splits prose into sentences ending in `.`; surrounding whitespace dropped.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        let at_end = i + 1 == bytes.len() || bytes[i + 1].is_ascii_whitespace();
        if (b == b'.' || b == b'?') && at_end {
            let s = text[start..=i].trim();
            if !s.is_empty() {
                out.push(s);
            }
            start = i + 1;
        }
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

/// `a, b, and c` / `a and b` / `a`.
pub fn join_and(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => format!("{}, and {last}", init.join(", ")),
    }
}

/// Inverse of [`join_and`].
pub fn split_and(text: &str) -> Vec<String> {
    let t = text.trim();
    let parts: Vec<&str> = t.split(", ").collect();
    if parts.len() > 1 {
        let mut out: Vec<String> = parts[..parts.len() - 1].iter().map(|s| s.trim().to_string()).collect();
        let last = parts[parts.len() - 1].trim();
        match last.strip_prefix("and ") {
            Some(l) => out.push(l.trim().to_string()),
            None => match last.split_once(" and ") {
                Some((a, b)) => out.extend([a.trim().to_string(), b.trim().to_string()]),
                None => out.push(last.to_string()),
            },
        }
        return out;
    }
    match t.split_once(" and ") {
        Some((a, b)) => vec![a.trim().to_string(), b.trim().to_string()],
        None => vec![t.to_string()],
    }
}

pub const ORDINALS: [&str; 10] = ["first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth"];

pub fn ordinal(k: usize) -> &'static str {
    ORDINALS.get(k.wrapping_sub(1)).copied().unwrap_or("unknown")
}

pub fn ordinal_value(word: &str) -> Option<usize> {
    ORDINALS.iter().position(|o| *o == word).map(|i| i + 1)
}

pub const NUMBER_WORDS: [&str; 10] = ["one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];

pub fn number_word(k: usize) -> String {
    NUMBER_WORDS.get(k.wrapping_sub(1)).map_or_else(|| k.to_string(), |w| w.to_string())
}

pub fn number_value(word: &str) -> Option<usize> {
    NUMBER_WORDS.iter().position(|w| *w == word).map(|i| i + 1).or_else(|| word.parse().ok())
}
