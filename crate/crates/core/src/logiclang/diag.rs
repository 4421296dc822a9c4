use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A positioned parse or validation error. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {}, found `{}`)", self.expected, self.found)?;
        }
        Ok(())
    }
}

/// Non-empty list of diagnostics, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub struct Diagnostics(pub Vec<ParseDiagnostic>);

impl Diagnostics {
    pub fn first(&self) -> &ParseDiagnostic {
        &self.0[0]
    }

    pub fn lines(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Maps byte offsets to line/column positions.
pub(crate) struct LineIndex<'a> {
    src: &'a str,
    starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(src: &'a str) -> Self {
        let mut starts = vec![0];
        starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { src, starts }
    }

    pub fn position(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.src.len());
        let line = self.starts.partition_point(|&s| s <= offset).max(1);
        let start = self.starts[line - 1];
        let col = self.src.get(start..offset).map_or(offset - start, |s| s.chars().count()) + 1;
        (line, col)
    }
}

/// Collects diagnostics against one source text.
pub(crate) struct DiagSink<'a> {
    index: LineIndex<'a>,
    pub items: Vec<ParseDiagnostic>,
}

impl<'a> DiagSink<'a> {
    pub fn new(src: &'a str) -> Self {
        DiagSink { index: LineIndex::new(src), items: Vec::new() }
    }

    pub fn push(&mut self, offset: usize, message: impl Into<String>, expected: impl Into<String>, found: impl Into<String>) {
        let (line, column) = self.index.position(offset);
        let mut found: String = found.into();
        if found.chars().count() > 40 {
            found = found.chars().take(40).collect::<String>() + "…";
        }
        self.items.push(ParseDiagnostic { line, column, expected: expected.into(), found, message: message.into() });
    }

    pub fn error(&mut self, offset: usize, message: impl Into<String>) {
        self.push(offset, message, "", "");
    }

    /// Sorted diagnostics; call only when at least one was pushed.
    pub fn into_diagnostics(mut self) -> Diagnostics {
        self.items.sort_by_key(|d| (d.line, d.column));
        Diagnostics(self.items)
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Splits text into lines with the byte offset of each line start.
pub(crate) fn lines_with_offsets(src: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    src.split('\n').map(move |line| {
        let start = offset;
        offset += line.len() + 1;
        (start, line.strip_suffix('\r').unwrap_or(line))
    })
}

/// Splits `code ::: gloss` on the first gloss separator.
pub(crate) fn split_gloss(line: &str) -> (&str, Option<String>) {
    match line.find(":::") {
        Some(i) => {
            let gloss = line[i + 3..].trim();
            (&line[..i], (!gloss.is_empty()).then(|| gloss.to_string()))
        }
        None => (line, None),
    }
}
