//! Pulls a structured object out of free-form model output.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no braced object found in model output")]
pub struct NoObjectFound;

/// Returns the body of the first fenced code block, or the text unchanged.
pub fn strip_fences(text: &str) -> &str {
    let Some(start) = text.find("```") else { return text.trim() };
    let after = &text[start + 3..];
    let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
    let body = &after[body_start..];
    match body.find("```") {
        Some(end) => body[..end].trim(),
        None => body.trim(),
    }
}

/// Finds the outermost balanced `{...}` object, ignoring braces inside strings.
pub fn extract_structured(text: &str) -> Result<&str, NoObjectFound> {
    for candidate in [strip_fences(text), text] {
        if let Some(obj) = outermost_object(candidate) {
            return Ok(obj);
        }
    }
    Err(NoObjectFound)
}

fn outermost_object(text: &str) -> Option<&str> {
    let bytes = text.as_bytes();
    let mut from = 0;
    while let Some(rel) = text[from..].find('{') {
        let start = from + rel;
        let mut depth = 0usize;
        let mut in_str = false;
        let mut escaped = false;
        for (i, &b) in bytes.iter().enumerate().skip(start) {
            if in_str {
                match b {
                    _ if escaped => escaped = false,
                    b'\\' => escaped = true,
                    b'"' => in_str = false,
                    _ => {}
                }
                continue;
            }
            match b {
                b'"' => in_str = true,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(&text[start..=i]);
                    }
                }
                _ => {}
            }
        }
        from = start + 1;
    }
    None
}
