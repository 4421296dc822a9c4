//! Decomposition wire format: `{"result": [...], "overall_goal": "..."}`.

use std::collections::HashSet;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::types::{AnswerOption, Components, DecomposedInput, ProblemId, ReasoningType, SubProblem, DEFAULT_GOAL};

pub const MULTI_GOAL: &str = "Solve multiple independent reasoning problems";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("not valid JSON: {0}")]
    Json(String),
    #[error("schema violation: {}", .0.join("; "))]
    Violation(Vec<String>),
}

pub fn fallback_goal(count: usize) -> &'static str {
    if count > 1 {
        MULTI_GOAL
    } else {
        DEFAULT_GOAL
    }
}

fn string_field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str, problems: &mut Vec<String>) -> Option<&'a str> {
    match obj.get(key) {
        None => {
            problems.push(format!("{at}: missing key `{key}`"));
            None
        }
        Some(Value::String(s)) => Some(s),
        Some(_) => {
            problems.push(format!("{at}: `{key}` must be a string"));
            None
        }
    }
}

/// Checks a backend's emitted object and converts it to typed sub-problems.
///
/// Every problem found is reported, not just the first.
pub fn validate_schema(raw: &str) -> Result<DecomposedInput, SchemaError> {
    let value: Value = serde_json::from_str(raw).map_err(|e| SchemaError::Json(e.to_string()))?;
    let Value::Object(top) = value else {
        return Err(SchemaError::Violation(vec!["top level must be an object".into()]));
    };
    let mut problems = Vec::new();
    for key in top.keys() {
        if key != "result" && key != "overall_goal" {
            problems.push(format!("top level: extra key `{key}`"));
        }
    }
    let items = match top.get("result") {
        Some(Value::Array(items)) if !items.is_empty() => items.as_slice(),
        Some(Value::Array(_)) => {
            problems.push("`result` is empty".into());
            &[]
        }
        Some(_) => {
            problems.push("`result` must be an array".into());
            &[]
        }
        None => {
            problems.push("top level: missing key `result`".into());
            &[]
        }
    };
    let mut seen = HashSet::new();
    let mut subs = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let at = format!("result[{i}]");
        let Value::Object(obj) = item else {
            problems.push(format!("{at}: must be an object"));
            continue;
        };
        let id = string_field(obj, "problem_id", &at, &mut problems).and_then(|s| match ProblemId::parse(s) {
            Some(id) => Some(id),
            None => {
                problems.push(format!("{at}: problem_id `{s}` does not match `ques_<k>`"));
                None
            }
        });
        if let Some(id) = &id {
            if !seen.insert(id.clone()) {
                problems.push(format!("{at}: duplicate problem_id `{id}`"));
            }
        }
        let token = string_field(obj, "problem_type", &at, &mut problems);
        let ty = token.and_then(|s| match s.parse::<ReasoningType>() {
            Ok(t) => Some(t),
            Err(e) => {
                problems.push(format!("{at}: {e}"));
                None
            }
        });
        let options: Option<Vec<String>> = match obj.get("options") {
            None => {
                problems.push(format!("{at}: missing key `options`"));
                None
            }
            Some(Value::Array(vs)) => {
                let strs: Option<Vec<String>> = vs.iter().map(|v| v.as_str().map(str::to_string)).collect();
                match strs {
                    Some(s) if !s.is_empty() => Some(s),
                    Some(_) => {
                        problems.push(format!("{at}: `options` is empty"));
                        None
                    }
                    None => {
                        problems.push(format!("{at}: `options` must hold strings"));
                        None
                    }
                }
            }
            Some(_) => {
                problems.push(format!("{at}: `options` must be an array"));
                None
            }
        };
        let Some(ty) = ty else { continue };
        let keys = ty.component_keys();
        for key in obj.keys() {
            if !matches!(key.as_str(), "problem_id" | "problem_type" | "options") && !keys.contains(&key.as_str()) {
                problems.push(format!("{at}: extra key `{key}` for type {ty}"));
            }
        }
        let first = string_field(obj, keys[0], &at, &mut problems);
        let second = string_field(obj, keys[1], &at, &mut problems);
        let options = options.map(|o| AnswerOption::label_all(&o));
        if let Some(opts) = &options {
            let mut labels = HashSet::new();
            for o in opts {
                if !labels.insert(o.label.as_str()) {
                    problems.push(format!("{at}: duplicate option label `{}`", o.label));
                }
            }
        }
        if let (Some(id), Some(first), Some(second), Some(options)) = (id, first, second, options) {
            let alias = token.filter(|t| t.trim() != ty.as_str()).map(|t| t.trim().to_string());
            subs.push(SubProblem {
                problem_id: id,
                reasoning_type: ty,
                components: Components::for_type(ty, first.to_string(), second.to_string()),
                options,
                type_alias: alias,
            });
        }
    }
    let goal = match top.get("overall_goal") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.trim().to_string()).filter(|s| !s.is_empty()),
        Some(_) => {
            problems.push("`overall_goal` must be a string".into());
            None
        }
    };
    if !problems.is_empty() {
        return Err(SchemaError::Violation(problems));
    }
    let overall_goal = goal.unwrap_or_else(|| fallback_goal(subs.len()).to_string());
    Ok(DecomposedInput { sub_problems: subs, overall_goal })
}

/// Wire form of a decomposition; inverse of [`validate_schema`].
pub fn to_wire(input: &DecomposedInput) -> Value {
    let result: Vec<Value> = input
        .sub_problems
        .iter()
        .map(|p| {
            let mut obj = Map::new();
            obj.insert("problem_id".into(), json!(p.problem_id.as_str()));
            let token = p.type_alias.clone().unwrap_or_else(|| p.reasoning_type.as_str().to_string());
            obj.insert("problem_type".into(), json!(token));
            for (k, v) in p.components.as_map() {
                obj.insert(k.into(), json!(v));
            }
            obj.insert("options".into(), json!(p.options.iter().map(ToString::to_string).collect::<Vec<_>>()));
            Value::Object(obj)
        })
        .collect();
    json!({ "result": result, "overall_goal": input.overall_goal })
}

pub fn serialize(input: &DecomposedInput) -> String {
    serde_json::to_string_pretty(&to_wire(input)).expect("wire values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(raw: &str) -> Vec<String> {
        match validate_schema(raw) {
            Err(SchemaError::Violation(v)) => v,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sat_alias_maps_to_smt() {
        let raw = r#"{"result":[{"problem_id":"ques_1","problem_type":"SAT","trial_description":"t","sample_description":"s","options":["A) True","B) False"]}],"overall_goal":"g"}"#;
        let d = validate_schema(raw).unwrap();
        assert_eq!(d.sub_problems[0].reasoning_type, ReasoningType::Smt);
        assert_eq!(d.sub_problems[0].type_alias.as_deref(), Some("SAT"));
        assert_eq!(validate_schema(&serialize(&d)).unwrap(), d);
    }

    #[test]
    fn missing_csp_question() {
        let raw = r#"{"result":[{"problem_id":"ques_1","problem_type":"CSP","context":"c","options":["x"]}]}"#;
        assert_eq!(violations(raw), vec!["result[0]: missing key `question`"]);
    }

    #[test]
    fn unlabeled_options_get_labels() {
        let raw = r#"{"result":[{"problem_id":"ques_1","problem_type":"LP","premise":"p","hypothesis":"h","options":["True","False"]}]}"#;
        let d = validate_schema(raw).unwrap();
        let shown: Vec<String> = d.sub_problems[0].options.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["A) True", "B) False"]);
        assert_eq!(d.overall_goal, DEFAULT_GOAL);
    }

    #[test]
    fn every_violation_is_listed() {
        let raw = r#"{"result":[{"problem_id":"q1","problem_type":"FOL","premise":"p","context":"c","options":[]},
            {"problem_id":"ques_2","problem_type":"XYZ","options":["a"]}],"extra":1}"#;
        let v = violations(raw);
        assert!(v.contains(&"top level: extra key `extra`".to_string()), "{v:?}");
        assert!(v.iter().any(|s| s.contains("`q1` does not match")));
        assert!(v.iter().any(|s| s.contains("`options` is empty")));
        assert!(v.iter().any(|s| s.contains("extra key `context`")));
        assert!(v.iter().any(|s| s.contains("missing key `hypothesis`")));
        assert!(v.iter().any(|s| s.contains("unknown reasoning type `XYZ`")));
    }

    #[test]
    fn non_json_and_duplicates() {
        assert!(matches!(validate_schema("nope"), Err(SchemaError::Json(_))));
        let raw = r#"{"result":[{"problem_id":"ques_1","problem_type":"LP","premise":"p","hypothesis":"h","options":["A) x","A) y"]},
            {"problem_id":"ques_1","problem_type":"LP","premise":"p","hypothesis":"h","options":["x"]}]}"#;
        let v = violations(raw);
        assert!(v.iter().any(|s| s.contains("duplicate option label `A)`")));
        assert!(v.iter().any(|s| s.contains("duplicate problem_id `ques_1`")));
    }
}
