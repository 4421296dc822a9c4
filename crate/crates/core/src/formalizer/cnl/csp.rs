//! Ordering-puzzle English: golfers, books on a shelf, vehicles at a show.
//!
//! Every scene maps objects to positions `1..=n` in an array `pos` indexed by
//! an enum of the objects.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{article, capitalize, join_and, number_value, number_word, ordinal, ordinal_value, sentences, split_and, CnlError};
use crate::logiclang::csp::{AllDiffArg, CmpOp, CspConstraint, CspEnum, CspExpr, CspModel, CspVar, VarRef};

pub const ARRAY: &str = "pos";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scene {
    Golf,
    Shelf,
    Vehicles,
}

impl Scene {
    pub const ALL: [Scene; 3] = [Scene::Golf, Scene::Shelf, Scene::Vehicles];

    pub fn enum_name(self) -> &'static str {
        match self {
            Scene::Golf => "GOLFER",
            Scene::Shelf => "BOOK",
            Scene::Vehicles => "VEHICLE",
        }
    }

    fn binder(self) -> &'static str {
        match self {
            Scene::Golf => "g",
            Scene::Shelf => "b",
            Scene::Vehicles => "v",
        }
    }

    /// Object pool the generator draws from (enum member spelling).
    pub fn lexicon(self) -> &'static [&'static str] {
        match self {
            Scene::Golf => &["Rob", "Ada", "Dan", "Joe", "Mel", "Eve", "Amy", "Eli", "Ana", "Mya"],
            Scene::Shelf => &["Red", "Green", "Blue", "White", "Black", "Orange", "Purple", "Gray", "Brown", "Yellow"],
            Scene::Vehicles => &["Bus", "Truck", "Sedan", "Tractor", "Convertible", "Limousine", "Minivan", "Motorcycle", "Wagon", "Coupe"],
        }
    }

    /// How a member is written mid-sentence: `Rob`, `the red book`, `the bus`.
    fn mention(self, member: &str) -> String {
        match self {
            Scene::Golf => member.to_string(),
            Scene::Shelf => format!("the {} book", member.to_lowercase()),
            Scene::Vehicles => format!("the {}", member.to_lowercase()),
        }
    }

    fn intro(self, members: &[String]) -> String {
        let n = number_word(members.len());
        match self {
            Scene::Golf => format!("In a golf tournament, there were {n} golfers: {}.", join_and(members)),
            Scene::Shelf => {
                let items: Vec<String> = members.iter().map(|m| format!("a {} book", m.to_lowercase())).collect();
                format!("On a shelf, there are {n} books: {}.", join_and(&items))
            }
            Scene::Vehicles => {
                let items: Vec<String> =
                    members.iter().map(|m| format!("{} {}", article(&m.to_lowercase()), m.to_lowercase())).collect();
                format!("In an antique car show, there are {n} vehicles: {}.", join_and(&items))
            }
        }
    }

    fn parse_intro(sentence: &str) -> Option<(Scene, Vec<String>)> {
        let body = sentence.trim_end_matches('.');
        let (head, list) = body.split_once(": ")?;
        let (scene, count) = if let Some(rest) = head.strip_prefix("In a golf tournament, there were ") {
            (Scene::Golf, rest.strip_suffix(" golfers")?)
        } else if let Some(rest) = head.strip_prefix("On a shelf, there are ") {
            (Scene::Shelf, rest.strip_suffix(" books")?)
        } else {
            let rest = head.strip_prefix("In an antique car show, there are ")?;
            (Scene::Vehicles, rest.strip_suffix(" vehicles")?)
        };
        let members: Vec<String> = split_and(list)
            .into_iter()
            .map(|item| {
                let item = item.trim();
                let word = match scene {
                    Scene::Golf => item,
                    Scene::Shelf => item.strip_prefix("a ")?.strip_suffix(" book")?,
                    Scene::Vehicles => item.split_once(' ').map(|(_, w)| w)?,
                };
                Some(capitalize(word))
            })
            .collect::<Option<_>>()?;
        (number_value(count)? == members.len()).then_some((scene, members))
    }
}

pub fn preface(n: usize) -> String {
    format!("{} objects are placed in a fixed order, and every statement below holds.", capitalize(&number_word(n)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CspStatement {
    /// `a` comes before `b` (smaller position).
    Before(String, String),
    /// `a` comes after `b`.
    After(String, String),
    /// `a` is at position `k` (1-based).
    At(String, usize),
}

impl CspStatement {
    pub fn constraint(&self) -> CspConstraint {
        let at = |m: &str| CspExpr::var(VarRef::element(ARRAY, m));
        match self {
            CspStatement::Before(a, b) => CspConstraint::compare(at(a), CmpOp::Lt, at(b)),
            CspStatement::After(a, b) => CspConstraint::compare(at(a), CmpOp::Gt, at(b)),
            CspStatement::At(a, k) => CspConstraint::compare(at(a), CmpOp::Eq, CspExpr::Int(*k as i64)),
        }
    }

    /// Truth of the statement under a position map.
    pub fn holds(&self, pos: impl Fn(&str) -> Option<usize>) -> Option<bool> {
        Some(match self {
            CspStatement::Before(a, b) => pos(a)? < pos(b)?,
            CspStatement::After(a, b) => pos(a)? > pos(b)?,
            CspStatement::At(a, k) => pos(a)? == *k,
        })
    }

    /// Renders the statement without the final period.
    pub fn render(&self, scene: Scene, n: usize) -> String {
        let m = |x: &str| scene.mention(x);
        let text = match (scene, self) {
            (Scene::Golf, CspStatement::Before(a, b)) => format!("{} finished above {}", m(a), m(b)),
            (Scene::Golf, CspStatement::After(a, b)) => format!("{} finished below {}", m(a), m(b)),
            (Scene::Golf, CspStatement::At(a, k)) => {
                let place = match *k {
                    k if k == n && n > 1 => "last".to_string(),
                    k if k + 1 == n && k >= 3 => "second-to-last".to_string(),
                    k if k + 2 == n && k >= 4 => "third-to-last".to_string(),
                    k => ordinal(k).to_string(),
                };
                format!("{} finished {place}", m(a))
            }
            (Scene::Shelf, CspStatement::Before(a, b)) => format!("{} is to the left of {}", m(a), m(b)),
            (Scene::Shelf, CspStatement::After(a, b)) => format!("{} is to the right of {}", m(a), m(b)),
            (Scene::Shelf, CspStatement::At(a, k)) => match *k {
                1 => format!("{} is the leftmost", m(a)),
                k if k == n => format!("{} is the rightmost", m(a)),
                k if 2 * k <= n + 1 => format!("{} is the {} from the left", m(a), ordinal(k)),
                k => format!("{} is the {} from the right", m(a), ordinal(n + 1 - k)),
            },
            (Scene::Vehicles, CspStatement::Before(a, b)) => format!("{} is older than {}", m(a), m(b)),
            (Scene::Vehicles, CspStatement::After(a, b)) => format!("{} is newer than {}", m(a), m(b)),
            (Scene::Vehicles, CspStatement::At(a, k)) => match *k {
                1 => format!("{} is the oldest", m(a)),
                k if k == n => format!("{} is the newest", m(a)),
                k if 2 * k <= n + 1 => format!("{} is the {}-oldest", m(a), ordinal(k)),
                k => format!("{} is the {}-newest", m(a), ordinal(n + 1 - k)),
            },
        };
        capitalize(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspText {
    pub scene: Scene,
    pub members: Vec<String>,
    pub statements: Vec<CspStatement>,
}

impl fmt::Display for CspText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.members.len();
        write!(f, "{}\n\n{}", preface(n), self.scene.intro(&self.members))?;
        for s in &self.statements {
            write!(f, " {}.", s.render(self.scene, n))?;
        }
        Ok(())
    }
}

impl CspText {
    pub fn parse(context: &str) -> Result<Self, CnlError> {
        let mut found: Option<(Scene, Vec<String>)> = None;
        let mut statements = Vec::new();
        for s in sentences(context) {
            match &found {
                None => {
                    if let Some(intro) = Scene::parse_intro(s) {
                        found = Some(intro);
                    } else if !s.contains("fixed order") {
                        return Err(CnlError::new(s, "expected the scene introduction"));
                    }
                }
                Some((scene, members)) => statements.push(parse_statement(s, *scene, members)?),
            }
        }
        let (scene, members) = found.ok_or_else(|| CnlError::new(context, "no scene introduction found"))?;
        Ok(CspText { scene, members, statements })
    }

    pub fn build(&self) -> CspModel {
        let scene = self.scene;
        let mut constraints = vec![CspConstraint::AllDifferent(AllDiffArg::Comprehension {
            array: ARRAY.into(),
            binder: scene.binder().into(),
            domain: scene.enum_name().into(),
        })];
        constraints.extend(self.statements.iter().map(CspStatement::constraint));
        CspModel {
            includes: vec!["globals.mzn".into()],
            enums: vec![CspEnum { name: scene.enum_name().into(), members: self.members.clone() }],
            vars: vec![CspVar {
                name: ARRAY.into(),
                index: Some(scene.enum_name().into()),
                lo: 1,
                hi: self.members.len() as i64,
            }],
            constraints,
        }
    }
}

fn resolve(word: &str, members: &[String], sentence: &str) -> Result<String, CnlError> {
    members
        .iter()
        .find(|m| m.eq_ignore_ascii_case(word))
        .cloned()
        .ok_or_else(|| CnlError::new(sentence, format!("`{word}` is not one of the objects")))
}

fn strip_mention(text: &str, scene: Scene) -> Option<&str> {
    match scene {
        Scene::Golf => Some(text),
        Scene::Shelf => text.strip_prefix("the ")?.strip_suffix(" book"),
        Scene::Vehicles => text.strip_prefix("the "),
    }
}

fn place(word: &str, n: usize) -> Option<usize> {
    match word {
        "last" => Some(n),
        "second-to-last" => n.checked_sub(1),
        "third-to-last" => n.checked_sub(2),
        w => ordinal_value(w),
    }
}

/// Parses one position statement of the given scene.
pub fn parse_statement(sentence: &str, scene: Scene, members: &[String]) -> Result<CspStatement, CnlError> {
    let n = members.len();
    let body = sentence.trim().trim_end_matches('.');
    let lower = body.to_lowercase();
    let err = || CnlError::new(sentence, format!("not a {scene:?} position statement"));
    let obj = |t: &str| -> Result<String, CnlError> {
        let w = strip_mention(t.trim(), scene).ok_or_else(err)?;
        resolve(w, members, sentence)
    };
    let out_of_range = |k: usize| k == 0 || k > n;
    let relations: &[(&str, bool)] = match scene {
        Scene::Golf => &[(" finished above ", true), (" finished below ", false)],
        Scene::Shelf => &[(" is to the left of ", true), (" is to the right of ", false)],
        Scene::Vehicles => &[(" is older than ", true), (" is newer than ", false)],
    };
    for (sep, before) in relations {
        if let Some((a, b)) = lower.split_once(sep) {
            let (a, b) = (obj(a)?, obj(b)?);
            return Ok(if *before { CspStatement::Before(a, b) } else { CspStatement::After(a, b) });
        }
    }
    let (subject, k) = match scene {
        Scene::Golf => {
            let (a, p) = lower.split_once(" finished ").ok_or_else(err)?;
            (a, place(p, n).ok_or_else(err)?)
        }
        Scene::Shelf => {
            let (a, p) = lower.split_once(" is the ").ok_or_else(err)?;
            let k = match p {
                "leftmost" => 1,
                "rightmost" => n,
                _ => {
                    if let Some(o) = p.strip_suffix(" from the left") {
                        ordinal_value(o).ok_or_else(err)?
                    } else if let Some(o) = p.strip_suffix(" from the right") {
                        (n + 1).checked_sub(ordinal_value(o).ok_or_else(err)?).ok_or_else(err)?
                    } else {
                        return Err(err());
                    }
                }
            };
            (a, k)
        }
        Scene::Vehicles => {
            let (a, p) = lower.split_once(" is the ").ok_or_else(err)?;
            let k = match p {
                "oldest" => 1,
                "newest" => n,
                _ => {
                    if let Some(o) = p.strip_suffix("-oldest") {
                        ordinal_value(o).ok_or_else(err)?
                    } else if let Some(o) = p.strip_suffix("-newest") {
                        (n + 1).checked_sub(ordinal_value(o).ok_or_else(err)?).ok_or_else(err)?
                    } else {
                        return Err(err());
                    }
                }
            };
            (a, k)
        }
    };
    if out_of_range(k) {
        return Err(CnlError::new(sentence, format!("position {k} is outside 1..{n}")));
    }
    Ok(CspStatement::At(obj(subject)?, k))
}

/// Guesses the scene from the wording of a statement.
pub fn scene_of(text: &str) -> Option<Scene> {
    let t = text.to_lowercase();
    if t.contains(" finished ") {
        Some(Scene::Golf)
    } else if t.contains(" book") || t.contains("leftmost") || t.contains("rightmost") || t.contains(" to the left") || t.contains(" to the right") || t.contains("from the left") || t.contains("from the right") {
        Some(Scene::Shelf)
    } else if t.contains("older") || t.contains("newer") || t.contains("oldest") || t.contains("newest") {
        Some(Scene::Vehicles)
    } else {
        None
    }
}
