//! Logic-programming language: predicate declarations, ground facts, Horn-style
//! rules with a trailing boolean slot, and one query.
//!
//! ```text
//! Predicates:
//! dumpus($x, bool) ::: Is x a dumpus?
//! Facts:
//! dumpus(Stella, True) ::: Stella is a dumpus.
//! Rules:
//! dumpus($x, True) >>> red($x, False) ::: Every dumpus is not red.
//! Query:
//! red(Stella, False) ::: Stella is not red.
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::diag::{lines_with_offsets, split_gloss, DiagSink, Diagnostics};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LpTerm {
    /// Variable name without the leading `$`.
    Var(String),
    Const(String),
}

impl fmt::Display for LpTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpTerm::Var(v) => write!(f, "${v}"),
            LpTerm::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LpAtom {
    pub predicate: String,
    pub args: Vec<LpTerm>,
    pub value: bool,
}

impl LpAtom {
    pub fn ground(predicate: &str, args: &[&str], value: bool) -> Self {
        LpAtom {
            predicate: predicate.to_string(),
            args: args.iter().map(|a| LpTerm::Const(a.to_string())).collect(),
            value,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|a| matches!(a, LpTerm::Const(_)))
    }

    pub fn negated(&self) -> Self {
        LpAtom { value: !self.value, ..self.clone() }
    }

    fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            LpTerm::Var(v) => Some(v.as_str()),
            LpTerm::Const(_) => None,
        })
    }
}

impl fmt::Display for LpAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for a in &self.args {
            write!(f, "{a}, ")?;
        }
        write!(f, "{})", if self.value { "True" } else { "False" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpPredicate {
    pub name: String,
    /// Parameter names before the boolean slot, e.g. `["x"]` for `dumpus($x, bool)`.
    pub params: Vec<String>,
    pub gloss: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpFact {
    pub atom: LpAtom,
    pub gloss: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpRule {
    pub antecedent: Vec<LpAtom>,
    pub consequent: LpAtom,
    pub gloss: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpProgram {
    pub predicates: Vec<LpPredicate>,
    pub facts: Vec<LpFact>,
    pub rules: Vec<LpRule>,
    pub query: LpFact,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Predicates,
    Facts,
    Rules,
    Query,
}

impl Section {
    fn header(line: &str) -> Option<Section> {
        match line.trim() {
            "Predicates:" => Some(Section::Predicates),
            "Facts:" => Some(Section::Facts),
            "Rules:" => Some(Section::Rules),
            "Query:" => Some(Section::Query),
            _ => None,
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, base: usize) -> Self {
        Cursor { src, pos: 0, base }
    }

    fn offset(&self) -> usize {
        self.base + self.pos
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn found(&self) -> String {
        self.src[self.pos..].trim().chars().take(20).collect()
    }
}

/// Raw atom before the boolean slot is split off.
struct RawAtom {
    predicate: String,
    args: Vec<LpTerm>,
    offset: usize,
}

fn parse_raw_atom(cur: &mut Cursor<'_>, sink: &mut DiagSink<'_>) -> Option<RawAtom> {
    cur.skip_ws();
    let offset = cur.offset();
    let Some(name) = cur.ident() else {
        sink.push(cur.offset(), "malformed atom", "predicate name", cur.found());
        return None;
    };
    if !cur.eat("(") {
        sink.push(cur.offset(), "malformed atom", "`(`", cur.found());
        return None;
    }
    let mut args = Vec::new();
    loop {
        cur.skip_ws();
        let is_var = cur.peek() == Some('$');
        if is_var {
            cur.pos += 1;
        }
        let Some(id) = cur.ident() else {
            sink.push(cur.offset(), "malformed argument", "term", cur.found());
            return None;
        };
        args.push(if is_var { LpTerm::Var(id.to_string()) } else { LpTerm::Const(id.to_string()) });
        if cur.eat(",") {
            continue;
        }
        if cur.eat(")") {
            break;
        }
        sink.push(cur.offset(), "malformed argument list", "`,` or `)`", cur.found());
        return None;
    }
    Some(RawAtom { predicate: name.to_string(), args, offset })
}

fn finish_atom(raw: RawAtom, sink: &mut DiagSink<'_>) -> Option<LpAtom> {
    let mut args = raw.args;
    let value = match args.pop() {
        Some(LpTerm::Const(c)) if c == "True" => true,
        Some(LpTerm::Const(c)) if c == "False" => false,
        other => {
            let found = other.map(|t| t.to_string()).unwrap_or_default();
            sink.push(raw.offset, "last argument must be the boolean slot", "`True` or `False`", found);
            return None;
        }
    };
    Some(LpAtom { predicate: raw.predicate, args, value })
}

fn parse_atom_text(code: &str, base: usize, sink: &mut DiagSink<'_>) -> Option<LpAtom> {
    let mut cur = Cursor::new(code, base);
    let raw = parse_raw_atom(&mut cur, sink)?;
    if !cur.at_end() {
        sink.push(cur.offset(), "trailing text after atom", "end of line", cur.found());
        return None;
    }
    finish_atom(raw, sink)
}

fn parse_declaration(code: &str, base: usize, sink: &mut DiagSink<'_>) -> Option<(String, Vec<String>)> {
    let mut cur = Cursor::new(code, base);
    let raw = parse_raw_atom(&mut cur, sink)?;
    if !cur.at_end() {
        sink.push(cur.offset(), "trailing text after declaration", "end of line", cur.found());
        return None;
    }
    let mut args = raw.args;
    match args.pop() {
        Some(LpTerm::Const(c)) if c == "bool" => {}
        other => {
            let found = other.map(|t| t.to_string()).unwrap_or_default();
            sink.push(raw.offset, "predicate declaration must end with the boolean slot", "`bool`", found);
            return None;
        }
    }
    let mut params = Vec::new();
    for a in args {
        match a {
            LpTerm::Var(v) => params.push(v),
            LpTerm::Const(c) => {
                sink.push(raw.offset, "declaration parameters must be variables", "`$name`", c);
                return None;
            }
        }
    }
    Some((raw.predicate, params))
}

fn parse_rule(code: &str, base: usize, sink: &mut DiagSink<'_>) -> Option<(Vec<LpAtom>, LpAtom)> {
    let Some(arrow) = code.find(">>>") else {
        sink.push(base, "rule without `>>>`", "`>>>`", code.trim());
        return None;
    };
    let (lhs, rhs) = (&code[..arrow], &code[arrow + 3..]);
    let mut antecedent = Vec::new();
    let mut offset = 0;
    for part in lhs.split("&&") {
        if part.trim().is_empty() {
            sink.push(base + offset, "empty condition in rule body", "atom", "");
            return None;
        }
        antecedent.push(parse_atom_text(part, base + offset, sink)?);
        offset += part.len() + 2;
    }
    let consequent = parse_atom_text(rhs, base + arrow + 3, sink)?;
    Some((antecedent, consequent))
}

/// Parses an LP program, reporting every malformed line.
pub fn parse_lp(text: &str) -> Result<LpProgram, Diagnostics> {
    let mut sink = DiagSink::new(text);
    let mut section: Option<Section> = None;
    let mut seen: Vec<Section> = Vec::new();
    let mut predicates: Vec<(LpPredicate, usize)> = Vec::new();
    let mut facts: Vec<(LpFact, usize)> = Vec::new();
    let mut rules: Vec<(LpRule, usize)> = Vec::new();
    let mut queries: Vec<(LpFact, usize)> = Vec::new();

    for (offset, line) in lines_with_offsets(text) {
        if line.trim().is_empty() {
            continue;
        }
        if let Some(next) = Section::header(line) {
            if seen.contains(&next) {
                sink.error(offset, format!("duplicate `{}` section", line.trim()));
            } else if seen.last().is_some_and(|&last| (last as u8) > (next as u8)) {
                sink.error(offset, format!("section `{}` out of order", line.trim()));
            }
            seen.push(next);
            section = Some(next);
            continue;
        }
        let (code, gloss) = split_gloss(line);
        match section {
            None => sink.push(offset, "statement outside any section", "`Predicates:`", line.trim()),
            Some(Section::Predicates) => {
                if let Some((name, params)) = parse_declaration(code, offset, &mut sink) {
                    predicates.push((LpPredicate { name, params, gloss }, offset));
                }
            }
            Some(Section::Facts) => {
                if let Some(atom) = parse_atom_text(code, offset, &mut sink) {
                    facts.push((LpFact { atom, gloss }, offset));
                }
            }
            Some(Section::Rules) => {
                if let Some((antecedent, consequent)) = parse_rule(code, offset, &mut sink) {
                    rules.push((LpRule { antecedent, consequent, gloss }, offset));
                }
            }
            Some(Section::Query) => {
                if let Some(atom) = parse_atom_text(code, offset, &mut sink) {
                    queries.push((LpFact { atom, gloss }, offset));
                }
            }
        }
    }

    if !seen.contains(&Section::Predicates) {
        sink.push(0, "missing section", "`Predicates:`", "");
    }
    if !seen.contains(&Section::Query) {
        sink.push(text.len(), "missing section", "`Query:`", "");
    } else if queries.is_empty() && sink.is_empty() {
        sink.push(text.len(), "empty `Query:` section", "one query atom", "");
    } else if queries.len() > 1 {
        sink.error(queries[1].1, "more than one query");
    }

    let mut arity: HashMap<&str, usize> = HashMap::new();
    for (p, off) in &predicates {
        if arity.insert(p.name.as_str(), p.params.len()).is_some() {
            sink.error(*off, format!("predicate `{}` declared twice", p.name));
        }
    }
    let check_atom = |atom: &LpAtom, off: usize, sink: &mut DiagSink<'_>| match arity.get(atom.predicate.as_str()) {
        None => sink.error(off, format!("undeclared predicate `{}`", atom.predicate)),
        Some(&n) if n != atom.args.len() => sink.error(
            off,
            format!("predicate `{}` expects {} argument(s) before the boolean slot, got {}", atom.predicate, n, atom.args.len()),
        ),
        _ => {}
    };
    for (f, off) in facts.iter().chain(queries.iter()) {
        check_atom(&f.atom, *off, &mut sink);
        if !f.atom.is_ground() {
            sink.error(*off, format!("`{}` must be ground", f.atom));
        }
    }
    for (r, off) in &rules {
        for a in r.antecedent.iter().chain(std::iter::once(&r.consequent)) {
            check_atom(a, *off, &mut sink);
        }
        let bound: BTreeSet<&str> = r.antecedent.iter().flat_map(LpAtom::vars).collect();
        for v in r.consequent.vars() {
            if !bound.contains(v) {
                sink.error(*off, format!("variable `${v}` in rule head does not occur in the rule body"));
            }
        }
    }

    if !sink.is_empty() {
        return Err(sink.into_diagnostics());
    }
    let query = queries.into_iter().next().map(|(q, _)| q).expect("query checked above");
    Ok(LpProgram {
        predicates: predicates.into_iter().map(|(p, _)| p).collect(),
        facts: facts.into_iter().map(|(f, _)| f).collect(),
        rules: rules.into_iter().map(|(r, _)| r).collect(),
        query,
    })
}

fn gloss_suffix(g: &Option<String>) -> String {
    g.as_ref().map(|g| format!(" ::: {g}")).unwrap_or_default()
}

impl fmt::Display for LpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Predicates:")?;
        for p in &self.predicates {
            write!(f, "{}(", p.name)?;
            for param in &p.params {
                write!(f, "${param}, ")?;
            }
            writeln!(f, "bool){}", gloss_suffix(&p.gloss))?;
        }
        writeln!(f, "\nFacts:")?;
        for fact in &self.facts {
            writeln!(f, "{}{}", fact.atom, gloss_suffix(&fact.gloss))?;
        }
        writeln!(f, "\nRules:")?;
        for r in &self.rules {
            let body: Vec<String> = r.antecedent.iter().map(ToString::to_string).collect();
            writeln!(f, "{} >>> {}{}", body.join(" && "), r.consequent, gloss_suffix(&r.gloss))?;
        }
        writeln!(f, "\nQuery:")?;
        writeln!(f, "{}{}", self.query.atom, gloss_suffix(&self.query.gloss))
    }
}
