//! Satisfy-only constraint modelling subset.
//!
//! ```text
//! include "globals.mzn";
//! enum GOLFER = {Rob, Ada, Dan, Joe, Mel};
//! array[GOLFER] of var 1..5: pos;
//! constraint all_different([pos[g] | g in GOLFER]);
//! constraint pos[Ada] < pos[Mel];
//! solve satisfy;
//! ```
//!
//! Supported items: `include` (ignored), `enum`, enum-indexed `array ... of var`,
//! scalar `var lo..hi: x`, `constraint` with `all_different` or a comparison
//! (optionally joined by `/\`), `solve satisfy`, and `output` (ignored).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::diag::{DiagSink, Diagnostics};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspEnum {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspVar {
    pub name: String,
    /// Index enum for arrays; `None` for scalar variables.
    pub index: Option<String>,
    pub lo: i64,
    pub hi: i64,
}

/// Reference to one decision variable: `pos[Ada]` or `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarRef {
    pub array: String,
    pub index: Option<String>,
}

impl VarRef {
    pub fn element(array: &str, index: &str) -> Self {
        VarRef { array: array.to_string(), index: Some(index.to_string()) }
    }

    pub fn scalar(name: &str) -> Self {
        VarRef { array: name.to_string(), index: None }
    }

    /// Name used in solution assignments.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            Some(i) => write!(f, "{}[{}]", self.array, i),
            None => f.write_str(&self.array),
        }
    }
}

/// `var + offset` or a plain integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CspExpr {
    Var { var: VarRef, offset: i64 },
    Int(i64),
}

impl CspExpr {
    pub fn var(v: VarRef) -> Self {
        CspExpr::Var { var: v, offset: 0 }
    }

    pub fn eval(&self, lookup: impl Fn(&VarRef) -> Option<i64>) -> Option<i64> {
        match self {
            CspExpr::Var { var, offset } => lookup(var)?.checked_add(*offset),
            CspExpr::Int(n) => Some(*n),
        }
    }

    pub fn var_ref(&self) -> Option<&VarRef> {
        match self {
            CspExpr::Var { var, .. } => Some(var),
            CspExpr::Int(_) => None,
        }
    }
}

impl fmt::Display for CspExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CspExpr::Var { var, offset } if *offset > 0 => write!(f, "{var} + {offset}"),
            CspExpr::Var { var, offset } if *offset < 0 => write!(f, "{var} - {}", offset.unsigned_abs()),
            CspExpr::Var { var, .. } => write!(f, "{var}"),
            CspExpr::Int(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn holds<T: PartialOrd>(self, a: T, b: T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllDiffArg {
    /// `[pos[g] | g in GOLFER]`
    Comprehension { array: String, binder: String, domain: String },
    /// `pos`
    Array(String),
    /// `[pos[A], pos[B]]`
    List(Vec<VarRef>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CspConstraint {
    AllDifferent(AllDiffArg),
    Compare { lhs: CspExpr, op: CmpOp, rhs: CspExpr },
}

impl CspConstraint {
    pub fn compare(lhs: CspExpr, op: CmpOp, rhs: CspExpr) -> Self {
        CspConstraint::Compare { lhs, op, rhs }
    }
}

impl fmt::Display for CspConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CspConstraint::AllDifferent(AllDiffArg::Array(array)) => write!(f, "all_different({array})"),
            CspConstraint::AllDifferent(AllDiffArg::Comprehension { array, binder, domain }) => {
                write!(f, "all_different([{array}[{binder}] | {binder} in {domain}])")
            }
            CspConstraint::AllDifferent(AllDiffArg::List(vs)) => {
                let vs: Vec<String> = vs.iter().map(ToString::to_string).collect();
                write!(f, "all_different([{}])", vs.join(", "))
            }
            CspConstraint::Compare { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspModel {
    pub includes: Vec<String>,
    pub enums: Vec<CspEnum>,
    pub vars: Vec<CspVar>,
    pub constraints: Vec<CspConstraint>,
}

impl CspModel {
    pub fn enum_named(&self, name: &str) -> Option<&CspEnum> {
        self.enums.iter().find(|e| e.name == name)
    }

    pub fn var_named(&self, name: &str) -> Option<&CspVar> {
        self.vars.iter().find(|v| v.name == name)
    }

    /// Decision variables flattened in declaration order (array elements in
    /// enum-member order) with their domains.
    pub fn flat_vars(&self) -> Vec<(VarRef, i64, i64)> {
        let mut out = Vec::new();
        for v in &self.vars {
            match &v.index {
                Some(e) => {
                    for m in self.enum_named(e).map(|e| e.members.as_slice()).unwrap_or(&[]) {
                        out.push((VarRef::element(&v.name, m), v.lo, v.hi));
                    }
                }
                None => out.push((VarRef::scalar(&v.name), v.lo, v.hi)),
            }
        }
        out
    }

    /// All enum members, in declaration order.
    pub fn members(&self) -> impl Iterator<Item = &str> {
        self.enums.iter().flat_map(|e| e.members.iter().map(String::as_str))
    }

    /// Expands every all_different into its list of variables.
    pub fn all_different_groups(&self) -> Vec<Vec<VarRef>> {
        self.constraints
            .iter()
            .filter_map(|c| match c {
                CspConstraint::AllDifferent(AllDiffArg::List(vs)) => Some(vs.clone()),
                CspConstraint::AllDifferent(
                    AllDiffArg::Array(array) | AllDiffArg::Comprehension { array, .. },
                ) => {
                    let v = self.var_named(array)?;
                    let e = self.enum_named(v.index.as_ref()?)?;
                    Some(e.members.iter().map(|m| VarRef::element(array, m)).collect())
                }
                CspConstraint::Compare { .. } => None,
            })
            .collect()
    }
}

impl fmt::Display for CspModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for inc in &self.includes {
            writeln!(f, "include \"{inc}\";")?;
        }
        for e in &self.enums {
            writeln!(f, "enum {} = {{{}}};", e.name, e.members.join(", "))?;
        }
        for v in &self.vars {
            match &v.index {
                Some(i) => writeln!(f, "array[{}] of var {}..{}: {};", i, v.lo, v.hi, v.name)?,
                None => writeln!(f, "var {}..{}: {};", v.lo, v.hi, v.name)?,
            }
        }
        for c in &self.constraints {
            writeln!(f, "constraint {c};")?;
        }
        writeln!(f, "solve satisfy;")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
    Bad(String),
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Bad(s) => s.clone(),
            Tok::Int(n) => n.to_string(),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => s.to_string(),
        }
    }
}

const SYMBOLS: &[&str] = &[
    "/\\", "..", "<=", ">=", "==", "!=", "≤", "≥", "≠", "[", "]", "(", ")", "{", "}", ",", ":", ";", "|", "<", ">", "=",
    "+", "-",
];

fn tokenize(src: &str, sink: &mut DiagSink<'_>) -> Vec<(Tok, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().expect("non-empty");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c == '%' {
            i += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        if let Some(body) = rest.strip_prefix("/*") {
            match body.find("*/") {
                Some(j) => i += j + 4,
                None => {
                    sink.push(i, "unterminated block comment", "`*/`", "");
                    break;
                }
            }
            continue;
        }
        if c == '"' {
            match rest[1..].find(['"', '\n']) {
                Some(j) if rest.as_bytes()[1 + j] == b'"' => {
                    out.push((Tok::Str(rest[1..1 + j].to_string()), i));
                    i += j + 2;
                }
                _ => {
                    sink.push(i, "unterminated string", "`\"`", "");
                    break;
                }
            }
            continue;
        }
        if c.is_ascii_digit() {
            let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            match rest[..len].parse::<i64>() {
                Ok(n) if n <= 1_000_000_000 => out.push((Tok::Int(n), i)),
                _ => {
                    sink.push(i, "integer literal out of range", "integer up to 10^9", &rest[..len]);
                    out.push((Tok::Int(0), i));
                }
            }
            i += len;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
            out.push((Tok::Ident(rest[..len].to_string()), i));
            i += len;
            continue;
        }
        for s in SYMBOLS {
            if rest.starts_with(s) {
                out.push((Tok::Sym(s), i));
                i += s.len();
                continue 'outer;
            }
        }
        out.push((Tok::Bad(c.to_string()), i));
        i += c.len_utf8();
    }
    out
}

struct Parser<'s, 'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    sink: &'s mut DiagSink<'a>,
}

type PResult<T> = Result<T, ()>;

/// Constraint item before symbol resolution, with its source offset.
struct RawConstraint {
    constraint: CspConstraint,
    offset: usize,
    /// Offset of the comprehension domain, if any.
    domain_offset: usize,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn fail<T>(&mut self, message: impl Into<String>, expected: &str) -> PResult<T> {
        let found = self.peek().map(Tok::text).unwrap_or_else(|| "end of input".into());
        let off = self.offset();
        self.sink.push(off, message, expected, found);
        Err(())
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.peek() == Some(&Tok::Sym(match_sym(s))) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"), &format!("`{s}`"))
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek() == Some(&Tok::Sym(match_sym(s))) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, usize)> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), off)) => {
                let r = (s.clone(), *off);
                self.pos += 1;
                Ok(r)
            }
            _ => self.fail(format!("expected {what}"), what),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => self.fail("expected an integer", "integer literal"),
        }
    }

    /// Skips to just past the next `;` after an error.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            let end = *t == Tok::Sym(";");
            self.pos += 1;
            if end {
                break;
            }
        }
    }

    fn var_ref(&mut self) -> PResult<VarRef> {
        let (name, _) = self.ident("variable")?;
        if self.eat_sym("[") {
            let (idx, _) = self.ident("enum member")?;
            self.sym("]")?;
            Ok(VarRef { array: name, index: Some(idx) })
        } else {
            Ok(VarRef { array: name, index: None })
        }
    }

    fn expr(&mut self) -> PResult<CspExpr> {
        let mut e = match self.peek() {
            Some(Tok::Int(_)) | Some(Tok::Sym("-")) => CspExpr::Int(self.int()?),
            Some(Tok::Ident(_)) => {
                if let Some(Tok::Ident(w)) = self.peek() {
                    if matches!(w.as_str(), "abs" | "sum" | "max" | "min" | "forall" | "exists" | "if" | "not") {
                        let w = w.clone();
                        return self.fail(format!("unsupported construct `{w}` in constraint"), "variable or integer");
                    }
                }
                CspExpr::var(self.var_ref()?)
            }
            _ => return self.fail("expected an expression", "variable or integer"),
        };
        loop {
            let sign = if self.eat_sym("+") {
                1
            } else if self.eat_sym("-") {
                -1
            } else {
                break;
            };
            if matches!(self.peek(), Some(Tok::Ident(_))) {
                return self.fail("only one variable per side is supported", "integer offset");
            }
            let k = self.int()?.saturating_mul(sign);
            e = match e {
                CspExpr::Int(n) => CspExpr::Int(n.saturating_add(k)),
                CspExpr::Var { var, offset } => CspExpr::Var { var, offset: offset.saturating_add(k) },
            };
        }
        Ok(e)
    }

    fn cmp_op(&mut self) -> PResult<CmpOp> {
        let op = match self.peek() {
            Some(Tok::Sym("<")) => CmpOp::Lt,
            Some(Tok::Sym("<=")) | Some(Tok::Sym("≤")) => CmpOp::Le,
            Some(Tok::Sym(">")) => CmpOp::Gt,
            Some(Tok::Sym(">=")) | Some(Tok::Sym("≥")) => CmpOp::Ge,
            Some(Tok::Sym("=")) | Some(Tok::Sym("==")) => CmpOp::Eq,
            Some(Tok::Sym("!=")) | Some(Tok::Sym("≠")) => CmpOp::Ne,
            _ => return self.fail("expected a comparison", "one of < <= > >= = !="),
        };
        self.pos += 1;
        Ok(op)
    }

    fn constraint(&mut self, out: &mut Vec<RawConstraint>) -> PResult<()> {
        loop {
            let offset = self.offset();
            let is_alldiff = matches!(self.peek(), Some(Tok::Ident(w)) if w == "all_different" || w == "alldifferent");
            if is_alldiff {
                self.pos += 1;
                self.sym("(")?;
                let mut domain_offset = offset;
                let arg = if self.eat_sym("[") {
                    let first = self.var_ref()?;
                    if self.eat_sym("|") {
                        let (binder, _) = self.ident("generator variable")?;
                        match self.peek() {
                            Some(Tok::Ident(w)) if w == "in" => self.pos += 1,
                            _ => return self.fail("expected `in`", "`in`"),
                        }
                        let (domain, dom_off) = self.ident("enum name")?;
                        domain_offset = dom_off;
                        self.sym("]")?;
                        if first.index.as_deref() != Some(binder.as_str()) {
                            self.sink.push(offset, "comprehension must index the array by its generator variable", "", "");
                            return Err(());
                        }
                        AllDiffArg::Comprehension { array: first.array, binder, domain }
                    } else {
                        let mut list = vec![first];
                        while self.eat_sym(",") {
                            list.push(self.var_ref()?);
                        }
                        self.sym("]")?;
                        AllDiffArg::List(list)
                    }
                } else {
                    AllDiffArg::Array(self.ident("array name")?.0)
                };
                self.sym(")")?;
                out.push(RawConstraint { constraint: CspConstraint::AllDifferent(arg), offset, domain_offset });
            } else {
                let lhs = self.expr()?;
                let op = self.cmp_op()?;
                let rhs = self.expr()?;
                out.push(RawConstraint { constraint: CspConstraint::Compare { lhs, op, rhs }, offset, domain_offset: offset });
            }
            if !self.eat_sym("/\\") {
                return Ok(());
            }
        }
    }
}

fn match_sym(s: &str) -> &'static str {
    SYMBOLS.iter().copied().find(|x| *x == s).expect("known symbol")
}

#[derive(Default)]
struct Items {
    includes: Vec<String>,
    enums: Vec<(CspEnum, usize)>,
    vars: Vec<(CspVar, usize)>,
    constraints: Vec<RawConstraint>,
    solves: Vec<usize>,
}

fn parse_item(p: &mut Parser<'_, '_>, items: &mut Items) -> PResult<()> {
    let offset = p.offset();
    let word = match p.peek() {
        Some(Tok::Ident(w)) => w.clone(),
        _ => return p.fail("expected an item", "`enum`, `array`, `var`, `constraint` or `solve`"),
    };
    p.pos += 1;
    match word.as_str() {
        "include" => match p.peek().cloned() {
            Some(Tok::Str(s)) => {
                p.pos += 1;
                items.includes.push(s);
            }
            _ => return p.fail("expected a file name", "string literal"),
        },
        "enum" => {
            let (name, _) = p.ident("enum name")?;
            p.sym("=")?;
            p.sym("{")?;
            let mut members = Vec::new();
            if !p.eat_sym("}") {
                loop {
                    members.push(p.ident("enum member")?.0);
                    if p.eat_sym("}") {
                        break;
                    }
                    p.sym(",")?;
                }
            }
            items.enums.push((CspEnum { name, members }, offset));
        }
        "array" => {
            p.sym("[")?;
            if matches!(p.peek(), Some(Tok::Int(_))) {
                return p.fail("arrays must be indexed by an enum", "enum name");
            }
            let (index, _) = p.ident("enum name")?;
            p.sym("]")?;
            match p.peek() {
                Some(Tok::Ident(w)) if w == "of" => p.pos += 1,
                _ => return p.fail("expected `of`", "`of`"),
            }
            match p.peek() {
                Some(Tok::Ident(w)) if w == "var" => p.pos += 1,
                _ => return p.fail("only decision-variable arrays are supported", "`var`"),
            }
            let lo = p.int()?;
            p.sym("..")?;
            let hi = p.int()?;
            p.sym(":")?;
            let (name, _) = p.ident("array name")?;
            items.vars.push((CspVar { name, index: Some(index), lo, hi }, offset));
        }
        "var" => {
            let lo = p.int()?;
            p.sym("..")?;
            let hi = p.int()?;
            p.sym(":")?;
            let (name, _) = p.ident("variable name")?;
            items.vars.push((CspVar { name, index: None, lo, hi }, offset));
        }
        "constraint" => p.constraint(&mut items.constraints)?,
        "solve" => match p.peek() {
            Some(Tok::Ident(w)) if w == "satisfy" => {
                p.pos += 1;
                items.solves.push(offset);
            }
            Some(Tok::Ident(w)) if w == "minimize" || w == "maximize" => {
                return p.fail("satisfy-only subset: optimization objectives are not supported", "`satisfy`");
            }
            _ => return p.fail("expected `satisfy`", "`satisfy`"),
        },
        "output" => {
            while !matches!(p.peek(), None | Some(Tok::Sym(";"))) {
                p.pos += 1;
            }
        }
        other => {
            p.pos -= 1;
            return p.fail(format!("unsupported construct `{other}`"), "`enum`, `array`, `var`, `constraint` or `solve`");
        }
    }
    p.sym(";")
}

fn resolve(items: &Items, sink: &mut DiagSink<'_>) {
    let mut member_of: HashMap<&str, &str> = HashMap::new();
    let mut enum_names = HashSet::new();
    for (e, off) in &items.enums {
        if !enum_names.insert(e.name.as_str()) {
            sink.error(*off, format!("enum `{}` declared twice", e.name));
        }
        if e.members.is_empty() {
            sink.error(*off, format!("enum `{}` is empty", e.name));
        }
        for m in &e.members {
            if member_of.insert(m, &e.name).is_some() {
                sink.error(*off, format!("enum member `{m}` declared twice"));
            }
        }
    }
    let mut vars: HashMap<&str, &CspVar> = HashMap::new();
    for (v, off) in &items.vars {
        if vars.insert(&v.name, v).is_some() || enum_names.contains(v.name.as_str()) || member_of.contains_key(v.name.as_str()) {
            sink.error(*off, format!("name `{}` declared twice", v.name));
        }
        if v.lo > v.hi {
            sink.error(*off, format!("empty range {}..{}", v.lo, v.hi));
        }
        if let Some(i) = &v.index {
            if !enum_names.contains(i.as_str()) {
                sink.error(*off, format!("undeclared enum `{i}`"));
            }
        }
    }
    let check_ref = |r: &VarRef, off: usize, sink: &mut DiagSink<'_>| match (vars.get(r.array.as_str()), &r.index) {
        (None, _) => sink.error(off, format!("undeclared variable `{}`", r.array)),
        (Some(v), None) if v.index.is_some() => sink.error(off, format!("array `{}` used without an index", r.array)),
        (Some(v), Some(_)) if v.index.is_none() => sink.error(off, format!("scalar `{}` cannot be indexed", r.array)),
        (Some(v), Some(i)) => match member_of.get(i.as_str()) {
            None => sink.error(off, format!("undeclared enum member `{i}`")),
            Some(e) if Some(*e) != v.index.as_deref() => {
                sink.error(off, format!("`{i}` is not a member of `{}`", v.index.as_deref().unwrap_or("")))
            }
            _ => {}
        },
        _ => {}
    };
    for c in &items.constraints {
        match &c.constraint {
            CspConstraint::Compare { lhs, rhs, .. } => {
                for r in [lhs, rhs].into_iter().filter_map(CspExpr::var_ref) {
                    check_ref(r, c.offset, sink);
                }
            }
            CspConstraint::AllDifferent(AllDiffArg::List(vs)) => {
                for r in vs {
                    check_ref(r, c.offset, sink);
                }
            }
            CspConstraint::AllDifferent(AllDiffArg::Array(array) | AllDiffArg::Comprehension { array, .. }) => {
                match vars.get(array.as_str()) {
                    None => sink.error(c.offset, format!("undeclared variable `{array}`")),
                    Some(v) if v.index.is_none() => sink.error(c.offset, format!("`{array}` is not an array")),
                    Some(v) => {
                        if let CspConstraint::AllDifferent(AllDiffArg::Comprehension { domain, .. }) = &c.constraint {
                            if v.index.as_deref() != Some(domain.as_str()) {
                                sink.error(c.domain_offset, format!("generator domain `{domain}` does not index `{array}`"));
                            }
                        }
                    }
                }
            }
        }
    }
    match items.solves.len() {
        0 => sink.push(sink_end(items), "missing solve item", "`solve satisfy;`", ""),
        1 => {}
        _ => sink.error(items.solves[1], "more than one solve item"),
    }
}

fn sink_end(items: &Items) -> usize {
    items.constraints.last().map_or(0, |c| c.offset)
}

pub fn parse_csp(text: &str) -> Result<CspModel, Diagnostics> {
    let mut sink = DiagSink::new(text);
    let toks = tokenize(text, &mut sink);
    let mut items = Items::default();
    {
        let mut p = Parser { toks, pos: 0, end: text.len(), sink: &mut sink };
        while p.pos < p.toks.len() {
            if parse_item(&mut p, &mut items).is_err() {
                p.recover();
            }
        }
    }
    if sink.is_empty() {
        resolve(&items, &mut sink);
    }
    if !sink.is_empty() {
        return Err(sink.into_diagnostics());
    }
    Ok(CspModel {
        includes: items.includes,
        enums: items.enums.into_iter().map(|(e, _)| e).collect(),
        vars: items.vars.into_iter().map(|(v, _)| v).collect(),
        constraints: items.constraints.into_iter().map(|c| c.constraint).collect(),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub const GOLFERS: &str = r#"include "globals.mzn";

% Define the golfers
enum GOLFER = {Rob, Ada, Dan, Joe, Mel};

% Each golfer has a unique finishing position from 1 (first) to 5 (last)
array[GOLFER] of var 1..5: pos;

% All golfers must finish in distinct positions
constraint all_different([pos[g] | g in GOLFER]);

% Ada finished above Mel
constraint pos[Ada] < pos[Mel];

% Mel finished above Dan
constraint pos[Mel] < pos[Dan];

% Joe finished below Dan
constraint pos[Joe] > pos[Dan];

% Ada finished second
constraint pos[Ada] = 2;

solve satisfy;
"#;

    #[test]
    fn parses_golfer_model() {
        let m = parse_csp(GOLFERS).unwrap();
        assert_eq!(m.enums.len(), 1);
        assert_eq!(m.enums[0].members.len(), 5);
        assert_eq!(m.vars, vec![CspVar { name: "pos".into(), index: Some("GOLFER".into()), lo: 1, hi: 5 }]);
        let compares = m.constraints.iter().filter(|c| matches!(c, CspConstraint::Compare { .. })).count();
        let alldiff = m.constraints.iter().filter(|c| matches!(c, CspConstraint::AllDifferent(_))).count();
        assert_eq!((compares, alldiff), (4, 1));
        assert_eq!(
            m.constraints[4],
            CspConstraint::compare(CspExpr::var(VarRef::element("pos", "Ada")), CmpOp::Eq, CspExpr::Int(2))
        );
        assert_eq!(m.flat_vars().len(), 5);
    }

    #[test]
    fn printer_round_trips() {
        let m = parse_csp(GOLFERS).unwrap();
        assert_eq!(parse_csp(&m.to_string()).unwrap(), m);
        let src = "enum B = {X, Y};\narray[B] of var 1..2: pos;\nvar 0..3: k;\nconstraint pos[X] + 1 = pos[Y] /\\ k != 2;\nconstraint all_different([pos[X], pos[Y]]);\nsolve satisfy;\n";
        let m = parse_csp(src).unwrap();
        assert_eq!(m.constraints.len(), 3);
        assert_eq!(parse_csp(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn undeclared_member_is_reported() {
        let d = parse_csp(&GOLFERS.replace("pos[Ada] = 2", "pos[Bob] = 2")).unwrap_err();
        assert!(d.first().message.contains("undeclared enum member `Bob`"), "{d}");
        assert_eq!(d.first().line, 22);
    }

    #[test]
    fn optimization_is_rejected() {
        let d = parse_csp(&GOLFERS.replace("solve satisfy", "solve minimize pos[Rob]")).unwrap_err();
        assert!(d.first().message.contains("satisfy-only subset"), "{d}");
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let d = parse_csp(&GOLFERS.replace("pos[Ada] = 2", "abs(pos[Ada] - pos[Rob]) = 2")).unwrap_err();
        assert!(d.first().message.contains("`abs`"), "{d}");
        let d = parse_csp("int: n = 3;\nsolve satisfy;").unwrap_err();
        assert!(d.first().message.contains("unsupported construct `int`"), "{d}");
    }

    #[test]
    fn missing_solve_is_reported() {
        let d = parse_csp(&GOLFERS.replace("solve satisfy;", "")).unwrap_err();
        assert!(d.first().message.contains("missing solve"), "{d}");
    }
}
