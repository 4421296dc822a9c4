//! SMT-LIB subset: typed constants, boolean structure over linear comparisons
//! against literals, and a single `(check-sat)`.
//!
//! ```text
//! (declare-const age_in_years Int)
//! (declare-const acute_pancreatitis Bool)
//! (assert (and (> age_in_years 18) acute_pancreatitis))
//! (assert (= age_in_years 57))
//! (check-sat)
//! ```

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::csp::CmpOp;
use super::diag::{DiagSink, Diagnostics};

pub type Rational = Ratio<i128>;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sort {
    Int,
    Real,
    Bool,
}

impl Sort {
    pub fn as_str(self) -> &'static str {
        match self {
            Sort::Int => "Int",
            Sort::Real => "Real",
            Sort::Bool => "Bool",
        }
    }

    pub fn is_numeric(self) -> bool {
        self != Sort::Bool
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmtDecl {
    pub name: String,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SmtTerm {
    Bool(bool),
    Const(String),
    Num(Rational),
    Not(Box<SmtTerm>),
    And(Vec<SmtTerm>),
    Or(Vec<SmtTerm>),
    Implies(Box<SmtTerm>, Box<SmtTerm>),
    /// Equality between boolean terms.
    Iff(Box<SmtTerm>, Box<SmtTerm>),
    /// Numeric comparison; `Eq` prints as `=`, `Ne` as `distinct`.
    Cmp(CmpOp, Box<SmtTerm>, Box<SmtTerm>),
}

impl SmtTerm {
    pub fn konst(name: &str) -> Self {
        SmtTerm::Const(name.to_string())
    }

    pub fn int(n: i128) -> Self {
        SmtTerm::Num(Rational::from_integer(n))
    }

    pub fn cmp(op: CmpOp, a: SmtTerm, b: SmtTerm) -> Self {
        SmtTerm::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn negate(t: SmtTerm) -> Self {
        SmtTerm::Not(Box::new(t))
    }

    pub fn depth(&self) -> usize {
        match self {
            SmtTerm::Bool(_) | SmtTerm::Const(_) | SmtTerm::Num(_) => 1,
            SmtTerm::Not(t) => 1 + t.depth(),
            SmtTerm::And(ts) | SmtTerm::Or(ts) => 1 + ts.iter().map(SmtTerm::depth).max().unwrap_or(0),
            SmtTerm::Implies(a, b) | SmtTerm::Iff(a, b) | SmtTerm::Cmp(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Constants referenced by the term, in first-occurrence order.
    pub fn constants<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            SmtTerm::Const(c) => {
                if !out.contains(&c.as_str()) {
                    out.push(c);
                }
            }
            SmtTerm::Bool(_) | SmtTerm::Num(_) => {}
            SmtTerm::Not(t) => t.constants(out),
            SmtTerm::And(ts) | SmtTerm::Or(ts) => ts.iter().for_each(|t| t.constants(out)),
            SmtTerm::Implies(a, b) | SmtTerm::Iff(a, b) | SmtTerm::Cmp(_, a, b) => {
                a.constants(out);
                b.constants(out);
            }
        }
    }
}

fn is_simple_symbol(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c))
}

fn write_symbol(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_simple_symbol(s) {
        f.write_str(s)
    } else {
        write!(f, "|{s}|")
    }
}

/// Prints a rational as an SMT-LIB literal: `57`, `72.5`, `(/ 1 3)`, `(- 2)`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_negative() {
        return format!("(- {})", format_rational(&-r));
    }
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut den = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    let digits = twos.max(fives);
    if den == 1 && digits <= 30 {
        if let Some(scale) = 10i128.checked_pow(digits) {
            if let Some(scaled) = (r * Rational::from_integer(scale)).to_integer().checked_abs() {
                let s = format!("{:0>width$}", scaled, width = digits as usize + 1);
                let (int, frac) = s.split_at(s.len() - digits as usize);
                return format!("{int}.{frac}");
            }
        }
    }
    format!("(/ {} {})", r.numer(), r.denom())
}

impl fmt::Display for SmtTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmtTerm::Bool(b) => write!(f, "{b}"),
            SmtTerm::Const(c) => write_symbol(f, c),
            SmtTerm::Num(r) => f.write_str(&format_rational(r)),
            SmtTerm::Not(t) => write!(f, "(not {t})"),
            SmtTerm::And(ts) | SmtTerm::Or(ts) => {
                f.write_str(if matches!(self, SmtTerm::And(_)) { "(and" } else { "(or" })?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(")")
            }
            SmtTerm::Implies(a, b) => write!(f, "(=> {a} {b})"),
            SmtTerm::Iff(a, b) => write!(f, "(= {a} {b})"),
            SmtTerm::Cmp(op, a, b) => {
                let op = match op {
                    CmpOp::Ne => "distinct",
                    other => other.as_str(),
                };
                write!(f, "({op} {a} {b})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmtScript {
    pub logic: Option<String>,
    pub decls: Vec<SmtDecl>,
    pub assertions: Vec<SmtTerm>,
}

impl SmtScript {
    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        self.decls.iter().find(|d| d.name == name).map(|d| d.sort)
    }
}

impl fmt::Display for SmtScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.logic {
            writeln!(f, "(set-logic {l})")?;
        }
        for d in &self.decls {
            f.write_str("(declare-const ")?;
            write_symbol(f, &d.name)?;
            writeln!(f, " {})", d.sort.as_str())?;
        }
        for a in &self.assertions {
            writeln!(f, "(assert {a})")?;
        }
        writeln!(f, "(check-sat)")
    }
}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, usize),
    /// Quoted `|symbol|`; never a keyword or literal.
    Quoted(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn offset(&self) -> usize {
        match self {
            Sexp::Atom(_, o) | Sexp::Quoted(_, o) | Sexp::List(_, o) => *o,
        }
    }

    fn text(&self) -> String {
        match self {
            Sexp::Atom(s, _) => s.clone(),
            Sexp::Quoted(s, _) => format!("|{s}|"),
            Sexp::List(items, _) => {
                let inner: Vec<String> = items.iter().map(Sexp::text).collect();
                format!("({})", inner.join(" "))
            }
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items, _) => match items.first() {
                Some(Sexp::Atom(s, _)) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }
}

fn read_sexps(src: &str, sink: &mut DiagSink<'_>) -> Option<Vec<Sexp>> {
    let mut stack: Vec<(Vec<Sexp>, usize)> = vec![(Vec::new(), 0)];
    let mut i = 0;
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().expect("non-empty");
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if c == ';' {
            i += rest.find('\n').unwrap_or(rest.len());
        } else if c == '(' {
            if stack.len() > MAX_DEPTH {
                sink.push(i, "expression nested too deeply", "shallower expression", "(");
                return None;
            }
            stack.push((Vec::new(), i));
            i += 1;
        } else if c == ')' {
            if stack.len() == 1 {
                sink.push(i, "unbalanced parenthesis", "`(` before `)`", ")");
                return None;
            }
            let (items, start) = stack.pop().expect("checked");
            stack.last_mut().expect("root").0.push(Sexp::List(items, start));
            i += 1;
        } else if c == '|' {
            match rest[1..].find('|') {
                Some(j) => {
                    stack.last_mut().expect("root").0.push(Sexp::Quoted(rest[1..1 + j].to_string(), i));
                    i += j + 2;
                }
                None => {
                    sink.push(i, "unterminated quoted symbol", "`|`", "");
                    return None;
                }
            }
        } else if c == '"' {
            match rest[1..].find('"') {
                Some(j) => {
                    stack.last_mut().expect("root").0.push(Sexp::Atom(rest[..j + 2].to_string(), i));
                    i += j + 2;
                }
                None => {
                    sink.push(i, "unterminated string", "`\"`", "");
                    return None;
                }
            }
        } else {
            let len = rest.find(|c: char| c.is_whitespace() || "();|\"".contains(c)).unwrap_or(rest.len());
            stack.last_mut().expect("root").0.push(Sexp::Atom(rest[..len].to_string(), i));
            i += len;
        }
    }
    if stack.len() > 1 {
        let (_, start) = stack.last().expect("non-empty");
        sink.push(*start, "unbalanced parenthesis", "`)`", "end of input");
        return None;
    }
    Some(stack.pop().expect("root").0)
}

/// Parses `57`, `72.5`, `-3` into an exact rational.
fn parse_numeral(s: &str) -> Option<Result<Rational, ()>> {
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() || !body.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) || body.ends_with('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let value = (|| {
        let numer: i128 = digits.parse().ok()?;
        let denom = 10i128.checked_pow(u32::try_from(frac.len()).ok()?)?;
        let r = Rational::new(numer, denom);
        Some(if s.starts_with('-') { -r } else { r })
    })();
    Some(value.ok_or(()))
}

struct Checker<'s, 'a> {
    sorts: HashMap<String, Sort>,
    sink: &'s mut DiagSink<'a>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Bool,
    Num,
}

type CResult<T> = Result<T, ()>;

impl Checker<'_, '_> {
    fn err<T>(&mut self, at: &Sexp, message: impl Into<String>, expected: &str) -> CResult<T> {
        self.sink.push(at.offset(), message, expected, at.text());
        Err(())
    }

    fn literal(&mut self, e: &Sexp) -> CResult<Option<Rational>> {
        match e {
            Sexp::Atom(s, _) => match parse_numeral(s) {
                Some(Ok(r)) => Ok(Some(r)),
                Some(Err(())) => self.err(e, "numeral out of range", "numeral within 128-bit precision"),
                None => Ok(None),
            },
            Sexp::List(items, _) => match (e.head(), items.len()) {
                (Some("-"), 2) => Ok(self.literal(&items[1])?.map(|r| -r)),
                (Some("/"), 3) => {
                    let (Some(n), Some(d)) = (self.literal(&items[1])?, self.literal(&items[2])?) else {
                        return Ok(None);
                    };
                    if d.is_zero() {
                        return self.err(e, "division by zero", "non-zero divisor");
                    }
                    Ok(Some(n / d))
                }
                _ => Ok(None),
            },
            Sexp::Quoted(..) => Ok(None),
        }
    }

    fn term(&mut self, e: &Sexp, depth: usize) -> CResult<(SmtTerm, Ty)> {
        if depth > MAX_DEPTH {
            return self.err(e, "term nested too deeply", "shallower term");
        }
        if let Some(r) = self.literal(e)? {
            return Ok((SmtTerm::Num(r), Ty::Num));
        }
        match e {
            Sexp::Atom(s, _) if s == "true" || s == "false" => Ok((SmtTerm::Bool(s == "true"), Ty::Bool)),
            Sexp::Atom(s, _) | Sexp::Quoted(s, _) => match self.sorts.get(s) {
                Some(sort) => Ok((SmtTerm::Const(s.clone()), if sort.is_numeric() { Ty::Num } else { Ty::Bool })),
                None => self.err(e, format!("undeclared constant `{s}`"), "declared constant"),
            },
            Sexp::List(items, _) => {
                let Some(op) = e.head() else {
                    return self.err(e, "expected an operator application", "(op args...)");
                };
                let args = &items[1..];
                let arity = |n: usize, this: &mut Self| -> CResult<()> {
                    if args.len() != n {
                        this.err(e, format!("`{op}` expects {n} argument(s), got {}", args.len()), "matching arity")
                    } else {
                        Ok(())
                    }
                };
                match op {
                    "not" => {
                        arity(1, self)?;
                        let t = self.bool_arg(&args[0], depth)?;
                        Ok((SmtTerm::negate(t), Ty::Bool))
                    }
                    "and" | "or" => {
                        if args.is_empty() {
                            return self.err(e, format!("`{op}` expects at least 1 argument"), "arguments");
                        }
                        let ts = args.iter().map(|a| self.bool_arg(a, depth)).collect::<CResult<Vec<_>>>()?;
                        Ok((if op == "and" { SmtTerm::And(ts) } else { SmtTerm::Or(ts) }, Ty::Bool))
                    }
                    "=>" => {
                        arity(2, self)?;
                        let a = self.bool_arg(&args[0], depth)?;
                        let b = self.bool_arg(&args[1], depth)?;
                        Ok((SmtTerm::Implies(Box::new(a), Box::new(b)), Ty::Bool))
                    }
                    "=" | "distinct" | "<" | "<=" | ">" | ">=" => {
                        arity(2, self)?;
                        let (a, ta) = self.term(&args[0], depth + 1)?;
                        let (b, tb) = self.term(&args[1], depth + 1)?;
                        if ta != tb {
                            return self.err(e, format!("`{op}` applied to a boolean and a number"), "operands of one sort");
                        }
                        if ta == Ty::Bool {
                            return match op {
                                "=" => Ok((SmtTerm::Iff(Box::new(a), Box::new(b)), Ty::Bool)),
                                "distinct" => Ok((SmtTerm::negate(SmtTerm::Iff(Box::new(a), Box::new(b))), Ty::Bool)),
                                _ => self.err(e, format!("`{op}` expects numeric operands"), "Int or Real terms"),
                            };
                        }
                        let cmp = match op {
                            "=" => CmpOp::Eq,
                            "distinct" => CmpOp::Ne,
                            "<" => CmpOp::Lt,
                            "<=" => CmpOp::Le,
                            ">" => CmpOp::Gt,
                            _ => CmpOp::Ge,
                        };
                        Ok((SmtTerm::cmp(cmp, a, b), Ty::Bool))
                    }
                    "+" | "-" | "*" | "/" | "ite" | "let" | "forall" | "exists" | "div" | "mod" | "abs" | "to_real" => {
                        self.err(e, format!("operator `{op}` is outside the supported fragment"), "comparison against a literal")
                    }
                    other => self.err(e, format!("unknown operator `{other}`"), "and, or, not, =>, =, <, <=, >, >="),
                }
            }
        }
    }

    fn bool_arg(&mut self, e: &Sexp, depth: usize) -> CResult<SmtTerm> {
        let (t, ty) = self.term(e, depth + 1)?;
        if ty != Ty::Bool {
            return self.err(e, "expected a boolean term", "Bool term");
        }
        Ok(t)
    }
}

pub fn parse_smt(text: &str) -> Result<SmtScript, Diagnostics> {
    let mut sink = DiagSink::new(text);
    let Some(commands) = read_sexps(text, &mut sink) else {
        return Err(sink.into_diagnostics());
    };
    let mut script = SmtScript { logic: None, decls: Vec::new(), assertions: Vec::new() };
    let mut checker = Checker { sorts: HashMap::new(), sink: &mut sink };
    let mut check_sats: Vec<usize> = Vec::new();

    for cmd in &commands {
        let Sexp::List(items, off) = cmd else {
            checker.err::<()>(cmd, "expected a command", "(command ...)").ok();
            continue;
        };
        let name = cmd.head().unwrap_or("");
        let args = &items[1.min(items.len())..];
        match name {
            "declare-const" | "declare-fun" => {
                let (sym, sort) = match (name, args) {
                    ("declare-const", [s, sort]) => (s, sort),
                    ("declare-fun", [s, Sexp::List(params, _), sort]) if params.is_empty() => (s, sort),
                    _ => {
                        checker.err::<()>(cmd, format!("malformed `{name}`"), "(declare-const name Sort)").ok();
                        continue;
                    }
                };
                let sym_name = match sym {
                    Sexp::Atom(s, _) if is_simple_symbol(s) => s.clone(),
                    Sexp::Quoted(s, _) => s.clone(),
                    _ => {
                        checker.err::<()>(sym, "expected a symbol", "constant name").ok();
                        continue;
                    }
                };
                let sort = match sort {
                    Sexp::Atom(s, _) if s == "Int" => Sort::Int,
                    Sexp::Atom(s, _) if s == "Real" => Sort::Real,
                    Sexp::Atom(s, _) if s == "Bool" => Sort::Bool,
                    _ => {
                        checker.err::<()>(sort, "unsupported sort", "Int, Real or Bool").ok();
                        continue;
                    }
                };
                if checker.sorts.insert(sym_name.clone(), sort).is_some() {
                    checker.sink.error(*off, format!("constant `{sym_name}` declared twice"));
                    continue;
                }
                script.decls.push(SmtDecl { name: sym_name, sort });
            }
            "assert" => {
                if !check_sats.is_empty() {
                    checker.sink.error(*off, "assertion after check-sat");
                }
                if args.len() != 1 {
                    checker.err::<()>(cmd, "`assert` expects 1 argument", "(assert term)").ok();
                    continue;
                }
                if let Ok(t) = checker.bool_arg(&args[0], 0) {
                    script.assertions.push(t);
                }
            }
            "check-sat" => {
                if !args.is_empty() {
                    checker.err::<()>(cmd, "`check-sat` takes no arguments", "(check-sat)").ok();
                }
                check_sats.push(*off);
            }
            "set-logic" => match args {
                [Sexp::Atom(l, _)] => script.logic = Some(l.clone()),
                _ => checker.err::<()>(cmd, "malformed `set-logic`", "(set-logic NAME)").unwrap_or(()),
            },
            "set-option" | "set-info" | "get-model" | "get-value" | "exit" | "echo" => {}
            "" => checker.err::<()>(cmd, "expected a command", "(command ...)").unwrap_or(()),
            other => {
                checker.err::<()>(cmd, format!("unsupported command `{other}`"), "declare-const, assert or check-sat").ok();
            }
        }
    }

    match check_sats.len() {
        0 => sink.push(text.len(), "missing check-sat", "(check-sat)", "end of input"),
        1 => {}
        _ => sink.error(check_sats[1], "more than one check-sat"),
    }
    if !sink.is_empty() {
        return Err(sink.into_diagnostics());
    }
    Ok(script)
}
