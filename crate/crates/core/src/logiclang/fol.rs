//! First-order language with unicode or ASCII connectives.
//!
//! ```text
//! Predicates:
//! Bird(x) ::: x is a bird.
//! Premises:
//! ∀x (Bird(x) → Wings(x)) ::: All birds have wings.
//! Conclusion:
//! Wings(john) ::: John has wings.
//! ```
//!
//! Variables are the single letters `x`, `y`, `z`, `w`; every other term is a
//! lowercase constant. Equality is not part of the language.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::diag::{lines_with_offsets, split_gloss, DiagSink, Diagnostics};

pub const VARIABLES: [&str; 4] = ["x", "y", "z", "w"];
const MAX_DEPTH: usize = 200;

pub fn is_variable(name: &str) -> bool {
    VARIABLES.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom { predicate: String, args: Vec<Term> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: &str, args: &[&str]) -> Formula {
        Formula::Atom {
            predicate: predicate.to_string(),
            args: args
                .iter()
                .map(|a| if is_variable(a) { Term::Var(a.to_string()) } else { Term::Const(a.to_string()) })
                .collect(),
        }
    }

    pub fn negate(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom { args, .. } => {
                    for a in args {
                        if let Term::Var(v) = a {
                            if !bound.contains(v) {
                                out.insert(v.clone());
                            }
                        }
                    }
                }
                Formula::Not(g) => walk(g, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Forall(v, g) | Formula::Exists(v, g) => {
                    bound.push(v.clone());
                    walk(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Constants occurring anywhere in the formula.
    pub fn constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { args, .. } => {
                out.extend(args.iter().filter_map(|a| match a {
                    Term::Const(c) => Some(c.clone()),
                    Term::Var(_) => None,
                }));
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.constants(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.constants(out);
                b.constants(out);
            }
        }
    }

    fn is_binary(&self) -> bool {
        matches!(self, Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..))
    }
}

fn fmt_operand(f: &mut fmt::Formatter<'_>, g: &Formula) -> fmt::Result {
    if g.is_binary() {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { predicate, args } => {
                let args: Vec<&str> = args.iter().map(Term::name).collect();
                write!(f, "{}({})", predicate, args.join(", "))
            }
            Formula::Not(g) => {
                f.write_str("¬")?;
                fmt_operand(f, g)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                let op = match self {
                    Formula::And(..) => "∧",
                    Formula::Or(..) => "∨",
                    Formula::Implies(..) => "→",
                    _ => "↔",
                };
                fmt_operand(f, a)?;
                write!(f, " {op} ")?;
                fmt_operand(f, b)
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let q = if matches!(self, Formula::Forall(..)) { "∀" } else { "∃" };
                write!(f, "{q}{v} ")?;
                fmt_operand(f, g)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolPredicate {
    pub name: String,
    pub params: Vec<String>,
    pub gloss: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolStatement {
    pub formula: Formula,
    pub gloss: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolProgram {
    pub predicates: Vec<FolPredicate>,
    pub premises: Vec<FolStatement>,
    pub conclusion: FolStatement,
}

impl FolProgram {
    /// All constants used in premises and conclusion, sorted.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in self.premises.iter().chain(std::iter::once(&self.conclusion)) {
            s.formula.constants(&mut out);
        }
        out
    }
}

fn gloss_suffix(g: &Option<String>) -> String {
    g.as_ref().map(|g| format!(" ::: {g}")).unwrap_or_default()
}

impl fmt::Display for FolProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Predicates:")?;
        for p in &self.predicates {
            writeln!(f, "{}({}){}", p.name, p.params.join(", "), gloss_suffix(&p.gloss))?;
        }
        writeln!(f, "\nPremises:")?;
        for s in &self.premises {
            writeln!(f, "{}{}", s.formula, gloss_suffix(&s.gloss))?;
        }
        writeln!(f, "\nConclusion:")?;
        writeln!(f, "{}{}", self.conclusion.formula, gloss_suffix(&self.conclusion.gloss))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Forall,
    Exists,
    Bad(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Bad(s) => s.clone(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
            Tok::Not => "¬".into(),
            Tok::And => "∧".into(),
            Tok::Or => "∨".into(),
            Tok::Implies => "→".into(),
            Tok::Iff => "↔".into(),
            Tok::Forall => "∀".into(),
            Tok::Exists => "∃".into(),
        }
    }
}

fn tokenize(code: &str, base: usize) -> Vec<(Tok, usize)> {
    const SYMBOLS: &[(&str, Tok)] = &[
        ("<->", Tok::Iff),
        ("<=>", Tok::Iff),
        ("->", Tok::Implies),
        ("=>", Tok::Implies),
        ("&&", Tok::And),
        ("||", Tok::Or),
        ("↔", Tok::Iff),
        ("→", Tok::Implies),
        ("¬", Tok::Not),
        ("~", Tok::Not),
        ("!", Tok::Not),
        ("∧", Tok::And),
        ("&", Tok::And),
        ("∨", Tok::Or),
        ("|", Tok::Or),
        ("∀", Tok::Forall),
        ("∃", Tok::Exists),
        ("(", Tok::LParen),
        (")", Tok::RParen),
        (",", Tok::Comma),
    ];
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < code.len() {
        let rest = &code[i..];
        let c = rest.chars().next().expect("non-empty");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        for (sym, tok) in SYMBOLS {
            if rest.starts_with(sym) {
                out.push((tok.clone(), base + i));
                i += sym.len();
                continue 'outer;
            }
        }
        if c.is_alphanumeric() || c == '_' {
            let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
            let word = &rest[..len];
            let tok = match word {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, base + i));
            i += len;
            continue;
        }
        out.push((Tok::Bad(c.to_string()), base + i));
        i += c.len_utf8();
    }
    out
}

struct FormulaParser<'s, 'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    sink: &'s mut DiagSink<'a>,
    depth: usize,
}

type PResult<T> = Result<T, ()>;

impl FormulaParser<'_, '_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn fail<T>(&mut self, message: &str, expected: &str) -> PResult<T> {
        let found = self.peek().map(Tok::describe).unwrap_or_else(|| "end of line".into());
        let message = match self.peek() {
            Some(Tok::Bad(s)) if s == "=" => "equality is not supported".to_string(),
            Some(Tok::Bad(s)) if s == "⊕" => "exclusive or is not supported".to_string(),
            _ => message.to_string(),
        };
        let off = self.offset();
        self.sink.push(off, message, expected, found);
        Err(())
    }

    fn formula(&mut self) -> PResult<Formula> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("formula nested too deeply", "shallower formula");
        }
        let r = self.iff();
        self.depth -= 1;
        r
    }

    fn iff(&mut self) -> PResult<Formula> {
        let mut lhs = self.implies()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Formula> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("formula nested too deeply", "shallower formula");
        }
        let r = self.unary_inner();
        self.depth -= 1;
        r
    }

    fn unary_inner(&mut self) -> PResult<Formula> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::negate(self.unary()?))
            }
            Some(q @ (Tok::Forall | Tok::Exists)) => {
                self.pos += 1;
                let var = match self.peek() {
                    Some(Tok::Ident(v)) if is_variable(v) => v.clone(),
                    _ => return self.fail("quantifier must bind a variable", "one of x, y, z, w"),
                };
                self.pos += 1;
                let body = self.unary()?;
                Ok(if q == Tok::Forall { Formula::forall(&var, body) } else { Formula::exists(&var, body) })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("unbalanced parenthesis", "`)`");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() != Some(&Tok::LParen) {
                    if !matches!(self.peek(), Some(Tok::Bad(s)) if s == "=") {
                        self.pos -= 1;
                    }
                    return self.fail("expected an atom", "predicate application `P(...)`");
                }
                self.pos += 1;
                let mut args = Vec::new();
                loop {
                    let (arg, off) = match self.toks.get(self.pos) {
                        Some((Tok::Ident(a), off)) => (a.clone(), *off),
                        _ => return self.fail("malformed argument list", "term"),
                    };
                    if is_variable(&arg) {
                        args.push(Term::Var(arg));
                    } else if arg.chars().next().is_some_and(|c| c.is_uppercase()) {
                        self.sink.push(off, "constants must be lowercase", "lowercase identifier", arg);
                        return Err(());
                    } else {
                        args.push(Term::Const(arg));
                    }
                    self.pos += 1;
                    match self.peek() {
                        Some(Tok::Comma) => self.pos += 1,
                        Some(Tok::RParen) => {
                            self.pos += 1;
                            break;
                        }
                        _ => return self.fail("malformed argument list", "`,` or `)`"),
                    }
                }
                Ok(Formula::Atom { predicate: name, args })
            }
            _ => self.fail("expected a formula", "atom, `¬`, quantifier or `(`"),
        }
    }
}

fn parse_formula_line(code: &str, base: usize, sink: &mut DiagSink<'_>) -> Option<Formula> {
    let toks = tokenize(code, base);
    let mut p = FormulaParser { toks, pos: 0, end: base + code.trim_end().len(), sink, depth: 0 };
    let f = p.formula().ok()?;
    if p.pos < p.toks.len() {
        p.fail::<()>("trailing tokens after formula", "end of formula").ok();
        return None;
    }
    Some(f)
}

fn parse_declaration(code: &str, base: usize, sink: &mut DiagSink<'_>) -> Option<(String, Vec<String>)> {
    let toks = tokenize(code, base);
    let mut it = toks.iter();
    let name = match it.next() {
        Some((Tok::Ident(n), _)) => n.clone(),
        other => {
            let (found, off) = other.map(|(t, o)| (t.describe(), *o)).unwrap_or(("".into(), base));
            sink.push(off, "malformed declaration", "predicate name", found);
            return None;
        }
    };
    if !matches!(it.next(), Some((Tok::LParen, _))) {
        sink.push(base, "malformed declaration", "`(`", code.trim());
        return None;
    }
    let mut params = Vec::new();
    loop {
        match it.next() {
            Some((Tok::Ident(p), _)) => params.push(p.clone()),
            other => {
                let (found, off) = other.map(|(t, o)| (t.describe(), *o)).unwrap_or(("".into(), base));
                sink.push(off, "malformed declaration", "parameter", found);
                return None;
            }
        }
        match it.next() {
            Some((Tok::Comma, _)) => {}
            Some((Tok::RParen, _)) => break,
            other => {
                let (found, off) = other.map(|(t, o)| (t.describe(), *o)).unwrap_or(("".into(), base));
                sink.push(off, "malformed declaration", "`,` or `)`", found);
                return None;
            }
        }
    }
    if let Some((t, off)) = it.next() {
        sink.push(*off, "trailing text after declaration", "end of line", t.describe());
        return None;
    }
    Some((name, params))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Section {
    Predicates,
    Premises,
    Conclusion,
}

fn check_atoms(f: &Formula, arity: &HashMap<String, usize>, off: usize, sink: &mut DiagSink<'_>) {
    match f {
        Formula::Atom { predicate, args } => match arity.get(predicate) {
            None => sink.error(off, format!("undeclared predicate `{predicate}`")),
            Some(&n) if n != args.len() => {
                sink.error(off, format!("predicate `{predicate}` expects {n} argument(s), got {}", args.len()))
            }
            _ => {}
        },
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => check_atoms(g, arity, off, sink),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_atoms(a, arity, off, sink);
            check_atoms(b, arity, off, sink);
        }
    }
}

pub fn parse_fol(text: &str) -> Result<FolProgram, Diagnostics> {
    let mut sink = DiagSink::new(text);
    let mut section = None;
    let mut seen = Vec::new();
    let mut predicates: Vec<(FolPredicate, usize)> = Vec::new();
    let mut premises: Vec<(FolStatement, usize)> = Vec::new();
    let mut conclusions: Vec<(FolStatement, usize)> = Vec::new();

    for (offset, line) in lines_with_offsets(text) {
        if line.trim().is_empty() {
            continue;
        }
        let header = match line.trim() {
            "Predicates:" => Some(Section::Predicates),
            "Premises:" => Some(Section::Premises),
            "Conclusion:" | "Conclusions:" => Some(Section::Conclusion),
            _ => None,
        };
        if let Some(h) = header {
            if seen.contains(&h) {
                sink.error(offset, format!("duplicate `{}` section", line.trim()));
            } else if seen.last().is_some_and(|&l| l > h) {
                sink.error(offset, format!("section `{}` out of order", line.trim()));
            }
            seen.push(h);
            section = Some(h);
            continue;
        }
        let (code, gloss) = split_gloss(line);
        match section {
            None => sink.push(offset, "statement outside any section", "`Predicates:`", line.trim()),
            Some(Section::Predicates) => {
                if let Some((name, params)) = parse_declaration(code, offset, &mut sink) {
                    predicates.push((FolPredicate { name, params, gloss }, offset));
                }
            }
            Some(s) => {
                if let Some(formula) = parse_formula_line(code, offset, &mut sink) {
                    let stmt = (FolStatement { formula, gloss }, offset);
                    if s == Section::Premises {
                        premises.push(stmt);
                    } else {
                        conclusions.push(stmt);
                    }
                }
            }
        }
    }

    if !seen.contains(&Section::Predicates) {
        sink.push(0, "missing section", "`Predicates:`", "");
    }
    if !seen.contains(&Section::Premises) {
        sink.push(0, "missing section", "`Premises:`", "");
    }
    if !seen.contains(&Section::Conclusion) {
        sink.push(text.len(), "missing section", "`Conclusion:`", "");
    } else if conclusions.is_empty() && sink.is_empty() {
        sink.push(text.len(), "empty `Conclusion:` section", "one formula", "");
    } else if conclusions.len() > 1 {
        sink.error(conclusions[1].1, "more than one conclusion");
    }

    let mut arity = HashMap::new();
    for (p, off) in &predicates {
        if arity.insert(p.name.clone(), p.params.len()).is_some() {
            sink.error(*off, format!("predicate `{}` declared twice", p.name));
        }
    }
    for (s, off) in premises.iter().chain(conclusions.iter()) {
        check_atoms(&s.formula, &arity, *off, &mut sink);
        let free = s.formula.free_vars();
        if !free.is_empty() {
            let names: Vec<String> = free.into_iter().collect();
            sink.error(*off, format!("unbound variable(s) {}", names.join(", ")));
        }
    }

    if !sink.is_empty() {
        return Err(sink.into_diagnostics());
    }
    Ok(FolProgram {
        predicates: predicates.into_iter().map(|(p, _)| p).collect(),
        premises: premises.into_iter().map(|(p, _)| p).collect(),
        conclusion: conclusions.into_iter().next().map(|(c, _)| c).expect("checked above"),
    })
}

/// Parses a single closed formula (no declarations are checked).
pub fn parse_formula(text: &str) -> Result<Formula, Diagnostics> {
    let mut sink = DiagSink::new(text);
    let f = parse_formula_line(text, 0, &mut sink);
    match f {
        Some(f) if sink.is_empty() => Ok(f),
        _ => Err(sink.into_diagnostics()),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub const JOHN: &str = "Predicates:
Bird(x) ::: x is a bird.
Wings(x) ::: x has wings.
Animal(x) ::: x is an animal.
Reptile(x) ::: x is a reptile.
Fly(x) ::: x can fly.
Iguana(x) ::: x is an iguana.

Premises:
∀x (Bird(x) → Wings(x)) ::: All birds have wings.
∀x (Wings(x) → ¬Reptile(x)) ::: No animal with wings is a reptile.
∃x (Fly(x) ∧ Bird(x)) ::: Some animals that fly are birds.
∀x (Iguana(x) → Reptile(x)) ::: If something is an iguana, then it is a reptile.
¬Iguana(john) ∧ ¬Bird(john) ::: John is neither an iguana nor a bird.

Conclusions:
Reptile(john) ::: John is a reptile.
";

    #[test]
    fn parses_john_program() {
        let p = parse_fol(JOHN).unwrap();
        assert_eq!(p.predicates.len(), 6);
        assert_eq!(p.premises.len(), 5);
        assert_eq!(p.conclusion.formula, Formula::atom("Reptile", &["john"]));
        assert_eq!(
            p.premises[4].formula,
            Formula::and(Formula::negate(Formula::atom("Iguana", &["john"])), Formula::negate(Formula::atom("Bird", &["john"])))
        );
    }

    #[test]
    fn ascii_and_unicode_agree() {
        let a = parse_formula("forall x (Bird(x) -> Wings(x))").unwrap();
        let u = parse_formula("∀x (Bird(x) → Wings(x))").unwrap();
        assert_eq!(a, u);
        let a = parse_formula("exists y (~P(y) & Q(y) | R(y)) <-> S(c)").unwrap();
        let u = parse_formula("∃y (¬P(y) ∧ Q(y) ∨ R(y)) ↔ S(c)").unwrap();
        assert_eq!(a, u);
    }

    #[test]
    fn printer_round_trips() {
        let p = parse_fol(JOHN).unwrap();
        assert_eq!(parse_fol(&p.to_string()).unwrap(), p);
        for src in ["(A(c) ∧ B(c)) ∧ C(c)", "A(c) ∧ (B(c) ∧ C(c))", "A(c) → B(c) → C(c)", "∀x A(x) ∧ B(c)", "¬(A(c) ∨ B(c))"] {
            let f = parse_formula(src).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{src} -> {f}");
        }
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula("A(c) → B(c) → C(c)").unwrap();
        assert!(matches!(f, Formula::Implies(_, ref r) if matches!(**r, Formula::Implies(..))));
    }

    #[test]
    fn unbound_variable_is_reported() {
        let text = JOHN.replace("Reptile(john) ::: John", "Reptile(x) ::: John");
        let d = parse_fol(&text).unwrap_err();
        assert!(d.to_string().contains("unbound variable"), "{d}");
        assert_eq!(d.first().line, 17);
    }

    #[test]
    fn equality_is_rejected() {
        let text = "Predicates:\nP(x)\nPremises:\nP(a)\nConclusion:\na = b\n";
        let d = parse_fol(text).unwrap_err();
        assert!(d.to_string().contains("equality"), "{d}");
    }

    #[test]
    fn uppercase_constant_is_rejected() {
        let d = parse_formula("P(John)").unwrap_err();
        assert!(d.first().message.contains("lowercase"));
    }
}
