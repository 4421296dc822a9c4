//! Satisfiability for boolean structure over single-variable linear comparisons.
//!
//! Every boolean constant and every `(op const literal)` comparison becomes a
//! propositional atom. The search enumerates atom values with three-valued
//! pruning of the assertion conjunction; each partial assignment is checked for
//! theory consistency by intersecting per-variable intervals.

use std::collections::HashMap;

use num_traits::Signed;

use crate::logiclang::csp::CmpOp;
use crate::logiclang::smt::{format_rational, Rational, SmtScript, SmtTerm, Sort};
use crate::types::SolverVerdict;

use super::{Deadline, EngineLimits};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Bool(String),
    /// `var op lit`
    Num { var: String, op: CmpOp, lit: Rational },
}

#[derive(Debug, Clone)]
enum Expr {
    Lit(bool),
    Atom(usize),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

fn flip(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Lt => CmpOp::Gt,
        CmpOp::Le => CmpOp::Ge,
        CmpOp::Gt => CmpOp::Lt,
        CmpOp::Ge => CmpOp::Le,
        other => other,
    }
}

fn negate(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Lt => CmpOp::Ge,
        CmpOp::Le => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Le,
        CmpOp::Ge => CmpOp::Lt,
        CmpOp::Eq => CmpOp::Ne,
        CmpOp::Ne => CmpOp::Eq,
    }
}

struct Compiler<'a> {
    script: &'a SmtScript,
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
    bound: Rational,
}

impl Compiler<'_> {
    fn atom(&mut self, a: Atom) -> Expr {
        let next = self.atoms.len();
        let i = *self.index.entry(a.clone()).or_insert(next);
        if i == next {
            self.atoms.push(a);
        }
        Expr::Atom(i)
    }

    fn compile(&mut self, t: &SmtTerm) -> Result<Expr, String> {
        Ok(match t {
            SmtTerm::Bool(b) => Expr::Lit(*b),
            SmtTerm::Const(c) => match self.script.sort_of(c) {
                Some(Sort::Bool) => self.atom(Atom::Bool(c.clone())),
                _ => return Err(format!("numeric constant `{c}` used as a formula")),
            },
            SmtTerm::Num(_) => return Err("numeral used as a formula".into()),
            SmtTerm::Not(a) => Expr::Not(Box::new(self.compile(a)?)),
            SmtTerm::And(ts) => Expr::And(ts.iter().map(|t| self.compile(t)).collect::<Result<_, _>>()?),
            SmtTerm::Or(ts) => Expr::Or(ts.iter().map(|t| self.compile(t)).collect::<Result<_, _>>()?),
            SmtTerm::Implies(a, b) => Expr::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            SmtTerm::Iff(a, b) => Expr::Iff(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            SmtTerm::Cmp(op, a, b) => match (&**a, &**b) {
                (SmtTerm::Num(x), SmtTerm::Num(y)) => Expr::Lit(op.holds(x, y)),
                (SmtTerm::Const(v), SmtTerm::Num(lit)) => self.num_atom(v, *op, lit)?,
                (SmtTerm::Num(lit), SmtTerm::Const(v)) => self.num_atom(v, flip(*op), lit)?,
                _ => {
                    return Err(format!(
                        "comparison `{t}` is outside the supported fragment (only constant-versus-literal comparisons); \
                         an external SMT engine can decide it"
                    ))
                }
            },
        })
    }

    fn num_atom(&mut self, var: &str, op: CmpOp, lit: &Rational) -> Result<Expr, String> {
        if lit.abs() > self.bound {
            return Err(format!("literal {} exceeds the numeric probe bound", format_rational(lit)));
        }
        Ok(self.atom(Atom::Num { var: var.to_string(), op, lit: *lit }))
    }
}

/// Three-valued evaluation; `None` is undetermined.
fn eval(e: &Expr, val: &[Option<bool>]) -> Option<bool> {
    match e {
        Expr::Lit(b) => Some(*b),
        Expr::Atom(i) => val[*i],
        Expr::Not(a) => eval(a, val).map(|b| !b),
        Expr::And(ts) => {
            let mut all = true;
            for t in ts {
                match eval(t, val) {
                    Some(false) => return Some(false),
                    None => all = false,
                    Some(true) => {}
                }
            }
            all.then_some(true)
        }
        Expr::Or(ts) => {
            let mut none = true;
            for t in ts {
                match eval(t, val) {
                    Some(true) => return Some(true),
                    None => none = false,
                    Some(false) => {}
                }
            }
            none.then_some(false)
        }
        Expr::Implies(a, b) => match (eval(a, val), eval(b, val)) {
            (Some(false), _) | (_, Some(true)) => Some(true),
            (Some(true), Some(false)) => Some(false),
            _ => None,
        },
        Expr::Iff(a, b) => Some(eval(a, val)? == eval(b, val)?),
    }
}

/// Feasible set of one numeric variable: an interval minus finitely many points.
#[derive(Debug, Clone)]
struct Domain {
    integral: bool,
    lo: Rational,
    lo_strict: bool,
    hi: Rational,
    hi_strict: bool,
    excluded: Vec<Rational>,
}

impl Domain {
    fn new(sort: Sort, bound: Rational) -> Self {
        Domain { integral: sort == Sort::Int, lo: -bound, lo_strict: false, hi: bound, hi_strict: false, excluded: vec![] }
    }

    fn add(&mut self, op: CmpOp, c: Rational) {
        match op {
            CmpOp::Gt | CmpOp::Ge => {
                let strict = op == CmpOp::Gt;
                if c > self.lo || (c == self.lo && strict) {
                    self.lo = c;
                    self.lo_strict = strict;
                }
            }
            CmpOp::Lt | CmpOp::Le => {
                let strict = op == CmpOp::Lt;
                if c < self.hi || (c == self.hi && strict) {
                    self.hi = c;
                    self.hi_strict = strict;
                }
            }
            CmpOp::Eq => {
                self.add(CmpOp::Ge, c);
                self.add(CmpOp::Le, c);
            }
            CmpOp::Ne => self.excluded.push(c),
        }
    }

    fn feasible(&self) -> bool {
        if self.integral {
            let lo = if self.lo_strict { self.lo.floor() + 1 } else { self.lo.ceil() };
            let hi = if self.hi_strict { self.hi.ceil() - 1 } else { self.hi.floor() };
            if lo > hi {
                return false;
            }
            let count = (hi - lo).to_integer() + 1;
            let mut ex: Vec<&Rational> = self.excluded.iter().filter(|e| e.is_integer() && **e >= lo && **e <= hi).collect();
            ex.sort();
            ex.dedup();
            count > ex.len() as i128
        } else if self.lo < self.hi {
            true
        } else {
            self.lo == self.hi && !self.lo_strict && !self.hi_strict && !self.excluded.contains(&self.lo)
        }
    }

    /// The single admissible value, when the domain is a point.
    fn point(&self) -> Option<Rational> {
        (self.lo == self.hi && self.feasible()).then_some(self.lo)
    }
}

struct Search<'a> {
    root: &'a Expr,
    atoms: &'a [Atom],
    sorts: HashMap<&'a str, Sort>,
    bound: Rational,
    nodes: u64,
    cap: u64,
    deadline: Deadline,
}

enum Outcome {
    Sat,
    Unsat,
    Stopped(&'static str),
}

impl Search<'_> {
    fn domains(&self, val: &[Option<bool>]) -> Option<HashMap<&str, Domain>> {
        let mut doms: HashMap<&str, Domain> = HashMap::new();
        for (a, v) in self.atoms.iter().zip(val) {
            if let (Atom::Num { var, op, lit }, Some(b)) = (a, v) {
                let sort = self.sorts.get(var.as_str()).copied().unwrap_or(Sort::Real);
                let d = doms.entry(var).or_insert_with(|| Domain::new(sort, self.bound));
                d.add(if *b { *op } else { negate(*op) }, *lit);
            }
        }
        doms.values().all(Domain::feasible).then_some(doms)
    }

    /// Assigns numeric atoms whose variable is pinned to a single value.
    fn propagate(&self, val: &mut [Option<bool>], doms: &HashMap<&str, Domain>) {
        for (a, v) in self.atoms.iter().zip(val.iter_mut()) {
            if let (Atom::Num { var, op, lit }, None) = (a, &v) {
                if let Some(p) = doms.get(var.as_str()).and_then(Domain::point) {
                    *v = Some(op.holds(&p, lit));
                }
            }
        }
    }

    fn run(&mut self, val: &mut Vec<Option<bool>>) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Outcome::Stopped("boolean enumeration cap reached");
        }
        if self.nodes.is_multiple_of(256) && self.deadline.expired() {
            return Outcome::Stopped("timeout");
        }
        let Some(doms) = self.domains(val) else { return Outcome::Unsat };
        let saved = val.clone();
        self.propagate(val, &doms);
        if self.domains(val).is_none() {
            *val = saved;
            return Outcome::Unsat;
        }
        let out = match eval(self.root, val) {
            Some(true) => Outcome::Sat,
            Some(false) => Outcome::Unsat,
            None => {
                let next = val.iter().position(Option::is_none).expect("undetermined formula has a free atom");
                let mut out = Outcome::Unsat;
                for b in [true, false] {
                    val[next] = Some(b);
                    match self.run(val) {
                        Outcome::Unsat => {}
                        other => {
                            out = other;
                            break;
                        }
                    }
                }
                val[next] = None;
                out
            }
        };
        *val = saved;
        out
    }
}

pub fn solve_smt(s: &SmtScript, limits: &EngineLimits) -> SolverVerdict {
    let bound = Rational::from_integer(limits.numeric_probe_bound.into());
    let mut c = Compiler { script: s, atoms: Vec::new(), index: HashMap::new(), bound };
    let mut parts = Vec::with_capacity(s.assertions.len());
    for a in &s.assertions {
        match c.compile(a) {
            Ok(e) => parts.push(e),
            Err(note) => return SolverVerdict::unknown_with(note),
        }
    }
    let root = Expr::And(parts);
    let mut val: Vec<Option<bool>> = vec![None; c.atoms.len()];

    // Pin atoms asserted (possibly negated) at top level.
    if let Expr::And(parts) = &root {
        for p in parts {
            let (i, value) = match p {
                Expr::Atom(i) => (*i, true),
                Expr::Not(inner) => match **inner {
                    Expr::Atom(i) => (i, false),
                    _ => continue,
                },
                _ => continue,
            };
            if val[i] == Some(!value) {
                return SolverVerdict::Unsat;
            }
            val[i] = Some(value);
        }
    }

    let mut search = Search {
        root: &root,
        atoms: &c.atoms,
        sorts: s.decls.iter().map(|d| (d.name.as_str(), d.sort)).collect(),
        bound,
        nodes: 0,
        cap: limits.bool_enumeration_cap,
        deadline: limits.deadline(),
    };
    match search.run(&mut val) {
        Outcome::Sat => SolverVerdict::Sat,
        Outcome::Unsat => SolverVerdict::Unsat,
        Outcome::Stopped(why) => SolverVerdict::unknown_with(why),
    }
}

/// Evaluates all assertions under a total assignment (booleans and numbers).
pub fn evaluate(s: &SmtScript, bools: &HashMap<String, bool>, nums: &HashMap<String, Rational>) -> Option<bool> {
    fn num(t: &SmtTerm, nums: &HashMap<String, Rational>) -> Option<Rational> {
        match t {
            SmtTerm::Num(r) => Some(*r),
            SmtTerm::Const(c) => nums.get(c).copied(),
            _ => None,
        }
    }
    fn go(t: &SmtTerm, b: &HashMap<String, bool>, n: &HashMap<String, Rational>) -> Option<bool> {
        Some(match t {
            SmtTerm::Bool(v) => *v,
            SmtTerm::Const(c) => *b.get(c)?,
            SmtTerm::Num(_) => return None,
            SmtTerm::Not(a) => !go(a, b, n)?,
            SmtTerm::And(ts) => ts.iter().map(|t| go(t, b, n)).collect::<Option<Vec<_>>>()?.into_iter().all(|x| x),
            SmtTerm::Or(ts) => ts.iter().map(|t| go(t, b, n)).collect::<Option<Vec<_>>>()?.into_iter().any(|x| x),
            SmtTerm::Implies(x, y) => !go(x, b, n)? || go(y, b, n)?,
            SmtTerm::Iff(x, y) => go(x, b, n)? == go(y, b, n)?,
            SmtTerm::Cmp(op, x, y) => op.holds(num(x, n)?, num(y, n)?),
        })
    }
    let mut all = true;
    for a in &s.assertions {
        all &= go(a, bools, nums)?;
    }
    Some(all)
}

/// True when `x` is admissible for a constant of `sort`.
pub fn fits_sort(sort: Sort, x: &Rational) -> bool {
    sort != Sort::Int || x.is_integer()
}
