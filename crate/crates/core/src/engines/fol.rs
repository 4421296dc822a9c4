//! Clausification (NNF, standardization, Skolemization, CNF) and a given-clause
//! resolution prover with factoring, tautology deletion and subsumption.

use std::collections::HashMap;
use std::fmt;

use crate::logiclang::fol::{FolProgram, Formula, Term as FTerm};
use crate::types::SolverVerdict;

use super::{Deadline, EngineLimits};

/// Upper bound on clauses produced by CNF distribution for one formula.
const MAX_CNF_CLAUSES: usize = 4096;
/// Upper bound on stored clauses during one proof attempt.
const MAX_STORED: usize = 100_000;
/// Every `AGE_PICK`-th given clause is the oldest, not the lightest.
const AGE_PICK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    App(u32, Vec<Term>),
}

impl Term {
    fn weight(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
        }
    }

    fn max_var(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    fn offset(&self, by: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(v + by),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.offset(by)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub pred: u32,
    pub args: Vec<Term>,
}

impl Literal {
    fn weight(&self) -> usize {
        1 + self.args.iter().map(Term::weight).sum::<usize>()
    }
}

pub type Clause = Vec<Literal>;

#[derive(Debug, Default)]
struct Symbols {
    preds: HashMap<String, u32>,
    funcs: HashMap<String, u32>,
    skolems: u32,
}

impl Symbols {
    fn pred(&mut self, name: &str) -> u32 {
        let n = self.preds.len() as u32;
        *self.preds.entry(name.to_string()).or_insert(n)
    }

    fn func(&mut self, name: &str) -> u32 {
        let n = self.funcs.len() as u32;
        *self.funcs.entry(name.to_string()).or_insert(n)
    }

    fn skolem(&mut self) -> u32 {
        self.skolems += 1;
        // `$` cannot occur in parsed constants, so Skolem names never collide.
        let name = format!("$sk{}", self.skolems);
        self.func(&name)
    }
}

/// Negation normal form with quantifiers still present.
enum Nnf {
    Lit(bool, String, Vec<FTerm>),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    All(String, Box<Nnf>),
    Ex(String, Box<Nnf>),
}

fn nnf(f: &Formula, positive: bool) -> Nnf {
    match f {
        Formula::Atom { predicate, args } => Nnf::Lit(positive, predicate.clone(), args.clone()),
        Formula::Not(g) => nnf(g, !positive),
        Formula::And(a, b) if positive => Nnf::And(vec![nnf(a, true), nnf(b, true)]),
        Formula::And(a, b) => Nnf::Or(vec![nnf(a, false), nnf(b, false)]),
        Formula::Or(a, b) if positive => Nnf::Or(vec![nnf(a, true), nnf(b, true)]),
        Formula::Or(a, b) => Nnf::And(vec![nnf(a, false), nnf(b, false)]),
        Formula::Implies(a, b) if positive => Nnf::Or(vec![nnf(a, false), nnf(b, true)]),
        Formula::Implies(a, b) => Nnf::And(vec![nnf(a, true), nnf(b, false)]),
        Formula::Iff(a, b) if positive => Nnf::And(vec![
            Nnf::Or(vec![nnf(a, false), nnf(b, true)]),
            Nnf::Or(vec![nnf(a, true), nnf(b, false)]),
        ]),
        Formula::Iff(a, b) => Nnf::And(vec![
            Nnf::Or(vec![nnf(a, true), nnf(b, true)]),
            Nnf::Or(vec![nnf(a, false), nnf(b, false)]),
        ]),
        Formula::Forall(v, g) if positive => Nnf::All(v.clone(), Box::new(nnf(g, true))),
        Formula::Forall(v, g) => Nnf::Ex(v.clone(), Box::new(nnf(g, false))),
        Formula::Exists(v, g) if positive => Nnf::Ex(v.clone(), Box::new(nnf(g, true))),
        Formula::Exists(v, g) => Nnf::All(v.clone(), Box::new(nnf(g, false))),
    }
}

/// Quantifier-free matrix after Skolemization.
enum Matrix {
    Lit(Literal),
    And(Vec<Matrix>),
    Or(Vec<Matrix>),
}

struct Skolemizer<'a> {
    syms: &'a mut Symbols,
    next_var: u32,
}

impl Skolemizer<'_> {
    fn run(&mut self, f: &Nnf, env: &mut Vec<(String, Term)>, universals: &mut Vec<Term>) -> Matrix {
        match f {
            Nnf::Lit(pos, p, args) => {
                let args = args
                    .iter()
                    .map(|a| match a {
                        FTerm::Var(v) => env
                            .iter()
                            .rev()
                            .find(|(n, _)| n == v)
                            .map(|(_, t)| t.clone())
                            .unwrap_or_else(|| Term::App(self.syms.func(v), vec![])),
                        FTerm::Const(c) => Term::App(self.syms.func(c), vec![]),
                    })
                    .collect();
                Matrix::Lit(Literal { positive: *pos, pred: self.syms.pred(p), args })
            }
            Nnf::And(gs) => Matrix::And(gs.iter().map(|g| self.run(g, env, universals)).collect()),
            Nnf::Or(gs) => Matrix::Or(gs.iter().map(|g| self.run(g, env, universals)).collect()),
            Nnf::All(v, g) => {
                let t = Term::Var(self.next_var);
                self.next_var += 1;
                env.push((v.clone(), t.clone()));
                universals.push(t);
                let m = self.run(g, env, universals);
                universals.pop();
                env.pop();
                m
            }
            Nnf::Ex(v, g) => {
                let sk = Term::App(self.syms.skolem(), universals.clone());
                env.push((v.clone(), sk));
                let m = self.run(g, env, universals);
                env.pop();
                m
            }
        }
    }
}

struct TooLarge;

fn cnf(m: &Matrix) -> Result<Vec<Clause>, TooLarge> {
    match m {
        Matrix::Lit(l) => Ok(vec![vec![l.clone()]]),
        Matrix::And(ms) => {
            let mut out = Vec::new();
            for m in ms {
                out.extend(cnf(m)?);
                if out.len() > MAX_CNF_CLAUSES {
                    return Err(TooLarge);
                }
            }
            Ok(out)
        }
        Matrix::Or(ms) => {
            let mut acc: Vec<Clause> = vec![vec![]];
            for m in ms {
                let part = cnf(m)?;
                if acc.len().saturating_mul(part.len()) > MAX_CNF_CLAUSES {
                    return Err(TooLarge);
                }
                acc = acc
                    .iter()
                    .flat_map(|a| part.iter().map(move |b| a.iter().chain(b).cloned().collect()))
                    .collect();
            }
            Ok(acc)
        }
    }
}

/// Clauses of a closed formula (or its negation when `positive` is false).
fn clausify(f: &Formula, positive: bool, syms: &mut Symbols) -> Result<Vec<Clause>, TooLarge> {
    let n = nnf(f, positive);
    let m = Skolemizer { syms, next_var: 0 }.run(&n, &mut Vec::new(), &mut Vec::new());
    cnf(&m)
}

type Subst = HashMap<u32, Term>;

fn resolve_term(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(v) => match s.get(v) {
            Some(b) => resolve_term(b, s),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(*f, args.iter().map(|a| resolve_term(a, s)).collect()),
    }
}

fn occurs(v: u32, t: &Term, s: &Subst) -> bool {
    match t {
        Term::Var(w) => *w == v || s.get(w).is_some_and(|b| occurs(v, b, s)),
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, s)),
    }
}

fn walk<'a>(t: &'a Term, s: &'a Subst) -> &'a Term {
    let mut t = t;
    while let Term::Var(v) = t {
        match s.get(v) {
            Some(b) => t = b,
            None => break,
        }
    }
    t
}

fn unify(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let (a, b) = (walk(a, s).clone(), walk(b, s).clone());
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(*x, t, s) {
                return false;
            }
            s.insert(*x, t.clone());
            true
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, s))
        }
    }
}

fn unify_args(a: &[Term], b: &[Term], s: &mut Subst) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| unify(x, y, s))
}

/// One-way matching: binds only variables of `pattern`.
fn match_term(pattern: &Term, target: &Term, s: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(b) => b == target,
            None => {
                s.insert(*v, target.clone());
                true
            }
        },
        Term::App(f, xs) => match target {
            Term::App(g, ys) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s)),
            Term::Var(_) => false,
        },
    }
}

fn subsumes(c: &[Literal], d: &[Literal]) -> bool {
    fn go(c: &[Literal], d: &[Literal], s: &Subst) -> bool {
        let Some((first, rest)) = c.split_first() else { return true };
        for l in d {
            if l.positive != first.positive || l.pred != first.pred {
                continue;
            }
            let mut s2 = s.clone();
            if first.args.iter().zip(&l.args).all(|(p, t)| match_term(p, t, &mut s2)) && go(rest, d, &s2) {
                return true;
            }
        }
        false
    }
    c.len() <= d.len() && go(c, d, &Subst::new())
}

/// Renames variables to 0.., sorts and dedups literals; `None` for tautologies.
fn normalize(c: Clause) -> Option<Clause> {
    fn rename(t: &Term, map: &mut HashMap<u32, u32>) -> Term {
        match t {
            Term::Var(v) => {
                let n = map.len() as u32;
                Term::Var(*map.entry(*v).or_insert(n))
            }
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| rename(a, map)).collect()),
        }
    }
    let mut lits = c;
    lits.sort();
    lits.dedup();
    for (i, a) in lits.iter().enumerate() {
        if lits[i + 1..].iter().any(|b| a.pred == b.pred && a.args == b.args && a.positive != b.positive) {
            return None;
        }
    }
    let mut map = HashMap::new();
    let mut out: Clause = lits
        .iter()
        .map(|l| Literal { positive: l.positive, pred: l.pred, args: l.args.iter().map(|a| rename(a, &mut map)).collect() })
        .collect();
    out.sort();
    out.dedup();
    Some(out)
}

fn apply(c: &[Literal], s: &Subst) -> Clause {
    c.iter()
        .map(|l| Literal { positive: l.positive, pred: l.pred, args: l.args.iter().map(|a| resolve_term(a, s)).collect() })
        .collect()
}

fn max_var(c: &[Literal]) -> Option<u32> {
    c.iter().flat_map(|l| l.args.iter().filter_map(Term::max_var)).max()
}

struct Stored {
    lits: Clause,
    weight: usize,
    goal: bool,
    alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchEnd {
    Refuted,
    Saturated,
    StepLimit,
    StoreLimit,
    Timeout,
}

impl fmt::Display for SearchEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchEnd::Refuted => "refuted",
            SearchEnd::Saturated => "saturated",
            SearchEnd::StepLimit => "resolution step limit reached",
            SearchEnd::StoreLimit => "clause store limit reached",
            SearchEnd::Timeout => "timeout",
        })
    }
}

struct Prover<'a> {
    store: Vec<Stored>,
    usable: Vec<usize>,
    sos: Vec<usize>,
    limits: &'a EngineLimits,
    deadline: Deadline,
}

impl Prover<'_> {
    /// Adds a clause unless deleted; returns true when it is empty.
    fn add(&mut self, c: Clause, goal: bool) -> bool {
        let Some(c) = normalize(c) else { return false };
        if c.len() > self.limits.max_clause_size {
            return false;
        }
        if c.is_empty() {
            return true;
        }
        let live = self.usable.iter().chain(&self.sos).copied();
        for i in live {
            let s = &self.store[i];
            if s.alive && subsumes(&s.lits, &c) {
                return false;
            }
        }
        for &i in self.usable.iter().chain(&self.sos) {
            if self.store[i].alive && subsumes(&c, &self.store[i].lits) {
                self.store[i].alive = false;
            }
        }
        let weight = c.iter().map(Literal::weight).sum();
        self.store.push(Stored { lits: c, weight, goal, alive: true });
        self.sos.push(self.store.len() - 1);
        false
    }

    fn pick(&mut self, step: usize) -> Option<usize> {
        self.sos.retain(|&i| self.store[i].alive);
        let pos = if step % AGE_PICK == AGE_PICK - 1 {
            self.sos.iter().enumerate().min_by_key(|(_, &i)| i).map(|(k, _)| k)?
        } else {
            self.sos
                .iter()
                .enumerate()
                .min_by_key(|(_, &i)| (!self.store[i].goal, self.store[i].weight, i))
                .map(|(k, _)| k)?
        };
        Some(self.sos.remove(pos))
    }

    fn inferences(&self, given: usize) -> Vec<(Clause, bool)> {
        let g = &self.store[given];
        let mut out = Vec::new();
        // Factoring.
        for i in 0..g.lits.len() {
            for j in i + 1..g.lits.len() {
                let (a, b) = (&g.lits[i], &g.lits[j]);
                if a.positive == b.positive && a.pred == b.pred {
                    let mut s = Subst::new();
                    if unify_args(&a.args, &b.args, &mut s) {
                        out.push((apply(&g.lits, &s), g.goal));
                    }
                }
            }
        }
        // Binary resolution with every usable clause (including the given one).
        let shift = max_var(&g.lits).map_or(0, |m| m + 1);
        for &u in &self.usable {
            let other = &self.store[u];
            if !other.alive {
                continue;
            }
            let renamed: Clause = other
                .lits
                .iter()
                .map(|l| Literal { positive: l.positive, pred: l.pred, args: l.args.iter().map(|a| a.offset(shift)).collect() })
                .collect();
            for (i, a) in g.lits.iter().enumerate() {
                for (j, b) in renamed.iter().enumerate() {
                    if a.positive == b.positive || a.pred != b.pred {
                        continue;
                    }
                    let mut s = Subst::new();
                    if unify_args(&a.args, &b.args, &mut s) {
                        let mut r: Clause = Vec::with_capacity(g.lits.len() + renamed.len() - 2);
                        r.extend(g.lits.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, l)| l.clone()));
                        r.extend(renamed.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| l.clone()));
                        out.push((apply(&r, &s), g.goal || other.goal));
                    }
                }
            }
        }
        out
    }

    fn run(&mut self) -> SearchEnd {
        for step in 0.. {
            if step >= self.limits.max_resolution_steps {
                return SearchEnd::StepLimit;
            }
            if self.deadline.expired() {
                return SearchEnd::Timeout;
            }
            let Some(given) = self.pick(step) else { return SearchEnd::Saturated };
            self.usable.push(given);
            for (c, goal) in self.inferences(given) {
                if self.add(c, goal) {
                    return SearchEnd::Refuted;
                }
                if self.store.len() > MAX_STORED {
                    return SearchEnd::StoreLimit;
                }
            }
        }
        unreachable!("loop returns")
    }
}

/// Tries to derive the empty clause from `premises` plus `goal` (already in the
/// polarity to refute with).
pub fn refute(premises: &[Formula], goal: &Formula, goal_positive: bool, limits: &EngineLimits) -> SearchEnd {
    let mut syms = Symbols::default();
    let mut initial: Vec<(Clause, bool)> = Vec::new();
    for p in premises {
        match clausify(p, true, &mut syms) {
            Ok(cs) => initial.extend(cs.into_iter().map(|c| (c, false))),
            Err(TooLarge) => return SearchEnd::StoreLimit,
        }
    }
    match clausify(goal, goal_positive, &mut syms) {
        Ok(cs) => initial.extend(cs.into_iter().map(|c| (c, true))),
        Err(TooLarge) => return SearchEnd::StoreLimit,
    }
    let mut prover = Prover { store: Vec::new(), usable: Vec::new(), sos: Vec::new(), limits, deadline: limits.deadline() };
    // Goal clauses first so that subsumption keeps their goal flag.
    initial.sort_by_key(|(_, goal)| !goal);
    for (c, goal) in initial {
        if prover.add(c, goal) {
            return SearchEnd::Refuted;
        }
    }
    prover.run()
}

pub fn solve_fol(p: &FolProgram, limits: &EngineLimits) -> SolverVerdict {
    let premises: Vec<Formula> = p.premises.iter().map(|s| s.formula.clone()).collect();
    let goal = &p.conclusion.formula;
    let first = refute(&premises, goal, false, limits);
    if first == SearchEnd::Refuted {
        return SolverVerdict::Proved;
    }
    let second = refute(&premises, goal, true, limits);
    if second == SearchEnd::Refuted {
        return SolverVerdict::Disproved;
    }
    if first == SearchEnd::Saturated && second == SearchEnd::Saturated {
        SolverVerdict::unknown_with("saturated")
    } else {
        let why = if first != SearchEnd::Saturated { first } else { second };
        SolverVerdict::unknown_with(why.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logiclang::fol::tests::JOHN;
    use crate::logiclang::fol::{parse_fol, parse_formula};

    fn program(premises: &[&str], conclusion: &str) -> FolProgram {
        use crate::logiclang::fol::{FolPredicate, FolStatement};
        let stmt = |s: &str| FolStatement { formula: parse_formula(s).unwrap(), gloss: None };
        FolProgram {
            predicates: Vec::<FolPredicate>::new(),
            premises: premises.iter().map(|s| stmt(s)).collect(),
            conclusion: stmt(conclusion),
        }
    }

    fn solve(premises: &[&str], conclusion: &str) -> SolverVerdict {
        solve_fol(&program(premises, conclusion), &EngineLimits::default())
    }

    #[test]
    fn john_is_unknown() {
        let p = parse_fol(JOHN).unwrap();
        assert_eq!(solve_fol(&p, &EngineLimits::default()), SolverVerdict::unknown_with("saturated"));
    }

    #[test]
    fn modus_ponens() {
        assert_eq!(solve(&["∀x (Bird(x) → Wings(x))", "Bird(john)"], "Wings(john)"), SolverVerdict::Proved);
        assert_eq!(solve(&["∀x (Bird(x) → ¬Wings(x))", "Bird(john)"], "Wings(john)"), SolverVerdict::Disproved);
    }

    #[test]
    fn inconsistent_premises_prove_anything() {
        assert_eq!(solve(&["∀x ¬P(x)", "P(a)"], "Q(b)"), SolverVerdict::Proved);
    }

    #[test]
    fn existentials_and_iff() {
        assert_eq!(solve(&["∀x (P(x) ↔ Q(x))", "∃x P(x)"], "∃y Q(y)"), SolverVerdict::Proved);
        assert_eq!(solve(&["∃x P(x)"], "P(a)"), SolverVerdict::unknown_with("saturated"));
        assert_eq!(solve(&["∀x ∃y R(x, y)", "∀x ∀y (R(x, y) → S(y))"], "∃z S(z)"), SolverVerdict::Proved);
    }

    #[test]
    fn multi_step_chain() {
        let v = solve(
            &["∀x (A(x) → B(x))", "∀x (B(x) → C(x))", "∀x (C(x) → D(x) ∨ E(x))", "∀x (E(x) → D(x))", "A(k)"],
            "D(k)",
        );
        assert_eq!(v, SolverVerdict::Proved);
    }

    #[test]
    fn step_limit_is_reported() {
        let limits = EngineLimits { max_resolution_steps: 1, ..EngineLimits::default() };
        let p = program(&["∀x (A(x) → B(x))", "∀x (B(x) → C(x))", "∀x (C(x) → D(x))", "A(k)", "E(k)"], "F(k)");
        let v = solve_fol(&p, &limits);
        assert_eq!(v, SolverVerdict::unknown_with("resolution step limit reached"));
    }
}
