//! Reference oracles and fixtures shared by the integration tests.
//!
//! The oracles are deliberately naive and share no code with the engines.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use polyreason::logiclang::csp::{AllDiffArg, CmpOp, CspConstraint, CspExpr, CspModel};
use polyreason::logiclang::fol::{Formula, FolProgram, Term};
use polyreason::logiclang::smt::{SmtScript, SmtTerm, Sort};

pub type Rational = Ratio<i128>;

pub const STELLA: &str = "Predicates:
dumpus($x, bool) ::: Is x a dumpus?
red($x, bool) ::: Is x red?
tumpus($x, bool) ::: Is x a tumpus?
impus($x, bool) ::: Is x an impus?
feisty($x, bool) ::: Is x feisty?
yumpus($x, bool) ::: Is x a yumpus?
isA($x, $type, bool) ::: Is x of type $type?

Facts:
dumpus(Stella, True) ::: Stella is a dumpus.

Rules:
dumpus($x, True) >>> red($x, False) ::: Every dumpus is not red.
tumpus($x, True) >>> red($x, True) ::: Tumpuses are red.
dumpus($x, True) >>> impus($x, True) ::: Dumpuses are impuses.
impus($x, True) >>> feisty($x, False) ::: Impuses are not feisty.
impus($x, True) >>> yumpus($x, True) ::: Impuses are yumpuses.

Query:
red(Stella, False) ::: Stella is not red.
";

pub const TRIAL: &str = "(declare-const age_in_years Int)
(declare-const acute_pancreatitis Bool)
(declare-const informed_consent Bool)
(declare-const time_of_debut_of_symptoms Real)
(declare-const chronic_pancreatitis Bool)
(declare-const pregnancy Bool)
(declare-const malignant_disease Bool)
(assert (and
  (> age_in_years 18)
  acute_pancreatitis
  informed_consent
  (> time_of_debut_of_symptoms 0)
))
(assert (not (or
  chronic_pancreatitis
  pregnancy
  malignant_disease
  (> time_of_debut_of_symptoms 72)
)))
";

pub fn patient(hours: u32) -> String {
    format!(
        "(assert (= age_in_years 57))
(assert (= acute_pancreatitis true))
(assert (= informed_consent true))
(assert (= time_of_debut_of_symptoms {hours}))
(assert (= chronic_pancreatitis false))
(assert (= pregnancy false))
(assert (= malignant_disease false))
(check-sat)
"
    )
}

// ---------------------------------------------------------------- CSP

pub type CspSolution = Vec<(String, i64)>;

fn csp_vars(m: &CspModel) -> Vec<(String, String, i64, i64)> {
    let mut out = Vec::new();
    for v in &m.vars {
        match &v.index {
            Some(e) => {
                let members = m.enums.iter().find(|x| &x.name == e).map(|x| x.members.clone()).unwrap_or_default();
                for member in members {
                    out.push((format!("{}[{}]", v.name, member), v.name.clone(), v.lo, v.hi));
                }
            }
            None => out.push((v.name.clone(), v.name.clone(), v.lo, v.hi)),
        }
    }
    out
}

fn csp_expr(e: &CspExpr, env: &HashMap<String, i64>) -> i64 {
    match e {
        CspExpr::Int(n) => *n,
        CspExpr::Var { var, offset } => {
            let key = match &var.index {
                Some(i) => format!("{}[{}]", var.array, i),
                None => var.array.clone(),
            };
            env[&key] + offset
        }
    }
}

fn cmp<T: PartialOrd>(op: CmpOp, a: T, b: T) -> bool {
    match op {
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    }
}

fn csp_holds(m: &CspModel, vars: &[(String, String, i64, i64)], env: &HashMap<String, i64>) -> bool {
    m.constraints.iter().all(|c| match c {
        CspConstraint::Compare { lhs, op, rhs } => cmp(*op, csp_expr(lhs, env), csp_expr(rhs, env)),
        CspConstraint::AllDifferent(arg) => {
            let keys: Vec<String> = match arg {
                AllDiffArg::Array(a) | AllDiffArg::Comprehension { array: a, .. } => {
                    vars.iter().filter(|v| &v.1 == a).map(|v| v.0.clone()).collect()
                }
                AllDiffArg::List(vs) => vs
                    .iter()
                    .map(|v| match &v.index {
                        Some(i) => format!("{}[{}]", v.array, i),
                        None => v.array.clone(),
                    })
                    .collect(),
            };
            let values: BTreeSet<i64> = keys.iter().map(|k| env[k]).collect();
            values.len() == keys.len()
        }
    })
}

fn permutations(values: &[i64]) -> Vec<Vec<i64>> {
    if values.len() <= 1 {
        return vec![values.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..values.len() {
        let mut rest = values.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Every solution, by permutation filtering when the variables form one
/// all-different block over `1..=n`, otherwise by the full product.
pub fn csp_brute_force(m: &CspModel) -> BTreeSet<CspSolution> {
    let vars = csp_vars(m);
    let n = vars.len() as i64;
    let permutation_block = vars.iter().all(|v| v.2 == 1 && v.3 == n)
        && m.constraints.iter().any(|c| matches!(c, CspConstraint::AllDifferent(_)))
        && vars.iter().map(|v| &v.1).collect::<BTreeSet<_>>().len() == 1;
    let candidates: Vec<Vec<i64>> = if permutation_block {
        permutations(&(1..=n).collect::<Vec<_>>())
    } else {
        let mut all: Vec<Vec<i64>> = vec![vec![]];
        for v in &vars {
            all = all.into_iter().flat_map(|p| (v.2..=v.3).map(move |x| [p.clone(), vec![x]].concat())).collect();
        }
        all
    };
    let mut out = BTreeSet::new();
    for values in candidates {
        let env: HashMap<String, i64> = vars.iter().map(|v| v.0.clone()).zip(values.iter().copied()).collect();
        if csp_holds(m, &vars, &env) {
            let mut sol: CspSolution = env.into_iter().collect();
            sol.sort();
            out.insert(sol);
        }
    }
    out
}

// ---------------------------------------------------------------- SMT

fn smt_num(t: &SmtTerm, nums: &BTreeMap<String, Rational>) -> Rational {
    match t {
        SmtTerm::Num(r) => *r,
        SmtTerm::Const(c) => nums[c],
        other => panic!("not numeric: {other:?}"),
    }
}

fn smt_bool(t: &SmtTerm, bools: &BTreeMap<String, bool>, nums: &BTreeMap<String, Rational>) -> bool {
    match t {
        SmtTerm::Bool(b) => *b,
        SmtTerm::Const(c) => bools[c],
        SmtTerm::Num(_) => panic!("number in boolean position"),
        SmtTerm::Not(a) => !smt_bool(a, bools, nums),
        SmtTerm::And(ts) => ts.iter().all(|t| smt_bool(t, bools, nums)),
        SmtTerm::Or(ts) => ts.iter().any(|t| smt_bool(t, bools, nums)),
        SmtTerm::Implies(a, b) => !smt_bool(a, bools, nums) || smt_bool(b, bools, nums),
        SmtTerm::Iff(a, b) => smt_bool(a, bools, nums) == smt_bool(b, bools, nums),
        SmtTerm::Cmp(op, a, b) => {
            let is_bool = |t: &SmtTerm| matches!(t, SmtTerm::Bool(_)) || matches!(t, SmtTerm::Const(c) if bools.contains_key(c));
            if is_bool(a) || is_bool(b) {
                cmp(*op, smt_bool(a, bools, nums), smt_bool(b, bools, nums))
            } else {
                cmp(*op, smt_num(a, nums), smt_num(b, nums))
            }
        }
    }
}

fn literals_near(t: &SmtTerm, name: &str, out: &mut BTreeSet<Rational>) {
    match t {
        SmtTerm::Cmp(_, a, b) => {
            for (x, y) in [(a, b), (b, a)] {
                if matches!(&**x, SmtTerm::Const(c) if c == name) {
                    if let SmtTerm::Num(r) = &**y {
                        out.insert(*r);
                    }
                }
            }
        }
        SmtTerm::Not(a) => literals_near(a, name, out),
        SmtTerm::And(ts) | SmtTerm::Or(ts) => ts.iter().for_each(|t| literals_near(t, name, out)),
        SmtTerm::Implies(a, b) | SmtTerm::Iff(a, b) => {
            literals_near(a, name, out);
            literals_near(b, name, out);
        }
        _ => {}
    }
}

/// Probe values for one numeric constant: zero, each literal it is compared
/// with, and the neighbours of each literal.
pub fn probe_grid(s: &SmtScript, name: &str, sort: Sort) -> Vec<Rational> {
    let mut lits = BTreeSet::new();
    s.assertions.iter().for_each(|a| literals_near(a, name, &mut lits));
    let mut grid = BTreeSet::from([Rational::from_integer(0)]);
    let one = Rational::from_integer(1);
    let half = Rational::new(1, 2);
    for l in lits {
        grid.extend([l, l - one, l + one]);
        if sort == Sort::Real {
            grid.extend([l - half, l + half]);
        }
    }
    grid.into_iter().filter(|r| sort != Sort::Int || r.is_integer()).collect()
}

/// Satisfiability by enumerating every boolean assignment crossed with the
/// probe grid of every numeric constant.
pub fn smt_brute_force(s: &SmtScript) -> bool {
    let bools: Vec<&str> = s.decls.iter().filter(|d| d.sort == Sort::Bool).map(|d| d.name.as_str()).collect();
    let nums: Vec<(&str, Vec<Rational>)> =
        s.decls.iter().filter(|d| d.sort != Sort::Bool).map(|d| (d.name.as_str(), probe_grid(s, &d.name, d.sort))).collect();
    let mut numeric_points: Vec<BTreeMap<String, Rational>> = vec![BTreeMap::new()];
    for (name, grid) in &nums {
        numeric_points = numeric_points
            .into_iter()
            .flat_map(|p| {
                grid.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(name.to_string(), *v);
                    q
                })
            })
            .collect();
    }
    for mask in 0u64..(1u64 << bools.len()) {
        let b: BTreeMap<String, bool> = bools.iter().enumerate().map(|(i, n)| (n.to_string(), mask >> i & 1 == 1)).collect();
        for point in &numeric_points {
            if s.assertions.iter().all(|a| smt_bool(a, &b, point)) {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------- FOL

#[derive(Debug, Clone)]
enum Prop {
    Atom(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    fn eval(&self, val: &[Option<bool>]) -> Option<bool> {
        match self {
            Prop::Atom(i) => val[*i],
            Prop::Not(p) => p.eval(val).map(|b| !b),
            Prop::And(ps) => {
                let mut unknown = false;
                for p in ps {
                    match p.eval(val) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                (!unknown).then_some(true)
            }
            Prop::Or(ps) => {
                let mut unknown = false;
                for p in ps {
                    match p.eval(val) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                (!unknown).then_some(false)
            }
        }
    }
}

struct Grounder<'a> {
    domain: &'a [String],
    atoms: HashMap<(String, Vec<String>), usize>,
}

impl Grounder<'_> {
    fn ground(&mut self, f: &Formula, env: &mut Vec<(String, String)>) -> Prop {
        match f {
            Formula::Atom { predicate, args } => {
                let args: Vec<String> = args
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => c.clone(),
                        Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).map(|(_, e)| e.clone()).expect("bound variable"),
                    })
                    .collect();
                let next = self.atoms.len();
                Prop::Atom(*self.atoms.entry((predicate.clone(), args)).or_insert(next))
            }
            Formula::Not(a) => Prop::Not(Box::new(self.ground(a, env))),
            Formula::And(a, b) => Prop::And(vec![self.ground(a, env), self.ground(b, env)]),
            Formula::Or(a, b) => Prop::Or(vec![self.ground(a, env), self.ground(b, env)]),
            Formula::Implies(a, b) => Prop::Or(vec![Prop::Not(Box::new(self.ground(a, env))), self.ground(b, env)]),
            Formula::Iff(a, b) => {
                let (x, y) = (self.ground(a, env), self.ground(b, env));
                Prop::And(vec![
                    Prop::Or(vec![Prop::Not(Box::new(x.clone())), y.clone()]),
                    Prop::Or(vec![x, Prop::Not(Box::new(y))]),
                ])
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let parts = self
                    .domain
                    .iter()
                    .map(|e| {
                        env.push((v.clone(), e.clone()));
                        let p = self.ground(body, env);
                        env.pop();
                        p
                    })
                    .collect();
                if matches!(f, Formula::Forall(..)) {
                    Prop::And(parts)
                } else {
                    Prop::Or(parts)
                }
            }
        }
    }
}

fn satisfiable(formulas: &[Prop], val: &mut Vec<Option<bool>>, next: usize) -> bool {
    let mut all_true = true;
    for f in formulas {
        match f.eval(val) {
            Some(false) => return false,
            None => all_true = false,
            Some(true) => {}
        }
    }
    if all_true {
        return true;
    }
    if next == val.len() {
        return false;
    }
    for b in [true, false] {
        val[next] = Some(b);
        if satisfiable(formulas, val, next + 1) {
            val[next] = None;
            return true;
        }
    }
    val[next] = None;
    false
}

/// Whether premises plus `extra` have a model over the constants padded with
/// fresh elements up to `universe` elements.
pub fn fol_has_model(p: &FolProgram, extra: &Formula, universe: usize) -> bool {
    let mut domain: Vec<String> = p.constants().into_iter().collect();
    let mut k = 0;
    while domain.len() < universe {
        k += 1;
        domain.push(format!("_e{k}"));
    }
    let mut g = Grounder { domain: &domain, atoms: HashMap::new() };
    let mut formulas: Vec<Prop> = p.premises.iter().map(|s| g.ground(&s.formula, &mut vec![])).collect();
    formulas.push(g.ground(extra, &mut vec![]));
    let mut val = vec![None; g.atoms.len()];
    satisfiable(&formulas, &mut val, 0)
}

/// Proved is confirmed when no model of the premises falsifies the conclusion.
pub fn fol_confirms_proved(p: &FolProgram, universe: usize) -> bool {
    !fol_has_model(p, &Formula::Not(Box::new(p.conclusion.formula.clone())), universe)
}

/// Disproved is confirmed when no model of the premises satisfies the conclusion.
pub fn fol_confirms_disproved(p: &FolProgram, universe: usize) -> bool {
    !fol_has_model(p, &p.conclusion.formula, universe)
}
