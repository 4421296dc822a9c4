//! Backtracking search with forward checking over integer ranges.

use crate::logiclang::csp::{CmpOp, CspConstraint, CspExpr, CspModel, VarRef};
use crate::types::{Assignment, SolverVerdict};

use super::{Deadline, EngineLimits};

/// Domains wider than this are rejected rather than enumerated.
const MAX_DOMAIN: i64 = 100_000;

/// `(x[a] + oa) op (x[b] + ob)`
#[derive(Debug, Clone, Copy)]
struct Binary {
    a: usize,
    oa: i64,
    op: CmpOp,
    b: usize,
    ob: i64,
}

impl Binary {
    fn holds(&self, va: i64, vb: i64) -> bool {
        self.op.holds(va.saturating_add(self.oa), vb.saturating_add(self.ob))
    }
}

struct Search<'a> {
    names: Vec<String>,
    /// Constraints indexed by each participating variable.
    watch: Vec<Vec<&'a Binary>>,
    assignment: Vec<i64>,
    solutions: Vec<Assignment>,
    cap: usize,
    overflow: bool,
    deadline: Deadline,
    timed_out: bool,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, domains: &[Vec<i64>]) {
        if self.overflow || self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.expired() {
            self.timed_out = true;
            return;
        }
        if depth == domains.len() {
            if self.solutions.len() == self.cap {
                self.overflow = true;
            } else {
                let pairs = self.names.iter().cloned().zip(self.assignment.iter().copied()).collect();
                self.solutions.push(Assignment(pairs));
            }
            return;
        }
        'values: for &v in &domains[depth] {
            self.assignment[depth] = v;
            let mut next = domains.to_vec();
            next[depth] = vec![v];
            for c in &self.watch[depth] {
                let (other, this_is_a) = if c.a == depth { (c.b, true) } else { (c.a, false) };
                if other == depth {
                    continue;
                }
                if other < depth {
                    let vo = self.assignment[other];
                    let ok = if this_is_a { c.holds(v, vo) } else { c.holds(vo, v) };
                    if !ok {
                        continue 'values;
                    }
                    continue;
                }
                next[other].retain(|&w| if this_is_a { c.holds(v, w) } else { c.holds(w, v) });
                if next[other].is_empty() {
                    continue 'values;
                }
            }
            self.run(depth + 1, &next);
            if self.overflow || self.timed_out {
                return;
            }
        }
    }
}

/// Enumerates solutions in lexicographic order of the flattened variables.
pub fn solve_csp(m: &CspModel, limits: &EngineLimits) -> SolverVerdict {
    let vars = m.flat_vars();
    let index_of = |r: &VarRef| vars.iter().position(|(v, _, _)| v == r);
    let mut domains: Vec<Vec<i64>> = Vec::with_capacity(vars.len());
    for (v, lo, hi) in &vars {
        if hi.saturating_sub(*lo) >= MAX_DOMAIN {
            return SolverVerdict::unknown_with(format!("domain of {v} exceeds {MAX_DOMAIN} values"));
        }
        domains.push((*lo..=*hi).collect());
    }

    let mut binaries = Vec::new();
    for c in &m.constraints {
        let CspConstraint::Compare { lhs, op, rhs } = c else { continue };
        let side = |e: &CspExpr| match e {
            CspExpr::Var { var, offset } => index_of(var).map(|i| (Some(i), *offset)),
            CspExpr::Int(n) => Some((None, *n)),
        };
        let (Some(l), Some(r)) = (side(lhs), side(rhs)) else {
            return SolverVerdict::EngineError { detail: format!("constraint `{c}` references an unknown variable") };
        };
        match (l, r) {
            ((None, a), (None, b)) => {
                if !op.holds(a, b) {
                    return SolverVerdict::Solutions { assignments: vec![], complete: true };
                }
            }
            ((Some(i), oa), (None, b)) => domains[i].retain(|&x| op.holds(x.saturating_add(oa), b)),
            ((None, a), (Some(j), ob)) => domains[j].retain(|&x| op.holds(a, x.saturating_add(ob))),
            ((Some(i), oa), (Some(j), ob)) if i == j => domains[i].retain(|&x| op.holds(x.saturating_add(oa), x.saturating_add(ob))),
            ((Some(a), oa), (Some(b), ob)) => binaries.push(Binary { a, oa, op: *op, b, ob }),
        }
    }
    for group in m.all_different_groups() {
        let idx: Vec<usize> = group.iter().filter_map(index_of).collect();
        for (k, &a) in idx.iter().enumerate() {
            for &b in &idx[k + 1..] {
                if a != b {
                    binaries.push(Binary { a, oa: 0, op: CmpOp::Ne, b, ob: 0 });
                }
            }
        }
    }
    if domains.iter().any(Vec::is_empty) {
        return SolverVerdict::Solutions { assignments: vec![], complete: true };
    }

    let mut watch: Vec<Vec<&Binary>> = vec![Vec::new(); vars.len()];
    for c in &binaries {
        watch[c.a].push(c);
        watch[c.b].push(c);
    }
    let mut search = Search {
        names: vars.iter().map(|(v, _, _)| v.key()).collect(),
        watch,
        assignment: vec![0; vars.len()],
        solutions: Vec::new(),
        cap: limits.max_solutions,
        overflow: false,
        deadline: limits.deadline(),
        timed_out: false,
        nodes: 0,
    };
    search.run(0, &domains);
    if search.timed_out {
        return SolverVerdict::unknown_with("timeout");
    }
    SolverVerdict::Solutions { assignments: search.solutions, complete: !search.overflow }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logiclang::csp::parse_csp;
    use crate::logiclang::csp::tests::GOLFERS;

    fn solutions(src: &str, limits: &EngineLimits) -> (Vec<Assignment>, bool) {
        match solve_csp(&parse_csp(src).unwrap(), limits) {
            SolverVerdict::Solutions { assignments, complete } => (assignments, complete),
            other => panic!("unexpected verdict {other}"),
        }
    }

    #[test]
    fn golfers_have_unique_solution() {
        let (sols, complete) = solutions(GOLFERS, &EngineLimits::default());
        assert!(complete);
        assert_eq!(sols.len(), 1);
        let s = &sols[0];
        let order: Vec<i64> = ["Rob", "Ada", "Mel", "Dan", "Joe"].iter().map(|g| s.get(&format!("pos[{g}]")).unwrap()).collect();
        assert_eq!(order, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn contradictory_model_has_no_solutions() {
        let src = "enum O = {A, B};\narray[O] of var 1..2: pos;\nconstraint pos[A] < pos[B];\nconstraint pos[B] < pos[A];\nsolve satisfy;";
        assert_eq!(solutions(src, &EngineLimits::default()).0.len(), 0);
    }

    #[test]
    fn permutations_in_lexicographic_order() {
        let src = "enum O = {A, B, C};\narray[O] of var 1..3: pos;\nconstraint all_different([pos[o] | o in O]);\nsolve satisfy;";
        let (sols, complete) = solutions(src, &EngineLimits::default());
        assert!(complete);
        assert_eq!(sols.len(), 6);
        let keys: Vec<Vec<i64>> = sols.iter().map(|s| s.0.iter().map(|(_, v)| *v).collect()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn cap_marks_incomplete() {
        let src = "enum O = {A, B, C};\narray[O] of var 1..3: pos;\nconstraint all_different(pos);\nsolve satisfy;";
        let limits = EngineLimits { max_solutions: 4, ..EngineLimits::default() };
        let (sols, complete) = solutions(src, &limits);
        assert_eq!(sols.len(), 4);
        assert!(!complete);
    }

    #[test]
    fn offsets_and_scalars() {
        let src = "var 1..5: x;\nvar 1..5: y;\nconstraint x + 2 = y;\nconstraint y != 5;\nsolve satisfy;";
        let (sols, _) = solutions(src, &EngineLimits::default());
        let pairs: Vec<(i64, i64)> = sols.iter().map(|s| (s.get("x").unwrap(), s.get("y").unwrap())).collect();
        assert_eq!(pairs, vec![(1, 3), (2, 4)]);
    }
}
