//! Forward chaining to a fixpoint with per-fact provenance.

use std::collections::{BTreeSet, HashMap};

use crate::logiclang::lp::{LpAtom, LpProgram, LpRule, LpTerm};
use crate::types::SolverVerdict;

use super::EngineLimits;

/// How a fact entered the fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Given,
    /// Rule index and the ground antecedent instances it fired on.
    Rule(usize, Vec<LpAtom>),
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub facts: HashMap<LpAtom, Provenance>,
    /// Set when a limit stopped the iteration before the fixpoint.
    pub truncated: Option<String>,
}

impl Derivation {
    pub fn fixpoint(&self) -> BTreeSet<LpAtom> {
        self.facts.keys().cloned().collect()
    }

    pub fn contains(&self, atom: &LpAtom) -> bool {
        self.facts.contains_key(atom)
    }

    /// Number of distinct rule firings in the proof of `atom`, if derived.
    pub fn proof_firings(&self, atom: &LpAtom) -> Option<usize> {
        self.facts.get(atom)?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![atom.clone()];
        let mut firings = 0;
        while let Some(a) = stack.pop() {
            if !seen.insert(a.clone()) {
                continue;
            }
            if let Some(Provenance::Rule(_, premises)) = self.facts.get(&a) {
                firings += 1;
                stack.extend(premises.iter().cloned());
            }
        }
        Some(firings)
    }
}

type Subst = Vec<(String, String)>;

fn lookup<'a>(s: &'a Subst, v: &str) -> Option<&'a str> {
    s.iter().find(|(k, _)| k == v).map(|(_, c)| c.as_str())
}

fn match_atom(pattern: &LpAtom, fact: &LpAtom, subst: &Subst) -> Option<Subst> {
    if pattern.predicate != fact.predicate || pattern.value != fact.value || pattern.args.len() != fact.args.len() {
        return None;
    }
    let mut out = subst.clone();
    for (p, f) in pattern.args.iter().zip(&fact.args) {
        let LpTerm::Const(fc) = f else { return None };
        match p {
            LpTerm::Const(pc) if pc != fc => return None,
            LpTerm::Const(_) => {}
            LpTerm::Var(v) => match lookup(&out, v) {
                Some(bound) if bound != fc => return None,
                Some(_) => {}
                None => out.push((v.clone(), fc.clone())),
            },
        }
    }
    Some(out)
}

fn instantiate(atom: &LpAtom, subst: &Subst) -> LpAtom {
    LpAtom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|a| match a {
                LpTerm::Var(v) => LpTerm::Const(lookup(subst, v).unwrap_or(v).to_string()),
                c => c.clone(),
            })
            .collect(),
        value: atom.value,
    }
}

/// All substitutions satisfying the rule body against `facts`.
fn body_matches(rule: &LpRule, by_pred: &HashMap<&str, Vec<LpAtom>>) -> Vec<(Subst, Vec<LpAtom>)> {
    let mut partial: Vec<(Subst, Vec<LpAtom>)> = vec![(Vec::new(), Vec::new())];
    for pat in &rule.antecedent {
        let candidates = by_pred.get(pat.predicate.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let mut next = Vec::new();
        for (s, used) in &partial {
            for f in candidates {
                if let Some(s2) = match_atom(pat, f, s) {
                    let mut u = used.clone();
                    u.push(f.clone());
                    next.push((s2, u));
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            break;
        }
    }
    partial
}

/// Chaotic iteration: rules are tried in `order` each round until no new fact appears.
pub fn derive_with_order(p: &LpProgram, limits: &EngineLimits, order: &[usize]) -> Derivation {
    let deadline = limits.deadline();
    let mut facts: HashMap<LpAtom, Provenance> = p.facts.iter().map(|f| (f.atom.clone(), Provenance::Given)).collect();
    loop {
        let mut changed = false;
        for &ri in order {
            let Some(rule) = p.rules.get(ri) else { continue };
            let mut by_pred: HashMap<&str, Vec<LpAtom>> = HashMap::new();
            for a in facts.keys() {
                by_pred.entry(a.predicate.as_str()).or_default().push(a.clone());
            }
            for v in by_pred.values_mut() {
                v.sort();
            }
            for (subst, used) in body_matches(rule, &by_pred) {
                let head = instantiate(&rule.consequent, &subst);
                if let std::collections::hash_map::Entry::Vacant(e) = facts.entry(head) {
                    e.insert(Provenance::Rule(ri, used));
                    changed = true;
                    if facts.len() > limits.max_derived_facts {
                        return Derivation { facts, truncated: Some("derived-fact limit reached".into()) };
                    }
                }
            }
            if deadline.expired() {
                return Derivation { facts, truncated: Some("timeout".into()) };
            }
        }
        if !changed {
            return Derivation { facts, truncated: None };
        }
    }
}

pub fn derive(p: &LpProgram, limits: &EngineLimits) -> Derivation {
    let order: Vec<usize> = (0..p.rules.len()).collect();
    derive_with_order(p, limits, &order)
}

pub fn verdict_for(d: &Derivation, query: &LpAtom) -> SolverVerdict {
    if d.contains(query) {
        SolverVerdict::Proved
    } else if d.contains(&query.negated()) {
        SolverVerdict::Disproved
    } else if let Some(note) = &d.truncated {
        SolverVerdict::unknown_with(note.clone())
    } else {
        SolverVerdict::unknown()
    }
}

pub fn solve_lp(p: &LpProgram, limits: &EngineLimits) -> SolverVerdict {
    verdict_for(&derive(p, limits), &p.query.atom)
}
