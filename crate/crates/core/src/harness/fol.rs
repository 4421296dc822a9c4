//! First-order datasets and a finite-model checker used to label them.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lexicon::{pick, CLASSES, NAMES};
use super::{collect, GenError, Instance, Problem};
use crate::formalizer::cnl::fol::{FolSentence, FolText};
use crate::logiclang::fol::{FolProgram, Formula, Term};
use crate::logiclang::FormalProgram;
use crate::types::{AnswerOption, ReasoningType};

/// Entailment status of a conclusion found by enumerating finite models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelCheck {
    Entailed,
    Refuted,
    Independent,
    /// The premises have no model.
    Inconsistent,
}

/// Most ground atoms the checker will enumerate over.
pub const MAX_ATOMS: usize = 48;

#[derive(Debug, Clone)]
enum Ground {
    Atom(usize),
    Not(Box<Ground>),
    And(Vec<Ground>),
    Or(Vec<Ground>),
}

impl Ground {
    fn eval(&self, val: &[Option<bool>]) -> Option<bool> {
        match self {
            Ground::Atom(i) => val[*i],
            Ground::Not(g) => g.eval(val).map(|b| !b),
            Ground::And(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval(val) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                (!unknown).then_some(true)
            }
            Ground::Or(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval(val) {
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
    fn ground(&mut self, f: &Formula, env: &mut Vec<(String, String)>) -> Option<Ground> {
        Some(match f {
            Formula::Atom { predicate, args } => {
                let args: Vec<String> = args
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => Some(c.clone()),
                        Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).map(|(_, d)| d.clone()),
                    })
                    .collect::<Option<_>>()?;
                let next = self.atoms.len();
                Ground::Atom(*self.atoms.entry((predicate.clone(), args)).or_insert(next))
            }
            Formula::Not(g) => Ground::Not(Box::new(self.ground(g, env)?)),
            Formula::And(a, b) => Ground::And(vec![self.ground(a, env)?, self.ground(b, env)?]),
            Formula::Or(a, b) => Ground::Or(vec![self.ground(a, env)?, self.ground(b, env)?]),
            Formula::Implies(a, b) => Ground::Or(vec![Ground::Not(Box::new(self.ground(a, env)?)), self.ground(b, env)?]),
            Formula::Iff(a, b) => {
                let (a, b) = (self.ground(a, env)?, self.ground(b, env)?);
                Ground::Or(vec![
                    Ground::And(vec![a.clone(), b.clone()]),
                    Ground::And(vec![Ground::Not(Box::new(a)), Ground::Not(Box::new(b))]),
                ])
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let mut parts = Vec::with_capacity(self.domain.len());
                for d in self.domain {
                    env.push((v.clone(), d.clone()));
                    let g = self.ground(body, env);
                    env.pop();
                    parts.push(g?);
                }
                if matches!(f, Formula::Forall(..)) {
                    Ground::And(parts)
                } else {
                    Ground::Or(parts)
                }
            }
        })
    }
}

/// Quantifiers that act existentially when `f` is asserted with `positive` polarity.
fn witnesses(f: &Formula, positive: bool) -> usize {
    match f {
        Formula::Atom { .. } => 0,
        Formula::Not(g) => witnesses(g, !positive),
        Formula::And(a, b) | Formula::Or(a, b) => witnesses(a, positive) + witnesses(b, positive),
        Formula::Implies(a, b) => witnesses(a, !positive) + witnesses(b, positive),
        Formula::Iff(a, b) => witnesses(a, true) + witnesses(a, false) + witnesses(b, true) + witnesses(b, false),
        Formula::Exists(_, g) => usize::from(positive) + witnesses(g, positive),
        Formula::Forall(_, g) => usize::from(!positive) + witnesses(g, positive),
    }
}

fn satisfiable(formulas: &[Ground], n: usize) -> bool {
    fn go(formulas: &[Ground], val: &mut Vec<Option<bool>>, i: usize) -> bool {
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
        if i == val.len() {
            return false;
        }
        for b in [true, false] {
            val[i] = Some(b);
            if go(formulas, val, i + 1) {
                return true;
            }
        }
        val[i] = None;
        false
    }
    go(formulas, &mut vec![None; n], 0)
}

/// Decides the conclusion over a domain made of the program's constants plus
/// one fresh element per existential quantifier, capped at `max_universe`.
/// Returns `None` when the grounding is too large to enumerate.
pub fn model_check(p: &FolProgram, max_universe: usize) -> Option<ModelCheck> {
    let mut constants: BTreeSet<String> = BTreeSet::new();
    for f in p.premises.iter().map(|s| &s.formula).chain([&p.conclusion.formula]) {
        f.constants(&mut constants);
    }
    let fresh = p.premises.iter().map(|s| witnesses(&s.formula, true)).sum::<usize>()
        + witnesses(&p.conclusion.formula, true)
        + witnesses(&p.conclusion.formula, false);
    let mut domain: Vec<String> = constants.into_iter().collect();
    let fresh = fresh.max(usize::from(domain.is_empty()));
    domain.extend((1..=fresh).map(|i| format!("_w{i}")));
    if domain.len() > max_universe.max(1) {
        domain.truncate(max_universe.max(1));
    }
    let mut g = Grounder { domain: &domain, atoms: HashMap::new() };
    let premises: Vec<Ground> = p.premises.iter().map(|s| g.ground(&s.formula, &mut vec![])).collect::<Option<_>>()?;
    let conclusion = g.ground(&p.conclusion.formula, &mut vec![])?;
    let n = g.atoms.len();
    if n > MAX_ATOMS {
        return None;
    }
    let with = |c: Ground| premises.iter().cloned().chain([c]).collect::<Vec<_>>();
    let can_hold = satisfiable(&with(conclusion.clone()), n);
    let can_fail = satisfiable(&with(Ground::Not(Box::new(conclusion))), n);
    Some(match (can_hold, can_fail) {
        (true, true) => ModelCheck::Independent,
        (true, false) => ModelCheck::Entailed,
        (false, true) => ModelCheck::Refuted,
        (false, false) => ModelCheck::Inconsistent,
    })
}

fn sentence<R: Rng>(rng: &mut R, classes: &[&str], names: &[&str], quantified: bool) -> FolSentence {
    let c: Vec<String> = classes.choose_multiple(rng, 3).map(|s| s.to_string()).collect();
    let (a, b, cc) = (c[0].clone(), c[1].clone(), c[2].clone());
    let name = names.choose(rng).expect("names").to_string();
    if quantified {
        match rng.gen_range(0..10) {
            0..=3 => FolSentence::All { a, b },
            4..=5 => FolSentence::No { a, b },
            6 => FolSentence::Some { a, b },
            7..=8 => FolSentence::AllEither { a, b, c: cc },
            _ => FolSentence::AllBoth { a, b, c: cc },
        }
    } else {
        match rng.gen_range(0..8) {
            0..=3 => FolSentence::Is { name, class: a, positive: rng.gen_bool(0.7) },
            4..=5 => FolSentence::Either { name, a, b },
            6 => FolSentence::Neither { name, a, b },
            _ => FolSentence::Both { name, a, b },
        }
    }
}

/// Quantified class statements plus facts about named individuals.
pub fn fol_text<R: Rng>(rng: &mut R) -> FolText {
    let k = rng.gen_range(4..=5);
    let classes = pick(rng, &CLASSES, k);
    let k = rng.gen_range(1..=2);
    let names = pick(rng, &NAMES, k);
    let quantified = rng.gen_range(2..=4);
    let ground = rng.gen_range(1..=2);
    let mut premises: Vec<FolSentence> = (0..quantified).map(|_| sentence(rng, &classes, &names, true)).collect();
    premises.extend((0..ground).map(|_| sentence(rng, &classes, &names, false)));
    if premises.iter().filter(|s| matches!(s, FolSentence::Some { .. })).count() > 1 {
        premises.retain(|s| !matches!(s, FolSentence::Some { .. }));
        premises.push(sentence(rng, &classes, &names, true));
    }
    premises.shuffle(rng);
    let name = premises.iter().find_map(FolSentence::individual).unwrap_or(names[0]).to_string();
    let class = classes.choose(rng).expect("classes").to_string();
    FolText { premises, conclusion: FolSentence::Is { name, class, positive: true } }
}

/// Problems labeled by model checking, cycling through entailed, refuted and
/// independent conclusions.
pub fn gen_fol(n: usize, seed: u64) -> Result<Vec<Instance>, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    collect("fol", seed, n, &mut rng, |rng, i| {
        let mut text = fol_text(rng);
        if text.premises.iter().filter(|s| !s.is_ground()).count() < 2 {
            return None;
        }
        let status = model_check(&text.build(), 6)?;
        let target = [ModelCheck::Entailed, ModelCheck::Refuted, ModelCheck::Independent][i % 3];
        match (status, target) {
            (ModelCheck::Inconsistent, _) => return None,
            (s, t) if s == t => {}
            (ModelCheck::Entailed, ModelCheck::Refuted) | (ModelCheck::Refuted, ModelCheck::Entailed) => {
                if let FolSentence::Is { positive, .. } = &mut text.conclusion {
                    *positive = !*positive;
                }
            }
            _ => return None,
        }
        Some(Problem {
            ty: ReasoningType::Fol,
            first: text.premise_text(),
            second: text.conclusion_text(),
            options: vec!["True".into(), "False".into(), "Unknown".into()],
            program: FormalProgram::Fol(text.build()),
            gold: AnswerOption::label_for(i % 3),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logiclang::fol::tests::JOHN;
    use crate::logiclang::parse_fol;

    #[test]
    fn john_is_independent() {
        assert_eq!(model_check(&parse_fol(JOHN).unwrap(), 6), Some(ModelCheck::Independent));
    }

    #[test]
    fn syllogisms() {
        let p = |prem: &str, hyp: &str| FolText::parse(prem, hyp).unwrap().build();
        assert_eq!(
            model_check(&p("All wumpuses are zumpuses. Alex is a wumpus.", "Alex is a zumpus."), 6),
            Some(ModelCheck::Entailed)
        );
        assert_eq!(
            model_check(&p("No wumpuses are zumpuses. Alex is a wumpus.", "Alex is a zumpus."), 6),
            Some(ModelCheck::Refuted)
        );
        assert_eq!(
            model_check(&p("Some wumpuses are zumpuses. Alex is a wumpus.", "Alex is a zumpus."), 6),
            Some(ModelCheck::Independent)
        );
        assert_eq!(
            model_check(&p("All wumpuses are zumpuses. No wumpuses are zumpuses. Some wumpuses are rompuses.", "Alex is a zumpus."), 6),
            Some(ModelCheck::Inconsistent)
        );
    }

    #[test]
    fn labels_are_balanced() {
        let set = gen_fol(300, 4).unwrap();
        let count = |l: &str| set.iter().filter(|i| i.gold_answer == l).count();
        let (p, d, u) = (count("A)"), count("B)"), count("C)"));
        assert_eq!(p + d + u, 300);
        assert!(p.abs_diff(d) <= 1);
        assert!(p.abs_diff(u) <= 1);
    }

    #[test]
    fn labels_match_the_checker() {
        for inst in gen_fol(30, 8).unwrap() {
            let FormalProgram::Fol(p) = inst.program().unwrap() else { panic!() };
            let want = match inst.gold_answer.as_str() {
                "A)" => ModelCheck::Entailed,
                "B)" => ModelCheck::Refuted,
                _ => ModelCheck::Independent,
            };
            assert_eq!(model_check(&p, 6), Some(want), "{}", inst.nl_text);
        }
    }
}
