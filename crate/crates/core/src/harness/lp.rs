//! Logic-programming datasets: class chains and open-world rule sets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lexicon::{pick, CLASSES, NAMES, PROPERTIES};
use super::{collect, GenError, Instance, Problem};
use crate::engines::lp::{derive, verdict_for};
use crate::engines::EngineLimits;
use crate::formalizer::cnl::lp::{Literal, LpSentence, LpText, Property};
use crate::logiclang::lp::{LpAtom, LpTerm};
use crate::logiclang::FormalProgram;
use crate::types::{ReasoningType, SolverVerdict};

fn class_rule<R: Rng>(rng: &mut R, class: &str, literal: Literal) -> LpSentence {
    if rng.gen_bool(0.5) {
        LpSentence::Every { class: class.to_string(), literal }
    } else {
        LpSentence::Plural { class: class.to_string(), literal }
    }
}

fn problem(text: &LpText, options: &[&str], gold: usize) -> Problem {
    Problem {
        ty: ReasoningType::Lp,
        first: text.premise_text(),
        second: text.query_text(),
        options: options.iter().map(|s| s.to_string()).collect(),
        program: FormalProgram::Lp(text.build()),
        gold: crate::types::AnswerOption::label_for(gold),
    }
}

/// One individual, a chain of `hops - 1` class memberships ending in a
/// property rule, and distractor rules. Even indices are provable, odd
/// ones refutable; the query is negated on every other pair.
pub fn chain_text<R: Rng>(rng: &mut R, hops: usize, provable: bool, negated_query: bool) -> LpText {
    let words = pick(rng, &CLASSES, hops + 1);
    let (chain, distractor) = (&words[..hops], words[hops]);
    let props = pick(rng, &PROPERTIES, hops);
    let queried = props[0];
    let name = *NAMES.choose(rng).expect("names");
    let query_positive = !negated_query;
    let rule_positive = if provable { query_positive } else { !query_positive };

    let mut rules = Vec::new();
    for w in chain.windows(2) {
        rules.push(class_rule(rng, w[0], Literal::new(Property::noun(w[1]), true)));
    }
    rules.push(class_rule(rng, chain[hops - 1], Literal::new(Property::adjective(queried), rule_positive)));
    for (class, prop) in chain[..hops - 1].iter().zip(&props[1..]) {
        let positive = rng.gen_bool(0.5);
        rules.push(class_rule(rng, class, Literal::new(Property::adjective(prop), positive)));
    }
    rules.push(class_rule(rng, distractor, Literal::new(Property::adjective(queried), !rule_positive)));
    rules.shuffle(rng);
    rules.push(LpSentence::Fact { name: name.to_string(), literal: Literal::new(Property::noun(chain[0]), true) });
    LpText { premises: rules, query_name: name.to_string(), query: Literal::new(Property::adjective(queried), query_positive) }
}

/// Class-chain problems whose query needs exactly `hops` rule firings.
pub fn gen_lp_chain(hops: usize, n: usize, seed: u64) -> Result<Vec<Instance>, GenError> {
    if hops == 0 || hops >= CLASSES.len() || hops > PROPERTIES.len() {
        return Err(GenError::InvalidParameter(format!("hops must be in 1..{}, got {hops}", CLASSES.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    collect(&format!("lp-chain-{hops}"), seed, n, &mut rng, |rng, i| {
        let provable = i % 2 == 0;
        let text = chain_text(rng, hops, provable, (i / 2) % 2 == 1);
        Some(problem(&text, &["True", "False"], if provable { 0 } else { 1 }))
    })
}

fn random_literal<R: Rng>(rng: &mut R, props: &[&str], positive_bias: f64) -> Literal {
    Literal::new(Property::adjective(props.choose(rng).expect("properties")), rng.gen_bool(positive_bias))
}

/// Facts about one or two people plus conditional rules. Labels cycle
/// through provable, refutable and unknown.
pub fn open_text<R: Rng>(rng: &mut R, target: SolverVerdict) -> Option<LpText> {
    let k = rng.gen_range(1..=2);
    let names = pick(rng, &NAMES, k);
    let k = rng.gen_range(4..=6);
    let props = pick(rng, &PROPERTIES, k);
    let mut premises = Vec::new();
    for _ in 0..rng.gen_range(2..=4) {
        let name = names.choose(rng).expect("names");
        premises.push(LpSentence::Fact { name: name.to_string(), literal: random_literal(rng, &props, 0.75) });
    }
    for _ in 0..rng.gen_range(2..=4) {
        let mut body = vec![random_literal(rng, &props, 0.8)];
        if rng.gen_bool(0.4) {
            body.push(random_literal(rng, &props, 0.6));
        }
        let head = random_literal(rng, &props, 0.6);
        if body.iter().any(|b| b.property == head.property) || (body.len() == 2 && body[0].property == body[1].property) {
            return None;
        }
        premises.push(LpSentence::Conditional { body, head });
    }
    premises.shuffle(rng);

    let draft = LpText { premises, query_name: names[0].to_string(), query: Literal::new(Property::adjective(props[0]), true) };
    let program = draft.build();
    let d = derive(&program, &EngineLimits::default());
    let atom = |name: &str, prop: &str, value: bool| LpAtom {
        predicate: prop.to_string(),
        args: vec![LpTerm::Const(name.to_string())],
        value,
    };
    let facts = d.fixpoint();
    if facts.iter().any(|a| facts.contains(&LpAtom { value: !a.value, ..a.clone() })) {
        return None;
    }
    let mut candidates: Vec<(&str, &str, bool)> = Vec::new();
    for name in &names {
        for prop in &props {
            let t = d.contains(&atom(name, prop, true));
            let f = d.contains(&atom(name, prop, false));
            match target {
                SolverVerdict::Proved if t => candidates.push((name, prop, true)),
                SolverVerdict::Proved if f => candidates.push((name, prop, false)),
                SolverVerdict::Disproved if t => candidates.push((name, prop, false)),
                SolverVerdict::Disproved if f => candidates.push((name, prop, true)),
                SolverVerdict::Unknown { .. } if !t && !f => candidates.push((name, prop, rng.gen_bool(0.5))),
                _ => {}
            }
        }
    }
    // Prefer queries that need at least one rule.
    let derived: Vec<(&str, &str, bool)> = candidates
        .iter()
        .copied()
        .filter(|(n, p, v)| {
            let held = if matches!(target, SolverVerdict::Disproved) { !v } else { *v };
            d.proof_firings(&atom(n, p, held)).is_some_and(|k| k > 0)
        })
        .collect();
    let pool = if derived.is_empty() { &candidates } else { &derived };
    let (name, prop, positive) = *pool.choose(rng)?;
    let text = LpText { query_name: name.to_string(), query: Literal::new(Property::adjective(prop), positive), ..draft };
    let verdict = verdict_for(&d, &atom(name, prop, positive));
    (std::mem::discriminant(&verdict) == std::mem::discriminant(&target)).then_some(text)
}

/// Open-world problems with True/False/Unknown options.
pub fn gen_lp_open(n: usize, seed: u64) -> Result<Vec<Instance>, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    collect("lp-open", seed, n, &mut rng, |rng, i| {
        let (target, gold) = match i % 3 {
            0 => (SolverVerdict::Proved, 0),
            1 => (SolverVerdict::Disproved, 1),
            _ => (SolverVerdict::unknown(), 2),
        };
        let text = open_text(rng, target)?;
        Some(problem(&text, &["True", "False", "Unknown"], gold))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::lp::solve_lp;
    use crate::logiclang::lp::LpProgram;

    fn lp(i: &Instance) -> LpProgram {
        match i.program().unwrap() {
            FormalProgram::Lp(p) => p,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn five_hops_need_five_firings() {
        for inst in gen_lp_chain(5, 8, 7).unwrap() {
            let p = lp(&inst);
            let d = derive(&p, &EngineLimits::default());
            let q = &p.query.atom;
            let held = if d.contains(q) { q.clone() } else { LpAtom { value: !q.value, ..q.clone() } };
            assert_eq!(d.proof_firings(&held), Some(5), "{}", inst.nl_text);
        }
    }

    #[test]
    fn single_hop_and_flipped_query() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = chain_text(&mut rng, 1, true, false);
        assert_eq!(solve_lp(&t.build(), &EngineLimits::default()), SolverVerdict::Proved);
        let flipped = LpText { query: Literal::new(t.query.property.clone(), !t.query.positive), ..t };
        assert_eq!(solve_lp(&flipped.build(), &EngineLimits::default()), SolverVerdict::Disproved);
    }

    #[test]
    fn chain_labels_alternate_and_half_are_negated() {
        let set = gen_lp_chain(3, 40, 11).unwrap();
        let trues = set.iter().filter(|i| i.gold_answer == "A)").count();
        assert_eq!(trues, 20);
        let negated = set.iter().filter(|i| i.nl_text.contains("QUESTION:\n") && i.nl_text.split("QUESTION:\n").nth(1).unwrap().lines().next().unwrap().contains(" not ")).count();
        assert_eq!(negated, 20);
    }

    #[test]
    fn open_world_is_balanced() {
        let set = gen_lp_open(30, 5).unwrap();
        for (label, want) in [("A)", 10), ("B)", 10), ("C)", 10)] {
            assert_eq!(set.iter().filter(|i| i.gold_answer == label).count(), want);
        }
        assert!(set.iter().all(|i| i.nl_text.contains("C) Unknown")));
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen_lp_chain(5, 5, 9).unwrap(), gen_lp_chain(5, 5, 9).unwrap());
        assert_eq!(gen_lp_open(5, 9).unwrap(), gen_lp_open(5, 9).unwrap());
        assert!(gen_lp_chain(0, 1, 1).is_err());
    }
}
