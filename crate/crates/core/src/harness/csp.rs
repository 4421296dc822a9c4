//! Ordering puzzles with a unique solution.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{collect, GenError, Instance, Problem};
use crate::formalizer::cnl::csp::{CspStatement, CspText, Scene};
use crate::logiclang::FormalProgram;
use crate::types::{AnswerOption, ReasoningType};

/// Calls `f` with every permutation of `0..n` (as position of each object,
/// 1-based) until it returns false.
pub fn for_each_order(n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut pos: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    if !f(&pos) {
        return;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                pos.swap(0, i);
            } else {
                pos.swap(c[i], i);
            }
            if !f(&pos) {
                return;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Number of orders satisfying every statement, counting at most `cap`.
pub fn count_orders(members: &[String], statements: &[CspStatement], cap: usize) -> usize {
    let mut count = 0;
    for_each_order(members.len(), |pos| {
        let at = |m: &str| members.iter().position(|x| x == m).map(|i| pos[i]);
        if statements.iter().all(|s| s.holds(at) == Some(true)) {
            count += 1;
        }
        count < cap
    });
    count
}

/// Samples an order, then keeps one anchor plus enough true comparisons to
/// pin it down, and drops comparisons that are not needed.
pub fn ordering_text<R: Rng>(rng: &mut R, n: usize) -> (CspText, Vec<usize>) {
    let scene = *Scene::ALL.choose(rng).expect("scenes");
    let members: Vec<String> = scene.lexicon().choose_multiple(rng, n).map(|s| s.to_string()).collect();
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let anchor = rng.gen_range(0..n);
    let mut statements = vec![CspStatement::At(members[anchor].clone(), order[anchor])];

    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a < b).collect();
    pairs.shuffle(rng);
    for (a, b) in pairs {
        if count_orders(&members, &statements, 2) == 1 {
            break;
        }
        let (first, second) = if order[a] < order[b] { (a, b) } else { (b, a) };
        statements.push(if rng.gen_bool(0.5) {
            CspStatement::Before(members[first].clone(), members[second].clone())
        } else {
            CspStatement::After(members[second].clone(), members[first].clone())
        });
    }
    let mut i = 1;
    while i < statements.len() {
        let mut trial = statements.clone();
        trial.remove(i);
        if count_orders(&members, &trial, 2) == 1 {
            statements = trial;
        } else {
            i += 1;
        }
    }
    statements[1..].shuffle(rng);
    let k = rng.gen_range(0..statements.len());
    statements.swap(0, k);
    (CspText { scene, members, statements }, order)
}

/// Ordering problems over `n_objects` objects. Options claim a position for
/// each object; only the true claim holds in the unique solution.
pub fn gen_csp_ordering(n_objects: usize, n: usize, seed: u64) -> Result<Vec<Instance>, GenError> {
    if ![3, 5, 7].contains(&n_objects) {
        return Err(GenError::InvalidParameter(format!("n_objects must be 3, 5 or 7, got {n_objects}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    collect(&format!("csp-{n_objects}"), seed, n, &mut rng, |rng, _| {
        let (text, order) = ordering_text(rng, n_objects);
        let anchored: Vec<usize> = text
            .statements
            .iter()
            .filter_map(|s| match s {
                CspStatement::At(_, k) => Some(*k),
                _ => None,
            })
            .collect();
        let open: Vec<usize> = (1..=n_objects).filter(|p| !anchored.contains(p)).collect();
        let place = *open.choose(rng)?;
        let mut claimed: Vec<usize> = (0..n_objects).collect();
        claimed.shuffle(rng);
        let options: Vec<String> =
            claimed.iter().map(|&m| CspStatement::At(text.members[m].clone(), place).render(text.scene, n_objects)).collect();
        let gold = claimed.iter().position(|&m| order[m] == place)?;
        Some(Problem {
            ty: ReasoningType::Csp,
            first: text.to_string(),
            second: "Which of the following is true?".into(),
            options,
            program: FormalProgram::Csp(text.build()),
            gold: AnswerOption::label_for(gold),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_are_complete() {
        let mut seen = std::collections::BTreeSet::new();
        for_each_order(4, |p| {
            seen.insert(p.to_vec());
            true
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn unique_and_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [3, 5, 7] {
            for _ in 0..5 {
                let (t, order) = ordering_text(&mut rng, n);
                assert_eq!(count_orders(&t.members, &t.statements, 3), 1);
                let at = |m: &str| t.members.iter().position(|x| x == m).map(|i| order[i]);
                assert!(t.statements.iter().all(|s| s.holds(at) == Some(true)));
                assert_eq!(t.statements.iter().filter(|s| matches!(s, CspStatement::At(..))).count(), 1);
                for i in 0..t.statements.len() {
                    let mut fewer = t.statements.clone();
                    let removed = fewer.remove(i);
                    if !matches!(removed, CspStatement::At(..)) {
                        assert!(count_orders(&t.members, &fewer, 2) > 1);
                    }
                }
            }
        }
    }

    #[test]
    fn distractors_are_false() {
        for inst in gen_csp_ordering(5, 10, 3).unwrap() {
            let options: Vec<&str> = inst.nl_text.lines().filter(|l| l.len() > 2 && &l[1..2] == ")").collect();
            assert_eq!(options.len(), 5);
            assert_eq!(options.iter().filter(|o| o.starts_with(&inst.gold_answer)).count(), 1);
        }
    }

    #[test]
    fn sizes_and_determinism() {
        assert_eq!(gen_csp_ordering(7, 3, 1).unwrap(), gen_csp_ordering(7, 3, 1).unwrap());
        assert_eq!(gen_csp_ordering(3, 3, 1).unwrap().len(), 3);
        assert!(gen_csp_ordering(4, 1, 1).is_err());
    }
}
