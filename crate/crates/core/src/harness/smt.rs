//! Trial eligibility problems: criteria blocks and patient records.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{collect, GenError, Instance, Problem};
use crate::formalizer::cnl::smt::{Criterion, Quantity, Reading, SmtText};
use crate::logiclang::csp::CmpOp;
use crate::logiclang::FormalProgram;
use crate::types::{AnswerOption, ReasoningType};

pub const FLAGS: [&str; 16] = [
    "acute pancreatitis",
    "informed consent",
    "chronic pancreatitis",
    "pregnancy",
    "malignant disease",
    "type 2 diabetes",
    "hypertension",
    "prior chemotherapy",
    "active infection",
    "renal failure",
    "heart failure",
    "current smoker",
    "asthma",
    "liver cirrhosis",
    "hiv infection",
    "prior stroke",
];

/// A measurement with its sort and plausible range.
#[derive(Debug, Clone, Copy)]
pub struct Measure {
    pub phrase: &'static str,
    pub real: bool,
    pub lo: i64,
    pub hi: i64,
}

pub const MEASURES: [Measure; 7] = [
    Measure { phrase: "age in years", real: false, lo: 16, hi: 90 },
    Measure { phrase: "body mass index", real: true, lo: 15, hi: 45 },
    Measure { phrase: "time of debut of symptoms", real: true, lo: 0, hi: 160 },
    Measure { phrase: "systolic blood pressure", real: false, lo: 80, hi: 200 },
    Measure { phrase: "hemoglobin level", real: true, lo: 6, hi: 18 },
    Measure { phrase: "ejection fraction", real: false, lo: 15, hi: 75 },
    Measure { phrase: "creatinine level", real: true, lo: 0, hi: 6 },
];

const OPS: [CmpOp; 4] = [CmpOp::Gt, CmpOp::Ge, CmpOp::Lt, CmpOp::Le];

fn quantity(m: &Measure, value: Ratio<i128>) -> Quantity {
    if m.real {
        Quantity::real(value)
    } else {
        Quantity::int(value.to_integer())
    }
}

fn threshold<R: Rng>(rng: &mut R, m: &Measure) -> Criterion {
    let span = m.hi - m.lo;
    let v = rng.gen_range(m.lo + span / 4..=m.hi - span / 4);
    Criterion::Threshold {
        phrase: m.phrase.to_string(),
        op: *OPS.choose(rng).expect("ops"),
        value: quantity(m, Ratio::from_integer(v as i128)),
    }
}

/// Picks a value in the measure's range giving each threshold its wanted truth.
fn measure_value<R: Rng>(rng: &mut R, m: &Measure, wanted: &[(&Criterion, bool)]) -> Option<Quantity> {
    let step = if m.real { 2 } else { 1 };
    let mut candidates: Vec<i64> = (m.lo * step..=m.hi * step).collect();
    candidates.shuffle(rng);
    candidates.into_iter().find_map(|c| {
        let q = quantity(m, Ratio::new(c as i128, step as i128));
        let record = [(m.phrase.to_string(), Reading::Measured(q.clone()))];
        wanted.iter().all(|(crit, truth)| crit.holds(&record) == Some(*truth)).then_some(q)
    })
}

/// Criteria over distinct conditions and measurements, and a record that
/// meets them all or violates exactly the criterion at `violate`.
pub fn eligibility_text<R: Rng>(rng: &mut R, violate: Option<usize>) -> Option<SmtText> {
    let flags = super::lexicon::pick(rng, &FLAGS, 6);
    let measures: Vec<Measure> = MEASURES.choose_multiple(rng, 2).copied().collect();
    let mut flag_pool = flags.iter();
    let mut next_flag = || flag_pool.next().map(|s| s.to_string());

    let mut inclusion = vec![threshold(rng, &measures[0]), Criterion::Flag(next_flag()?)];
    if rng.gen_bool(0.5) {
        inclusion.push(Criterion::Flag(next_flag()?));
    }
    let mut exclusion = vec![Criterion::Flag(next_flag()?)];
    if rng.gen_bool(0.5) {
        exclusion.push(threshold(rng, &measures[0]));
    } else {
        exclusion.push(threshold(rng, &measures[1]));
    }
    if rng.gen_bool(0.4) {
        exclusion.push(Criterion::Either(next_flag()?, next_flag()?));
    }
    inclusion.shuffle(rng);
    exclusion.shuffle(rng);

    let total = inclusion.len() + exclusion.len();
    let violate = violate.map(|v| v % total);
    let wanted: Vec<(Criterion, bool)> = inclusion
        .iter()
        .map(|c| (c.clone(), true))
        .chain(exclusion.iter().map(|c| (c.clone(), false)))
        .enumerate()
        .map(|(i, (c, t))| (c, if Some(i) == violate { !t } else { t }))
        .collect();

    let mut patient: Vec<(String, Reading)> = Vec::new();
    for m in &measures {
        let on_m: Vec<(&Criterion, bool)> =
            wanted.iter().filter(|(c, _)| c.phrases().contains(&m.phrase)).map(|(c, t)| (c, *t)).collect();
        if on_m.is_empty() {
            continue;
        }
        patient.push((m.phrase.to_string(), Reading::Measured(measure_value(rng, m, &on_m)?)));
    }
    for (c, truth) in &wanted {
        match c {
            Criterion::Flag(p) => patient.push((p.clone(), Reading::Present(*truth))),
            Criterion::Either(a, b) => {
                let (va, vb) = if *truth {
                    if rng.gen_bool(0.5) {
                        (true, false)
                    } else {
                        (false, true)
                    }
                } else {
                    (false, false)
                };
                patient.push((a.clone(), Reading::Present(va)));
                patient.push((b.clone(), Reading::Present(vb)));
            }
            Criterion::Threshold { .. } => {}
        }
    }
    patient.shuffle(rng);
    let text = SmtText { inclusion, exclusion, patient };
    let ok = wanted.iter().all(|(c, t)| c.holds(&text.patient) == Some(*t));
    ok.then_some(text)
}

/// Reference trial: an acute-pancreatitis study excluding symptoms older
/// than 72 hours, with a patient at `hours` hours.
pub fn reference_trial(hours: i64) -> SmtText {
    let flag = |s: &str| Criterion::Flag(s.to_string());
    let real = |v: i128| Quantity::real(Ratio::from_integer(v));
    let t = |phrase: &str, v| Criterion::Threshold { phrase: phrase.to_string(), op: CmpOp::Gt, value: v };
    SmtText {
        inclusion: vec![
            t("age in years", Quantity::int(18)),
            flag("acute pancreatitis"),
            flag("informed consent"),
            t("time of debut of symptoms", real(0)),
        ],
        exclusion: vec![
            flag("chronic pancreatitis"),
            flag("pregnancy"),
            flag("malignant disease"),
            t("time of debut of symptoms", real(72)),
        ],
        patient: vec![
            ("age in years".into(), Reading::Measured(Quantity::int(57))),
            ("acute pancreatitis".into(), Reading::Present(true)),
            ("informed consent".into(), Reading::Present(true)),
            ("time of debut of symptoms".into(), Reading::Measured(real(hours as i128))),
            ("chronic pancreatitis".into(), Reading::Present(false)),
            ("pregnancy".into(), Reading::Present(false)),
            ("malignant disease".into(), Reading::Present(false)),
        ],
    }
}

pub fn eligibility_problem(text: &SmtText) -> Option<Problem> {
    let eligible = text.eligible()?;
    Some(Problem {
        ty: ReasoningType::Smt,
        first: text.trial_text(),
        second: text.patient_text(),
        options: vec!["True".into(), "False".into()],
        program: FormalProgram::Smt(text.build().ok()?),
        gold: AnswerOption::label_for(usize::from(!eligible)),
    })
}

/// Eligibility problems; odd indices violate exactly one criterion.
pub fn gen_smt_eligibility(n: usize, seed: u64) -> Result<Vec<Instance>, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    collect("smt", seed, n, &mut rng, |rng, i| {
        let violate = (i % 2 == 1).then(|| rng.gen_range(0..8));
        eligibility_problem(&eligibility_text(rng, violate)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{solve, EngineLimits};
    use crate::types::SolverVerdict;

    #[test]
    fn seventy_two_hour_window() {
        let ok = eligibility_problem(&reference_trial(20)).unwrap();
        assert_eq!(ok.gold, "A)");
        assert_eq!(solve(&ok.program, &EngineLimits::default()), SolverVerdict::Sat);
        let late = eligibility_problem(&reference_trial(80)).unwrap();
        assert_eq!(late.gold, "B)");
        assert_eq!(solve(&late.program, &EngineLimits::default()), SolverVerdict::Unsat);
        assert!(late.self_check(&EngineLimits::default()).is_ok());
        assert!(super::super::render_nl(&late).contains("Does the patient match the trial?"));
    }

    #[test]
    fn exactly_one_violation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for v in 0..20 {
            let Some(t) = eligibility_text(&mut rng, Some(v)) else { continue };
            let broken = t.inclusion.iter().filter(|c| c.holds(&t.patient) == Some(false)).count()
                + t.exclusion.iter().filter(|c| c.holds(&t.patient) == Some(true)).count();
            assert_eq!(broken, 1);
        }
    }

    #[test]
    fn balanced_and_deterministic() {
        let set = gen_smt_eligibility(20, 2).unwrap();
        assert_eq!(set.iter().filter(|i| i.gold_answer == "A)").count(), 10);
        assert_eq!(set, gen_smt_eligibility(20, 2).unwrap());
    }
}
