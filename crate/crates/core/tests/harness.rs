use std::collections::BTreeMap;

use polyreason::harness::{
    batch_multi, dataset_of, gen_csp_ordering, gen_lp_chain, gen_smt_eligibility, mix, read_jsonl, to_jsonl, write_atomic,
    Dataset, DatasetIoError, Instance,
};
use polyreason::harness::render::batch_text;
use polyreason::logiclang::Language;

#[test]
fn standard_shapes() {
    let names: Vec<(String, usize)> = Dataset::STANDARD.iter().map(|(d, n)| (d.name(), *n)).collect();
    assert_eq!(
        names,
        [("lp-chain-5".to_string(), 500), ("lp-open".into(), 600), ("fol".into(), 204), ("csp-7".into(), 700), ("smt".into(), 300)]
    );
}

#[test]
fn instances_carry_their_program_and_provenance() {
    for (d, _) in Dataset::STANDARD {
        for (k, inst) in d.generate(4, 12).unwrap().iter().enumerate() {
            assert_eq!(dataset_of(inst), d.name());
            assert_eq!(inst.provenance.seed, 12);
            assert_eq!(inst.provenance.index, k);
            assert_eq!(inst.id, format!("{}-12-{k:04}", d.name()));
            let p = inst.program().unwrap();
            assert_eq!(p.language(), Language::for_type(inst.gold_type));
        }
    }
}

#[test]
fn jsonl_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/set.jsonl");
    let set = gen_lp_chain(3, 5, 2).unwrap();
    write_atomic(&path, &to_jsonl(&set)).unwrap();
    let back: Vec<Instance> = read_jsonl(&path).unwrap();
    assert_eq!(back, set);
}

#[test]
fn jsonl_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    let good = to_jsonl(&gen_smt_eligibility(1, 1).unwrap());
    std::fs::write(&path, format!("{good}\n{{\"id\": 3}}\n")).unwrap();
    match read_jsonl::<Instance>(&path) {
        Err(DatasetIoError::Json { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(read_jsonl::<Instance>(&dir.path().join("none.jsonl")), Err(DatasetIoError::Io(_))));
}

#[test]
fn mixing_keeps_every_instance() {
    let sets = vec![gen_lp_chain(2, 7, 1).unwrap(), gen_csp_ordering(3, 5, 1).unwrap()];
    let a = mix(&sets, 3);
    assert_eq!(a, mix(&sets, 3));
    assert_ne!(a, mix(&sets, 4));
    let mut ids: Vec<&str> = a.iter().map(|i| i.id.as_str()).collect();
    ids.sort();
    let mut want: Vec<&str> = sets.iter().flatten().map(|i| i.id.as_str()).collect();
    want.sort();
    assert_eq!(ids, want);
}

#[test]
fn batches_drop_the_remainder() {
    let set = gen_smt_eligibility(10, 5).unwrap();
    let batches = batch_multi(&set, 3, 1);
    assert_eq!(batches.len(), 3);
    let mut used: BTreeMap<&str, usize> = BTreeMap::new();
    for b in &batches {
        assert_eq!(b.slots.len(), 3);
        assert!(b.nl_text.starts_with("Answer the following questions one by one.\n\nQ1:"));
        assert!(b.nl_text.contains("\n\nQ3:"));
        for s in &b.slots {
            *used.entry(s.instance_id.as_str()).or_default() += 1;
        }
    }
    assert_eq!(used.len(), 9);
    assert!(used.values().all(|&n| n == 1));
}

#[test]
fn batch_text_layout() {
    assert_eq!(batch_text(&["x", "y"]), "Answer the following questions one by one.\n\nQ1:x\n\nQ2:y");
}

#[test]
fn rendered_layouts() {
    let lp = &gen_lp_chain(2, 1, 1).unwrap()[0];
    assert!(lp.nl_text.starts_with("STATEMENT:\n"));
    assert!(lp.nl_text.contains("\n\nQUESTION:\n"));
    assert!(lp.nl_text.ends_with("\n\nA) True\nB) False"));
    let csp = &gen_csp_ordering(3, 1, 1).unwrap()[0];
    assert!(csp.nl_text.contains("\n\nWhich of the following is true?\nA) "));
    let smt = &gen_smt_eligibility(1, 1).unwrap()[0];
    assert!(smt.nl_text.starts_with("You get a trial and a patient and have to say if there is a match:\n\nTRIAL: "));
    assert!(smt.nl_text.ends_with("\n\nDoes the patient match the trial?\nA) True\nB) False"));
}
