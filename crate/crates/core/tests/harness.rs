use lshape_core::harness::{
    exhaustive_verify, export_stem, oracle_crosscheck, sample_pointsets, verify_counterexamples, Coverage,
    CrosscheckOptions, Mode, SweepOptions, VerifyOptions, SCHEMA_VERSION,
};
use lshape_core::registry::instances;
use lshape_core::sat::{CnfFormula, VarMap};
use lshape_core::{Expected, SymmetryGroup, Tier};

fn opts(jobs: usize) -> SweepOptions {
    SweepOptions { jobs, ..Default::default() }
}

#[test]
fn small_sweeps_have_no_failures() {
    let pointsets = [1, 1, 2, 7, 23, 115, 694];
    for n in 1..=7 {
        let r = exhaustive_verify(n, Mode::Unordered, &opts(1)).unwrap();
        assert!(r.failures.is_empty(), "n={n}: {:?}", r.failures);
        assert_eq!(r.pointsets, pointsets[n - 1]);
        assert_eq!(r.coverage, Coverage::Exhaustive);
        assert_eq!(r.pairs, r.pointsets * r.trees);
    }
    for n in 1..=6 {
        let r = exhaustive_verify(n, Mode::Ordered, &opts(1)).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.unexpected_failures, 0);
    }
}

#[test]
fn outcome_is_independent_of_worker_count() {
    let base = exhaustive_verify(7, Mode::Ordered, &opts(1)).unwrap().outcome();
    for jobs in [4, 16] {
        assert_eq!(exhaustive_verify(7, Mode::Ordered, &opts(jobs)).unwrap().outcome(), base);
    }
    let sampled = SweepOptions { jobs: 4, sample: Some((300, 9)), box_lemma: false };
    let a = exhaustive_verify(9, Mode::Unordered, &sampled).unwrap();
    let b = exhaustive_verify(9, Mode::Unordered, &SweepOptions { jobs: 1, ..sampled }).unwrap();
    assert_eq!(a.outcome(), b.outcome());
    assert_eq!(a.coverage, Coverage::Sampled);
}

#[test]
fn report_json_has_required_fields() {
    let r = exhaustive_verify(5, Mode::Unordered, &SweepOptions { jobs: 2, box_lemma: true, ..Default::default() })
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
    for key in ["n", "mode", "coverage", "pointsets", "trees", "failures", "seconds", "jobs", "build"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["build"]["git_describe"].is_string());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    r.write_json(&path).unwrap();
    assert_eq!(std::fs::read_to_string(path).unwrap().trim_end(), r.to_json().trim_end());
}

#[test]
fn sampled_pointsets_are_canonical_and_seeded() {
    let a = sample_pointsets(12, SymmetryGroup::Full8, 50, 3);
    assert_eq!(a, sample_pointsets(12, SymmetryGroup::Full8, 50, 3));
    assert_ne!(a, sample_pointsets(12, SymmetryGroup::Full8, 50, 4));
    assert!(a.iter().all(|p| p.is_canonical(SymmetryGroup::Full8)));
}

#[test]
fn counterexample_verification_skips_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let records: Vec<_> = instances()
        .iter()
        .filter(|r| r.name == "T10/S10" || r.tier == Tier::LongRunning && r.n() <= 17)
        .cloned()
        .collect();
    assert_eq!(records.len(), 2);
    let out = verify_counterexamples(
        &records,
        &VerifyOptions { max_tier: Some(Tier::Fast), export_dir: Some(dir.path().into()), ..Default::default() },
    )
    .unwrap();
    for v in &out {
        let stem = dir.path().join(export_stem(&v.name));
        let cnf = std::fs::read_to_string(stem.with_extension("cnf")).unwrap();
        let map = std::fs::read_to_string(stem.with_extension("map")).unwrap();
        let f = CnfFormula::parse_dimacs(&cnf).unwrap();
        assert_eq!(f.num_clauses(), v.clauses);
        assert!(VarMap::parse(&map).unwrap().var_count() <= f.var_count());
        if v.tier == Tier::LongRunning {
            assert!(v.skipped && v.search.is_none() && v.sat.is_none());
        } else {
            assert_eq!(v.expected, Expected::NonEmbeddable);
            assert_eq!((v.search, v.sat), (Some(false), Some(false)));
            assert!(v.as_expected());
        }
    }
}

#[test]
fn crosscheck_exhaustive_and_sampled() {
    let r = oracle_crosscheck(5, &CrosscheckOptions { counts: true, ..Default::default() }).unwrap();
    assert!(r.passed(), "{:?}", r.mismatches);
    assert_eq!(r.counts_checked, 2 * r.pairs);
    let r =
        oracle_crosscheck(5, &CrosscheckOptions { mode: Mode::Ordered, counts: true, ..Default::default() }).unwrap();
    assert!(r.passed(), "{:?}", r.mismatches);
    let r = oracle_crosscheck(8, &CrosscheckOptions { samples: Some(60), seed: 5, ..Default::default() }).unwrap();
    assert!(r.passed());
    assert_eq!(r.pairs, 60);
}
