use lshape_core::embed::{count_embeddings, embed, embed_ordered, validate, EmbedConfig};
use lshape_core::geometry::{enumerate_canonical_pointsets, SymmetryGroup};
use lshape_core::sat::{
    build_cnf, build_cnf_any, build_cnf_with, build_ordered_cnf_with, decode, enumerate_solutions, sat_embed,
    sat_embed_any, solve, Assignment, CnfFormula, Encoding, SolveResult, VarMap,
};
use lshape_core::trees::{enumerate_ordered_trees, enumerate_trees, make_t10, MAX_DEGREE};
use lshape_core::{AnyTree, PointSet, Tree};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Truth-table satisfiability, for formulas with few variables.
fn brute_sat(f: &CnfFormula) -> bool {
    let v = f.var_count();
    (0u64..1 << v).any(|bits| {
        let a = Assignment::new((0..v).map(|i| bits >> i & 1 == 1).collect());
        f.check(&a)
    })
}

fn random_cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> CnfFormula {
    let mut f = CnfFormula::new(vars);
    for _ in 0..clauses {
        let len = rng.gen_range(1..=3);
        let c: Vec<i32> = (0..len)
            .map(|_| {
                let v = rng.gen_range(1..=vars as i32);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        f.add_clause(&c);
    }
    f
}

fn random_pointset(n: usize, rng: &mut ChaCha8Rng) -> PointSet {
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    PointSet::from_slice(&perm).unwrap()
}

#[test]
fn solver_agrees_with_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..3000 {
        let vars = rng.gen_range(1..=10);
        let clauses = rng.gen_range(1..=4 * vars + 4);
        let f = random_cnf(&mut rng, vars, clauses);
        let expect = brute_sat(&f);
        match solve(&f) {
            SolveResult::Sat(a) => {
                assert!(expect && f.check(&a));
                sat += 1;
            }
            SolveResult::Unsat => {
                assert!(!expect);
                unsat += 1;
            }
            SolveResult::Unknown => panic!("no budget was set"),
        }
    }
    assert!(sat > 100 && unsat > 100);
}

#[test]
fn single_edge_has_four_models() {
    let p: PointSet = "1,2".parse().unwrap();
    let (f, m) = build_cnf(&Tree::path(2), &p).unwrap();
    assert_eq!(m.var_count(), 5);
    let sols: Vec<_> = enumerate_solutions(&f, &m).map(Result::unwrap).collect();
    assert_eq!(sols.len(), 4);
}

#[test]
fn path3_decodes_to_valid_embedding() {
    let t = Tree::path(3);
    let p: PointSet = "2,3,1".parse().unwrap();
    let e = sat_embed(&t, &p).unwrap().unwrap();
    assert!(validate(&AnyTree::Unordered(t), &p, &e).unwrap().is_valid());
}

#[test]
fn engines_agree_on_all_small_instances() {
    for n in 1..=6 {
        let trees = enumerate_trees(n, MAX_DEGREE);
        for p in enumerate_canonical_pointsets(n, SymmetryGroup::Full8) {
            for t in &trees {
                let bt = embed(t, &p, &EmbedConfig::default()).unwrap().is_some();
                for enc in [Encoding::Pairwise, Encoding::Rays] {
                    assert_eq!(
                        sat_embed_any(&AnyTree::Unordered(t.clone()), &p, enc).unwrap().is_some(),
                        bt,
                        "{enc:?} {p}"
                    );
                }
            }
        }
    }
}

#[test]
fn projected_model_counts_match_search() {
    for n in 1..=5 {
        for ordered in [false, true] {
            let trees: Vec<AnyTree> = if ordered {
                enumerate_ordered_trees(n, MAX_DEGREE, false).into_iter().map(AnyTree::Ordered).collect()
            } else {
                enumerate_trees(n, MAX_DEGREE).into_iter().map(AnyTree::Unordered).collect()
            };
            for p in enumerate_canonical_pointsets(n, SymmetryGroup::Rotations4) {
                for t in &trees {
                    let expect = count_embeddings(t, &p).unwrap();
                    for enc in [Encoding::Pairwise, Encoding::Rays] {
                        let (f, m) = build_cnf_any(t, &p, enc).unwrap();
                        let mut seen = 0;
                        for e in enumerate_solutions(&f, &m) {
                            assert!(validate(t, &p, &e.unwrap()).unwrap().is_valid());
                            seen += 1;
                        }
                        assert_eq!(seen, expect, "{enc:?} {p}");
                    }
                }
            }
        }
    }
}

#[test]
fn ordered_verdicts_sampled_at_seven() {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let trees = enumerate_ordered_trees(7, MAX_DEGREE, false);
    let strict = EmbedConfig { strict_rotation: true, ..Default::default() };
    for _ in 0..150 {
        let t = trees.choose(&mut rng).unwrap();
        let p = random_pointset(7, &mut rng);
        let (f, _) = build_ordered_cnf_with(t, &p, Encoding::Rays, true).unwrap();
        assert_eq!(solve(&f).is_sat(), embed_ordered(t, &p, &strict).unwrap().is_some());
        let (f, _) = build_ordered_cnf_with(t, &p, Encoding::Pairwise, false).unwrap();
        assert_eq!(solve(&f).is_sat(), embed_ordered(t, &p, &EmbedConfig::default()).unwrap().is_some());
    }
}

#[test]
fn t10_counterexample_is_unsat() {
    let p: PointSet = "2,1,3,6,7,4,5,8,10,9".parse().unwrap();
    for enc in [Encoding::Pairwise, Encoding::Rays] {
        assert!(sat_embed_any(&AnyTree::Ordered(make_t10()), &p, enc).unwrap().is_none());
    }
}

#[test]
fn model_text_decodes() {
    let t = Tree::path(3);
    let p: PointSet = "1,2,3".parse().unwrap();
    let (f, m) = build_cnf(&t, &p).unwrap();
    let SolveResult::Sat(a) = solve(&f) else { panic!("path is embeddable") };
    let text: String = std::iter::once("s SATISFIABLE\nv".to_string())
        .chain((1..=f.var_count()).map(|v| format!(" {}", if a.value(v) { v as i64 } else { -(v as i64) })))
        .chain(std::iter::once(" 0\n".to_string()))
        .collect();
    let back = Assignment::parse_model(&text, f.var_count()).unwrap();
    assert!(f.check(&back));
    let e = decode(&back, &m).unwrap();
    assert!(validate(&AnyTree::Unordered(t), &p, &e).unwrap().is_valid());
    assert!(decode(&Assignment::new(vec![false; m.var_count()]), &m).is_err());
}

#[test]
fn varmap_text_roundtrip() {
    let t = lshape_core::trees::make_t13();
    let m = VarMap::new(&t);
    assert_eq!(m.x(0, 0), 1);
    assert_eq!(m.x(12, 12), 169);
    assert_eq!(m.y(0), 170);
    assert_eq!(m.var_count(), 181);
    assert_eq!(VarMap::parse(&m.to_text()).unwrap(), m);
}

#[test]
fn dimacs_is_deterministic() {
    let t = lshape_core::trees::make_t13();
    let p = "(2,2,2,1,2,2,2)".parse::<lshape_core::StaircaseSpec>().unwrap().points();
    for enc in [Encoding::Pairwise, Encoding::Rays] {
        let a = build_cnf_with(&t, &p, enc).unwrap().0.to_dimacs();
        let b = build_cnf_with(&t, &p, enc).unwrap().0.to_dimacs();
        assert_eq!(a, b);
        assert!(a.starts_with("p cnf ") || a.starts_with("c "));
    }
}

proptest! {
    #[test]
    fn dimacs_roundtrip(clauses in prop::collection::vec(prop::collection::vec((1i32..=30, any::<bool>()), 1..6), 0..40)) {
        let mut f = CnfFormula::new(30);
        for c in &clauses {
            let lits: Vec<i32> = c.iter().map(|&(v, s)| if s { v } else { -v }).collect();
            f.add_clause(&lits);
        }
        let text = f.to_dimacs();
        let g = CnfFormula::parse_dimacs(&text).unwrap();
        prop_assert_eq!(g.var_count(), f.var_count());
        prop_assert_eq!(g.num_clauses(), f.num_clauses());
        prop_assert_eq!(g.to_dimacs(), text);
    }
}
