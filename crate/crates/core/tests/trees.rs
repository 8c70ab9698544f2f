use std::collections::HashSet;

use lshape_core::registry::named_tree;
use lshape_core::trees::{
    canonical_tree_code, enumerate_ordered_trees, enumerate_trees, make_t10, make_t13, make_tr, t13_asset, t20_labeled,
};
use lshape_core::{AnyTree, OrderedTree, Tree};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Isomorphism classes of labeled trees, found by brute force: every
// Prüfer sequence gives a labeled tree, classes are told apart by trying
// all relabelings.
// `None` if some degree exceeds four.
fn prufer_edges(seq: &[usize]) -> Option<(usize, Vec<(usize, usize)>)> {
    let n = seq.len() + 2;
    let mut deg = vec![1; n];
    for &s in seq {
        deg[s] += 1;
    }
    let mut edges = Vec::new();
    for &s in seq {
        let leaf = (0..n).find(|&v| deg[v] == 1).unwrap();
        edges.push((leaf, s));
        deg[leaf] -= 1;
        deg[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    let mut degree = vec![0; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    (degree.iter().all(|&d| d <= 4)).then_some((n, edges))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn edge_set(t: &Tree, perm: &[usize]) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = t.edges().iter().map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b]))).collect();
    e.sort();
    e
}

fn brute_force_classes(n: usize, max_degree: usize) -> usize {
    let perms = permutations(n);
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut classes = 0;
    let mut seqs = vec![vec![]];
    for _ in 0..n - 2 {
        seqs = seqs.into_iter().flat_map(|s: Vec<usize>| (0..n).map(move |v| [s.clone(), vec![v]].concat())).collect();
    }
    for s in seqs {
        let Some((_, edges)) = prufer_edges(&s) else { continue };
        let t = Tree::new(n, edges).unwrap();
        if t.max_degree() > max_degree || seen.contains(&edge_set(&t, &(0..n).collect::<Vec<_>>())) {
            continue;
        }
        classes += 1;
        for p in &perms {
            seen.insert(edge_set(&t, p));
        }
    }
    classes
}

fn random_relabel(t: &Tree, rng: &mut ChaCha8Rng) -> Tree {
    let mut perm: Vec<usize> = (0..t.len()).collect();
    perm.shuffle(rng);
    t.relabel(&perm)
}

#[test]
fn free_tree_counts_match_brute_force() {
    for n in 3..=7 {
        assert_eq!(enumerate_trees(n, 4).len(), brute_force_classes(n, 4), "n={n}");
    }
    assert_eq!(enumerate_trees(6, 3).len(), brute_force_classes(6, 3));
}

#[test]
fn tree_counts_small() {
    let counts: Vec<usize> = (4..=12).map(|n| enumerate_trees(n, 4).len()).collect();
    assert_eq!(counts, [2, 3, 5, 9, 18, 35, 75, 159, 355]);
    let ordered: Vec<usize> = (4..=10).map(|n| enumerate_ordered_trees(n, 4, false).len()).collect();
    assert_eq!(ordered, [2, 3, 5, 10, 21, 48, 120]);
}

#[test]
fn enumerated_codes_are_distinct_and_valid() {
    for n in 1..=10 {
        let ts = enumerate_trees(n, 4);
        let codes: HashSet<String> = ts.iter().map(canonical_tree_code).collect();
        assert_eq!(codes.len(), ts.len());
        assert!(ts.iter().all(|t| t.len() == n && t.max_degree() <= 4));
    }
    for n in 1..=9 {
        let ts = enumerate_ordered_trees(n, 4, false);
        let codes: HashSet<Vec<u8>> = ts.iter().map(OrderedTree::canonical_code).collect();
        assert_eq!(codes.len(), ts.len());
    }
}

#[test]
fn codes_are_relabeling_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for t in enumerate_trees(10, 4) {
        let code = t.canonical_code();
        for _ in 0..5 {
            assert_eq!(random_relabel(&t, &mut rng).canonical_code(), code);
        }
    }
    let p5 = Tree::path(5);
    assert_eq!(p5.canonical_code(), p5.relabel(&[4, 2, 0, 1, 3]).canonical_code());
    assert_ne!(Tree::path(4).canonical_code(), Tree::star(3).unwrap().canonical_code());
}

#[test]
fn ordered_codes_ignore_global_reflection_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in enumerate_ordered_trees(8, 4, false) {
        let code = t.canonical_code();
        assert_eq!(t.reflected().canonical_code(), code);
        let mut perm: Vec<usize> = (0..t.len()).collect();
        perm.shuffle(&mut rng);
        assert_eq!(t.relabel(&perm).canonical_code(), code);
    }
}

#[test]
fn labeled_trees_partition_into_known_class_count() {
    // random labeled trees at n = 10 only ever hit the 75 classes
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let known: HashSet<String> = enumerate_trees(10, 4).iter().map(Tree::canonical_code).collect();
    assert_eq!(known.len(), 75);
    for _ in 0..2000 {
        let seq: Vec<usize> = (0..8).map(|_| rng.gen_range(0..10)).collect();
        if let Some((n, edges)) = prufer_edges(&seq) {
            assert!(known.contains(&Tree::new(n, edges).unwrap().canonical_code()));
        }
    }
}

#[test]
fn t13_shape_and_asset() {
    let t = make_t13();
    let mut deg = t.degree_sequence();
    deg.sort();
    assert_eq!(deg, [vec![1; 9], vec![3], vec![4; 3]].concat());
    assert_eq!(t.canonical_code(), t13_asset().canonical_code());
}

#[test]
fn t20_prefixes() {
    let t20 = t20_labeled();
    assert_eq!(t20.tree.len(), 20);
    let t13 = t20.subtree_leq(13).unwrap();
    assert_eq!(t13.canonical_code(), make_t13().canonical_code());
    let mut prev = t13;
    for n in [14, 16, 17, 18, 19, 20] {
        let t = t20.subtree_leq(n).unwrap();
        assert_eq!(t.len(), n);
        assert!(t.max_degree() <= 4);
        assert!(t.len() > prev.len());
        prev = t;
    }
    // the n = 17 tree is the centre with four arms of three leaves
    let t17 = t20.subtree_leq(17).unwrap();
    let four_arms =
        Tree::new(17, (1..=4).map(|x| (0, x)).chain((0..12).map(|k| (1 + k / 3, 5 + k))).collect()).unwrap();
    assert_eq!(t17.canonical_code(), four_arms.canonical_code());
    // then one leaf grows three children
    let mut edges = four_arms.edges().to_vec();
    edges.extend([(5, 17), (5, 18), (5, 19)]);
    assert_eq!(t20.tree.canonical_code(), Tree::new(20, edges).unwrap().canonical_code());
    assert!(t20.subtree_leq(12).is_err());
}

#[test]
fn tr_family() {
    for r in [0, 2, 4, 10] {
        let t = make_tr(r).unwrap();
        assert_eq!(t.len(), 9 * r + 8);
        assert!(t.base().max_degree() <= 4);
    }
    let t10 = make_tr(10).unwrap();
    let deg = t10.base().degree_sequence();
    assert_eq!(deg.iter().filter(|&&d| d == 4).count(), 32);
    assert_eq!(deg.iter().filter(|&&d| d == 1).count(), 66);
    assert!(make_tr(3).is_err());
    assert!(matches!(named_tree("Tr:r=10").unwrap(), AnyTree::Ordered(t) if t.len() == 98));
}

#[test]
fn t10_is_a_nontrivial_ordered_tree() {
    let t10 = make_t10();
    let codes: HashSet<Vec<u8>> =
        enumerate_ordered_trees(10, 4, true).iter().map(OrderedTree::canonical_code).collect();
    assert_eq!(codes.len(), 80);
    assert!(codes.contains(&t10.canonical_code()));
}

#[test]
fn tree_file_roundtrip() {
    let t = make_t10();
    assert_eq!(OrderedTree::parse(&t.to_text()).unwrap(), t);
    let u = make_t13();
    assert_eq!(Tree::parse(&u.to_text()).unwrap(), u);
    assert!(Tree::parse("3\n0 1\n").is_err());
    assert!(Tree::parse("3\n0 1\n1 2\n2 0\n").is_err());
}
