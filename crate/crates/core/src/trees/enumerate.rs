use std::collections::{BTreeMap, HashSet};

use super::{OrderedTree, Tree, MAX_DEGREE};

/// Canonical level sequences of rooted trees on `n` vertices, generated by
/// the Beyer–Hedetniemi successor rule (root at level 0).
pub struct RootedLevelSequences {
    levels: Vec<usize>,
    done: bool,
}

impl RootedLevelSequences {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Self { levels: (0..n).collect(), done: false }
    }
}

impl Iterator for RootedLevelSequences {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.levels.clone();
        let l = &mut self.levels;
        match (1..l.len()).rev().find(|&i| l[i] > 1) {
            None => self.done = true,
            Some(p) => {
                let q = (0..p).rev().find(|&i| l[i] == l[p] - 1).expect("a parent level exists");
                for i in p..l.len() {
                    l[i] = l[i - (p - q)];
                }
            }
        }
        Some(out)
    }
}

fn tree_from_levels(levels: &[usize]) -> Tree {
    let mut edges = Vec::with_capacity(levels.len().saturating_sub(1));
    let mut last_at = vec![0usize; levels.len()];
    for (i, &lv) in levels.iter().enumerate() {
        if i > 0 {
            edges.push((last_at[lv - 1], i));
        }
        last_at[lv] = i;
    }
    Tree::new_unchecked_degree(levels.len(), edges)
}

impl Tree {
    fn new_unchecked_degree(n: usize, edges: Vec<(usize, usize)>) -> Tree {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Tree { edges, adj }
    }
}

/// One representative per isomorphism class of free trees on `n`
/// vertices with degree at most `max_degree`, in generation order.
pub fn enumerate_trees(n: usize, max_degree: usize) -> Vec<Tree> {
    assert!(n >= 1);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for levels in RootedLevelSequences::new(n) {
        let t = tree_from_levels(&levels);
        if t.max_degree() > max_degree.min(MAX_DEGREE) {
            continue;
        }
        if !t.centroids().contains(&0) {
            continue;
        }
        if seen.insert(t.canonical_code()) {
            out.push(t);
        }
    }
    out
}

/// All rotation systems of `t` up to ordered isomorphism and reflection,
/// keyed by canonical ordered code.
pub fn rotation_classes(t: &Tree) -> Vec<OrderedTree> {
    let n = t.len();
    let mut choices: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    for v in 0..n {
        let nb = t.neighbors(v);
        if nb.len() <= 2 {
            choices.push(vec![nb.to_vec()]);
            continue;
        }
        let mut rest = nb[1..].to_vec();
        let mut orders = Vec::new();
        loop {
            let mut r = vec![nb[0]];
            r.extend_from_slice(&rest);
            orders.push(r);
            if !crate::geometry::next_permutation(&mut rest) {
                break;
            }
        }
        choices.push(orders);
    }
    let mut classes = BTreeMap::new();
    let mut idx = vec![0usize; n];
    loop {
        let rotation = (0..n).map(|v| choices[v][idx[v]].clone()).collect();
        let ot = OrderedTree { base: t.clone(), rotation };
        classes.entry(ot.canonical_code()).or_insert(ot);
        // odometer over the per-vertex choices
        let mut v = 0;
        while v < n {
            idx[v] += 1;
            if idx[v] < choices[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
        if v == n {
            break;
        }
    }
    classes.into_values().collect()
}

/// One representative per class of ordered trees on `n` vertices, where a
/// tree and its global reflection count as the same. With
/// `nontrivial_only`, trees whose rotation system is unique are skipped.
pub fn enumerate_ordered_trees(n: usize, max_degree: usize, nontrivial_only: bool) -> Vec<OrderedTree> {
    let mut out = Vec::new();
    for t in enumerate_trees(n, max_degree) {
        let classes = rotation_classes(&t);
        if nontrivial_only && classes.len() <= 1 {
            continue;
        }
        out.extend(classes);
    }
    out
}
