//! Constructors for the named instances.

use super::{OrderedTree, Tree};
use crate::error::{invalid, Error, Result};

const T13_ASSET: &str = include_str!("../../data/t13.tree");
const T10_ASSET: &str = include_str!("../../data/t10.otree");
const T20_ASSET: &str = include_str!("../../data/t20.tree");
const T20_LABELS: &str = include_str!("../../data/t20.labels");

/// Centre `Y` (vertex 0) of degree three joining `X1..X3` (1..3), each of
/// which carries three leaves.
pub fn make_t13() -> Tree {
    let mut edges = vec![(0, 1), (0, 2), (0, 3)];
    let mut next = 4;
    for x in 1..=3 {
        for _ in 0..3 {
            edges.push((x, next));
            next += 1;
        }
    }
    Tree::new(13, edges).expect("T13 is a tree")
}

/// The shipped transcription of the 13-vertex tree.
pub fn t13_asset() -> Tree {
    Tree::parse(T13_ASSET).expect("t13.tree asset parses")
}

/// The smallest non-embeddable ordered tree, from its shipped asset.
pub fn make_t10() -> OrderedTree {
    OrderedTree::parse(T10_ASSET).expect("t10.otree asset parses")
}

/// The ordered tree with central path `X0..X(r+1)` on `9r + 8` vertices.
///
/// Labels: `Xi = i`; for `1 <= i <= r`, `Xi' = r + 2i` and
/// `Xi'' = r + 2i + 1`; leaves follow. Counterclockwise around each inner
/// `Xi` the neighbours are `X(i+1), X(i-1), Xi', Xi''`, i.e. the path
/// continues east and arrives from the north, `Xi'` hangs off the west
/// side and `Xi''` off the south side. Every other degree-4 vertex has
/// three interchangeable leaves, so its rotation is forced.
///
/// Non-embeddability on the `(2,...,2)`-staircase is only claimed for
/// even `r >= 10`; smaller even `r` are accepted for experiments.
pub fn make_tr(r: usize) -> Result<OrderedTree> {
    if !r.is_multiple_of(2) {
        return Err(invalid(format!("r = {r} must be even")));
    }
    let n = 9 * r + 8;
    let mut edges = Vec::with_capacity(n - 1);
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut next = 3 * r + 2;
    let mut leaf = |v: usize, edges: &mut Vec<(usize, usize)>, rotation: &mut Vec<Vec<usize>>| {
        let l = next;
        next += 1;
        edges.push((v, l));
        rotation[v].push(l);
        rotation[l].push(v);
    };
    for i in 0..=r {
        edges.push((i, i + 1));
    }
    rotation[0].push(1);
    for _ in 0..3 {
        leaf(0, &mut edges, &mut rotation);
    }
    for i in 1..=r {
        let (xp, xpp) = (r + 2 * i, r + 2 * i + 1);
        edges.push((i, xp));
        edges.push((i, xpp));
        rotation[i] = vec![i + 1, i - 1, xp, xpp];
        for x in [xp, xpp] {
            rotation[x].push(i);
            for _ in 0..3 {
                leaf(x, &mut edges, &mut rotation);
            }
        }
    }
    rotation[r + 1].push(r);
    for _ in 0..3 {
        leaf(r + 1, &mut edges, &mut rotation);
    }
    debug_assert_eq!(edges.len(), n - 1);
    OrderedTree::new(Tree::new(n, edges)?, rotation)
}

/// A tree some of whose vertices carry integer labels.
#[derive(Clone, Debug)]
pub struct LabeledTree {
    pub tree: Tree,
    pub labels: Vec<Option<usize>>,
}

impl LabeledTree {
    /// The subtree induced by all unlabeled vertices and those labeled at
    /// most `n`, relabeled `0..` in the original vertex order.
    pub fn subtree_leq(&self, n: usize) -> Result<Tree> {
        let keep: Vec<bool> = self.labels.iter().map(|l| l.is_none_or(|k| k <= n)).collect();
        let mut new_id = vec![usize::MAX; keep.len()];
        let mut count = 0;
        for (v, &k) in keep.iter().enumerate() {
            if k {
                new_id[v] = count;
                count += 1;
            }
        }
        if count != n {
            return Err(corrupt(format!("labels <= {n} induce {count} vertices")));
        }
        let edges: Vec<_> = self
            .tree
            .edges()
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (new_id[a], new_id[b]))
            .collect();
        Tree::new(count, edges).map_err(|_| corrupt(format!("labels <= {n} induce a disconnected subgraph")))
    }
}

fn corrupt(reason: String) -> Error {
    Error::CorruptAsset { asset: "t20".into(), reason }
}

/// The 20-vertex tree whose labeled prefixes give the larger
/// non-embeddable examples.
pub fn t20_labeled() -> LabeledTree {
    let tree = Tree::parse(T20_ASSET).expect("t20.tree asset parses");
    let mut labels = vec![None; tree.len()];
    for line in T20_LABELS.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()) {
        let (v, k) = line.split_once(char::is_whitespace).expect("label lines are `vertex label`");
        let v: usize = v.trim().parse().expect("vertex id");
        labels[v] = Some(k.trim().parse().expect("label value"));
    }
    LabeledTree { tree, labels }
}
