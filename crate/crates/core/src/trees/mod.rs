//! Trees and ordered trees of maximum degree four.

mod enumerate;
mod named;

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use crate::error::{invalid, parse_err, Error, Result};

pub use enumerate::{enumerate_ordered_trees, enumerate_trees, rotation_classes, RootedLevelSequences};
pub use named::{make_t10, make_t13, make_tr, t13_asset, t20_labeled, LabeledTree};

pub const MAX_DEGREE: usize = 4;

/// An unordered tree on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    /// Edges are stored with the smaller endpoint first, in input order.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a tree needs at least one vertex"));
        }
        if edges.len() != n - 1 {
            return Err(invalid(format!("{} edges given, a tree on {n} vertices has {}", edges.len(), n - 1)));
        }
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(invalid(format!("edge {a}-{b} out of range for {n} vertices")));
            }
            if a == b {
                return Err(invalid(format!("self-loop at {a}")));
            }
            adj[a].push(b);
            adj[b].push(a);
            norm.push((a.min(b), a.max(b)));
        }
        for (v, nb) in adj.iter_mut().enumerate() {
            nb.sort_unstable();
            if nb.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("parallel edges at vertex {v}")));
            }
            if nb.len() > MAX_DEGREE {
                return Err(invalid(format!("vertex {v} has degree {} > {MAX_DEGREE}", nb.len())));
            }
        }
        let tree = Self { edges: norm, adj };
        if tree.bfs_order(0).len() != n {
            return Err(invalid("edges do not form a connected tree"));
        }
        Ok(tree)
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path is a tree")
    }

    pub fn star(leaves: usize) -> Result<Self> {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Index of edge `{a, b}` in [`Tree::edges`].
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&e| e == key)
    }

    /// Sorted degree sequence, largest first.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<_> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in &self.adj[v] {
                if !std::mem::replace(&mut seen[u], true) {
                    queue.push_back(u);
                }
            }
        }
        order
    }

    /// Vertex `v` of `self` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Tree {
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        Tree::new(self.len(), edges).expect("relabeling preserves tree structure")
    }

    /// The one or two centroids (vertices minimizing the largest branch).
    pub fn centroids(&self) -> Vec<usize> {
        let n = self.len();
        let order = self.bfs_order(0);
        let mut parent = vec![usize::MAX; n];
        for &v in &order {
            for &u in &self.adj[v] {
                if u != parent[v] {
                    parent[u] = v;
                }
            }
        }
        let mut size = vec![1usize; n];
        for &v in order.iter().rev() {
            if parent[v] != usize::MAX {
                size[parent[v]] += size[v];
            }
        }
        let heaviest = |v: usize| {
            let down = self.adj[v].iter().filter(|&&u| parent[u] == v).map(|&u| size[u]).max().unwrap_or(0);
            down.max(n - size[v])
        };
        let best = (0..n).map(heaviest).min().unwrap_or(0);
        (0..n).filter(|&v| heaviest(v) == best).collect()
    }

    /// A string equal for two trees iff they are isomorphic: the nested
    /// parenthesis code of the tree rooted at a centroid, minimized over
    /// the (at most two) centroids.
    pub fn canonical_code(&self) -> String {
        self.centroids().into_iter().map(|c| self.rooted_code(c, usize::MAX)).min().expect("every tree has a centroid")
    }

    fn rooted_code(&self, v: usize, parent: usize) -> String {
        let mut kids: Vec<String> =
            self.adj[v].iter().filter(|&&u| u != parent).map(|&u| self.rooted_code(u, v)).collect();
        kids.sort_unstable();
        let mut s = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
        s.push('(');
        for k in kids {
            s.push_str(&k);
        }
        s.push(')');
        s
    }

    /// Tree file text: `n`, then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.len());
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }

    /// Parses a tree file; rotation lines (`v: ...`) are ignored.
    pub fn parse(text: &str) -> Result<Tree> {
        Ok(parse_tree_file(text)?.0)
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree(n={}, edges={:?})", self.len(), self.edges)
    }
}

pub fn canonical_tree_code(t: &Tree) -> String {
    t.canonical_code()
}

/// A tree with a prescribed counterclockwise cyclic order of neighbors
/// at every vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderedTree {
    base: Tree,
    rotation: Vec<Vec<usize>>,
}

impl OrderedTree {
    pub fn new(base: Tree, rotation: Vec<Vec<usize>>) -> Result<Self> {
        if rotation.len() != base.len() {
            return Err(invalid("rotation system must list every vertex"));
        }
        for (v, rot) in rotation.iter().enumerate() {
            let mut sorted = rot.clone();
            sorted.sort_unstable();
            if sorted != base.neighbors(v) {
                return Err(invalid(format!("rotation at {v} is not a cyclic order of its neighbors")));
            }
        }
        Ok(Self { base, rotation })
    }

    /// Every vertex gets its neighbors in increasing label order.
    pub fn with_sorted_rotation(base: Tree) -> Self {
        let rotation = (0..base.len()).map(|v| base.neighbors(v).to_vec()).collect();
        Self { base, rotation }
    }

    pub fn base(&self) -> &Tree {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Counterclockwise neighbor order at `v`.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    /// The same tree with every cyclic order reversed.
    pub fn reflected(&self) -> OrderedTree {
        let rotation = self
            .rotation
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.len() > 1 {
                    r[1..].reverse();
                }
                r
            })
            .collect();
        OrderedTree { base: self.base.clone(), rotation }
    }

    /// Equal for two ordered trees iff one maps onto the other or onto its
    /// reflection preserving all cyclic orders.
    pub fn canonical_code(&self) -> Vec<u8> {
        let mirrored = self.reflected();
        let mut best: Option<Vec<u8>> = None;
        let mut buf = Vec::with_capacity(2 * self.len());
        for t in [self, &mirrored] {
            for v in 0..t.len() {
                let deg = t.rotation[v].len().max(1);
                for start in 0..deg {
                    buf.clear();
                    t.plane_code(v, usize::MAX, start, &mut buf);
                    if best.as_ref().is_none_or(|b| buf < *b) {
                        best = Some(buf.clone());
                    }
                }
            }
        }
        best.expect("non-empty tree")
    }

    fn plane_code(&self, v: usize, parent: usize, start: usize, out: &mut Vec<u8>) {
        out.push(1);
        let rot = &self.rotation[v];
        let d = rot.len();
        let first = if parent == usize::MAX {
            start
        } else {
            rot.iter().position(|&u| u == parent).expect("parent is a neighbor") + 1
        };
        for k in 0..d {
            let u = rot[(first + k) % d];
            if u != parent {
                self.plane_code(u, v, 0, out);
            }
        }
        out.push(0);
    }

    pub fn relabel(&self, perm: &[usize]) -> OrderedTree {
        let base = self.base.relabel(perm);
        let mut rotation = vec![Vec::new(); self.len()];
        for (v, rot) in self.rotation.iter().enumerate() {
            rotation[perm[v]] = rot.iter().map(|&u| perm[u]).collect();
        }
        OrderedTree { base, rotation }
    }

    pub fn to_text(&self) -> String {
        let mut s = self.base.to_text();
        for (v, rot) in self.rotation.iter().enumerate() {
            let _ = write!(s, "{v}:");
            for u in rot {
                let _ = write!(s, " {u}");
            }
            s.push('\n');
        }
        s
    }

    /// Parses a tree file with rotation lines for every vertex of degree
    /// three or more; lower-degree vertices default to label order.
    pub fn parse(text: &str) -> Result<OrderedTree> {
        let (base, rots) = parse_tree_file(text)?;
        let mut rotation: Vec<Vec<usize>> = (0..base.len()).map(|v| base.neighbors(v).to_vec()).collect();
        let mut given = vec![false; base.len()];
        for (v, rot) in rots {
            if v >= base.len() {
                return Err(parse_err(format!("rotation line for unknown vertex {v}")));
            }
            rotation[v] = rot;
            given[v] = true;
        }
        if let Some(v) = (0..base.len()).find(|&v| base.degree(v) >= 3 && !given[v]) {
            return Err(parse_err(format!("missing rotation for vertex {v}")));
        }
        OrderedTree::new(base, rotation)
    }
}

impl fmt::Debug for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderedTree(n={}, edges={:?}, rotation={:?})", self.len(), self.base.edges, self.rotation)
    }
}

/// Either flavour of tree, for APIs that accept both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyTree {
    Unordered(Tree),
    Ordered(OrderedTree),
}

impl AnyTree {
    pub fn base(&self) -> &Tree {
        match self {
            AnyTree::Unordered(t) => t,
            AnyTree::Ordered(t) => t.base(),
        }
    }

    pub fn ordered(&self) -> Option<&OrderedTree> {
        match self {
            AnyTree::Unordered(_) => None,
            AnyTree::Ordered(t) => Some(t),
        }
    }

    pub fn len(&self) -> usize {
        self.base().len()
    }

    pub fn is_empty(&self) -> bool {
        self.base().is_empty()
    }

    pub fn to_text(&self) -> String {
        match self {
            AnyTree::Unordered(t) => t.to_text(),
            AnyTree::Ordered(t) => t.to_text(),
        }
    }

    /// Ordered iff the text carries rotation lines.
    pub fn parse(text: &str) -> Result<AnyTree> {
        let (_, rots) = parse_tree_file(text)?;
        if rots.is_empty() {
            Tree::parse(text).map(AnyTree::Unordered)
        } else {
            OrderedTree::parse(text).map(AnyTree::Ordered)
        }
    }
}

impl From<Tree> for AnyTree {
    fn from(t: Tree) -> Self {
        AnyTree::Unordered(t)
    }
}

impl From<OrderedTree> for AnyTree {
    fn from(t: OrderedTree) -> Self {
        AnyTree::Ordered(t)
    }
}

type Rotations = Vec<(usize, Vec<usize>)>;

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty())
}

fn parse_tree_file(text: &str) -> Result<(Tree, Rotations)> {
    let mut lines = content_lines(text);
    let n: usize = lines
        .next()
        .ok_or_else(|| parse_err("empty tree file"))?
        .parse()
        .map_err(|_| parse_err("first line of a tree file must be the vertex count"))?;
    let mut edges = Vec::new();
    let mut rots = Vec::new();
    for line in lines {
        let num = |t: &str| t.parse::<usize>().map_err(|_| parse_err(format!("bad vertex `{t}` in `{line}`")));
        if let Some((v, rest)) = line.split_once(':') {
            let rot = rest.split_whitespace().map(num).collect::<Result<Vec<_>>>()?;
            rots.push((num(v.trim())?, rot));
        } else {
            let parts: Vec<_> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(parse_err(format!("edge line `{line}` needs two vertices")));
            }
            edges.push((num(parts[0])?, num(parts[1])?));
        }
    }
    let tree = Tree::new(n, edges).map_err(|e| match e {
        Error::InvalidInput(m) => parse_err(m),
        other => other,
    })?;
    Ok((tree, rots))
}
