//! Exact backtracking search for L-shaped embeddings.
//!
//! Vertices are placed in BFS order from a maximum-degree vertex, so every
//! vertex commits all its edge directions early; each new vertex hangs off
//! its already-placed parent. Candidate points are tried left to right,
//! the horizontal-at-parent bend first, except that a hinted embedding
//! (typically one found on a neighbouring point set) is tried before
//! everything else.
//!
//! Validity is tracked on the `n × n` unit grid: every edge claims the
//! grid nodes strictly inside its L (bend included). Since all segments
//! lie on grid lines with grid endpoints, two edges touch away from a
//! shared vertex iff they claim a common node, and two edges leaving a
//! vertex in the same direction both claim the neighbouring node.

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::geometry::{PointSet, StaircaseSpec};
use crate::trees::{OrderedTree, Tree};

const NONE: usize = usize::MAX;
const RECENT: usize = 8;

/// Search options.
#[derive(Clone, Debug, Default)]
pub struct EmbedConfig {
    /// Staircase structure of the point set, required for box pruning.
    pub boxes: Option<StaircaseSpec>,
    /// Never put two degree-4 vertices into one size-2 staircase box.
    pub box_pruning: bool,
    /// Ordered trees must realize their rotation system exactly, not its
    /// reflection.
    pub strict_rotation: bool,
    /// Abort after this many search nodes.
    pub node_limit: Option<u64>,
}

impl EmbedConfig {
    /// Box pruning enabled whenever `p` is a staircase.
    pub fn for_pointset(p: &PointSet) -> Self {
        let boxes = p.staircase_boxes();
        EmbedConfig { box_pruning: boxes.is_some(), boxes, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Embedding),
    NotEmbeddable,
    Aborted,
}

/// Reusable search state for one (tree, point set) pair.
pub struct Searcher<'a> {
    tree: &'a Tree,
    n: usize,
    xs: Vec<i32>,
    ys: Vec<i32>,
    // point index at grid node, or NONE
    point_at: Vec<usize>,
    order: Vec<usize>,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    deg: Vec<u8>,
    // rotation position of each neighbour, or empty for unordered search
    // position of v in its parent's rotation, and of the parent in v's
    rank_child: Vec<u8>,
    rank_parent: Vec<u8>,
    ordered: bool,
    strict: bool,
    box_of: Vec<usize>,
    box_size: Vec<usize>,
    box_pruning: bool,
    node_limit: u64,

    placed: Vec<usize>,
    occupant: Vec<usize>,
    used: Vec<bool>,
    grid: Vec<bool>,
    dir_nbr: Vec<[usize; 4]>,
    dir_rank: Vec<[u8; 4]>,
    // grid node next to each point in each direction, or NONE
    beside: Vec<[usize; 4]>,
    pending: Vec<u8>,
    box_hubs: Vec<u8>,
    // 0 undetermined, 1 rotation as given, 2 reflected
    orientation: u8,
    h_at_parent: Vec<bool>,
    // preferred (point, horizontal-at-parent) per vertex, tried first
    hint_q: Vec<usize>,
    hint_h: Vec<bool>,
    warm_start: bool,
    // recent embeddings as (hint_q, hint_h), most recent first
    recent: Vec<(Vec<usize>, Vec<bool>)>,
    want_snapshot: bool,
    nodes: u64,
    count: u64,
    found: Option<Embedding>,
    path_buf: Vec<Vec<usize>>,
}

impl<'a> Searcher<'a> {
    pub fn new(tree: &'a Tree, p: &PointSet, cfg: &EmbedConfig) -> Result<Self> {
        Self::build(tree, None, p, cfg)
    }

    pub fn new_ordered(tree: &'a OrderedTree, p: &PointSet, cfg: &EmbedConfig) -> Result<Self> {
        Self::build(tree.base(), Some(tree), p, cfg)
    }

    fn build(tree: &'a Tree, ordered: Option<&OrderedTree>, p: &PointSet, cfg: &EmbedConfig) -> Result<Self> {
        let n = tree.len();
        if n != p.len() {
            return Err(Error::SizeMismatch { tree: n, points: p.len() });
        }
        let (xs, ys, point_at) = point_tables(p);
        let beside = beside_table(&xs, &ys);

        let root = (0..n).max_by_key(|&v| (tree.degree(v), std::cmp::Reverse(v))).unwrap_or(0);
        let mut order = Vec::with_capacity(n);
        let mut parent = vec![NONE; n];
        let mut parent_edge = vec![NONE; n];
        for v in tree.bfs_order(root) {
            order.push(v);
            for &u in tree.neighbors(v) {
                if u != parent[v] {
                    parent[u] = v;
                    parent_edge[u] = tree.edge_index(u, v).expect("tree edge");
                }
            }
        }

        let mut rank_child = vec![0u8; n];
        let mut rank_parent = vec![0u8; n];
        if let Some(ot) = ordered {
            let rank =
                |v: usize, u: usize| ot.rotation(v).iter().position(|&w| w == u).expect("neighbour in rotation") as u8;
            for &v in &order[1..] {
                rank_child[v] = rank(parent[v], v);
                rank_parent[v] = rank(v, parent[v]);
            }
        }

        let (box_of, box_size) = match (&cfg.boxes, cfg.box_pruning) {
            (Some(spec), true) => {
                if spec.len() != n || spec.points() != *p {
                    return Err(crate::error::invalid("box structure does not describe the point set"));
                }
                (spec.box_of_point(), spec.boxes().to_vec())
            }
            _ => (Vec::new(), Vec::new()),
        };
        let n_boxes = box_size.len();

        Ok(Searcher {
            tree,
            n,
            xs,
            ys,
            point_at,
            order,
            parent,
            parent_edge,
            deg: (0..n).map(|v| tree.degree(v) as u8).collect(),
            rank_child,
            rank_parent,
            ordered: ordered.is_some(),
            strict: cfg.strict_rotation,
            box_pruning: cfg.box_pruning && n_boxes > 0,
            box_of,
            box_size,
            node_limit: cfg.node_limit.unwrap_or(u64::MAX),
            placed: vec![NONE; n],
            occupant: vec![NONE; n],
            used: vec![false; n],
            grid: vec![false; n * n],
            dir_nbr: vec![[NONE; 4]; n],
            dir_rank: vec![[0; 4]; n],
            beside,
            pending: (0..n).map(|v| tree.degree(v) as u8).collect(),
            box_hubs: vec![0; n_boxes],
            orientation: if cfg.strict_rotation { 1 } else { 0 },
            h_at_parent: vec![false; n],
            hint_q: vec![NONE; n],
            hint_h: vec![true; n],
            warm_start: false,
            recent: Vec::new(),
            want_snapshot: true,
            nodes: 0,
            count: 0,
            found: None,
            path_buf: vec![Vec::with_capacity(2 * n); n],
        })
    }

    /// Switches to another point set of the same size, keeping the tree.
    /// Box pruning is dropped since the box structure belongs to the old
    /// point set.
    pub fn set_pointset(&mut self, p: &PointSet) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::SizeMismatch { tree: self.n, points: p.len() });
        }
        let n = self.n;
        self.point_at.fill(NONE);
        for j in 0..n {
            let (x, y) = p.coords(j);
            self.xs[j] = x;
            self.ys[j] = y;
            self.point_at[y as usize * n + x as usize] = j;
        }
        fill_beside(&self.xs, &self.ys, &mut self.beside);
        self.box_pruning = false;
        Ok(())
    }

    /// With warm start on, every successful search leaves its embedding
    /// behind as the hint for the next one.
    pub fn set_warm_start(&mut self, on: bool) {
        self.warm_start = on;
    }

    /// Makes the search try `e` first: each vertex starts at its point in
    /// `e`, with the bend of its parent edge as in `e`. Verdicts do not
    /// depend on the hint, only the search effort does.
    pub fn set_hint(&mut self, e: Option<&Embedding>) {
        self.hint_q.fill(NONE);
        let Some(e) = e else { return };
        if e.placement.len() != self.n || e.horizontal.len() + 1 != self.n {
            return;
        }
        for &v in &self.order[1..] {
            let a = self.parent[v];
            let (small, _) = self.tree.edges()[self.parent_edge[v]];
            self.hint_q[v] = e.placement[v];
            self.hint_h[v] = e.horizontal[self.parent_edge[v]] == (small == a);
        }
        self.hint_q[self.order[0]] = e.placement[self.order[0]];
    }

    /// Search nodes visited by the last run.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn find(&mut self) -> SearchOutcome {
        self.reset();
        self.want_snapshot = true;
        match self.run(false) {
            Ok(()) => match self.found.take() {
                Some(e) => SearchOutcome::Found(e),
                None => SearchOutcome::NotEmbeddable,
            },
            Err(Abort) => SearchOutcome::Aborted,
        }
    }

    /// Like [`Searcher::find`] without materializing the embedding:
    /// `Some(true)` if one exists, `None` if the node limit hit.
    pub fn decide(&mut self) -> Option<bool> {
        if self.warm_start {
            for i in 0..self.recent.len() {
                let (q, h) = std::mem::take(&mut self.recent[i]);
                self.hint_q.copy_from_slice(&q);
                self.hint_h.copy_from_slice(&h);
                self.recent[i] = (q, h);
                if self.replay_hint() {
                    self.recent[..=i].rotate_right(1);
                    return Some(true);
                }
            }
            if let Some((q, h)) = self.recent.first() {
                self.hint_q.copy_from_slice(q);
                self.hint_h.copy_from_slice(h);
            }
        }
        self.reset();
        self.want_snapshot = false;
        match self.run(false) {
            Ok(()) => Some(self.count > 0),
            Err(Abort) => None,
        }
    }

    /// Exhaustive count of valid embeddings; `None` if the node limit hit.
    pub fn count(&mut self) -> Option<u64> {
        self.reset();
        self.run(true).ok().map(|()| self.count)
    }

    /// Checks a complete candidate embedding (for example one that worked on
    /// a similar point set) against the grid rules without searching.
    pub fn replay(&mut self, e: &Embedding) -> bool {
        if e.placement.len() != self.n || e.horizontal.len() + 1 != self.n.max(1) {
            return false;
        }
        self.set_hint(Some(e));
        self.replay_hint()
    }

    /// Replays the hint; true iff it is a complete valid embedding.
    fn replay_hint(&mut self) -> bool {
        self.reset();
        let mut claimed = std::mem::take(&mut self.path_buf[0]);
        claimed.clear();
        let mut ok = true;
        let mut depth = 0;
        for k in 0..self.n {
            let v = self.order[k];
            let q = self.hint_q[v];
            if q >= self.n || self.used[q] {
                ok = false;
                break;
            }
            self.place(v, q);
            depth = k + 1;
            if k == 0 {
                continue;
            }
            let a = self.parent[v];
            let (ax, ay) = (self.xs[self.placed[a]], self.ys[self.placed[a]]);
            let (bx, by) = (self.xs[q], self.ys[q]);
            let (cx, cy) = if self.hint_h[v] { (bx, ay) } else { (ax, by) };
            let da = dir_index(cx - ax, cy - ay);
            let dv = dir_index(cx - bx, cy - by);
            if self.dir_nbr[a][da] != NONE || !self.claim_path((ax, ay), (cx, cy), (bx, by), &mut claimed) {
                ok = false;
                break;
            }
            self.dir_nbr[a][da] = v;
            self.dir_nbr[v][dv] = a;
            self.dir_rank[a][da] = self.rank_child[v];
            self.dir_rank[v][dv] = self.rank_parent[v];
            if self.ordered && !self.rotation_consistent(a) {
                ok = false;
                break;
            }
        }
        for &c in &claimed {
            self.grid[c] = false;
        }
        self.path_buf[0] = claimed;
        for k in 0..depth {
            let v = self.order[k];
            let q = self.placed[v];
            self.unplace(v, q);
            self.dir_nbr[v] = [NONE; 4];
        }
        self.reset();
        ok
    }

    fn reset(&mut self) {
        self.nodes = 0;
        self.count = 0;
        self.found = None;
        self.orientation = if self.strict { 1 } else { 0 };
    }

    fn run(&mut self, counting: bool) -> Result<(), Abort> {
        let root = self.order[0];
        let hint = self.hint_q[root];
        for i in 0..=self.n {
            let q = match i {
                0 if hint == NONE => continue,
                0 => hint,
                _ if i - 1 == hint => continue,
                _ => i - 1,
            };
            if !self.point_fits(root, q) {
                continue;
            }
            self.place(root, q);
            let res = self.descend(1, counting);
            self.unplace(root, q);
            if res? {
                break;
            }
        }
        Ok(())
    }

    #[inline]
    fn hub_box(&self, v: usize, q: usize) -> Option<usize> {
        if self.box_pruning && self.deg[v] == 4 {
            let b = self.box_of[q];
            (self.box_size[b] == 2).then_some(b)
        } else {
            None
        }
    }

    #[inline]
    fn point_fits(&self, v: usize, q: usize) -> bool {
        if self.used[q] {
            return false;
        }
        if let Some(b) = self.hub_box(v, q) {
            if self.box_hubs[b] > 0 {
                return false;
            }
        }
        // enough grid directions inside the bounding square
        let (x, y) = (self.xs[q], self.ys[q]);
        let last = self.n as i32 - 1;
        let room = (x < last) as u8 + (y < last) as u8 + (x > 0) as u8 + (y > 0) as u8;
        self.deg[v] <= room
    }

    fn place(&mut self, v: usize, q: usize) {
        self.placed[v] = q;
        self.occupant[q] = v;
        self.used[q] = true;
        if let Some(b) = self.hub_box(v, q) {
            self.box_hubs[b] += 1;
        }
    }

    fn unplace(&mut self, v: usize, q: usize) {
        self.placed[v] = NONE;
        self.occupant[q] = NONE;
        self.used[q] = false;
        if let Some(b) = self.hub_box(v, q) {
            self.box_hubs[b] -= 1;
        }
    }

    /// Free grid directions at placed vertex `v`.
    #[inline]
    fn free_dirs(&self, v: usize) -> u8 {
        let q = self.placed[v];
        let mut k = 0;
        for d in 0..4 {
            let c = self.beside[q][d];
            k += (self.dir_nbr[v][d] == NONE && c != NONE && !self.grid[c]) as u8;
        }
        k
    }

    fn descend(&mut self, k: usize, counting: bool) -> Result<bool, Abort> {
        if k == self.n {
            self.count += 1;
            if !counting {
                if self.warm_start {
                    let mut slot = if self.recent.len() < RECENT {
                        (vec![0; self.n], vec![false; self.n])
                    } else {
                        self.recent.pop().expect("full")
                    };
                    slot.0.copy_from_slice(&self.placed);
                    slot.1.copy_from_slice(&self.h_at_parent);
                    self.recent.insert(0, slot);
                }
                if self.want_snapshot {
                    self.found = Some(self.snapshot());
                }
                return Ok(true);
            }
            return Ok(false);
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Abort);
        }
        let v = self.order[k];
        let a = self.parent[v];
        let pa = self.placed[a];
        let (ax, ay) = (self.xs[pa], self.ys[pa]);
        let n = self.n as i32;
        let mut path = std::mem::take(&mut self.path_buf[k]);
        let mut stop = false;

        let hint = self.hint_q[v];
        'points: for i in 0..=self.n {
            let q = match i {
                0 if hint == NONE => continue,
                0 => hint,
                _ if i - 1 == hint => continue,
                _ => i - 1,
            };
            if !self.point_fits(v, q) {
                continue;
            }
            let (bx, by) = (self.xs[q], self.ys[q]);
            let first = q != hint || self.hint_h[v];
            for h in [first, !first] {
                // bend and directions at both ends
                let (cx, cy) = if h { (bx, ay) } else { (ax, by) };
                let da = dir_index(cx - ax, cy - ay);
                let dv = dir_index(cx - bx, cy - by);
                if self.dir_nbr[a][da] != NONE {
                    continue;
                }
                path.clear();
                if !self.claim_path((ax, ay), (cx, cy), (bx, by), &mut path) {
                    continue;
                }
                self.place(v, q);
                self.dir_nbr[a][da] = v;
                self.dir_nbr[v][dv] = a;
                self.dir_rank[a][da] = self.rank_child[v];
                self.dir_rank[v][dv] = self.rank_parent[v];
                self.pending[a] -= 1;
                self.pending[v] -= 1;
                self.h_at_parent[v] = h;
                let saved_orientation = self.orientation;

                let ok = self.pending[a] <= self.free_dirs(a)
                    && self.pending[v] <= self.free_dirs(v)
                    && self.neighbours_still_fit(&path, n)
                    && (!self.ordered || self.rotation_consistent(a));

                if ok {
                    match self.descend(k + 1, counting) {
                        Ok(done) => stop = done,
                        Err(abort) => {
                            self.undo_edge(a, v, q, da, dv, &path, saved_orientation);
                            self.path_buf[k] = path;
                            return Err(abort);
                        }
                    }
                }
                self.undo_edge(a, v, q, da, dv, &path, saved_orientation);
                if stop {
                    break 'points;
                }
            }
        }
        self.path_buf[k] = path;
        Ok(stop)
    }

    #[allow(clippy::too_many_arguments)]
    fn undo_edge(&mut self, a: usize, v: usize, q: usize, da: usize, dv: usize, path: &[usize], orientation: u8) {
        for &c in path {
            self.grid[c] = false;
        }
        self.dir_nbr[a][da] = NONE;
        self.dir_nbr[v][dv] = NONE;
        self.pending[a] += 1;
        self.pending[v] += 1;
        self.orientation = orientation;
        self.unplace(v, q);
    }

    /// Claims the interior grid nodes of the L `a -> bend -> b`, or leaves
    /// the grid untouched and returns false if any is taken. Claimed nodes
    /// are appended to `path`.
    fn claim_path(&mut self, a: (i32, i32), bend: (i32, i32), b: (i32, i32), path: &mut Vec<usize>) -> bool {
        let n = self.n as i32;
        let start = path.len();
        let mut cells = |from: (i32, i32), to: (i32, i32), include_end: bool, path: &mut Vec<usize>| -> bool {
            let (dx, dy) = ((to.0 - from.0).signum(), (to.1 - from.1).signum());
            let (mut x, mut y) = (from.0 + dx, from.1 + dy);
            loop {
                let at_end = (x, y) == to;
                if at_end && !include_end {
                    return true;
                }
                let c = (y * n + x) as usize;
                if self.grid[c] {
                    return false;
                }
                self.grid[c] = true;
                path.push(c);
                if at_end {
                    return true;
                }
                x += dx;
                y += dy;
            }
        };
        if cells(a, bend, true, path) && cells(bend, b, false, path) {
            true
        } else {
            for &c in &path[start..] {
                self.grid[c] = false;
            }
            path.truncate(start);
            false
        }
    }

    /// Placed vertices next to freshly claimed nodes must still have room
    /// for their unplaced neighbours.
    fn neighbours_still_fit(&self, path: &[usize], n: i32) -> bool {
        for &c in path {
            let (x, y) = ((c as i32) % n, (c as i32) / n);
            for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= n || ny >= n {
                    continue;
                }
                let j = self.point_at[(ny * n + nx) as usize];
                if j == NONE || !self.used[j] {
                    continue;
                }
                let w = self.occupant[j];
                if self.pending[w] > 0 && self.pending[w] > self.free_dirs(w) {
                    return false;
                }
            }
        }
        true
    }

    /// Placed neighbours of `v`, read counterclockwise by departure
    /// direction, must form a cyclic subsequence of the rotation (or of
    /// its reflection, fixing the global orientation once decided).
    fn rotation_consistent(&mut self, v: usize) -> bool {
        let mut pos = [0u8; 4];
        let mut k = 0;
        for d in 0..4 {
            if self.dir_nbr[v][d] != NONE {
                pos[k] = self.dir_rank[v][d];
                k += 1;
            }
        }
        if k < 3 {
            return true;
        }
        let descents = (0..k).filter(|&i| pos[i] > pos[(i + 1) % k]).count();
        let forward = descents == 1;
        let backward = descents == k - 1;
        match self.orientation {
            1 => forward,
            2 => backward,
            _ => {
                if forward {
                    self.orientation = 1;
                    true
                } else if backward {
                    self.orientation = 2;
                    true
                } else {
                    false
                }
            }
        }
    }

    fn snapshot(&self) -> Embedding {
        let mut horizontal = vec![false; self.tree.edges().len()];
        for &v in &self.order[1..] {
            let e = self.parent_edge[v];
            let (small, _) = self.tree.edges()[e];
            let h = self.h_at_parent[v];
            horizontal[e] = if small == self.parent[v] { h } else { !h };
        }
        Embedding { placement: self.placed.clone(), horizontal }
    }
}

#[derive(Debug)]
struct Abort;

fn beside_table(xs: &[i32], ys: &[i32]) -> Vec<[usize; 4]> {
    let mut out = vec![[NONE; 4]; xs.len()];
    fill_beside(xs, ys, &mut out);
    out
}

fn fill_beside(xs: &[i32], ys: &[i32], out: &mut [[usize; 4]]) {
    let n = xs.len() as i32;
    for (j, slot) in out.iter_mut().enumerate() {
        for (d, (dx, dy)) in [(1, 0), (0, 1), (-1, 0), (0, -1)].into_iter().enumerate() {
            let (cx, cy) = (xs[j] + dx, ys[j] + dy);
            slot[d] = if cx >= 0 && cy >= 0 && cx < n && cy < n { (cy * n + cx) as usize } else { NONE };
        }
    }
}

fn point_tables(p: &PointSet) -> (Vec<i32>, Vec<i32>, Vec<usize>) {
    let n = p.len();
    let (xs, ys): (Vec<i32>, Vec<i32>) = (0..n).map(|j| p.coords(j)).unzip();
    let mut point_at = vec![NONE; n * n];
    for j in 0..n {
        point_at[ys[j] as usize * n + xs[j] as usize] = j;
    }
    (xs, ys, point_at)
}

#[inline]
fn dir_index(dx: i32, dy: i32) -> usize {
    match (dx.signum(), dy.signum()) {
        (1, 0) => 0,
        (0, 1) => 1,
        (-1, 0) => 2,
        _ => 3,
    }
}

/// First embedding of `t` on `p` in search order, if any.
pub fn embed(t: &Tree, p: &PointSet, cfg: &EmbedConfig) -> Result<Option<Embedding>> {
    if t.is_empty() {
        return Err(crate::error::invalid("empty tree"));
    }
    match Searcher::new(t, p, cfg)?.find() {
        SearchOutcome::Found(e) => Ok(Some(e)),
        SearchOutcome::NotEmbeddable => Ok(None),
        SearchOutcome::Aborted => Err(crate::error::invalid("node limit reached")),
    }
}

/// As [`embed`], additionally realizing the rotation system.
pub fn embed_ordered(t: &OrderedTree, p: &PointSet, cfg: &EmbedConfig) -> Result<Option<Embedding>> {
    match Searcher::new_ordered(t, p, cfg)?.find() {
        SearchOutcome::Found(e) => Ok(Some(e)),
        SearchOutcome::NotEmbeddable => Ok(None),
        SearchOutcome::Aborted => Err(crate::error::invalid("node limit reached")),
    }
}

/// Number of distinct valid embeddings (placement plus bend bits).
pub fn count_embeddings(t: &crate::trees::AnyTree, p: &PointSet) -> Result<u64> {
    let cfg = EmbedConfig::default();
    let mut s = match t {
        crate::trees::AnyTree::Unordered(t) => Searcher::new(t, p, &cfg)?,
        crate::trees::AnyTree::Ordered(t) => Searcher::new_ordered(t, p, &cfg)?,
    };
    Ok(s.count().expect("no node limit"))
}
