//! L-shaped edges, validity of embeddings, and the exact backtracking search.

mod search;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, parse_err, Error, Result};
use crate::geometry::{PointSet, StaircaseSpec};
use crate::trees::{AnyTree, OrderedTree, Tree};

pub use search::{count_embeddings, embed, embed_ordered, EmbedConfig, SearchOutcome, Searcher};

/// A departure direction at a vertex; counterclockwise order is E, N, W, S.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    E = 0,
    N = 1,
    W = 2,
    S = 3,
}

impl Direction {
    pub const CCW: [Direction; 4] = [Direction::E, Direction::N, Direction::W, Direction::S];

    pub fn ccw_next(self) -> Direction {
        Self::CCW[(self as usize + 1) % 4]
    }

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::E => (1, 0),
            Direction::N => (0, 1),
            Direction::W => (-1, 0),
            Direction::S => (0, -1),
        }
    }

    pub fn from_delta(dx: i32, dy: i32) -> Option<Direction> {
        match (dx.signum(), dy.signum()) {
            (1, 0) => Some(Direction::E),
            (0, 1) => Some(Direction::N),
            (-1, 0) => Some(Direction::W),
            (0, -1) => Some(Direction::S),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// A closed axis-parallel segment on the integer grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub axis: Axis,
    /// y for horizontal segments, x for vertical ones.
    pub fixed: i32,
    pub lo: i32,
    pub hi: i32,
}

impl Segment {
    fn between(a: (i32, i32), b: (i32, i32)) -> Segment {
        if a.1 == b.1 {
            Segment { axis: Axis::Horizontal, fixed: a.1, lo: a.0.min(b.0), hi: a.0.max(b.0) }
        } else {
            debug_assert_eq!(a.0, b.0);
            Segment { axis: Axis::Vertical, fixed: a.0, lo: a.1.min(b.1), hi: a.1.max(b.1) }
        }
    }

    /// `[x1, x2] × [y1, y2]`, degenerate in one dimension.
    fn bounds(&self) -> (i32, i32, i32, i32) {
        match self.axis {
            Axis::Horizontal => (self.lo, self.hi, self.fixed, self.fixed),
            Axis::Vertical => (self.fixed, self.fixed, self.lo, self.hi),
        }
    }

    pub fn len(&self) -> i32 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn contains(&self, p: (i32, i32)) -> bool {
        let (x1, x2, y1, y2) = self.bounds();
        (x1..=x2).contains(&p.0) && (y1..=y2).contains(&p.1)
    }

    /// Common part of two closed segments, as `[x1, x2] × [y1, y2]`.
    pub fn intersection(&self, other: &Segment) -> Option<(i32, i32, i32, i32)> {
        let (a1, a2, b1, b2) = self.bounds();
        let (c1, c2, d1, d2) = other.bounds();
        let (x1, x2, y1, y2) = (a1.max(c1), a2.min(c2), b1.max(d1), b2.min(d2));
        (x1 <= x2 && y1 <= y2).then_some((x1, x2, y1, y2))
    }
}

/// The two segments of the L-shaped edge from `pa` to `pb`. With
/// `horizontal_at_a` the bend is at `(xb, ya)`, otherwise at `(xa, yb)`.
pub fn edge_segments(pa: (i32, i32), pb: (i32, i32), horizontal_at_a: bool) -> Result<(Segment, Segment)> {
    if pa.0 == pb.0 || pa.1 == pb.1 {
        return Err(invalid(format!("points {pa:?} and {pb:?} share a coordinate")));
    }
    let bend = bend_point(pa, pb, horizontal_at_a);
    Ok((Segment::between(pa, bend), Segment::between(bend, pb)))
}

pub(crate) fn bend_point(pa: (i32, i32), pb: (i32, i32), horizontal_at_a: bool) -> (i32, i32) {
    if horizontal_at_a {
        (pb.0, pa.1)
    } else {
        (pa.0, pb.1)
    }
}

/// Direction in which the edge leaves `pa`.
pub fn departure(pa: (i32, i32), pb: (i32, i32), horizontal_at_a: bool) -> Direction {
    let bend = bend_point(pa, pb, horizontal_at_a);
    Direction::from_delta(bend.0 - pa.0, bend.1 - pa.1).expect("general position")
}

/// Whether two L-shaped edges touch anywhere other than at their shared
/// endpoint. Overlaps, crossings and T-junctions all count.
pub fn edges_conflict(e1: (Segment, Segment), e2: (Segment, Segment), shared: Option<(i32, i32)>) -> bool {
    for s in [e1.0, e1.1] {
        for t in [e2.0, e2.1] {
            if let Some(b) = s.intersection(&t) {
                match shared {
                    Some(p) if b == (p.0, p.0, p.1, p.1) => {}
                    _ => return true,
                }
            }
        }
    }
    false
}

/// Vertex placement plus one bend bit per edge: `horizontal[e]` means edge
/// `e` leaves its smaller-labeled endpoint horizontally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub placement: Vec<usize>,
    pub horizontal: Vec<bool>,
}

impl Embedding {
    pub fn point_of(&self, v: usize) -> usize {
        self.placement[v]
    }

    /// Segments of edge `e` of `t`, from its smaller endpoint.
    pub fn segments(&self, t: &Tree, p: &PointSet, e: usize) -> Result<(Segment, Segment)> {
        let (a, b) = t.edges()[e];
        edge_segments(p.coords(self.placement[a]), p.coords(self.placement[b]), self.horizontal[e])
    }

    /// Departure direction of edge `{v, u}` at `v`.
    pub fn departure_at(&self, t: &Tree, p: &PointSet, v: usize, u: usize) -> Direction {
        let e = t.edge_index(v, u).expect("edge exists");
        let (a, _) = t.edges()[e];
        let h_at_v = if a == v { self.horizontal[e] } else { !self.horizontal[e] };
        departure(p.coords(self.placement[v]), p.coords(self.placement[u]), h_at_v)
    }

    /// `v -> point` lines (points numbered 1..n left to right), then
    /// `edge u v : H|V` lines, `H` meaning horizontal at the smaller label.
    pub fn to_text(&self, t: &Tree) -> String {
        let mut s = String::new();
        for (v, &j) in self.placement.iter().enumerate() {
            let _ = writeln!(s, "{v} -> {}", j + 1);
        }
        for (e, &(a, b)) in t.edges().iter().enumerate() {
            let _ = writeln!(s, "edge {a} {b} : {}", if self.horizontal[e] { 'H' } else { 'V' });
        }
        s
    }

    pub fn parse(text: &str, t: &Tree) -> Result<Embedding> {
        let n = t.len();
        let mut placement = vec![usize::MAX; n];
        let mut horizontal = vec![None; t.edges().len()];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let num = |s: &str| s.trim().parse::<usize>().map_err(|_| parse_err(format!("bad number in `{line}`")));
            if let Some(rest) = line.strip_prefix("edge ") {
                let (ends, hv) = rest.split_once(':').ok_or_else(|| parse_err(format!("`{line}` lacks `:`")))?;
                let ends: Vec<_> = ends.split_whitespace().collect();
                if ends.len() != 2 {
                    return Err(parse_err(format!("`{line}` needs two endpoints")));
                }
                let e = t
                    .edge_index(num(ends[0])?, num(ends[1])?)
                    .ok_or_else(|| parse_err(format!("`{line}` is not a tree edge")))?;
                horizontal[e] = Some(match hv.trim() {
                    "H" => true,
                    "V" => false,
                    other => return Err(parse_err(format!("orientation `{other}` must be H or V"))),
                });
            } else {
                let (v, j) = line.split_once("->").ok_or_else(|| parse_err(format!("unrecognized line `{line}`")))?;
                let (v, j) = (num(v)?, num(j)?);
                if v >= n || j == 0 {
                    return Err(parse_err(format!("`{line}` out of range")));
                }
                placement[v] = j - 1;
            }
        }
        if placement.contains(&usize::MAX) {
            return Err(parse_err("every vertex needs a placement"));
        }
        let horizontal = horizontal
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| parse_err("every edge needs an orientation"))?;
        Ok(Embedding { placement, horizontal })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    PlacementOutOfRange { vertex: usize, point: usize },
    SharedPoint { point: usize, vertices: (usize, usize) },
    SameDirection { vertex: usize, direction: Direction, edges: (usize, usize) },
    Intersection { edges: (usize, usize) },
    PassesThroughPoint { edge: usize, point: usize },
    RotationMismatch { vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PlacementOutOfRange { vertex, point } => {
                write!(f, "vertex {vertex} placed on missing point {point}")
            }
            Violation::SharedPoint { point, vertices } => {
                write!(f, "vertices {} and {} share point {point}", vertices.0, vertices.1)
            }
            Violation::SameDirection { vertex, direction, edges } => {
                write!(f, "edges {} and {} both leave vertex {vertex} towards {direction:?}", edges.0, edges.1)
            }
            Violation::Intersection { edges } => write!(f, "edges {} and {} intersect", edges.0, edges.1),
            Violation::PassesThroughPoint { edge, point } => write!(f, "edge {edge} passes through point {point}"),
            Violation::RotationMismatch { vertex } => {
                write!(f, "neighbour order at vertex {vertex} differs from the rotation system")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks an embedding from first principles with explicit segment
/// intersection tests. Ordered trees may realize either their rotation
/// system or its global reflection unless `strict_rotation` is set.
pub fn validate_with(t: &AnyTree, p: &PointSet, e: &Embedding, strict_rotation: bool) -> Result<Validation> {
    let tree = t.base();
    let n = tree.len();
    if n != p.len() || e.placement.len() != n {
        return Err(Error::SizeMismatch { tree: n, points: p.len() });
    }
    if e.horizontal.len() != tree.edges().len() {
        return Err(invalid("one orientation bit per edge required"));
    }
    let mut violations = Vec::new();
    let mut owner = vec![usize::MAX; n];
    for (v, &j) in e.placement.iter().enumerate() {
        if j >= n {
            violations.push(Violation::PlacementOutOfRange { vertex: v, point: j });
        } else if owner[j] != usize::MAX {
            violations.push(Violation::SharedPoint { point: j, vertices: (owner[j], v) });
        } else {
            owner[j] = v;
        }
    }
    if !violations.is_empty() {
        return Ok(Validation { violations });
    }

    let segs: Vec<_> = (0..tree.edges().len()).map(|k| e.segments(tree, p, k)).collect::<Result<_>>()?;

    for (k, &(a, b)) in tree.edges().iter().enumerate() {
        for j in 0..n {
            if j == e.placement[a] || j == e.placement[b] {
                continue;
            }
            let q = p.coords(j);
            if segs[k].0.contains(q) || segs[k].1.contains(q) {
                violations.push(Violation::PassesThroughPoint { edge: k, point: j });
            }
        }
    }

    for v in 0..n {
        let nb = tree.neighbors(v);
        let dirs: Vec<_> = nb.iter().map(|&u| e.departure_at(tree, p, v, u)).collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if dirs[i] == dirs[j] {
                    let ei = tree.edge_index(v, nb[i]).expect("edge");
                    let ej = tree.edge_index(v, nb[j]).expect("edge");
                    violations.push(Violation::SameDirection { vertex: v, direction: dirs[i], edges: (ei, ej) });
                }
            }
        }
    }

    let edges = tree.edges();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            let shared = [a, b].into_iter().find(|&v| v == c || v == d).map(|v| p.coords(e.placement[v]));
            if edges_conflict(segs[i], segs[j], shared) {
                violations.push(Violation::Intersection { edges: (i, j) });
            }
        }
    }

    if let Some(ot) = t.ordered() {
        violations.extend(rotation_violations(ot, p, e, strict_rotation));
    }
    Ok(Validation { violations })
}

pub fn validate(t: &AnyTree, p: &PointSet, e: &Embedding) -> Result<Validation> {
    validate_with(t, p, e, false)
}

/// No staircase box of size two hosts two degree-4 vertices.
pub fn box_lemma_holds(t: &Tree, spec: &StaircaseSpec, e: &Embedding) -> bool {
    let box_of = spec.box_of_point();
    let mut hubs = vec![0u8; spec.boxes().len()];
    for v in (0..t.len()).filter(|&v| t.degree(v) == 4) {
        let b = box_of[e.placement[v]];
        hubs[b] += 1;
        if spec.boxes()[b] == 2 && hubs[b] == 2 {
            return false;
        }
    }
    true
}

fn rotation_violations(t: &OrderedTree, p: &PointSet, e: &Embedding, strict: bool) -> Vec<Violation> {
    let tree = t.base();
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let mirrored = t.reflected();
    for v in 0..tree.len() {
        if tree.degree(v) < 3 {
            continue;
        }
        let mut around: Vec<_> = tree.neighbors(v).iter().map(|&u| (e.departure_at(tree, p, v, u), u)).collect();
        around.sort();
        if around.windows(2).any(|w| w[0].0 == w[1].0) {
            continue; // already reported as SameDirection
        }
        let seq: Vec<_> = around.iter().map(|&(_, u)| u).collect();
        if !same_cycle(&seq, t.rotation(v)) {
            forward.push(Violation::RotationMismatch { vertex: v });
        }
        if !same_cycle(&seq, mirrored.rotation(v)) {
            backward.push(Violation::RotationMismatch { vertex: v });
        }
    }
    if strict || forward.len() <= backward.len() {
        forward
    } else {
        backward
    }
}

fn same_cycle(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && (0..b.len()).any(|s| (0..a.len()).all(|i| a[i] == b[(s + i) % b.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_of_unit_edge() {
        let (h, v) = edge_segments((1, 1), (2, 2), true).unwrap();
        assert_eq!(h, Segment { axis: Axis::Horizontal, fixed: 1, lo: 1, hi: 2 });
        assert_eq!(v, Segment { axis: Axis::Vertical, fixed: 2, lo: 1, hi: 2 });
        let (v2, h2) = edge_segments((1, 1), (2, 2), false).unwrap();
        assert_eq!(v2.axis, Axis::Vertical);
        assert_eq!(h2.axis, Axis::Horizontal);
        assert!(edge_segments((1, 1), (1, 3), true).is_err());
    }

    #[test]
    fn departures() {
        assert_eq!(departure((0, 0), (3, 2), true), Direction::E);
        assert_eq!(departure((0, 0), (3, 2), false), Direction::N);
        assert_eq!(departure((3, 2), (0, 0), true), Direction::W);
        assert_eq!(departure((3, 2), (0, 0), false), Direction::S);
        assert_eq!(Direction::S.ccw_next(), Direction::E);
    }

    #[test]
    fn conflict_predicate() {
        let e1 = edge_segments((0, 0), (4, 4), true).unwrap();
        // crosses the vertical leg x=4
        let e2 = edge_segments((3, 2), (5, 1), true).unwrap();
        assert!(edges_conflict(e1, e2, None));
        // T-junction: bend of e3 lands on e1's horizontal leg
        let e3 = edge_segments((2, 3), (1, 0), false).unwrap();
        assert!(edges_conflict(e1, e3, None));
        // shared endpoint only
        let e4 = edge_segments((0, 0), (-2, -3), true).unwrap();
        assert!(!edges_conflict(e1, e4, Some((0, 0))));
        // both leave (0,0) eastwards
        let e5 = edge_segments((0, 0), (2, -1), true).unwrap();
        assert!(edges_conflict(e1, e5, Some((0, 0))));
    }

    #[test]
    fn monotone_path_on_diagonal() {
        let t = AnyTree::from(Tree::path(5));
        let p = PointSet::identity(5);
        let e = Embedding { placement: vec![0, 1, 2, 3, 4], horizontal: vec![true; 4] };
        assert!(validate(&t, &p, &e).unwrap().is_valid());
    }

    #[test]
    fn two_edges_east_overlap() {
        let t = AnyTree::from(Tree::path(3));
        let p: PointSet = "2,1,3".parse().unwrap();
        // vertex 1 on the leftmost point, both edges leave it eastwards
        let e = Embedding { placement: vec![1, 0, 2], horizontal: vec![false, true] };
        let v = validate(&t, &p, &e).unwrap();
        assert!(v
            .violations
            .iter()
            .any(|x| matches!(x, Violation::SameDirection { vertex: 1, direction: Direction::E, .. })));
    }

    #[test]
    fn shared_points_reported() {
        let t = AnyTree::from(Tree::path(2));
        let p = PointSet::identity(2);
        let e = Embedding { placement: vec![0, 0], horizontal: vec![true] };
        assert!(!validate(&t, &p, &e).unwrap().is_valid());
        let bad = Embedding { placement: vec![0], horizontal: vec![true] };
        assert!(validate(&t, &p, &bad).is_err());
    }

    #[test]
    fn embedding_text_roundtrip() {
        let t = Tree::path(3);
        let e = Embedding { placement: vec![2, 0, 1], horizontal: vec![true, false] };
        let text = e.to_text(&t);
        assert_eq!(text, "0 -> 3\n1 -> 1\n2 -> 2\nedge 0 1 : H\nedge 1 2 : V\n");
        assert_eq!(Embedding::parse(&text, &t).unwrap(), e);
        assert!(Embedding::parse("0 -> 1\n", &t).is_err());
    }

    #[test]
    fn cycles() {
        assert!(same_cycle(&[1, 2, 3], &[3, 1, 2]));
        assert!(!same_cycle(&[1, 2, 3], &[1, 3, 2]));
    }
}
