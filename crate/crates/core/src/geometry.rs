//! Point sets in general position, represented as permutations.
//!
//! The point with x-rank `j` (1-based) sits at `(j, perm[j])` on the unit
//! grid. Only the order type matters for embeddability, so the grid
//! coordinates are as good as any real coordinates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, parse_err, Error, Result};

/// A set of `n` points in general position, stored as the sequence of
/// y-ranks read from left to right.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PointSet {
    perm: Vec<u16>,
}

impl PointSet {
    /// Builds a point set from 1-based y-ranks, checking bijectivity.
    pub fn new(perm: Vec<u16>) -> Result<Self> {
        if perm.is_empty() {
            return Err(invalid("empty point set"));
        }
        let n = perm.len();
        let mut seen = vec![false; n + 1];
        for &v in &perm {
            let v = v as usize;
            if v == 0 || v > n {
                return Err(invalid(format!("value {v} out of range 1..={n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(invalid(format!("value {v} repeated; points must not share a y-coordinate")));
            }
        }
        Ok(Self { perm })
    }

    pub fn from_slice(perm: &[usize]) -> Result<Self> {
        let perm = perm
            .iter()
            .map(|&v| u16::try_from(v).map_err(|_| invalid(format!("value {v} too large"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(perm)
    }

    /// `(1, 2, ..., n)`: all points on the ascending diagonal.
    pub fn identity(n: usize) -> Self {
        Self { perm: (1..=n as u16).collect() }
    }

    pub(crate) fn from_perm_unchecked(perm: Vec<u16>) -> Self {
        debug_assert!(Self::new(perm.clone()).is_ok());
        Self { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[u16] {
        &self.perm
    }

    /// Grid coordinates of point `j` (0-based index), both 0-based.
    #[inline]
    pub fn coords(&self, j: usize) -> (i32, i32) {
        (j as i32, self.perm[j] as i32 - 1)
    }

    /// Recovers the staircase box sizes if the point set is a staircase:
    /// its maximal ascending runs, each lying entirely above the next.
    pub fn staircase_boxes(&self) -> Option<StaircaseSpec> {
        let mut boxes = Vec::new();
        let mut start = 0;
        let mut prev_min = u16::MAX;
        for j in 1..=self.perm.len() {
            if j == self.perm.len() || self.perm[j] < self.perm[j - 1] {
                let run = &self.perm[start..j];
                if run[run.len() - 1] >= prev_min {
                    return None;
                }
                prev_min = run[0];
                boxes.push(j - start);
                start = j;
            }
        }
        Some(StaircaseSpec { boxes })
    }

    pub fn apply(&self, op: SymmetryOp) -> PointSet {
        let mut out = vec![0; self.perm.len()];
        op.apply_into(&self.perm, &mut out);
        PointSet { perm: out }
    }

    pub fn canonical(&self, group: SymmetryGroup) -> PointSet {
        let mut best = self.perm.clone();
        let mut scratch = vec![0; self.perm.len()];
        for &op in group.ops() {
            op.apply_into(&self.perm, &mut scratch);
            if scratch < best {
                best.copy_from_slice(&scratch);
            }
        }
        PointSet { perm: best }
    }

    pub fn is_canonical(&self, group: SymmetryGroup) -> bool {
        is_canonical_perm(&self.perm, group, &mut vec![0; self.perm.len()])
    }
}

fn is_canonical_perm(perm: &[u16], group: SymmetryGroup, scratch: &mut [u16]) -> bool {
    group.ops()[1..].iter().all(|&op| {
        op.apply_into(perm, scratch);
        &*scratch >= perm
    })
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.perm.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointSet({self})")
    }
}

impl FromStr for PointSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let perm = s
            .trim()
            .split(',')
            .map(|t| t.trim().parse::<u16>().map_err(|_| parse_err(format!("bad point-set entry `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(perm)
    }
}

impl TryFrom<String> for PointSet {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PointSet> for String {
    fn from(p: PointSet) -> String {
        p.to_string()
    }
}

/// Box sizes `(a_1, ..., a_k)` of a staircase point set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StaircaseSpec {
    boxes: Vec<usize>,
}

impl StaircaseSpec {
    pub fn new(boxes: Vec<usize>) -> Result<Self> {
        if boxes.is_empty() {
            return Err(invalid("staircase needs at least one box"));
        }
        if boxes.contains(&0) {
            return Err(invalid("staircase boxes must be non-empty"));
        }
        Ok(Self { boxes })
    }

    pub fn boxes(&self) -> &[usize] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Box index of every point, left to right.
    pub fn box_of_point(&self) -> Vec<usize> {
        self.boxes.iter().enumerate().flat_map(|(b, &a)| std::iter::repeat_n(b, a)).collect()
    }

    /// Boxes are laid out top-left to bottom-right; within a box the
    /// points ascend.
    pub fn points(&self) -> PointSet {
        let n = self.len();
        let mut perm = Vec::with_capacity(n);
        let mut top = n;
        for &a in &self.boxes {
            let base = top - a;
            perm.extend((base + 1..=top).map(|v| v as u16));
            top = base;
        }
        PointSet::from_perm_unchecked(perm)
    }
}

pub fn staircase_points(spec: &StaircaseSpec) -> PointSet {
    spec.points()
}

impl fmt::Display for StaircaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.boxes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for StaircaseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| parse_err(format!("staircase `{s}` must be a parenthesized list")))?;
        if inner.trim().is_empty() {
            return Err(invalid("staircase needs at least one box"));
        }
        let boxes = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| parse_err(format!("bad box size `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(boxes)
    }
}

/// One of the eight symmetries of the square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryOp {
    Id,
    Rot90,
    Rot180,
    Rot270,
    /// Reverses the x-order.
    MirrorH,
    /// Reverses the y-order.
    MirrorV,
    /// Reflection in `y = x`.
    DiagMain,
    /// Reflection in the anti-diagonal.
    DiagAnti,
}

impl SymmetryOp {
    pub const ALL: [SymmetryOp; 8] = [
        SymmetryOp::Id,
        SymmetryOp::Rot90,
        SymmetryOp::Rot180,
        SymmetryOp::Rot270,
        SymmetryOp::MirrorH,
        SymmetryOp::MirrorV,
        SymmetryOp::DiagMain,
        SymmetryOp::DiagAnti,
    ];

    // (swap axes, then negate x, then negate y)
    fn parts(self) -> (bool, bool, bool) {
        match self {
            SymmetryOp::Id => (false, false, false),
            SymmetryOp::Rot90 => (true, true, false),
            SymmetryOp::Rot180 => (false, true, true),
            SymmetryOp::Rot270 => (true, false, true),
            SymmetryOp::MirrorH => (false, true, false),
            SymmetryOp::MirrorV => (false, false, true),
            SymmetryOp::DiagMain => (true, false, false),
            SymmetryOp::DiagAnti => (true, true, true),
        }
    }

    fn from_parts(p: (bool, bool, bool)) -> Self {
        *Self::ALL.iter().find(|op| op.parts() == p).expect("all 8 parts combinations covered")
    }

    fn matrix(self) -> [[i32; 2]; 2] {
        let (swap, fx, fy) = self.parts();
        let sx = if fx { -1 } else { 1 };
        let sy = if fy { -1 } else { 1 };
        if swap {
            [[0, sx], [sy, 0]]
        } else {
            [[sx, 0], [0, sy]]
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: SymmetryOp) -> SymmetryOp {
        let a = self.matrix();
        let b = other.matrix();
        let mut m = [[0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        if m[0][0] != 0 {
            Self::from_parts((false, m[0][0] < 0, m[1][1] < 0))
        } else {
            Self::from_parts((true, m[0][1] < 0, m[1][0] < 0))
        }
    }

    pub fn inverse(self) -> SymmetryOp {
        *Self::ALL.iter().find(|&&g| g.compose(self) == SymmetryOp::Id).expect("group element has an inverse")
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, SymmetryOp::Id | SymmetryOp::Rot90 | SymmetryOp::Rot180 | SymmetryOp::Rot270)
    }

    /// Maps 1-based grid coordinates on an `n × n` grid.
    #[inline]
    pub fn map_point(self, n: usize, x: usize, y: usize) -> (usize, usize) {
        let (swap, fx, fy) = self.parts();
        let (u, v) = if swap { (y, x) } else { (x, y) };
        (if fx { n + 1 - u } else { u }, if fy { n + 1 - v } else { v })
    }

    /// Maps a grid direction the same way points are mapped.
    pub fn map_direction(self, dx: i32, dy: i32) -> (i32, i32) {
        let m = self.matrix();
        (m[0][0] * dx + m[0][1] * dy, m[1][0] * dx + m[1][1] * dy)
    }

    fn apply_into(self, perm: &[u16], out: &mut [u16]) {
        let n = perm.len();
        for (i, &y) in perm.iter().enumerate() {
            let (x2, y2) = self.map_point(n, i + 1, y as usize);
            out[x2 - 1] = y2 as u16;
        }
    }
}

impl fmt::Display for SymmetryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SymmetryOp::Id => "id",
            SymmetryOp::Rot90 => "rot90",
            SymmetryOp::Rot180 => "rot180",
            SymmetryOp::Rot270 => "rot270",
            SymmetryOp::MirrorH => "mirrorH",
            SymmetryOp::MirrorV => "mirrorV",
            SymmetryOp::DiagMain => "diagMain",
            SymmetryOp::DiagAnti => "diagAnti",
        };
        f.write_str(s)
    }
}

pub fn apply_symmetry(op: SymmetryOp, p: &PointSet) -> PointSet {
    p.apply(op)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryGroup {
    /// All eight symmetries of the square.
    #[serde(rename = "full8")]
    Full8,
    /// The four rotations only.
    #[serde(rename = "rot4")]
    Rotations4,
}

impl SymmetryGroup {
    /// Group elements, identity first.
    pub fn ops(self) -> &'static [SymmetryOp] {
        match self {
            SymmetryGroup::Full8 => &SymmetryOp::ALL,
            SymmetryGroup::Rotations4 => &SymmetryOp::ALL[..4],
        }
    }
}

impl FromStr for SymmetryGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full8" => Ok(SymmetryGroup::Full8),
            "rot4" | "rotations4" => Ok(SymmetryGroup::Rotations4),
            _ => Err(parse_err(format!("unknown symmetry group `{s}` (expected full8 or rot4)"))),
        }
    }
}

pub fn canonical_form(p: &PointSet, group: SymmetryGroup) -> PointSet {
    p.canonical(group)
}

/// Rearranges `a` into its lexicographic successor; `false` once `a` is
/// the last (descending) permutation.
pub(crate) fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Canonical point sets of one size in lexicographic order.
///
/// Optionally restricted to permutations with a fixed first entry, which
/// splits the stream into `n` independent ranges.
pub struct CanonicalPointSets {
    group: SymmetryGroup,
    current: Vec<u16>,
    scratch: Vec<u16>,
    first: Option<u16>,
    done: bool,
}

impl CanonicalPointSets {
    pub fn new(n: usize, group: SymmetryGroup) -> Self {
        assert!(n >= 1, "point sets need at least one point");
        Self { group, current: (1..=n as u16).collect(), scratch: vec![0; n], first: None, done: false }
    }

    /// Only permutations whose leftmost point has y-rank `first`.
    pub fn with_first(n: usize, group: SymmetryGroup, first: usize) -> Self {
        assert!((1..=n).contains(&first));
        let mut current = vec![first as u16];
        current.extend((1..=n as u16).filter(|&v| v as usize != first));
        Self { group, current, scratch: vec![0; n], first: Some(first as u16), done: false }
    }
}

impl Iterator for CanonicalPointSets {
    type Item = PointSet;

    fn next(&mut self) -> Option<PointSet> {
        while !self.done {
            let hit = is_canonical_perm(&self.current, self.group, &mut self.scratch);
            let out = hit.then(|| PointSet::from_perm_unchecked(self.current.clone()));
            match self.first {
                Some(f) => {
                    if !next_permutation(&mut self.current[1..]) {
                        self.done = true;
                    }
                    debug_assert_eq!(self.current[0], f);
                }
                None => {
                    if !next_permutation(&mut self.current) {
                        self.done = true;
                    }
                }
            }
            if out.is_some() {
                return out;
            }
        }
        None
    }
}

pub fn enumerate_canonical_pointsets(n: usize, group: SymmetryGroup) -> CanonicalPointSets {
    CanonicalPointSets::new(n, group)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PointSet {
        s.parse().unwrap()
    }

    #[test]
    fn staircase_examples() {
        let st = |s: &str| s.parse::<StaircaseSpec>().unwrap().points();
        assert_eq!(st("(1)"), ps("1"));
        assert_eq!(st("(2,2)"), ps("3,4,1,2"));
        assert_eq!(st("(2,2,2,1,2,2,2)"), ps("12,13,10,11,8,9,7,5,6,3,4,1,2"));
    }

    #[test]
    fn staircase_rejects_bad_specs() {
        assert!("()".parse::<StaircaseSpec>().is_err());
        assert!("(2,0,1)".parse::<StaircaseSpec>().is_err());
        assert!("2,2".parse::<StaircaseSpec>().is_err());
        assert!(StaircaseSpec::new(vec![]).is_err());
    }

    #[test]
    fn staircase_boxes_recovered() {
        let spec: StaircaseSpec = "(1,1,3,1,2,3,2,1,3,1,1)".parse().unwrap();
        assert_eq!(spec.points().staircase_boxes(), Some(spec));
        assert_eq!(ps("1,3,2").staircase_boxes(), None);
        assert_eq!(ps("2,1").staircase_boxes().unwrap().boxes(), &[1, 1]);
    }

    #[test]
    fn pointset_validation() {
        assert!(PointSet::new(vec![1, 1]).is_err());
        assert!(PointSet::new(vec![0, 1]).is_err());
        assert!(PointSet::new(vec![3, 1]).is_err());
        assert!(PointSet::new(vec![]).is_err());
        assert!("1,x".parse::<PointSet>().is_err());
        assert_eq!(ps("12,13,10,11,8,9,7,5,6,3,4,1,2").to_string(), "12,13,10,11,8,9,7,5,6,3,4,1,2");
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(ps("3,4,1,2").apply(SymmetryOp::Rot180), ps("3,4,1,2"));
        assert_eq!(ps("1,2,3").apply(SymmetryOp::MirrorH), ps("3,2,1"));
        assert_eq!(ps("2,1").apply(SymmetryOp::Rot90), ps("1,2"));
        assert_eq!(ps("1,2,3").canonical(SymmetryGroup::Full8), ps("1,2,3"));
    }

    #[test]
    fn rot90_is_counterclockwise() {
        // Point (1,1) of a 3-grid goes to the bottom-right corner (3,1).
        assert_eq!(SymmetryOp::Rot90.map_point(3, 1, 1), (3, 1));
        assert_eq!(SymmetryOp::Rot90.map_direction(1, 0), (0, 1));
    }

    #[test]
    fn group_table_closed_with_inverses() {
        for g in SymmetryOp::ALL {
            assert_eq!(g.compose(g.inverse()), SymmetryOp::Id);
            for h in SymmetryOp::ALL {
                let gh = g.compose(h);
                if g.is_rotation() && h.is_rotation() {
                    assert!(gh.is_rotation());
                }
            }
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_canonical_pointsets(1, SymmetryGroup::Full8).collect::<Vec<_>>(), vec![ps("1")]);
        assert_eq!(enumerate_canonical_pointsets(4, SymmetryGroup::Full8).count(), 7);
        assert_eq!(enumerate_canonical_pointsets(4, SymmetryGroup::Rotations4).count(), 9);
        assert_eq!(enumerate_canonical_pointsets(5, SymmetryGroup::Full8).count(), 23);
    }

    #[test]
    fn prefix_ranges_partition_the_stream() {
        for group in [SymmetryGroup::Full8, SymmetryGroup::Rotations4] {
            let all: Vec<_> = enumerate_canonical_pointsets(6, group).collect();
            let split: Vec<_> = (1..=6).flat_map(|f| CanonicalPointSets::with_first(6, group, f)).collect();
            assert_eq!(all, split);
        }
    }

    #[test]
    fn next_permutation_lex_order() {
        let mut a = [1, 2, 3];
        let mut seen = vec![a];
        while next_permutation(&mut a) {
            seen.push(a);
        }
        assert_eq!(seen, vec![[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]]);
    }
}
