use std::collections::HashSet;

use lshape_core::geometry::{apply_symmetry, canonical_form, enumerate_canonical_pointsets, staircase_points};
use lshape_core::{PointSet, StaircaseSpec, SymmetryGroup, SymmetryOp};
use proptest::prelude::*;

// Symmetries acting on doubled, centred coordinates: a point (x, y) of
// the n-grid becomes (2x - n - 1, 2y - n - 1).
fn oracle_map(op: &str, (x, y): (i64, i64)) -> (i64, i64) {
    match op {
        "id" => (x, y),
        "rot90" => (-y, x),
        "rot180" => (-x, -y),
        "rot270" => (y, -x),
        "mirrorH" => (-x, y),
        "mirrorV" => (x, -y),
        "diagMain" => (y, x),
        "diagAnti" => (-y, -x),
        _ => unreachable!(),
    }
}

fn oracle_apply(op: SymmetryOp, perm: &[u16]) -> Vec<u16> {
    let n = perm.len() as i64;
    let mut out = vec![0u16; perm.len()];
    for (i, &y) in perm.iter().enumerate() {
        let c = (2 * (i as i64 + 1) - n - 1, 2 * y as i64 - n - 1);
        let (x2, y2) = oracle_map(&op.to_string(), c);
        out[((x2 + n + 1) / 2 - 1) as usize] = ((y2 + n + 1) / 2) as u16;
    }
    out
}

fn all_perms(n: usize) -> Vec<Vec<u16>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n as u16);
            out.push(q);
        }
    }
    out
}

fn oracle_orbit_count(n: usize, rotations_only: bool) -> usize {
    let ops: Vec<SymmetryOp> = SymmetryOp::ALL.into_iter().filter(|g| !rotations_only || g.is_rotation()).collect();
    let mins: HashSet<Vec<u16>> =
        all_perms(n).iter().map(|p| ops.iter().map(|&g| oracle_apply(g, p)).min().unwrap()).collect();
    mins.len()
}

fn perm_strategy(max: usize) -> impl Strategy<Value = PointSet> {
    (1..=max)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| PointSet::from_slice(&v).unwrap())
}

fn op_strategy() -> impl Strategy<Value = SymmetryOp> {
    prop::sample::select(SymmetryOp::ALL.to_vec())
}

#[test]
fn symmetry_matches_geometric_oracle() {
    for n in 1..=6 {
        for p in all_perms(n) {
            let ps = PointSet::new(p.clone()).unwrap();
            for g in SymmetryOp::ALL {
                assert_eq!(apply_symmetry(g, &ps).perm(), oracle_apply(g, &p).as_slice(), "{g} on {ps}");
            }
        }
    }
}

#[test]
fn canonical_counts_match_orbit_oracle() {
    for n in 1..=7 {
        for (group, rot) in [(SymmetryGroup::Full8, false), (SymmetryGroup::Rotations4, true)] {
            assert_eq!(enumerate_canonical_pointsets(n, group).count(), oracle_orbit_count(n, rot), "n={n} {group:?}");
        }
    }
}

#[test]
fn pointset_counts_small() {
    let full: Vec<usize> = (4..=8).map(|n| enumerate_canonical_pointsets(n, SymmetryGroup::Full8).count()).collect();
    assert_eq!(full, [7, 23, 115, 694, 5282]);
    let rot: Vec<usize> =
        (4..=8).map(|n| enumerate_canonical_pointsets(n, SymmetryGroup::Rotations4).count()).collect();
    assert_eq!(rot, [9, 33, 192, 1272, 10182]);
}

#[test]
fn stream_is_lex_ordered_and_canonical() {
    for group in [SymmetryGroup::Full8, SymmetryGroup::Rotations4] {
        let all: Vec<PointSet> = enumerate_canonical_pointsets(7, group).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|p| canonical_form(p, group) == *p));
    }
}

#[test]
fn symmetry_examples() {
    let ps = |s: &str| s.parse::<PointSet>().unwrap();
    assert_eq!(apply_symmetry(SymmetryOp::Rot180, &ps("3,4,1,2")), ps("3,4,1,2"));
    assert_eq!(apply_symmetry(SymmetryOp::MirrorH, &ps("1,2,3")), ps("3,2,1"));
    assert_eq!(apply_symmetry(SymmetryOp::Rot90, &ps("2,1")), ps("1,2"));
    assert_eq!(canonical_form(&ps("1,2,3"), SymmetryGroup::Full8), ps("1,2,3"));
    assert_eq!(enumerate_canonical_pointsets(1, SymmetryGroup::Full8).collect::<Vec<_>>(), [ps("1")]);
}

#[test]
fn staircase_examples() {
    let st = |s: &str| staircase_points(&s.parse::<StaircaseSpec>().unwrap());
    assert_eq!(st("(1)").to_string(), "1");
    assert_eq!(st("(2,2)").to_string(), "3,4,1,2");
    assert_eq!(st("(2,2,2,1,2,2,2)").to_string(), "12,13,10,11,8,9,7,5,6,3,4,1,2");
    assert!("()".parse::<StaircaseSpec>().is_err());
}

proptest! {
    #[test]
    fn group_action_is_compatible_with_composition(p in perm_strategy(9), g in op_strategy(), h in op_strategy()) {
        prop_assert_eq!(apply_symmetry(g, &apply_symmetry(h, &p)), apply_symmetry(g.compose(h), &p));
        prop_assert_eq!(apply_symmetry(g.inverse(), &apply_symmetry(g, &p)), p.clone());
        prop_assert_eq!(apply_symmetry(SymmetryOp::Id, &p), p);
    }

    #[test]
    fn canonical_form_is_an_orbit_invariant(p in perm_strategy(9), g in op_strategy()) {
        let full = canonical_form(&p, SymmetryGroup::Full8);
        prop_assert_eq!(canonical_form(&apply_symmetry(g, &p), SymmetryGroup::Full8), full.clone());
        prop_assert_eq!(canonical_form(&full, SymmetryGroup::Full8), full.clone());
        prop_assert!(full <= p);
        let rot = canonical_form(&p, SymmetryGroup::Rotations4);
        let r = SymmetryOp::ALL[(g as usize) % 4];
        prop_assert_eq!(canonical_form(&apply_symmetry(r, &p), SymmetryGroup::Rotations4), rot.clone());
        prop_assert!(full <= rot);
    }

    #[test]
    fn staircases_roundtrip(boxes in prop::collection::vec(1usize..=3, 1..10)) {
        let spec = StaircaseSpec::new(boxes).unwrap();
        let p = staircase_points(&spec);
        prop_assert_eq!(p.len(), spec.len());
        prop_assert_eq!(p.staircase_boxes(), Some(spec.clone()));
        prop_assert_eq!(spec.to_string().parse::<StaircaseSpec>().unwrap(), spec);
        prop_assert_eq!(p.to_string().parse::<PointSet>().unwrap(), p);
    }
}
