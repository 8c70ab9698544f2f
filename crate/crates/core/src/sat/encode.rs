use serde::{Deserialize, Serialize};

use crate::embed::{departure, edge_segments, edges_conflict};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::trees::{AnyTree, OrderedTree, Tree};

use super::{CnfFormula, VarMap};

/// Largest tree the pairwise encoding accepts; its crossing family grows
/// like `n^6`.
pub const PAIRWISE_MAX_N: usize = 40;

/// Which clause set to generate. Both are over the same x and y
/// variables and have the same models when projected onto them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// Injectivity, same-side overlap clauses for incident edges, and one
    /// clause per crossing (edge pair, endpoint placement, bends) case.
    #[default]
    Pairwise,
    /// Injectivity plus auxiliary ray variables: every edge is a
    /// horizontal ray from one endpoint and a vertical ray from the other,
    /// and rays may only meet where they end together. Size is cubic in
    /// `n`, so it scales to trees with about a hundred vertices.
    Rays,
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Encoding> {
        match s {
            "pairwise" => Ok(Encoding::Pairwise),
            "rays" => Ok(Encoding::Rays),
            _ => Err(crate::error::invalid(format!("unknown encoding `{s}` (pairwise|rays)"))),
        }
    }
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Encoding::Pairwise => "pairwise",
            Encoding::Rays => "rays",
        })
    }
}

/// The pairwise encoding of "t has an L-shaped embedding on p".
pub fn build_cnf(t: &Tree, p: &PointSet) -> Result<(CnfFormula, VarMap)> {
    build_cnf_with(t, p, Encoding::Pairwise)
}

pub fn build_cnf_with(t: &Tree, p: &PointSet, enc: Encoding) -> Result<(CnfFormula, VarMap)> {
    if t.len() != p.len() {
        return Err(Error::SizeMismatch { tree: t.len(), points: p.len() });
    }
    if enc == Encoding::Pairwise && t.len() > PAIRWISE_MAX_N {
        return Err(Error::Unsupported(format!(
            "pairwise encoding is limited to {PAIRWISE_MAX_N} vertices (got {}); use the rays encoding",
            t.len()
        )));
    }
    let m = VarMap::new(t);
    let f = match enc {
        Encoding::Pairwise => pairwise(t, p, &m),
        Encoding::Rays => rays(t, p, &m),
    };
    Ok((f, m))
}

/// Encoding for either kind of tree; ordered trees may realize their
/// rotation system or its mirror image.
pub fn build_cnf_any(t: &AnyTree, p: &PointSet, enc: Encoding) -> Result<(CnfFormula, VarMap)> {
    match t {
        AnyTree::Unordered(t) => build_cnf_with(t, p, enc),
        AnyTree::Ordered(t) => build_ordered_cnf_with(t, p, enc, false),
    }
}

/// Adds rotation clauses on top of the unordered encoding. One extra
/// variable picks between the rotation system and its reflection; with
/// `strict` it is fixed to the rotation system itself.
pub fn build_ordered_cnf_with(
    t: &OrderedTree,
    p: &PointSet,
    enc: Encoding,
    strict: bool,
) -> Result<(CnfFormula, VarMap)> {
    let (mut f, m) = build_cnf_with(t.base(), p, enc)?;
    rotation_clauses(&mut f, &m, t, p, strict);
    Ok((f, m))
}

fn injectivity(f: &mut CnfFormula, m: &VarMap) {
    let n = m.n();
    for i in 0..n {
        let alo: Vec<i32> = (0..n).map(|j| m.x(i, j)).collect();
        f.add_clause(&alo);
        for j in 0..n {
            for k in j + 1..n {
                f.add_clause(&[-m.x(i, j), -m.x(i, k)]);
            }
        }
    }
    for j in 0..n {
        for i in 0..n {
            for k in i + 1..n {
                f.add_clause(&[-m.x(i, j), -m.x(k, j)]);
            }
        }
    }
}

/// Literal true iff edge `e` leaves `v` horizontally.
fn h_at(m: &VarMap, e: usize, v: usize) -> i32 {
    if m.edges()[e].0 == v {
        m.y(e)
    } else {
        -m.y(e)
    }
}

fn pairwise(t: &Tree, p: &PointSet, m: &VarMap) -> CnfFormula {
    let n = t.len();
    let mut f = CnfFormula::new(m.var_count());
    injectivity(&mut f, m);
    let xy: Vec<(i32, i32)> = (0..n).map(|j| p.coords(j)).collect();

    // incident edges leaving through the same side
    for v in 0..n {
        let nb = t.neighbors(v);
        for (ia, &b) in nb.iter().enumerate() {
            for &c in &nb[ia + 1..] {
                let e = t.edge_index(v, b).expect("edge");
                let g = t.edge_index(v, c).expect("edge");
                for pv in 0..n {
                    for pb in (0..n).filter(|&q| q != pv) {
                        for pc in (0..n).filter(|&q| q != pv && q != pb) {
                            let base = [-m.x(v, pv), -m.x(b, pb), -m.x(c, pc)];
                            let (dxb, dxc) = (xy[pb].0 - xy[pv].0, xy[pc].0 - xy[pv].0);
                            let (dyb, dyc) = (xy[pb].1 - xy[pv].1, xy[pc].1 - xy[pv].1);
                            if dxb.signum() == dxc.signum() {
                                f.add_clause(&[base[0], base[1], base[2], -h_at(m, e, v), -h_at(m, g, v)]);
                            }
                            if dyb.signum() == dyc.signum() {
                                f.add_clause(&[base[0], base[1], base[2], h_at(m, e, v), h_at(m, g, v)]);
                            }
                        }
                    }
                }
            }
        }
    }

    // crossings, for every pair of edges
    let edges = t.edges();
    for e in 0..edges.len() {
        for g in e + 1..edges.len() {
            crossing_clauses(&mut f, m, &xy, e, g);
        }
    }
    f
}

/// Bit `2 * he + hg` of the mask stands for `y_e = he, y_g = hg`.
fn combo(he: bool, hg: bool) -> u8 {
    1 << (2 * he as u8 + hg as u8)
}

fn crossing_clauses(f: &mut CnfFormula, m: &VarMap, xy: &[(i32, i32)], e: usize, g: usize) {
    let n = m.n();
    let (a, b) = m.edges()[e];
    let (c, d) = m.edges()[g];
    let shared = [a, b].into_iter().find(|&v| v == c || v == d);
    // the vertices involved, shared one first
    let verts: Vec<usize> = match shared {
        Some(s) => {
            let mut vs = vec![s];
            vs.extend([a, b, c, d].into_iter().filter(|&v| v != s));
            vs
        }
        None => vec![a, b, c, d],
    };
    let k = verts.len();
    let mut pts = vec![0usize; k];
    let mut clause = Vec::with_capacity(6);
    // odometer over injective placements of the involved vertices
    fn rec(depth: usize, pts: &mut [usize], n: usize, visit: &mut dyn FnMut(&[usize])) {
        if depth == pts.len() {
            visit(pts);
            return;
        }
        for q in 0..n {
            if pts[..depth].contains(&q) {
                continue;
            }
            pts[depth] = q;
            rec(depth + 1, pts, n, visit);
        }
    }
    let pos = |v: usize, pts: &[usize]| pts[verts.iter().position(|&w| w == v).expect("involved vertex")];
    rec(0, &mut pts, n, &mut |pts: &[usize]| {
        let (pa, pb, pc, pd) = (xy[pos(a, pts)], xy[pos(b, pts)], xy[pos(c, pts)], xy[pos(d, pts)]);
        let shared_pt = shared.map(|s| xy[pos(s, pts)]);
        let mut forbidden = 0u8;
        let mut dont_care = 0u8;
        for he in [false, true] {
            let se = edge_segments(pa, pb, he).expect("general position");
            for hg in [false, true] {
                let sg = edge_segments(pc, pd, hg).expect("general position");
                if let Some(s) = shared {
                    // same departure at the shared vertex is the same-side family's job
                    let (oe, he_s) = if s == a { (pb, he) } else { (pa, !he) };
                    let (og, hg_s) = if s == c { (pd, hg) } else { (pc, !hg) };
                    let sp = shared_pt.expect("shared point");
                    if departure(sp, oe, he_s) == departure(sp, og, hg_s) {
                        dont_care |= combo(he, hg);
                        continue;
                    }
                }
                if edges_conflict(se, sg, shared_pt) {
                    forbidden |= combo(he, hg);
                }
            }
        }
        if forbidden == 0 {
            return;
        }
        clause.clear();
        clause.extend(verts.iter().zip(pts).map(|(&v, &q)| -m.x(v, q)));
        for cube in cover(forbidden, dont_care) {
            let mut c = clause.clone();
            if let Some(he) = cube.0 {
                c.push(if he { -m.y(e) } else { m.y(e) });
            }
            if let Some(hg) = cube.1 {
                c.push(if hg { -m.y(g) } else { m.y(g) });
            }
            f.add_clause(&c);
        }
    });
}

/// Few cubes over `(y_e, y_g)` covering all forbidden combinations and
/// nothing allowed. `None` leaves that variable free.
fn cover(forbidden: u8, dont_care: u8) -> Vec<(Option<bool>, Option<bool>)> {
    let ok = forbidden | dont_care;
    let mask = |c: (Option<bool>, Option<bool>)| {
        let mut bits = 0;
        for he in [false, true] {
            for hg in [false, true] {
                if c.0.is_none_or(|x| x == he) && c.1.is_none_or(|x| x == hg) {
                    bits |= combo(he, hg);
                }
            }
        }
        bits
    };
    if ok == 0b1111 {
        return vec![(None, None)];
    }
    let mut out = Vec::new();
    let mut covered = 0u8;
    for c in [(Some(false), None), (Some(true), None), (None, Some(false)), (None, Some(true))] {
        let bits = mask(c);
        if bits & ok == bits && bits & forbidden & !covered != 0 {
            out.push(c);
            covered |= bits;
        }
    }
    for he in [false, true] {
        for hg in [false, true] {
            let bit = combo(he, hg);
            if forbidden & bit != 0 && covered & bit == 0 {
                out.push((Some(he), Some(hg)));
                covered |= bit;
            }
        }
    }
    out
}

fn rays(t: &Tree, p: &PointSet, m: &VarMap) -> CnfFormula {
    let n = t.len();
    let xy: Vec<(i32, i32)> = (0..n).map(|j| p.coords(j)).collect();
    let mut at_row = vec![0usize; n];
    for (j, &(_, y)) in xy.iter().enumerate() {
        at_row[y as usize] = j;
    }
    let edges = t.edges();
    let mut next = m.var_count() as i32;
    let mut fresh = |count: usize| {
        let first = next + 1;
        next += count as i32;
        first
    };
    // hp(e, q): the horizontally-leaving end of e sits on q; vp likewise
    let hp0 = fresh(edges.len() * n);
    let vp0 = fresh(edges.len() * n);
    let hp = |e: usize, q: usize| hp0 + (e * n + q) as i32;
    let vp = |e: usize, q: usize| vp0 + (e * n + q) as i32;
    // z(q, r): some edge joins q and r and leaves q horizontally
    let z0 = fresh(n * (n - 1));
    let z = |q: usize, r: usize| z0 + (q * (n - 1) + if r < q { r } else { r - 1 }) as i32;
    // ray(q, d, k): q has a ray of length >= k in direction d (E, N, W, S)
    let last = n as i32 - 1;
    let max_len = |q: usize, d: usize| -> i32 {
        let (x, y) = xy[q];
        [last - x, last - y, x, y][d]
    };
    let mut ray0 = vec![0i32; 4 * n];
    for q in 0..n {
        for d in 0..4 {
            ray0[4 * q + d] = fresh(max_len(q, d) as usize);
        }
    }
    let ray = |q: usize, d: usize, k: i32| {
        debug_assert!(k >= 1 && k <= max_len(q, d));
        ray0[4 * q + d] + k - 1
    };

    let mut f = CnfFormula::new(next as usize);
    injectivity(&mut f, m);
    for (e, &(a, b)) in edges.iter().enumerate() {
        let y = m.y(e);
        for q in 0..n {
            f.add_clause(&[-m.x(a, q), -y, hp(e, q)]);
            f.add_clause(&[-m.x(b, q), y, hp(e, q)]);
            f.add_clause(&[-m.x(b, q), -y, vp(e, q)]);
            f.add_clause(&[-m.x(a, q), y, vp(e, q)]);
        }
        for q in 0..n {
            for r in (0..n).filter(|&r| r != q) {
                f.add_clause(&[-hp(e, q), -vp(e, r), z(q, r)]);
            }
        }
    }
    for q in 0..n {
        for r in (0..n).filter(|&r| r != q) {
            let (dx, dy) = (xy[r].0 - xy[q].0, xy[q].1 - xy[r].1);
            let dh = if dx > 0 { 0 } else { 2 };
            let dv = if dy > 0 { 1 } else { 3 };
            f.add_clause(&[-z(q, r), ray(q, dh, dx.abs())]);
            f.add_clause(&[-z(q, r), ray(r, dv, dy.abs())]);
        }
    }
    for q in 0..n {
        for d in 0..4 {
            for k in 2..=max_len(q, d) {
                f.add_clause(&[-ray(q, d, k), ray(q, d, k - 1)]);
            }
        }
    }
    // a horizontal and a vertical ray may share a grid node only as the
    // common end of both
    for y in 0..n as i32 {
        for x in 0..n as i32 {
            let s = x as usize;
            let q = at_row[y as usize];
            if q == s {
                continue;
            }
            let dh = if x > xy[q].0 { 0 } else { 2 };
            let dv = if y > xy[s].1 { 1 } else { 3 };
            let (a, b) = ((x - xy[q].0).abs(), (y - xy[s].1).abs());
            if a < max_len(q, dh) {
                f.add_clause(&[-ray(q, dh, a + 1), -ray(s, dv, b)]);
            }
            if b < max_len(s, dv) {
                f.add_clause(&[-ray(q, dh, a), -ray(s, dv, b + 1)]);
            }
        }
    }
    f
}

fn rotation_clauses(f: &mut CnfFormula, m: &VarMap, t: &OrderedTree, p: &PointSet, strict: bool) {
    let n = m.n();
    let edges = m.edges();
    let xy: Vec<(i32, i32)> = (0..n).map(|j| p.coords(j)).collect();
    let mirror = f.new_vars(1);
    if strict {
        f.add_clause(&[-mirror]);
    }
    let hubs: Vec<usize> = (0..n).filter(|&v| t.rotation(v).len() >= 3).collect();
    if hubs.is_empty() {
        return;
    }
    // right(e) / above(e): the larger endpoint lies right of / above the
    // smaller one
    let right0 = f.new_vars(edges.len());
    let above0 = f.new_vars(edges.len());
    for (e, &(a, b)) in edges.iter().enumerate() {
        for (var, axis) in [(right0 + e as i32, 0), (above0 + e as i32, 1)] {
            let c = |j: usize| if axis == 0 { xy[j].0 } else { xy[j].1 };
            for j in 0..n {
                let mut more = vec![-m.x(a, j), -var];
                more.extend((0..n).filter(|&k| c(k) > c(j)).map(|k| m.x(b, k)));
                f.add_clause(&more);
                let mut less = vec![-m.x(a, j), var];
                less.extend((0..n).filter(|&k| c(k) < c(j)).map(|k| m.x(b, k)));
                f.add_clause(&less);
            }
        }
    }
    for v in hubs {
        let rot = t.rotation(v);
        let k = rot.len();
        // literals (h, side) whose conjunction says edge v-u leaves v in
        // direction d (E, N, W, S)
        let dir_lits = |u: usize, d: usize| -> [i32; 2] {
            let e = t.base().edge_index(v, u).expect("edge");
            let h = h_at(m, e, v);
            let sign = if edges[e].0 == v { 1 } else { -1 };
            let (r, up) = (sign * (right0 + e as i32), sign * (above0 + e as i32));
            match d {
                0 => [h, r],
                1 => [-h, up],
                2 => [h, -r],
                _ => [-h, -up],
            }
        };
        let mut dirs = vec![0usize; k];
        loop {
            let distinct = (0..k).all(|i| (i + 1..k).all(|j| dirs[i] != dirs[j]));
            if distinct {
                let mut by_dir: Vec<usize> = (0..k).collect();
                by_dir.sort_by_key(|&i| dirs[i]);
                let seq: Vec<usize> = by_dir.iter().map(|&i| rot[i]).collect();
                let fwd = is_cyclic_shift(&seq, rot);
                let rev: Vec<usize> = rot.iter().rev().copied().collect();
                let bwd = is_cyclic_shift(&seq, &rev);
                if !(fwd && bwd) {
                    let mut clause: Vec<i32> = (0..k).flat_map(|i| dir_lits(rot[i], dirs[i])).map(|l| -l).collect();
                    match (fwd, bwd) {
                        (true, false) => clause.push(-mirror),
                        (false, true) => clause.push(mirror),
                        _ => {}
                    }
                    f.add_clause(&clause);
                }
            }
            let mut i = 0;
            while i < k && dirs[i] == 3 {
                dirs[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            dirs[i] += 1;
        }
    }
}

fn is_cyclic_shift(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && (0..b.len()).any(|s| (0..a.len()).all(|i| a[i] == b[(i + s) % b.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_shapes() {
        assert_eq!(cover(0b1111, 0), vec![(None, None)]);
        assert_eq!(cover(0b1100, 0), vec![(Some(true), None)]);
        assert_eq!(cover(0b1000, 0), vec![(Some(true), Some(true))]);
        assert_eq!(cover(0b1110, 0).len(), 2);
        assert_eq!(cover(0b0110, 0).len(), 2);
        assert_eq!(cover(0b0100, 0b1000), vec![(Some(true), None)]);
    }

    #[test]
    fn variable_counts() {
        let t = crate::trees::make_t13();
        let p = crate::geometry::StaircaseSpec::new(vec![2, 2, 2, 1, 2, 2, 2]).unwrap().points();
        let (f, m) = build_cnf(&t, &p).unwrap();
        assert_eq!(f.var_count(), 181);
        assert_eq!(m.var_count(), 181);
        let (g, _) = build_cnf_with(&t, &p, Encoding::Rays).unwrap();
        assert!(g.var_count() > 181);
    }
}
