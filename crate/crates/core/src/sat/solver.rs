//! A compact CDCL solver: two watched literals, first-UIP learning with
//! local minimization, VSIDS on a binary heap, phase saving, Luby
//! restarts and LBD-based deletion of learnt clauses. Everything is
//! deterministic: no randomness, ties broken by variable index.

use super::{Assignment, CnfFormula};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        let v = l.unsigned_abs() - 1;
        Lit(2 * v + (l < 0) as u32)
    }

    #[inline]
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    fn neg(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }
}

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

#[derive(Clone)]
struct ClauseHeader {
    start: u32,
    len: u32,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

/// Outcome of [`Solver::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
    /// The conflict budget ran out.
    Unknown,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnt: u64,
}

pub struct Solver {
    num_vars: usize,
    arena: Vec<Lit>,
    headers: Vec<ClauseHeader>,
    watches: Vec<Vec<Watcher>>,
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    inconsistent: bool,
    num_learnts: usize,
    max_learnts: f64,
    conflict_budget: Option<u64>,
    pub stats: SolverStats,
}

impl Solver {
    pub fn new(num_vars: usize) -> Solver {
        let mut s = Solver {
            num_vars: 0,
            arena: Vec::new(),
            headers: Vec::new(),
            watches: Vec::new(),
            value: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            inconsistent: false,
            num_learnts: 0,
            max_learnts: 0.0,
            conflict_budget: None,
            stats: SolverStats::default(),
        };
        s.reserve_vars(num_vars);
        s
    }

    pub fn from_formula(f: &CnfFormula) -> Solver {
        let mut s = Solver::new(f.var_count());
        for c in f.clauses() {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Stop with [`SolveResult::Unknown`] after this many conflicts per
    /// call to [`Solver::solve`].
    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.conflict_budget = budget;
    }

    fn reserve_vars(&mut self, n: usize) {
        while self.num_vars < n {
            let v = self.num_vars;
            self.num_vars += 1;
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.value.push(UNDEF);
            self.level.push(0);
            self.reason.push(NO_REASON);
            self.activity.push(0.0);
            self.phase.push(false);
            self.seen.push(false);
            self.heap.insert(v, &self.activity);
        }
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.value[l.var()];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ (l.is_neg() as u8)
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause in DIMACS literals. Allowed between calls to
    /// [`Solver::solve`]; returns false once the formula is known UNSAT.
    pub fn add_clause(&mut self, clause: &[i32]) -> bool {
        if self.inconsistent {
            return false;
        }
        self.cancel_until(0);
        let max_var = clause.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        self.reserve_vars(max_var);
        let mut lits: Vec<Lit> = clause.iter().map(|&l| Lit::from_dimacs(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        // drop clauses satisfied at the root and false literals
        let mut kept = Vec::with_capacity(lits.len());
        for (i, &l) in lits.iter().enumerate() {
            if i + 1 < lits.len() && lits[i + 1] == l.neg() {
                return true;
            }
            match self.lit_value(l) {
                1 => return true,
                0 => {}
                _ => kept.push(l),
            }
        }
        match kept.len() {
            0 => {
                self.inconsistent = true;
                false
            }
            1 => {
                self.enqueue(kept[0], NO_REASON);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
                !self.inconsistent
            }
            _ => {
                self.attach(&kept, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: &[Lit], learnt: bool, lbd: u32) -> u32 {
        let cref = self.headers.len() as u32;
        self.headers.push(ClauseHeader {
            start: self.arena.len() as u32,
            len: lits.len() as u32,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        self.arena.extend_from_slice(lits);
        self.watches[lits[0].neg().idx()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].neg().idx()].push(Watcher { cref, blocker: lits[0] });
        if learnt {
            self.num_learnts += 1;
        }
        cref
    }

    #[inline]
    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        self.value[v] = (!l.is_neg()) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if any.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.neg();
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let (mut i, mut j) = (0, 0);
            'watch: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let h = &self.headers[w.cref as usize];
                if h.deleted {
                    continue;
                }
                let start = h.start as usize;
                let len = h.len as usize;
                if self.arena[start] == false_lit {
                    self.arena.swap(start, start + 1);
                }
                let first = self.arena[start];
                if first != w.blocker && self.lit_value(first) == 1 {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                for k in 2..len {
                    let l = self.arena[start + k];
                    if self.lit_value(l) != 0 {
                        self.arena.swap(start + 1, start + k);
                        self.watches[l.neg().idx()].push(Watcher { cref: w.cref, blocker: first });
                        continue 'watch;
                    }
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if self.lit_value(first) == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn clause_lits(&self, cref: u32) -> &[Lit] {
        let h = &self.headers[cref as usize];
        &self.arena[h.start as usize..(h.start + h.len) as usize]
    }

    /// First-UIP conflict analysis; returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            self.bump_clause(confl);
            let h = &self.headers[confl as usize];
            let (start, len) = (h.start as usize, h.len as usize);
            let skip = p.is_some() as usize;
            for k in skip..len {
                let q = self.arena[start + k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            confl = self.reason[pl.var()];
            self.seen[pl.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = p.expect("conflict has a UIP").neg();

        // drop literals implied by the rest of the clause
        let mut keep = vec![learnt[0]];
        for &l in &learnt[1..] {
            let r = self.reason[l.var()];
            let redundant = r != NO_REASON
                && self
                    .clause_lits(r)
                    .iter()
                    .all(|q| q.var() == l.var() || self.seen[q.var()] || self.level[q.var()] == 0);
            if !redundant {
                keep.push(l);
            }
        }
        for &l in &learnt {
            self.seen[l.var()] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()]
        };
        (learnt, bt)
    }

    fn lbd(&self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let h = &mut self.headers[cref as usize];
        if !h.learnt {
            return;
        }
        h.activity += self.cla_inc;
        if h.activity > 1e20 {
            for h in &mut self.headers {
                h.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v] = !l.is_neg();
            self.value[v] = UNDEF;
            self.reason[v] = NO_REASON;
            if !self.heap.contains(v) {
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                return Some(Lit(2 * v as u32 + (!self.phase[v]) as u32));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let first = self.clause_lits(cref)[0];
        self.lit_value(first) == 1 && self.reason[first.var()] == cref
    }

    /// Deletes the worse half of the learnt clauses (high LBD, low
    /// activity), sparing reasons and glue clauses.
    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = (0..self.headers.len() as u32)
            .filter(|&c| {
                let h = &self.headers[c as usize];
                h.learnt && !h.deleted && h.lbd > 2
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let (ha, hb) = (&self.headers[a as usize], &self.headers[b as usize]);
            hb.lbd.cmp(&ha.lbd).then(ha.activity.total_cmp(&hb.activity)).then(a.cmp(&b))
        });
        let target = cands.len() / 2;
        let mut removed = 0;
        for &c in &cands {
            if removed >= target {
                break;
            }
            if !self.locked(c) {
                self.headers[c as usize].deleted = true;
                self.num_learnts -= 1;
                removed += 1;
            }
        }
        for ws in &mut self.watches {
            ws.retain(|w| !self.headers[w.cref as usize].deleted);
        }
        self.compact();
    }

    /// Rebuilds the arena without deleted clauses once they dominate it.
    fn compact(&mut self) {
        let dead: usize = self.headers.iter().filter(|h| h.deleted).map(|h| h.len as usize).sum();
        if dead * 2 < self.arena.len() {
            return;
        }
        let mut remap = vec![u32::MAX; self.headers.len()];
        let mut arena = Vec::with_capacity(self.arena.len() - dead);
        let mut headers = Vec::with_capacity(self.headers.len());
        for (i, h) in self.headers.iter().enumerate() {
            if h.deleted {
                continue;
            }
            remap[i] = headers.len() as u32;
            let start = arena.len() as u32;
            arena.extend_from_slice(&self.arena[h.start as usize..(h.start + h.len) as usize]);
            headers.push(ClauseHeader { start, ..h.clone() });
        }
        self.arena = arena;
        self.headers = headers;
        for ws in &mut self.watches {
            for w in ws.iter_mut() {
                w.cref = remap[w.cref as usize];
            }
        }
        for r in &mut self.reason {
            if *r != NO_REASON {
                *r = remap[*r as usize];
            }
        }
    }

    /// Runs the search. The solver stays usable: more clauses may be added
    /// and `solve` called again.
    pub fn solve(&mut self) -> SolveResult {
        if self.inconsistent {
            return SolveResult::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.inconsistent = true;
            return SolveResult::Unsat;
        }
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.headers.len() as f64 / 3.0).max(5000.0);
        }
        let start_conflicts = self.stats.conflicts;
        let mut restart_idx = 0u32;
        loop {
            let limit = 100 * luby(restart_idx);
            restart_idx += 1;
            let mut local = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    local += 1;
                    if self.decision_level() == 0 {
                        self.inconsistent = true;
                        return SolveResult::Unsat;
                    }
                    let (learnt, bt) = self.analyze(confl);
                    self.cancel_until(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let lbd = self.lbd(&learnt);
                        let cref = self.attach(&learnt, true, lbd);
                        self.bump_clause(cref);
                        self.enqueue(learnt[0], cref);
                    }
                    self.stats.learnt += 1;
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                    if let Some(b) = self.conflict_budget {
                        if self.stats.conflicts - start_conflicts >= b {
                            self.cancel_until(0);
                            return SolveResult::Unknown;
                        }
                    }
                } else {
                    if local >= limit {
                        self.stats.restarts += 1;
                        self.cancel_until(0);
                        break;
                    }
                    if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                        self.reduce_db();
                        self.max_learnts *= 1.1;
                    }
                    match self.pick_branch() {
                        None => {
                            let values = self.value.iter().map(|&v| v == 1).collect();
                            self.cancel_until(0);
                            return SolveResult::Sat(Assignment::new(values));
                        }
                        Some(l) => {
                            self.stats.decisions += 1;
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, NO_REASON);
                        }
                    }
                }
            }
        }
    }
}

fn luby(mut i: u32) -> u64 {
    // position i (0-based) of 1,1,2,1,1,2,4,...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i as u64 {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size as u32;
    }
    1 << seq
}

/// Max-heap of variables keyed by activity, ties to the smaller index.
#[derive(Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

impl VarHeap {
    const ABSENT: usize = usize::MAX;

    fn better(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        v < self.pos.len() && self.pos[v] != Self::ABSENT
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.pos.len() <= v {
            self.pos.resize(v + 1, Self::ABSENT);
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.pos[top] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(v, self.heap[parent], act) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(self.heap[r], self.heap[l], act) { r } else { l };
            if !Self::better(self.heap[c], v, act) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_clauses(n: usize, clauses: &[&[i32]]) -> SolveResult {
        let mut s = Solver::new(n);
        for c in clauses {
            s.add_clause(c);
        }
        s.solve()
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(solve_clauses(0, &[]), SolveResult::Sat(Assignment::new(vec![])));
        assert_eq!(solve_clauses(1, &[&[1], &[-1]]), SolveResult::Unsat);
        assert!(solve_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2]]).is_sat());
        assert_eq!(solve_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]), SolveResult::Unsat);
    }

    fn pigeonhole(holes: usize) -> Vec<Vec<i32>> {
        let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
        let mut cls = Vec::new();
        for p in 0..=holes {
            cls.push((0..holes).map(|h| var(p, h)).collect());
        }
        for h in 0..holes {
            for p in 0..=holes {
                for q in p + 1..=holes {
                    cls.push(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        cls
    }

    #[test]
    fn pigeonhole_unsat() {
        for holes in 1..=6 {
            let cls = pigeonhole(holes);
            let mut s = Solver::new((holes + 1) * holes);
            for c in &cls {
                s.add_clause(c);
            }
            assert_eq!(s.solve(), SolveResult::Unsat, "php {holes}");
        }
    }

    #[test]
    fn incremental_blocking_counts_models() {
        // x1 xor x2 xor x3 has 4 models
        let mut s = Solver::new(3);
        for c in [[1, 2, 3], [1, -2, -3], [-1, 2, -3], [-1, -2, 3]] {
            s.add_clause(&c);
        }
        let mut count = 0;
        while let SolveResult::Sat(a) = s.solve() {
            count += 1;
            let block: Vec<i32> = (1..=3).map(|v| if a.value(v) { -(v as i32) } else { v as i32 }).collect();
            s.add_clause(&block);
        }
        assert_eq!(count, 4);
    }
}
