//! CNF encoding of the embedding problem, DIMACS input/output, a built-in
//! solver, and decoding of models back into embeddings.

mod encode;
mod solver;

use std::fmt::Write as _;

use crate::embed::{validate, Embedding};
use crate::error::{parse_err, Error, Result};
use crate::geometry::PointSet;
use crate::trees::{AnyTree, Tree};

pub use encode::{build_cnf, build_cnf_any, build_cnf_with, build_ordered_cnf_with, Encoding, PAIRWISE_MAX_N};
pub use solver::{SolveResult, Solver, SolverStats};

/// Variable numbering: `x(i, j)` for vertex `i` on point `j`, then one
/// `y` per edge (true when the edge leaves its smaller endpoint
/// horizontally). Auxiliary variables of an encoding follow after.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl VarMap {
    pub fn new(t: &Tree) -> VarMap {
        VarMap { n: t.len(), edges: t.edges().to_vec() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn x(&self, i: usize, j: usize) -> i32 {
        (i * self.n + j + 1) as i32
    }

    /// Variable of edge number `e`.
    #[inline]
    pub fn y(&self, e: usize) -> i32 {
        (self.n * self.n + e + 1) as i32
    }

    /// Variable of the edge between `a` and `b`, if it exists.
    pub fn y_between(&self, a: usize, b: usize) -> Option<i32> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&e| e == key).map(|e| self.y(e))
    }

    /// Number of x and y variables, `n² + n - 1`.
    pub fn var_count(&self) -> usize {
        self.n * self.n + self.edges.len()
    }

    /// The sidecar text: `x i j -> var` and `y a b -> var` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let _ = writeln!(s, "x {i} {j} -> {}", self.x(i, j));
            }
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "y {a} {b} -> {}", self.y(e));
        }
        s
    }

    /// Parses a sidecar written by [`VarMap::to_text`]; the numbering must
    /// be the standard one.
    pub fn parse(text: &str) -> Result<VarMap> {
        let mut xs = Vec::new();
        let mut edges = Vec::new();
        let mut ys = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (lhs, var) = line.split_once("->").ok_or_else(|| parse_err(format!("`{line}` lacks `->`")))?;
            let var: i32 = var.trim().parse().map_err(|_| parse_err(format!("bad variable in `{line}`")))?;
            let parts: Vec<_> = lhs.split_whitespace().collect();
            let nums: Vec<usize> = parts[1..]
                .iter()
                .map(|s| s.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(format!("bad index in `{line}`")))?;
            match (parts.first().copied(), nums.as_slice()) {
                (Some("x"), &[i, j]) => xs.push((i, j, var)),
                (Some("y"), &[a, b]) => {
                    edges.push((a, b));
                    ys.push(var);
                }
                _ => return Err(parse_err(format!("unrecognized sidecar line `{line}`"))),
            }
        }
        let n = (xs.len() as f64).sqrt().round() as usize;
        let m = VarMap { n, edges };
        let standard = n * n == xs.len()
            && xs.iter().all(|&(i, j, v)| i < n && j < n && m.x(i, j) == v)
            && ys.iter().enumerate().all(|(e, &v)| m.y(e) == v);
        if !standard {
            return Err(parse_err("sidecar does not use the standard numbering"));
        }
        Ok(m)
    }
}

/// A CNF formula with clauses stored back to back.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    var_count: usize,
    lits: Vec<i32>,
    ends: Vec<usize>,
}

impl CnfFormula {
    pub fn new(var_count: usize) -> CnfFormula {
        CnfFormula { var_count, ..Default::default() }
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    /// Allocates `count` fresh variables and returns the first one.
    pub fn new_vars(&mut self, count: usize) -> i32 {
        let first = self.var_count as i32 + 1;
        self.var_count += count;
        first
    }

    pub fn num_clauses(&self) -> usize {
        self.ends.len()
    }

    /// Appends a nonempty clause over existing variables.
    pub fn add_clause(&mut self, clause: &[i32]) {
        assert!(!clause.is_empty(), "empty clause");
        assert!(
            clause.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.var_count),
            "literal out of range in {clause:?}"
        );
        self.lits.extend_from_slice(clause);
        self.ends.push(self.lits.len());
    }

    pub fn clause(&self, k: usize) -> &[i32] {
        let start = if k == 0 { 0 } else { self.ends[k - 1] };
        &self.lits[start..self.ends[k]]
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[i32]> + '_ {
        (0..self.ends.len()).map(move |k| self.clause(k))
    }

    /// Whether `a` satisfies every clause.
    pub fn check(&self, a: &Assignment) -> bool {
        a.len() >= self.var_count && self.clauses().all(|c| c.iter().any(|&l| a.lit(l)))
    }

    /// Standard DIMACS text: `p cnf V C`, then one 0-terminated clause per
    /// line.
    pub fn to_dimacs(&self) -> String {
        let mut s = String::with_capacity(self.lits.len() * 6 + self.ends.len() * 2 + 32);
        self.write_dimacs(&mut s).expect("writing to a String");
        s
    }

    pub fn write_dimacs<W: std::fmt::Write>(&self, out: &mut W) -> std::fmt::Result {
        writeln!(out, "p cnf {} {}", self.var_count, self.ends.len())?;
        let mut buf = itoa_buf();
        for c in self.clauses() {
            for &l in c {
                out.write_str(fmt_int(&mut buf, l))?;
                out.write_char(' ')?;
            }
            out.write_str("0\n")?;
        }
        Ok(())
    }

    /// Writes DIMACS to any byte sink, for formulas too large to hold as
    /// one string.
    pub fn write_dimacs_io<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        use std::io::Write;
        let mut out = std::io::BufWriter::new(out);
        writeln!(out, "p cnf {} {}", self.var_count, self.ends.len())?;
        let mut buf = itoa_buf();
        for c in self.clauses() {
            for &l in c {
                out.write_all(fmt_int(&mut buf, l).as_bytes())?;
                out.write_all(b" ")?;
            }
            out.write_all(b"0\n")?;
        }
        out.flush()
    }

    /// Parses DIMACS; comment lines (`c ...`) are skipped and clauses may
    /// span lines.
    pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
        let mut header = None;
        let mut f = CnfFormula::default();
        let mut current = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<_> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["cnf", v, c] => {
                        let v: usize = v.parse().map_err(|_| parse_err("bad variable count"))?;
                        let c: usize = c.parse().map_err(|_| parse_err("bad clause count"))?;
                        header = Some((v, c));
                        f.var_count = v;
                    }
                    _ => return Err(parse_err(format!("bad header `{line}`"))),
                }
                continue;
            }
            if header.is_none() {
                return Err(parse_err("clause before `p cnf` header"));
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| parse_err(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    if current.is_empty() {
                        return Err(parse_err("empty clause"));
                    }
                    if current.iter().any(|&l: &i32| l.unsigned_abs() as usize > f.var_count) {
                        return Err(parse_err("literal exceeds declared variable count"));
                    }
                    f.lits.append(&mut current);
                    f.ends.push(f.lits.len());
                } else {
                    current.push(l);
                }
            }
        }
        let (_, c) = header.ok_or_else(|| parse_err("missing `p cnf` header"))?;
        if !current.is_empty() {
            return Err(parse_err("last clause is not 0-terminated"));
        }
        if c != f.ends.len() {
            return Err(parse_err(format!("header announces {c} clauses, found {}", f.ends.len())));
        }
        Ok(f)
    }
}

fn itoa_buf() -> [u8; 12] {
    [0; 12]
}

fn fmt_int(buf: &mut [u8; 12], v: i32) -> &str {
    let mut i = buf.len();
    let neg = v < 0;
    let mut u = v.unsigned_abs();
    loop {
        i -= 1;
        buf[i] = b'0' + (u % 10) as u8;
        u /= 10;
        if u == 0 {
            break;
        }
    }
    if neg {
        i -= 1;
        buf[i] = b'-';
    }
    std::str::from_utf8(&buf[i..]).expect("ascii digits")
}

/// A total truth assignment; variable `v` (1-based) is `values[v - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn lit(&self, l: i32) -> bool {
        self.value(l.unsigned_abs() as usize) == (l > 0)
    }

    /// Pads with `false` up to `var_count` variables.
    pub fn extended(mut self, var_count: usize) -> Assignment {
        if self.values.len() < var_count {
            self.values.resize(var_count, false);
        }
        self
    }

    /// Parses a solver model: `v`-lines of a competition-style output, or
    /// bare literal lists.
    pub fn parse_model(text: &str, var_count: usize) -> Result<Assignment> {
        let mut values = vec![false; var_count];
        for line in text.lines().map(str::trim) {
            let body = match line.strip_prefix('v') {
                Some(rest) => rest,
                None if line.starts_with('s') || line.starts_with('c') || line.is_empty() => continue,
                None => line,
            };
            for tok in body.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| parse_err(format!("bad literal `{tok}`")))?;
                let v = l.unsigned_abs() as usize;
                if v == 0 {
                    continue;
                }
                if v > var_count {
                    return Err(parse_err(format!("literal {l} out of range")));
                }
                values[v - 1] = l > 0;
            }
        }
        Ok(Assignment { values })
    }
}

/// Solves with the built-in solver; SAT answers are re-checked against
/// every clause.
pub fn solve(f: &CnfFormula) -> SolveResult {
    let res = Solver::from_formula(f).solve();
    if let SolveResult::Sat(a) = &res {
        assert!(f.check(a), "solver returned a non-model");
    }
    res
}

/// Reads the embedding off the x and y variables of a model.
pub fn decode(a: &Assignment, m: &VarMap) -> Result<Embedding> {
    let n = m.n();
    if a.len() < m.var_count() {
        return Err(Error::Decode(format!("assignment covers {} of {} variables", a.len(), m.var_count())));
    }
    let mut placement = Vec::with_capacity(n);
    for i in 0..n {
        let on: Vec<usize> = (0..n).filter(|&j| a.lit(m.x(i, j))).collect();
        match on.as_slice() {
            &[j] => placement.push(j),
            _ => return Err(Error::Decode(format!("vertex {i} is on points {on:?}"))),
        }
    }
    let horizontal = (0..m.edges().len()).map(|e| a.lit(m.y(e))).collect();
    Ok(Embedding { placement, horizontal })
}

/// All embeddings, one per model projected onto the x and y variables;
/// each model found is blocked before re-solving.
pub fn enumerate_solutions(f: &CnfFormula, m: &VarMap) -> SolutionIter {
    SolutionIter { solver: Some(Solver::from_formula(f)), map: m.clone() }
}

pub struct SolutionIter {
    solver: Option<Solver>,
    map: VarMap,
}

impl Iterator for SolutionIter {
    type Item = Result<Embedding>;

    fn next(&mut self) -> Option<Result<Embedding>> {
        let solver = self.solver.as_mut()?;
        match solver.solve() {
            SolveResult::Sat(a) => {
                let m = &self.map;
                let mut block: Vec<i32> = (0..m.n())
                    .flat_map(|i| (0..m.n()).map(move |j| (i, j)))
                    .map(|(i, j)| m.x(i, j))
                    .filter(|&x| a.lit(x))
                    .map(|x| -x)
                    .collect();
                block.extend((0..m.edges().len()).map(|e| if a.lit(m.y(e)) { -m.y(e) } else { m.y(e) }));
                let decoded = decode(&a, m);
                if block.is_empty() || !solver.add_clause(&block) {
                    self.solver = None;
                }
                Some(decoded)
            }
            _ => {
                self.solver = None;
                None
            }
        }
    }
}

/// Encodes, solves, and checks the decoded model with the validator.
/// `Ok(None)` means UNSAT.
pub fn sat_embed(t: &Tree, p: &PointSet) -> Result<Option<Embedding>> {
    sat_embed_any(&AnyTree::Unordered(t.clone()), p, Encoding::Pairwise)
}

/// As [`sat_embed`] for either kind of tree and a chosen encoding.
pub fn sat_embed_any(t: &AnyTree, p: &PointSet, enc: Encoding) -> Result<Option<Embedding>> {
    let (f, m) = build_cnf_any(t, p, enc)?;
    match solve(&f) {
        SolveResult::Sat(a) => {
            let e = decode(&a, &m)?;
            if !validate(t, p, &e)?.is_valid() {
                return Err(Error::Decode("model decodes to an invalid embedding".into()));
            }
            Ok(Some(e))
        }
        SolveResult::Unsat => Ok(None),
        SolveResult::Unknown => unreachable!("no conflict budget set"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_format() {
        let mut f = CnfFormula::new(2);
        f.add_clause(&[1, -2]);
        assert_eq!(f.to_dimacs(), "p cnf 2 1\n1 -2 0\n");
        assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        let mut bytes = Vec::new();
        f.write_dimacs_io(&mut bytes).unwrap();
        assert_eq!(bytes, f.to_dimacs().as_bytes());
    }

    #[test]
    fn dimacs_parse_errors() {
        assert!(CnfFormula::parse_dimacs("1 2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 2 1\n1 2\n").is_err());
        let f = CnfFormula::parse_dimacs("c hello\np cnf 3 2\n1 -3\n 2 0 -1 0\n").unwrap();
        assert_eq!(f.clause(0), &[1, -3, 2]);
        assert_eq!(f.clause(1), &[-1]);
    }

    #[test]
    fn int_formatting() {
        let mut b = itoa_buf();
        for v in [0, 7, -7, 10, -123456, i32::MAX, -i32::MAX] {
            assert_eq!(fmt_int(&mut b, v), v.to_string());
        }
    }

    #[test]
    fn varmap_numbering() {
        let t = crate::trees::make_t13();
        let m = VarMap::new(&t);
        assert_eq!(m.var_count(), 181);
        assert_eq!(m.x(0, 0), 1);
        assert_eq!(m.x(12, 12), 169);
        assert_eq!(m.y(0), 170);
        assert_eq!(m.y(11), 181);
        assert_eq!(VarMap::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn model_parsing() {
        let a = Assignment::parse_model("s SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap();
        assert_eq!(a, Assignment::new(vec![true, false, true]));
        assert!(Assignment::parse_model("v 4 0", 3).is_err());
    }
}
