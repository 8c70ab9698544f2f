//! Exhaustive sweeps over all (tree, point set) pairs of one size,
//! verification of the shipped counterexamples, and cross-checks between
//! the backtracker and the SAT route.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{box_lemma_holds, embed, embed_ordered, validate, EmbedConfig, SearchOutcome, Searcher};
use crate::error::{invalid, Error, Result};
use crate::geometry::{enumerate_canonical_pointsets, CanonicalPointSets, PointSet, SymmetryGroup, SymmetryOp};
use crate::registry::{is_expected_failure, Expected, InstanceRecord, Tier};
use crate::sat::{build_cnf_any, decode, enumerate_solutions, solve, Encoding, SolveResult, PAIRWISE_MAX_N};
use crate::trees::{enumerate_ordered_trees, enumerate_trees, AnyTree, MAX_DEGREE};

pub const SCHEMA_VERSION: u32 = 1;

/// Sweeps above this size are always labelled sampled.
pub const EXHAUSTIVE_LIMIT: usize = 11;

const BATCH: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Unordered,
    Ordered,
}

impl Mode {
    /// Ordered trees fix a cyclic orientation, so only rotations of the
    /// point set may be identified.
    pub fn group(self) -> SymmetryGroup {
        match self {
            Mode::Unordered => SymmetryGroup::Full8,
            Mode::Ordered => SymmetryGroup::Rotations4,
        }
    }

    /// All trees of this kind on `n` vertices (ordered: only those with
    /// more than one rotation class).
    pub fn trees(self, n: usize) -> Vec<AnyTree> {
        match self {
            Mode::Unordered => enumerate_trees(n, MAX_DEGREE).into_iter().map(AnyTree::Unordered).collect(),
            Mode::Ordered => enumerate_ordered_trees(n, MAX_DEGREE, true).into_iter().map(AnyTree::Ordered).collect(),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "unordered" => Ok(Mode::Unordered),
            "ordered" => Ok(Mode::Ordered),
            _ => Err(invalid(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Unordered => "unordered",
            Mode::Ordered => "ordered",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    Exhaustive,
    Sampled,
}

/// Canonical code of a tree as a string: nested parentheses, for ordered
/// trees in rotation order.
pub fn tree_code(t: &AnyTree) -> String {
    match t {
        AnyTree::Unordered(t) => t.canonical_code(),
        AnyTree::Ordered(t) => t.canonical_code().iter().map(|&b| if b == 1 { '(' } else { ')' }).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub tree: String,
    pub pointset: String,
    /// Matches a shipped instance expected to be non-embeddable.
    pub expected: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxLemmaStats {
    pub staircases: u64,
    pub embeddings: u64,
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildInfo {
    pub version: String,
    pub git_describe: String,
    pub os: String,
    pub arch: String,
    pub cpus: usize,
}

impl BuildInfo {
    pub fn current() -> BuildInfo {
        BuildInfo {
            version: env!("CARGO_PKG_VERSION").into(),
            git_describe: env!("LSHAPE_GIT_DESCRIBE").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            cpus: std::thread::available_parallelism().map_or(1, |c| c.get()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 picks one per CPU.
    pub jobs: usize,
    /// Test this many random point sets (from the seed) instead of all.
    pub sample: Option<(usize, u64)>,
    /// Re-check the box lemma on every embedding found on a staircase.
    pub box_lemma: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub n: usize,
    pub mode: Mode,
    pub coverage: Coverage,
    pub pointsets: u64,
    pub trees: u64,
    pub pairs: u64,
    /// Sorted; identical for every worker count.
    pub failures: Vec<Failure>,
    pub unexpected_failures: usize,
    pub box_lemma: Option<BoxLemmaStats>,
    pub seconds: f64,
    pub jobs: usize,
    pub build: BuildInfo,
}

/// The part of a report that must not depend on timing, worker count or
/// machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepOutcome {
    pub n: usize,
    pub mode: Mode,
    pub coverage: Coverage,
    pub pointsets: u64,
    pub trees: u64,
    pub failures: Vec<Failure>,
    pub box_lemma: Option<BoxLemmaStats>,
}

impl SweepReport {
    pub fn outcome(&self) -> SweepOutcome {
        SweepOutcome {
            n: self.n,
            mode: self.mode,
            coverage: self.coverage,
            pointsets: self.pointsets,
            trees: self.trees,
            failures: self.failures.clone(),
            box_lemma: self.box_lemma,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }
}

#[derive(Default)]
struct Tally {
    pointsets: u64,
    failures: Vec<Failure>,
    lemma: BoxLemmaStats,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.pointsets += other.pointsets;
        self.failures.extend(other.failures);
        self.lemma.staircases += other.lemma.staircases;
        self.lemma.embeddings += other.lemma.embeddings;
        self.lemma.violations += other.lemma.violations;
        self
    }
}

struct Worker<'a> {
    trees: &'a [AnyTree],
    codes: &'a [String],
    searchers: Vec<Searcher<'a>>,
}

impl<'a> Worker<'a> {
    fn new(trees: &'a [AnyTree], codes: &'a [String], n: usize) -> Worker<'a> {
        let start = PointSet::identity(n);
        let cfg = EmbedConfig::default();
        let searchers = trees
            .iter()
            .map(|t| {
                let mut s = match t {
                    AnyTree::Unordered(t) => Searcher::new(t, &start, &cfg),
                    AnyTree::Ordered(t) => Searcher::new_ordered(t, &start, &cfg),
                }
                .expect("sizes agree");
                s.set_warm_start(true);
                s
            })
            .collect();
        Worker { trees, codes, searchers }
    }

    fn run(&mut self, batch: &[PointSet], box_lemma: bool) -> Tally {
        let mut tally = Tally::default();
        for p in batch {
            tally.pointsets += 1;
            // canonical representatives are rarely drawn as staircases
            // themselves, so look for a staircase image; non-strict
            // embeddability is invariant under all eight symmetries
            let stair = if box_lemma {
                SymmetryOp::ALL.into_iter().map(|g| p.apply(g)).find_map(|q| q.staircase_boxes().map(|b| (q, b)))
            } else {
                None
            };
            tally.lemma.staircases += stair.is_some() as u64;
            for (i, s) in self.searchers.iter_mut().enumerate() {
                s.set_pointset(p).expect("sizes agree");
                if !s.decide().expect("no node limit") {
                    tally.failures.push(Failure {
                        tree: self.codes[i].clone(),
                        pointset: p.to_string(),
                        expected: is_expected_failure(&self.trees[i], p),
                    });
                    continue;
                }
                if let Some((q, spec)) = &stair {
                    s.set_pointset(q).expect("sizes agree");
                    let SearchOutcome::Found(e) = s.find() else { unreachable!("embeddability is symmetric") };
                    tally.lemma.embeddings += 1;
                    if !box_lemma_holds(self.trees[i].base(), spec, &e) {
                        tally.lemma.violations += 1;
                    }
                }
            }
        }
        tally
    }
}

struct Batches(CanonicalPointSets);

impl Iterator for Batches {
    type Item = Vec<PointSet>;

    fn next(&mut self) -> Option<Vec<PointSet>> {
        let batch: Vec<PointSet> = self.0.by_ref().take(BATCH).collect();
        (!batch.is_empty()).then_some(batch)
    }
}

/// Distinct canonical representatives of `count` seeded random
/// permutations, sorted.
pub fn sample_pointsets(n: usize, group: SymmetryGroup, count: usize, seed: u64) -> Vec<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<PointSet> = (0..count).map(|_| random_pointset(n, &mut rng).canonical(group)).collect();
    out.sort();
    out.dedup();
    out
}

fn random_pointset(n: usize, rng: &mut ChaCha8Rng) -> PointSet {
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    PointSet::from_slice(&perm).expect("a permutation")
}

/// Tests every canonical point set of size `n` against every tree of the
/// given kind. Work is split into batches of consecutive point sets; each
/// worker keeps one warm-started searcher per tree.
pub fn exhaustive_verify(n: usize, mode: Mode, opts: &SweepOptions) -> Result<SweepReport> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let start = Instant::now();
    let trees = mode.trees(n);
    let codes: Vec<String> = trees.iter().map(tree_code).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let jobs = pool.current_num_threads();
    let batches: Box<dyn Iterator<Item = Vec<PointSet>> + Send> = match opts.sample {
        Some((count, seed)) => {
            let sample = sample_pointsets(n, mode.group(), count, seed);
            Box::new(sample.chunks(BATCH).map(<[PointSet]>::to_vec).collect::<Vec<_>>().into_iter())
        }
        None => Box::new(Batches(enumerate_canonical_pointsets(n, mode.group()))),
    };
    let tally = pool.install(|| {
        batches
            .par_bridge()
            .map_init(|| Worker::new(&trees, &codes, n), |w, batch| w.run(&batch, opts.box_lemma))
            .reduce(Tally::default, Tally::merge)
    });
    let mut failures = tally.failures;
    failures.sort();
    let coverage = if opts.sample.is_some() || n > EXHAUSTIVE_LIMIT { Coverage::Sampled } else { Coverage::Exhaustive };
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        n,
        mode,
        coverage,
        pointsets: tally.pointsets,
        trees: trees.len() as u64,
        pairs: tally.pointsets * trees.len() as u64,
        unexpected_failures: failures.iter().filter(|f| !f.expected).count(),
        failures,
        box_lemma: opts.box_lemma.then_some(tally.lemma),
        seconds: start.elapsed().as_secs_f64(),
        jobs,
        build: BuildInfo::current(),
    })
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Instances of a higher tier are skipped.
    pub max_tier: Option<Tier>,
    pub encoding: Encoding,
    /// Write `<name>.cnf` and `<name>.map` for every instance here,
    /// skipped ones included.
    pub export_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceVerdict {
    pub name: String,
    pub n: usize,
    pub tier: Tier,
    pub expected: Expected,
    pub skipped: bool,
    /// Embeddable according to the backtracker.
    pub search: Option<bool>,
    /// Satisfiable according to the built-in solver.
    pub sat: Option<bool>,
    pub search_seconds: f64,
    pub sat_seconds: f64,
    /// Encoding actually used; large instances fall back to rays.
    pub encoding: Encoding,
    pub variables: usize,
    pub clauses: usize,
    pub exported: Option<String>,
}

impl InstanceVerdict {
    /// Decided, and the verdict is the expected one.
    pub fn as_expected(&self) -> bool {
        match (self.search, self.expected) {
            (Some(e), Expected::Embeddable) => e,
            (Some(e), Expected::NonEmbeddable) => !e,
            (Some(_), Expected::Unknown) => true,
            (None, _) => false,
        }
    }
}

/// File stem for an instance name: `/` becomes `_`.
pub fn export_stem(name: &str) -> String {
    name.replace('/', "_")
}

/// Runs the backtracker and the SAT route on each instance; any
/// disagreement between the two is an error.
pub fn verify_counterexamples(records: &[InstanceRecord], opts: &VerifyOptions) -> Result<Vec<InstanceVerdict>> {
    let max_tier = opts.max_tier.unwrap_or(Tier::Extended);
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        let skipped = r.tier > max_tier;
        let encoding =
            if opts.encoding == Encoding::Pairwise && r.n() > PAIRWISE_MAX_N { Encoding::Rays } else { opts.encoding };
        let mut v = InstanceVerdict {
            name: r.name.clone(),
            n: r.n(),
            tier: r.tier,
            expected: r.expected,
            skipped,
            search: None,
            sat: None,
            search_seconds: 0.0,
            sat_seconds: 0.0,
            encoding,
            variables: 0,
            clauses: 0,
            exported: None,
        };
        if skipped && opts.export_dir.is_none() {
            out.push(v);
            continue;
        }
        let (f, m) = build_cnf_any(&r.tree, &r.pointset, encoding)?;
        v.variables = f.var_count();
        v.clauses = f.num_clauses();
        if let Some(dir) = &opts.export_dir {
            let stem = dir.join(export_stem(&r.name));
            let cnf = stem.with_extension("cnf");
            let io = |e: std::io::Error| invalid(format!("writing {}: {e}", cnf.display()));
            f.write_dimacs_io(std::fs::File::create(&cnf).map_err(io)?).map_err(io)?;
            std::fs::write(stem.with_extension("map"), m.to_text()).map_err(io)?;
            v.exported = Some(cnf.display().to_string());
        }
        if skipped {
            out.push(v);
            continue;
        }

        let t0 = Instant::now();
        let mut cfg = EmbedConfig::for_pointset(&r.pointset);
        if r.staircase.is_none() {
            cfg.box_pruning = false;
        }
        let found = match &r.tree {
            AnyTree::Unordered(t) => embed(t, &r.pointset, &cfg)?,
            AnyTree::Ordered(t) => embed_ordered(t, &r.pointset, &cfg)?,
        };
        v.search_seconds = t0.elapsed().as_secs_f64();
        if let Some(e) = &found {
            if !validate(&r.tree, &r.pointset, e)?.is_valid() {
                return Err(invalid(format!("search returned an invalid embedding for `{}`", r.name)));
            }
        }

        let t0 = Instant::now();
        let sat = match solve(&f) {
            SolveResult::Sat(a) => {
                let e = decode(&a, &m)?;
                if !validate(&r.tree, &r.pointset, &e)?.is_valid() {
                    return Err(Error::Decode(format!("model for `{}` is not a valid embedding", r.name)));
                }
                true
            }
            SolveResult::Unsat => false,
            SolveResult::Unknown => unreachable!("no conflict budget set"),
        };
        v.sat_seconds = t0.elapsed().as_secs_f64();
        if found.is_some() != sat {
            return Err(Error::EngineDisagreement { instance: r.name.clone(), search: found.is_some(), sat });
        }
        v.search = Some(found.is_some());
        v.sat = Some(sat);
        out.push(v);
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub n: usize,
    pub mode: Mode,
    pub pairs: u64,
    pub embeddable: u64,
    pub models_checked: u64,
    pub counts_checked: u64,
    /// One line per offending pair and encoding.
    pub mismatches: Vec<String>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `count` seeded (tree index, point set) pairs; the point sets are
/// uniform random permutations.
pub fn sample_pairs(n: usize, trees: usize, count: usize, seed: u64) -> Vec<(usize, PointSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t = rng.gen_range(0..trees);
            (t, random_pointset(n, &mut rng))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CrosscheckOptions {
    pub mode: Mode,
    /// `None` checks every tree against every canonical point set.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Also compare model counts with the search's embedding counts.
    pub counts: bool,
    pub encodings: Vec<Encoding>,
}

impl Default for CrosscheckOptions {
    fn default() -> Self {
        CrosscheckOptions {
            mode: Mode::Unordered,
            samples: None,
            seed: 0,
            counts: false,
            encodings: vec![Encoding::Pairwise, Encoding::Rays],
        }
    }
}

/// Compares search verdicts with SAT verdicts (and optionally counts) and
/// checks that every model decodes to a valid embedding.
pub fn oracle_crosscheck(n: usize, opts: &CrosscheckOptions) -> Result<CrosscheckReport> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let trees: Vec<AnyTree> = match opts.mode {
        Mode::Unordered => enumerate_trees(n, MAX_DEGREE).into_iter().map(AnyTree::Unordered).collect(),
        Mode::Ordered => enumerate_ordered_trees(n, MAX_DEGREE, false).into_iter().map(AnyTree::Ordered).collect(),
    };
    let pairs: Vec<(usize, PointSet)> = match opts.samples {
        Some(k) => sample_pairs(n, trees.len(), k, opts.seed),
        None => enumerate_canonical_pointsets(n, opts.mode.group())
            .flat_map(|p| (0..trees.len()).map(move |t| (t, p.clone())))
            .collect(),
    };
    let mut report = CrosscheckReport { n, mode: opts.mode, ..Default::default() };
    for (ti, p) in pairs {
        let t = &trees[ti];
        let cfg = EmbedConfig::default();
        let found = match t {
            AnyTree::Unordered(t) => embed(t, &p, &cfg)?,
            AnyTree::Ordered(t) => embed_ordered(t, &p, &cfg)?,
        };
        report.pairs += 1;
        report.embeddable += found.is_some() as u64;
        let describe = || format!("tree [{}] points {p}", t.to_text().trim_end().replace('\n', "; "));
        let count = if opts.counts { Some(crate::embed::count_embeddings(t, &p)?) } else { None };
        for &enc in &opts.encodings {
            let (f, m) = build_cnf_any(t, &p, enc)?;
            let sat = match solve(&f) {
                SolveResult::Sat(a) => {
                    report.models_checked += 1;
                    let ok = decode(&a, &m).and_then(|e| validate(t, &p, &e)).is_ok_and(|v| v.is_valid());
                    if !ok {
                        report
                            .mismatches
                            .push(format!("{enc}: model does not decode to a valid embedding: {}", describe()));
                    }
                    true
                }
                _ => false,
            };
            if sat != found.is_some() {
                report.mismatches.push(format!(
                    "{enc}: search says {}, SAT says {sat}: {}",
                    found.is_some(),
                    describe()
                ));
            }
            if let Some(c) = count {
                let mut models = 0u64;
                for e in enumerate_solutions(&f, &m) {
                    models += 1;
                    if !e.and_then(|e| validate(t, &p, &e)).is_ok_and(|v| v.is_valid()) {
                        report.mismatches.push(format!("{enc}: enumerated model is invalid: {}", describe()));
                    }
                }
                report.counts_checked += 1;
                if models != c {
                    report.mismatches.push(format!("{enc}: {c} embeddings but {models} models: {}", describe()));
                }
            }
        }
    }
    Ok(report)
}
