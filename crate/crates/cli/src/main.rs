mod render;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use lshape_core::embed::{count_embeddings, validate, SearchOutcome, Searcher};
use lshape_core::geometry::{enumerate_canonical_pointsets, SymmetryGroup};
use lshape_core::harness::{exhaustive_verify, verify_counterexamples, Mode, SweepOptions, VerifyOptions};
use lshape_core::registry::{instances, load_instance, named_tree, parse_points, Tier};
use lshape_core::sat::{build_cnf_any, Encoding};
use lshape_core::trees::{enumerate_ordered_trees, enumerate_trees, MAX_DEGREE};
use lshape_core::{AnyTree, EmbedConfig, Embedding, OrderedTree, PointSet, StaircaseSpec, Tree};

use render::{render_svg, RenderSpec};

/// Directory for sweep reports when `--report` is not given.
const REPORT_DIR_ENV: &str = "LSHAPE_REPORT_DIR";

#[derive(Parser)]
#[command(name = "lshape", version, about = "L-shaped embeddings of trees in point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an embedding (or count all of them).
    Embed(EmbedCmd),
    /// Test every tree against every point set of one size.
    Verify(VerifyCmd),
    /// Decide the shipped counterexample instances with both engines.
    Counterexamples(CounterexamplesCmd),
    /// Write the SAT encoding of an instance.
    Cnf(CnfCmd),
    /// Count (or list) trees, ordered trees or point sets.
    Enumerate(EnumerateCmd),
    /// Draw a point set, optionally with an embedding, as SVG.
    Render(RenderCmd),
}

#[derive(Args)]
struct TreeArgs {
    /// Tree file: `n`, edge lines `u v`, optional rotation lines `v: a b c`.
    #[arg(long, value_name = "FILE")]
    tree: Option<PathBuf>,
    /// Named tree: T10, T13, T14, T16..T20, Tr:r=<even>.
    #[arg(long, value_name = "NAME")]
    named: Option<String>,
    /// Path on N vertices.
    #[arg(long, value_name = "N")]
    path: Option<usize>,
    /// A single edge.
    #[arg(long)]
    edge: bool,
    /// Treat the tree as ordered (neighbours in increasing order if the
    /// input has no rotation system).
    #[arg(long)]
    ordered: bool,
}

impl TreeArgs {
    fn given(&self) -> usize {
        [self.tree.is_some(), self.named.is_some(), self.path.is_some(), self.edge].iter().filter(|&&b| b).count()
    }

    fn load(&self) -> Result<AnyTree> {
        if self.given() != 1 {
            bail!("give exactly one of --tree, --named, --path, --edge");
        }
        let t = if let Some(f) = &self.tree {
            let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            AnyTree::parse(&text)?
        } else if let Some(name) = &self.named {
            named_tree(name)?
        } else if let Some(n) = self.path {
            if n == 0 {
                bail!("a path needs at least one vertex");
            }
            AnyTree::Unordered(Tree::path(n))
        } else {
            AnyTree::Unordered(Tree::path(2))
        };
        Ok(match (t, self.ordered) {
            (AnyTree::Unordered(t), true) => AnyTree::Ordered(OrderedTree::with_sorted_rotation(t)),
            (t, _) => t,
        })
    }
}

#[derive(Args)]
struct PointArgs {
    /// Comma-separated permutation, e.g. `3,1,4,2,5`.
    #[arg(long, value_name = "PERM")]
    perm: Option<String>,
    /// Staircase box sizes, e.g. `(2,2,2,1,2,2,2)`.
    #[arg(long, value_name = "BOXES")]
    staircase: Option<String>,
}

impl PointArgs {
    fn load(&self) -> Result<(PointSet, Option<StaircaseSpec>)> {
        match (&self.perm, &self.staircase) {
            (Some(p), None) => Ok(parse_points(p)?),
            (None, Some(s)) => {
                let spec: StaircaseSpec = s.trim().parse()?;
                Ok((spec.points(), Some(spec)))
            }
            _ => bail!("give exactly one of --perm, --staircase"),
        }
    }
}

#[derive(Args)]
struct EmbedCmd {
    #[command(flatten)]
    tree: TreeArgs,
    #[command(flatten)]
    points: PointArgs,
    /// Print the number of embeddings instead of one embedding.
    #[arg(long)]
    count: bool,
    /// Do not use the box rule on staircases.
    #[arg(long)]
    no_box_pruning: bool,
    /// Write a picture of the embedding.
    #[arg(long, value_name = "SVG")]
    render: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCmd {
    n: usize,
    #[arg(long)]
    ordered: bool,
    /// Worker threads (0 = one per CPU).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Test this many random point sets instead of all of them.
    #[arg(long, value_name = "K")]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check the box rule on every embedding found on a staircase.
    #[arg(long)]
    box_lemma: bool,
    /// JSON report path.
    #[arg(long, value_name = "JSON")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexamplesCmd {
    /// Instance names; none means all.
    names: Vec<String>,
    #[arg(long, conflicts_with = "names")]
    all: bool,
    /// Also run long-running instances.
    #[arg(long)]
    force_long: bool,
    /// Run extended-tier instances too (minutes each).
    #[arg(long)]
    extended: bool,
    #[arg(long, default_value_t = Encoding::Pairwise)]
    encoding: Encoding,
    /// Write `.cnf` and `.map` files for every instance here.
    #[arg(long, value_name = "DIR")]
    export: Option<PathBuf>,
    #[arg(long, value_name = "JSON")]
    report: Option<PathBuf>,
    /// List the instances and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct CnfCmd {
    #[command(flatten)]
    tree: TreeArgs,
    #[command(flatten)]
    points: PointArgs,
    /// A registry instance instead of --named/--staircase.
    #[arg(long, value_name = "NAME")]
    instance: Option<String>,
    #[arg(long, default_value_t = Encoding::Pairwise)]
    encoding: Encoding,
    /// Output file (default: stdout).
    #[arg(long, value_name = "CNF")]
    dimacs: Option<PathBuf>,
    /// Variable map for decoding external models.
    #[arg(long, value_name = "MAP")]
    varmap: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateCmd {
    #[arg(long, value_name = "N")]
    trees: Option<usize>,
    #[arg(long, value_name = "N")]
    ordered_trees: Option<usize>,
    #[arg(long, value_name = "N")]
    pointsets: Option<usize>,
    #[arg(long, default_value = "full8")]
    group: SymmetryGroup,
    /// Ordered trees: skip those with a single rotation class.
    #[arg(long)]
    nontrivial: bool,
    /// Print every object, not just the count.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct RenderCmd {
    #[command(flatten)]
    tree: TreeArgs,
    #[command(flatten)]
    points: PointArgs,
    /// A registry instance (point set and tree).
    #[arg(long, value_name = "NAME")]
    instance: Option<String>,
    /// Embedding file (`v -> point` and `edge u v : H|V` lines).
    #[arg(long, value_name = "FILE")]
    embedding: Option<PathBuf>,
    /// Search for an embedding of the tree and draw it.
    #[arg(long)]
    solve: bool,
    #[arg(short, long, value_name = "SVG")]
    output: PathBuf,
    #[arg(long, default_value_t = 24.0)]
    cell: f64,
    #[arg(long)]
    no_boxes: bool,
    #[arg(long)]
    labels: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        // reader went away, e.g. `lshape cnf ... | head`
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Embed(c) => cmd_embed(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Counterexamples(c) => cmd_counterexamples(c),
        Command::Cnf(c) => cmd_cnf(c),
        Command::Enumerate(c) => cmd_enumerate(c),
        Command::Render(c) => cmd_render(c),
    }
}

fn search(t: &AnyTree, p: &PointSet, boxes: Option<&StaircaseSpec>, pruning: bool) -> Result<Option<Embedding>> {
    let cfg = EmbedConfig { boxes: boxes.cloned(), box_pruning: pruning && boxes.is_some(), ..Default::default() };
    let mut s = match t {
        AnyTree::Unordered(t) => Searcher::new(t, p, &cfg)?,
        AnyTree::Ordered(t) => Searcher::new_ordered(t, p, &cfg)?,
    };
    Ok(match s.find() {
        SearchOutcome::Found(e) => Some(e),
        SearchOutcome::NotEmbeddable => None,
        SearchOutcome::Aborted => unreachable!("no node limit"),
    })
}

fn cmd_embed(c: EmbedCmd) -> Result<ExitCode> {
    let t = c.tree.load()?;
    let (p, boxes) = c.points.load()?;
    if c.count {
        let k = count_embeddings(&t, &p)?;
        println!("{k}");
        return Ok(if k > 0 { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }
    let found = search(&t, &p, boxes.as_ref(), !c.no_box_pruning)?;
    match &found {
        Some(e) => {
            debug_assert!(validate(&t, &p, e)?.is_valid());
            print!("{}", e.to_text(t.base()));
        }
        None => println!("NONE"),
    }
    if let Some(out) = &c.render {
        let svg = render_svg(&p, boxes.as_ref(), found.as_ref().map(|e| (&t, e)), &RenderSpec::default());
        write_file(out, &svg)?;
    }
    Ok(if found.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_verify(c: VerifyCmd) -> Result<ExitCode> {
    let mode = if c.ordered { Mode::Ordered } else { Mode::Unordered };
    let opts = SweepOptions { jobs: c.jobs, sample: c.sample.map(|k| (k, c.seed)), box_lemma: c.box_lemma };
    let r = exhaustive_verify(c.n, mode, &opts)?;
    println!(
        "n={} mode={} coverage={:?} pointsets={} trees={} pairs={} failures={} unexpected={} seconds={:.2}",
        r.n,
        r.mode,
        r.coverage,
        r.pointsets,
        r.trees,
        r.pairs,
        r.failures.len(),
        r.unexpected_failures,
        r.seconds
    );
    for f in &r.failures {
        println!("failure {} tree {}{}", f.pointset, f.tree, if f.expected { " (expected)" } else { "" });
    }
    if let Some(b) = &r.box_lemma {
        println!("box rule: {} staircases, {} embeddings, {} violations", b.staircases, b.embeddings, b.violations);
    }
    let path = match (&c.report, std::env::var_os(REPORT_DIR_ENV)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(PathBuf::from(dir).join(format!("sweep-n{}-{}.json", r.n, r.mode))),
        _ => None,
    };
    if let Some(path) = path {
        r.write_json(&path).with_context(|| format!("writing {}", path.display()))?;
    }
    let bad = r.unexpected_failures > 0 || r.box_lemma.is_some_and(|b| b.violations > 0);
    Ok(if bad { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_counterexamples(c: CounterexamplesCmd) -> Result<ExitCode> {
    if c.list {
        for r in instances() {
            println!("{}\tn={}\t{}\t{}\t{}", r.name, r.n(), r.expected, r.tier, r.provenance);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let records = if c.names.is_empty() || c.all {
        instances().to_vec()
    } else {
        c.names.iter().map(|n| load_instance(n)).collect::<lshape_core::Result<Vec<_>>>()?
    };
    if let Some(dir) = &c.export {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let max_tier = if c.force_long {
        Tier::LongRunning
    } else if c.extended {
        Tier::Extended
    } else {
        Tier::Fast
    };
    let opts = VerifyOptions { max_tier: Some(max_tier), encoding: c.encoding, export_dir: c.export.clone() };
    let verdicts = verify_counterexamples(&records, &opts)?;
    let mut bad = false;
    let mut out = std::io::stdout().lock();
    for v in &verdicts {
        let status = match v.search {
            None => format!("skipped ({})", v.tier),
            Some(e) => {
                let ok = v.as_expected();
                bad |= !ok;
                format!(
                    "{} search {:.1}s sat {:.1}s{}",
                    if e { "embeddable" } else { "non-embeddable" },
                    v.search_seconds,
                    v.sat_seconds,
                    if ok { "" } else { "  UNEXPECTED" }
                )
            }
        };
        writeln!(out, "{}: {status}", v.name)?;
        if let Some(f) = &v.exported {
            writeln!(out, "  wrote {f} ({}, {} variables, {} clauses)", v.encoding, v.variables, v.clauses)?;
        }
    }
    if let Some(path) = &c.report {
        let json = serde_json::to_string_pretty(&verdicts)?;
        write_file(path, &(json + "\n"))?;
    }
    Ok(if bad { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn instance_or_args(
    instance: &Option<String>,
    tree: &TreeArgs,
    points: &PointArgs,
) -> Result<(AnyTree, PointSet, Option<StaircaseSpec>)> {
    if let Some(name) = instance {
        if tree.given() > 0 || points.perm.is_some() || points.staircase.is_some() {
            bail!("--instance replaces the tree and point set options");
        }
        let r = load_instance(name)?;
        return Ok((r.tree, r.pointset, r.staircase));
    }
    let t = tree.load()?;
    let (p, boxes) = points.load()?;
    Ok((t, p, boxes))
}

fn cmd_cnf(c: CnfCmd) -> Result<ExitCode> {
    let (t, p, _) = instance_or_args(&c.instance, &c.tree, &c.points)?;
    let (f, m) = build_cnf_any(&t, &p, c.encoding)?;
    match &c.dimacs {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            f.write_dimacs_io(file).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            f.write_dimacs_io(std::io::stdout().lock())?;
        }
    }
    if let Some(path) = &c.varmap {
        write_file(path, &m.to_text())?;
    }
    eprintln!("{} variables, {} clauses", f.var_count(), f.num_clauses());
    Ok(ExitCode::SUCCESS)
}

fn cmd_enumerate(c: EnumerateCmd) -> Result<ExitCode> {
    let mut out = std::io::stdout().lock();
    match (c.trees, c.ordered_trees, c.pointsets) {
        (Some(n), None, None) => {
            let ts = enumerate_trees(n, MAX_DEGREE);
            if c.list {
                for t in &ts {
                    writeln!(out, "{}", t.canonical_code())?;
                }
            }
            writeln!(out, "{}", ts.len())?;
        }
        (None, Some(n), None) => {
            let ts = enumerate_ordered_trees(n, MAX_DEGREE, c.nontrivial);
            if c.list {
                for t in &ts {
                    writeln!(out, "{}", t.to_text().trim_end().replace('\n', "; "))?;
                }
            }
            writeln!(out, "{}", ts.len())?;
        }
        (None, None, Some(n)) => {
            if n == 0 {
                bail!("n must be at least 1");
            }
            let mut k = 0u64;
            for p in enumerate_canonical_pointsets(n, c.group) {
                if c.list {
                    writeln!(out, "{p}")?;
                }
                k += 1;
            }
            writeln!(out, "{k}")?;
        }
        _ => bail!("give exactly one of --trees, --ordered-trees, --pointsets"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(c: RenderCmd) -> Result<ExitCode> {
    let spec = RenderSpec { cell: c.cell, boxes: !c.no_boxes, labels: c.labels, ..Default::default() };
    spec.check().map_err(anyhow::Error::msg)?;
    let want_tree = c.embedding.is_some() || c.solve;
    let (tree, p, boxes) = if c.instance.is_some() || want_tree {
        let (t, p, b) = instance_or_args(&c.instance, &c.tree, &c.points)?;
        (Some(t), p, b)
    } else {
        let (p, b) = c.points.load()?;
        (None, p, b)
    };
    let embedding = match (&c.embedding, c.solve, &tree) {
        (Some(_), true, _) => bail!("--embedding and --solve exclude each other"),
        (Some(f), false, Some(t)) => {
            let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            let e = Embedding::parse(&text, t.base())?;
            if e.placement.iter().any(|&j| j >= p.len()) || e.placement.len() != p.len() {
                bail!("embedding does not match the point set");
            }
            Some(e)
        }
        (None, true, Some(t)) => search(t, &p, boxes.as_ref(), true)?,
        _ => None,
    };
    if c.solve && embedding.is_none() {
        eprintln!("no embedding exists; drawing the point set only");
    }
    let drawing = match (&tree, &embedding) {
        (Some(t), Some(e)) => Some((t, e)),
        _ => None,
    };
    let svg = render_svg(&p, boxes.as_ref(), drawing, &spec);
    write_file(&c.output, &svg)?;
    Ok(ExitCode::SUCCESS)
}
