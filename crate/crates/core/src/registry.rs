//! Named (tree, point set) instances with their expected verdicts.
//!
//! Each instance lives in its own `key = value` file under
//! `data/instances/`, named after its point set.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{PointSet, StaircaseSpec, SymmetryGroup};
use crate::trees::{make_t10, make_t13, make_tr, t20_labeled, AnyTree};

const FILES: &[&str] = &[
    include_str!("../data/instances/(2,2,2,1,2,2,2)"),
    include_str!("../data/instances/(1,1,2,2,1,2,2,1,1)"),
    include_str!("../data/instances/(1,1,3,1,1,1,3,1,1)"),
    include_str!("../data/instances/(2,3,1,1,1,3,2)"),
    include_str!("../data/instances/(2,2,2,2,2,2,1)"),
    include_str!("../data/instances/(1,1,2,1,2,2,1,2,1,1)"),
    include_str!("../data/instances/(2,2,1,2,2,1,2,2)"),
    include_str!("../data/instances/(1,3,1,1,1,2,1,1,1,3,1)"),
    include_str!("../data/instances/(1,3,2,1,2,1,2,3,1)"),
    include_str!("../data/instances/(1,1,3,1,1,3,1,1,3,1,1)"),
    include_str!("../data/instances/(1,1,2,1,1,1,2,2,1,1,1,2,1,1)"),
    include_str!("../data/instances/(1,1,3,1,1,1,3,1,1,1,3,1,1)"),
    include_str!("../data/instances/(1,1,3,1,2,3,2,1,3,1,1)"),
    include_str!("../data/instances/(1,1,3,2,1,3,1,2,3,1,1)"),
    include_str!("../data/instances/(2,3,1,1,1,3,1,1,1,3,2)"),
    include_str!("../data/instances/(2,3,1,2,3,2,1,3,2)"),
    include_str!("../data/instances/(2,3,2,1,3,1,2,3,2)"),
    include_str!("../data/instances/(1,1,2,1,1,1,2,2,2,1,1,1,2,1,1)"),
    include_str!("../data/instances/(1,1,2,1,2,2,2,2,2,1,2,1,1)"),
    include_str!("../data/instances/(1,1,2,2,1,2,2,2,1,2,2,1,1)"),
    include_str!("../data/instances/(2,2,1,1,1,2,2,2,1,1,1,2,2)"),
    include_str!("../data/instances/(2,2,1,2,2,2,2,2,1,2,2)"),
    include_str!("../data/instances/(2,2,2,1,2,2,2,1,2,2,2)"),
    include_str!("../data/instances/2,1,3,6,7,4,5,8,10,9"),
    include_str!("../data/instances/(2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2)"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Embeddable,
    NonEmbeddable,
    Unknown,
}

/// How expensive an instance is to decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    /// Seconds.
    Fast,
    /// Minutes.
    Extended,
    /// Hours or more; skipped unless forced.
    LongRunning,
}

macro_rules! text_enum {
    ($ty:ty { $($text:literal => $v:expr),* $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($v),)*
                    _ => Err(invalid(format!("unknown {} `{s}`", stringify!($ty)))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $v { return f.write_str($text); })*
                unreachable!()
            }
        }
    };
}

text_enum!(Expected {
    "embeddable" => Expected::Embeddable,
    "non-embeddable" => Expected::NonEmbeddable,
    "unknown" => Expected::Unknown,
});

text_enum!(Tier {
    "fast" => Tier::Fast,
    "extended" => Tier::Extended,
    "long-running" => Tier::LongRunning,
});

#[derive(Clone, Debug)]
pub struct InstanceRecord {
    pub name: String,
    /// The named-tree shorthand, e.g. `T13` or `Tr:r=10`.
    pub tree_name: String,
    pub tree: AnyTree,
    pub pointset: PointSet,
    pub staircase: Option<StaircaseSpec>,
    pub expected: Expected,
    pub tier: Tier,
    pub provenance: String,
}

impl InstanceRecord {
    pub fn n(&self) -> usize {
        self.pointset.len()
    }

    /// `tree/points`, the second name every instance answers to.
    pub fn long_name(&self) -> String {
        match &self.staircase {
            Some(s) => format!("{}/{s}", self.tree_name),
            None => format!("{}/{}", self.tree_name, self.pointset),
        }
    }

    fn parse(text: &str) -> Result<InstanceRecord> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once('=').ok_or_else(|| corrupt(text, format!("bad line `{line}`")))?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| corrupt(text, format!("missing `{k}`")));
        let name = get("name")?.to_string();
        let tree_name = get("tree")?.to_string();
        let tree = named_tree(&tree_name)?;
        let (pointset, staircase) = parse_points(get("points")?)?;
        if tree.len() != pointset.len() {
            return Err(Error::SizeMismatch { tree: tree.len(), points: pointset.len() });
        }
        Ok(InstanceRecord {
            name,
            tree_name,
            tree,
            pointset,
            staircase,
            expected: get("expected")?.parse()?,
            tier: get("tier")?.parse()?,
            provenance: get("provenance")?.to_string(),
        })
    }
}

fn corrupt(text: &str, reason: String) -> Error {
    let asset = text.lines().next().unwrap_or("").to_string();
    Error::CorruptAsset { asset, reason }
}

/// A staircase string `(a,b,...)` or a comma-separated permutation.
pub fn parse_points(s: &str) -> Result<(PointSet, Option<StaircaseSpec>)> {
    let s = s.trim();
    if s.starts_with('(') {
        let spec: StaircaseSpec = s.parse()?;
        Ok((spec.points(), Some(spec)))
    } else {
        Ok((s.parse()?, None))
    }
}

/// Resolves a tree shorthand: `T13`, `T10` (ordered), `T14`, `T16`..`T20`
/// (labeled subtrees of the 20-vertex tree), or `Tr:r=<even r>` (ordered).
pub fn named_tree(name: &str) -> Result<AnyTree> {
    if let Some(r) = name.strip_prefix("Tr:r=") {
        let r: usize = r.parse().map_err(|_| invalid(format!("bad r in `{name}`")))?;
        return make_tr(r).map(AnyTree::Ordered);
    }
    match name {
        "T13" => Ok(AnyTree::Unordered(make_t13())),
        "T10" => Ok(AnyTree::Ordered(make_t10())),
        _ => {
            let k = name
                .strip_prefix('T')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| [14, 16, 17, 18, 19, 20].contains(k))
                .ok_or_else(|| Error::UnknownInstance(name.to_string()))?;
            t20_labeled().subtree_leq(k).map(AnyTree::Unordered)
        }
    }
}

/// Every shipped instance, in file order.
pub fn instances() -> &'static [InstanceRecord] {
    static ALL: OnceLock<Vec<InstanceRecord>> = OnceLock::new();
    ALL.get_or_init(|| FILES.iter().map(|t| InstanceRecord::parse(t).expect("shipped instance parses")).collect())
}

/// Looks an instance up by its name or by `tree/points`.
pub fn load_instance(name: &str) -> Result<InstanceRecord> {
    instances()
        .iter()
        .find(|r| r.name == name || r.long_name() == name)
        .cloned()
        .ok_or_else(|| Error::UnknownInstance(name.to_string()))
}

/// Whether `(t, p)` is, up to isomorphism and symmetry of the point set,
/// a shipped instance expected to be non-embeddable.
pub fn is_expected_failure(t: &AnyTree, p: &PointSet) -> bool {
    let canon = p.canonical(SymmetryGroup::Full8);
    instances().iter().filter(|r| r.expected == Expected::NonEmbeddable && r.n() == p.len()).any(|r| {
        let same_tree = match (t, &r.tree) {
            (AnyTree::Unordered(a), AnyTree::Unordered(b)) => a.canonical_code() == b.canonical_code(),
            (AnyTree::Ordered(a), AnyTree::Ordered(b)) => a.canonical_code() == b.canonical_code(),
            _ => false,
        };
        same_tree && r.pointset.canonical(SymmetryGroup::Full8) == canon
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_instances_load() {
        let all = instances();
        assert_eq!(all.len(), FILES.len());
        for r in all {
            assert_eq!(r.tree.len(), r.n(), "{}", r.name);
            assert_eq!(load_instance(&r.name).unwrap().name, r.name);
            assert_eq!(load_instance(&r.long_name()).unwrap().name, r.name);
        }
        let mut names: Vec<_> = all.iter().map(|r| &r.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all.len());
    }

    #[test]
    fn lookups() {
        let r = load_instance("T13/S13").unwrap();
        assert_eq!(r.expected, Expected::NonEmbeddable);
        assert_eq!(r.staircase.unwrap().to_string(), "(2,2,2,1,2,2,2)");
        assert_eq!(load_instance("T13/(2,2,2,1,2,2,2)").unwrap().name, "T13/S13");
        assert_eq!(load_instance("n14/(2,2,1,2,2,1,2,2)").unwrap().expected, Expected::NonEmbeddable);
        assert_eq!(load_instance("Tr/r=10").unwrap().n(), 98);
        assert!(matches!(load_instance("T99/()"), Err(Error::UnknownInstance(_))));
    }

    #[test]
    fn tiers() {
        for r in instances() {
            let long = r.n() >= 17;
            assert_eq!(r.tier == Tier::LongRunning, long, "{}", r.name);
        }
    }

    #[test]
    fn expected_failure_matching() {
        let r = load_instance("T10/S10").unwrap();
        let mirrored = r.pointset.apply(crate::geometry::SymmetryOp::MirrorH);
        assert!(is_expected_failure(&r.tree, &mirrored));
        assert!(!is_expected_failure(&r.tree, &PointSet::identity(10)));
        let t13 = AnyTree::Unordered(make_t13().relabel(&[12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0]));
        assert!(is_expected_failure(&t13, &"(2,3,1,1,1,3,2)".parse::<StaircaseSpec>().unwrap().points()));
        assert!(!is_expected_failure(&t13, &"(2,2,2,2,2,2,1)".parse::<StaircaseSpec>().unwrap().points()));
    }
}
