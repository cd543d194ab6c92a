//! Stable trees: pairwise compatible families of proper partitions, i.e. the
//! dual graphs of boundary points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{enumerate_proper_partitions, ProperPartition};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TreeFile", into = "TreeFile")]
pub struct StableTree {
    n: usize,
    nodes: Vec<ProperPartition>,
}

impl StableTree {
    /// The empty family: an interior point.
    pub fn interior(n: usize) -> Self {
        StableTree { n, nodes: Vec::new() }
    }

    pub fn new(mut nodes: Vec<ProperPartition>, n: usize) -> Result<Self> {
        if let Some(p) = nodes.iter().find(|p| p.n() != n) {
            return Err(Error::AmbientMismatch {
                left: n,
                right: p.n(),
            });
        }
        nodes.sort();
        nodes.dedup();
        for (k, a) in nodes.iter().enumerate() {
            for b in &nodes[k + 1..] {
                if a.is_transverse(b) {
                    return Err(Error::NotATree(format!("{a} and {b} cross")));
                }
            }
        }
        Ok(StableTree { n, nodes })
    }

    pub fn from_blocks(blocks: &[Vec<usize>], n: usize) -> Result<Self> {
        let nodes = blocks
            .iter()
            .map(|b| ProperPartition::new(b, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[ProperPartition] {
        &self.nodes
    }

    pub fn contains(&self, p: &ProperPartition) -> bool {
        self.nodes.binary_search(p).is_ok()
    }

    /// Blocks of the tree partitions that avoid vertex 1. They form a
    /// laminar family on `{2, ..., n}`.
    pub(crate) fn laminar_sets(&self) -> Vec<u32> {
        self.nodes.iter().map(|p| p.complement_mask()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Every stable tree on `n` points (all pairwise compatible families,
/// including the empty one).
pub fn all_stable_trees(n: usize) -> Result<Vec<StableTree>> {
    let parts = enumerate_proper_partitions(n)?;
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend_families(&parts, 0, &mut current, &mut out, n);
    Ok(out)
}

fn extend_families(
    parts: &[ProperPartition],
    start: usize,
    current: &mut Vec<ProperPartition>,
    out: &mut Vec<StableTree>,
    n: usize,
) {
    out.push(StableTree {
        n,
        nodes: current.clone(),
    });
    for k in start..parts.len() {
        let p = parts[k];
        if current.iter().all(|q| q.is_compatible(&p)) {
            current.push(p);
            extend_families(parts, k + 1, current, out, n);
            current.pop();
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TreeFile {
    n: usize,
    nodes: Vec<Vec<usize>>,
}

impl From<StableTree> for TreeFile {
    fn from(t: StableTree) -> Self {
        TreeFile {
            n: t.n,
            nodes: t.nodes.iter().map(ProperPartition::block).collect(),
        }
    }
}

impl TryFrom<TreeFile> for StableTree {
    type Error = Error;

    fn try_from(f: TreeFile) -> Result<Self> {
        StableTree::from_blocks(&f.nodes, f.n)
    }
}
