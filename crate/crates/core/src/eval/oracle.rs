use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricDataset;
use crate::tree::{NodeId, SlimTree};

/// Exact nearest neighbor of `i` by exhaustive scan; ties to the smallest id.
pub fn brute_force_exact_nn(ds: &MetricDataset, i: usize) -> Result<(usize, f64)> {
    if ds.len() < 2 {
        return Err(Error::Input("nearest neighbor needs at least two objects".into()));
    }
    if i >= ds.len() {
        return Err(Error::OutOfBounds { index: i, n: ds.len() });
    }
    let mut best = (usize::MAX, f64::INFINITY);
    for j in (0..ds.len()).filter(|&j| j != i) {
        let d = ds.distance(i, j);
        if d < best.1 {
            best = (j, d);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeCheck {
    LeafCompleteness,
    RepresentativeChain,
    CoveringRadius,
    Capacity,
}

impl fmt::Display for TreeCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeCheck::LeafCompleteness => "leaf completeness",
            TreeCheck::RepresentativeChain => "representative chain",
            TreeCheck::CoveringRadius => "covering radius",
            TreeCheck::Capacity => "capacity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: TreeCheck,
    /// First violation found, if any.
    pub counterexample: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeReport {
    pub checks: Vec<CheckResult>,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, which: TreeCheck) -> &CheckResult {
        self.checks
            .iter()
            .find(|c| c.check == which)
            .expect("every check is reported")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for TreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.counterexample {
                None => writeln!(f, "{}: ok", c.check)?,
                Some(why) => writeln!(f, "{}: FAILED ({why})", c.check)?,
            }
        }
        Ok(())
    }
}

/// Walks the subtree below `id` and collects its objects.
fn subtree_objects(tree: &SlimTree, id: NodeId) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![id];
    while let Some(id) = stack.pop() {
        let node = tree.node(id);
        if node.is_leaf {
            out.extend(node.objects());
        } else {
            stack.extend(node.entries.iter().filter_map(|e| e.child));
        }
    }
    out
}

fn reachable(tree: &SlimTree) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![tree.root_id()];
    while let Some(id) = stack.pop() {
        out.push(id);
        stack.extend(tree.node(id).entries.iter().filter_map(|e| e.child));
    }
    out
}

fn check_completeness(tree: &SlimTree, ds: &MetricDataset, nodes: &[NodeId]) -> Option<String> {
    let mut seen: Vec<Option<NodeId>> = vec![None; ds.len()];
    for &id in nodes {
        let node = tree.node(id);
        if !node.is_leaf {
            continue;
        }
        for o in node.objects() {
            if o >= ds.len() {
                return Some(format!("leaf {id} stores unknown object {o}"));
            }
            if let Some(other) = seen[o] {
                return Some(format!("object {o} stored in leaves {other} and {id}"));
            }
            seen[o] = Some(id);
        }
    }
    for (o, leaf) in seen.iter().enumerate() {
        match leaf {
            None => return Some(format!("object {o} is in no leaf")),
            Some(leaf) if tree.leaf_of(o) != Some(*leaf) => {
                return Some(format!(
                    "object {o} lives in leaf {leaf} but is indexed under {:?}",
                    tree.leaf_of(o)
                ))
            }
            _ => {}
        }
    }
    None
}

fn check_chain(tree: &SlimTree, nodes: &[NodeId]) -> Option<String> {
    for &id in nodes {
        let node = tree.node(id);
        if node.is_leaf {
            continue;
        }
        for e in &node.entries {
            let Some(child) = e.child else {
                return Some(format!("internal node {id} has entry {} without a child", e.object));
            };
            let c = tree.node(child);
            if c.parent != Some(id) {
                return Some(format!("node {child} points to parent {:?}, not {id}", c.parent));
            }
            if c.rep != Some(e.object) {
                return Some(format!(
                    "entry {} of node {id} routes to node {child} whose representative is {:?}",
                    e.object, c.rep
                ));
            }
            if !c.objects().any(|o| o == e.object) {
                return Some(format!(
                    "representative {} of node {child} is not stored in it",
                    e.object
                ));
            }
        }
    }
    None
}

fn check_radii(tree: &SlimTree, ds: &MetricDataset, nodes: &[NodeId]) -> Option<String> {
    for &id in nodes {
        for e in &tree.node(id).entries {
            let Some(child) = e.child else { continue };
            for o in subtree_objects(tree, child) {
                let d = ds.distance(e.object, o);
                if d > e.radius + 1e-9 * (1.0 + d) {
                    return Some(format!(
                        "entry {} of node {id} has radius {} but object {o} is at {d}",
                        e.object, e.radius
                    ));
                }
            }
        }
    }
    None
}

fn check_capacity(tree: &SlimTree, nodes: &[NodeId]) -> Option<String> {
    for &id in nodes {
        let node = tree.node(id);
        if node.len() > tree.capacity() {
            return Some(format!(
                "node {id} holds {} entries, capacity {}",
                node.len(),
                tree.capacity()
            ));
        }
        if node.is_empty() && (id != tree.root_id() || !tree.is_empty()) {
            return Some(format!("node {id} is empty"));
        }
    }
    None
}

/// Checks the structural invariants of a built tree exhaustively.
pub fn verify_tree(tree: &SlimTree, ds: &MetricDataset) -> TreeReport {
    let nodes = reachable(tree);
    TreeReport {
        checks: vec![
            CheckResult {
                check: TreeCheck::LeafCompleteness,
                counterexample: check_completeness(tree, ds, &nodes),
            },
            CheckResult {
                check: TreeCheck::RepresentativeChain,
                counterexample: check_chain(tree, &nodes),
            },
            CheckResult {
                check: TreeCheck::CoveringRadius,
                counterexample: check_radii(tree, ds, &nodes),
            },
            CheckResult {
                check: TreeCheck::Capacity,
                counterexample: check_capacity(tree, &nodes),
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> MetricDataset {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![(i % 9) as f64, (i / 9) as f64 * 1.7])
            .collect();
        MetricDataset::from_rows(&rows).unwrap()
    }

    fn built(n: usize, c: usize) -> (SlimTree, MetricDataset) {
        let ds = grid(n);
        let order: Vec<usize> = (0..n).collect();
        (SlimTree::build(&ds, &order, c).unwrap(), ds)
    }

    #[test]
    fn exact_nn_examples() {
        let ds = MetricDataset::from_rows(&[vec![0.0], vec![3.0]]).unwrap();
        assert_eq!(brute_force_exact_nn(&ds, 0).unwrap(), (1, 3.0));
        assert_eq!(brute_force_exact_nn(&ds, 1).unwrap(), (0, 3.0));
        let ds = MetricDataset::from_rows(&[vec![0.0], vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        assert_eq!(brute_force_exact_nn(&ds, 3).unwrap(), (1, 0.0));
        let one = MetricDataset::from_rows(&[vec![0.0]]).unwrap();
        assert!(brute_force_exact_nn(&one, 0).is_err());
    }

    #[test]
    fn fresh_trees_pass() {
        for (n, c) in [(1, 4), (5, 8), (60, 3), (200, 4), (300, 16)] {
            let (tree, ds) = built(n, c);
            let report = verify_tree(&tree, &ds);
            assert!(report.passed(), "n={n} c={c}\n{report}");
        }
    }

    #[test]
    fn corrupted_radius() {
        let (mut tree, ds) = built(100, 4);
        let root = tree.root_id();
        tree.node_mut(root).entries[0].radius = 0.0;
        let report = verify_tree(&tree, &ds);
        let radius = report.check(TreeCheck::CoveringRadius);
        assert!(!radius.passed());
        let obj = tree.root().entries[0].object;
        assert!(radius.counterexample.as_ref().unwrap().contains(&format!("entry {obj}")));
    }

    #[test]
    fn dropped_object() {
        let (mut tree, ds) = built(100, 4);
        let leaf = tree.leaves().next().unwrap().id;
        tree.node_mut(leaf).entries.pop();
        assert!(!verify_tree(&tree, &ds).check(TreeCheck::LeafCompleteness).passed());
    }

    #[test]
    fn broken_chain() {
        let (mut tree, ds) = built(100, 4);
        let child = tree.root().entries[0].child.unwrap();
        let other = tree.root().entries[1].object;
        tree.node_mut(child).rep = Some(other);
        assert!(!verify_tree(&tree, &ds).check(TreeCheck::RepresentativeChain).passed());
    }
}
