//! Slim-tree metric index.
//!
//! Nodes live in an arena and are addressed by [`NodeId`]. Every object is
//! stored in exactly one leaf. An internal entry `(o, r, child)` routes to a
//! child whose representative is `o`, so `o` is stored both in the child and
//! in the entry's node, and every object in the child's subtree lies within
//! distance `r` of `o`.
//!
//! Insertion descends to the entry nearest to the new object. Overflowing
//! nodes are split along the longest edge of the minimal spanning tree over
//! their entries.

mod query;
mod split;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metric::MetricDataset;

pub use split::{min_side, mst_partition, MstPartition, MIN_OCCUPANCY};

/// Default node capacity.
pub const DEFAULT_CAPACITY: usize = 32;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub object: usize,
    /// Covering radius of the child subtree around `object`; zero in leaves.
    pub radius: f64,
    pub child: Option<NodeId>,
    /// Distance from `object` to the representative of the node holding this entry.
    pub dist_to_parent_rep: f64,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub id: NodeId,
    pub entries: Vec<Entry>,
    pub parent: Option<NodeId>,
    pub is_leaf: bool,
    /// The object shared with the parent node; `None` for the root.
    pub rep: Option<usize>,
}

impl TreeNode {
    pub fn objects(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.object)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SlimTree {
    nodes: Vec<TreeNode>,
    root: NodeId,
    capacity: usize,
    leaf_of: Vec<Option<NodeId>>,
    height: usize,
    stored: usize,
    /// Representative used when the root is itself a leaf.
    root_medoid: Option<usize>,
}

impl SlimTree {
    /// An empty tree able to index objects `0..n`.
    pub fn new(n: usize, capacity: usize) -> Result<Self> {
        if capacity < 3 {
            return Err(Error::Config(format!(
                "node capacity must be at least 3, got {capacity}"
            )));
        }
        Ok(Self {
            nodes: vec![TreeNode {
                id: 0,
                entries: Vec::new(),
                parent: None,
                is_leaf: true,
                rep: None,
            }],
            root: 0,
            capacity,
            leaf_of: vec![None; n],
            height: 1,
            stored: 0,
            root_medoid: None,
        })
    }

    /// Builds a tree inserting objects in the reverse of `order`, so the last
    /// ranked object is inserted first.
    pub fn build(ds: &MetricDataset, order: &[usize], capacity: usize) -> Result<Self> {
        let n = ds.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        validate_permutation(order, n)?;
        let mut tree = Self::new(n, capacity)?;
        for &i in order.iter().rev() {
            tree.insert(ds, i)?;
        }
        tree.finalize(ds);
        Ok(tree)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of stored objects.
    pub fn len(&self) -> usize {
        self.stored
    }

    pub fn is_empty(&self) -> bool {
        self.stored == 0
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[self.root]
    }

    pub fn root_id(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Mutable node access. Bypasses every structural invariant; intended for
    /// fault-injection tests of the verifier.
    #[doc(hidden)]
    pub fn node_mut(&mut self, id: NodeId) -> &mut TreeNode {
        &mut self.nodes[id]
    }

    /// Size of the object universe this tree was created for.
    pub fn universe(&self) -> usize {
        self.leaf_of.len()
    }

    /// Leaf holding object `i`, if inserted.
    pub fn leaf_of(&self, i: usize) -> Option<NodeId> {
        self.leaf_of.get(i).copied().flatten()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> + '_ {
        self.nodes.iter().filter(|n| n.is_leaf && !n.entries.is_empty())
    }

    /// Depth of a node below the root.
    pub fn depth(&self, mut id: NodeId) -> usize {
        let mut depth = 0;
        while let Some(p) = self.nodes[id].parent {
            depth += 1;
            id = p;
        }
        depth
    }

    /// Inserts object `i`.
    pub fn insert(&mut self, ds: &MetricDataset, i: usize) -> Result<()> {
        if i >= self.leaf_of.len() || i >= ds.len() {
            return Err(Error::OutOfBounds {
                index: i,
                n: self.leaf_of.len().min(ds.len()),
            });
        }
        if self.leaf_of[i].is_some() {
            return Err(Error::DuplicateInsertion(i));
        }
        self.root_medoid = None;

        let mut node = self.root;
        let mut dist_to_rep = 0.0;
        while !self.nodes[node].is_leaf {
            let (slot, d) = self.choose_subtree(ds, node, i);
            let entry = &mut self.nodes[node].entries[slot];
            if d > entry.radius {
                entry.radius = d;
            }
            node = entry.child.expect("internal entry without child");
            dist_to_rep = d;
        }

        self.nodes[node].entries.push(Entry {
            object: i,
            radius: 0.0,
            child: None,
            dist_to_parent_rep: dist_to_rep,
        });
        self.leaf_of[i] = Some(node);
        self.stored += 1;
        if self.nodes[node].entries.len() > self.capacity {
            self.split(ds, node);
        }
        Ok(())
    }

    /// Entry nearest to object `i`; ties go to the less occupied child, then
    /// the smaller object id.
    fn choose_subtree(&self, ds: &MetricDataset, node: NodeId, i: usize) -> (usize, f64) {
        let mut best: Option<(usize, f64, usize, usize)> = None;
        for (slot, entry) in self.nodes[node].entries.iter().enumerate() {
            let d = ds.distance(i, entry.object);
            let occupancy = self.nodes[entry.child.expect("internal entry without child")].len();
            let better = match best {
                None => true,
                Some((_, bd, bo, bid)) => {
                    d < bd || (d == bd && (occupancy < bo || (occupancy == bo && entry.object < bid)))
                }
            };
            if better {
                best = Some((slot, d, occupancy, entry.object));
            }
        }
        let (slot, d, _, _) = best.expect("internal node without entries");
        (slot, d)
    }

    /// Caches the representative of a root leaf. Called once construction ends.
    pub fn finalize(&mut self, ds: &MetricDataset) {
        let root = &self.nodes[self.root];
        self.root_medoid = if root.is_leaf && !root.entries.is_empty() {
            let objects: Vec<usize> = root.objects().collect();
            Some(medoid_of(ds, &objects))
        } else {
            None
        };
    }

    /// Text dump, one node per line: `node_id level [obj:radius ...] rep=obj`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self.root, 0usize)];
        while let Some((id, level)) = stack.pop() {
            let node = &self.nodes[id];
            let entries: Vec<String> = node
                .entries
                .iter()
                .map(|e| format!("{}:{}", e.object, e.radius))
                .collect();
            let rep = match self.representative(id) {
                Some(r) => r.to_string(),
                None => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "{}{} {} [{}] rep={}",
                "  ".repeat(level),
                id,
                level,
                entries.join(" "),
                rep
            );
            for e in node.entries.iter().rev() {
                if let Some(child) = e.child {
                    stack.push((child, level + 1));
                }
            }
        }
        out
    }
}

/// Object minimizing its maximum distance to the others; ties to the smallest id.
fn medoid_of(ds: &MetricDataset, objects: &[usize]) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for &a in objects {
        let eccentricity = objects
            .iter()
            .map(|&b| ds.distance(a, b))
            .fold(0.0, f64::max);
        if eccentricity < best.0 || (eccentricity == best.0 && a < best.1) {
            best = (eccentricity, a);
        }
    }
    best.1
}

pub fn validate_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} objects, got {}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n {
            return Err(Error::InvalidPermutation(format!("object {i} out of range")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidPermutation(format!("object {i} repeated")));
        }
    }
    Ok(())
}
