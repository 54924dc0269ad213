use crate::metric::MetricDataset;

use super::{Entry, NodeId, SlimTree, TreeNode};

/// Two-way partition of a node's entries along its minimal spanning tree.
#[derive(Debug, Clone, PartialEq)]
pub struct MstPartition {
    /// Positions (into the input) of the component holding position 0.
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    /// The removed edge as input positions, plus its weight.
    pub cut: (usize, usize, f64),
}

/// Smallest share of a split node's entries that either half must receive.
pub const MIN_OCCUPANCY: f64 = 0.25;

/// Minimum entries per half when splitting `m` entries.
pub fn min_side(m: usize) -> usize {
    ((MIN_OCCUPANCY * m as f64).floor() as usize).max(1)
}

/// Prim from position 0; keys only move on strict improvement. Returns
/// `(parent, child, weight)` edges in insertion order.
fn prim(m: usize, dist: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut in_tree = vec![false; m];
    let mut key = vec![f64::INFINITY; m];
    let mut link = vec![0usize; m];
    key[0] = 0.0;
    let mut edges = Vec::with_capacity(m - 1);
    for step in 0..m {
        let mut next = usize::MAX;
        for v in 0..m {
            if !in_tree[v] && (next == usize::MAX || key[v] < key[next]) {
                next = v;
            }
        }
        in_tree[next] = true;
        if step > 0 {
            edges.push((link[next], next, key[next]));
        }
        for v in 0..m {
            if !in_tree[v] && dist[next * m + v] < key[v] {
                key[v] = dist[next * m + v];
                link[v] = next;
            }
        }
    }
    edges
}

/// Builds the MST over `ids` from the dense distance matrix `dist` (row-major,
/// `ids.len()` squared) and removes its longest edge among those leaving at
/// least `min_side` entries on both sides. Equal-weight edges are resolved
/// towards the lexicographically largest `(min id, max id)` pair.
///
/// When no edge is balanced enough, the longest edge is cut and the smaller
/// side absorbs its nearest entries from the other side until it holds
/// `min_side` of them.
pub fn mst_partition(ids: &[usize], dist: &[f64], min_side: usize) -> MstPartition {
    let m = ids.len();
    assert!(m >= 2, "cannot split fewer than two entries");
    assert_eq!(dist.len(), m * m);
    let min_side = min_side.clamp(1, m / 2);
    let edges = prim(m, dist);

    // edges are (parent, child) of the tree rooted at position 0, and every
    // child appears after its parent, so sizes accumulate in reverse
    let mut subtree = vec![1usize; m];
    for &(a, b, _) in edges.iter().rev() {
        subtree[a] += subtree[b];
    }

    let pair = |a: usize, b: usize| (ids[a].min(ids[b]), ids[a].max(ids[b]));
    let longest = |x: &&(usize, usize, f64), y: &&(usize, usize, f64)| {
        x.2.total_cmp(&y.2)
            .then_with(|| pair(x.0, x.1).cmp(&pair(y.0, y.1)))
    };
    let balanced = edges
        .iter()
        .filter(|e| subtree[e.1] >= min_side && m - subtree[e.1] >= min_side)
        .max_by(longest);
    let cut = *balanced
        .or_else(|| edges.iter().max_by(longest))
        .expect("spanning tree has at least one edge");

    // components of the forest left after removing the cut edge
    let mut adjacency = vec![Vec::new(); m];
    for &(a, b, _) in &edges {
        if (a, b) != (cut.0, cut.1) {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    let mut side = vec![false; m];
    let mut stack = vec![0usize];
    side[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adjacency[v] {
            if !side[u] {
                side[u] = true;
                stack.push(u);
            }
        }
    }

    // top up an undersized side with the nearest entries of the other one
    let first_size = side.iter().filter(|&&s| s).count();
    let short = if first_size < min_side {
        Some((true, min_side - first_size))
    } else if m - first_size < min_side {
        Some((false, min_side - (m - first_size)))
    } else {
        None
    };
    if let Some((target, missing)) = short {
        for _ in 0..missing {
            let next = (1..m)
                .filter(|&v| side[v] != target)
                .map(|v| {
                    let gap = (0..m)
                        .filter(|&u| side[u] == target)
                        .map(|u| dist[u * m + v])
                        .fold(f64::INFINITY, f64::min);
                    (gap, ids[v], v)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .expect("the larger side can spare an entry")
                .2;
            side[next] = target;
        }
    }
    let (first, second): (Vec<usize>, Vec<usize>) = (0..m).partition(|&v| side[v]);
    MstPartition { first, second, cut }
}

/// Position in `group` of the object with the smallest maximum distance to the rest.
fn medoid(group: &[usize], ids: &[usize], dist: &[f64], m: usize) -> usize {
    let mut best = (f64::INFINITY, usize::MAX, 0usize);
    for &a in group {
        let ecc = group.iter().map(|&b| dist[a * m + b]).fold(0.0, f64::max);
        if ecc < best.0 || (ecc == best.0 && ids[a] < best.1) {
            best = (ecc, ids[a], a);
        }
    }
    best.2
}

impl SlimTree {
    /// Splits an overflowing node in two and installs both halves in its
    /// parent, recursing upward while parents overflow.
    pub(super) fn split(&mut self, ds: &MetricDataset, node_id: NodeId) {
        let node = &self.nodes[node_id];
        let entries = node.entries.clone();
        let is_leaf = node.is_leaf;
        let parent = node.parent;
        let old_rep = node.rep;
        let ids: Vec<usize> = entries.iter().map(|e| e.object).collect();
        let m = ids.len();

        let mut dist = vec![0.0; m * m];
        for a in 0..m {
            for b in (a + 1)..m {
                let d = ds.distance(ids[a], ids[b]);
                dist[a * m + b] = d;
                dist[b * m + a] = d;
            }
        }
        let partition = mst_partition(&ids, &dist, min_side(m));

        // The parent keeps this node's representative only if that object is
        // also the parent's own representative; then it must stay promoted.
        let pinned = match (parent, old_rep) {
            (Some(p), Some(rep)) if self.nodes[p].rep == Some(rep) => Some(rep),
            _ => None,
        };
        let pick_rep = |group: &[usize]| -> usize {
            match pinned {
                Some(rep) => group
                    .iter()
                    .copied()
                    .find(|&a| ids[a] == rep)
                    .unwrap_or_else(|| medoid(group, &ids, &dist, m)),
                None => medoid(group, &ids, &dist, m),
            }
        };

        let new_id = self.nodes.len();
        let mut promoted = Vec::with_capacity(2);
        for (group, id) in [(&partition.first, node_id), (&partition.second, new_id)] {
            let rep = pick_rep(group);
            let mut radius: f64 = 0.0;
            let group_entries: Vec<Entry> = group
                .iter()
                .map(|&a| {
                    let d = dist[a * m + rep];
                    radius = radius.max(d + entries[a].radius);
                    Entry {
                        dist_to_parent_rep: d,
                        ..entries[a].clone()
                    }
                })
                .collect();
            let fresh = TreeNode {
                id,
                entries: group_entries,
                parent,
                is_leaf,
                rep: Some(ids[rep]),
            };
            if id == self.nodes.len() {
                self.nodes.push(fresh);
            } else {
                self.nodes[id] = fresh;
            }
            for k in 0..self.nodes[id].entries.len() {
                let (object, child) = {
                    let e = &self.nodes[id].entries[k];
                    (e.object, e.child)
                };
                match child {
                    Some(child) => self.nodes[child].parent = Some(id),
                    None => self.leaf_of[object] = Some(id),
                }
            }
            promoted.push((ids[rep], radius, id));
        }

        match parent {
            None => {
                let root_id = self.nodes.len();
                self.nodes.push(TreeNode {
                    id: root_id,
                    entries: promoted
                        .iter()
                        .map(|&(object, radius, child)| Entry {
                            object,
                            radius,
                            child: Some(child),
                            dist_to_parent_rep: 0.0,
                        })
                        .collect(),
                    parent: None,
                    is_leaf: false,
                    rep: None,
                });
                for &(_, _, child) in &promoted {
                    self.nodes[child].parent = Some(root_id);
                }
                self.root = root_id;
                self.height += 1;
            }
            Some(p) => {
                let slot = self.nodes[p]
                    .entries
                    .iter()
                    .position(|e| e.child == Some(node_id))
                    .expect("split node missing from its parent");
                let old_entry = self.nodes[p].entries[slot].clone();
                let parent_rep = self.nodes[p].rep;
                let mut installed = promoted.iter().map(|&(object, radius, child)| {
                    let dist_to_parent_rep = if object == old_entry.object {
                        old_entry.dist_to_parent_rep
                    } else {
                        parent_rep.map_or(0.0, |r| ds.distance(object, r))
                    };
                    Entry {
                        object,
                        radius,
                        child: Some(child),
                        dist_to_parent_rep,
                    }
                });
                let first = installed.next().expect("two halves");
                let second = installed.next().expect("two halves");
                self.nodes[p].entries[slot] = first;
                self.nodes[p].entries.insert(slot + 1, second);
                if self.nodes[p].entries.len() > self.capacity {
                    self.split(ds, p);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(points: &[f64]) -> Vec<f64> {
        let m = points.len();
        let mut d = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                d[a * m + b] = (points[a] - points[b]).abs();
            }
        }
        d
    }

    #[test]
    fn longest_edge_on_a_line() {
        let ids = [0, 1, 2, 3];
        let p = mst_partition(&ids, &dense(&[0.0, 1.0, 2.0, 10.0]), 1);
        assert_eq!(p.first, vec![0, 1, 2]);
        assert_eq!(p.second, vec![3]);
        assert_eq!(p.cut, (2, 3, 8.0));
    }

    #[test]
    fn identical_entries_split_one_versus_rest() {
        let ids = [4, 9, 2, 7];
        let p = mst_partition(&ids, &[0.0; 16], 1);
        // star from position 0; the largest id pair is (4, 9) -> position 1 cut off
        assert_eq!(p.second, vec![1]);
        assert_eq!(p.first, vec![0, 2, 3]);
    }

    #[test]
    fn two_clusters_split_on_boundary() {
        let ids = [0, 1, 2, 3];
        let p = mst_partition(&ids, &dense(&[0.0, 100.0, 1.0, 101.0]), 1);
        assert_eq!(p.first, vec![0, 2]);
        assert_eq!(p.second, vec![1, 3]);
        assert_eq!(p.cut.2, 99.0);
    }
}
