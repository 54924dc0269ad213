use crate::metric::MetricDataset;

use super::{NodeId, SlimTree};

/// Nearest candidate to `i` with ties broken by smallest object id.
pub(crate) fn argmin_by_distance(
    ds: &MetricDataset,
    i: usize,
    candidates: impl IntoIterator<Item = usize>,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for j in candidates {
        let d = ds.distance(i, j);
        match best {
            Some((bj, bd)) if d > bd || (d == bd && j > bj) => {}
            _ => best = Some((j, d)),
        }
    }
    best
}

impl SlimTree {
    /// Objects stored in the root node.
    pub fn root_objects(&self) -> Vec<usize> {
        self.root().objects().collect()
    }

    /// Objects stored in leaf `leaf`.
    pub fn leaf_objects(&self, leaf: NodeId) -> Vec<usize> {
        self.node(leaf).objects().collect()
    }

    /// The object a node shares with its parent. A root leaf uses its medoid;
    /// an internal root has none.
    pub fn representative(&self, node: NodeId) -> Option<usize> {
        let n = self.node(node);
        match n.rep {
            Some(r) => Some(r),
            None if node == self.root_id() && n.is_leaf => self.root_medoid,
            None => None,
        }
    }

    fn leaf_representative(&self, ds: &MetricDataset, leaf: NodeId) -> usize {
        self.representative(leaf).unwrap_or_else(|| {
            let objects = self.leaf_objects(leaf);
            super::medoid_of(ds, &objects)
        })
    }

    /// Representatives of the other children of `leaf`'s parent.
    pub fn sibling_representatives(&self, leaf: NodeId) -> Vec<usize> {
        let node = self.node(leaf);
        match node.parent {
            None => Vec::new(),
            Some(p) => self
                .node(p)
                .entries
                .iter()
                .filter(|e| e.child != Some(leaf))
                .map(|e| e.object)
                .collect(),
        }
    }

    fn leaf_of_checked(&self, i: usize) -> NodeId {
        self.leaf_of(i)
            .unwrap_or_else(|| panic!("object {i} is not stored in the tree"))
    }

    /// Root object nearest to `i`, or `(i, 0)` when `i` is itself a root object.
    pub fn closest_root_object(&self, ds: &MetricDataset, i: usize) -> (usize, f64) {
        let root = self.root_objects();
        if root.contains(&i) {
            return (i, 0.0);
        }
        argmin_by_distance(ds, i, root).expect("root node is empty")
    }

    /// Nearest representative among the sibling leaves of `i`'s leaf.
    pub fn foreign_representative(&self, ds: &MetricDataset, i: usize) -> Option<(usize, f64)> {
        let leaf = self.leaf_of_checked(i);
        argmin_by_distance(ds, i, self.sibling_representatives(leaf))
    }

    /// Nearest other object in `i`'s leaf. A singleton leaf falls back to the
    /// foreign representative, and to `(i, 0)` when there is none.
    pub fn approx_nearest_neighbor(&self, ds: &MetricDataset, i: usize) -> (usize, f64) {
        let leaf = self.leaf_of_checked(i);
        let others = self.node(leaf).objects().filter(|&j| j != i);
        argmin_by_distance(ds, i, others)
            .or_else(|| self.foreign_representative(ds, i))
            .unwrap_or((i, 0.0))
    }

    /// `d(i, nn_i) / (1 + d(rep, nn_rep))` where `rep` represents `i`'s leaf.
    pub fn normalized_nn_distance(&self, ds: &MetricDataset, i: usize) -> f64 {
        let leaf = self.leaf_of_checked(i);
        let rep = self.leaf_representative(ds, leaf);
        let (_, d_i) = self.approx_nearest_neighbor(ds, i);
        let (_, d_rep) = self.approx_nearest_neighbor(ds, rep);
        d_i / (1.0 + d_rep)
    }

    /// `d(rep, farthest) / (1 + d(rep, nn_rep))` for a leaf.
    pub fn normalized_leaf_radius(&self, ds: &MetricDataset, leaf: NodeId) -> f64 {
        assert!(self.node(leaf).is_leaf, "node {leaf} is not a leaf");
        let rep = self.leaf_representative(ds, leaf);
        let farthest = self
            .node(leaf)
            .objects()
            .map(|j| ds.distance(rep, j))
            .fold(0.0, f64::max);
        let (_, d_rep) = self.approx_nearest_neighbor(ds, rep);
        farthest / (1.0 + d_rep)
    }
}

#[cfg(test)]
mod tests {
    use crate::metric::MetricDataset;
    use crate::tree::SlimTree;

    fn line(xs: &[f64]) -> MetricDataset {
        MetricDataset::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_leaf_queries() {
        let ds = line(&[0.0, 1.0, 3.0]);
        let tree = SlimTree::build(&ds, &[0, 1, 2], 8).unwrap();
        let mut root = tree.root_objects();
        root.sort();
        assert_eq!(root, vec![0, 1, 2]);
        assert_eq!(tree.closest_root_object(&ds, 2), (2, 0.0));
        assert_eq!(tree.foreign_representative(&ds, 0), None);
        assert_eq!(tree.approx_nearest_neighbor(&ds, 2), (1, 2.0));
        assert_eq!(tree.approx_nearest_neighbor(&ds, 0), (1, 1.0));
    }

    #[test]
    fn duplicate_is_nearest() {
        let ds = line(&[0.0, 5.0, 0.0]);
        let tree = SlimTree::build(&ds, &[0, 1, 2], 8).unwrap();
        assert_eq!(tree.approx_nearest_neighbor(&ds, 0), (2, 0.0));
    }

    #[test]
    fn identical_leaf_has_zero_nn_distance_and_radius() {
        let ds = line(&[2.0; 4]);
        let tree = SlimTree::build(&ds, &[0, 1, 2, 3], 8).unwrap();
        for i in 0..4 {
            assert_eq!(tree.normalized_nn_distance(&ds, i), 0.0);
        }
        assert_eq!(tree.normalized_leaf_radius(&ds, tree.root_id()), 0.0);
    }

    #[test]
    fn leaf_radius_on_a_line() {
        // the medoid 0 represents the leaf; farthest at 9, nearest at 1 -> 9 / 2
        let ds = line(&[0.0, 1.0, 9.0, -9.0]);
        let tree = SlimTree::build(&ds, &[0, 1, 2, 3], 8).unwrap();
        assert_eq!(tree.representative(tree.root_id()), Some(0));
        assert_eq!(tree.normalized_leaf_radius(&ds, tree.root_id()), 4.5);
        // the representative's own normalized distance is d / (1 + d)
        assert_eq!(tree.normalized_nn_distance(&ds, 0), 0.5);
    }

    #[test]
    fn two_leaf_foreign_representative() {
        let ds = line(&[0.0, 1.0, 2.0, 10.0]);
        let mut tree = SlimTree::new(4, 3).unwrap();
        for i in 0..4 {
            tree.insert(&ds, i).unwrap();
        }
        tree.finalize(&ds);
        assert_eq!(tree.foreign_representative(&ds, 0), Some((3, 10.0)));
        assert_eq!(tree.foreign_representative(&ds, 3), Some((1, 9.0)));
        // singleton leaf falls back to the foreign representative
        assert_eq!(tree.approx_nearest_neighbor(&ds, 3), (1, 9.0));
    }
}
