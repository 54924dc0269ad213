use serde::{Deserialize, Serialize};

use crate::metric::MetricDataset;
use crate::tree::{NodeId, SlimTree};

use super::par::par_map;

/// Per-object tree facts and scores extracted from a built tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    /// Overall score: distance to the closest root object times distance to
    /// the foreign representative.
    pub overall: Vec<f64>,
    /// `overall * d_nn`.
    pub global: Vec<f64>,
    /// `overall / (1 + d_nn)`.
    pub collective: Vec<f64>,
    /// Normalized approximate nearest-neighbor distance.
    pub d_nn: Vec<f64>,
    pub closest_root: Vec<(usize, f64)>,
    pub foreign: Vec<Option<(usize, f64)>>,
    pub nearest: Vec<(usize, f64)>,
    /// Normalized radius of every non-empty leaf, by node id.
    pub leaf_radius: Vec<(NodeId, f64)>,
}

impl ScoreTable {
    pub fn len(&self) -> usize {
        self.overall.len()
    }

    pub fn is_empty(&self) -> bool {
        self.overall.is_empty()
    }
}

/// `(v_i, f_i)` for one object.
fn root_and_foreign(tree: &SlimTree, ds: &MetricDataset, i: usize) -> ((usize, f64), Option<(usize, f64)>) {
    (
        tree.closest_root_object(ds, i),
        tree.foreign_representative(ds, i),
    )
}

/// Overall score from the closest-root and foreign-representative distances.
/// Without a foreign representative the closest-root distance is squared.
pub fn overall_score(closest_root: f64, foreign: Option<f64>) -> f64 {
    closest_root * foreign.unwrap_or(closest_root)
}

pub fn global_score(overall: f64, d_nn: f64) -> f64 {
    overall * d_nn
}

pub fn collective_score(overall: f64, d_nn: f64) -> f64 {
    overall / (1.0 + d_nn)
}

/// Overall score of every object.
pub fn overall_scores(tree: &SlimTree, ds: &MetricDataset) -> Vec<f64> {
    par_map(ds.len(), |i| {
        let ((_, dv), f) = root_and_foreign(tree, ds, i);
        overall_score(dv, f.map(|(_, d)| d))
    })
}

struct LeafFacts {
    /// `(object, nearest neighbor)` for every object in the leaf.
    nearest: Vec<(usize, (usize, f64))>,
    radius: f64,
    rep_nn: f64,
}

fn leaf_facts(tree: &SlimTree, ds: &MetricDataset, leaf: NodeId) -> LeafFacts {
    let objects = tree.leaf_objects(leaf);
    let m = objects.len();
    let mut dist = vec![0.0; m * m];
    for a in 0..m {
        for b in (a + 1)..m {
            let d = ds.distance(objects[a], objects[b]);
            dist[a * m + b] = d;
            dist[b * m + a] = d;
        }
    }
    let nearest: Vec<(usize, (usize, f64))> = (0..m)
        .map(|a| {
            let mut best: Option<(usize, f64)> = None;
            for b in (0..m).filter(|&b| b != a) {
                let (j, d) = (objects[b], dist[a * m + b]);
                match best {
                    Some((bj, bd)) if d > bd || (d == bd && j > bj) => {}
                    _ => best = Some((j, d)),
                }
            }
            let nn = best
                .or_else(|| tree.foreign_representative(ds, objects[a]))
                .unwrap_or((objects[a], 0.0));
            (objects[a], nn)
        })
        .collect();
    let rep = tree
        .representative(leaf)
        .expect("finalized tree has a representative for every leaf");
    let rep_pos = objects
        .iter()
        .position(|&o| o == rep)
        .expect("representative is stored in its leaf");
    let rep_nn = nearest[rep_pos].1 .1;
    let farthest = (0..m).map(|b| dist[rep_pos * m + b]).fold(0.0, f64::max);
    LeafFacts {
        nearest,
        radius: farthest / (1.0 + rep_nn),
        rep_nn,
    }
}

/// Computes every score and tree fact for a finalized tree.
pub fn score_table(tree: &SlimTree, ds: &MetricDataset) -> ScoreTable {
    let n = ds.len();
    let leaves: Vec<NodeId> = tree.leaves().map(|l| l.id).collect();
    let facts = par_map(leaves.len(), |k| leaf_facts(tree, ds, leaves[k]));

    let mut nearest = vec![(0, 0.0); n];
    let mut d_nn = vec![0.0; n];
    let mut leaf_radius = Vec::with_capacity(leaves.len());
    for (leaf, f) in leaves.iter().zip(&facts) {
        for &(i, nn) in &f.nearest {
            nearest[i] = nn;
            d_nn[i] = nn.1 / (1.0 + f.rep_nn);
        }
        leaf_radius.push((*leaf, f.radius));
    }

    let pairs = par_map(n, |i| root_and_foreign(tree, ds, i));
    let (closest_root, foreign): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let overall: Vec<f64> = closest_root
        .iter()
        .zip(&foreign)
        .map(|(v, f)| overall_score(v.1, f.map(|(_, d)| d)))
        .collect();
    let global = overall
        .iter()
        .zip(&d_nn)
        .map(|(&o, &d)| global_score(o, d))
        .collect();
    let collective = overall
        .iter()
        .zip(&d_nn)
        .map(|(&o, &d)| collective_score(o, d))
        .collect();

    ScoreTable {
        overall,
        global,
        collective,
        d_nn,
        closest_root,
        foreign,
        nearest,
        leaf_radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> MetricDataset {
        MetricDataset::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identical_points_score_zero() {
        let ds = MetricDataset::from_rows(&vec![vec![3.0, 3.0]; 40]).unwrap();
        let tree = SlimTree::build(&ds, &(0..40).collect::<Vec<_>>(), 4).unwrap();
        let table = score_table(&tree, &ds);
        assert!(table.overall.iter().all(|&s| s == 0.0));
        assert!(table.d_nn.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn root_objects_with_siblings_score_zero() {
        let xs: Vec<f64> = (0..30).map(|i| (i % 10) as f64 + 100.0 * (i / 10) as f64).collect();
        let ds = line(&xs);
        let tree = SlimTree::build(&ds, &(0..30).collect::<Vec<_>>(), 4).unwrap();
        let table = score_table(&tree, &ds);
        for i in tree.root_objects() {
            if table.foreign[i].is_some() {
                assert_eq!(table.overall[i], 0.0);
            }
        }
    }

    #[test]
    fn table_matches_tree_accessors() {
        let xs: Vec<f64> = (0..60).map(|i| ((i * 37) % 61) as f64 * 0.7).collect();
        let ds = line(&xs);
        let tree = SlimTree::build(&ds, &(0..60).collect::<Vec<_>>(), 5).unwrap();
        let table = score_table(&tree, &ds);
        for i in 0..60 {
            assert_eq!(table.nearest[i], tree.approx_nearest_neighbor(&ds, i));
            assert_eq!(table.d_nn[i], tree.normalized_nn_distance(&ds, i));
        }
        for &(leaf, r) in &table.leaf_radius {
            assert_eq!(r, tree.normalized_leaf_radius(&ds, leaf));
        }
        assert_eq!(table.overall, overall_scores(&tree, &ds));
    }

    #[test]
    fn score_helpers() {
        assert_eq!(overall_score(2.0, Some(3.0)), 6.0);
        assert_eq!(overall_score(2.0, None), 4.0);
        assert_eq!(global_score(0.0, 5.0), 0.0);
        assert_eq!(global_score(3.0, 0.0), 0.0);
        assert_eq!(collective_score(3.0, 0.0), 3.0);
        assert_eq!(collective_score(0.0, 2.0), 0.0);
    }
}
