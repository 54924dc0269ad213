//! The detector: refine a Slim-tree with its own overall ranking, then read
//! the four type-focused rankings off the refined tree.

mod knee;
mod par;
mod ranking;
mod scores;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricDataset;
use crate::tree::{SlimTree, DEFAULT_CAPACITY};

pub use knee::{difference_curve, kneedle, kneedle_detect, kneedle_with_shape, Knee, KneeShape};
pub use ranking::{is_permutation, local_ranking, rank_from_scores, Direction};
pub use scores::{
    collective_score, global_score, overall_score, overall_scores, score_table, ScoreTable,
};

/// Default maximum number of refinement iterations.
pub const DEFAULT_ITERATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallOutConfig {
    /// Maximum refinement iterations (`b`).
    pub iterations: usize,
    /// Slim-tree node capacity (`c`).
    pub capacity: usize,
}

impl Default for CallOutConfig {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            capacity: DEFAULT_CAPACITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRankings {
    pub overall: Vec<usize>,
    pub global: Vec<usize>,
    pub local: Vec<usize>,
    pub collective: Vec<usize>,
    pub knee_radius: f64,
    /// Number of leading entries of `local` that form the large-radius set.
    pub local_set_size: usize,
}

/// Sorted distinct normalized leaf radii and the knee found on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiiProfile {
    pub radii: Vec<f64>,
    pub knee: Knee,
}

impl RadiiProfile {
    pub fn knee_radius(&self) -> f64 {
        self.knee.value
    }
}

/// Result of the refinement phase.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub tree: SlimTree,
    pub overall: Vec<usize>,
    pub iterations_used: usize,
    /// Overall ranking produced by every iteration, in order.
    pub history: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations_used: usize,
    pub distance_calls: u64,
    pub tree_height: usize,
    pub leaves: usize,
    pub root_objects: usize,
}

#[derive(Debug, Clone)]
pub struct CallOutOutput {
    pub rankings: OutlierRankings,
    pub scores: ScoreTable,
    pub profile: RadiiProfile,
    pub diagnostics: Diagnostics,
    pub refinement: Refinement,
}

/// Builds trees in the reverse of the current order and re-ranks until the
/// overall ranking reproduces the order or `iterations` trees were built.
pub fn refine(ds: &MetricDataset, iterations: usize, capacity: usize) -> Result<Refinement> {
    if iterations == 0 {
        return Err(Error::Config("at least one refinement iteration is required".into()));
    }
    let mut order: Vec<usize> = (0..ds.len()).collect();
    let mut history = Vec::new();
    let mut last = None;
    for _ in 0..iterations {
        let tree = SlimTree::build(ds, &order, capacity)?;
        let overall = rank_from_scores(&overall_scores(&tree, ds), Direction::Descending);
        history.push(overall.clone());
        let fixed = overall == order;
        last = Some((tree, overall.clone()));
        if fixed {
            break;
        }
        order = overall;
    }
    let (tree, overall) = last.expect("at least one iteration ran");
    Ok(Refinement {
        tree,
        overall,
        iterations_used: history.len(),
        history,
    })
}

/// Distinct normalized leaf radii, ascending, with their knee.
pub fn knee_radius(scores: &ScoreTable) -> Result<RadiiProfile> {
    let mut radii: Vec<f64> = scores.leaf_radius.iter().map(|&(_, r)| r).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let knee = kneedle_detect(&radii)?;
    Ok(RadiiProfile { radii, knee })
}

/// Runs both phases and returns the four rankings with their score table.
pub fn c_allout(ds: &MetricDataset, config: &CallOutConfig) -> Result<CallOutOutput> {
    if ds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let start_calls = ds.distance_calls();
    let refinement = refine(ds, config.iterations, config.capacity)?;
    let tree = &refinement.tree;
    let scores = score_table(tree, ds);
    let profile = knee_radius(&scores)?;

    let global = rank_from_scores(&scores.global, Direction::Descending);
    let collective = rank_from_scores(&scores.collective, Direction::Descending);
    let (local, local_set_size) = local_ranking(&scores.global, &scores.d_nn, profile.knee_radius());

    let rankings = OutlierRankings {
        overall: refinement.overall.clone(),
        global,
        local,
        collective,
        knee_radius: profile.knee_radius(),
        local_set_size,
    };
    let diagnostics = Diagnostics {
        iterations_used: refinement.iterations_used,
        distance_calls: ds.distance_calls() - start_calls,
        tree_height: tree.height(),
        leaves: tree.leaves().count(),
        root_objects: tree.root().len(),
    };
    Ok(CallOutOutput {
        rankings,
        scores,
        profile,
        diagnostics,
        refinement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_object() {
        let ds = MetricDataset::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let out = c_allout(&ds, &CallOutConfig::default()).unwrap();
        assert!(out.refinement.iterations_used <= 2);
        for r in [
            &out.rankings.overall,
            &out.rankings.global,
            &out.rankings.local,
            &out.rankings.collective,
        ] {
            assert_eq!(r, &vec![0]);
        }
    }

    #[test]
    fn refine_needs_an_iteration() {
        let ds = MetricDataset::from_rows(&[vec![1.0]]).unwrap();
        assert!(refine(&ds, 0, 8).is_err());
    }

    #[test]
    fn fixed_point_detected_on_second_pass() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 7) as f64 * 1.3, (i / 7) as f64 + if i == 39 { 50.0 } else { 0.0 }])
            .collect();
        let ds = MetricDataset::from_rows(&rows).unwrap();
        let first = refine(&ds, 1, 4).unwrap();
        // feed the first ranking back: a fixed point needs exactly one more pass
        let tree = SlimTree::build(&ds, &first.overall, 4).unwrap();
        let again = rank_from_scores(&overall_scores(&tree, &ds), Direction::Descending);
        let full = refine(&ds, 10, 4).unwrap();
        if again == first.overall {
            assert_eq!(full.iterations_used, 2);
        }
        assert!(full.iterations_used <= 10);
        if full.iterations_used < 10 {
            let tree = SlimTree::build(&ds, &full.overall, 4).unwrap();
            let re = rank_from_scores(&overall_scores(&tree, &ds), Direction::Descending);
            assert_eq!(re, full.overall);
        }
    }

    #[test]
    fn knee_radius_of_single_leaf() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let ds = MetricDataset::from_rows(&rows).unwrap();
        let out = c_allout(&ds, &CallOutConfig::default()).unwrap();
        assert_eq!(out.profile.radii.len(), 1);
        assert_eq!(out.rankings.knee_radius, out.scores.leaf_radius[0].1);
    }
}
