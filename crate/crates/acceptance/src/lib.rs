//! Brute-force recomputations used by the acceptance suite. Everything here
//! reads the raw tree arena or the raw data and never goes through the
//! accessors it is compared with.

use callout_core::datagen::{fit_vei, AnnotatedDataset, FitOptions, GmmModel};
use callout_core::tree::NodeId;
use callout_core::{MetricDataset, OutlierKind, Result, SlimTree};

/// Nearest candidate to `i`, smallest id on ties.
pub fn argmin(ds: &MetricDataset, i: usize, candidates: &[usize]) -> Option<(usize, f64)> {
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    let mut best: Option<(usize, f64)> = None;
    for j in sorted {
        let d = ds.distance(i, j);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best
}

pub fn root_set(tree: &SlimTree) -> Vec<usize> {
    tree.nodes()[tree.root_id()].entries.iter().map(|e| e.object).collect()
}

pub fn leaf_holding(tree: &SlimTree, i: usize) -> NodeId {
    let hits: Vec<NodeId> = tree
        .nodes()
        .iter()
        .filter(|n| n.is_leaf && n.entries.iter().any(|e| e.object == i))
        .map(|n| n.id)
        .collect();
    assert_eq!(hits.len(), 1, "object {i} sits in leaves {hits:?}");
    hits[0]
}

/// Objects of the entries sharing a parent with `node`, excluding its own.
pub fn sibling_set(tree: &SlimTree, node: NodeId) -> Vec<usize> {
    tree.nodes()
        .iter()
        .filter(|n| n.entries.iter().any(|e| e.child == Some(node)))
        .flat_map(|n| n.entries.iter().filter(|e| e.child != Some(node)).map(|e| e.object))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectFacts {
    pub closest_root: (usize, f64),
    pub foreign: Option<(usize, f64)>,
    pub nearest: (usize, f64),
}

pub fn object_facts(tree: &SlimTree, ds: &MetricDataset, i: usize) -> ObjectFacts {
    let root = root_set(tree);
    let closest_root = if root.contains(&i) {
        (i, 0.0)
    } else {
        argmin(ds, i, &root).expect("root holds objects")
    };
    let leaf = leaf_holding(tree, i);
    let foreign = argmin(ds, i, &sibling_set(tree, leaf));
    let others: Vec<usize> = tree.nodes()[leaf]
        .entries
        .iter()
        .map(|e| e.object)
        .filter(|&j| j != i)
        .collect();
    let nearest = argmin(ds, i, &others).or(foreign).unwrap_or((i, 0.0));
    ObjectFacts {
        closest_root,
        foreign,
        nearest,
    }
}

/// Overall, global and collective scores plus the normalized neighbor distance.
pub fn scores(tree: &SlimTree, ds: &MetricDataset, i: usize) -> [f64; 4] {
    let facts = object_facts(tree, ds, i);
    let dv = facts.closest_root.1;
    let overall = dv * facts.foreign.map_or(dv, |(_, d)| d);
    let rep = tree.representative(leaf_holding(tree, i)).expect("leaf representative");
    let d_nn = facts.nearest.1 / (1.0 + object_facts(tree, ds, rep).nearest.1);
    [overall, overall * d_nn, overall / (1.0 + d_nn), d_nn]
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn inflated(model: &GmmModel, factor: f64) -> GmmModel {
    let k = model.components();
    GmmModel {
        weights: vec![1.0 / k as f64; k],
        means: model.means.clone(),
        volumes: model.volumes.iter().map(|v| v * factor * factor).collect(),
        shape: model.shape.clone(),
    }
}

/// Likelihood-ratio scores that know how a synthetic testbed was drawn:
/// inliers from a mixture fitted to the inliers, local and global outliers
/// from the same mixture with every std inflated by `local_factor` and
/// `global_factor`. Collective members get `+inf` (assumed found). Returns
/// `(overall, global vs rest, local vs rest)` scores for every point.
pub fn likelihood_ratio_scores(
    ds: &AnnotatedDataset,
    components: std::ops::RangeInclusive<usize>,
    local_factor: f64,
    global_factor: f64,
) -> Result<[Vec<f64>; 3]> {
    let inliers: Vec<Vec<f64>> = ds
        .indices_of(OutlierKind::Inlier)
        .into_iter()
        .map(|i| ds.points[i].clone())
        .collect();
    let mut best: Option<callout_core::datagen::GmmFit> = None;
    for k in components {
        let fit = fit_vei(&inliers, k, 1, &FitOptions::default())?;
        if best.as_ref().is_none_or(|b| fit.bic < b.bic) {
            best = Some(fit);
        }
    }
    let model = best.expect("at least one component count").model;
    let (local, global) = (inflated(&model, local_factor), inflated(&model, global_factor));
    let counts = ds.counts();
    let w_in = (counts.inlier as f64).ln();
    let w_loc = (counts.local.max(1) as f64).ln();
    let w_glob = (counts.global.max(1) as f64).ln();

    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for (p, &label) in ds.points.iter().zip(&ds.labels) {
        if label == OutlierKind::Collective {
            out[0].push(f64::INFINITY);
            out[1].push(f64::NEG_INFINITY);
            out[2].push(f64::NEG_INFINITY);
            continue;
        }
        let li = w_in + model.log_density(p)?;
        let ll = w_loc + local.log_density(p)?;
        let lg = w_glob + global.log_density(p)?;
        out[0].push(log_sum_exp(ll, lg) - li);
        out[1].push(lg - log_sum_exp(li, ll));
        out[2].push(ll - log_sum_exp(li, lg));
    }
    Ok(out)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}
