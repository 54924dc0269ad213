//! Browser bindings: generate a 2-D testbed, run detection on it, and score
//! the rankings against the generator's labels. Everything crosses the
//! boundary as JSON strings.

use callout_core::datagen::{generate_synthetic, SyntheticConfig};
use callout_core::eval::evaluate_rankings;
use callout_core::metric::{Euclidean, MetricDataset};
use callout_core::{c_allout, CallOutConfig, OutlierKind};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use wasm_bindgen::prelude::*;

#[derive(Serialize, Deserialize)]
struct Testbed {
    dims: usize,
    /// Row-major coordinates.
    points: Vec<f64>,
    labels: Vec<OutlierKind>,
}

#[derive(Serialize)]
struct Detection<'a> {
    overall: &'a [usize],
    global: &'a [usize],
    local: &'a [usize],
    collective: &'a [usize],
    s_o: &'a [f64],
    s_g: &'a [f64],
    s_c: &'a [f64],
    d_nn: &'a [f64],
    knee_radius: f64,
    local_set_size: usize,
    /// Sorted distinct normalized leaf radii and where the knee fell.
    radii: &'a [f64],
    knee_index: usize,
    iterations_used: usize,
    distance_calls: u64,
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// A synthetic testbed with `clusters` Gaussian clusters in two dimensions.
#[wasm_bindgen]
pub fn generate(seed: u64, clusters: usize, min_points: usize, max_points: usize, outliers: usize) -> Result<String, JsError> {
    let config = SyntheticConfig {
        n_clusters: clusters,
        points_per_cluster: (min_points, max_points),
        n_outliers: outliers,
        dims: 2,
        seed,
        ..SyntheticConfig::s1()
    };
    let data = generate_synthetic(&config).map_err(js_err)?;
    let testbed = Testbed {
        dims: 2,
        points: data.points.concat(),
        labels: data.labels,
    };
    serde_json::to_string(&testbed).map_err(js_err)
}

/// Runs detection over row-major `points` with `dims` columns.
#[wasm_bindgen]
pub fn detect(points: Vec<f64>, dims: usize, iterations: usize, capacity: usize) -> Result<String, JsError> {
    let ds = MetricDataset::from_flat(points, dims, Arc::new(Euclidean)).map_err(js_err)?;
    let out = c_allout(&ds, &CallOutConfig { iterations, capacity }).map_err(js_err)?;
    let r = &out.rankings;
    let detection = Detection {
        overall: &r.overall,
        global: &r.global,
        local: &r.local,
        collective: &r.collective,
        s_o: &out.scores.overall,
        s_g: &out.scores.global,
        s_c: &out.scores.collective,
        d_nn: &out.scores.d_nn,
        knee_radius: r.knee_radius,
        local_set_size: r.local_set_size,
        radii: &out.profile.radii,
        knee_index: out.profile.knee.index,
        iterations_used: out.diagnostics.iterations_used,
        distance_calls: out.diagnostics.distance_calls,
    };
    serde_json::to_string(&detection).map_err(js_err)
}

/// ROC and PR areas of each ranking against labels, as the JSON metric report.
#[wasm_bindgen]
pub fn evaluate(detection_json: &str, labels_json: &str) -> Result<String, JsError> {
    #[derive(Deserialize)]
    struct Lists {
        overall: Vec<usize>,
        global: Vec<usize>,
        local: Vec<usize>,
        collective: Vec<usize>,
        knee_radius: f64,
        local_set_size: usize,
    }
    let l: Lists = serde_json::from_str(detection_json).map_err(js_err)?;
    let labels: Vec<OutlierKind> = serde_json::from_str(labels_json).map_err(js_err)?;
    let rankings = callout_core::OutlierRankings {
        overall: l.overall,
        global: l.global,
        local: l.local,
        collective: l.collective,
        knee_radius: l.knee_radius,
        local_set_size: l.local_set_size,
    };
    let report = evaluate_rankings(&rankings, &labels).map_err(js_err)?;
    serde_json::to_string(&report).map_err(js_err)
}
