use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::OutlierKind;

use super::{AnnotatedDataset, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_clusters: usize,
    /// Inclusive range of points per inlier cluster.
    pub points_per_cluster: (usize, usize),
    /// Total outliers; a third each are local and collective, the rest global.
    pub n_outliers: usize,
    /// Range of per-cluster standard deviations.
    pub inlier_std: (f64, f64),
    pub dims: usize,
    pub local_std_factor: f64,
    pub global_std_factor: f64,
    pub collective_cluster_size: usize,
    /// Collective cluster spread as a fraction of the smallest inlier std.
    pub collective_std_fraction: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self::s1()
    }
}

impl SyntheticConfig {
    /// 10 clusters in 2 dimensions with 90 outliers, at desk scale.
    pub fn s1() -> Self {
        Self {
            n_clusters: 10,
            points_per_cluster: (200, 1000),
            n_outliers: 90,
            inlier_std: (10.0, 50.0),
            dims: 2,
            local_std_factor: 5.0,
            global_std_factor: 10.0,
            collective_cluster_size: 10,
            collective_std_fraction: 0.01,
            seed: 0,
        }
    }

    /// 7 clusters in 5 dimensions with 120 outliers.
    pub fn s2() -> Self {
        Self {
            n_clusters: 7,
            n_outliers: 120,
            dims: 5,
            ..Self::s1()
        }
    }

    /// 3 clusters in 10 dimensions with 60 outliers.
    pub fn s3() -> Self {
        Self {
            n_clusters: 3,
            n_outliers: 60,
            dims: 10,
            ..Self::s1()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `(global, local, collective)` outlier counts. Collective outliers are
    /// whole clusters; leftovers from rounding go to global.
    pub fn outlier_counts(&self) -> (usize, usize, usize) {
        let third = self.n_outliers / 3;
        let size = self.collective_cluster_size.max(1);
        let collective = third / size * size;
        (self.n_outliers - third - collective, third, collective)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.n_clusters == 0 {
            return bad("n_clusters must be positive");
        }
        if self.dims == 0 {
            return bad("dims must be positive");
        }
        let (lo, hi) = self.points_per_cluster;
        if lo == 0 || lo > hi {
            return bad("points_per_cluster must be a non-empty positive range");
        }
        let (slo, shi) = self.inlier_std;
        if !(slo.is_finite() && shi.is_finite() && slo > 0.0 && slo <= shi) {
            return bad("inlier_std must be a positive range");
        }
        for (name, v) in [
            ("local_std_factor", self.local_std_factor),
            ("global_std_factor", self.global_std_factor),
            ("collective_std_fraction", self.collective_std_fraction),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.collective_cluster_size == 0 {
            return bad("collective_cluster_size must be positive");
        }
        Ok(())
    }
}

fn gaussian_point(rng: &mut ChaCha8Rng, mean: &[f64], std: f64) -> Vec<f64> {
    mean.iter()
        .map(|&m| {
            let z: f64 = StandardNormal.sample(rng);
            m + std * z
        })
        .collect()
}

/// Generates a labeled dataset of Gaussian clusters plus typed outliers.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<AnnotatedDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = config.n_clusters;

    let stds: Vec<f64> = (0..k)
        .map(|_| {
            if config.inlier_std.0 == config.inlier_std.1 {
                config.inlier_std.0
            } else {
                rng.random_range(config.inlier_std.0..=config.inlier_std.1)
            }
        })
        .collect();
    let sizes: Vec<usize> = (0..k)
        .map(|_| rng.random_range(config.points_per_cluster.0..=config.points_per_cluster.1))
        .collect();
    let max_std = stds.iter().copied().fold(0.0, f64::max);
    let min_std = stds.iter().copied().fold(f64::INFINITY, f64::min);
    // centers live in a box whose side is the cluster count times the widest std
    let side = k as f64 * max_std;
    let centers: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..config.dims).map(|_| rng.random_range(0.0..side)).collect())
        .collect();

    let mut points = Vec::new();
    let mut labels = Vec::new();
    for c in 0..k {
        for _ in 0..sizes[c] {
            points.push(gaussian_point(&mut rng, &centers[c], stds[c]));
            labels.push(OutlierKind::Inlier);
        }
    }

    let (n_global, n_local, n_collective) = config.outlier_counts();
    for _ in 0..n_local {
        let c = rng.random_range(0..k);
        points.push(gaussian_point(&mut rng, &centers[c], stds[c] * config.local_std_factor));
        labels.push(OutlierKind::Local);
    }

    let n_clusters = n_collective / config.collective_cluster_size;
    let globals: Vec<Vec<f64>> = (0..n_global + n_clusters)
        .map(|_| {
            let c = rng.random_range(0..k);
            gaussian_point(&mut rng, &centers[c], stds[c] * config.global_std_factor)
        })
        .collect();
    let mut seeds: Vec<usize> = index::sample(&mut rng, globals.len(), n_clusters).into_vec();
    seeds.sort_unstable();
    let tight = config.collective_std_fraction * min_std;
    for (g, point) in globals.iter().enumerate() {
        if seeds.binary_search(&g).is_ok() {
            points.push(point.clone());
            labels.push(OutlierKind::Collective);
            for _ in 1..config.collective_cluster_size {
                points.push(gaussian_point(&mut rng, point, tight));
                labels.push(OutlierKind::Collective);
            }
        } else {
            points.push(point.clone());
            labels.push(OutlierKind::Global);
        }
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut rng);
    let points = order.iter().map(|&i| points[i].clone()).collect();
    let labels = order.iter().map(|&i| labels[i]).collect();

    Ok(AnnotatedDataset {
        points,
        labels,
        provenance: Provenance::Synthetic {
            config: config.clone(),
        },
    })
}
