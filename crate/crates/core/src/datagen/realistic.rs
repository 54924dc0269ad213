use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::OutlierKind;

use super::gmm::{fit_gmm_vei, GmmModel};
use super::{collective_cluster_sizes, AnnotatedDataset, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RealisticConfig {
    pub n_global: usize,
    pub n_local: usize,
    pub n_collective: usize,
    /// Largest component count tried by BIC selection.
    pub k_max: usize,
    /// Candidates drawn before the density cull. Defaults to
    /// `10 * (n_global + n_local + collective clusters) / 0.32`, rounded up.
    pub candidate_pool: Option<usize>,
    pub collective_cluster_size: usize,
    /// Collective cluster spread as a fraction of the smallest component std.
    pub collective_std_fraction: f64,
    /// Share of the highest-density candidates discarded.
    pub cull_fraction: f64,
    /// Candidates are drawn with every component std multiplied by this.
    pub std_inflation: f64,
    pub seed: u64,
}

impl Default for RealisticConfig {
    fn default() -> Self {
        Self {
            n_global: 16,
            n_local: 16,
            n_collective: 16,
            k_max: 9,
            candidate_pool: None,
            collective_cluster_size: 10,
            collective_std_fraction: 1e-4,
            cull_fraction: 0.68,
            std_inflation: 5.0,
            seed: 0,
        }
    }
}

impl RealisticConfig {
    pub fn with_counts(mut self, global: usize, local: usize, collective: usize) -> Self {
        self.n_global = global;
        self.n_local = local;
        self.n_collective = collective;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn collective_clusters(&self) -> Vec<usize> {
        collective_cluster_sizes(self.n_collective, self.collective_cluster_size)
    }

    /// Candidates that must survive the cull: globals, locals and one seed
    /// per collective cluster.
    pub fn required_survivors(&self) -> usize {
        self.n_global + self.n_local + self.collective_clusters().len()
    }

    pub fn pool_size(&self) -> usize {
        self.candidate_pool.unwrap_or_else(|| {
            (10.0 * self.required_survivors() as f64 / (1.0 - self.cull_fraction)).ceil() as usize
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be positive".into()));
        }
        if self.collective_cluster_size == 0 {
            return Err(Error::Config("collective_cluster_size must be positive".into()));
        }
        if !(self.cull_fraction >= 0.0 && self.cull_fraction < 1.0) {
            return Err(Error::Config("cull_fraction must lie in [0, 1)".into()));
        }
        for (name, v) in [
            ("collective_std_fraction", self.collective_std_fraction),
            ("std_inflation", self.std_inflation),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

fn sample_component(model: &GmmModel, k: usize, inflation: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..model.dims())
        .map(|j| {
            let z: f64 = StandardNormal.sample(&mut *rng);
            model.means[k][j] + inflation * model.variance(k, j).sqrt() * z
        })
        .collect()
}

/// Appends outliers drawn from an inflated VEI mixture fitted to `inliers`.
///
/// Candidates are culled by mixture density; the lowest-density survivors
/// become global outliers (some of them seeding collective clusters) and
/// the highest-density survivors become local outliers.
pub fn generate_realistic(inliers: &[Vec<f64>], config: &RealisticConfig) -> Result<AnnotatedDataset> {
    config.validate()?;
    if inliers.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut points = inliers.to_vec();
    let mut labels = vec![OutlierKind::Inlier; inliers.len()];
    if config.n_global + config.n_local + config.n_collective == 0 {
        return Ok(AnnotatedDataset {
            points,
            labels,
            provenance: Provenance::Realistic {
                config: config.clone(),
                components: 0,
            },
        });
    }

    let selection = fit_gmm_vei(inliers, config.k_max, config.seed)?;
    let model = &selection.best.model;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let k = model.components();
    let pool = config.pool_size();
    let mut candidates = Vec::with_capacity(pool);
    for c in 0..k {
        let share = pool / k + usize::from(c < pool % k);
        for _ in 0..share {
            let x = sample_component(model, c, config.std_inflation, &mut rng);
            let density = model.log_density(&x)?;
            candidates.push((density, x));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let culled = (config.cull_fraction * pool as f64).floor() as usize;
    let survivors = &candidates[..pool - culled];

    let clusters = config.collective_clusters();
    let n_low = config.n_global + clusters.len();
    let required = n_low + config.n_local;
    if survivors.len() < required {
        return Err(Error::Infeasible(format!(
            "{} candidates survive the density cull but {required} are needed; \
             raise candidate_pool (currently {pool})",
            survivors.len()
        )));
    }

    let low = &survivors[..n_low];
    let high = &survivors[survivors.len() - config.n_local..];

    let mut seeds: Vec<usize> = index::sample(&mut rng, n_low, clusters.len()).into_vec();
    seeds.sort_unstable();
    let tight = config.collective_std_fraction * model.min_std();
    let mut cluster_sizes = clusters.iter();
    for (g, (_, x)) in low.iter().enumerate() {
        if seeds.binary_search(&g).is_ok() {
            let size = *cluster_sizes.next().expect("one size per seed");
            points.push(x.clone());
            labels.push(OutlierKind::Collective);
            for _ in 1..size {
                let p = x
                    .iter()
                    .map(|&m| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        m + tight * z
                    })
                    .collect();
                points.push(p);
                labels.push(OutlierKind::Collective);
            }
        } else {
            points.push(x.clone());
            labels.push(OutlierKind::Global);
        }
    }
    for (_, x) in high {
        points.push(x.clone());
        labels.push(OutlierKind::Local);
    }

    Ok(AnnotatedDataset {
        points,
        labels,
        provenance: Provenance::Realistic {
            config: config.clone(),
            components: k,
        },
    })
}

/// Mixture fitted to the inlier rows of a realistic dataset, for inspection.
pub fn refit_inliers(ds: &AnnotatedDataset) -> Result<GmmModel> {
    let Provenance::Realistic { config, .. } = &ds.provenance else {
        return Err(Error::Input("dataset was not produced by the realistic generator".into()));
    };
    let inliers: Vec<Vec<f64>> = ds
        .indices_of(OutlierKind::Inlier)
        .into_iter()
        .map(|i| ds.points[i].clone())
        .collect();
    Ok(fit_gmm_vei(&inliers, config.k_max, config.seed)?.best.model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = [[0.0, 0.0, 0.0], [20.0, 5.0, -3.0]];
        (0..400)
            .map(|i| {
                let c = &centers[i % 2];
                c.iter()
                    .map(|m| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        m + z
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn zero_counts_pass_inliers_through() {
        let base = blobs(1);
        let cfg = RealisticConfig::default().with_counts(0, 0, 0);
        let ds = generate_realistic(&base, &cfg).unwrap();
        assert_eq!(ds.points, base);
        assert_eq!(ds.counts().outliers(), 0);
    }

    #[test]
    fn exact_counts_and_density_order() {
        let base = blobs(2);
        let cfg = RealisticConfig {
            k_max: 4,
            ..RealisticConfig::default().with_counts(12, 9, 16).with_seed(3)
        };
        let ds = generate_realistic(&base, &cfg).unwrap();
        let c = ds.counts();
        assert_eq!((c.inlier, c.global, c.local, c.collective), (400, 12, 9, 16));
        assert_eq!(&ds.points[..400], &base[..]);

        let model = refit_inliers(&ds).unwrap();
        let dens = |kind| {
            ds.indices_of(kind)
                .into_iter()
                .map(|i| model.log_density(&ds.points[i]).unwrap())
                .collect::<Vec<_>>()
        };
        let max_global = dens(OutlierKind::Global).into_iter().fold(f64::NEG_INFINITY, f64::max);
        let min_local = dens(OutlierKind::Local).into_iter().fold(f64::INFINITY, f64::min);
        assert!(max_global < min_local);
    }

    #[test]
    fn infeasible_pool() {
        let base = blobs(4);
        let cfg = RealisticConfig {
            k_max: 2,
            candidate_pool: Some(20),
            ..RealisticConfig::default().with_counts(10, 10, 0)
        };
        let err = generate_realistic(&base, &cfg).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        assert!(err.to_string().contains("candidate_pool"));
    }
}
