//! Gaussian mixtures with VEI covariance: diagonal, a volume per component
//! and one shape shared by all components (`Sigma_k = volume_k * diag(shape)`,
//! `prod(shape) = 1`). Fitted by EM with a conditional-maximization M-step
//! and selected by BIC.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmModel {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub volumes: Vec<f64>,
    pub shape: Vec<f64>,
}

impl GmmModel {
    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn dims(&self) -> usize {
        self.shape.len()
    }

    /// Variance of component `k` along axis `j`.
    pub fn variance(&self, k: usize, j: usize) -> f64 {
        self.volumes[k] * self.shape[j]
    }

    /// Smallest per-axis standard deviation over all components.
    pub fn min_std(&self) -> f64 {
        (0..self.components())
            .flat_map(|k| (0..self.dims()).map(move |j| (k, j)))
            .map(|(k, j)| self.variance(k, j).sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    fn component_log_density(&self, k: usize, x: &[f64]) -> f64 {
        let d = self.dims() as f64;
        let mut quad = 0.0;
        let mut log_det = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            let var = self.variance(k, j);
            let diff = xj - self.means[k][j];
            quad += diff * diff / var;
            log_det += var.ln();
        }
        -0.5 * (d * (2.0 * PI).ln() + log_det + quad)
    }

    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims() {
            return Err(Error::Dimension {
                expected: self.dims(),
                found: x.len(),
            });
        }
        let terms: Vec<f64> = (0..self.components())
            .map(|k| self.weights[k].ln() + self.component_log_density(k, x))
            .collect();
        Ok(log_sum_exp(&terms))
    }

    /// Mixture density at `x`.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        self.log_density(x).map(f64::exp)
    }

    /// Free parameters: weights, means, volumes and the shared shape.
    pub fn parameter_count(&self) -> usize {
        let (k, d) = (self.components(), self.dims());
        (k - 1) + k * d + k + (d - 1)
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop when the relative log-likelihood change drops below this.
    pub tolerance: f64,
    /// Variance floor as a fraction of the mean per-axis data variance.
    pub variance_floor: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-6,
            variance_floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmFit {
    pub model: GmmModel,
    /// Log-likelihood after every E-step.
    pub log_likelihood: Vec<f64>,
    /// `-2 log L + p ln n`; smaller is better.
    pub bic: f64,
    pub converged: bool,
}

impl GmmFit {
    pub fn final_log_likelihood(&self) -> f64 {
        *self.log_likelihood.last().expect("at least one E-step")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmSelection {
    pub best: GmmFit,
    /// BIC of every component count that could be fitted.
    pub bic_by_k: Vec<(usize, f64)>,
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let d = points.first().ok_or(Error::EmptyInput)?.len();
    if d == 0 {
        return Err(Error::Dimension { expected: 1, found: 0 });
    }
    for p in points {
        if p.len() != d {
            return Err(Error::Dimension { expected: d, found: p.len() });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Fit("non-finite input value".into()));
        }
    }
    Ok(d)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Farthest-point seeding: a random first center, then repeatedly the point
/// farthest from all chosen centers (ties to the smallest index).
fn farthest_point_seeds(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let n = points.len();
    let first = rng.random_range(0..n);
    let mut seeds = vec![first];
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    while seeds.len() < k {
        let (next, far) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
        if far <= 0.0 {
            return Err(Error::Fit(format!(
                "only {} distinct points, cannot seed {k} components",
                seeds.len()
            )));
        }
        seeds.push(next);
        for (i, p) in points.iter().enumerate() {
            nearest[i] = nearest[i].min(sq_dist(p, &points[next]));
        }
    }
    Ok(seeds)
}

struct EmState<'a> {
    points: &'a [Vec<f64>],
    dims: usize,
    floor: f64,
}

impl EmState<'_> {
    /// M-step from responsibilities `resp` (row-major `n x k`), reusing the
    /// previous shape as the starting point of the volume/shape iteration.
    fn maximize(&self, resp: &[f64], k: usize, previous: Option<&GmmModel>) -> GmmModel {
        let n = self.points.len();
        let d = self.dims;
        let mut counts = vec![0.0; k];
        let mut means = vec![vec![0.0; d]; k];
        for (i, p) in self.points.iter().enumerate() {
            for c in 0..k {
                let r = resp[i * k + c];
                counts[c] += r;
                for j in 0..d {
                    means[c][j] += r * p[j];
                }
            }
        }
        for c in 0..k {
            if counts[c] > 0.0 {
                for v in &mut means[c] {
                    *v /= counts[c];
                }
            } else if let Some(prev) = previous {
                means[c] = prev.means[c].clone();
            }
        }
        // per-component, per-axis weighted scatter
        let mut scatter = vec![vec![0.0; d]; k];
        for (i, p) in self.points.iter().enumerate() {
            for c in 0..k {
                let r = resp[i * k + c];
                if r == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let diff = p[j] - means[c][j];
                    scatter[c][j] += r * diff * diff;
                }
            }
        }

        let mut shape = previous.map_or_else(|| vec![1.0; d], |m| m.shape.clone());
        let mut volumes = vec![1.0; k];
        for _ in 0..100 {
            let min_shape = shape.iter().copied().fold(f64::INFINITY, f64::min);
            for c in 0..k {
                volumes[c] = if counts[c] > 0.0 {
                    let s: f64 = (0..d).map(|j| scatter[c][j] / shape[j]).sum();
                    (s / (d as f64 * counts[c])).max(self.floor / min_shape)
                } else {
                    previous.map_or(self.floor / min_shape, |m| m.volumes[c])
                };
            }
            let raw: Vec<f64> = (0..d)
                .map(|j| {
                    (0..k)
                        .map(|c| scatter[c][j] / volumes[c])
                        .sum::<f64>()
                        .max(f64::MIN_POSITIVE)
                })
                .collect();
            let log_gm = raw.iter().map(|v| v.ln()).sum::<f64>() / d as f64;
            let next: Vec<f64> = raw.iter().map(|v| (v.ln() - log_gm).exp()).collect();
            let change = next
                .iter()
                .zip(&shape)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            shape = next;
            if change < 1e-12 {
                break;
            }
        }
        // volumes consistent with the final shape
        let min_shape = shape.iter().copied().fold(f64::INFINITY, f64::min);
        for c in 0..k {
            if counts[c] > 0.0 {
                let s: f64 = (0..d).map(|j| scatter[c][j] / shape[j]).sum();
                volumes[c] = (s / (d as f64 * counts[c])).max(self.floor / min_shape);
            }
        }

        // the floor can make the alternation overshoot; never do worse than
        // the previous covariances, which already respect it
        if let Some(prev) = previous {
            let objective = |volumes: &[f64], shape: &[f64]| -> f64 {
                (0..k)
                    .map(|c| {
                        (0..d)
                            .map(|j| {
                                let v = volumes[c] * shape[j];
                                -0.5 * (counts[c] * v.ln() + scatter[c][j] / v)
                            })
                            .sum::<f64>()
                    })
                    .sum()
            };
            if objective(&volumes, &shape) < objective(&prev.volumes, &prev.shape) {
                volumes = prev.volumes.clone();
                shape = prev.shape.clone();
            }
        }

        GmmModel {
            weights: counts.iter().map(|c| c / n as f64).collect(),
            means,
            volumes,
            shape,
        }
    }

    /// E-step: fills `resp` and returns the log-likelihood.
    fn expect(&self, model: &GmmModel, resp: &mut [f64]) -> f64 {
        let k = model.components();
        let mut total = 0.0;
        let mut terms = vec![0.0; k];
        for (i, p) in self.points.iter().enumerate() {
            for (c, t) in terms.iter_mut().enumerate() {
                *t = model.weights[c].ln() + model.component_log_density(c, p);
            }
            let lse = log_sum_exp(&terms);
            total += lse;
            for c in 0..k {
                resp[i * k + c] = (terms[c] - lse).exp();
            }
        }
        total
    }
}

/// Fits a `k`-component VEI mixture by EM.
pub fn fit_vei(points: &[Vec<f64>], k: usize, seed: u64, options: &FitOptions) -> Result<GmmFit> {
    let d = check_points(points)?;
    let n = points.len();
    if k == 0 || n <= k {
        return Err(Error::Fit(format!("need more than {k} points for {k} components, got {n}")));
    }
    let mean: Vec<f64> = (0..d)
        .map(|j| points.iter().map(|p| p[j]).sum::<f64>() / n as f64)
        .collect();
    let data_var = (0..d)
        .map(|j| points.iter().map(|p| (p[j] - mean[j]).powi(2)).sum::<f64>() / n as f64)
        .sum::<f64>()
        / d as f64;
    if data_var <= 0.0 {
        return Err(Error::Fit(
            "all points are identical; every variance would fall to the variance floor".into(),
        ));
    }
    let state = EmState {
        points,
        dims: d,
        floor: options.variance_floor * data_var,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = farthest_point_seeds(points, k, &mut rng)?;
    let mut resp = vec![0.0; n * k];
    for (i, p) in points.iter().enumerate() {
        let nearest = (0..k)
            .min_by(|&a, &b| {
                sq_dist(p, &points[seeds[a]]).total_cmp(&sq_dist(p, &points[seeds[b]]))
            })
            .expect("k > 0");
        resp[i * k + nearest] = 1.0;
    }

    let mut model = state.maximize(&resp, k, None);
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..options.max_iterations {
        let ll = state.expect(&model, &mut resp);
        if !ll.is_finite() {
            return Err(Error::Fit("log-likelihood is not finite".into()));
        }
        let done = trace
            .last()
            .is_some_and(|&prev: &f64| ((ll - prev) / ll.abs()).abs() < options.tolerance);
        trace.push(ll);
        if done {
            converged = true;
            break;
        }
        model = state.maximize(&resp, k, Some(&model));
    }
    let ll = *trace.last().expect("max_iterations > 0");
    let bic = -2.0 * ll + model.parameter_count() as f64 * (n as f64).ln();
    Ok(GmmFit {
        model,
        log_likelihood: trace,
        bic,
        converged,
    })
}

/// Fits `1..=k_max` components and keeps the fit with the smallest BIC.
pub fn fit_gmm_vei(points: &[Vec<f64>], k_max: usize, seed: u64) -> Result<GmmSelection> {
    check_points(points)?;
    if k_max == 0 {
        return Err(Error::Config("k_max must be positive".into()));
    }
    if points.len() <= k_max {
        return Err(Error::Fit(format!(
            "need at least {} points for k_max = {k_max}, got {}",
            k_max + 1,
            points.len()
        )));
    }
    let options = FitOptions::default();
    let mut best: Option<GmmFit> = None;
    let mut bic_by_k = Vec::new();
    let mut first_error = None;
    for k in 1..=k_max {
        match fit_vei(points, k, seed, &options) {
            Ok(fit) => {
                bic_by_k.push((k, fit.bic));
                if best.as_ref().is_none_or(|b| fit.bic < b.bic) {
                    best = Some(fit);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    match best {
        Some(best) => Ok(GmmSelection { best, bic_by_k }),
        None => Err(first_error.unwrap_or_else(|| Error::Fit("no component count could be fitted".into()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn sample(rng: &mut ChaCha8Rng, n: usize, mean: &[f64], std: f64) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                mean.iter()
                    .map(|m| {
                        let z: f64 = StandardNormal.sample(&mut *rng);
                        m + std * z
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn peak_density_formula() {
        let model = GmmModel {
            weights: vec![1.0],
            means: vec![vec![1.0, -2.0]],
            volumes: vec![2.0],
            shape: vec![2.0, 0.5],
        };
        // Sigma = diag(4, 1): (2 pi)^{-1} |Sigma|^{-1/2}
        let expected = 1.0 / (2.0 * PI) / 2.0;
        assert!((model.density(&[1.0, -2.0]).unwrap() - expected).abs() < 1e-15);
        assert!(model.density(&[1.0]).is_err());
    }

    #[test]
    fn radial_symmetry() {
        let model = GmmModel {
            weights: vec![1.0],
            means: vec![vec![0.0, 0.0]],
            volumes: vec![3.0],
            shape: vec![1.0, 1.0],
        };
        let a = model.density(&[2.0, 0.0]).unwrap();
        let b = model.density(&[0.0, -2.0]).unwrap();
        let c = model.density(&[2f64.sqrt(), 2f64.sqrt()]).unwrap();
        assert!((a - b).abs() < 1e-15 && (a - c).abs() < 1e-15);
    }

    #[test]
    fn two_component_mixture_by_hand() {
        let model = GmmModel {
            weights: vec![0.5, 0.5],
            means: vec![vec![0.0], vec![4.0]],
            volumes: vec![1.0, 1.0],
            shape: vec![1.0],
        };
        let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
        let expected = 0.5 * phi(0.0) + 0.5 * phi(4.0);
        assert!((model.density(&[0.0]).unwrap() - expected).abs() < 1e-15);
        assert!((model.density(&[4.0]).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn identical_points_fail_with_floor_message() {
        let points = vec![vec![1.0, 1.0]; 20];
        let err = fit_gmm_vei(&points, 3, 0).unwrap_err();
        assert!(err.to_string().contains("variance floor"), "{err}");
    }

    #[test]
    fn too_few_points() {
        let points = vec![vec![1.0], vec![2.0]];
        assert!(fit_gmm_vei(&points, 2, 0).is_err());
    }

    #[test]
    fn em_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut points = sample(&mut rng, 150, &[0.0, 0.0, 0.0], 1.0);
        points.extend(sample(&mut rng, 100, &[3.0, 1.0, -2.0], 2.0));
        points.extend(sample(&mut rng, 50, &[-4.0, 5.0, 0.0], 0.5));
        for k in 1..=5 {
            let fit = fit_vei(&points, k, 4, &FitOptions::default()).unwrap();
            for w in fit.log_likelihood.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "k={k}: {} -> {}", w[0], w[1]);
            }
            let prod: f64 = fit.model.shape.iter().product();
            assert!((prod - 1.0).abs() < 1e-9);
            assert!((fit.model.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
