#![allow(dead_code)]

use callout_core::MetricDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy)]
pub enum Shape {
    Uniform,
    Blobs,
    /// Few distinct values, so many exact duplicates and distance ties.
    Lattice,
}

pub const SHAPES: [Shape; 3] = [Shape::Uniform, Shape::Blobs, Shape::Lattice];

pub fn rows(shape: Shape, n: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..dims).map(|_| rng.random_range(-50.0..50.0)).collect())
        .collect();
    (0..n)
        .map(|_| match shape {
            Shape::Uniform => (0..dims).map(|_| rng.random_range(0.0..1.0)).collect(),
            Shape::Blobs => {
                let c = &centers[rng.random_range(0..centers.len())];
                c.iter()
                    .map(|m| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        m + z
                    })
                    .collect()
            }
            Shape::Lattice => (0..dims).map(|_| rng.random_range(0..3) as f64).collect(),
        })
        .collect()
}

pub fn dataset(shape: Shape, n: usize, dims: usize, seed: u64) -> MetricDataset {
    MetricDataset::from_rows(&rows(shape, n, dims, seed)).unwrap()
}

/// Nearest candidate, smallest id on ties, written independently of the crate.
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
