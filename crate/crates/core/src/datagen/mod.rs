//! Labeled outlier testbeds.
//!
//! [`generate_synthetic`] scatters isotropic Gaussian clusters and injects
//! local, global and collective outliers around them. [`generate_realistic`]
//! fits a VEI Gaussian mixture to given inliers and draws outliers from the
//! inflated components, labeling them by mixture density.

mod gmm;
mod realistic;
mod synthetic;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::label::OutlierKind;

pub use gmm::{fit_gmm_vei, fit_vei, FitOptions, GmmFit, GmmModel, GmmSelection};
pub use realistic::{generate_realistic, refit_inliers, RealisticConfig};
pub use synthetic::{generate_synthetic, SyntheticConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub inlier: usize,
    pub global: usize,
    pub local: usize,
    pub collective: usize,
}

impl LabelCounts {
    pub fn of(labels: &[OutlierKind]) -> Self {
        let mut c = Self::default();
        for l in labels {
            match l {
                OutlierKind::Inlier => c.inlier += 1,
                OutlierKind::Global => c.global += 1,
                OutlierKind::Local => c.local += 1,
                OutlierKind::Collective => c.collective += 1,
                OutlierKind::Outlier => {}
            }
        }
        c
    }

    pub fn outliers(&self) -> usize {
        self.global + self.local + self.collective
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum Provenance {
    Synthetic {
        config: SyntheticConfig,
    },
    Realistic {
        config: RealisticConfig,
        /// Number of mixture components selected by BIC.
        components: usize,
    },
}

/// Sidecar description of a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorManifest {
    pub generator_version: String,
    pub seed: u64,
    pub provenance: Provenance,
    pub counts: LabelCounts,
    pub n: usize,
    pub dims: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedDataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<OutlierKind>,
    pub provenance: Provenance,
}

impl AnnotatedDataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn counts(&self) -> LabelCounts {
        LabelCounts::of(&self.labels)
    }

    /// Indices carrying `kind`.
    pub fn indices_of(&self, kind: OutlierKind) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == kind).collect()
    }

    pub fn seed(&self) -> u64 {
        match &self.provenance {
            Provenance::Synthetic { config } => config.seed,
            Provenance::Realistic { config, .. } => config.seed,
        }
    }

    pub fn manifest(&self) -> GeneratorManifest {
        GeneratorManifest {
            generator_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed(),
            provenance: self.provenance.clone(),
            counts: self.counts(),
            n: self.len(),
            dims: self.dims(),
        }
    }

    /// Writes a feature CSV with a header and a trailing `label` column.
    /// Values use the shortest round-trip representation.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.dims()).map(|j| format!("x{j}")).collect();
        header.push("label".to_string());
        out.write_record(&header)?;
        for (p, l) in self.points.iter().zip(&self.labels) {
            let mut record: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            record.push(l.as_str().to_string());
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Splits `total` collective points into clusters of at most `size` points,
/// as evenly as possible.
pub(crate) fn collective_cluster_sizes(total: usize, size: usize) -> Vec<usize> {
    if total == 0 || size == 0 {
        return Vec::new();
    }
    let clusters = total.div_ceil(size);
    (0..clusters)
        .map(|c| total / clusters + usize::from(c < total % clusters))
        .collect()
}
