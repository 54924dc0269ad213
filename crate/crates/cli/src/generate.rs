use std::path::{Path, PathBuf};
use std::time::Instant;

use callout_core::datagen::{generate_realistic, generate_synthetic, RealisticConfig, SyntheticConfig};
use callout_core::metric::{load_dataset, InputOptions};
use callout_core::OutlierKind;
use serde::de::DeserializeOwned;

use crate::manifest::{ResolvedConfig, RunManifest};
use crate::{micros, CliError, CliResult, GeneratorKind};

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(CliError::file(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Inlier rows of a feature CSV; rows labeled as outliers are dropped.
fn read_inliers(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let loaded = load_dataset(path, &InputOptions::default())?;
    let rows = loaded
        .rows
        .ok_or_else(|| CliError::Usage("realistic generation needs feature rows".into()))?;
    Ok(match loaded.labels {
        Some(labels) => rows
            .into_iter()
            .zip(labels)
            .filter(|(_, l)| *l == OutlierKind::Inlier)
            .map(|(r, _)| r)
            .collect(),
        None => rows,
    })
}

pub(crate) fn run(
    kind: GeneratorKind,
    config: Option<PathBuf>,
    seed: Option<u64>,
    input: Option<PathBuf>,
    output: PathBuf,
) -> CliResult<()> {
    let mut inputs: Vec<String> = config.iter().map(|p| p.display().to_string()).collect();
    let start = Instant::now();
    let (data, load_us) = match kind {
        GeneratorKind::Synthetic => {
            if input.is_some() {
                return Err(CliError::Usage("--input only applies to realistic generation".into()));
            }
            let mut cfg: SyntheticConfig = read_config(config.as_deref())?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            (generate_synthetic(&cfg)?, 0)
        }
        GeneratorKind::Realistic => {
            let base = input
                .ok_or_else(|| CliError::Usage("realistic generation needs --input".into()))?;
            inputs.push(base.display().to_string());
            let mut cfg: RealisticConfig = read_config(config.as_deref())?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let inliers = read_inliers(&base)?;
            let load_us = micros(start.elapsed());
            (generate_realistic(&inliers, &cfg)?, load_us)
        }
    };
    let run_us = micros(start.elapsed()) - load_us;

    let start = Instant::now();
    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    std::fs::write(&output, buf).map_err(CliError::file(&output))?;

    let generator = data.manifest();
    let mut manifest = RunManifest::new(
        "generate",
        ResolvedConfig {
            seed: Some(generator.seed),
            inputs,
            ..Default::default()
        },
    );
    manifest.timings.load_us = load_us;
    manifest.timings.run_us = run_us;
    manifest.timings.write_us = micros(start.elapsed());
    manifest.generator = Some(generator);
    manifest.write_next_to(&output)
}
