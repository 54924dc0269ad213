use std::path::PathBuf;
use std::time::Instant;

use callout_core::callout::is_permutation;
use callout_core::eval::verify_tree;
use callout_core::metric::{load_dataset, InputOptions};
use callout_core::{c_allout, CallOutConfig};

use crate::manifest::{ResolvedConfig, RunManifest};
use crate::output::RankingsFile;
use crate::{micros, write_output, CliError, CliResult, Format};

pub(crate) struct DetectArgs {
    pub input: PathBuf,
    pub iterations: usize,
    pub capacity: usize,
    pub distance_matrix: bool,
    pub metric: String,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
    pub verify: bool,
}

pub(crate) fn run(args: DetectArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new(
        "detect",
        ResolvedConfig {
            iterations: Some(args.iterations),
            capacity: Some(args.capacity),
            seed: None,
            metric: (!args.distance_matrix).then(|| args.metric.clone()),
            distance_matrix: args.distance_matrix,
            inputs: vec![args.input.display().to_string()],
            threads: args.threads,
        },
    );

    let start = Instant::now();
    let loaded = load_dataset(
        &args.input,
        &InputOptions {
            distance_matrix: args.distance_matrix,
            labels: None,
            metric: args.metric.clone(),
        },
    )?;
    let ds = loaded.dataset;
    manifest.timings.load_us = micros(start.elapsed());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", args.threads)))?;
    let config = CallOutConfig {
        iterations: args.iterations,
        capacity: args.capacity,
    };
    let start = Instant::now();
    let out = pool.install(|| c_allout(&ds, &config))?;
    manifest.timings.run_us = micros(start.elapsed());
    manifest.distance_calls = out.diagnostics.distance_calls;
    manifest.iterations_used = Some(out.diagnostics.iterations_used);

    let n = ds.len();
    let r = &out.rankings;
    for (name, list) in [
        ("overall", &r.overall),
        ("global", &r.global),
        ("local", &r.local),
        ("collective", &r.collective),
    ] {
        if !is_permutation(list, n) {
            return Err(CliError::Invariant(format!("{name} ranking is not a permutation")));
        }
    }
    if args.verify {
        let report = verify_tree(&out.refinement.tree, &ds);
        if !report.passed() {
            return Err(CliError::Invariant(format!("tree check failed:\n{report}")));
        }
    }

    let start = Instant::now();
    let file = RankingsFile::from_output(&out);
    let text = match args.format {
        Format::Json => serde_json::to_string(&file).expect("rankings serialize") + "\n",
        Format::Csv => file.to_csv()?,
    };
    write_output(args.output.as_deref(), &text)?;
    manifest.timings.write_us = micros(start.elapsed());
    if let Some(path) = &args.output {
        manifest.write_next_to(path)?;
    }
    Ok(())
}
