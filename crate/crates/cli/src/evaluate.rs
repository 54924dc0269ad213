use std::path::PathBuf;
use std::time::Instant;

use callout_core::eval::evaluate_rankings;

use crate::manifest::{ResolvedConfig, RunManifest};
use crate::output::{read_labels, RankingsFile};
use crate::{micros, write_output, CliError, CliResult};

pub(crate) fn run(rankings: PathBuf, labels: PathBuf, output: Option<PathBuf>) -> CliResult<()> {
    let start = Instant::now();
    let file = RankingsFile::read(&rankings)?;
    let labels_vec = read_labels(&labels)?;
    let load_us = micros(start.elapsed());
    if file.n != labels_vec.len() {
        return Err(CliError::Usage(format!(
            "rankings cover {} objects but {} labels were read",
            file.n,
            labels_vec.len()
        )));
    }

    let start = Instant::now();
    let report = evaluate_rankings(&file.to_rankings(), &labels_vec)?;
    let run_us = micros(start.elapsed());
    eprint!("{report}");

    let start = Instant::now();
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_output(output.as_deref(), &json)?;
    if let Some(path) = &output {
        let mut manifest = RunManifest::new(
            "evaluate",
            ResolvedConfig {
                inputs: vec![rankings.display().to_string(), labels.display().to_string()],
                ..Default::default()
            },
        );
        manifest.timings.load_us = load_us;
        manifest.timings.run_us = run_us;
        manifest.timings.write_us = micros(start.elapsed());
        manifest.write_next_to(path)?;
    }
    Ok(())
}
