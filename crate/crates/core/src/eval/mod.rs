//! Ranking quality measures and brute-force checks for the index.

mod metrics;
mod oracle;
mod report;

pub use metrics::{auc_pr, auc_roc, LabeledScores};
pub use oracle::{brute_force_exact_nn, verify_tree, CheckResult, TreeCheck, TreeReport};
pub use report::{evaluate_rankings, rank_scores, MetricReport, PairingResult, RankingMetrics};
