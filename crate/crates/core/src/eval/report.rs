use std::fmt;

use serde::{Deserialize, Serialize};

use crate::callout::{is_permutation, OutlierRankings};
use crate::error::{Error, Result};
use crate::label::OutlierKind;

use super::metrics::{auc_pr, auc_roc, LabeledScores};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingMetrics {
    pub aucroc: f64,
    pub aucpr: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Metrics for one ranking, or why they are undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairingResult {
    Metrics(RankingMetrics),
    Error { error: String },
}

impl PairingResult {
    pub fn metrics(&self) -> Option<&RankingMetrics> {
        match self {
            PairingResult::Metrics(m) => Some(m),
            PairingResult::Error { .. } => None,
        }
    }
}

/// Each ranking scored against the outliers it targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub overall: PairingResult,
    pub global: PairingResult,
    pub local: PairingResult,
    pub collective: PairingResult,
}

impl MetricReport {
    pub fn entries(&self) -> [(&'static str, &PairingResult); 4] {
        [
            ("overall", &self.overall),
            ("global", &self.global),
            ("local", &self.local),
            ("collective", &self.collective),
        ]
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, r) in self.entries() {
            match r {
                PairingResult::Metrics(m) => writeln!(
                    f,
                    "{name:<10} aucroc={:.4} aucpr={:.4} n_pos={} n_neg={}",
                    m.aucroc, m.aucpr, m.n_pos, m.n_neg
                )?,
                PairingResult::Error { error } => writeln!(f, "{name:<10} error: {error}")?,
            }
        }
        Ok(())
    }
}

/// Scores `n - position` for a ranking, so the first object scores highest.
pub fn rank_scores(ranking: &[usize]) -> Vec<f64> {
    let n = ranking.len();
    let mut scores = vec![0.0; n];
    for (pos, &i) in ranking.iter().enumerate() {
        scores[i] = (n - pos) as f64;
    }
    scores
}

fn pairing(ranking: &[usize], positives: Vec<bool>) -> PairingResult {
    let run = || -> Result<RankingMetrics> {
        let ls = LabeledScores::new(rank_scores(ranking), positives)?;
        Ok(RankingMetrics {
            aucroc: auc_roc(&ls)?,
            aucpr: auc_pr(&ls)?,
            n_pos: ls.n_pos(),
            n_neg: ls.n_neg(),
        })
    };
    match run() {
        Ok(m) => PairingResult::Metrics(m),
        Err(e) => PairingResult::Error { error: e.to_string() },
    }
}

/// Scores the overall ranking against every outlier and each typed ranking
/// against outliers of its own type only.
pub fn evaluate_rankings(rankings: &OutlierRankings, labels: &[OutlierKind]) -> Result<MetricReport> {
    let n = labels.len();
    for (name, r) in [
        ("overall", &rankings.overall),
        ("global", &rankings.global),
        ("local", &rankings.local),
        ("collective", &rankings.collective),
    ] {
        if r.len() != n {
            return Err(Error::Input(format!(
                "{name} ranking has {} objects but there are {n} labels",
                r.len()
            )));
        }
        if !is_permutation(r, n) {
            return Err(Error::Input(format!("{name} ranking is not a permutation of 0..{n}")));
        }
    }
    let of = |kind: OutlierKind| labels.iter().map(|&l| l == kind).collect::<Vec<_>>();
    Ok(MetricReport {
        overall: pairing(&rankings.overall, labels.iter().map(|l| l.is_outlier()).collect()),
        global: pairing(&rankings.global, of(OutlierKind::Global)),
        local: pairing(&rankings.local, of(OutlierKind::Local)),
        collective: pairing(&rankings.collective, of(OutlierKind::Collective)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rankings(r: Vec<usize>) -> OutlierRankings {
        OutlierRankings {
            overall: r.clone(),
            global: r.clone(),
            local: r.clone(),
            collective: r,
            knee_radius: 0.0,
            local_set_size: 0,
        }
    }

    #[test]
    fn perfect_rankings() {
        use OutlierKind::*;
        let labels = [Inlier, Global, Inlier, Local, Collective, Inlier];
        let r = OutlierRankings {
            overall: vec![1, 3, 4, 0, 2, 5],
            global: vec![1, 0, 2, 3, 4, 5],
            local: vec![3, 0, 1, 2, 4, 5],
            collective: vec![4, 0, 1, 2, 3, 5],
            knee_radius: 0.0,
            local_set_size: 0,
        };
        let report = evaluate_rankings(&r, &labels).unwrap();
        for (name, p) in report.entries() {
            let m = p.metrics().unwrap_or_else(|| panic!("{name}"));
            assert_eq!(m.aucroc, 1.0, "{name}");
            assert_eq!(m.aucpr, 1.0, "{name}");
        }
        assert_eq!(report.overall.metrics().unwrap().n_pos, 3);
    }

    #[test]
    fn all_inliers_error_every_pairing() {
        let labels = vec![OutlierKind::Inlier; 4];
        let report = evaluate_rankings(&rankings(vec![0, 1, 2, 3]), &labels).unwrap();
        for (_, p) in report.entries() {
            assert!(p.metrics().is_none());
        }
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"error\""));
    }

    #[test]
    fn json_shape() {
        use OutlierKind::*;
        let labels = [Global, Local, Collective, Inlier];
        let report = evaluate_rankings(&rankings(vec![0, 1, 2, 3]), &labels).unwrap();
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        for key in ["overall", "global", "local", "collective"] {
            for field in ["aucroc", "aucpr", "n_pos", "n_neg"] {
                assert!(v[key][field].is_number(), "{key}.{field}");
            }
        }
        let back: MetricReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn mismatched_lengths() {
        let labels = vec![OutlierKind::Inlier; 3];
        assert!(evaluate_rankings(&rankings(vec![0, 1, 2, 3]), &labels).is_err());
        assert!(evaluate_rankings(&rankings(vec![0, 0, 1]), &labels).is_err());
    }
}
