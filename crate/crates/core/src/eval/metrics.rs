use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scores with a ground-truth flag per object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScores {
    pub scores: Vec<f64>,
    pub positives: Vec<bool>,
}

impl LabeledScores {
    pub fn new(scores: Vec<f64>, positives: Vec<bool>) -> Result<Self> {
        if scores.len() != positives.len() {
            return Err(Error::Input(format!(
                "{} scores but {} labels",
                scores.len(),
                positives.len()
            )));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::Input("scores must not be NaN".into()));
        }
        Ok(Self { scores, positives })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn n_pos(&self) -> usize {
        self.positives.iter().filter(|&&p| p).count()
    }

    pub fn n_neg(&self) -> usize {
        self.len() - self.n_pos()
    }
}

/// Rank-based ROC AUC: the chance a positive outscores a negative, ties
/// counting one half.
pub fn auc_roc(ls: &LabeledScores) -> Result<f64> {
    let (n_pos, n_neg) = (ls.n_pos(), ls.n_neg());
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric(format!(
            "ROC AUC needs both classes, got {n_pos} positives and {n_neg} negatives"
        )));
    }
    let mut order: Vec<usize> = (0..ls.len()).collect();
    order.sort_by(|&a, &b| ls.scores[a].total_cmp(&ls.scores[b]));
    // sum of 1-based average ranks of the positives
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && ls.scores[order[end]] == ls.scores[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        let pos = order[start..end].iter().filter(|&&i| ls.positives[i]).count();
        rank_sum += avg * pos as f64;
        start = end;
    }
    let (p, q) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// Average precision with step interpolation. Objects are read in
/// descending score order, ties by ascending index.
pub fn auc_pr(ls: &LabeledScores) -> Result<f64> {
    let n_pos = ls.n_pos();
    if n_pos == 0 {
        return Err(Error::Metric("average precision needs a positive".into()));
    }
    let mut order: Vec<usize> = (0..ls.len()).collect();
    order.sort_by(|&a, &b| ls.scores[b].total_cmp(&ls.scores[a]).then(a.cmp(&b)));
    let mut hits = 0usize;
    let mut total = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if ls.positives[i] {
            hits += 1;
            total += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(total / n_pos as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(scores: &[f64], pos: &[bool]) -> LabeledScores {
        LabeledScores::new(scores.to_vec(), pos.to_vec()).unwrap()
    }

    #[test]
    fn roc_examples() {
        assert_eq!(auc_roc(&ls(&[3.0, 2.0, 1.0], &[true, false, false])).unwrap(), 1.0);
        assert_eq!(auc_roc(&ls(&[1.0, 2.0, 3.0], &[true, false, false])).unwrap(), 0.0);
        assert_eq!(auc_roc(&ls(&[1.0, 1.0], &[true, false])).unwrap(), 0.5);
        assert!(auc_roc(&ls(&[1.0, 2.0], &[true, true])).is_err());
        assert!(auc_roc(&ls(&[1.0, 2.0], &[false, false])).is_err());
    }

    #[test]
    fn pr_examples() {
        let mut pos = vec![false; 10];
        pos[4] = true;
        let mut scores = vec![0.0; 10];
        scores[4] = 1.0;
        assert_eq!(auc_pr(&ls(&scores, &pos)).unwrap(), 1.0);
        assert_eq!(auc_pr(&ls(&[2.0, 1.0], &[false, true])).unwrap(), 0.5);
        let ap = auc_pr(&ls(&[4.0, 3.0, 2.0, 1.0], &[true, false, true, false])).unwrap();
        assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-15);
        assert!(auc_pr(&ls(&[1.0], &[false])).is_err());
    }

    #[test]
    fn pr_ties_resolve_by_index() {
        // all tied: order is 0, 1, 2
        let ap = auc_pr(&ls(&[1.0, 1.0, 1.0], &[false, false, true])).unwrap();
        assert!((ap - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch() {
        assert!(LabeledScores::new(vec![1.0], vec![true, false]).is_err());
    }
}
