use callout_core::eval::{auc_pr, auc_roc, evaluate_rankings, rank_scores, LabeledScores};
use callout_core::{OutlierKind, OutlierRankings};
use proptest::prelude::*;

/// Fraction of (positive, negative) pairs ordered correctly, ties count half.
fn pairwise_auc(scores: &[f64], pos: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in (0..scores.len()).filter(|&i| pos[i]) {
        for j in (0..scores.len()).filter(|&j| !pos[j]) {
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn labeled() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..200).prop_flat_map(|n| {
        (
            // a small value set forces plenty of ties
            prop::collection::vec(prop_oneof![(0i32..6).prop_map(f64::from), -1e3f64..1e3], n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_filter("both classes", |(_, p)| p.iter().any(|&b| b) && p.iter().any(|&b| !b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn auc_matches_pairwise((scores, pos) in labeled()) {
        let fast = auc_roc(&LabeledScores::new(scores.clone(), pos.clone()).unwrap()).unwrap();
        prop_assert!((fast - pairwise_auc(&scores, &pos)).abs() <= 1e-12);
    }

    #[test]
    fn negated_scores_flip_auc((scores, pos) in labeled()) {
        let a = auc_roc(&LabeledScores::new(scores.clone(), pos.clone()).unwrap()).unwrap();
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let b = auc_roc(&LabeledScores::new(neg, pos).unwrap()).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ap_invariant_under_monotone_maps((scores, pos) in labeled()) {
        let a = auc_pr(&LabeledScores::new(scores.clone(), pos.clone()).unwrap()).unwrap();
        let mapped: Vec<f64> = scores.iter().map(|s| (s / 100.0).exp() * 3.0 + 1.0).collect();
        let b = auc_pr(&LabeledScores::new(mapped, pos.clone()).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn rank_scores_reproduce_the_ranking(n in 1usize..100, seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let s = rank_scores(&order);
        for w in order.windows(2) {
            prop_assert!(s[w[0]] > s[w[1]]);
        }
    }
}

#[test]
fn report_on_perfect_rankings() {
    use OutlierKind::*;
    let labels = [Inlier, Global, Inlier, Local, Collective, Collective, Inlier];
    let rankings = OutlierRankings {
        overall: vec![1, 3, 4, 5, 0, 2, 6],
        global: vec![1, 0, 2, 3, 4, 5, 6],
        local: vec![3, 0, 1, 2, 4, 5, 6],
        collective: vec![5, 4, 0, 1, 2, 3, 6],
        knee_radius: 0.0,
        local_set_size: 1,
    };
    let report = evaluate_rankings(&rankings, &labels).unwrap();
    for (name, r) in report.entries() {
        let m = r.metrics().unwrap();
        assert_eq!((m.aucroc, m.aucpr), (1.0, 1.0), "{name}");
    }
    assert_eq!(report.collective.metrics().unwrap().n_pos, 2);
}
