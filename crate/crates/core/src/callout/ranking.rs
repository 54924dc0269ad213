use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Descending,
    Ascending,
}

fn by_score(scores: &[f64], direction: Direction) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| {
        let ord = scores[a].total_cmp(&scores[b]);
        let ord = match direction {
            Direction::Ascending => ord,
            Direction::Descending => ord.reverse(),
        };
        ord.then(a.cmp(&b))
    }
}

/// Object ids ordered by score; equal scores keep ascending id order.
pub fn rank_from_scores(scores: &[f64], direction: Direction) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(by_score(scores, direction));
    order
}

/// Local ranking: objects whose normalized nearest-neighbor distance reaches
/// `knee_radius` come first in ascending global score, the rest follow in
/// descending global score. Returns the ranking and the size of the first block.
pub fn local_ranking(global: &[f64], d_nn: &[f64], knee_radius: f64) -> (Vec<usize>, usize) {
    assert_eq!(global.len(), d_nn.len());
    let (mut candidates, mut rest): (Vec<usize>, Vec<usize>) =
        (0..global.len()).partition(|&i| d_nn[i] >= knee_radius);
    candidates.sort_by(by_score(global, Direction::Ascending));
    rest.sort_by(by_score(global, Direction::Descending));
    let split = candidates.len();
    candidates.extend(rest);
    (candidates, split)
}

/// Whether `order` is a permutation of `0..n`.
pub fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    order
        .iter()
        .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}
