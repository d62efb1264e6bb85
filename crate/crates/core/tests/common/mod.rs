//! Brute-force oracles shared by the integration tests.
//!
//! Everything here works from the raw distance function only, never from the
//! library's graphs, traversals or cover search.

#![allow(dead_code)]

use chainmetric::FiniteMetricSpace;

pub const TAU: f64 = 1e-9;

/// All pairs at distance strictly below `eps`, as an adjacency matrix.
pub fn threshold(space: &FiniteMetricSpace, eps: f64) -> Vec<Vec<bool>> {
    let n = space.len();
    (0..n)
        .map(|i| (0..n).map(|j| i != j && space.dist(i, j) < eps).collect())
        .collect()
}

/// Hop counts from `x` by repeated frontier expansion over the matrix.
pub fn hops(adj: &[Vec<bool>], x: usize) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut out = vec![None; n];
    out[x] = Some(0);
    let mut level = 0;
    loop {
        let frontier: Vec<usize> = (0..n).filter(|&v| out[v] == Some(level)).collect();
        if frontier.is_empty() {
            return out;
        }
        level += 1;
        for u in frontier {
            for v in 0..n {
                if adj[u][v] && out[v].is_none() {
                    out[v] = Some(level);
                }
            }
        }
    }
}

/// Component label per point: the smallest index reachable from it.
pub fn components(adj: &[Vec<bool>]) -> Vec<usize> {
    (0..adj.len())
        .map(|x| {
            hops(adj, x)
                .iter()
                .position(|h| h.is_some())
                .expect("x reaches itself")
        })
        .collect()
}

/// Minimum step-sum over every simple ε-path from `x`, per target.
pub fn simple_path_minimum(space: &FiniteMetricSpace, eps: f64, x: usize) -> Vec<Option<f64>> {
    fn walk(
        space: &FiniteMetricSpace,
        eps: f64,
        at: usize,
        sum: f64,
        seen: &mut Vec<bool>,
        best: &mut Vec<Option<f64>>,
    ) {
        if best[at].is_none_or(|b| sum < b) {
            best[at] = Some(sum);
        }
        for next in 0..space.len() {
            if !seen[next] && space.dist(at, next) < eps {
                seen[next] = true;
                walk(space, eps, next, sum + space.dist(at, next), seen, best);
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; space.len()];
    seen[x] = true;
    let mut best = vec![None; space.len()];
    walk(space, eps, x, 0.0, &mut seen, &mut best);
    best
}

/// Whether some ε-chain of at most `m` steps joins `x` to `y`, by explicit
/// enumeration of point sequences.
pub fn chain_exists(space: &FiniteMetricSpace, eps: f64, x: usize, y: usize, m: usize) -> bool {
    if x == y {
        return true;
    }
    if m == 0 {
        return false;
    }
    (0..space.len())
        .filter(|&z| z != x && space.dist(x, z) < eps)
        .any(|z| chain_exists(space, eps, z, y, m - 1))
}

/// Minimum number of centers from `0..n` whose coverage masks jointly contain
/// `target`, trying every subset of candidates in order of size.
pub fn min_cover_size(masks: &[u64], target: u64) -> usize {
    let mut distinct: Vec<u64> = masks.iter().copied().filter(|&m| m & target != 0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    for size in 1..=distinct.len() {
        if combos_cover(&distinct, target, size, 0, 0) {
            return size;
        }
    }
    panic!("target cannot be covered");
}

fn combos_cover(masks: &[u64], target: u64, left: usize, start: usize, acc: u64) -> bool {
    if left == 0 {
        return acc & target == target;
    }
    (start..masks.len()).any(|k| combos_cover(masks, target, left - 1, k + 1, acc | masks[k]))
}

/// Coverage mask over `subset` positions of the depth-`m` chain-ball of each center
/// (`m = None` for the whole component).
pub fn chain_ball_masks(adj: &[Vec<bool>], subset: &[usize], m: Option<usize>) -> Vec<u64> {
    (0..adj.len())
        .map(|c| {
            let h = hops(adj, c);
            subset
                .iter()
                .enumerate()
                .filter(|(_, &x)| h[x].is_some_and(|h| m.is_none_or(|m| h <= m)))
                .fold(0u64, |acc, (pos, _)| acc | (1 << pos))
        })
        .collect()
}

/// Textbook greedy set cover over masks, ties to the smallest center.
pub fn greedy_cover_size(masks: &[u64], target: u64) -> usize {
    let mut uncovered = target;
    let mut count = 0;
    while uncovered != 0 {
        let mut best = (0, 0u32);
        for (c, &m) in masks.iter().enumerate() {
            let gain = (m & uncovered).count_ones();
            if gain > best.1 {
                best = (c, gain);
            }
        }
        assert!(best.1 > 0);
        uncovered &= !masks[best.0];
        count += 1;
    }
    count
}

pub fn line(points: &[f64]) -> FiniteMetricSpace {
    let pts = points.iter().map(|&p| vec![p]).collect();
    FiniteMetricSpace::from_points(pts, chainmetric::Norm::Euclidean).unwrap()
}

/// All-pairs chain distances by Floyd–Warshall over the threshold edges.
pub fn floyd(space: &FiniteMetricSpace, eps: f64) -> Vec<Vec<Option<f64>>> {
    let n = space.len();
    let mut d: Vec<Vec<Option<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i == j {
                    true => Some(0.0),
                    false => (space.dist(i, j) < eps).then(|| space.dist(i, j)),
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}
