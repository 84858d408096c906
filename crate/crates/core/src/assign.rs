//! Minimum-cost assignment between equal-size point sets; backs the exact
//! 1-Wasserstein distance between equal-weight atomic measures and the
//! multiset matching used by spectrum comparisons.

use crate::mat::C64;

/// Hungarian algorithm with potentials, O(n^3). Returns, for each column,
/// the row assigned to it.
pub fn min_cost_assignment(n: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    assert!(n > 0);
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| matched_row[j] - 1).collect()
}

/// Exact 1-Wasserstein distance between two equal-weight atom sets.
pub fn wasserstein1(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "W1 needs equal atom counts");
    let n = a.len();
    let assignment = min_cost_assignment(n, |i, j| (a[i] - b[j]).norm());
    assignment
        .iter()
        .enumerate()
        .map(|(j, &i)| (a[i] - b[j]).norm())
        .sum::<f64>()
        / n as f64
}

/// Largest matched distance under the minimum-total-cost pairing; the usable
/// notion of "these multisets agree within tol".
pub fn multiset_match_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multiset match needs equal counts");
    let n = a.len();
    let assignment = min_cost_assignment(n, |i, j| (a[i] - b[j]).norm());
    assignment
        .iter()
        .enumerate()
        .map(|(j, &i)| (a[i] - b[j]).norm())
        .fold(0.0, f64::max)
}
