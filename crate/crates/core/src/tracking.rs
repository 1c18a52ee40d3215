//! Matching eigenvalues between neighbouring parameter values.

use num_complex::Complex64;

/// Minimum-cost perfect assignment for a square cost matrix (row-major),
/// by the shortest augmenting path method with potentials. Returns
/// `col[i]`, the column assigned to row `i`.
pub fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    // 1-based internals; index 0 is the virtual column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0usize; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            col[row_of[j] - 1] = j - 1;
        }
    }
    col
}

/// Greedy assignment: repeatedly takes the globally closest free pair.
pub fn greedy(cost: &[f64], n: usize) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (cost[i * n + j], i, j)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut col = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in pairs {
        if col[i] == usize::MAX && !taken[j] {
            col[i] = j;
            taken[j] = true;
        }
    }
    col
}

fn total(cost: &[f64], n: usize, col: &[usize]) -> f64 {
    col.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum()
}

/// Assigns each previous value to a next value (`next[result[i]]` continues
/// `prev[i]`). Greedy nearest-neighbour, replaced by the optimal assignment
/// when the greedy cost exceeds twice the optimum.
pub fn match_values(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    let n = prev.len();
    assert_eq!(n, next.len());
    let cost: Vec<f64> = prev.iter().flat_map(|p| next.iter().map(move |q| (p - q).norm())).collect();
    let g = greedy(&cost, n);
    let greedy_cost = total(&cost, n, &g);
    let h = hungarian(&cost, n);
    let optimal = total(&cost, n, &h);
    if greedy_cost > 2.0 * optimal + 1e-300 {
        h
    } else {
        g
    }
}

/// Largest distance moved under an assignment.
pub fn max_movement(prev: &[Complex64], next: &[Complex64], assignment: &[usize]) -> f64 {
    prev.iter().zip(assignment).map(|(p, &j)| (p - next[j]).norm()).fold(0.0, f64::max)
}
