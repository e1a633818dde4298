//! Independent reference implementations used by the test suites.
//!
//! Everything here deliberately avoids the algorithms in the sibling
//! modules: eigenvalues come from bisection on the characteristic
//! polynomial's sign-change count rather than Jacobi rotations, dominant
//! eigenpairs from plain power iteration, and the 2-factor varimax optimum
//! from an exhaustive angle grid. These exist to cross-check the production
//! paths and are not wired into any of them.

use crate::math;
use alloc::vec::Vec;

/// Number of eigenvalues of `a` strictly below `x`, via the inertia of
/// `A - xI` under symmetric Gaussian elimination (the count of negative
/// pivots equals the count of sign agreements lost by the characteristic
/// polynomial's Sturm sequence).
fn count_eigenvalues_below(a: &[Vec<f64>], x: f64) -> usize {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| if i == j { v - x } else { v })
                .collect()
        })
        .collect();
    let mut negatives = 0;
    for k in 0..n {
        let pivot = m[k][k];
        if pivot == 0.0 {
            // exact breakdown: nudge and recount at a shifted point
            return count_eigenvalues_below(a, x + 1e-13 * (1.0 + x.abs()));
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in (k + 1)..n {
            let factor = m[i][k] / pivot;
            for j in k..n {
                m[i][j] -= factor * m[k][j];
            }
        }
    }
    negatives
}

/// All eigenvalues of a symmetric matrix, ascending, found by bisecting the
/// eigenvalue-counting function between Gershgorin bounds.
pub fn charpoly_bisection_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, row) in a.iter().enumerate() {
        let radius: f64 = row
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.abs())
            .sum();
        lo = lo.min(a[i][i] - radius);
        hi = hi.max(a[i][i] + radius);
    }
    lo -= 1.0;
    hi += 1.0;

    (0..n)
        .map(|k| {
            // smallest x with at least k+1 eigenvalues below it
            let mut a_lo = lo;
            let mut a_hi = hi;
            for _ in 0..200 {
                let mid = 0.5 * (a_lo + a_hi);
                if count_eigenvalues_below(a, mid) > k {
                    a_hi = mid;
                } else {
                    a_lo = mid;
                }
            }
            0.5 * (a_lo + a_hi)
        })
        .collect()
}

/// Leading `k` eigenpairs of a symmetric matrix by power iteration with
/// deflation. Start vectors come from a fixed congruential sequence, so the
/// oracle is deterministic.
pub fn power_iteration_eigs(a: &[Vec<f64>], k: usize) -> Vec<(f64, Vec<f64>)> {
    let n = a.len();
    let mut deflated: Vec<Vec<f64>> = a.to_vec();
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut out = Vec::new();
    for _ in 0..k.min(n) {
        let mut v: Vec<f64> = (0..n).map(|_| next()).collect();
        normalize(&mut v);
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            let mut w = alloc::vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    w[i] += deflated[i][j] * v[j];
                }
            }
            let new_lambda: f64 = w.iter().zip(&v).map(|(x, y)| x * y).sum();
            normalize(&mut w);
            let drift: f64 = w
                .iter()
                .zip(&v)
                .map(|(x, y)| (x.abs() - y.abs()).abs())
                .sum();
            v = w;
            let done = (new_lambda - lambda).abs() < 1e-14 && drift < 1e-13;
            lambda = new_lambda;
            if done {
                break;
            }
        }
        for i in 0..n {
            for j in 0..n {
                deflated[i][j] -= lambda * v[i] * v[j];
            }
        }
        out.push((lambda, v));
    }
    out
}

fn normalize(v: &mut [f64]) {
    let norm = math::sqrt(v.iter().map(|x| x * x).sum());
    if norm > 0.0 {
        for x in v {
            *x /= norm;
        }
    }
}

/// Global 2-factor varimax optimum by exhaustive search over the rotation
/// angle in `[0, pi/2)` at the given resolution, replicating the Kaiser
/// normalization, sign fix and column ordering of the production rotation.
pub fn varimax_grid_2d(loadings: &[Vec<f64>], step: f64) -> Vec<Vec<f64>> {
    assert!(loadings.iter().all(|r| r.len() == 2));
    let scales: Vec<f64> = loadings
        .iter()
        .map(|row| {
            let h = math::sqrt(row.iter().map(|x| x * x).sum());
            if h == 0.0 {
                1.0
            } else {
                h
            }
        })
        .collect();
    let normalized: Vec<[f64; 2]> = loadings
        .iter()
        .zip(&scales)
        .map(|(r, h)| [r[0] / h, r[1] / h])
        .collect();

    let n = normalized.len() as f64;
    let criterion = |rows: &[[f64; 2]]| -> f64 {
        let mut total = 0.0;
        for f in 0..2 {
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for r in rows {
                let c = r[f] * r[f];
                s1 += c * c;
                s2 += c;
            }
            total += s1 - s2 * s2 / n;
        }
        total
    };
    let rotate = |rows: &[[f64; 2]], angle: f64| -> Vec<[f64; 2]> {
        let (c, s) = (math::cos(angle), math::sin(angle));
        rows.iter()
            .map(|r| [c * r[0] + s * r[1], -s * r[0] + c * r[1]])
            .collect()
    };

    let mut best_angle = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut angle = 0.0;
    while angle < core::f64::consts::FRAC_PI_2 {
        let cand = criterion(&rotate(&normalized, angle));
        if cand > best {
            best = cand;
            best_angle = angle;
        }
        angle += step;
    }

    let rotated = rotate(&normalized, best_angle);
    let mut out: Vec<Vec<f64>> = rotated
        .iter()
        .zip(&scales)
        .map(|(r, h)| alloc::vec![r[0] * h, r[1] * h])
        .collect();
    // sign fix as the production rotation does; columns are returned in the
    // grid's own order, so comparisons must allow a column permutation
    for f in 0..2 {
        let sum: f64 = out.iter().map(|r| r[f]).sum();
        if sum < 0.0 {
            for r in out.iter_mut() {
                r[f] = -r[f];
            }
        }
    }
    out
}

/// Largest elementwise gap between two loading matrices, allowing the column
/// permutation and sign freedom inherent to rotation criteria.
pub fn loading_gap_up_to_permutation(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let k = a.first().map_or(0, Vec::len);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = f64::INFINITY;
    // k is 2 or 3 here; enumerate permutations by simple recursion
    fn visit(perm: &mut Vec<usize>, i: usize, a: &[Vec<f64>], b: &[Vec<f64>], best: &mut f64) {
        let k = perm.len();
        if i == k {
            let mut worst = 0.0f64;
            for f in 0..k {
                // per-column optimal sign
                let mut plus = 0.0f64;
                let mut minus = 0.0f64;
                for (ra, rb) in a.iter().zip(b) {
                    plus = plus.max((ra[f] - rb[perm[f]]).abs());
                    minus = minus.max((ra[f] + rb[perm[f]]).abs());
                }
                worst = worst.max(plus.min(minus));
            }
            *best = best.min(worst);
            return;
        }
        for j in i..k {
            perm.swap(i, j);
            visit(perm, i + 1, a, b, best);
            perm.swap(i, j);
        }
    }
    visit(&mut perm, 0, a, b, &mut best);
    best
}
