//! Wolfe's minimum-norm-point algorithm over the convex hull of a point set.

use crate::error::{Error, Result};
use crate::numerics::linalg::solve_square;
use crate::numerics::{dot, DenseMatrix};

pub(crate) struct MnpSolution {
    pub weights: Vec<f64>,
    pub iterations: usize,
}

fn combine(q: &DenseMatrix, support: &[usize], w: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; q.rows()];
    for (&i, &wi) in support.iter().zip(w) {
        for (xv, qv) in x.iter_mut().zip(q.col(i)) {
            *xv += wi * qv;
        }
    }
    x
}

/// Affine minimizer of `||sum alpha_i q_i||` subject to `sum alpha_i = 1`
/// over the corral `support`.
fn affine_minimizer(q: &DenseMatrix, support: &[usize]) -> Option<Vec<f64>> {
    let s = support.len();
    let mut g = vec![0.0; s * s];
    for a in 0..s {
        for b in a..s {
            let v = dot(q.col(support[a]), q.col(support[b])) + 1.0;
            g[a * s + b] = v;
            g[b * s + a] = v;
        }
    }
    let y = solve_square(&g, s, &vec![1.0; s])?;
    let total: f64 = y.iter().sum();
    if total.abs() < 1e-300 {
        return None;
    }
    Some(y.into_iter().map(|v| v / total).collect())
}

/// Minimize `||Q lambda||` over the unit simplex; returns dense weights.
pub(crate) fn min_norm_point(q: &DenseMatrix, max_iter: usize) -> Result<MnpSolution> {
    let n = q.cols();
    let norms2: Vec<f64> = (0..n).map(|j| dot(q.col(j), q.col(j))).collect();
    let max_norm2 = norms2.iter().fold(0.0f64, |a, &b| a.max(b));
    let tol = 1e-15 * max_norm2.max(1e-300);

    let start = (0..n).min_by(|&a, &b| norms2[a].total_cmp(&norms2[b])).unwrap();
    let mut support = vec![start];
    let mut w = vec![1.0];
    let mut x = q.col(start).to_vec();
    let mut iterations = 0;

    loop {
        let xx = dot(&x, &x);
        let (j, xq) = (0..n)
            .map(|j| (j, dot(&x, q.col(j))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xq <= tol.max(1e-12 * xx) || support.contains(&j) {
            break;
        }
        iterations += 1;
        if iterations > max_iter {
            let mut dense = vec![0.0; n];
            for (&i, &wi) in support.iter().zip(&w) {
                dense[i] = wi;
            }
            return Err(Error::Convergence {
                what: "minimum norm point",
                iterations: max_iter,
                best: dense,
            });
        }
        support.push(j);
        w.push(0.0);

        loop {
            let Some(alpha) = affine_minimizer(q, &support) else {
                // Affinely dependent corral; drop the newest point.
                support.pop();
                w.pop();
                break;
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (&wi, &ai) in w.iter().zip(&alpha) {
                if ai <= 1e-14 {
                    let denom = wi - ai;
                    if denom > 0.0 {
                        theta = theta.min(wi / denom);
                    } else {
                        theta = 0.0;
                    }
                }
            }
            for (wi, ai) in w.iter_mut().zip(&alpha) {
                *wi = theta * ai + (1.0 - theta) * *wi;
            }
            let keep: Vec<bool> = w.iter().map(|&v| v > 1e-14).collect();
            let mut k = 0;
            support.retain(|_| {
                let r = keep[k];
                k += 1;
                r
            });
            w.retain(|&v| v > 1e-14);
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
            if support.len() <= 1 {
                w = vec![1.0; support.len()];
                break;
            }
        }
        let next = combine(q, &support, &w);
        if dot(&next, &next) >= xx * (1.0 - 1e-15) && iterations > 1 {
            break;
        }
        x = next;
    }
    let mut dense = vec![0.0; n];
    for (&i, &wi) in support.iter().zip(&w) {
        dense[i] = wi;
    }
    Ok(MnpSolution {
        weights: dense,
        iterations,
    })
}
