//! Lawson-Hanson active set for `min_{lambda >= 0} ||b - A lambda||`.

use crate::error::{Error, Result};
use crate::numerics::linalg::least_squares;
use crate::numerics::{dot, norm, DenseMatrix};

pub(crate) struct NnlsSolution {
    pub lambda: Vec<f64>,
    pub iterations: usize,
}

fn residual(a: &DenseMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.matvec_slice(x);
    b.iter().zip(&ax).map(|(l, r)| l - r).collect()
}

pub(crate) fn nnls(a: &DenseMatrix, b: &[f64], max_iter: usize) -> Result<NnlsSolution> {
    let (m, n) = (a.rows(), a.cols());
    let col_norms = a.column_norms();
    let scale = col_norms.iter().fold(0.0f64, |acc, &v| acc.max(v)) * norm(b).max(1e-300);
    let tol = 1e-13 * scale.max(1e-300);

    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let mut iterations = 0;
    // Columns that failed to enter (numerically dependent on the passive set).
    let mut blocked = vec![false; n];

    loop {
        let r = residual(a, b, &x);
        let w: Vec<f64> = (0..n).map(|j| dot(a.col(j), &r)).collect();
        let entering = (0..n)
            .filter(|&j| !passive[j] && !blocked[j] && col_norms[j] > 0.0)
            .filter(|&j| w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = entering else {
            break;
        };
        iterations += 1;
        if iterations > max_iter {
            return Err(Error::Convergence {
                what: "nonnegative least squares",
                iterations: max_iter,
                best: x,
            });
        }
        passive[j] = true;
        let x_before = x.clone();

        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let mut sub = Vec::with_capacity(idx.len() * m);
            for &i in &idx {
                sub.extend_from_slice(a.col(i));
            }
            let Some(z) = least_squares(&sub, m, idx.len(), b, 1e-12) else {
                // Dependent column: back it out and never retry it.
                passive[j] = false;
                blocked[j] = true;
                break;
            };
            if z.iter().all(|&v| v > 0.0) {
                for (&i, &v) in idx.iter().zip(&z) {
                    x[i] = v;
                }
                break;
            }
            // Step toward z until the first passive coordinate hits zero.
            let mut alpha = 1.0;
            let mut hit = None;
            for (&i, &v) in idx.iter().zip(&z) {
                if v <= 0.0 {
                    let denom = x[i] - v;
                    let ratio = if denom > 0.0 { x[i] / denom } else { 0.0 };
                    if hit.is_none() || ratio < alpha {
                        alpha = ratio;
                        hit = Some(i);
                    }
                }
            }
            for (&i, &v) in idx.iter().zip(&z) {
                x[i] += alpha * (v - x[i]);
                if x[i] <= 0.0 || Some(i) == hit {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
        if passive[j] || x != x_before {
            blocked.iter_mut().for_each(|b| *b = false);
        } else {
            blocked[j] = true;
        }
    }
    Ok(NnlsSolution {
        lambda: x,
        iterations,
    })
}
