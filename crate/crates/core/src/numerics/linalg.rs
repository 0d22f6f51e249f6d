//! Small dense factorizations used by the active-set geometry routines.

/// Least-squares solution of `min ||A z - b||` for a column-major `rows x cols`
/// matrix via Householder QR.
///
/// Returns `None` when a diagonal entry of `R` falls below `rank_tol` times the
/// largest column norm, i.e. when the columns are numerically dependent.
pub fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64], rank_tol: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(b.len(), rows);
    if cols > rows {
        return None;
    }
    let mut q = a.to_vec();
    let mut rhs = b.to_vec();
    let scale = (0..cols)
        .map(|j| super::norm(&q[j * rows..(j + 1) * rows]))
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return None;
    }
    let mut diag = vec![0.0; cols];
    for k in 0..cols {
        let (head, tail) = q.split_at_mut((k + 1) * rows);
        let col_k = &mut head[k * rows..];
        let alpha = super::norm(&col_k[k..]);
        if alpha <= rank_tol * scale {
            return None;
        }
        let sign = if col_k[k] >= 0.0 { 1.0 } else { -1.0 };
        let r_kk = -sign * alpha;
        // Householder vector v = x - r_kk e_k, stored in place.
        col_k[k] -= r_kk;
        let vnorm2 = super::dot(&col_k[k..], &col_k[k..]);
        diag[k] = r_kk;
        if vnorm2 == 0.0 {
            continue;
        }
        for j in (k + 1)..cols {
            let cj = &mut tail[(j - k - 1) * rows..(j - k) * rows];
            let f = 2.0 * super::dot(&col_k[k..], &cj[k..]) / vnorm2;
            for (c, v) in cj[k..].iter_mut().zip(&col_k[k..]) {
                *c -= f * v;
            }
        }
        let f = 2.0 * super::dot(&col_k[k..], &rhs[k..]) / vnorm2;
        for (r, v) in rhs[k..].iter_mut().zip(&col_k[k..]) {
            *r -= f * v;
        }
    }
    // Back substitution on R (upper triangle of q, diagonal in `diag`).
    let mut z = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut s = rhs[k];
        for j in (k + 1)..cols {
            s -= q[j * rows + k] * z[j];
        }
        z[k] = s / diag[k];
    }
    Some(z)
}

/// Solve the square system `M z = rhs` (row-major `n x n`) by Gaussian
/// elimination with partial pivoting. `None` if a pivot vanishes.
pub fn solve_square(m: &[f64], n: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    debug_assert_eq!(m.len(), n * n);
    let mut a = m.to_vec();
    let mut b = rhs.to_vec();
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap();
        if a[p * n + k].abs() <= 1e-14 * scale {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let piv = a[k * n + k];
        for i in (k + 1)..n {
            let f = a[i * n + k] / piv;
            if f != 0.0 {
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut z = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k * n + j] * z[j];
        }
        z[k] = s / a[k * n + k];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_overdetermined() {
        // Fit y = c0 + c1 t through (0,1), (1,3), (2,5): exact line 1 + 2t.
        let a = [1.0, 1.0, 1.0, 0.0, 1.0, 2.0];
        let z = least_squares(&a, 3, 2, &[1.0, 3.0, 5.0], 1e-12).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_projects_residual_orthogonally() {
        let a = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let z = least_squares(&a, 3, 2, &[2.0, -1.0, 7.0], 1e-12).unwrap();
        assert!((z[0] - 2.0).abs() < 1e-14 && (z[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_detects_dependence() {
        let a = [1.0, 2.0, 2.0, 4.0];
        assert!(least_squares(&a, 2, 2, &[1.0, 1.0], 1e-10).is_none());
    }

    #[test]
    fn solve_square_pivots() {
        let m = [0.0, 1.0, 2.0, 0.0];
        let z = solve_square(&m, 2, &[3.0, 4.0]).unwrap();
        assert_eq!(z, vec![2.0, 3.0]);
        assert!(solve_square(&[1.0, 2.0, 2.0, 4.0], 2, &[1.0, 1.0]).is_none());
    }
}
