//! Cone and convex-hull geometry: separating margins, Euclidean projections,
//! distances, A-norms and the sampled distortion constant `mu_A`.

mod mnp;
mod nnls;

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{dot, norm, DenseMatrix, DenseVector};
use crate::rng::rng_from_seed;
use crate::solver::{solve_lp, Domain, FeasInstance, LpSolution, SolverOptions};

/// Unit `c` and margin `eps` with `c^T b <= -eps` and `c^T a_i >= eps`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub c: DenseVector,
    pub eps: f64,
}

impl SeparationCertificate {
    /// Check the defining inequalities against `(a, b)` at tolerance `tol`.
    pub fn validate(&self, a: &DenseMatrix, b: &DenseVector, tol: f64) -> bool {
        let c = self.c.as_slice();
        (norm(c) - 1.0).abs() <= tol
            && dot(c, b.as_slice()) <= -self.eps + tol
            && (0..a.cols()).all(|j| dot(c, a.col(j)) >= self.eps - tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeDistanceReport {
    /// Closest point to `b` in the set.
    pub p: DenseVector,
    /// `||b - p||`.
    pub d: f64,
    /// `max_i ||b - a_i||`.
    pub big_d: f64,
    /// Nonnegative weights with `p = A lambda`.
    pub lambda: DenseVector,
    pub iterations: usize,
}

impl ConeDistanceReport {
    /// `(max_i r^T a_i, |r^T p|)` for the residual `r = b - p`; both vanish at
    /// a cone projection.
    pub fn kkt_residuals(&self, a: &DenseMatrix, b: &DenseVector) -> (f64, f64) {
        let r: Vec<f64> = b.iter().zip(self.p.iter()).map(|(x, y)| x - y).collect();
        let dual = (0..a.cols())
            .map(|j| dot(&r, a.col(j)))
            .fold(f64::NEG_INFINITY, f64::max);
        (dual, dot(&r, self.p.as_slice()).abs())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ANormReport {
    pub value: f64,
    /// A minimal representation: `A lambda = x`, `sum lambda = value`.
    pub lambda: DenseVector,
}

fn check_rows(a: &DenseMatrix, v: &DenseVector, op: &'static str) -> Result<()> {
    if a.rows() != v.len() {
        return Err(Error::Dimension {
            op,
            expected: a.rows(),
            got: v.len(),
        });
    }
    Ok(())
}

fn max_generator_distance(a: &DenseMatrix, b: &DenseVector) -> f64 {
    (0..a.cols())
        .map(|j| {
            a.col(j)
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn distance_report(a: &DenseMatrix, b: &DenseVector, lambda: Vec<f64>, iterations: usize) -> ConeDistanceReport {
    let p = a.matvec_slice(&lambda);
    let d = b
        .iter()
        .zip(&p)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    ConeDistanceReport {
        p: DenseVector::from_vec_unchecked(p),
        d,
        big_d: max_generator_distance(a, b),
        lambda: DenseVector::from_vec_unchecked(lambda),
        iterations,
    }
}

/// Solve the separating coefficient LP
/// `max eps s.t. c^T b <= -eps, c^T a_i >= eps, ||c||_inf <= 1`, then rescale
/// `c` to the Euclidean unit sphere and recompute the margin.
///
/// Fails with [`Error::Membership`] when no positive margin exists, which
/// happens when `b` lies in the cone (or the cone is not pointed).
pub fn scp_solve(a: &DenseMatrix, b: &DenseVector, opts: &SolverOptions) -> Result<SeparationCertificate> {
    check_rows(a, b, "scp_solve")?;
    let (m, n) = (a.rows(), a.cols());
    // Variables: w (m, c = w - 1), t (m, w + t = 2), eps, s0, s (n).
    let cols = 2 * m + 2 + n;
    let rows = 1 + n + m;
    let eps_col = 2 * m;
    let mut data = vec![0.0; rows * cols];
    let mut rhs = vec![0.0; rows];
    let set = |data: &mut Vec<f64>, r: usize, c: usize, v: f64| data[c * rows + r] = v;
    // (w - 1)^T b + eps + s0 = 0
    for i in 0..m {
        set(&mut data, 0, i, b[i]);
    }
    set(&mut data, 0, eps_col, 1.0);
    set(&mut data, 0, eps_col + 1, 1.0);
    rhs[0] = b.iter().sum();
    // (w - 1)^T a_j - eps - s_j = 0
    for j in 0..n {
        let r = 1 + j;
        let col = a.col(j);
        for i in 0..m {
            set(&mut data, r, i, col[i]);
        }
        set(&mut data, r, eps_col, -1.0);
        set(&mut data, r, eps_col + 2 + j, -1.0);
        rhs[r] = col.iter().sum();
    }
    // w_i + t_i = 2
    for i in 0..m {
        let r = 1 + n + i;
        set(&mut data, r, i, 1.0);
        set(&mut data, r, m + i, 1.0);
        rhs[r] = 2.0;
    }
    let lp = FeasInstance::new(
        DenseMatrix::from_col_major(rows, cols, data)?,
        DenseVector::new(rhs)?,
        Domain::ContinuousNonneg,
    )?;
    let mut cost = vec![0.0; cols];
    cost[eps_col] = -1.0;
    let res = solve_lp(&DenseVector::from_vec_unchecked(cost), &lp, opts)?;
    let x = match res.solution {
        LpSolution::Optimal { x, .. } => x,
        // The LP is bounded and c = 0, eps = 0 is feasible.
        other => {
            return Err(Error::Membership(format!(
                "separating coefficient LP ended as {other:?}"
            )))
        }
    };
    let c: Vec<f64> = (0..m).map(|i| x[i] - 1.0).collect();
    let cn = norm(&c);
    if !(cn > 0.0) || x[eps_col] <= 0.0 {
        return Err(Error::Membership(
            "no positive separating margin; b may lie in cone(A), re-check feasibility".into(),
        ));
    }
    let c: Vec<f64> = c.into_iter().map(|v| v / cn).collect();
    let margin = |c: &[f64]| {
        (0..n)
            .map(|j| dot(c, a.col(j)))
            .fold(-dot(c, b.as_slice()), f64::min)
    };
    let mut best = (margin(&c), c);
    // The box-constrained optimum is not unique, so its rescaled margin
    // depends on the vertex found. The Euclidean max-margin direction is
    // the min-norm point of conv{a_1, ..., a_n, -b}; keep whichever is larger.
    if let Some(z) = euclidean_margin_direction(a, b) {
        let zn = norm(&z);
        if zn > 0.0 {
            let c: Vec<f64> = z.into_iter().map(|v| v / zn).collect();
            let eps = margin(&c);
            if eps > best.0 {
                best = (eps, c);
            }
        }
    }
    let (eps, c) = best;
    if eps <= 0.0 {
        return Err(Error::Membership(format!(
            "separating margin {eps} is not positive; b may lie in cone(A), re-check feasibility"
        )));
    }
    Ok(SeparationCertificate {
        c: DenseVector::from_vec_unchecked(c),
        eps,
    })
}

fn euclidean_margin_direction(a: &DenseMatrix, b: &DenseVector) -> Option<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    let mut data = a.col_major().to_vec();
    data.extend(b.iter().map(|v| -v));
    let q = DenseMatrix::from_col_major(m, n + 1, data).ok()?;
    let sol = mnp::min_norm_point(&q, 100 * (m + n + 1)).ok()?;
    Some(q.matvec_slice(&sol.weights))
}

/// Euclidean projection of `b` onto `cone(A)` by active-set nonnegative least
/// squares. The default iteration cap is `3n`.
pub fn project_onto_cone(a: &DenseMatrix, b: &DenseVector) -> Result<ConeDistanceReport> {
    project_onto_cone_with_cap(a, b, 3 * a.cols())
}

pub fn project_onto_cone_with_cap(a: &DenseMatrix, b: &DenseVector, max_iter: usize) -> Result<ConeDistanceReport> {
    check_rows(a, b, "project_onto_cone")?;
    let sol = nnls::nnls(a, b.as_slice(), max_iter)?;
    Ok(distance_report(a, b, sol.lambda, sol.iterations))
}

/// Closest point of `conv(A)` to `b` via Wolfe's minimum-norm-point method
/// on the shifted points `a_i - b`.
pub fn dist_to_convhull(a: &DenseMatrix, b: &DenseVector) -> Result<ConeDistanceReport> {
    check_rows(a, b, "dist_to_convhull")?;
    let shifted = DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) - b[i])?;
    let cap = 100 * (a.rows() + a.cols());
    let sol = mnp::min_norm_point(&shifted, cap)?;
    Ok(distance_report(a, b, sol.weights, sol.iterations))
}

/// `||x||_A = min { sum lambda : lambda >= 0, A lambda = x }`.
pub fn a_norm(a: &DenseMatrix, x: &DenseVector, opts: &SolverOptions) -> Result<ANormReport> {
    check_rows(a, x, "a_norm")?;
    let inst = FeasInstance::new(a.clone(), x.clone(), Domain::ContinuousNonneg)?;
    let ones = DenseVector::from_vec_unchecked(vec![1.0; a.cols()]);
    match solve_lp(&ones, &inst, opts)?.solution {
        LpSolution::Optimal { x: lambda, objective } => Ok(ANormReport {
            value: objective,
            lambda,
        }),
        LpSolution::Infeasible { .. } => Err(Error::Membership(
            "A-norm is undefined: x is not in cone(A)".into(),
        )),
        LpSolution::Unbounded { .. } => Err(Error::Membership(
            "A-norm LP unbounded; columns must be nonzero".into(),
        )),
    }
}

/// Sampled lower bound on `mu_A = max { ||x||_A : x in cone(A), ||x|| <= 1 }`.
///
/// Evaluates the A-norm at every normalized generator and at `samples`
/// normalized random cone points `A lambda` with i.i.d. exponential
/// `lambda`. Samples are drawn sequentially, so a larger `samples` with the
/// same seed extends the same sequence.
pub fn mu_a_lower_bound(a: &DenseMatrix, samples: usize, seed: u64, opts: &SolverOptions) -> Result<f64> {
    if samples == 0 {
        return Err(Error::usage("mu_A estimation needs at least one sample"));
    }
    let mut best = 1.0f64;
    for j in 0..a.cols() {
        let col = a.col(j);
        let nrm = norm(col);
        if nrm > 0.0 {
            let x = DenseVector::from_vec_unchecked(col.iter().map(|v| v / nrm).collect());
            best = best.max(a_norm(a, &x, opts)?.value);
        }
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        let lambda: Vec<f64> = (0..a.cols()).map(|_| rng.sample(Exp1)).collect();
        let x = a.matvec_slice(&lambda);
        let nrm = norm(&x);
        if nrm <= 1e-12 {
            continue;
        }
        let x = DenseVector::from_vec_unchecked(x.into_iter().map(|v| v / nrm).collect());
        best = best.max(a_norm(a, &x, opts)?.value);
    }
    Ok(best)
}

/// Check `||b - x||^2 >= alpha^2 - 2 alpha ||p|| + 1` (slack `-1e-8`) for unit
/// `b`, `x` in the cone, `alpha = ||x||` and `p` the projection of `b`.
pub fn claim_inequality_check(a: &DenseMatrix, b: &DenseVector, x: &DenseVector) -> Result<bool> {
    check_rows(a, b, "claim_inequality_check")?;
    check_rows(a, x, "claim_inequality_check")?;
    if (b.two_norm() - 1.0).abs() > 1e-9 {
        return Err(Error::usage("claim inequality needs a unit-norm b"));
    }
    let proj = project_onto_cone(a, b)?;
    let alpha = x.two_norm();
    let p_norm = proj.p.two_norm();
    let lhs: f64 = b
        .iter()
        .zip(x.iter())
        .map(|(u, v)| (u - v) * (u - v))
        .sum();
    Ok(lhs - (alpha * alpha - 2.0 * alpha * p_norm + 1.0) >= -1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::random_unit;
    use crate::solver::{solve_lp_feasibility, Status};

    fn mat(cols: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_columns(cols).unwrap()
    }

    fn vecd(v: &[f64]) -> DenseVector {
        DenseVector::new(v.to_vec()).unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn scp_orthant_example() {
        let s = 0.5f64.sqrt();
        let a = mat(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let b = vecd(&[-s, -s]);
        let cert = scp_solve(&a, &b, &opts()).unwrap();
        assert!((cert.c[0] - s).abs() < 1e-9 && (cert.c[1] - s).abs() < 1e-9);
        assert!((cert.eps - s).abs() < 1e-9);
        assert!(cert.validate(&a, &b, 1e-9));
    }

    #[test]
    fn scp_antipodal_example() {
        let a = mat(&[vec![1.0, 0.0]]);
        let b = vecd(&[-1.0, 0.0]);
        let cert = scp_solve(&a, &b, &opts()).unwrap();
        assert!((cert.c[0] - 1.0).abs() < 1e-9 && cert.c[1].abs() < 1e-9);
        assert!((cert.eps - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scp_orthogonal_example_validates() {
        let a = mat(&[vec![1.0, 0.0]]);
        let b = vecd(&[0.0, 1.0]);
        let cert = scp_solve(&a, &b, &opts()).unwrap();
        assert!(cert.eps > 0.0);
        assert!(cert.validate(&a, &b, 1e-9));
    }

    #[test]
    fn scp_rejects_members() {
        let a = mat(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let b = vecd(&[0.6, 0.8]);
        assert!(matches!(scp_solve(&a, &b, &opts()), Err(Error::Membership(_))));
    }

    #[test]
    fn projection_examples() {
        let a = mat(&[vec![1.0, 0.0]]);
        let r = project_onto_cone(&a, &vecd(&[0.0, 1.0])).unwrap();
        assert!(r.p.two_norm() < 1e-12 && (r.d - 1.0).abs() < 1e-12);
        let r = project_onto_cone(&a, &vecd(&[1.0, 1.0])).unwrap();
        assert!((r.p[0] - 1.0).abs() < 1e-12 && r.p[1].abs() < 1e-12 && (r.d - 1.0).abs() < 1e-12);
        let orthant = mat(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let b = vecd(&[-1.0, 2.0]);
        let r = project_onto_cone(&orthant, &b).unwrap();
        // Clip-negative oracle.
        let clipped: Vec<f64> = b.iter().map(|v| v.max(0.0)).collect();
        assert!((r.p[0] - clipped[0]).abs() < 1e-12 && (r.p[1] - clipped[1]).abs() < 1e-12);
        assert!((r.d - 1.0).abs() < 1e-12);
        let (dual, comp) = r.kkt_residuals(&orthant, &b);
        assert!(dual <= 1e-8 && comp <= 1e-8);
    }

    #[test]
    fn projection_of_member_is_itself() {
        let a = mat(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]);
        let b = vecd(&[0.5, 0.25, 0.75]);
        let r = project_onto_cone(&a, &b).unwrap();
        assert!(r.d < 1e-12);
    }

    #[test]
    fn projection_cap_is_an_error() {
        let a = mat(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let err = project_onto_cone_with_cap(&a, &vecd(&[1.0, 1.0]), 1).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn hull_examples() {
        let a = mat(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = dist_to_convhull(&a, &vecd(&[1.0, 0.0])).unwrap();
        assert!(r.d < 1e-12 && (r.lambda[0] - 1.0).abs() < 1e-12);
        let r = dist_to_convhull(&a, &vecd(&[0.0, 0.0])).unwrap();
        assert!((r.d - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r.p[0] - 0.5).abs() < 1e-12 && (r.p[1] - 0.5).abs() < 1e-12);
        let r = dist_to_convhull(&a, &vecd(&[2.0, 0.0])).unwrap();
        assert!((r.d - 1.0).abs() < 1e-12 && (r.big_d - 5f64.sqrt()).abs() < 1e-12);
        assert!((r.p[0] - 1.0).abs() < 1e-12 && r.p[1].abs() < 1e-12);
    }

    #[test]
    fn a_norm_examples() {
        let a = mat(&[vec![1.0, 0.0], vec![0.6, 0.8]]);
        assert!((a_norm(&a, &vecd(&[1.0, 0.0]), &opts()).unwrap().value - 1.0).abs() < 1e-12);
        assert!(a_norm(&a, &vecd(&[0.0, 0.0]), &opts()).unwrap().value.abs() < 1e-12);
        let id = DenseMatrix::identity(2);
        let r = a_norm(&id, &vecd(&[1.0, 1.0]), &opts()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(matches!(
            a_norm(&id, &vecd(&[-1.0, 1.0]), &opts()),
            Err(Error::Membership(_))
        ));
    }

    #[test]
    fn mu_a_examples() {
        let single = mat(&[vec![0.6, 0.8]]);
        assert!((mu_a_lower_bound(&single, 10, 1, &opts()).unwrap() - 1.0).abs() < 1e-12);
        let id = DenseMatrix::identity(2);
        let mu = mu_a_lower_bound(&id, 100, 5, &opts()).unwrap();
        assert!((1.35..=2f64.sqrt() + 1e-12).contains(&mu), "{mu}");
        let mut prev = 0.0;
        for s in [1, 5, 20, 80] {
            let v = mu_a_lower_bound(&id, s, 5, &opts()).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn claim_examples() {
        let a = mat(&[vec![1.0, 0.0]]);
        let b = vecd(&[0.0, 1.0]);
        assert!(claim_inequality_check(&a, &b, &vecd(&[0.0, 0.0])).unwrap());
        assert!(claim_inequality_check(&a, &b, &vecd(&[3.0, 0.0])).unwrap());
        assert!(claim_inequality_check(&a, &vecd(&[0.0, 2.0]), &vecd(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn random_claim_sweep_outside_cone() {
        let mut rng = rng_from_seed(3);
        let mut checked = 0;
        while checked < 2000 {
            let m = rng.gen_range(2..6);
            let n = rng.gen_range(1..6);
            let cols: Vec<Vec<f64>> = (0..n).map(|_| random_unit(&mut rng, m)).collect();
            let a = mat(&cols);
            let b = vecd(&random_unit(&mut rng, m));
            let inst = FeasInstance::new(a.clone(), b.clone(), Domain::ContinuousNonneg).unwrap();
            if solve_lp_feasibility(&inst, &opts()).unwrap().status != Status::Infeasible {
                continue;
            }
            let lambda: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) * 3.0).collect();
            let x = DenseVector::new(a.matvec_slice(&lambda)).unwrap();
            assert!(claim_inequality_check(&a, &b, &x).unwrap());
            checked += 1;
        }
    }
}
