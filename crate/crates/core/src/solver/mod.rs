//! Ground-truth feasibility and optimization engine.
//!
//! [`solve_lp_feasibility`] runs phase I of a dense tableau simplex and
//! returns either a nonnegative witness or a Farkas certificate.
//! [`solve_lp`] adds phase II for a linear objective, and
//! [`solve_ip_feasibility`] wraps the LP in a depth-first branch and bound.

mod bnb;
mod instance;
mod simplex;

pub use bnb::solve_ip_feasibility;
pub use instance::{Domain, FeasInstance, SolverOptions, Status, Verdict};

use crate::error::{Error, Result};
use crate::numerics::{dot, norm, DenseVector};

use simplex::{LpOutcome, PhaseOneOutcome, Tableau};

#[derive(Clone, Debug, PartialEq)]
pub enum LpSolution {
    Optimal { x: DenseVector, objective: f64 },
    /// Unit Farkas vector for the constraint system.
    Infeasible { certificate: DenseVector },
    /// A feasible point and a direction `r >= 0` with `A r = 0`, `c^T r < 0`.
    Unbounded { x: DenseVector, ray: DenseVector },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub solution: LpSolution,
    pub iterations: usize,
}

fn unit(v: Vec<f64>) -> DenseVector {
    let nrm = norm(&v);
    let v = if nrm > 0.0 && nrm.is_finite() {
        v.into_iter().map(|x| x / nrm).collect()
    } else {
        v
    };
    DenseVector::from_vec_unchecked(v)
}

fn tableau_for(inst: &FeasInstance, opts: &SolverOptions) -> Tableau {
    Tableau::new(
        inst.a().col_major(),
        inst.m(),
        inst.n(),
        inst.b().as_slice(),
        opts,
    )
}

/// Decide `exists x >= 0 : Ax = b` (the domain tag is ignored, so this also
/// solves the LP relaxation of an integer instance).
pub fn solve_lp_relaxation(inst: &FeasInstance, opts: &SolverOptions) -> Result<Verdict> {
    opts.validate()?;
    let mut tab = tableau_for(inst, opts);
    let outcome = tab.phase_one(opts.feas_tol)?;
    Ok(match outcome {
        PhaseOneOutcome::Feasible => Verdict {
            status: Status::Feasible,
            witness: Some(DenseVector::from_vec_unchecked(tab.primal())),
            certificate: None,
            iterations: tab.iterations,
            nodes: 0,
        },
        PhaseOneOutcome::Infeasible(y) => Verdict {
            status: Status::Infeasible,
            witness: None,
            certificate: Some(unit(y)),
            iterations: tab.iterations,
            nodes: 0,
        },
    })
}

/// Decide feasibility of a continuous instance.
pub fn solve_lp_feasibility(inst: &FeasInstance, opts: &SolverOptions) -> Result<Verdict> {
    if inst.domain() != Domain::ContinuousNonneg {
        return Err(Error::usage(
            "solve_lp_feasibility expects a continuous instance",
        ));
    }
    solve_lp_relaxation(inst, opts)
}

/// Minimize `c^T x` over `{Ax = b, x >= 0}`.
pub fn solve_lp(c: &DenseVector, inst: &FeasInstance, opts: &SolverOptions) -> Result<LpResult> {
    opts.validate()?;
    if c.len() != inst.n() {
        return Err(Error::Dimension {
            op: "solve_lp",
            expected: inst.n(),
            got: c.len(),
        });
    }
    let mut tab = tableau_for(inst, opts);
    if let PhaseOneOutcome::Infeasible(y) = tab.phase_one(opts.feas_tol)? {
        return Ok(LpResult {
            solution: LpSolution::Infeasible { certificate: unit(y) },
            iterations: tab.iterations,
        });
    }
    let solution = match tab.phase_two(c.as_slice())? {
        LpOutcome::Optimal { x, objective } => LpSolution::Optimal {
            x: DenseVector::from_vec_unchecked(x),
            objective,
        },
        LpOutcome::Unbounded { x, ray } => LpSolution::Unbounded {
            x: DenseVector::from_vec_unchecked(x),
            ray: DenseVector::from_vec_unchecked(ray),
        },
    };
    Ok(LpResult {
        solution,
        iterations: tab.iterations,
    })
}

/// Dispatch on the instance domain.
pub fn solve(inst: &FeasInstance, opts: &SolverOptions) -> Result<Verdict> {
    match inst.domain() {
        Domain::ContinuousNonneg => solve_lp_feasibility(inst, opts),
        Domain::IntegerNonneg => solve_ip_feasibility(inst, opts),
    }
}

/// `||Ax - b|| <= tol (1 + ||b||)`, `x >= -tol`, and integrality within `tol`
/// for integer instances.
pub fn check_witness(inst: &FeasInstance, x: &DenseVector, tol: f64) -> bool {
    if x.len() != inst.n() {
        return false;
    }
    if x.iter().any(|&v| v < -tol) {
        return false;
    }
    if inst.domain() == Domain::IntegerNonneg && x.iter().any(|&v| (v - v.round()).abs() > tol) {
        return false;
    }
    let ax = inst.a().matvec_slice(x.as_slice());
    let res: f64 = ax
        .iter()
        .zip(inst.b().iter())
        .map(|(l, r)| (l - r) * (l - r))
        .sum::<f64>()
        .sqrt();
    res <= tol * (1.0 + inst.b().two_norm())
}

/// `y^T a_i <= tol ||a_i||` for every column and `y^T b >= tol ||b||`.
pub fn check_farkas(inst: &FeasInstance, y: &DenseVector, tol: f64) -> bool {
    if y.len() != inst.m() {
        return false;
    }
    let a = inst.a();
    let cols_ok = (0..a.cols()).all(|j| {
        let col = a.col(j);
        dot(y.as_slice(), col) <= tol * norm(col)
    });
    let yb = dot(y.as_slice(), inst.b().as_slice());
    cols_ok && yb > 0.0 && yb >= tol * inst.b().two_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DenseMatrix;

    fn inst(rows: &[Vec<f64>], b: &[f64]) -> FeasInstance {
        FeasInstance::new(
            DenseMatrix::from_rows(rows).unwrap(),
            DenseVector::new(b.to_vec()).unwrap(),
            Domain::ContinuousNonneg,
        )
        .unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn identity_system_is_feasible() {
        let p = inst(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 2.0]);
        let v = solve_lp_feasibility(&p, &opts()).unwrap();
        assert_eq!(v.status, Status::Feasible);
        let x = v.witness.unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_with_positive_row_is_infeasible() {
        let p = inst(&[vec![1.0, 1.0]], &[-1.0]);
        let v = solve_lp_feasibility(&p, &opts()).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        let y = v.certificate.unwrap();
        assert!((y[0] + 1.0).abs() < 1e-12);
        assert!(check_farkas(&p, &y, 1e-7));
    }

    #[test]
    fn negative_coefficient_needed_is_infeasible() {
        // b = -a1 + a2; the unique representation has a negative weight.
        let p = inst(&[vec![1.0, 1.0], vec![0.0, 1.0]], &[0.0, 1.0]);
        let v = solve_lp_feasibility(&p, &opts()).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        assert!(check_farkas(&p, v.certificate.as_ref().unwrap(), 1e-7));
    }

    #[test]
    fn rejects_integer_domain() {
        let p = inst(&[vec![1.0]], &[1.0]).with_domain(Domain::IntegerNonneg);
        assert!(solve_lp_feasibility(&p, &opts()).is_err());
    }

    #[test]
    fn lp_fixed_sum() {
        let p = inst(&[vec![1.0, 1.0]], &[1.0]);
        let c = DenseVector::new(vec![1.0, 1.0]).unwrap();
        match solve_lp(&c, &p, &opts()).unwrap().solution {
            LpSolution::Optimal { objective, .. } => assert!((objective - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lp_unbounded_free_growth() {
        let p = inst(&[vec![0.0]], &[0.0]);
        let c = DenseVector::new(vec![-1.0]).unwrap();
        match solve_lp(&c, &p, &opts()).unwrap().solution {
            LpSolution::Unbounded { ray, .. } => assert_eq!(ray.as_slice(), &[1.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lp_with_slack_matches_vertex_enumeration() {
        // min x2 s.t. x1 + x2 = 2, x1 + s = 3.
        let p = inst(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]], &[2.0, 3.0]);
        let c = DenseVector::new(vec![0.0, 1.0, 0.0]).unwrap();
        // Vertices of {x1 + x2 = 2, 0 <= x1 <= 3, x2 >= 0}: (2, 0) and (0, 2).
        let vertices = [(2.0, 0.0), (0.0, 2.0)];
        let best = vertices.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        match solve_lp(&c, &p, &opts()).unwrap().solution {
            LpSolution::Optimal { x, objective } => {
                assert!((objective - best).abs() < 1e-12);
                assert!((x[0] - 2.0).abs() < 1e-12 && x[1].abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let p = inst(&[vec![1.0, 1.0], vec![2.0, 2.0]], &[1.0, 2.0]);
        let c = DenseVector::new(vec![1.0, 2.0]).unwrap();
        match solve_lp(&c, &p, &opts()).unwrap().solution {
            LpSolution::Optimal { objective, .. } => assert!((objective - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let p = inst(&[vec![1.0, 2.0, 3.0], vec![3.0, 1.0, 2.0]], &[1.0, 1.0]);
        let o = SolverOptions {
            max_iters: Some(0),
            ..opts()
        };
        assert!(matches!(
            solve_lp_feasibility(&p, &o),
            Err(Error::IterationLimit { .. })
        ));
    }

    #[test]
    fn check_witness_cases() {
        let p = inst(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 2.0]);
        let tau = 1e-7;
        assert!(check_witness(&p, &DenseVector::new(vec![1.0, 2.0]).unwrap(), tau));
        let neg = inst(&[vec![1.0, 1.0]], &[1.0 - 10.0 * tau]);
        assert!(!check_witness(
            &neg,
            &DenseVector::new(vec![1.0, -10.0 * tau]).unwrap(),
            tau
        ));
    }

    #[test]
    fn check_farkas_rejects_zero() {
        let p = inst(&[vec![1.0, 1.0]], &[-1.0]);
        assert!(check_farkas(&p, &DenseVector::new(vec![-1.0]).unwrap(), 1e-7));
        assert!(!check_farkas(&p, &DenseVector::zeros(1), 1e-7));
    }
}
