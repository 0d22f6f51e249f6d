//! Depth-first branch and bound for `Ax = b, x in Z^n_+`.

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, DenseVector};

use super::instance::{Domain, FeasInstance, SolverOptions, Status, Verdict};
use super::{check_witness, solve_lp, solve_lp_relaxation, LpSolution};

struct Node {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

/// Relaxation of a box-restricted node: shift `x = lo + z` and add
/// `z_j + s_j = hi_j - lo_j` rows.
fn node_relaxation(inst: &FeasInstance, node: &Node) -> Result<FeasInstance> {
    let (m, n) = (inst.m(), inst.n());
    let a = inst.a();
    let mut rhs: Vec<f64> = inst.b().as_slice().to_vec();
    for (j, &l) in node.lo.iter().enumerate() {
        if l != 0.0 {
            for (r, v) in rhs.iter_mut().zip(a.col(j)) {
                *r -= l * v;
            }
        }
    }
    let rows = m + n;
    let cols = 2 * n;
    let mut data = vec![0.0; rows * cols];
    for j in 0..n {
        data[j * rows..j * rows + m].copy_from_slice(a.col(j));
        data[j * rows + m + j] = 1.0;
        data[(n + j) * rows + m + j] = 1.0;
    }
    rhs.extend(node.lo.iter().zip(&node.hi).map(|(l, h)| h - l));
    FeasInstance::new(
        DenseMatrix::from_col_major(rows, cols, data)?,
        DenseVector::new(rhs)?,
        Domain::ContinuousNonneg,
    )
}

/// Decide integer feasibility.
///
/// Upper bounds come from maximizing each coordinate over the LP relaxation.
/// Any bound clipped at `bnb_bound_cap` makes an exhausted tree inconclusive
/// (`Unknown`), as does reaching `bnb_node_cap`.
pub fn solve_ip_feasibility(inst: &FeasInstance, opts: &SolverOptions) -> Result<Verdict> {
    if inst.domain() != Domain::IntegerNonneg {
        return Err(Error::usage(
            "solve_ip_feasibility expects an integer instance",
        ));
    }
    let n = inst.n();
    let mut iterations = 0usize;

    let root = solve_lp_relaxation(inst, opts)?;
    iterations += root.iterations;
    if root.status == Status::Infeasible {
        return Ok(Verdict { nodes: 1, ..root });
    }

    let mut hi = vec![0.0; n];
    let mut capped = false;
    for (j, h) in hi.iter_mut().enumerate() {
        let c = DenseVector::unit(n, j).scaled(-1.0);
        let res = solve_lp(&c, inst, opts)?;
        iterations += res.iterations;
        *h = match res.solution {
            LpSolution::Optimal { objective, .. } => {
                let best = -objective;
                if best > opts.bnb_bound_cap {
                    capped = true;
                    opts.bnb_bound_cap.floor()
                } else {
                    (best + opts.feas_tol * (1.0 + best.abs())).floor().max(0.0)
                }
            }
            LpSolution::Unbounded { .. } => {
                capped = true;
                opts.bnb_bound_cap.floor()
            }
            LpSolution::Infeasible { certificate } => {
                return Ok(Verdict {
                    status: Status::Infeasible,
                    witness: None,
                    certificate: Some(certificate),
                    iterations,
                    nodes: 1,
                })
            }
        };
    }

    let mut stack = vec![Node {
        lo: vec![0.0; n],
        hi,
    }];
    let mut nodes = 0usize;
    while let Some(node) = stack.pop() {
        if nodes >= opts.bnb_node_cap {
            return Ok(Verdict {
                status: Status::Unknown,
                witness: None,
                certificate: None,
                iterations,
                nodes,
            });
        }
        nodes += 1;
        if node.lo.iter().zip(&node.hi).any(|(l, h)| l > h) {
            continue;
        }
        let relax = node_relaxation(inst, &node)?;
        let v = solve_lp_relaxation(&relax, opts)?;
        iterations += v.iterations;
        if v.status != Status::Feasible {
            continue;
        }
        let z = v.witness.expect("feasible relaxation carries a witness");
        let x: Vec<f64> = (0..n).map(|j| node.lo[j] + z[j]).collect();
        let rounded = DenseVector::from_vec_unchecked(x.iter().map(|v| v.round().max(0.0)).collect());
        if check_witness(inst, &rounded, opts.feas_tol) {
            return Ok(Verdict {
                status: Status::Feasible,
                witness: Some(rounded),
                certificate: None,
                iterations,
                nodes,
            });
        }
        // Most fractional free coordinate, lowest index on ties.
        let mut branch = None;
        let mut best = -1.0;
        for (j, &v) in x.iter().enumerate() {
            let frac = (v - v.round()).abs();
            if node.lo[j] < node.hi[j] && frac > best {
                best = frac;
                branch = Some(j);
            }
        }
        let Some(branch) = branch else {
            continue;
        };
        let v = x[branch];
        let (down, up) = if best > 1e-9 {
            (v.floor(), v.ceil())
        } else {
            // Integral to tolerance but the rounded point misses `b`: fix the
            // coordinate at its rounded value in a third child.
            (v.round() - 1.0, v.round() + 1.0)
        };
        let mut up_node = Node {
            lo: node.lo.clone(),
            hi: node.hi.clone(),
        };
        up_node.lo[branch] = up;
        if best <= 1e-9 {
            let mut fixed = Node {
                lo: node.lo.clone(),
                hi: node.hi.clone(),
            };
            fixed.lo[branch] = v.round();
            fixed.hi[branch] = v.round();
            stack.push(fixed);
        }
        let mut down_node = node;
        down_node.hi[branch] = down;
        stack.push(up_node);
        stack.push(down_node);
    }
    Ok(Verdict {
        status: if capped {
            Status::Unknown
        } else {
            Status::Infeasible
        },
        witness: None,
        certificate: None,
        iterations,
        nodes,
    })
}
