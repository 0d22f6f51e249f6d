use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, DenseVector};

/// Variable domain of a feasibility system `Ax = b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    /// `x >= 0`, real.
    ContinuousNonneg,
    /// `x >= 0`, integer.
    IntegerNonneg,
}

/// The system `Ax = b, x in domain`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasInstance {
    a: DenseMatrix,
    b: DenseVector,
    domain: Domain,
}

impl FeasInstance {
    pub fn new(a: DenseMatrix, b: DenseVector, domain: Domain) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::Dimension {
                op: "FeasInstance::new",
                expected: a.rows(),
                got: b.len(),
            });
        }
        Ok(Self { a, b, domain })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseVector {
        &self.b
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Number of equality rows.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn into_parts(self) -> (DenseMatrix, DenseVector, Domain) {
        (self.a, self.b, self.domain)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::Unknown => "unknown",
        })
    }
}

/// Outcome of a feasibility solve.
///
/// `Feasible` carries a witness `x`; continuous `Infeasible` carries a unit
/// Farkas vector `y` with `y^T A <= 0` and `y^T b > 0`. Integer `Infeasible`
/// carries a certificate only when the LP relaxation is already infeasible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<DenseVector>,
    pub certificate: Option<DenseVector>,
    pub iterations: usize,
    /// Branch-and-bound nodes explored (zero for continuous solves).
    pub nodes: usize,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == Status::Infeasible
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative feasibility tolerance.
    pub feas_tol: f64,
    /// Smallest admissible pivot magnitude (on the row-equilibrated tableau).
    pub pivot_tol: f64,
    /// Per-phase simplex iteration cap; `None` means `50 (m + n)`.
    pub max_iters: Option<usize>,
    pub bnb_node_cap: usize,
    pub bnb_bound_cap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            pivot_tol: 1e-9,
            max_iters: None,
            bnb_node_cap: 1_000_000,
            bnb_bound_cap: 1e6,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.feas_tol > 0.0 && self.pivot_tol > 0.0 && self.bnb_bound_cap > 0.0) {
            return Err(Error::usage("solver tolerances and caps must be positive"));
        }
        Ok(())
    }

    pub(crate) fn iteration_cap(&self, m: usize, n: usize) -> usize {
        self.max_iters.unwrap_or(50 * (m + n))
    }
}
