//! Random instances with solver-certified labels.
//!
//! Entries of `A` are drawn i.i.d. from one of three nonnegative
//! distributions. Feasible instances are built as `b = A x*` with a retained
//! witness `x*`; infeasible ones draw `b` from the same distribution, flip the
//! sign of one coordinate, and keep the draw only once the simplex returns a
//! Farkas certificate for it.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution as _, Exp, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{norm, normalize_columns, DenseMatrix, DenseVector};
use crate::rng::{mix, rng_from_seed};
use crate::solver::{solve_lp_relaxation, Domain, FeasInstance, SolverOptions, Status};

const MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Uniform on `[0, 1)`.
    Uniform,
    /// Exponential with rate 1.
    #[serde(rename = "exp")]
    Exponential,
    /// Gamma with shape 2 and scale 1.
    Gamma,
}

impl Distribution {
    pub const ALL: [Distribution; 3] = [Distribution::Uniform, Distribution::Exponential, Distribution::Gamma];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Exponential => "exp",
            Distribution::Gamma => "gamma",
        }
    }

    pub fn mean(self) -> f64 {
        match self {
            Distribution::Uniform => 0.5,
            Distribution::Exponential => 1.0,
            Distribution::Gamma => 2.0,
        }
    }

    pub fn sample(self, rng: &mut impl Rng) -> f64 {
        match self {
            Distribution::Uniform => rng.gen::<f64>(),
            Distribution::Exponential => Exp::new(1.0).expect("rate 1").sample(rng),
            Distribution::Gamma => Gamma::new(2.0, 1.0).expect("shape 2, scale 1").sample(rng),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uniform01" => Ok(Distribution::Uniform),
            "exp" | "exponential" => Ok(Distribution::Exponential),
            "gamma" => Ok(Distribution::Gamma),
            other => Err(Error::usage(format!(
                "unknown distribution `{other}` (expected uniform, exp or gamma)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Feasible,
    Infeasible,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "feasible" => Ok(Target::Feasible),
            "infeasible" => Ok(Target::Infeasible),
            other => Err(Error::usage(format!(
                "unknown target `{other}` (expected feasible or infeasible)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub dist: Distribution,
    pub m: usize,
    pub n: usize,
    pub domain: Domain,
    pub target: Target,
    /// Scale columns of `A` and `b` to unit norm. Continuous domain only.
    pub normalize_columns: bool,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(dist: Distribution, m: usize, n: usize, target: Target, seed: u64) -> Self {
        GenSpec {
            dist,
            m,
            n,
            domain: Domain::ContinuousNonneg,
            target,
            normalize_columns: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::usage("instance dimensions must be at least 1"));
        }
        if self.target == Target::Feasible && self.m > self.n {
            return Err(Error::usage(format!(
                "feasible instances need m <= n (got m = {}, n = {})",
                self.m, self.n
            )));
        }
        if self.normalize_columns && self.domain == Domain::IntegerNonneg {
            return Err(Error::usage("column normalization would break integrality of the witness"));
        }
        Ok(())
    }
}

/// An instance together with the evidence for its label.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedInstance {
    pub instance: FeasInstance,
    pub label: Target,
    pub witness: Option<DenseVector>,
    pub certificate: Option<DenseVector>,
    pub spec: GenSpec,
}

fn draw_vector(dist: Distribution, len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| dist.sample(rng)).collect()
}

pub fn generate(spec: &GenSpec) -> Result<GeneratedInstance> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let mut rng = rng_from_seed(spec.seed);
    let raw = DenseMatrix::from_col_major(m, n, draw_vector(spec.dist, m * n, &mut rng))?;
    let a = if spec.normalize_columns {
        normalize_columns(&raw)?
    } else {
        raw.clone()
    };
    let opts = SolverOptions::default();

    match spec.target {
        Target::Feasible => {
            let mut x = draw_vector(spec.dist, n, &mut rng);
            if spec.domain == Domain::IntegerNonneg {
                x.iter_mut().for_each(|v| *v = v.round());
            }
            let mut b = raw.matvec_slice(&x);
            if spec.normalize_columns {
                let col_norms = raw.column_norms();
                // A' = A D^-1, so A (x) = A' (D x); then scale b and the witness together.
                for (v, d) in x.iter_mut().zip(&col_norms) {
                    *v *= d;
                }
                let bn = norm(&b);
                if bn > 0.0 {
                    b.iter_mut().for_each(|v| *v /= bn);
                    x.iter_mut().for_each(|v| *v /= bn);
                }
            }
            let instance = FeasInstance::new(a, DenseVector::new(b)?, spec.domain)?;
            Ok(GeneratedInstance {
                instance,
                label: Target::Feasible,
                witness: Some(DenseVector::new(x)?),
                certificate: None,
                spec: spec.clone(),
            })
        }
        Target::Infeasible => {
            for _ in 0..MAX_ATTEMPTS {
                let mut b = draw_vector(spec.dist, m, &mut rng);
                let flip = rng.gen_range(0..m);
                b[flip] = -b[flip];
                if spec.normalize_columns {
                    let bn = norm(&b);
                    if bn == 0.0 {
                        continue;
                    }
                    b.iter_mut().for_each(|v| *v /= bn);
                }
                let instance = FeasInstance::new(a.clone(), DenseVector::new(b)?, spec.domain)?;
                // LP infeasibility certifies the integer version too.
                let verdict = solve_lp_relaxation(&instance, &opts)?;
                if verdict.status == Status::Infeasible {
                    return Ok(GeneratedInstance {
                        instance,
                        label: Target::Infeasible,
                        witness: None,
                        certificate: verdict.certificate,
                        spec: spec.clone(),
                    });
                }
            }
            Err(Error::Generation(format!(
                "no certified infeasible right-hand side after {MAX_ATTEMPTS} attempts for {spec:?}"
            )))
        }
    }
}

/// `count` instances; member `i` uses seed `mix(spec.seed, i)`.
pub fn generate_suite(spec: &GenSpec, count: usize) -> Result<Vec<GeneratedInstance>> {
    if count == 0 {
        return Err(Error::usage("suite size must be at least 1"));
    }
    (0..count)
        .map(|i| {
            let member = GenSpec {
                seed: mix(spec.seed, i as u64),
                ..spec.clone()
            };
            generate(&member)
        })
        .collect()
}
