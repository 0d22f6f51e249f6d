//! Random sketch maps `T(x) = S x` with `S` a scaled `k x m` random matrix,
//! and the target-dimension rules that go with them.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, DenseVector};
use crate::rng::rng_from_seed;
use crate::solver::FeasInstance;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectorFamily {
    /// i.i.d. `N(0, 1/k)` entries.
    #[default]
    Gaussian,
    /// i.i.d. `+-1/sqrt(k)` entries.
    Rademacher,
    /// `sqrt(3/k) * {+1, 0, -1}` with probabilities `1/6, 2/3, 1/6`.
    #[serde(rename = "sparse")]
    AchlioptasSparse,
}

impl ProjectorFamily {
    pub const ALL: [ProjectorFamily; 3] = [
        ProjectorFamily::Gaussian,
        ProjectorFamily::Rademacher,
        ProjectorFamily::AchlioptasSparse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProjectorFamily::Gaussian => "gaussian",
            ProjectorFamily::Rademacher => "rademacher",
            ProjectorFamily::AchlioptasSparse => "sparse",
        }
    }
}

impl fmt::Display for ProjectorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProjectorFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(ProjectorFamily::Gaussian),
            "rademacher" => Ok(ProjectorFamily::Rademacher),
            "sparse" | "achlioptas" => Ok(ProjectorFamily::AchlioptasSparse),
            other => Err(Error::usage(format!("unknown projector family `{other}`"))),
        }
    }
}

/// A sampled sketch. `matrix` already includes the family's scale factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub family: ProjectorFamily,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub matrix: DenseMatrix,
}

/// Sample a `k x m` projector; regeneration from the same arguments yields
/// the same matrix.
pub fn sample_projector(family: ProjectorFamily, k: usize, m: usize, seed: u64) -> Result<Projector> {
    if k == 0 || k > m {
        return Err(Error::usage(format!(
            "projector needs 1 <= k <= m, got k={k}, m={m}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let len = k * m;
    let kf = k as f64;
    let data: Vec<f64> = match family {
        ProjectorFamily::Gaussian => {
            let s = 1.0 / kf.sqrt();
            (0..len)
                .map(|_| s * rng.sample::<f64, _>(StandardNormal))
                .collect()
        }
        ProjectorFamily::Rademacher => {
            let s = 1.0 / kf.sqrt();
            (0..len).map(|_| if rng.gen::<bool>() { s } else { -s }).collect()
        }
        ProjectorFamily::AchlioptasSparse => {
            let s = (3.0 / kf).sqrt();
            (0..len)
                .map(|_| match rng.gen_range(0u8..6) {
                    0 => s,
                    1 => -s,
                    _ => 0.0,
                })
                .collect()
        }
    };
    Ok(Projector {
        family,
        k,
        m,
        seed,
        matrix: DenseMatrix::from_col_major_unchecked(k, m, data),
    })
}

impl Projector {
    /// Wrap an explicit matrix (useful for deterministic sketches in tests).
    pub fn from_matrix(family: ProjectorFamily, matrix: DenseMatrix) -> Result<Self> {
        let (k, m) = (matrix.rows(), matrix.cols());
        if k > m {
            return Err(Error::usage(format!(
                "projector needs k <= m, got k={k}, m={m}"
            )));
        }
        Ok(Self {
            family,
            k,
            m,
            seed: 0,
            matrix,
        })
    }

    pub fn apply(&self, v: &DenseVector) -> Result<DenseVector> {
        apply(self, v)
    }
}

/// `T(v)`.
pub fn apply(t: &Projector, v: &DenseVector) -> Result<DenseVector> {
    if v.len() != t.m {
        return Err(Error::Dimension {
            op: "apply",
            expected: t.m,
            got: v.len(),
        });
    }
    crate::numerics::matvec(&t.matrix, v)
}

/// `(T A, T b)` with the original variable domain.
pub fn apply_to_instance(t: &Projector, inst: &FeasInstance) -> Result<FeasInstance> {
    if inst.m() != t.m {
        return Err(Error::Dimension {
            op: "apply_to_instance",
            expected: t.m,
            got: inst.m(),
        });
    }
    let a = t.matrix.matmul(inst.a())?;
    let b = apply(t, inst.b())?;
    FeasInstance::new(a, b, inst.domain())
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::usage(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// `ceil` that ignores rounding noise just above an integer.
pub(crate) fn ceil_tolerant(x: f64) -> usize {
    let snapped = x - 1e-9 * x.abs().max(1.0);
    snapped.ceil().max(0.0) as usize
}

/// Smallest `k` with `points (points - 1) exp(-C eps^2 k) <= delta`, which
/// makes every pairwise distance among `points` vectors survive with
/// probability at least `1 - delta`.
pub fn choose_k_jll(points: usize, eps: f64, delta: f64, c: f64) -> Result<usize> {
    check_unit_interval("eps", eps)?;
    check_unit_interval("delta", delta)?;
    if points < 2 {
        return Err(Error::usage("choose_k_jll needs at least two points"));
    }
    if !(c > 0.0) {
        return Err(Error::usage("C must be positive"));
    }
    let p = points as f64;
    Ok(ceil_tolerant((p * (p - 1.0) / delta).ln() / (c * eps * eps)))
}

/// Smallest `k` with `2 |X| exp(-C k) <= delta` for a finite restriction set.
pub fn choose_k_rlm(card_x: u64, delta: f64, c: f64) -> Result<usize> {
    check_unit_interval("delta", delta)?;
    if card_x == 0 {
        return Err(Error::usage("card_X must be at least 1"));
    }
    if !(c > 0.0) {
        return Err(Error::usage("C must be positive"));
    }
    Ok(ceil_tolerant(
        ((2.0 / delta).ln() + (card_x as f64).ln()) / c,
    ))
}
