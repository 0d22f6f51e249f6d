//! Monte Carlo estimates of projection success probabilities, and
//! calibration of the universal constant `C` in `1 - 2 exp(-C eps^2 k)`.
//!
//! Every trial draws a fresh vector and a fresh projector from seeds derived
//! from `(seed, trial)`, so estimates are reproducible and independent of
//! evaluation order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::norm;
use crate::projector::{apply_to_instance, sample_projector, ProjectorFamily};
use crate::rng::{mix, mix3, random_unit, rng_from_seed};
use crate::solver::{solve, FeasInstance, SolverOptions, Status};

/// Normal quantile for a one-sided 95% Wilson limit as conventionally reported.
const Z95: f64 = 1.96;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    /// Lower end of the 95% Wilson score interval.
    pub wilson_low: f64,
}

impl McEstimate {
    pub fn new(successes: usize, trials: usize) -> Self {
        assert!(successes <= trials && trials > 0);
        McEstimate {
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            wilson_low: wilson_lower(successes, trials, Z95),
        }
    }
}

/// Wilson score lower limit for `successes` out of `trials`.
pub fn wilson_lower(successes: usize, trials: usize, z: f64) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half) / denom).max(0.0)
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::usage("at least one trial is required"));
    }
    Ok(())
}

/// `||T x||` for `trials` fresh unit vectors `x` in `R^m` and fresh `k x m`
/// projectors `T`.
pub fn distortion_samples(family: ProjectorFamily, k: usize, m: usize, trials: usize, seed: u64) -> Result<Vec<f64>> {
    check_trials(trials)?;
    (0..trials as u64)
        .map(|t| {
            let x = random_unit(&mut rng_from_seed(mix3(seed, t, 0)), m);
            let proj = sample_projector(family, k, m, mix3(seed, t, 1))?;
            Ok(norm(&proj.matrix.matvec_slice(&x)))
        })
        .collect()
}

fn count_within(samples: &[f64], eps: f64) -> usize {
    samples
        .iter()
        .filter(|&&r| (1.0 - eps) <= r && r <= (1.0 + eps))
        .count()
}

/// Rate of `(1 - eps) ||x|| <= ||T x|| <= (1 + eps) ||x||`.
pub fn estimate_distortion(
    family: ProjectorFamily,
    k: usize,
    m: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::usage(format!("eps must lie in (0, 1), got {eps}")));
    }
    let samples = distortion_samples(family, k, m, trials, seed)?;
    Ok(McEstimate::new(count_within(&samples, eps), trials))
}

/// Rate of `T x != 0` (norm above `1e-12`) for fresh nonzero `x`.
pub fn estimate_kernel_avoidance(
    family: ProjectorFamily,
    k: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    let samples = distortion_samples(family, k, m, trials, seed)?;
    Ok(McEstimate::new(samples.iter().filter(|&&r| r > 1e-12).count(), trials))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreservationReport {
    pub estimate: McEstimate,
    pub original_status: Status,
    /// Set when the original instance was feasible: feasibility always
    /// survives a linear map, so such a run carries no information.
    pub wrong_direction: bool,
    pub projected: Vec<Status>,
}

/// Rate at which the projected instance keeps the original verdict, one
/// fresh projector (seed `mix(seed, j)`) per trial.
pub fn estimate_infeasibility_preservation(
    inst: &FeasInstance,
    family: ProjectorFamily,
    k: usize,
    projectors: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<PreservationReport> {
    check_trials(projectors)?;
    let original = solve(inst, opts)?.status;
    if original == Status::Unknown {
        return Err(Error::usage("instance label could not be certified"));
    }
    let projected = (0..projectors as u64)
        .map(|j| {
            let t = sample_projector(family, k, inst.m(), mix(seed, j))?;
            Ok(solve(&apply_to_instance(&t, inst)?, opts)?.status)
        })
        .collect::<Result<Vec<_>>>()?;
    let successes = projected.iter().filter(|&&s| s == original).count();
    Ok(PreservationReport {
        estimate: McEstimate::new(successes, projectors),
        original_status: original,
        wrong_direction: original == Status::Feasible,
        projected,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub eps: f64,
    pub k: usize,
    pub estimate: McEstimate,
    /// Largest `C` with `1 - 2 exp(-C eps^2 k) <= wilson_low` at this point.
    pub c_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub c_hat: f64,
    pub points: Vec<CalibrationPoint>,
}

/// Largest `C` such that `1 - 2 exp(-C eps^2 k)` stays below the Wilson lower
/// limit of the empirical distortion rate at every grid point.
///
/// Each `k` uses ambient dimension `m = k` (the smallest the projector
/// accepts; the Gaussian distortion law does not depend on `m`) and one set of
/// trial samples shared by all `eps`.
pub fn calibrate_c(
    family: ProjectorFamily,
    eps_grid: &[f64],
    k_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Calibration> {
    if eps_grid.is_empty() || k_grid.is_empty() {
        return Err(Error::usage("calibration grids must be nonempty"));
    }
    if let Some(e) = eps_grid.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::usage(format!("eps must lie in (0, 1), got {e}")));
    }
    let mut points = Vec::with_capacity(eps_grid.len() * k_grid.len());
    for &k in k_grid {
        let samples = distortion_samples(family, k, k, trials, mix(seed, k as u64))?;
        for &eps in eps_grid {
            let estimate = McEstimate::new(count_within(&samples, eps), trials);
            let c_max = -((1.0 - estimate.wilson_low) / 2.0).ln() / (eps * eps * k as f64);
            points.push(CalibrationPoint { eps, k, estimate, c_max });
        }
    }
    let c_hat = points.iter().map(|p| p.c_max).fold(f64::INFINITY, f64::min);
    if !(c_hat.is_finite() && c_hat > 0.0) {
        return Err(Error::Calibration(format!(
            "no positive constant fits the grid (got {c_hat}); check the projector scaling"
        )));
    }
    Ok(Calibration { c_hat, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::pair_distortion_bound;
    use crate::gen::{generate, Distribution, GenSpec, Target};

    #[test]
    fn wilson_reference_values() {
        // Independent closed form for p = 1: n / (n + z^2).
        assert!((wilson_lower(100, 100, Z95) - 100.0 / (100.0 + Z95 * Z95)).abs() < 1e-12);
        assert_eq!(wilson_lower(0, 50, Z95), 0.0);
        // Textbook value for 81/263: 0.2553.
        assert!((wilson_lower(81, 263, Z95) - 0.2553).abs() < 5e-4);
        let e = McEstimate::new(90, 100);
        assert!(e.wilson_low < e.rate && e.rate == 0.9);
    }

    #[test]
    fn distortion_concentrates_for_large_k() {
        let e = estimate_distortion(ProjectorFamily::Gaussian, 200, 200, 0.2, 2000, 1).unwrap();
        assert!(e.rate >= 0.95, "{e:?}");
    }

    #[test]
    fn single_coordinate_does_not_concentrate() {
        let e = estimate_distortion(ProjectorFamily::Gaussian, 1, 20, 0.01, 2000, 2).unwrap();
        assert!(e.rate < 0.1, "{e:?}");
    }

    #[test]
    fn more_rows_help() {
        for family in ProjectorFamily::ALL {
            let lo = estimate_distortion(family, 20, 200, 0.2, 1000, 3).unwrap();
            let hi = estimate_distortion(family, 200, 200, 0.2, 1000, 3).unwrap();
            assert!(hi.rate >= lo.rate - 0.01);
        }
    }

    #[test]
    fn squared_criterion_inclusions() {
        let eps = 0.1;
        let eps_sq = 2.0 * eps - eps * eps;
        let samples = distortion_samples(ProjectorFamily::Rademacher, 30, 60, 3000, 4).unwrap();
        for r in samples {
            let unsquared = (1.0 - eps) <= r && r <= 1.0 + eps;
            let squared = (r * r - 1.0).abs() <= eps_sq;
            // |r^2 - 1| <= 2 eps - eps^2 forces r into [1 - eps, 1 + eps];
            // the converse needs the wider 2 eps + eps^2.
            if squared {
                assert!(unsquared);
            }
            if unsquared {
                assert!((r * r - 1.0).abs() <= 2.0 * eps + eps * eps + 1e-15);
            }
        }
    }

    #[test]
    fn gaussian_kernel_is_avoided() {
        for k in [1, 3, 10] {
            let e = estimate_kernel_avoidance(ProjectorFamily::Gaussian, k, 30, 2000, k as u64).unwrap();
            assert_eq!(e.successes, e.trials);
        }
    }

    #[test]
    fn preservation_of_feasible_is_flagged() {
        let g = generate(&GenSpec::new(Distribution::Uniform, 10, 20, Target::Feasible, 8)).unwrap();
        let r = estimate_infeasibility_preservation(&g.instance, ProjectorFamily::Gaussian, 4, 30, 1, &SolverOptions::default()).unwrap();
        assert!(r.wrong_direction);
        assert_eq!(r.estimate.rate, 1.0);
    }

    #[test]
    fn full_rank_square_sketch_preserves_infeasibility() {
        let g = generate(&GenSpec::new(Distribution::Uniform, 10, 20, Target::Infeasible, 8)).unwrap();
        let r = estimate_infeasibility_preservation(&g.instance, ProjectorFamily::Gaussian, 10, 30, 2, &SolverOptions::default()).unwrap();
        assert!(!r.wrong_direction);
        assert_eq!(r.estimate.rate, 1.0);
    }

    #[test]
    fn calibration_lies_below_every_point() {
        let cal = calibrate_c(ProjectorFamily::Gaussian, &[0.2, 0.5], &[20, 60], 1000, 5).unwrap();
        for p in &cal.points {
            let b = pair_distortion_bound(2, p.eps, p.k as f64, cal.c_hat);
            assert!(b.raw <= p.estimate.wilson_low + 1e-12);
        }
        assert!(calibrate_c(ProjectorFamily::Gaussian, &[], &[20], 10, 0).is_err());
        assert!(calibrate_c(ProjectorFamily::Gaussian, &[1.5], &[20], 10, 0).is_err());
    }
}
