//! Lower bounds on the probability that a random projection preserves the
//! relevant geometry, plus the threshold formulas feeding them.
//!
//! The concentration constant `C` is never fixed by the theory; every
//! evaluator takes it explicitly ([`DEFAULT_C`] is the customary 1/4). Bounds
//! that come out negative are clamped to zero and flagged as vacuous.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::DenseVector;

pub const DEFAULT_C: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    PairDistortion,
    RlmFinite,
    PointedCone,
    ConvHull,
    ConeDistance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub inputs: BTreeMap<String, f64>,
    /// `1 - factor * exp(-rate)` before clamping.
    pub raw: f64,
    pub lower_bound: f64,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn report(kind: BoundKind, inputs: &[(&str, f64)], factor: f64, rate: f64) -> BoundReport {
    let raw = 1.0 - factor * (-rate).exp();
    BoundReport {
        kind,
        inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        raw,
        lower_bound: raw.clamp(0.0, 1.0),
        vacuous: raw <= 0.0,
        note: None,
    }
}

fn squared_rate(eps: f64) -> f64 {
    eps * eps - eps * eps * eps
}

/// `1 - p (p - 1) exp(-C eps^2 k)`: all pairwise distances among `points`
/// vectors kept within `1 +- eps`.
pub fn pair_distortion_bound(points: usize, eps: f64, k: f64, c: f64) -> BoundReport {
    let p = points as f64;
    report(
        BoundKind::PairDistortion,
        &[("points", p), ("eps", eps), ("k", k), ("C", c)],
        p * (p - 1.0),
        c * eps * eps * k,
    )
}

/// `1 - 2 |X| exp(-C k)`: `T(b)` avoids every `sum y_i T(a_i)` with `y` in a
/// finite set `X`.
pub fn rlm_finite_bound(card_x: f64, k: f64, c: f64) -> BoundReport {
    report(
        BoundKind::RlmFinite,
        &[("card_X", card_x), ("k", k), ("C", c)],
        2.0 * card_x,
        c * k,
    )
}

/// `1 - 4 (n + 1) exp(-C (eps^2 - eps^3) k)` for a separating hyperplane with
/// margin `eps` between unit vectors.
pub fn pointed_cone_bound(n: usize, eps: f64, k: f64, c: f64) -> BoundReport {
    report(
        BoundKind::PointedCone,
        &[("n", n as f64), ("eps", eps), ("k", k), ("C", c)],
        4.0 * (n as f64 + 1.0),
        c * squared_rate(eps) * k,
    )
}

/// `1 - 2 n^2 exp(-C (eps^2 - eps^3) k)` for convex-hull exclusion; only valid
/// when `eps < d^2 / D^2`.
pub fn convhull_bound(n: usize, eps: f64, k: f64, c: f64) -> BoundReport {
    let nf = n as f64;
    let mut r = report(
        BoundKind::ConvHull,
        &[("n", nf), ("eps", eps), ("k", k), ("C", c)],
        2.0 * nf * nf,
        c * squared_rate(eps) * k,
    );
    r.note = Some("valid only for eps < d^2 / D^2".into());
    r
}

/// `1 - 2 n (n + 1) exp(-C (eps^2 - eps^3) k)` for cone exclusion with `eps`
/// from [`cone_eps_threshold`].
pub fn cone_distance_bound(n: usize, eps: f64, k: f64, c: f64) -> BoundReport {
    let nf = n as f64;
    report(
        BoundKind::ConeDistance,
        &[("n", nf), ("eps", eps), ("k", k), ("C", c)],
        2.0 * nf * (nf + 1.0),
        c * squared_rate(eps) * k,
    )
}

/// `d^2 / (mu_A^2 + 2 ||p|| mu_A + 1)` for unit `b`, where `p` is the
/// projection of `b` on the cone and `d = ||b - p||`.
pub fn cone_eps_threshold(d: f64, p_norm: f64, mu_a: f64) -> Result<f64> {
    if !(mu_a >= 1.0) {
        return Err(Error::usage(format!("mu_A must be >= 1, got {mu_a}")));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::usage(format!("d must lie in (0, 1], got {d}")));
    }
    if !(p_norm >= 0.0) {
        return Err(Error::usage(format!("||p|| must be >= 0, got {p_norm}")));
    }
    if (d * d + p_norm * p_norm - 1.0).abs() > 1e-6 {
        return Err(Error::usage(format!(
            "unit b requires d^2 + ||p||^2 = 1, got {}",
            d * d + p_norm * p_norm
        )));
    }
    Ok(d * d / (mu_a * mu_a + 2.0 * p_norm * mu_a + 1.0))
}

/// For `X = {x in {0,1}^n : alpha^T x <= d}`, returns
/// `(dbar, n^dbar)` with `dbar = max_i floor(d / alpha_i)`, saturating at
/// `u64::MAX`.
///
/// `n^dbar` is the polynomial size used to pick `k`; it under-counts `|X|`
/// when `dbar = 1` (X then holds up to `n + 1` points) and when `n = 2`.
/// [`binomial_cardinality_bound`] is always an upper bound.
pub fn restricted_cardinality_bound(alpha: &DenseVector, d: f64, n: usize) -> Result<(u64, u64)> {
    if alpha.len() != n {
        return Err(Error::Dimension {
            op: "restricted_cardinality_bound",
            expected: n,
            got: alpha.len(),
        });
    }
    if n == 0 {
        return Err(Error::usage("alpha must be nonempty"));
    }
    if let Some(bad) = alpha.iter().find(|&&a| !(a > 0.0)) {
        return Err(Error::usage(format!("alpha entries must be positive, got {bad}")));
    }
    if !(d >= 0.0) {
        return Err(Error::usage(format!("d must be nonnegative, got {d}")));
    }
    let dbar = alpha
        .iter()
        .map(|&a| (d / a).floor())
        .fold(0.0f64, f64::max)
        .min(u64::MAX as f64) as u64;
    let pow = u32::try_from(dbar)
        .ok()
        .and_then(|e| (n as u64).checked_pow(e))
        .unwrap_or(u64::MAX);
    Ok((dbar, pow))
}

/// `sum_{i <= dbar} C(n, i)`, the exact count of 0/1 vectors with at most
/// `dbar` ones (saturating).
pub fn binomial_cardinality_bound(n: u64, dbar: u64) -> u64 {
    let mut total: u64 = 0;
    let mut term: u128 = 1;
    for i in 0..=dbar.min(n) {
        if i > 0 {
            term = term * u128::from(n - i + 1) / u128::from(i);
        }
        total = total.saturating_add(u64::try_from(term).unwrap_or(u64::MAX));
    }
    total
}
