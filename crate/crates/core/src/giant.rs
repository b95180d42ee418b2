//! Phase classification and giant-component prediction.
//!
//! For a degree distribution `(λ_0, ..., λ_d)` with mean `D`, the giant
//! fraction is read off the smallest positive root `ψ` of
//!
//! ```text
//! g(x) = D − 2x − Σ_{i≥1} i λ_i (1 − 2x/D)^{i/2},   0 ≤ x ≤ D/2.
//! ```
//!
//! Writing `ξ = (1 − 2ψ/D)^{1/2}`, a vertex of degree `i` stays outside the
//! giant with probability `ξ^i`, so `Θ = 1 − Σ_{i≥0} λ_i ξ^i`. The `i = 0`
//! term is kept: isolated vertices never belong to the giant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::truncpoisson::{critical_mean_degree, molloy_reed_from_probs, DegreeLaw};

/// Grid points scanned on `(0, D/2]` when bracketing `ψ`.
pub const PSI_SCAN_POINTS: usize = 10_000;

/// `|μ − μ*|` below which a prediction is flagged as near-critical.
pub const NEAR_CRITICAL_BAND: f64 = 1e-6;

fn mean_degree(probs: &[f64]) -> f64 {
    probs.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
}

fn check_probs(probs: &[f64]) -> Result<f64> {
    if probs.len() < 2 || probs.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::Domain("degree distribution needs nonnegative entries for degrees 0..=d".into()));
    }
    let big_d = mean_degree(probs);
    if !(big_d > 0.0) {
        return Err(Error::Domain("degree distribution has zero mean".into()));
    }
    Ok(big_d)
}

fn g_unchecked(probs: &[f64], big_d: f64, x: f64) -> f64 {
    let xi = (1.0 - 2.0 * x / big_d).max(0.0).sqrt();
    let mut power = 1.0;
    let mut sum = 0.0;
    for (i, p) in probs.iter().enumerate().skip(1) {
        power *= xi;
        sum += i as f64 * p * power;
    }
    big_d - 2.0 * x - sum
}

/// `g(x)` for `x` in `[0, D/2]`.
#[doc(alias = "g_eval")]
pub fn g(probs: &[f64], x: f64) -> Result<f64> {
    let big_d = check_probs(probs)?;
    if !(x >= 0.0 && x <= big_d / 2.0) {
        return Err(Error::Domain(format!("x = {x} is outside [0, {}]", big_d / 2.0)));
    }
    Ok(g_unchecked(probs, big_d, x))
}

/// Smallest positive root of `g`.
///
/// Requires a positive Molloy–Reed quantity, so that `g'(0) = Q/D > 0`.
/// The first sign change on a uniform scan of `(0, D/2]` is refined by
/// bisection. `g(D/2) = 0` always, so the endpoint is returned when `g`
/// stays positive inside the interval.
pub fn solve_psi(probs: &[f64]) -> Result<f64> {
    let big_d = check_probs(probs)?;
    let q = molloy_reed_from_probs(probs);
    if !(q > 0.0) {
        return Err(Error::Precondition(format!(
            "Molloy-Reed quantity {q} is not positive; no giant component"
        )));
    }
    let half = big_d / 2.0;
    let step = half / PSI_SCAN_POINTS as f64;

    let mut lo = 0.0;
    for j in 1..PSI_SCAN_POINTS {
        let x = j as f64 * step;
        let value = g_unchecked(probs, big_d, x);
        if value == 0.0 {
            return Ok(x);
        }
        if value < 0.0 {
            return Ok(bisect_down_crossing(probs, big_d, lo, x));
        }
        lo = x;
    }
    Ok(half)
}

/// Root of `g` in `(lo, hi)` given `g > 0` just right of `lo` and `g(hi) < 0`.
fn bisect_down_crossing(probs: &[f64], big_d: f64, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = g_unchecked(probs, big_d, mid);
        if value == 0.0 {
            return mid;
        }
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 0.0 && g_unchecked(probs, big_d, lo).abs() < g_unchecked(probs, big_d, hi).abs() {
        lo
    } else {
        hi
    }
}

/// Giant fraction `1 − Σ_{i=0}^{d} λ_i (1 − 2ψ/D)^{i/2}`.
pub fn theta(probs: &[f64], psi: f64) -> Result<f64> {
    let big_d = check_probs(probs)?;
    if !(psi > 0.0 && psi <= big_d / 2.0) {
        return Err(Error::Domain(format!("psi = {psi} is outside (0, {}]", big_d / 2.0)));
    }
    let xi = (1.0 - 2.0 * psi / big_d).max(0.0).sqrt();
    let mut power = 1.0;
    let mut outside = 0.0;
    for p in probs {
        outside += p * power;
        power *= xi;
    }
    Ok(1.0 - outside)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Subcritical,
    Supercritical,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhasePrediction {
    pub d: usize,
    pub mu: f64,
    pub lambda: f64,
    pub probs: Vec<f64>,
    /// Molloy–Reed quantity.
    pub q: f64,
    /// `None` encodes an infinite threshold (`d = 2`).
    pub mu_star: Option<f64>,
    pub phase: Phase,
    pub psi: Option<f64>,
    pub theta: Option<f64>,
    /// Mean degree `Σ i λ_i`.
    pub big_d: f64,
    pub near_critical: bool,
}

impl PhasePrediction {
    pub fn mu_star_value(&self) -> f64 {
        self.mu_star.unwrap_or(f64::INFINITY)
    }

    /// Predicted giant fraction, 0 in the subcritical phase.
    pub fn giant_fraction(&self) -> f64 {
        self.theta.unwrap_or(0.0)
    }
}

/// Full phase prediction for maximum degree `d` and mean degree `mu`.
pub fn predict(d: usize, mu: f64) -> Result<PhasePrediction> {
    let law = DegreeLaw::new(d, mu)?;
    let probs = law.probs().to_vec();
    let q = law.molloy_reed();
    let mu_star = critical_mean_degree(d)?;
    let near_critical = (mu - mu_star).abs() < NEAR_CRITICAL_BAND;
    let (phase, psi, theta_value) = if q > 0.0 {
        let psi = solve_psi(&probs)?;
        let theta_value = theta(&probs, psi)?;
        (Phase::Supercritical, Some(psi), Some(theta_value))
    } else {
        (Phase::Subcritical, None, None)
    };
    Ok(PhasePrediction {
        d,
        mu,
        lambda: law.lambda(),
        big_d: mean_degree(&probs),
        probs,
        q,
        mu_star: mu_star.is_finite().then_some(mu_star),
        phase,
        psi,
        theta: theta_value,
        near_critical,
    })
}
