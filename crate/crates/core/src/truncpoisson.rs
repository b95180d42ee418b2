//! Truncated Poisson degree law.
//!
//! `s_d(λ) = Σ_{j≤d} λ^j / j!` is the partial exponential sum and
//! `f_d(λ) = λ s_{d-1}(λ) / s_d(λ)` the mean of a Poisson(λ) variable
//! conditioned on being at most `d`. `f_d` increases strictly from 0 to `d`
//! on `(0, ∞)`, so it can be inverted by bracketing and bisection.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute bisection tolerance on λ for [`invert_truncated_mean`].
pub const LAMBDA_TOL: f64 = 1e-12;

const MAX_BRACKET_DOUBLINGS: usize = 2048;

fn check_rate(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("rate must be positive and finite, got {lambda}")))
    }
}

/// `s_d(λ)`, summed in ascending order with the term recurrence
/// `t_{j+1} = t_j λ / (j + 1)`.
pub fn partial_exp_sum(d: usize, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..d {
        term *= lambda / (j + 1) as f64;
        sum += term;
    }
    Ok(sum)
}

/// Terms `λ^j / j!` for `j = 0..=d`, rescaled by a common positive factor so
/// that none of them overflows. Only ratios of these are meaningful.
fn scaled_terms(d: usize, lambda: f64) -> Vec<f64> {
    let mut terms = vec![0.0; d + 1];
    if lambda <= 1.0 {
        terms[0] = 1.0;
        for j in 1..=d {
            terms[j] = terms[j - 1] * lambda / j as f64;
        }
    } else {
        // Walk down from the top term; the growth factor j/λ is at most d!.
        terms[d] = 1.0;
        for j in (1..=d).rev() {
            terms[j - 1] = terms[j] * j as f64 / lambda;
        }
    }
    terms
}

/// Mean of the Poisson(λ) law truncated to `{0, ..., k}`, i.e.
/// `λ s_{k-1}(λ) / s_k(λ)`. Always strictly inside `(0, k)`.
#[doc(alias = "f")]
pub fn truncated_mean(k: usize, lambda: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("truncation level must be at least 1".into()));
    }
    check_rate(lambda)?;
    let terms = scaled_terms(k, lambda);
    let total: f64 = terms.iter().sum();
    let weighted: f64 = terms.iter().enumerate().map(|(j, t)| j as f64 * t).sum();
    Ok(weighted / total)
}

/// The unique λ > 0 with `truncated_mean(k, λ) == target`.
///
/// The upper bracket is doubled until it overshoots, then the interval is
/// bisected until it is narrower than [`LAMBDA_TOL`] or cannot be split
/// further in floating point.
#[doc(alias = "invert_f")]
pub fn invert_truncated_mean(k: usize, target: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("truncation level must be at least 1".into()));
    }
    if !(target > 0.0 && target < k as f64) {
        return Err(Error::Domain(format!(
            "target mean {target} is outside (0, {k}); no finite preimage"
        )));
    }

    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut doublings = 0;
    while truncated_mean(k, hi)? < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "target mean {target} too close to {k} to bracket"
            )));
        }
    }

    while hi - lo > LAMBDA_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if truncated_mean(k, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    if lo == 0.0 {
        return Ok(hi);
    }
    let err_lo = (truncated_mean(k, lo)? - target).abs();
    let err_hi = (truncated_mean(k, hi)? - target).abs();
    Ok(if err_lo < err_hi { lo } else { hi })
}

/// Critical mean degree `f_d(f_{d-1}^{-1}(1))` separating the phase with
/// only small components from the phase with a giant component.
///
/// For `d = 2` no giant ever forms: `f_1` never reaches 1, and the result is
/// `f64::INFINITY`.
#[doc(alias = "mu_star")]
pub fn critical_mean_degree(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("threshold needs d >= 2, got {d}")));
    }
    if d == 2 {
        return Ok(f64::INFINITY);
    }
    let lambda = invert_truncated_mean(d - 1, 1.0)?;
    truncated_mean(d, lambda)
}

/// Poisson(λ) truncated to `{0, ..., d}`, parameterised by its mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeLaw {
    d: usize,
    lambda: f64,
    mu: f64,
    probs: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

impl DegreeLaw {
    /// Law with maximum degree `d >= 2` and mean degree `mu` in `(0, d)`.
    #[doc(alias = "make_degree_law")]
    pub fn new(d: usize, mu: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("maximum degree must be at least 2, got {d}")));
        }
        if !(mu > 0.0 && mu < d as f64) {
            return Err(Error::Domain(format!("mean degree {mu} is outside (0, {d})")));
        }
        let lambda = invert_truncated_mean(d, mu)?;
        Ok(Self::from_parts(d, lambda, mu))
    }

    /// Law with an explicit rate. Also accepts `d = 1`.
    pub fn from_rate(d: usize, lambda: f64) -> Result<Self> {
        let mu = truncated_mean(d, lambda)?;
        Ok(Self::from_parts(d, lambda, mu))
    }

    fn from_parts(d: usize, lambda: f64, mu: f64) -> Self {
        let terms = scaled_terms(d, lambda);
        let total: f64 = terms.iter().sum();
        let probs: Vec<f64> = terms.iter().map(|t| t / total).collect();
        let mut cdf: Vec<f64> = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        cdf[d] = 1.0;
        DegreeLaw { d, lambda, mu, probs, cdf }
    }

    pub fn max_degree(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    /// `(λ_0, ..., λ_d)`: probability of each degree.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `Σ i² λ_i − μ²`, from the moments of `probs`.
    pub fn variance(&self) -> f64 {
        let (first, second) = self
            .probs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(m1, m2), (i, p)| {
                let i = i as f64;
                (m1 + i * p, m2 + i * i * p)
            });
        (second - first * first).max(0.0)
    }

    /// Molloy–Reed quantity `Σ i(i−2) λ_i`; its sign decides the phase.
    #[doc(alias = "molloy_reed_q")]
    pub fn molloy_reed(&self) -> f64 {
        molloy_reed_from_probs(&self.probs)
    }

    /// Closed form `f_d(λ)(f_{d−1}(λ) − 1)` of [`DegreeLaw::molloy_reed`].
    pub fn molloy_reed_closed_form(&self) -> f64 {
        let outer = truncated_mean(self.d, self.lambda).expect("valid law");
        let inner = truncated_mean(self.d - 1, self.lambda).expect("valid law");
        outer * (inner - 1.0)
    }

    /// Inverse-CDF lookup: the smallest degree whose cumulative probability
    /// reaches `u`, for `u` in `[0, 1)`.
    pub fn sample_degree(&self, u: f64) -> usize {
        self.cdf.iter().position(|&c| c >= u).unwrap_or(self.d)
    }
}

/// `Σ i(i−2) p_i` for an arbitrary degree distribution.
pub fn molloy_reed_from_probs(probs: &[f64]) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let i = i as f64;
            i * (i - 2.0) * p
        })
        .sum()
}
