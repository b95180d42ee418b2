//! Brute-force ground truth for tiny instances.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::rng::trial_rng;
use crate::sampler::GraphSampler;
use crate::truncpoisson::DegreeLaw;

pub const MAX_ENUMERATION_VERTICES: usize = 8;
pub const MAX_ENUMERATION_SUBSETS: f64 = 1e8;

pub const MAX_EXACT_VERTICES: usize = 30;
pub const MAX_EXACT_TOTAL: usize = 300;

pub type EdgeList = Vec<(u32, u32)>;

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Every labelled simple graph with `n` vertices, `m` edges and maximum
/// degree at most `d`, each as a sorted edge list.
#[derive(Debug, Clone)]
pub struct EnumeratedEnsemble {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    graphs: Vec<EdgeList>,
    index: HashMap<EdgeList, usize>,
}

impl EnumeratedEnsemble {
    pub fn count(&self) -> usize {
        self.graphs.len()
    }

    pub fn graphs(&self) -> &[EdgeList] {
        &self.graphs
    }

    pub fn position(&self, edges: &[(u32, u32)]) -> Option<usize> {
        self.index.get(edges).copied()
    }
}

/// Enumerates all m-subsets of vertex pairs whose degrees stay within `d`.
pub fn enumerate(n: usize, m: usize, d: usize) -> Result<EnumeratedEnsemble> {
    if n == 0 || n > MAX_ENUMERATION_VERTICES {
        return Err(Error::Domain(format!(
            "enumeration supports 1..={MAX_ENUMERATION_VERTICES} vertices, got {n}"
        )));
    }
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
        .collect();
    let estimate = binomial(pairs.len() as u64, m as u64);
    if estimate > MAX_ENUMERATION_SUBSETS {
        return Err(Error::TooLarge { estimate, limit: MAX_ENUMERATION_SUBSETS });
    }

    let mut graphs = Vec::new();
    let mut chosen = Vec::with_capacity(m);
    let mut degree = vec![0usize; n];
    extend_subsets(&pairs, 0, m, d, &mut chosen, &mut degree, &mut graphs);

    let index = graphs.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    Ok(EnumeratedEnsemble { n, m, d, graphs, index })
}

// Pairs are in lexicographic order, so each chosen subset is already sorted.
fn extend_subsets(
    pairs: &[(u32, u32)],
    start: usize,
    m: usize,
    d: usize,
    chosen: &mut EdgeList,
    degree: &mut [usize],
    out: &mut Vec<EdgeList>,
) {
    if chosen.len() == m {
        out.push(chosen.clone());
        return;
    }
    let needed = m - chosen.len();
    for i in start..pairs.len() {
        if pairs.len() - i < needed {
            break;
        }
        let (u, v) = pairs[i];
        let (u, v) = (u as usize, v as usize);
        if degree[u] == d || degree[v] == d {
            continue;
        }
        degree[u] += 1;
        degree[v] += 1;
        chosen.push(pairs[i]);
        extend_subsets(pairs, i + 1, m, d, chosen, degree, out);
        chosen.pop();
        degree[u] -= 1;
        degree[v] -= 1;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub count: usize,
    pub trials: u64,
    /// Half the L1 distance between sampled frequencies and uniform.
    pub tv_distance: f64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    /// 0.999 quantile of the chi-square reference distribution; `None` when
    /// the ensemble has a single member.
    pub chi_square_q999: Option<f64>,
    pub tallies: Vec<u64>,
}

impl UniformityReport {
    pub fn chi_square_passes(&self) -> bool {
        self.chi_square_q999.is_none_or(|q| self.chi_square < q)
    }
}

/// Draws `trials` graphs (trial `t` uses stream `t` under `seed`) and
/// compares their frequencies with the uniform distribution on `ensemble`.
pub fn uniformity_test(ensemble: &EnumeratedEnsemble, trials: u64, seed: u64) -> Result<UniformityReport> {
    let count = ensemble.count();
    if count == 0 {
        return Err(Error::Precondition("ensemble is empty".into()));
    }
    if trials < 100 * count as u64 {
        return Err(Error::Precondition(format!(
            "need at least {} trials for {count} graphs, got {trials}",
            100 * count
        )));
    }
    let sampler = GraphSampler::new(ensemble.n, ensemble.m, ensemble.d)?;

    let tallies = (0..trials)
        .into_par_iter()
        .try_fold(
            || vec![0u64; count],
            |mut acc, t| {
                let g = sampler.sample(&mut trial_rng(seed, t))?;
                let slot = ensemble
                    .position(g.edges())
                    .ok_or_else(|| Error::NotInEnsemble(g.to_string()))?;
                acc[slot] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![0u64; count],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;

    let expected = trials as f64 / count as f64;
    let uniform = 1.0 / count as f64;
    let tv_distance = 0.5
        * tallies
            .iter()
            .map(|&c| (c as f64 / trials as f64 - uniform).abs())
            .sum::<f64>();
    let chi_square = tallies
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let degrees_of_freedom = count - 1;
    let chi_square_q999 = (degrees_of_freedom > 0).then(|| chi_square_quantile(degrees_of_freedom, 0.999));

    Ok(UniformityReport {
        count,
        trials,
        tv_distance,
        chi_square,
        degrees_of_freedom,
        chi_square_q999,
        tallies,
    })
}

pub fn chi_square_quantile(degrees_of_freedom: usize, p: f64) -> f64 {
    ChiSquared::new(degrees_of_freedom as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(p)
}

/// Exact law of `Z_1 + ... + Z_n` for i.i.d. truncated Poisson `Z_i`, and
/// the law of `Z_1` given that the sum equals `target_sum`.
#[derive(Debug, Clone)]
pub struct ConditionalPmf {
    /// `sum_pmf[s] = P(Z_1 + ... + Z_n = s)` for `s = 0..=d·n`.
    pub sum_pmf: Vec<f64>,
    pub target_sum: usize,
    /// `marginal[k] = P(Z_1 = k | sum = target_sum)`.
    pub marginal: Vec<f64>,
}

impl ConditionalPmf {
    pub fn target_probability(&self) -> f64 {
        self.sum_pmf.get(self.target_sum).copied().unwrap_or(0.0)
    }
}

fn convolve_power(pmf: &[f64], copies: usize) -> Vec<f64> {
    let mut table = vec![1.0];
    for _ in 0..copies {
        let mut next = vec![0.0; table.len() + pmf.len() - 1];
        for (s, &a) in table.iter().enumerate() {
            for (k, &p) in pmf.iter().enumerate() {
                next[s + k] += a * p;
            }
        }
        table = next;
    }
    table
}

/// Dynamic-programming convolution for `n <= 30`, `d·n <= 300`.
pub fn exact_conditional_pmf(n: usize, target_sum: usize, d: usize, lambda: f64) -> Result<ConditionalPmf> {
    if n == 0 || n > MAX_EXACT_VERTICES || d * n > MAX_EXACT_TOTAL {
        return Err(Error::Precondition(format!(
            "exact convolution needs 1 <= n <= {MAX_EXACT_VERTICES} and d*n <= {MAX_EXACT_TOTAL}"
        )));
    }
    let law = DegreeLaw::from_rate(d, lambda)?;
    let pmf = law.probs();
    let rest = convolve_power(pmf, n - 1);
    let sum_pmf = convolve_power(pmf, n);

    let mut marginal = vec![0.0; d + 1];
    let denom = sum_pmf.get(target_sum).copied().unwrap_or(0.0);
    if denom > 0.0 {
        for (k, slot) in marginal.iter_mut().enumerate() {
            if let Some(r) = target_sum.checked_sub(k).and_then(|s| rest.get(s)) {
                *slot = pmf[k] * r / denom;
            }
        }
    }
    Ok(ConditionalPmf { sum_pmf, target_sum, marginal })
}
