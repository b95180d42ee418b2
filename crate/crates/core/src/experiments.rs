//! Threshold tables, Monte Carlo phase sweeps and the percolation duel.
//!
//! Trials run in parallel, each on its own random stream derived from the
//! master seed, the grid-point index and the trial index. Results are
//! gathered in trial order, so output is identical for any thread count.
//!
//! The duel compares the bounded-degree model with bond percolation on a
//! random `d`-regular graph. Edges of the regular graph are kept with
//! probability `p = μ/d`, which puts both models on the same mean-degree
//! axis. The percolation threshold `p_c = 1/(d−1)` then sits at mean degree
//! `1 + 1/(d−1)`.

use std::f64::consts::E;
use std::fmt::Write as _;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::components::{report, ComponentReport};
use crate::error::{Error, Result};
use crate::giant::{predict, PhasePrediction};
use crate::rng::{stream_id, trial_rng};
use crate::sampler::{GraphSampler, RetryLimits};
use crate::truncpoisson::critical_mean_degree;

pub const MAX_TABLE_DEGREE: usize = 20;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdRow {
    pub d: usize,
    pub mu_star: f64,
    /// `1 + 1/(e (d−1)!) − 1/(e d!)`.
    pub approximation: f64,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn threshold_approximation(d: usize) -> f64 {
    1.0 + 1.0 / (E * factorial(d - 1)) - 1.0 / (E * factorial(d))
}

/// Mean degree at which bond percolation on a random `d`-regular graph
/// develops a giant component.
pub fn percolation_threshold(d: usize) -> f64 {
    1.0 + 1.0 / (d as f64 - 1.0)
}

pub fn threshold_table(d_max: usize) -> Result<Vec<ThresholdRow>> {
    if !(2..=MAX_TABLE_DEGREE).contains(&d_max) {
        return Err(Error::Config(format!("dmax must lie in 2..={MAX_TABLE_DEGREE}, got {d_max}")));
    }
    (2..=d_max)
        .map(|d| {
            Ok(ThresholdRow {
                d,
                mu_star: critical_mean_degree(d)?,
                approximation: threshold_approximation(d),
            })
        })
        .collect()
}

pub fn format_threshold_table(rows: &[ThresholdRow]) -> String {
    let mut out = String::from("d\tmu_star\tapproximation\n");
    for row in rows {
        let star = if row.mu_star.is_finite() {
            format!("{:.8}", row.mu_star)
        } else {
            "inf".to_string()
        };
        writeln!(out, "{}\t{}\t{:.8}", row.d, star, row.approximation).unwrap();
    }
    out
}

/// Evenly spaced grid from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Edge count `⌈μn/2⌉` for mean degree `mu`.
pub fn edges_for_mean(mu: f64, n: usize) -> usize {
    (mu * n as f64 / 2.0).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub d: usize,
    pub mu_grid: Vec<f64>,
    pub n: usize,
    pub trials: u32,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Config(format!("d must be at least 2, got {}", self.d)));
        }
        if self.n < 10 {
            return Err(Error::Config(format!("n must be at least 10, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::Config("need at least one trial".into()));
        }
        if self.mu_grid.is_empty() {
            return Err(Error::Config("empty mean-degree grid".into()));
        }
        if !self.mu_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("mean-degree grid must be strictly increasing".into()));
        }
        if let Some(mu) = self.mu_grid.iter().find(|&&mu| !(mu > 0.0 && mu < self.d as f64)) {
            return Err(Error::Config(format!("mean degree {mu} is outside (0, {})", self.d)));
        }
        Ok(())
    }
}

/// Mean and sample standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub mu: f64,
    pub n: usize,
    pub m: usize,
    pub trials: u32,
    /// Predicted giant fraction; 0 below the threshold.
    pub predicted_theta: f64,
    pub mean_largest_frac: f64,
    pub std_largest_frac: f64,
    pub mean_second_frac: f64,
    /// Mean over trials of `max_i |ν_i/n − λ_i|`.
    pub max_degree_dev: f64,
    pub flags: Vec<String>,
    /// Per-trial values, in trial order, for successful trials.
    pub largest_fractions: Vec<f64>,
    pub second_fractions: Vec<f64>,
    pub degree_devs: Vec<f64>,
    pub failed_trials: u32,
}

pub const SWEEP_CSV_HEADER: &str =
    "d,mu,n,m,trials,predicted_theta,mean_largest_frac,std_largest_frac,mean_second_frac,max_degree_dev,flags";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{:.6},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            self.d,
            self.mu,
            self.n,
            self.m,
            self.trials,
            self.predicted_theta,
            self.mean_largest_frac,
            self.std_largest_frac,
            self.mean_second_frac,
            self.max_degree_dev,
            self.flags.join(";"),
        )
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

fn run_trials<F>(trials: u32, point: u32, seed: u64, trial: F) -> Vec<Result<ComponentReport>>
where
    F: Fn(&mut crate::rng::TrialRng) -> Result<ComponentReport> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(seed, stream_id(point, t))))
        .collect()
}

fn sampler_for(d: usize, mu: f64, n: usize) -> Result<(GraphSampler, PhasePrediction)> {
    let m = edges_for_mean(mu, n);
    let prediction = predict(d, mu)?;
    Ok((GraphSampler::new(n, m, d)?, prediction))
}

/// One row per grid point: `trials` uniform samples at `m = ⌈μn/2⌉`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.mu_grid.len());
    for (point, &mu) in config.mu_grid.iter().enumerate() {
        let m = edges_for_mean(mu, config.n);
        let mut row = SweepRow {
            d: config.d,
            mu,
            n: config.n,
            m,
            trials: config.trials,
            predicted_theta: f64::NAN,
            mean_largest_frac: f64::NAN,
            std_largest_frac: f64::NAN,
            mean_second_frac: f64::NAN,
            max_degree_dev: f64::NAN,
            flags: Vec::new(),
            largest_fractions: Vec::new(),
            second_fractions: Vec::new(),
            degree_devs: Vec::new(),
            failed_trials: 0,
        };
        let (sampler, prediction) = match sampler_for(config.d, mu, config.n) {
            Ok(pair) => pair,
            Err(e) => {
                row.failed_trials = config.trials;
                row.flags.push(format!("setup_error={}", e.kind()));
                rows.push(row);
                continue;
            }
        };
        row.predicted_theta = prediction.giant_fraction();
        if prediction.near_critical {
            row.flags.push("near_critical".into());
        }

        let outcomes = run_trials(config.trials, point as u32, config.seed, |rng| {
            sampler.sample(rng).map(|g| report(&g))
        });
        let mut error_kind = None;
        for outcome in outcomes {
            match outcome {
                Ok(r) => {
                    row.largest_fractions.push(r.largest_fraction);
                    row.second_fractions.push(r.second_fraction);
                    row.degree_devs.push(r.degree_deviation(&prediction.probs));
                }
                Err(e) => {
                    row.failed_trials += 1;
                    error_kind.get_or_insert(e.kind());
                }
            }
        }
        if let Some(kind) = error_kind {
            row.flags.push(format!("failed_trials={}:{kind}", row.failed_trials));
        }
        (row.mean_largest_frac, row.std_largest_frac) = mean_std(&row.largest_fractions);
        row.mean_second_frac = mean_std(&row.second_fractions).0;
        row.max_degree_dev = mean_std(&row.degree_devs).0;
        rows.push(row);
    }
    Ok(rows)
}

/// Simplicity-restart cap for random `d`-regular graphs: 100 times the
/// expected number of pairings `exp((d²−1)/4)`, and never below 1000.
pub fn regular_retry_limits(n: usize, d: usize) -> RetryLimits {
    let expected = ((d * d) as f64 - 1.0) / 4.0;
    RetryLimits {
        simplicity: (100.0 * expected.exp()).ceil().max(1_000.0) as u64,
        ..RetryLimits::for_size(n)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DuelRow {
    pub d: usize,
    pub mu: f64,
    pub n: usize,
    pub m: usize,
    pub trials: u32,
    pub mu_star: f64,
    pub percolation_threshold: f64,
    pub predicted_theta: f64,
    pub bounded_mean_largest_frac: f64,
    pub bounded_std_largest_frac: f64,
    pub percolated_mean_largest_frac: f64,
    pub percolated_std_largest_frac: f64,
    pub flags: Vec<String>,
    pub bounded_largest: Vec<f64>,
    pub percolated_largest: Vec<f64>,
}

pub const DUEL_CSV_HEADER: &str = "d,mu,n,m,trials,mu_star,percolation_threshold,predicted_theta,\
bounded_mean_largest_frac,bounded_std_largest_frac,percolated_mean_largest_frac,percolated_std_largest_frac,flags";

impl DuelRow {
    pub fn csv_line(&self) -> String {
        let star = if self.mu_star.is_finite() { format!("{:.6}", self.mu_star) } else { "inf".into() };
        format!(
            "{},{:.6},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            self.d,
            self.mu,
            self.n,
            self.m,
            self.trials,
            star,
            self.percolation_threshold,
            self.predicted_theta,
            self.bounded_mean_largest_frac,
            self.bounded_std_largest_frac,
            self.percolated_mean_largest_frac,
            self.percolated_std_largest_frac,
            self.flags.join(";"),
        )
    }
}

pub fn write_duel_csv<W: Write>(rows: &[DuelRow], mut out: W) -> Result<()> {
    writeln!(out, "{DUEL_CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

/// Giant fractions of the bounded-degree model and of percolated random
/// `d`-regular graphs on a common mean-degree grid.
pub fn run_percolation_duel(config: &SweepConfig) -> Result<Vec<DuelRow>> {
    config.validate()?;
    let (d, n) = (config.d, config.n);
    if d < 3 {
        return Err(Error::Config(format!("percolation duel needs d >= 3, got {d}")));
    }
    if (d * n) % 2 == 1 {
        return Err(Error::Config(format!("no {d}-regular graph on {n} vertices (d*n is odd)")));
    }
    let regular = GraphSampler::new(n, d * n / 2, d)?.with_limits(regular_retry_limits(n, d));
    let mu_star = critical_mean_degree(d)?;

    let mut rows = Vec::with_capacity(config.mu_grid.len());
    for (point, &mu) in config.mu_grid.iter().enumerate() {
        let point = point as u32;
        let mut flags = Vec::new();
        let (bounded, prediction) = sampler_for(d, mu, n)?;
        if prediction.near_critical {
            flags.push("near_critical".to_string());
        }
        let keep = mu / d as f64;

        let collect = |outcomes: Vec<Result<ComponentReport>>, label: &str, flags: &mut Vec<String>| {
            let mut fractions = Vec::new();
            let mut failed = 0;
            for outcome in outcomes {
                match outcome {
                    Ok(r) => fractions.push(r.largest_fraction),
                    Err(_) => failed += 1,
                }
            }
            if failed > 0 {
                flags.push(format!("{label}_failed_trials={failed}"));
            }
            fractions
        };

        let bounded_largest = collect(
            run_trials(config.trials, 2 * point, config.seed, |rng| bounded.sample(rng).map(|g| report(&g))),
            "bounded",
            &mut flags,
        );
        let percolated_largest = collect(
            run_trials(config.trials, 2 * point + 1, config.seed, |rng| {
                let g = regular.sample(rng)?;
                Ok(report(&g.filter_edges(|_| rng.random_bool(keep))))
            }),
            "percolated",
            &mut flags,
        );

        let (bm, bs) = mean_std(&bounded_largest);
        let (pm, ps) = mean_std(&percolated_largest);
        rows.push(DuelRow {
            d,
            mu,
            n,
            m: bounded.m(),
            trials: config.trials,
            mu_star,
            percolation_threshold: percolation_threshold(d),
            predicted_theta: prediction.giant_fraction(),
            bounded_mean_largest_frac: bm,
            bounded_std_largest_frac: bs,
            percolated_mean_largest_frac: pm,
            percolated_std_largest_frac: ps,
            flags,
            bounded_largest,
            percolated_largest,
        });
    }
    Ok(rows)
}
