//! Exact uniform sampling from the graphs on `n` labelled vertices with `m`
//! edges and maximum degree at most `d`.
//!
//! One attempt draws a degree sequence `x` with `P(x) ∝ 1/∏ x_i!`, pairs its
//! half-edges uniformly at random, and keeps the result only if it is simple.
//! A simple graph with degree sequence `x` arises from exactly `∏ x_i!`
//! half-edge matchings, so every graph in the class has the same probability
//! per attempt. A rejection always restarts from a fresh degree sequence;
//! re-pairing a kept sequence would bias the output.
//!
//! The degree sequence is drawn as `n` i.i.d. truncated Poisson degrees
//! conditioned on their sum. Only the degree histogram decides the sum, so
//! each proposal draws the histogram as a multinomial (`d` binomial draws)
//! and, once the sum matches, scatters the degrees over the vertices with a
//! uniform shuffle.

use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::truncpoisson::{invert_truncated_mean, DegreeLaw};

/// Caps that turn hopeless parameterisations into errors instead of hangs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryLimits {
    /// Proposals per degree sequence before giving up on the conditioning.
    pub conditioning: u64,
    /// Full restarts before giving up on simplicity.
    pub simplicity: u64,
}

impl RetryLimits {
    pub fn for_size(n: usize) -> Self {
        RetryLimits {
            conditioning: (1e4 * (n as f64).sqrt()).ceil() as u64,
            simplicity: 1_000,
        }
    }
}

/// Degrees of vertices `0..n`, each at most `d`, summing to `2m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    m: usize,
    d: usize,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>, d: usize) -> Result<Self> {
        if let Some(bad) = degrees.iter().find(|&&x| x as usize > d) {
            return Err(Error::Domain(format!("degree {bad} exceeds the maximum {d}")));
        }
        let total: u64 = degrees.iter().map(|&x| u64::from(x)).sum();
        if total % 2 == 1 {
            return Err(Error::Domain(format!("degree sum {total} is odd")));
        }
        Ok(DegreeSequence { degrees, m: (total / 2) as usize, d })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_degree(&self) -> usize {
        self.d
    }

    /// Number of vertices of each degree `0..=d`.
    pub fn histogram(&self) -> Vec<usize> {
        let mut counts = vec![0; self.d + 1];
        for &x in &self.degrees {
            counts[x as usize] += 1;
        }
        counts
    }
}

/// `Σ x_i(x_i − 1) / 2m`, the parameter governing how likely a configuration
/// is to be simple.
pub fn alpha_diagnostic(x: &DegreeSequence) -> Result<f64> {
    if x.m == 0 {
        return Err(Error::Precondition("alpha is undefined for m = 0".into()));
    }
    let pairs: u64 = x
        .degrees
        .iter()
        .map(|&k| u64::from(k) * u64::from(k.saturating_sub(1)))
        .sum();
    Ok(pairs as f64 / (2 * x.m) as f64)
}

/// Limiting probability `exp(−α/2 − α²/4)` that a configuration with
/// parameter `α` has no loops and no parallel edges.
pub fn asymptotic_simple_probability(alpha: f64) -> f64 {
    (-alpha / 2.0 - alpha * alpha / 4.0).exp()
}

/// Configuration multigraph; loops and repeated pairs allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
}

/// True iff `g` has no loop and no repeated unordered pair.
pub fn is_simple(g: &Multigraph) -> bool {
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(g.edges.len());
    for &(u, v) in &g.edges {
        if u == v {
            return false;
        }
        pairs.push((u.min(v), u.max(v)));
    }
    pairs.sort_unstable();
    pairs.windows(2).all(|w| w[0] != w[1])
}

fn half_edge_tokens(degrees: &[u32], out: &mut Vec<u32>) {
    out.clear();
    for (v, &k) in degrees.iter().enumerate() {
        out.extend(std::iter::repeat_n(v as u32, k as usize));
    }
}

/// Uniform perfect matching of the half-edges of `x`: a forward
/// Fisher–Yates shuffle of the tokens, paired as consecutive entries.
pub fn pair_configuration<R: Rng + ?Sized>(x: &DegreeSequence, rng: &mut R) -> Multigraph {
    let mut tokens = Vec::with_capacity(2 * x.m);
    half_edge_tokens(&x.degrees, &mut tokens);
    let len = tokens.len() as u32;
    for i in 0..len {
        let j = rng.random_range(i..len);
        tokens.swap(i as usize, j as usize);
    }
    let edges = tokens.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Multigraph { n: x.n(), edges }
}

/// Working memory for [`try_simple_pairing`], reused across attempts.
struct PairingScratch {
    tokens: Vec<u32>,
    fill: Vec<u32>,
    slots: Vec<u32>,
    edges: Vec<(u32, u32)>,
    d: usize,
}

impl PairingScratch {
    fn new(n: usize, d: usize) -> Self {
        PairingScratch {
            tokens: Vec::new(),
            fill: vec![0; n],
            slots: vec![0; n * d],
            edges: Vec::new(),
            d,
        }
    }
}

/// Same shuffle and random stream as [`pair_configuration`], stopping at the
/// first loop or repeated pair. Returns the edges when the matching is simple.
fn try_simple_pairing<R: Rng + ?Sized>(
    degrees: &[u32],
    rng: &mut R,
    scratch: &mut PairingScratch,
) -> bool {
    let PairingScratch { tokens, fill, slots, edges, d } = scratch;
    let d = *d;
    half_edge_tokens(degrees, tokens);
    fill.iter_mut().for_each(|f| *f = 0);
    edges.clear();

    let len = tokens.len() as u32;
    let mut i = 0;
    while i < len {
        let j = rng.random_range(i..len);
        tokens.swap(i as usize, j as usize);
        let k = rng.random_range(i + 1..len);
        tokens.swap((i + 1) as usize, k as usize);

        let (u, v) = (tokens[i as usize], tokens[(i + 1) as usize]);
        if u == v {
            return false;
        }
        let (ui, vi) = (u as usize, v as usize);
        let u_nbrs = &slots[ui * d..ui * d + fill[ui] as usize];
        if u_nbrs.contains(&v) {
            return false;
        }
        slots[ui * d + fill[ui] as usize] = v;
        fill[ui] += 1;
        slots[vi * d + fill[vi] as usize] = u;
        fill[vi] += 1;
        edges.push((u.min(v), u.max(v)));
        i += 2;
    }
    true
}

/// Draws `n` i.i.d. truncated Poisson degrees conditioned on their sum.
#[derive(Debug, Clone)]
pub struct OccupancySampler {
    n: usize,
    d: usize,
    target: u64,
    proposal: Proposal,
}

#[derive(Debug, Clone)]
enum Proposal {
    /// Target 0 or `d·n`: exactly one sequence exists.
    Constant(u32),
    Law {
        law: DegreeLaw,
        /// `tails[i] = Σ_{j≥i} λ_j`.
        tails: Vec<f64>,
    },
}

impl OccupancySampler {
    /// `target` is the required sum of all `n` entries; each entry lies in
    /// `[0, d]`. The proposal rate matches the mean `target / n`.
    pub fn new(n: usize, d: usize, target: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one vertex".into()));
        }
        if d == 0 {
            return Err(Error::Domain("maximum degree must be at least 1".into()));
        }
        let capacity = (d as u64) * (n as u64);
        if target > capacity {
            return Err(Error::Infeasible { total_degree: target, capacity });
        }
        let proposal = if target == 0 {
            Proposal::Constant(0)
        } else if target == capacity {
            Proposal::Constant(d as u32)
        } else {
            let lambda = invert_truncated_mean(d, target as f64 / n as f64)?;
            let law = DegreeLaw::from_rate(d, lambda)?;
            let mut tails = vec![0.0; d + 1];
            let mut acc = 0.0;
            for i in (0..=d).rev() {
                acc += law.probs()[i];
                tails[i] = acc;
            }
            Proposal::Law { law, tails }
        };
        Ok(OccupancySampler { n, d, target, proposal })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    /// Proposal law, absent in the degenerate cases.
    pub fn law(&self) -> Option<&DegreeLaw> {
        match &self.proposal {
            Proposal::Constant(_) => None,
            Proposal::Law { law, .. } => Some(law),
        }
    }

    /// Degree histogram of `n` unconditioned i.i.d. draws from the proposal.
    pub fn sample_histogram<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let mut counts = vec![0u64; self.d + 1];
        match &self.proposal {
            Proposal::Constant(k) => counts[*k as usize] = self.n as u64,
            Proposal::Law { law, tails } => {
                let mut remaining = self.n as u64;
                for i in 0..self.d {
                    if remaining == 0 {
                        break;
                    }
                    let p = (law.probs()[i] / tails[i]).clamp(0.0, 1.0);
                    let c = Binomial::new(remaining, p)
                        .expect("probability clamped to [0, 1]")
                        .sample(rng);
                    counts[i] = c;
                    remaining -= c;
                }
                counts[self.d] += remaining;
            }
        }
        counts
    }

    /// Sum of `n` unconditioned i.i.d. proposal draws.
    pub fn draw_total<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        weighted_total(&self.sample_histogram(rng))
    }

    /// Conditioned draw. Also returns the number of proposals used.
    pub fn sample_counted<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_proposals: u64,
    ) -> Result<(Vec<u32>, u64)> {
        for proposals in 1..=max_proposals {
            let counts = self.sample_histogram(rng);
            if weighted_total(&counts) == self.target {
                let mut degrees = Vec::with_capacity(self.n);
                for (k, &c) in counts.iter().enumerate() {
                    degrees.extend(std::iter::repeat_n(k as u32, c as usize));
                }
                degrees.shuffle(rng);
                return Ok((degrees, proposals));
            }
        }
        Err(Error::RetryLimit {
            stage: "degree-sequence conditioning",
            attempts: max_proposals,
            n: self.n,
            m: (self.target / 2) as usize,
            d: self.d,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u32>> {
        let limit = RetryLimits::for_size(self.n).conditioning;
        self.sample_counted(rng, limit).map(|(x, _)| x)
    }
}

fn weighted_total(counts: &[u64]) -> u64 {
    counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum()
}

/// Occupancy vector of `target` balls in `n` boxes of capacity `d`.
pub fn sample_occupancy<R: Rng + ?Sized>(
    n: usize,
    target: u64,
    d: usize,
    rng: &mut R,
) -> Result<Vec<u32>> {
    OccupancySampler::new(n, d, target)?.sample(rng)
}

/// Degree sequence of `n` vertices with maximum degree `d` and `m` edges,
/// distributed with `P(x) ∝ 1/∏ x_i!`.
pub fn sample_degree_sequence<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    d: usize,
    rng: &mut R,
) -> Result<DegreeSequence> {
    GraphSampler::new(n, m, d)?.sample_degree_sequence(rng)
}

/// Counters from one call to [`GraphSampler::sample_with_stats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SampleStats {
    /// Unconditioned degree proposals drawn in total.
    pub proposals: u64,
    /// Degree sequences paired (one per simplicity attempt).
    pub pairings: u64,
}

/// Uniform sampler for graphs with `n` vertices, `m` edges and maximum
/// degree at most `d`. Construction does the root-finding once.
#[derive(Debug, Clone)]
pub struct GraphSampler {
    m: usize,
    d: usize,
    occupancy: OccupancySampler,
    limits: RetryLimits,
}

impl GraphSampler {
    pub fn new(n: usize, m: usize, d: usize) -> Result<Self> {
        let occupancy = OccupancySampler::new(n, d, 2 * m as u64)?;
        Ok(GraphSampler { m, d, occupancy, limits: RetryLimits::for_size(n) })
    }

    pub fn with_limits(mut self, limits: RetryLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> RetryLimits {
        self.limits
    }

    pub fn n(&self) -> usize {
        self.occupancy.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_degree(&self) -> usize {
        self.d
    }

    pub fn occupancy(&self) -> &OccupancySampler {
        &self.occupancy
    }

    pub fn sample_degree_sequence<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DegreeSequence> {
        let (degrees, _) = self.occupancy.sample_counted(rng, self.limits.conditioning)?;
        Ok(DegreeSequence { degrees, m: self.m, d: self.d })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SimpleGraph> {
        self.sample_with_stats(rng).map(|(g, _)| g)
    }

    pub fn sample_with_stats<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(SimpleGraph, SampleStats)> {
        let mut stats = SampleStats::default();
        let mut scratch = PairingScratch::new(self.n(), self.d);
        for _ in 0..self.limits.simplicity {
            let (degrees, proposals) =
                self.occupancy.sample_counted(rng, self.limits.conditioning)?;
            stats.proposals += proposals;
            stats.pairings += 1;
            if try_simple_pairing(&degrees, rng, &mut scratch) {
                let mut edges = std::mem::take(&mut scratch.edges);
                edges.sort_unstable();
                return Ok((SimpleGraph::from_canonical(self.n(), self.d, edges), stats));
            }
        }
        Err(Error::RetryLimit {
            stage: "simplicity",
            attempts: self.limits.simplicity,
            n: self.n(),
            m: self.m,
            d: self.d,
        })
    }
}

/// One uniform sample from the graphs with `n` vertices, `m` edges and
/// maximum degree at most `d`.
pub fn sample_graph<R: Rng + ?Sized>(n: usize, m: usize, d: usize, rng: &mut R) -> Result<SimpleGraph> {
    GraphSampler::new(n, m, d)?.sample(rng)
}

/// Labelled simple graph with vertices `0..n` and degrees at most `d`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically, which
/// makes the edge list a canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    d: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl SimpleGraph {
    /// Validates and normalises an arbitrary edge list.
    pub fn from_edges(n: usize, d: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut canonical = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Domain(format!("loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        if let Some(w) = canonical.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("repeated edge ({}, {})", w[0].0, w[0].1)));
        }
        let graph = Self::from_canonical(n, d, canonical);
        if let Some(v) = (0..n).find(|&v| graph.degree(v) > d) {
            return Err(Error::Domain(format!(
                "vertex {v} has degree {} above the maximum {d}",
                graph.degree(v)
            )));
        }
        Ok(graph)
    }

    fn from_canonical(n: usize, d: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; 2 * edges.len()];
        for &(u, v) in &edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        SimpleGraph { n, d, edges, offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Subgraph on the same vertices keeping the edges for which `keep` holds.
    pub fn filter_edges(&self, mut keep: impl FnMut(&(u32, u32)) -> bool) -> SimpleGraph {
        let edges = self.edges.iter().copied().filter(|e| keep(e)).collect();
        Self::from_canonical(self.n, self.d, edges)
    }

    /// Text form: a header line `n m d`, then one `u v` line per edge with
    /// `u < v`, in lexicographic order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.n, self.m(), self.d)?;
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Parses the format written by [`SimpleGraph::write_edge_list`].
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));

        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let header = parse_numbers(&header?, line_no, 3)?;
        let (n, m, d) = (header[0] as usize, header[1] as usize, header[2] as usize);

        let mut edges = Vec::with_capacity(m);
        for (line_no, line) in lines {
            let pair = parse_numbers(&line?, line_no, 2)?;
            let (u, v) = (pair[0], pair[1]);
            if u > u64::from(u32::MAX) || v > u64::from(u32::MAX) {
                return Err(Error::Parse { line: line_no, message: "vertex label too large".into() });
            }
            edges.push((u as u32, v as u32));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                message: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n, d, edges)
    }
}

fn parse_numbers(line: &str, line_no: usize, expected: usize) -> Result<Vec<u64>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected {expected} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<u64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("{f:?}: {e}"),
            })
        })
        .collect()
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}
