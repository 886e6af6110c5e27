//! Random generation.
//!
//! * [`SamplerState`] draws degree sequences exactly from the law
//!   `P(d_1..d_n) ∝ prod 1/d_i!` (recursive method), pairs half-edges
//!   uniformly, and optionally rejects until the result is simple.
//! * [`BoltzmannSampler`] draws i.i.d. degrees with `P(d) ∝ x^d/d!`.
//!
//! The recursive method needs, at each step, the categorical law
//! `P(d | i, j) = C(j, d) T[i-1][j-d] / T[i][j]`. The same ratios are
//! available in floating point as `pi_d S'[i-1][j-d] / S'[i][j]`, where
//! `S'[i][j]` is the probability that `i` Boltzmann degrees sum to `j`.
//! A draw compares the leading 64 bits of a uniform real against the
//! floating prefix sums; when they are too close to call under a rigorous
//! error margin, it falls back to big-integer prefix sums and reads more
//! random bits until the comparison is decided. Either way the outcome is
//! the one the exact integer comparison would give.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analytic::{acceptance_probability, feasibility, solve_phi, AnalyticError};
use crate::degree_set::{DegreeSet, Extent};
use crate::graph::Multigraph;
use crate::numeric::{big_rational, binomial_row, ln_factorial};
use crate::series_dp::power_row;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("instance is infeasible: {0}")]
    Infeasible(String),
    #[error("no simple graph after {} attempts", .0.rejections)]
    AttemptsExhausted(SampleReport),
    #[error("degree sum {0} is odd")]
    OddDegreeSum(usize),
    #[error("max_attempts must be at least 1")]
    ZeroAttempts,
    #[error("Boltzmann parameter must be positive and finite, got {0}")]
    BadParameter(f64),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// Counters for one or more sampling runs. Reports merge by summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SampleReport {
    pub samples_requested: u64,
    pub samples_produced: u64,
    /// Non-simple multigraphs discarded.
    pub rejections: u64,
    /// Boltzmann sequences redrawn because their sum was odd.
    pub odd_sum_retries: u64,
}

impl SampleReport {
    /// Pairing attempts: `produced + rejections`.
    pub fn attempts(&self) -> u64 {
        self.samples_produced + self.rejections
    }

    /// `produced / attempts`, zero before any attempt.
    pub fn empirical_acceptance(&self) -> f64 {
        match self.attempts() {
            0 => 0.0,
            a => self.samples_produced as f64 / a as f64,
        }
    }

    pub fn merge(&mut self, other: &SampleReport) {
        self.samples_requested += other.samples_requested;
        self.samples_produced += other.samples_produced;
        self.rejections += other.rejections;
        self.odd_sum_retries += other.odd_sum_retries;
    }
}

/// Generator for sample number `index` under `seed`: ChaCha8 keyed by the
/// seed, on stream `index`. Workers handling different indices never share
/// a stream, so results do not depend on how samples are scheduled.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `10 * ceil(1 / acceptance)` when the estimate exists, else `10^6`.
pub fn default_max_attempts(d: &DegreeSet, n: usize, m: usize) -> u64 {
    match acceptance_probability(d, n, m) {
        Ok(p) if p > 0.0 && p.is_finite() => {
            let inv = (1.0 / p).ceil();
            if inv < 1e17 {
                10 * inv as u64
            } else {
                u64::MAX
            }
        }
        _ => 1_000_000,
    }
}

const TWO_POW_M64: f64 = 1.0 / 18_446_744_073_709_551_616.0;
/// Below this the floating table is not trusted.
const FLOAT_FLOOR: f64 = 1e-250;

/// Precomputed tables for exact sampling on `MG^(D)_{n,m}`. Immutable apart
/// from an internal cache of exact rows, so it can be shared between threads.
#[derive(Debug)]
pub struct SamplerState {
    degree_set: DegreeSet,
    n: usize,
    m: usize,
    /// Members of `D` up to `2m`, ascending.
    members: Vec<usize>,
    /// `pi[d] = x^d / (d! Set_D(x))`, zero outside `D`.
    pi: Vec<f64>,
    /// `S'[i][j]` flattened with stride `2m + 1`.
    float_table: Vec<f64>,
    margin: f64,
    force_exact: bool,
    exact_rows: RwLock<HashMap<usize, Arc<Vec<BigUint>>>>,
}

impl SamplerState {
    pub fn new(degree_set: &DegreeSet, n: usize, m: usize) -> Result<Self, SamplerError> {
        let feas = feasibility(degree_set, n, m);
        if !feas.is_feasible() {
            return Err(SamplerError::Infeasible(feas.to_string()));
        }
        let j_max = 2 * m;
        let members = degree_set.members_up_to(j_max);
        let x = tilt(degree_set, n, m);
        let ln_x = x.ln();
        let ln_set = degree_set.egf_log_eval(x);
        let u = f64::EPSILON;

        let mut pi = vec![0.0; j_max + 1];
        let mut eps_pi = 0.0f64;
        for &d in &members {
            let fact = ln_factorial(d);
            pi[d] = (d as f64 * ln_x - fact - ln_set).exp();
            // relative error of exp(a - b - c) is about (|a| + |b| + |c|) u
            eps_pi = eps_pi.max(4.0 * u * ((d as f64 * ln_x).abs() + fact + ln_set.abs()) + 4.0 * u);
        }

        let stride = j_max + 1;
        let mut float_table = vec![0.0; (n + 1) * stride];
        float_table[0] = 1.0;
        for i in 1..=n {
            let (prev, cur) = float_table[(i - 1) * stride..(i + 1) * stride].split_at_mut(stride);
            for j in 0..=j_max {
                let mut acc = 0.0;
                for &d in members.iter().take_while(|&&d| d <= j) {
                    acc += pi[d] * prev[j - d];
                }
                cur[j] = acc;
            }
        }
        let k = members.len() as f64;
        let margin = 4.0 * n as f64 * (eps_pi + (k + 2.0) * u) + 2f64.powi(-50);

        let state = SamplerState {
            degree_set: degree_set.clone(),
            n,
            m,
            members,
            pi,
            float_table,
            margin,
            force_exact: false,
            exact_rows: RwLock::new(HashMap::new()),
        };
        if n > 0 && state.s(n, j_max) <= 0.0 && state.exact_row(n)[j_max].is_zero() {
            return Err(SamplerError::Infeasible(format!(
                "no degree sequence over {} sums to {}",
                degree_set, j_max
            )));
        }
        Ok(state)
    }

    /// Disables the floating shortcut. Output is identical for identical
    /// random streams; only speed differs.
    pub fn with_exact_arithmetic(mut self) -> Self {
        self.force_exact = true;
        self
    }

    pub fn degree_set(&self) -> &DegreeSet {
        &self.degree_set
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    fn s(&self, i: usize, j: usize) -> f64 {
        self.float_table[i * (2 * self.m + 1) + j]
    }

    /// `T[i][0..=2m]`, computed on first use.
    fn exact_row(&self, i: usize) -> Arc<Vec<BigUint>> {
        if let Some(row) = self.exact_rows.read().expect("row cache poisoned").get(&i) {
            return Arc::clone(row);
        }
        let row = Arc::new(power_row(&self.degree_set, i, 2 * self.m));
        self.exact_rows
            .write()
            .expect("row cache poisoned")
            .entry(i)
            .or_insert(row)
            .clone()
    }

    /// Exact weights `C(j, d) T[i-1][j-d]` of the nonzero candidates.
    fn exact_weights(&self, i: usize, j: usize) -> Vec<(usize, BigUint)> {
        let row = self.exact_row(i - 1);
        let binom = binomial_row(j);
        self.members
            .iter()
            .take_while(|&&d| d <= j)
            .filter(|&&d| !row[j - d].is_zero())
            .map(|&d| (d, &binom[d] * &row[j - d]))
            .collect()
    }

    /// Exact law of the degree of vertex `i` given that vertices `1..=i`
    /// carry `j` half-edges in total.
    pub fn transition_probabilities(&self, i: usize, j: usize) -> Vec<(usize, BigRational)> {
        let weights = self.exact_weights(i, j);
        let total: BigUint = weights.iter().map(|(_, w)| w).sum();
        weights
            .into_iter()
            .map(|(d, w)| (d, big_rational(w, total.clone())))
            .collect()
    }

    /// Probability that [`SamplerState::sample_degree_sequence`] returns `degrees`.
    pub fn sequence_probability(&self, degrees: &[usize]) -> BigRational {
        if degrees.len() != self.n || degrees.iter().sum::<usize>() != 2 * self.m {
            return BigRational::zero();
        }
        let mut j = 2 * self.m;
        let mut prob = BigRational::one();
        for i in (1..=self.n).rev() {
            let d = degrees[i - 1];
            match self.transition_probabilities(i, j).into_iter().find(|(c, _)| *c == d) {
                Some((_, p)) => prob *= p,
                None => return BigRational::zero(),
            }
            j -= d;
        }
        prob
    }

    fn float_choice(&self, i: usize, j: usize, bits: u64) -> Option<usize> {
        let denom = self.s(i, j);
        if denom < FLOAT_FLOOR {
            return None;
        }
        let lower = bits as f64 * TWO_POW_M64;
        let upper = (bits as f64 + 1.0) * TWO_POW_M64;
        let mut cum = 0.0;
        for &d in self.members.iter().take_while(|&&d| d <= j) {
            cum += self.pi[d] * self.s(i - 1, j - d) / denom;
            if cum - self.margin >= upper {
                return Some(d);
            }
            if cum + self.margin > lower {
                return None;
            }
        }
        None
    }

    /// Smallest candidate whose prefix sum exceeds `V * total`, where `V`
    /// is the uniform real whose binary expansion starts with `bits`.
    fn exact_choice<R: Rng + ?Sized>(&self, i: usize, j: usize, bits: u64, rng: &mut R) -> usize {
        let weights = self.exact_weights(i, j);
        let total: BigUint = weights.iter().map(|(_, w)| w).sum();
        let mut v = BigUint::from(bits);
        let mut len = 64usize;
        let mut prefix = BigUint::zero();
        let last = weights.len() - 1;
        for (idx, (d, w)) in weights.iter().enumerate() {
            if idx == last {
                return *d;
            }
            prefix += w;
            loop {
                let scaled = &prefix << len;
                if (&v + 1u32) * &total <= scaled {
                    return *d;
                }
                if &v * &total >= scaled {
                    break;
                }
                v = (v << 64) | BigUint::from(rng.next_u64());
                len += 64;
            }
        }
        unreachable!("feasible state has a candidate")
    }

    fn choose_degree<R: Rng + ?Sized>(&self, i: usize, j: usize, rng: &mut R) -> usize {
        if i == 1 {
            return j;
        }
        let bits = rng.next_u64();
        if !self.force_exact {
            if let Some(d) = self.float_choice(i, j, bits) {
                return d;
            }
        }
        self.exact_choice(i, j, bits, rng)
    }

    /// `(d_1, ..., d_n)` with probability proportional to `prod 1/d_i!`.
    pub fn sample_degree_sequence<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut degrees = vec![0; self.n];
        let mut j = 2 * self.m;
        for i in (1..=self.n).rev() {
            let d = self.choose_degree(i, j, rng);
            degrees[i - 1] = d;
            j -= d;
        }
        debug_assert_eq!(j, 0);
        degrees
    }

    /// Multigraph with `P(G) ∝ kappa(G)` on `MG^(D)_{n,m}`.
    pub fn sample_multigraph<R: Rng + ?Sized>(&self, rng: &mut R) -> Multigraph {
        let degrees = self.sample_degree_sequence(rng);
        let g = pair_half_edges(&degrees, rng).expect("sequence sums to 2m");
        if cfg!(debug_assertions) {
            debug_assert_eq!(g.edge_count(), self.m);
            debug_assert!(g.degrees().iter().all(|&d| self.degree_set.contains(d)));
        }
        g
    }

    /// First simple multigraph within `max_attempts` pairings; uniform on
    /// `SG^(D)_{n,m}`.
    pub fn sample_simple_graph<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_attempts: u64,
    ) -> Result<(Multigraph, SampleReport), SamplerError> {
        if max_attempts == 0 {
            return Err(SamplerError::ZeroAttempts);
        }
        let mut report = SampleReport { samples_requested: 1, ..SampleReport::default() };
        for _ in 0..max_attempts {
            let g = self.sample_multigraph(rng);
            if g.is_simple() {
                report.samples_produced = 1;
                return Ok((g, report));
            }
            report.rejections += 1;
        }
        Err(SamplerError::AttemptsExhausted(report))
    }
}

/// Boltzmann parameter used for the floating table: the saddle point when
/// `2m/n` is strictly inside `]min D, max D[`, nudged inwards on the
/// boundary, and 1 for a single-degree set.
fn tilt(d: &DegreeSet, n: usize, m: usize) -> f64 {
    if d.is_singleton() || n == 0 {
        return 1.0;
    }
    let r = d.valuation() as f64;
    let top = match d.max_degree() {
        Extent::Finite(mx) => mx as f64,
        Extent::Infinite => f64::INFINITY,
    };
    let target = (2 * m) as f64 / n as f64;
    let inner = target.clamp(r + 0.05 * (top - r).min(1.0), top - 0.05 * (top - r).min(1.0));
    solve_phi(d, inner).unwrap_or(1.0)
}

/// Uniform perfect matching of the half-edges: vertex `v` (1-based) gets
/// `degrees[v-1]` slots, the slots are shuffled, consecutive slots paired.
pub fn pair_half_edges<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<Multigraph, SamplerError> {
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(SamplerError::OddDegreeSum(total));
    }
    let mut slots: Vec<usize> = Vec::with_capacity(total);
    for (v, &d) in degrees.iter().enumerate() {
        slots.extend(std::iter::repeat_n(v + 1, d));
    }
    slots.shuffle(rng);
    let edges = slots.chunks_exact(2).map(|p| (p[0], p[1]));
    Ok(Multigraph::from_edges(degrees.len(), edges).expect("slots name valid vertices"))
}

/// Sampler for i.i.d. degrees with `P(d) = x^d / (d! Set_D(x))`.
#[derive(Debug, Clone)]
pub struct BoltzmannSampler {
    degree_set: DegreeSet,
    x: f64,
    support: Vec<usize>,
    cumulative: Vec<f64>,
}

impl BoltzmannSampler {
    pub fn new(degree_set: &DegreeSet, x: f64) -> Result<Self, SamplerError> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(SamplerError::BadParameter(x));
        }
        let bound = match degree_set.max_degree() {
            Extent::Finite(mx) => mx,
            // Poisson-type tail beyond this is far below 1e-16
            Extent::Infinite => degree_set.valuation() + (x + 20.0 * x.sqrt() + 60.0).ceil() as usize,
        };
        let support = degree_set.members_up_to(bound);
        let ln_x = x.ln();
        let ln_set = degree_set.egf_log_eval(x);
        let mut acc = 0.0;
        let cumulative = support
            .iter()
            .map(|&d| {
                acc += (d as f64 * ln_x - ln_factorial(d) - ln_set).exp();
                acc
            })
            .collect();
        Ok(BoltzmannSampler { degree_set: degree_set.clone(), x, support, cumulative })
    }

    pub fn parameter(&self) -> f64 {
        self.x
    }

    pub fn draw_degree<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let last = *self.cumulative.last().expect("nonempty support");
        loop {
            let u: f64 = rng.random();
            if u < last {
                let idx = self.cumulative.partition_point(|&c| c <= u);
                return self.support[idx];
            }
        }
    }

    /// `n` degrees, redrawing the whole sequence while the sum is odd.
    pub fn sample_degrees<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
        report: &mut SampleReport,
    ) -> Result<Vec<usize>, SamplerError> {
        let all_odd = self.degree_set.valuation() % 2 == 1
            && self.degree_set.periodicity().finite().is_none_or(|p| p % 2 == 0);
        if all_odd && n % 2 == 1 {
            return Err(SamplerError::OddDegreeSum(n * self.degree_set.valuation()));
        }
        loop {
            let degrees: Vec<usize> = (0..n).map(|_| self.draw_degree(rng)).collect();
            if degrees.iter().sum::<usize>() % 2 == 0 {
                return Ok(degrees);
            }
            report.odd_sum_retries += 1;
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<(Multigraph, SampleReport), SamplerError> {
        let mut report = SampleReport { samples_requested: 1, ..SampleReport::default() };
        let degrees = self.sample_degrees(n, rng, &mut report)?;
        let g = pair_half_edges(&degrees, rng)?;
        report.samples_produced = 1;
        Ok((g, report))
    }
}

pub fn boltzmann_sample<R: Rng + ?Sized>(
    d: &DegreeSet,
    n: usize,
    x: f64,
    rng: &mut R,
) -> Result<(Multigraph, SampleReport), SamplerError> {
    BoltzmannSampler::new(d, x)?.sample(n, rng)
}

/// Parameter whose Boltzmann mean degree `phi(x)` equals `target`.
pub fn boltzmann_tune(d: &DegreeSet, target: f64) -> Result<f64, SamplerError> {
    Ok(solve_phi(d, target)?)
}
