//! The four-step entangled strategy: share `sum_i |i>|i>`, apply question
//! dependent signs, Fourier transform (inverse on Bob's side), measure.
//!
//! Two evaluation paths exist. [`run_protocol`] pushes amplitudes through the
//! dense simulator; [`collision_probability_exact`] uses the closed form
//! `Pr[c_A = c_B] = (N - 2 d_H)^2 / N^2` in integer arithmetic.

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Vertex, MAX_BITS};
use crate::quantum::{
    apply_final_transforms, apply_phases, correlate, outcome_distribution, root_of_unity,
    uniform_superposition, ProbabilityGrid,
};

/// Generator behind every seeded draw. Recorded in report metadata.
pub const PRNG_ALGORITHM: &str = "ChaCha8Rng/seed_from_u64 (rand_chacha 0.3)";

/// Grid cells below this are rounding residue of exact zeros and are never
/// sampled.
const SAMPLING_FLOOR: f64 = 1e-15;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A pair of questions, one per prover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Question {
    pub a: Vertex,
    pub b: Vertex,
    pub n_bits: u32,
}

impl Question {
    /// A question satisfying the referee's promise: `a == b` or the two are at
    /// distance `N/2`.
    pub fn new(a: Vertex, b: Vertex, n_bits: u32) -> Result<Self> {
        let q = Self::unchecked(a, b, n_bits)?;
        if !q.is_promise() {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}) violates the promise: distance {} is neither 0 nor {}",
                q.distance(),
                n_bits / 2
            )));
        }
        Ok(q)
    }

    /// Any pair of `n_bits`-wide words, promise or not.
    pub fn unchecked(a: Vertex, b: Vertex, n_bits: u32) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_BITS {
            return Err(Error::InvalidDimension(n_bits as usize));
        }
        let limit = 1u64 << n_bits;
        for v in [a, b] {
            if v.word() as u64 >= limit {
                return Err(Error::DimensionMismatch(format!(
                    "vertex {v} does not fit in {n_bits} bits"
                )));
            }
        }
        Ok(Question { a, b, n_bits })
    }

    pub fn distance(&self) -> u32 {
        self.a.distance(self.b)
    }

    pub fn is_promise(&self) -> bool {
        let d = self.distance();
        self.n_bits % 2 == 0 && (d == 0 || 2 * d == self.n_bits)
    }

    pub fn dim(&self) -> usize {
        self.n_bits as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundResult {
    pub c_a: usize,
    pub c_b: usize,
    pub win: bool,
}

/// Referee's rule: equal questions need equal colours, distinct questions
/// need distinct colours.
pub fn wins(q: &Question, c_a: usize, c_b: usize) -> bool {
    (q.a == q.b) == (c_a == c_b)
}

/// Full simulation of one round up to the measurement statistics.
pub fn run_protocol(q: &Question) -> Result<ProbabilityGrid> {
    let alice = uniform_superposition(q.dim())?;
    let shared = correlate(&alice);
    let signed = apply_phases(&shared, q.a, q.b)?;
    let transformed = apply_final_transforms(&signed)?;
    Ok(outcome_distribution(&transformed))
}

/// `N^(-3/2) * sum_i omega^(i (j_a - j_b)) (-1)^(a_i xor b_i)`.
pub fn closed_form_amplitude(q: &Question, j_a: usize, j_b: usize) -> Result<Complex64> {
    let n = q.dim();
    if j_a >= n || j_b >= n {
        return Err(Error::InvalidArgument(format!(
            "outcome ({j_a}, {j_b}) out of range for N = {n}"
        )));
    }
    let delta = j_a as i64 - j_b as i64;
    let sum: Complex64 = (0..n)
        .map(|i| {
            let sign = if q.a.bit(i) ^ q.b.bit(i) { -1.0 } else { 1.0 };
            root_of_unity(n, i as i64 * delta) * sign
        })
        .sum();
    Ok(sum / (n as f64).powf(1.5))
}

/// Exact `Pr[c_A = c_B] = S^2 / N^2` with `S = N - 2 d_H(a, b)`.
pub fn collision_probability_exact(a: Vertex, b: Vertex, n_bits: u32) -> Ratio<u64> {
    let s = n_bits as i64 - 2 * a.distance(b) as i64;
    let n = n_bits as u64;
    Ratio::new((s * s) as u64, n * n)
}

/// Ratio to `f64`, for comparison against simulated probabilities.
pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Draws one joint measurement outcome with a seeded generator and scores it.
pub fn sample_round(q: &Question, seed: u64) -> Result<RoundResult> {
    let grid = run_protocol(q)?;
    let mut rng = seeded_rng(seed);
    let (c_a, c_b) = sample_outcome(&grid, &mut rng);
    Ok(RoundResult {
        c_a,
        c_b,
        win: wins(q, c_a, c_b),
    })
}

/// Inverse-CDF draw over the grid in row-major order.
pub fn sample_outcome<R: Rng>(grid: &ProbabilityGrid, rng: &mut R) -> (usize, usize) {
    let n = grid.dim();
    let weights: Vec<f64> = grid
        .as_slice()
        .iter()
        .map(|&p| if p < SAMPLING_FLOOR { 0.0 } else { p })
        .collect();
    let total: f64 = weights.iter().sum();
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (idx, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        last = idx;
        acc += w;
        if target < acc {
            return (idx / n, idx % n);
        }
    }
    (last / n, last % n)
}
