//! Dense qudit-level linear algebra for the two-prover protocol.
//!
//! States live directly in dimension `N` (Alice) and `N x N` (Alice and Bob
//! jointly) instead of being embedded in a qubit register. Joint amplitudes
//! are stored row-major with Alice's index selecting the row.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Vertex;

/// Tolerance used for every floating-point state check.
pub const TOLERANCE: f64 = 1e-9;

/// Largest dimension for which vertex words can address every basis state.
pub const MAX_PHASE_DIM: usize = 32;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

fn check_amplitudes(amps: &[Complex64]) -> Result<()> {
    if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("amplitudes must be finite".into()));
    }
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "state is not normalised: squared norm {norm}"
        )));
    }
    Ok(())
}

fn pairs(amps: &[Complex64]) -> Value {
    Value::Array(amps.iter().map(|z| json!([z.re, z.im])).collect())
}

/// `exp(2 pi i * power / n)`, with the exponent reduced modulo `n` first so
/// large products of indices do not lose precision.
pub fn root_of_unity(n: usize, power: i64) -> Complex64 {
    let n_i = n as i64;
    let reduced = power.rem_euclid(n_i);
    Complex64::from_polar(1.0, 2.0 * PI * reduced as f64 / n as f64)
}

/// Single-qudit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    amps: Vec<Complex64>,
}

impl QuditState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        check_amplitudes(&amps)?;
        Ok(QuditState { amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(QuditState { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Debug dump as an array of `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        pairs(&self.amps)
    }
}

/// Two-qudit pure state on `C^N (x) C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    dim: usize,
    amps: Vec<Complex64>,
}

impl JointState {
    /// Builds a joint state from row-major amplitudes (`dim * dim` entries).
    pub fn new(dim: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if amps.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes, got {}",
                dim * dim,
                amps.len()
            )));
        }
        check_amplitudes(&amps)?;
        Ok(JointState { dim, amps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Amplitude of `|alice> (x) |bob>`.
    pub fn amplitude(&self, alice: usize, bob: usize) -> Complex64 {
        self.amps[alice * self.dim + bob]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Debug dump as a row-major array of `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        pairs(&self.amps)
    }
}

/// Square complex matrix satisfying `U U^dagger = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Wraps row-major entries, rejecting anything that is not unitary at
    /// [`TOLERANCE`].
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = UnitaryMatrix { dim, entries };
        if m.unitarity_error() > TOLERANCE {
            return Err(Error::InvalidArgument("matrix is not unitary".into()));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(self.get(c, r).conj());
            }
        }
        UnitaryMatrix { dim: n, entries }
    }

    /// Raw matrix product `self * rhs`, not re-validated.
    pub fn product(&self, rhs: &UnitaryMatrix) -> Result<Vec<Complex64>> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.dim, rhs.dim
            )));
        }
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let lhs = self.get(r, k);
                for c in 0..n {
                    out[r * n + c] += lhs * rhs.get(k, c);
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise deviation of `U U^dagger` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(r, k) * self.get(c, k).conj();
                }
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((acc - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn apply(&self, state: &QuditState) -> Result<QuditState> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} vs state dimension {}",
                self.dim,
                state.dim()
            )));
        }
        let n = self.dim;
        let amps = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c) * state.amps[c]).sum())
            .collect();
        Ok(QuditState { amps })
    }
}

/// Fourier transform of order `n`: column `i` holds `omega^(i*j) / sqrt(n)`
/// in row `j`, conjugated when `inverse` is set.
pub fn qft_matrix(n: usize, inverse: bool) -> Result<UnitaryMatrix> {
    check_dim(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let sign = if inverse { -1 } else { 1 };
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let power = sign * ((i * j) % n) as i64;
            entries.push(root_of_unity(n, power) * scale);
        }
    }
    Ok(UnitaryMatrix { dim: n, entries })
}

/// Equal-weight superposition over all `n` basis states, with no relative phase.
pub fn uniform_superposition(n: usize) -> Result<QuditState> {
    check_dim(n)?;
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    Ok(QuditState { amps: vec![amp; n] })
}

/// Copies Alice's computational basis index into Bob's register:
/// `|i> (x) |0>  ->  |i> (x) |i>`.
pub fn correlate(alice: &QuditState) -> JointState {
    let n = alice.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * n];
    for (i, &a) in alice.amps.iter().enumerate() {
        amps[i * n + i] = a;
    }
    JointState { dim: n, amps }
}

fn check_word(v: Vertex, dim: usize) -> Result<()> {
    if dim > MAX_PHASE_DIM {
        return Err(Error::DimensionMismatch(format!(
            "vertex words address at most {MAX_PHASE_DIM} positions, state has {dim}"
        )));
    }
    if dim < MAX_PHASE_DIM && (v.word() as u64) >> dim != 0 {
        return Err(Error::DimensionMismatch(format!(
            "vertex {} has bits beyond dimension {dim}",
            v.word()
        )));
    }
    Ok(())
}

/// Alice flips the sign of row `i` when bit `i` of `a` is set; Bob does the
/// same for column `i` and `b`. Bit `i` is the coefficient of `2^i`.
pub fn apply_phases(state: &JointState, a: Vertex, b: Vertex) -> Result<JointState> {
    let n = state.dim;
    check_word(a, n)?;
    check_word(b, n)?;
    let mut amps = state.amps.clone();
    for i in 0..n {
        for j in 0..n {
            if a.bit(i) ^ b.bit(j) {
                amps[i * n + j] = -amps[i * n + j];
            }
        }
    }
    Ok(JointState { dim: n, amps })
}

/// Applies the forward transform to Alice's index and the inverse transform
/// to Bob's. Rows are transformed first.
pub fn apply_final_transforms(state: &JointState) -> Result<JointState> {
    let n = state.dim;
    let forward = qft_matrix(n, false)?;
    let inverse = qft_matrix(n, true)?;
    let zero = Complex64::new(0.0, 0.0);

    let mut rows = vec![zero; n * n];
    for ja in 0..n {
        for i in 0..n {
            let coeff = forward.get(ja, i);
            for col in 0..n {
                rows[ja * n + col] += coeff * state.amps[i * n + col];
            }
        }
    }

    let mut out = vec![zero; n * n];
    for ja in 0..n {
        for jb in 0..n {
            out[ja * n + jb] = (0..n)
                .map(|col| inverse.get(jb, col) * rows[ja * n + col])
                .sum();
        }
    }
    Ok(JointState { dim: n, amps: out })
}

/// Joint measurement statistics in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityGrid {
    dim: usize,
    probs: Vec<f64>,
}

impl ProbabilityGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Probability that Alice measures `alice` and Bob measures `bob`.
    pub fn get(&self, alice: usize, bob: usize) -> f64 {
        self.probs[alice * self.dim + bob]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Pr[c_A = c_B]`.
    pub fn diagonal_sum(&self) -> f64 {
        (0..self.dim).map(|j| self.get(j, j)).sum()
    }

    pub fn alice_marginal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|a| (0..self.dim).map(|b| self.get(a, b)).sum())
            .collect()
    }

    pub fn bob_marginal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|b| (0..self.dim).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

pub fn outcome_distribution(state: &JointState) -> ProbabilityGrid {
    ProbabilityGrid {
        dim: state.dim,
        probs: state.amps.iter().map(|z| z.norm_sqr()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn qft2_is_hadamard() {
        let q = qft_matrix(2, false).unwrap();
        let out = q.apply(&QuditState::basis(2, 0).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(out.amplitudes()[0], c(h, 0.0), 1e-15));
        assert!(close(out.amplitudes()[1], c(h, 0.0), 1e-15));
    }

    #[test]
    fn qft4_column_one() {
        let q = qft_matrix(4, false).unwrap();
        let out = q.apply(&QuditState::basis(4, 1).unwrap()).unwrap();
        let expected = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        for (got, want) in out.amplitudes().iter().zip(expected) {
            assert!(close(*got, want, 1e-15), "{got} vs {want}");
        }
    }

    #[test]
    fn qft3_times_inverse_is_identity() {
        let f = qft_matrix(3, false).unwrap();
        let g = qft_matrix(3, true).unwrap();
        let p = f.product(&g).unwrap();
        for r in 0..3 {
            for col in 0..3 {
                let want = if r == col { 1.0 } else { 0.0 };
                assert!(close(p[r * 3 + col], c(want, 0.0), 1e-12));
            }
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(qft_matrix(0, false), Err(Error::InvalidDimension(0)));
        assert_eq!(uniform_superposition(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn uniform_states() {
        assert_eq!(uniform_superposition(1).unwrap().amplitudes(), &[c(1.0, 0.0)]);
        let u4 = uniform_superposition(4).unwrap();
        assert!(u4.amplitudes().iter().all(|&z| z == c(0.5, 0.0)));
        let u12 = uniform_superposition(12).unwrap();
        let expected = 1.0 / 12f64.sqrt();
        assert!(u12.amplitudes().iter().all(|z| (z.re - expected).abs() < 1e-15 && z.im == 0.0));
        assert!((u12.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlate_copies_basis_index() {
        let j = correlate(&uniform_superposition(4).unwrap());
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { 0.5 } else { 0.0 };
                assert_eq!(j.amplitude(a, b), c(want, 0.0));
            }
        }
        let basis = correlate(&QuditState::basis(4, 2).unwrap());
        assert_eq!(basis.amplitude(2, 2), c(1.0, 0.0));
        assert!((basis.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((j.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phases_on_bell_like_state() {
        let psi = correlate(&uniform_superposition(4).unwrap());
        let out = apply_phases(&psi, Vertex::new(0b0000), Vertex::new(0b0011)).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| out.amplitude(i, i).re).collect();
        assert_eq!(diag, vec![-0.5, -0.5, 0.5, 0.5]);

        let same = apply_phases(&psi, Vertex::new(0b1010), Vertex::new(0b1010)).unwrap();
        assert_eq!(same, psi);

        let twice = apply_phases(&out, Vertex::new(0), Vertex::new(0b0011)).unwrap();
        assert_eq!(twice, psi);

        // "0011" written as a bit string with position 0 leftmost is the word 0b1100.
        let string_order = apply_phases(&psi, Vertex::new(0), Vertex::new(0b1100)).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| string_order.amplitude(i, i).re).collect();
        assert_eq!(diag, vec![0.5, 0.5, -0.5, -0.5]);
    }

    #[test]
    fn phases_reject_wide_words() {
        let psi = correlate(&uniform_superposition(4).unwrap());
        let err = apply_phases(&psi, Vertex::new(0b10000), Vertex::new(0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn final_transforms_on_equal_questions() {
        for n in [4usize, 12] {
            let psi = correlate(&uniform_superposition(n).unwrap());
            let out = apply_final_transforms(&psi).unwrap();
            for ja in 0..n {
                for jb in 0..n {
                    // Amplitude 1/sqrt(N) on the diagonal, so probability 1/N.
                    let want = if ja == jb { 1.0 / (n as f64).sqrt() } else { 0.0 };
                    assert!(close(out.amplitude(ja, jb), c(want, 0.0), 1e-12));
                }
            }
        }
    }

    #[test]
    fn distributions() {
        let basis = correlate(&QuditState::basis(4, 2).unwrap());
        let p = outcome_distribution(&basis);
        assert_eq!(p.get(2, 2), 1.0);
        assert_eq!(p.total(), 1.0);

        let psi = correlate(&uniform_superposition(4).unwrap());
        let p = outcome_distribution(&psi);
        for j in 0..4 {
            assert!((p.get(j, j) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn unnormalised_state_rejected() {
        assert!(QuditState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(QuditState::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(JointState::new(2, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn json_dump_is_row_major_pairs() {
        let basis = correlate(&QuditState::basis(2, 1).unwrap());
        assert_eq!(
            basis.to_json().to_string(),
            "[[0.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]]"
        );
    }
}
