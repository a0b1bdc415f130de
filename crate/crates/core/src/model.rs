//! Sparse Pauli-Lindblad noise models.
//!
//! A model is a set of distinct non-identity Pauli terms `K` with
//! nonnegative rates `λ_k`.  The channel factorizes into simple Pauli
//! channels `w_k ρ + (1 − w_k) P_k ρ P_k` with `w_k = (1 + e^{−2λ_k})/2`,
//! and its Pauli fidelities are `f_b = exp(−2 Σ_k λ_k ⟨b,k⟩_sp)`.  A dense
//! brute-force channel representation is provided for small qubit counts as
//! a test oracle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::CliffordTableau;
use crate::error::{Error, Result};
use crate::pauli::{enumerate_all, enumerate_nonidentity, pauli_index, PauliString};

/// Support-set description of an ℓ-local model: the terms are all
/// non-identity Paulis on each listed support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub supports: Vec<Vec<usize>>,
}

impl ModelSpec {
    pub fn new(n: usize, supports: Vec<Vec<usize>>) -> Result<Self> {
        let spec = ModelSpec { n, supports };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.supports {
            if s.is_empty() {
                return Err(Error::EmptySupport);
            }
            for &q in s {
                if q >= self.n {
                    return Err(Error::IndexOutOfRange { index: q, n: self.n });
                }
            }
        }
        Ok(())
    }

    /// Maximum support size ℓ.
    pub fn locality(&self) -> usize {
        self.supports.iter().map(|s| {
            let mut d = s.clone();
            d.sort_unstable();
            d.dedup();
            d.len()
        }).max().unwrap_or(0)
    }

    /// Two-local line model: supports `{q}` for each qubit and `{q, q+1}`
    /// for each neighboring pair.
    pub fn line(n: usize) -> Self {
        let mut supports: Vec<Vec<usize>> = (0..n).map(|q| vec![q]).collect();
        supports.extend((0..n.saturating_sub(1)).map(|q| vec![q, q + 1]));
        ModelSpec { n, supports }
    }

    /// Like [`ModelSpec::line`] but with an extra wrap-around pair.
    pub fn ring(n: usize) -> Self {
        let mut spec = ModelSpec::line(n);
        if n > 2 {
            spec.supports.push(vec![n - 1, 0]);
        }
        spec
    }
}

/// Deduplicated union of all non-identity Paulis on each support set,
/// sorted by (support, letters) for reproducible ordering.
pub fn generate_terms(spec: &ModelSpec) -> Result<Vec<PauliString>> {
    spec.validate()?;
    let mut terms: Vec<PauliString> = Vec::new();
    for s in &spec.supports {
        terms.extend(enumerate_nonidentity(s, spec.n)?);
    }
    terms.sort_by(|a, b| a.support().cmp(&b.support()).then_with(|| a.cmp(b)));
    terms.dedup();
    Ok(terms)
}

/// Sparse Pauli-Lindblad model: terms `K` and rates `λ ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "ModelJson")]
pub struct NoiseModel {
    n: usize,
    terms: Vec<PauliString>,
    lambda: Vec<f64>,
    /// Per-term `2^64 · (1 − w_k)` thresholds for fast Bernoulli sampling.
    #[serde(skip)]
    flip_thresholds: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    n: usize,
    terms: Vec<PauliString>,
    lambda: Vec<f64>,
}

impl From<NoiseModel> for ModelJson {
    fn from(m: NoiseModel) -> Self {
        ModelJson { n: m.n, terms: m.terms, lambda: m.lambda }
    }
}

impl TryFrom<ModelJson> for NoiseModel {
    type Error = Error;

    fn try_from(j: ModelJson) -> Result<Self> {
        NoiseModel::new(j.n, j.terms, j.lambda)
    }
}

impl<'de> Deserialize<'de> for NoiseModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ModelJson::deserialize(d)?;
        NoiseModel::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl NoiseModel {
    pub fn new(n: usize, terms: Vec<PauliString>, lambda: Vec<f64>) -> Result<Self> {
        if terms.len() != lambda.len() {
            return Err(Error::LengthMismatch(terms.len(), lambda.len()));
        }
        for t in &terms {
            if t.n() != n {
                return Err(Error::LengthMismatch(t.n(), n));
            }
            if t.is_identity() {
                return Err(Error::InvalidConfig("identity term in noise model".into()));
            }
        }
        let mut seen = terms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != terms.len() {
            return Err(Error::InvalidConfig("duplicate terms in noise model".into()));
        }
        for &l in &lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidConfig(format!("invalid rate {l}")));
            }
        }
        let flip_thresholds = lambda
            .iter()
            .map(|&l| {
                let p_flip = (1.0 - (-2.0 * l).exp()) / 2.0; // 1 − w_k
                (p_flip * 2f64.powi(64)).min(u64::MAX as f64) as u64
            })
            .collect();
        Ok(NoiseModel { n, terms, lambda, flip_thresholds })
    }

    /// Model over the terms of `spec` with the given rates.
    pub fn from_spec(spec: &ModelSpec, lambda: Vec<f64>) -> Result<Self> {
        NoiseModel::new(spec.n, generate_terms(spec)?, lambda)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `w_k = (1 + e^{−2λ_k})/2`, the identity weight of factor `k`.
    pub fn w(&self, k: usize) -> f64 {
        (1.0 + (-2.0 * self.lambda[k]).exp()) / 2.0
    }

    /// Pauli fidelity `f_b = exp(−2 Σ_k λ_k ⟨b,k⟩_sp)`.
    pub fn fidelity(&self, b: &PauliString) -> f64 {
        let exponent: f64 = self
            .terms
            .iter()
            .zip(&self.lambda)
            .filter(|(t, _)| b.sp_inner(t) == 1)
            .map(|(_, &l)| l)
            .sum();
        (-2.0 * exponent).exp()
    }

    /// Draw one Pauli error: the product over terms of `P_k` with
    /// probability `1 − w_k` each.
    pub fn sample_error<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        let mut e = PauliString::identity(self.n);
        for (t, &thr) in self.terms.iter().zip(&self.flip_thresholds) {
            if rng.gen::<u64>() < thr {
                e.xor_in_place(t);
            }
        }
        e
    }

    /// Dense brute-force channel (test oracle), `n ≤ 6`.
    pub fn to_dense(&self) -> Result<DensePauliChannel> {
        if self.n > DENSE_MAX_QUBITS {
            return Err(Error::TooManyQubits { n: self.n, max: DENSE_MAX_QUBITS });
        }
        let fidelities = enumerate_all(self.n).iter().map(|b| self.fidelity(b)).collect();
        Ok(DensePauliChannel::from_fidelities(self.n, fidelities))
    }

    /// Concatenation of two models acting on the same register; fidelities
    /// multiply pointwise.
    pub fn concat(&self, other: &NoiseModel) -> Result<NoiseModel> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        let mut terms = self.terms.clone();
        let mut lambda = self.lambda.clone();
        for (t, &l) in other.terms.iter().zip(&other.lambda) {
            if let Some(i) = terms.iter().position(|u| u == t) {
                lambda[i] += l;
            } else {
                terms.push(t.clone());
                lambda.push(l);
            }
        }
        NoiseModel::new(self.n, terms, lambda)
    }
}

pub const DENSE_MAX_QUBITS: usize = 6;

/// Fully enumerated Pauli channel on `n ≤ 6` qubits.
///
/// Stores both the `4^n` Pauli fidelities and the error probabilities `α`;
/// the two are related by the symplectic Walsh-Hadamard transform
/// `f_b = Σ_i α_i (−1)^{⟨b,i⟩_sp}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePauliChannel {
    n: usize,
    fidelities: Vec<f64>,
    alpha: Vec<f64>,
}

impl DensePauliChannel {
    pub fn from_fidelities(n: usize, fidelities: Vec<f64>) -> Self {
        assert!(n <= DENSE_MAX_QUBITS);
        assert_eq!(fidelities.len(), 1 << (2 * n));
        let alpha = sp_walsh(n, &fidelities)
            .into_iter()
            .map(|v| v / (1 << (2 * n)) as f64)
            .collect();
        DensePauliChannel { n, fidelities, alpha }
    }

    pub fn from_alpha(n: usize, alpha: Vec<f64>) -> Self {
        assert!(n <= DENSE_MAX_QUBITS);
        assert_eq!(alpha.len(), 1 << (2 * n));
        let fidelities = sp_walsh(n, &alpha);
        DensePauliChannel { n, fidelities, alpha }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fidelities(&self) -> &[f64] {
        &self.fidelities
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn fidelity(&self, b: &PauliString) -> f64 {
        self.fidelities[pauli_index(b)]
    }

    /// Channel conjugated by a Clifford, `Λ' = O Λ(O†·O) O†`: fidelity of
    /// `b` becomes the fidelity of `O† b O`.
    pub fn conjugated_by(&self, op: &CliffordTableau) -> DensePauliChannel {
        assert_eq!(self.n, op.n());
        let inv = op.inverse();
        let fidelities = enumerate_all(self.n)
            .iter()
            .map(|b| self.fidelities[pauli_index(&inv.conjugate_unsigned(b))])
            .collect();
        DensePauliChannel::from_fidelities(self.n, fidelities)
    }

    /// Composition of two Pauli channels: fidelities multiply.
    pub fn compose(&self, other: &DensePauliChannel) -> DensePauliChannel {
        assert_eq!(self.n, other.n);
        let fidelities = self
            .fidelities
            .iter()
            .zip(&other.fidelities)
            .map(|(a, b)| a * b)
            .collect();
        DensePauliChannel::from_fidelities(self.n, fidelities)
    }

    /// Check `α ≥ 0`, `Σα = 1`, `f_I = 1` within `tol`.
    pub fn is_valid_channel(&self, tol: f64) -> bool {
        self.alpha.iter().all(|&a| a >= -tol)
            && (self.alpha.iter().sum::<f64>() - 1.0).abs() <= tol
            && (self.fidelities[0] - 1.0).abs() <= tol
    }
}

/// Symplectic Walsh-Hadamard transform: `out_b = Σ_i in_i (−1)^{⟨b,i⟩_sp}`.
///
/// In the index encoding (qubit 0 least significant, I=0,X=1,Y=2,Z=3) the
/// form is diagonal per qubit, so the transform factorizes into 4×4 blocks.
fn sp_walsh(n: usize, input: &[f64]) -> Vec<f64> {
    let mut data = input.to_vec();
    // per-qubit kernel H[b][i] = (−1)^{sp(b,i)} over single-qubit codes
    const H: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    for q in 0..n {
        let stride = 1usize << (2 * q);
        let mut out = vec![0.0; data.len()];
        for (idx, val) in data.iter().enumerate() {
            let i = (idx >> (2 * q)) & 3;
            let base = idx - i * stride;
            for (b, row) in H.iter().enumerate() {
                out[base + b * stride] += row[i] * val;
            }
        }
        data = out;
    }
    data
}
