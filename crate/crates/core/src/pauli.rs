//! Symplectic-representation Pauli algebra.
//!
//! An `n`-qubit Pauli is stored as two length-`n` bit vectors packed into
//! machine words: `x` bits and `z` bits.  Per qubit the letter is read off
//! the bit pair `(x, z)` as `(0,0) = I`, `(1,0) = X`, `(1,1) = Y`,
//! `(0,1) = Z`, with the phase convention `Y = iXZ`.  Phases are tracked
//! separately in [`PhasedPauli`] as a power of `i` modulo 4.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(Letter::I),
            'X' | 'x' => Ok(Letter::X),
            'Y' | 'y' => Ok(Letter::Y),
            'Z' | 'z' => Ok(Letter::Z),
            other => Err(Error::InvalidLetter(other)),
        }
    }

    /// Letter-level product ignoring phase: X*Y = Z etc.
    pub fn mul_letter(self, other: Letter) -> Letter {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        Letter::from_bits(x1 ^ x2, z1 ^ z2)
    }

    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Unsigned `n`-qubit Pauli in symplectic (x, z) bit form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString { n, x: vec![0; w], z: vec![0; w] }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Single non-identity letter embedded at `qubit` on `n` qubits.
    pub fn single(letter: Letter, qubit: usize, n: usize) -> Self {
        assert!(qubit < n, "qubit {qubit} out of range for n = {n}");
        let mut p = PauliString::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        assert!(qubit < self.n);
        let (w, b) = (qubit / 64, qubit % 64);
        Letter::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    pub fn set_letter(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.n);
        let (w, b) = (qubit / 64, qubit % 64);
        let (x, z) = letter.bits();
        self.x[w] = self.x[w] & !(1 << b) | (x as u64) << b;
        self.z[w] = self.z[w] & !(1 << b) | (z as u64) << b;
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).map(|q| self.letter(q))
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits on which the Pauli acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.letter(q) != Letter::I).collect()
    }

    /// Symplectic inner product `(a.x · b.z + a.z · b.x) mod 2`.
    ///
    /// Returns 0 iff the two Paulis commute.  Panics on length mismatch.
    pub fn sp_inner(&self, other: &PauliString) -> u8 {
        assert_eq!(self.n, other.n, "sp_inner: qubit count mismatch");
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]).count_ones() ^ (self.z[i] & other.x[i]).count_ones();
        }
        (acc & 1) as u8
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.sp_inner(other) == 0
    }

    /// Letter-wise product, discarding the phase.
    pub fn xor_mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "xor_mul: qubit count mismatch");
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        PauliString { n: self.n, x, z }
    }

    pub fn xor_in_place(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n, "xor_in_place: qubit count mismatch");
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Whether every non-identity letter of `self` matches `basis` at the
    /// same qubit; such Paulis are observable from `basis` measurements.
    pub fn is_subpattern_of(&self, basis: &PauliString) -> bool {
        assert_eq!(self.n, basis.n);
        (0..self.n).all(|q| {
            let l = self.letter(q);
            l == Letter::I || l == basis.letter(q)
        })
    }

    /// Restriction to the given qubits (in order) as a smaller Pauli.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let letters: Vec<Letter> = qubits.iter().map(|&q| self.letter(q)).collect();
        PauliString::from_letters(&letters)
    }

    /// Count of `Y` letters, i.e. the phase exponent of the canonical
    /// decomposition `⊗ letters = i^{x·z} X^x Z^z`.
    fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| (x & z).count_ones())
            .sum()
    }

    fn dot(a: &[u64], b: &[u64]) -> u32 {
        a.iter().zip(b).map(|(&x, &y)| (x & y).count_ones()).sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString(\"{self}\")")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parse a textual Pauli like `"XIZ"`; leftmost letter is qubit 0.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyPauli);
        }
        let letters: Vec<Letter> = s.chars().map(Letter::from_char).collect::<Result<_>>()?;
        Ok(PauliString::from_letters(&letters))
    }
}

impl Ord for PauliString {
    /// Lexicographic order on the letter sequence with `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.letters().cmp(other.letters()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Pauli with an explicit `i^phase_exp` prefactor.
///
/// Hermitian Paulis have `phase_exp ∈ {0, 2}` (sign ±1).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhasedPauli {
    pub pauli: PauliString,
    pub phase_exp: u8,
}

impl PhasedPauli {
    pub fn new(pauli: PauliString, phase_exp: u8) -> Self {
        PhasedPauli { pauli, phase_exp: phase_exp & 3 }
    }

    pub fn identity(n: usize) -> Self {
        PhasedPauli::new(PauliString::identity(n), 0)
    }

    pub fn plus(pauli: PauliString) -> Self {
        PhasedPauli::new(pauli, 0)
    }

    pub fn n(&self) -> usize {
        self.pauli.n()
    }

    /// Sign for Hermitian phases; `None` when the phase is ±i.
    pub fn sign(&self) -> Option<i8> {
        match self.phase_exp {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase_exp % 2 == 0
    }

    pub fn negated(&self) -> Self {
        PhasedPauli::new(self.pauli.clone(), self.phase_exp + 2)
    }

    pub fn adjoint(&self) -> Self {
        PhasedPauli::new(self.pauli.clone(), (4 - self.phase_exp) & 3)
    }

    /// Group product with exact `i`-power bookkeeping.
    ///
    /// With each operand written as `i^pe · ⊗letters` and the canonical
    /// per-letter phase `Y = iXZ`, the product phase is
    /// `pe1 + pe2 + y(a) + y(b) + 2·|a.z ∧ b.x| − y(ab)  (mod 4)`.
    pub fn mul(&self, other: &PhasedPauli) -> PhasedPauli {
        assert_eq!(self.n(), other.n(), "mul: qubit count mismatch");
        let a = &self.pauli;
        let b = &other.pauli;
        let out = a.xor_mul(b);
        let cross = PauliString::dot(&a.z, &b.x);
        let phase = self.phase_exp as u32
            + other.phase_exp as u32
            + a.y_count()
            + b.y_count()
            + 2 * cross
            + 4
            - (out.y_count() & 3);
        PhasedPauli::new(out, (phase & 3) as u8)
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase_exp {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{}{}", prefix, self.pauli)
    }
}

impl fmt::Debug for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhasedPauli(\"{self}\")")
    }
}

/// All `4^|support| − 1` non-identity Paulis acting trivially off `support`.
///
/// Output is sorted by the crate's letter-lexicographic order.
pub fn enumerate_nonidentity(support: &[usize], n: usize) -> Result<Vec<PauliString>> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut qubits: Vec<usize> = support.to_vec();
    qubits.sort_unstable();
    qubits.dedup();
    for &q in &qubits {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
    }
    let m = qubits.len();
    assert!(m <= 16, "support too large to enumerate ({m} qubits)");
    let mut out = Vec::with_capacity(4usize.pow(m as u32) - 1);
    for code in 1..4usize.pow(m as u32) {
        let mut p = PauliString::identity(n);
        let mut c = code;
        for &q in qubits.iter().rev() {
            let l = match c & 3 {
                0 => Letter::I,
                1 => Letter::X,
                2 => Letter::Y,
                _ => Letter::Z,
            };
            p.set_letter(q, l);
            c >>= 2;
        }
        out.push(p);
    }
    out.sort();
    Ok(out)
}

/// All `4^n` Paulis on `n` qubits (identity included), in index order.
///
/// The index encoding is `Σ_q 4^q · code(letter_q)` with
/// `I=0, X=1, Y=2, Z=3`; see [`pauli_index`].
pub fn enumerate_all(n: usize) -> Vec<PauliString> {
    assert!(n <= 10, "enumerate_all limited to small n");
    (0..4usize.pow(n as u32)).map(|i| pauli_from_index(i, n)).collect()
}

pub fn pauli_index(p: &PauliString) -> usize {
    let mut idx = 0usize;
    for q in (0..p.n()).rev() {
        let code = match p.letter(q) {
            Letter::I => 0,
            Letter::X => 1,
            Letter::Y => 2,
            Letter::Z => 3,
        };
        idx = idx * 4 + code;
    }
    idx
}

pub fn pauli_from_index(mut idx: usize, n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        let l = match idx & 3 {
            0 => Letter::I,
            1 => Letter::X,
            2 => Letter::Y,
            _ => Letter::Z,
        };
        p.set_letter(q, l);
        idx >>= 2;
    }
    p
}
