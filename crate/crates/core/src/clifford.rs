//! Clifford operators as signed symplectic tableaus.
//!
//! A tableau stores, for each generator `X_q` and `Z_q`, its conjugation
//! image as a [`PhasedPauli`] with sign-only phase.  Conjugation of an
//! arbitrary Pauli composes generator images with phase accumulation, so no
//! `2^n`-sized object is ever built.  The module also provides the standard
//! Hermitian/Clifford gate library and the four-class characterization of
//! two-qubit Hermitian Cliffords by Pauli support transitions.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{pauli_from_index, pauli_index, Letter, PauliString, PhasedPauli};

/// Signed symplectic tableau for an `n`-qubit Clifford operator.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<PhasedPauli>,
    z_images: Vec<PhasedPauli>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let x_images = (0..n)
            .map(|q| PhasedPauli::plus(PauliString::single(Letter::X, q, n)))
            .collect();
        let z_images = (0..n)
            .map(|q| PhasedPauli::plus(PauliString::single(Letter::Z, q, n)))
            .collect();
        CliffordTableau { n, x_images, z_images }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, q: usize) -> &PhasedPauli {
        &self.x_images[q]
    }

    pub fn z_image(&self, q: usize) -> &PhasedPauli {
        &self.z_images[q]
    }

    pub(crate) fn from_images(
        n: usize,
        x_images: Vec<PhasedPauli>,
        z_images: Vec<PhasedPauli>,
    ) -> Self {
        debug_assert!(x_images.iter().chain(&z_images).all(|p| p.phase_exp % 2 == 0));
        CliffordTableau { n, x_images, z_images }
    }

    /// Conjugation `O P O†` with exact sign tracking.
    ///
    /// Panics on qubit count mismatch.
    pub fn conjugate(&self, p: &PhasedPauli) -> PhasedPauli {
        assert_eq!(self.n, p.n(), "conjugate: qubit count mismatch");
        // P = i^{pe} ⊗letters = i^{pe + y(P)} X^x Z^z; conjugate the bare
        // X^x Z^z factor by multiplying generator images (interleaving per
        // qubit is safe: images of commuting generators commute exactly).
        let mut acc = PhasedPauli::identity(self.n);
        for q in 0..self.n {
            let (x, z) = p.pauli.letter(q).bits();
            if x {
                acc = acc.mul(&self.x_images[q]);
            }
            if z {
                acc = acc.mul(&self.z_images[q]);
            }
        }
        let y_in = p.pauli.letters().filter(|&l| l == Letter::Y).count() as u8;
        PhasedPauli::new(acc.pauli, acc.phase_exp + p.phase_exp + (y_in & 3))
    }

    /// Letter-level conjugation image, discarding the sign.
    pub fn conjugate_unsigned(&self, p: &PauliString) -> PauliString {
        assert_eq!(self.n, p.n(), "conjugate_unsigned: qubit count mismatch");
        let mut acc = PauliString::identity(self.n);
        for q in 0..self.n {
            let (x, z) = p.letter(q).bits();
            if x {
                acc.xor_in_place(&self.x_images[q].pauli);
            }
            if z {
                acc.xor_in_place(&self.z_images[q].pauli);
            }
        }
        acc
    }

    /// Composition: `conjugate(a.compose(b), p) = conjugate(a, conjugate(b, p))`.
    pub fn compose(&self, other: &CliffordTableau) -> CliffordTableau {
        assert_eq!(self.n, other.n, "compose: qubit count mismatch");
        let x_images = other.x_images.iter().map(|p| self.conjugate(p)).collect();
        let z_images = other.z_images.iter().map(|p| self.conjugate(p)).collect();
        CliffordTableau::from_images(self.n, x_images, z_images)
    }

    pub fn is_identity(&self) -> bool {
        self == &CliffordTableau::identity(self.n)
    }

    /// True iff `O² = I` at the level of the signed conjugation action.
    pub fn is_hermitian(&self) -> bool {
        self.compose(self).is_identity()
    }

    /// Inverse tableau, via the symplectic matrix inverse plus sign repair.
    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        // generator order matches the bit layout: row 2q = X_q, row 2q+1 = Z_q
        let rows: Vec<Vec<bool>> = (0..2 * n)
            .map(|i| {
                let img = if i % 2 == 0 { &self.x_images[i / 2] } else { &self.z_images[i / 2] };
                (0..n)
                    .flat_map(|q| {
                        let (x, z) = img.pauli.letter(q).bits();
                        [x, z]
                    })
                    .collect()
            })
            .collect();
        let inv = invert_f2(&rows);
        let mut x_images = Vec::with_capacity(n);
        let mut z_images = Vec::with_capacity(n);
        for i in 0..2 * n {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set_letter(q, Letter::from_bits(inv[i][2 * q], inv[i][2 * q + 1]));
            }
            // fix the sign so that conjugating the image recovers +generator
            let forward = self.conjugate(&PhasedPauli::plus(p.clone()));
            let sign = forward.phase_exp; // 0 or 2
            let img = PhasedPauli::new(p, sign);
            if i % 2 == 0 {
                x_images.push(img);
            } else {
                z_images.push(img);
            }
        }
        let out = CliffordTableau::from_images(n, x_images, z_images);
        debug_assert!(self.compose(&out).is_identity());
        out
    }

    /// Check that generator images preserve commutation relations.
    pub fn is_symplectic(&self) -> bool {
        let gen = |i: usize| -> &PhasedPauli {
            if i < self.n {
                &self.x_images[i]
            } else {
                &self.z_images[i - self.n]
            }
        };
        for i in 0..2 * self.n {
            for j in i..2 * self.n {
                // X_i and Z_i anticommute; all other generator pairs commute
                let expected = u8::from(j == i + self.n);
                if gen(i).pauli.sp_inner(&gen(j).pauli) != expected {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CliffordTableau(n={}", self.n)?;
        for q in 0..self.n {
            write!(f, ", X{}→{}, Z{}→{}", q, self.x_images[q], q, self.z_images[q])?;
        }
        write!(f, ")")
    }
}

fn invert_f2(rows: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let m = rows.len();
    let mut a: Vec<Vec<bool>> = rows.to_vec();
    let mut inv: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| i == j).collect()).collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| a[r][col]).expect("singular symplectic matrix");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..m {
            if r != col && a[r][col] {
                for j in 0..m {
                    a[r][j] ^= a[col][j];
                    inv[r][j] ^= inv[col][j];
                }
            }
        }
    }
    inv
}

/// Names of the standard gate library, as used in layer JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateName {
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Sx,
    Sxdg,
    Cz,
    Cx,
    Swap,
}

impl GateName {
    pub fn arity(self) -> usize {
        match self {
            GateName::Cz | GateName::Cx | GateName::Swap => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::Id => "id",
            GateName::X => "x",
            GateName::Y => "y",
            GateName::Z => "z",
            GateName::H => "h",
            GateName::S => "s",
            GateName::Sdg => "sdg",
            GateName::Sx => "sx",
            GateName::Sxdg => "sxdg",
            GateName::Cz => "cz",
            GateName::Cx => "cx",
            GateName::Swap => "swap",
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "id" | "i" => Ok(GateName::Id),
            "x" => Ok(GateName::X),
            "y" => Ok(GateName::Y),
            "z" => Ok(GateName::Z),
            "h" => Ok(GateName::H),
            "s" => Ok(GateName::S),
            "sdg" => Ok(GateName::Sdg),
            "sx" => Ok(GateName::Sx),
            "sxdg" => Ok(GateName::Sxdg),
            "cz" => Ok(GateName::Cz),
            "cx" | "cnot" => Ok(GateName::Cx),
            "swap" => Ok(GateName::Swap),
            other => Err(Error::UnknownGate(other.to_string())),
        }
    }
}

fn set_single_qubit_images(
    t: &mut CliffordTableau,
    q: usize,
    x_to: (Letter, u8),
    z_to: (Letter, u8),
) {
    t.x_images[q] = PhasedPauli::new(PauliString::single(x_to.0, q, t.n), x_to.1);
    t.z_images[q] = PhasedPauli::new(PauliString::single(z_to.0, q, t.n), z_to.1);
}

fn two_qubit_image(letters: [(usize, Letter); 2], n: usize, sign: u8) -> PhasedPauli {
    let mut p = PauliString::identity(n);
    for (q, l) in letters {
        p.set_letter(q, l);
    }
    PhasedPauli::new(p, sign)
}

/// Tableau for a named gate embedded on the given qubits of an `n`-qubit
/// register.
pub fn standard_gate(name: GateName, qubits: &[usize], n: usize) -> Result<CliffordTableau> {
    if qubits.len() != name.arity() {
        return Err(Error::BadGateArity {
            gate: name.to_string(),
            expected: name.arity(),
            got: qubits.len(),
        });
    }
    for &q in qubits {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
    }
    if qubits.len() == 2 && qubits[0] == qubits[1] {
        return Err(Error::DuplicateQubit);
    }
    let mut t = CliffordTableau::identity(n);
    use Letter::*;
    match name {
        GateName::Id => {}
        GateName::X => set_single_qubit_images(&mut t, qubits[0], (X, 0), (Z, 2)),
        GateName::Y => set_single_qubit_images(&mut t, qubits[0], (X, 2), (Z, 2)),
        GateName::Z => set_single_qubit_images(&mut t, qubits[0], (X, 2), (Z, 0)),
        GateName::H => set_single_qubit_images(&mut t, qubits[0], (Z, 0), (X, 0)),
        GateName::S => set_single_qubit_images(&mut t, qubits[0], (Y, 0), (Z, 0)),
        GateName::Sdg => set_single_qubit_images(&mut t, qubits[0], (Y, 2), (Z, 0)),
        GateName::Sx => set_single_qubit_images(&mut t, qubits[0], (X, 0), (Y, 2)),
        GateName::Sxdg => set_single_qubit_images(&mut t, qubits[0], (X, 0), (Y, 0)),
        GateName::Cz => {
            let (a, b) = (qubits[0], qubits[1]);
            t.x_images[a] = two_qubit_image([(a, X), (b, Z)], n, 0);
            t.x_images[b] = two_qubit_image([(a, Z), (b, X)], n, 0);
        }
        GateName::Cx => {
            let (c, tq) = (qubits[0], qubits[1]);
            t.x_images[c] = two_qubit_image([(c, X), (tq, X)], n, 0);
            t.z_images[tq] = two_qubit_image([(c, Z), (tq, Z)], n, 0);
        }
        GateName::Swap => {
            let (a, b) = (qubits[0], qubits[1]);
            t.x_images[a] = PhasedPauli::plus(PauliString::single(X, b, n));
            t.x_images[b] = PhasedPauli::plus(PauliString::single(X, a, n));
            t.z_images[a] = PhasedPauli::plus(PauliString::single(Z, b, n));
            t.z_images[b] = PhasedPauli::plus(PauliString::single(Z, a, n));
        }
    }
    Ok(t)
}

/// Tableau of the Pauli rotation `R_P(±π/2)` about a single-qubit axis.
///
/// Conjugation acts as `Q ↦ Q` when `[P, Q] = 0` and `Q ↦ ∓i·P·Q`
/// otherwise (minus for `+π/2`).
pub fn rotation_half_pi_tableau(
    axis: Letter,
    positive: bool,
    qubit: usize,
    n: usize,
) -> CliffordTableau {
    assert_ne!(axis, Letter::I, "rotation axis must be non-identity");
    assert!(qubit < n);
    let p = PhasedPauli::plus(PauliString::single(axis, qubit, n));
    let mut t = CliffordTableau::identity(n);
    let extra = if positive { 3 } else { 1 }; // -i or +i
    for gen_letter in [Letter::X, Letter::Z] {
        let g = PhasedPauli::plus(PauliString::single(gen_letter, qubit, n));
        if g.pauli.sp_inner(&p.pauli) == 1 {
            let img = p.mul(&g);
            let img = PhasedPauli::new(img.pauli, img.phase_exp + extra);
            debug_assert!(img.phase_exp % 2 == 0);
            if gen_letter == Letter::X {
                t.x_images[qubit] = img;
            } else {
                t.z_images[qubit] = img;
            }
        }
    }
    t
}

/// Class label plus letter-role assignment for a two-qubit Hermitian
/// Clifford, following the support-transition patterns of the four classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateClassification {
    /// Class 1–4.
    pub class_id: u8,
    /// `[A, B, C]`: permutation of `{X, Y, Z}` for the first qubit.
    pub roles_q1: [Letter; 3],
    /// `[D, E, F]`: permutation of `{X, Y, Z}` for the second qubit.
    pub roles_q2: [Letter; 3],
    /// Letter-level conjugation image for each of the 15 non-identity
    /// two-qubit Paulis, in Pauli index order.
    pub support_map: Vec<(PauliString, PauliString)>,
    /// The classified operator itself, kept for sign-exact conjugation.
    pub tableau: CliffordTableau,
}

impl GateClassification {
    /// Role letters `A, B, C` (first qubit) and `D, E, F` (second qubit).
    pub fn a(&self) -> Letter {
        self.roles_q1[0]
    }
    pub fn b(&self) -> Letter {
        self.roles_q1[1]
    }
    pub fn c(&self) -> Letter {
        self.roles_q1[2]
    }
    pub fn d(&self) -> Letter {
        self.roles_q2[0]
    }
    pub fn e(&self) -> Letter {
        self.roles_q2[1]
    }
    pub fn f(&self) -> Letter {
        self.roles_q2[2]
    }

    /// Letter-level image of a two-qubit Pauli under the classified gate.
    pub fn image_of(&self, p: &PauliString) -> PauliString {
        assert_eq!(p.n(), 2);
        if p.is_identity() {
            return p.clone();
        }
        self.support_map[pauli_index(p) - 1].1.clone()
    }

    /// Weight-one Paulis on the given side (0 or 1) whose image is also
    /// weight one; these are the feasible π/2 rotation-twirl axes.
    pub fn weight_preserving_axes(&self, side: usize) -> Vec<Letter> {
        Letter::NON_IDENTITY
            .into_iter()
            .filter(|&l| {
                let mut p = PauliString::identity(2);
                p.set_letter(side, l);
                self.image_of(&p).weight() == 1
            })
            .collect()
    }
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

const XYZ: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

/// Product of two role indexes (0 = I, 1 = A/D, 2 = B/E, 3 = C/F),
/// ignoring phases: distinct non-identity roles multiply to the third.
fn role_mul(a: usize, b: usize) -> usize {
    if a == 0 {
        b
    } else if b == 0 {
        a
    } else if a == b {
        0
    } else {
        6 - a - b
    }
}

/// Role-space image of the six weight-one Paulis for each class template.
///
/// `opts` selects the residual degrees of freedom that role relabeling
/// cannot absorb: for class 1 the per-side A↔B transposition, for class 3
/// the order in which {A, B} pair with {AD, BD} and {E, F} with {CE, CF}.
fn wone_image(class: u8, opts: (bool, bool), i: usize, j: usize) -> (usize, usize) {
    let cross = |flag: bool, s: usize| -> usize {
        match (flag, s) {
            (true, 1) => 2,
            (true, 2) => 1,
            _ => s,
        }
    };
    match class {
        1 => (cross(opts.0, i), cross(opts.1, j)),
        // weight-one terms swap sides with the A↔F, B↔E, C↔D pairing
        2 => match (i, j) {
            (s, 0) => (0, 4 - s),
            (0, s) => (4 - s, 0),
            _ => unreachable!(),
        },
        // CI and ID fixed; {AI, BI} ↔ {AD, BD} and {IE, IF} ↔ {CE, CF},
        // each pairing in either order
        3 => match (i, j) {
            (3, 0) => (3, 0),
            (s @ (1 | 2), 0) => (cross(opts.0, s), 1),
            (0, 1) => (0, 1),
            (0, t @ (2 | 3)) => (3, cross(opts.1, t - 1) + 1),
            _ => unreachable!(),
        },
        4 => match (i, j) {
            (3, 0) => (0, 1),
            (1, 0) => (3, 2),
            (2, 0) => (3, 3),
            (0, 1) => (3, 0),
            (0, 2) => (1, 1),
            (0, 3) => (2, 1),
            _ => unreachable!(),
        },
        _ => unreachable!(),
    }
}

/// Full role-space image: weight-two cells follow from the weight-one
/// images by multiplicativity of Clifford conjugation.
fn template_image(class: u8, opts: (bool, bool), i: usize, j: usize) -> (usize, usize) {
    let left = if i > 0 {
        wone_image(class, opts, i, 0)
    } else {
        (0, 0)
    };
    let right = if j > 0 {
        wone_image(class, opts, 0, j)
    } else {
        (0, 0)
    };
    (role_mul(left.0, right.0), role_mul(left.1, right.1))
}

fn role_pauli(roles_q1: &[Letter; 3], roles_q2: &[Letter; 3], i: usize, j: usize) -> PauliString {
    let mut p = PauliString::identity(2);
    if i > 0 {
        p.set_letter(0, roles_q1[i - 1]);
    }
    if j > 0 {
        p.set_letter(1, roles_q2[j - 1]);
    }
    p
}

/// Classify a two-qubit Hermitian Clifford into one of the four support
/// transition classes, returning the lexicographically smallest valid
/// letter-role assignment.
pub fn classify_two_qubit(op: &CliffordTableau) -> Result<GateClassification> {
    if op.n() != 2 {
        return Err(Error::NotTwoQubit(op.n()));
    }
    if !op.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let support_map: Vec<(PauliString, PauliString)> = (1..16)
        .map(|idx| {
            let p = pauli_from_index(idx, 2);
            let img = op.conjugate_unsigned(&p);
            (p, img)
        })
        .collect();
    let image = |p: &PauliString| -> PauliString { support_map[pauli_index(p) - 1].1.clone() };

    let mut found: Option<GateClassification> = None;
    for class in 1u8..=4 {
        let swap_options: &[(bool, bool)] = if class == 1 || class == 3 {
            &[(false, false), (false, true), (true, false), (true, true)]
        } else {
            &[(false, false)]
        };
        'perm: for p1 in PERMS {
            let roles_q1 = [XYZ[p1[0]], XYZ[p1[1]], XYZ[p1[2]]];
            for p2 in PERMS {
                let roles_q2 = [XYZ[p2[0]], XYZ[p2[1]], XYZ[p2[2]]];
                for &swaps in swap_options {
                    let ok = (0..4).all(|i| {
                        (0..4).all(|j| {
                            if i == 0 && j == 0 {
                                return true;
                            }
                            let src = role_pauli(&roles_q1, &roles_q2, i, j);
                            let (ti, tj) = template_image(class, swaps, i, j);
                            image(&src) == role_pauli(&roles_q1, &roles_q2, ti, tj)
                        })
                    });
                    if ok {
                        match &found {
                            Some(prev) if prev.class_id != class => {
                                return Err(Error::Unclassifiable)
                            }
                            Some(_) => {}
                            None => {
                                found = Some(GateClassification {
                                    class_id: class,
                                    roles_q1,
                                    roles_q2,
                                    support_map: support_map.clone(),
                                    tableau: op.clone(),
                                });
                            }
                        }
                        continue 'perm;
                    }
                }
            }
        }
    }
    found.ok_or(Error::Unclassifiable)
}

/// Enumerate all signed two-qubit Clifford tableaus (11520 of them) by
/// closure over the generators `{H₀, H₁, S₀, S₁, CZ}`.
pub fn all_two_qubit_cliffords() -> Vec<CliffordTableau> {
    let gens: Vec<CliffordTableau> = vec![
        standard_gate(GateName::H, &[0], 2).unwrap(),
        standard_gate(GateName::H, &[1], 2).unwrap(),
        standard_gate(GateName::S, &[0], 2).unwrap(),
        standard_gate(GateName::S, &[1], 2).unwrap(),
        standard_gate(GateName::Cz, &[0, 1], 2).unwrap(),
    ];
    let key = |t: &CliffordTableau| -> Vec<u8> {
        let mut k = Vec::with_capacity(12);
        for img in t.x_images.iter().chain(&t.z_images) {
            k.push(pauli_index(&img.pauli) as u8);
            k.push(img.phase_exp);
        }
        k
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    let id = CliffordTableau::identity(2);
    seen.insert(key(&id));
    queue.push_back(id.clone());
    out.push(id);
    while let Some(t) = queue.pop_front() {
        for g in &gens {
            let next = g.compose(&t);
            if seen.insert(key(&next)) {
                queue.push_back(next.clone());
                out.push(next);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(name: GateName) -> CliffordTableau {
        let qubits: &[usize] = if name.arity() == 2 { &[0, 1] } else { &[0] };
        standard_gate(name, qubits, 2).unwrap()
    }

    fn pp(s: &str) -> PhasedPauli {
        PhasedPauli::plus(s.parse().unwrap())
    }

    #[test]
    fn cz_conjugation_examples() {
        let cz = gate(GateName::Cz);
        assert_eq!(cz.conjugate(&pp("XI")), pp("XZ"));
        assert_eq!(cz.conjugate(&pp("XX")), pp("YY"));
        assert_eq!(cz.conjugate(&pp("II")), pp("II"));
        assert_eq!(cz.conjugate(&pp("ZI")), pp("ZI"));
    }

    #[test]
    fn cx_conjugation_rules() {
        let cx = gate(GateName::Cx);
        assert_eq!(cx.conjugate(&pp("XI")), pp("XX"));
        assert_eq!(cx.conjugate(&pp("IZ")), pp("ZZ"));
        assert_eq!(cx.conjugate(&pp("ZI")), pp("ZI"));
        assert_eq!(cx.conjugate(&pp("IX")), pp("IX"));
    }

    #[test]
    fn compose_examples() {
        let h = standard_gate(GateName::H, &[0], 1).unwrap();
        assert!(h.compose(&h).is_identity());
        let s = standard_gate(GateName::S, &[0], 1).unwrap();
        let z = standard_gate(GateName::Z, &[0], 1).unwrap();
        assert_eq!(s.compose(&s), z);
        let cz = gate(GateName::Cz);
        assert!(cz.compose(&cz).is_identity());
    }

    #[test]
    fn compose_matches_nested_conjugation() {
        let a = gate(GateName::Cx);
        let b = gate(GateName::Cz).compose(&standard_gate(GateName::S, &[0], 2).unwrap());
        let ab = a.compose(&b);
        for idx in 0..16 {
            let p = PhasedPauli::plus(pauli_from_index(idx, 2));
            assert_eq!(ab.conjugate(&p), a.conjugate(&b.conjugate(&p)));
        }
    }

    #[test]
    fn hermiticity_examples() {
        assert!(gate(GateName::Cz).is_hermitian());
        assert!(gate(GateName::Swap).is_hermitian());
        assert!(gate(GateName::Cx).is_hermitian());
        assert!(!standard_gate(GateName::S, &[0], 1).unwrap().is_hermitian());
        assert!(!rotation_half_pi_tableau(Letter::X, true, 0, 1).is_hermitian());
    }

    #[test]
    fn s_gate_action() {
        let s = standard_gate(GateName::S, &[0], 1).unwrap();
        assert_eq!(s.conjugate(&pp("X")), pp("Y"));
        assert_eq!(s.conjugate(&pp("Z")), pp("Z"));
        assert_eq!(s.conjugate(&pp("Y")), pp("X").negated());
    }

    #[test]
    fn rotation_tableaus_match_gates() {
        let n = 1;
        let s = standard_gate(GateName::S, &[0], n).unwrap();
        assert_eq!(rotation_half_pi_tableau(Letter::Z, true, 0, n), s);
        let sdg = standard_gate(GateName::Sdg, &[0], n).unwrap();
        assert_eq!(rotation_half_pi_tableau(Letter::Z, false, 0, n), sdg);
        let sx = standard_gate(GateName::Sx, &[0], n).unwrap();
        assert_eq!(rotation_half_pi_tableau(Letter::X, true, 0, n), sx);
        // R_Y(π/2) = H·Z as an operator product
        let h = standard_gate(GateName::H, &[0], n).unwrap();
        let z = standard_gate(GateName::Z, &[0], n).unwrap();
        assert_eq!(rotation_half_pi_tableau(Letter::Y, true, 0, n), h.compose(&z));
    }

    #[test]
    fn classify_standard_gates() {
        let cz = classify_two_qubit(&gate(GateName::Cz)).unwrap();
        assert_eq!(cz.class_id, 3);
        assert_eq!(cz.c(), Letter::Z);
        assert_eq!(cz.d(), Letter::Z);

        let cx = classify_two_qubit(&gate(GateName::Cx)).unwrap();
        assert_eq!(cx.class_id, 3);

        let swap = classify_two_qubit(&gate(GateName::Swap)).unwrap();
        assert_eq!(swap.class_id, 2);

        let h0 = standard_gate(GateName::H, &[0], 2).unwrap();
        let h1 = standard_gate(GateName::H, &[1], 2).unwrap();
        let hh = classify_two_qubit(&h0.compose(&h1)).unwrap();
        assert_eq!(hh.class_id, 1);

        let ident = classify_two_qubit(&CliffordTableau::identity(2)).unwrap();
        assert_eq!(ident.class_id, 1);

        // CZ·SWAP is Hermitian and class 4
        let czswap = gate(GateName::Cz).compose(&gate(GateName::Swap));
        let cls = classify_two_qubit(&czswap).unwrap();
        assert_eq!(cls.class_id, 4);
    }

    #[test]
    fn classify_rejects_bad_inputs() {
        let s = standard_gate(GateName::S, &[0], 2).unwrap();
        assert!(matches!(classify_two_qubit(&s), Err(Error::NotHermitian)));
        let h = standard_gate(GateName::H, &[0], 1).unwrap();
        assert!(matches!(classify_two_qubit(&h), Err(Error::NotTwoQubit(1))));
    }

    #[test]
    fn class3_transition_pattern() {
        let cls = classify_two_qubit(&gate(GateName::Cz)).unwrap();
        let (a, b, c) = (cls.a(), cls.b(), cls.c());
        let (d, e, f) = (cls.d(), cls.e(), cls.f());
        let two = |l0: Letter, l1: Letter| PauliString::from_letters(&[l0, l1]);
        // CI, ID, CD map to themselves
        assert_eq!(cls.image_of(&two(c, Letter::I)), two(c, Letter::I));
        assert_eq!(cls.image_of(&two(Letter::I, d)), two(Letter::I, d));
        assert_eq!(cls.image_of(&two(c, d)), two(c, d));
        // {AI, BI} ↔ {AD, BD}
        assert_eq!(cls.image_of(&two(a, Letter::I)), two(a, d));
        assert_eq!(cls.image_of(&two(b, Letter::I)), two(b, d));
        // {IE, IF} ↔ {CE, CF}
        assert_eq!(cls.image_of(&two(Letter::I, e)), two(c, e));
        assert_eq!(cls.image_of(&two(Letter::I, f)), two(c, f));
    }

    #[test]
    fn conjugation_preserves_symplectic_form() {
        for g in [GateName::Cz, GateName::Cx, GateName::Swap] {
            let t = gate(g);
            assert!(t.is_symplectic());
            for i in 0..16 {
                for j in 0..16 {
                    let p = pauli_from_index(i, 2);
                    let q = pauli_from_index(j, 2);
                    assert_eq!(
                        t.conjugate_unsigned(&p).sp_inner(&t.conjugate_unsigned(&q)),
                        p.sp_inner(&q)
                    );
                }
            }
        }
    }

    #[test]
    fn hermitian_conjugation_is_involutive_with_signs() {
        for g in [GateName::Cz, GateName::Cx, GateName::Swap] {
            let t = gate(g);
            for i in 1..16 {
                let p = PhasedPauli::plus(pauli_from_index(i, 2));
                assert_eq!(t.conjugate(&t.conjugate(&p)), p);
            }
        }
    }

    #[test]
    fn two_qubit_clifford_group_order() {
        let all = all_two_qubit_cliffords();
        assert_eq!(all.len(), 11520);
        let hermitian = all.iter().filter(|t| t.is_hermitian()).count();
        assert!(hermitian > 0);
    }

    #[test]
    fn inverse_round_trip() {
        let t = gate(GateName::Cz)
            .compose(&standard_gate(GateName::S, &[0], 2).unwrap())
            .compose(&standard_gate(GateName::H, &[1], 2).unwrap());
        assert!(t.compose(&t.inverse()).is_identity());
        assert!(t.inverse().compose(&t).is_identity());
    }

    #[test]
    fn standard_gate_input_validation() {
        assert!(standard_gate(GateName::Cz, &[0, 0], 2).is_err());
        assert!(standard_gate(GateName::Cz, &[0], 2).is_err());
        assert!(standard_gate(GateName::H, &[3], 2).is_err());
        assert!("t".parse::<GateName>().is_err());
    }
}
