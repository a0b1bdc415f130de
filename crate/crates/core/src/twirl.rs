//! Pauli-rotation twirling.
//!
//! Provides the standard decompositions of single-qubit Pauli rotations
//! into basic gates, the feasible π/2 rotation-twirl sets for a classified
//! two-qubit Hermitian Clifford, the fidelity-averaging partition induced
//! by such a twirl, and single-qubit correction schedules that map a
//! measurement basis back to itself without introducing sign flips.
//!
//! The key identity behind correction schedules is
//! `R_Q(−σθ) · O · R_P(θ) = O`, where `O P O† = σ Q`.  A corrected gate
//! instance (pre-rotation before the noise, matching post-rotation after
//! the gate) therefore acts on Paulis exactly like the bare gate — only
//! the Pauli at which the noise is sampled changes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clifford::{rotation_half_pi_tableau, CliffordTableau, GateClassification};
use crate::error::{Error, Result};
use crate::model::DensePauliChannel;
use crate::pauli::{enumerate_all, pauli_index, Letter, PauliString, PhasedPauli};

/// Single-qubit gate labels appearing in rotation decompositions.
///
/// `T`/`Tdg` occur only in π/4 decompositions and have no tableau.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationGate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Sx,
    Sxdg,
    T,
    Tdg,
}

impl RotationGate {
    pub fn adjoint(self) -> Self {
        match self {
            RotationGate::S => RotationGate::Sdg,
            RotationGate::Sdg => RotationGate::S,
            RotationGate::Sx => RotationGate::Sxdg,
            RotationGate::Sxdg => RotationGate::Sx,
            RotationGate::T => RotationGate::Tdg,
            RotationGate::Tdg => RotationGate::T,
            g => g,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RotationGate::X => "X",
            RotationGate::Y => "Y",
            RotationGate::Z => "Z",
            RotationGate::H => "H",
            RotationGate::S => "S",
            RotationGate::Sdg => "S†",
            RotationGate::Sx => "SX",
            RotationGate::Sxdg => "SX†",
            RotationGate::T => "T",
            RotationGate::Tdg => "T†",
        }
    }
}

impl fmt::Display for RotationGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single-qubit Pauli rotation `R_P(θ)` with its basic-gate realization.
///
/// `gate_seq` is in operator order (leftmost factor acts last in time).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub axis: Letter,
    pub theta: f64,
    pub gate_seq: Vec<RotationGate>,
}

fn match_angle(theta: f64) -> Result<(u8, bool)> {
    const EPS: f64 = 1e-9;
    for (denom, mag) in [(1u8, PI), (2, FRAC_PI_2), (4, FRAC_PI_4)] {
        if (theta - mag).abs() < EPS {
            return Ok((denom, true));
        }
        if (theta + mag).abs() < EPS {
            return Ok((denom, false));
        }
    }
    Err(Error::UnsupportedAngle)
}

/// Basic-gate decomposition of `R_P(θ)` for `θ ∈ {±π, ±π/2, ±π/4}`.
///
/// Negative angles use the adjoint of the positive-angle sequence.
pub fn decompose_rotation(axis: Letter, theta: f64) -> Result<RotationSpec> {
    if axis == Letter::I {
        return Err(Error::InvalidLetter('I'));
    }
    let (denom, positive) = match_angle(theta)?;
    use RotationGate::*;
    let seq: Vec<RotationGate> = match (axis, denom) {
        (Letter::X, 1) => vec![X],
        (Letter::Y, 1) => vec![Y],
        (Letter::Z, 1) => vec![Z],
        (Letter::X, 2) => vec![Sx],
        (Letter::Y, 2) => vec![H, Z],
        (Letter::Z, 2) => vec![S],
        (Letter::X, 4) => vec![H, T, H],
        (Letter::Y, 4) => vec![Sxdg, T, Sx],
        (Letter::Z, 4) => vec![T],
        _ => unreachable!(),
    };
    let gate_seq = if positive {
        seq
    } else {
        seq.into_iter().rev().map(RotationGate::adjoint).collect()
    };
    Ok(RotationSpec { axis, theta, gate_seq })
}

/// Tableau of conjugation by a Pauli operator.
fn pauli_conj_tableau(p: &PauliString) -> CliffordTableau {
    let n = p.n();
    let image = |letter: Letter, q: usize| {
        let g = PauliString::single(letter, q, n);
        let sign = 2 * p.sp_inner(&g);
        PhasedPauli::new(g, sign)
    };
    let x_images = (0..n).map(|q| image(Letter::X, q)).collect();
    let z_images = (0..n).map(|q| image(Letter::Z, q)).collect();
    CliffordTableau::from_images(n, x_images, z_images)
}

/// Conjugation tableau of `R_axis(θ)` on one qubit, `θ ∈ {±π, ±π/2}`.
pub fn rotation_tableau(axis: Letter, theta: f64, qubit: usize, n: usize) -> Result<CliffordTableau> {
    if axis == Letter::I {
        return Err(Error::InvalidLetter('I'));
    }
    let (denom, positive) = match_angle(theta)?;
    match denom {
        1 => Ok(pauli_conj_tableau(&PauliString::single(axis, qubit, n))),
        2 => Ok(rotation_half_pi_tableau(axis, positive, qubit, n)),
        _ => Err(Error::UnsupportedAngle),
    }
}

/// Letter-level image of `b` under conjugation by `R_P(±π/2)` for a
/// Hermitian Pauli axis `P` (possibly multi-qubit): `b ↦ P·b` when they
/// anticommute, `b` otherwise.
pub fn half_pi_letter_image(axis: &PauliString, b: &PauliString) -> PauliString {
    if axis.sp_inner(b) == 1 {
        axis.xor_mul(b)
    } else {
        b.clone()
    }
}

/// Nested rotation-twirl set: independent per-qubit sets `J_i` of Pauli
/// axes (the identity element means "no rotation").
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwirlSet {
    pub sets: Vec<Vec<PauliString>>,
    pub theta: f64,
}

impl TwirlSet {
    /// All combined twirl elements: one axis choice per set, represented
    /// as the list of chosen axes.
    pub fn product_elements(&self) -> Vec<Vec<PauliString>> {
        let mut out: Vec<Vec<PauliString>> = vec![vec![]];
        for set in &self.sets {
            let mut next = Vec::with_capacity(out.len() * set.len());
            for prefix in &out {
                for el in set {
                    let mut v = prefix.clone();
                    v.push(el.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Letter-level image of `b` under the combined rotations of one
    /// product element.
    pub fn element_image(&self, element: &[PauliString], b: &PauliString) -> PauliString {
        let mut cur = b.clone();
        for axis in element {
            if !axis.is_identity() {
                cur = if (self.theta.abs() - PI).abs() < 1e-9 {
                    cur // conjugation by a Pauli fixes every Pauli (up to sign)
                } else {
                    half_pi_letter_image(axis, &cur)
                };
            }
        }
        cur
    }
}

/// Feasible π/2 rotation-twirl sets for a classified gate.
///
/// Per qubit side: if all three weight-one Paulis keep weight one under
/// the gate, the set is `{X, Y, Z}` on that qubit; if only one (the role
/// letter C or D) does, the set is the phase-type `{I, C}`.
pub fn feasible_rotation_twirls(cls: &GateClassification) -> TwirlSet {
    let sets = (0..2)
        .map(|side| {
            let axes = cls.weight_preserving_axes(side);
            match axes.len() {
                3 => axes
                    .into_iter()
                    .map(|l| PauliString::single(l, side, 2))
                    .collect(),
                1 => vec![
                    PauliString::identity(2),
                    PauliString::single(axes[0], side, 2),
                ],
                k => unreachable!("side {side} has {k} weight-preserving axes"),
            }
        })
        .collect();
    TwirlSet { sets, theta: FRAC_PI_2 }
}

/// Disjoint groups of two-qubit Paulis whose fidelities are equalized by
/// a twirl.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingPartition {
    pub groups: Vec<Vec<PauliString>>,
}

impl AveragingPartition {
    /// Partition with every non-identity two-qubit Pauli in its own group.
    pub fn singletons() -> Self {
        let groups = enumerate_all(2)
            .into_iter()
            .filter(|p| !p.is_identity())
            .map(|p| vec![p])
            .collect();
        AveragingPartition { groups }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen: Vec<PauliString> = Vec::new();
        for g in &self.groups {
            if g.is_empty() {
                return Err(Error::InvalidPartition("empty group".into()));
            }
            for p in g {
                if p.n() != 2 || p.is_identity() {
                    return Err(Error::InvalidPartition(format!("bad member {p}")));
                }
                if seen.contains(p) {
                    return Err(Error::InvalidPartition(format!("duplicate member {p}")));
                }
                seen.push(p.clone());
            }
        }
        if seen.len() != 15 {
            return Err(Error::InvalidPartition(format!(
                "covers {} of 15 Paulis",
                seen.len()
            )));
        }
        Ok(())
    }

    pub fn group_of(&self, p: &PauliString) -> Option<&[PauliString]> {
        self.groups
            .iter()
            .find(|g| g.contains(p))
            .map(|g| g.as_slice())
    }
}

/// Orbit partition of the 15 two-qubit Paulis under the letter-level
/// action of the twirl rotations.
pub fn averaging_partition(cls: &GateClassification, tw: &TwirlSet) -> Result<AveragingPartition> {
    let _ = cls;
    let paulis: Vec<PauliString> = enumerate_all(2)
        .into_iter()
        .filter(|p| !p.is_identity())
        .collect();
    let mut parent: Vec<usize> = (0..paulis.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let index_of = |p: &PauliString| pauli_index(p) - 1;
    for set in &tw.sets {
        for axis in set {
            if axis.is_identity() {
                continue;
            }
            for (i, b) in paulis.iter().enumerate() {
                let img = half_pi_letter_image(axis, b);
                let j = index_of(&img);
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<PauliString>> = Vec::new();
    let mut root_of_group: Vec<usize> = Vec::new();
    for (i, p) in paulis.iter().enumerate() {
        let r = find(&mut parent, i);
        match root_of_group.iter().position(|&x| x == r) {
            Some(g) => groups[g].push(p.clone()),
            None => {
                root_of_group.push(r);
                groups.push(vec![p.clone()]);
            }
        }
    }
    let part = AveragingPartition { groups };
    part.validate()?;
    Ok(part)
}

/// Replace each fidelity by its averaging-group mean.
pub fn twirl_dense(ch: &DensePauliChannel, part: &AveragingPartition) -> Result<DensePauliChannel> {
    if ch.n() != 2 {
        return Err(Error::TooManyQubits { n: ch.n(), max: 2 });
    }
    part.validate()?;
    let mut fid = ch.fidelities().to_vec();
    for g in &part.groups {
        let mean = g.iter().map(|p| ch.fidelity(p)).sum::<f64>() / g.len() as f64;
        for p in g {
            fid[pauli_index(p)] = mean;
        }
    }
    Ok(DensePauliChannel::from_fidelities(2, fid))
}

/// Independent oracle for [`twirl_dense`]: the exact expectation of the
/// noise fidelity seen by each Pauli, averaged over all twirl elements.
pub fn twirl_expectation_dense(ch: &DensePauliChannel, tw: &TwirlSet) -> DensePauliChannel {
    assert_eq!(ch.n(), 2);
    let elements = tw.product_elements();
    let fid = enumerate_all(2)
        .iter()
        .map(|b| {
            elements
                .iter()
                .map(|el| ch.fidelity(&tw.element_image(el, b)))
                .sum::<f64>()
                / elements.len() as f64
        })
        .collect();
    DensePauliChannel::from_fidelities(2, fid)
}

/// Per-basis correction schedule.
///
/// `pre` rotations are inserted after odd applications of the layer gate
/// and map the basis image back to the basis; `post` rotations after even
/// applications complete the identity `R_Q(−σθ)·O·R_P(θ) = O`, so the
/// corrected double application acts on every Pauli exactly like `O²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionSchedule {
    pub basis: PauliString,
    pub image: PauliString,
    pub pre: Vec<(usize, RotationSpec)>,
    pub post: Vec<(usize, RotationSpec)>,
}

impl CorrectionSchedule {
    pub fn is_empty(&self) -> bool {
        self.pre.is_empty()
    }

    fn rotations_tableau(rotations: &[(usize, RotationSpec)], n: usize) -> Result<CliffordTableau> {
        let mut t = CliffordTableau::identity(n);
        for (q, r) in rotations {
            t = rotation_tableau(r.axis, r.theta, *q, n)?.compose(&t);
        }
        Ok(t)
    }

    /// Combined tableau of the pre-rotations.
    pub fn pre_tableau(&self, n: usize) -> Result<CliffordTableau> {
        Self::rotations_tableau(&self.pre, n)
    }

    /// Combined tableau of the post-rotations.
    pub fn post_tableau(&self, n: usize) -> Result<CliffordTableau> {
        Self::rotations_tableau(&self.post, n)
    }
}

/// Correction schedule for measuring `basis` through repeated applications
/// of the classified gate.
///
/// Non-empty only when the gate maps the weight-two basis to a different
/// weight-two Pauli on the same support structure; the pre-rotations are
/// per-qubit `R_M(±π/2)` with `M` the letter exchanging image and basis,
/// signs chosen so the image maps back to the basis with a plus sign.
pub fn correction_schedule(
    cls: &GateClassification,
    basis: &PauliString,
) -> Result<CorrectionSchedule> {
    if basis.n() != 2 {
        return Err(Error::NotTwoQubit(basis.n()));
    }
    if basis.weight() != 2 {
        return Err(Error::InvalidConfig(format!(
            "measurement basis {basis} must have two non-identity letters"
        )));
    }
    let image = cls.image_of(basis);
    let empty = CorrectionSchedule {
        basis: basis.clone(),
        image: image.clone(),
        pre: Vec::new(),
        post: Vec::new(),
    };
    if image == *basis || image.weight() != 2 {
        return Ok(empty);
    }
    let axes: Vec<(usize, Letter)> = (0..2)
        .filter(|&q| image.letter(q) != basis.letter(q))
        .map(|q| (q, image.letter(q).mul_letter(basis.letter(q))))
        .collect();
    debug_assert!(!axes.is_empty());
    // Choose per-qubit angle signs so that the pre-rotations map the signed
    // image of the basis back to +basis.
    let signed_image = cls.tableau.conjugate(&PhasedPauli::plus(basis.clone()));
    let mut chosen: Option<Vec<bool>> = None;
    'signs: for mask in 0..(1u32 << axes.len()) {
        let signs: Vec<bool> = (0..axes.len()).map(|i| mask >> i & 1 == 0).collect();
        let mut cur = signed_image.clone();
        for ((q, m), &positive) in axes.iter().zip(&signs) {
            let t = rotation_half_pi_tableau(*m, positive, *q, 2);
            cur = t.conjugate(&cur);
        }
        if cur == PhasedPauli::plus(basis.clone()) {
            chosen = Some(signs);
            break 'signs;
        }
    }
    let signs = chosen.ok_or_else(|| {
        Error::InvalidConfig(format!("no sign assignment corrects basis {basis}"))
    })?;
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for ((q, m), &positive) in axes.iter().zip(&signs) {
        let theta = if positive { FRAC_PI_2 } else { -FRAC_PI_2 };
        pre.push((*q, decompose_rotation(*m, theta)?));
        // post rotation about Q = O M O† (weight one) with angle −σθ
        let q_img = cls
            .tableau
            .conjugate(&PhasedPauli::plus(PauliString::single(*m, *q, 2)));
        debug_assert_eq!(q_img.pauli.weight(), 1);
        let sigma = q_img.sign().expect("Hermitian conjugation yields a sign");
        let q_qubit = q_img.pauli.support()[0];
        let q_axis = q_img.pauli.letter(q_qubit);
        post.push((q_qubit, decompose_rotation(q_axis, -f64::from(sigma) * theta)?));
    }
    Ok(CorrectionSchedule { basis: basis.clone(), image, pre, post })
}

/// A fidelity pair observable from one measurement basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurablePair {
    /// Pauli whose noise fidelity is sampled in odd applications.
    pub source: PauliString,
    /// Pauli sampled in even (corrected) applications.
    pub partner: PauliString,
    /// True when source and partner act on different qubit sets.
    pub support_changed: bool,
}

/// All fidelity pairs observable from measurements in `basis`, given the
/// correction schedule in effect.
///
/// Each non-identity sub-pattern `a` of the basis evolves over one period
/// (two gate applications) through `a → O(a) → pre-rotated partner → a`,
/// picking up the fidelity product `f_a · f_partner`.
pub fn measurable_pairs(
    cls: &GateClassification,
    basis: &PauliString,
    schedule: &CorrectionSchedule,
) -> Vec<MeasurablePair> {
    let subpatterns: Vec<PauliString> = enumerate_all(2)
        .into_iter()
        .filter(|p| !p.is_identity() && p.is_subpattern_of(basis))
        .collect();
    subpatterns
        .into_iter()
        .map(|a| {
            let mut partner = cls.image_of(&a);
            if !schedule.is_empty() {
                for (q, r) in &schedule.pre {
                    partner = half_pi_letter_image(&PauliString::single(r.axis, *q, 2), &partner);
                }
            }
            let support_changed = a.support() != partner.support();
            MeasurablePair { source: a, partner, support_changed }
        })
        .collect()
}
