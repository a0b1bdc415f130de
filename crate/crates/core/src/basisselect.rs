//! Learning-basis selection: build the learning graph over qubits with
//! crosstalk edges, optionally merge/delete vertices for the rotation
//! twirl, color the graph, and map covering-array columns to measurement
//! bases.

use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clifford::{
    classify_two_qubit, standard_gate, CliffordTableau, GateClassification, GateName,
};
use crate::coverarray::{construct, CoveringArray};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::pauli::{Letter, PauliString};
use crate::twirl::{averaging_partition, feasible_rotation_twirls, AveragingPartition};

/// Twirling discipline for a learning experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwirlMode {
    /// Plain Pauli twirl; three-letter alphabet per qubit.
    Pauli,
    /// π/2 rotation twirl with vertex merging; binary alphabet.
    Rotation,
}

impl FromStr for TwirlMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli" | "plain" => Ok(TwirlMode::Pauli),
            "rotation" => Ok(TwirlMode::Rotation),
            other => Err(Error::InvalidConfig(format!("unknown twirl mode '{other}'"))),
        }
    }
}

/// One gate in a hard-cycle layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerGate {
    pub name: GateName,
    pub qubits: Vec<usize>,
}

/// A layer of simultaneously applied Clifford gates on disjoint qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayerJson", into = "LayerJson")]
pub struct Layer {
    n: usize,
    gates: Vec<LayerGate>,
}

#[derive(Serialize, Deserialize)]
struct LayerJson {
    n: usize,
    gates: Vec<LayerGate>,
}

impl From<Layer> for LayerJson {
    fn from(l: Layer) -> Self {
        LayerJson { n: l.n, gates: l.gates }
    }
}

impl TryFrom<LayerJson> for Layer {
    type Error = Error;

    fn try_from(j: LayerJson) -> Result<Self> {
        Layer::new(j.n, j.gates)
    }
}

impl Layer {
    pub fn new(n: usize, gates: Vec<LayerGate>) -> Result<Self> {
        let mut used = vec![false; n];
        for g in &gates {
            if g.qubits.len() != g.name.arity() {
                return Err(Error::BadGateArity {
                    gate: g.name.as_str().to_string(),
                    expected: g.name.arity(),
                    got: g.qubits.len(),
                });
            }
            for &q in &g.qubits {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, n });
                }
                if used[q] {
                    return Err(Error::OverlappingGates(q));
                }
                used[q] = true;
            }
        }
        Ok(Layer { n, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[LayerGate] {
        &self.gates
    }

    /// Tableau of the whole layer.
    pub fn tableau(&self) -> Result<CliffordTableau> {
        let mut t = CliffordTableau::identity(self.n);
        for g in &self.gates {
            t = standard_gate(g.name, &g.qubits, self.n)?.compose(&t);
        }
        Ok(t)
    }

    /// Classification of every two-qubit gate, with its gate index and
    /// qubit pair in gate order.
    pub fn two_qubit_classifications(
        &self,
    ) -> Result<Vec<(usize, [usize; 2], GateClassification)>> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.name.arity() == 2)
            .map(|(i, g)| {
                let local = standard_gate(g.name, &[0, 1], 2)?;
                let cls = classify_two_qubit(&local)?;
                Ok((i, [g.qubits[0], g.qubits[1]], cls))
            })
            .collect()
    }
}

/// A learning-graph vertex: a single qubit, or a merged two-qubit gate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    /// Qubits of the vertex, in gate order when merged.
    pub qubits: Vec<usize>,
    /// Alphabet size: 3 (plain), 2 (merged class-3/4 gate), or 1.
    pub symbols: u8,
    /// Index of the merged gate in the layer, if any.
    pub gate: Option<usize>,
}

/// Qubit-interaction graph whose proper colorings index covering-array
/// columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearningGraph {
    pub vertices: Vec<Vertex>,
    /// Unordered vertex-index pairs, stored with the smaller index first.
    pub edges: BTreeSet<(usize, usize)>,
}

impl LearningGraph {
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.edges.insert((a.min(b), a.max(b)));
        }
    }
}

/// Graph with one vertex per qubit and a clique on every support set,
/// including crosstalk supports.
pub fn build_graph(spec: &ModelSpec, crosstalk: &[Vec<usize>]) -> Result<LearningGraph> {
    spec.validate()?;
    let mut g = LearningGraph {
        vertices: (0..spec.n)
            .map(|q| Vertex { qubits: vec![q], symbols: 3, gate: None })
            .collect(),
        edges: BTreeSet::new(),
    };
    for support in spec.supports.iter().chain(crosstalk) {
        for &a in support {
            if a >= spec.n {
                return Err(Error::IndexOutOfRange { index: a, n: spec.n });
            }
            for &b in support {
                g.add_edge(a, b);
            }
        }
    }
    Ok(g)
}

/// Merge gate-pair vertices, assign per-vertex alphabet sizes, and delete
/// all single-symbol vertices (idle qubits, single-qubit gates, and merged
/// class-1/2 gates).
pub fn reduce_graph(g: &LearningGraph, layer: &Layer) -> Result<LearningGraph> {
    if g.vertices.iter().any(|v| v.qubits.len() != 1) {
        return Err(Error::InvalidConfig("reduce_graph expects an unmerged graph".into()));
    }
    let n = layer.n();
    // new vertex index per qubit; usize::MAX marks deletion
    let mut assign = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    let mut pairs = layer.two_qubit_classifications()?;
    pairs.sort_by_key(|(_, q, _)| q[0].min(q[1]));
    for (gi, [a, b], cls) in pairs {
        if cls.class_id >= 3 {
            assign[a] = vertices.len();
            assign[b] = vertices.len();
            vertices.push(Vertex { qubits: vec![a, b], symbols: 2, gate: Some(gi) });
        }
    }
    let mut reduced = LearningGraph { vertices, edges: BTreeSet::new() };
    for &(a, b) in &g.edges {
        let (qa, qb) = (g.vertices[a].qubits[0], g.vertices[b].qubits[0]);
        if assign[qa] != usize::MAX && assign[qb] != usize::MAX {
            reduced.add_edge(assign[qa], assign[qb]);
        }
    }
    Ok(reduced)
}

/// A proper vertex coloring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub kc: usize,
}

impl Coloring {
    pub fn is_proper(&self, g: &LearningGraph) -> bool {
        g.edges.iter().all(|&(a, b)| self.colors[a] != self.colors[b])
            && self.colors.iter().collect::<BTreeSet<_>>().len() == self.kc
    }
}

/// DSATUR greedy coloring; ties broken by lowest vertex id, so output is
/// deterministic.
pub fn color(g: &LearningGraph) -> Coloring {
    let nv = g.vertices.len();
    let adj: Vec<Vec<usize>> = (0..nv).map(|v| g.neighbors(v)).collect();
    let mut colors = vec![usize::MAX; nv];
    for _ in 0..nv {
        // highest saturation among uncolored; lowest id on ties
        let v = (0..nv)
            .filter(|&v| colors[v] == usize::MAX)
            .max_by_key(|&v| {
                let sat = adj[v]
                    .iter()
                    .filter(|&&u| colors[u] != usize::MAX)
                    .map(|&u| colors[u])
                    .collect::<BTreeSet<_>>()
                    .len();
                (sat, std::cmp::Reverse(v))
            })
            .unwrap();
        let taken: BTreeSet<usize> =
            adj[v].iter().filter(|&&u| colors[u] != usize::MAX).map(|&u| colors[u]).collect();
        colors[v] = (0..).find(|c| !taken.contains(c)).unwrap();
    }
    let kc = colors.iter().collect::<BTreeSet<_>>().len();
    Coloring { colors, kc }
}

/// Exact minimum coloring by branch and bound, for small graphs; starts
/// from the DSATUR solution as an upper bound.
pub fn color_exact(g: &LearningGraph) -> Result<Coloring> {
    let nv = g.vertices.len();
    if nv > 24 {
        return Err(Error::InvalidConfig(format!(
            "exact coloring limited to 24 vertices, got {nv}"
        )));
    }
    let adj: Vec<Vec<usize>> = (0..nv).map(|v| g.neighbors(v)).collect();
    let mut best = color(g);
    let mut colors = vec![usize::MAX; nv];
    fn go(
        v: usize,
        used: usize,
        colors: &mut Vec<usize>,
        adj: &[Vec<usize>],
        best: &mut Coloring,
    ) {
        if used >= best.kc {
            return;
        }
        if v == colors.len() {
            *best = Coloring { colors: colors.clone(), kc: used };
            return;
        }
        let taken: BTreeSet<usize> = adj[v]
            .iter()
            .filter(|&&u| colors[u] != usize::MAX)
            .map(|&u| colors[u])
            .collect();
        // new colors beyond `used` are symmetric; try at most one
        for c in (0..=used.min(colors.len() - 1)).filter(|c| !taken.contains(c)) {
            colors[v] = c;
            go(v + 1, used.max(c + 1), colors, adj, best);
            colors[v] = usize::MAX;
        }
    }
    go(0, 0, &mut colors, &adj, &mut best);
    Ok(best)
}

/// Covering-array parameters recorded in basis-set provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaParams {
    pub t: usize,
    pub k: usize,
    pub v: usize,
    #[serde(rename = "N")]
    pub n_rows: usize,
}

/// The emitted learning bases with their provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSet {
    pub mode: TwirlMode,
    pub bases: Vec<PauliString>,
    pub coloring: Vec<usize>,
    pub ca: CaParams,
}

/// Map covering-array rows to measurement bases.
///
/// Plain mode assigns symbols {0,1,2} → {X,Y,Z} per qubit; rotation mode
/// expands each merged-vertex symbol to the gate's two-letter basis
/// (symbol 0 → CD row, symbol 1 → AF row).  Qubits not covered by a
/// vertex are fixed to Z.
pub fn emit_bases(
    g: &LearningGraph,
    coloring: &Coloring,
    ca: &CoveringArray,
    layer: &Layer,
    mode: TwirlMode,
) -> Result<BasisSet> {
    if coloring.kc > ca.k {
        return Err(Error::TooManyColors { kc: coloring.kc, k: ca.k });
    }
    let expected_v = match mode {
        TwirlMode::Pauli => 3,
        TwirlMode::Rotation => 2,
    };
    if ca.v != expected_v && !g.vertices.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "covering array alphabet {} does not match mode (expected {expected_v})",
            ca.v
        )));
    }
    let n = layer.n();
    let classes: Vec<Option<GateClassification>> = match mode {
        TwirlMode::Pauli => vec![None; g.vertices.len()],
        TwirlMode::Rotation => g
            .vertices
            .iter()
            .map(|vx| match vx.gate {
                Some(gi) => {
                    let gate = &layer.gates()[gi];
                    let local = standard_gate(gate.name, &[0, 1], 2)?;
                    Ok(Some(classify_two_qubit(&local)?))
                }
                None => Ok(None),
            })
            .collect::<Result<_>>()?,
    };
    let rows: &[Vec<u8>] = if g.vertices.is_empty() { &[Vec::new()] } else { &ca.rows };
    let mut bases = Vec::with_capacity(rows.len());
    for row in rows {
        let mut letters = vec![Letter::Z; n];
        for (vi, vx) in g.vertices.iter().enumerate() {
            let symbol = row[coloring.colors[vi]];
            match mode {
                TwirlMode::Pauli => {
                    letters[vx.qubits[0]] = [Letter::X, Letter::Y, Letter::Z][symbol as usize];
                }
                TwirlMode::Rotation => {
                    let cls = classes[vi].as_ref().ok_or_else(|| {
                        Error::InvalidConfig("rotation mode requires merged gate vertices".into())
                    })?;
                    let (l1, l2) = if symbol == 0 {
                        (cls.c(), cls.d())
                    } else {
                        (cls.a(), cls.f())
                    };
                    letters[vx.qubits[0]] = l1;
                    letters[vx.qubits[1]] = l2;
                }
            }
        }
        bases.push(PauliString::from_letters(&letters));
    }
    Ok(BasisSet {
        mode,
        bases,
        coloring: coloring.colors.clone(),
        ca: CaParams { t: ca.t, k: ca.k, v: ca.v, n_rows: ca.rows.len() },
    })
}

/// Topology and layer description consumed by the selection pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub crosstalk: Vec<[usize; 2]>,
    #[serde(default)]
    pub gates: Vec<LayerGate>,
    #[serde(default = "default_locality")]
    pub locality: usize,
}

fn default_locality() -> usize {
    2
}

impl Topology {
    pub fn layer(&self) -> Result<Layer> {
        Layer::new(self.n, self.gates.clone())
    }

    /// Model supports: all connected qubit sets of size ≤ locality in the
    /// edge graph (crosstalk included), plus per-qubit singletons.
    pub fn model_spec(&self) -> Result<ModelSpec> {
        let all_edges: Vec<[usize; 2]> =
            self.edges.iter().chain(&self.crosstalk).copied().collect();
        let mut supports: BTreeSet<Vec<usize>> = (0..self.n).map(|q| vec![q]).collect();
        let mut frontier: Vec<BTreeSet<usize>> =
            supports.iter().map(|s| s.iter().copied().collect()).collect();
        for _ in 1..self.locality {
            let mut next = Vec::new();
            for set in &frontier {
                for &[a, b] in &all_edges {
                    for (inside, outside) in [(a, b), (b, a)] {
                        if set.contains(&inside) && !set.contains(&outside) {
                            let mut grown = set.clone();
                            grown.insert(outside);
                            if supports.insert(grown.iter().copied().collect()) {
                                next.push(grown);
                            }
                        }
                    }
                }
            }
            frontier = next;
        }
        ModelSpec::new(self.n, supports.into_iter().collect())
    }

    pub fn crosstalk_supports(&self) -> Vec<Vec<usize>> {
        self.crosstalk.iter().map(|&[a, b]| vec![a, b]).collect()
    }
}

/// Full pipeline: graph construction, reduction (rotation mode), coloring,
/// covering-array construction, and basis emission.
pub fn select_bases(topo: &Topology, mode: TwirlMode) -> Result<(LearningGraph, Coloring, BasisSet)> {
    let layer = topo.layer()?;
    let spec = topo.model_spec()?;
    let plain = build_graph(&spec, &topo.crosstalk_supports())?;
    let g = match mode {
        TwirlMode::Pauli => plain,
        TwirlMode::Rotation => reduce_graph(&plain, &layer)?,
    };
    let coloring = color(&g);
    let bs = if g.vertices.is_empty() {
        emit_bases(&g, &coloring, &construct(1, 1, 2)?, &layer, mode)?
    } else {
        let v = match mode {
            TwirlMode::Pauli => 3,
            TwirlMode::Rotation => 2,
        };
        let t = topo.locality.min(coloring.kc).max(1);
        let ca = construct(t, coloring.kc.max(t), v)?;
        emit_bases(&g, &coloring, &ca, &layer, mode)?
    };
    Ok((g, coloring, bs))
}

/// Per-layer averaging structure: the fidelity groups induced by the
/// feasible twirl on each two-qubit gate and on every other qubit.
pub struct AveragingContext {
    /// Gate qubit pairs with their local averaging partitions.
    pub partitions: Vec<([usize; 2], AveragingPartition)>,
    /// Qubits outside two-qubit gates; under the rotation twirl their
    /// three fidelities average into one group.
    pub free_qubits: Vec<usize>,
}

impl AveragingContext {
    pub fn new(layer: &Layer, mode: TwirlMode) -> Result<Self> {
        let partitions: Vec<([usize; 2], AveragingPartition)> = layer
            .two_qubit_classifications()?
            .into_iter()
            .map(|(_, q, cls)| {
                let part = match mode {
                    TwirlMode::Pauli => AveragingPartition::singletons(),
                    TwirlMode::Rotation => {
                        averaging_partition(&cls, &feasible_rotation_twirls(&cls))?
                    }
                };
                Ok((q, part))
            })
            .collect::<Result<_>>()?;
        let mut in_gate = vec![false; layer.n()];
        for ([a, b], _) in &partitions {
            in_gate[*a] = true;
            in_gate[*b] = true;
        }
        let free_qubits = match mode {
            TwirlMode::Pauli => Vec::new(),
            TwirlMode::Rotation => (0..layer.n()).filter(|&q| !in_gate[q]).collect(),
        };
        Ok(AveragingContext { partitions, free_qubits })
    }

    /// All Paulis sharing an averaged fidelity with `b`: each gate-local
    /// component ranges over its partition group, free-qubit letters
    /// range over {X, Y, Z}, everything else stays fixed.
    pub fn forms(&self, b: &PauliString) -> Vec<PauliString> {
        let mut forms = vec![b.clone()];
        for &q in &self.free_qubits {
            if b.letter(q) == Letter::I {
                continue;
            }
            forms = forms
                .into_iter()
                .flat_map(|f| {
                    Letter::NON_IDENTITY.into_iter().map(move |l| {
                        let mut out = f.clone();
                        out.set_letter(q, l);
                        out
                    })
                })
                .collect();
        }
        for ([q0, q1], part) in &self.partitions {
            let local = b.restrict(&[*q0, *q1]);
            if local.is_identity() {
                continue;
            }
            let group = match part.group_of(&local) {
                Some(g) => g.to_vec(),
                None => vec![local],
            };
            forms = forms
                .into_iter()
                .flat_map(|f| {
                    group.iter().map(move |member| {
                        let mut out = f.clone();
                        out.set_letter(*q0, member.letter(0));
                        out.set_letter(*q1, member.letter(1));
                        out
                    })
                })
                .collect();
        }
        forms
    }
}

/// Check that every target fidelity (or its averaged group in rotation
/// mode) is observable from at least one emitted basis; returns the
/// uncovered targets.
pub fn verify_coverage(
    bs: &BasisSet,
    targets: &[PauliString],
    layer: &Layer,
    mode: TwirlMode,
) -> Vec<PauliString> {
    let ctx = AveragingContext::new(layer, mode).expect("classifiable layer");
    let layer_tableau = layer.tableau().expect("validated layer");
    targets
        .iter()
        .filter(|&b| {
            // covered when a group member (or its pair partner under the
            // layer, split by symmetry) fits inside some emitted basis
            !ctx.forms(b).iter().any(|m| {
                let partner = layer_tableau.conjugate_unsigned(m);
                bs.bases
                    .iter()
                    .any(|s| m.is_subpattern_of(s) || partner.is_subpattern_of(s))
            })
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_terms;

    /// Worked example: 8-qubit line, CZ/CX/CZ/SWAP layer, crosstalk
    /// between qubits 1 and 4 (0-based).
    fn example_topology(crosstalk: [usize; 2]) -> Topology {
        let gate = |name: GateName, a: usize, b: usize| LayerGate {
            name,
            qubits: vec![a, b],
        };
        Topology {
            n: 8,
            edges: (0..7).map(|q| [q, q + 1]).collect(),
            crosstalk: vec![crosstalk],
            gates: vec![
                gate(GateName::Cz, 0, 1),
                gate(GateName::Cx, 2, 3),
                gate(GateName::Cz, 4, 5),
                gate(GateName::Swap, 6, 7),
            ],
            locality: 2,
        }
    }

    #[test]
    fn example_plain_mode_nine_bases() {
        let topo = example_topology([1, 4]);
        let (g, coloring, bs) = select_bases(&topo, TwirlMode::Pauli).unwrap();
        assert_eq!(g.vertices.len(), 8);
        assert_eq!(coloring.kc, 2);
        assert!(coloring.is_proper(&g));
        assert_eq!(bs.bases.len(), 9);
        assert_eq!(bs.ca, CaParams { t: 2, k: 2, v: 3, n_rows: 9 });
    }

    #[test]
    fn example_rotation_mode_four_bases() {
        let topo = example_topology([1, 4]);
        let (g, coloring, bs) = select_bases(&topo, TwirlMode::Rotation).unwrap();
        // SWAP (class 2) vertex deleted; CZ, CX, CZ merged vertices remain
        assert_eq!(g.vertices.len(), 3);
        assert_eq!(
            g.edges.iter().copied().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 2)]
        );
        assert_eq!(coloring.kc, 3);
        assert_eq!(bs.bases.len(), 4);
        assert_eq!(bs.ca, CaParams { t: 2, k: 3, v: 2, n_rows: 4 });
        // SWAP qubits filled with the default letter
        for b in &bs.bases {
            assert_eq!(b.letter(6), Letter::Z);
            assert_eq!(b.letter(7), Letter::Z);
        }
        // CZ vertex bases alternate between ZZ and XY rows
        let cz_letters: BTreeSet<(Letter, Letter)> =
            bs.bases.iter().map(|b| (b.letter(0), b.letter(1))).collect();
        assert_eq!(
            cz_letters,
            BTreeSet::from([(Letter::Z, Letter::Z), (Letter::X, Letter::Y)])
        );
    }

    #[test]
    fn moved_crosstalk_swaps_chromatic_numbers() {
        let topo = example_topology([1, 3]);
        let (_, plain, _) = select_bases(&topo, TwirlMode::Pauli).unwrap();
        assert_eq!(plain.kc, 3);
        let (_, rot, bs) = select_bases(&topo, TwirlMode::Rotation).unwrap();
        assert_eq!(rot.kc, 2);
        assert_eq!(bs.ca.v, 2);
    }

    #[test]
    fn build_graph_shapes() {
        let line = build_graph(&ModelSpec::line(5), &[]).unwrap();
        assert_eq!(
            line.edges.iter().copied().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2), (2, 3), (3, 4)]
        );
        let tri = build_graph(&ModelSpec::new(3, vec![vec![0, 1, 2]]).unwrap(), &[]).unwrap();
        assert_eq!(tri.edges.len(), 3);
        assert!(build_graph(&ModelSpec::line(3), &[vec![0, 9]]).is_err());
    }

    #[test]
    fn reduce_identity_layer_empty_graph() {
        let layer = Layer::new(4, vec![]).unwrap();
        let g = build_graph(&ModelSpec::line(4), &[]).unwrap();
        let reduced = reduce_graph(&g, &layer).unwrap();
        assert!(reduced.vertices.is_empty() && reduced.edges.is_empty());
    }

    #[test]
    fn reduce_single_cz() {
        let layer = Layer::new(
            2,
            vec![LayerGate { name: GateName::Cz, qubits: vec![0, 1] }],
        )
        .unwrap();
        let g = build_graph(&ModelSpec::line(2), &[]).unwrap();
        let reduced = reduce_graph(&g, &layer).unwrap();
        assert_eq!(reduced.vertices.len(), 1);
        assert_eq!(reduced.vertices[0].symbols, 2);
        assert!(reduced.edges.is_empty());
    }

    #[test]
    fn overlapping_gates_rejected() {
        let mk = |qs: Vec<Vec<usize>>| {
            Layer::new(
                3,
                qs.into_iter()
                    .map(|qubits| LayerGate { name: GateName::Cz, qubits })
                    .collect(),
            )
        };
        assert!(matches!(mk(vec![vec![0, 1], vec![1, 2]]), Err(Error::OverlappingGates(1))));
        assert!(mk(vec![vec![0, 1]]).is_ok());
    }

    #[test]
    fn dsatur_small_graphs() {
        let path = build_graph(&ModelSpec::line(6), &[]).unwrap();
        assert_eq!(color(&path).kc, 2);
        let tri = build_graph(&ModelSpec::new(3, vec![vec![0, 1, 2]]).unwrap(), &[]).unwrap();
        assert_eq!(color(&tri).kc, 3);
        assert_eq!(color_exact(&tri).unwrap().kc, 3);
        // exact search agrees with DSATUR on the example graphs
        let topo = example_topology([1, 4]);
        let spec = topo.model_spec().unwrap();
        let g = build_graph(&spec, &topo.crosstalk_supports()).unwrap();
        assert_eq!(color_exact(&g).unwrap().kc, color(&g).kc);
    }

    #[test]
    fn clique_vertices_get_distinct_colors() {
        for n in [3, 4, 6, 9] {
            let spec = ModelSpec::new(
                n,
                (0..n - 2).map(|q| vec![q, q + 1, q + 2]).collect(),
            )
            .unwrap();
            let g = build_graph(&spec, &[]).unwrap();
            let coloring = color(&g);
            assert!(coloring.is_proper(&g));
            for s in &spec.supports {
                let cs: BTreeSet<usize> = s.iter().map(|&q| coloring.colors[q]).collect();
                assert_eq!(cs.len(), s.len(), "support {s:?} shares a color");
            }
        }
    }

    #[test]
    fn coverage_holds_for_example_both_modes() {
        let topo = example_topology([1, 4]);
        let layer = topo.layer().unwrap();
        let terms = generate_terms(&topo.model_spec().unwrap()).unwrap();
        for mode in [TwirlMode::Pauli, TwirlMode::Rotation] {
            let (_, _, bs) = select_bases(&topo, mode).unwrap();
            let uncovered = verify_coverage(&bs, &terms, &layer, mode);
            assert!(uncovered.is_empty(), "{mode:?}: uncovered {uncovered:?}");
        }
    }

    #[test]
    fn dropping_a_basis_breaks_coverage() {
        let topo = example_topology([1, 4]);
        let layer = topo.layer().unwrap();
        let terms = generate_terms(&topo.model_spec().unwrap()).unwrap();
        let (_, _, mut bs) = select_bases(&topo, TwirlMode::Pauli).unwrap();
        bs.bases.pop();
        // the CA(2,2,3) is a full factorial, so every row is load-bearing
        assert!(!verify_coverage(&bs, &terms, &layer, TwirlMode::Pauli).is_empty());
    }

    #[test]
    fn random_line_and_ring_layers_covered() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let two_qubit = [GateName::Cz, GateName::Cx, GateName::Swap];
        for seed in 0..6u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(4..=12);
            let ring = seed % 2 == 0;
            let mut edges: Vec<[usize; 2]> = (0..n - 1).map(|q| [q, q + 1]).collect();
            if ring && n > 2 {
                edges.push([n - 1, 0]);
            }
            // random disjoint two-qubit gates on neighboring pairs
            let mut used = vec![false; n];
            let mut gates = Vec::new();
            for &[a, b] in &edges {
                if !used[a] && !used[b] && rng.gen_bool(0.7) {
                    used[a] = true;
                    used[b] = true;
                    gates.push(LayerGate {
                        name: *two_qubit.choose(&mut rng).unwrap(),
                        qubits: vec![a, b],
                    });
                }
            }
            let topo = Topology { n, edges, crosstalk: vec![], gates, locality: 2 };
            let layer = topo.layer().unwrap();
            let terms = generate_terms(&topo.model_spec().unwrap()).unwrap();
            for mode in [TwirlMode::Pauli, TwirlMode::Rotation] {
                let (g, coloring, bs) = select_bases(&topo, mode).unwrap();
                assert!(coloring.is_proper(&g));
                let uncovered = verify_coverage(&bs, &terms, &layer, mode);
                assert!(
                    uncovered.is_empty(),
                    "seed {seed} n {n} {mode:?}: uncovered {uncovered:?}"
                );
            }
        }
    }

    #[test]
    fn deterministic_output() {
        let topo = example_topology([1, 4]);
        let a = select_bases(&topo, TwirlMode::Rotation).unwrap();
        let b = select_bases(&topo, TwirlMode::Rotation).unwrap();
        assert_eq!(
            serde_json::to_string(&a.2).unwrap(),
            serde_json::to_string(&b.2).unwrap()
        );
    }

    #[test]
    fn topology_json_round_trip() {
        let text = r#"{
            "n": 4,
            "edges": [[0,1],[1,2],[2,3]],
            "crosstalk": [[0,3]],
            "gates": [{"name":"cz","qubits":[0,1]},{"name":"swap","qubits":[2,3]}],
            "locality": 2
        }"#;
        let topo: Topology = serde_json::from_str(text).unwrap();
        assert_eq!(topo.layer().unwrap().gates().len(), 2);
        let (_, _, bs) = select_bases(&topo, TwirlMode::Pauli).unwrap();
        let json = serde_json::to_value(&bs).unwrap();
        assert!(json["bases"][0].as_str().unwrap().len() == 4);
        assert!(json["ca"]["N"].as_u64().is_some());
    }

    #[test]
    fn three_local_line_uses_strength_three() {
        let topo = Topology {
            n: 6,
            edges: (0..5).map(|q| [q, q + 1]).collect(),
            crosstalk: vec![],
            gates: vec![],
            locality: 3,
        };
        let spec = topo.model_spec().unwrap();
        assert_eq!(spec.locality(), 3);
        assert!(spec.supports.contains(&vec![1, 2, 3]));
        let (g, coloring, bs) = select_bases(&topo, TwirlMode::Pauli).unwrap();
        assert!(coloring.kc >= 3, "consecutive triples force three colors");
        assert_eq!(bs.ca.t, 3);
        let layer = topo.layer().unwrap();
        let terms = generate_terms(&spec).unwrap();
        assert!(verify_coverage(&bs, &terms, &layer, TwirlMode::Pauli).is_empty());
        assert!(coloring.is_proper(&g));
    }
}
