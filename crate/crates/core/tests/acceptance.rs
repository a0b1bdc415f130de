//! Acceptance suite: one test (and one pass/fail line) per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` for the
//! per-criterion report lines.

use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paulilearn::basisselect::{select_bases, LayerGate, Topology};
use paulilearn::clifford::{all_two_qubit_cliffords, classify_two_qubit, standard_gate};
use paulilearn::coverarray::construct;
use paulilearn::learn::{design_matrix, learn_end_to_end, partner_permutation, rank_check};
use paulilearn::model::{generate_terms, ModelSpec, NoiseModel};
use paulilearn::pauli::enumerate_all;
use paulilearn::twirl::{
    averaging_partition, correction_schedule, feasible_rotation_twirls, twirl_dense,
    twirl_expectation_dense,
};
use paulilearn::{
    CliffordTableau, DensePauliChannel, GateClassification, GateName, Layer, LearnConfig,
    PauliString, PhasedPauli, TwirlMode,
};

fn report(criterion: usize, label: &str, check: impl FnOnce() -> Result<(), String>) {
    match check() {
        Ok(()) => println!("criterion {criterion} ({label}): PASS"),
        Err(e) => {
            println!("criterion {criterion} ({label}): FAIL - {e}");
            panic!("criterion {criterion} ({label}) failed: {e}");
        }
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Worked 8-qubit example topology (0-based): line, CZ(0,1), CX(2,3),
/// CZ(4,5), SWAP(6,7), with configurable crosstalk.
fn example8_topology(crosstalk: [usize; 2]) -> Topology {
    let gate = |name: GateName, a: usize, b: usize| LayerGate { name, qubits: vec![a, b] };
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

/// Six-qubit line with alternating CZ/CX gates, used by criteria 4-6.
fn line6_layer() -> Layer {
    Layer::new(
        6,
        vec![
            LayerGate { name: GateName::Cz, qubits: vec![0, 1] },
            LayerGate { name: GateName::Cx, qubits: vec![2, 3] },
            LayerGate { name: GateName::Cz, qubits: vec![4, 5] },
        ],
    )
    .unwrap()
}

fn planted_line6(seed: u64) -> (ModelSpec, NoiseModel) {
    let spec = ModelSpec::line(6);
    let terms = generate_terms(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = (0..terms.len()).map(|_| rng.gen_range(0.001..0.02)).collect();
    let model = NoiseModel::new(6, terms, lambda).unwrap();
    (spec, model)
}

fn classified(name: GateName) -> GateClassification {
    classify_two_qubit(&standard_gate(name, &[0, 1], 2).unwrap()).unwrap()
}

/// A small non-trivial two-qubit Pauli channel for twirl oracles.
fn random_channel(seed: u64) -> DensePauliChannel {
    let spec = ModelSpec::new(2, vec![vec![0], vec![1], vec![0, 1]]).unwrap();
    let terms = generate_terms(&spec).unwrap();
    let lambda: Vec<f64> = (0..terms.len())
        .map(|i| 0.001 + 0.002 * (((i as u64 * 2654435761 + seed) % 97) as f64 / 97.0))
        .collect();
    NoiseModel::new(2, terms, lambda).unwrap().to_dense().unwrap()
}

#[test]
fn criterion_1_worked_example() {
    report(1, "worked 8-qubit example", || {
        let start = Instant::now();
        let topo = example8_topology([1, 4]);
        let (_, plain_col, plain) = select_bases(&topo, TwirlMode::Pauli).map_err(|e| e.to_string())?;
        ensure(plain_col.kc == 2, format!("plain chromatic number {} != 2", plain_col.kc))?;
        ensure(plain.bases.len() == 9, format!("plain bases {} != 9", plain.bases.len()))?;
        ensure(
            (plain.ca.t, plain.ca.k, plain.ca.v) == (2, 2, 3),
            format!("plain CA ({},{},{})", plain.ca.t, plain.ca.k, plain.ca.v),
        )?;
        let (_, rot_col, rot) = select_bases(&topo, TwirlMode::Rotation).map_err(|e| e.to_string())?;
        ensure(rot_col.kc == 3, format!("rotation chromatic number {} != 3", rot_col.kc))?;
        ensure(rot.bases.len() == 4, format!("rotation bases {} != 4", rot.bases.len()))?;
        ensure(
            (rot.ca.t, rot.ca.k, rot.ca.v) == (2, 3, 2),
            format!("rotation CA ({},{},{})", rot.ca.t, rot.ca.k, rot.ca.v),
        )?;
        // moving crosstalk from (1,4) to (1,3) swaps the chromatic numbers
        let moved = example8_topology([1, 3]);
        let (_, c_plain, _) = select_bases(&moved, TwirlMode::Pauli).map_err(|e| e.to_string())?;
        let (_, c_rot, _) = select_bases(&moved, TwirlMode::Rotation).map_err(|e| e.to_string())?;
        ensure(c_plain.kc == 3, format!("moved plain chromatic number {} != 3", c_plain.kc))?;
        ensure(c_rot.kc == 2, format!("moved rotation chromatic number {} != 2", c_rot.kc))?;
        let elapsed = start.elapsed();
        ensure(elapsed.as_secs_f64() < 1.0, format!("runtime {elapsed:?} >= 1 s"))
    });
}

#[test]
fn criterion_2_covering_array_sizes() {
    // published covering array numbers CAN(t, k, v) for k = 2..=20
    const CAN_2K2: [usize; 19] =
        [4, 4, 5, 6, 6, 6, 6, 6, 6, 7, 7, 7, 7, 7, 8, 8, 8, 8, 8];
    const CAN_2K3: [usize; 19] =
        [9, 9, 9, 11, 12, 12, 13, 13, 14, 15, 15, 15, 15, 15, 15, 15, 15, 15, 15];
    const CAN_3K2: [usize; 18] =
        [8, 8, 10, 12, 12, 12, 12, 12, 12, 15, 16, 16, 17, 17, 18, 18, 18, 18];
    report(2, "covering array sizes", || {
        for (i, &want) in CAN_2K2.iter().enumerate() {
            let k = i + 2;
            let ca = construct(2, k, 2).map_err(|e| e.to_string())?;
            ca.verify().map_err(|m| format!("(2,{k},2): {m}"))?;
            ensure(ca.rows.len() == want, format!("(2,{k},2): {} != {want}", ca.rows.len()))?;
        }
        for (i, &want) in CAN_2K3.iter().enumerate() {
            let k = i + 2;
            let ca = construct(2, k, 3).map_err(|e| e.to_string())?;
            ca.verify().map_err(|m| format!("(2,{k},3): {m}"))?;
            ensure(
                ca.rows.len() <= want + 2,
                format!("(2,{k},3): {} > {want} + 2", ca.rows.len()),
            )?;
        }
        for (i, &want) in CAN_3K2.iter().enumerate() {
            let k = i + 3;
            let ca = construct(3, k, 2).map_err(|e| e.to_string())?;
            ca.verify().map_err(|m| format!("(3,{k},2): {m}"))?;
            ensure(
                ca.rows.len() <= want + 2,
                format!("(3,{k},2): {} > {want} + 2", ca.rows.len()),
            )?;
        }
        Ok(())
    });
}

#[test]
fn criterion_3_design_matrix_full_rank() {
    // consecutive windows of sizes 1..=l, wrapping on the ring
    fn windows(n: usize, l: usize, ring: bool) -> ModelSpec {
        let mut supports: Vec<Vec<usize>> = Vec::new();
        for w in 1..=l.min(n) {
            if ring && w > 1 && n > 2 {
                for s in 0..n {
                    supports.push((s..s + w).map(|q| q % n).collect());
                }
            } else {
                for s in 0..=(n - w) {
                    supports.push((s..s + w).collect());
                }
            }
        }
        ModelSpec::new(n, supports).unwrap()
    }
    report(3, "design matrix full column rank", || {
        for l in 1..=3usize {
            for n in 2..=8usize {
                for (label, ring) in [("line", false), ("ring", true)] {
                    let spec = windows(n, l, ring);
                    let terms = generate_terms(&spec).map_err(|e| e.to_string())?;
                    let rep = rank_check(&design_matrix(&terms, &terms));
                    ensure(
                        rep.full_column_rank,
                        format!("l={l} {label} n={n}: rank {}/{}", rep.rank, rep.columns),
                    )?;
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_4_exact_round_trip() {
    report(4, "exact-mode round trip", || {
        let start = Instant::now();
        let layer = line6_layer();
        let (spec, model) = planted_line6(3);
        let mut cfg = LearnConfig::new(layer.clone(), spec, TwirlMode::Pauli);
        cfg.exact = true;
        let outcome = learn_end_to_end(&cfg, &model).map_err(|e| e.to_string())?;
        ensure(outcome.fit.rank.full_column_rank, "design matrix rank deficient")?;
        // the identifiable representative of the plant: each symmetry
        // pair {k, O(k)} averaged
        let perm = partner_permutation(&layer, &outcome.benchmarks).map_err(|e| e.to_string())?;
        let truth = model.lambda();
        let mut max_err = 0.0f64;
        for i in 0..outcome.benchmarks.len() {
            let want = match perm[i] {
                Some(j) => (truth[i] + truth[j]) / 2.0,
                None => truth[i],
            };
            max_err = max_err.max((outcome.fit.lambda[i] - want).abs());
        }
        ensure(max_err < 1e-8, format!("max identifiable-parameter error {max_err:.3e}"))?;
        // fidelity reconstruction against the plant's measurable products
        let tableau = layer.tableau().map_err(|e| e.to_string())?;
        let mut max_fid = 0.0f64;
        for b in &outcome.benchmarks {
            let want =
                (model.fidelity(b) * model.fidelity(&tableau.conjugate_unsigned(b))).sqrt();
            max_fid = max_fid.max((outcome.fidelities.estimates[b].value - want).abs());
        }
        ensure(max_fid < 1e-10, format!("max fidelity reconstruction error {max_fid:.3e}"))?;
        let elapsed = start.elapsed();
        ensure(elapsed.as_secs_f64() < 10.0, format!("runtime {elapsed:?} >= 10 s"))
    });
}

#[test]
fn criterion_5_finite_shot_recovery() {
    report(5, "finite-shot recovery", || {
        let start = Instant::now();
        let layer = line6_layer();
        let (spec, model) = planted_line6(3);
        let tableau = layer.tableau().map_err(|e| e.to_string())?;
        let mut errors: Vec<f64> = Vec::new();
        let mut within = 0usize;
        let mut total = 0usize;
        for seed in 0..20u64 {
            let mut cfg = LearnConfig::new(layer.clone(), spec.clone(), TwirlMode::Pauli);
            cfg.shots = 10_000;
            cfg.depths = vec![2, 4, 8, 16];
            cfg.seed = seed;
            let outcome = learn_end_to_end(&cfg, &model).map_err(|e| e.to_string())?;
            for b in &outcome.benchmarks {
                let truth =
                    (model.fidelity(b) * model.fidelity(&tableau.conjugate_unsigned(b))).sqrt();
                let est = &outcome.fidelities.estimates[b];
                let err = (est.value - truth).abs();
                errors.push(err);
                total += 1;
                if err <= 3.0 * est.variance.sqrt() {
                    within += 1;
                }
            }
        }
        errors.sort_by(f64::total_cmp);
        let median = errors[errors.len() / 2];
        let frac = within as f64 / total as f64;
        ensure(median < 5e-3, format!("median fidelity error {median:.3e}"))?;
        ensure(frac >= 0.95, format!("only {:.1}% within 3 standard errors", frac * 100.0))?;
        let elapsed = start.elapsed();
        ensure(elapsed.as_secs_f64() < 120.0, format!("runtime {elapsed:?} >= 2 min"))
    });
}

#[test]
fn criterion_6_spam_rejection() {
    report(6, "SPAM rejection", || {
        let layer = line6_layer();
        let (spec, model) = planted_line6(3);
        let mut clean = LearnConfig::new(layer, spec, TwirlMode::Pauli);
        clean.exact = true;
        let mut spam = clean.clone();
        spam.prep_flip = vec![0.01; 6];
        spam.meas_flip = vec![0.02; 6];
        let a = learn_end_to_end(&clean, &model).map_err(|e| e.to_string())?;
        let b = learn_end_to_end(&spam, &model).map_err(|e| e.to_string())?;
        let mut max_delta = 0.0f64;
        for t in &a.benchmarks {
            let delta =
                (a.fidelities.estimates[t].value - b.fidelities.estimates[t].value).abs();
            max_delta = max_delta.max(delta);
        }
        ensure(max_delta < 1e-12, format!("max fitted-fidelity change {max_delta:.3e}"))
    });
}

#[test]
fn criterion_7_twirl_averaging_oracle() {
    report(7, "twirl-averaging oracle", || {
        let mut reps: Vec<(String, GateClassification)> = vec![
            ("H(x)H".into(), {
                let h0 = standard_gate(GateName::H, &[0], 2).unwrap();
                let h1 = standard_gate(GateName::H, &[1], 2).unwrap();
                classify_two_qubit(&h1.compose(&h0)).map_err(|e| e.to_string())?
            }),
            ("SWAP".into(), classified(GateName::Swap)),
            ("CZ".into(), classified(GateName::Cz)),
            ("CX".into(), classified(GateName::Cx)),
        ];
        ensure(reps[0].1.class_id == 1, "H(x)H is not class 1")?;
        ensure(reps[1].1.class_id == 2, "SWAP is not class 2")?;
        ensure(reps[2].1.class_id == 3 && reps[3].1.class_id == 3, "CZ/CX are not class 3")?;
        // class-4 representative by exhaustive search over the Hermitian
        // two-qubit Cliffords
        let class4 = all_two_qubit_cliffords()
            .into_iter()
            .filter(|t| t.is_hermitian())
            .filter_map(|t| classify_two_qubit(&t).ok())
            .find(|c| c.class_id == 4)
            .ok_or("no class-4 Hermitian Clifford found")?;
        reps.push(("class-4".into(), class4));
        for (name, cls) in &reps {
            let tw = feasible_rotation_twirls(cls);
            let part = averaging_partition(cls, &tw).map_err(|e| e.to_string())?;
            for seed in 0..3 {
                let ch = random_channel(seed);
                let analytic = twirl_dense(&ch, &part).map_err(|e| e.to_string())?;
                let sampled = twirl_expectation_dense(&ch, &tw);
                for (a, b) in analytic.fidelities().iter().zip(sampled.fidelities()) {
                    ensure(
                        (a - b).abs() < 1e-12,
                        format!("{name}: dense twirl mismatch {a} vs {b}"),
                    )?;
                }
                // theta = pi turns every rotation into a Pauli, so the
                // rotation twirl must equal the plain Pauli twirl over the
                // same set: every element image is the input Pauli itself
                let mut pi_tw = tw.clone();
                pi_tw.theta = std::f64::consts::PI;
                let n_el = pi_tw.product_elements().len();
                for el in pi_tw.product_elements() {
                    for b in enumerate_all(2) {
                        ensure(
                            pi_tw.element_image(&el, &b) == b,
                            format!("{name}: pi-twirl element moved a Pauli"),
                        )?;
                    }
                }
                let pauli_twirled = twirl_expectation_dense(&ch, &pi_tw);
                for (a, b) in pauli_twirled.fidelities().iter().zip(ch.fidelities()) {
                    // same mean-of-identical-values computation as the
                    // plain Pauli twirl over this set
                    let reference = (0..n_el).map(|_| *b).sum::<f64>() / n_el as f64;
                    ensure(
                        (a - reference).abs() == 0.0,
                        format!("{name}: pi-twirl differs from Pauli twirl"),
                    )?;
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_8_correction_identity() {
    report(8, "correction-sequence identity", || {
        let class4 = all_two_qubit_cliffords()
            .into_iter()
            .filter(|t| t.is_hermitian())
            .filter_map(|t| classify_two_qubit(&t).ok())
            .find(|c| c.class_id == 4)
            .ok_or("no class-4 Hermitian Clifford found")?;
        let reps = vec![
            ("CZ".to_string(), classified(GateName::Cz)),
            ("CX".to_string(), classified(GateName::Cx)),
            ("class-4".to_string(), class4),
        ];
        let paulis: Vec<PauliString> =
            enumerate_all(2).into_iter().filter(|p| !p.is_identity()).collect();
        for (name, cls) in &reps {
            for basis in enumerate_all(2).iter().filter(|b| b.weight() == 2) {
                let sched = correction_schedule(cls, basis).map_err(|e| e.to_string())?;
                let pre = sched.pre_tableau(2).map_err(|e| e.to_string())?;
                let post = sched.post_tableau(2).map_err(|e| e.to_string())?;
                // R_Q(-sigma theta) . O . R_P(theta) = O, signs included
                let composed = post.compose(&cls.tableau).compose(&pre);
                for p in &paulis {
                    let got = composed.conjugate(&PhasedPauli::plus(p.clone()));
                    let want = cls.tableau.conjugate(&PhasedPauli::plus(p.clone()));
                    ensure(
                        got == want,
                        format!("{name} basis {basis}: image of {p} differs"),
                    )?;
                }
                // a corrected period returns every Pauli with a + sign
                let period =
                    post.compose(&cls.tableau).compose(&pre).compose(&cls.tableau);
                for p in &paulis {
                    let got = period.conjugate(&PhasedPauli::plus(p.clone()));
                    ensure(
                        got == PhasedPauli::plus(p.clone()),
                        format!("{name} basis {basis}: period moves {p} (or flips sign)"),
                    )?;
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_9_classification_totality() {
    report(9, "classification totality", || {
        let cz = classified(GateName::Cz);
        let cx = classified(GateName::Cx);
        let swap = classified(GateName::Swap);
        let h0 = standard_gate(GateName::H, &[0], 2).unwrap();
        let h1 = standard_gate(GateName::H, &[1], 2).unwrap();
        let hh = classify_two_qubit(&h1.compose(&h0)).map_err(|e| e.to_string())?;
        ensure(cz.class_id == 3, "CZ != class 3")?;
        ensure(cx.class_id == 3, "CX != class 3")?;
        ensure(swap.class_id == 2, "SWAP != class 2")?;
        ensure(hh.class_id == 1, "H(x)H != class 1")?;

        let all = all_two_qubit_cliffords();
        let hermitian: Vec<&CliffordTableau> =
            all.iter().filter(|t| t.is_hermitian()).collect();
        ensure(!hermitian.is_empty(), "no Hermitian Cliffords enumerated")?;
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        let mut counts = [0usize; 4];
        for _ in 0..200 {
            // random Hermitian element, randomly conjugated (conjugation
            // preserves Hermiticity)
            let h = hermitian[rng.gen_range(0..hermitian.len())];
            let u = &all[rng.gen_range(0..all.len())];
            let op = u.compose(h).compose(&u.inverse());
            ensure(op.is_hermitian(), "conjugation broke Hermiticity")?;
            let cls = classify_two_qubit(&op).map_err(|e| format!("unclassifiable: {e}"))?;
            ensure(
                (1..=4).contains(&cls.class_id),
                format!("class {} out of range", cls.class_id),
            )?;
            counts[(cls.class_id - 1) as usize] += 1;
        }
        println!("  class histogram over 200 samples: {counts:?}");
        Ok(())
    });
}

#[test]
fn twirl_mode_parsing_is_stable() {
    // tiny guard so the CLI-facing mode names stay fixed
    assert_eq!(TwirlMode::from_str("pauli").unwrap(), TwirlMode::Pauli);
    assert_eq!(TwirlMode::from_str("plain").unwrap(), TwirlMode::Pauli);
    assert_eq!(TwirlMode::from_str("rotation").unwrap(), TwirlMode::Rotation);
}
