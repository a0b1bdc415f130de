//! The learning pipeline: design matrix and rank diagnostics, simulated
//! learning circuits (exact or finite-shot Pauli trajectories with SPAM),
//! exponential decay fitting, symmetry resolution, and nonnegative
//! least-squares model recovery.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basisselect::{
    build_graph, color, emit_bases, reduce_graph, verify_coverage, AveragingContext, BasisSet,
    Layer, TwirlMode,
};
use crate::coverarray::construct;
use crate::error::{Error, Result};
use crate::model::{generate_terms, ModelSpec, NoiseModel};
use crate::pauli::{Letter, PauliString};
use crate::twirl::{correction_schedule, feasible_rotation_twirls, half_pi_letter_image};

/// Binary design matrix `M(B, K)` with entries `⟨b, k⟩_sp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    pub benchmarks: Vec<PauliString>,
    pub terms: Vec<PauliString>,
    /// Row-major entries, `|B| × |K|`.
    pub entries: Vec<Vec<u8>>,
}

impl DesignMatrix {
    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.benchmarks.len(), self.terms.len(), |r, c| {
            f64::from(self.entries[r][c])
        })
    }
}

pub fn design_matrix(benchmarks: &[PauliString], terms: &[PauliString]) -> DesignMatrix {
    let entries = benchmarks
        .iter()
        .map(|b| terms.iter().map(|k| b.sp_inner(k)).collect())
        .collect();
    DesignMatrix {
        benchmarks: benchmarks.to_vec(),
        terms: terms.to_vec(),
        entries,
    }
}

/// Rank diagnostics for a design matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub columns: usize,
    pub full_column_rank: bool,
    /// Unit vector `v` with `Mv ≈ 0` when the rank is deficient.
    pub null_witness: Option<Vec<f64>>,
}

/// Column rank of the design matrix over the reals, with a null-space
/// witness on deficiency.
pub fn rank_check(m: &DesignMatrix) -> RankReport {
    let dense = m.to_dense();
    let columns = dense.ncols();
    if columns == 0 || dense.nrows() == 0 {
        return RankReport {
            rank: 0,
            columns,
            full_column_rank: columns == 0,
            null_witness: (columns > 0).then(|| {
                let mut w = vec![0.0; columns];
                w[0] = 1.0;
                w
            }),
        };
    }
    let svd = dense.clone().svd(false, true);
    let max_sv = svd.singular_values.max();
    let tol = f64::EPSILON * max_sv * dense.nrows().max(columns) as f64;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let null_witness = (rank < columns).then(|| {
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        // smallest singular value's right singular vector; columns beyond
        // the stored singular values also span the null space
        let idx = rank.min(v_t.nrows() - 1);
        v_t.row(idx).iter().copied().collect()
    });
    RankReport { rank, columns, full_column_rank: rank == columns, null_witness }
}

/// Depth series of expectation estimates for one measurable pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub basis: PauliString,
    pub source: PauliString,
    pub partner: PauliString,
    pub depths: Vec<usize>,
    pub estimates: Vec<f64>,
    pub variances: Vec<f64>,
    pub shots: Vec<usize>,
}

/// Result of fitting `E(k) = A · r^{k/2}` through a decay series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Pair fidelity `r = f_source · f_partner`, clamped to (0, 1].
    pub pair_fidelity: f64,
    /// SPAM amplitude `A`.
    pub amplitude: f64,
    /// Variance of `log r` from the weighted fit.
    pub log_pair_variance: f64,
    /// Number of estimates dropped from the log fit (non-positive or
    /// below the shot-noise floor).
    pub dropped: usize,
}

/// Weighted log-linear least squares on `log E = log A + (k/2)·log r`.
pub fn fit_decay(series: &DecaySeries) -> Result<DecayFit> {
    // (x = k/2, y = ln E, weight, clears noise floor)
    let mut pts: Vec<(f64, f64, f64, bool)> = Vec::new();
    for ((&k, &e), &var) in series.depths.iter().zip(&series.estimates).zip(&series.variances) {
        if k % 2 != 0 {
            return Err(Error::OddDepth(k));
        }
        if e <= 0.0 {
            continue;
        }
        // delta method: var(ln E) = var(E)/E²; exact data carries weight 1
        let w = if var > 0.0 { e * e / var } else { 1.0 };
        pts.push((k as f64 / 2.0, e.ln(), w, e > 3.0 * var.sqrt()));
    }
    // estimates within shot noise of zero bias the log fit (negative draws
    // were discarded above, and small positive draws swing wide); keep them
    // only when fewer than two depths clear the noise floor
    let clear: BTreeSet<u64> = pts.iter().filter(|p| p.3).map(|p| p.0.to_bits()).collect();
    if clear.len() >= 2 {
        pts.retain(|p| p.3);
    }
    let dropped = series.depths.len() - pts.len();
    let pts: Vec<(f64, f64, f64)> = pts.into_iter().map(|(x, y, w, _)| (x, y, w)).collect();
    let distinct: BTreeSet<u64> = pts.iter().map(|p| p.0.to_bits()).collect();
    if pts.len() < 2 || distinct.len() < 2 {
        return Err(Error::UnfittableSeries);
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let xbar: f64 = pts.iter().map(|p| p.0 * p.2).sum::<f64>() / sw;
    let ybar: f64 = pts.iter().map(|p| p.1 * p.2).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let exact = series.variances.iter().all(|&v| v == 0.0);
    let log_pair_variance = if exact { 0.0 } else { 1.0 / sxx };
    Ok(DecayFit {
        pair_fidelity: slope.exp().min(1.0),
        amplitude: intercept.exp(),
        log_pair_variance,
        dropped,
    })
}

/// How a fidelity estimate was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub basis: PauliString,
    pub source: PauliString,
    pub partner: PauliString,
    /// Pair partner equals the source: the fidelity is measured directly.
    pub direct: bool,
    /// Value assigned through an averaged rotation-twirl group.
    pub averaged_group: bool,
    /// Pair split by symmetry although source and partner share a
    /// support: stronger than the usual support-moving assumption.
    pub strong_assumption: bool,
}

/// Combined estimate of one benchmark fidelity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub variance: f64,
    pub provenance: Vec<Provenance>,
}

/// Per-benchmark fidelity estimates keyed by Pauli.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimates {
    pub estimates: BTreeMap<PauliString, FidelityEstimate>,
}

/// Learning-run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub layer: Layer,
    pub model: ModelSpec,
    pub mode: TwirlMode,
    pub depths: Vec<usize>,
    pub shots: usize,
    /// Independently twirled circuits per (basis, depth); shots are
    /// divided evenly among them.
    pub twirl_samples: usize,
    /// Per-qubit preparation flip probabilities.
    pub prep_flip: Vec<f64>,
    /// Per-qubit readout flip probabilities.
    pub meas_flip: Vec<f64>,
    pub seed: u64,
    /// Analytic expectations instead of sampling.
    pub exact: bool,
}

impl LearnConfig {
    pub fn new(layer: Layer, model: ModelSpec, mode: TwirlMode) -> Self {
        let n = layer.n();
        LearnConfig {
            layer,
            model,
            mode,
            depths: vec![2, 4, 8, 16],
            shots: 10_000,
            twirl_samples: 10,
            prep_flip: vec![0.0; n],
            meas_flip: vec![0.0; n],
            seed: 0,
            exact: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.model.n != self.layer.n() {
            return Err(Error::LengthMismatch(self.model.n, self.layer.n()));
        }
        self.model.validate()?;
        if self.depths.len() < 2 {
            return Err(Error::InvalidConfig("need at least two depths".into()));
        }
        for &k in &self.depths {
            if k % 2 != 0 || k == 0 {
                return Err(Error::OddDepth(k));
            }
        }
        if !self.exact && (self.shots == 0 || self.twirl_samples == 0) {
            return Err(Error::InvalidConfig("shots and twirl_samples must be ≥ 1".into()));
        }
        for p in self.prep_flip.iter().chain(&self.meas_flip) {
            if !(0.0..0.5).contains(p) {
                return Err(Error::InvalidConfig(format!("flip probability {p} outside [0, 1/2)")));
            }
        }
        if self.prep_flip.len() != self.layer.n() || self.meas_flip.len() != self.layer.n() {
            return Err(Error::InvalidConfig("SPAM vectors must have one entry per qubit".into()));
        }
        Ok(())
    }
}

/// Sites of the sampled twirl: each site holds the global rotation axes
/// (or identity) it draws from uniformly.
struct TwirlSites {
    sites: Vec<Vec<PauliString>>,
}

impl TwirlSites {
    fn build(layer: &Layer, mode: TwirlMode) -> Result<Self> {
        let n = layer.n();
        let mut sites = Vec::new();
        if mode == TwirlMode::Pauli {
            // the model is already a Pauli channel, so the Pauli twirl
            // leaves trajectories unchanged; no sites to sample
            return Ok(TwirlSites { sites });
        }
        let mut in_gate = vec![false; n];
        for (_, [a, b], cls) in layer.two_qubit_classifications()? {
            in_gate[a] = true;
            in_gate[b] = true;
            let tw = feasible_rotation_twirls(&cls);
            for local_set in &tw.sets {
                let globals: Vec<PauliString> = local_set
                    .iter()
                    .map(|local| {
                        let mut g = PauliString::identity(n);
                        g.set_letter(a, local.letter(0));
                        g.set_letter(b, local.letter(1));
                        g
                    })
                    .collect();
                sites.push(globals);
            }
        }
        for q in (0..n).filter(|&q| !in_gate[q]) {
            sites.push(
                Letter::NON_IDENTITY
                    .into_iter()
                    .map(|l| PauliString::single(l, q, n))
                    .collect(),
            );
        }
        Ok(TwirlSites { sites })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<&PauliString> {
        self.sites.iter().map(|s| &s[rng.gen_range(0..s.len())]).collect()
    }
}

/// One measurable pair within a basis, with precomputed SPAM amplitude.
#[derive(Clone, Debug)]
struct SourceJob {
    source: PauliString,
    partner: PauliString,
    spam_amplitude: f64,
}

/// Everything needed to simulate one measurement basis.
struct BasisJob {
    basis: PauliString,
    sources: Vec<SourceJob>,
}

/// The pair partner of `m` for measurements in `basis`: the letter image
/// under the layer, pushed through the basis's pre-correction rotations
/// in rotation mode.
fn pair_partner(
    m: &PauliString,
    layer: &Layer,
    mode: TwirlMode,
    basis: &PauliString,
) -> Result<PauliString> {
    let tableau = layer.tableau()?;
    let mut partner = tableau.conjugate_unsigned(m);
    if mode == TwirlMode::Rotation {
        for (_, [a, b], cls) in layer.two_qubit_classifications()? {
            let local_basis = basis.restrict(&[a, b]);
            if local_basis.weight() != 2 {
                continue;
            }
            let schedule = correction_schedule(&cls, &local_basis)?;
            for (q_local, rot) in &schedule.pre {
                let q = [a, b][*q_local];
                let axis = PauliString::single(rot.axis, q, layer.n());
                partner = half_pi_letter_image(&axis, &partner);
            }
        }
    }
    Ok(partner)
}

fn spam_amplitude(m: &PauliString, cfg: &LearnConfig) -> f64 {
    m.support()
        .into_iter()
        .map(|q| (1.0 - 2.0 * cfg.prep_flip[q]) * (1.0 - 2.0 * cfg.meas_flip[q]))
        .product()
}

/// Build the per-basis measurement jobs: the useful sub-patterns of each
/// basis, i.e. those whose measurable pair touches some benchmark group.
fn basis_jobs(
    cfg: &LearnConfig,
    bases: &[PauliString],
    benchmarks: &[PauliString],
    ctx: &AveragingContext,
) -> Result<Vec<BasisJob>> {
    let useful: BTreeSet<PauliString> =
        benchmarks.iter().flat_map(|b| ctx.forms(b)).collect();
    let n = cfg.layer.n();
    let mut jobs = Vec::new();
    for basis in bases {
        let support = basis.support();
        let mut sources = Vec::new();
        // all non-identity sub-patterns of the basis
        for mask in 1u64..(1 << support.len()) {
            let mut m = PauliString::identity(n);
            for (i, &q) in support.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    m.set_letter(q, basis.letter(q));
                }
            }
            let partner = pair_partner(&m, &cfg.layer, cfg.mode, basis)?;
            if useful.contains(&m) || useful.contains(&partner) {
                let spam = spam_amplitude(&m, cfg);
                sources.push(SourceJob { source: m, partner, spam_amplitude: spam });
            }
        }
        jobs.push(BasisJob { basis: basis.clone(), sources });
    }
    Ok(jobs)
}

/// Twirl-averaged fidelity of the noise channel on `b`.
fn averaged_fidelity(model: &NoiseModel, ctx: &AveragingContext, b: &PauliString) -> f64 {
    let forms = ctx.forms(b);
    forms.iter().map(|m| model.fidelity(m)).sum::<f64>() / forms.len() as f64
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Expectation estimates for every measurable pair of `basis` at `depth`.
///
/// Exact mode returns `A · (f̄_source · f̄_partner)^{k/2}` analytically;
/// finite-shot mode runs Pauli-trajectory Monte Carlo over
/// `twirl_samples` independently twirled circuits.
pub fn simulate_learning_circuit(
    cfg: &LearnConfig,
    model: &NoiseModel,
    basis: &PauliString,
    depth: usize,
) -> Result<Vec<DecaySeries>> {
    if depth % 2 != 0 || depth == 0 {
        return Err(Error::OddDepth(depth));
    }
    let ctx = AveragingContext::new(&cfg.layer, cfg.mode)?;
    let benchmarks = generate_terms(&cfg.model)?;
    let jobs = basis_jobs(cfg, std::slice::from_ref(basis), &benchmarks, &ctx)?;
    let job = &jobs[0];
    let (estimates, variances, shots) = run_basis_depth(cfg, model, &ctx, job, depth, 0)?;
    Ok(job
        .sources
        .iter()
        .enumerate()
        .map(|(i, s)| DecaySeries {
            basis: basis.clone(),
            source: s.source.clone(),
            partner: s.partner.clone(),
            depths: vec![depth],
            estimates: vec![estimates[i]],
            variances: vec![variances[i]],
            shots: vec![shots],
        })
        .collect())
}

/// Estimates for all sources of one (basis, depth) cell; returns
/// (estimates, variances, shots per source).
fn run_basis_depth(
    cfg: &LearnConfig,
    model: &NoiseModel,
    ctx: &AveragingContext,
    job: &BasisJob,
    depth: usize,
    cell_index: u64,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let ns = job.sources.len();
    if cfg.exact {
        let estimates = job
            .sources
            .iter()
            .map(|s| {
                let pair = averaged_fidelity(model, ctx, &s.source)
                    * averaged_fidelity(model, ctx, &s.partner);
                s.spam_amplitude * pair.powi((depth / 2) as i32)
            })
            .collect();
        return Ok((estimates, vec![0.0; ns], 0));
    }
    let sites = TwirlSites::build(&cfg.layer, cfg.mode)?;
    let shots_per_circuit = cfg.shots.div_ceil(cfg.twirl_samples);
    let total_shots = shots_per_circuit * cfg.twirl_samples;
    if sites.sites.is_empty() {
        return Ok(run_fast_pauli(cfg, model, job, depth, cell_index));
    }
    let sums: Vec<i64> = (0..cfg.twirl_samples as u64)
        .into_par_iter()
        .map(|circuit| {
            let stream = splitmix64(cfg.seed ^ splitmix64(cell_index * 1_000_003 + circuit));
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            let mut acc = vec![0i64; ns];
            let supports: Vec<Vec<usize>> =
                job.sources.iter().map(|s| s.source.support()).collect();
            for _ in 0..shots_per_circuit {
                // fresh twirl elements each application
                let mut signs = vec![1i64; ns];
                for step in 1..=depth {
                    let element = sites.sample(&mut rng);
                    let error = model.sample_error(&mut rng);
                    for (i, s) in job.sources.iter().enumerate() {
                        let base = if step % 2 == 1 { &s.source } else { &s.partner };
                        let mut c = base.clone();
                        for &axis in &element {
                            c = half_pi_letter_image(axis, &c);
                        }
                        if error.sp_inner(&c) == 1 {
                            signs[i] = -signs[i];
                        }
                    }
                }
                // SPAM flips at both ends
                let mut flipped = vec![false; cfg.layer.n()];
                for (q, f) in flipped.iter_mut().enumerate() {
                    *f = rng.gen_bool(cfg.prep_flip[q]) ^ rng.gen_bool(cfg.meas_flip[q]);
                }
                for (i, supp) in supports.iter().enumerate() {
                    if supp.iter().filter(|&&q| flipped[q]).count() % 2 == 1 {
                        signs[i] = -signs[i];
                    }
                    acc[i] += signs[i];
                }
            }
            acc
        })
        .reduce(
            || vec![0i64; ns],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let estimates: Vec<f64> = sums.iter().map(|&s| s as f64 / total_shots as f64).collect();
    let variances = estimates
        .iter()
        .map(|e| ((1.0 - e * e) / total_shots as f64).max(f64::MIN_POSITIVE))
        .collect();
    Ok((estimates, variances, total_shots))
}

/// Monte Carlo for the untwirled (Pauli-mode) trajectory: each model
/// term flips signs independently per step, so events are drawn with
/// geometric skips and applied as bitset XORs over all sources at once.
fn run_fast_pauli(
    cfg: &LearnConfig,
    model: &NoiseModel,
    job: &BasisJob,
    depth: usize,
    cell_index: u64,
) -> (Vec<f64>, Vec<f64>, usize) {
    let ns = job.sources.len();
    let words = ns.div_ceil(64);
    // masks[k][parity]: bit i set iff term k anticommutes with the
    // trajectory Pauli of source i at that step parity (0 = source on
    // odd steps, 1 = partner on even steps)
    let masks: Vec<[Vec<u64>; 2]> = model
        .terms()
        .iter()
        .map(|t| {
            let mut m = [vec![0u64; words], vec![0u64; words]];
            for (i, s) in job.sources.iter().enumerate() {
                if t.sp_inner(&s.source) == 1 {
                    m[0][i / 64] |= 1 << (i % 64);
                }
                if t.sp_inner(&s.partner) == 1 {
                    m[1][i / 64] |= 1 << (i % 64);
                }
            }
            m
        })
        .collect();
    let probs: Vec<f64> =
        model.lambda().iter().map(|&l| (1.0 - (-2.0 * l).exp()) / 2.0).collect();
    // combined prep/meas flip per qubit; flips the sign of every source
    // whose support contains the qubit
    let spam: Vec<(f64, Vec<u64>)> = (0..cfg.layer.n())
        .filter_map(|q| {
            let (pp, pm) = (cfg.prep_flip[q], cfg.meas_flip[q]);
            let p = pp + pm - 2.0 * pp * pm;
            if p == 0.0 {
                return None;
            }
            let mut mask = vec![0u64; words];
            for (i, s) in job.sources.iter().enumerate() {
                if s.source.letter(q) != Letter::I {
                    mask[i / 64] |= 1 << (i % 64);
                }
            }
            Some((p, mask))
        })
        .collect();
    let shots_per_circuit = cfg.shots.div_ceil(cfg.twirl_samples);
    let total_shots = shots_per_circuit * cfg.twirl_samples;
    let sums: Vec<i64> = (0..cfg.twirl_samples as u64)
        .into_par_iter()
        .map(|circuit| {
            let stream = splitmix64(cfg.seed ^ splitmix64(cell_index * 1_000_003 + circuit));
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            let total_steps = (shots_per_circuit * depth) as u64;
            let mut acc = vec![0u64; shots_per_circuit * words];
            let mut events = |p: f64, total: u64, apply: &mut dyn FnMut(u64)| {
                if p <= 0.0 {
                    return;
                }
                let log1m = (1.0 - p).ln();
                let mut pos: u64 = 0;
                loop {
                    let u: f64 = rng.gen();
                    let jump = (1.0 - u).ln() / log1m;
                    if jump >= (total - pos) as f64 {
                        break;
                    }
                    pos += jump as u64;
                    apply(pos);
                    pos += 1;
                    if pos >= total {
                        break;
                    }
                }
            };
            for (k, &p) in probs.iter().enumerate() {
                events(p, total_steps, &mut |pos| {
                    let shot = (pos / depth as u64) as usize;
                    let parity = (pos % depth as u64) as usize % 2;
                    for w in 0..words {
                        acc[shot * words + w] ^= masks[k][parity][w];
                    }
                });
            }
            for (p, mask) in &spam {
                events(*p, shots_per_circuit as u64, &mut |shot| {
                    let shot = shot as usize;
                    for w in 0..words {
                        acc[shot * words + w] ^= mask[w];
                    }
                });
            }
            // sign of source i in a shot is −1 iff its bit is set
            let mut flips = vec![0u32; ns];
            for shot in 0..shots_per_circuit {
                for w in 0..words {
                    let mut word = acc[shot * words + w];
                    while word != 0 {
                        flips[w * 64 + word.trailing_zeros() as usize] += 1;
                        word &= word - 1;
                    }
                }
            }
            flips
                .into_iter()
                .map(|f| shots_per_circuit as i64 - 2 * i64::from(f))
                .collect::<Vec<i64>>()
        })
        .reduce(
            || vec![0i64; ns],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let estimates: Vec<f64> = sums.iter().map(|&s| s as f64 / total_shots as f64).collect();
    let variances = estimates
        .iter()
        .map(|e| ((1.0 - e * e) / total_shots as f64).max(f64::MIN_POSITIVE))
        .collect();
    (estimates, variances, total_shots)
}

/// Fold per-series pair fits into per-benchmark fidelity estimates.
pub fn resolve_fidelities(
    series: &[(DecaySeries, DecayFit)],
    benchmarks: &[PauliString],
    ctx: &AveragingContext,
) -> Result<FidelityEstimates> {
    let mut estimates: BTreeMap<PauliString, Vec<(f64, f64, Provenance)>> = BTreeMap::new();
    for b in benchmarks {
        let forms: BTreeSet<PauliString> = ctx.forms(b).into_iter().collect();
        for (s, fit) in series {
            if !forms.contains(&s.source) && !forms.contains(&s.partner) {
                continue;
            }
            let direct = s.source == s.partner;
            let f = fit.pair_fidelity.sqrt().clamp(f64::MIN_POSITIVE, 1.0);
            // var(f) ≈ f² · var(log f) = f² · var(log r)/4
            let var = f * f * fit.log_pair_variance / 4.0;
            let prov = Provenance {
                basis: s.basis.clone(),
                source: s.source.clone(),
                partner: s.partner.clone(),
                direct,
                averaged_group: !forms.contains(b) || forms.len() > 1,
                strong_assumption: !direct && s.source.support() == s.partner.support(),
            };
            estimates.entry(b.clone()).or_default().push((f, var, prov));
        }
    }
    let mut out = BTreeMap::new();
    for b in benchmarks {
        let entries = estimates
            .remove(b)
            .ok_or_else(|| Error::UncoveredTarget(b.to_string()))?;
        // inverse-variance combination; exact entries share equal weight
        let weights: Vec<f64> =
            entries.iter().map(|(_, v, _)| if *v > 0.0 { 1.0 / v } else { 1.0e30 }).collect();
        let sw: f64 = weights.iter().sum();
        let value = entries.iter().zip(&weights).map(|((f, _, _), w)| f * w).sum::<f64>() / sw;
        let variance = if entries.iter().all(|(_, v, _)| *v == 0.0) { 0.0 } else { 1.0 / sw };
        out.insert(
            b.clone(),
            FidelityEstimate {
                value,
                variance,
                provenance: entries.into_iter().map(|(_, _, p)| p).collect(),
            },
        );
    }
    Ok(FidelityEstimates { estimates: out })
}

/// Nonnegative least squares `min ½‖Ax − y‖²  s.t. x ≥ 0` by the
/// Lawson-Hanson active-set method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub kkt: f64,
    pub iterations: usize,
}

pub fn nnls(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<NnlsSolution> {
    let ncols = a.ncols();
    let mut x = DVector::zeros(ncols);
    let mut passive = vec![false; ncols];
    let scale = a.amax().max(1.0);
    let tol = 1e-12 * scale * y.amax().max(1.0);
    let max_outer = 100 * ncols.max(10);
    let mut iterations = 0usize;

    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let cols: Vec<usize> = (0..ncols).filter(|&j| passive[j]).collect();
        if cols.is_empty() {
            return DVector::zeros(ncols);
        }
        let sub = a.select_columns(cols.iter());
        let sol = sub
            .svd(true, true)
            .solve(y, f64::EPSILON * scale)
            .unwrap_or_else(|_| DVector::from_element(cols.len(), 0.0));
        let mut z = DVector::zeros(ncols);
        for (i, &j) in cols.iter().enumerate() {
            z[j] = sol[i];
        }
        z
    };

    loop {
        let w = a.transpose() * (y - a * &x);
        let candidate = (0..ncols)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        match candidate {
            Some(j) if w[j] > tol => passive[j] = true,
            _ => break,
        }
        loop {
            iterations += 1;
            if iterations > max_outer {
                return Err(Error::NnlsNonConvergence(iterations));
            }
            let z = solve_passive(&passive);
            let negative: Vec<usize> =
                (0..ncols).filter(|&j| passive[j] && z[j] <= 0.0).collect();
            if negative.is_empty() {
                x = z;
                break;
            }
            let alpha = negative
                .iter()
                .map(|&j| x[j] / (x[j] - z[j]))
                .fold(f64::INFINITY, f64::min);
            x = &x + alpha * (&z - &x);
            for j in 0..ncols {
                if passive[j] && x[j] <= tol.max(1e-14) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    let grad = a.transpose() * (a * &x - y);
    let kkt = (0..ncols)
        .map(|j| if x[j] > 0.0 { grad[j].abs() } else { (-grad[j]).max(0.0) })
        .fold(0.0f64, f64::max);
    let residual = (a * &x - y).norm();
    Ok(NnlsSolution { x: x.iter().copied().collect(), residual, kkt, iterations })
}

/// Recovered model parameters with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub terms: Vec<PauliString>,
    pub lambda: Vec<f64>,
    pub residual: f64,
    pub kkt: f64,
    pub rank: RankReport,
    /// `|f(λ̂)_b − f̂_b|` per benchmark, in benchmark order.
    pub reconstruction_error: Vec<f64>,
}

/// Full output of a learning run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub fit: FitResult,
    pub fidelities: FidelityEstimates,
    pub benchmarks: Vec<PauliString>,
    pub bases: BasisSet,
    pub series: Vec<DecaySeries>,
    pub warnings: Vec<String>,
}

/// Select bases for the configured layer and model.
pub fn select_bases_for(cfg: &LearnConfig) -> Result<BasisSet> {
    let plain = build_graph(&cfg.model, &[])?;
    let g = match cfg.mode {
        TwirlMode::Pauli => plain,
        TwirlMode::Rotation => reduce_graph(&plain, &cfg.layer)?,
    };
    let coloring = color(&g);
    if g.vertices.is_empty() {
        return emit_bases(&g, &coloring, &construct(1, 1, 2)?, &cfg.layer, cfg.mode);
    }
    let v = match cfg.mode {
        TwirlMode::Pauli => 3,
        TwirlMode::Rotation => 2,
    };
    let t = cfg.model.locality().min(coloring.kc).max(1);
    let ca = construct(t, coloring.kc.max(t), v)?;
    emit_bases(&g, &coloring, &ca, &cfg.layer, cfg.mode)
}

/// Run the whole pipeline: term generation, basis selection, simulation,
/// decay fitting, symmetry resolution, rank check, and NNLS inversion.
pub fn learn_end_to_end(cfg: &LearnConfig, model: &NoiseModel) -> Result<LearnOutcome> {
    cfg.validate()?;
    let benchmarks = generate_terms(&cfg.model)?;
    if model.n() != cfg.layer.n() {
        return Err(Error::LengthMismatch(model.n(), cfg.layer.n()));
    }
    let bases = select_bases_for(cfg)?;
    let uncovered = verify_coverage(&bases, &benchmarks, &cfg.layer, cfg.mode);
    if let Some(first) = uncovered.first() {
        return Err(Error::UncoveredTarget(first.to_string()));
    }
    let ctx = AveragingContext::new(&cfg.layer, cfg.mode)?;
    let jobs = basis_jobs(cfg, &bases.bases, &benchmarks, &ctx)?;
    let mut warnings = Vec::new();

    // simulate every (basis, depth) cell and assemble depth series
    let mut series: Vec<DecaySeries> = Vec::new();
    for (bi, job) in jobs.iter().enumerate() {
        let mut per_source: Vec<DecaySeries> = job
            .sources
            .iter()
            .map(|s| DecaySeries {
                basis: job.basis.clone(),
                source: s.source.clone(),
                partner: s.partner.clone(),
                depths: Vec::new(),
                estimates: Vec::new(),
                variances: Vec::new(),
                shots: Vec::new(),
            })
            .collect();
        for (di, &depth) in cfg.depths.iter().enumerate() {
            let cell = (bi * cfg.depths.len() + di) as u64;
            let (est, var, shots) = run_basis_depth(cfg, model, &ctx, job, depth, cell)?;
            for (i, s) in per_source.iter_mut().enumerate() {
                s.depths.push(depth);
                s.estimates.push(est[i]);
                s.variances.push(var[i]);
                s.shots.push(shots);
            }
        }
        series.extend(per_source);
    }

    // fit decays; series that cannot be fitted are dropped with a warning
    let mut fitted: Vec<(DecaySeries, DecayFit)> = Vec::new();
    for s in series {
        match fit_decay(&s) {
            Ok(fit) => {
                if fit.dropped > 0 {
                    warnings.push(format!(
                        "basis {} source {}: dropped {} low-signal estimates",
                        s.basis, s.source, fit.dropped
                    ));
                }
                fitted.push((s, fit));
            }
            Err(Error::UnfittableSeries) => {
                warnings.push(format!(
                    "basis {} source {}: series unfittable, skipped",
                    s.basis, s.source
                ));
            }
            Err(e) => return Err(e),
        }
    }

    let fidelities = resolve_fidelities(&fitted, &benchmarks, &ctx)?;
    let dm = design_matrix(&benchmarks, &benchmarks);
    let rank = rank_check(&dm);
    if !rank.full_column_rank {
        warnings.push(format!(
            "design matrix rank {} of {} columns; solution may be non-unique",
            rank.rank, rank.columns
        ));
    }
    // The data constrain geometric means of each benchmark's group and
    // its layer conjugate, so fit against the matching averaged rows:
    // row b = mean over group members m of ½(⟨m,·⟩ + ⟨O(m),·⟩).  This is
    // exact in Pauli mode and first order in λ for averaged groups.
    let tableau = cfg.layer.tableau()?;
    let nb = benchmarks.len();
    let mut a = DMatrix::zeros(nb, nb);
    for (r, b) in benchmarks.iter().enumerate() {
        let forms = ctx.forms(b);
        for m in &forms {
            let image = tableau.conjugate_unsigned(m);
            for (c, k) in benchmarks.iter().enumerate() {
                a[(r, c)] += f64::from(m.sp_inner(k) + image.sp_inner(k));
            }
        }
        for c in 0..nb {
            a[(r, c)] /= 2.0 * forms.len() as f64;
        }
    }
    let y = DVector::from_iterator(
        nb,
        benchmarks.iter().map(|b| -fidelities.estimates[b].value.ln() / 2.0),
    );
    // symmetry-paired terms have identical averaged columns, so collapse
    // each pair to a single column before solving (duplicate columns make
    // the active-set iteration cycle) and split the recovered rate evenly
    // afterwards for a deterministic representative
    let perm = partner_permutation(&cfg.layer, &benchmarks)?;
    let kept: Vec<usize> = (0..nb).filter(|&i| perm[i].is_none_or(|j| i <= j)).collect();
    let reduced = a.select_columns(&kept);
    let sol = nnls(&reduced, &y)?;
    let mut lambda = vec![0.0; nb];
    for (c, &i) in kept.iter().enumerate() {
        match perm[i] {
            Some(j) if j != i => {
                lambda[i] = sol.x[c] / 2.0;
                lambda[j] = sol.x[c] / 2.0;
            }
            _ => lambda[i] = sol.x[c],
        }
    }
    let recovered = NoiseModel::new(cfg.model.n, benchmarks.clone(), lambda.clone())?;
    // reconstruction compares each datum with the model's prediction for
    // the same measured quantity
    let reconstruction_error = benchmarks
        .iter()
        .map(|b| {
            let image = tableau.conjugate_unsigned(b);
            let pred = (averaged_fidelity(&recovered, &ctx, b)
                * averaged_fidelity(&recovered, &ctx, &image))
            .sqrt();
            (pred - fidelities.estimates[b].value).abs()
        })
        .collect();
    Ok(LearnOutcome {
        fit: FitResult {
            terms: benchmarks.clone(),
            lambda,
            residual: sol.residual,
            kkt: sol.kkt,
            rank,
            reconstruction_error,
        },
        fidelities,
        benchmarks,
        bases,
        series: fitted.into_iter().map(|(s, _)| s).collect(),
        warnings,
    })
}

/// CSV export of decay series: one row per (basis, source, depth).
pub fn decay_series_csv(series: &[DecaySeries]) -> String {
    let mut out = String::from("basis,source,partner,depth,estimate,variance,shots\n");
    for s in series {
        for i in 0..s.depths.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.basis, s.source, s.partner, s.depths[i], s.estimates[i], s.variances[i],
                s.shots[i]
            ));
        }
    }
    out
}

/// The letter-image involution of the layer restricted to benchmark
/// terms; `None` where the image falls outside the term set (the layer
/// maps some cross-gate terms to higher-weight Paulis).
pub fn partner_permutation(layer: &Layer, terms: &[PauliString]) -> Result<Vec<Option<usize>>> {
    let tableau = layer.tableau()?;
    Ok(terms
        .iter()
        .map(|t| {
            let image = tableau.conjugate_unsigned(t);
            terms.iter().position(|u| *u == image)
        })
        .collect())
}
