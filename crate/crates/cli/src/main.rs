//! Command-line driver: gate classification, basis selection, covering
//! arrays, and simulated learning runs.
//!
//! Exit codes: 0 success, 2 validation error, 3 convergence or coverage
//! failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use paulilearn::basisselect::{select_bases, verify_coverage, Topology};
use paulilearn::clifford::{classify_two_qubit, standard_gate};
use paulilearn::coverarray::construct;
use paulilearn::learn::{decay_series_csv, learn_end_to_end, LearnConfig};
use paulilearn::model::{generate_terms, NoiseModel};
use paulilearn::{Error, GateName, PauliString, TwirlMode};

#[derive(Parser)]
#[command(name = "paulilearn", version, about = "Plan and simulate learning of sparse Pauli-Lindblad noise models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a two-qubit Hermitian Clifford by its support transitions
    Classify {
        /// Gate names applied in sequence on qubits (0, 1), e.g. "cz" or
        /// "cz,swap"; one-qubit names act on qubit 0
        gates: String,
    },
    /// Build learning bases for a topology + layer description
    SelectBases {
        /// Topology JSON: {n, edges, crosstalk, gates, locality}
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, default_value = "pauli")]
        mode: String,
        /// Override the topology's model locality
        #[arg(long)]
        locality: Option<usize>,
        /// Output directory (bases.json + manifest.json); stdout if absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the learning pipeline on a simulated noise model
    Learn {
        /// Run configuration JSON (see docs for the schema)
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Analytic expectations instead of finite sampling
        #[arg(long)]
        exact: bool,
        /// Output directory (results.json + decay.csv + manifest.json)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct and print a verified covering array
    Coverarray { t: usize, k: usize, v: usize },
}

/// Provenance record emitted next to every file-producing run.
#[derive(Serialize)]
struct RunManifest {
    inputs: Vec<String>,
    seed: Option<u64>,
    version: &'static str,
    timestamp_unix: u64,
    /// Output file name -> SHA-256 of its bytes.
    digests: BTreeMap<String, String>,
}

/// On-disk learn configuration: the topology plus the model to simulate.
#[derive(Deserialize)]
struct LearnConfigFile {
    topology: Topology,
    #[serde(default = "default_mode")]
    mode: TwirlMode,
    #[serde(default)]
    depths: Option<Vec<usize>>,
    #[serde(default)]
    shots: Option<usize>,
    #[serde(default)]
    twirl_samples: Option<usize>,
    #[serde(default)]
    prep_flip: Option<Vec<f64>>,
    #[serde(default)]
    meas_flip: Option<Vec<f64>>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    exact: bool,
    model: ModelSource,
}

fn default_mode() -> TwirlMode {
    TwirlMode::Pauli
}

/// Either explicit rates or a seeded uniform plant over the topology's
/// generated terms.
#[derive(Deserialize)]
#[serde(untagged)]
enum ModelSource {
    Explicit { terms: Vec<PauliString>, lambda: Vec<f64> },
    Planted { plant_seed: u64, range: [f64; 2] },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { gates } => cmd_classify(&gates),
        Command::SelectBases { topology, mode, locality, out } => {
            cmd_select_bases(&topology, &mode, locality, out.as_deref())
        }
        Command::Learn { config, mode, depths, shots, seed, exact, out } => {
            cmd_learn(&config, mode, depths, shots, seed, exact, out.as_deref())
        }
        Command::Coverarray { t, k, v } => cmd_coverarray(t, k, v),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NnlsNonConvergence(_) | Error::UncoveredTarget(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn cmd_classify(gates: &str) -> Result<(), Error> {
    let mut op = paulilearn::CliffordTableau::identity(2);
    for name in gates.split(',') {
        let name = GateName::from_str(name.trim())?;
        let qubits: &[usize] = if name.arity() == 1 { &[0] } else { &[0, 1] };
        op = standard_gate(name, qubits, 2)?.compose(&op);
    }
    let cls = classify_two_qubit(&op)?;
    println!("class: {}", cls.class_id);
    println!(
        "roles q1 (A B C): {} {} {}",
        cls.roles_q1[0].to_char(),
        cls.roles_q1[1].to_char(),
        cls.roles_q1[2].to_char()
    );
    println!(
        "roles q2 (D E F): {} {} {}",
        cls.roles_q2[0].to_char(),
        cls.roles_q2[1].to_char(),
        cls.roles_q2[2].to_char()
    );
    println!("support transitions:");
    for (p, img) in &cls.support_map {
        println!("  {p} -> {img}");
    }
    Ok(())
}

fn cmd_select_bases(
    topology: &Path,
    mode: &str,
    locality: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Error> {
    let mode = TwirlMode::from_str(mode)?;
    let mut topo: Topology = read_json(topology)?;
    if let Some(l) = locality {
        topo.locality = l;
    }
    let (graph, coloring, bases) = select_bases(&topo, mode)?;
    let layer = topo.layer()?;
    let targets = generate_terms(&topo.model_spec()?)?;
    let uncovered = verify_coverage(&bases, &targets, &layer, mode);
    if let Some(first) = uncovered.first() {
        return Err(Error::UncoveredTarget(first.to_string()));
    }

    // human-readable pipeline trace
    eprintln!("learning graph: {} vertices, {} edges", graph.vertices.len(), graph.edges.len());
    for (i, v) in graph.vertices.iter().enumerate() {
        eprintln!("  v{i}: qubits {:?}, {} symbols, color {}", v.qubits, v.symbols, coloring.colors[i]);
    }
    eprintln!("chromatic number: {}", coloring.kc);
    eprintln!(
        "covering array: CA({}; {}, {}, {})",
        bases.ca.n_rows, bases.ca.t, bases.ca.k, bases.ca.v
    );
    eprintln!("bases ({}):", bases.bases.len());
    for b in &bases.bases {
        eprintln!("  {b}");
    }
    eprintln!("coverage: all {} targets covered", targets.len());

    let json = to_json_pretty(&bases)?;
    match out {
        Some(dir) => {
            write_outputs(dir, &[("bases.json", &json)], &[topology], None)?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_learn(
    config: &Path,
    mode: Option<String>,
    depths: Option<Vec<usize>>,
    shots: Option<usize>,
    seed: Option<u64>,
    exact: bool,
    out: Option<&Path>,
) -> Result<(), Error> {
    let file: LearnConfigFile = read_json(config)?;
    let topo = file.topology;
    let layer = topo.layer()?;
    let spec = topo.model_spec()?;
    let mut cfg = LearnConfig::new(layer, spec.clone(), file.mode);
    if let Some(m) = mode {
        cfg.mode = TwirlMode::from_str(&m)?;
    }
    if let Some(d) = file.depths {
        cfg.depths = d;
    }
    if let Some(d) = depths {
        cfg.depths = d;
    }
    if let Some(s) = file.shots {
        cfg.shots = s;
    }
    if let Some(s) = shots {
        cfg.shots = s;
    }
    if let Some(s) = file.twirl_samples {
        cfg.twirl_samples = s;
    }
    if let Some(p) = file.prep_flip {
        cfg.prep_flip = p;
    }
    if let Some(p) = file.meas_flip {
        cfg.meas_flip = p;
    }
    cfg.seed = seed.unwrap_or(file.seed);
    cfg.exact = exact || file.exact;

    let model = match file.model {
        ModelSource::Explicit { terms, lambda } => NoiseModel::new(topo.n, terms, lambda)?,
        ModelSource::Planted { plant_seed, range } => {
            plant(&spec, plant_seed, range[0], range[1])?
        }
    };
    let outcome = learn_end_to_end(&cfg, &model)?;

    eprintln!("benchmarks: {}", outcome.benchmarks.len());
    eprintln!("bases: {} ({:?} mode)", outcome.bases.bases.len(), cfg.mode);
    eprintln!(
        "design matrix rank: {}/{} ({})",
        outcome.fit.rank.rank,
        outcome.fit.rank.columns,
        if outcome.fit.rank.full_column_rank { "full" } else { "deficient" }
    );
    eprintln!("nnls residual: {:.3e}, kkt: {:.3e}", outcome.fit.residual, outcome.fit.kkt);
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }

    let results = ResultsJson::from_outcome(&outcome);
    let results_json = to_json_pretty(&results)?;
    let csv = decay_series_csv(&outcome.series);
    match out {
        Some(dir) => write_outputs(
            dir,
            &[("results.json", &results_json), ("decay.csv", &csv)],
            &[config],
            Some(cfg.seed),
        )?,
        None => println!("{results_json}"),
    }
    Ok(())
}

fn cmd_coverarray(t: usize, k: usize, v: usize) -> Result<(), Error> {
    let ca = construct(t, k, v)?;
    print!("{ca}");
    Ok(())
}

/// Deterministic uniform plant over the spec's generated terms.
fn plant(
    spec: &paulilearn::ModelSpec,
    seed: u64,
    lo: f64,
    hi: f64,
) -> Result<NoiseModel, Error> {
    use rand::{Rng, SeedableRng};
    let terms = generate_terms(spec)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lambda = (0..terms.len()).map(|_| rng.gen_range(lo..hi)).collect();
    NoiseModel::new(spec.n, terms, lambda)
}

#[derive(Serialize)]
struct ResultsJson {
    terms: Vec<PauliString>,
    lambda: Vec<f64>,
    fidelities: BTreeMap<PauliString, FidelityJson>,
    residual: f64,
    diagnostics: DiagnosticsJson,
}

#[derive(Serialize)]
struct FidelityJson {
    value: f64,
    variance: f64,
}

#[derive(Serialize)]
struct DiagnosticsJson {
    kkt: f64,
    rank: usize,
    columns: usize,
    full_column_rank: bool,
    null_witness: Option<Vec<f64>>,
    max_reconstruction_error: f64,
    warnings: Vec<String>,
}

impl ResultsJson {
    fn from_outcome(o: &paulilearn::LearnOutcome) -> Self {
        ResultsJson {
            terms: o.fit.terms.clone(),
            lambda: o.fit.lambda.clone(),
            fidelities: o
                .fidelities
                .estimates
                .iter()
                .map(|(k, e)| {
                    (k.clone(), FidelityJson { value: e.value, variance: e.variance })
                })
                .collect(),
            residual: o.fit.residual,
            diagnostics: DiagnosticsJson {
                kkt: o.fit.kkt,
                rank: o.fit.rank.rank,
                columns: o.fit.rank.columns,
                full_column_rank: o.fit.rank.full_column_rank,
                null_witness: o.fit.rank.null_witness.clone(),
                max_reconstruction_error: o
                    .fit
                    .reconstruction_error
                    .iter()
                    .fold(0.0f64, |a, &b| a.max(b)),
                warnings: o.warnings.clone(),
            },
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// Write output files plus a manifest with their digests.
fn write_outputs(
    dir: &Path,
    files: &[(&str, &str)],
    inputs: &[&Path],
    seed: Option<u64>,
) -> Result<(), Error> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", dir.display())))?;
    let mut digests = BTreeMap::new();
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        digests.insert(name.to_string(), hex_digest(content.as_bytes()));
    }
    let manifest = RunManifest {
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        seed,
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        digests,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, to_json_pretty(&manifest)?)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}
