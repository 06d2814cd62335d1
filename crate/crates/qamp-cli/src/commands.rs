//! The six subcommands: amplify, spectrum, verify, iterate, circuit, corpus.
//!
//! Constructive commands (`amplify`, `circuit`, `corpus`) write their
//! artifact — amplified-operator schema, circuit schema, corpus array — to
//! stdout or `--out`; verifying commands (`spectrum`, `verify`, `iterate`)
//! write a [`VerificationLedger`] instead.  Human-readable summaries always
//! go to stderr, so stdout stays machine-parseable.
//!
//! Exit codes are decided here: `Ok(0)` when every asserted check passes,
//! `Ok(1)` after emitting a ledger with failing records, and
//! [`Failure::Input`] (exit 2) for anything wrong with the inputs
//! themselves.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;

use qamp_core::amplify::{
    amplify_derandomised, amplify_full_tensor, amplify_single_shot, iterate, single_shot_floor,
    tensor_lambda,
};
use qamp_core::circuit::{emit_simulation_circuit, phase_exponential};
use qamp_core::corpus::generate_corpus;
use qamp_core::ham::HamiltonianSchema;
use qamp_core::linalg::{basis_state, commutator_fro, dim_of, embed_global, identity, CMat};
use qamp_core::measure::{
    check_decoupling, check_layer_energy_identity, check_second_moment_walks, moments_x,
    state_digest, verify_soundness,
};
use qamp_core::spectra::{min_eig_dense, min_eig_iterative};
use qamp_core::{
    tol, AmplifiedOperator, CheckRecord, Error, GraphFamily, LayeredHamiltonian, Mode,
    SpectralResult,
};

use crate::jsonio::{
    emit_payload, parse_hamiltonian, parse_operator, read_input, to_json, OperatorInput,
};
use crate::ledger::{LambdaRecord, LambdaSummary, SpectrumRecord, VerificationLedger};
use crate::{Failure, OutputFormat};

/// Iteration cap for every Lanczos invocation the CLI makes.
const ITER_MAX: usize = 5_000;

/// Largest base-register count for which plain Hamiltonians are
/// diagonalised densely (and the single-shot overlap hypothesis is checked
/// by dense embedding).
const PLAIN_DENSE_CAP: usize = 10;

/// The soundness grid of audit thresholds used with `--grid`.
const GRID_ALPHAS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 1.0];

// ─── Shared helpers ─────────────────────────────────────────────────────────

fn core_err(e: Error) -> Failure {
    match e {
        Error::NoConvergence {
            residual,
            tol,
            iterations,
            dim,
        } => Failure::Checks(vec![format!(
            "spectrum.converged: residual {residual:.3e} > tol {tol:.3e} \
             after {iterations} iterations (dim {dim})"
        )]),
        other => Failure::Input(other.to_string()),
    }
}

fn parse_family(name: &str) -> Result<GraphFamily, Failure> {
    name.parse::<GraphFamily>()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn parse_mode(name: &str) -> Result<Mode, Failure> {
    name.parse::<Mode>().map_err(|e| Failure::Input(e.to_string()))
}

/// Extremal eigenvalue of an amplified operator: exact diagonal scan or
/// Lanczos for classical/large operators, dense otherwise.
fn lambda_of_amp(amp: &AmplifiedOperator, seed: u64) -> Result<SpectralResult, Failure> {
    if amp.base().is_classical() || amp.n_total() > 8 {
        amp.lambda_min(tol::EIG_ITER, ITER_MAX, seed).map_err(core_err)
    } else {
        let dense = amp.dense().map_err(core_err)?;
        min_eig_dense(&dense).map_err(core_err)
    }
}

/// Extremal eigenvalue of a plain layered Hamiltonian.
fn lambda_of_plain(h: &LayeredHamiltonian, seed: u64) -> Result<SpectralResult, Failure> {
    if h.n_qubits() <= PLAIN_DENSE_CAP {
        let dense = h.dense().map_err(core_err)?;
        min_eig_dense(&dense).map_err(core_err)
    } else {
        min_eig_iterative(
            |v| h.apply(v),
            dim_of(h.n_qubits()),
            tol::EIG_ITER,
            ITER_MAX,
            seed,
        )
        .map_err(core_err)
    }
}

/// Guaranteed bound on the eigenvalue error of a spectral result, by method.
fn value_error_budget(sr: &SpectralResult) -> f64 {
    match sr.method.as_str() {
        "diagonal" => 0.0,
        "dense" => tol::EIG_DENSE,
        _ => tol::EIG_ITER,
    }
}

fn lambda_record(sr: &SpectralResult) -> LambdaRecord {
    LambdaRecord {
        value: sr.value,
        method: sr.method.clone(),
        residual: sr.residual,
    }
}

/// Emit the finished ledger (stdout or `--out`), print the stderr summary,
/// and translate its verdict into an exit code.
fn conclude(
    mut ledger: VerificationLedger,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    ledger.finalise();
    let payload = match format {
        OutputFormat::Json => to_json(&ledger),
        OutputFormat::Table => ledger.render_table(),
    };
    emit_payload(payload.trim_end(), out)?;
    eprint!("{}", ledger.render_summary());
    if ledger.pass {
        Ok(0)
    } else {
        eprintln!("failing checks: {}", ledger.failing_ids().join(", "));
        Ok(1)
    }
}

// ─── amplify ────────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct AmplifyArgs {
    /// Input Hamiltonian JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Amplification strength: the walk operator acts on 2t registers.
    #[arg(long)]
    pub t: usize,
    /// Operator variant: walks | tensor | dl.
    #[arg(long, default_value = "walks")]
    pub mode: String,
    /// Graph family for walk amplification:
    /// complete_loops | complete | cycle | chords.
    #[arg(long, default_value = "complete_loops")]
    pub graph: String,
    /// Output file for the structural schema (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_amplify(args: &AmplifyArgs) -> Result<i32, Failure> {
    let (text, _hash) = read_input(&args.input)?;
    let h = parse_hamiltonian(&text)?;
    let mode = parse_mode(&args.mode)?;
    let amp = match mode {
        Mode::Walks => amplify_derandomised(&h, args.t, parse_family(&args.graph)?),
        Mode::Tensor => amplify_full_tensor(&h, args.t),
        Mode::SingleShot => amplify_single_shot(&h, args.t),
    }
    .map_err(core_err)?;

    emit_payload(&to_json(&amp.to_schema()), args.out.as_deref())?;

    eprintln!(
        "amplified: mode={} t={} registers={} total_qubits={}",
        mode.name(),
        amp.t(),
        amp.registers(),
        amp.n_total()
    );
    if mode == Mode::Walks {
        for (chi, lw) in amp.layer_walks().iter().enumerate() {
            let g = lw.graph();
            eprintln!(
                "  layer {chi}: m={} d={} mu={:.6} replication={}",
                g.m(),
                g.d(),
                g.mu(),
                lw.replication()
            );
            if g.is_degenerate() {
                eprintln!(
                    "  warning: layer {chi} graph has mu = 1 (no expansion); \
                     soundness constants fall back to the finite-sum form"
                );
            }
        }
        eprintln!("  mu_max={:.6} c_mu={:.6}", amp.mu_max(), amp.c_mu());
    }
    Ok(0)
}

// ─── spectrum ───────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Input file: a Hamiltonian or an amplified-operator schema.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Eigensolver: dense | iter.
    #[arg(long, default_value = "iter")]
    pub method: String,
    /// Residual tolerance asserted on the result.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Start-vector seed for the iterative solver.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Iteration cap for the iterative solver.
    #[arg(long, default_value_t = ITER_MAX)]
    pub max_iter: usize,
    /// Output file for the ledger (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_spectrum(args: &SpectrumArgs, format: OutputFormat) -> Result<i32, Failure> {
    let (text, hash) = read_input(&args.input)?;
    let op = parse_operator(&text)?;

    let mut ledger = VerificationLedger::new("spectrum");
    ledger.inputs.insert("operator".into(), hash);
    ledger.params.method = Some(args.method.clone());
    ledger.params.tol = Some(args.tol);
    ledger.params.seed = Some(args.seed);

    let computed = match (args.method.as_str(), &op) {
        ("dense", OperatorInput::Amplified(amp)) => {
            amp.dense().and_then(|d| min_eig_dense(&d))
        }
        ("dense", OperatorInput::Plain(h)) => h.dense().and_then(|d| min_eig_dense(&d)),
        ("iter", OperatorInput::Amplified(amp)) => {
            amp.lambda_min(args.tol, args.max_iter, args.seed)
        }
        ("iter", OperatorInput::Plain(h)) => min_eig_iterative(
            |v| h.apply(v),
            dim_of(h.n_qubits()),
            args.tol,
            args.max_iter,
            args.seed,
        ),
        (other, _) => {
            return Err(Failure::Input(format!(
                "unknown method '{other}' (expected dense | iter)"
            )))
        }
    };

    match computed {
        Ok(sr) => {
            ledger.push(CheckRecord::le(
                "spectrum.converged",
                "eigenpair residual <= tol",
                sr.residual,
                0.0,
                args.tol,
            ));
            ledger.spectrum = Some(SpectrumRecord {
                value: sr.value,
                residual: sr.residual,
                iterations: sr.iterations,
                method: sr.method.clone(),
                state_sha256: state_digest(&sr.vector),
            });
            eprintln!(
                "lambda_min = {:.16e} (method {}, residual {:.3e}, {} matvecs)",
                sr.value, sr.method, sr.residual, sr.iterations
            );
        }
        Err(Error::NoConvergence {
            residual,
            tol: _,
            iterations,
            dim,
        }) => {
            ledger.push(CheckRecord::le(
                "spectrum.converged",
                "eigenpair residual <= tol",
                residual,
                0.0,
                args.tol,
            ));
            eprintln!(
                "eigensolver did not converge: residual {residual:.3e} after \
                 {iterations} iterations (dim {dim})"
            );
        }
        Err(other) => return Err(Failure::Input(other.to_string())),
    }

    conclude(ledger, format, args.out.as_deref())
}

// ─── verify ─────────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Input Hamiltonian JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Amplification strength (2t registers).
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// Audit radius, in 1..=t.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Audit energy threshold, in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Graph family for the walk operator.
    #[arg(long, default_value = "complete_loops")]
    pub graph: String,
    /// Ground-state / eigensolver seed.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Check the soundness bound on the whole (r, alpha) grid instead of
    /// the single flagged point.
    #[arg(long)]
    pub grid: bool,
    /// Output file for the ledger (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Does every projector non-commute with at most g − 1 others?  This is the
/// hypothesis under which the single-shot floor is asserted.
fn overlap_hypothesis(h: &LayeredHamiltonian) -> bool {
    let n = h.n_qubits();
    let globals: Vec<CMat> = h
        .terms()
        .iter()
        .map(|t| embed_global(t.matrix(), t.support(), n))
        .collect();
    let budget = h.g().saturating_sub(1);
    (0..globals.len()).all(|i| {
        let partners = (0..globals.len())
            .filter(|&j| j != i)
            .filter(|&j| commutator_fro(&globals[i], &globals[j]) > tol::COMMUTATION)
            .count();
        partners <= budget
    })
}

pub fn cmd_verify(args: &VerifyArgs, format: OutputFormat) -> Result<i32, Failure> {
    let (text, hash) = read_input(&args.input)?;
    let h = parse_hamiltonian(&text)?;
    if args.t == 0 {
        return Err(Failure::Input("t must be at least 1".into()));
    }
    if !(1..=args.t).contains(&args.r) {
        return Err(Failure::Input(format!(
            "r = {} must lie in 1..={}",
            args.r, args.t
        )));
    }
    let family = parse_family(&args.graph)?;
    let t = args.t;

    let amp = amplify_derandomised(&h, t, family).map_err(core_err)?;
    let tensor = amplify_full_tensor(&h, t).map_err(core_err)?;
    let dl = amplify_single_shot(&h, t).map_err(core_err)?;

    let base_sr = lambda_of_plain(&h, args.seed)?;
    let walks_sr = lambda_of_amp(&amp, args.seed)?;
    let tensor_sr = lambda_of_amp(&tensor, args.seed)?;
    let dl_sr = lambda_of_amp(&dl, args.seed)?;
    let ground = walks_sr.vector.clone();

    let mut ledger = VerificationLedger::new("verify");
    ledger.inputs.insert("hamiltonian".into(), hash);
    ledger.params.t = Some(t);
    ledger.params.r = Some(args.r);
    ledger.params.alpha = Some(args.alpha);
    ledger.params.graph = Some(args.graph.clone());
    ledger.params.seed = Some(args.seed);
    ledger.params.grid = Some(args.grid);
    ledger.lambda = Some(LambdaSummary {
        base: Some(lambda_record(&base_sr)),
        walks: Some(lambda_record(&walks_sr)),
        tensor: Some(lambda_record(&tensor_sr)),
        single_shot: Some(lambda_record(&dl_sr)),
    });

    // Completeness of the walk operator.
    ledger.push(CheckRecord::le(
        "completeness.walks",
        "lambda_min(amplified) <= 2t * lambda_min(base)",
        walks_sr.value,
        2.0 * t as f64 * base_sr.value,
        tol::BOUND_CHECK,
    ));

    // Closed form of the full tensor power.  The tolerance grants each
    // eigenvalue its method's guaranteed error (the closed form magnifies
    // the base error by at most t).
    let tensor_tol = tol::MOMENT_IDENTITY
        + value_error_budget(&tensor_sr)
        + t as f64 * value_error_budget(&base_sr);
    ledger.push(CheckRecord::eq(
        "tensor.closed_form",
        "lambda_min(tensor) = 1 - (1 - lambda_min(base))^t",
        tensor_sr.value,
        tensor_lambda(base_sr.value, t),
        tensor_tol,
    ));

    // Single-shot floor, asserted only under its overlap hypothesis.
    if h.n_qubits() > PLAIN_DENSE_CAP {
        ledger.warnings.push(format!(
            "single-shot floor not asserted: overlap hypothesis check needs \
             dense embeddings (n = {} > {PLAIN_DENSE_CAP})",
            h.n_qubits()
        ));
    } else if overlap_hypothesis(&h) {
        let gamma = base_sr.value.max(0.0);
        ledger.push(CheckRecord::le(
            "single_shot.floor",
            "lambda_min(single_shot) >= (min_w/(4g)) * (1 - (1 + m*gamma/g^2)^-t)",
            single_shot_floor(&h, gamma, t),
            dl_sr.value,
            tol::BOUND_CHECK,
        ));
    } else {
        ledger.warnings.push(
            "single-shot floor not asserted: some projector non-commutes with \
             more than g - 1 others"
            .into(),
        );
    }

    // Composite soundness bound, at the flagged point or on the grid.
    let points: Vec<(usize, f64)> = if args.grid {
        (1..=t)
            .flat_map(|r| GRID_ALPHAS.iter().map(move |&a| (r, a)))
            .collect()
    } else {
        vec![(args.r, args.alpha)]
    };
    let mut warnings = BTreeSet::new();
    for (r, alpha) in points {
        let rep = verify_soundness(&amp, &ground, base_sr.value, walks_sr.value, r, alpha)
            .map_err(core_err)?;
        warnings.extend(rep.warnings.iter().cloned());
        let mut record = rep.check.clone();
        record.id = format!("soundness.composite.r{r}.a{alpha}");
        ledger.push(record);
    }
    ledger.warnings.extend(warnings);

    // Moment machinery at the flagged (r, alpha).
    let li = check_layer_energy_identity(&amp, &ground).map_err(core_err)?;
    ledger.extend(li.checks);
    let sm = check_second_moment_walks(&amp, &ground).map_err(core_err)?;
    ledger.extend(sm.checks);
    let mx = moments_x(&amp, &ground, args.alpha, args.r).map_err(core_err)?;
    ledger.extend(mx.checks.checks);
    let dec = check_decoupling(&amp, &ground, args.alpha, args.r).map_err(core_err)?;
    ledger.extend(dec.checks.checks);

    conclude(ledger, format, args.out.as_deref())
}

// ─── iterate ────────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct IterateArgs {
    /// Input Hamiltonian JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Amplification strength per round.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// Number of amplify-and-materialise rounds.
    #[arg(long)]
    pub rounds: usize,
    /// Graph family for each round's walk operator.
    #[arg(long, default_value = "complete_loops")]
    pub graph: String,
    /// Refuse rounds that would exceed this total qubit count.
    #[arg(long, default_value_t = 20)]
    pub qubit_budget: usize,
    /// Eigensolver seed.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output file for the ledger (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_iterate(args: &IterateArgs, format: OutputFormat) -> Result<i32, Failure> {
    let (text, hash) = read_input(&args.input)?;
    let h = parse_hamiltonian(&text)?;
    let family = parse_family(&args.graph)?;

    let (ms, report) = iterate(&h, args.t, args.rounds, family, args.qubit_budget, args.seed)
        .map_err(core_err)?;

    let mut ledger = VerificationLedger::new("iterate");
    ledger.inputs.insert("hamiltonian".into(), hash);
    ledger.params.t = Some(args.t);
    ledger.params.rounds = Some(args.rounds);
    ledger.params.graph = Some(args.graph.clone());
    ledger.params.qubit_budget = Some(args.qubit_budget);
    ledger.params.seed = Some(args.seed);
    ledger.extend(report.rounds.iter().map(|r| r.completeness.clone()));
    ledger.iteration = Some(report);

    for (i, m) in ms.iter().enumerate() {
        eprintln!(
            "round {i}: n={} m={} g={}",
            m.n_qubits(),
            m.m(),
            m.g()
        );
    }
    conclude(ledger, format, args.out.as_deref())
}

// ─── circuit ────────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct CircuitArgs {
    /// Input Hamiltonian JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Amplification strength (the walk term spans 2t registers).
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// Graph family for the walk operator.
    #[arg(long, default_value = "complete_loops")]
    pub graph: String,
    /// Walk-term id as `layer:walk_index`.
    #[arg(long, default_value = "0:0")]
    pub term: String,
    /// Phase angle T of the emitted e^{iT*Pi} circuit.
    #[arg(long = "T")]
    pub phase: f64,
    /// Output file for the circuit schema (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_term_id(s: &str) -> Result<(usize, u64), Failure> {
    let (layer, walk) = s.split_once(':').ok_or_else(|| {
        Failure::Input(format!("term id '{s}' is not of the form layer:walk_index"))
    })?;
    let layer = layer
        .parse::<usize>()
        .map_err(|_| Failure::Input(format!("bad layer index '{layer}' in term id")))?;
    let walk = walk
        .parse::<u64>()
        .map_err(|_| Failure::Input(format!("bad walk index '{walk}' in term id")))?;
    Ok((layer, walk))
}

pub fn cmd_circuit(args: &CircuitArgs) -> Result<i32, Failure> {
    let (text, _hash) = read_input(&args.input)?;
    let h = parse_hamiltonian(&text)?;
    let family = parse_family(&args.graph)?;
    let (layer, walk_index) = parse_term_id(&args.term)?;

    let amp = amplify_derandomised(&h, args.t, family).map_err(core_err)?;
    if layer >= h.g() {
        return Err(Failure::Input(format!(
            "layer {layer} out of range: the Hamiltonian has {} layers",
            h.g()
        )));
    }
    let term = amp.path_term(layer, walk_index).map_err(core_err)?;

    // One clause per register, shifted onto that register's qubit block.
    let n = h.n_qubits();
    let n_system = n * amp.registers();
    let clauses: Vec<qamp_core::LocalProjector> = term
        .term_indices
        .iter()
        .enumerate()
        .map(|(reg, &ti)| {
            let base_term = &h.terms()[ti];
            let support: Vec<usize> =
                base_term.support().iter().map(|&q| q + reg * n).collect();
            qamp_core::LocalProjector::new(support, base_term.matrix().clone())
        })
        .collect::<Result<_, _>>()
        .map_err(core_err)?;

    let circuit = emit_simulation_circuit(&clauses, n_system, args.phase).map_err(core_err)?;
    emit_payload(&to_json(&circuit.to_schema()), args.out.as_deref())?;

    // Size checks, then (when small enough) exactness on the ancilla-zero
    // subspace against the spectral-decomposition oracle.
    let m = clauses.len();
    let mut checks = vec![
        CheckRecord::le(
            "circuit.gate_count",
            "gate count <= 4m + 2",
            circuit.gates().len() as f64,
            (4 * m + 2) as f64,
            0.0,
        ),
        CheckRecord::le(
            "circuit.tree_depth",
            "AND-tree depth <= ceil(log2 m) + 1",
            circuit.tree_depth() as f64,
            if m == 1 {
                1.0
            } else {
                ((m as f64).log2().ceil() + 1.0).round()
            },
            0.0,
        ),
    ];
    if n_system <= PLAIN_DENSE_CAP {
        let dim = dim_of(n_system);
        let mut product = identity(dim);
        for c in &clauses {
            product *= identity(dim) - embed_global(c.matrix(), c.support(), n_system);
        }
        let target = phase_exponential(&(identity(dim) - product), args.phase);
        let anc_shift = circuit.n_ancilla();
        let dim_total = dim_of(circuit.n_total());
        let mut worst = 0.0f64;
        for j in 0..dim {
            let out = circuit.apply(&basis_state(dim_total, j << anc_shift));
            for i in 0..dim {
                worst = worst.max((out[i << anc_shift] - target[(i, j)]).norm());
            }
        }
        checks.push(CheckRecord::le(
            "circuit.action",
            "max deviation from e^{iT*Pi} on the ancilla-zero subspace <= tol",
            worst,
            0.0,
            tol::CIRCUIT_ACTION,
        ));
    } else {
        eprintln!(
            "warning: action check skipped ({n_system} system qubits > {PLAIN_DENSE_CAP})"
        );
    }

    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "[{}] {}: {} (slack {:.3e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.statement,
            c.slack
        );
    }
    eprintln!(
        "circuit: system={} ancillas={} gates={} depth={} walk={:?}",
        circuit.n_system(),
        circuit.n_ancilla(),
        circuit.gates().len(),
        circuit.tree_depth(),
        term.vertices
    );
    if pass {
        Ok(0)
    } else {
        let failing: Vec<String> =
            checks.iter().filter(|c| !c.pass).map(|c| c.id.clone()).collect();
        eprintln!("failing checks: {}", failing.join(", "));
        Ok(1)
    }
}

// ─── corpus ─────────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus seed; identical seeds regenerate byte-identical JSON.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write one Hamiltonian JSON file per item into this directory
    /// instead of a single array on stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Output file for the single-document form (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(serde::Serialize)]
struct CorpusEntry {
    name: String,
    hamiltonian: HamiltonianSchema,
}

pub fn cmd_corpus(args: &CorpusArgs) -> Result<i32, Failure> {
    let items = generate_corpus(args.seed);
    let entries: Vec<CorpusEntry> = items
        .iter()
        .map(|item| CorpusEntry {
            name: item.name.clone(),
            hamiltonian: item.ham.to_schema(),
        })
        .collect();

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
        for (i, entry) in entries.iter().enumerate() {
            let path = dir.join(format!("{i:02}-{}.json", entry.name));
            emit_payload(&to_json(&entry.hamiltonian), Some(&path))?;
        }
        eprintln!("wrote {} items to {}", entries.len(), dir.display());
    } else {
        emit_payload(&to_json(&entries), args.out.as_deref())?;
    }

    for (i, item) in items.iter().enumerate() {
        eprintln!(
            "{i:02} {:<26} n={} m={} g={}{}",
            item.name,
            item.ham.n_qubits(),
            item.ham.m(),
            item.ham.g(),
            if item.ham.is_classical() { " classical" } else { "" }
        );
    }
    Ok(0)
}
