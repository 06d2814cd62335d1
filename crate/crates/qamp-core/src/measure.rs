//! Exact measurement statistics for amplified operators.
//!
//! Everything here is computed by *exact* projective branching or exhaustive
//! enumeration — never Monte-Carlo — because the inequalities being checked
//! can have tiny slack and sampling noise would force loose tolerances.
//!
//! The cast of characters, for a base Hamiltonian `H` on `n` qubits and its
//! walk amplification on `2t` registers:
//!
//! * **Violation count** `N_{f,S} = Σ_{j∈S} (Π_{f(j)})_{reg j}` for a walk
//!   `f`: commuting per-register binary measurements; its full outcome law is
//!   produced by sequential projective branching, and
//!   `Pr[N_{f,S} > 0] = 1 − ⟨ψ| ⊗_{j∈S}(I−Π_{f(j)}) |ψ⟩`.
//! * **Threshold split** `Π^{≥α}`: projector onto the direct sum of
//!   eigenspaces of `H` with eigenvalue ≥ α (guarded at the boundary, see
//!   [`tol::SPLIT_GUARD`]).  Measuring `{I−Π^{≥α}, Π^{≥α}}` per register on a
//!   subset gives the *register energy audit*: a diagnostic measurement that
//!   is never part of the operator itself but drives the analysis.
//! * **High-energy event** `U`: audit outcomes `c` with `|c| ≥ 4r`; its
//!   probability averaged over uniform register subsets `S` of size `t` is
//!   `Δ`.
//! * **Weighted count** `X_S`: pick a layer `χ` with probability `w_χ`, a
//!   walk `f` uniformly, measure `N^χ_{f,S}`.  First moment
//!   `E[X_S] = Σ_{j∈S} Tr[H_{reg j} σ]`; second moment bounded by
//!   `(1+C_μ) Σ_j Tr[H_j σ] + ω_min Σ_{i≠j} Tr[H_i ⊗ H_j σ]`.
//! * **Composite variable** `X`: sample `S`, audit `S̄` at threshold α;
//!   output 0 on a high-energy outcome, else measure `X_S` on the
//!   post-measurement state.  The soundness bound follows from the second
//!   moment method applied to `X`.
//!
//! The final lower bound checked by [`verify_soundness`]:
//!
//! ```text
//! λ_min(H^(2t)) ≥ max{ (2αr/t)·(Δ − e^{−2r²/t}),
//!                      t(1−Δ)·λ_min(H) / (1 + C_μ + ω_min(1 + 8r + αt + 2t e^{−8r²/t})) }
//! ```
//!
//! Two exhaustive tail bounds support it: the subset-split tail for arbitrary
//! binary joint laws ([`check_split_tail`]) and its specialisation to the
//! audit outcomes ([`check_energy_split_tail`]).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::amplify::{AmplifiedOperator, Mode};
use crate::error::{Error, Result};
use crate::expander::WalkFamily;
use crate::ham::LayeredHamiltonian;
use crate::linalg::{apply_local, identity, CMat, CVec};
use crate::report::{BoundReport, CheckRecord};
use crate::spectra::StateVector;
use crate::tol;

/// Cap (in base-Hamiltonian qubits) for the dense spectral threshold split.
pub const AUX_SPLIT_QUBIT_CAP: usize = 6;

/// Cap on per-layer walk counts for exhaustive enumeration.
pub const WALK_ENUM_CAP: u64 = 1 << 22;

// ---------------------------------------------------------------------------
// Spectral threshold split of the base Hamiltonian
// ---------------------------------------------------------------------------

/// The binary spectral split `{I − Π^{≥α}, Π^{≥α}}` of the base Hamiltonian
/// on a single register.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    alpha: f64,
    /// Projector (on `n` base qubits) onto eigenvalues ≥ α − guard.
    high: CMat,
    /// Complementary projector.
    low: CMat,
    /// Eigenvalues within [`tol::SPLIT_WARN`] of the threshold: the split is
    /// well-defined (the guard decides) but numerically delicate.
    boundary_eigenvalues: Vec<f64>,
}

impl SpectralSplit {
    /// Diagonalise the base Hamiltonian densely and split its spectrum at α.
    ///
    /// Eigenvalues λ ≥ α − [`tol::SPLIT_GUARD`] count as high; eigenvalues
    /// within [`tol::SPLIT_WARN`] of α are recorded as boundary warnings.
    pub fn build(h: &LayeredHamiltonian, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if h.n_qubits() > AUX_SPLIT_QUBIT_CAP {
            return Err(Error::DenseTooLarge {
                qubits: h.n_qubits(),
                cap: AUX_SPLIT_QUBIT_CAP,
            });
        }
        let dense = h.dense()?;
        let (values, vectors) = crate::spectra::eigh(&dense)?;
        let dim = dense.nrows();
        let mut high = CMat::zeros(dim, dim);
        let mut boundary = Vec::new();
        for (idx, &lam) in values.iter().enumerate() {
            if (lam - alpha).abs() < tol::SPLIT_WARN {
                boundary.push(lam);
            }
            if lam >= alpha - tol::SPLIT_GUARD {
                let v = vectors.column(idx);
                high += v * v.adjoint();
            }
        }
        let low = identity(dim) - &high;
        Ok(Self {
            alpha,
            high,
            low,
            boundary_eigenvalues: boundary,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Projector onto the ≥ α eigenspaces (single register).
    pub fn high(&self) -> &CMat {
        &self.high
    }

    /// Projector onto the < α eigenspaces (single register).
    pub fn low(&self) -> &CMat {
        &self.low
    }

    /// Eigenvalues dangerously close to the threshold.
    pub fn boundary_eigenvalues(&self) -> &[f64] {
        &self.boundary_eigenvalues
    }
}

// ---------------------------------------------------------------------------
// Small shared helpers
// ---------------------------------------------------------------------------

/// Support of a base-register operator shifted onto register `reg` of a
/// multi-register state (register 0 owns the most significant qubits).
fn shifted(support: &[usize], reg: usize, n: usize) -> Vec<usize> {
    support.iter().map(|&q| q + reg * n).collect()
}

/// Real part of ⟨a, b⟩ with a guard on the imaginary residual, which must
/// vanish for expectations of commuting Hermitian observables.
fn real_inner(a: &CVec, b: &CVec) -> f64 {
    let z = a.dotc(b);
    debug_assert!(
        z.im.abs() <= tol::IMAG_RESIDUAL * (1.0 + z.re.abs()),
        "imaginary residual {} on a real expectation",
        z.im
    );
    z.re
}

/// Apply the full base Hamiltonian on one register of a multi-register state.
fn apply_base_on_register(
    h: &LayeredHamiltonian,
    reg: usize,
    total_qubits: usize,
    psi: &CVec,
) -> CVec {
    let n = h.n_qubits();
    let mut out = CVec::zeros(psi.len());
    for (chi, layer) in h.layers().iter().enumerate() {
        let scale = crate::linalg::c64(h.weights()[chi] / layer.len() as f64, 0.0);
        for &tid in layer {
            let term = &h.terms()[tid];
            out += apply_local(
                term.matrix(),
                &shifted(term.support(), reg, n),
                total_qubits,
                psi,
            ) * scale;
        }
    }
    out
}

/// All subsets of `{0..universe}` of the given size, as sorted index lists,
/// in lexicographic order (deterministic).
fn subsets_of_size(universe: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << universe) {
        if mask.count_ones() as usize == size {
            out.push((0..universe).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

fn validate_registers(amp: &AmplifiedOperator, state: &StateVector) -> Result<()> {
    if state.n_qubits() != amp.n_total() {
        return Err(Error::InvalidParameter(format!(
            "state has {} qubits but the amplified operator acts on {}",
            state.n_qubits(),
            amp.n_total()
        )));
    }
    if amp.mode() != Mode::Walks {
        return Err(Error::InvalidParameter(format!(
            "walk measurement statistics need mode 'walks', got '{}'",
            amp.mode().name()
        )));
    }
    Ok(())
}

fn validate_subset(s: &[usize], registers: usize) -> Result<()> {
    for w in s.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidParameter(
                "register subset must be strictly increasing".into(),
            ));
        }
    }
    if let Some(&last) = s.last() {
        if last >= registers {
            return Err(Error::InvalidParameter(format!(
                "register index {last} out of range for {registers} registers"
            )));
        }
    }
    Ok(())
}

/// Per-layer clause data prepared for walk enumeration on a multi-register
/// state: applied projector vectors and complement matrices.
struct LayerTables {
    /// `applied[j_idx][u]` = Π_u on register `s[j_idx]` applied to ψ.
    applied: Vec<Vec<CVec>>,
    /// Single expectations `Re⟨ψ, applied⟩`.
    single: Vec<Vec<f64>>,
    /// Complement matrices `I − Π_u` (indexed by local clause id).
    complements: Vec<CMat>,
    /// Clause supports (base-register indices, local clause id).
    supports: Vec<Vec<usize>>,
    /// Map from graph vertex to local clause id.
    vertex_clause: Vec<usize>,
}

fn layer_tables(
    amp: &AmplifiedOperator,
    chi: usize,
    s: &[usize],
    psi: &CVec,
) -> LayerTables {
    let base = amp.base();
    let n = base.n_qubits();
    let total = amp.n_total();
    let tids = &base.layers()[chi];
    let graph = amp.layer_walks()[chi].graph();
    let vertex_clause: Vec<usize> = (0..graph.m())
        .map(|v| {
            let tid = amp.term_of_vertex(chi, v);
            tids.iter().position(|&t| t == tid).expect("clause in layer")
        })
        .collect();
    let mut applied = Vec::with_capacity(s.len());
    let mut single = Vec::with_capacity(s.len());
    for &reg in s {
        let mut row_a = Vec::with_capacity(tids.len());
        let mut row_e = Vec::with_capacity(tids.len());
        for &tid in tids {
            let term = &base.terms()[tid];
            let v = apply_local(term.matrix(), &shifted(term.support(), reg, n), total, psi);
            row_e.push(real_inner(psi, &v));
            row_a.push(v);
        }
        applied.push(row_a);
        single.push(row_e);
    }
    let complements = tids
        .iter()
        .map(|&tid| {
            let m = base.terms()[tid].matrix();
            identity(m.nrows()) - m
        })
        .collect();
    let supports = tids
        .iter()
        .map(|&tid| base.terms()[tid].support().to_vec())
        .collect();
    LayerTables {
        applied,
        single,
        complements,
        supports,
        vertex_clause,
    }
}

fn walk_family_checked<'a>(
    amp: &'a AmplifiedOperator,
    chi: usize,
) -> Result<WalkFamily<'a>> {
    let graph = amp.layer_walks()[chi].graph();
    let walks = WalkFamily::new(graph, amp.registers())?;
    if walks.count() > WALK_ENUM_CAP {
        return Err(Error::WalkCountOverflow {
            m: graph.m(),
            d: graph.d(),
            exp: amp.registers() - 1,
        });
    }
    Ok(walks)
}

// ---------------------------------------------------------------------------
// Violation-count distributions
// ---------------------------------------------------------------------------

/// Exact outcome law of the violation count `N^χ_{f,S}` on `state`, for the
/// walk with index `walk_index` in layer `chi`, restricted to registers `s`.
///
/// Outcome `k` is the number of registers `j ∈ s` whose clause `Π_{f(j)}`
/// fires; the law is computed by sequential projective branching over the
/// commuting per-register measurements.
pub fn violation_distribution(
    amp: &AmplifiedOperator,
    state: &StateVector,
    chi: usize,
    walk_index: u64,
    s: &[usize],
) -> Result<Vec<f64>> {
    validate_registers(amp, state)?;
    validate_subset(s, amp.registers())?;
    let walks = walk_family_checked(amp, chi)?;
    let vertices = walks.walk(walk_index);
    let base = amp.base();
    let n = base.n_qubits();
    let total = amp.n_total();

    // Sequential branching: (count, residual vector).
    let mut branches: Vec<(usize, CVec)> = vec![(0, state.amps().clone())];
    for &reg in s {
        let tid = amp.term_of_vertex(chi, vertices[reg]);
        let term = &base.terms()[tid];
        let sup = shifted(term.support(), reg, n);
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (count, v) in branches {
            let fired = apply_local(term.matrix(), &sup, total, &v);
            let quiet = &v - &fired;
            next.push((count + 1, fired));
            next.push((count, quiet));
        }
        branches = next;
    }
    let mut probs = vec![0.0; s.len() + 1];
    for (count, v) in branches {
        probs[count] += v.norm_squared();
    }
    let total_p: f64 = probs.iter().sum();
    assert!(
        (total_p - 1.0).abs() <= tol::DISTRIBUTION_SUM,
        "violation law sums to {total_p}, not 1"
    );
    Ok(probs)
}

/// Mean of an outcome law over `{0, 1, …}`.
pub fn law_mean(law: &[f64]) -> f64 {
    law.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
}

/// `Pr[outcome > 0]` of an outcome law.
pub fn law_positive(law: &[f64]) -> f64 {
    law.iter().skip(1).sum()
}

/// Restricting the counted registers can only discard violations: checks
/// `E[N_f] ≥ E[N_{f,S}]` and `Pr[N_f > 0] ≥ Pr[N_{f,S} > 0]`.
pub fn check_monotone(
    amp: &AmplifiedOperator,
    state: &StateVector,
    chi: usize,
    walk_index: u64,
    s: &[usize],
) -> Result<BoundReport> {
    let full: Vec<usize> = (0..amp.registers()).collect();
    let law_full = violation_distribution(amp, state, chi, walk_index, &full)?;
    let law_s = violation_distribution(amp, state, chi, walk_index, s)?;
    let mut report = BoundReport::new();
    report.push(CheckRecord::le(
        "violation-mean-monotone",
        "restricting the register subset cannot raise the expected violation count",
        law_mean(&law_s),
        law_mean(&law_full),
        tol::MONOTONE,
    ));
    report.push(CheckRecord::le(
        "violation-positive-monotone",
        "restricting the register subset cannot raise the violation probability",
        law_positive(&law_s),
        law_positive(&law_full),
        tol::MONOTONE,
    ));
    Ok(report)
}

/// Per-layer energy identity: the expectation of the amplified layer operator
/// equals the walk-average of the violation probability,
/// `⟨ψ|H^(2t)_χ|ψ⟩ = E_f Pr_ψ[N^χ_f > 0]`, with the left side computed by
/// the transfer-matrix apply and the right side by exhaustive walk streaming.
pub fn check_layer_energy_identity(
    amp: &AmplifiedOperator,
    state: &StateVector,
) -> Result<BoundReport> {
    validate_registers(amp, state)?;
    let psi = state.amps();
    let total = amp.n_total();
    let n = amp.base().n_qubits();
    let full: Vec<usize> = (0..amp.registers()).collect();
    let mut report = BoundReport::new();
    for chi in 0..amp.base().g() {
        let lhs = amp.layer_expectation(chi, psi)?;
        let walks = walk_family_checked(amp, chi)?;
        let tables = layer_tables(amp, chi, &full, psi);
        let mut acc = 0.0;
        for vertices in walks.iter() {
            let mut cur = psi.clone();
            for (reg, &v) in vertices.iter().enumerate() {
                let u = tables.vertex_clause[v];
                cur = apply_local(
                    &tables.complements[u],
                    &shifted(&tables.supports[u], reg, n),
                    total,
                    &cur,
                );
            }
            acc += 1.0 - cur.norm_squared();
        }
        let rhs = acc / walks.count() as f64;
        report.push(CheckRecord::eq(
            &format!("layer-energy-identity-{chi}"),
            "amplified layer expectation equals the walk-averaged violation probability",
            lhs,
            rhs,
            tol::MOMENT_IDENTITY,
        ));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Register energy audit (threshold measurement)
// ---------------------------------------------------------------------------

/// One outcome of the register energy audit: bits for the measured registers
/// (ascending order), its probability, and the renormalised post-measurement
/// state.  Branches below [`tol::BRANCH_PRUNE`] are recorded with `pruned =
/// true` and no post state.
#[derive(Debug, Clone)]
pub struct AuxOutcome {
    pub bits: Vec<u8>,
    pub probability: f64,
    pub post: Option<StateVector>,
    pub pruned: bool,
}

impl AuxOutcome {
    /// Number of high-energy registers in this outcome.
    pub fn weight(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }
}

/// Raw audit branching on the complement of `s`: all `2^{|S̄|}` outcome
/// branches with *unnormalised* post vectors (norm² = probability).
fn audit_branches(
    h: &LayeredHamiltonian,
    split: &SpectralSplit,
    state: &StateVector,
    registers: usize,
    s: &[usize],
) -> Result<Vec<(Vec<u8>, CVec)>> {
    let n = h.n_qubits();
    if state.n_qubits() != registers * n {
        return Err(Error::InvalidParameter(format!(
            "state has {} qubits, expected {} registers × {} qubits",
            state.n_qubits(),
            registers,
            n
        )));
    }
    validate_subset(s, registers)?;
    let sbar: Vec<usize> = (0..registers).filter(|r| !s.contains(r)).collect();
    let base_support: Vec<usize> = (0..n).collect();
    let mut branches: Vec<(Vec<u8>, CVec)> = vec![(Vec::new(), state.amps().clone())];
    for &reg in &sbar {
        let sup = shifted(&base_support, reg, n);
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (bits, v) in branches {
            let hi = apply_local(split.high(), &sup, state.n_qubits(), &v);
            let lo = &v - &hi;
            let mut b0 = bits.clone();
            b0.push(0);
            let mut b1 = bits;
            b1.push(1);
            next.push((b0, lo));
            next.push((b1, hi));
        }
        branches = next;
    }
    Ok(branches)
}

/// The register energy audit: measure `{I − Π^{≥α}, Π^{≥α}}` of the base
/// Hamiltonian on every register *not* in `s` and return all outcome
/// branches.  Bits follow the measured registers in ascending order.
pub fn aux_measure(
    h: &LayeredHamiltonian,
    state: &StateVector,
    registers: usize,
    s: &[usize],
    alpha: f64,
) -> Result<Vec<AuxOutcome>> {
    let split = SpectralSplit::build(h, alpha)?;
    let branches = audit_branches(h, &split, state, registers, s)?;
    let mut outcomes = Vec::with_capacity(branches.len());
    let mut total = 0.0;
    for (bits, v) in branches {
        let p = v.norm_squared();
        total += p;
        if p < tol::BRANCH_PRUNE {
            outcomes.push(AuxOutcome {
                bits,
                probability: p,
                post: None,
                pruned: true,
            });
        } else {
            outcomes.push(AuxOutcome {
                bits,
                probability: p,
                post: Some(StateVector::normalised(state.n_qubits(), v)),
                pruned: false,
            });
        }
    }
    assert!(
        (total - 1.0).abs() <= tol::DISTRIBUTION_SUM,
        "audit outcome law sums to {total}, not 1"
    );
    Ok(outcomes)
}

// ---------------------------------------------------------------------------
// Exhaustive split-tail bounds
// ---------------------------------------------------------------------------

/// A joint law of binary variables `Z_0..Z_{v−1}`, stored as probabilities
/// indexed by bitmask (bit `i` of the index is the value of `Z_i`).
#[derive(Debug, Clone)]
pub struct JointLaw {
    n_vars: usize,
    probs: Vec<f64>,
}

impl JointLaw {
    /// Validated construction from explicit outcome probabilities.
    pub fn from_probs(n_vars: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << n_vars {
            return Err(Error::InvalidParameter(format!(
                "law over {n_vars} variables needs {} outcomes, got {}",
                1usize << n_vars,
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < -tol::DISTRIBUTION_SUM) {
            return Err(Error::InvalidParameter(
                "negative probability in joint law".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol::DISTRIBUTION_SUM {
            return Err(Error::InvalidParameter(format!(
                "joint law sums to {total}, not 1"
            )));
        }
        Ok(Self { n_vars, probs })
    }

    /// Independent Bernoulli(`p`) variables.
    pub fn iid_bernoulli(n_vars: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "Bernoulli parameter must lie in [0,1], got {p}"
            )));
        }
        let probs = (0u64..1 << n_vars)
            .map(|mask| {
                let w = mask.count_ones() as i32;
                p.powi(w) * (1.0 - p).powi(n_vars as i32 - w)
            })
            .collect();
        Self::from_probs(n_vars, probs)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Exact `E_S Pr[Σ_{i∈S} Z_i ≤ low_max ∧ Σ_{i∉S} Z_i ≥ high_min]` over
    /// uniformly random subsets `S` of size `k`.
    pub fn split_tail(&self, k: usize, low_max: f64, high_min: f64) -> f64 {
        let subsets = subsets_of_size(self.n_vars, k);
        let mut acc = 0.0;
        for s in &subsets {
            let mask: u64 = s.iter().map(|&i| 1u64 << i).sum();
            for (z, &p) in self.probs.iter().enumerate() {
                let inside = (z as u64 & mask).count_ones() as f64;
                let outside = (z as u64 & !mask).count_ones() as f64;
                if inside <= low_max && outside >= high_min {
                    acc += p;
                }
            }
        }
        acc / subsets.len() as f64
    }
}

/// Sampling-without-replacement tail for an arbitrary binary joint law on
/// `n + k` variables: over a uniform `k`-subset `S`,
///
/// ```text
/// E_S Pr[Σ_{i∈S} Z_i ≤ kδ ∧ Σ_{i∉S} Z_i ≥ n(δ+ν)] ≤ exp(−2ν²nk² / ((n+k)(k+1)))
/// ```
///
/// with the left side enumerated exactly (all subsets × all outcomes).
pub fn check_split_tail(law: &JointLaw, k: usize, delta: f64, nu: f64) -> Result<CheckRecord> {
    if law.n_vars() > 16 {
        return Err(Error::InvalidParameter(format!(
            "{} variables exceed the exhaustive-enumeration cap of 16",
            law.n_vars()
        )));
    }
    if k == 0 || k >= law.n_vars() {
        return Err(Error::InvalidParameter(format!(
            "subset size {k} must satisfy 0 < k < {}",
            law.n_vars()
        )));
    }
    let n = law.n_vars() - k;
    let lhs = law.split_tail(k, k as f64 * delta, n as f64 * (delta + nu));
    let rhs =
        (-2.0 * nu * nu * n as f64 * (k * k) as f64 / ((n + k) as f64 * (k + 1) as f64)).exp();
    Ok(CheckRecord::le(
        "subset-split-tail",
        "a uniformly split sample cannot often look light inside and heavy outside",
        lhs,
        rhs,
        1e-12,
    ))
}

/// The audit specialisation of the split tail: with `C_j` the audit outcome
/// of register `j` on `state`, checks `E_{|S|=t} Pr[Σ_{j∈S} C_j < 2r ∧
/// Σ_{i∈S̄} C_i ≥ 4r] ≤ e^{−2r²/t}` by enumerating the joint audit law on
/// all `2t` registers and all `C(2t,t)` subsets.
pub fn check_energy_split_tail(
    h: &LayeredHamiltonian,
    state: &StateVector,
    alpha: f64,
    r: usize,
) -> Result<CheckRecord> {
    let n = h.n_qubits();
    let registers = state.n_qubits() / n;
    if registers * n != state.n_qubits() || registers % 2 != 0 || registers == 0 {
        return Err(Error::InvalidParameter(format!(
            "state on {} qubits does not split into an even number of {n}-qubit registers",
            state.n_qubits()
        )));
    }
    let t = registers / 2;
    if t > 6 {
        return Err(Error::InvalidParameter(format!(
            "t = {t} exceeds the subset-enumeration cap of 6"
        )));
    }
    if !(1..=t).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "r = {r} must lie in 1..={t}"
        )));
    }
    let split = SpectralSplit::build(h, alpha)?;
    // Joint audit law over all registers (they commute).
    let branches = audit_branches(h, &split, state, registers, &[])?;
    let mut probs = vec![0.0; 1 << registers];
    for (bits, v) in branches {
        let mask: usize = bits
            .iter()
            .enumerate()
            .map(|(j, &b)| (b as usize) << j)
            .sum();
        probs[mask] += v.norm_squared();
    }
    let law = JointLaw::from_probs(registers, probs)?;
    let lhs = law.split_tail(t, 2.0 * r as f64 - 1.0, 4.0 * r as f64);
    let rhs = (-2.0 * (r * r) as f64 / t as f64).exp();
    Ok(CheckRecord::le(
        "energy-split-tail",
        "registers sampled into S rarely audit low when the complement audits high",
        lhs,
        rhs,
        tol::INEQUALITY,
    ))
}

// ---------------------------------------------------------------------------
// Moments of the composite violation variable X
// ---------------------------------------------------------------------------

/// Exact moments of the composite variable `X` (audit then weighted count)
/// together with the per-branch first-moment identity checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    pub e_x: f64,
    pub e_x2: f64,
    pub pr_x_pos: f64,
    /// Probability of a high-energy audit outcome, `E_S Pr[|c| ≥ 4r]`.
    pub delta: f64,
    pub checks: BoundReport,
}

/// Accumulators shared by the moment computations; all quantities are exact
/// sums over subsets × audit branches × walks.
struct MomentAccumulator {
    e_x: f64,
    e_x2: f64,
    pr_x_pos: f64,
    delta: f64,
    /// `E_S Σ_{c∈Ū} Pr[c] Σ_{i≠j∈S} Tr[H_i ⊗ H_j ψ_c]` — the pair-energy
    /// cross term conditioned on low-energy audits.
    cross_pairs: f64,
    identity_checks: BoundReport,
}

fn accumulate_moments(
    amp: &AmplifiedOperator,
    state: &StateVector,
    alpha: f64,
    r: usize,
) -> Result<MomentAccumulator> {
    validate_registers(amp, state)?;
    let base = amp.base();
    let registers = amp.registers();
    let t = amp.t();
    if !(1..=t).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "r = {r} must lie in 1..={t}"
        )));
    }
    let split = SpectralSplit::build(base, alpha)?;
    let subsets = subsets_of_size(registers, t);
    let subset_weight = 1.0 / subsets.len() as f64;
    let total_qubits = amp.n_total();

    let mut acc = MomentAccumulator {
        e_x: 0.0,
        e_x2: 0.0,
        pr_x_pos: 0.0,
        delta: 0.0,
        cross_pairs: 0.0,
        identity_checks: BoundReport::new(),
    };

    for s in &subsets {
        let branches = audit_branches(base, &split, state, registers, s)?;
        for (bits, v) in branches {
            let p = v.norm_squared();
            let weight: usize = bits.iter().map(|&b| b as usize).sum();
            if weight >= 4 * r {
                acc.delta += subset_weight * p;
                continue;
            }
            if p < tol::BRANCH_PRUNE {
                // Negligible low-energy branch: its moment contribution is
                // bounded by p·t² ≪ every tolerance in use.
                continue;
            }
            // All expectations below use the unnormalised branch vector, so
            // each contribution arrives already weighted by Pr[c].
            let mut singles_stream = 0.0;
            let mut pairs_stream = 0.0;
            let mut positive_stream = 0.0;
            for chi in 0..base.g() {
                let w_chi = base.weights()[chi];
                let walks = walk_family_checked(amp, chi)?;
                let tables = layer_tables(amp, chi, s, &v);
                let count = walks.count() as f64;
                let n = base.n_qubits();
                let mut layer_singles = 0.0;
                let mut layer_pairs = 0.0;
                let mut layer_pos = 0.0;
                for vertices in walks.iter() {
                    let clause: Vec<usize> = s
                        .iter()
                        .map(|&reg| tables.vertex_clause[vertices[reg]])
                        .collect();
                    for (ji, &u) in clause.iter().enumerate() {
                        layer_singles += tables.single[ji][u];
                        for (jj, &w) in clause.iter().enumerate() {
                            if ji != jj {
                                layer_pairs +=
                                    real_inner(&tables.applied[ji][u], &tables.applied[jj][w]);
                            }
                        }
                    }
                    let mut cur = v.clone();
                    for (ji, &reg) in s.iter().enumerate() {
                        let u = clause[ji];
                        cur = apply_local(
                            &tables.complements[u],
                            &shifted(&tables.supports[u], reg, n),
                            total_qubits,
                            &cur,
                        );
                    }
                    layer_pos += p - cur.norm_squared();
                }
                singles_stream += w_chi * layer_singles / count;
                pairs_stream += w_chi * layer_pairs / count;
                positive_stream += w_chi * layer_pos / count;
            }
            // First-moment identity on this branch: the walk-streamed single
            // sum must equal Σ_{j∈S} Tr[H_{reg j} ψ_c] (both unnormalised).
            let mut base_singles = 0.0;
            let mut cross = 0.0;
            let applied_h: Vec<CVec> = s
                .iter()
                .map(|&reg| apply_base_on_register(base, reg, total_qubits, &v))
                .collect();
            for (ji, hv) in applied_h.iter().enumerate() {
                base_singles += real_inner(&v, hv);
                for (jj, hw) in applied_h.iter().enumerate() {
                    if ji != jj {
                        cross += real_inner(hv, hw);
                    }
                }
            }
            acc.identity_checks.push(CheckRecord::eq(
                &format!(
                    "first-moment-identity-S{:?}-c{}",
                    s,
                    bits.iter().map(|b| b.to_string()).collect::<String>()
                ),
                "walk-averaged single-clause expectations equal the per-register energies",
                singles_stream,
                base_singles,
                tol::MOMENT_IDENTITY,
            ));
            acc.e_x += subset_weight * singles_stream;
            acc.e_x2 += subset_weight * (singles_stream + pairs_stream);
            acc.pr_x_pos += subset_weight * positive_stream;
            acc.cross_pairs += subset_weight * cross;
        }
    }
    Ok(acc)
}

/// Exact `E[X]`, `E[X²]`, `Pr[X > 0]` and `Δ` for the composite variable at
/// audit threshold `alpha` and high-energy cutoff `4r`, with per-branch
/// first-moment identity checks and the second-moment-method consistency
/// check included in the report.
pub fn moments_x(
    amp: &AmplifiedOperator,
    state: &StateVector,
    alpha: f64,
    r: usize,
) -> Result<MomentReport> {
    let acc = accumulate_moments(amp, state, alpha, r)?;
    let mut checks = acc.identity_checks;
    // Second moment method: Pr[X>0] ≥ E[X]²/E[X²] (0/0 counts as 0).
    let ratio = if acc.e_x2 > 0.0 {
        acc.e_x * acc.e_x / acc.e_x2
    } else {
        0.0
    };
    checks.push(CheckRecord::le(
        "second-moment-method",
        "Pr[X>0] dominates E[X]²/E[X²] for the nonnegative variable X",
        ratio,
        acc.pr_x_pos,
        tol::INEQUALITY,
    ));
    Ok(MomentReport {
        e_x: acc.e_x,
        e_x2: acc.e_x2,
        pr_x_pos: acc.pr_x_pos,
        delta: acc.delta,
        checks,
    })
}

/// Full outcome law of the composite variable `X` over `{0, …, t}`: the
/// mixture of violation-count laws over subsets, low-energy audit branches,
/// layers and walks, with all high-energy branches contributing mass at 0.
pub fn x_distribution(
    amp: &AmplifiedOperator,
    state: &StateVector,
    alpha: f64,
    r: usize,
) -> Result<Vec<f64>> {
    validate_registers(amp, state)?;
    let base = amp.base();
    let registers = amp.registers();
    let t = amp.t();
    let split = SpectralSplit::build(base, alpha)?;
    let subsets = subsets_of_size(registers, t);
    let subset_weight = 1.0 / subsets.len() as f64;
    let total_qubits = amp.n_total();
    let n = base.n_qubits();

    let mut law = vec![0.0; t + 1];
    for s in &subsets {
        let branches = audit_branches(base, &split, state, registers, s)?;
        for (bits, v) in branches {
            let p = v.norm_squared();
            let weight: usize = bits.iter().map(|&b| b as usize).sum();
            if weight >= 4 * r || p < tol::BRANCH_PRUNE {
                // High-energy outcomes output 0 by definition; pruned mass
                // (≤ 2^t·BRANCH_PRUNE) is also banked at 0.
                law[0] += subset_weight * p;
                continue;
            }
            for chi in 0..base.g() {
                let w_chi = base.weights()[chi];
                let walks = walk_family_checked(amp, chi)?;
                let tables = layer_tables(amp, chi, s, &v);
                let per_walk = subset_weight * w_chi / walks.count() as f64;
                for vertices in walks.iter() {
                    let mut sub: Vec<(usize, CVec)> = vec![(0, v.clone())];
                    for (ji, &reg) in s.iter().enumerate() {
                        let u = tables.vertex_clause[vertices[reg]];
                        let sup = shifted(&tables.supports[u], reg, n);
                        let mut next = Vec::with_capacity(sub.len() * 2);
                        for (count, w) in sub {
                            let fired = &w
                                - &apply_local(&tables.complements[u], &sup, total_qubits, &w);
                            let quiet = &w - &fired;
                            next.push((count + 1, fired));
                            next.push((count, quiet));
                        }
                        sub = next;
                        let _ = ji;
                    }
                    for (count, w) in sub {
                        law[count] += per_walk * w.norm_squared();
                    }
                }
            }
        }
    }
    let total: f64 = law.iter().sum();
    assert!(
        (total - 1.0).abs() <= tol::DISTRIBUTION_SUM,
        "composite law sums to {total}, not 1"
    );
    Ok(law)
}

/// Markov-inequality spot check on an outcome law: for each factor `a > 1`,
/// `Pr[X > a·E[X]] ≤ 1/a`.
pub fn check_markov(law: &[f64], factors: &[f64]) -> BoundReport {
    let mean = law_mean(law);
    let mut report = BoundReport::new();
    for &a in factors {
        let threshold = a * mean;
        let lhs: f64 = law
            .iter()
            .enumerate()
            .filter(|&(k, _)| k as f64 > threshold)
            .map(|(_, &p)| p)
            .sum();
        report.push(CheckRecord::le(
            &format!("markov-a{a}"),
            "tail mass beyond a·mean is at most 1/a",
            lhs,
            1.0 / a,
            tol::INEQUALITY,
        ));
    }
    report
}

// ---------------------------------------------------------------------------
// Second-moment bound (walk correlations) and the pair-energy cross bound
// ---------------------------------------------------------------------------

/// Second-moment bound for the weighted count `X_S` against walk
/// correlations: for every subset `S` of size `t`,
///
/// ```text
/// E[X_S²] ≤ (1+C_μ)·Σ_{j∈S} Tr[H_{reg j}σ] + ω_min·Σ_{i≠j∈S} Tr[H_{reg i}⊗H_{reg j}σ]
/// ```
///
/// with `C_μ = max_i Σ_{j≠i} μ^{|i−j|}` over the `2t` walk positions; when
/// every layer graph has `μ < 1`, the report also records `C_μ ≤ 2/(1−μ)`.
pub fn check_second_moment_walks(
    amp: &AmplifiedOperator,
    state: &StateVector,
) -> Result<BoundReport> {
    validate_registers(amp, state)?;
    let base = amp.base();
    let registers = amp.registers();
    let t = amp.t();
    let total_qubits = amp.n_total();
    let psi = state.amps();
    let mut report = BoundReport::new();

    let mu = amp.mu_max();
    let c_mu = amp.c_mu();
    if mu < 1.0 {
        report.push(CheckRecord::le(
            "walk-correlation-constant",
            "the positional correlation constant is at most 2/(1−μ)",
            c_mu,
            2.0 / (1.0 - mu),
            tol::INEQUALITY,
        ));
    }

    for s in &subsets_of_size(registers, t) {
        // Exact E[X_S²] by exhaustive walk streaming.
        let mut e_x2 = 0.0;
        for chi in 0..base.g() {
            let w_chi = base.weights()[chi];
            let walks = walk_family_checked(amp, chi)?;
            let tables = layer_tables(amp, chi, s, psi);
            let mut layer_acc = 0.0;
            for vertices in walks.iter() {
                let clause: Vec<usize> = s
                    .iter()
                    .map(|&reg| tables.vertex_clause[vertices[reg]])
                    .collect();
                for (ji, &u) in clause.iter().enumerate() {
                    layer_acc += tables.single[ji][u];
                    for (jj, &w) in clause.iter().enumerate() {
                        if ji != jj {
                            layer_acc +=
                                real_inner(&tables.applied[ji][u], &tables.applied[jj][w]);
                        }
                    }
                }
            }
            e_x2 += w_chi * layer_acc / walks.count() as f64;
        }
        // Bound side.
        let applied_h: Vec<CVec> = s
            .iter()
            .map(|&reg| apply_base_on_register(base, reg, total_qubits, psi))
            .collect();
        let singles: f64 = applied_h.iter().map(|hv| real_inner(psi, hv)).sum();
        let mut pairs = 0.0;
        for (ji, hv) in applied_h.iter().enumerate() {
            for (jj, hw) in applied_h.iter().enumerate() {
                if ji != jj {
                    pairs += real_inner(hv, hw);
                }
            }
        }
        let rhs = (1.0 + c_mu) * singles + base.omega_min() * pairs;
        report.push(CheckRecord::le(
            &format!("second-moment-S{s:?}"),
            "walk-correlated second moment is controlled by single and pair energies",
            e_x2,
            rhs,
            tol::INEQUALITY,
        ));
    }
    Ok(report)
}

/// Report of the pair-energy cross bound under low-energy conditioning.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecouplingReport {
    /// Whether the balance hypothesis `Tr[H_{reg i}ρ] ≤ E[X]` held for all
    /// registers.
    pub hypothesis_holds: bool,
    /// `"cross-term"` when the hypothesis holds and the cross bound was
    /// checked; `"direct"` when it fails and the direct energy bound applies.
    pub branch: String,
    pub checks: BoundReport,
}

/// The pair-energy cross bound: if every register satisfies the balance
/// hypothesis `Tr[H_{reg i}ρ] ≤ E[X]`, then
///
/// ```text
/// E_S Σ_{c∈Ū} Pr[c] Σ_{i≠j∈S} Tr[H_i⊗H_j ψ_c] ≤ (8r + αt + 2t·e^{−8r²/t})·E[X]
/// ```
///
/// Otherwise the direct bound `Tr[H^(2t)ρ] ≥ t·λ_min(H)·(1−Δ)` applies and is
/// checked instead.
pub fn check_decoupling(
    amp: &AmplifiedOperator,
    state: &StateVector,
    alpha: f64,
    r: usize,
) -> Result<DecouplingReport> {
    let acc = accumulate_moments(amp, state, alpha, r)?;
    let base = amp.base();
    let t = amp.t();
    let total_qubits = amp.n_total();
    let psi = state.amps();

    let max_single = (0..amp.registers())
        .map(|reg| real_inner(psi, &apply_base_on_register(base, reg, total_qubits, psi)))
        .fold(f64::NEG_INFINITY, f64::max);
    let hypothesis_holds = max_single <= acc.e_x + tol::IMAG_RESIDUAL;

    let mut checks = BoundReport::new();
    if hypothesis_holds {
        let factor = 8.0 * r as f64
            + alpha * t as f64
            + 2.0 * t as f64 * (-8.0 * (r * r) as f64 / t as f64).exp();
        checks.push(CheckRecord::le(
            "pair-energy-cross-bound",
            "conditioned pair energies are controlled by the first moment",
            acc.cross_pairs,
            factor * acc.e_x,
            tol::DECOUPLING,
        ));
        Ok(DecouplingReport {
            hypothesis_holds,
            branch: "cross-term".into(),
            checks,
        })
    } else {
        // Direct branch: some register already carries at least the full
        // first moment, so the amplified energy dominates t·λ_min·(1−Δ).
        let amp_energy = real_inner(psi, &amp.apply(psi));
        let base_min = crate::spectra::min_eig_dense(&base.dense()?)?.value;
        checks.push(CheckRecord::le(
            "direct-energy-bound",
            "an energy-heavy register alone certifies the low-energy branch bound",
            t as f64 * base_min * (1.0 - acc.delta),
            amp_energy,
            tol::DECOUPLING,
        ));
        Ok(DecouplingReport {
            hypothesis_holds,
            branch: "direct".into(),
            checks,
        })
    }
}

// ---------------------------------------------------------------------------
// The composite soundness bound
// ---------------------------------------------------------------------------

/// Everything [`verify_soundness`] measured, with the final bound check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub t: usize,
    pub r: usize,
    pub alpha: f64,
    pub delta: f64,
    /// `(2αr/t)·(Δ − e^{−2r²/t})`.
    pub branch_high: f64,
    /// `t(1−Δ)·λ_min(H) / (1 + C_μ + ω_min(1 + 8r + αt + 2t·e^{−8r²/t}))`.
    pub branch_low: f64,
    pub c_mu: f64,
    pub omega_min: f64,
    pub lambda_min_base: f64,
    pub lambda_min_amplified: f64,
    /// SHA-256 of the ground-state representative's amplitudes, so ledgers
    /// tie Δ to the exact state that produced it.
    pub state_hash: String,
    /// Spectral-split boundary warnings (eigenvalues within 1e-9 of α).
    pub warnings: Vec<String>,
    pub check: CheckRecord,
}

/// Canonical SHA-256 of a state's amplitudes (big-endian f64 pairs).
pub fn state_digest(state: &StateVector) -> String {
    let mut hasher = Sha256::new();
    for z in state.amps().iter() {
        hasher.update(z.re.to_be_bytes());
        hasher.update(z.im.to_be_bytes());
    }
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Check the composite lower bound on the amplified ground energy against a
/// ground-state representative:
///
/// `λ_min(H^(2t)) ≥ max{branch_high, branch_low} − tol`, with Δ computed by
/// exact audit enumeration on `ground`.
pub fn verify_soundness(
    amp: &AmplifiedOperator,
    ground: &StateVector,
    lambda_min_base: f64,
    lambda_min_amplified: f64,
    r: usize,
    alpha: f64,
) -> Result<SoundnessReport> {
    validate_registers(amp, ground)?;
    let base = amp.base();
    let t = amp.t();
    if !(1..=t).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "r = {r} must lie in 1..={t}"
        )));
    }
    let split = SpectralSplit::build(base, alpha)?;
    let warnings: Vec<String> = split
        .boundary_eigenvalues()
        .iter()
        .map(|lam| format!("base eigenvalue {lam:.12e} sits within 1e-9 of the threshold {alpha}"))
        .collect();

    // Δ over all subsets of size t.
    let registers = amp.registers();
    let subsets = subsets_of_size(registers, t);
    let mut delta = 0.0;
    for s in &subsets {
        for (bits, v) in audit_branches(base, &split, ground, registers, s)? {
            let weight: usize = bits.iter().map(|&b| b as usize).sum();
            if weight >= 4 * r {
                delta += v.norm_squared() / subsets.len() as f64;
            }
        }
    }

    let c_mu = amp.c_mu();
    let omega_min = base.omega_min();
    let branch_high =
        2.0 * alpha * r as f64 / t as f64 * (delta - (-2.0 * (r * r) as f64 / t as f64).exp());
    let denom = 1.0
        + c_mu
        + omega_min
            * (1.0
                + 8.0 * r as f64
                + alpha * t as f64
                + 2.0 * t as f64 * (-8.0 * (r * r) as f64 / t as f64).exp());
    let branch_low = t as f64 * (1.0 - delta) * lambda_min_base / denom;
    let check = CheckRecord::le(
        "soundness-composite",
        "the amplified ground energy dominates both audit-branch lower bounds",
        branch_high.max(branch_low),
        lambda_min_amplified,
        tol::BOUND_CHECK,
    );
    Ok(SoundnessReport {
        t,
        r,
        alpha,
        delta,
        branch_high,
        branch_low,
        c_mu,
        omega_min,
        lambda_min_base,
        lambda_min_amplified,
        state_hash: state_digest(ground),
        warnings,
        check,
    })
}

// ---------------------------------------------------------------------------
// Parameter suggestion
// ---------------------------------------------------------------------------

/// Suggested audit parameters for a given `t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuggestedParams {
    pub r: usize,
    pub alpha: f64,
    /// Set when the asymptotic analysis' hypothesis `t ≥ 10^5` holds.
    pub asymptotic_hypothesis_met: bool,
    pub warning: Option<String>,
}

/// `r = round(√(t·ln t))` clamped to `[1, t]` and `α = r/t`; `t < 2` falls
/// back to `r = 1, α = 1/t` with a warning.
pub fn suggest_params(t: usize) -> SuggestedParams {
    if t < 2 {
        return SuggestedParams {
            r: 1,
            alpha: 1.0 / t.max(1) as f64,
            asymptotic_hypothesis_met: false,
            warning: Some(format!(
                "t = {t} is below 2; defaulting to r = 1, alpha = 1/t"
            )),
        };
    }
    let tf = t as f64;
    let r = ((tf * tf.ln()).sqrt().round() as usize).clamp(1, t);
    SuggestedParams {
        r,
        alpha: r as f64 / tf,
        asymptotic_hypothesis_met: t >= 100_000,
        warning: if t >= 100_000 {
            None
        } else {
            Some("asymptotic floor hypothesis t >= 1e5 not met at desk scale".into())
        },
    }
}

/// The asymptotic floor `min{(1/3)·ln t/t, λ_min·√(t/ln t)/(20·max(1+C_μ, ω_min))}`
/// predicted for `t ≥ 10^5`; at desk scale it is advisory only.
pub fn predicted_floor(t: usize, lambda_min: f64, c_mu: f64, omega_min: f64) -> f64 {
    let tf = t as f64;
    let log_branch = tf.ln() / (3.0 * tf);
    let amp_branch = lambda_min * (tf / tf.ln()).sqrt() / (20.0 * (1.0 + c_mu).max(omega_min));
    log_branch.min(amp_branch)
}

// ---------------------------------------------------------------------------
// Measurement-order invariance
// ---------------------------------------------------------------------------

/// Joint law of (audit outcome on `S̄`, violation count on `S`) computed in
/// both measurement orders; returns the maximum absolute deviation as an
/// equality check.  The two observables commute register-wise, so the joint
/// laws must agree.
pub fn check_order_invariance(
    amp: &AmplifiedOperator,
    state: &StateVector,
    chi: usize,
    walk_index: u64,
    s: &[usize],
    alpha: f64,
) -> Result<CheckRecord> {
    validate_registers(amp, state)?;
    let base = amp.base();
    let registers = amp.registers();
    validate_subset(s, registers)?;
    let split = SpectralSplit::build(base, alpha)?;
    let walks = walk_family_checked(amp, chi)?;
    let vertices = walks.walk(walk_index);
    let n = base.n_qubits();
    let total = amp.n_total();
    let sbar_len = registers - s.len();

    // Violation branching of an unnormalised vector, keyed by count.
    let violation_branch = |v: &CVec| -> Vec<(usize, CVec)> {
        let mut branches: Vec<(usize, CVec)> = vec![(0, v.clone())];
        for &reg in s {
            let tid = amp.term_of_vertex(chi, vertices[reg]);
            let term = &base.terms()[tid];
            let sup = shifted(term.support(), reg, n);
            let mut next = Vec::with_capacity(branches.len() * 2);
            for (count, w) in branches {
                let fired = apply_local(term.matrix(), &sup, total, &w);
                let quiet = &w - &fired;
                next.push((count + 1, fired));
                next.push((count, quiet));
            }
            branches = next;
        }
        branches
    };

    // Order A: audit first, then violations.
    let mut law_a = vec![vec![0.0; s.len() + 1]; 1 << sbar_len];
    for (bits, v) in audit_branches(base, &split, state, registers, s)? {
        let mask: usize = bits
            .iter()
            .enumerate()
            .map(|(j, &b)| (b as usize) << j)
            .sum();
        for (count, w) in violation_branch(&v) {
            law_a[mask][count] += w.norm_squared();
        }
    }

    // Order B: violations first, then audit on each branch.
    let mut law_b = vec![vec![0.0; s.len() + 1]; 1 << sbar_len];
    for (count, w) in violation_branch(state.amps()) {
        if w.norm_squared() < tol::BRANCH_PRUNE * tol::BRANCH_PRUNE {
            continue;
        }
        let carrier = StateVector::normalised(state.n_qubits(), w.clone());
        let scale = w.norm_squared();
        for (bits, u) in audit_branches(base, &split, &carrier, registers, s)? {
            let mask: usize = bits
                .iter()
                .enumerate()
                .map(|(j, &b)| (b as usize) << j)
                .sum();
            law_b[mask][count] += scale * u.norm_squared();
        }
    }

    let mut max_dev: f64 = 0.0;
    for (row_a, row_b) in law_a.iter().zip(&law_b) {
        for (a, b) in row_a.iter().zip(row_b) {
            max_dev = max_dev.max((a - b).abs());
        }
    }
    Ok(CheckRecord::eq(
        "measurement-order-invariance",
        "commuting audit and violation measurements share one joint law",
        max_dev,
        0.0,
        tol::ORDER_INVARIANCE,
    ))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplify::amplify_derandomised;
    use crate::expander::GraphFamily;
    use crate::ham::{proj_one, proj_plus, LayeredHamiltonian, LocalProjector};
    use crate::linalg::{basis_state, c64, random_state};
    use rand::SeedableRng;

    fn rand_state(n_qubits: usize, seed: u64) -> StateVector {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        StateVector::normalised(n_qubits, random_state(1 << n_qubits, &mut rng))
    }

    /// Two-layer single-qubit base: ½|1⟩⟨1| + ½|+⟩⟨+|.
    fn toy_base() -> LayeredHamiltonian {
        LayeredHamiltonian::build(
            1,
            vec![
                LocalProjector::new(vec![0], proj_one()).unwrap(),
                LocalProjector::new(vec![0], proj_plus()).unwrap(),
            ],
            Some(vec![vec![0], vec![1]]),
            None,
        )
        .unwrap()
    }

    fn bell_state() -> StateVector {
        let mut v = CVec::zeros(4);
        v[0] = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[3] = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        StateVector::new(2, v).unwrap()
    }

    /// Single-clause base |1⟩⟨1| used for Bell-state violation laws.
    fn one_clause_base() -> LayeredHamiltonian {
        LayeredHamiltonian::build(
            1,
            vec![LocalProjector::new(vec![0], proj_one()).unwrap()],
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn violation_law_point_masses() {
        let base = one_clause_base();
        let amp = amplify_derandomised(&base, 1, GraphFamily::CompleteLoops).unwrap();
        let s = vec![0, 1];
        let zero = StateVector::new(2, basis_state(4, 0)).unwrap();
        let law = violation_distribution(&amp, &zero, 0, 0, &s).unwrap();
        assert!((law[0] - 1.0).abs() < 1e-15, "law on |00>: {law:?}");
        let ones = StateVector::new(2, basis_state(4, 3)).unwrap();
        let law = violation_distribution(&amp, &ones, 0, 0, &s).unwrap();
        assert!((law[2] - 1.0).abs() < 1e-15, "law on |11>: {law:?}");
    }

    #[test]
    fn violation_law_on_bell_state_is_half_half() {
        // Φ⁺ against (|1⟩⟨1|, |1⟩⟨1|): outcomes 0 and 2, each probability ½.
        let base = one_clause_base();
        let amp = amplify_derandomised(&base, 1, GraphFamily::CompleteLoops).unwrap();
        let law = violation_distribution(&amp, &bell_state(), 0, 0, &[0, 1]).unwrap();
        assert!((law[0] - 0.5).abs() < 1e-14);
        assert!(law[1].abs() < 1e-14);
        assert!((law[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn monotone_under_subset_restriction() {
        let base = toy_base();
        let amp = amplify_derandomised(&base, 1, GraphFamily::CompleteLoops).unwrap();
        let state = rand_state(2, 11);
        for s in [vec![], vec![0], vec![1], vec![0, 1]] {
            let report = check_monotone(&amp, &state, 0, 0, &s).unwrap();
            assert!(report.pass(), "monotonicity failed for S={s:?}");
        }
    }

    #[test]
    fn layer_energy_identity_on_random_state() {
        let base = toy_base();
        for family in [GraphFamily::CompleteLoops, GraphFamily::Complete] {
            let amp = amplify_derandomised(&base, 2, family).unwrap();
            let state = rand_state(4, 5);
            let report = check_layer_energy_identity(&amp, &state).unwrap();
            assert!(report.pass(), "identity failed: {:?}", report.failing());
        }
    }

    #[test]
    fn audit_point_masses_at_extreme_thresholds() {
        let base = one_clause_base(); // H = |1><1|, eigenvalues {0, 1}.
        // α small: |0> per register is strictly below, |1> is high.
        let zero = StateVector::new(2, basis_state(4, 0)).unwrap();
        let outcomes = aux_measure(&base, &zero, 2, &[], 0.5).unwrap();
        let c00 = outcomes
            .iter()
            .find(|o| o.bits == vec![0, 0])
            .expect("00 outcome");
        assert!((c00.probability - 1.0).abs() < 1e-12);
        // α ≤ λ_min over the |1..1> state: every register audits high.
        let ones = StateVector::new(2, basis_state(4, 3)).unwrap();
        let outcomes = aux_measure(&base, &ones, 2, &[], 0.5).unwrap();
        let c11 = outcomes
            .iter()
            .find(|o| o.bits == vec![1, 1])
            .expect("11 outcome");
        assert!((c11.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn audit_plus_state_splits_evenly() {
        // H = |1⟩⟨1|, state (|0⟩+|1⟩)/√2 on the audited register, α = ½:
        // outcomes 0 and 1 each carry probability ½.
        let base = one_clause_base();
        let mut v = CVec::zeros(4);
        v[0] = c64(0.5, 0.0);
        v[1] = c64(0.5, 0.0);
        v[2] = c64(0.5, 0.0);
        v[3] = c64(0.5, 0.0);
        let state = StateVector::new(2, v).unwrap();
        let outcomes = aux_measure(&base, &state, 2, &[0], 0.5).unwrap();
        assert_eq!(outcomes.len(), 2);
        for o in &outcomes {
            assert!(
                (o.probability - 0.5).abs() < 1e-12,
                "outcome {:?} probability {}",
                o.bits,
                o.probability
            );
        }
    }

    #[test]
    fn split_tail_matches_frozen_oracle() {
        // i.i.d. Bernoulli(0.3), n = 6, k = 3, δ = 0.2, ν = 0.3.
        let law = JointLaw::iid_bernoulli(9, 0.3).unwrap();
        let rec = check_split_tail(&law, 3, 0.2, 0.3).unwrap();
        assert!(
            (rec.lhs - 0.087701670000000176).abs() < tol::ORACLE_EQUALITY,
            "lhs {}",
            rec.lhs
        );
        assert!(
            (rec.rhs - 0.76337949433685315).abs() < tol::ORACLE_EQUALITY,
            "rhs {}",
            rec.rhs
        );
        assert!(rec.pass);
    }

    #[test]
    fn split_tail_correlated_pairs_matches_frozen_oracle() {
        // Four fair bits, each duplicated into an adjacent pair.
        let mut probs = vec![0.0; 256];
        for z4 in 0u32..16 {
            let mut z = 0usize;
            for i in 0..4 {
                if z4 >> i & 1 == 1 {
                    z |= 0b11 << (2 * i);
                }
            }
            probs[z] += 1.0 / 16.0;
        }
        let law = JointLaw::from_probs(8, probs).unwrap();
        let lhs = law.split_tail(4, 1.0, 4.0);
        assert!(
            (lhs - 0.0053571428571428572).abs() < tol::ORACLE_EQUALITY,
            "correlated lhs {lhs}"
        );
        assert!(lhs <= (-0.5f64).exp() + 1e-9);
    }

    #[test]
    fn energy_split_tail_on_product_plus_states() {
        // H = |1⟩⟨1|; per-register |+⟩ gives i.i.d. Bernoulli(½) audit
        // outcomes at α = ½; t = 2, r = 1.
        let base = one_clause_base();
        let dim = 16;
        let mut v = CVec::zeros(dim);
        for i in 0..dim {
            v[i] = c64(0.25, 0.0);
        }
        let state = StateVector::new(4, v).unwrap();
        let rec = check_energy_split_tail(&base, &state, 0.5, 1).unwrap();
        // Frozen oracle (iid Bernoulli(½), t=2, r=1): lhs = Σ_S Pr[S-sum < 2 ∧ S̄-sum ≥ 4]/C.
        // With |S̄| = 2, the S̄ event needs ≥ 4 highs among 2 registers: impossible.
        assert_eq!(rec.lhs, 0.0);
        assert!(rec.pass);
    }

    #[test]
    fn moments_match_dense_oracle_on_toy() {
        // t = 1 on the two-layer toy: dense density-matrix oracle for E[X], Δ.
        let base = toy_base();
        let amp = amplify_derandomised(&base, 1, GraphFamily::CompleteLoops).unwrap();
        let state = rand_state(2, 23);
        let alpha = 0.5;
        let r = 1;
        let report = moments_x(&amp, &state, alpha, r).unwrap();
        assert!(report.checks.pass(), "{:?}", report.checks.failing());

        // Dense oracle.
        let rho = state.amps() * state.amps().adjoint();
        let split = SpectralSplit::build(&base, alpha).unwrap();
        let h1 = base.dense().unwrap();
        let mut e_x_oracle = 0.0;
        let mut delta_oracle = 0.0;
        for s_reg in 0..2usize {
            let aux_reg = 1 - s_reg;
            for bit in 0..2usize {
                let proj = if bit == 1 {
                    split.high().clone()
                } else {
                    split.low().clone()
                };
                let proj_emb = crate::linalg::embed_global(
                    &proj,
                    &[aux_reg], // single-qubit registers here
                    2,
                );
                let branch = &proj_emb * &rho * &proj_emb;
                let p = branch.trace().re;
                if bit == 1 && 1 >= 4 * r {
                    delta_oracle += 0.5 * p;
                }
                if !(bit == 1 && 1 >= 4 * r) {
                    let h_emb = crate::linalg::embed_global(&h1, &[s_reg], 2);
                    e_x_oracle += 0.5 * (h_emb * &branch).trace().re;
                }
            }
        }
        assert!(
            (report.e_x - e_x_oracle).abs() < 1e-10,
            "E[X] {} vs oracle {}",
            report.e_x,
            e_x_oracle
        );
        assert!((report.delta - delta_oracle).abs() < 1e-12);
    }

    #[test]
    fn x_law_consistent_with_moments() {
        let base = toy_base();
        let amp = amplify_derandomised(&base, 2, GraphFamily::Complete).unwrap();
        let state = rand_state(4, 31);
        let alpha = 0.4;
        let r = 1;
        let report = moments_x(&amp, &state, alpha, r).unwrap();
        let law = x_distribution(&amp, &state, alpha, r).unwrap();
        assert!((law_mean(&law) - report.e_x).abs() < 1e-9);
        assert!((law_positive(&law) - report.pr_x_pos).abs() < 1e-9);
        let e2_law: f64 = law
            .iter()
            .enumerate()
            .map(|(k, p)| (k * k) as f64 * p)
            .sum();
        assert!((e2_law - report.e_x2).abs() < 1e-9, "{e2_law} vs {}", report.e_x2);
        assert!(check_markov(&law, &[2.0, 4.0]).pass());
    }

    #[test]
    fn second_moment_bound_holds_on_states() {
        let base = toy_base();
        for family in [GraphFamily::CompleteLoops, GraphFamily::Cycle] {
            let amp = amplify_derandomised(&base, 2, family).unwrap();
            for seed in [3, 17] {
                let state = rand_state(4, seed);
                let report = check_second_moment_walks(&amp, &state).unwrap();
                assert!(
                    report.pass(),
                    "second-moment bound failed ({family:?}, seed {seed}): {:?}",
                    report.failing()
                );
            }
        }
    }

    #[test]
    fn decoupling_cross_term_branch_on_product_ground_state() {
        // Product of base ground states: permutation-symmetric, so the
        // balance hypothesis holds and the cross bound is checked.
        let base = toy_base();
        let amp = amplify_derandomised(&base, 2, GraphFamily::CompleteLoops).unwrap();
        let g = crate::spectra::min_eig_dense(&base.dense().unwrap()).unwrap();
        let gv = g.vector.amps().clone();
        let mut prod = gv.clone();
        for _ in 1..4 {
            prod = prod.kronecker(&gv);
        }
        let state = StateVector::normalised(4, prod);
        let report = check_decoupling(&amp, &state, 0.5, 1).unwrap();
        assert!(report.hypothesis_holds);
        assert_eq!(report.branch, "cross-term");
        assert!(report.checks.pass(), "{:?}", report.checks.failing());
    }

    #[test]
    fn soundness_composite_on_toy_ground_state() {
        let base = toy_base();
        let amp = amplify_derandomised(&base, 1, GraphFamily::CompleteLoops).unwrap();
        let dense = amp.dense().unwrap();
        let res = crate::spectra::min_eig_dense(&dense).unwrap();
        let base_min = crate::spectra::min_eig_dense(&base.dense().unwrap())
            .unwrap()
            .value;
        let ground = StateVector::normalised(2, res.vector.amps().clone());
        for r in [1] {
            for alpha in [0.25, 0.5, 1.0] {
                let rep =
                    verify_soundness(&amp, &ground, base_min, res.value, r, alpha).unwrap();
                assert!(
                    rep.check.pass,
                    "soundness failed at r={r}, alpha={alpha}: {:?}",
                    rep.check
                );
                assert_eq!(rep.state_hash.len(), 64);
            }
        }
    }

    #[test]
    fn order_invariance_of_commuting_measurements() {
        let base = toy_base();
        let amp = amplify_derandomised(&base, 1, GraphFamily::CompleteLoops).unwrap();
        let state = rand_state(2, 77);
        let rec = check_order_invariance(&amp, &state, 0, 0, &[0], 0.5).unwrap();
        assert!(rec.pass, "order invariance deviation {}", rec.lhs);
    }

    #[test]
    fn suggested_params_formula() {
        let p = suggest_params(2);
        assert_eq!(p.r, 1);
        assert!((p.alpha - 0.5).abs() < 1e-15);
        assert!(!p.asymptotic_hypothesis_met);
        let p1 = suggest_params(1);
        assert!(p1.warning.is_some());
        let p_big = suggest_params(100_000);
        assert!(p_big.asymptotic_hypothesis_met);
    }
}
