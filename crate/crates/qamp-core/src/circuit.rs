//! Phase-application circuits for materialised path terms.
//!
//! A path term is a projector `Pi = I - prod_i (I - Pi_i)` over clauses with
//! pairwise disjoint supports: it fires exactly when *at least one* clause
//! fires.  The circuit below applies `e^{iT·Pi}` using one flag ancilla per
//! clause and an OR-tree over the flags:
//!
//! 1. per clause, a *flag* gate `U_i = Pi_i ⊗ X + (I − Pi_i) ⊗ I` marks the
//!    clause outcome on its ancilla (at most 3-qubit gates for 2-local
//!    clauses);
//! 2. a balanced tree of 3-qubit OR gates `|a,b,c> -> |a,b,c ⊕ (a∨b)>`
//!    folds the flags into a root ancilla;
//! 3. a single-qubit phase `diag(1, e^{iT})` hits the root;
//! 4. the tree and the flags are uncomputed by the exact mirror sequence
//!    (every flag and OR gate is an involution).
//!
//! Totals for `m` clauses: `2m + 2(m−1) + 1 = 4m − 1 ≤ 4m + 2` gates,
//! `2m − 1 ≤ 2m` ancillas, OR-tree depth `⌈log₂ m⌉ ≤ ⌈log₂ m⌉ + 1`.
//! On `|anc> = |0…0>` the circuit acts as `e^{iT·Pi} ⊗ I` and returns every
//! ancilla to `|0>`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ham::LocalProjector;
use crate::linalg::{apply_local, c64, dim_of, identity, kron, CMat, CVec};
use crate::tol;

/// Cap (in total qubits) for materialising a circuit's unitary densely.
pub const UNITARY_QUBIT_CAP: usize = 14;

/// One gate: a dense unitary on an explicit target list (≤ 3 qubits).
#[derive(Debug, Clone)]
pub struct Gate {
    pub name: String,
    /// Global qubit indices, most significant first (system qubits are
    /// `0..n_system`, ancillas follow).
    pub targets: Vec<usize>,
    pub matrix: CMat,
}

/// A straight-line circuit on `n_system + n_ancilla` qubits.
#[derive(Debug, Clone)]
pub struct GateCircuit {
    n_system: usize,
    n_ancilla: usize,
    tree_depth: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    /// Total qubit count (system followed by ancillas).
    pub fn n_total(&self) -> usize {
        self.n_system + self.n_ancilla
    }

    /// OR-tree depth `⌈log₂ m⌉` (0 for a single clause).
    pub fn tree_depth(&self) -> usize {
        self.tree_depth
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Apply the circuit to a state on `n_total` qubits (gate 0 first).
    pub fn apply(&self, psi: &CVec) -> CVec {
        let n = self.n_total();
        let mut cur = psi.clone();
        for g in &self.gates {
            cur = apply_local(&g.matrix, &g.targets, n, &cur);
        }
        cur
    }

    /// Dense unitary of the whole circuit (≤ [`UNITARY_QUBIT_CAP`] qubits);
    /// fails if the result deviates from unitarity beyond
    /// [`tol::UNITARITY`].
    pub fn unitary(&self) -> Result<CMat> {
        let n = self.n_total();
        if n > UNITARY_QUBIT_CAP {
            return Err(Error::DenseTooLarge {
                qubits: n,
                cap: UNITARY_QUBIT_CAP,
            });
        }
        let dim = dim_of(n);
        let mut u = identity(dim);
        for g in &self.gates {
            // Column-wise apply of the gate to the accumulated unitary.
            let mut next = CMat::zeros(dim, dim);
            for col in 0..dim {
                let v: CVec = u.column(col).into_owned();
                next.set_column(col, &apply_local(&g.matrix, &g.targets, n, &v));
            }
            u = next;
        }
        let residual = (&u * u.adjoint() - identity(dim)).norm();
        if residual > tol::UNITARITY {
            return Err(Error::InvalidParameter(format!(
                "assembled circuit deviates from unitarity by {residual:.3e}"
            )));
        }
        Ok(u)
    }

    /// Serialisable schema form.
    pub fn to_schema(&self) -> CircuitSchema {
        CircuitSchema {
            qubits: self.n_system,
            ancillas: self.n_ancilla,
            gates: self
                .gates
                .iter()
                .map(|g| GateSchema {
                    name: g.name.clone(),
                    targets: g.targets.clone(),
                    matrix: (0..g.matrix.nrows())
                        .map(|r| {
                            (0..g.matrix.ncols())
                                .map(|c| [g.matrix[(r, c)].re, g.matrix[(r, c)].im])
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Serialised circuit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSchema {
    pub qubits: usize,
    pub ancillas: usize,
    pub gates: Vec<GateSchema>,
}

/// Serialised gate (matrix row-major, `[re, im]` entries).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSchema {
    pub name: String,
    pub targets: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Pauli X as a dense matrix.
fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

/// 3-qubit OR gate `|a,b,c> -> |a,b,c ⊕ (a ∨ b)>` (an involution).
fn or_gate() -> CMat {
    let mut m = CMat::zeros(8, 8);
    for a in 0..2usize {
        for b in 0..2usize {
            for c in 0..2usize {
                let cc = c ^ usize::from(a == 1 || b == 1);
                m[((a << 2) | (b << 1) | cc, (a << 2) | (b << 1) | c)] = c64(1., 0.);
            }
        }
    }
    m
}

/// Build the phase-application circuit for clauses with pairwise disjoint
/// supports on an `n_system`-qubit register.
///
/// Errors when two clause supports overlap (the walk registers that motivate
/// this circuit are disjoint by construction) or when a clause would need a
/// flag gate on more than 3 qubits.
pub fn emit_simulation_circuit(
    clauses: &[LocalProjector],
    n_system: usize,
    phase: f64,
) -> Result<GateCircuit> {
    let m = clauses.len();
    if m == 0 {
        return Err(Error::InvalidParameter("no clauses".into()));
    }
    for (i, c) in clauses.iter().enumerate() {
        if let Some(&q) = c.support().iter().find(|&&q| q >= n_system) {
            return Err(Error::InvalidParameter(format!(
                "clause {i}: support qubit {q} out of range for {n_system} system qubits"
            )));
        }
        if c.support().len() + 1 > 3 {
            return Err(Error::InvalidParameter(format!(
                "clause {i} acts on {} qubits; flag gates are capped at 3 targets \
                 (clause locality at most 2)",
                c.support().len()
            )));
        }
        for (j, other) in clauses.iter().enumerate().take(i) {
            if c.support().iter().any(|q| other.support().contains(q)) {
                return Err(Error::InvalidParameter(format!(
                    "clauses {j} and {i} overlap on the system register; \
                     the OR-decomposition needs disjoint supports"
                )));
            }
        }
    }

    let mut gates: Vec<Gate> = Vec::with_capacity(4 * m + 2);
    let mut next_ancilla = n_system;

    // Flag gates: Pi ⊗ X + (I − Pi) ⊗ I on (support…, flag ancilla).
    let mut flags = Vec::with_capacity(m);
    for (i, c) in clauses.iter().enumerate() {
        let anc = next_ancilla;
        next_ancilla += 1;
        flags.push(anc);
        let dim = c.matrix().nrows();
        let matrix = kron(c.matrix(), &pauli_x())
            + kron(&(identity(dim) - c.matrix()), &identity(2));
        let mut targets = c.support().to_vec();
        targets.push(anc);
        gates.push(Gate {
            name: format!("flag{i}"),
            targets,
            matrix,
        });
    }

    // OR-tree over the flags.
    let mut level = flags;
    let mut tree_gates: Vec<Gate> = Vec::new();
    let mut tree_depth = 0usize;
    while level.len() > 1 {
        tree_depth += 1;
        let mut next_level = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.chunks_exact(2);
        for pair in &mut it {
            let out = next_ancilla;
            next_ancilla += 1;
            tree_gates.push(Gate {
                name: "or".into(),
                targets: vec![pair[0], pair[1], out],
                matrix: or_gate(),
            });
            next_level.push(out);
        }
        next_level.extend_from_slice(it.remainder());
        level = next_level;
    }
    let root = level[0];
    gates.extend(tree_gates.iter().cloned());

    // Phase on the root ancilla.
    let mut phase_matrix = identity(2);
    phase_matrix[(1, 1)] = c64(phase.cos(), phase.sin());
    gates.push(Gate {
        name: "phase".into(),
        targets: vec![root],
        matrix: phase_matrix,
    });

    // Mirror uncomputation: OR-tree reversed, then flags reversed.
    gates.extend(tree_gates.into_iter().rev());
    for (i, c) in clauses.iter().enumerate().rev() {
        let dim = c.matrix().nrows();
        let matrix = kron(c.matrix(), &pauli_x())
            + kron(&(identity(dim) - c.matrix()), &identity(2));
        let mut targets = c.support().to_vec();
        targets.push(n_system + i);
        gates.push(Gate {
            name: format!("flag{i}"),
            targets,
            matrix,
        });
    }

    Ok(GateCircuit {
        n_system,
        n_ancilla: next_ancilla - n_system,
        tree_depth,
        gates,
    })
}

/// Oracle for circuit tests: `e^{iT·A}` of a Hermitian `A` via its spectral
/// decomposition (independent of the rank-1 update identity a projector
/// would allow).
pub fn phase_exponential(a: &CMat, phase: f64) -> CMat {
    let (values, vectors) =
        crate::spectra::eigh(a).expect("eigendecomposition for phase exponential");
    let dim = a.nrows();
    let mut d = CMat::zeros(dim, dim);
    for (i, &lam) in values.iter().enumerate() {
        d[(i, i)] = c64((phase * lam).cos(), (phase * lam).sin());
    }
    &vectors * d * vectors.adjoint()
}
