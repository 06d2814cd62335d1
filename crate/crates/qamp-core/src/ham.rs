//! Layered local Hamiltonians: validated projector terms grouped into
//! commuting layers with a convex weight per layer.
//!
//! A layered Hamiltonian on `n` qubits is
//!
//! ```text
//!     H = sum_chi w_chi H_chi,     H_chi = (1/m_chi) sum_{i in layer chi} Pi_i,
//! ```
//!
//! with every `Pi_i` a projector, projectors within one layer pairwise
//! commuting, `w_chi > 0` and `sum_chi w_chi = 1`.  When no layer structure
//! is supplied, one is derived by equitably coloring the clause conflict
//! graph; when no weights are supplied, `w_chi = m_chi / m` (clause-uniform).
//!
//! All operator data is dense-on-support and embedded on demand; whole-space
//! action is matrix-free through [`LayeredHamiltonian::apply`].

use serde::{Deserialize, Serialize};

use crate::coloring::{equitable_color, ConstraintGraph};
use crate::error::{Error, Result};
use crate::linalg::{
    apply_local, c64, commutator_fro, dim_of, embed_global, hermiticity_residual,
    idempotency_residual, is_diagonal, CMat, CVec,
};
use crate::tol;

/// Cap (in qubits) for materialising whole-space dense matrices.
pub const DENSE_QUBIT_CAP: usize = 12;

/// A projector acting on an explicit list of qubits.
///
/// `matrix` is the dense `2^k × 2^k` operator on the support, row-major, with
/// `support[0]` as the most significant local bit.
#[derive(Debug, Clone)]
pub struct LocalProjector {
    support: Vec<usize>,
    matrix: CMat,
}

/// Residual report from projector validation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProjectorReport {
    /// `‖P − P†‖_F`.
    pub hermiticity: f64,
    /// `‖P² − P‖_F`.
    pub idempotency: f64,
    /// Both residuals below [`tol::PROJECTOR`].
    pub pass: bool,
}

/// Check Hermiticity and idempotency of a candidate projector matrix.
pub fn validate_projector(matrix: &CMat) -> ProjectorReport {
    let hermiticity = hermiticity_residual(matrix);
    let idempotency = idempotency_residual(matrix);
    ProjectorReport {
        hermiticity,
        idempotency,
        pass: hermiticity <= tol::PROJECTOR && idempotency <= tol::PROJECTOR,
    }
}

impl LocalProjector {
    /// Validate and construct a local projector term.
    ///
    /// Requirements: support qubits distinct and inside `[0, n)` (checked at
    /// Hamiltonian build), matrix square of dimension `2^|support|`,
    /// Hermitian and idempotent within [`tol::PROJECTOR`].
    pub fn new(support: Vec<usize>, matrix: CMat) -> Result<Self> {
        let k = support.len();
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != 1usize << k {
            return Err(Error::InvalidHamiltonian(format!(
                "matrix is {}x{} but support has {k} qubits (need {}x{})",
                matrix.nrows(),
                matrix.ncols(),
                1usize << k,
                1usize << k
            )));
        }
        let mut seen = support.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != support.len() {
            return Err(Error::InvalidHamiltonian(format!(
                "support {support:?} lists a qubit twice"
            )));
        }
        let report = validate_projector(&matrix);
        if !report.pass {
            return Err(Error::NotAProjector {
                index: usize::MAX,
                reason: format!(
                    "hermiticity residual {:.3e}, idempotency residual {:.3e} (tol {:.0e})",
                    report.hermiticity,
                    report.idempotency,
                    tol::PROJECTOR
                ),
            });
        }
        Ok(LocalProjector { support, matrix })
    }

    /// Supported qubit list (most significant local bit first).
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Dense matrix on the support.
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// True when the matrix is diagonal (a classical indicator).
    pub fn is_diagonal(&self) -> bool {
        is_diagonal(&self.matrix, 1e-14)
    }
}

/// A validated layered local Hamiltonian.
#[derive(Debug, Clone)]
pub struct LayeredHamiltonian {
    n_qubits: usize,
    terms: Vec<LocalProjector>,
    layers: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl LayeredHamiltonian {
    /// Build a layered Hamiltonian.
    ///
    /// * `layers: None` derives the layer structure by equitably coloring the
    ///   clause conflict graph with max-degree + 1 classes (empty classes are
    ///   dropped).
    /// * `weights: None` uses the clause-uniform default `w_chi = m_chi / m`.
    ///
    /// Fails when: a support is out of range, a layer references a term twice
    /// or not at all, weights are non-positive or do not sum to one, or two
    /// terms in one layer do not commute (the error names the pair and its
    /// commutator norm).
    pub fn build(
        n_qubits: usize,
        terms: Vec<LocalProjector>,
        layers: Option<Vec<Vec<usize>>>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidHamiltonian("no terms".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            if let Some(&q) = t.support.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::InvalidHamiltonian(format!(
                    "term {i}: support qubit {q} out of range for n={n_qubits}"
                )));
            }
        }

        let layers = match layers {
            Some(l) => l,
            None => {
                let graph =
                    ConstraintGraph::from_supports(&terms.iter().map(|t| t.support.clone()).collect::<Vec<_>>());
                let coloring = equitable_color(&graph, None)?;
                coloring
                    .classes()
                    .iter()
                    .filter(|c| !c.is_empty())
                    .cloned()
                    .collect()
            }
        };

        // Layers must partition the term indices.
        let mut seen = vec![false; terms.len()];
        for (chi, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::InvalidHamiltonian(format!("layer {chi} is empty")));
            }
            for &i in layer {
                if i >= terms.len() {
                    return Err(Error::InvalidHamiltonian(format!(
                        "layer {chi} references unknown term {i}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidHamiltonian(format!(
                        "term {i} appears in more than one layer"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidHamiltonian(format!(
                "term {i} not assigned to any layer"
            )));
        }

        // Commutation within each layer (only overlapping supports can fail).
        for (chi, layer) in layers.iter().enumerate() {
            for (ai, &a) in layer.iter().enumerate() {
                for &b in &layer[ai + 1..] {
                    let (ta, tb) = (&terms[a], &terms[b]);
                    if !ta.support.iter().any(|q| tb.support.contains(q)) {
                        continue;
                    }
                    let norm = overlap_commutator_fro(ta, tb);
                    if norm > tol::COMMUTATION {
                        return Err(Error::NonCommutingLayer { layer: chi, a, b, norm });
                    }
                }
            }
        }

        let weights = match weights {
            Some(w) => {
                if w.len() != layers.len() {
                    return Err(Error::InvalidHamiltonian(format!(
                        "{} weights for {} layers",
                        w.len(),
                        layers.len()
                    )));
                }
                if let Some((chi, &bad)) = w.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
                    return Err(Error::InvalidHamiltonian(format!(
                        "weight {bad} of layer {chi} is not positive"
                    )));
                }
                let sum: f64 = w.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidHamiltonian(format!(
                        "weights sum to {sum}, expected 1"
                    )));
                }
                w
            }
            None => {
                let m = terms.len() as f64;
                layers.iter().map(|l| l.len() as f64 / m).collect()
            }
        };

        Ok(LayeredHamiltonian {
            n_qubits,
            terms,
            layers,
            weights,
        })
    }

    /// Number of qubits.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// All projector terms, in input order.
    pub fn terms(&self) -> &[LocalProjector] {
        &self.terms
    }

    /// Term indices of each layer.
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    /// Layer weights (positive, summing to one).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of layers `g`.
    pub fn g(&self) -> usize {
        self.layers.len()
    }

    /// Total clause count `m`.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    /// Clause count of layer `chi`.
    pub fn m_chi(&self, chi: usize) -> usize {
        self.layers[chi].len()
    }

    /// Smallest layer weight `min_chi w_chi`.
    pub fn min_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Inverse smallest layer weight `omega_min = (min_chi w_chi)^{-1} ≥ 1`.
    pub fn omega_min(&self) -> f64 {
        1.0 / self.min_weight()
    }

    /// Largest support size over the terms (the locality `k`).
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0)
    }

    /// True when every term is diagonal in the computational basis.
    pub fn is_classical(&self) -> bool {
        self.terms.iter().all(LocalProjector::is_diagonal)
    }

    /// Matrix-free action `H |psi>`.
    pub fn apply(&self, psi: &CVec) -> CVec {
        let mut out = CVec::zeros(psi.len());
        for (chi, layer) in self.layers.iter().enumerate() {
            let scale = c64(self.weights[chi] / layer.len() as f64, 0.0);
            for &i in layer {
                let t = &self.terms[i];
                out += apply_local(&t.matrix, &t.support, self.n_qubits, psi) * scale;
            }
        }
        out
    }

    /// Matrix-free action of a single layer average `H_chi |psi>`.
    pub fn apply_layer(&self, chi: usize, psi: &CVec) -> CVec {
        let layer = &self.layers[chi];
        let mut out = CVec::zeros(psi.len());
        let scale = c64(1.0 / layer.len() as f64, 0.0);
        for &i in layer {
            let t = &self.terms[i];
            out += apply_local(&t.matrix, &t.support, self.n_qubits, psi) * scale;
        }
        out
    }

    /// Dense matrix of `H` (≤ [`DENSE_QUBIT_CAP`] qubits).
    pub fn dense(&self) -> Result<CMat> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(Error::DenseTooLarge {
                qubits: self.n_qubits,
                cap: DENSE_QUBIT_CAP,
            });
        }
        let dim = dim_of(self.n_qubits);
        let mut out = CMat::zeros(dim, dim);
        for (chi, layer) in self.layers.iter().enumerate() {
            let scale = c64(self.weights[chi] / layer.len() as f64, 0.0);
            for &i in layer {
                let t = &self.terms[i];
                out += embed_global(&t.matrix, &t.support, self.n_qubits) * scale;
            }
        }
        Ok(out)
    }

    /// Dense matrix of the layer average `H_chi`.
    pub fn dense_layer(&self, chi: usize) -> Result<CMat> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(Error::DenseTooLarge {
                qubits: self.n_qubits,
                cap: DENSE_QUBIT_CAP,
            });
        }
        let dim = dim_of(self.n_qubits);
        let layer = &self.layers[chi];
        let mut out = CMat::zeros(dim, dim);
        let scale = c64(1.0 / layer.len() as f64, 0.0);
        for &i in layer {
            let t = &self.terms[i];
            out += embed_global(&t.matrix, &t.support, self.n_qubits) * scale;
        }
        Ok(out)
    }

    /// Serialisable schema form.
    pub fn to_schema(&self) -> HamiltonianSchema {
        let mut layer_of = vec![0usize; self.terms.len()];
        for (chi, layer) in self.layers.iter().enumerate() {
            for &i in layer {
                layer_of[i] = chi;
            }
        }
        HamiltonianSchema {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .enumerate()
                .map(|(i, t)| TermSchema {
                    support: t.support.clone(),
                    matrix: matrix_to_rows(&t.matrix),
                    layer: Some(layer_of[i]),
                })
                .collect(),
            weights: Some(self.weights.clone()),
        }
    }

    /// Build from the schema form, revalidating everything.
    pub fn from_schema(schema: &HamiltonianSchema) -> Result<Self> {
        let mut terms = Vec::with_capacity(schema.terms.len());
        let mut tagged = 0usize;
        for (i, t) in schema.terms.iter().enumerate() {
            let m = rows_to_matrix(&t.matrix).map_err(|reason| Error::InvalidHamiltonian(
                format!("term {i}: {reason}"),
            ))?;
            let p = LocalProjector::new(t.support.clone(), m).map_err(|e| match e {
                Error::NotAProjector { reason, .. } => Error::NotAProjector { index: i, reason },
                other => other,
            })?;
            tagged += usize::from(t.layer.is_some());
            terms.push(p);
        }
        let layers = if tagged == 0 {
            None
        } else if tagged == schema.terms.len() {
            let max_layer = schema.terms.iter().filter_map(|t| t.layer).max().unwrap_or(0);
            let mut layers = vec![Vec::new(); max_layer + 1];
            for (i, t) in schema.terms.iter().enumerate() {
                layers[t.layer.expect("tagged")].push(i);
            }
            Some(layers)
        } else {
            return Err(Error::InvalidHamiltonian(
                "either every term or no term must carry a layer tag".into(),
            ));
        };
        LayeredHamiltonian::build(schema.n_qubits, terms, layers, schema.weights.clone())
    }
}

/// Frobenius norm of the commutator of two overlapping terms, computed on the
/// union of their supports.
fn overlap_commutator_fro(a: &LocalProjector, b: &LocalProjector) -> f64 {
    let mut union = a.support.to_vec();
    for &q in &b.support {
        if !union.contains(&q) {
            union.push(q);
        }
    }
    union.sort_unstable();
    let n = union.len();
    let map = |s: &[usize]| -> Vec<usize> {
        s.iter().map(|q| union.iter().position(|u| u == q).expect("in union")).collect()
    };
    let ga = embed_global(&a.matrix, &map(&a.support), n);
    let gb = embed_global(&b.matrix, &map(&b.support), n);
    commutator_fro(&ga, &gb)
}

// ─── JSON schema ────────────────────────────────────────────────────────────

/// One serialised term: `matrix` is row-major with `[re, im]` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSchema {
    pub support: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer: Option<usize>,
}

/// Serialised layered Hamiltonian.
///
/// `layer` tags and `weights` are optional on input (defaults are derived);
/// serialisation always writes the resolved values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSchema {
    pub n_qubits: usize,
    pub terms: Vec<TermSchema>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> std::result::Result<CMat, String> {
    let n = rows.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(format!("matrix has {n} rows, expected a power of two"));
    }
    let mut m = CMat::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(format!("row {r} has {} entries, expected {n}", row.len()));
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            m[(r, c)] = c64(re, im);
        }
    }
    Ok(m)
}

// ─── Common projectors (used by the corpus and tests) ───────────────────────

/// `|1><1|` on one qubit.
pub fn proj_one() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(0., 0.), c64(0., 0.), c64(1., 0.)])
}

/// `|0><0|` on one qubit.
pub fn proj_zero() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(0., 0.)])
}

/// `|+><+|` on one qubit.
pub fn proj_plus() -> CMat {
    CMat::from_element(2, 2, c64(0.5, 0.))
}

/// `|-><-|` on one qubit.
pub fn proj_minus() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(0.5, 0.), c64(-0.5, 0.), c64(-0.5, 0.), c64(0.5, 0.)])
}

/// Diagonal two-qubit projector firing on `|00>` and `|11>` (equality test).
pub fn proj_equal2() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = c64(1., 0.);
    m[(3, 3)] = c64(1., 0.);
    m
}

/// Two-qubit projector `(I - Z⊗Z)/2` (odd parity in Z).
pub fn proj_zz_odd() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(1, 1)] = c64(1., 0.);
    m[(2, 2)] = c64(1., 0.);
    m
}

/// Two-qubit projector `(I - X⊗X)/2`.
pub fn proj_xx_odd() -> CMat {
    let h = c64(0.5, 0.);
    let nh = c64(-0.5, 0.);
    CMat::from_row_slice(
        4,
        4,
        &[
            h,
            c64(0., 0.),
            c64(0., 0.),
            nh,
            c64(0., 0.),
            h,
            nh,
            c64(0., 0.),
            c64(0., 0.),
            nh,
            h,
            c64(0., 0.),
            nh,
            c64(0., 0.),
            c64(0., 0.),
            h,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_constructors_are_projectors() {
        for m in [proj_one(), proj_zero(), proj_plus(), proj_minus(), proj_equal2(), proj_zz_odd(), proj_xx_odd()] {
            let r = validate_projector(&m);
            assert!(r.pass, "residuals {r:?}");
        }
    }

    #[test]
    fn non_projector_rejected() {
        let m = CMat::from_element(2, 2, c64(0.7, 0.0));
        let err = LocalProjector::new(vec![0], m).unwrap_err();
        assert!(err.to_string().contains("not a projector"), "got {err}");
    }

    #[test]
    fn non_commuting_layer_names_the_pair() {
        let terms = vec![
            LocalProjector::new(vec![0], proj_one()).unwrap(),
            LocalProjector::new(vec![0], proj_plus()).unwrap(),
        ];
        let err =
            LayeredHamiltonian::build(1, terms, Some(vec![vec![0, 1]]), None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("terms 0 and 1"), "got: {msg}");
        // ‖[|1><1|, |+><+|]‖_F = 1/sqrt(2) ≈ 7.071068e-1
        assert!(msg.contains("7.071068e-1"), "got: {msg}");
    }

    #[test]
    fn default_weights_are_clause_uniform() {
        let terms = vec![
            LocalProjector::new(vec![0], proj_one()).unwrap(),
            LocalProjector::new(vec![1], proj_one()).unwrap(),
            LocalProjector::new(vec![0], proj_plus()).unwrap(),
        ];
        let h = LayeredHamiltonian::build(2, terms, Some(vec![vec![0, 1], vec![2]]), None).unwrap();
        assert_eq!(h.weights(), &[2.0 / 3.0, 1.0 / 3.0]);
        assert!((h.omega_min() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn auto_layering_separates_conflicting_terms() {
        let terms = vec![
            LocalProjector::new(vec![0], proj_one()).unwrap(),
            LocalProjector::new(vec![0], proj_plus()).unwrap(),
        ];
        let h = LayeredHamiltonian::build(1, terms, None, None).unwrap();
        assert_eq!(h.g(), 2, "conflicting terms must land in different layers");
    }

    #[test]
    fn schema_round_trip() {
        let terms = vec![
            LocalProjector::new(vec![0], proj_one()).unwrap(),
            LocalProjector::new(vec![0], proj_plus()).unwrap(),
        ];
        let h = LayeredHamiltonian::build(1, terms, Some(vec![vec![0], vec![1]]), Some(vec![0.5, 0.5])).unwrap();
        let schema = h.to_schema();
        let h2 = LayeredHamiltonian::from_schema(&schema).unwrap();
        assert_eq!(h2.g(), 2);
        assert_eq!(h2.weights(), h.weights());
        let d1 = h.dense().unwrap();
        let d2 = h2.dense().unwrap();
        assert!((d1 - d2).norm() < 1e-15);
    }

    #[test]
    fn apply_matches_dense() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let terms = vec![
            LocalProjector::new(vec![0, 1], proj_equal2()).unwrap(),
            LocalProjector::new(vec![1, 2], proj_zz_odd()).unwrap(),
            LocalProjector::new(vec![2], proj_plus()).unwrap(),
        ];
        let h = LayeredHamiltonian::build(3, terms, None, None).unwrap();
        let dense = h.dense().unwrap();
        for _ in 0..20 {
            let psi = crate::linalg::random_state(8, &mut rng);
            let fast = h.apply(&psi);
            let slow = &dense * &psi;
            assert!(
                (fast - slow).norm() < crate::tol::APPLY_VS_DENSE,
                "matrix-free apply deviates from dense"
            );
        }
    }
}
