//! The three amplification constructions and their iteration.
//!
//! Given a layered Hamiltonian `H = sum_chi w_chi H_chi` on `n` qubits:
//!
//! * **Walks** (`H^(2t)`, the derandomised construction): each layer's
//!   clauses are placed on the vertices of a certified regular graph
//!   (replicating clauses when the family needs more vertices) and the layer
//!   average is replaced by an average over all `m · d^(2t-1)` walks of
//!   `2t` vertices, the walk's clauses acting on `2t` fresh registers:
//!
//!   ```text
//!       H^(2t) = sum_chi w_chi E_f [ I - prod_{j=1..2t} (I - Pi^chi_f(j)) ].
//!   ```
//!
//! * **Tensor** (`I - (I - H)^{⊗t}`): the fully random benchmark; its
//!   spectrum is the closed form `1 - (1 - λ)^t` applied to the base
//!   spectrum.
//!
//! * **SingleShot** (CLI name `dl`): one product per layer and register,
//!   `I - sum_chi w_chi (prod_i (I - Pi_i^chi))^{⊗t}`, with a guarantee floor
//!   `(min_chi w_chi / 4g) (1 - (1 + m γ / g²)^{-t})` when every projector
//!   fails to commute with at most `g - 1` others.
//!
//! Application is matrix-free.  For walks, a transfer-matrix dynamic program
//! propagates one vector per graph vertex across the `2t` registers, costing
//! `O(2t · m (d + 2^k) · 2^{n·2t})` instead of the naive
//! `O(m d^{2t-1} · 2t · 2^{n·2t})` of walk-by-walk streaming; the streaming
//! form is retained as [`AmplifiedOperator::apply_streamed`] and the two are
//! asserted to agree in tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expander::{ExpanderGraph, GraphFamily, GraphSchema, WalkFamily};
use crate::ham::{HamiltonianSchema, LayeredHamiltonian, LocalProjector};
use crate::linalg::{apply_local, bit_of, c64, dim_of, embed_global, identity, CMat, CVec};
use crate::report::CheckRecord;
use crate::spectra::{min_eig_diagonal, min_eig_iterative, SpectralResult};
use crate::tol;

/// Which amplified operator is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Derandomised walk averaging over `2t` registers.
    Walks,
    /// Full tensor power `I - (I - H)^{⊗t}` over `t` registers.
    Tensor,
    /// Single-shot per-layer products over `t` registers (CLI name `dl`).
    #[serde(rename = "dl")]
    SingleShot,
}

impl Mode {
    /// CLI name of the mode.
    pub fn name(self) -> &'static str {
        match self {
            Mode::Walks => "walks",
            Mode::Tensor => "tensor",
            Mode::SingleShot => "dl",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "walks" => Ok(Mode::Walks),
            "tensor" => Ok(Mode::Tensor),
            "dl" => Ok(Mode::SingleShot),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode '{other}' (expected walks | tensor | dl)"
            ))),
        }
    }
}

/// Per-layer walk structure: the graph (on `replication · m_chi` vertices)
/// and the clause replication factor.
#[derive(Debug, Clone)]
pub struct LayerWalks {
    graph: ExpanderGraph,
    replication: usize,
}

impl LayerWalks {
    pub fn graph(&self) -> &ExpanderGraph {
        &self.graph
    }

    /// Number of times each clause is repeated on the vertex set.
    pub fn replication(&self) -> usize {
        self.replication
    }
}

/// One walk of one layer, materialisable as a projector.
#[derive(Debug, Clone, Serialize)]
pub struct PathTerm {
    /// Layer index.
    pub layer: usize,
    /// Walk index within the layer's walk family.
    pub walk_index: u64,
    /// Vertex sequence of the walk.
    pub vertices: Vec<usize>,
    /// Base-Hamiltonian term index carried by each vertex.
    pub term_indices: Vec<usize>,
}

/// An amplified operator, stored structurally (base + graphs + `t`), applied
/// matrix-free.
#[derive(Debug, Clone)]
pub struct AmplifiedOperator {
    base: LayeredHamiltonian,
    t: usize,
    mode: Mode,
    /// Per-layer walk data (Walks mode only).
    layer_walks: Vec<LayerWalks>,
}

/// Derandomised walk amplification with a built-in graph family.
pub fn amplify_derandomised(
    base: &LayeredHamiltonian,
    t: usize,
    family: GraphFamily,
) -> Result<AmplifiedOperator> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let mut layer_walks = Vec::with_capacity(base.g());
    for chi in 0..base.g() {
        let m_chi = base.m_chi(chi);
        let min = family.min_vertices();
        let replication = min.div_ceil(m_chi);
        let graph = ExpanderGraph::build(family, replication * m_chi)?;
        layer_walks.push(LayerWalks { graph, replication });
    }
    let op = AmplifiedOperator {
        base: base.clone(),
        t,
        mode: Mode::Walks,
        layer_walks,
    };
    op.walk_counts()?; // fail early on enumeration overflow
    Ok(op)
}

/// Derandomised walk amplification with explicit per-layer graphs (used for
/// user-supplied rotation maps).  Each graph's vertex count must be a
/// positive multiple of the layer's clause count.
pub fn amplify_derandomised_with_graphs(
    base: &LayeredHamiltonian,
    t: usize,
    graphs: Vec<ExpanderGraph>,
) -> Result<AmplifiedOperator> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    if graphs.len() != base.g() {
        return Err(Error::InvalidParameter(format!(
            "{} graphs supplied for {} layers",
            graphs.len(),
            base.g()
        )));
    }
    let mut layer_walks = Vec::with_capacity(base.g());
    for (chi, graph) in graphs.into_iter().enumerate() {
        let m_chi = base.m_chi(chi);
        if graph.m() == 0 || graph.m() % m_chi != 0 {
            return Err(Error::InvalidParameter(format!(
                "layer {chi}: graph has {} vertices, not a multiple of {m_chi} clauses",
                graph.m()
            )));
        }
        let replication = graph.m() / m_chi;
        layer_walks.push(LayerWalks { graph, replication });
    }
    let op = AmplifiedOperator {
        base: base.clone(),
        t,
        mode: Mode::Walks,
        layer_walks,
    };
    op.walk_counts()?;
    Ok(op)
}

/// Full tensor-power amplification `I - (I - H)^{⊗t}`.
pub fn amplify_full_tensor(base: &LayeredHamiltonian, t: usize) -> Result<AmplifiedOperator> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    Ok(AmplifiedOperator {
        base: base.clone(),
        t,
        mode: Mode::Tensor,
        layer_walks: Vec::new(),
    })
}

/// Single-shot per-layer product amplification over `t` registers.
pub fn amplify_single_shot(base: &LayeredHamiltonian, t: usize) -> Result<AmplifiedOperator> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    Ok(AmplifiedOperator {
        base: base.clone(),
        t,
        mode: Mode::SingleShot,
        layer_walks: Vec::new(),
    })
}

impl AmplifiedOperator {
    /// The base Hamiltonian.
    pub fn base(&self) -> &LayeredHamiltonian {
        &self.base
    }

    /// Amplification parameter `t`.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Register count: `2t` for walks, `t` otherwise.
    pub fn registers(&self) -> usize {
        match self.mode {
            Mode::Walks => 2 * self.t,
            Mode::Tensor | Mode::SingleShot => self.t,
        }
    }

    /// Total qubit count `n · registers`.
    pub fn n_total(&self) -> usize {
        self.base.n_qubits() * self.registers()
    }

    /// Per-layer walk structures (empty unless Walks mode).
    pub fn layer_walks(&self) -> &[LayerWalks] {
        &self.layer_walks
    }

    /// Walk counts per layer; errors on enumeration overflow.
    pub fn walk_counts(&self) -> Result<Vec<u64>> {
        let l = self.registers();
        self.layer_walks
            .iter()
            .map(|lw| WalkFamily::new(&lw.graph, l).map(|w| w.count()))
            .collect()
    }

    /// Largest per-layer `mu` (0 when no walk structure is present).
    pub fn mu_max(&self) -> f64 {
        self.layer_walks.iter().map(|lw| lw.graph.mu()).fold(0.0, f64::max)
    }

    /// Walk-position correlation constant
    /// `C_mu = max_i sum_{j≠i} mu_max^{|i-j|}` over the `2t` positions
    /// (finite sum; equals `2t - 1` in the degenerate `mu = 1` case).
    pub fn c_mu(&self) -> f64 {
        c_mu_positions(self.mu_max(), self.registers())
    }

    /// Base-term index carried by vertex `v` of layer `chi`.
    pub fn term_of_vertex(&self, chi: usize, v: usize) -> usize {
        self.base.layers()[chi][v % self.base.m_chi(chi)]
    }

    // ─── Application ────────────────────────────────────────────────────────

    /// Matrix-free action on a state of `n_total` qubits.
    pub fn apply(&self, psi: &CVec) -> CVec {
        let dim = dim_of(self.n_total());
        assert_eq!(psi.len(), dim, "state dimension mismatch");
        match self.mode {
            Mode::Walks => self.apply_walks(psi),
            Mode::Tensor => self.apply_tensor(psi),
            Mode::SingleShot => self.apply_single_shot(psi),
        }
    }

    fn apply_walks(&self, psi: &CVec) -> CVec {
        let mut out = psi.clone();
        for chi in 0..self.layer_walks.len() {
            let w_chi = self.base.weights()[chi];
            let (sum, total) = self.layer_survivor_sum(chi, psi);
            // out -= w_chi * sum / total  (out started at sum_chi w_chi * psi = psi)
            out -= sum * c64(w_chi / total, 0.0);
        }
        out
    }

    /// Transfer-matrix survivor sum for layer `chi`:
    /// `Σ_f ∏_j (I − Π_{f(j)}) ψ` over all walks `f`, together with the walk
    /// count as `f64`.  Dividing gives the layer's survivor average.
    fn layer_survivor_sum(&self, chi: usize, psi: &CVec) -> (CVec, f64) {
        let n = self.base.n_qubits();
        let l = self.registers();
        let lw = &self.layer_walks[chi];
        let graph = &lw.graph;
        let m = graph.m();
        let d = graph.d();
        // Complement matrices and register-shifted supports per vertex.
        let comps: Vec<(CMat, Vec<usize>)> = (0..m)
            .map(|v| {
                let term = &self.base.terms()[self.term_of_vertex(chi, v)];
                let k = term.support().len();
                (identity(1 << k) - term.matrix(), term.support().to_vec())
            })
            .collect();
        let shifted = |support: &[usize], reg: usize| -> Vec<usize> {
            support.iter().map(|&q| q + reg * n).collect()
        };
        // phi[v] = prefix-summed complement products for walks ending at v.
        let mut phi: Vec<CVec> = (0..m)
            .map(|v| apply_local(&comps[v].0, &shifted(&comps[v].1, 0), self.n_total(), psi))
            .collect();
        for reg in 1..l {
            let mut next: Vec<CVec> = Vec::with_capacity(m);
            for u in 0..m {
                let mut acc = CVec::zeros(psi.len());
                for p in 0..d {
                    acc += &phi[graph.step(u, p)];
                }
                next.push(apply_local(
                    &comps[u].0,
                    &shifted(&comps[u].1, reg),
                    self.n_total(),
                    &acc,
                ));
            }
            phi = next;
        }
        let total = m as f64 * (d as f64).powi(l as i32 - 1);
        let mut sum = CVec::zeros(psi.len());
        for v in phi {
            sum += v;
        }
        (sum, total)
    }

    /// Quadratic form of a single amplified layer on `psi` (Walks mode):
    /// `⟨ψ|H^(2t)_χ|ψ⟩ = ⟨ψ|ψ⟩ − E_f ⟨ψ|∏_j (I − Π_{f(j)})|ψ⟩`, computed by
    /// the transfer-matrix recursion.
    pub fn layer_expectation(&self, chi: usize, psi: &CVec) -> Result<f64> {
        if self.mode != Mode::Walks {
            return Err(Error::InvalidParameter(
                "layer expectations are defined for walk amplification only".into(),
            ));
        }
        if chi >= self.layer_walks.len() {
            return Err(Error::InvalidParameter(format!(
                "layer {chi} out of range for {} layers",
                self.layer_walks.len()
            )));
        }
        let (sum, total) = self.layer_survivor_sum(chi, psi);
        let survivor = psi.dotc(&sum);
        assert!(
            survivor.im.abs() <= crate::tol::IMAG_RESIDUAL * total,
            "imaginary residual {} on a Hermitian quadratic form",
            survivor.im
        );
        Ok(psi.norm_squared() - survivor.re / total)
    }

    /// Walk-by-walk streaming application: the definitional sum, kept as an
    /// oracle for the transfer-matrix path.  Cost grows with the walk count.
    pub fn apply_streamed(&self, psi: &CVec) -> Result<CVec> {
        if self.mode != Mode::Walks {
            return Err(Error::InvalidParameter(
                "streamed application is defined for walk amplification only".into(),
            ));
        }
        let n = self.base.n_qubits();
        let l = self.registers();
        let mut out = psi.clone();
        for (chi, lw) in self.layer_walks.iter().enumerate() {
            let w_chi = self.base.weights()[chi];
            let walks = WalkFamily::new(&lw.graph, l)?;
            let mut avg = CVec::zeros(psi.len());
            for walk in walks.iter() {
                let mut cur = psi.clone();
                for (reg, &v) in walk.iter().enumerate() {
                    let term = &self.base.terms()[self.term_of_vertex(chi, v)];
                    let comp = identity(1 << term.support().len()) - term.matrix();
                    let support: Vec<usize> =
                        term.support().iter().map(|&q| q + reg * n).collect();
                    cur = apply_local(&comp, &support, self.n_total(), &cur);
                }
                avg += cur;
            }
            out -= avg * c64(w_chi / walks.count() as f64, 0.0);
        }
        Ok(out)
    }

    fn apply_tensor(&self, psi: &CVec) -> CVec {
        let n = self.base.n_qubits();
        let n_total = self.n_total();
        // (I - H)^{⊗t} psi via sequential per-register sweeps.
        let mut cur = psi.clone();
        for reg in 0..self.t {
            let mut acc = CVec::zeros(psi.len());
            for (chi, layer) in self.base.layers().iter().enumerate() {
                let scale = c64(self.base.weights()[chi] / layer.len() as f64, 0.0);
                for &i in layer {
                    let term = &self.base.terms()[i];
                    let support: Vec<usize> =
                        term.support().iter().map(|&q| q + reg * n).collect();
                    acc += apply_local(term.matrix(), &support, n_total, &cur) * scale;
                }
            }
            cur -= acc;
        }
        psi - cur
    }

    fn apply_single_shot(&self, psi: &CVec) -> CVec {
        let n = self.base.n_qubits();
        let n_total = self.n_total();
        let mut out = psi.clone();
        for (chi, layer) in self.base.layers().iter().enumerate() {
            let w_chi = self.base.weights()[chi];
            let mut cur = psi.clone();
            for reg in 0..self.t {
                for &i in layer {
                    let term = &self.base.terms()[i];
                    let support: Vec<usize> =
                        term.support().iter().map(|&q| q + reg * n).collect();
                    cur -= apply_local(term.matrix(), &support, n_total, &cur);
                }
            }
            out -= cur * c64(w_chi, 0.0);
        }
        out
    }

    // ─── Dense and diagonal forms ───────────────────────────────────────────

    /// Dense matrix on `n_total` qubits (≤ [`crate::ham::DENSE_QUBIT_CAP`]),
    /// assembled column-by-column through the matrix-free apply.
    pub fn dense(&self) -> Result<CMat> {
        let nt = self.n_total();
        if nt > crate::ham::DENSE_QUBIT_CAP {
            return Err(Error::DenseTooLarge {
                qubits: nt,
                cap: crate::ham::DENSE_QUBIT_CAP,
            });
        }
        let dim = dim_of(nt);
        let mut out = CMat::zeros(dim, dim);
        for j in 0..dim {
            let col = self.apply(&crate::linalg::basis_state(dim, j));
            out.set_column(j, &col);
        }
        Ok(out)
    }

    /// Exact diagonal of the amplified operator when the base is classical
    /// (every term diagonal); `None` otherwise.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        if !self.base.is_classical() {
            return None;
        }
        let n = self.base.n_qubits();
        let l = self.registers();
        let nt = n * l;
        assert!(nt <= 24, "diagonal enumeration above 2^24 entries is not supported");
        let dim_reg = dim_of(n);
        let dim = dim_of(nt);
        // Per-term violation value on a full register index (0 or 1 for
        // projectors; H itself has fractional diagonal).
        let viol = |term: &LocalProjector, x: usize| -> f64 {
            let mut local = 0usize;
            for (pos, &q) in term.support().iter().enumerate() {
                local |= bit_of(x, q, n) << (term.support().len() - 1 - pos);
            }
            term.matrix()[(local, local)].re
        };
        let mut term_tables: Vec<Vec<f64>> = Vec::with_capacity(self.base.m());
        for term in self.base.terms() {
            term_tables.push((0..dim_reg).map(|x| viol(term, x)).collect());
        }
        let regs_of = |idx: usize| -> Vec<usize> {
            // Register 0 is the most significant block.
            (0..l)
                .map(|r| (idx >> ((l - 1 - r) * n)) & (dim_reg - 1))
                .collect()
        };
        let mut diag = vec![0.0f64; dim];
        match self.mode {
            Mode::Walks => {
                for (idx, out) in diag.iter_mut().enumerate() {
                    let xs = regs_of(idx);
                    let mut val = 0.0;
                    for (chi, lw) in self.layer_walks.iter().enumerate() {
                        let graph = &lw.graph;
                        let (m, d) = (graph.m(), graph.d());
                        let mut alpha: Vec<f64> = (0..m)
                            .map(|v| 1.0 - term_tables[self.term_of_vertex(chi, v)][xs[0]])
                            .collect();
                        for &x in &xs[1..] {
                            let mut next = vec![0.0; m];
                            for (u, slot) in next.iter_mut().enumerate() {
                                let mut acc = 0.0;
                                for p in 0..d {
                                    acc += alpha[graph.step(u, p)];
                                }
                                *slot = acc * (1.0 - term_tables[self.term_of_vertex(chi, u)][x]);
                            }
                            alpha = next;
                        }
                        let total = m as f64 * (d as f64).powi(l as i32 - 1);
                        let avg: f64 = alpha.iter().sum::<f64>() / total;
                        val += self.base.weights()[chi] * (1.0 - avg);
                    }
                    *out = val;
                }
            }
            Mode::Tensor => {
                let h_diag: Vec<f64> = (0..dim_reg)
                    .map(|x| {
                        self.base
                            .layers()
                            .iter()
                            .enumerate()
                            .map(|(chi, layer)| {
                                self.base.weights()[chi]
                                    * layer.iter().map(|&i| term_tables[i][x]).sum::<f64>()
                                    / layer.len() as f64
                            })
                            .sum()
                    })
                    .collect();
                for (idx, out) in diag.iter_mut().enumerate() {
                    let prod: f64 = regs_of(idx).iter().map(|&x| 1.0 - h_diag[x]).product();
                    *out = 1.0 - prod;
                }
            }
            Mode::SingleShot => {
                for (idx, out) in diag.iter_mut().enumerate() {
                    let xs = regs_of(idx);
                    let mut val = 1.0;
                    for (chi, layer) in self.base.layers().iter().enumerate() {
                        let mut prod = 1.0;
                        for &x in &xs {
                            for &i in layer {
                                prod *= 1.0 - term_tables[i][x];
                            }
                        }
                        val -= self.base.weights()[chi] * prod;
                    }
                    *out = val;
                }
            }
        }
        Some(diag)
    }

    /// Smallest eigenvalue with an automatically chosen method: exact
    /// diagonal scan for classical bases, otherwise seeded Lanczos through
    /// the matrix-free apply.
    pub fn lambda_min(&self, tol: f64, max_iter: usize, seed: u64) -> Result<SpectralResult> {
        if let Some(diag) = self.diagonal() {
            return Ok(min_eig_diagonal(&diag));
        }
        let dim = dim_of(self.n_total());
        min_eig_iterative(|v| self.apply(v), dim, tol, max_iter, seed)
    }

    // ─── Path terms ─────────────────────────────────────────────────────────

    /// Decode one walk of one layer into a path term.
    pub fn path_term(&self, chi: usize, walk_index: u64) -> Result<PathTerm> {
        if self.mode != Mode::Walks {
            return Err(Error::InvalidParameter(
                "path terms exist only for walk amplification".into(),
            ));
        }
        let lw = &self.layer_walks[chi];
        let walks = WalkFamily::new(&lw.graph, self.registers())?;
        if walk_index >= walks.count() {
            return Err(Error::InvalidParameter(format!(
                "walk index {walk_index} out of range {} for layer {chi}",
                walks.count()
            )));
        }
        let vertices = walks.walk(walk_index);
        let term_indices = vertices.iter().map(|&v| self.term_of_vertex(chi, v)).collect();
        Ok(PathTerm {
            layer: chi,
            walk_index,
            vertices,
            term_indices,
        })
    }

    /// Materialise a path term as a projector on the union of its shifted
    /// supports: `Pi_f = I - prod_j (I - Pi_f(j))`.  Returns the sorted
    /// global support and the dense matrix on it.
    pub fn path_term_projector(&self, term: &PathTerm) -> Result<(Vec<usize>, CMat)> {
        let n = self.base.n_qubits();
        let mut union: Vec<usize> = Vec::new();
        for (reg, &ti) in term.term_indices.iter().enumerate() {
            for &q in self.base.terms()[ti].support() {
                let qq = q + reg * n;
                if !union.contains(&qq) {
                    union.push(qq);
                }
            }
        }
        union.sort_unstable();
        if union.len() > crate::ham::DENSE_QUBIT_CAP {
            return Err(Error::DenseTooLarge {
                qubits: union.len(),
                cap: crate::ham::DENSE_QUBIT_CAP,
            });
        }
        let dim = 1usize << union.len();
        let mut prod = identity(dim);
        for (reg, &ti) in term.term_indices.iter().enumerate() {
            let t = &self.base.terms()[ti];
            let local: Vec<usize> = t
                .support()
                .iter()
                .map(|&q| {
                    union
                        .iter()
                        .position(|&u| u == q + reg * n)
                        .expect("support inside union")
                })
                .collect();
            let comp = identity(1 << t.support().len()) - t.matrix();
            prod = embed_global(&comp, &local, union.len()) * prod;
        }
        Ok((union, identity(dim) - prod))
    }

    /// Materialise the whole walk operator as a layered Hamiltonian on
    /// `n_total` qubits: one projector per walk, layer structure and weights
    /// carried over from the base.
    pub fn to_layered(&self) -> Result<LayeredHamiltonian> {
        if self.mode != Mode::Walks {
            return Err(Error::InvalidParameter(
                "only walk amplification materialises to a layered Hamiltonian".into(),
            ));
        }
        let mut terms = Vec::new();
        let mut layers = Vec::new();
        for chi in 0..self.base.g() {
            let walks = WalkFamily::new(&self.layer_walks[chi].graph, self.registers())?;
            let mut layer = Vec::new();
            for idx in 0..walks.count() {
                let pt = self.path_term(chi, idx)?;
                let (support, matrix) = self.path_term_projector(&pt)?;
                layer.push(terms.len());
                terms.push(LocalProjector::new(support, matrix)?);
            }
            layers.push(layer);
        }
        LayeredHamiltonian::build(
            self.n_total(),
            terms,
            Some(layers),
            Some(self.base.weights().to_vec()),
        )
    }

    // ─── Serialisation ──────────────────────────────────────────────────────

    /// Schema form: stores the base, mode, `t` and resolved graphs — never
    /// the expanded path terms.
    pub fn to_schema(&self) -> AmplifiedSchema {
        AmplifiedSchema {
            base: self.base.to_schema(),
            t: self.t,
            mode: self.mode,
            graphs: self
                .layer_walks
                .iter()
                .map(|lw| lw.graph.to_schema())
                .collect(),
        }
    }

    /// Rebuild from the schema form, revalidating and recertifying.
    pub fn from_schema(schema: &AmplifiedSchema) -> Result<Self> {
        let base = LayeredHamiltonian::from_schema(&schema.base)?;
        match schema.mode {
            Mode::Walks => {
                let graphs: Result<Vec<ExpanderGraph>> =
                    schema.graphs.iter().map(ExpanderGraph::from_schema).collect();
                amplify_derandomised_with_graphs(&base, schema.t, graphs?)
            }
            Mode::Tensor => amplify_full_tensor(&base, schema.t),
            Mode::SingleShot => amplify_single_shot(&base, schema.t),
        }
    }
}

/// Serialised amplified operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifiedSchema {
    pub base: HamiltonianSchema,
    pub t: usize,
    pub mode: Mode,
    #[serde(default)]
    pub graphs: Vec<GraphSchema>,
}

/// `C_mu = max_i sum_{j≠i, j in [L]} mu^{|i-j|}` over `L` positions.
pub fn c_mu_positions(mu: f64, l: usize) -> f64 {
    let mut best = 0.0f64;
    for i in 0..l {
        let mut acc = 0.0;
        for j in 0..l {
            if j != i {
                acc += mu.powi((j as i32 - i as i32).abs());
            }
        }
        best = best.max(acc);
    }
    best
}

/// Closed-form spectrum map of the tensor mode: `λ -> 1 - (1 - λ)^t`.
pub fn tensor_lambda(lambda: f64, t: usize) -> f64 {
    1.0 - (1.0 - lambda).powi(t as i32)
}

/// Guarantee floor of the single-shot mode:
/// `(min_chi w_chi / 4g) (1 - (1 + m γ / g²)^{-t})`, valid when every
/// projector fails to commute with at most `g - 1` others and `γ > 0` is the
/// base ground energy.
pub fn single_shot_floor(base: &LayeredHamiltonian, gamma: f64, t: usize) -> f64 {
    let g = base.g() as f64;
    let m = base.m() as f64;
    (base.min_weight() / (4.0 * g)) * (1.0 - (1.0 + m * gamma / (g * g)).powi(-(t as i32)))
}

// ─── Iteration ──────────────────────────────────────────────────────────────

/// Ledger of one materialise-and-reamplify round.
#[derive(Debug, Clone, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub n_qubits: usize,
    pub m: usize,
    pub g: usize,
    pub lambda_min: f64,
    /// Completeness check `λ_min(M_i) ≤ 2t · λ_min(M_{i-1})`.
    pub completeness: CheckRecord,
}

/// Full iteration ledger.
#[derive(Debug, Clone, Serialize)]
pub struct IterationReport {
    pub t: usize,
    pub rounds: Vec<RoundRecord>,
}

impl IterationReport {
    pub fn pass(&self) -> bool {
        self.rounds.iter().all(|r| r.completeness.pass)
    }
}

/// Iterate the walk amplification: `M_i = (M_{i-1})^(2t)` materialised back
/// into a layered Hamiltonian after each round.  Stops with an error when a
/// round would exceed `qubit_budget` total qubits.  Returns all rounds
/// `M_0, …, M_rounds` plus per-round completeness records.
pub fn iterate(
    base: &LayeredHamiltonian,
    t: usize,
    rounds: usize,
    family: GraphFamily,
    qubit_budget: usize,
    seed: u64,
) -> Result<(Vec<LayeredHamiltonian>, IterationReport)> {
    let mut ms = vec![base.clone()];
    let mut records = Vec::new();
    let mut lambda_prev = round_lambda_min(base, seed)?;
    for round in 1..=rounds {
        let prev = ms.last().expect("non-empty");
        let next_qubits = prev.n_qubits() * 2 * t;
        if next_qubits > qubit_budget {
            return Err(Error::QubitBudget {
                needed: next_qubits,
                budget: qubit_budget,
            });
        }
        let amp = amplify_derandomised(prev, t, family)?;
        let next = amp.to_layered()?;
        let lambda = round_lambda_min(&next, seed)?;
        let completeness = CheckRecord::le(
            &format!("iterate.round{round}.completeness"),
            "lambda_min(M_i) <= 2t * lambda_min(M_{i-1})",
            lambda,
            2.0 * t as f64 * lambda_prev,
            tol::BOUND_CHECK,
        );
        records.push(RoundRecord {
            round,
            n_qubits: next.n_qubits(),
            m: next.m(),
            g: next.g(),
            lambda_min: lambda,
            completeness,
        });
        lambda_prev = lambda;
        ms.push(next);
    }
    Ok((
        ms,
        IterationReport {
            t,
            rounds: records,
        },
    ))
}

fn round_lambda_min(h: &LayeredHamiltonian, seed: u64) -> Result<f64> {
    if h.is_classical() {
        // Diagonal Hamiltonian: scan the exact diagonal.
        let dim = dim_of(h.n_qubits());
        let mut best = f64::INFINITY;
        for idx in 0..dim {
            let mut val = 0.0;
            for (chi, layer) in h.layers().iter().enumerate() {
                let mut acc = 0.0;
                for &i in layer {
                    let term = &h.terms()[i];
                    let mut local = 0usize;
                    for (pos, &q) in term.support().iter().enumerate() {
                        local |= bit_of(idx, q, h.n_qubits()) << (term.support().len() - 1 - pos);
                    }
                    acc += term.matrix()[(local, local)].re;
                }
                val += h.weights()[chi] * acc / layer.len() as f64;
            }
            best = best.min(val);
        }
        return Ok(best);
    }
    let dim = dim_of(h.n_qubits());
    Ok(min_eig_iterative(|v| h.apply(v), dim, tol::EIG_ITER, 4000, seed)?.value)
}

/// Parameters suggested for driving the ground energy to the
/// `(1/3) ln(t)/t` floor by repeated squaring-style amplification.
#[derive(Debug, Clone, Serialize)]
pub struct IterationParams {
    pub t: usize,
    /// Inverse polynomial target `1/p_n` the initial promise gap sits at.
    pub p_n: f64,
    /// Round count `ell = ceil(6 ln p_n / ln t)`.
    pub ell: usize,
    /// Qubit blow-up `(2t)^ell` (f64; may overflow to infinity).
    pub register_blowup: f64,
    pub log10_register_blowup: f64,
    /// Energy floor `(1/3) ln(t) / t` the iteration drives towards.
    pub energy_floor: f64,
    /// Clause blow-up `d^{(2t-1) ell}` for degree-`d` walk graphs.
    pub log10_clause_multiplier: f64,
    /// Locality after `ell` rounds, `k (2t)^ell`, in log10.
    pub log10_locality: f64,
    /// Soundness prefactor `eta = 1 / (20 max(1 + C_mu, omega_min))`.
    pub eta: f64,
    /// `t^(1/3) >= ln t` (asymptotic regime flag).
    pub cond_cuberoot: bool,
    /// `t > eta^{-6}` (asymptotic regime flag).
    pub cond_eta: bool,
    /// `t >= 10^5` (asymptotic regime flag).
    pub cond_large_t: bool,
}

/// Plan an iteration schedule: how many rounds of `2t`-fold amplification
/// lift a `1/p_n` gap to the `(1/3) ln(t)/t` floor, and what it costs.
///
/// `d` is the walk-graph degree, `k` the base locality, `c_mu` and
/// `omega_min` the soundness constants of the base instance.
pub fn choose_iteration_params(
    t: usize,
    p_n: f64,
    d: usize,
    k: usize,
    c_mu: f64,
    omega_min: f64,
) -> Result<IterationParams> {
    if t < 2 {
        return Err(Error::InvalidParameter(
            "iteration planning needs t >= 2 (ln t must be positive)".into(),
        ));
    }
    if p_n <= 1.0 {
        return Err(Error::InvalidParameter("p_n must exceed 1".into()));
    }
    let tf = t as f64;
    // Guard the ceil against float dust: 6 ln 512 / ln 8 must give exactly 18.
    let ratio = 6.0 * p_n.ln() / tf.ln();
    let ell = (ratio - 1e-9).ceil() as usize;
    let two_t = 2.0 * tf;
    let register_blowup = two_t.powi(ell as i32);
    let log10_register_blowup = ell as f64 * two_t.log10();
    let log10_clause_multiplier = ((2 * t - 1) * ell) as f64 * (d as f64).log10();
    let log10_locality = (k as f64).log10() + log10_register_blowup;
    let eta = 1.0 / (20.0 * (1.0 + c_mu).max(omega_min));
    Ok(IterationParams {
        t,
        p_n,
        ell,
        register_blowup,
        log10_register_blowup,
        energy_floor: tf.ln() / (3.0 * tf),
        log10_clause_multiplier,
        log10_locality,
        eta,
        cond_cuberoot: tf.cbrt() >= tf.ln(),
        cond_eta: tf > eta.powi(-6),
        cond_large_t: tf >= 1e5,
    })
}
