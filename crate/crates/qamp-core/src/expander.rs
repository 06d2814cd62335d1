//! Regular graph families, their rotation maps, spectral certification, and
//! exhaustive walk enumeration.
//!
//! A `d`-regular multigraph on `m` vertices is stored as a *rotation map*
//! `rot(v, p) = (v', p')`: leaving vertex `v` through port `p` arrives at
//! `v'` on port `p'`, and the map is an involution.  Walks of length `L`
//! (counting vertices) are indexed by a start vertex and `L − 1` port
//! choices, so there are exactly `m · d^(L-1)` of them and parallel edges
//! and self-loops are counted with multiplicity.
//!
//! Every constructed graph carries a certified expansion parameter
//! `mu = max_{k≠top} |λ_k(A/d)|` computed by a dense symmetric eigensolve.
//! `mu` lies in `[0, 1]`; `mu = 1` is *degenerate* (bipartite or
//! disconnected — even cycles are the canonical example) and is flagged
//! rather than rejected, because walk-averaging remains well defined and the
//! completeness direction of amplification never uses expansion.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::CheckRecord;
use crate::tol;

/// Built-in families plus user-supplied rotation maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFamily {
    /// Complete graph with one self-loop per vertex: `d = m`, `mu = 0`.
    CompleteLoops,
    /// Complete graph without loops: `d = m − 1`, `mu = 1/(m−1)`.
    Complete,
    /// Plain cycle: `d = 2`, `mu = max(|cos(2πk/m)|) — 1 for even `m`.
    Cycle,
    /// Circulant with offsets `±1, ±⌊√m⌋`: `d = 4`.
    Chords,
    /// Arbitrary user-supplied rotation map (certified on load).
    Custom,
}

impl GraphFamily {
    /// Smallest vertex count the family supports.
    pub fn min_vertices(self) -> usize {
        match self {
            GraphFamily::CompleteLoops => 1,
            GraphFamily::Complete => 2,
            GraphFamily::Cycle | GraphFamily::Chords => 3,
            GraphFamily::Custom => 1,
        }
    }

    /// Stable lowercase name (matches the serialised form).
    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::CompleteLoops => "complete_loops",
            GraphFamily::Complete => "complete",
            GraphFamily::Cycle => "cycle",
            GraphFamily::Chords => "chords",
            GraphFamily::Custom => "custom",
        }
    }
}

impl std::str::FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete_loops" => Ok(GraphFamily::CompleteLoops),
            "complete" => Ok(GraphFamily::Complete),
            "cycle" => Ok(GraphFamily::Cycle),
            "chords" => Ok(GraphFamily::Chords),
            "custom" => Ok(GraphFamily::Custom),
            other => Err(Error::InvalidParameter(format!(
                "unknown graph family '{other}' \
                 (expected complete_loops | complete | cycle | chords | custom)"
            ))),
        }
    }
}

/// Largest vertex count for which `mu` is certified by a dense eigensolve.
pub const CERTIFY_VERTEX_CAP: usize = 512;

/// A certified `d`-regular multigraph.
#[derive(Debug, Clone)]
pub struct ExpanderGraph {
    m: usize,
    d: usize,
    rot: Vec<Vec<(usize, usize)>>,
    mu: f64,
    family: GraphFamily,
}

impl ExpanderGraph {
    /// Build one of the closed-form families on `m` vertices and certify its
    /// expansion parameter.
    pub fn build(family: GraphFamily, m: usize) -> Result<Self> {
        if family == GraphFamily::Custom {
            return Err(Error::InvalidParameter(
                "custom graphs are loaded from a rotation map, not built by size".into(),
            ));
        }
        if m < family.min_vertices() {
            return Err(Error::FamilyTooSmall {
                family: family.name().into(),
                min: family.min_vertices(),
                m,
            });
        }
        let rot: Vec<Vec<(usize, usize)>> = match family {
            GraphFamily::CompleteLoops => (0..m)
                .map(|v| (0..m).map(|p| (p, v)).collect())
                .collect(),
            GraphFamily::Complete => (0..m)
                .map(|v| {
                    (0..m - 1)
                        .map(|p| {
                            let u = if p < v { p } else { p + 1 };
                            let back = if v < u { v } else { v - 1 };
                            (u, back)
                        })
                        .collect()
                })
                .collect(),
            GraphFamily::Cycle => (0..m)
                .map(|v| vec![((v + 1) % m, 1), ((v + m - 1) % m, 0)])
                .collect(),
            GraphFamily::Chords => {
                let s = (m as f64).sqrt().floor() as usize;
                (0..m)
                    .map(|v| {
                        vec![
                            ((v + 1) % m, 1),
                            ((v + m - 1) % m, 0),
                            ((v + s) % m, 3),
                            ((v + m - s) % m, 2),
                        ]
                    })
                    .collect()
            }
            GraphFamily::Custom => unreachable!(),
        };
        Self::from_rotation(rot, family)
    }

    /// Validate a rotation map (ranges, involution), certify `mu`, and wrap.
    pub fn from_rotation(rot: Vec<Vec<(usize, usize)>>, family: GraphFamily) -> Result<Self> {
        let m = rot.len();
        if m == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let d = rot[0].len();
        if d == 0 {
            return Err(Error::InvalidGraph("degree 0".into()));
        }
        for (v, ports) in rot.iter().enumerate() {
            if ports.len() != d {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v} has {} ports, expected {d}",
                    ports.len()
                )));
            }
            for (p, &(u, q)) in ports.iter().enumerate() {
                if u >= m || q >= d {
                    return Err(Error::InvalidGraph(format!(
                        "rotation({v},{p}) = ({u},{q}) out of range"
                    )));
                }
                if rot[u][q] != (v, p) {
                    return Err(Error::InvalidGraph(format!(
                        "rotation is not an involution at ({v},{p}): \
                         maps to ({u},{q}) which maps back to {:?}",
                        rot[u][q]
                    )));
                }
            }
        }
        let mu = certify_mu(&rot, m, d)?;
        Ok(ExpanderGraph { m, d, rot, mu, family })
    }

    /// Vertex count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Degree (port count per vertex).
    pub fn d(&self) -> usize {
        self.d
    }

    /// Certified `max_{k≠top} |λ_k(A/d)| ∈ [0, 1]`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// True when `mu` is 1 up to certification precision (bipartite or
    /// disconnected): walk positions then fail to decorrelate.
    pub fn is_degenerate(&self) -> bool {
        self.mu >= 1.0 - 1e-9
    }

    /// Family used to build this graph.
    pub fn family(&self) -> GraphFamily {
        self.family
    }

    /// Neighbor reached through port `p` of vertex `v`.
    pub fn step(&self, v: usize, p: usize) -> usize {
        self.rot[v][p].0
    }

    /// Full rotation map entry.
    pub fn rotation(&self, v: usize, p: usize) -> (usize, usize) {
        self.rot[v][p]
    }

    /// Multigraph adjacency counts `A[v][u]` (row sums equal `d`).
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; self.m]; self.m];
        for v in 0..self.m {
            for p in 0..self.d {
                a[v][self.rot[v][p].0] += 1;
            }
        }
        a
    }

    /// One step of the transition operator `P = A/d` on a real vector.
    pub fn apply_p(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.m);
        let mut out = vec![0.0; self.m];
        for v in 0..self.m {
            let mut acc = 0.0;
            for p in 0..self.d {
                acc += x[self.rot[v][p].0];
            }
            out[v] = acc / self.d as f64;
        }
        out
    }

    /// Exact integer power `A^k` in `u128` (for walk-count identities).
    pub fn adjacency_power(&self, k: usize) -> Vec<Vec<u128>> {
        let a = self.adjacency();
        let mut acc: Vec<Vec<u128>> =
            (0..self.m).map(|i| (0..self.m).map(|j| u128::from(i == j)).collect()).collect();
        for _ in 0..k {
            let mut next = vec![vec![0u128; self.m]; self.m];
            for (i, row) in acc.iter().enumerate() {
                for (t, &c) in row.iter().enumerate() {
                    if c != 0 {
                        for (j, &add) in a[t].iter().enumerate() {
                            next[i][j] += c * u128::from(add);
                        }
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// Serialisable schema form.
    pub fn to_schema(&self) -> GraphSchema {
        GraphSchema {
            m: self.m,
            d: self.d,
            rotation: self
                .rot
                .iter()
                .map(|ports| ports.iter().map(|&(u, q)| [u, q]).collect())
                .collect(),
            family: self.family,
        }
    }

    /// Load from the schema form, revalidating and recertifying.
    pub fn from_schema(schema: &GraphSchema) -> Result<Self> {
        let rot: Vec<Vec<(usize, usize)>> = schema
            .rotation
            .iter()
            .map(|ports| ports.iter().map(|&[u, q]| (u, q)).collect())
            .collect();
        let g = Self::from_rotation(rot, schema.family)?;
        if g.m != schema.m || g.d != schema.d {
            return Err(Error::InvalidGraph(format!(
                "declared (m={}, d={}) but rotation map has (m={}, d={})",
                schema.m, schema.d, g.m, g.d
            )));
        }
        Ok(g)
    }
}

/// Serialised regular graph: rotation entries are `[vertex, port]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSchema {
    pub m: usize,
    pub d: usize,
    pub rotation: Vec<Vec<[usize; 2]>>,
    pub family: GraphFamily,
}

/// Dense certification of the expansion parameter.
fn certify_mu(rot: &[Vec<(usize, usize)>], m: usize, d: usize) -> Result<f64> {
    if m > CERTIFY_VERTEX_CAP {
        return Err(Error::InvalidGraph(format!(
            "{m} vertices exceed the certification cap of {CERTIFY_VERTEX_CAP}"
        )));
    }
    let mut p = DMatrix::<f64>::zeros(m, m);
    for (v, ports) in rot.iter().enumerate() {
        for &(u, _) in ports {
            p[(v, u)] += 1.0 / d as f64;
        }
    }
    let eig = p.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    if (vals[0] - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidGraph(format!(
            "top transition eigenvalue {} deviates from 1 (not d-regular?)",
            vals[0]
        )));
    }
    let mu = vals[1..]
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if mu > 1.0 + 1e-9 {
        return Err(Error::InvalidGraph(format!(
            "second eigenvalue modulus {mu} exceeds 1"
        )));
    }
    Ok(mu.min(1.0))
}

/// The family of all length-`L` walks on a graph (`L` vertices, `L − 1`
/// steps), exhaustively indexable.
#[derive(Debug, Clone, Copy)]
pub struct WalkFamily<'a> {
    graph: &'a ExpanderGraph,
    length: usize,
    count: u64,
}

impl<'a> WalkFamily<'a> {
    /// Walks of `length` vertices; errors when `m · d^(length-1)` cannot be
    /// enumerated below `2^63`.
    pub fn new(graph: &'a ExpanderGraph, length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidParameter("walk length must be at least 1".into()));
        }
        let mut count: u128 = graph.m as u128;
        for _ in 0..length - 1 {
            count = count.saturating_mul(graph.d as u128);
            if count > 1u128 << 63 {
                return Err(Error::WalkCountOverflow {
                    m: graph.m,
                    d: graph.d,
                    exp: length - 1,
                });
            }
        }
        Ok(WalkFamily {
            graph,
            length,
            count: count as u64,
        })
    }

    /// Total walk count `m · d^(L-1)`.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Vertex count per walk.
    pub fn length(&self) -> usize {
        self.length
    }

    /// Decode walk `idx` into its vertex sequence.  The index encodes the
    /// start vertex in the most significant digit and then one base-`d` digit
    /// per step, earliest step first.
    pub fn walk(&self, idx: u64) -> Vec<usize> {
        assert!(idx < self.count, "walk index {idx} out of range {}", self.count);
        let d = self.graph.d as u64;
        let steps = self.length - 1;
        let mut digits = vec![0usize; steps];
        let mut rest = idx;
        for s in (0..steps).rev() {
            digits[s] = (rest % d) as usize;
            rest /= d;
        }
        let mut vs = Vec::with_capacity(self.length);
        vs.push(rest as usize);
        for &p in &digits {
            vs.push(self.graph.step(*vs.last().expect("non-empty"), p));
        }
        vs
    }

    /// Iterate all walks in index order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count).map(move |i| self.walk(i))
    }
}

/// Exact stationary two-position marginal of a uniformly random walk:
/// `M[u][v] = Pr[f(i) = u, f(j) = v] = (1/m) (P^{j-i})_{uv}` for 1-based
/// positions `i < j` of a walk long enough to contain them.
pub fn stationary_walk_marginals(graph: &ExpanderGraph, i: usize, j: usize) -> DMatrix<f64> {
    assert!(i >= 1 && i < j, "need 1 <= i < j, got ({i},{j})");
    let k = j - i;
    let pk = graph.adjacency_power(k);
    let m = graph.m();
    let scale = 1.0 / (m as f64 * (graph.d() as f64).powi(k as i32));
    DMatrix::from_fn(m, m, |u, v| pk[u][v] as f64 * scale)
}

/// Check the walk-correlation quadratic form for `a, b ∈ [0,1]^m`:
///
/// ```text
///     a^T P^s b  <=  (1/m) ‖a‖₁ ‖b‖₁  +  mu^s (‖a‖₁ + ‖b‖₁).
/// ```
pub fn check_quadratic_form(
    graph: &ExpanderGraph,
    a: &[f64],
    b: &[f64],
    steps: usize,
) -> Result<CheckRecord> {
    for (name, x) in [("a", a), ("b", b)] {
        if x.len() != graph.m() {
            return Err(Error::InvalidParameter(format!(
                "vector {name} has {} entries, graph has {} vertices",
                x.len(),
                graph.m()
            )));
        }
        if x.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidParameter(format!(
                "vector {name} has entries outside [0,1]"
            )));
        }
    }
    let mut pb = b.to_vec();
    for _ in 0..steps {
        pb = graph.apply_p(&pb);
    }
    let lhs: f64 = a.iter().zip(&pb).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().sum();
    let nb: f64 = b.iter().sum();
    let rhs = na * nb / graph.m() as f64 + graph.mu().powi(steps as i32) * (na + nb);
    Ok(CheckRecord::le(
        "walk-correlation",
        "a^T P^s b <= (1/m)|a|_1 |b|_1 + mu^s (|a|_1 + |b|_1)",
        lhs,
        rhs,
        tol::INEQUALITY,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_loops_is_perfectly_mixing() {
        for m in [1, 2, 4, 6] {
            let g = ExpanderGraph::build(GraphFamily::CompleteLoops, m).unwrap();
            assert_eq!(g.d(), m);
            assert!(g.mu() < 1e-12, "mu = {} for m = {m}", g.mu());
        }
    }

    #[test]
    fn complete_graph_mu_is_one_over_m_minus_one() {
        let g = ExpanderGraph::build(GraphFamily::Complete, 4).unwrap();
        assert_eq!(g.d(), 3);
        assert!(
            (g.mu() - 1.0 / 3.0).abs() < 1e-10,
            "K4 transition spectrum must give mu = 1/3, got {}",
            g.mu()
        );
    }

    #[test]
    fn cycle_mu_even_is_degenerate_odd_is_cosine() {
        let even = ExpanderGraph::build(GraphFamily::Cycle, 8).unwrap();
        assert!(
            (even.mu() - 1.0).abs() < 1e-10,
            "even cycles are bipartite: mu must certify as 1, got {}",
            even.mu()
        );
        assert!(even.is_degenerate());
        let odd5 = ExpanderGraph::build(GraphFamily::Cycle, 5).unwrap();
        assert!(
            (odd5.mu() - 0.809_016_994_374_947_45).abs() < 1e-10,
            "5-cycle mu must be cos(pi/5), got {}",
            odd5.mu()
        );
        let odd7 = ExpanderGraph::build(GraphFamily::Cycle, 7).unwrap();
        assert!((odd7.mu() - 0.900_968_867_902_419_15).abs() < 1e-10);
        assert!(!odd7.is_degenerate());
    }

    #[test]
    fn chords_on_eight_vertices_halves_mu() {
        let g = ExpanderGraph::build(GraphFamily::Chords, 8).unwrap();
        assert_eq!(g.d(), 4);
        assert!(
            (g.mu() - 0.5).abs() < 1e-10,
            "chorded 8-cycle must certify mu = 1/2, got {}",
            g.mu()
        );
    }

    #[test]
    fn rotation_is_involutive_for_all_families() {
        for (fam, m) in [
            (GraphFamily::CompleteLoops, 5),
            (GraphFamily::Complete, 6),
            (GraphFamily::Cycle, 7),
            (GraphFamily::Chords, 9),
        ] {
            let g = ExpanderGraph::build(fam, m).unwrap();
            for v in 0..g.m() {
                for p in 0..g.d() {
                    let (u, q) = g.rotation(v, p);
                    assert_eq!(g.rotation(u, q), (v, p), "{fam:?} rotation not involutive");
                }
            }
        }
    }

    #[test]
    fn walk_count_and_decoding() {
        let g = ExpanderGraph::build(GraphFamily::Cycle, 3).unwrap();
        let walks = WalkFamily::new(&g, 2).unwrap();
        assert_eq!(walks.count(), 6, "3 starts x 2 ports");
        let all: Vec<Vec<usize>> = walks.iter().collect();
        assert_eq!(all.len(), 6);
        // Every consecutive pair must be an edge, and each ordered edge
        // appears exactly once for L = 2 on the cycle.
        let mut seen = std::collections::HashSet::new();
        for w in &all {
            assert_eq!(w.len(), 2);
            assert!(seen.insert((w[0], w[1])), "duplicate walk {w:?}");
        }
    }

    #[test]
    fn walk_overflow_is_an_error() {
        let g = ExpanderGraph::build(GraphFamily::Complete, 17).unwrap();
        // 17 * 16^(L-1) > 2^63 for L - 1 = 16: 16^16 = 2^64.
        let err = WalkFamily::new(&g, 17).unwrap_err();
        assert!(matches!(err, Error::WalkCountOverflow { .. }), "got {err}");
    }

    #[test]
    fn stationary_marginals_match_exhaustive_counts() {
        let g = ExpanderGraph::build(GraphFamily::Chords, 5).unwrap();
        let length = 4;
        let walks = WalkFamily::new(&g, length).unwrap();
        for (i, j) in [(1, 2), (1, 4), (2, 3)] {
            let marg = stationary_walk_marginals(&g, i, j);
            let mut counts = vec![vec![0u64; g.m()]; g.m()];
            for w in walks.iter() {
                counts[w[i - 1]][w[j - 1]] += 1;
            }
            // Exact identity: counts[u][v] = (A^{j-i})_{uv} d^{L-1-(j-i)}.
            let ak = g.adjacency_power(j - i);
            let dpow = (g.d() as u128).pow((length - 1 - (j - i)) as u32);
            for u in 0..g.m() {
                for v in 0..g.m() {
                    assert_eq!(
                        u128::from(counts[u][v]),
                        ak[u][v] * dpow,
                        "count mismatch at ({u},{v}) for positions ({i},{j})"
                    );
                    let emp = counts[u][v] as f64 / walks.count() as f64;
                    assert!(
                        (emp - marg[(u, v)]).abs() < 1e-12,
                        "marginal mismatch at ({u},{v})"
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_form_unit_vectors_on_k4() {
        let g = ExpanderGraph::build(GraphFamily::Complete, 4).unwrap();
        let mut a = vec![0.0; 4];
        let mut b = vec![0.0; 4];
        a[0] = 1.0;
        b[1] = 1.0;
        let rec = check_quadratic_form(&g, &a, &b, 1).unwrap();
        // lhs = P_{01} = 1/3; rhs = 1/4 + (1/3)(2) significantly larger.
        assert!((rec.lhs - 1.0 / 3.0).abs() < 1e-12);
        assert!(rec.pass, "record {rec:?}");
    }

    #[test]
    fn quadratic_form_even_cycle_needs_honest_mu() {
        // On the 8-cycle with a = b = even-vertex indicator and s = 6 the
        // bound only holds because mu certifies as 1; the bipartite structure
        // keeps all mass on even vertices after an even number of steps.
        let g = ExpanderGraph::build(GraphFamily::Cycle, 8).unwrap();
        let a: Vec<f64> = (0..8).map(|v| f64::from(v % 2 == 0)).collect();
        let rec = check_quadratic_form(&g, &a, &a, 6).unwrap();
        assert!((rec.lhs - 4.0).abs() < 1e-12, "bipartite mass must stay even");
        assert!(rec.pass, "with mu = 1 the bound must still hold: {rec:?}");
        let fake_rhs = 16.0 / 8.0 + 0.707_106_781_186_547_6_f64.powi(6) * 8.0;
        assert!(
            rec.lhs > fake_rhs,
            "sanity: the bound would be false under mu = cos(pi/4)"
        );
    }

    #[test]
    fn schema_round_trip_and_involution_rejection() {
        let g = ExpanderGraph::build(GraphFamily::Cycle, 5).unwrap();
        let schema = g.to_schema();
        let g2 = ExpanderGraph::from_schema(&schema).unwrap();
        assert_eq!(g2.m(), 5);
        assert!((g2.mu() - g.mu()).abs() < 1e-14);

        let mut bad = schema;
        bad.rotation[0][0] = [2, 0]; // break the involution
        let err = ExpanderGraph::from_schema(&bad).unwrap_err();
        assert!(err.to_string().contains("involution"), "got {err}");
    }
}
