//! Deterministic corpus of small layered Hamiltonians for exhaustive
//! verification.
//!
//! The corpus spans every analysis regime the bounds distinguish:
//!
//! * **classical diagonal** constraint systems (pair-satisfaction clauses and
//!   colouring-style disagreement clauses) — exact diagonal scans apply and
//!   ground states are basis states;
//! * **commuting but non-classical** parity-check projectors (`(I−Z⊗Z)/2`,
//!   `(I−X⊗X)/2` on shared pairs commute) — entangled ground states with a
//!   still-commuting layer structure;
//! * **genuinely non-commuting** two-layer instances (diagonal pinning
//!   against transverse `|+⟩⟨+|` fields) — frustrated, entangled ground
//!   states;
//! * the **degenerate single-projector** instance, where every amplification
//!   family coincides.
//!
//! Anchor instances are fixed closed-form items reused by tests; the seeded
//! remainder is drawn from a ChaCha8 stream so one seed always regenerates
//! the identical corpus, byte for byte.  All instances keep `n ≤ 4` qubits
//! and at most 3 layers; instances on 4 qubits are all classical so that
//! their amplified spectra stay reachable by diagonal scans.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ham::{
    proj_equal2, proj_minus, proj_one, proj_plus, proj_xx_odd, proj_zero, proj_zz_odd,
    LayeredHamiltonian, LocalProjector,
};
use crate::linalg::{c64, CMat};

/// One corpus entry: a short structural name plus the Hamiltonian.
#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub name: String,
    pub ham: LayeredHamiltonian,
}

// ---------------------------------------------------------------------------
// Anchor instances (closed-form, seed-independent)
// ---------------------------------------------------------------------------

/// Diagonal projector `|bits⟩⟨bits|` on `k` qubits (bit 0 of `bits` is the
/// most significant / first support qubit).
pub fn diag_point_projector(k: usize, bits: &[u8]) -> CMat {
    assert_eq!(bits.len(), k);
    let mut index = 0usize;
    for &b in bits {
        index = (index << 1) | b as usize;
    }
    let mut m = CMat::zeros(1 << k, 1 << k);
    m[(index, index)] = c64(1.0, 0.0);
    m
}

/// Two non-commuting single-qubit layers `{|1⟩⟨1|}`, `{|+⟩⟨+|}` with equal
/// weights: ground energy `(1 − 1/√2)/2`, maximally frustrated at `n = 1`.
pub fn clock_two_layer() -> LayeredHamiltonian {
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

/// The degenerate single-projector instance `{|1⟩⟨1|}`: satisfiable, one
/// clause, every amplification family coincides on it.
pub fn single_projector() -> LayeredHamiltonian {
    LayeredHamiltonian::build(
        1,
        vec![LocalProjector::new(vec![0], proj_one()).unwrap()],
        None,
        None,
    )
    .unwrap()
}

/// One classical layer `{|1⟩⟨1|, |0⟩⟨0|}` on a single qubit: unsatisfiable
/// with ground energy ½ and basis ground states.
pub fn pinned_bit() -> LayeredHamiltonian {
    LayeredHamiltonian::build(
        1,
        vec![
            LocalProjector::new(vec![0], proj_one()).unwrap(),
            LocalProjector::new(vec![0], proj_zero()).unwrap(),
        ],
        Some(vec![vec![0, 1]]),
        None,
    )
    .unwrap()
}

/// The pinned bit plus a transverse layer `{|+⟩⟨+|}` at equal layer weights:
/// frustrated and non-commuting across layers, ground energy ¼.
pub fn pinned_bit_transverse() -> LayeredHamiltonian {
    LayeredHamiltonian::build(
        1,
        vec![
            LocalProjector::new(vec![0], proj_one()).unwrap(),
            LocalProjector::new(vec![0], proj_zero()).unwrap(),
            LocalProjector::new(vec![0], proj_plus()).unwrap(),
        ],
        Some(vec![vec![0, 1], vec![2]]),
        Some(vec![0.5, 0.5]),
    )
    .unwrap()
}

/// Equality-penalty clauses on every edge of a triangle, one clause per
/// layer: a classical 2-colouring instance that is frustrated (ground energy
/// 1/3) with an exponentially degenerate basis ground space.
pub fn triangle_distinct() -> LayeredHamiltonian {
    LayeredHamiltonian::build(
        3,
        vec![
            LocalProjector::new(vec![0, 1], proj_equal2()).unwrap(),
            LocalProjector::new(vec![1, 2], proj_equal2()).unwrap(),
            LocalProjector::new(vec![0, 2], proj_equal2()).unwrap(),
        ],
        Some(vec![vec![0], vec![1], vec![2]]),
        None,
    )
    .unwrap()
}

/// Two qubits, a three-clause diagonal layer `{|1⟩⟨1|₀, |1⟩⟨1|₁, |11⟩⟨11|}`
/// against a transverse `{|+⟩⟨+|₀}` layer at equal layer weights:
/// non-commuting, n = 2 anchor.
pub fn two_qubit_mixed() -> LayeredHamiltonian {
    LayeredHamiltonian::build(
        2,
        vec![
            LocalProjector::new(vec![0], proj_one()).unwrap(),
            LocalProjector::new(vec![1], proj_one()).unwrap(),
            LocalProjector::new(vec![0, 1], diag_point_projector(2, &[1, 1])).unwrap(),
            LocalProjector::new(vec![0], proj_plus()).unwrap(),
        ],
        Some(vec![vec![0, 1, 2], vec![3]]),
        Some(vec![0.5, 0.5]),
    )
    .unwrap()
}

/// One commuting layer of both parity checks `(I−Z⊗Z)/2` and `(I−X⊗X)/2`
/// on the same pair: non-classical, frustration-free, Bell ground state.
pub fn bell_stabiliser() -> LayeredHamiltonian {
    LayeredHamiltonian::build(
        2,
        vec![
            LocalProjector::new(vec![0, 1], proj_zz_odd()).unwrap(),
            LocalProjector::new(vec![0, 1], proj_xx_odd()).unwrap(),
        ],
        Some(vec![vec![0, 1]]),
        None,
    )
    .unwrap()
}

/// A single layer holding a Z-parity projector and its complement: the
/// Hamiltonian is `I/2`, a fully degenerate frustrated sanity anchor.
pub fn parity_complete() -> LayeredHamiltonian {
    let zz_even = crate::linalg::identity(4) - proj_zz_odd();
    LayeredHamiltonian::build(
        2,
        vec![
            LocalProjector::new(vec![0, 1], proj_zz_odd()).unwrap(),
            LocalProjector::new(vec![0, 1], zz_even).unwrap(),
        ],
        Some(vec![vec![0, 1]]),
        None,
    )
    .unwrap()
}

/// A frustrated commuting non-classical layer: both Z-parity projectors plus
/// the X-parity check on one pair — every state pays at least 1/3.
pub fn parity_frustrated() -> LayeredHamiltonian {
    let zz_even = crate::linalg::identity(4) - proj_zz_odd();
    LayeredHamiltonian::build(
        2,
        vec![
            LocalProjector::new(vec![0, 1], proj_zz_odd()).unwrap(),
            LocalProjector::new(vec![0, 1], zz_even).unwrap(),
            LocalProjector::new(vec![0, 1], proj_xx_odd()).unwrap(),
        ],
        Some(vec![vec![0, 1, 2]]),
        None,
    )
    .unwrap()
}

/// The anchor instances in a fixed order.
pub fn anchors() -> Vec<CorpusItem> {
    let items: [(&str, LayeredHamiltonian); 9] = [
        ("clock-two-layer", clock_two_layer()),
        ("single-projector", single_projector()),
        ("pinned-bit", pinned_bit()),
        ("pinned-bit-transverse", pinned_bit_transverse()),
        ("triangle-distinct", triangle_distinct()),
        ("two-qubit-mixed", two_qubit_mixed()),
        ("bell-stabiliser", bell_stabiliser()),
        ("parity-complete", parity_complete()),
        ("parity-frustrated", parity_frustrated()),
    ];
    items
        .into_iter()
        .map(|(name, ham)| CorpusItem {
            name: name.to_string(),
            ham,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Seeded families
// ---------------------------------------------------------------------------

/// Random distinct pair `i < j` from `0..n`.
fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i.min(j), i.max(j))
}

/// Classical pair-satisfaction instance: each clause penalises one forbidden
/// assignment of a random qubit pair.  All clauses are diagonal, hence
/// mutually commuting; odd-indexed items split the clauses over two layers.
fn csp_pairs(rng: &mut ChaCha8Rng, idx: usize) -> CorpusItem {
    let n = [2, 3, 4][idx % 3];
    let m = rng.gen_range(2..=4);
    let mut clauses: Vec<(usize, usize, u8, u8)> = Vec::new();
    while clauses.len() < m {
        let (i, j) = random_pair(rng, n);
        let a = rng.gen_range(0..2) as u8;
        let b = rng.gen_range(0..2) as u8;
        if !clauses.contains(&(i, j, a, b)) {
            clauses.push((i, j, a, b));
        }
    }
    let terms: Vec<LocalProjector> = clauses
        .iter()
        .map(|&(i, j, a, b)| {
            LocalProjector::new(vec![i, j], diag_point_projector(2, &[a, b])).unwrap()
        })
        .collect();
    let layers = if idx % 2 == 0 {
        Some(vec![(0..terms.len()).collect()])
    } else {
        let first: Vec<usize> = (0..terms.len()).step_by(2).collect();
        let second: Vec<usize> = (1..terms.len()).step_by(2).collect();
        Some(vec![first, second])
    };
    CorpusItem {
        name: format!("csp-pairs-{idx}"),
        ham: LayeredHamiltonian::build(n, terms, layers, None).unwrap(),
    }
}

/// Colouring-style instance: equality penalties on the edges of a random
/// connected graph (distinct neighbouring values required).
fn colouring(rng: &mut ChaCha8Rng, idx: usize) -> CorpusItem {
    let n = [3, 4][idx % 2];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // A random spanning path keeps the instance connected, then extra edges.
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u.min(v), u.max(v)));
    }
    let extra = rng.gen_range(0..=1);
    while edges.len() < n - 1 + extra {
        let e = random_pair(rng, n);
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    let terms: Vec<LocalProjector> = edges
        .iter()
        .map(|&(i, j)| LocalProjector::new(vec![i, j], proj_equal2()).unwrap())
        .collect();
    CorpusItem {
        name: format!("colouring-{idx}"),
        ham: LayeredHamiltonian::build(n, terms, Some(vec![(0..edges.len()).collect()]), None)
            .unwrap(),
    }
}

/// Commuting non-classical instance: Z- and X-parity checks on one pair,
/// optionally with an extra pinned third qubit (disjoint, still commuting).
fn stabiliser(rng: &mut ChaCha8Rng, idx: usize) -> CorpusItem {
    let with_pin = idx % 2 == 1;
    let n = if with_pin { 3 } else { 2 };
    let mut terms = vec![
        LocalProjector::new(vec![0, 1], proj_zz_odd()).unwrap(),
        LocalProjector::new(vec![0, 1], proj_xx_odd()).unwrap(),
    ];
    if with_pin {
        let pin = if rng.gen_range(0..2) == 0 {
            proj_one()
        } else {
            proj_zero()
        };
        terms.push(LocalProjector::new(vec![2], pin).unwrap());
    }
    if idx >= 2 {
        // Frustrate the pair with the complementary Z parity.
        let zz_even = crate::linalg::identity(4) - proj_zz_odd();
        terms.push(LocalProjector::new(vec![0, 1], zz_even).unwrap());
    }
    let m = terms.len();
    CorpusItem {
        name: format!("stabiliser-{idx}"),
        ham: LayeredHamiltonian::build(n, terms, Some(vec![(0..m).collect()]), None).unwrap(),
    }
}

/// Transverse-field chain: Z-parity penalties along a path against a layer
/// of on-site `|+⟩⟨+|` fields — the layers do not commute.
fn transverse_chain(rng: &mut ChaCha8Rng, idx: usize) -> CorpusItem {
    let n = [2, 3][idx % 2];
    let mut terms: Vec<LocalProjector> = (0..n - 1)
        .map(|i| LocalProjector::new(vec![i, i + 1], proj_zz_odd()).unwrap())
        .collect();
    let bond_layer: Vec<usize> = (0..terms.len()).collect();
    let field_start = terms.len();
    for q in 0..n {
        let field = if rng.gen_range(0..4) == 0 {
            proj_minus()
        } else {
            proj_plus()
        };
        terms.push(LocalProjector::new(vec![q], field).unwrap());
    }
    let field_layer: Vec<usize> = (field_start..terms.len()).collect();
    CorpusItem {
        name: format!("transverse-chain-{idx}"),
        ham: LayeredHamiltonian::build(n, terms, Some(vec![bond_layer, field_layer]), None)
            .unwrap(),
    }
}

/// Non-commuting two-layer toy: random diagonal point clauses against random
/// single-qubit transverse fields.
fn mixed_toy(rng: &mut ChaCha8Rng, idx: usize) -> CorpusItem {
    let n = [2, 3][idx % 2];
    let m_diag = rng.gen_range(2..=3);
    let mut terms: Vec<LocalProjector> = Vec::new();
    for _ in 0..m_diag {
        let (i, j) = random_pair(rng, n);
        let bits = [rng.gen_range(0..2) as u8, rng.gen_range(0..2) as u8];
        terms.push(LocalProjector::new(vec![i, j], diag_point_projector(2, &bits)).unwrap());
    }
    let diag_layer: Vec<usize> = (0..terms.len()).collect();
    let q = rng.gen_range(0..n);
    terms.push(LocalProjector::new(vec![q], proj_plus()).unwrap());
    let field_layer = vec![terms.len() - 1];
    CorpusItem {
        name: format!("mixed-toy-{idx}"),
        ham: LayeredHamiltonian::build(n, terms, Some(vec![diag_layer, field_layer]), None)
            .unwrap(),
    }
}

/// Reweighted variants of the anchors: same terms, non-uniform layer weights.
fn weighted(idx: usize) -> CorpusItem {
    match idx {
        0 => {
            let base = clock_two_layer();
            CorpusItem {
                name: "clock-two-layer-w37".into(),
                ham: LayeredHamiltonian::build(
                    1,
                    base.terms().to_vec(),
                    Some(base.layers().to_vec()),
                    Some(vec![0.3, 0.7]),
                )
                .unwrap(),
            }
        }
        _ => {
            let base = two_qubit_mixed();
            CorpusItem {
                name: "two-qubit-mixed-w82".into(),
                ham: LayeredHamiltonian::build(
                    2,
                    base.terms().to_vec(),
                    Some(base.layers().to_vec()),
                    Some(vec![0.8, 0.2]),
                )
                .unwrap(),
            }
        }
    }
}

/// Generate the full corpus for a seed: 9 fixed anchors followed by 23
/// seeded instances (32 items overall).  Equal seeds yield identical
/// corpora, bit for bit.
pub fn generate_corpus(seed: u64) -> Vec<CorpusItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = anchors();
    for idx in 0..9 {
        items.push(csp_pairs(&mut rng, idx));
    }
    for idx in 0..4 {
        items.push(colouring(&mut rng, idx));
    }
    for idx in 0..4 {
        items.push(stabiliser(&mut rng, idx));
    }
    for idx in 0..2 {
        items.push(transverse_chain(&mut rng, idx));
    }
    for idx in 0..2 {
        items.push(mixed_toy(&mut rng, idx));
    }
    for idx in 0..2 {
        items.push(weighted(idx));
    }
    items
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_large_enough_and_small_scale() {
        let corpus = generate_corpus(1);
        assert!(corpus.len() >= 30, "only {} corpus items", corpus.len());
        for item in &corpus {
            assert!(item.ham.n_qubits() <= 4, "{} too wide", item.name);
            assert!(item.ham.g() <= 3, "{} has too many layers", item.name);
            // Wide instances must stay classical so diagonal scans apply.
            if item.ham.n_qubits() == 4 {
                assert!(item.ham.is_classical(), "{} is wide but quantum", item.name);
            }
        }
    }

    #[test]
    fn corpus_names_are_unique() {
        let corpus = generate_corpus(1);
        let mut names: Vec<&str> = corpus.iter().map(|i| i.name.as_str()).collect();
        names.sort_unstable();
        let before = names.len();
        names.dedup();
        assert_eq!(before, names.len(), "duplicate corpus names");
    }

    #[test]
    fn corpus_is_seed_deterministic() {
        let a = generate_corpus(1);
        let b = generate_corpus(1);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            let sx = serde_json::to_string(&x.ham.to_schema()).unwrap();
            let sy = serde_json::to_string(&y.ham.to_schema()).unwrap();
            assert_eq!(sx, sy, "item {} differs across regenerations", x.name);
        }
        let c = generate_corpus(2);
        let sa = serde_json::to_string(&a[9].ham.to_schema()).unwrap();
        let sc = serde_json::to_string(&c[9].ham.to_schema()).unwrap();
        assert_ne!(sa, sc, "different seeds should vary the seeded items");
    }

    #[test]
    fn anchor_ground_energies_match_closed_forms() {
        use crate::spectra::min_eig_dense;
        let cases = [
            (clock_two_layer(), (1.0 - std::f64::consts::FRAC_1_SQRT_2) / 2.0),
            (single_projector(), 0.0),
            (pinned_bit(), 0.5),
            (pinned_bit_transverse(), 0.25),
            (triangle_distinct(), 1.0 / 3.0),
            (bell_stabiliser(), 0.0),
            (parity_complete(), 0.5),
            (parity_frustrated(), 1.0 / 3.0),
        ];
        for (ham, expect) in cases {
            let lam = min_eig_dense(&ham.dense().unwrap()).unwrap().value;
            assert!(
                (lam - expect).abs() < 1e-12,
                "ground energy {lam} vs closed form {expect}"
            );
        }
    }
}
