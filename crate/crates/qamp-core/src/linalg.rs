//! Dense complex linear algebra helpers and the big-endian qubit convention.
//!
//! Index convention used everywhere in this crate: **qubit 0 is the most
//! significant bit** of a computational-basis index.  For an `n`-qubit space,
//! the bit of qubit `q` inside basis index `i` is `(i >> (n - 1 - q)) & 1`.
//! Consequently `|1><1|` embedded on qubit 0 of a 2-qubit space is
//! `diag(0, 0, 1, 1)`.
//!
//! Local operators are stored row-major on their support; `support[0]` is the
//! most significant *local* bit, matching the global convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMat = DMatrix<C64>;
/// Dense complex (state) vector.
pub type CVec = DVector<C64>;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit of qubit `q` in basis index `i` of an `n`-qubit space (big-endian).
#[inline]
pub fn bit_of(i: usize, q: usize, n: usize) -> usize {
    (i >> (n - 1 - q)) & 1
}

/// `2^n` with an overflow check suited to addressable state vectors.
pub fn dim_of(n_qubits: usize) -> usize {
    assert!(n_qubits < usize::BITS as usize, "qubit count {n_qubits} not addressable");
    1usize << n_qubits
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Kronecker product (delegates to nalgebra).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Computational basis state `|index>` of the given dimension.
pub fn basis_state(dim: usize, index: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[index] = C64::ONE;
    v
}

/// Frobenius-norm residual from Hermiticity, `‖A − A†‖_F`.
pub fn hermiticity_residual(a: &CMat) -> f64 {
    (a - a.adjoint()).norm()
}

/// Frobenius-norm residual from idempotency, `‖A² − A‖_F`.
pub fn idempotency_residual(a: &CMat) -> f64 {
    (a * a - a).norm()
}

/// Frobenius norm of the commutator `[A, B] = AB − BA`.
pub fn commutator_fro(a: &CMat, b: &CMat) -> f64 {
    (a * b - b * a).norm()
}

/// True when every off-diagonal entry is below `tol` in modulus.
pub fn is_diagonal(a: &CMat, tol: f64) -> bool {
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            if r != c && a[(r, c)].norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Embed a `2^k`-dimensional operator on the listed support qubits into the
/// full `2^n`-dimensional space (identity elsewhere).  Dense; intended for
/// oracle-sized spaces.
pub fn embed_global(op: &CMat, support: &[usize], n: usize) -> CMat {
    let dim = dim_of(n);
    let k = support.len();
    let sub = 1usize << k;
    assert_eq!(op.nrows(), sub, "operator dimension does not match support size");
    let pos: Vec<usize> = support.iter().map(|&q| n - 1 - q).collect();
    let support_mask: usize = pos.iter().map(|&p| 1usize << p).sum();
    let rest_mask = (dim - 1) & !support_mask;
    let offs = local_offsets(&pos);
    let mut out = CMat::zeros(dim, dim);
    let mut base = 0usize;
    loop {
        for r in 0..sub {
            for c in 0..sub {
                out[(base | offs[r], base | offs[c])] = op[(r, c)];
            }
        }
        base = base.wrapping_sub(rest_mask) & rest_mask;
        if base == 0 {
            break;
        }
    }
    out
}

/// Apply a local operator on `support` to an `n`-qubit state, matrix-free in
/// the rest of the space.  Cost `O(2^n · 2^k)`.
pub fn apply_local(op: &CMat, support: &[usize], n: usize, psi: &CVec) -> CVec {
    let dim = dim_of(n);
    assert_eq!(psi.len(), dim, "state dimension mismatch");
    let k = support.len();
    let sub = 1usize << k;
    assert_eq!(op.nrows(), sub, "operator dimension does not match support size");
    let pos: Vec<usize> = support.iter().map(|&q| n - 1 - q).collect();
    let support_mask: usize = pos.iter().map(|&p| 1usize << p).sum();
    let rest_mask = (dim - 1) & !support_mask;
    let offs = local_offsets(&pos);
    let mut out = CVec::zeros(dim);
    let mut gathered = vec![C64::ZERO; sub];
    let mut base = 0usize;
    loop {
        for (l, g) in gathered.iter_mut().enumerate() {
            *g = psi[base | offs[l]];
        }
        for r in 0..sub {
            let mut acc = C64::ZERO;
            for c in 0..sub {
                acc += op[(r, c)] * gathered[c];
            }
            out[base | offs[r]] = acc;
        }
        base = base.wrapping_sub(rest_mask) & rest_mask;
        if base == 0 {
            break;
        }
    }
    out
}

/// For each local index `l`, the global-offset pattern obtained by depositing
/// the bits of `l` at the given bit positions (`pos[0]` carries the most
/// significant local bit).
fn local_offsets(pos: &[usize]) -> Vec<usize> {
    let k = pos.len();
    let sub = 1usize << k;
    let mut offs = vec![0usize; sub];
    for (l, o) in offs.iter_mut().enumerate() {
        for (j, &p) in pos.iter().enumerate() {
            if (l >> (k - 1 - j)) & 1 == 1 {
                *o |= 1 << p;
            }
        }
    }
    offs
}

/// `<a|b>` with the conjugate on the left argument.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.dotc(b)
}

/// Draw a normalised random state with independent uniform real/imaginary
/// components.  Deterministic given the caller's seeded RNG; used for Krylov
/// start vectors and random test states (any absolutely continuous measure
/// works for both purposes).
pub fn random_state<R: Rng>(dim: usize, rng: &mut R) -> CVec {
    let mut v = CVec::zeros(dim);
    for i in 0..dim {
        v[i] = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let n = v.norm();
    v / c64(n, 0.0)
}

/// Binomial coefficient in `u128`, exact for every case the crate enumerates.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> CMat {
        CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(0., 0.), c64(0., 0.), c64(1., 0.)])
    }

    fn pplus() -> CMat {
        CMat::from_element(2, 2, c64(0.5, 0.0))
    }

    #[test]
    fn big_endian_embedding_of_p1_on_qubit_zero() {
        let g = embed_global(&p1(), &[0], 2);
        let diag: Vec<f64> = (0..4).map(|i| g[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 0.0, 1.0, 1.0], "qubit 0 must be the most significant bit");
    }

    #[test]
    fn embedding_on_qubit_one_hits_odd_indices() {
        let g = embed_global(&p1(), &[1], 2);
        let diag: Vec<f64> = (0..4).map(|i| g[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn apply_local_matches_dense_embedding() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 4;
        let dim = dim_of(n);
        for support in [vec![0], vec![2], vec![1, 3], vec![3, 0], vec![0, 1, 2]] {
            let k = support.len();
            let sub = 1 << k;
            let mut op = CMat::zeros(sub, sub);
            for r in 0..sub {
                for c in 0..sub {
                    op[(r, c)] = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let psi = random_state(dim, &mut rng);
            let fast = apply_local(&op, &support, n, &psi);
            let dense = embed_global(&op, &support, n) * &psi;
            assert!(
                (fast - dense).norm() < 1e-13,
                "apply_local disagrees with dense embedding on support {support:?}"
            );
        }
    }

    #[test]
    fn commutator_of_p1_pplus_is_inv_sqrt2_frobenius() {
        let norm = commutator_fro(&p1(), &pplus());
        let expect = 0.5_f64.sqrt();
        assert!(
            (norm - expect).abs() < 1e-15,
            "‖[|1><1|, |+><+|]‖_F = {norm}, expected 1/sqrt(2) = {expect}"
        );
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn random_state_is_normalised() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let v = random_state(64, &mut rng);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}
