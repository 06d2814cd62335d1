#!/usr/bin/env python3
"""Independent definitional oracle for the amplified operators.

Implements, in straightforward numpy with explicit walk enumeration:
  * layered Hamiltonians with big-endian qubit convention,
  * the derandomised walk amplification H^(2t) (L = 2t registers, walks
    enumerated as (start vertex, port sequence), count m * d^(L-1)),
  * the full tensor amplification I - (I - H)^{ox t},
  * the alternative single-shot amplification
        H_alt^(t) = I - sum_chi w_chi (prod_i (I - Pi_i^chi))^{ox t}
    together with its guarantee floor
        (min_chi w_chi / (4 g)) * (1 - (1 + m gamma / g^2)^(-t)).

Printed eigenvalues are frozen into the Rust test suite; the Rust crate must
reproduce them with its own (transfer-matrix) implementation.
"""
import numpy as np

I2 = np.eye(2)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)          # |0><0|
P1 = np.array([[0, 0], [0, 1]], dtype=complex)          # |1><1|
PPLUS = np.full((2, 2), 0.5, dtype=complex)             # |+><+|
PMINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)


def embed(op, support, n):
    """Big-endian embedding: qubit 0 is the most significant bit."""
    k = len(support)
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    rest = [q for q in range(n) if q not in support]
    for i in range(dim):
        ibits = [(i >> (n - 1 - q)) & 1 for q in range(n)]
        for j in range(dim):
            jbits = [(j >> (n - 1 - q)) & 1 for q in range(n)]
            if any(ibits[q] != jbits[q] for q in rest):
                continue
            a = 0
            b = 0
            for q in support:
                a = (a << 1) | ibits[q]
                b = (b << 1) | jbits[q]
            out[i, j] = op[a, b]
    return out


def rotation_walks(m, d, neighbors, length):
    """All walks as vertex sequences: start vertex x port sequence."""
    walks = []
    for start in range(m):
        seq = [0] * (length - 1)
        while True:
            vs = [start]
            for s in range(length - 1):
                vs.append(neighbors[vs[-1]][seq[s]])
            walks.append(vs)
            i = 0
            while i < length - 1:
                seq[i] += 1
                if seq[i] < d:
                    break
                seq[i] = 0
                i += 1
            else:
                break
            if length == 1:
                break
    return walks


def family_neighbors(kind, m):
    if kind == "complete_loops":
        return m, [[u for u in range(m)] for _ in range(m)]
    if kind == "complete":
        return m - 1, [[u for u in range(m) if u != v] for v in range(m)]
    if kind == "cycle":
        return 2, [[(v + 1) % m, (v - 1) % m] for v in range(m)]
    raise ValueError(kind)


FAMILY_MIN = {"complete_loops": 1, "complete": 2, "cycle": 3}


def replicate(mchi, kind):
    rho = 1
    while rho * mchi < FAMILY_MIN[kind]:
        rho += 1
    return rho


def amplify_derandomised(n, layers, weights, t, kind):
    """layers: list of list of (support, op).  Returns dense H^(2t)."""
    L = 2 * t
    dim = 1 << (n * L)
    out = np.zeros((dim, dim), dtype=complex)
    for chi, layer in enumerate(layers):
        mchi = len(layer)
        rho = replicate(mchi, kind)
        mrep = rho * mchi
        d, neigh = family_neighbors(kind, mrep)
        walks = rotation_walks(mrep, d, neigh, L)
        assert len(walks) == mrep * d ** (L - 1)
        acc = np.zeros((dim, dim), dtype=complex)
        for vs in walks:
            term = np.eye(1, dtype=complex)
            for j, v in enumerate(vs):
                sup, op = layer[v % mchi]
                comp = np.eye(1 << n, dtype=complex) - embed(op, sup, n)
                term = np.kron(term, comp)
            acc += term
        out += weights[chi] * (np.eye(dim) - acc / len(walks))
    return out


def dense_h(n, layers, weights):
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=complex)
    for chi, layer in enumerate(layers):
        acc = np.zeros((dim, dim), dtype=complex)
        for sup, op in layer:
            acc += embed(op, sup, n)
        h += weights[chi] * acc / len(layer)
    return h


def full_tensor(n, layers, weights, t):
    h = dense_h(n, layers, weights)
    dim = h.shape[0]
    comp = np.eye(dim) - h
    term = np.eye(1, dtype=complex)
    for _ in range(t):
        term = np.kron(term, comp)
    return np.eye(dim ** t) - term


def alt_single_shot(n, layers, weights, t):
    dim = 1 << n
    out = np.eye(dim ** t, dtype=complex)
    for chi, layer in enumerate(layers):
        prod = np.eye(dim, dtype=complex)
        for sup, op in layer:
            prod = prod @ (np.eye(dim) - embed(op, sup, n))
        term = np.eye(1, dtype=complex)
        for _ in range(t):
            term = np.kron(term, prod)
        out -= weights[chi] * term
    return out


def lam_min(mat):
    return float(np.sort(np.linalg.eigvalsh(mat))[0])


def report(tag, val):
    print(f"{tag} = {val:.17g}")


if __name__ == "__main__":
    # T1: the frustrated two-layer single-qubit toy.
    t1_layers = [[([0], P1)], [([0], PPLUS)]]
    t1_w = [0.5, 0.5]
    g0 = lam_min(dense_h(1, t1_layers, t1_w))
    report("T1 lam_min(H)            ", g0)
    report("T1 closed form (1-1/sqrt2)/2", (1 - 1 / np.sqrt(2)) / 2)
    for kind in ("complete_loops", "complete", "cycle"):
        v = lam_min(amplify_derandomised(1, t1_layers, t1_w, 1, kind))
        report(f"T1 t=1 {kind:15s} lam_min(H^(2))", v)
    v = lam_min(amplify_derandomised(1, t1_layers, t1_w, 2, "complete_loops"))
    report("T1 t=2 complete_loops  lam_min(H^(4))", v)
    report("T1 t=2 closed form 3/8", 0.375)
    ft = lam_min(full_tensor(1, t1_layers, t1_w, 2))
    report("T1 full tensor t=2 lam_min", ft)
    report("T1 full tensor closed 1-(1-g)^2", 1 - (1 - g0) ** 2)

    # Alternative amplification on T1 (m = 2 projectors, overlap degree g = 2).
    for t in (1, 2, 3):
        v = lam_min(alt_single_shot(1, t1_layers, t1_w, t))
        floor = (0.5 / (4 * 2)) * (1 - (1 + 2 * g0 / 4) ** (-t))
        report(f"T1 alt t={t} lam_min", v)
        report(f"T1 alt t={t} floor  ", floor)

    # T6: one layer, two commuting clauses {|1><1|, |0><0|} on one qubit.
    t6_layers = [[([0], P1), ([0], P0)]]
    t6_w = [1.0]
    report("T6 lam_min(H) (=1/2)", lam_min(dense_h(1, t6_layers, t6_w)))
    for kind in ("complete_loops", "complete", "cycle"):
        v = lam_min(amplify_derandomised(1, t6_layers, t6_w, 1, kind))
        report(f"T6 t=1 {kind:15s} lam_min", v)
    for kind in ("complete_loops", "complete", "cycle"):
        v = lam_min(amplify_derandomised(1, t6_layers, t6_w, 2, kind))
        report(f"T6 t=2 {kind:15s} lam_min", v)

    # T11: layer {|1><1|,|0><0|} and layer {|+><+|}; lam_min(H) = 1/4.
    t11_layers = [[([0], P1), ([0], P0)], [([0], PPLUS)]]
    t11_w = [0.5, 0.5]
    report("T11 lam_min(H) (=1/4)", lam_min(dense_h(1, t11_layers, t11_w)))
    for kind in ("complete_loops", "complete", "cycle"):
        v = lam_min(amplify_derandomised(1, t11_layers, t11_w, 1, kind))
        report(f"T11 t=1 {kind:15s} lam_min", v)

    # T4: triangle equality-violation CSP on 3 qubits, one clause per layer.
    eq2 = np.zeros((4, 4), dtype=complex)
    eq2[0, 0] = 1
    eq2[3, 3] = 1
    t4_layers = [[([0, 1], eq2)], [([1, 2], eq2)], [([0, 2], eq2)]]
    t4_w = [1 / 3, 1 / 3, 1 / 3]
    report("T4 lam_min(H) (=1/3)", lam_min(dense_h(3, t4_layers, t4_w)))
    for kind in ("complete_loops", "complete", "cycle"):
        v = lam_min(amplify_derandomised(3, t4_layers, t4_w, 1, kind))
        report(f"T4 t=1 {kind:15s} lam_min", v)

    # Embedding sanity: |1><1| on qubit 0 of 2 must be diag(0,0,1,1).
    emb = embed(P1, [0], 2)
    report("embed |1><1| q0-of-2 diag", float(np.real(np.diag(emb)).tolist() == [0.0, 0.0, 1.0, 1.0]))

    # Commutator norm of the illegal same-layer pair {|1><1|, |+><+|}.
    comm = P1 @ PPLUS - PPLUS @ P1
    report("||[P1, P+]||_2 (=1/sqrt 2)", float(np.linalg.norm(comm, 2)))

    # T12: layer {|1><1|_q0, |1><1|_q1, |11><11|} (3 commuting clauses) plus
    # layer {|+><+|_q0}; n = 2.  Exercises distinct-clause walks on the 3-cycle.
    p11 = np.zeros((4, 4), dtype=complex)
    p11[3, 3] = 1
    t12_layers = [[([0], P1), ([1], P1), ([0, 1], p11)], [([0], PPLUS)]]
    t12_w = [0.5, 0.5]
    report("T12 lam_min(H)", lam_min(dense_h(2, t12_layers, t12_w)))
    for kind in ("complete_loops", "complete", "cycle"):
        v = lam_min(amplify_derandomised(2, t12_layers, t12_w, 1, kind))
        report(f"T12 t=1 {kind:15s} lam_min", v)
    v = lam_min(amplify_derandomised(2, t12_layers, t12_w, 2, "cycle"))
    report("T12 t=2 cycle           lam_min", v)
