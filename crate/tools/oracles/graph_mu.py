#!/usr/bin/env python3
"""Independent oracle: second-largest |eigenvalue| of P = A/d for the built-in
regular graph families.  Values printed here are frozen into the Rust tests.

Families:
  complete_loops(m): every vertex adjacent to every vertex including itself, d = m.
  complete(m):       K_m without loops, d = m - 1.
  cycle(m):          plain cycle, d = 2 (m >= 3).
  chords(m):         circulant with offsets {+-1, +-floor(sqrt(m))}, d = 4.
"""
import numpy as np


def mu_of(adj: np.ndarray, d: int) -> float:
    p = adj / d
    lam = np.sort(np.linalg.eigvalsh(p))[::-1]
    assert abs(lam[0] - 1.0) < 1e-12, lam[0]
    return float(np.max(np.abs(lam[1:]))) if len(lam) > 1 else 0.0


def complete_loops(m):
    return np.ones((m, m))


def complete(m):
    return np.ones((m, m)) - np.eye(m)


def cycle(m):
    a = np.zeros((m, m))
    for v in range(m):
        a[v][(v + 1) % m] += 1
        a[v][(v - 1) % m] += 1
    return a


def chords(m):
    s = int(np.floor(np.sqrt(m)))
    a = np.zeros((m, m))
    for v in range(m):
        for off in (1, -1, s, -s):
            a[v][(v + off) % m] += 1
    return a


if __name__ == "__main__":
    for m in (1, 2, 3, 4, 6):
        print(f"complete_loops m={m}: mu = {mu_of(complete_loops(m), m):.17g}")
    for m in (2, 3, 4, 5, 8):
        print(f"complete       m={m}: mu = {mu_of(complete(m), m - 1):.17g}")
    for m in (3, 4, 5, 6, 7, 8):
        print(f"cycle          m={m}: mu = {mu_of(cycle(m), 2):.17g}  "
              f"(cos(pi/ceil?) ref cos(2pi/m)={np.cos(2*np.pi/m):.17g})")
    for m in (8, 10, 13):
        print(f"chords         m={m}: mu = {mu_of(chords(m), 4):.17g}")
    # closed forms used in tests
    print(f"cos(pi/5)  = {np.cos(np.pi/5):.17g}")
    print(f"cos(pi/7)  = {np.cos(np.pi/7):.17g}")
    print(f"1/3        = {1/3:.17g}")
