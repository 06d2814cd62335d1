#!/usr/bin/env python3
"""Independent oracle for the two sampling-without-replacement tail bounds.

Both checks enumerate all subsets and all joint outcomes exactly; the pinned
example values printed here are frozen into the Rust tests.

  * hypergeometric split tail: for binary variables Z_1..Z_{n+k} and a uniform
    random k-subset S,
        E_S Pr[ sum_S Z <= k*delta  and  sum_{S^c} Z >= n*(delta+nu) ]
          <= exp(-2 nu^2 n k^2 / ((n+k) (k+1)))
  * averaged-split tail for 2t variables and |S| = t:
        E_S Pr[ sum_S C < 2r  and  sum_{S^c} C >= 4r ]  <=  exp(-2 r^2 / t)
"""
import itertools
import math

import numpy as np


def exact_split_tail(probs, size, k, low_max, high_min):
    """probs: dict outcome-tuple -> probability over {0,1}^size.
    Returns E over all k-subsets S of Pr[sum_S <= low_max and sum_Sc >= high_min]."""
    subsets = list(itertools.combinations(range(size), k))
    total = 0.0
    for s in subsets:
        sset = set(s)
        acc = 0.0
        for z, p in probs.items():
            in_s = sum(z[i] for i in sset)
            out_s = sum(z) - in_s
            if in_s <= low_max and out_s >= high_min:
                acc += p
        total += acc
    return total / len(subsets)


def iid_bernoulli(q, size):
    probs = {}
    for z in itertools.product((0, 1), repeat=size):
        w = sum(z)
        probs[z] = (q ** w) * ((1 - q) ** (size - w))
    return probs


if __name__ == "__main__":
    # Pinned example: i.i.d. Bernoulli(0.3), n = 6, k = 3, delta = 0.2, nu = 0.3.
    n, k, delta, nu = 6, 3, 0.2, 0.3
    probs = iid_bernoulli(0.3, n + k)
    lhs = exact_split_tail(probs, n + k, k, k * delta, n * (delta + nu))
    bound = math.exp(-2 * nu * nu * n * k * k / ((n + k) * (k + 1)))
    print(f"hypergeometric lhs   = {lhs:.17g}")
    print(f"hypergeometric bound = {bound:.17g}")
    assert lhs <= bound + 1e-12

    # Pinned example: i.i.d. Bernoulli(0.6) counts, t = 4, r = 1:
    # E_{|S|=4} Pr[sum_S < 2 and sum_Sc >= 4]  vs  exp(-2 r^2 / t) = exp(-1/2).
    t, r = 4, 1
    probs = iid_bernoulli(0.6, 2 * t)
    lhs = exact_split_tail(probs, 2 * t, t, 2 * r - 1, 4 * r)
    bound = math.exp(-2 * r * r / t)
    print(f"averaged-split lhs   = {lhs:.17g}")
    print(f"averaged-split bound = {bound:.17g}")
    assert lhs <= bound + 1e-9

    # A correlated law (perfectly correlated pair blocks) for the same t, r.
    size = 8
    probs = {}
    for z4 in itertools.product((0, 1), repeat=4):
        z = tuple(b for b in z4 for _ in (0, 1))
        probs[z] = probs.get(z, 0.0) + 0.5 ** 4
    lhs = exact_split_tail(probs, size, 4, 1, 4)
    print(f"correlated-pairs lhs = {lhs:.17g}")
    assert lhs <= bound + 1e-9
