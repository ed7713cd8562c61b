"""Coefficients of 1 / ((1 - y(1+z)) (1 - x y^2 (1+2z))) by truncated 3-D series products."""

import math

import numpy as np


def trivariate_gf_table(N, K, T):
    """Integer array ``c[n, k, t]`` for n <= N, k <= K, t <= T."""
    # 1/(1 - y(1+z)) = sum_a y^a (1+z)^a
    a = np.zeros((K + 1, T + 1), dtype=object)
    a[:] = 0
    for p in range(K + 1):
        for t in range(min(p, T) + 1):
            a[p, t] = math.comb(p, t)
    # 1/(1 - x y^2 (1+2z)) = sum_b x^b y^{2b} (1+2z)^b
    out = np.zeros((N + 1, K + 1, T + 1), dtype=object)
    out[:] = 0
    for b in range(N + 1):
        if 2 * b > K:
            break
        poly = [math.comb(b, t) * 2 ** t for t in range(min(b, T) + 1)]
        for p in range(K + 1 - 2 * b):
            for t1 in range(T + 1):
                if a[p, t1] == 0:
                    continue
                for t2, c in enumerate(poly):
                    if t1 + t2 <= T:
                        out[b, p + 2 * b, t1 + t2] += a[p, t1] * c
    return out
