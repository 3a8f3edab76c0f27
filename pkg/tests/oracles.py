"""Independent naive oracles used only by the test suite.

These deliberately use different algorithms from the package code:
first-nonzero pivoting with explicit extended-gcd row/column
combinations for the Smith form, Bareiss fraction-free elimination for
determinants, and k x k minor gcds for small matrices.
"""

import itertools
import math


def _xgcd(a, b):
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def naive_snf(dense):
    """Invariant factors by plain full elimination, first-nonzero pivot."""
    A = [list(map(int, row)) for row in dense]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        # find any nonzero in the trailing block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        pi, pj = piv
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    if A[i][t] % A[t][t] == 0:
                        q = A[i][t] // A[t][t]
                        rt, ri = A[t], A[i]
                        for j in range(n):
                            ri[j] -= q * rt[j]
                    else:
                        u, v, g = _xgcd(A[t][t], A[i][t])
                        a0, a1 = A[t][t] // g, A[i][t] // g
                        rt, ri = A[t], A[i]
                        for j in range(n):
                            rt[j], ri[j] = u * rt[j] + v * ri[j], -a1 * rt[j] + a0 * ri[j]
            for j in range(t + 1, n):
                if A[t][j]:
                    if A[t][j] % A[t][t] == 0:
                        q = A[t][j] // A[t][t]
                        for row in A:
                            row[j] -= q * row[t]
                    else:
                        u, v, g = _xgcd(A[t][t], A[t][j])
                        a0, a1 = A[t][t] // g, A[t][j] // g
                        for row in A:
                            row[t], row[j] = u * row[t] + v * row[j], -a1 * row[t] + a0 * row[j]
            if all(A[i][t] == 0 for i in range(t + 1, m)) and all(
                A[t][j] == 0 for j in range(t + 1, n)
            ):
                break
        # pivot now divides gcd of its row and column; enforce against block
        p = A[t][t]
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % p:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            for j in range(n):
                A[t][j] += A[bad][j]
            continue
        diag.append(abs(p))
        t += 1
    return diag


def minors_gcd_snf(dense):
    """Invariant factors via gcds of k x k minors; only for tiny matrices."""
    m, n = len(dense), len(dense[0])
    prev = 1
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                sub = [[dense[i][j] for j in cols] for i in rows]
                g = math.gcd(g, bareiss_det(sub))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def bareiss_det(dense):
    A = [list(map(int, row)) for row in dense]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]
