"""Arbitrary-precision integer linear algebra.

Smith normal form, kernel bases, and homology of two-term complexes of
free Z-modules.  This is the performance-critical kernel: the matrices
coming out of the Fox calculus are large and sparse with almost all
pivots equal to +-1, so elimination runs in two phases:

  1. sparse unit-pivot elimination with Markowitz (minimum fill) pivot
     selection -- each such pivot contributes an invariant factor 1 and
     removes one row and one column without touching the rest beyond the
     unavoidable fill;
  2. a dense Smith normal form on whatever non-unit core remains, which
     in practice is small.

A modular rank precheck (two random primes > 2^30) guards the exact
elimination against bookkeeping bugs.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field


class CompositionError(ValueError):
    """Raised when a claimed chain complex has A*B != 0."""


class SparseIntMatrix:
    """Sparse integer matrix; no explicit zeros are stored."""

    __slots__ = ["rows", "cols", "data"]

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self.data: dict[tuple[int, int], int] = {}
        if entries:
            for (i, j), v in dict(entries).items():
                self[i, j] = v

    @classmethod
    def from_dense(cls, dense) -> "SparseIntMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        M = cls(rows, cols)
        for i, row in enumerate(dense):
            for j, v in enumerate(row):
                if v:
                    M.data[i, j] = int(v)
        return M

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.data.items():
            out[i][j] = v
        return out

    def __getitem__(self, key):
        return self.data.get(key, 0)

    def __setitem__(self, key, v):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(key)
        if v:
            self.data[i, j] = int(v)
        else:
            self.data.pop(key, None)

    def add_at(self, i: int, j: int, v: int) -> None:
        self[i, j] = self.data.get((i, j), 0) + v

    @property
    def nnz(self) -> int:
        return len(self.data)

    def transpose(self) -> "SparseIntMatrix":
        T = SparseIntMatrix(self.cols, self.rows)
        T.data = {(j, i): v for (i, j), v in self.data.items()}
        return T

    def row_dicts(self) -> list[dict[int, int]]:
        rows = [dict() for _ in range(self.rows)]
        for (i, j), v in self.data.items():
            rows[i][j] = v
        return rows

    def col_dicts(self) -> list[dict[int, int]]:
        cols = [dict() for _ in range(self.cols)]
        for (i, j), v in self.data.items():
            cols[j][i] = v
        return cols

    def matmul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        orows = other.row_dicts()
        out = SparseIntMatrix(self.rows, other.cols)
        acc: dict[tuple[int, int], int] = {}
        for (i, k), v in self.data.items():
            for j, w in orows[k].items():
                key = (i, j)
                acc[key] = acc.get(key, 0) + v * w
        out.data = {k: v for k, v in acc.items() if v}
        return out

    def is_zero(self) -> bool:
        return not self.data

    def max_bit_length(self) -> int:
        return max((v.bit_length() for v in self.data.values()), default=0)

    def write_snapshot(self, path) -> None:
        """Triplet snapshot: header line 'rows cols nnz', then 'i j v' lines."""
        with open(path, "w") as fh:
            fh.write("congtors-matrix v1\n")
            fh.write(f"{self.rows} {self.cols} {self.nnz}\n")
            for (i, j), v in sorted(self.data.items()):
                fh.write(f"{i} {j} {v}\n")

    @classmethod
    def read_snapshot(cls, path) -> "SparseIntMatrix":
        with open(path) as fh:
            magic = fh.readline().strip()
            if magic != "congtors-matrix v1":
                raise ValueError(f"unrecognized snapshot header: {magic!r}")
            rows, cols, nnz = map(int, fh.readline().split())
            M = cls(rows, cols)
            for _ in range(nnz):
                i, j, v = fh.readline().split()
                M[int(i), int(j)] = int(v)
        return M

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


@dataclass
class SNFResult:
    diag: list[int]                 # invariant factors d1 | d2 | ..., positive
    rank: int
    U: SparseIntMatrix | None = None
    V: SparseIntMatrix | None = None
    stats: dict = field(default_factory=dict)

    @property
    def torsion_factors(self) -> list[int]:
        return [d for d in self.diag if d > 1]

    def torsion_order(self) -> int:
        out = 1
        for d in self.diag:
            out *= d
        return out


@dataclass
class HomologyResult:
    betti: int
    torsion_factors: list[int]      # invariant factors > 1
    torsion_order: int
    torsion_log: float
    rank_a: int
    rank_b: int


def _fix_divisibility_chain(diag: list[int]) -> list[int]:
    d = [abs(x) for x in diag if x != 0]
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i] != 0:
                    g = math.gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] // g * d[j]
                    changed = True
    return d


# ---------------------------------------------------------------------------
# dense SNF (used for small matrices, transform tracking, and the non-unit
# core left over by the sparse phase)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def _dense_snf(M, want_transforms: bool):
    """Dense Smith form.  Column/row clearing uses a 2x2 extended-gcd
    transform when the pivot does not divide the target (this keeps the
    pivot equal to a gcd and bounds entry growth) and a plain division
    step when it does (this never reintroduces cleared entries, so the
    clearing loop terminates)."""
    m = len(M)
    n = len(M[0]) if m else 0
    A = [list(map(int, row)) for row in M]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if want_transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if want_transforms else None

    def swap_rows(a, b):
        A[a], A[b] = A[b], A[a]
        if U is not None:
            U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        if V is not None:
            for row in V:
                row[a], row[b] = row[b], row[a]

    def row_combo(r1, r2, u, v, w, x):
        # (row r1, row r2) <- (u*r1 + v*r2, w*r1 + x*r2); u*x - v*w = +-1
        R1, R2 = A[r1], A[r2]
        for j in range(n):
            p, q = R1[j], R2[j]
            if p or q:
                R1[j] = u * p + v * q
                R2[j] = w * p + x * q
        if U is not None:
            R1, R2 = U[r1], U[r2]
            for j in range(m):
                p, q = R1[j], R2[j]
                if p or q:
                    R1[j] = u * p + v * q
                    R2[j] = w * p + x * q

    def col_combo(c1, c2, u, v, w, x):
        for row in A:
            p, q = row[c1], row[c2]
            if p or q:
                row[c1] = u * p + v * q
                row[c2] = w * p + x * q
        if V is not None:
            for row in V:
                p, q = row[c1], row[c2]
                if p or q:
                    row[c1] = u * p + v * q
                    row[c2] = w * p + x * q

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]

    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                v = Ai[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            # clear column t, then row t; repeat while gcd steps disturb them
            for i in range(t + 1, m):
                b = A[i][t]
                if b:
                    a = A[t][t]
                    if b % a == 0:
                        row_combo(t, i, 1, 0, -(b // a), 1)
                    else:
                        u, v, g = _xgcd(a, b)
                        row_combo(t, i, u, v, -(b // g), a // g)
            for j in range(t + 1, n):
                b = A[t][j]
                if b:
                    a = A[t][t]
                    if b % a == 0:
                        col_combo(t, j, 1, 0, -(b // a), 1)
                    else:
                        u, v, g = _xgcd(a, b)
                        col_combo(t, j, u, v, -(b // g), a // g)
            if any(A[i][t] for i in range(t + 1, m)) or any(
                A[t][j] for j in range(t + 1, n)
            ):
                continue
            # pivot divides the trailing block?  fold an offender and redo
            p = A[t][t]
            offender = None
            for i in range(t + 1, m):
                Ai = A[i]
                for j in range(t + 1, n):
                    if Ai[j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_combo(offender, t, 1, 0, 1, 1)  # row t += row offender
        if A[t][t] < 0:
            negate_row(t)
        diag.append(A[t][t])
        t += 1

    Um = SparseIntMatrix.from_dense(U) if U is not None else None
    Vm = SparseIntMatrix.from_dense(V) if V is not None else None
    return diag, Um, Vm


# ---------------------------------------------------------------------------
# large dense cores: exact rank/determinant by fraction-free elimination,
# then invariant factors computed modulo a multiple of the largest one

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a hard speedup, not a need
    _mpz = int


def bareiss_rank_det(dense, shuffle_seed: int | None = None):
    """Exact rank and |det| of one nonsingular rank x rank pivot
    submatrix, by fraction-free (Bareiss) elimination.

    Every intermediate entry is a minor of the input, so growth is
    polynomial.  A shuffle seed permutes rows/columns to land on a
    different pivot submatrix (two runs give two determinants whose gcd
    is a small multiple of the product of the invariant factors).
    """
    m = len(dense)
    n = len(dense[0]) if m else 0
    rows = list(range(m))
    cols = list(range(n))
    if shuffle_seed is not None:
        rng = random.Random(shuffle_seed)
        rng.shuffle(rows)
        rng.shuffle(cols)
    A = [[_mpz(dense[i][j]) for j in cols] for i in rows]
    prev = _mpz(1)
    k = 0
    while k < min(m, n):
        piv = None
        for i in range(k, m):
            Ai = A[i]
            for j in range(k, n):
                if Ai[j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        pi, pj = piv
        if pi != k:
            A[k], A[pi] = A[pi], A[k]
        if pj != k:
            for row in A:
                row[k], row[pj] = row[pj], row[k]
        Ak = A[k]
        p = Ak[k]
        tail = Ak[k + 1:]
        for i in range(k + 1, m):
            Ai = A[i]
            aik = Ai[k]
            if aik:
                Ai[k + 1:] = [(a * p - aik * b) // prev
                              for a, b in zip(Ai[k + 1:], tail)]
                Ai[k] = 0
            else:
                Ai[k + 1:] = [(a * p) // prev for a in Ai[k + 1:]]
        prev = p
        k += 1
    det = abs(int(A[k - 1][k - 1])) if k else 1
    return k, det


def smith_factors_mod(dense, d: int, rank: int) -> list[int]:
    """Invariant factors of a matrix of known rank, with all arithmetic
    done modulo d, a positive multiple of the largest invariant factor.

    Entries stay centered in (-d/2, d/2], which bounds coefficient
    growth.  The elimination only diagonalizes, without in-loop
    divisibility enforcement: row/column operations preserve the
    Z/d-cokernel up to isomorphism, so the multiset
    {gcd(diagonal, d)} padded with d for the slots that vanished mod d
    determines the true invariant factors after the divisibility chain
    is restored by gcd/lcm exchanges; the first `rank` entries of that
    chain are the answer.  (Diagonalizing mod a composite d can emit
    more nonzero diagonal entries than the true rank -- e.g. a rank-1
    block leaving both a 2 and a 3 on the diagonal mod 6 -- which the
    chain fix recombines into 1 and 6.)
    """
    if rank == 0:
        return []
    if d == 1:
        return [1] * rank
    d = _mpz(d)
    half = d // 2

    m = len(dense)
    n = len(dense[0]) if m else 0
    zero = _mpz(0)

    def center(v):
        r = v % d
        return r - d if r > half else r

    A = [[center(_mpz(v)) for v in row] for row in dense]

    def row_sub(rt, ri, f):
        # A[ri] -= f * A[rt]  (mod d, centered)
        Rt, Ri = A[rt], A[ri]
        out = []
        for p, q in zip(Rt, Ri):
            if p:
                r = (q - f * p) % d
                out.append(r - d if r > half else r)
            else:
                out.append(q)
        A[ri] = out

    def row_combo(rt, ri, u, v, w, x):
        Rt, Ri = A[rt], A[ri]
        nt, ni = [], []
        for p, q in zip(Rt, Ri):
            if p or q:
                r1 = (u * p + v * q) % d
                r2 = (w * p + x * q) % d
                nt.append(r1 - d if r1 > half else r1)
                ni.append(r2 - d if r2 > half else r2)
            else:
                nt.append(zero)
                ni.append(zero)
        A[rt], A[ri] = nt, ni

    def col_sub(ct, cj, f):
        for row in A:
            p = row[ct]
            if p:
                r = (row[cj] - f * p) % d
                row[cj] = r - d if r > half else r

    def col_combo(ct, cj, u, v, w, x):
        for row in A:
            p, q = row[ct], row[cj]
            if p or q:
                r1 = (u * p + v * q) % d
                r2 = (w * p + x * q) % d
                row[ct] = r1 - d if r1 > half else r1
                row[cj] = r2 - d if r2 > half else r2

    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                v = Ai[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        while True:
            for i in range(t + 1, m):
                b = A[i][t]
                if b:
                    a = A[t][t]
                    if b % a == 0:
                        row_sub(t, i, b // a)
                    else:
                        u, v, g = _xgcd(a, b)
                        row_combo(t, i, u, v, -(b // g), a // g)
            for j in range(t + 1, n):
                b = A[t][j]
                if b:
                    a = A[t][t]
                    if b % a == 0:
                        col_sub(t, j, b // a)
                    else:
                        u, v, g = _xgcd(a, b)
                        col_combo(t, j, u, v, -(b // g), a // g)
            if not any(A[i][t] for i in range(t + 1, m)) and not any(
                A[t][j] for j in range(t + 1, n)
            ):
                break
        diag.append(abs(A[t][t]))
        t += 1

    d = int(d)
    full = [math.gcd(int(g), d) for g in diag] + [d] * (min(m, n) - len(diag))
    return _fix_divisibility_chain(full)[:rank]


def _snf_large_core(dense) -> tuple[list[int], int, dict]:
    """Invariant factors + rank for a dense core too large for the
    exact dense path: deterministic rank and modulus via two Bareiss
    runs, then mod-d Smith elimination."""
    stats = {}
    r1, det1 = bareiss_rank_det(dense)
    if r1 == 0:
        return [], 0, stats
    if det1 == 1:
        d = 1
    else:
        r2, det2 = bareiss_rank_det(dense, shuffle_seed=0x51AB5)
        if r1 != r2:
            raise AssertionError("Bareiss rank mismatch between pivot orders")
        d = math.gcd(det1, det2)
    stats["bareiss_rank"] = r1
    stats["modulus_bits"] = d.bit_length()
    factors = smith_factors_mod(dense, d, r1)
    return factors, r1, stats


# ---------------------------------------------------------------------------
# sparse phase


def _sparse_unit_eliminate(rowmap, colmap):
    """Eliminate with +-1 pivots, Markowitz-style.  Mutates the maps and
    returns the number of unit pivots taken."""
    heap = []
    for i, row in rowmap.items():
        for j, v in row.items():
            if v == 1 or v == -1:
                cost = (len(row) - 1) * (len(colmap[j]) - 1)
                heapq.heappush(heap, (cost, i, j))
    pivots = 0
    while heap:
        cost, i, j = heapq.heappop(heap)
        row = rowmap.get(i)
        if row is None:
            continue
        v = row.get(j)
        if v is None or (v != 1 and v != -1):
            continue
        true_cost = (len(row) - 1) * (len(colmap[j]) - 1)
        if true_cost > cost:
            heapq.heappush(heap, (true_cost, i, j))
            continue
        # eliminate: clear column j with row i, then drop row i / column j
        pivots += 1
        pivot_row = row
        del rowmap[i]
        col_rows = colmap.pop(j)
        col_rows.discard(i)
        for jj in pivot_row:
            if jj != j:
                colmap[jj].discard(i)
        for k in col_rows:
            rk = rowmap[k]
            factor = rk.pop(j) * v  # v in {1,-1}: factor = A[k][j] / pivot
            for jj, pv in pivot_row.items():
                if jj == j:
                    continue
                new = rk.get(jj, 0) - factor * pv
                if new:
                    if jj not in rk:
                        colmap[jj].add(k)
                    rk[jj] = new
                    if new == 1 or new == -1:
                        c = (len(rk) - 1) * (len(colmap[jj]) - 1)
                        heapq.heappush(heap, (c, k, jj))
                else:
                    if jj in rk:
                        del rk[jj]
                        colmap[jj].discard(k)
            if not rk:
                del rowmap[k]
    return pivots


def rank_mod_p(A: SparseIntMatrix, p: int) -> int:
    """Rank of A over F_p by sparse elimination with Markowitz pivoting."""
    rowmap = {}
    for (i, j), v in A.data.items():
        vp = v % p
        if vp:
            rowmap.setdefault(i, {})[j] = vp
    colmap = {}
    for i, row in rowmap.items():
        for j in row:
            colmap.setdefault(j, set()).add(i)
    heap = []
    for i, row in rowmap.items():
        for j in row:
            cost = (len(row) - 1) * (len(colmap[j]) - 1)
            heapq.heappush(heap, (cost, i, j))
    rank = 0
    while heap:
        cost, i, j = heapq.heappop(heap)
        row = rowmap.get(i)
        if row is None or j not in row:
            continue
        true_cost = (len(row) - 1) * (len(colmap[j]) - 1)
        if true_cost > cost:
            heapq.heappush(heap, (true_cost, i, j))
            continue
        rank += 1
        pivot_row = rowmap.pop(i)
        inv = pow(pivot_row[j], -1, p)
        col_rows = colmap.pop(j)
        col_rows.discard(i)
        for jj in pivot_row:
            if jj != j:
                colmap[jj].discard(i)
        for k in col_rows:
            rk = rowmap[k]
            factor = rk.pop(j) * inv % p
            for jj, pv in pivot_row.items():
                if jj == j:
                    continue
                new = (rk.get(jj, 0) - factor * pv) % p
                if new:
                    if jj not in rk:
                        colmap[jj].add(k)
                        heapq.heappush(heap, ((len(rk)) * (len(colmap[jj]) - 1), k, jj))
                    rk[jj] = new
                elif jj in rk:
                    del rk[jj]
                    colmap[jj].discard(k)
            if not rk:
                del rowmap[k]
    return rank


_CHECK_PRIMES_BOUND = 1 << 30


def _random_check_prime(rng: random.Random) -> int:
    import sympy

    return int(sympy.nextprime(rng.randrange(_CHECK_PRIMES_BOUND, 2 * _CHECK_PRIMES_BOUND)))


def snf(A: SparseIntMatrix, want_transforms: bool = False,
        modular_check: bool = True, dense_threshold: int = 120,
        large_core_cells: int = 5000) -> SNFResult:
    """Smith normal form of A.

    Returns the invariant factors d1 | d2 | ... (all positive) and the
    rank.  With ``want_transforms`` the (dense-path) unimodular U, V with
    U*A*V = diag are returned as well.  Cores above ``large_core_cells``
    entries go through the mod-d route (Bareiss rank/determinant, Smith
    elimination modulo a multiple of the largest invariant factor),
    which avoids the entry explosion of exact elimination.
    """
    stats = {"nnz": A.nnz, "input_bits": A.max_bit_length()}
    modd = False
    if want_transforms or max(A.rows, A.cols) <= dense_threshold:
        diag, U, V = _dense_snf(A.to_dense(), want_transforms)
        diag = [d for d in diag if d != 0]
        res = SNFResult(diag=diag, rank=len(diag), U=U, V=V, stats=stats)
    else:
        rowmap = {}
        for (i, j), v in A.data.items():
            rowmap.setdefault(i, {})[j] = v
        colmap = {}
        for i, row in rowmap.items():
            for j in row:
                colmap.setdefault(j, set()).add(i)
        unit_pivots = _sparse_unit_eliminate(rowmap, colmap)
        stats["unit_pivots"] = unit_pivots
        diag = [1] * unit_pivots
        if rowmap:
            # dense core of whatever could not be cleared with unit pivots
            live_rows = sorted(rowmap)
            live_cols = sorted({j for row in rowmap.values() for j in row})
            stats["core_shape"] = (len(live_rows), len(live_cols))
            cindex = {j: jj for jj, j in enumerate(live_cols)}
            dense = [[0] * len(live_cols) for _ in live_rows]
            for ii, i in enumerate(live_rows):
                for j, v in rowmap[i].items():
                    dense[ii][cindex[j]] = v
            if len(live_rows) * len(live_cols) > large_core_cells:
                modd = True
                stats["strategy"] = "mod-d"
                core_diag, core_rank, core_stats = _snf_large_core(dense)
                stats.update(core_stats)
                diag += core_diag
            else:
                core_diag, _, _ = _dense_snf(dense, False)
                diag += [d for d in core_diag if d != 0]
        diag = _fix_divisibility_chain(diag)
        res = SNFResult(diag=diag, rank=len(diag), stats=stats)
    if modular_check and A.nnz and not modd:
        rng = random.Random(0xC0947)
        for _ in range(2):
            p = _random_check_prime(rng)
            rp = rank_mod_p(A, p)
            if rp > res.rank:
                raise AssertionError(
                    f"modular rank precheck failed: rank mod {p} = {rp} > exact {res.rank}"
                )
            stats.setdefault("modular_ranks", []).append((p, rp))
    return res


def cokernel_torsion(A: SparseIntMatrix) -> int:
    """|torsion of Z^rows / column-span of A| = product of invariant factors."""
    return snf(A, want_transforms=False).torsion_order()


# ---------------------------------------------------------------------------
# kernels and homology


def kernel_basis(A: SparseIntMatrix) -> list[dict[int, int]]:
    """Z-basis of {x in Z^cols : A x = 0}, as sparse column vectors.

    Processes the rows of A one at a time, maintaining a basis of the
    kernel of the rows seen so far (an integer column-HNF sweep per row).
    """
    n = A.cols
    basis: list[dict[int, int]] = [{j: 1} for j in range(n)]
    rows = A.row_dicts()
    for row in rows:
        if not row:
            continue
        # image of each basis vector under this row
        imgs = []
        for col in basis:
            s = 0
            for idx, rv in row.items():
                cv = col.get(idx)
                if cv is not None:
                    s += rv * cv
            imgs.append(s)
        # gcd sweep: combine columns until at most one nonzero image is left
        live = [k for k, s in enumerate(imgs) if s]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda k: abs(imgs[k]))
            k0 = live[0]
            nxt = []
            for k in live[1:]:
                q = imgs[k] // imgs[k0]
                if q:
                    # col_k -= q * col_k0
                    ck, c0 = basis[k], basis[k0]
                    for idx, v in c0.items():
                        new = ck.get(idx, 0) - q * v
                        if new:
                            ck[idx] = new
                        else:
                            ck.pop(idx, None)
                    imgs[k] -= q * imgs[k0]
                if imgs[k]:
                    nxt.append(k)
            live = nxt + [k0] if nxt else [k0]
        drop = live[0]
        basis = [c for k, c in enumerate(basis) if k != drop]
    return basis


def _solve_in_span(basis: list[dict[int, int]], B: SparseIntMatrix):
    """Solve K X = B where K has the given columns; returns X as a
    SparseIntMatrix of shape (len(basis), B.cols).  Raises if some column
    of B is not in the integer span."""
    k = len(basis)
    # sparse rows of the augmented system [K | B]
    rowset = set()
    for col in basis:
        rowset.update(col)
    rowset.update(i for (i, _j) in B.data)
    krows = {i: {} for i in rowset}
    for jj, col in enumerate(basis):
        for i, v in col.items():
            krows[i][jj] = v
    brows = {i: {} for i in rowset}
    for (i, j), v in B.data.items():
        brows[i][j] = v

    pivot_of_col: dict[int, int] = {}   # basis column -> row id
    used_rows = set()
    for j in range(k):
        cand = [i for i in krows if j in krows[i] and i not in used_rows]
        if not cand:
            raise ValueError("kernel basis is rank deficient")
        while len(cand) > 1:
            cand.sort(key=lambda i: abs(krows[i][j]))
            i0 = cand[0]
            rest = []
            for i in cand[1:]:
                q = krows[i][j] // krows[i0][j]
                if q:
                    for jj, v in krows[i0].items():
                        new = krows[i].get(jj, 0) - q * v
                        if new:
                            krows[i][jj] = new
                        else:
                            krows[i].pop(jj, None)
                    for jj, v in brows[i0].items():
                        new = brows[i].get(jj, 0) - q * v
                        if new:
                            brows[i][jj] = new
                        else:
                            brows[i].pop(jj, None)
                if j in krows[i]:
                    rest.append(i)
            cand = rest + [i0] if rest else [i0]
        pivot_of_col[j] = cand[0]
        used_rows.add(cand[0])

    X = SparseIntMatrix(k, B.cols)
    xcols: list[dict[int, int]] = []
    for b in range(B.cols):
        x: dict[int, int] = {}
        for j in range(k - 1, -1, -1):
            i = pivot_of_col[j]
            val = brows[i].get(b, 0)
            for jj, v in krows[i].items():
                if jj > j and jj in x:
                    val -= v * x[jj]
            piv = krows[i][j]
            if val % piv:
                raise ValueError("column of B is not in the span of the kernel basis")
            q = val // piv
            if q:
                x[j] = q
        xcols.append(x)
    for b, x in enumerate(xcols):
        for j, v in x.items():
            X[j, b] = v
    # full residual check
    KX = SparseIntMatrix(max(rowset) + 1 if rowset else 0, B.cols)
    for jj, col in enumerate(basis):
        for bcol, x in enumerate(xcols):
            q = x.get(jj)
            if q:
                for i, v in col.items():
                    KX.add_at(i, bcol, q * v)
    for (i, j), v in B.data.items():
        KX.add_at(i, j, -v)
    if not KX.is_zero():
        raise ValueError("solve verification failed")
    return X


def homology(A: SparseIntMatrix, B: SparseIntMatrix) -> HomologyResult:
    """H = ker(A) / im(B) for a complex Z^c2 --B--> Z^c1 --A--> Z^c0.

    Route: kernel basis of A by integer column sweeps, columns of B
    expressed in that basis, Smith normal form of the result.
    """
    if A.cols != B.rows:
        raise ValueError("A.cols must equal B.rows")
    if not A.matmul(B).is_zero():
        raise CompositionError("A*B != 0: not a chain complex")
    K = kernel_basis(A)
    X = _solve_in_span(K, B)
    s = snf(X, want_transforms=False)
    rank_a = A.cols - len(K)
    torsion = [d for d in s.diag if d > 1]
    order = 1
    for d in torsion:
        order *= d
    return HomologyResult(
        betti=len(K) - s.rank,
        torsion_factors=torsion,
        torsion_order=order,
        torsion_log=math.log(order) if order > 1 else 0.0,
        rank_a=rank_a,
        rank_b=s.rank,
    )


def homology_via_cokernel(A: SparseIntMatrix, B: SparseIntMatrix,
                          check_chain: bool = True) -> HomologyResult:
    """Same H = ker(A)/im(B), by the cokernel shortcut.

    Z^c1 / im(B) is an extension of the free module im(A) by H, so the
    torsion of H equals the torsion of coker(B) and
    betti(H) = c1 - rank(B) - rank(A).  This avoids building a kernel
    basis and is the fast path for large complexes.
    """
    if A.cols != B.rows:
        raise ValueError("A.cols must equal B.rows")
    if check_chain and not A.matmul(B).is_zero():
        raise CompositionError("A*B != 0: not a chain complex")
    sb = snf(B, want_transforms=False)
    sa = snf(A, want_transforms=False)
    torsion = sb.torsion_factors
    order = 1
    for d in torsion:
        order *= d
    return HomologyResult(
        betti=A.cols - sb.rank - sa.rank,
        torsion_factors=torsion,
        torsion_order=order,
        torsion_log=math.log(order) if order > 1 else 0.0,
        rank_a=sa.rank,
        rank_b=sb.rank,
    )
