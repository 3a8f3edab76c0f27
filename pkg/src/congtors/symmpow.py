"""Integral symmetric-power representations of SL2(O_D).

Lambda(m) = Symm^m O_D^2 with monomial basis e1^(m-j) e2^j, j = 0..m
(0-indexed).  The action convention is on symmetric tensors:

    rho(g) (e1^(m-j) e2^j) = (g e1)^(m-j) (g e2)^j,

which keeps all matrix entries in O_D and makes rho(n_a) upper
triangular with entry (i, j) = a^(j-i) * binom(j, j-i).

The dual is rho_dual(g) = rho(g^{-1})^T and the self-dual barred lattice
is the block sum of the two.  Restriction of scalars to Z (basis {1, w}
of O_D) doubles every dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy

from .intlinalg import SparseIntMatrix
from .quadfield import Mat2, QuadField, RingElement

VARIANTS = ("standard", "dual", "barred")


def _sym_power_matrix(m: int, g: Mat2) -> list[list[RingElement]]:
    F = g.a.field
    zero = F.zero()
    cols = []
    # (a e1 + c e2) and (b e1 + d e2) are the images of e1, e2
    for j in range(m + 1):
        # expand (a e1 + c e2)^(m-j) * (b e1 + d e2)^j
        poly = [F.one()]
        for _ in range(m - j):
            nxt = [zero] * (len(poly) + 1)
            for k, coef in enumerate(poly):
                nxt[k] = nxt[k] + coef * g.a
                nxt[k + 1] = nxt[k + 1] + coef * g.c
            poly = nxt
        for _ in range(j):
            nxt = [zero] * (len(poly) + 1)
            for k, coef in enumerate(poly):
                nxt[k] = nxt[k] + coef * g.b
                nxt[k + 1] = nxt[k + 1] + coef * g.d
            poly = nxt
        cols.append(poly)
    return [[cols[j][i] for j in range(m + 1)] for i in range(m + 1)]


def _transpose(M):
    return [list(row) for row in zip(*M)]


def _block_diag(Ms):
    F = Ms[0][0][0].field
    zero = F.zero()
    size = sum(len(M) for M in Ms)
    out = [[zero] * size for _ in range(size)]
    off = 0
    for M in Ms:
        for i, row in enumerate(M):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(M)
    return out


def rho_m(m: int, g: Mat2, variant: str = "standard") -> list[list[RingElement]]:
    """Matrix of the m-th symmetric power of g in the monomial basis.

    variant 'standard' is rho_m, 'dual' is rho_m(g^{-1})^T, 'barred' is
    the block sum of the two.  Only defined for det(g) = 1.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    F = g.a.field
    if g.det() != F.one():
        raise ValueError("rho_m requires determinant 1")
    if variant == "standard":
        return _sym_power_matrix(m, g)
    if variant == "dual":
        return _transpose(_sym_power_matrix(m, g.inv()))
    return _block_diag([
        _sym_power_matrix(m, g),
        _transpose(_sym_power_matrix(m, g.inv())),
    ])


def rep_dim(m: int, variant: str) -> int:
    return 2 * (m + 1) if variant == "barred" else m + 1


def omatrix_to_int(M: list[list[RingElement]]) -> list[list[int]]:
    """Restriction of scalars O_D -> Z: each entry a + b*w becomes the
    2x2 block of multiplication by it in the basis {1, w}."""
    if not M:
        return []
    F = M[0][0].field
    s, n0 = F.s, F.n0
    r = len(M)
    out = [[0] * (2 * r) for _ in range(2 * r)]
    for i, row in enumerate(M):
        for j, x in enumerate(row):
            a, b = x.a, x.b
            if a or b:
                out[2 * i][2 * j] = a
                out[2 * i][2 * j + 1] = -b * n0
                out[2 * i + 1][2 * j] = b
                out[2 * i + 1][2 * j + 1] = a + b * s
    return out


def rho_m_int(m: int, g: Mat2, variant: str = "standard") -> list[list[int]]:
    """Integer matrix of rho_m after restriction of scalars; dimension
    2(m+1), or 4(m+1) for the barred variant."""
    return omatrix_to_int(rho_m(m, g, variant))


def omatrix_mul(A, B):
    F = A[0][0].field
    zero = F.zero()
    n = len(A)
    out = [[zero] * n for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for k in range(n):
            v = Ai[k]
            if v.is_zero():
                continue
            Bk = B[k]
            oi = out[i]
            for j in range(n):
                if not Bk[j].is_zero():
                    oi[j] = oi[j] + v * Bk[j]
    return out


def omatrix_to_complex(M) -> numpy.ndarray:
    return numpy.array([[x.to_complex() for x in row] for row in M], dtype=complex)


def operator_norm_bound(m: int, g: Mat2) -> dict:
    """Certified bound ||rho_1(g)||^m and the directly computed
    ||rho_m(g)|| for comparison.

    ||g||^2 = (T + sqrt(T^2 - 4)) / 2 with T = sum of entry norms (the
    Gram matrix g* g has integer trace T and determinant 1), evaluated
    with outward rounding.  The direct norm is taken in the inner
    product Symm^m inherits from the tensor power, in which the monomial
    e1^(m-j) e2^j has squared length 1 / binom(m, j); the operator norm
    of Symm^m g in that metric is bounded by ||g||^m, which is false for
    the unweighted coordinate 2-norm.
    """
    T = sum(x.norm() for x in g.entries())
    disc = T * T - 4
    root = math.sqrt(disc) if disc > 0 else 0.0
    lam_max = (T + math.nextafter(root, math.inf)) / 2.0  # >= exact lambda_max
    bound = math.nextafter(math.sqrt(lam_max), math.inf) ** m
    bound = math.nextafter(bound, math.inf)
    A = omatrix_to_complex(rho_m(m, g))
    w = numpy.array([1.0 / math.sqrt(math.comb(m, j)) for j in range(m + 1)])
    weighted = (w[:, None] * A) / w[None, :]
    direct = float(numpy.linalg.norm(weighted, 2))
    return {"bound": bound, "direct": direct, "rho1_gram_trace": T}


@dataclass(frozen=True)
class LatticeRep:
    """The integral representation rho_m on Lambda(m) (standard), its
    Z-dual (dual), or their self-dual direct sum (barred)."""

    m: int
    variant: str = "standard"

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def dim(self) -> int:
        return rep_dim(self.m, self.variant)

    @property
    def zdim(self) -> int:
        # Z-rank after restriction of scalars O_D -> Z
        return 2 * self.dim

    @property
    def basis_desc(self) -> tuple[str, ...]:
        mono = tuple(f"X^{self.m - j}Y^{j}" for j in range(self.m + 1))
        if self.variant == "standard":
            return mono
        dual = tuple(f"({s})*" for s in mono)
        return dual if self.variant == "dual" else mono + dual

    def action(self, g: Mat2) -> list[list[RingElement]]:
        return rho_m(self.m, g, self.variant)

    def action_int(self, g: Mat2) -> list[list[int]]:
        return rho_m_int(self.m, g, self.variant)


# ---------------------------------------------------------------------------
# lattices in the rational span of the monomial basis


@dataclass(frozen=True)
class LatticeInZBasis:
    """Lattice spanned by the columns of basis_matrix / denom."""

    m: int
    basis_matrix: tuple[tuple[int, ...], ...]
    denom: int = 1

    @staticmethod
    def standard(m: int) -> "LatticeInZBasis":
        return LatticeInZBasis(m, tuple(
            tuple(int(i == j) for j in range(m + 1)) for i in range(m + 1)
        ))

    def to_sympy(self):
        import sympy

        return sympy.Matrix([[sympy.Rational(v, self.denom) for v in row]
                             for row in self.basis_matrix])

    def scale(self, c: int) -> "LatticeInZBasis":
        return LatticeInZBasis(self.m, tuple(
            tuple(c * v for v in row) for row in self.basis_matrix
        ), self.denom)


def _from_sympy(m: int, B) -> LatticeInZBasis:
    import sympy

    den = 1
    for v in B:
        den = sympy.ilcm(den, sympy.Rational(v).q)
    rows = tuple(
        tuple(int(B[i, j] * den) for j in range(B.cols)) for i in range(B.rows)
    )
    return LatticeInZBasis(m, rows, int(den))


def pairing_gram(m: int):
    """Gram matrix of the determinant-induced pairing on Symm^m:
    antidiagonal with <e1^(m-i) e2^i, e1^(m-j) e2^j> =
    (-1)^i / binom(m, i) when i + j = m."""
    import sympy

    P = sympy.zeros(m + 1, m + 1)
    for i in range(m + 1):
        P[i, m - i] = sympy.Rational((-1) ** i, math.comb(m, i))
    return P


def dual_lattice(L: LatticeInZBasis, m: int) -> LatticeInZBasis:
    """Dual of L with respect to the determinant-induced pairing."""
    if L.m != m:
        raise ValueError("lattice degree mismatch")
    B = L.to_sympy()
    if B.det() == 0:
        raise ValueError("singular basis matrix")
    P = pairing_gram(m)
    # dual basis Bd with Bd^T * P * B = Id
    Bd = (P * B).T.inv()
    return _from_sympy(m, Bd)


def lattice_sandwich(L1: LatticeInZBasis, L2: LatticeInZBasis, m: int):
    """Minimal rational a with a*L1 inside L2, and the minimal k >= 0
    with L2 inside a * (m!)^(-k) * L1.  Returns (a, k)."""
    if L1.m != m or L2.m != m:
        raise ValueError("lattice degree mismatch")
    import sympy

    B1, B2 = L1.to_sympy(), L2.to_sympy()
    if B1.det() == 0 or B2.det() == 0:
        raise ValueError("singular basis matrix")
    C = B2.inv() * B1
    # minimal positive rational a with a*C integral
    den = 1
    for v in C:
        den = sympy.ilcm(den, sympy.Rational(v).q)
    num = 0
    for v in C:
        num = sympy.igcd(num, int(v * den))
    if num == 0:
        raise ValueError("L1 is the zero lattice")
    a = sympy.Rational(den, num)
    # minimal k with (m!)^k / a * B1^{-1} B2 integral
    Cinv = B1.inv() * B2
    fact = sympy.Integer(math.factorial(m)) if m > 0 else sympy.Integer(1)
    k = 0
    M = Cinv / a
    while True:
        if all(sympy.Rational(v).q == 1 for v in M):
            return Fraction(int(a.p), int(a.q)), k
        if fact == 1:
            raise ValueError("lattices are not commensurable under the sandwich form")
        M = M * fact
        k += 1
        if k > 4 * (m + 2):
            raise ValueError("no finite sandwich exponent found")


def is_invariant(L: LatticeInZBasis, gs: list[Mat2], variant: str = "standard") -> bool:
    """Exact membership test: rho(g) maps the lattice into itself for
    every g in gs (and hence onto, since det rho(g) is a unit)."""
    import sympy

    B = L.to_sympy()
    Binv = B.inv()
    for g in gs:
        M = rho_m(L.m, g, variant)
        # only integer-entry group elements act on a Q-span lattice
        dense = [[x.a if x.b == 0 else None for x in row] for row in M]
        if any(v is None for row in dense for v in row):
            raise ValueError("group element does not act rationally on this lattice")
        R = sympy.Matrix(dense)
        X = Binv * R * B
        if not all(sympy.Rational(v).q == 1 for v in X):
            return False
    return True
