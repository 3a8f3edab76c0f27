"""Exact arithmetic in an imaginary quadratic field F = Q(sqrt(-D)).

The ring of integers O_D has Z-basis {1, w} where

    w = sqrt(-D)        if -D != 1 (mod 4), i.e. D = 1, 2 (mod 4),
    w = (1+sqrt(-D))/2  if -D == 1 (mod 4), i.e. D = 3 (mod 4).

In both cases w satisfies w^2 = s*w - n0 with (s, n0) = (0, D) or
(1, (1+D)//4), so all arithmetic stays in Z^2.

>>> F = make_field(1)
>>> F.unit_count, F.disc, F.class_number
(4, -4, 1)
>>> x = RingElement(F, 2, 1)   # 2 + i
>>> x.norm()
5
>>> (x * x.conj()).a
5
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b), g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    # factor out 2 from n; (a/2) = 0, 1, -1 for a even, a = +-1 (8), a = +-3 (8)
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi symbol loop for odd n > 0
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


@dataclass(frozen=True)
class QuadField:
    """The field Q(sqrt(-D)) with its ring of integers O_D."""

    D: int
    disc: int
    s: int          # trace of w:  w + wbar = s
    n0: int         # norm of w:   w * wbar = n0
    omega_desc: str
    unit_count: int
    class_number: int

    def omega_complex(self) -> complex:
        root = math.sqrt(self.D)
        if self.s == 0:
            return complex(0.0, root)
        return complex(0.5, root / 2.0)

    def zero(self) -> "RingElement":
        return RingElement(self, 0, 0)

    def one(self) -> "RingElement":
        return RingElement(self, 1, 0)

    def omega(self) -> "RingElement":
        return RingElement(self, 0, 1)

    def element(self, a: int, b: int = 0) -> "RingElement":
        return RingElement(self, a, b)

    def units(self) -> list["RingElement"]:
        out = [self.one(), self.element(-1, 0)]
        if self.D == 1:
            out += [self.omega(), self.element(0, -1)]
        elif self.D == 3:
            w = self.omega()
            out += [w, -w, w * w, -(w * w)]
        return out


def _class_number(disc: int) -> int:
    # count reduced positive definite forms (a, b, c), b^2 - 4ac = disc,
    # |b| <= a <= c, with b >= 0 when |b| == a or a == c
    count = 0
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a, a + 1):
            if (b * b - disc) % (4 * a) != 0:
                continue
            c = (b * b - disc) // (4 * a)
            if c < a:
                continue
            if b < 0 and (-b == a or a == c):
                continue
            count += 1
        a += 1
    return count


@lru_cache(maxsize=None)
def make_field(D: int) -> QuadField:
    """Construct Q(sqrt(-D)) for squarefree D >= 1.

    >>> make_field(3).unit_count
    6
    >>> make_field(7).omega_desc
    '(1+sqrt(-7))/2'
    """
    if D < 1 or not is_squarefree(D):
        raise ValueError(f"D must be a squarefree positive integer, got {D}")
    if D % 4 == 3:
        disc = -D
        s, n0 = 1, (1 + D) // 4
        omega_desc = f"(1+sqrt(-{D}))/2"
    else:
        disc = -4 * D
        s, n0 = 0, D
        omega_desc = f"sqrt(-{D})"
    unit_count = 4 if D == 1 else 6 if D == 3 else 2
    return QuadField(D, disc, s, n0, omega_desc, unit_count, _class_number(disc))


@dataclass(frozen=True)
class RingElement:
    """a + b*w in O_D, coordinates in the basis {1, w}."""

    field: QuadField
    a: int
    b: int

    def __add__(self, other: "RingElement") -> "RingElement":
        return RingElement(self.field, self.a + other.a, self.b + other.b)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return RingElement(self.field, self.a - other.a, self.b - other.b)

    def __neg__(self) -> "RingElement":
        return RingElement(self.field, -self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, int):
            return RingElement(self.field, self.a * other, self.b * other)
        F = self.field
        # (a + bw)(c + dw) = ac + (ad + bc)w + bd(s w - n0)
        a, b, c, d = self.a, self.b, other.a, other.b
        return RingElement(F, a * c - b * d * F.n0, a * d + b * c + b * d * F.s)

    __rmul__ = __mul__

    def conj(self) -> "RingElement":
        # wbar = s - w
        return RingElement(self.field, self.a + self.b * self.field.s, -self.b)

    def norm(self) -> int:
        F = self.field
        return self.a * self.a + self.a * self.b * F.s + self.b * self.b * F.n0

    def trace(self) -> int:
        return 2 * self.a + self.b * self.field.s

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_complex(self) -> complex:
        return self.a + self.b * self.field.omega_complex()

    def __str__(self) -> str:
        return f"{self.a}{self.b:+d}w"


def parse_element(F: QuadField, text: str) -> RingElement:
    """Parse 'a', 'b*w', or 'a+b*w' (also 'a-b*w', 'w', '-w')."""
    t = text.replace(" ", "").replace("*", "")
    if not t:
        raise ValueError("empty element string")
    # split into the 1-part and the w-part
    a = b = 0
    term = ""
    terms = []
    for ch in t:
        if ch in "+-" and term:
            terms.append(term)
            term = ch
        else:
            term += ch
    terms.append(term)
    for term in terms:
        if term.endswith("w"):
            coeff = term[:-1]
            if coeff in ("", "+"):
                b += 1
            elif coeff == "-":
                b -= 1
            else:
                b += int(coeff)
        else:
            a += int(term)
    return RingElement(F, a, b)


class Mat2:
    """2x2 matrix over O_D; entries are RingElements."""

    __slots__ = ["a", "b", "c", "d"]

    def __init__(self, a: RingElement, b: RingElement, c: RingElement, d: RingElement):
        self.a, self.b, self.c, self.d = a, b, c, d

    @staticmethod
    def identity(F: QuadField) -> "Mat2":
        return Mat2(F.one(), F.zero(), F.zero(), F.one())

    def __mul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> RingElement:
        return self.a * self.d - self.b * self.c

    def inv(self) -> "Mat2":
        # only for det == 1
        F = self.a.field
        if self.det() != F.one():
            raise ValueError("Mat2.inv requires determinant 1")
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __eq__(self, other) -> bool:
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def is_identity(self) -> bool:
        F = self.a.field
        return self == Mat2.identity(F)

    def is_minus_identity(self) -> bool:
        F = self.a.field
        return self == Mat2(-F.one(), F.zero(), F.zero(), -F.one())

    def entries(self) -> tuple[RingElement, RingElement, RingElement, RingElement]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


@dataclass(frozen=True)
class RingIdeal:
    """Nonzero ideal of O_D, stored as a 2x2 upper-triangular HNF basis.

    The Z-basis of the ideal is {h00*1, h01*1 + h11*w} with
    h00, h11 > 0 and 0 <= h01 < h00; norm = h00 * h11.
    """

    field: QuadField
    generators: tuple[RingElement, ...]
    hnf: tuple[tuple[int, int], tuple[int, int]]

    @property
    def norm(self) -> int:
        return self.hnf[0][0] * self.hnf[1][1]

    def contains(self, x: RingElement) -> bool:
        h00, h01 = self.hnf[0]
        h11 = self.hnf[1][1]
        if x.b % h11 != 0:
            return False
        k = x.b // h11
        return (x.a - k * h01) % h00 == 0

    def smallest_integer(self) -> int:
        """Positive generator of (ideal intersect Z)."""
        return self.hnf[0][0]

    def __str__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"({gens})"


def _hnf_2xn(vectors: list[tuple[int, int]]) -> tuple[tuple[int, int], tuple[int, int]]:
    """HNF basis ((h00, h01), (0, h11)) of the Z-span of (a, b) pairs,
    coordinates meaning a*1 + b*w."""
    a_gcd = 0           # lattice meets Z in a_gcd * Z (so far)
    b_vec = None        # one vector with minimal positive w-coordinate
    pending = list(vectors)
    while pending:
        x, y = pending.pop()
        if y == 0:
            a_gcd = math.gcd(a_gcd, x)
            continue
        if b_vec is None:
            b_vec = (x, y)
            continue
        bx, by = b_vec
        u, v, g = xgcd(by, y)
        # new short vector with w-coordinate g; the eliminated combination
        # lands in Z
        new = (u * bx + v * x, g)
        elim_x = (y // g) * bx - (by // g) * x
        a_gcd = math.gcd(a_gcd, elim_x)
        b_vec = new
    if b_vec is None:
        raise ValueError("zero ideal")
    bx, by = b_vec
    if by < 0:
        bx, by = -bx, -by
    if a_gcd == 0:
        raise ValueError("rank-deficient span: not a nonzero ideal")
    a_gcd = abs(a_gcd)
    bx %= a_gcd
    return ((a_gcd, bx), (0, by))


def make_ideal(F: QuadField, generators) -> RingIdeal:
    """Ideal of O_D generated by the given elements.

    >>> F = make_field(11)
    >>> make_ideal(F, [F.element(3)]).norm
    9
    """
    gens = tuple(g if isinstance(g, RingElement) else F.element(g) for g in generators)
    if all(g.is_zero() for g in gens):
        raise ValueError("zero ideal")
    vectors = []
    w = F.omega()
    for g in gens:
        if g.is_zero():
            continue
        gw = g * w
        vectors.append((g.a, g.b))
        vectors.append((gw.a, gw.b))
    hnf = _hnf_2xn(vectors)
    ideal = RingIdeal(F, gens, hnf)
    _check_omega_stable(ideal)
    return ideal


def _check_omega_stable(I: RingIdeal) -> None:
    F = I.field
    (h00, h01), (_, h11) = I.hnf
    v1 = F.element(h00, 0) * F.omega()
    v2 = F.element(h01, h11) * F.omega()
    if not (I.contains(v1) and I.contains(v2)):
        raise ValueError("HNF basis is not omega-stable; not an O_D ideal")


def ideal_norm(I: RingIdeal) -> int:
    """|O_D / I|, the absolute value of the HNF determinant."""
    return I.norm


class ResidueRing:
    """The finite ring O_D / I with canonical coset representatives.

    Elements are pairs (x, y) with 0 <= x < h00, 0 <= y < h11, meaning
    x + y*w modulo I.
    """

    def __init__(self, F: QuadField, I: RingIdeal):
        self.field = F
        self.ideal = I
        (self.h00, self.h01), (_, self.h11) = I.hnf
        self.size = I.norm
        # multiplication table data: w^2 = s*w - n0
        self._s, self._n0 = F.s, F.n0
        self._units: set[tuple[int, int]] | None = None

    def reduce_pair(self, a: int, b: int) -> tuple[int, int]:
        y = b % self.h11
        k = (b - y) // self.h11
        x = (a - k * self.h01) % self.h00
        return (x, y)

    def reduce(self, el: RingElement) -> tuple[int, int]:
        return self.reduce_pair(el.a, el.b)

    def elements(self):
        for x in range(self.h00):
            for y in range(self.h11):
                yield (x, y)

    @property
    def zero(self) -> tuple[int, int]:
        return (0, 0)

    @property
    def one(self) -> tuple[int, int]:
        return self.reduce_pair(1, 0)

    def add(self, u, v):
        return self.reduce_pair(u[0] + v[0], u[1] + v[1])

    def neg(self, u):
        return self.reduce_pair(-u[0], -u[1])

    def mul(self, u, v):
        a, b = u
        c, d = v
        return self.reduce_pair(a * c - b * d * self._n0, a * d + b * c + b * d * self._s)

    def units(self) -> set[tuple[int, int]]:
        if self._units is None:
            one = self.one
            prods = {}
            for u in self.elements():
                for v in self.elements():
                    if self.mul(u, v) == one:
                        prods.setdefault(u, v)
            self._units = set(prods)
        return self._units

    def is_unit(self, u) -> bool:
        return u in self.units()

    def inverse(self, u):
        one = self.one
        for v in self.elements():
            if self.mul(u, v) == one:
                return v
        raise ZeroDivisionError(f"{u} is not a unit in the residue ring")


def residue_ring(F: QuadField, I: RingIdeal) -> ResidueRing:
    """Finite quotient O_D / I of size N(I)."""
    if I.field is not F and I.field != F:
        raise ValueError("ideal does not belong to this field")
    return ResidueRing(F, I)


def zeta_F_at_2(F: QuadField, precision: int = 9) -> float:
    """zeta_F(2) = zeta(2) * L(2, chi_disc) with a proven truncation tail.

    The Dirichlet series sum_{n>N} chi(n)/n^2 is bounded by 2*M/(N+1)^2
    via Abel summation, where M bounds the partial sums of chi over any
    range (M <= |disc| suffices since chi has period |disc| and mean 0).

    >>> abs(zeta_F_at_2(make_field(1)) - 1.5067030) < 1e-6
    True
    """
    if precision <= 0:
        raise ValueError("precision must be a positive number of digits")
    if precision > 15:
        raise ValueError("precision beyond 15 digits is not supported")
    q = abs(F.disc)
    chi = [kronecker(F.disc, n) for n in range(q)]
    M = max(abs(sum(chi[: k + 1])) for k in range(q)) + 1
    target = 10.0 ** (-precision)
    # choose N with 2*M/(N+1)^2 <= target / 2, leaving slack for rounding
    N = math.isqrt(int(4 * M / target)) + 1
    L = math.fsum(chi[n % q] / (n * n) for n in range(1, N + 1))
    return (math.pi ** 2 / 6.0) * L


def dirichlet_L2(disc: int, terms: int) -> float:
    """Partial Dirichlet sum for L(2, chi_disc); independent cross-check."""
    return math.fsum(kronecker(disc, n) / (n * n) for n in range(1, terms + 1))


def splitting_type(F: QuadField, p: int) -> str:
    """How the rational prime p behaves in O_D: 'split', 'inert', 'ramified'."""
    k = kronecker(F.disc, p)
    return {1: "split", -1: "inert", 0: "ramified"}[k]
