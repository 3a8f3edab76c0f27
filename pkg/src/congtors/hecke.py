"""Local L-factors, the intertwining-operator ratio, and the
archimedean c-function value.

Character values at the uniformizer are stored symbolically as roots
of unity so every factor is an exact cyclotomic-rational number; the
normalization reads |pi_v|^{-s} as q_v^{-s}, the convergent convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy


@dataclass(frozen=True)
class LocalPlaceData:
    """An unramified (or flagged-ramified) finite place.

    chi(pi_v) = zeta^root_index with zeta a primitive root of unity of
    order root_order, optionally times q^norm_exponent.
    """

    q: int
    root_index: int = 0
    root_order: int = 1
    norm_exponent: int = 0
    ramified: bool = False
    conductor_exponent: int = 0

    def __post_init__(self):
        if self.q < 2 or len(sympy.factorint(self.q)) != 1:
            raise ValueError(f"q = {self.q} is not a prime power")
        if self.root_order < 1:
            raise ValueError("root_order must be positive")
        if self.ramified and self.conductor_exponent == 0:
            raise ValueError("ramified place needs a positive conductor exponent")

    def chi_at_uniformizer(self):
        zeta = sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(self.root_index, self.root_order))
        return sympy.simplify(zeta * sympy.Integer(self.q) ** self.norm_exponent)


@dataclass(frozen=True)
class LocalFactor:
    value: sympy.Expr

    def to_complex(self) -> complex:
        return complex(self.value.evalf(30))


def local_L(place: LocalPlaceData, s: int) -> LocalFactor:
    """L_v(chi, s) = 1 / (1 - chi(pi_v) q^{-s}); 1 at a ramified place."""
    if place.ramified:
        return LocalFactor(sympy.Integer(1))
    if s < 2:
        raise ValueError("s >= 2 required (convergent-regime convention)")
    chi = place.chi_at_uniformizer()
    val = 1 / (1 - chi * sympy.Integer(place.q) ** (-s))
    return LocalFactor(sympy.nsimplify(sympy.simplify(val)))


def intertwining_ratio(place: LocalPlaceData, m: int) -> sympy.Expr:
    """The scalar (1 - chi(pi_v) q^{-m}) / (1 - chi(pi_v) q^{-(m-1)})
    multiplying f_v(Id) in the unramified intertwining computation.

    Equals L_v(chi, m-1) / L_v(chi, m); trivial chi, q=5, m=3 gives
    31/30.
    """
    if place.ramified:
        raise ValueError("intertwining ratio is defined at unramified places")
    if m < 2:
        raise ValueError("m >= 2 required (convergent desk regime)")
    chi = place.chi_at_uniformizer()
    q = sympy.Integer(place.q)
    val = (1 - chi * q ** (-m)) / (1 - chi * q ** (-(m - 1)))
    return sympy.nsimplify(sympy.simplify(val))


def c_function(m: int) -> sympy.Expr:
    """Harish-Chandra c-function value 1 / (pi * (i*m + m + 2)), exact."""
    if m < 0:
        raise ValueError("m >= 0 required")
    return 1 / (sympy.pi * (sympy.I * m + m + 2))


def c_function_modulus(m: int) -> sympy.Expr:
    """|c(m)| = 1 / (pi * sqrt(2 m^2 + 4 m + 4))."""
    return 1 / (sympy.pi * sympy.sqrt(2 * m * m + 4 * m + 4))


def hecke_table(qs, orders, ms):
    """Rows (q, chi-order, root-index, m, exact ratio, float ratio) in
    deterministic order, for the CLI table."""
    rows = []
    for q in qs:
        for n in orders:
            for k in range(n):
                place = LocalPlaceData(q=q, root_index=k, root_order=n)
                for m in ms:
                    r = intertwining_ratio(place, m)
                    rows.append((q, n, k, m, r, complex(r.evalf(20))))
    return rows
