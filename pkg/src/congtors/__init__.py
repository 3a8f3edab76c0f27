"""congtors: torsion in twisted (co)homology of congruence subgroups of
Bianchi groups SL2(O_D), with exact integer linear algebra throughout."""

__version__ = "0.1.0"
