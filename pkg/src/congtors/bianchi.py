"""Presentations of the Bianchi groups SL2(O_D) and their principal
congruence subgroups.

Presentations for D in {1, 2, 3, 7, 11, 19} ship as data files (see
data/README in the package docs for the grammar); every relator is
re-verified by exact matrix evaluation at load time.  Gamma(a) is built
by enumerating the finite image of SL2(O_D) in SL2(O_D/a) (the
reduction map is surjective, so cosets of Gamma(a) biject with image
elements), taking a breadth-first Schreier transversal, rewriting the
ambient relators with Reidemeister-Schreier, and pruning the result
with Tietze transformations.

Words are tuples of nonzero signed integers: +k is the k-th generator
(1-based), -k its inverse.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

from .quadfield import Mat2, QuadField, RingIdeal, make_field, residue_ring

BUILTIN_D = (1, 2, 3, 7, 11, 19)

PRESENTATION_MAGIC = "congtors-presentation v1"


class PresentationError(ValueError):
    """Corrupt or inconsistent presentation data."""


class NeatnessError(ValueError):
    """Level norm below the neatness threshold N(a) >= 9."""


class InconsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


def invert_word(word: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(word))


def free_reduce(word) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word) -> tuple[int, ...]:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


@dataclass(frozen=True)
class GroupPresentation:
    """Finite presentation whose generators carry explicit matrices
    over O_D; relators must evaluate to the identity matrix exactly."""

    field: QuadField
    names: tuple[str, ...]
    matrices: tuple[Mat2, ...]
    relators: tuple[tuple[int, ...], ...]

    @property
    def generator_count(self) -> int:
        return len(self.names)

    def evaluate_word(self, word) -> Mat2:
        g = Mat2.identity(self.field)
        for x in word:
            M = self.matrices[abs(x) - 1]
            g = g * (M if x > 0 else M.inv())
        return g

    def verify(self) -> None:
        one = self.field.one()
        for name, M in zip(self.names, self.matrices):
            if M.det() != one:
                raise PresentationError(f"generator {name} has determinant != 1")
        for i, r in enumerate(self.relators):
            for x in r:
                if not 1 <= abs(x) <= len(self.names):
                    raise PresentationError(f"relator {i} uses unknown generator {x}")
            if not self.evaluate_word(r).is_identity():
                raise PresentationError(
                    f"relator {i} ({self.word_str(r)}) does not evaluate to the identity"
                )

    def word_str(self, word) -> str:
        return " ".join(
            self.names[x - 1] if x > 0 else self.names[-x - 1] + "'" for x in word
        )


def _parse_word(tokens, name_index) -> tuple[int, ...]:
    word = []
    for tok in tokens:
        inv = tok.endswith("'")
        name = tok[:-1] if inv else tok
        if name not in name_index:
            raise PresentationError(f"unknown generator {name!r} in relator")
        k = name_index[name] + 1
        word.append(-k if inv else k)
    return tuple(word)


def parse_presentation(text: str) -> GroupPresentation:
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines or lines[0] != PRESENTATION_MAGIC:
        raise PresentationError(f"bad header, expected {PRESENTATION_MAGIC!r}")
    D = None
    names: list[str] = []
    matrices: dict[str, Mat2] = {}
    relator_tokens: list[list[str]] = []
    for ln in lines[1:]:
        parts = ln.split()
        key = parts[0]
        if key == "D":
            D = int(parts[1])
        elif key == "generators":
            names = parts[1:]
        elif key == "matrix":
            if D is None:
                raise PresentationError("matrix line before D line")
            F = make_field(D)
            name = parts[1]
            v = [int(x) for x in parts[2:]]
            if len(v) != 8:
                raise PresentationError(f"matrix {name}: expected 8 integers")
            matrices[name] = Mat2(
                F.element(v[0], v[1]), F.element(v[2], v[3]),
                F.element(v[4], v[5]), F.element(v[6], v[7]),
            )
        elif key == "relator":
            relator_tokens.append(parts[1:])
        else:
            raise PresentationError(f"unknown directive {key!r}")
    if D is None or not names:
        raise PresentationError("missing D or generators line")
    missing = [n for n in names if n not in matrices]
    if missing:
        raise PresentationError(f"generators without matrices: {missing}")
    name_index = {n: i for i, n in enumerate(names)}
    relators = tuple(_parse_word(toks, name_index) for toks in relator_tokens)
    P = GroupPresentation(
        field=make_field(D),
        names=tuple(names),
        matrices=tuple(matrices[n] for n in names),
        relators=relators,
    )
    P.verify()
    return P


def _data_dir() -> str:
    override = os.environ.get("CONGTORS_DATA_DIR")
    if override:
        return override
    return os.path.join(os.path.dirname(__file__), "data")


def load_presentation(D: int, path: str | None = None) -> GroupPresentation:
    """Presentation of SL2(O_D) from a data file.

    Built-in D: 1, 2, 3, 7, 11, 19 (the Euclidean fields plus the two
    remaining class-number-one discriminants with known presentations).
    A user file can be supplied via `path` or by setting
    CONGTORS_DATA_DIR to a directory containing d<D>.txt.
    """
    if path is None:
        path = os.path.join(_data_dir(), f"d{D}.txt")
        if not os.path.exists(path):
            raise PresentationError(
                f"no presentation available for D={D}; built-in: {BUILTIN_D}"
            )
    with open(path) as fh:
        P = parse_presentation(fh.read())
    if P.field.D != D:
        raise PresentationError(f"file declares D={P.field.D}, requested {D}")
    return P


# ---------------------------------------------------------------------------
# congruence subgroups


def _reduce_mat(R, M: Mat2):
    return (
        R.reduce_pair(M.a.a, M.a.b), R.reduce_pair(M.b.a, M.b.b),
        R.reduce_pair(M.c.a, M.c.b), R.reduce_pair(M.d.a, M.d.b),
    )


def _rmat_mul(R, X, Y):
    a, b, c, d = X
    e, f, g, h = Y
    return (
        R.add(R.mul(a, e), R.mul(b, g)), R.add(R.mul(a, f), R.mul(b, h)),
        R.add(R.mul(c, e), R.mul(d, g)), R.add(R.mul(c, f), R.mul(d, h)),
    )


def _rmat_inv(R, X):
    # adjugate; valid because the lifted matrix has determinant 1
    a, b, c, d = X
    return (d, R.neg(b), R.neg(c), a)


@dataclass(frozen=True)
class CongruenceSubgroup:
    level: RingIdeal
    index: int
    coset_table: tuple[tuple[int, ...], ...]  # one permutation per ambient generator
    schreier_transversal: tuple[tuple[int, ...], ...]  # words in ambient generators
    presentation: GroupPresentation
    ambient: GroupPresentation
    neat: bool
    schreier_generator_count: int  # before Tietze simplification


def _tietze_simplify(gen_words, relators, max_growth=4):
    """Eliminate redundant generators from (gen_words, relators).

    gen_words[i] is the i-th subgroup generator as a word in the
    ambient group (kept in sync so matrices can be recomputed).
    Generators are eliminated when some relator uses them exactly once;
    total relator length may grow at most max_growth-fold.
    """
    import heapq

    rels: dict[int, tuple[int, ...]] = {}
    for r in relators:
        w = cyclic_reduce(r)
        if w:
            rels[len(rels)] = w
    total_len = sum(len(w) for w in rels.values())
    budget = max_growth * max(1, total_len)

    # occ[g][rid] = number of occurrences of generator g in relator rid
    occ: dict[int, dict[int, int]] = {}

    def add_occ(rid, w):
        for x in w:
            occ.setdefault(abs(x), {}).setdefault(rid, 0)
            occ[abs(x)][rid] += 1

    def drop_occ(rid, w):
        for x in w:
            d = occ[abs(x)]
            d[rid] -= 1
            if d[rid] == 0:
                del d[rid]

    for rid, w in rels.items():
        add_occ(rid, w)

    def cost_of(rid, g):
        others = sum(c for r2, c in occ[g].items() if r2 != rid)
        return (len(rels[rid]) - 1) * others

    heap = []
    for g, d in occ.items():
        for rid, c in d.items():
            if c == 1:
                heapq.heappush(heap, (cost_of(rid, g), rid, g))

    while heap:
        cost, ri, g = heapq.heappop(heap)
        if ri not in rels or occ.get(g, {}).get(ri) != 1:
            continue
        if cost != cost_of(ri, g):
            heapq.heappush(heap, (cost_of(ri, g), ri, g))
            continue
        r = rels[ri]
        pos = next(i for i, x in enumerate(r) if abs(x) == g)
        # rotate so the g-letter is first, then g^(+-1) = inverse of the rest
        rot = r[pos:] + r[:pos]
        rest = rot[1:]
        sub = invert_word(rest) if rot[0] > 0 else rest  # word equal to generator g

        affected = [r2 for r2 in occ[g] if r2 != ri]
        new_words = {}
        delta = -len(r)
        for r2 in affected:
            out = []
            for x in rels[r2]:
                if x == g:
                    out.extend(sub)
                elif x == -g:
                    out.extend(invert_word(sub))
                else:
                    out.append(x)
            nw = cyclic_reduce(out)
            new_words[r2] = nw
            delta += len(nw) - len(rels[r2])
        if total_len + delta > budget:
            break
        total_len += delta
        drop_occ(ri, r)
        del rels[ri]
        for r2, nw in new_words.items():
            drop_occ(r2, rels[r2])
            if nw:
                rels[r2] = nw
                add_occ(r2, nw)
                local = {}
                for x in nw:
                    local[abs(x)] = local.get(abs(x), 0) + 1
                for g2, c in local.items():
                    if c == 1:
                        heapq.heappush(heap, (cost_of(r2, g2), r2, g2))
            else:
                del rels[r2]
        gen_words[g - 1] = None  # mark eliminated

    def normal_form(w):
        # canonical representative under rotation and inversion
        best = None
        for cand in (w, invert_word(w)):
            for i in range(len(cand)):
                rot = cand[i:] + cand[:i]
                if best is None or rot < best:
                    best = rot
        return best if best is not None else ()

    seen = set()
    uniq = []
    for rid in sorted(rels):
        nf = normal_form(rels[rid])
        if nf and nf not in seen:
            seen.add(nf)
            uniq.append(rels[rid])

    # renumber surviving generators
    keep = [i for i, w in enumerate(gen_words) if w is not None]
    remap = {old + 1: new + 1 for new, old in enumerate(keep)}
    new_words = [gen_words[i] for i in keep]
    new_relators = [
        tuple(remap[x] if x > 0 else -remap[-x] for x in r) for r in uniq
    ]
    return new_words, new_relators


def congruence_subgroup(
    P: GroupPresentation, I: RingIdeal, allow_small_level: bool = False,
    tietze_max_growth: int = 4,
) -> CongruenceSubgroup:
    """Gamma(a) < SL2(O_D) with a presentation obtained by
    Reidemeister-Schreier rewriting and Tietze simplification.

    Levels of norm < 9 are rejected unless allow_small_level is set:
    N(a) >= 9 guarantees the subgroup is neat.  tietze_max_growth
    bounds the intermediate relator-length growth during simplification
    (different budgets give different but equivalent presentations).
    """
    F = P.field
    N = I.norm
    neat = N >= 9
    if not neat and not allow_small_level:
        raise NeatnessError(
            f"level norm {N} < 9; pass allow_small_level=True to proceed anyway"
        )
    R = residue_ring(F, I)
    ngen = P.generator_count
    gen_imgs = [_reduce_mat(R, M) for M in P.matrices]
    gen_inv_imgs = [_rmat_inv(R, X) for X in gen_imgs]

    ident = _reduce_mat(R, Mat2.identity(F))
    coset_of = {ident: 0}
    transversal: list[tuple[int, ...]] = [()]
    elems = [ident]
    queue = deque([0])
    edges: list[list[int | None]] = [[None] * (2 * ngen)]
    # edge slots: 2k = generator k+1, 2k+1 = its inverse
    while queue:
        c = queue.popleft()
        X = elems[c]
        for k in range(ngen):
            for slot, img in ((2 * k, gen_imgs[k]), (2 * k + 1, gen_inv_imgs[k])):
                Y = _rmat_mul(R, X, img)
                d = coset_of.get(Y)
                if d is None:
                    d = len(elems)
                    coset_of[Y] = d
                    elems.append(Y)
                    transversal.append(
                        transversal[c] + ((k + 1) if slot == 2 * k else (-k - 1),)
                    )
                    edges.append([None] * (2 * ngen))
                    queue.append(d)
                edges[c][slot] = d
    index = len(elems)

    coset_table = tuple(
        tuple(edges[c][2 * k] for c in range(index)) for k in range(ngen)
    )

    # Schreier tree edges (c, x) with t_c * x defining t_{c*x}
    tree = set()
    for d in range(1, index):
        w = transversal[d]
        x = w[-1]
        c = coset_of[ident]
        Xc = ident
        for y in w[:-1]:
            img = gen_imgs[y - 1] if y > 0 else gen_inv_imgs[-y - 1]
            Xc = _rmat_mul(R, Xc, img)
        c = coset_of[Xc]
        tree.add((c, x))

    def step(c, x):
        return edges[c][2 * (x - 1)] if x > 0 else edges[c][2 * (-x - 1) + 1]

    # Schreier generators s_{c,x} = t_c x t_{c x}^{-1}, skipping tree edges
    sgen_index: dict[tuple[int, int], int] = {}
    sgen_words: list[tuple[int, ...]] = []
    for c in range(index):
        for x in range(1, ngen + 1):
            if (c, x) in tree or (step(c, x), -x) in tree:
                continue
            sgen_index[(c, x)] = len(sgen_words)
            d = step(c, x)
            sgen_words.append(
                free_reduce(transversal[c] + (x,) + invert_word(transversal[d]))
            )
    schreier_count = len(sgen_words)

    def rewrite(c, word):
        # tau(t_c * word * t_c^{-1}) in Schreier generators
        out = []
        d = c
        for x in word:
            if x > 0:
                key = (d, x)
                nxt = step(d, x)
                if key in sgen_index:
                    out.append(sgen_index[key] + 1)
                d = nxt
            else:
                nxt = step(d, x)
                key = (nxt, -x)
                if key in sgen_index:
                    out.append(-(sgen_index[key] + 1))
                d = nxt
        if d != c:
            raise InconsistencyError("relator does not stabilize its coset")
        return tuple(out)

    sub_relators = []
    for c in range(index):
        for r in P.relators:
            sub_relators.append(rewrite(c, r))

    gen_words: list[tuple[int, ...] | None] = list(sgen_words)
    kept_words, relators = _tietze_simplify(
        gen_words, sub_relators, max_growth=tietze_max_growth
    )

    one_mod = _reduce_mat(R, Mat2.identity(F))
    matrices = []
    for w in kept_words:
        M = P.evaluate_word(w)
        if _reduce_mat(R, M) != one_mod:
            raise InconsistencyError("subgroup generator not congruent to 1 mod level")
        matrices.append(M)

    sub = GroupPresentation(
        field=F,
        names=tuple(f"g{i + 1}" for i in range(len(kept_words))),
        matrices=tuple(matrices),
        relators=tuple(relators),
    )
    return CongruenceSubgroup(
        level=I,
        index=index,
        coset_table=coset_table,
        schreier_transversal=tuple(transversal),
        presentation=sub,
        ambient=P,
        neat=neat,
        schreier_generator_count=schreier_count,
    )


# ---------------------------------------------------------------------------
# cusps


@dataclass(frozen=True)
class CuspData:
    kappa: int
    kappa_Gamma_D: int
    orbits: tuple  # representative unimodular rows (c, d) over O/a


def cusp_count(S: CongruenceSubgroup) -> CuspData:
    """Number of cusps of Gamma(a), computed two independent ways.

    Formula: kappa = d_F * [Gamma_D : Gamma(a)] / (#units(O_D) * N(a)).
    Direct count: cusps biject with unimodular rows (c, d) of
    (O/a)^2 modulo the reduction of the unit group of O_D.
    """
    F = S.ambient.field
    I = S.level
    R = residue_ring(F, I)
    N = I.norm
    d_F = F.class_number
    # the unit group injects mod a for every neat level, so this is
    # #units(O_D) except at tiny levels such as (1)
    unit_image = {R.reduce_pair(u.a, u.b) for u in F.units()}
    formula = d_F * S.index
    if formula % (len(unit_image) * N):
        raise InconsistencyError("cusp formula does not give an integer")
    formula //= len(unit_image) * N

    all_elems = [R.reduce_pair(x, y) for x in range(I.hnf[0][0]) for y in range(I.hnf[1][1])]
    pairs = set()
    for c in all_elems:
        for d in all_elems:
            pairs.add((c, d))

    def unimodular(cd):
        c, d = cd
        for x in all_elems:
            for y in all_elems:
                if R.add(R.mul(c, x), R.mul(d, y)) == R.reduce_pair(1, 0):
                    return True
        return False

    reps = []
    seen = set()
    for cd in sorted(pairs):
        if cd in seen or not unimodular(cd):
            continue
        reps.append(cd)
        for u in unit_image:
            seen.add((R.mul(u, cd[0]), R.mul(u, cd[1])))
    if len(reps) != formula:
        raise InconsistencyError(
            f"cusp counts disagree: formula {formula}, direct {len(reps)}"
        )
    return CuspData(kappa=formula, kappa_Gamma_D=d_F, orbits=tuple(reps))


def unipotent_index(S: CongruenceSubgroup) -> int:
    """[Gamma_D cap N_P : Gamma(a) cap N_P] for the parabolic at
    infinity: the index of the lattice a in O_D, read off the HNF."""
    h = S.level.hnf
    # HNF is upper triangular, so the lattice index is the determinant
    return abs(h[0][0] * h[1][1])
