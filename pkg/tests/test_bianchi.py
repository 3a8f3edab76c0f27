import os
import shutil

import pytest
from hypothesis import given, strategies as st

from congtors.bianchi import (
    BUILTIN_D,
    CongruenceSubgroup,
    InconsistencyError,
    NeatnessError,
    PresentationError,
    congruence_subgroup,
    cusp_count,
    cyclic_reduce,
    free_reduce,
    invert_word,
    load_presentation,
    parse_presentation,
    unipotent_index,
)
from congtors.quadfield import Mat2, make_field, make_ideal, residue_ring


@pytest.fixture(scope="module")
def sub11():
    F = make_field(11)
    P = load_presentation(11)
    return congruence_subgroup(P, make_ideal(F, [F.element(3)]))


@pytest.fixture(scope="module")
def sub7():
    F = make_field(7)
    P = load_presentation(7)
    return congruence_subgroup(P, make_ideal(F, [F.element(3)]))


# --- word helpers ----------------------------------------------------------

words = st.lists(
    st.integers(min_value=-4, max_value=4).filter(lambda x: x != 0), max_size=20
)


@given(words)
def test_free_reduce_idempotent(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))


@given(words)
def test_invert_word_involution(w):
    assert invert_word(invert_word(tuple(w))) == tuple(w)
    assert free_reduce(tuple(w) + invert_word(tuple(w))) == ()


@given(words)
def test_cyclic_reduce(w):
    r = cyclic_reduce(w)
    assert not (len(r) >= 2 and r[0] == -r[-1])


# --- presentations ---------------------------------------------------------

@pytest.mark.parametrize("D", BUILTIN_D)
def test_builtin_presentations_verify(D):
    P = load_presentation(D)
    P.verify()  # relators evaluate to Id, generators have det 1
    assert P.generator_count == len(P.matrices)


def test_presentation_d11_has_both_translations():
    P = load_presentation(11)
    F = P.field
    t = Mat2(F.one(), F.one(), F.zero(), F.one())
    t_omega = Mat2(F.one(), F.element(0, 1), F.zero(), F.one())
    assert t in P.matrices
    assert t_omega in P.matrices


def test_load_presentation_missing_d():
    with pytest.raises(PresentationError, match="D=5"):
        load_presentation(5)


def test_data_dir_env_override(tmp_path, monkeypatch):
    src = os.path.join(os.path.dirname(load_presentation.__code__.co_filename), "data", "d11.txt")
    shutil.copy(src, tmp_path / "d11.txt")
    monkeypatch.setenv("CONGTORS_DATA_DIR", str(tmp_path))
    assert load_presentation(11).field.D == 11
    with pytest.raises(PresentationError):
        load_presentation(2)  # not present in the override directory


def test_parse_rejects_bad_header():
    with pytest.raises(PresentationError, match="header"):
        parse_presentation("something else\nD 1\n")


def test_parse_rejects_failing_relator():
    text = (
        "congtors-presentation v1\n"
        "D 2\n"
        "generators t\n"
        "matrix t 1 0 1 0 0 0 1 0\n"
        "relator t t\n"
    )
    with pytest.raises(PresentationError, match="identity"):
        parse_presentation(text)


def test_parse_rejects_bad_determinant():
    text = (
        "congtors-presentation v1\n"
        "D 2\n"
        "generators t\n"
        "matrix t 2 0 0 0 0 0 1 0\n"
    )
    with pytest.raises(PresentationError, match="determinant"):
        parse_presentation(text)


def test_parse_rejects_unknown_generator():
    text = (
        "congtors-presentation v1\n"
        "D 2\n"
        "generators t\n"
        "matrix t 1 0 1 0 0 0 1 0\n"
        "relator t z\n"
    )
    with pytest.raises(PresentationError, match="unknown generator"):
        parse_presentation(text)


# --- congruence subgroups --------------------------------------------------

def brute_force_sl2_size(F, I):
    """Count determinant-1 matrices over O/a by enumeration."""
    R = residue_ring(F, I)
    els = [R.reduce_pair(x, y) for x in range(I.hnf[0][0]) for y in range(I.hnf[1][1])]
    one = R.reduce_pair(1, 0)
    count = 0
    for a in els:
        for b in els:
            for c in els:
                for d in els:
                    if R.add(R.mul(a, d), R.neg(R.mul(b, c))) == one:
                        count += 1
    return count


def test_index_d11_level3(sub11):
    # 3 splits in O_11: image is SL2(F_3) x SL2(F_3)
    assert sub11.index == 576
    F = make_field(11)
    assert sub11.index == brute_force_sl2_size(F, sub11.level)


def test_index_d7_level3(sub7):
    # 3 inert in O_7: image is SL2(F_9), order q(q^2-1) = 720
    q = 9
    assert sub7.index == q * (q * q - 1) == 720
    F = make_field(7)
    assert sub7.index == brute_force_sl2_size(F, sub7.level)


def test_schreier_generator_count(sub11, sub7):
    for S in (sub11, sub7):
        g = S.ambient.generator_count
        assert S.schreier_generator_count == S.index * g - (S.index - 1)


def test_coset_table_permutations(sub11):
    n = sub11.index
    for perm in sub11.coset_table:
        assert sorted(perm) == list(range(n))
    # transitivity: orbit of coset 0 under the generators is everything
    reached = {0}
    frontier = [0]
    while frontier:
        c = frontier.pop()
        for perm in sub11.coset_table:
            if perm[c] not in reached:
                reached.add(perm[c])
                frontier.append(perm[c])
    assert len(reached) == n


def test_transversal_words_hit_distinct_cosets(sub11):
    from congtors.bianchi import _reduce_mat

    F = sub11.ambient.field
    R = residue_ring(F, sub11.level)
    seen = {_reduce_mat(R, sub11.ambient.evaluate_word(w))
            for w in sub11.schreier_transversal}
    assert len(seen) == sub11.index


def test_subgroup_presentation_verifies(sub11):
    sub11.presentation.verify()


def test_subgroup_generators_are_congruent_to_identity(sub11):
    F = sub11.ambient.field
    I = sub11.level
    for M in sub11.presentation.matrices:
        assert I.contains(M.a - F.one())
        assert I.contains(M.b)
        assert I.contains(M.c)
        assert I.contains(M.d - F.one())


def test_neatness_threshold():
    F = make_field(11)
    P = load_presentation(11)
    unit = make_ideal(F, [F.one()])
    with pytest.raises(NeatnessError):
        congruence_subgroup(P, unit)
    S = congruence_subgroup(P, unit, allow_small_level=True)
    assert S.index == 1
    assert not S.neat


def test_small_level_override():
    F = make_field(7)
    P = load_presentation(7)
    I = make_ideal(F, [F.element(0, 1)])  # norm 2, (1+sqrt(-7))/2 divides 2
    assert I.norm == 2
    S = congruence_subgroup(P, I, allow_small_level=True)
    assert S.index == brute_force_sl2_size(F, I) == 6


# --- cusps -----------------------------------------------------------------

def test_cusp_count_d11(sub11):
    cd = cusp_count(sub11)
    assert cd.kappa == 1 * 576 // (2 * 9) == 32
    assert len(cd.orbits) == 32
    assert cd.kappa_Gamma_D == 1


def test_cusp_count_d7(sub7):
    cd = cusp_count(sub7)
    assert cd.kappa == 720 // (2 * 9) == 40
    assert len(cd.orbits) == 40


def test_cusp_count_gamma_d_itself():
    # Gamma_D has a single cusp for class number 1
    F = make_field(11)
    P = load_presentation(11)
    unit = make_ideal(F, [F.one()])
    S = congruence_subgroup(P, unit, allow_small_level=True)
    cd = cusp_count(S)
    assert cd.kappa == cusp_count(S).kappa_Gamma_D == 1


def test_unipotent_index(sub11):
    assert unipotent_index(sub11) == 9
    F = make_field(1)
    P = load_presentation(1)
    I = make_ideal(F, [F.element(2, 1)])  # (2+i), norm 5
    S = congruence_subgroup(P, I, allow_small_level=True)
    assert unipotent_index(S) == 5
    unit = make_ideal(F, [F.one()])
    S1 = congruence_subgroup(P, unit, allow_small_level=True)
    assert unipotent_index(S1) == 1
