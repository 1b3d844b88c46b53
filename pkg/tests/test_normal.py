import functools
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotgroup.normal import (
    FreeProductForm,
    Gm41Form,
    LRCForm,
    VARIANTS,
    convert_form,
    equal,
    h_tables,
    is_identity,
    lrc_is_valid,
    normal_kind,
    normalize,
    normalize_free,
    normalize_gm41,
    normalize_lrc,
)
from rotgroup.rot3 import IDENTITY_INT, imat_mul, int_rot
from rotgroup.words import GTRANS, Gm41, Gpq, SpecMismatch, Word, evaluate, parse_word, random_word

SOUNDNESS_GPQ = [(3, 3), (3, 5), (5, 7), (4, 3), (4, 6), (6, 4), (10, 4), (4, 8), (8, 12)]
LRC_GPQ = [(4, 3), (4, 5), (6, 3), (4, 6), (6, 4), (6, 10), (10, 4), (6, 6), (8, 6)]
GM41_M = [1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 16, 20, 24]


def P(spec, text):
    return parse_word(text, spec)


def check_form(w, form):
    assert form.is_valid()
    assert evaluate(form.to_word()) == evaluate(w)
    assert form.is_empty() == evaluate(w).is_identity()


# ------------------------------------------------------------------ dispatch


def test_normal_kind():
    assert normal_kind(Gpq(3, 3)) == "free"
    assert normal_kind(Gpq(6, 4)) == "lrc"
    assert normal_kind(Gpq(4, 8)) == "gm41"
    assert normal_kind(Gm41(5)) == "gm41"
    with pytest.raises(ValueError):
        normal_kind(Gpq(2, 3))


def test_dispatch_examples():
    assert isinstance(normalize(P(Gpq(3, 3), "A B")), FreeProductForm)
    f = normalize(P(Gpq(6, 4), "A B"))
    assert isinstance(f, LRCForm) and f.swapped and f.spec == Gpq(4, 6)
    g = normalize(P(Gpq(4, 8), "A B"))
    assert isinstance(g, Gm41Form) and g.spec == Gm41(8)


def test_precondition_errors():
    with pytest.raises(ValueError):
        normalize_free(P(Gpq(4, 3), "A"))
    with pytest.raises(ValueError):
        normalize_lrc(P(Gpq(4, 4), "A"))
    with pytest.raises(ValueError):
        normalize_lrc(P(Gpq(3, 5), "A"))
    with pytest.raises(ValueError):
        normalize_gm41(P(Gm41(6), "U"))
    with pytest.raises(ValueError):
        normalize_lrc(P(Gpq(4, 3), "A"), "Z")


# ------------------------------------------------------------------ free product


def test_free_examples():
    s = Gpq(3, 3)
    assert normalize_free(Word.identity(s)).is_empty()
    f = normalize_free(P(s, "A^4"))
    assert f.pairs == ((1, 0),) and f.to_word() == P(s, "A^1")
    w = P(Gpq(3, 5), "A B A^-1 B^-1")
    f = normalize_free(w)
    assert f.to_word() == w and not f.is_empty()
    assert not evaluate(w).is_identity()


# ------------------------------------------------------------------ L/R/C


@pytest.mark.parametrize("variant", VARIANTS)
def test_lrc_examples(variant):
    assert normalize_lrc(Word.identity(Gpq(4, 3)), variant).is_empty()
    assert normalize_lrc(P(Gpq(4, 3), "A^2 B A^2 B"), variant).is_empty()
    assert normalize_lrc(P(Gpq(4, 6), "B^3 A B^3 A"), variant).is_empty()


@pytest.mark.parametrize("pq", [(4, 3), (6, 5), (4, 6), (6, 10)])
def test_step_one_identities_exact(pq):
    # the rewriting identities used by the sweep, checked as matrix identities
    p, q = pq
    spec = Gpq(p, q)
    h = p // 2
    for a, b, b2 in itertools.product(range(-2, 3), repeat=3):
        lhs = Word(spec, (("A", a), ("B", b), ("A", h), ("B", b2)))
        rhs = Word(spec, (("A", a + h), ("B", b2 - b)))
        assert evaluate(lhs) == evaluate(rhs)
        for sign in (1, -1):
            lhs = Word(spec, (("A", a), ("B", b), ("A", b2 + sign * h)))
            rhs = Word(spec, (("A", a + h), ("B", -b), ("A", b2)))
            assert evaluate(lhs) == evaluate(rhs)
    if q % 2 == 0:
        k = q // 2
        for a, b, b2 in itertools.product(range(-2, 3), repeat=3):
            lhs = Word(spec, (("B", a), ("A", b), ("B", k), ("A", b2)))
            rhs = Word(spec, (("B", a + k), ("A", b2 - b)))
            assert evaluate(lhs) == evaluate(rhs)


def test_lrc_interval_conventions():
    # (-p/4, p/4] includes +p/4 only; b_1 = q/2 allowed only at n = 1 for even q
    assert lrc_is_valid(4, 3, "L", ((2, 1), (1, 1)))
    assert not lrc_is_valid(4, 3, "L", ((2, 1), (-1, 1)))
    assert lrc_is_valid(4, 6, "L", ((1, 3),))
    assert not lrc_is_valid(4, 6, "L", ((1, 3), (1, 1)))
    assert not lrc_is_valid(4, 3, "L", ((1, 0), (1, 1)))
    assert lrc_is_valid(4, 3, "L", ((0, 1), (1, 0)))
    assert not lrc_is_valid(4, 3, "L", ((0, 0),))


@pytest.mark.parametrize("pq", LRC_GPQ)
@pytest.mark.parametrize("variant", VARIANTS)
def test_lrc_sound_valid_idempotent(pq, variant):
    spec = Gpq(*pq)
    rng = random.Random(f"{pq}{variant}")
    for _ in range(150):
        w = random_word(spec, rng.randint(0, 9), rng)
        f = normalize_lrc(w, variant)
        check_form(w, f)
        assert normalize_lrc(f.to_word(), variant) == f


@pytest.mark.parametrize("pq", [(4, 3), (4, 6), (6, 4), (6, 10)])
def test_convert_form_round_trip(pq):
    spec = Gpq(*pq)
    rng = random.Random(3)
    for _ in range(100):
        f = normalize_lrc(random_word(spec, rng.randint(0, 8), rng), "L")
        r = convert_form(f, "R")
        c = convert_form(f, "C")
        assert r.length == f.length == c.length
        assert evaluate(r.to_word()) == evaluate(f.to_word()) == evaluate(c.to_word())
        assert convert_form(r, "L") == f
    e = normalize_lrc(Word.identity(spec))
    assert convert_form(e, "R").is_empty()


# ------------------------------------------------------------------ G(m,4,1)


@pytest.mark.parametrize("m,sizes", [(5, (4, 2)), (6, (8, 4)), (8, (24, 8)), (12, (24, 8)), (10, (8, 4))])
def test_h_table_sizes(m, sizes):
    t = h_tables(m)
    assert (len(t.H), len(t.H1)) == sizes
    assert len(t.heads) * len(t.H1) == len(t.H)


@pytest.mark.parametrize("m", [5, 6, 8])
def test_h_spelling_is_exact(m):
    t = h_tables(m)
    for mat, syl in t.spelling.items():
        w = Word(Gm41(m), syl)
        assert evaluate(w).int_rows() == mat


def mul(*ms):
    return functools.reduce(imat_mul, ms)


def test_gm41_identities_exact():
    S, U = int_rot("y", 1), int_rot("x", 1)
    U3 = mul(U, U, U)
    assert mul(S, U, S) == mul(U, S, U)
    assert mul(S, U3, S) == mul(U3, S, U3)
    m = 12
    spec = Gm41(m)
    for a in range(-6, 7):
        assert equal(Word(spec, (("S", 2), ("T", a))), Word(spec, (("T", -a), ("S", 2))))
        assert equal(Word(spec, (("S", 1), ("U", 1), ("S", -1), ("S", 1), ("T", a))), Word(spec, (("S", 1), ("U", 1), ("T", a))))
    spec10 = Gm41(10)
    for b in range(4):
        assert equal(Word(spec10, (("T", 5), ("S", b))), Word(spec10, (("S", 4 - b), ("T", 5))))


def test_gm41_examples():
    f = normalize_gm41(Word.identity(Gm41(12)))
    assert (f.W, f.exps, f.E) == ("I", (), IDENTITY_INT) and f.is_empty()
    w = P(Gm41(8), "S^2 U")
    f = normalize_gm41(w)
    assert (f.W, f.exps) == ("I", ()) and f.E == evaluate(w).int_rows()
    w = P(Gm41(8), "S T^2 S T^2")
    check_form(w, normalize_gm41(w))


@pytest.mark.parametrize("m", GM41_M)
def test_gm41_sound_valid_idempotent(m):
    spec = Gm41(m)
    rng = random.Random(m)
    for _ in range(200):
        w = random_word(spec, rng.randint(0, 10), rng)
        f = normalize_gm41(w)
        check_form(w, f)
        assert normalize_gm41(f.to_word()) == f


@pytest.mark.parametrize("m", [5, 6, 8, 12, 20])
def test_inverse_form_same_length(m):
    # n' = n for the forms of g and g^-1
    spec = Gm41(m)
    rng = random.Random(11)
    for _ in range(200):
        w = random_word(spec, rng.randint(1, 10), rng)
        assert normalize_gm41(w).length == normalize_gm41(w.inverse()).length


# ------------------------------------------------------------------ soundness and decisions


@pytest.mark.parametrize("pq", SOUNDNESS_GPQ)
def test_soundness_1000(pq):
    spec = Gpq(*pq)
    rng = random.Random(1000 + pq[0] * 31 + pq[1])
    for _ in range(1000):
        w = random_word(spec, rng.randint(0, 8), rng)
        f = normalize(w)
        assert evaluate(f.to_word()) == evaluate(w)
        assert is_identity(w) == evaluate(w).is_identity()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("AB"), st.integers(-12, 12)), max_size=10), st.sampled_from([(4, 3), (6, 5), (3, 5)]))
def test_equal_agrees_with_matrices(syl, pq):
    spec = Gpq(*pq)
    w = Word(spec, tuple(syl))
    v = Word(spec, tuple(syl[::2]))
    assert equal(w, w)
    assert equal(w, v) == (evaluate(w) == evaluate(v))


@pytest.mark.parametrize("pq", [(3, 3), (4, 3), (6, 4), (4, 8), (5, 7)])
def test_relations_are_identity(pq):
    p, q = pq
    assert is_identity(Word(Gpq(p, q), (("A", p), ("B", q))))


def test_equal_errors():
    with pytest.raises(SpecMismatch):
        equal(P(Gpq(4, 3), "A"), P(Gpq(4, 5), "A"))
    with pytest.raises(ValueError):
        equal(Word(GTRANS, (("X", 1),)), Word(GTRANS, ()))
