import json

import pytest

from rotgroup.certify import certify_pinwheel
from rotgroup.explore import (
    GuardRailError,
    ball,
    closure,
    count_formula,
    free_count,
    load_table,
    parse_table,
    substitution_orbit,
    verify_free_product,
)
from rotgroup.normal import LRCForm, normalize
from rotgroup.words import GNU41, Gm41, Gpq, Word, evaluate, parse_word


def gens(spec, *names):
    return [Word(spec, ((g, 1),)) for g in names]


# ------------------------------------------------------------------ counting


def test_count_examples():
    assert count_formula(4, 3, 1) == 12
    assert count_formula(4, 3, 2) == 24
    assert count_formula(6, 5, 2) == 240
    assert count_formula(4, 6, 2) == 48


@pytest.mark.parametrize("args", [(4, 4, 1), (3, 5, 1), (4, 3, 0), (2, 3, 1)])
def test_count_regime_errors(args):
    with pytest.raises(ValueError):
        count_formula(*args)


# ------------------------------------------------------------------ balls


def test_ball_examples():
    assert len(ball(Gpq(4, 3), 1)) == 12
    assert len(ball(Gpq(4, 3), 0)) == 1
    b = ball(Gpq(4, 6), 2)
    # 48 is the exact-length count; the ball itself is cumulative
    assert b.counts_by_length[2] == 48
    assert len(b) == 24 + 48


@pytest.mark.parametrize("pq", [(4, 3), (4, 5), (6, 5), (4, 6), (6, 10)])
@pytest.mark.parametrize("variant", ["L", "R", "C"])
def test_ball_counts_and_distinct(pq, variant):
    n = 3 if pq != (6, 10) else 2
    b = ball(Gpq(*pq), n, variant)
    for k in range(1, n + 1):
        assert b.counts_by_length[k] == count_formula(*pq, k)
    assert len(b) == sum(count_formula(*pq, k) for k in range(1, n + 1))
    mats = b.matrices()
    assert len(set(mats)) == len(mats)
    assert all(f.is_valid() for f in b.forms)


def test_ball_swapped_roles():
    b = ball(Gpq(6, 4), 2)
    assert len(b) == count_formula(4, 6, 1) + count_formula(4, 6, 2)
    assert all(f.swapped and f.to_word().spec == Gpq(6, 4) for f in b.forms)
    assert len(set(b.matrices())) == len(b)


def test_free_ball():
    b = ball(Gpq(3, 5), 3)
    assert len(b) == sum(free_count(3, 5, k) for k in range(1, 4))
    assert len(set(b.matrices())) == len(b)


@pytest.mark.parametrize("m", [5, 6, 8, 12])
def test_gm41_ball(m):
    b = ball(Gm41(m), 2)
    mats = b.matrices()
    assert len(set(mats)) == len(mats)
    assert all(f.is_valid() for f in b.forms)
    ms = set(mats)
    assert all(x.inverse() in ms for x in ms)


@pytest.mark.parametrize("spec", [Gpq(4, 3), Gpq(6, 5), Gpq(3, 5)], ids=str)
def test_ball_inverses_within_one_more_pair(spec):
    small = set(ball(spec, 2).matrices())
    big = set(ball(spec, 3).matrices())
    assert all(x.inverse() in big for x in small)


def test_ball_guard_rail():
    with pytest.raises(GuardRailError):
        ball(Gpq(4, 3), 7)
    with pytest.raises(ValueError):
        ball(Gpq(4, 8), 1)


# ------------------------------------------------------------------ closure


def test_closure_examples():
    assert closure(gens(Gpq(4, 4), "A", "B"), 100).order == 24
    assert str(closure(gens(Gpq(4, 4), "A", "B"), 100)) == "order=24"
    assert closure(gens(Gm41(12), "S")).order == 4
    s6 = Gm41(6)
    assert closure([Word(s6, (("S", 1),)), Word(s6, (("U", 2),))]).order == 8
    assert closure([Word(s6, (("S", 1),)), Word(s6, (("T", 3),))]).order == 8


@pytest.mark.parametrize("pq", [(1, 5), (2, 2), (2, 7), (3, 1)])
def test_closure_finite_small_cases(pq):
    r = closure(gens(Gpq(*pq), "A", "B"), 1000)
    assert not r.exceeded


def test_closure_order_independent_and_idempotent():
    spec = Gpq(4, 4)
    a = closure(gens(spec, "A", "B"), 100)
    b = closure(gens(spec, "B", "A"), 100)
    assert set(a.elements) == set(b.elements)
    again = closure([Word(spec, (("A", 1),)), Word(spec, (("B", 1),)), Word(spec, (("A", 1), ("B", 1)))], 100)
    assert set(again.elements) == set(a.elements)


@pytest.mark.parametrize("pq", [(3, 5), (5, 5), (4, 5), (3, 4)])
def test_closure_exceeds_cap(pq):
    r = closure(gens(Gpq(*pq), "A", "B"), 10000)
    assert r.exceeded and r.order is None


# ------------------------------------------------------------------ free products


@pytest.mark.parametrize("pq", [(3, 3), (3, 5)])
def test_free_product_no_collisions(pq):
    r = verify_free_product(*pq, 3)
    assert r.free
    assert r.words_checked == sum(free_count(*pq, k) for k in range(1, 4))


def test_free_product_recovers_relation():
    r = verify_free_product(4, 3, 3)
    assert not r.free
    rel = parse_word(r.relation(), Gpq(4, 3))
    assert evaluate(rel).is_identity()
    # the relation is a conjugate of A^2 B A^2 B
    assert normalize(rel).is_empty()
    assert len(rel) == 5 and sorted(e for g, e in rel.syllables if g == "B") == [1, 1]


def test_free_product_parallel_matches():
    a = verify_free_product(3, 5, 2, jobs=1)
    b = verify_free_product(3, 5, 2, jobs=2)
    assert (a.free, a.words_checked) == (b.free, b.words_checked)


# ------------------------------------------------------------------ substitution


def test_identity_table_single_orientation():
    table = parse_table("group gpq 4 3\nseed t\nt t ε\nt t ε\n")
    rep = substitution_orbit(table, 4)
    assert rep.distinct_counts == [1, 1, 1, 1]
    assert rep.tile_counts == [2, 4, 8, 16]


def test_table_parse_errors():
    with pytest.raises(ValueError):
        parse_table("seed t\nt t A\n")
    with pytest.raises(ValueError):
        parse_table("group gpq 4 3\nseed t\nt u\n")


def test_dite_kart_orbit():
    table = load_table("dite_kart")
    assert table.spec == Gpq(10, 4)
    rep = substitution_orbit(table, 5)
    assert all(a < b for a, b in zip(rep.distinct_counts, rep.distinct_counts[1:]))
    assert rep.canonical_kinds == {"LRCForm"}
    for w in rep.representatives.values():
        f = normalize(w)
        assert isinstance(f, LRCForm) and f.swapped and f.is_valid()
    d = json.loads(rep.to_json())
    assert d["distinct_counts"] == rep.distinct_counts


def test_wedge_orbit_pairwise_certified():
    table = load_table("wedge")
    assert table.spec == GNU41
    rep = substitution_orbit(table, 3)
    words = list(rep.representatives.values())
    assert len(words) == rep.distinct_counts[-1]
    for i, u in enumerate(words):
        for v in words[i + 1 :]:
            assert certify_pinwheel(u * v.inverse()).verdict == "nonidentity"
