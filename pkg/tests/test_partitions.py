import itertools
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orthobethe.errors import CardinalityError, GenericityError, PoleError
from orthobethe.partitions import (
    BetheParams, WSets, canonical, enumerate_bipartitions, enumerate_tripartitions, f, f_s, frak_f, g, gamma_s, h,
    inv_g, prod_pair, sigma, theta, tripartition_sizes, z_shift,
)
from orthobethe.scalarfield import Q

c = Q(1)
rat = st.builds(Q, st.integers(-40, 40), st.sampled_from([3, 7, 11, 13, 17]))


def test_sigma_theta():
    assert [theta(p) for p in (-2, -1, 0, 1)] == [0, 0, 1, 1]
    assert [sigma(i) for i in (-2, -1, 0, 1, 2)] == [-1, -1, -1, 1, 1]


def test_weights_at_a_point():
    u, v = Q(3, 5), Q(-1, 7)
    d = u - v
    assert g(u, v, c) == 1 / d
    assert inv_g(u, v, c) == d
    assert f(u, v, c) == (d + 1) / d
    assert h(u, v, c) == d + 1
    assert frak_f(u, v, c) == (d + Q(1, 2)) / d
    assert f_s(0, u, v, c) == frak_f(u, v, c) and f_s(2, u, v, c) == f(u, v, c)
    assert z_shift(u, 0, c) == u + Q(1, 2)
    assert z_shift(u, 2, c) == u - Q(3, 2)
    with pytest.raises(PoleError):
        f(u, u, c)


@given(rat, rat, st.integers(1, 3))
def test_gamma_identities(u, v, s):
    if u == v or v - u + c == 0 or u - v + c == 0:
        return
    assert gamma_s(0, u, v, c) == frak_f(u, v, c)
    assert gamma_s(s, u, v, c) == f(u, v, c) / (h(u, v, c) * h(v, u, c))


def test_prod_pair():
    assert prod_pair(f, [], [Q(1)]) == 1
    assert prod_pair(lambda a, b: g(a, b, Q(2)), [Q(3)], [Q(1)]) == 1
    u, v, w = Q(1, 3), Q(2, 5), Q(-1, 7)
    assert prod_pair(lambda a, b: h(a, b, c), [u, v], [w]) == h(u, w, c) * h(v, w, c)
    with pytest.raises(PoleError, match="pair"):
        prod_pair(lambda a, b: g(a, b, c), [u], [v, u])


def test_sizes_formula_examples():
    assert tripartition_sizes(2, 1, 0) == [(2, 1), (1, 1), (1, 1)]
    for n in (1, 2, 3):
        for i in range(-n, n + 1):
            for j in range(-n, n + 1):
                sizes = tripartition_sizes(n, i, j)
                assert sizes[n] == (1, 1)
                assert all(0 <= a <= 2 and 0 <= b <= 2 for a, b in sizes)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sizes_diagonal_tables(n):
    """Diagonal entries: T_{-l,-l} and T_{l,l} tables written out case by case."""
    for ell in range(n + 1):
        minus = tripartition_sizes(n, -ell, -ell)
        plus = tripartition_sizes(n, ell, ell)
        for s in range(n):
            assert minus[s] == ((0, 2) if s < ell else (1, 1))
            assert plus[s] == ((2, 0) if s < ell else (1, 1))


def test_sizes_rank_one_and_gln():
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            assert tripartition_sizes(1, i, j)[0] == (i + 1, 1 - j)
    for n in (2, 3):
        sizes = tripartition_sizes(n, 1, n)
        assert sizes[0] == (2, 0)
        assert all(sizes[s] == (1, 0) for s in range(1, n))


def brute_force(w, i, j):
    """Assign every element of every level to I, II or III and keep the right sizes."""
    sizes = tripartition_sizes(w.n, i, j)
    per_level = []
    for s in range(w.n + 1):
        items = w.level(s)
        options = []
        for labels in itertools.product(range(3), repeat=len(items)):
            parts = tuple(tuple(x for x, lab in zip(items, labels) if lab == k) for k in range(3))
            if (len(parts[0]), len(parts[2])) == sizes[s]:
                options.append(tuple(tuple(sorted(p)) for p in parts))
        per_level.append(options)
    return {tuple(p) for p in itertools.product(*per_level)}


@pytest.mark.parametrize("n,t", [(1, [[Q(1, 3), Q(2, 7)]]), (2, [[], []]), (2, [[Q(1, 3)], [Q(2, 7)]]),
                                 (2, [[Q(1, 3), Q(-2, 11)], [Q(2, 7)]])])
def test_enumerator_matches_brute_force(n, t):
    w = WSets(BetheParams(n, t), Q(5, 13))
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            got = [tuple(tuple(tuple(sorted(x)) for x in level) for level in p.parts)
                   for p in enumerate_tripartitions(w, i, j)]
            assert len(got) == len(set(got))
            assert set(got) == brute_force(w, i, j)
            expect = 1
            for s, (a, b) in enumerate(tripartition_sizes(n, i, j)):
                m = len(w.level(s))
                expect *= comb(m, a) * comb(m - a, b)
            assert len(got) == expect


def test_enumerator_errors():
    w = WSets(BetheParams(1, []), Q(5, 13))
    with pytest.raises(IndexError):
        list(enumerate_tripartitions(w, 2, 0))


def test_cardinality_error():
    from orthobethe.partitions import TriPartition

    class Tiny(WSets):
        def level(self, s):
            return (self.z,)

    w = Tiny(BetheParams(1, []), Q(5, 13))
    with pytest.raises(CardinalityError):
        list(enumerate_tripartitions(w, 1, 0))
    assert TriPartition(((1, 2, 3),)).II(0) == 2


def test_bipartitions():
    sets = [(Q(1), Q(2), Q(3)), (Q(5),)]
    out = list(enumerate_bipartitions(sets, [1, 0]))
    assert len(out) == 3
    assert all(len(p[0][0]) == 1 and len(p[1][0]) == 0 for p in out)
    assert list(enumerate_bipartitions(sets, [4, 0])) == []


def test_bethe_params():
    p = BetheParams(2, [[Q(2, 7), Q(1, 3)]])
    assert p.r == (2, 0)
    assert p.key == ((Q(2, 7), Q(1, 3)), ())
    assert BetheParams(2, [[Q(1, 3), Q(2, 7)]]).key == p.key
    assert p.to_json() == [["2/7", "1/3"], []]
    assert not p.is_empty()
    assert p.replace(0, []).is_empty()
    with pytest.raises(GenericityError):
        BetheParams(1, [[Q(1, 3), Q(1, 3)]])
    with pytest.raises(GenericityError):
        BetheParams(2, [[Q(1, 3)], [Q(5, 6)]])
    with pytest.raises(GenericityError):
        BetheParams(1, [[], []])
    with pytest.raises(GenericityError):
        WSets(BetheParams(1, [[Q(1, 3)]]), Q(4, 3))


def test_canonical_order_free():
    a = canonical([(Q(3), Q(1)), (Q(2),)])
    b = canonical([(Q(1), Q(3)), (Q(2),)])
    assert a == b
