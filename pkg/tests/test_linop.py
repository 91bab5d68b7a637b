import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dense_kron, dense_unit
from orthobethe.errors import MismatchError
from orthobethe.linop import (
    ChainOperator, ChainVector, all_indices, apply, build_P, build_Q, commutator, compose, flat_index, identity,
    kron, kron_vectors, matrix_unit, on_sites,
)
from orthobethe.scalarfield import Q


def dense(op):
    return op.to_dense(dtype=object)


def dense_P(n):
    labels = range(-n, n + 1)
    return sum(dense_kron(dense_unit(n, i, j), dense_unit(n, j, i)) for i in labels for j in labels)


def dense_Q(n):
    labels = range(-n, n + 1)
    return sum(dense_kron(dense_unit(n, i, j), dense_unit(n, -i, -j)) for i in labels for j in labels)


@pytest.mark.parametrize("n", [1, 2])
def test_P_Q_against_dense_oracle(n):
    assert (dense(build_P(n)) == dense_P(n)).all()
    assert (dense(build_Q(n)) == dense_Q(n)).all()
    P, Qo = build_P(n), build_Q(n)
    assert compose(P, P) == identity(n, 2)
    assert compose(Qo, Qo) == Qo.scale(2 * n + 1)
    assert compose(P, Qo) == Qo and compose(Qo, P) == Qo


def test_flat_index_order():
    n = 1
    idx = list(all_indices(n, 2))
    assert [flat_index(k, n) for k in idx] == list(range(9))
    assert idx[0] == (-1, -1) and idx[-1] == (1, 1)


def random_op(draw, n, sites):
    keys = list(all_indices(n, sites))
    entries = {}
    for _ in range(draw(st.integers(0, 8))):
        a = draw(st.sampled_from(keys))
        b = draw(st.sampled_from(keys))
        entries[(a, b)] = Q(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
    return ChainOperator(n, sites, entries)


@st.composite
def op_pairs(draw):
    return random_op(draw, 1, 1), random_op(draw, 1, 1)


@given(op_pairs())
def test_kron_compose_against_numpy(pair):
    a, b = pair
    assert (dense(kron(a, b)) == np.kron(dense(a), dense(b))).all()
    assert (dense(compose(a, b)) == dense(a).dot(dense(b))).all()
    assert (dense(commutator(a, b)) == dense(a).dot(dense(b)) - dense(b).dot(dense(a))).all()
    v = ChainVector(1, 1, {(-1,): Q(2), (1,): Q(-1, 3)})
    assert (apply(a, v).to_dense(dtype=object) == dense(a).dot(v.to_dense(dtype=object))).all()
    assert (a @ v) == apply(a, v)


def test_on_sites_matches_explicit_kron():
    n = 1
    e = matrix_unit(n, 1, -1)
    f = matrix_unit(n, 0, 1)
    two = kron(e, f)
    placed = on_sites(two, (0, 2), 3)
    expect = dense_kron(dense_unit(n, 1, -1), np.eye(3, dtype=object) * Q(1), dense_unit(n, 0, 1))
    assert (dense(placed) == expect).all()
    swapped = on_sites(two, (2, 0), 3)
    expect = dense_kron(dense_unit(n, 0, 1), np.eye(3, dtype=object) * Q(1), dense_unit(n, 1, -1))
    assert (dense(swapped) == expect).all()


def test_vector_ops_and_records():
    v = ChainVector.basis(1, (0, -1))
    w = kron_vectors(ChainVector.basis(1, (0,)), ChainVector.basis(1, (-1,)))
    assert v == w
    u = v.scale(Q(3, 7)) + ChainVector(1, 2, {(1, 1): 1.5 + 2j})
    again = ChainVector.from_records(1, 2, u.to_records())
    assert again == u
    assert not (v - v)
    with pytest.raises(MismatchError):
        v + ChainVector.basis(1, (0,))
    with pytest.raises(IndexError):
        ChainVector.basis(1, (2,))
    op = build_Q(1).scale(Q(2, 3))
    assert ChainOperator.from_records(1, 2, op.to_records()) == op


@given(st.lists(st.tuples(st.sampled_from(list(itertools.product(range(-1, 2), repeat=2))),
                          st.fractions(max_denominator=50)), max_size=6))
def test_record_round_trip_exact(items):
    v = ChainVector(1, 2, {k: Q(x.numerator, x.denominator) for k, x in items})
    back = ChainVector.from_records(1, 2, v.to_records())
    assert back == v
    assert back.to_records() == v.to_records()
