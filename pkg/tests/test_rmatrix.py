import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dense_kron, dense_unit
from orthobethe.errors import PoleError
from orthobethe.linop import build_P, build_Q, identity
from orthobethe.rmatrix import ModelParams, build_r, check_unitarity, check_yang_baxter
from orthobethe.scalarfield import Q

rat = st.builds(Q, st.integers(-30, 30), st.sampled_from([1, 3, 5, 7, 11, 13]))


def generic(p, *us):
    bad = {0, p.c_kappa, -p.c_kappa}
    return all(a - b not in bad for k, a in enumerate(us) for b in us[k + 1:])


def dense_r(n, c, u, v):
    """Entry-wise oracle: delta + c/(u-v) [swap] - c/(u-v+c kappa) [Q]."""
    N = 2 * n + 1
    kappa = Q(2 * n - 1, 2)
    out = np.full((N * N, N * N), Q(0), dtype=object)
    for a in range(-n, n + 1):
        for b in range(-n, n + 1):
            for a2 in range(-n, n + 1):
                for b2 in range(-n, n + 1):
                    val = Q(1) if (a, b) == (a2, b2) else Q(0)
                    if (a2, b2) == (b, a):
                        val += c / (u - v)
                    if b == -a and b2 == -a2:
                        val -= c / (u - v + c * kappa)
                    out[(a + n) * N + (b + n), (a2 + n) * N + (b2 + n)] = val
    return out


@pytest.mark.parametrize("n", [1, 2])
def test_r_matrix_against_entrywise_oracle(n):
    p = ModelParams(n, Q(2, 3))
    u, v = Q(5, 7), Q(-1, 3)
    assert (build_r(p, u, v).to_dense(dtype=object) == dense_r(n, p.c, u, v)).all()


def test_kappa():
    assert ModelParams(1).kappa == Q(1, 2)
    assert ModelParams(3).kappa == Q(5, 2)
    assert ModelParams(2).N == 5


@given(rat, rat, rat, st.sampled_from([Q(1), Q(2, 3)]))
def test_yang_baxter_and_unitarity_n1(u1, u2, u3, c):
    p = ModelParams(1, c)
    if not generic(p, u1, u2, u3):
        return
    assert check_yang_baxter(p, u1, u2, u3)
    assert check_unitarity(p, u1, u2)


def test_yang_baxter_n2_single():
    p = ModelParams(2)
    assert check_yang_baxter(p, Q(3, 7), Q(-2, 5), Q(1, 11))
    assert check_unitarity(p, Q(3, 7), Q(-2, 5))


def test_yang_baxter_detects_perturbation():
    """A wrong Q coefficient breaks the relation, so the check is not vacuous."""
    p = ModelParams(1)
    u, v = Q(1, 3), Q(-1, 5)
    good = build_r(p, u, v)
    bad = identity(1, 2) + build_P(1).scale(p.c / (u - v)) - build_Q(1).scale(p.c / (u - v + 1))
    assert good != bad


def test_poles():
    p = ModelParams(1)
    with pytest.raises(PoleError):
        build_r(p, Q(1), Q(1))
    with pytest.raises(PoleError):
        build_r(p, Q(0), Q(1, 2))
    with pytest.raises(ValueError):
        ModelParams(0)
    with pytest.raises(ValueError):
        ModelParams(1, Q(0))


def test_float_matches_exact():
    p = ModelParams(1)
    exact = build_r(p, Q(1, 3), Q(-1, 5)).to_dense()
    pf = ModelParams(1, 1 + 0j)
    approx = build_r(pf, 1 / 3 + 0j, -0.2 + 0j).to_dense()
    assert np.allclose(exact, approx, atol=1e-14)
