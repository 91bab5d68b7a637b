import numpy as np
import pytest

from conftest import spec
from orthobethe.bethe import build_bethe
from orthobethe.errors import DimensionError, NearPoleError, NoConvergence
from orthobethe.spectra import (
    BetheSystem, bethe_residual, exact_diagonalize, highest_weight_defect, newton, solve_bethe, spectrum, tau,
    transfer_apply, verify_eigenproperty,
)
from orthobethe.scalarfield import Q


def test_exact_on_shell_vector():
    """With symmetric inhomogeneities t = 0 solves the equations; the eigenproperty then holds exactly."""
    sp = spec(1, ("1/3", "-1/3"))
    t = [(Q(0),)]
    assert np.abs(bethe_residual(sp, t)).max() < 1e-14
    vec = build_bethe(sp, t).vector
    for z in (Q(2, 17), Q(-5, 9)):
        assert transfer_apply(sp, z, vec) == vec.scale(tau(sp, z, t))


def test_off_shell_is_not_eigen():
    sp = spec(1, ("1/3", "-1/3"))
    t = [(Q(1, 5),)]
    assert np.abs(bethe_residual(sp, t)).max() > 1e-3
    vec = build_bethe(sp, t).vector
    z = Q(2, 17)
    assert transfer_apply(sp, z, vec) != vec.scale(tau(sp, z, t))


def test_vacuum_eigenvalue_is_trace():
    sp = spec(2, ("1/3",), ("2", "3"))
    z = Q(2, 17)
    lam = build_bethe(sp, [(), ()]).vector
    assert transfer_apply(sp, z, lam) == lam.scale(tau(sp, z, [(), ()]))


def test_newton_and_solver():
    sp = spec(1, ("1/3", "-1/3"))
    roots = solve_bethe(sp, (1,), seeds=16)
    assert any(abs(r.sets[0][0]) < 1e-8 for r in roots)
    for r in roots:
        assert r.residual < 1e-10
    system = BetheSystem(sp, (1,))
    x = newton(system, np.array([0.05 + 0.01j]))
    assert abs(x[0]) < 1e-10
    assert system.jacobian(x).shape == (1, 1)


def test_newton_reports_failure():
    sp = spec(1, ("1/3", "-1/3"))
    with pytest.raises((NoConvergence, NearPoleError)):
        newton(BetheSystem(sp, (1,)), np.array([1 / 3 + 0j]), max_iter=2)


def test_null_roots_are_collapsed():
    sp = spec(2, ("1/3",))
    roots = solve_bethe(sp, (1, 0), seeds=8)
    assert len(roots) == 1 and roots[0].null and roots[0].count >= 1


def test_diagonalization():
    sp = spec(1, ("1/3", "-2/7"))
    eig = exact_diagonalize(sp, 0.3 + 0.1j)
    assert len(eig) == 9
    big = spec(2, ("1/3", "-2/7", "2/9", "5/13", "-4/11"))
    with pytest.raises(DimensionError):
        exact_diagonalize(big, 0.3)


@pytest.mark.parametrize("sp,card", [
    (spec(1, ("1/3", "-2/7")), [(0,), (1,), (2,)]),
    (spec(1, ("1/3", "-2/7"), ("2",)), [(1,), (2,)]),
    (spec(2, ("1/3",), ("2", "3")), [(0, 1), (2, 1)]),
])
def test_spectrum_pipeline(sp, card):
    rep = spectrum(sp, card, seeds=24)
    assert rep.ok
    live = [s for s in rep.states if not s["null"]]
    assert live
    for s in live:
        assert s["residual"] < 1e-10 and s["defect"] < 1e-8 and s["match"] < 1e-8
    data = rep.to_json()
    assert data["ok"] and len(data["eigenvalues"]) == sp.N ** sp.L


def test_highest_weight_on_shell():
    sp = spec(1, ("1/3", "-1/3"))
    t = [(0j,)]
    assert highest_weight_defect(sp, t) < 1e-12
    ep = verify_eigenproperty(sp, 0.2 + 0.3j, t)
    assert ep["ok"]
