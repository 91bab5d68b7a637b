"""Bethe equations, Newton root search, eigenvalues and dense cross-checks (complex floats)."""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field

import numpy as np

from .bethe import as_chain, bethe_vector, zero_mode_vector
from .errors import DimensionError, NearPoleError, NoConvergence, PoleError
from .linop import ChainVector, site_labels
from .monodromy import apply_column, evaluate_monodromy
from .partitions import BetheParams, f, f_s, sort_key, z_shift
from .scalarfield import is_exact, to_complex

log = logging.getLogger(__name__)

POLE_TOL = 1e-12
RESIDUAL_TOL = 1e-10
EIGEN_TOL = 1e-8
DEDUP_TOL = 1e-6
FD_STEP = 1e-7
MAX_DIM = 1000


def _near(x, what: str):
    if abs(x) < POLE_TOL:
        raise NearPoleError(what)


def _f(u, v, c):
    _near(u - v, f"f({u}, {v}) near a pole")
    return f(u, v, c)


def _fs(s, u, v, c):
    _near(u - v, f"f_{s}({u}, {v}) near a pole")
    return f_s(s, u, v, c)


def _prod(fn, A, B):
    acc = 1 + 0j
    for a in A:
        for b in B:
            acc *= fn(a, b)
    return acc


def _sets(t) -> list[tuple]:
    return [tuple(s) for s in (t.sets if isinstance(t, BetheParams) else t)]


def _alpha(chain, s, u):
    den = chain.lam(s + 1, u)
    _near(den, f"alpha_{s} near a pole at {u}")
    return chain.lam(s, u) / den


def _equation_sides(chain, sets):
    """Yield ``(alpha_s(t), right-hand side)`` per Bethe equation, level by level."""
    c = to_complex(chain.spec.c)
    n = chain.spec.n
    for s in range(n):
        above = sets[s + 1] if s + 1 < n else ()
        below = sets[s - 1] if s >= 1 else ()
        for ell, x in enumerate(sets[s]):
            rest = sets[s][:ell] + sets[s][ell + 1:]
            rhs = _prod(lambda a, b: _fs(s, a, b, c), [x], rest) / _prod(lambda a, b: _fs(s, a, b, c), rest, [x])
            rhs *= _prod(lambda a, b: _f(a, b, c), above, [x]) / _prod(lambda a, b: _f(a, b, c), [x], below)
            yield _alpha(chain, s, x), rhs


def bethe_residual(spec, t) -> np.ndarray:
    """``alpha_s(t) - rhs`` for every parameter, in level order."""
    chain = as_chain(spec)
    sets = [tuple(complex(x) for x in s) for s in _sets(t)]
    return np.array([a - b for a, b in _equation_sides(chain, sets)], dtype=complex)


def _log_residual(chain, sets) -> np.ndarray:
    out = []
    for a, b in _equation_sides(chain, sets):
        _near(b, "right-hand side vanishes")
        out.append(cmath.log(a / b))
    return np.array(out, dtype=complex)


@dataclass
class BetheSystem:
    spec: object
    r: tuple

    @property
    def size(self) -> int:
        return sum(self.r)

    def unflatten(self, x) -> list[tuple]:
        out, k = [], 0
        for m in self.r:
            out.append(tuple(complex(v) for v in x[k:k + m]))
            k += m
        return out

    def residual(self, x) -> np.ndarray:
        return bethe_residual(self.spec, self.unflatten(x))

    def log_residual(self, x) -> np.ndarray:
        return _log_residual(as_chain(self.spec), self.unflatten(x))

    def jacobian(self, x) -> np.ndarray:
        """Central differences with step ``FD_STEP`` (the equations are holomorphic)."""
        k = self.size
        jac = np.empty((k, k), dtype=complex)
        for col in range(k):
            e = np.zeros(k, dtype=complex)
            e[col] = FD_STEP
            jac[:, col] = (self.log_residual(x + e) - self.log_residual(x - e)) / (2 * FD_STEP)
        return jac


def newton(system: BetheSystem, x0, max_iter: int = 80) -> np.ndarray:
    x = np.array(x0, dtype=complex)
    for _ in range(max_iter):
        try:
            F = system.log_residual(x)
            if np.linalg.norm(system.residual(x)) < RESIDUAL_TOL * 1e-2:
                return x
            step = np.linalg.solve(system.jacobian(x), -F)
        except (NearPoleError, PoleError, np.linalg.LinAlgError, ZeroDivisionError) as err:
            raise NoConvergence(str(err)) from None
        # simple backtracking on the log-residual norm
        lam, base = 1.0, np.linalg.norm(F)
        while lam > 1e-4:
            trial = x + lam * step
            try:
                if np.linalg.norm(system.log_residual(trial)) < base or lam < 1e-3:
                    break
            except (NearPoleError, PoleError, ZeroDivisionError):
                pass
            lam /= 2
        x = x + lam * step
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e8:
            raise NoConvergence("iterate escaped to infinity")
    try:
        if np.linalg.norm(system.residual(x)) < RESIDUAL_TOL:
            return x
    except (NearPoleError, PoleError, ZeroDivisionError):
        pass
    raise NoConvergence("no convergence within the iteration budget")


def _same_root(a: list[tuple], b: list[tuple]) -> bool:
    for sa, sb in zip(a, b):
        pool = list(sb)
        for x in sa:
            k = min(range(len(pool)), key=lambda m: abs(pool[m] - x))
            if abs(pool[k] - x) > DEDUP_TOL:
                return False
            pool.pop(k)
    return True


def _seed_disk(spec, rng, k):
    xi = [to_complex(x) for x in spec.xi]
    centre = sum(xi) / len(xi)
    radius = 3 * max(abs(x) for x in xi) or 1.0
    r = radius * np.sqrt(rng.random(k))
    phi = 2 * np.pi * rng.random(k)
    return centre + r * np.exp(1j * phi)


@dataclass
class RootRecord:
    sets: list
    residual: float
    null: bool = False
    count: int = 1  # seeds that landed on this root (null roots form continua and are collapsed)


def solve_bethe(spec, r, seeds: int = 64, rng_seed: int = 0, null_tol: float = 1e-10) -> list[RootRecord]:
    """Newton from random seeds; returns deduplicated converged roots.

    Roots whose Bethe vector vanishes are kept but flagged ``null``; they
    solve the equations without describing a state.
    """
    system = BetheSystem(spec, tuple(r))
    if system.size == 0:
        return [RootRecord([() for _ in r], 0.0, False)]
    rng = np.random.default_rng(rng_seed)
    found: list[RootRecord] = []
    for k in range(seeds):
        x0 = _seed_disk(spec, rng, system.size)
        try:
            x = newton(system, x0)
        except NoConvergence as err:
            log.debug("seed %d dropped: %s", k, err)
            continue
        sets = [tuple(sorted(s, key=sort_key)) for s in system.unflatten(x)]
        if any(abs(a - b) < DEDUP_TOL for s in sets for i, a in enumerate(s) for b in s[i + 1:]):
            continue  # coinciding parameters do not define a vector
        same = next((rec for rec in found if _same_root(sets, rec.sets)), None)
        if same is not None:
            same.count += 1
            continue
        res = float(np.linalg.norm(system.residual(x)))
        try:
            vec = bethe_vector(spec, sets)
            null = vec.norm() < null_tol
        except (PoleError, ZeroDivisionError):
            continue
        if null:
            first = next((rec for rec in found if rec.null), None)
            if first is not None:
                first.count += 1
                continue
        found.append(RootRecord(sets, res, null))
    return found


def tau(spec, z, t):
    """Transfer-matrix eigenvalue for parameters ``t`` with measured vacuum eigenvalues."""
    chain = as_chain(spec)
    n = chain.spec.n
    c = chain.spec.c if is_exact(z) else to_complex(chain.spec.c)
    sets = _sets(t)
    fp = lambda A, B: _prod_exact(lambda a, b: f(a, b, c), A, B)
    level = lambda s: sets[s] if 0 <= s < n else ()
    out = chain.lam(0, z) * fp(level(0), [z_shift(z, 0, c)]) * fp([z], level(0))
    for s in range(1, n + 1):
        out = out + chain.lam(s, z) * fp(level(s), [z]) * fp([z], level(s - 1))
        out = out + chain.lam(-s, z) * fp(level(s - 1), [z_shift(z, s - 1, c)]) * fp([z_shift(z, s, c)], level(s))
    return out


def _prod_exact(fn, A, B):
    acc = 1
    for a in A:
        for b in B:
            acc = acc * fn(a, b)
    return acc


def transfer_apply(spec, z, vec: ChainVector) -> ChainVector:
    out = ChainVector(vec.n, vec.sites)
    for i in site_labels(vec.n):
        out = out + apply_column(spec, z, i, vec)[i]
    return out


def verify_eigenproperty(spec, z, t) -> dict:
    vec = bethe_vector(spec, _sets(t))
    norm = vec.norm()
    if norm == 0:
        return {"norm": 0.0, "defect": None, "ok": False, "note": "null vector"}
    ev = tau(spec, z, t)
    defect = (transfer_apply(spec, z, vec) - vec.scale(ev)).norm() / norm
    return {"norm": norm, "tau": complex(ev), "defect": defect, "ok": defect < EIGEN_TOL}


def exact_diagonalize(spec, z) -> np.ndarray:
    dim = spec.N ** spec.L
    if dim > MAX_DIM:
        raise DimensionError(f"Hilbert space dimension {dim} exceeds {MAX_DIM}")
    ops = evaluate_monodromy(spec, complex(z))
    mat = sum(ops[(i, i)].to_dense() for i in site_labels(spec.n))
    return np.linalg.eigvals(mat)


def highest_weight_defect(spec, t) -> float:
    """Largest ``|T_{j,i} B| / |B|`` over ``0 <= i < j <= n``."""
    chain = as_chain(spec)
    vec = bethe_vector(chain, _sets(t))
    norm = vec.norm()
    n = chain.spec.n
    worst = 0.0
    for j in range(n + 1):
        for i in range(j):
            worst = max(worst, zero_mode_vector(chain, j, i, vec).norm() / norm)
    return worst


def _rel(a, b) -> float:
    return abs(a - b) / max(1.0, abs(b))


@dataclass
class SpectrumReport:
    z: complex
    eigenvalues: list
    states: list = field(default_factory=list)
    unmatched: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s["ok"] for s in self.states if not s["null"])

    def to_json(self) -> dict:
        cz = lambda x: [x.real, x.imag]
        return {
            "z": cz(self.z),
            "eigenvalues": [cz(complex(e)) for e in self.eigenvalues],
            "states": [
                {**{k: v for k, v in s.items() if k not in ("roots", "tau")},
                 "roots": [[cz(complex(x)) for x in lvl] for lvl in s["roots"]],
                 "tau": cz(complex(s["tau"])) if s["tau"] is not None else None}
                for s in self.states
            ],
            "unmatched": [cz(complex(e)) for e in self.unmatched],
            "ok": self.ok,
        }


def spectrum(spec, cardinalities, z=0.37 + 0.21j, seeds: int = 64, rng_seed: int = 0) -> SpectrumReport:
    """Solve the Bethe equations for each cardinality vector and match against diagonalization."""
    z = complex(z)
    eig = exact_diagonalize(spec, z)
    report = SpectrumReport(z, sorted(eig, key=lambda x: (x.real, x.imag)))
    used = set()
    hw = spec.is_untwisted()
    for r in cardinalities:
        for rec in solve_bethe(spec, r, seeds=seeds, rng_seed=rng_seed):
            state = {"r": list(r), "roots": rec.sets, "residual": rec.residual, "null": rec.null, "seeds": rec.count,
                     "tau": None, "defect": None, "match": None, "highest_weight": None, "ok": False}
            if rec.null:
                report.states.append(state)
                continue
            ep = verify_eigenproperty(spec, z, rec.sets)
            ev = ep["tau"]
            k = int(np.argmin([_rel(ev, e) for e in eig]))
            state.update(tau=ev, defect=ep["defect"], match=_rel(ev, eig[k]))
            used.add(k)
            if hw:
                state["highest_weight"] = highest_weight_defect(spec, rec.sets)
            state["ok"] = (rec.residual < RESIDUAL_TOL and ep["ok"] and state["match"] < EIGEN_TOL
                           and (state["highest_weight"] is None or state["highest_weight"] < EIGEN_TOL))
            report.states.append(state)
    report.unmatched = [e for k, e in enumerate(eig) if k not in used]
    return report
