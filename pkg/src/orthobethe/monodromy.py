"""Twisted inhomogeneous chain monodromy ``T(u) = K R_{0,L}(u,xi_L) ... R_{0,1}(u,xi_1)``.

Every site carries the fundamental representation; the auxiliary space is
the first factor of each R-matrix. One site factor, seen as an N x N matrix
of single-site operators, is

    R_{a,b}(u) = delta_{a,b} + g e_{b,a} - q e_{-a,-b},
    g = c/(u - xi),  q = c/(u - xi + c kappa).

The same column kernel runs with exact rationals, complex floats, or
polynomials in ``u`` (after clearing the site denominators), which is how
the symbolic monodromy is produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

from .errors import CentralityError, GenericityError, NoVacuumError, PoleError
from .linop import ChainOperator, ChainVector, all_indices, compose, identity, site_labels
from .rmatrix import ModelParams, build_r
from .scalarfield import Polynomial, Q, RationalFunction, coeff_at_infinity, is_exact, to_complex


class CheckResult(NamedTuple):
    """Outcome of an identity check; truthy iff the identity holds."""

    ok: bool
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ChainSpec:
    params: ModelParams
    xi: tuple
    chi: tuple = ()

    def __post_init__(self):
        n = self.params.n
        object.__setattr__(self, "xi", tuple(self.xi))
        chi = tuple(self.chi) if self.chi else tuple(Q(1) for _ in range(n))
        object.__setattr__(self, "chi", chi)
        if len(chi) != n:
            raise GenericityError(f"expected {n} twist parameters, got {len(chi)}")
        if any(not x for x in chi):
            raise GenericityError("twist parameters must be nonzero")
        if not self.xi:
            raise GenericityError("a chain needs at least one site")
        c = self.params.c
        bad = [0, c, -c, self.params.c_kappa, -self.params.c_kappa, c / 2, -c / 2]
        for k, a in enumerate(self.xi):
            for b in self.xi[k + 1:]:
                if any(_close(a - b, x) for x in bad):
                    raise GenericityError(
                        f"inhomogeneities {a} and {b} differ by a forbidden amount")

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def L(self) -> int:
        return len(self.xi)

    @property
    def c(self):
        return self.params.c

    @property
    def N(self) -> int:
        return self.params.N

    def chi_at(self, i: int):
        """``chi_i`` with ``chi_0 = 1`` and ``chi_{-i} = 1/chi_i``."""
        if i == 0:
            return self.c / self.c
        if i > 0:
            return self.chi[i - 1]
        return 1 / self.chi[-i - 1]

    @cached_property
    def float_view(self) -> "ChainSpec":
        """Same chain with complex-float parameters (genericity already checked)."""
        view = object.__new__(ChainSpec)
        object.__setattr__(view, "params", ModelParams(self.n, to_complex(self.c)))
        object.__setattr__(view, "xi", tuple(to_complex(x) for x in self.xi))
        object.__setattr__(view, "chi", tuple(to_complex(x) for x in self.chi))
        return view

    def view_for(self, u) -> "ChainSpec":
        return self if is_exact(u) else self.float_view

    def is_untwisted(self) -> bool:
        return all(x == 1 for x in self.chi)


def _close(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(a - b) < 1e-12


def _check_pole(x, what: str) -> None:
    if _close(x, 0 * x):
        raise PoleError(what)


# ----------------------------------------------------------------------------
# Kernel


def _site_coefficients(spec: ChainSpec, u):
    """Per-site ``(d, g, q)`` with ``R_{a,b} = d delta + g e_{b,a} - q e_{-a,-b}``."""
    out = []
    ck = spec.params.c_kappa
    for xi in spec.xi:
        _check_pole(u - xi, f"monodromy has a pole at u = xi = {xi}")
        _check_pole(u - xi + ck, f"monodromy has a pole at u = xi - c kappa = {xi - ck}")
        out.append((1, spec.c / (u - xi), spec.c / (u - xi + ck)))
    return out


def _site_polynomials(spec: ChainSpec):
    """Site factors multiplied by ``(u - xi)(u - xi + c kappa)``."""
    out = []
    ck = spec.params.c_kappa
    c = spec.c
    for xi in spec.xi:
        p1 = Polynomial.linear(xi)
        p2 = Polynomial.linear(xi - ck)
        out.append((p1 * p2, p2 * c, p1 * c))
    return out


def _column_kernel(n: int, coeffs, chis, j: int, v: dict) -> dict[int, dict]:
    """Return ``{a: T_{a,j} v}`` as raw sparse dicts, for all auxiliary indices ``a``.

    ``coeffs`` holds the ``(d, g, q)`` factors of sites 1..L in the order
    they act; ``chis`` maps an auxiliary index to its twist factor.
    """
    labels = site_labels(n)
    cols: dict[int, dict] = {j: dict(v)}
    for m, (d, g, q) in enumerate(coeffs):
        new: dict[int, dict] = {}
        for b, vec in cols.items():
            for idx, x in vec.items():
                s = idx[m]
                # diagonal part
                tgt = new.setdefault(b, {})
                y = d * x
                tgt[idx] = tgt.get(idx, 0) + y
                # g e_{b,a}: needs idx[m] == a, lands on a = s
                moved = idx[:m] + (b,) + idx[m + 1:]
                tgt = new.setdefault(s, {})
                tgt[moved] = tgt.get(moved, 0) + g * x
                # -q e_{-a,-b}: needs idx[m] == -b, feeds every a
                if s == -b:
                    y = q * x
                    for a in labels:
                        moved = idx[:m] + (-a,) + idx[m + 1:]
                        tgt = new.setdefault(a, {})
                        tgt[moved] = tgt.get(moved, 0) - y
        cols = {a: {k: x for k, x in vec.items() if x} for a, vec in new.items()}
    return {a: ({k: chis(a) * x for k, x in vec.items()} if chis(a) != 1 else vec)
            for a, vec in cols.items() if vec}


def apply_column(spec: ChainSpec, u, j: int, v: ChainVector) -> dict[int, ChainVector]:
    """``{i: T_{i,j}(u) v}`` for every row ``i`` at once."""
    s = spec.view_for(u)
    raw = _column_kernel(spec.n, _site_coefficients(s, u), s.chi_at, j, v.entries)
    zero = ChainVector(spec.n, spec.L)
    return {i: ChainVector(spec.n, spec.L, raw[i]) if i in raw else zero for i in site_labels(spec.n)}


def apply_entry(spec: ChainSpec, u, i: int, j: int, v: ChainVector) -> ChainVector:
    return apply_column(spec, u, j, v)[i]


def _operators_from_kernel(spec: ChainSpec, coeffs, chis) -> dict[tuple[int, int], ChainOperator]:
    n, L = spec.n, spec.L
    entries: dict[tuple[int, int], dict] = {(i, j): {} for i in site_labels(n) for j in site_labels(n)}
    one = Q(1)
    for col in all_indices(n, L):
        for j in site_labels(n):
            for i, vec in _column_kernel(n, coeffs, chis, j, {col: one}).items():
                tgt = entries[(i, j)]
                for row, x in vec.items():
                    tgt[(row, col)] = x
    return {key: ChainOperator(n, L, e) for key, e in entries.items()}


def evaluate_monodromy(spec: ChainSpec, u) -> dict[tuple[int, int], ChainOperator]:
    """All entries ``T_{i,j}(u)`` as operators at a numeric point."""
    s = spec.view_for(u)
    return _operators_from_kernel(s, _site_coefficients(s, u), s.chi_at)


# ----------------------------------------------------------------------------
# Symbolic monodromy


@dataclass
class SymbolicMonodromy:
    """Entries ``T_{i,j}(u) = numerators[i,j](u) / denominator(u)``.

    ``numerators`` are operators with polynomial entries and the common
    denominator is ``prod_k (u - xi_k)(u - xi_k + c kappa)``.
    """

    spec: ChainSpec
    numerators: dict[tuple[int, int], ChainOperator]
    denominator: Polynomial

    def entry_function(self, i: int, j: int, row, col) -> RationalFunction:
        num = self.numerators[(i, j)].entries.get((tuple(row), tuple(col)), Polynomial())
        return RationalFunction(num, self.denominator)

    def evaluate(self, u) -> dict[tuple[int, int], ChainOperator]:
        den = self.denominator(u)
        _check_pole(den, f"monodromy has a pole at u = {u}")
        inv = 1 / den
        return {k: op.map_entries(lambda p: p(u) * inv) for k, op in self.numerators.items()}

    def leading_term(self) -> dict[tuple[int, int], ChainOperator]:
        """Coefficient of ``u**0`` at infinity, entry by entry."""
        return {k: op.map_entries(lambda p: _laurent(p, self.denominator, 0))
                for k, op in self.numerators.items()}


def _laurent(num: Polynomial, den: Polynomial, k: int):
    """Coefficient of ``u**-k`` of ``num/den`` for a monic ``den``, without gcd reduction."""
    f = RationalFunction.__new__(RationalFunction)
    f.num, f.den = num, den
    return coeff_at_infinity(f, k)


def build_monodromy(spec: ChainSpec) -> SymbolicMonodromy:
    coeffs = _site_polynomials(spec)
    den = Polynomial((Q(1),))
    for d, _, _ in coeffs:
        den = den * d
    return SymbolicMonodromy(spec, _operators_from_kernel(spec, coeffs, spec.chi_at), den)


@dataclass
class VacuumData:
    vacuum: ChainVector
    lambdas: dict[int, RationalFunction]

    def lam(self, i: int, u):
        return self.lambdas[i](u)


def find_vacuum(m: SymbolicMonodromy) -> VacuumData:
    """Scan product basis vectors for the reference state."""
    spec = m.spec
    n, L = spec.n, spec.L
    for idx in all_indices(n, L):
        ok = True
        for (i, j), op in m.numerators.items():
            col = op._by_column.get(idx, ())
            if j < i and col:
                ok = False
                break
            if i == j and any(r != idx for r, _ in col):
                ok = False
                break
        if ok:
            lambdas = {}
            for i in site_labels(n):
                num = m.numerators[(i, i)].entries.get((idx, idx), Polynomial())
                lambdas[i] = RationalFunction(num, m.denominator)
            return VacuumData(ChainVector.basis(n, idx), lambdas)
    raise NoVacuumError("no product basis vector is annihilated by the lower-triangular entries")


@dataclass
class Chain:
    """A chain spec together with its symbolic monodromy and vacuum data (built lazily)."""

    spec: ChainSpec
    _mono: SymbolicMonodromy | None = field(default=None, repr=False)
    _vac: VacuumData | None = field(default=None, repr=False)
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def monodromy(self) -> SymbolicMonodromy:
        if self._mono is None:
            self._mono = build_monodromy(self.spec)
        return self._mono

    @property
    def vacuum_data(self) -> VacuumData:
        if self._vac is None:
            self._vac = find_vacuum(self.monodromy)
        return self._vac

    @property
    def vacuum(self) -> ChainVector:
        return self.vacuum_data.vacuum

    def lam(self, i: int, u):
        return self.vacuum_data.lam(i, u)

    def alpha(self, s: int, u):
        """``alpha_s(u) = lambda_s(u) / lambda_{s+1}(u)``."""
        den = self.lam(s + 1, u)
        _check_pole(den, f"alpha_{s} has a pole at u = {u}")
        return self.lam(s, u) / den


# ----------------------------------------------------------------------------
# Checks


def check_rtt(spec: ChainSpec, u, v) -> CheckResult:
    """``R(u,v) (T(u) x I)(I x T(v)) = (I x T(v))(T(u) x I) R(u,v)`` entry by entry."""
    n = spec.n
    labels = list(site_labels(n))
    r = build_r(spec.params, u, v).entries
    tu = evaluate_monodromy(spec, u)
    tv = evaluate_monodromy(spec, v)
    prod_uv = {(a, c, b, d): compose(tu[(a, c)], tv[(b, d)])
               for a in labels for c in labels for b in labels for d in labels}
    prod_vu = {(a, c, b, d): compose(tv[(b, d)], tu[(a, c)])
               for a in labels for c in labels for b in labels for d in labels}
    r_rows: dict = {}
    r_cols: dict = {}
    for ((a, b), (e, f)), x in r.items():
        r_rows.setdefault((a, b), []).append(((e, f), x))
        r_cols.setdefault((e, f), []).append(((a, b), x))
    zero = ChainOperator(n, spec.L)
    for a in labels:
        for b in labels:
            for c in labels:
                for d in labels:
                    lhs = zero
                    for (e, f), x in r_rows.get((a, b), ()):
                        lhs = lhs + prod_uv[(e, c, f, d)].scale(x)
                    rhs = zero
                    for (e, f), x in _r_column(r, (c, d)):
                        rhs = rhs + prod_vu[(a, e, b, f)].scale(x)
                    if lhs != rhs:
                        return CheckResult(False, {"aux_row": [a, b], "aux_col": [c, d]})
    return CheckResult(True)


def _r_column(r: dict, col):
    return [(row, x) for (row, cc), x in r.items() if cc == col]


def _symbolic_central(m: SymbolicMonodromy):
    """Both sums of the quadratic relation with polynomial entries.

    Returns ``(first, second, denominator)``: dicts ``(i,j) -> operator`` of
    numerators over the common denominator ``D(u - c kappa) D(u)``.
    """
    spec = m.spec
    n = spec.n
    shift = -spec.params.c_kappa
    shifted = {k: op.map_entries(lambda p: p.shift(shift)) for k, op in m.numerators.items()}
    labels = list(site_labels(n))
    zero = ChainOperator(n, spec.L)
    first, second = {}, {}
    for i in labels:
        for j in labels:
            acc1 = zero
            acc2 = zero
            for k in labels:
                acc1 = acc1 + compose(shifted[(-k, -i)], m.numerators[(k, j)])
                acc2 = acc2 + compose(m.numerators[(i, k)], shifted[(-j, -k)])
            first[(i, j)], second[(i, j)] = acc1, acc2
    return first, second, m.denominator.shift(shift) * m.denominator


def check_central(spec: ChainSpec, u=None, monodromy: SymbolicMonodromy | None = None) -> RationalFunction:
    """Measure the central element ``z(u)`` of the quadratic relation.

    Raises :class:`CentralityError` when an off-diagonal component is
    nonzero or the diagonal depends on the row. When ``u`` is given the
    relation is also evaluated there.
    """
    m = monodromy or build_monodromy(spec)
    first, second, den = _symbolic_central(m)
    basis = list(all_indices(spec.n, spec.L))
    z_num = None
    for label, table in (("first", first), ("second", second)):
        for (i, j), op in table.items():
            if i != j:
                if op:
                    raise CentralityError(f"{label} sum: off-diagonal component ({i},{j}) is nonzero")
                continue
            diag = {k: op.entries.get((k, k)) for k in basis}
            if len(op.entries) != len(basis) or len(set(diag.values())) != 1:
                raise CentralityError(f"{label} sum: component ({i},{i}) is not a multiple of identity")
            val = next(iter(diag.values()))
            if z_num is None:
                z_num = val
            elif val != z_num:
                raise CentralityError(f"{label} sum: diagonal component ({i},{i}) depends on the row")
    z = RationalFunction(z_num, den)
    if u is not None:
        vals = evaluate_monodromy(spec, u)
        shifted = evaluate_monodromy(spec, u - spec.params.c_kappa)
        zu = z(u)
        for i in site_labels(spec.n):
            acc = ChainOperator(spec.n, spec.L)
            for k in site_labels(spec.n):
                acc = acc + compose(shifted[(-k, -i)], vals[(k, i)])
            if acc != identity(spec.n, spec.L).scale(zu):
                raise CentralityError(f"evaluated relation fails at u={u}, row {i}")
    return z


def zero_mode(m: SymbolicMonodromy, i: int, j: int) -> ChainOperator:
    """Coefficient of ``c/u`` in ``T_{i,j}(u)``."""
    c = m.spec.c
    return m.numerators[(i, j)].map_entries(lambda p: _laurent(p, m.denominator, 1) / c)


def zero_modes(m: SymbolicMonodromy) -> dict[tuple[int, int], ChainOperator]:
    labels = site_labels(m.spec.n)
    return {(i, j): zero_mode(m, i, j) for i in labels for j in labels}


def _zm_rhs(spec: ChainSpec, ops: dict, i, j, k, l) -> ChainOperator:
    """Right-hand side shared by the two zero-mode commutator identities."""
    out = ChainOperator(spec.n, spec.L)
    chi = spec.chi_at
    if i == l:
        out = out + ops[(k, j)].scale(chi(i))
    if k == j:
        out = out - ops[(i, l)].scale(chi(j))
    if i == -k:
        out = out - ops[(-l, j)].scale(chi(l))
    if -l == j:
        out = out + ops[(i, -k)].scale(chi(k))
    return out


def check_zero_mode_commutators(spec: ChainSpec, u, monodromy: SymbolicMonodromy | None = None) -> CheckResult:
    """``[T_{i,j}(u), T_{k,l}]`` and ``[T_{i,j}, T_{k,l}]`` against their closed forms."""
    m = monodromy or build_monodromy(spec)
    zms = zero_modes(m)
    tu = evaluate_monodromy(spec, u)
    labels = list(site_labels(spec.n))
    for i in labels:
        for j in labels:
            for k in labels:
                for l in labels:
                    lhs = compose(tu[(i, j)], zms[(k, l)]) - compose(zms[(k, l)], tu[(i, j)])
                    if lhs != _zm_rhs(spec, tu, i, j, k, l):
                        return CheckResult(False, {"relation": "monodromy-zero-mode", "indices": [i, j, k, l]})
                    lhs = compose(zms[(i, j)], zms[(k, l)]) - compose(zms[(k, l)], zms[(i, j)])
                    if lhs != _zm_rhs(spec, zms, i, j, k, l):
                        return CheckResult(False, {"relation": "zero-mode-zero-mode", "indices": [i, j, k, l]})
    return CheckResult(True)


def lambda_shift(lam: RationalFunction, spec: ChainSpec, s: int) -> RationalFunction:
    """``lambda(z_s)`` as a function of ``z``, where ``z_s = z - c(s - 1/2)``."""
    return lam.shift(-spec.c * (2 * s - 1) / 2)


def check_lambda_rest(spec: ChainSpec, chain: Chain | None = None) -> dict:
    """Compare the measured ``lambda_{-j}`` with the two product forms built from ``lambda_0..lambda_n``.

    The product forms assume the central element equals one. The report
    records, per ``j``, whether the measured value agrees exactly, agrees
    after dividing the product form by the measured ``z``, or neither
    (the ratio is then returned).
    """
    chain = chain or Chain(spec)
    lam = chain.vacuum_data.lambdas
    n = spec.n
    z = check_central(spec, monodromy=chain.monodromy)
    rows = []
    for j in range(n + 1):
        form_a = 1 / lambda_shift(lam[n], spec, n)
        for s in range(j, n):
            form_a = form_a * lambda_shift(lam[s + 1], spec, s) / lambda_shift(lam[s], spec, s)
        form_b = 1 / lambda_shift(lam[j], spec, j)
        for s in range(j + 1, n + 1):
            form_b = form_b * lambda_shift(lam[s], spec, s - 1) / lambda_shift(lam[s], spec, s)
        measured = lam[-j]
        ratio = measured / form_a
        if ratio == RationalFunction.constant(Q(1)):
            mode = "exact"
        elif ratio == z:
            mode = "times-z"
        elif ratio * z == RationalFunction.constant(Q(1)):
            mode = "divided-by-z"
        else:
            mode = "other"
        rows.append({"j": j, "forms_agree": form_a == form_b, "mode": mode, "ratio": ratio})
    return {"z": z, "rows": rows}


def transfer_matrix(spec: ChainSpec, z) -> ChainOperator:
    ops = evaluate_monodromy(spec, z)
    out = ChainOperator(spec.n, spec.L)
    for i in site_labels(spec.n):
        out = out + ops[(i, i)]
    return out
