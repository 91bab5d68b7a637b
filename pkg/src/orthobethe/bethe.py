"""Off-shell Bethe vectors and the action of monodromy entries on them.

Vectors are built recursively. At rank ``m`` (the ``o(2m+1)`` block sitting
in the middle of the full monodromy) one parameter is stripped from the top
set ``t^{m-1}`` and the remainder is expressed through entries of column
``m`` (or, on the alternative path, row ``-m``) acting on smaller vectors.
Rank one uses its own recursion; see :func:`_strip_rank_one`.

Everything here works for exact rationals and for complex floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import CardinalityError, GenericityError, PoleError
from .linop import ChainVector, site_labels
from .monodromy import Chain, ChainSpec, apply_column, apply_entry
from .partitions import (
    BetheParams,
    WSets,
    canonical,
    enumerate_bipartitions,
    enumerate_tripartitions,
    f,
    f_s,
    frak_f,
    gamma_s,
    h,
    inv_g,
    prod_pair,
    sigma,
    sort_key,
    z_shift,
)
from .scalarfield import Q, is_exact

_CHAINS: dict[ChainSpec, Chain] = {}


def as_chain(spec_or_chain) -> Chain:
    """Return a shared :class:`Chain` (monodromy, vacuum and vector cache) for a spec."""
    if isinstance(spec_or_chain, Chain):
        return spec_or_chain
    chain = _CHAINS.get(spec_or_chain)
    if chain is None:
        chain = _CHAINS[spec_or_chain] = Chain(spec_or_chain)
    return chain


def _is_zero(x) -> bool:
    return x == 0 if is_exact(x) else abs(x) < 1e-300


FLOAT_RTOL = 1e-9


def vectors_agree(a: ChainVector, b: ChainVector, rtol: float = FLOAT_RTOL) -> bool:
    """Exact equality for rational vectors; relative closeness once floats appear."""
    if all(is_exact(v) for v in a.entries.values()) and all(is_exact(v) for v in b.entries.values()):
        return a == b
    return (a - b).norm() <= rtol * max(1.0, a.norm(), b.norm())


class _W:
    """Set products with ``c`` bound; every method multiplies over all pairs."""

    def __init__(self, chain: Chain):
        self.chain = chain
        self.c = chain.spec.c

    def g_inv(self, A, B):
        return prod_pair(lambda a, b: inv_g(a, b, self.c), A, B)

    def h(self, A, B):
        return prod_pair(lambda a, b: h(a, b, self.c), A, B)

    def f(self, A, B):
        return prod_pair(lambda a, b: f(a, b, self.c), A, B)

    def fs(self, s, A, B):
        return prod_pair(lambda a, b: f_s(s, a, b, self.c), A, B)

    def ff(self, A, B):
        return prod_pair(lambda a, b: frak_f(a, b, self.c), A, B)

    def gamma(self, s, A, B):
        return prod_pair(lambda a, b: gamma_s(s, a, b, self.c), A, B)

    def alpha(self, s, A):
        acc = Q(1)
        for a in A:
            acc = acc * self.chain.alpha(s, a)
        return acc

    def lam(self, i, u):
        return self.chain.lam(i, u)


@dataclass
class BetheVector:
    params: BetheParams
    vector: ChainVector
    spec: ChainSpec


@dataclass
class ActionExpansion:
    """Merged linear combination ``sum coefficient * B(params)``."""

    chain: Chain = field(repr=False)
    terms: dict = field(default_factory=dict)  # canonical sets -> coefficient

    def add(self, sets, coefficient) -> None:
        if _is_zero(coefficient):
            return
        key = canonical(sets)
        new = self.terms.get(key, 0) + coefficient
        if _is_zero(new):
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    @property
    def items(self) -> list[tuple[object, BetheParams]]:
        spec = self.chain.spec
        return [(coef, BetheParams(spec.n, key, spec.c, check=False))
                for key, coef in sorted(self.terms.items(), key=lambda kv: _key_order(kv[0]))]

    @property
    def assembled(self) -> ChainVector:
        out = ChainVector(self.chain.spec.n, self.chain.spec.L)
        for key, coef in sorted(self.terms.items(), key=lambda kv: _key_order(kv[0])):
            out = out + bethe_vector(self.chain, key).scale(coef)
        return out


def _key_order(key):
    return tuple(tuple(sort_key(x) for x in s) for s in key)


# ----------------------------------------------------------------------------
# Recursions


def _pad(sets, n):
    sets = tuple(tuple(s) for s in sets)
    return sets + ((),) * (n - len(sets))


def _column_sizes(i: int, m: int) -> list[int]:
    """``#t^s_I`` for ``s = 0..m-1`` in the column recursion at rank ``m``."""
    out = []
    for s in range(m - 1):
        if i >= 0:
            out.append(0 if s <= i - 1 else 1)
        else:
            # i = -m continues the pattern of -m < i < 0: two elements on every lower level
            out.append(2 if s <= -i - 1 else 1)
    out.append(1 if i == -m else 0)
    return out


def _row_sizes(j: int, m: int) -> list[int]:
    """``#t^s_III`` for ``s = 0..m-1`` in the row recursion at rank ``m``."""
    out = []
    for s in range(m - 1):
        if j <= 0:
            out.append(0 if s <= -j - 1 else 1)
        else:
            out.append(2 if s <= j - 1 else 1)
    out.append(1 if j == m else 0)
    return out


def _combine(chain: Chain, per_key: dict, z, alt: bool = False) -> ChainVector:
    """Sum ``coef * T_{i,j}(z) B(key)`` from ``{key: {(i, j): coef}}``."""
    spec = chain.spec
    out = ChainVector(spec.n, spec.L)
    for key, coeffs in per_key.items():
        vec = _build(chain, key, alt)
        if not vec:
            continue
        cols = {}
        for (i, j), coef in coeffs.items():
            if j not in cols:
                cols[j] = apply_column(spec, z, j, vec)
            out = out + cols[j][i].scale(coef)
    return out


def _accumulate(per_key: dict, key, ij, coef) -> None:
    if _is_zero(coef):
        return
    slot = per_key.setdefault(key, {})
    slot[ij] = slot.get(ij, 0) + coef


def _strip_column(chain: Chain, sets: tuple, m: int, pos: int = -1) -> ChainVector:
    """Remove ``t^{m-1}[pos]`` using entries ``T_{i,m}(z)``, ``-m <= i < m``, at rank ``m >= 2``."""
    W = _W(chain)
    top = list(sets[m - 1])
    z = top.pop(pos)
    lower = list(sets[:m - 1]) + [tuple(top)]
    pre = 1 / (W.h([z], top) * W.lam(m, z))
    per_key: dict = {}
    for i in range(-m, m):
        for split in enumerate_bipartitions(lower, _column_sizes(i, m)):
            I = [a for a, _ in split]
            II = [b for _, b in split]
            w = sigma(i + 1) * W.g_inv([z], II[m - 2])
            for s in range(1, m):
                if _is_zero(w):
                    break
                w = w * W.h(II[s], I[s - 1]) * W.g_inv(I[s], II[s - 1])
            if _is_zero(w):
                continue
            w = w / W.h(II[m - 1], [z])
            for s in range(m):
                w = w * W.gamma(s, I[s], II[s])
            _accumulate(per_key, _pad(II, chain.spec.n), (i, m), pre * w)
    return _combine(chain, per_key, z)


def _strip_rank_one(chain: Chain, sets: tuple, pos: int = -1) -> ChainVector:
    """Remove ``t^0[pos]`` at rank one.

    ``B({t, z}) = (1/(h(z,t) lambda_1(z))) sum_{i=-1,0} sum sigma_{i+1} T_{i,1}(z) B(t_II)
    frak_f(t_I, t_II) / g(z + c/2, t_II)`` with ``#t_I = 1`` for ``i = -1`` and 0 otherwise.
    """
    W = _W(chain)
    top = list(sets[0])
    z = top.pop(pos)
    z0 = z_shift(z, 0, W.c)
    pre = 1 / (W.h([z], top) * W.lam(1, z))
    per_key: dict = {}
    for i in (-1, 0):
        for ((I, II),) in enumerate_bipartitions([tuple(top)], [1 if i == -1 else 0]):
            w = sigma(i + 1) * W.gamma(0, I, II) * W.g_inv([z0], II)
            _accumulate(per_key, _pad([II], chain.spec.n), (i, 1), pre * w)
    return _combine(chain, per_key, z)


def _strip_row_rank_one(chain: Chain, sets: tuple, pos: int = -1) -> ChainVector:
    """Remove ``x = t^0[pos]`` at rank one through ``T_{-1,j}(z)`` with ``z = x - c/2``.

    ``B({t, x}) = -(1/(h(t,x) lambda_0(z))) sum_{j=0,1} sum T_{-1,j}(z) B(t_II)
    alpha_0(t_III) frak_f(t_II, t_III) / g(t_II, z)`` with ``#t_III = 1`` for ``j = 1``.
    """
    W = _W(chain)
    top = list(sets[0])
    x = top.pop(pos)
    z = x - W.c / 2
    pre = -1 / (W.h(top, [x]) * W.lam(0, z))
    per_key: dict = {}
    for j in (0, 1):
        for ((III, II),) in enumerate_bipartitions([tuple(top)], [1 if j == 1 else 0]):
            w = W.g_inv(II, [z]) * W.alpha(0, III) * W.gamma(0, II, III)
            _accumulate(per_key, _pad([II], chain.spec.n), (-1, j), pre * w)
    return _combine(chain, per_key, z, alt=True)


def _strip_row(chain: Chain, sets: tuple, m: int, pos: int = -1) -> ChainVector:
    """Remove ``x = t^{m-1}[pos]`` using ``T_{-m,j}(z)`` with ``z_{m-1} = x``, at rank ``m >= 2``."""
    W = _W(chain)
    top = list(sets[m - 1])
    x = top.pop(pos)
    z = x + W.c * (2 * m - 3) / 2
    lower = list(sets[:m - 1]) + [tuple(top)]
    pre = 1 / (W.h(top, [x]) * W.lam(-m + 1, z))
    zm2 = z_shift(z, m - 2, W.c)
    per_key: dict = {}
    for j in range(-m + 1, m + 1):
        sign = -sigma(j) if j == m else sigma(j)
        for split in enumerate_bipartitions(lower, _row_sizes(j, m)):
            III = [a for a, _ in split]
            II = [b for _, b in split]
            w = sign * W.g_inv([zm2], II[m - 2])
            for s in range(1, m):
                if _is_zero(w):
                    break
                w = w * W.h(III[s], II[s - 1]) * W.g_inv(II[s], III[s - 1])
            if _is_zero(w):
                continue
            w = w / W.h([x], II[m - 1])
            for s in range(m):
                w = w * W.gamma(s, II[s], III[s]) * W.alpha(s, III[s])
            _accumulate(per_key, _pad(II, chain.spec.n), (-m, j), pre * w)
    return _combine(chain, per_key, z, alt=True)


def _build(chain: Chain, sets: tuple, alt: bool = False) -> ChainVector:
    sets = _pad(sets, chain.spec.n)
    key = ("row" if alt else "column", sets)
    cached = chain.cache.get(key)
    if cached is not None:
        return cached
    top = max((s for s, x in enumerate(sets) if x), default=None)
    if top is None:
        vec = chain.vacuum
    elif top == 0:
        vec = _strip_row_rank_one(chain, sets) if alt else _strip_rank_one(chain, sets)
    elif alt:
        vec = _strip_row(chain, sets, top + 1)
    else:
        vec = _strip_column(chain, sets, top + 1)
    chain.cache[key] = vec
    return vec


def bethe_vector(chain, sets, alt: bool = False) -> ChainVector:
    return _build(as_chain(chain), tuple(sets), alt)


def _params(chain: Chain, t) -> BetheParams:
    if isinstance(t, BetheParams):
        return t
    return BetheParams(chain.spec.n, tuple(tuple(s) for s in t), chain.spec.c)


def build_bethe(spec, t) -> BetheVector:
    """Off-shell Bethe vector through the column recursion."""
    chain = as_chain(spec)
    p = _params(chain, t)
    return BetheVector(p, _build(chain, p.sets), chain.spec)


def build_bethe_alt(spec, t) -> BetheVector:
    """Same vector through the row recursion, using first-row entries only."""
    chain = as_chain(spec)
    p = _params(chain, t)
    return BetheVector(p, _build(chain, p.sets, alt=True), chain.spec)


def strip_variants(spec, t) -> list[ChainVector]:
    """One column-recursion step per choice of the stripped parameter in the top set."""
    chain = as_chain(spec)
    p = _params(chain, t)
    top = max((s for s, x in enumerate(p.sets) if x), default=None)
    if top is None:
        return [chain.vacuum]
    out = []
    for pos in range(len(p.sets[top])):
        if top == 0:
            out.append(_strip_rank_one(chain, p.sets, pos))
        else:
            out.append(_strip_column(chain, p.sets, top + 1, pos))
    return out


# ----------------------------------------------------------------------------
# Actions


def action_formula(spec, i: int, j: int, z, t, rank: int | None = None) -> ActionExpansion:
    """Partition-sum expansion of ``T_{i,j}(z) B(t)``.

    ``rank`` restricts to the embedded ``o(2 rank + 1)`` block (the sets
    above it must be empty); by default the full rank is used.
    """
    chain = as_chain(spec)
    p = _params(chain, t)
    n = rank or chain.spec.n
    if any(p.sets[n:]):
        raise CardinalityError(f"sets above rank {n} must be empty")
    W = _W(chain)
    c = W.c
    base = BetheParams(n, p.sets[:n], c, check=p.check)
    w = WSets(base, z)
    kappa = Q(2 * n - 1, 2)
    t0 = base.sets[0]
    pre = -sigma(i) * sigma(-j) * W.lam(n, z) * prod_pair(lambda a, b: c / (a - b), [z_shift(z, 1, c)], t0)
    pre = pre / (kappa * W.h([z], t0))
    out = ActionExpansion(chain)
    for part in enumerate_tripartitions(w, i, j):
        I, II, III = part.I, part.II, part.III
        wt = pre
        # factors that can vanish first, so that poles elsewhere are never reached
        for s in range(n):
            wt = wt * W.g_inv(I(s + 1), II(s)) * W.g_inv(I(s + 1), III(s)) * W.g_inv(II(s + 1), III(s))
            wt = wt * W.h(II(s + 1), I(s)) * W.h(III(s + 1), I(s)) * W.h(III(s + 1), II(s))
            if _is_zero(wt):
                break
        if _is_zero(wt):
            continue
        for s in range(n):
            wt = wt * W.gamma(s, I(s), II(s)) * W.gamma(s, II(s), III(s)) * W.gamma(s, I(s), III(s))
            if _is_zero(wt):
                break
        if _is_zero(wt):
            continue
        for s in range(n):
            wt = wt * W.alpha(s, III(s))
        out.add(_pad([II(s) for s in range(n)], chain.spec.n), wt)
    return out


def verify_action(spec, i: int, j: int, z, t) -> bool:
    chain = as_chain(spec)
    p = _params(chain, t)
    lhs = apply_entry(chain.spec, z, i, j, _build(chain, p.sets))
    return vectors_agree(lhs, action_formula(chain, i, j, z, p).assembled)


def o3_action(spec, i: int, j: int, z, t) -> ActionExpansion:
    """Rank-one action written directly with ``frak_f`` weights."""
    chain = as_chain(spec)
    p = _params(chain, t)
    W = _W(chain)
    z0 = z + W.c / 2
    items = tuple(p.sets[0]) + (z, z0)
    sign = (-1) ** ((i == -1) + (j == -1))
    pre = sign * W.lam(1, z) / 2
    out = ActionExpansion(chain)
    from .partitions import _split
    for I, II, III in _split(items, i + 1, 1 - j):
        wt = W.ff(I, III)
        if _is_zero(wt):
            continue
        wt = wt * W.ff(I, II) * W.ff(II, III) * W.alpha(0, III)
        wt = pre * wt / (W.h([z], III) * W.h(I, [z0]))
        out.add(_pad([II], chain.spec.n), wt)
    return out


def zero_mode_action(spec, j: int, i: int, t, h_levels: str = "upper") -> ActionExpansion:
    """Expansion of the zero mode ``T_{j,i}`` on ``B(t)`` for ``0 <= i < j <= n``.

    ``h_levels`` selects the range of the ``1/(h(II,I) h(I,II))`` product:
    ``"all"`` (levels ``0..n-1``) or ``"upper"`` (levels ``1..n-1``).
    """
    chain = as_chain(spec)
    p = _params(chain, t)
    n = chain.spec.n
    if not 0 <= i < j <= n:
        raise ValueError(f"need 0 <= i < j <= n, got i={i}, j={j}")
    W = _W(chain)
    chi = chain.spec.chi_at
    sets = list(p.sets)
    full = lambda s: sets[s] if 0 <= s < n else ()
    sizes = [1 if i <= s <= j - 1 else 0 for s in range(n)]
    out = ActionExpansion(chain)
    h_from = 0 if h_levels == "all" else 1
    for split in enumerate_bipartitions(sets, sizes):
        I = lambda s: split[s][0] if 0 <= s < n else ()
        II = lambda s: split[s][1] if 0 <= s < n else ()
        wt = Q(1)
        for s in range(1, n):
            wt = wt * W.g_inv(II(s), I(s - 1)) * W.g_inv(I(s), II(s - 1)) * W.g_inv(I(s), I(s - 1))
        if _is_zero(wt):
            continue
        for s in range(h_from, n):
            wt = wt / (W.h(II(s), I(s)) * W.h(I(s), II(s)))
        first = chi(j)
        second = chi(i)
        for s in range(i, j):
            first = first * W.alpha(s, I(s)) * W.f(I(s), full(s - 1)) * W.fs(s, II(s), I(s)) / W.h(I(s), I(s - 1))
            second = second * W.f(full(s + 1), I(s)) * W.fs(s, I(s), II(s)) / W.h(I(s + 1), I(s))
        out.add([II(s) for s in range(n)], wt * (first - second))
    return out


def simple_root_action(spec, i: int, t, level_zero_h: bool = True) -> ActionExpansion:
    """``T_{i+1,i} B(t)`` as a single sum over the removed parameter of ``t^i``.

    With ``level_zero_h=False`` the ``1/(h(t, t^i) h(t^i, t))`` factor is
    dropped at ``i = 0``; only that variant agrees with the general
    zero-mode expansion once ``#t^0 >= 2``.
    """
    chain = as_chain(spec)
    p = _params(chain, t)
    n = chain.spec.n
    W = _W(chain)
    chi = chain.spec.chi_at
    sets = list(p.sets)
    full = lambda s: sets[s] if 0 <= s < n else ()
    out = ActionExpansion(chain)
    for ell, x in enumerate(sets[i]):
        rest = sets[i][:ell] + sets[i][ell + 1:]
        bracket = chi(i + 1) * chain.alpha(i, x) - chi(i) * (
            W.fs(i, [x], rest) * W.f(full(i + 1), [x]) / (W.fs(i, rest, [x]) * W.f([x], full(i - 1))))
        wt = bracket * W.fs(i, rest, [x]) * W.g_inv(full(i + 1), [x]) * W.h([x], full(i - 1))
        if i > 0 or level_zero_h:
            wt = wt / (W.h([x], sets[i]) * W.h(sets[i], [x]))
        new = list(sets)
        new[i] = rest
        out.add(new, wt)
    return out


def corner_action(spec, z, t) -> ActionExpansion:
    """``T_{-n,n}(z) B(t)``: a single vector with every set enlarged by ``z`` and ``z_s``."""
    chain = as_chain(spec)
    p = _params(chain, t)
    n = chain.spec.n
    W = _W(chain)
    c = W.c
    w = WSets(p, z)
    kappa = Q(2 * n - 1, 2)
    t0, top = p.sets[0], p.sets[n - 1]
    coef = -kappa * prod_pair(lambda a, b: c / (a - b), [w.z_s(1)], t0) * W.h([z], top)
    coef = coef * W.g_inv([w.z_s(n)], top) / W.h([z], t0) * W.lam(n, z)
    out = ActionExpansion(chain)
    out.add([w.level(s) for s in range(n)], coef)
    return out


def zero_mode_vector(spec, i: int, j: int, vec: ChainVector) -> ChainVector:
    from .monodromy import zero_mode
    chain = as_chain(spec)
    key = ("zero-mode", i, j)
    op = chain.cache.get(key)
    if op is None:
        op = chain.cache[key] = zero_mode(chain.monodromy, i, j)
    return op @ vec


# ----------------------------------------------------------------------------
# Reduction to gl_n


def renormalized(spec, sets) -> ChainVector:
    """``prod h(t^s, t^s) / prod h(t^s, t^{s-1})`` times ``B(empty, t^1, ..)``."""
    chain = as_chain(spec)
    n = chain.spec.n
    W = _W(chain)
    sets = _pad(sets, n)
    if sets[0]:
        raise GenericityError("the reduced vector needs an empty first set")
    num = Q(1)
    for s in range(1, n):
        num = num * W.h(sets[s], sets[s])
    for s in range(2, n):
        num = num / W.h(sets[s], sets[s - 1])
    return _build(chain, sets).scale(num)


def gln_reduction_checks(spec, z, t) -> dict:
    """Check the ``T_{1,n}(z)`` and ``T_{i+1,i}`` actions on the renormalized vectors."""
    chain = as_chain(spec)
    p = _params(chain, t)
    n = chain.spec.n
    if n < 2:
        raise ValueError("the reduction needs n >= 2")
    W = _W(chain)
    chi = chain.spec.chi_at
    sets = p.sets
    vec = renormalized(chain, sets)
    lhs = apply_entry(chain.spec, z, 1, n, vec)
    grown = [()] + [tuple(sets[s]) + (z,) for s in range(1, n)]
    rhs = renormalized(chain, grown).scale(W.lam(n, z))
    report = {"creation": vectors_agree(lhs, rhs), "zero_modes": {}}
    full = lambda s: sets[s] if 1 <= s < n else ()
    for i in range(1, n):
        lhs = zero_mode_vector(chain, i + 1, i, vec)
        rhs = ChainVector(n, chain.spec.L)
        for ell, x in enumerate(sets[i]):
            rest = sets[i][:ell] + sets[i][ell + 1:]
            coef = chi(i + 1) * chain.alpha(i, x) * W.f(rest, [x]) / W.f(full(i + 1), [x])
            coef = coef - chi(i) * W.f([x], rest) / W.f([x], full(i - 1))
            new = list(sets)
            new[i] = rest
            rhs = rhs + renormalized(chain, new).scale(coef)
        report["zero_modes"][i] = vectors_agree(lhs, rhs)
    report["ok"] = report["creation"] and all(report["zero_modes"].values())
    return report
