"""Weight functions, set products and the constrained tripartition enumerator.

All two-point weights take the spectral parameters first and ``c`` last.
Division by ``g`` is always written as multiplication by
``(u - v)/c`` (see :func:`inv_g`) so that coinciding points give an exact
zero instead of a pole.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .errors import CardinalityError, GenericityError, PoleError
from .scalarfield import Q, is_exact


def _is_zero(x) -> bool:
    return x == 0 if is_exact(x) else abs(x) < 1e-12


def _pole(x, what: str) -> None:
    if _is_zero(x):
        raise PoleError(what)


def theta(p: int) -> int:
    return 1 if p >= 0 else 0


def sigma(i: int) -> int:
    return 2 * theta(i - 1) - 1


def z_shift(z, s: int, c):
    """``z_s = z - c(s - 1/2)``."""
    return z - c * (2 * s - 1) / 2


def g(u, v, c):
    _pole(u - v, f"g({u}, {v}) has a pole")
    return c / (u - v)


def inv_g(u, v, c):
    """``1/g(u, v)``, regular everywhere."""
    return (u - v) / c


def f(u, v, c):
    _pole(u - v, f"f({u}, {v}) has a pole")
    return (u - v + c) / (u - v)


def h(u, v, c):
    return (u - v + c) / c


def frak_f(u, v, c):
    _pole(u - v, f"frak_f({u}, {v}) has a pole")
    return (u - v + c / 2) / (u - v)


def f_s(s: int, u, v, c):
    return frak_f(u, v, c) if s == 0 else f(u, v, c)


def gamma_s(s: int, u, v, c):
    if s == 0:
        return frak_f(u, v, c)
    _pole(u - v, f"gamma_{s}({u}, {v}) has a pole")
    _pole(v - u + c, f"gamma_{s}({u}, {v}) has a pole")
    return c * c / ((u - v) * (v - u + c))


def prod_pair(fn: Callable, A: Iterable, B: Iterable, one=None):
    """``prod_{a in A} prod_{b in B} fn(a, b)``; empty products give ``one``."""
    acc = Q(1) if one is None else one
    B = tuple(B)
    for a in A:
        for b in B:
            try:
                acc = acc * fn(a, b)
            except PoleError as err:
                raise PoleError(f"pole at pair ({a}, {b}): {err}") from None
            if _is_zero(acc) and is_exact(acc):
                return acc
    return acc


def sort_key(x):
    if is_exact(x):
        return (x, 0)
    x = complex(x)
    return (x.real, x.imag)


def canonical(sets: Iterable[Iterable]) -> tuple[tuple, ...]:
    return tuple(tuple(sorted(s, key=sort_key)) for s in sets)


# ----------------------------------------------------------------------------
# Parameter sets


def _check_generic(points: Sequence, c, exempt: set[tuple[int, int]] = frozenset()) -> None:
    forbidden = (0, c, -c, c / 2, -c / 2)
    for a, b in itertools.combinations(range(len(points)), 2):
        if (a, b) in exempt:
            continue
        d = points[a] - points[b]
        if any(_is_zero(d - x) for x in forbidden):
            raise GenericityError(f"parameters {points[a]} and {points[b]} differ by a forbidden amount")


@dataclass(frozen=True)
class BetheParams:
    """Bethe parameters ``t^0..t^{n-1}`` as a tuple of tuples.

    The given order inside each set is kept (it fixes the order in which the
    recursion strips parameters); :attr:`key` is the order-free form.
    """

    n: int
    sets: tuple
    c: object = field(default_factory=lambda: Q(1))
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        sets = tuple(tuple(s) for s in self.sets)
        if len(sets) > self.n:
            raise GenericityError(f"{len(sets)} parameter sets given for rank {self.n}")
        sets = sets + ((),) * (self.n - len(sets))
        object.__setattr__(self, "sets", sets)
        if self.check:
            for s in self.sets:
                for a, b in itertools.combinations(s, 2):
                    if _is_zero(a - b):
                        raise GenericityError(f"repeated Bethe parameter {a}")
            _check_generic([x for s in self.sets for x in s], self.c)

    @property
    def key(self) -> tuple[tuple, ...]:
        return canonical(self.sets)

    @property
    def r(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sets)

    def is_empty(self) -> bool:
        return not any(self.sets)

    def replace(self, level: int, new: Iterable) -> "BetheParams":
        sets = list(self.sets)
        sets[level] = tuple(new)
        return BetheParams(self.n, tuple(sets), self.c, check=False)

    def to_json(self) -> list:
        from .scalarfield import format_rational
        return [[format_rational(x) if is_exact(x) else [complex(x).real, complex(x).imag] for x in s]
                for s in self.sets]


@dataclass(frozen=True)
class WSets:
    """``w^s = t^s + {z, z_s}`` for ``s < n`` and ``w^n = {z, z_n}``."""

    base: BetheParams
    z: object

    def __post_init__(self):
        if self.base.check:
            c = self.base.c
            shifts = [self.z] + [z_shift(self.z, s, c) for s in range(self.base.n + 1)]
            pts = list(shifts) + [x for s in self.base.sets for x in s]
            k = len(shifts)
            exempt = {(a, b) for a in range(k) for b in range(a + 1, k)}
            _check_generic(pts, c, exempt)

    @property
    def n(self) -> int:
        return self.base.n

    def z_s(self, s: int):
        return z_shift(self.z, s, self.base.c)

    def level(self, s: int) -> tuple:
        if s == self.n:
            return (self.z, self.z_s(s))
        return tuple(self.base.sets[s]) + (self.z, self.z_s(s))


@dataclass(frozen=True)
class TriPartition:
    parts: tuple  # per level s = 0..n: (I, II, III)

    def I(self, s):
        return self.parts[s][0]

    def II(self, s):
        return self.parts[s][1]

    def III(self, s):
        return self.parts[s][2]


def tripartition_sizes(n: int, i: int, j: int) -> list[tuple[int, int]]:
    """``(#I_s, #III_s)`` for ``s = 0..n``."""
    return [(theta(i + s) + theta(i - s - 1), theta(s - j) + theta(-j - s - 1)) for s in range(n + 1)]


def _split(items: tuple, k1: int, k3: int) -> Iterator[tuple[tuple, tuple, tuple]]:
    idx = range(len(items))
    for a in itertools.combinations(idx, k1):
        rest = [x for x in idx if x not in a]
        for b in itertools.combinations(rest, k3):
            mid = tuple(items[x] for x in rest if x not in b)
            yield tuple(items[x] for x in a), mid, tuple(items[x] for x in b)


def enumerate_tripartitions(w: WSets, i: int, j: int) -> Iterator[TriPartition]:
    n = w.n
    if abs(i) > n or abs(j) > n:
        raise IndexError(f"indices ({i}, {j}) outside [-{n}, {n}]")
    per_level = []
    for s, (k1, k3) in enumerate(tripartition_sizes(n, i, j)):
        items = w.level(s)
        if k1 > len(items) or k3 > len(items):
            raise CardinalityError(f"level {s} needs {k1}/{k3} elements out of {len(items)}")
        per_level.append(list(_split(items, k1, k3)))
    for parts in itertools.product(*per_level):
        yield TriPartition(tuple(parts))


def enumerate_bipartitions(sets: Sequence[tuple], sizes: Sequence[int]) -> Iterator[tuple[tuple[tuple, tuple], ...]]:
    """Split each ``sets[s]`` into ``(I, II)`` with ``#I = sizes[s]``; nothing if a size is too large."""
    per_level = []
    for items, k in zip(sets, sizes):
        if k > len(items):
            return
        per_level.append([(a, b) for a, b, _ in _split(tuple(items), k, 0)])
    yield from itertools.product(*per_level)
