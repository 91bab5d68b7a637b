"""Sparse operators and vectors on tensor powers of C^N, N = 2n+1.

Basis vectors of one site are labelled by integers ``-n..n``; a basis vector
of ``L`` sites is a tuple of ``L`` such labels. The canonical order of
multi-indices is plain tuple order, which is lexicographic with
``-n < -n+1 < ... < n`` in every slot.

Entries may be any ring scalar (exact rationals, complex floats, or the
polynomials used by the symbolic monodromy). Zero entries are never stored.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import MismatchError
from .scalarfield import Q, format_rational, is_exact

Index = tuple[int, ...]


def site_labels(n: int) -> range:
    return range(-n, n + 1)


def all_indices(n: int, sites: int) -> Iterator[Index]:
    return itertools.product(site_labels(n), repeat=sites)


def flat_index(idx: Index, n: int) -> int:
    out = 0
    for a in idx:
        out = out * (2 * n + 1) + (a + n)
    return out


def _check_label(n: int, a: int) -> None:
    if not -n <= a <= n:
        raise IndexError(f"site index {a} outside [-{n}, {n}]")


def _accumulate(target: dict, key, value) -> None:
    new = target.get(key, 0) + value
    if new:
        target[key] = new
    else:
        target.pop(key, None)


class ChainVector:
    """Sparse vector on ``sites`` copies of C^(2n+1)."""

    __slots__ = ("n", "sites", "entries", "__weakref__")

    def __init__(self, n: int, sites: int, entries: Mapping[Index, object] | None = None):
        self.n = n
        self.sites = sites
        self.entries: dict[Index, object] = {k: v for k, v in (entries or {}).items() if v}

    @classmethod
    def basis(cls, n: int, idx: Iterable[int]) -> "ChainVector":
        idx = tuple(idx)
        for a in idx:
            _check_label(n, a)
        return cls(n, len(idx), {idx: Q(1)})

    @classmethod
    def zero(cls, n: int, sites: int) -> "ChainVector":
        return cls(n, sites)

    def _check(self, other: "ChainVector") -> None:
        if (self.n, self.sites) != (other.n, other.sites):
            raise MismatchError(f"vectors on ({self.n},{self.sites}) and ({other.n},{other.sites})")

    def __add__(self, other: "ChainVector") -> "ChainVector":
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            _accumulate(out, k, v)
        return ChainVector(self.n, self.sites, out)

    def __sub__(self, other: "ChainVector") -> "ChainVector":
        return self + other.scale(-1)

    def __neg__(self) -> "ChainVector":
        return self.scale(-1)

    def scale(self, alpha) -> "ChainVector":
        if not alpha:
            return ChainVector(self.n, self.sites)
        return ChainVector(self.n, self.sites, {k: alpha * v for k, v in self.entries.items()})

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainVector):
            return NotImplemented
        return (self.n, self.sites) == (other.n, other.sites) and self.entries == other.entries

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __repr__(self) -> str:
        return f"ChainVector(n={self.n}, sites={self.sites}, nnz={len(self.entries)})"

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(complex(v)) ** 2 if not is_exact(v) else float(v) ** 2
                                 for v in self.entries.values())))

    def to_dense(self, dtype=complex) -> np.ndarray:
        out = np.zeros((2 * self.n + 1) ** self.sites, dtype=dtype)
        for k, v in self.entries.items():
            out[flat_index(k, self.n)] = v if dtype is object else complex(v)
        return out

    def sorted_items(self) -> list[tuple[Index, object]]:
        return sorted(self.entries.items())

    def to_records(self) -> list[dict]:
        return [{"index": list(k), "value": _serialize(v)} for k, v in self.sorted_items()]

    @classmethod
    def from_records(cls, n: int, sites: int, records: list[dict]) -> "ChainVector":
        return cls(n, sites, {tuple(r["index"]): _deserialize(r["value"]) for r in records})


class ChainOperator:
    """Sparse linear operator on ``sites`` copies of C^(2n+1)."""

    __slots__ = ("n", "sites", "entries", "__dict__")

    def __init__(self, n: int, sites: int, entries: Mapping[tuple[Index, Index], object] | None = None):
        self.n = n
        self.sites = sites
        self.entries: dict[tuple[Index, Index], object] = {
            k: v for k, v in (entries or {}).items() if v
        }

    @cached_property
    def _by_column(self) -> dict[Index, list[tuple[Index, object]]]:
        cols: dict[Index, list] = {}
        for (r, c), a in self.entries.items():
            cols.setdefault(c, []).append((r, a))
        return cols

    def _check(self, other) -> None:
        if other.n != self.n:
            raise MismatchError(f"rank mismatch: n={self.n} vs n={other.n}")
        if other.sites != self.sites:
            raise MismatchError(f"site mismatch: L={self.sites} vs L={other.sites}")

    def __add__(self, other: "ChainOperator") -> "ChainOperator":
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            _accumulate(out, k, v)
        return ChainOperator(self.n, self.sites, out)

    def __sub__(self, other: "ChainOperator") -> "ChainOperator":
        return self + other.scale(-1)

    def __neg__(self) -> "ChainOperator":
        return self.scale(-1)

    def scale(self, alpha) -> "ChainOperator":
        if not alpha:
            return ChainOperator(self.n, self.sites)
        return ChainOperator(self.n, self.sites, {k: alpha * v for k, v in self.entries.items()})

    __rmul__ = scale

    def __matmul__(self, other):
        if isinstance(other, ChainVector):
            return apply(self, other)
        return compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainOperator):
            return NotImplemented
        return (self.n, self.sites) == (other.n, other.sites) and self.entries == other.entries

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __repr__(self) -> str:
        return f"ChainOperator(n={self.n}, sites={self.sites}, nnz={len(self.entries)})"

    def map_entries(self, fn) -> "ChainOperator":
        return ChainOperator(self.n, self.sites, {k: fn(v) for k, v in self.entries.items()})

    def to_dense(self, dtype=complex) -> np.ndarray:
        dim = (2 * self.n + 1) ** self.sites
        out = np.zeros((dim, dim), dtype=dtype)
        if dtype is object:
            out[:] = 0
        for (r, c), v in self.entries.items():
            out[flat_index(r, self.n), flat_index(c, self.n)] = v if dtype is object else complex(v)
        return out

    def to_records(self) -> list[dict]:
        return [
            {"index": [list(r), list(c)], "value": _serialize(v)}
            for (r, c), v in sorted(self.entries.items())
        ]

    @classmethod
    def from_records(cls, n: int, sites: int, records: list[dict]) -> "ChainOperator":
        return cls(n, sites, {
            (tuple(rec["index"][0]), tuple(rec["index"][1])): _deserialize(rec["value"])
            for rec in records
        })


def _serialize(v):
    if is_exact(v):
        return format_rational(v)
    v = complex(v)
    return [v.real, v.imag]


def _deserialize(v):
    if isinstance(v, str):
        return Q(v)
    return complex(v[0], v[1])


def identity(n: int, sites: int) -> ChainOperator:
    one = Q(1)
    return ChainOperator(n, sites, {(k, k): one for k in all_indices(n, sites)})


def matrix_unit(n: int, i: int, j: int) -> ChainOperator:
    """The single-site matrix unit ``e_{i,j}``."""
    _check_label(n, i)
    _check_label(n, j)
    return ChainOperator(n, 1, {((i,), (j,)): Q(1)})


def build_P(n: int) -> ChainOperator:
    """Permutation of two sites, ``sum e_{i,j} (x) e_{j,i}``."""
    one = Q(1)
    return ChainOperator(n, 2, {((i, j), (j, i)): one for i in site_labels(n) for j in site_labels(n)})


def build_Q(n: int) -> ChainOperator:
    """``sum e_{i,j} (x) e_{-i,-j}``; rank one, onto ``sum_k e_k (x) e_-k``."""
    one = Q(1)
    return ChainOperator(n, 2, {((i, -i), (j, -j)): one for i in site_labels(n) for j in site_labels(n)})


def kron(a: ChainOperator, b: ChainOperator) -> ChainOperator:
    if a.n != b.n:
        raise MismatchError(f"kron of operators with n={a.n} and n={b.n}")
    out = {}
    for (ra, ca), x in a.entries.items():
        for (rb, cb), y in b.entries.items():
            out[(ra + rb, ca + cb)] = x * y
    return ChainOperator(a.n, a.sites + b.sites, out)


def kron_vectors(a: ChainVector, b: ChainVector) -> ChainVector:
    if a.n != b.n:
        raise MismatchError(f"kron of vectors with n={a.n} and n={b.n}")
    return ChainVector(a.n, a.sites + b.sites, {
        ka + kb: x * y for ka, x in a.entries.items() for kb, y in b.entries.items()
    })


def on_sites(op: ChainOperator, positions: tuple[int, ...], sites: int) -> ChainOperator:
    """Embed ``op`` so that its k-th factor acts on site ``positions[k]`` of a ``sites``-site chain."""
    if len(positions) != op.sites or len(set(positions)) != len(positions):
        raise MismatchError(f"positions {positions} do not match a {op.sites}-site operator")
    rest = [p for p in range(sites) if p not in positions]
    out = {}
    for spectator in all_indices(op.n, len(rest)):
        for (r, c), v in op.entries.items():
            row = [0] * sites
            col = [0] * sites
            for p, a, b in zip(positions, r, c):
                row[p], col[p] = a, b
            for p, s in zip(rest, spectator):
                row[p] = col[p] = s
            out[(tuple(row), tuple(col))] = v
    return ChainOperator(op.n, sites, out)


def apply(a: ChainOperator, v: ChainVector) -> ChainVector:
    if (a.n, a.sites) != (v.n, v.sites):
        raise MismatchError(f"operator on ({a.n},{a.sites}) applied to vector on ({v.n},{v.sites})")
    cols = a._by_column
    out: dict = {}
    for c, x in v.entries.items():
        for r, y in cols.get(c, ()):
            _accumulate(out, r, y * x)
    return ChainVector(v.n, v.sites, out)


def compose(a: ChainOperator, b: ChainOperator) -> ChainOperator:
    """The product ``a @ b`` (``b`` acts first)."""
    a._check(b)
    cols = a._by_column
    out: dict = {}
    for (m, c), y in b.entries.items():
        for r, x in cols.get(m, ()):
            _accumulate(out, (r, c), x * y)
    return ChainOperator(a.n, a.sites, out)


def commutator(a: ChainOperator, b: ChainOperator) -> ChainOperator:
    return compose(a, b) - compose(b, a)
