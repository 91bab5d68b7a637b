"""Exact and floating scalars, and univariate rational functions over the rationals.

The exact scalar type ``Q`` is chosen once at import time. GMP rationals
(``gmpy2.mpq``) are used when available; ``fractions.Fraction`` is the
pure-Python fallback. Set ``ORTHOBETHE_RATIONAL=fraction`` to force the
fallback (the benchmark in ``benchmarks/`` compares both).
"""

from __future__ import annotations

import cmath
import os
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import PoleError, UnboundedError


def _select_backend() -> tuple[str, type]:
    choice = os.environ.get("ORTHOBETHE_RATIONAL", "auto").lower()
    if choice not in ("auto", "gmpy2", "fraction"):
        raise ImportError(f"ORTHOBETHE_RATIONAL must be auto, gmpy2 or fraction, got {choice!r}")
    if choice != "fraction":
        try:
            from gmpy2 import mpq
        except ImportError:
            if choice == "gmpy2":
                raise
        else:
            return "gmpy2", mpq
    return "fraction", Fraction


BACKEND, _Rational = _select_backend()

ExactScalar = _Rational
FloatScalar = complex
Scalar = Union[int, Fraction, complex, float, "ExactScalar"]


def Q(p, q=1):
    """Build an exact rational from ints, a ``"p/q"`` string or another rational."""
    if isinstance(p, float) or isinstance(q, float):
        raise TypeError("exact rationals are never built from floats")
    if isinstance(p, str):
        text = p.strip()
        if not text:
            raise ValueError("empty rational string")
        if "/" in text:
            num, den = text.split("/", 1)
            p, q = int(num), int(den) * q
        else:
            p = int(text)
    if q == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return _Rational(p) / _Rational(q) if q != 1 else _Rational(p)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, _Rational))


def format_rational(x) -> str:
    """Serialize an exact rational as ``"p/q"`` (``"p"`` when ``q == 1``)."""
    x = Q(x) if isinstance(x, int) else x
    num, den = int(x.numerator), int(x.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def to_complex(x) -> complex:
    if isinstance(x, complex):
        return x
    if is_exact(x):
        return complex(int(x.numerator) / int(x.denominator))
    return complex(x)


def check_finite(x: complex) -> complex:
    if not cmath.isfinite(x):
        raise ArithmeticError(f"non-finite float scalar {x!r}")
    return x


# ----------------------------------------------------------------------------
# Polynomials


class Polynomial:
    """Dense univariate polynomial with exact coefficients, lowest degree first.

    Instances are immutable and behave like ring scalars, so they can be used
    as the entries of sparse operators (that is how the symbolic monodromy is
    built).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if not isinstance(c, int) else Q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @classmethod
    def constant(cls, a) -> "Polynomial":
        return cls((a,))

    @classmethod
    def linear(cls, root) -> "Polynomial":
        """The monic polynomial ``u - root``."""
        return cls((-root, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def lead(self):
        return self.coeffs[-1] if self.coeffs else Q(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            other = Polynomial((other,))
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({[format_rational(c) for c in self.coeffs]})"

    def _coerce(self, other) -> "Polynomial":
        return other if isinstance(other, Polynomial) else Polynomial((other,))

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [Q(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __call__(self, u):
        if is_exact(u):
            acc = Q(0)
            for c in reversed(self.coeffs):
                acc = acc * u + c
            return acc
        u = complex(u)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * u + to_complex(c)
        return acc

    def shift(self, a) -> "Polynomial":
        """Return ``p(u + a)``."""
        out = Polynomial()
        step = Polynomial((a, 1))
        for c in reversed(self.coeffs):
            out = out * step + c
        return out

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Q(0)] * max(len(rem) - dq, 0)
        inv_lead = 1 / other.lead()
        for k in range(len(rem) - 1, dq - 1, -1):
            coef = rem[k] * inv_lead
            if coef == 0:
                continue
            quot[k - dq] = coef
            for j, y in enumerate(other.coeffs):
                rem[k - dq + j] -= coef * y
        return Polynomial(quot), Polynomial(rem[:dq] if dq > 0 else ())

    def monic(self) -> "Polynomial":
        if not self:
            return self
        inv = 1 / self.lead()
        return Polynomial(c * inv for c in self.coeffs)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor (Euclid over the rationals)."""
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic() if a else Polynomial((Q(1),))


# ----------------------------------------------------------------------------
# Rational functions


class RationalFunction:
    """Univariate rational function kept in canonical form.

    Numerator and denominator are coprime and the denominator is monic.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Polynomial) else Polynomial(num if isinstance(num, (list, tuple)) else (num,))
        if den is None:
            den = Polynomial((Q(1),))
        elif not isinstance(den, Polynomial):
            den = Polynomial(den if isinstance(den, (list, tuple)) else (den,))
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            self.num, self.den = Polynomial(), Polynomial((Q(1),))
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        inv = 1 / den.lead()
        self.num = Polynomial(c * inv for c in num.coeffs)
        self.den = Polynomial(c * inv for c in den.coeffs)

    @classmethod
    def constant(cls, a) -> "RationalFunction":
        return cls(Polynomial((a,)))

    @classmethod
    def from_roots(cls, scale, zeros: Sequence = (), poles: Sequence = ()) -> "RationalFunction":
        """``scale * prod(u - z) / prod(u - p)``."""
        num = Polynomial((scale,))
        for z in zeros:
            num = num * Polynomial.linear(z)
        den = Polynomial((Q(1),))
        for p in poles:
            den = den * Polynomial.linear(p)
        return cls(num, den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            other = RationalFunction.constant(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!r} / {self.den!r})"

    def __bool__(self) -> bool:
        return bool(self.num)

    def _coerce(self, other) -> "RationalFunction":
        return other if isinstance(other, RationalFunction) else RationalFunction.constant(other)

    def __add__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        return self._coerce(other) / self

    def __call__(self, u):
        return rf_eval(self, u)

    def shift(self, a) -> "RationalFunction":
        """Return ``f(u + a)``."""
        return RationalFunction(self.num.shift(a), self.den.shift(a))


def rf_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unsupported operation {op!r}")


def rf_eval(f: RationalFunction, u):
    den = f.den(u)
    if is_exact(den):
        if den == 0:
            raise PoleError(f"rational function has a pole at u={format_rational(u)}")
    elif abs(den) < 1e-300:
        raise PoleError(f"rational function has a pole at u={u}")
    return f.num(u) / den


def coeff_at_infinity(f: RationalFunction, k: int):
    """Coefficient of ``u**-k`` in the expansion of ``f`` around infinity."""
    if k < 0:
        raise ValueError("k must be non-negative")
    d = f.den.degree
    if f.num.degree > d:
        raise UnboundedError("rational function grows at infinity")
    # With w = 1/u, f = N~(w)/D~(w) where D~(0) = 1 because the denominator is monic.
    nrev = [f.num.coeffs[d - m] if 0 <= d - m < len(f.num.coeffs) else Q(0) for m in range(k + 1)]
    drev = [f.den.coeffs[d - m] if d - m >= 0 else Q(0) for m in range(k + 1)]
    series = []
    for m in range(k + 1):
        acc = nrev[m]
        for j in range(1, m + 1):
            acc -= drev[j] * series[m - j]
        series.append(acc)
    return series[k]
