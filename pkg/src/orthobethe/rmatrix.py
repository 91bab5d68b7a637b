"""The o(2n+1)-invariant rational R-matrix and its defining identities."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PoleError
from .linop import ChainOperator, build_P, build_Q, compose, identity, on_sites
from .scalarfield import Q, is_exact


@dataclass(frozen=True)
class ModelParams:
    n: int
    c: object = field(default_factory=lambda: Q(1))

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.c:
            raise ValueError("c must be nonzero")

    @property
    def N(self) -> int:
        return 2 * self.n + 1

    @property
    def kappa(self):
        return Q(2 * self.n - 1, 2)

    @property
    def c_kappa(self):
        """``c * kappa`` in the scalar type of ``c``."""
        return self.c * (2 * self.n - 1) / 2


def _nonzero(x, what: str) -> None:
    if (is_exact(x) and x == 0) or (not is_exact(x) and abs(x) < 1e-12):
        raise PoleError(what)


def build_r(p: ModelParams, u, v) -> ChainOperator:
    """``R(u,v) = I + c P/(u-v) - c Q/(u-v+c kappa)`` on two sites."""
    _nonzero(u - v, "R(u,v) has a pole at u = v")
    _nonzero(u - v + p.c_kappa, "R(u,v) has a pole at u - v = -c kappa")
    a = p.c / (u - v)
    b = -p.c / (u - v + p.c_kappa)
    return identity(p.n, 2) + build_P(p.n).scale(a) + build_Q(p.n).scale(b)


def check_yang_baxter(p: ModelParams, u1, u2, u3) -> bool:
    r12 = on_sites(build_r(p, u1, u2), (0, 1), 3)
    r13 = on_sites(build_r(p, u1, u3), (0, 2), 3)
    r23 = on_sites(build_r(p, u2, u3), (1, 2), 3)
    lhs = compose(compose(r12, r13), r23)
    rhs = compose(compose(r23, r13), r12)
    return lhs == rhs


def check_unitarity(p: ModelParams, u, v) -> bool:
    prod = compose(build_r(p, u, v), build_r(p, v, u))
    scal = 1 - p.c * p.c / ((u - v) * (u - v))
    return prod == identity(p.n, 2).scale(scal)
