"""Built-in closed-form examples, parametrised by dimensions and constants.

Every builder returns a :class:`CatalogEntry` whose ansatz satisfies the
reduced system exactly (up to rounding) unless ``negative_control`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .ansatz import BaseAnsatz, FiberData, Params, WarpedAnsatz
from .errors import UnknownId
from .profiles import Builtin, Composite, compose, constant, log_affine, power_of, scaled
from .system import Grid, classify_degeneracy

INF = math.inf


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    ansatz: WarpedAnsatz
    grid: Grid
    provenance: str
    completeness_note: str
    complete: bool
    expected_verdict: str = "pass"
    negative_control: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def expected_degeneracy(self):
        return classify_degeneracy(self.ansatz.params, self.ansatz.d)


def _log_cosh(c: float):
    """``c * ln cosh(xi)``."""
    return compose(log_affine(0.0, (c, 1.0, 0.0)), Builtin("cosh", (1.0, 1.0)))


def _sech4_times(c0: float, c1: float):
    """``sech(xi)^4 * (c0 + c1 cosh(2 xi))``."""
    sech4 = power_of(Builtin("sech", (1.0, 1.0)), 4)
    return Composite("product", (sech4, constant(c0) + scaled(Builtin("cosh", (1.0, 2.0)), c1)))


def ex1(n: int = 3, m: int = 2) -> CatalogEntry:
    """Flat base, exponential warping, linear potential, lambda = -m^2 - m."""
    p = Params(1.0, math.sqrt(m), 1.0, -1.0)
    a = WarpedAnsatz(
        base=BaseAnsatz(n, 1.0, constant(1.0)),
        fiber=FiberData(m, 0.0, "euclidean"),
        f=Builtin("exp", (1.0, 1.0)),
        h=Builtin("linear", (0.0, math.sqrt(m))),
        lam=constant(-m * m - m),
        params=p,
        name="ex1",
    )
    return CatalogEntry("ex1", a, Grid(-2.0, 2.0, 401),
                        "flat base, f = e^xi, h = sqrt(m) xi, Ricci-flat fiber",
                        "complete: complete base and fiber", True)


def ex1_tanh(n: int = 3, m: int = 2) -> CatalogEntry:
    """The other Riccati branch of ex1: h' = sqrt(m) tanh(xi). Not a solution."""
    e = ex1(n, m)
    a = e.ansatz.replace(h=_log_cosh(math.sqrt(m)), name="ex1-tanh")
    return CatalogEntry("ex1-tanh", a, Grid(-2.0, 2.0, 401),
                        "ex1 data with the tanh branch of the potential ODE",
                        "not a solution: the fiber equation fails", False,
                        expected_verdict="fail", negative_control=True)


def ex2(n: int = 3, m: int = 2, alpha: float = 1.5, rho: float = 0.25) -> CatalogEntry:
    """Hyperbolic half space, f = 1/x, h = ln(x+1) - ln(x)."""
    d = n + m
    lam = constant(-alpha * (d - 1) + rho * d * (d - 1)) + Builtin("power", (1.0, -1.0, -1.0), (0.0, INF))
    a = WarpedAnsatz(
        base=BaseAnsatz(n, 1.0, Builtin("linear", (0.0, 1.0), (0.0, INF))),
        fiber=FiberData(m, 0.0, "euclidean"),
        f=Builtin("power", (1.0, -1.0), (0.0, INF)),
        h=log_affine(0.0, (1.0, 1.0, 1.0), (-1.0, 1.0, 0.0)),
        lam=lam,
        params=Params(alpha, 1.0, 1.0, rho),
        name="ex2",
    )
    return CatalogEntry("ex2", a, Grid(0.1, 10.0, 401),
                        "hyperbolic base x^-2 g_Euc, f = 1/x, Ricci-flat fiber",
                        "complete: complete base and fiber", True)


def ex4(n: int = 3, m: int = 2, alpha: float = 1.0, beta: float = 2.0, rho: float = 0.1) -> CatalogEntry:
    """coth^2 conformal half space, mu = 0 (nondegenerate)."""
    d = n + m
    c0 = -2.0 * alpha * (d - 2) / 3.0 + rho * (d - 1) * (d - 2)
    c1 = -alpha * (d + 1) / 3.0 + 2.0 * rho * (d - 1)
    a = WarpedAnsatz(
        base=BaseAnsatz(n, 1.0, Builtin("tanh", (1.0, 1.0), (0.0, INF))),
        fiber=FiberData(m, 0.0, "euclidean"),
        f=Builtin("coth", (1.0, 1.0)),
        h=_log_cosh(2.0 * alpha * (d - 2) / (3.0 * beta)),
        lam=_sech4_times(c0, c1),
        params=Params(alpha, beta, 0.0, rho),
        name="ex4",
    )
    return CatalogEntry("ex4", a, Grid(0.1, 5.0, 401),
                        "base coth^2(x) g_Euc on the half space, f = coth, Ricci-flat fiber",
                        "complete: divergent-curve argument", True)


def ex5(n: int = 3, m: int = 2, alpha: float = 1.0, beta: float = 1.0, rho: float = 0.2) -> CatalogEntry:
    """cosh^2 conformal base, mu = beta^2 / (alpha (d-2)) (degenerate)."""
    d = n + m
    c0 = 0.5 * rho * (d - 1) * (4 - (d - 2)) - alpha
    c1 = 0.5 * rho * (d - 1) * (d - 2)
    a = WarpedAnsatz(
        base=BaseAnsatz(n, 1.0, Builtin("sech", (1.0, 1.0))),
        fiber=FiberData(m, 0.0, "euclidean"),
        f=Builtin("cosh", (1.0, 1.0)),
        h=_log_cosh(alpha * (d - 2) / beta),
        lam=_sech4_times(c0, c1),
        params=Params(alpha, beta, beta**2 / (alpha * (d - 2)), rho),
        name="ex5",
    )
    return CatalogEntry("ex5", a, Grid(-3.0, 3.0, 401),
                        "base cosh^2(x) g_Euc, f = cosh, Ricci-flat fiber",
                        "complete: dominates the Euclidean distance", True)


def incomplete1(n: int = 2, m: int = 3) -> CatalogEntry:
    """Half space xi > 0, f = xi, h = -ln xi, Einstein fiber with theta = m - 2."""
    if m <= 2:
        raise ValueError("incomplete1 needs m > 2")
    a = WarpedAnsatz(
        base=BaseAnsatz(n, 1.0, constant(1.0)),
        fiber=FiberData(m, float(m - 2), "sphere"),
        f=Builtin("linear", (0.0, 1.0), (0.0, INF)),
        h=log_affine(0.0, (-1.0, 1.0, 0.0)),
        lam=constant(0.0),
        params=Params(1.0, -1.0, 1.0, 0.0),
        name="incomplete1",
    )
    return CatalogEntry("incomplete1", a, Grid(0.1, 10.0, 401),
                        "flat half space xi > 0, f = xi, h = -ln xi, Ric_F = (m-2) g_F",
                        "incomplete: divergent curve of finite length", False)


def exp2xi(n: int = 3, m: int = 2) -> CatalogEntry:
    """Base e^{2 xi} g_Euc, f = e^xi, steady-type parameters (1, 1, 0, 0)."""
    d = n + m
    a = WarpedAnsatz(
        base=BaseAnsatz(n, 1.0, Builtin("exp", (1.0, -1.0))),
        fiber=FiberData(m, 0.0, "euclidean"),
        f=Builtin("exp", (1.0, 1.0)),
        h=Builtin("linear", (0.0, -(2.0 - d) / 2.0)),
        lam=Builtin("exp", ((2.0 - d) / 2.0, -2.0)),
        params=Params(1.0, 1.0, 0.0, 0.0),
        name="exp2xi",
    )
    return CatalogEntry("exp2xi", a, Grid(-2.0, 2.0, 401),
                        "base e^{2 xi} g_Euc, f = e^xi, h linear, Ricci-flat fiber",
                        "incomplete: same argument as incomplete1", False)


def flat(n: int = 3, m: int = 2) -> CatalogEntry:
    """Standard flat product with constant potential."""
    a = WarpedAnsatz(
        base=BaseAnsatz(n, 1.0, constant(1.0)),
        fiber=FiberData(m, 0.0, "euclidean"),
        f=constant(1.0),
        h=constant(0.0),
        lam=constant(0.0),
        params=Params(1.0, 1.0, 0.0, 0.0),
        name="flat",
    )
    return CatalogEntry("flat", a, Grid(-1.0, 1.0, 401), "R^n x R^m with the product metric",
                        "complete", True)


BUILDERS: dict[str, Callable[..., CatalogEntry]] = {
    "ex1": ex1,
    "ex2": ex2,
    "ex4": ex4,
    "ex5": ex5,
    "incomplete1": incomplete1,
    "exp2xi": exp2xi,
    "flat": flat,
    "ex1-tanh": ex1_tanh,
}

PAPER_EXAMPLES = ("ex1", "ex2", "ex4", "ex5")


def get(entry_id: str, **kw) -> CatalogEntry:
    try:
        builder = BUILDERS[entry_id]
    except KeyError:
        raise UnknownId(f"unknown catalog id {entry_id!r}; known: {sorted(BUILDERS)}") from None
    return builder(**kw)


def ids() -> list[str]:
    return list(BUILDERS)
