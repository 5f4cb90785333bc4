"""Data types describing a warped-product candidate metric

    g = Psi(xi)^-2 g_Euc + f(xi)^2 g_F,   xi = <alpha_bar, x>,

on R^n x F^m, together with the structure constants of the Einstein-type
equation  alpha Ric + beta Hess h + mu dh (x) dh = (rho R + lambda) g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BadCoefficients, InvalidParameters, OutOfDomain
from .profiles import Profile, constant

CHARTS = ("euclidean", "sphere", "hyperbolic", "none")


@dataclass(frozen=True)
class Params:
    """Structure constants (alpha, beta, mu, rho)."""

    alpha: float
    beta: float
    mu: float
    rho: float

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.mu, self.rho)
        if not all(isinstance(v, (int, float, np.floating, np.integer)) for v in vals):
            raise InvalidParameters("structure constants must be real numbers")
        if not all(math.isfinite(float(v)) for v in vals):
            raise InvalidParameters("structure constants must be finite")
        for name in ("alpha", "beta", "mu", "rho"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.alpha == 0 and self.beta == 0 and self.mu == 0:
            raise InvalidParameters("(alpha, beta, mu) must not all vanish")

    def scaled(self, t: float) -> "Params":
        return Params(t * self.alpha, t * self.beta, t * self.mu, t * self.rho)

    def astuple(self):
        return (self.alpha, self.beta, self.mu, self.rho)

    def require_beta(self):
        if self.beta == 0:
            raise InvalidParameters("this pipeline needs beta != 0")


@dataclass(frozen=True)
class BaseAnsatz:
    """Conformally flat base ``Psi(xi)^-2 g_Euc`` on R^n; only ``|alpha_bar|^2`` is kept."""

    n: int
    alpha_bar_norm_sq: float
    psi: Profile

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameters("base dimension n must be an integer >= 2")
        object.__setattr__(self, "n", int(self.n))
        if not (self.alpha_bar_norm_sq > 0 and math.isfinite(self.alpha_bar_norm_sq)):
            raise InvalidParameters("|alpha_bar|^2 must be positive")
        object.__setattr__(self, "alpha_bar_norm_sq", float(self.alpha_bar_norm_sq))

    @property
    def a(self) -> float:
        return self.alpha_bar_norm_sq

    def alpha_bar(self) -> np.ndarray:
        """A concrete vector with the stored norm, ``(0, ..., 0, sqrt(a))``."""
        v = np.zeros(self.n)
        v[-1] = math.sqrt(self.a)
        return v

    @property
    def is_euclidean(self) -> bool:
        p = self.psi
        return getattr(p, "kind", None) == "constant" and p.coeffs[0] == 1.0


@dataclass(frozen=True)
class FiberData:
    """Einstein fiber ``Ric_F = theta g_F`` of dimension m.

    The chart, when given, is the conformally flat model
    ``g_F = |dy|^2 / (1 + kappa |y|^2 / 4)^2`` with ``kappa = theta/(m-1)``,
    so that its Ricci tensor is exactly ``theta g_F``.
    """

    m: int
    theta: float = 0.0
    chart: str = "euclidean"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameters("fiber dimension m must be an integer >= 1")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "theta", float(self.theta))
        if self.chart not in CHARTS:
            raise InvalidParameters(f"chart must be one of {CHARTS}")
        if self.m == 1 and self.theta != 0:
            raise InvalidParameters("a one-dimensional fiber is flat: theta must be 0")
        if self.chart == "euclidean" and self.theta != 0:
            raise InvalidParameters("euclidean chart needs theta = 0")
        if self.chart == "sphere" and not self.theta > 0:
            raise InvalidParameters("sphere chart needs theta > 0")
        if self.chart == "hyperbolic" and not self.theta < 0:
            raise InvalidParameters("hyperbolic chart needs theta < 0")

    @property
    def scalar(self) -> float:
        """Fiber scalar curvature ``m * theta``."""
        return self.m * self.theta

    @property
    def kappa(self) -> float:
        return 0.0 if self.m == 1 else self.theta / (self.m - 1)

    def chart_radius(self) -> float:
        return 2.0 / math.sqrt(-self.kappa) if self.kappa < 0 else math.inf

    def metric(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        r2 = float(y @ y)
        if self.kappa < 0 and r2 >= self.chart_radius() ** 2:
            raise OutOfDomain("point outside the hyperbolic ball chart")
        return np.eye(self.m) / (1.0 + 0.25 * self.kappa * r2) ** 2


@dataclass(frozen=True)
class WarpedAnsatz:
    """Complete candidate: base, fiber, warping f, potential h, soliton function lam."""

    base: BaseAnsatz
    fiber: FiberData
    f: Profile
    h: Profile
    lam: Profile
    params: Params
    name: str = field(default="", compare=False)

    def __post_init__(self):
        lo = max(p.domain[0] for p in self.profiles())
        hi = min(p.domain[1] for p in self.profiles())
        if not lo < hi:
            raise BadCoefficients("profile domains have empty intersection")

    def profiles(self):
        return (self.base.psi, self.f, self.h, self.lam)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.fiber.m

    @property
    def d(self) -> int:
        return self.base.n + self.fiber.m

    @property
    def domain(self) -> tuple[float, float]:
        return (
            max(p.domain[0] for p in self.profiles()),
            min(p.domain[1] for p in self.profiles()),
        )

    def contains(self, xi) -> bool:
        return all(p.contains(xi) for p in self.profiles())

    def replace(self, **kw) -> "WarpedAnsatz":
        return replace(self, **kw)

    def shifted_lambda(self, c: float) -> "WarpedAnsatz":
        return replace(self, lam=self.lam + constant(c))
