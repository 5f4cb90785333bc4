"""Residuals of the reduced Einstein-type system and their aggregation.

For the ansatz ``g = Psi^-2 g_Euc + f^2 g_F`` with base-dependent potential
h and soliton function lam, the tensor equation

    alpha Ric + beta Hess h + mu dh (x) dh = (rho R + lam) g

reduces to three ODEs in xi (``residual_ode1`` .. ``residual_ode3``). This
module evaluates them, the implied fiber constant, the differential identity
satisfied by every solution with beta != 0, and a brute-force check of the
tensor equation on an explicit coordinate chart.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .ansatz import Params, WarpedAnsatz
from .errors import ChartUnavailable, DegenerateCoefficient, InvalidParameters, OutOfDomain
from .geometry import (
    conformal_laplacian,
    conformal_scalar,
    grad_inner,
    grad_norm_sq,
    psi_jet,
    warp_jet,
    warped_scalar,
)
from .profiles import fd_weights
from .tensor_fd import MetricFD

__all__ = [
    "Params", "WarpedAnsatz", "ResidualReport", "Grid", "Degeneracy",
    "residual_ode1", "residual_ode2", "residual_ode3", "theorem1b_theta",
    "theta_bracket", "lemma2_residual", "classify_degeneracy",
    "full_tensor_residual", "warped_metric", "verify",
]

DEFAULT_TOL = 1e-9
LEMMA2_TOL = 1e-6
FULL_TENSOR_TOL = 1e-4


class Degeneracy(str, Enum):
    DEGENERATE = "Degenerate"
    NONDEGENERATE = "Nondegenerate"
    BETA_ZERO = "BetaZero"


def classify_degeneracy(p: Params, d: int) -> Degeneracy:
    """Compare beta^2 with (d-2) alpha mu, relative tolerance 1e-12."""
    if p.beta == 0:
        return Degeneracy.BETA_ZERO
    lhs, rhs = p.beta**2, (d - 2) * p.alpha * p.mu
    if abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs)):
        return Degeneracy.DEGENERATE
    return Degeneracy.NONDEGENERATE


def _jets(a: WarpedAnsatz, xi):
    P = psi_jet(a.base, xi)
    F = warp_jet(a.f, xi)
    H = a.h.jet(xi)
    return P, F, H


def normalized_scalar(a: WarpedAnsatz, xi, fiber_in_scalar: bool = True):
    """Scalar curvature of g divided by |alpha_bar|^2."""
    return warped_scalar(a, xi, include_fiber=fiber_in_scalar) / a.base.a


def residual_ode1(a: WarpedAnsatz, xi):
    """Trace-free part along alpha_bar (coefficient of alpha_i alpha_j)."""
    P, F, H = _jets(a, xi)
    al, be, mu, _ = a.params.astuple()
    n, m = a.n, a.m
    psi, dpsi, d2psi = P.astuple()
    f, df, d2f = F.astuple()
    _, dh, d2h = H.astuple()
    return (
        al * (n - 2) * d2psi / psi
        - al * m * d2f / f
        - 2.0 * al * m * (df / f) * (dpsi / psi)
        + be * d2h
        + 2.0 * be * (dpsi / psi) * dh
        + mu * dh**2
    )


def residual_ode2(a: WarpedAnsatz, xi, fiber_in_scalar: bool = True):
    """Isotropic base part, divided by |alpha_bar|^2 Psi^-2."""
    P, F, H = _jets(a, xi)
    al, be, _, rho = a.params.astuple()
    n, m = a.n, a.m
    psi, dpsi, d2psi = P.astuple()
    f, df, _ = F.astuple()
    dh = H.d1
    lam = a.lam(xi)
    return (
        al * psi * d2psi
        - al * (n - 1) * dpsi**2
        + al * m * psi * dpsi * df / f
        - be * psi * dpsi * dh
        - rho * normalized_scalar(a, xi, fiber_in_scalar)
        - lam / a.base.a
    )


def residual_ode3(a: WarpedAnsatz, xi, fiber_in_scalar: bool = True):
    """Fiber part, divided by |alpha_bar|^2 f^2."""
    P, F, H = _jets(a, xi)
    al, be, _, rho = a.params.astuple()
    n, m = a.n, a.m
    psi, dpsi, _ = P.astuple()
    f, df, d2f = F.astuple()
    dh = H.d1
    lam = a.lam(xi)
    aa = a.base.a
    return (
        al * a.fiber.theta / (aa * f**2)
        + psi**2 * (
            -al * (d2f / f - (n - 2) * (dpsi / psi) * (df / f))
            - al * (m - 1) * (df / f) ** 2
            + be * dh * df / f
        )
        - rho * normalized_scalar(a, xi, fiber_in_scalar)
        - lam / aa
    )


def theta_bracket(a: WarpedAnsatz, xi):
    """Numerator of the implied fiber constant (independent of fiber.theta)."""
    al, be, _, rho = a.params.astuple()
    m = a.m
    base = a.base
    f = warp_jet(a.f, xi).value
    lam = a.lam(xi)
    return (
        rho * conformal_scalar(base, xi) * f**2
        + lam * f**2
        + (al - 2 * m * rho) * f * conformal_laplacian(base, a.f, xi)
        - be * f * grad_inner(base, a.h, a.f, xi)
        + (m - 1) * (al - m * rho) * grad_norm_sq(base, a.f, xi)
    )


def _theta_coefficient(p: Params, m: int) -> float:
    return p.alpha - m * p.rho


def theorem1b_theta(a: WarpedAnsatz, xi):
    """Fiber Einstein constant implied by the warped equations at xi.

    Raises :class:`DegenerateCoefficient` when ``alpha == m rho``; the
    exception carries the bracket, which must then vanish by itself.
    """
    c = _theta_coefficient(a.params, a.m)
    br = theta_bracket(a, xi)
    if abs(c) <= 1e-14 * max(abs(a.params.alpha), abs(a.m * a.params.rho)):
        raise DegenerateCoefficient("alpha = m*rho: theta is not determined", bracket=br)
    return br / c


# ---------------------------------------------------------------------------
# differential identity (beta != 0)
# ---------------------------------------------------------------------------

def _derivative(fn, xi, step, contains):
    """5-point derivative; the stencil slides inward near domain edges."""
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    h = np.broadcast_to(np.asarray(step, dtype=float), x.shape)
    out = np.full_like(x, np.nan)
    todo = np.ones(len(x), dtype=bool)
    for shift in (0, 1, -1, 2, -2):
        offs = [shift + k for k in (-2, -1, 0, 1, 2)]
        o = np.asarray(offs, dtype=float)
        fits = np.array([contains(xv + hv * o) for xv, hv in zip(x, h)]) & todo
        if not fits.any():
            continue
        xf, hf = x[fits], h[fits]
        vals = [np.asarray(fn(xf + k * hf), dtype=float) for k in offs]
        out[fits] = np.tensordot(fd_weights(offs, 1), np.array(vals), axes=1) / hf
        todo &= ~fits
    if todo.any():
        raise OutOfDomain(f"no finite-difference stencil fits around xi={x[todo][0]}")
    return float(out[0]) if np.ndim(xi) == 0 else out


def _lemma2_parts(a: WarpedAnsatz, xi, fiber_in_scalar: bool):
    al, be, mu, rho = a.params.astuple()
    base = a.base
    d = a.d
    f = warp_jet(a.f, xi).value
    R = warped_scalar(a, xi, include_fiber=fiber_in_scalar)
    s = rho * R + a.lam(xi)
    lap_h = conformal_laplacian(base, a.h, xi)
    hf = grad_inner(base, a.h, a.f, xi)
    gh2 = grad_norm_sq(base, a.h, xi)
    phi = al * (2 - d) * s - al * be * lap_h - al * be * a.m * hf / f + (be**2 - al * mu) * gh2
    return phi, s, lap_h, hf, gh2, f


def _local_step(a: WarpedAnsatz, xi, step):
    """Shrink the step near an excluded finite endpoint, where profiles may be singular.

    Endpoints that belong to the domain (spline ends) keep the full step: the
    stencil slides inward there, and a smaller step would only amplify
    rounding in the spline's second derivative.
    """
    x = np.asarray(xi, dtype=float)
    dist = np.full(x.shape, np.inf)
    for end in a.domain:
        if math.isfinite(end) and not a.contains(end):
            dist = np.minimum(dist, np.abs(x - end))
    return step * np.clip(dist, 1e-2, 1.0)


def lemma2_residual(a: WarpedAnsatz, xi, step: float = 1e-3, fiber_in_scalar: bool = True):
    """LHS minus RHS of the identity, both as multiples of d(xi).

    The xi-derivatives use 5-point differences with ``step``, reduced near
    finite domain endpoints.
    """
    a.params.require_beta()
    step = _local_step(a, xi, step)
    al, be, mu, _ = a.params.astuple()

    def phi(x):
        return _lemma2_parts(a, x, fiber_in_scalar)[0]

    def gh2(x):
        return grad_norm_sq(a.base, a.h, x)

    lhs = _derivative(phi, xi, step, a.contains)
    _, s, lap_h, hf, g2, f = _lemma2_parts(a, xi, fiber_in_scalar)
    dh = a.h.jet(xi).d1
    rhs = (
        -al * mu * _derivative(gh2, xi, step, a.contains)
        + 2.0 * be * s * dh
        + 2.0 * mu * (al * lap_h + al * a.m * hf / f - be * g2) * dh
    )
    return lhs - rhs


# ---------------------------------------------------------------------------
# full tensor check
# ---------------------------------------------------------------------------


def warped_metric(a: WarpedAnsatz):
    """Coordinate metric on R^n x (fiber chart) as a callable ``x -> (d, d)``."""
    if a.fiber.chart == "none":
        raise ChartUnavailable("fiber has no explicit chart")
    n, m = a.n, a.m
    sa = math.sqrt(a.base.a)

    def g(x):
        xi = sa * x[n - 1]
        psi = float(a.base.psi(xi))
        f = float(a.f(xi))
        out = np.zeros((n + m, n + m))
        out[:n, :n] = np.eye(n) / psi**2
        out[n:, n:] = f**2 * a.fiber.metric(x[n:])
        return out

    return g


def full_tensor_residual(a: WarpedAnsatz, point, step: float = 1e-4, order: int = 2) -> float:
    """Sup-norm of ``alpha Ric + beta Hess h + mu dh dh - (rho R + lam) g`` at a chart point.

    Curvature comes from finite differences of the explicit metric, so this
    shares no code with the reduced formulas.
    """
    g = warped_metric(a)
    x = np.asarray(point, dtype=float)
    n, m = a.n, a.m
    if x.shape != (n + m,):
        raise OutOfDomain(f"point must have {n + m} coordinates")
    sa = math.sqrt(a.base.a)
    xi = sa * x[n - 1]
    reach = 4 * step * sa
    if not a.contains(np.array([xi - reach, xi + reach])):
        raise OutOfDomain(f"xi={xi} too close to the edge of the ansatz domain {a.domain}")
    if a.fiber.kappa < 0 and float(x[n:] @ x[n:]) >= (0.9 * a.fiber.chart_radius()) ** 2:
        raise OutOfDomain("fiber point too close to the chart boundary")
    fd = MetricFD(g, step=step, order=order)

    def htilde(y):
        return float(a.h(sa * y[n - 1]))

    al, be, mu, rho = a.params.astuple()
    gx = g(x)
    ric = fd.ricci(x)
    R = float(np.einsum("ij,ij->", np.linalg.inv(gx), ric))
    hess = fd.hessian(htilde, x)
    dh = fd.gradient(htilde, x)
    E = al * ric + be * hess + mu * np.outer(dh, dh) - (rho * R + float(a.lam(xi))) * gx
    return float(np.max(np.abs(E)))


def random_points(a: WarpedAnsatz, count: int, rng, xi_range=None) -> np.ndarray:
    """Chart points whose xi lies inside ``xi_range`` (default: the ansatz domain, trimmed)."""
    lo, hi = xi_range if xi_range is not None else a.domain
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise OutOfDomain("random_points needs a finite xi range")
    pad = 0.02 * (hi - lo)
    n, m = a.n, a.m
    pts = rng.uniform(-1.0, 1.0, size=(count, n + m))
    pts[:, n - 1] = rng.uniform(lo + pad, hi - pad, size=count) / math.sqrt(a.base.a)
    r = min(1.0, 0.4 * a.fiber.chart_radius())
    pts[:, n:] *= r / math.sqrt(m)
    return pts


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    count: int = 401

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise InvalidParameters(f"bad grid interval [{self.lo}, {self.hi}]")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidParameters("grid needs at least 2 points")

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, int(self.count))

    @staticmethod
    def parse(text: str) -> "Grid":
        try:
            a, b, c = text.split(":")
            return Grid(float(a), float(b), int(c))
        except ValueError as exc:
            raise InvalidParameters(f"grid must look like a:b:n, got {text!r}") from exc


def _sup(values, xs):
    v = np.abs(np.asarray(values, dtype=float))
    v = np.where(np.isnan(v), np.inf, v)
    i = int(np.argmax(v))
    return float(v[i]), float(xs[i])


@dataclass
class ResidualReport:
    grid: tuple[float, float, int]
    per_equation: dict
    theta_constancy: tuple[float, float] | None
    fiber_theta: float
    tol: float
    lemma2_tol: float
    passed: bool
    fiber_in_scalar: bool = True
    convention_gap: float = 0.0
    name: str = ""
    traces: dict = field(default_factory=dict, repr=False)
    failures: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "grid": {"xi_min": self.grid[0], "xi_max": self.grid[1], "count": self.grid[2]},
            "per_equation": {
                k: {"sup_abs_residual": v[0], "argmax_xi": v[1]} for k, v in self.per_equation.items()
            },
            "theta_constancy": None if self.theta_constancy is None else {
                "mean": self.theta_constancy[0], "max_deviation": self.theta_constancy[1],
            },
            "fiber_theta": self.fiber_theta,
            "tol": self.tol,
            "lemma2_tol": self.lemma2_tol,
            "fiber_in_scalar": self.fiber_in_scalar,
            "convention_gap": self.convention_gap,
            "verdict": self.verdict,
            "failures": list(self.failures),
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["xi"] + [k for k in ("ode1", "ode2", "ode3", "theta_implied", "lemma2") if k in self.traces]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        xs = self.traces["xi"]
        for i in range(len(xs)):
            w.writerow([f"{float(self.traces[c][i]):.17g}" for c in cols])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("Infinity" if obj > 0 else "-Infinity")
    return obj


def verify(
    a: WarpedAnsatz,
    grid: Grid | None = None,
    tol: float = DEFAULT_TOL,
    lemma2_tol: float = LEMMA2_TOL,
    fiber_in_scalar: bool = True,
) -> ResidualReport:
    """Evaluate every reduced residual on ``grid`` and aggregate a verdict.

    Passes iff the three ODE residuals and the implied-theta spread are below
    ``tol``, the implied theta matches ``fiber.theta`` within ``tol``, and the
    differential identity holds within ``lemma2_tol``.
    """
    if grid is None:
        lo, hi = a.domain
        grid = Grid(lo, hi, 401)
    xs = grid.points()
    if not a.contains(xs):
        raise OutOfDomain(f"grid [{grid.lo}, {grid.hi}] leaves the ansatz domain {a.domain}")
    r1 = residual_ode1(a, xs)
    r2 = residual_ode2(a, xs, fiber_in_scalar)
    r3 = residual_ode3(a, xs, fiber_in_scalar)
    per = {"ode1": _sup(r1, xs), "ode2": _sup(r2, xs), "ode3": _sup(r3, xs)}
    traces = {"xi": xs, "ode1": r1, "ode2": r2, "ode3": r3}
    failures = [k for k in ("ode1", "ode2", "ode3") if not per[k][0] < tol]

    theta_stats = None
    try:
        th = np.asarray(theorem1b_theta(a, xs), dtype=float)
        traces["theta_implied"] = th
        mean = float(np.mean(th))
        per["theta"] = _sup(th - mean, xs)
        theta_stats = (mean, per["theta"][0])
        if not per["theta"][0] < tol:
            failures.append("theta-constancy")
        if not abs(mean - a.fiber.theta) < tol:
            failures.append("theta-mismatch")
    except DegenerateCoefficient as exc:
        per["theta_bracket"] = _sup(exc.bracket, xs)
        if not per["theta_bracket"][0] < tol:
            failures.append("theta-bracket")

    if a.params.beta != 0:
        l2 = lemma2_residual(a, xs, fiber_in_scalar=fiber_in_scalar)
        traces["lemma2"] = l2
        per["lemma2"] = _sup(l2, xs)
        if not per["lemma2"][0] < lemma2_tol:
            failures.append("lemma2")

    f = np.asarray(a.f(xs), dtype=float)
    gap = float(np.max(np.abs(a.params.rho * a.fiber.scalar / (a.base.a * f**2))))
    return ResidualReport(
        grid=(float(grid.lo), float(grid.hi), int(grid.count)),
        per_equation=per,
        theta_constancy=theta_stats,
        fiber_theta=a.fiber.theta,
        tol=tol,
        lemma2_tol=lemma2_tol,
        passed=not failures,
        fiber_in_scalar=fiber_in_scalar,
        convention_gap=gap,
        name=a.name,
        traces=traces,
        failures=failures,
    )
