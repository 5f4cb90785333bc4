"""Construct solutions: fix Psi and f, integrate the potential ODE for h, read
lambda off the isotropic base equation, and check the fiber equation a
posteriori.

The potential ODE in v = h' is

    beta v' + 2 beta (Psi'/Psi) v + mu v^2 = K(xi),
    K = -alpha (n-2) Psi''/Psi + alpha m f''/f + 2 alpha m (f'/f)(Psi'/Psi),

a Riccati equation when mu != 0 and linear otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .ansatz import BaseAnsatz, FiberData, Params, WarpedAnsatz
from .errors import BlowUp, FiberMismatch, InvalidParameters, NonpositiveProfile
from .geometry import psi_jet, warp_jet
from .profiles import FunctionProfile, Profile, SplineProfile, constant, hermite_spline
from .system import Grid, ResidualReport, _derivative, residual_ode2, verify

DEFAULT_TOL = 1e-10
DEFAULT_CAP = 1e8


@dataclass(frozen=True)
class ConstructionSpec:
    """Inputs of a construction: base, warping, constants and initial data.

    ``initial`` is ``(xi0, h(xi0), h'(xi0))``; ``grid`` is ``(xi_min, xi_max,
    knots)`` and the returned potential is a degree-7 Hermite spline on those
    knots. ``max_step`` bounds the integrator step; the default of four knot
    spacings keeps dense-output interpolation error out of the knot data,
    ``math.inf`` leaves step control to the tolerances alone.
    """

    base: BaseAnsatz
    f: Profile
    params: Params
    m: int
    initial: tuple[float, float, float]
    grid: tuple[float, float, int] = (-1.0, 1.0, 401)
    rtol: float = DEFAULT_TOL
    atol: float = DEFAULT_TOL
    cap: float = DEFAULT_CAP
    method: str = "DOP853"
    max_step: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.params.require_beta()
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameters("m must be a positive integer")
        lo, hi, count = self.grid
        Grid(lo, hi, count)
        xi0 = self.initial[0]
        if not lo <= xi0 <= hi:
            raise InvalidParameters(f"xi0={xi0} outside [{lo}, {hi}]")
        if self.max_step is not None and not self.max_step > 0:
            raise InvalidParameters("max_step must be positive")
        if not (self.rtol > 0 and self.atol > 0 and self.cap > 0):
            raise InvalidParameters("tolerances and cap must be positive")

    def with_tolerance(self, tol: float) -> "ConstructionSpec":
        from dataclasses import replace

        return replace(self, rtol=tol, atol=tol)


def forcing(base: BaseAnsatz, f: Profile, params: Params, m: int, xi):
    """Right-hand side K(xi) of the potential ODE."""
    psi, dpsi, d2psi = psi_jet(base, xi).astuple()
    fv, df, d2f = warp_jet(f, xi).astuple()
    al, n = params.alpha, base.n
    return -al * (n - 2) * d2psi / psi + al * m * d2f / fv + 2.0 * al * m * (df / fv) * (dpsi / psi)


def _rhs(s: ConstructionSpec):
    be, mu = s.params.beta, s.params.mu

    def fun(xi, y):
        P = psi_jet(s.base, xi)
        K = forcing(s.base, s.f, s.params, s.m, xi)
        v = y[0]
        return np.array([(K - 2.0 * be * (P.d1 / P.value) * v - mu * v * v) / be])

    return fun


def _check_positive(s: ConstructionSpec):
    lo, hi, _ = s.grid
    for label, prof in (("Psi", s.base.psi), ("f", s.f)):
        cert = prof.positivity(lo, hi, 401)
        if not cert.positive:
            raise NonpositiveProfile(
                f"{label} is not certified positive on [{lo}, {hi}] "
                f"(min sample {cert.min_sample:g} at xi={cert.argmin:g})"
            )


def _integrate(s: ConstructionSpec, fun, xi0, y0, xs, max_step=np.inf):
    """Integrate from xi0 through the sorted points ``xs`` (all on one side)."""
    if len(xs) == 0:
        return np.empty(0)
    end = xs[-1]
    cap = s.cap

    def escape(xi, y):
        return cap - abs(y[0])

    escape.terminal = True
    sol = solve_ivp(fun, (xi0, end), y0, method=s.method, t_eval=xs,
                    rtol=s.rtol, atol=s.atol, events=escape, max_step=max_step)
    if sol.status == 1 or not sol.success or sol.y.shape[1] < len(xs):
        last = float(sol.t[-1]) if len(sol.t) else xi0
        if sol.t_events and len(sol.t_events[0]):
            last = float(sol.t_events[0][0])
        raise BlowUp(f"|h'| exceeded {cap:g} (or integration stalled) near xi={last:g}", last_xi=last)
    return sol.y[0]


def solve_potential(s: ConstructionSpec) -> SplineProfile:
    """Integrate the potential ODE both ways from xi0 and return h as a spline.

    Only v = h' is integrated. At each knot v' comes from the ODE and v''
    from its total derivative, so h is a degree-7 Hermite spline. The knot
    values of h come from the Hermite quadrature of the (v, v', v'') data,
    which keeps them consistent with v to seventh order; integrating h
    alongside v would leave independent tolerance-level errors that the
    spline's third derivative amplifies by the inverse cube of the knot
    spacing.
    """
    _check_positive(s)
    lo, hi, count = s.grid
    xi0, h0, v0 = (float(t) for t in s.initial)
    knots = np.linspace(lo, hi, int(count))
    fun = _rhs(s)
    right = knots[knots > xi0]
    left = knots[knots < xi0][::-1]
    step = s.max_step if s.max_step is not None else 4.0 * (hi - lo) / (int(count) - 1)
    vr = _integrate(s, fun, xi0, [v0], right, step)
    vl = _integrate(s, fun, xi0, [v0], left, step)
    xs = np.concatenate([left[::-1], [xi0], right])
    V = np.concatenate([vl[::-1], [v0], vr])
    # drop knots that coincide numerically with xi0
    i0 = len(left)
    tiny = 1e-14 * max(1.0, hi - lo)
    keep = np.ones(len(xs), dtype=bool)
    if i0 > 0 and xs[i0] - xs[i0 - 1] <= tiny:
        keep[i0 - 1] = False
    if i0 + 1 < len(xs) and xs[i0 + 1] - xs[i0] <= tiny:
        keep[i0 + 1] = False
    i0 -= int(not keep[max(i0 - 1, 0)]) if i0 > 0 else 0
    xs, V = xs[keep], V[keep]
    D1 = np.array([fun(x, np.array([v]))[0] for x, v in zip(xs, V)])
    D2 = _second_derivative(s, xs, V, D1)
    dx = np.diff(xs)
    inc = (0.5 * dx * (V[:-1] + V[1:]) + dx**2 / 10.0 * (D1[:-1] - D1[1:])
           + dx**3 / 120.0 * (D2[:-1] + D2[1:]))
    H = np.concatenate([[0.0], np.cumsum(inc)])
    H += h0 - H[i0]
    return hermite_spline(xs, H, V, D1, D2)


def _second_derivative(s: ConstructionSpec, xs, V, D1):
    """v'' along the solution: total xi-derivative of the ODE right-hand side."""
    be, mu = s.params.beta, s.params.mu
    P = psi_jet(s.base, xs)
    c = P.d1 / P.value
    dc = P.d2 / P.value - c**2
    dom = [s.base.psi, s.f]

    def contains(x):
        return all(p.contains(x) for p in dom)

    # forcing involves Psi'' and f''; its derivative is taken numerically,
    # with a smaller step near excluded endpoints where the profiles blow up
    dist = np.full(xs.shape, np.inf)
    for p in dom:
        for end in p.domain:
            if math.isfinite(end) and not p.contains(end):
                dist = np.minimum(dist, np.abs(xs - end))
    step = 1e-3 * np.clip(dist, 1e-2, 1.0)
    dK = _derivative(lambda x: forcing(s.base, s.f, s.params, s.m, x), xs, step, contains)
    return (dK - 2.0 * be * (dc * V + c * D1) - 2.0 * mu * V * D1) / be


def derive_lambda(
    base: BaseAnsatz,
    f: Profile,
    h: Profile,
    params: Params,
    m: int,
    fiber_in_scalar: bool = True,
    theta: float = 0.0,
) -> FunctionProfile:
    """lambda from the isotropic base equation; ``theta`` enters only via the scalar curvature."""
    probe = WarpedAnsatz(base, FiberData(m, theta, "none"), f, h, constant(0.0), params)
    a = base.a

    def lam(x):
        return a * residual_ode2(probe, x, fiber_in_scalar)

    ends = np.array([e for e in probe.domain if math.isfinite(e)])
    closed = bool(ends.size) and all(p.contains(ends) for p in probe.profiles()[:3])
    return FunctionProfile(lam, probe.domain, label="lambda from the base equation", closed=closed)


def suggest_fixed_points(s: ConstructionSpec, samples: int = 201, rtol: float = 1e-10) -> list[float]:
    """Constant slopes v* solving the potential ODE, when its coefficients are constant.

    Returns an empty list when K or Psi'/Psi vary on the grid.
    """
    lo, hi, _ = s.grid
    xs = np.linspace(lo, hi, samples)
    K = np.asarray(forcing(s.base, s.f, s.params, s.m, xs))
    P = psi_jet(s.base, xs)
    c = np.asarray(P.d1 / P.value)
    scale = max(1.0, float(np.max(np.abs(K))))
    if np.ptp(K) > rtol * scale or np.ptp(c) > rtol * max(1.0, float(np.max(np.abs(c)))):
        return []
    K0, c0 = float(np.mean(K)), float(np.mean(c))
    be, mu = s.params.beta, s.params.mu
    # mu v^2 + 2 beta c v - K = 0
    if mu == 0:
        return [] if c0 == 0 else [K0 / (2.0 * be * c0)]
    disc = (be * c0) ** 2 + mu * K0
    if disc < 0:
        return []
    r = math.sqrt(disc)
    return sorted({(-be * c0 - r) / mu, (-be * c0 + r) / mu})


def construct(
    s: ConstructionSpec,
    fiber: FiberData,
    tol: float = 1e-6,
    fiber_in_scalar: bool = True,
    name: str = "constructed",
) -> tuple[WarpedAnsatz, ResidualReport]:
    """Solve for h, derive lambda, and verify the result.

    Raises :class:`FiberMismatch` when the implied fiber constant is constant
    along the grid but differs from ``fiber.theta``. A non-constant implied
    theta is not an exception: the returned report fails and carries the
    trace.
    """
    if fiber.m != s.m:
        raise InvalidParameters("fiber dimension does not match the spec")
    h = solve_potential(s)
    lam = derive_lambda(s.base, s.f, h, s.params, s.m, fiber_in_scalar, fiber.theta)
    ansatz = WarpedAnsatz(s.base, fiber, s.f, h, lam, s.params, name=name)
    lo, hi, count = s.grid
    report = verify(ansatz, Grid(lo, hi, count), tol=tol, fiber_in_scalar=fiber_in_scalar)
    tc = report.theta_constancy
    if tc is not None and tc[1] < tol and abs(tc[0] - fiber.theta) >= tol:
        raise FiberMismatch(
            f"implied fiber constant {tc[0]:.12g} differs from the fiber's {fiber.theta:.12g}",
            implied_theta=tc[0],
            fiber_theta=fiber.theta,
        )
    return ansatz, report
