"""One-variable profiles of the ansatz coordinate with exact 2-jets.

Every function of the metric ansatz (conformal factor, warping function,
potential, soliton function) is a :class:`Profile`. A profile evaluates to a
:class:`Jet2` ``(value, d1, d2)``; all evaluation is vectorised over numpy
arrays so that residuals can be computed on whole grids at once.

Builtin kinds and their coefficient layouts::

    constant    [c]                      c
    linear      [a, b]                   a + b*xi
    exp         [A, k]                   A*exp(k*xi)
    log-affine  [c0, c1, a1, b1, ...]    c0 + sum_i c_i*log(a_i*xi + b_i)
    cosh        [A, k]                   A*cosh(k*xi)
    sech        [A, k]                   A/cosh(k*xi)
    tanh        [A, k]                   A*tanh(k*xi)
    coth        [A, k]                   A/tanh(k*xi)
    power       [A, p] or [A, p, s]      A*(xi - s)**p
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import BPoly, CubicSpline

from .errors import BadCoefficients, NonMonotoneAbscissae, OutOfDomain, TooFewPoints

INF = math.inf

BUILTIN_KINDS = (
    "constant", "linear", "exp", "log-affine", "cosh", "sech", "tanh", "coth", "power",
)
COMPOSITE_OPS = ("sum", "product", "compose")


def _as_output(arr, scalar):
    return float(arr) if scalar else arr


@dataclass(frozen=True)
class Jet2:
    """Value with first and second derivative; arithmetic follows the calculus rules."""

    value: float | np.ndarray
    d1: float | np.ndarray = 0.0
    d2: float | np.ndarray = 0.0

    @staticmethod
    def const(c) -> "Jet2":
        return Jet2(c, 0.0, 0.0)

    @staticmethod
    def _lift(other) -> "Jet2":
        return other if isinstance(other, Jet2) else Jet2.const(other)

    def __add__(self, other):
        o = Jet2._lift(other)
        return Jet2(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-Jet2._lift(other))

    def __rsub__(self, other):
        return Jet2._lift(other) - self

    def __mul__(self, other):
        o = Jet2._lift(other)
        return Jet2(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        return Jet2(1.0 / v, -self.d1 / v**2, 2.0 * self.d1**2 / v**3 - self.d2 / v**2)

    def __truediv__(self, other):
        return self * Jet2._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return Jet2._lift(other) * self.reciprocal()

    def chain(self, outer: "Jet2") -> "Jet2":
        """Compose: ``outer`` is the jet of g evaluated at ``self.value``; returns the jet of g∘self."""
        return Jet2(
            outer.value,
            outer.d1 * self.d1,
            outer.d2 * self.d1**2 + outer.d1 * self.d2,
        )

    def astuple(self):
        return (self.value, self.d1, self.d2)


@dataclass(frozen=True)
class PositivityCertificate:
    positive: bool
    lower_bound: float
    min_sample: float
    argmin: float
    interval: tuple[float, float]
    count: int


class Profile:
    """Abstract smooth function of one variable on an interval.

    Subclasses implement ``_jet(xi)`` on a float array already known to lie
    in the domain. Instances are immutable after construction.
    """

    kind: str = "abstract"
    domain: tuple[float, float] = (-INF, INF)
    closed: bool = False

    def _jet(self, xi: np.ndarray) -> Jet2:
        raise NotImplementedError

    def contains(self, xi) -> bool:
        x = np.asarray(xi, dtype=float)
        a, b = self.domain
        if self.closed:
            ok = (x >= a) & (x <= b)
        else:
            ok = (x > a) & (x < b)
        return bool(np.all(ok))

    def _check(self, xi):
        if not self.contains(xi):
            x = np.atleast_1d(np.asarray(xi, dtype=float))
            raise OutOfDomain(
                f"{self.kind} profile evaluated at xi in [{x.min():g}, {x.max():g}] "
                f"outside its domain {self.domain}"
            )

    def jet(self, xi) -> Jet2:
        scalar = np.ndim(xi) == 0
        x = np.asarray(xi, dtype=float)
        self._check(x)
        j = self._jet(x)
        shape = x.shape
        parts = [np.broadcast_to(np.asarray(p, dtype=float), shape) for p in j.astuple()]
        if scalar:
            return Jet2(*(float(p) for p in parts))
        return Jet2(*(np.array(p) for p in parts))

    def __call__(self, xi):
        return self.jet(xi).value

    def log_value(self, xi):
        """``log(p(xi))``; overridden where the value itself would overflow."""
        return np.log(self(xi))

    # light algebra so profiles can be assembled in code
    def __add__(self, other):
        return Composite("sum", (self, _as_profile(other)))

    __radd__ = __add__

    def __mul__(self, other):
        return Composite("product", (_as_profile(other), self))

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        return self + (-1.0) * _as_profile(other)

    def positivity(self, a: float, b: float, count: int = 401) -> PositivityCertificate:
        """Grid-and-derivative screen for positivity on ``[a, b]``.

        Between neighbouring grid points the value is bounded below by the
        smaller endpoint value minus the first-derivative drift over half a
        cell and a curvature allowance. This is a numerical certificate, not
        a proof.
        """
        xs = np.linspace(a, b, count)
        j = self.jet(xs)
        v, d1, d2 = (np.atleast_1d(np.asarray(t, dtype=float)) for t in j.astuple())
        h = (b - a) / (count - 1) if count > 1 else 0.0
        lo = np.minimum(v[:-1], v[1:])
        drift = 0.5 * h * np.maximum(np.abs(d1[:-1]), np.abs(d1[1:]))
        bend = 0.125 * h * h * np.maximum(np.abs(d2[:-1]), np.abs(d2[1:]))
        bound = float(np.min(lo - drift - bend)) if count > 1 else float(v[0])
        i = int(np.argmin(v))
        return PositivityCertificate(
            positive=bool(bound > 0 and np.all(v > 0)),
            lower_bound=bound,
            min_sample=float(v[i]),
            argmin=float(xs[i]),
            interval=(float(a), float(b)),
            count=count,
        )

    def to_dict(self) -> dict:
        raise NotImplementedError


def _as_profile(obj) -> Profile:
    if isinstance(obj, Profile):
        return obj
    return Builtin("constant", (float(obj),))


def _domain_to_json(domain):
    return [None if math.isinf(d) else d for d in domain]


def _domain_from_json(raw):
    if raw is None:
        return None
    a, b = raw
    return (-INF if a is None else float(a), INF if b is None else float(b))


# ---------------------------------------------------------------------------
# builtin closed forms
# ---------------------------------------------------------------------------

_NCOEFFS = {
    "constant": (1,),
    "linear": (2,),
    "exp": (2,),
    "cosh": (2,),
    "sech": (2,),
    "tanh": (2,),
    "coth": (2,),
    "power": (2, 3),
}


def _log_affine_domain(coeffs):
    lo, hi = -INF, INF
    for c, a, b in zip(coeffs[1::3], coeffs[2::3], coeffs[3::3]):
        if a > 0:
            lo = max(lo, -b / a)
        elif a < 0:
            hi = min(hi, -b / a)
        elif b <= 0:
            raise BadCoefficients("log-affine term with a=0 needs b>0")
    if not lo < hi:
        raise BadCoefficients("log-affine arguments are never simultaneously positive")
    return (lo, hi)


def _is_int(p):
    return float(p).is_integer()


class Builtin(Profile):
    """Closed-form profile of one of the builtin kinds (see module docstring)."""

    def __init__(self, kind: str, coeffs: Sequence[float], domain=None):
        if kind not in BUILTIN_KINDS:
            raise BadCoefficients(f"unknown profile kind {kind!r}")
        coeffs = tuple(float(c) for c in coeffs)
        if not all(math.isfinite(c) for c in coeffs):
            raise BadCoefficients("coefficients must be finite")
        if kind == "log-affine":
            if len(coeffs) < 4 or (len(coeffs) - 1) % 3:
                raise BadCoefficients("log-affine takes [c0, c1, a1, b1, ...]")
        elif len(coeffs) not in _NCOEFFS[kind]:
            raise BadCoefficients(f"{kind} takes {_NCOEFFS[kind]} coefficients, got {len(coeffs)}")
        if kind == "coth" and coeffs[1] == 0:
            raise BadCoefficients("coth needs k != 0")
        self.kind = kind
        self.coeffs = coeffs
        natural, forbidden = self._natural_domain()
        if domain is None:
            domain = natural
        domain = (float(domain[0]), float(domain[1]))
        if not domain[0] < domain[1]:
            raise BadCoefficients(f"empty domain {domain}")
        if domain[0] < natural[0] or domain[1] > natural[1]:
            raise BadCoefficients(f"domain {domain} exceeds the natural domain {natural} of {kind}")
        if forbidden is not None and domain[0] < forbidden < domain[1]:
            raise BadCoefficients(f"domain {domain} contains the singular point {forbidden}")
        self.domain = domain

    def _natural_domain(self):
        k, c = self.kind, self.coeffs
        if k == "log-affine":
            return _log_affine_domain(c), None
        if k == "coth":
            return (0.0, INF) if c[1] > 0 else (-INF, 0.0), 0.0
        if k == "power":
            p, s = c[1], (c[2] if len(c) == 3 else 0.0)
            if _is_int(p) and p >= 0:
                return (-INF, INF), None
            if _is_int(p):
                return (-INF, INF), s
            return (s, INF), None
        return (-INF, INF), None

    def __repr__(self):
        return f"Builtin({self.kind!r}, {list(self.coeffs)}, domain={self.domain})"

    def _jet(self, x):
        k, c = self.kind, self.coeffs
        if k == "constant":
            return Jet2(c[0] + 0.0 * x, 0.0, 0.0)
        if k == "linear":
            return Jet2(c[0] + c[1] * x, c[1], 0.0)
        if k == "exp":
            v = c[0] * np.exp(c[1] * x)
            return Jet2(v, c[1] * v, c[1] ** 2 * v)
        if k == "log-affine":
            v, d1, d2 = c[0] + 0.0 * x, 0.0, 0.0
            for ci, a, b in zip(c[1::3], c[2::3], c[3::3]):
                z = a * x + b
                v = v + ci * np.log(z)
                d1 = d1 + ci * a / z
                d2 = d2 - ci * a * a / z**2
            return Jet2(v, d1, d2)
        A, q = c[0], c[1]
        z = q * x
        if k == "cosh":
            return Jet2(A * np.cosh(z), A * q * np.sinh(z), A * q * q * np.cosh(z))
        if k == "sech":
            s, t = 1.0 / np.cosh(z), np.tanh(z)
            return Jet2(A * s, -A * q * s * t, A * q * q * (s * t * t - s**3))
        if k == "tanh":
            t = np.tanh(z)
            return Jet2(A * t, A * q * (1 - t * t), -2.0 * A * q * q * t * (1 - t * t))
        if k == "coth":
            ct = 1.0 / np.tanh(z)
            return Jet2(A * ct, A * q * (1 - ct * ct), -2.0 * A * q * q * ct * (1 - ct * ct))
        if k == "power":
            p, s = q, (c[2] if len(c) == 3 else 0.0)
            z = x - s
            pw = int(p) if _is_int(p) else p
            v = A * np.power(z, pw)
            d1 = 0.0 * x if p == 0 else A * p * np.power(z, pw - 1)
            d2 = 0.0 * x if p in (0.0, 1.0) else A * p * (p - 1) * np.power(z, pw - 2)
            return Jet2(v, d1, d2)
        raise AssertionError(k)

    def log_value(self, xi):
        k, c = self.kind, self.coeffs
        x = np.asarray(xi, dtype=float)
        self._check(x)
        if k == "exp" and c[0] > 0:
            out = math.log(c[0]) + c[1] * x
        elif k == "cosh" and c[0] > 0:
            z = np.abs(c[1] * x)
            out = math.log(c[0]) + z + np.log1p(np.exp(-2 * z)) - math.log(2.0)
        else:
            return super().log_value(xi)
        return _as_output(out, np.ndim(xi) == 0)

    def to_dict(self):
        return {"kind": self.kind, "coeffs": list(self.coeffs), "domain": _domain_to_json(self.domain)}


def builtin(kind: str, coefficients: Sequence[float] = (), domain=None) -> Profile:
    """Closed-form profile; raises :class:`BadCoefficients` on invalid input."""
    if kind == "spline":
        raise BadCoefficients("use from_samples() for spline profiles")
    if not coefficients:
        defaults = {"constant": (1.0,), "linear": (0.0, 1.0), "exp": (1.0, 1.0),
                    "cosh": (1.0, 1.0), "sech": (1.0, 1.0), "tanh": (1.0, 1.0),
                    "coth": (1.0, 1.0), "power": (1.0, 1.0)}
        if kind not in defaults:
            raise BadCoefficients(f"{kind} needs explicit coefficients")
        coefficients = defaults[kind]
    return Builtin(kind, coefficients, domain)


def constant(c: float) -> Profile:
    return Builtin("constant", (c,))


def linear(a: float, b: float) -> Profile:
    return Builtin("linear", (a, b))


def log_affine(c0: float, *terms: tuple[float, float, float], domain=None) -> Profile:
    flat = [c0]
    for t in terms:
        flat.extend(t)
    return Builtin("log-affine", flat, domain)


# ---------------------------------------------------------------------------
# splines
# ---------------------------------------------------------------------------


class SplineProfile(Profile):
    """Piecewise polynomial through knots.

    With values only the interpolant is the natural cubic spline. When first
    and second derivatives are supplied too it is the C² quintic Hermite
    interpolant of that data, and with third derivatives as well the C³
    degree-7 Hermite interpolant.
    """

    kind = "spline"
    closed = True

    def __init__(self, xs, ys, dys=None, d2ys=None, d3ys=None):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape:
            raise BadCoefficients("knot arrays must be 1-d and of equal length")
        if len(xs) < 4:
            raise TooFewPoints(f"spline needs at least 4 knots, got {len(xs)}")
        if np.any(np.diff(xs) <= 0):
            raise NonMonotoneAbscissae("spline abscissae must be strictly increasing")
        if (dys is None) != (d2ys is None):
            raise BadCoefficients("give both dys and d2ys or neither")
        if d3ys is not None and dys is None:
            raise BadCoefficients("d3ys needs dys and d2ys")
        self.xs, self.ys = xs, ys
        self.dys = None if dys is None else np.asarray(dys, dtype=float)
        self.d2ys = None if d2ys is None else np.asarray(d2ys, dtype=float)
        self.d3ys = None if d3ys is None else np.asarray(d3ys, dtype=float)
        if self.dys is None:
            self._pp = CubicSpline(xs, ys, bc_type="natural")
        else:
            cols = [ys, self.dys, self.d2ys] + ([] if self.d3ys is None else [self.d3ys])
            if any(c.shape != xs.shape for c in cols):
                raise BadCoefficients("derivative arrays must match the knots")
            data = np.column_stack(cols)
            self._pp = BPoly.from_derivatives(xs, data)
        self.domain = (float(xs[0]), float(xs[-1]))

    def _jet(self, x):
        return Jet2(self._pp(x), self._pp(x, 1), self._pp(x, 2))

    def __repr__(self):
        if self.dys is None:
            mode = "natural-cubic"
        else:
            mode = "quintic-hermite" if self.d3ys is None else "septic-hermite"
        return f"SplineProfile({mode}, {len(self.xs)} knots on {self.domain})"

    def to_dict(self):
        knots = {"x": self.xs.tolist(), "y": self.ys.tolist()}
        if self.dys is not None:
            knots["dy"] = self.dys.tolist()
            knots["d2y"] = self.d2ys.tolist()
        if self.d3ys is not None:
            knots["d3y"] = self.d3ys.tolist()
        return {"kind": "spline", "coeffs": [], "domain": list(self.domain), "knots": knots}


def from_samples(xs, ys) -> SplineProfile:
    """Natural cubic spline through ``(xs, ys)``; exact at the knots."""
    return SplineProfile(xs, ys)


def hermite_spline(xs, ys, dys, d2ys, d3ys=None) -> SplineProfile:
    return SplineProfile(xs, ys, dys, d2ys, d3ys)


# ---------------------------------------------------------------------------
# composites and numerically differentiated wrappers
# ---------------------------------------------------------------------------


class Composite(Profile):
    """Sum, product or composition ``args[0] ∘ args[1]`` of profiles."""

    kind = "composite"

    def __init__(self, op: str, args: Sequence[Profile]):
        if op not in COMPOSITE_OPS:
            raise BadCoefficients(f"unknown composite op {op!r}")
        args = tuple(args)
        if op == "compose" and len(args) != 2:
            raise BadCoefficients("compose takes exactly [outer, inner]")
        if not args:
            raise BadCoefficients("composite needs arguments")
        self.op, self.args = op, args
        inner = args[1:] if op == "compose" else args
        lo = max(p.domain[0] for p in inner)
        hi = min(p.domain[1] for p in inner)
        if not lo < hi:
            raise BadCoefficients("composite arguments have disjoint domains")
        self.domain = (lo, hi)
        self.closed = all(p.closed for p in inner)

    def contains(self, xi):
        return all(p.contains(xi) for p in (self.args[1:] if self.op == "compose" else self.args))

    def _jet(self, x):
        if self.op == "sum":
            out = self.args[0].jet(x)
            for p in self.args[1:]:
                out = out + p.jet(x)
            return out
        if self.op == "product":
            out = self.args[0].jet(x)
            for p in self.args[1:]:
                out = out * p.jet(x)
            return out
        outer, inner = self.args
        j = inner.jet(x)
        return j.chain(outer.jet(j.value))

    def log_value(self, xi):
        outer = self.args[0]
        if self.op == "product":
            scalar = np.ndim(xi) == 0
            self._check(xi)
            total = sum(np.asarray(p.log_value(xi), dtype=float) for p in self.args)
            return float(total) if scalar else total
        if self.op == "compose" and isinstance(outer, Builtin) and outer.kind == "exp" and outer.coeffs[0] > 0:
            self._check(xi)
            A, k = outer.coeffs
            return math.log(A) + k * self.args[1](xi)
        return super().log_value(xi)

    def __repr__(self):
        return f"Composite({self.op!r}, {list(self.args)!r})"

    def to_dict(self):
        return {
            "kind": "composite",
            "op": self.op,
            "coeffs": [],
            "args": [a.to_dict() for a in self.args],
            "domain": _domain_to_json(self.domain),
        }


def compose(outer: Profile, inner: Profile) -> Composite:
    return Composite("compose", (outer, inner))


def scaled(p: Profile, c: float) -> Composite:
    return Composite("product", (constant(c), p))


def power_of(p: Profile, exponent: float) -> Composite:
    """``p(xi)**exponent``; the inner values must be positive at evaluation time."""
    return compose(Builtin("power", (1.0, exponent)), p)


_WEIGHTS: dict = {}


def fd_weights(offsets: Sequence[int], deriv: int) -> np.ndarray:
    """Finite-difference weights for the ``deriv``-th derivative on integer ``offsets`` (unit step)."""
    key = (tuple(offsets), deriv)
    if key not in _WEIGHTS:
        o = np.asarray(offsets, dtype=float)
        V = np.vander(o, len(o), increasing=True).T
        rhs = np.zeros(len(o))
        rhs[deriv] = math.factorial(deriv)
        _WEIGHTS[key] = np.linalg.solve(V, rhs)
    return _WEIGHTS[key]


class FunctionProfile(Profile):
    """Profile backed by a vectorised value function.

    Values are exact; ``d1`` and ``d2`` come from 5-point differences with
    step ``step``, centred where possible and shifted inward near the ends of
    the domain. Used for quantities (soliton function, Lichnerowicz
    coefficients) whose exact derivatives would need 3-jets.
    """

    kind = "function"

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], domain, step: float = 1e-3,
                 label: str = "", closed: bool = False):
        self.fn = fn
        self.domain = (float(domain[0]), float(domain[1]))
        self.step = step
        self.label = label
        self.closed = closed

    def _jet(self, x):
        h = self.step
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        v = np.asarray(self.fn(flat), dtype=float) * np.ones_like(flat)
        d1 = np.full_like(flat, np.nan)
        d2 = np.full_like(flat, np.nan)
        todo = np.ones(flat.shape, dtype=bool)
        for shift in (0, 1, -1, 2, -2):
            offs = [shift + k for k in (-2, -1, 0, 1, 2)]
            lo_ok = flat + (shift - 2) * h
            hi_ok = flat + (shift + 2) * h
            fits = todo & np.array([self.contains(np.array([p, q])) for p, q in zip(lo_ok, hi_ok)])
            if not fits.any():
                continue
            xf = flat[fits]
            vals = np.array([np.asarray(self.fn(xf + k * h), dtype=float) * np.ones_like(xf) for k in offs])
            d1[fits] = fd_weights(offs, 1) @ vals / h
            d2[fits] = fd_weights(offs, 2) @ vals / (h * h)
            todo &= ~fits
        if todo.any():
            raise OutOfDomain("domain too short for the finite-difference stencil")
        shape = x.shape
        return Jet2(v.reshape(shape), d1.reshape(shape), d2.reshape(shape))

    def __call__(self, xi):
        scalar = np.ndim(xi) == 0
        x = np.asarray(xi, dtype=float)
        self._check(x)
        out = np.broadcast_to(np.asarray(self.fn(x), dtype=float), x.shape)
        return float(out) if scalar else np.array(out)

    def __repr__(self):
        return f"FunctionProfile({self.label or self.fn!r}, domain={self.domain})"

    def to_spline(self, a: float | None = None, b: float | None = None, count: int = 801) -> SplineProfile:
        a = self.domain[0] if a is None else a
        b = self.domain[1] if b is None else b
        if not (math.isfinite(a) and math.isfinite(b)):
            raise OutOfDomain("sampling a function profile needs a finite interval")
        xs = np.linspace(a, b, count)
        j = self.jet(xs)
        return hermite_spline(xs, j.value, j.d1, j.d2)

    def to_dict(self):
        raise TypeError("function profiles must be sampled with to_spline() before serialisation")


def eval_jet2(p: Profile, xi) -> Jet2:
    """Jet of ``p`` at ``xi``; raises :class:`OutOfDomain` outside ``p.domain``."""
    return p.jet(xi)


def profile_from_dict(d: dict) -> Profile:
    try:
        kind = d["kind"]
    except (KeyError, TypeError):
        raise BadCoefficients("profile description needs a 'kind'") from None
    domain = _domain_from_json(d.get("domain"))
    if kind == "spline":
        k = d.get("knots") or {}
        if "x" not in k or "y" not in k:
            raise BadCoefficients("spline profile needs knots.x and knots.y")
        return SplineProfile(k["x"], k["y"], k.get("dy"), k.get("d2y"), k.get("d3y"))
    if kind == "composite":
        return Composite(d["op"], [profile_from_dict(a) for a in d["args"]])
    return Builtin(kind, d.get("coeffs", ()), domain)
