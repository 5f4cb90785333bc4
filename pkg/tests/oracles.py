"""Independent reference routes shared by the test modules.

Nothing here calls the reduced formulas: the curvature oracle is nested finite
differences of an explicit coordinate metric, jets are checked against plain
central differences of the profile values.
"""

import math

import numpy as np

from einsteinwarp.ansatz import BaseAnsatz
from einsteinwarp.profiles import Builtin, constant
from einsteinwarp.tensor_fd import MetricFD

# positive conformal factors defined on all of R (label, profile)
PSIS = [
    ("one", lambda r: constant(1.0)),
    ("exp", lambda r: Builtin("exp", (r.uniform(0.5, 2.0), r.uniform(-0.6, 0.6)))),
    ("cosh", lambda r: Builtin("cosh", (r.uniform(0.5, 2.0), r.uniform(-0.8, 0.8)))),
    ("sech", lambda r: Builtin("sech", (r.uniform(0.5, 2.0), r.uniform(-0.8, 0.8)))),
]

# test functions p(xi)
PS = [
    ("linear", lambda r: Builtin("linear", (r.uniform(-1, 1), r.uniform(-2, 2)))),
    ("exp", lambda r: Builtin("exp", (r.uniform(0.5, 2.0), r.uniform(-1, 1)))),
    ("tanh", lambda r: Builtin("tanh", (r.uniform(-2, 2), r.uniform(-1, 1)))),
    ("cosh", lambda r: Builtin("cosh", (r.uniform(0.5, 2.0), r.uniform(-1, 1)))),
]


def random_config(rng):
    """(base, p, xi) drawn from the families above, n in {2, 3, 4}."""
    n = int(rng.integers(2, 5))
    a = float(rng.uniform(0.3, 2.0))
    psi = PSIS[int(rng.integers(len(PSIS)))][1](rng)
    p = PS[int(rng.integers(len(PS)))][1](rng)
    xi = float(rng.uniform(-1.0, 1.0))
    return BaseAnsatz(n, a, psi), p, xi


def base_point(base, xi):
    x = np.zeros(base.n)
    x[-1] = xi / math.sqrt(base.a)
    return x


def base_metric_fd(base, step=1e-3):
    sa = math.sqrt(base.a)

    def g(x):
        return np.eye(base.n) / float(base.psi(sa * x[-1])) ** 2

    return MetricFD(g, step=step, order=4)


def lifted(base, p):
    sa = math.sqrt(base.a)
    return lambda x: float(p(sa * x[-1]))


def central_jet(p, xi, step=1e-4):
    """(value, d1, d2) by 5-point central differences of the values."""
    xs = xi + step * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    v = np.array([float(p(x)) for x in xs])
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * step)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * step**2)
    return v[2], d1, d2
