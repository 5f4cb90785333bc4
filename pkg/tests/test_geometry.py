import math

import numpy as np
import pytest

from einsteinwarp import geometry as G
from einsteinwarp.ansatz import BaseAnsatz, FiberData, Params, WarpedAnsatz
from einsteinwarp.catalog import get
from einsteinwarp.errors import NonpositiveProfile, NonpositiveWarp
from einsteinwarp.profiles import Builtin, constant
from einsteinwarp.system import warped_metric
from einsteinwarp.tensor_fd import MetricFD
from oracles import base_metric_fd, base_point, lifted, random_config

TOL = 1e-4
CONFIGS = [random_config(np.random.default_rng(1000 + k)) for k in range(50)]


@pytest.mark.parametrize("k", range(50))
def test_base_operators_match_fd_oracle(k):
    base, p, xi = CONFIGS[k]
    x = base_point(base, xi)
    fd = base_metric_fd(base)
    ab = base.alpha_bar()
    assert np.max(np.abs(G.conformal_ricci(base, xi).matrix(ab) - fd.ricci(x))) < TOL
    assert abs(G.conformal_scalar(base, xi) - fd.scalar(x)) < TOL
    fp = lifted(base, p)
    assert np.max(np.abs(G.conformal_hessian(base, p, xi).matrix(ab) - fd.hessian(fp, x))) < TOL
    assert abs(G.conformal_laplacian(base, p, xi) - fd.laplacian(fp, x)) < TOL
    ginv = np.linalg.inv(fd.metric(x))
    grad = fd.gradient(fp, x)
    assert abs(G.grad_norm_sq(base, p, xi) - grad @ ginv @ grad) < TOL


def test_hessian_exp_flat_at_origin():
    base = BaseAnsatz(3, 1.0, constant(1.0))
    t = G.conformal_hessian(base, Builtin("exp", (1.0, 1.0)), 0.0)
    assert (t.rank1, t.iso) == (1.0, 0.0)


def test_drifted_laplacian_definition():
    base = BaseAnsatz(3, 0.7, Builtin("cosh", (1.0, 0.4)))
    w, u = Builtin("tanh", (1.0, 1.0)), Builtin("exp", (1.0, 0.3))
    xi = 0.2
    expect = G.conformal_laplacian(base, u, xi) - G.grad_inner(base, w, u, xi)
    assert G.drifted_laplacian(base, w, u, xi) == pytest.approx(expect, abs=1e-14)


def test_bakry_emery_eigs_match_matrix():
    base = BaseAnsatz(3, 1.3, Builtin("sech", (1.0, 0.5)))
    w = Builtin("cosh", (1.0, 0.7))
    xi = 0.4
    x = base_point(base, xi)
    fd = base_metric_fd(base)
    T = fd.ricci(x) + fd.hessian(lifted(base, w), x)
    psi = float(base.psi(xi))
    ev = np.sort(np.linalg.eigvalsh(psi**2 * T))  # g_B = psi^-2 I, orthonormal frame scales by psi
    lp, lq = G.bakry_emery_eigs(base, w, xi)
    assert np.allclose(ev, np.sort([lp] + [lq] * (base.n - 1)), atol=1e-4)


def test_ex1_scalar_curvature_is_minus_six():
    a = get("ex1").ansatz
    assert G.warped_scalar(a, 0.0) == pytest.approx(-6.0, abs=1e-14)
    fd = MetricFD(warped_metric(a), step=1e-3, order=4)
    assert fd.scalar(np.zeros(5)) == pytest.approx(-6.0, abs=1e-4)


@pytest.mark.parametrize("chart,theta", [("sphere", 1.0), ("hyperbolic", -2.0), ("euclidean", 0.0)])
def test_warped_scalar_with_curved_fiber(chart, theta):
    base = BaseAnsatz(2, 0.8, Builtin("cosh", (1.0, 0.3)))
    f = Builtin("exp", (1.0, 0.4))
    a = WarpedAnsatz(base, FiberData(3, theta, chart), f, constant(0.0), constant(0.0), Params(1, 0, 0, 0))
    x = np.array([0.1, 0.3, 0.1, -0.2, 0.05])
    fd = MetricFD(warped_metric(a), step=1e-3, order=4)
    assert G.warped_scalar(a, math.sqrt(0.8) * 0.3) == pytest.approx(fd.scalar(x), abs=TOL)


def test_warped_scalar_without_fiber_term():
    a = get("incomplete1").ansatz
    full, lit = G.warped_scalar(a, 2.0), G.warped_scalar(a, 2.0, include_fiber=False)
    assert full - lit == pytest.approx(a.fiber.scalar / 4.0)


def test_positivity_errors():
    base = BaseAnsatz(2, 1.0, Builtin("linear", (0.0, 1.0)))
    with pytest.raises(NonpositiveProfile):
        G.conformal_scalar(base, -1.0)
    with pytest.raises(NonpositiveWarp):
        G.warp_jet(Builtin("linear", (-1.0, 0.0)), 0.0)


def test_vectorised_matches_scalar():
    base = BaseAnsatz(4, 0.5, Builtin("cosh", (1.0, 0.5)))
    xs = np.linspace(-1, 1, 5)
    v = G.conformal_scalar(base, xs)
    assert np.allclose(v, [G.conformal_scalar(base, float(x)) for x in xs], rtol=0, atol=1e-14)
