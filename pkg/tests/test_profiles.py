import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from einsteinwarp.errors import NonMonotoneAbscissae, OutOfDomain, TooFewPoints
from einsteinwarp.profiles import (
    Builtin, FunctionProfile, Jet2, builtin, compose, constant, from_samples, hermite_spline,
    log_affine, power_of, profile_from_dict, scaled,
)
from oracles import central_jet

finite = st.floats(-3, 3, allow_nan=False)


def jets():
    return st.builds(Jet2, finite, finite, finite)


@given(jets(), jets())
def test_jet_product_rule(x, y):
    z = x * y
    assert z.d1 == pytest.approx(x.d1 * y.value + x.value * y.d1, abs=1e-12)
    assert z.d2 == pytest.approx(x.d2 * y.value + 2 * x.d1 * y.d1 + x.value * y.d2, abs=1e-12)


@given(jets(), jets())
def test_jet_sum_and_difference(x, y):
    assert (x + y - y).astuple() == pytest.approx(x.astuple(), abs=1e-12)


@given(jets(), st.floats(0.5, 3))
def test_jet_division_inverts_product(x, c):
    y = Jet2(c, 0.3, -0.2)
    assert ((x * y) / y).astuple() == pytest.approx(x.astuple(), abs=1e-9)


@pytest.mark.parametrize("prof,xi", [
    (Builtin("exp", (1.3, -0.7)), 0.4),
    (Builtin("cosh", (2.0, 0.5)), -1.1),
    (Builtin("sech", (1.0, 1.5)), 0.3),
    (Builtin("tanh", (0.7, 1.2)), 0.2),
    (Builtin("coth", (1.0, 1.0)), 0.8),
    (Builtin("power", (2.0, -1.5, -1.0)), 0.5),
    (Builtin("power", (1.0, 3)), -0.7),
    (log_affine(0.2, (1.0, 2.0, 3.0), (-0.5, 1.0, 0.5)), 0.9),
    (compose(Builtin("exp", (1.0, 1.0)), Builtin("tanh", (1.0, 1.0))), 0.3),
    (power_of(Builtin("cosh", (1.0, 1.0)), 0.5), -0.4),
    (Builtin("linear", (1.0, 2.0)) * Builtin("sech", (1.0, 1.0)), 0.6),
])
def test_jet_matches_central_differences(prof, xi):
    J = prof.jet(xi)
    v, d1, d2 = central_jet(prof, xi, 1e-3)
    assert J.value == pytest.approx(v, rel=1e-12)
    assert J.d1 == pytest.approx(d1, rel=1e-6, abs=1e-9)
    assert J.d2 == pytest.approx(d2, rel=1e-6, abs=1e-7)


def test_domains_and_out_of_domain():
    with pytest.raises(OutOfDomain):
        Builtin("coth", (1.0, 1.0))(0.0)
    p = Builtin("power", (1.0, 0.5))
    assert p.domain == (0.0, math.inf)
    with pytest.raises(OutOfDomain):
        p(-1.0)
    assert log_affine(0.0, (1.0, 1.0, 1.0)).domain[0] == -1.0


def test_array_and_scalar_outputs():
    p = Builtin("exp", (1.0, 1.0))
    assert isinstance(p(0.5), float)
    assert p(np.array([0.0, 1.0])).shape == (2,)


def test_spline_validation_and_accuracy():
    with pytest.raises(TooFewPoints):
        from_samples([0, 1, 2], [0, 1, 2])
    with pytest.raises(NonMonotoneAbscissae):
        from_samples([0, 2, 1, 3], [0, 1, 2, 3])
    xs = np.linspace(0, 2, 41)
    s = hermite_spline(xs, np.sin(xs), np.cos(xs), -np.sin(xs))
    t = np.linspace(0.01, 1.99, 97)
    assert np.max(np.abs(s(t) - np.sin(t))) < 1e-9
    assert np.max(np.abs(s.jet(t).d2 + np.sin(t))) < 1e-5


def test_function_profile_jets_and_spline():
    p = FunctionProfile(np.sin, (0.0, 2.0), closed=True)
    J = p.jet(np.array([0.0, 1.0, 2.0]))
    assert np.allclose(J.d1, np.cos([0.0, 1.0, 2.0]), atol=1e-9)
    assert np.allclose(J.d2, -np.sin([0.0, 1.0, 2.0]), atol=1e-5)
    s = p.to_spline(0.0, 2.0, 201)
    assert abs(s(1.234) - math.sin(1.234)) < 1e-10
    with pytest.raises(TypeError):
        p.to_dict()


@pytest.mark.parametrize("prof", [
    constant(2.0),
    Builtin("power", (1.0, -1.0), (0.0, math.inf)),
    log_affine(0.0, (1.0, 1.0, 1.0), (-1.0, 1.0, 0.0)),
    scaled(Builtin("cosh", (1.0, 2.0)), 0.3) + constant(1.0),
    compose(log_affine(0.0, (1.5, 1.0, 0.0)), Builtin("cosh", (1.0, 1.0))),
    from_samples(np.linspace(0, 1, 9), np.linspace(0, 1, 9) ** 2),
])
def test_dict_round_trip(prof):
    q = profile_from_dict(prof.to_dict())
    xs = np.linspace(0.2, 0.9, 11)
    assert np.array_equal(np.asarray(prof(xs)), np.asarray(q(xs)))


def test_builtin_defaults_and_positivity():
    assert builtin("exp")(0.0) == 1.0
    cert = Builtin("cosh", (1.0, 1.0)).positivity(-3, 3)
    assert cert.positive and cert.lower_bound > 0.9
    assert not Builtin("linear", (0.0, 1.0)).positivity(-1, 1).positive


@settings(max_examples=50)
@given(st.floats(-20, 20))
def test_log_value_matches_log(x):
    p = Builtin("exp", (2.0, 1.0)) * Builtin("cosh", (1.0, 0.5))
    assert p.log_value(x) == pytest.approx(math.log(p(x)), rel=1e-12, abs=1e-12)
