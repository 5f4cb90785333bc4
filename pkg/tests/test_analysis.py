import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from einsteinwarp import analysis as An
from einsteinwarp import catalog
from einsteinwarp.ansatz import BaseAnsatz
from einsteinwarp.errors import (
    IncompleteHypotheses, InvalidParameters, NotASolution, UnknownPreset, UnsupportedBase,
)
from einsteinwarp.profiles import Builtin, FunctionProfile, constant, linear

FLAT3 = BaseAnsatz(3, 1.0, constant(1.0))


def harmonic(c=1.0, R=4.0):
    return An.empirical_estimate(An.EstimateConfig(R=R), FLAT3, constant(0.0),
                                 linear(100.0 * c, c), constant(0.0), 0.0, 1.0)


def test_constant_u_gives_zero():
    r = An.empirical_estimate(An.EstimateConfig(R=4), FLAT3, constant(0.0), constant(3.0),
                              constant(0.0), 0.0, 1.0)
    assert r.empirical_C == 0.0 and r.lhs_sup == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100))
def test_lhs_invariant_under_scaling(c):
    a, b = harmonic(1.0), harmonic(c)
    assert b.lhs_sup == pytest.approx(a.lhs_sup, rel=1e-14)
    assert b.rhs_bracket_sup == a.rhs_bracket_sup


def test_linear_u_table():
    # frozen: C(R) grows while the bracket shrinks
    expect = {2: (0.006538804057437082, 1.5), 4: (0.010063382067618856, 0.9571067811865476),
              8: (0.014910466642464006, 0.625), 16: (0.021209104807280523, 0.4160533905932738),
              32: (0.029151842974069395, 0.28125)}
    for R, (C, br) in expect.items():
        r = harmonic(R=R)
        assert r.empirical_C == pytest.approx(C, rel=1e-9)
        assert r.rhs_bracket_sup == pytest.approx(br, rel=1e-12)


def test_ex1_estimate_fixture():
    a = catalog.get("ex1").ansatz
    expect = {2: (1.5954451150103321, 0.3857134348245067), 4: (1.0245966692414834, 0.3718071631390359),
              8: (0.6727225575051661, 0.3214047363270643)}
    for R, (br, C) in expect.items():
        r = An.lichnerowicz_estimate(a, An.EstimateConfig(R=R))
        assert r.lhs_sup == pytest.approx(1.6, abs=1e-12)
        assert r.rhs_bracket_sup == pytest.approx(br, rel=1e-9)
        assert r.empirical_C == pytest.approx(C, rel=1e-9)
        assert r.terms["grad_A"] == 0.0
    lines = r.to_csv().splitlines()
    assert lines[0] == "xi,u,grad_log_u,bracket,local_C"
    assert all(math.isfinite(float(x.split(",")[4])) for x in lines[1:])


def test_estimate_errors():
    with pytest.raises(UnsupportedBase):
        An.lichnerowicz_estimate(catalog.get("ex5").ansatz, An.EstimateConfig(R=4))
    with pytest.raises(NotASolution):
        An.empirical_estimate(An.EstimateConfig(R=4), FLAT3, constant(0.0), Builtin("exp", (1.0, 1.0)),
                              constant(0.0), 0.0, 1.0)
    with pytest.raises(InvalidParameters):
        An.EstimateConfig(R=1.0)


@pytest.mark.parametrize("f,verdict", [
    (constant(2.0), "decaying-to-zero"),
    (Builtin("exp", (1.0, 1.0)), "growing"),
    (Builtin("exp", (3.0, 1.0)), "growing"),
    (FunctionProfile(lambda x: np.exp(np.abs(x) ** 0.25), (-math.inf, math.inf)), "decaying-to-zero"),
    (Builtin("exp", (1.0, 1.0)) * Builtin("exp", (1.0, 1.0)), "growing"),
])
def test_growth_probe(f, verdict):
    assert An.growth_probe(f).verdict == verdict


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([constant(2.0), Builtin("cosh", (1.0, 0.001)), Builtin("exp", (1.0, 1.0))]),
       st.floats(0.1, 3.0))
def test_growth_invariant_under_bounded_multiplier(f, k):
    bounded = FunctionProfile(lambda x: 1.0 + np.sin(k * x) ** 2, (-math.inf, math.inf))
    assert An.growth_probe(f * bounded).verdict == An.growth_probe(f).verdict


def test_classifier_is_total():
    tuples = list(An.all_sign_tuples())
    assert len(tuples) == 18
    verdicts = {}
    for s, A, BF in tuples:
        v = An.classify_rigidity(An.RigidityHypotheses(s, A, BF, "asserted", "asserted", "asserted"))
        assert v.verdict in ("Rigid", "Nonexistent", "Undetermined")
        verdicts[(s, A, BF)] = v.verdict
    assert verdicts[("+", "-", "-")] == "Rigid"
    assert verdicts[("+", "0", "0")] == "Rigid"
    assert verdicts[("-", "+", "+")] == "Rigid"
    assert verdicts[("+", "-", "+")] == "Nonexistent"
    assert verdicts[("-", "0", "-")] == "Nonexistent"
    assert verdicts[("+", "-", "0")] == "Undetermined"


@given(st.sampled_from(["+", "-"]), st.sampled_from(An.SIGNS), st.sampled_from(An.SIGNS),
       st.sampled_from(An.SIDE_STATES), st.sampled_from(An.SIDE_STATES), st.sampled_from(An.SIDE_STATES))
def test_side_conditions_only_weaken(s, A, BF, r, g, d):
    full = An.classify_rigidity(An.RigidityHypotheses(s, A, BF, "asserted", "asserted", "asserted"))
    part = An.classify_rigidity(An.RigidityHypotheses(s, A, BF, r, g, d))
    assert part.verdict in (full.verdict, "Undetermined")


def test_incomplete_hypotheses():
    with pytest.raises(IncompleteHypotheses):
        An.classify_rigidity(An.RigidityHypotheses("+", "-", None))


def test_presets():
    r = An.soliton_presets("ricci", 3, 2)
    steady = An.preset_hypotheses(r, 2, 0.0, 1.0)
    assert An.classify_rigidity(steady).verdict == "Nonexistent"
    expanding = An.preset_hypotheses(r, 2, -1.0, -1.0)
    assert An.classify_rigidity(expanding).verdict == "Rigid"
    sch = An.soliton_presets("schouten", 3, 2)
    assert sch.params.rho == pytest.approx(1 / 8)
    with pytest.raises(UnknownPreset):
        An.soliton_presets("nope", 3, 2)
    # unknown base scalar leaves sign_A open when rho != 0
    assert An.preset_hypotheses(sch, 2, -1.0, 1.0).sign_A is None


def test_hypotheses_from_ex1():
    e = catalog.get("ex1")
    h = An.hypotheses_from_ansatz(e.ansatz, e.grid.points(), growth_range=(10, 1e8))
    assert (h.sign_sigma, h.sign_A, h.sign_BF) == ("+", "-", "0")
    assert h.ricci_w_nonneg == "verified" and h.growth_ok == "violated"
    assert An.classify_rigidity(h).verdict == "Undetermined"


def test_all_sign_tuples_cover_product():
    assert set(An.all_sign_tuples()) == set(itertools.product("+-", An.SIGNS, An.SIGNS))
