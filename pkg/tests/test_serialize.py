import json
import math

import numpy as np
import pytest

from einsteinwarp import catalog, serialize as S, system
from einsteinwarp.ansatz import FiberData
from einsteinwarp.errors import ParseError
from einsteinwarp.solver import ConstructionSpec, construct


def _report_numbers(r):
    return {k: v[0] for k, v in r.per_equation.items()}


@pytest.mark.parametrize("entry", catalog.ids())
def test_round_trip_reverifies_identically(entry):
    e = catalog.get(entry)
    grid = (e.grid.lo, e.grid.hi, e.grid.count)
    text = S.dumps(S.ansatz_to_dict(e.ansatz, grid))
    a2, g2 = S.ansatz_from_dict(json.loads(text))
    assert g2 == grid
    r1, r2 = system.verify(e.ansatz, e.grid), system.verify(a2, system.Grid(*g2))
    assert r1.verdict == r2.verdict
    n1, n2 = _report_numbers(r1), _report_numbers(r2)
    assert n1.keys() == n2.keys()
    assert all(abs(n1[k] - n2[k]) <= 1e-12 for k in n1)
    # serialising the parsed ansatz again gives the same document
    assert S.dumps(S.ansatz_to_dict(a2, g2)) == text


def test_constructed_ansatz_round_trip():
    a = catalog.get("ex1").ansatz
    spec = ConstructionSpec(a.base, a.f, a.params, 2, (0.0, 0.0, math.sqrt(2)), (-2.0, 2.0, 201))
    b, r = construct(spec, FiberData(2))
    d = json.loads(S.dumps(S.ansatz_to_dict(b, spec.grid)))
    assert d["h"]["kind"] == "spline" and "d3y" in d["h"]["knots"]
    c, g = S.ansatz_from_dict(d)
    r2 = system.verify(c, system.Grid(*g))
    assert r2.verdict == "pass"
    xs = np.linspace(-2, 2, 77)
    assert np.max(np.abs(c.h(xs) - b.h(xs))) < 1e-14


def test_spec_round_trip():
    a = catalog.get("ex1").ansatz
    spec = ConstructionSpec(a.base, a.f, a.params, 2, (0.0, 0.0, 1.0), (-1.0, 1.0, 51), max_step=math.inf)
    fiber = FiberData(2, 0.0, "euclidean")
    s2, f2 = S.spec_from_dict(json.loads(S.dumps(S.spec_to_dict(spec, fiber))))
    assert f2 == fiber
    assert (s2.initial, s2.grid, s2.rtol, s2.cap, s2.max_step) == (spec.initial, spec.grid, spec.rtol,
                                                                  spec.cap, spec.max_step)


@pytest.mark.parametrize("doc", [
    {},
    {"base": {"n": 3, "psi": {"kind": "constant", "coeffs": [1]}}},
    {"base": {"n": 3, "psi": {"kind": "nope"}}, "fiber": {"m": 2}, "f": {}, "h": {}, "lambda": {},
     "params": {"alpha": 1, "beta": 1, "mu": 0, "rho": 0}},
    {"base": {"n": 1, "psi": {"kind": "constant", "coeffs": [1]}}, "fiber": {"m": 2},
     "f": {"kind": "constant", "coeffs": [1]}, "h": {"kind": "constant", "coeffs": [0]},
     "lambda": {"kind": "constant", "coeffs": [0]}, "params": {"alpha": 1, "beta": 1, "mu": 0, "rho": 0}},
])
def test_malformed_ansatz(doc):
    with pytest.raises(ParseError):
        S.ansatz_from_dict(doc)


def test_load_json_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{bad")
    with pytest.raises(ParseError):
        S.load_json(p)
    with pytest.raises(ParseError):
        S.load_json(tmp_path / "missing.json")


def test_dumps_handles_non_finite():
    assert json.loads(S.dumps({"x": math.inf, "y": np.float64(2.5), "z": math.nan})) == {
        "x": "Infinity", "y": 2.5, "z": None}
