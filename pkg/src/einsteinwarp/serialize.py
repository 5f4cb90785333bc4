"""JSON forms of ansatz, construction specs and reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .ansatz import BaseAnsatz, FiberData, Params, WarpedAnsatz
from .errors import EinsteinWarpError, ParseError
from .profiles import FunctionProfile, Profile, profile_from_dict
from .solver import ConstructionSpec

SAMPLE_COUNT = 401


def profile_to_dict(p: Profile, interval=None, count: int = SAMPLE_COUNT) -> dict:
    """JSON form of a profile; function profiles are sampled to a quintic spline on ``interval``."""
    if isinstance(p, FunctionProfile):
        lo, hi = interval if interval is not None else p.domain
        return p.to_spline(lo, hi, count).to_dict()
    return p.to_dict()


def params_to_dict(p: Params) -> dict:
    return {"alpha": p.alpha, "beta": p.beta, "mu": p.mu, "rho": p.rho}


def base_to_dict(b: BaseAnsatz, interval=None) -> dict:
    return {"n": b.n, "alpha_bar_norm_sq": b.a, "psi": profile_to_dict(b.psi, interval)}


def fiber_to_dict(f: FiberData) -> dict:
    return {"m": f.m, "theta": f.theta, "chart": f.chart}


def ansatz_to_dict(a: WarpedAnsatz, grid=None) -> dict:
    interval = None if grid is None else (grid[0], grid[1])
    count = SAMPLE_COUNT if grid is None else int(grid[2])
    out = {
        "name": a.name,
        "base": base_to_dict(a.base, interval),
        "fiber": fiber_to_dict(a.fiber),
        "f": profile_to_dict(a.f, interval, count),
        "h": profile_to_dict(a.h, interval, count),
        "lambda": profile_to_dict(a.lam, interval, count),
        "params": params_to_dict(a.params),
    }
    if grid is not None:
        out["grid"] = {"xi_min": grid[0], "xi_max": grid[1], "count": int(grid[2])}
    return out


def spec_to_dict(s: ConstructionSpec, fiber: FiberData) -> dict:
    return {
        "base": base_to_dict(s.base),
        "fiber": fiber_to_dict(fiber),
        "f": profile_to_dict(s.f),
        "params": params_to_dict(s.params),
        "initial": {"xi0": s.initial[0], "h0": s.initial[1], "dh0": s.initial[2]},
        "grid": {"xi_min": s.grid[0], "xi_max": s.grid[1], "count": s.grid[2]},
        "tolerance": s.rtol,
        "cap": s.cap,
        "max_step": s.max_step,
    }


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"missing '{key}' in {where}")
    return d[key]


def _params(d) -> Params:
    return Params(*(float(_require(d, k, "params")) for k in ("alpha", "beta", "mu", "rho")))


def _base(d) -> BaseAnsatz:
    return BaseAnsatz(int(_require(d, "n", "base")), float(d.get("alpha_bar_norm_sq", 1.0)),
                      profile_from_dict(_require(d, "psi", "base")))


def _fiber(d) -> FiberData:
    return FiberData(int(_require(d, "m", "fiber")), float(d.get("theta", 0.0)), d.get("chart", "euclidean"))


def _grid(d):
    g = d.get("grid")
    if g is None:
        return None
    if isinstance(g, (list, tuple)):
        return (float(g[0]), float(g[1]), int(g[2]))
    return (float(_require(g, "xi_min", "grid")), float(_require(g, "xi_max", "grid")), int(g.get("count", 401)))


def _wrap(fn, d):
    try:
        return fn(d)
    except ParseError:
        raise
    except (EinsteinWarpError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"{type(exc).__name__}: {exc}") from exc


def ansatz_from_dict(d: dict) -> tuple[WarpedAnsatz, tuple | None]:
    """Parse an ansatz; returns ``(ansatz, grid)`` where grid may be None."""

    def go(d):
        a = WarpedAnsatz(
            base=_base(_require(d, "base", "ansatz")),
            fiber=_fiber(_require(d, "fiber", "ansatz")),
            f=profile_from_dict(_require(d, "f", "ansatz")),
            h=profile_from_dict(_require(d, "h", "ansatz")),
            lam=profile_from_dict(_require(d, "lambda", "ansatz")),
            params=_params(_require(d, "params", "ansatz")),
            name=d.get("name", ""),
        )
        return a, _grid(d)

    return _wrap(go, d)


def spec_from_dict(d: dict) -> tuple[ConstructionSpec, FiberData]:
    def go(d):
        fiber = _fiber(_require(d, "fiber", "spec"))
        init = _require(d, "initial", "spec")
        if isinstance(init, dict):
            init = (init["xi0"], init["h0"], init["dh0"])
        grid = _grid(d)
        if grid is None:
            raise ParseError("missing 'grid' in spec")
        tol = float(d.get("tolerance", 1e-10))
        s = ConstructionSpec(
            base=_base(_require(d, "base", "spec")),
            f=profile_from_dict(_require(d, "f", "spec")),
            params=_params(_require(d, "params", "spec")),
            m=fiber.m,
            initial=tuple(float(v) for v in init),
            grid=grid,
            rtol=tol,
            atol=tol,
            cap=float(d.get("cap", 1e8)),
            max_step=None if d.get("max_step") is None else float(d["max_step"]),
        )
        return s, fiber

    return _wrap(go, d)


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def dumps(obj) -> str:
    """JSON with full double precision (repr round-trip) and non-finite values spelled out."""
    return json.dumps(_clean(obj), indent=2)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("Infinity" if obj > 0 else "-Infinity")
    return obj
