"""Quantitative consequences: gradient-estimate probe, growth probe of the
warping function, and the rigidity / nonexistence classifier.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ansatz import BaseAnsatz, Params, WarpedAnsatz
from .errors import (
    BracketZero,
    IncompleteHypotheses,
    InvalidParameters,
    NotASolution,
    OutOfDomain,
    UnknownPreset,
    UnsupportedBase,
)
from .geometry import bakry_emery_eigs, psi_jet
from .lichnerowicz import build, general_pde_residual, log_gradient_norm, sigma
from .profiles import Profile

# ---------------------------------------------------------------------------
# gradient estimate probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimateConfig:
    """Ball and constants of the estimate; ``None`` fields are filled from the data.

    Defaults follow the harmonic-function normalisation ``p = 1``,
    ``q = 1 + ln D``, ``delta = 1`` with ``D = sup u`` on the ball.
    """

    R: float
    x0: float = 0.0
    p: float = 1.0
    q: float | None = None
    delta: float = 1.0
    D: float | None = None
    K: float | None = None
    gamma: float | None = None
    count: int = 401

    def __post_init__(self):
        if not self.R >= 2:
            raise InvalidParameters("ball radius R must be >= 2")
        if not self.p > 0 or not self.delta > 0:
            raise InvalidParameters("p and delta must be positive")
        if self.K is not None and self.K < 0:
            raise InvalidParameters("K must be >= 0")


@dataclass
class EstimateResult:
    lhs_sup: float
    rhs_bracket_sup: float
    empirical_C: float
    config: dict
    terms: dict
    table: list = field(repr=False, default_factory=list)

    COLUMNS = ("xi", "u", "grad_log_u", "bracket", "local_C")

    def to_dict(self):
        return {
            "lhs_sup": self.lhs_sup,
            "rhs_bracket_sup": self.rhs_bracket_sup,
            "empirical_C": self.empirical_C,
            "config": self.config,
            "terms": self.terms,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for row in self.table:
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()


def _ball(cfg: EstimateConfig, base: BaseAnsatz, radius: float, count: int):
    s = math.sqrt(base.a)
    return np.linspace(cfg.x0 - radius * s, cfg.x0 + radius * s, count)


def empirical_estimate(
    cfg: EstimateConfig,
    base: BaseAnsatz,
    phi: Profile,
    u: Profile,
    A: Profile,
    B: float,
    eps: float,
    residual_tol: float = 1e-6,
) -> EstimateResult:
    """Evaluate both sides of the log-gradient estimate on a flat base.

    Along the alpha_bar line the distance to the centre is
    ``|xi - x0| / |alpha_bar|``. The left side ``|grad ln u|`` is sampled on
    the half ball, the bracket on the whole ball, and ``empirical_C`` is the
    largest ratio ``lhs / ((q - p ln u) bracket)``.
    """
    if not base.is_euclidean:
        raise UnsupportedBase("the estimate probe needs a flat base (Psi == 1)")
    n, a = base.n, base.a
    xs = _ball(cfg, base, cfg.R, cfg.count)
    for prof in (phi, u, A):
        if not prof.contains(xs):
            raise OutOfDomain(f"ball [{xs[0]:g}, {xs[-1]:g}] leaves a profile domain {prof.domain}")
    uv = np.asarray(u(xs), dtype=float)
    res = np.asarray(general_pde_residual(base, phi, u, A, B, eps, xs), dtype=float)
    scale = max(1.0, float(np.max(np.abs(uv))))
    if not np.max(np.abs(res)) <= residual_tol * scale:
        raise NotASolution(f"PDE residual {np.max(np.abs(res)):.3e} exceeds {residual_tol:g} * {scale:.3g}")

    D = float(np.max(uv)) if cfg.D is None else cfg.D
    if np.any(uv > D * (1 + 1e-12)):
        raise InvalidParameters("D is not an upper bound for u on the ball")
    p = cfg.p
    q = 1.0 + p * math.log(D) if cfg.q is None else cfg.q
    gap = q - p * np.log(uv)
    if np.any(gap < cfg.delta * (1 - 1e-12)):
        raise InvalidParameters("q - p ln u >= delta fails on the ball")

    if cfg.K is None:
        lp, lq = bakry_emery_eigs(base, phi, xs)
        low = min(float(np.min(lp)), float(np.min(lq)))
        K = max(0.0, -low) / (n - 1)
    else:
        K = cfg.K
    if cfg.gamma is None:
        # drifted Laplacian of r on the unit sphere: (n-1) - t phi'(x0 + t), |t| <= |alpha_bar|
        ts = np.linspace(-math.sqrt(a), math.sqrt(a), 201)
        gamma = float(np.max((n - 1) - ts * phi.jet(cfg.x0 + ts).d1))
    else:
        gamma = cfg.gamma

    Aj = A.jet(xs)
    psi = psi_jet(base, xs).value
    gradA = math.sqrt(a) * psi * np.abs(Aj.d1)
    # finite-difference noise in A' would otherwise survive the cube root
    floor = 1e-10 * max(1.0, float(np.max(np.abs(Aj.value))))
    gradA = np.where(gradA < floor, 0.0, gradA)
    nonlin = np.maximum((eps - 1.0 + p / gap) * B, 0.0)
    terms = {
        "inv_R": 1.0 / cfg.R,
        "sqrt_K": math.sqrt(K),
        "gamma_term": math.sqrt(max(gamma, 0.0)) / math.sqrt(cfg.R),
        "grad_A": float(np.max(gradA)) ** (1.0 / 3.0),
        "A_plus": math.sqrt(max(float(np.max(Aj.value)), 0.0)),
        "nonlinear": float(np.max(np.sqrt(nonlin))) * float(np.max(uv ** ((eps - 1.0) / 2.0))),
    }
    bracket = float(sum(terms.values()))

    half = _ball(cfg, base, cfg.R / 2.0, cfg.count)
    uh = np.asarray(u(half), dtype=float)
    lhs = np.asarray(log_gradient_norm(base, u, half), dtype=float)
    lhs_sup = float(np.max(lhs))
    gap_h = q - p * np.log(uh)
    if bracket == 0.0:
        if lhs_sup > 0:
            raise BracketZero("every bracket term vanishes while |grad ln u| > 0")
        local = np.zeros_like(lhs)
    else:
        local = lhs / (gap_h * bracket)
    table = [tuple(float(v) for v in row) for row in zip(half, uh, lhs, np.full_like(half, bracket), local)]
    return EstimateResult(
        lhs_sup=lhs_sup,
        rhs_bracket_sup=bracket,
        empirical_C=float(np.max(local)),
        config={"R": cfg.R, "x0": cfg.x0, "p": p, "q": q, "delta": cfg.delta, "D": D, "K": K, "gamma": gamma},
        terms=terms,
        table=table,
    )


def lichnerowicz_estimate(a: WarpedAnsatz, cfg: EstimateConfig) -> EstimateResult:
    """Run the probe on the PDE data ``(w, u, A/sigma, B/sigma, eps)`` of an ansatz."""
    L = build(a)
    phi, A, B, eps = L.theorem2_form()
    return empirical_estimate(cfg, a.base, phi, L.u, A, B, eps)


# ---------------------------------------------------------------------------
# growth probe
# ---------------------------------------------------------------------------

GROWTH_VERDICTS = ("decaying-to-zero", "bounded-nonzero", "growing")


@dataclass
class GrowthReport:
    xi: np.ndarray
    q: np.ndarray
    slope: float
    verdict: str

    def to_dict(self):
        return {"xi": self.xi.tolist(), "q": self.q.tolist(), "slope": self.slope, "verdict": self.verdict}


def growth_probe(f: Profile, xi_range=(10.0, 1e8), count: int = 64, blocks: int = 8,
                 threshold: float = 0.1) -> GrowthReport:
    """Trend of ``q(xi) = ln f(xi) / sqrt|xi|`` at geometrically spaced xi.

    The verdict comes from the log-log slope of block maxima of ``|q|``:
    above ``threshold`` it is growing, below ``-threshold`` decaying to zero,
    otherwise bounded away from zero. This is a numerical indicator only.
    """
    lo, hi = (float(x) for x in xi_range)
    if lo * hi <= 0 or abs(hi) <= abs(lo):
        raise InvalidParameters("xi_range must lie on one side of 0 and grow in |xi|")
    sign = 1.0 if lo > 0 else -1.0
    mags = np.geomspace(abs(lo), abs(hi), count)
    xs = sign * mags
    if not f.contains(xs):
        raise OutOfDomain(f"growth range leaves the domain {f.domain}")
    logf = np.asarray(f.log_value(xs), dtype=float)
    q = logf / np.sqrt(mags)
    absq = np.abs(q)
    if np.all(absq == 0):
        return GrowthReport(xs, q, -math.inf, "decaying-to-zero")
    chunks = np.array_split(np.arange(count), blocks)
    cx = np.array([np.log(mags[c]).mean() for c in chunks])
    cy = np.array([np.max(absq[c]) for c in chunks])
    tiny = np.finfo(float).tiny
    slope = float(np.polyfit(cx, np.log(np.maximum(cy, tiny)), 1)[0])
    if slope > threshold:
        verdict = "growing"
    elif slope < -threshold:
        verdict = "decaying-to-zero"
    else:
        verdict = "bounded-nonzero"
    return GrowthReport(xs, q, slope, verdict)


# ---------------------------------------------------------------------------
# rigidity / nonexistence classifier
# ---------------------------------------------------------------------------

SIGNS = ("+", "-", "0")
SIDE_STATES = ("verified", "asserted", "unknown", "violated")

CLAUSES = {
    "rigid-a": "rigidity (a): sigma > 0, A < 0 and B_F < 0, or A = B_F = 0",
    "rigid-b": "rigidity (b): sigma < 0, A > 0 and B_F > 0, or A = B_F = 0",
    "nonexistent-a": "nonexistence (a): sigma > 0, A <= 0, B_F > 0",
    "nonexistent-b": "nonexistence (b): sigma < 0, A >= 0, B_F < 0",
    "nonexistent-einstein": "nonexistence for constant potential: sigma > 0, A < 0, B_F >= 0",
}


@dataclass(frozen=True)
class RigidityHypotheses:
    """Sign data and side conditions for the classifier.

    ``sign_A`` is the sign of ``(rho R_B + lambda)/(alpha - 2 m rho)``,
    ``sign_BF`` that of ``R_F (alpha - m rho)/(alpha - 2 m rho)``. Side
    conditions are one of ``verified`` (checked on a grid), ``asserted``
    (taken from the user), ``unknown`` or ``violated``.
    """

    sign_sigma: str | None = None
    sign_A: str | None = None
    sign_BF: str | None = None
    ricci_w_nonneg: str = "unknown"
    growth_ok: str = "unknown"
    gradient_decay: str = "unknown"

    def missing(self) -> list[str]:
        return [k for k in ("sign_sigma", "sign_A", "sign_BF") if getattr(self, k) is None]

    def validate(self):
        miss = self.missing()
        if miss:
            raise IncompleteHypotheses(f"missing {', '.join(miss)}")
        if self.sign_sigma not in ("+", "-"):
            raise InvalidParameters("sign_sigma must be '+' or '-'")
        for k in ("sign_A", "sign_BF"):
            if getattr(self, k) not in SIGNS:
                raise InvalidParameters(f"{k} must be one of {SIGNS}")
        for k in ("ricci_w_nonneg", "growth_ok", "gradient_decay"):
            if getattr(self, k) not in SIDE_STATES:
                raise InvalidParameters(f"{k} must be one of {SIDE_STATES}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class RigidityVerdict:
    verdict: str
    clause: str | None
    description: str
    hypotheses: RigidityHypotheses
    notes: tuple = ()

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "clause": self.clause,
            "description": self.description,
            "hypotheses": self.hypotheses.to_dict(),
            "notes": list(self.notes),
        }


def _sign_clause(s: str, A: str, BF: str) -> tuple[str | None, str | None]:
    if s == "+":
        if (A, BF) in (("-", "-"), ("0", "0")):
            return "Rigid", "rigid-a"
        if A in ("-", "0") and BF == "+":
            return "Nonexistent", "nonexistent-a"
    else:
        if (A, BF) in (("+", "+"), ("0", "0")):
            return "Rigid", "rigid-b"
        if A in ("+", "0") and BF == "-":
            return "Nonexistent", "nonexistent-b"
    return None, None


def classify_rigidity(h: RigidityHypotheses) -> RigidityVerdict:
    """Total map from hypotheses to ``Rigid`` / ``Nonexistent`` / ``Undetermined``."""
    h.validate()
    verdict, clause = _sign_clause(h.sign_sigma, h.sign_A, h.sign_BF)
    if verdict is None:
        return RigidityVerdict("Undetermined", None, "no sign clause applies", h)
    bad = [k for k in ("ricci_w_nonneg", "growth_ok", "gradient_decay")
           if getattr(h, k) not in ("verified", "asserted")]
    if bad:
        return RigidityVerdict(
            "Undetermined", clause, CLAUSES[clause], h,
            notes=tuple(f"side condition {k} is {getattr(h, k)}" for k in bad),
        )
    return RigidityVerdict(verdict, clause, CLAUSES[clause], h)


def sign_of(x: float, tol: float = 0.0) -> str:
    if x > tol:
        return "+"
    if x < -tol:
        return "-"
    return "0"


def _uniform_sign(values, tol) -> str:
    signs = {sign_of(float(v), tol) for v in np.atleast_1d(values)}
    if len(signs) != 1:
        raise IncompleteHypotheses(f"sign changes along the grid: {sorted(signs)}")
    return signs.pop()


def hypotheses_from_ansatz(a: WarpedAnsatz, xs, tol: float = 1e-9, gradient_decay: str = "unknown",
                           growth_range=None) -> RigidityHypotheses:
    """Fill the sign data by evaluation on ``xs``; the curvature condition is grid-checked.

    The growth condition is probed when ``growth_range`` is given, else left
    ``unknown``; gradient decay can only be asserted by the caller.
    """
    p, m = a.params, a.m
    s = sigma(p, m)
    L = build(a)
    A = np.asarray(L.coeff_A(xs))
    BF = a.fiber.scalar * (p.alpha - m * p.rho) / (p.alpha - 2 * m * p.rho)
    lp, lq = bakry_emery_eigs(a.base, L.w, xs)
    ric_ok = "verified" if min(np.min(lp), np.min(lq)) >= -tol else "violated"
    growth = "unknown"
    if growth_range is not None:
        g = growth_probe(a.f, growth_range)
        growth = {"decaying-to-zero": "verified", "growing": "violated"}.get(g.verdict, "unknown")
    return RigidityHypotheses(
        sign_sigma=sign_of(s),
        sign_A=_uniform_sign(A, tol),
        sign_BF=sign_of(BF, tol),
        ricci_w_nonneg=ric_ok,
        growth_ok=growth,
        gradient_decay=gradient_decay,
    )


# ---------------------------------------------------------------------------
# soliton presets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Preset:
    name: str
    params: Params
    lambda_role: str
    h_constant: bool = False


PRESET_NAMES = ("ricci", "einstein-manifold", "einstein-soliton", "traceless", "schouten")


def soliton_presets(name: str, n: int, m: int) -> Preset:
    """Structure constants of the classical soliton families in dimension d = n + m."""
    d = n + m
    if name == "ricci":
        return Preset(name, Params(1.0, 1.0, 0.0, 0.0),
                      "constant: 0 steady, < 0 expanding, > 0 shrinking")
    if name == "einstein-manifold":
        return Preset(name, Params(1.0, 0.0, 0.0, 0.0), "Einstein constant R_g / d", h_constant=True)
    if name == "einstein-soliton":
        return Preset(name, Params(1.0, 1.0, 0.0, 0.5), "soliton function of a rho-Einstein soliton")
    if name == "traceless":
        return Preset(name, Params(1.0, 1.0, 0.0, 1.0 / d), "soliton function of a rho-Einstein soliton")
    if name == "schouten":
        return Preset(name, Params(1.0, 1.0, 0.0, 1.0 / (2.0 * (d - 1))),
                      "soliton function of a rho-Einstein soliton")
    raise UnknownPreset(f"unknown preset {name!r}; known: {PRESET_NAMES}")


def preset_hypotheses(
    preset: Preset,
    m: int,
    lam: float | None,
    fiber_scalar: float | None,
    base_scalar: float | None = None,
    ricci_w_nonneg: str = "asserted",
    growth_ok: str = "asserted",
    gradient_decay: str = "asserted",
) -> RigidityHypotheses:
    """Sign tuple of a preset given constant lambda, R_F and (when rho != 0) R_B.

    Unknown inputs leave the corresponding sign empty, which the classifier
    reports as incomplete.
    """
    p = preset.params
    s = sigma(p, m)
    c = p.alpha - 2 * m * p.rho
    sign_A = None
    if lam is not None and (p.rho == 0 or base_scalar is not None):
        sign_A = sign_of((p.rho * (base_scalar or 0.0) + lam) / c)
    sign_BF = None if fiber_scalar is None else sign_of(fiber_scalar * (p.alpha - m * p.rho) / c)
    return RigidityHypotheses(sign_of(s), sign_A, sign_BF, ricci_w_nonneg, growth_ok, gradient_decay)


def classify_preset(preset: Preset, h: RigidityHypotheses) -> RigidityVerdict:
    """Classifier with the refinement available when the potential is constant.

    With h constant the drift disappears, and a constant u forces
    ``R_F / m * u^(-2/m) = lambda``. Hence ``A < 0`` rules out ``B_F = 0`` as
    well, a case the general sign clauses leave open.
    """
    v = classify_rigidity(h)
    if not preset.h_constant or v.verdict != "Undetermined" or v.clause is not None:
        return v
    if (h.sign_sigma, h.sign_A, h.sign_BF) != ("+", "-", "0"):
        return v
    bad = [k for k in ("ricci_w_nonneg", "growth_ok", "gradient_decay")
           if getattr(h, k) not in ("verified", "asserted")]
    clause = "nonexistent-einstein"
    if bad:
        return RigidityVerdict("Undetermined", clause, CLAUSES[clause], h,
                               notes=tuple(f"side condition {k} is {getattr(h, k)}" for k in bad))
    return RigidityVerdict("Nonexistent", clause, CLAUSES[clause], h)


def all_sign_tuples():
    for s in ("+", "-"):
        for A in SIGNS:
            for BF in SIGNS:
                yield s, A, BF
