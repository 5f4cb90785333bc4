"""Change of variables u = f^(1/sigma) turning the fiber equation into a
Lichnerowicz-type PDE on the base,

    sigma Delta_w u + A u + B u^(1 - 2 sigma) = 0,

and the general drifted form  Delta_phi u + A u + B u^eps = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ansatz import BaseAnsatz, Params, WarpedAnsatz
from .errors import ForbiddenParameters, NonpositiveU, NonpositiveWarp, OutOfDomain
from .geometry import conformal_scalar, drifted_laplacian
from .profiles import FunctionProfile, Profile, power_of, scaled


def sigma(p: Params, m: int) -> float:
    """``(alpha - 2 m rho) / (m (alpha - rho (1 + m)))``."""
    num = p.alpha - 2 * m * p.rho
    den = m * (p.alpha - p.rho * (1 + m))
    if num == 0 or den == 0:
        raise ForbiddenParameters("alpha must avoid 2*m*rho and (1+m)*rho")
    return num / den


@dataclass(frozen=True)
class LichnerowiczData:
    sigma: float
    w: Profile
    u: Profile
    coeff_A: Profile
    coeff_B: float
    epsilon: float
    f: Profile
    A_constant: float | None = None

    def with_u(self, u: Profile) -> "LichnerowiczData":
        return replace(self, u=u)

    def theorem2_form(self):
        """``(phi, A, B, eps)`` of the general drifted PDE (everything divided by sigma)."""
        return self.w, scaled(self.coeff_A, 1.0 / self.sigma), self.coeff_B / self.sigma, self.epsilon


def build(a: WarpedAnsatz, theta: float | None = None) -> LichnerowiczData:
    """Assemble the PDE data of ``a``; ``theta`` overrides the fiber constant."""
    p, m = a.params, a.m
    s = sigma(p, m)
    c = p.alpha - 2 * m * p.rho
    lo, hi = a.domain
    lo, hi = max(lo, min(-10.0, hi - 20.0)), min(hi, max(10.0, lo + 20.0))
    probe = np.linspace(lo, hi, 65)[1:-1]
    if np.any(np.asarray(a.f(probe)) <= 0):
        raise NonpositiveWarp("warping function must be positive")
    th = a.fiber.theta if theta is None else float(theta)
    base, lam = a.base, a.lam

    def A(x):
        return (p.rho * conformal_scalar(base, x) + lam(x)) / c

    A_prof = FunctionProfile(A, a.domain, label="(rho R_B + lambda)/(alpha - 2 m rho)")
    a_const = None
    vals = np.asarray(A(probe))
    if np.ptp(vals) <= 1e-12 * max(1.0, np.max(np.abs(vals))):
        a_const = float(np.mean(vals))
    return LichnerowiczData(
        sigma=s,
        w=scaled(a.h, p.beta / c),
        u=power_of(a.f, 1.0 / s),
        coeff_A=A_prof,
        coeff_B=-(p.alpha - m * p.rho) * th / c + 0.0,
        epsilon=1.0 - 2.0 * s,
        f=a.f,
        A_constant=a_const,
    )


def _u_jet(L_u: Profile, f: Profile | None, xi):
    try:
        J = L_u.jet(xi)
    except OutOfDomain:
        if f is not None and f.contains(xi) and np.any(np.asarray(f(xi)) <= 0):
            raise NonpositiveU("u = f^(1/sigma) needs f > 0") from None
        raise
    if np.any(np.asarray(J.value) <= 0):
        raise NonpositiveU("u must be positive")
    return J


def _pow(u, eps):
    return np.exp(eps * np.log(u))


def pde_residual(L: LichnerowiczData, base: BaseAnsatz, xi):
    """``sigma Delta_w u + A u + B u^eps``."""
    u = _u_jet(L.u, L.f, xi).value
    return (
        L.sigma * drifted_laplacian(base, L.w, L.u, xi)
        + L.coeff_A(xi) * u
        + L.coeff_B * _pow(u, L.epsilon)
    )


def general_pde_residual(base: BaseAnsatz, phi: Profile, u: Profile, A: Profile, B: float, eps: float, xi):
    """``Delta_phi u + A u + B u^eps``."""
    uv = _u_jet(u, None, xi).value
    return drifted_laplacian(base, phi, u, xi) + A(xi) * uv + B * _pow(uv, eps)


def log_gradient_norm(base: BaseAnsatz, u: Profile, xi):
    """``|grad ln u|`` in the base metric."""
    J = _u_jet(u, None, xi)
    psi = base.psi(xi)
    return np.sqrt(base.a) * psi * np.abs(J.d1 / J.value)


__all__ = [
    "LichnerowiczData", "sigma", "build", "pde_residual", "general_pde_residual",
    "log_gradient_norm",
]
