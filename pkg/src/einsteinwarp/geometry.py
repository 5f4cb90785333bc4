"""Closed-form curvature of the conformally flat base and the warped metric.

All quantities are reduced to the single variable xi. Tensors on the base
have the form ``rank1 * alpha_i alpha_j + iso * delta_ij`` in Euclidean
coordinates. Every function is vectorised: ``xi`` may be a float or an array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import BaseAnsatz, FiberData, WarpedAnsatz
from .errors import NonpositiveProfile, NonpositiveWarp
from .profiles import Jet2, Profile

__all__ = [
    "BaseAnsatz", "FiberData", "RankOneIso", "conformal_ricci", "conformal_scalar",
    "conformal_hessian", "conformal_laplacian", "grad_inner", "grad_norm_sq",
    "warped_scalar", "drifted_laplacian", "bakry_emery_eigs",
]


@dataclass(frozen=True)
class RankOneIso:
    """Coordinate tensor ``rank1 * a_i a_j + iso * delta_ij``."""

    rank1: float | np.ndarray
    iso: float | np.ndarray

    def matrix(self, alpha_bar) -> np.ndarray:
        v = np.asarray(alpha_bar, dtype=float)
        return float(self.rank1) * np.outer(v, v) + float(self.iso) * np.eye(len(v))

    def __add__(self, other: "RankOneIso") -> "RankOneIso":
        return RankOneIso(self.rank1 + other.rank1, self.iso + other.iso)

    def __mul__(self, c) -> "RankOneIso":
        return RankOneIso(c * self.rank1, c * self.iso)

    __rmul__ = __mul__


def psi_jet(base: BaseAnsatz, xi) -> Jet2:
    j = base.psi.jet(xi)
    if np.any(np.asarray(j.value) <= 0):
        raise NonpositiveProfile("conformal factor Psi must be positive")
    return j


def warp_jet(f: Profile, xi) -> Jet2:
    j = f.jet(xi)
    if np.any(np.asarray(j.value) <= 0):
        raise NonpositiveWarp("warping function f must be positive")
    return j


def conformal_ricci(base: BaseAnsatz, xi) -> RankOneIso:
    P = psi_jet(base, xi)
    n, a = base.n, base.a
    psi, d1, d2 = P.astuple()
    rank1 = (n - 2) * d2 / psi
    iso = a * (psi * d2 - (n - 1) * d1**2) / psi**2
    return RankOneIso(rank1, iso)


def conformal_scalar(base: BaseAnsatz, xi):
    psi, d1, d2 = psi_jet(base, xi).astuple()
    n = base.n
    return base.a * (n - 1) * (2.0 * psi * d2 - n * d1**2)


def conformal_hessian(base: BaseAnsatz, p: Profile, xi) -> RankOneIso:
    psi, dpsi, _ = psi_jet(base, xi).astuple()
    _, p1, p2 = p.jet(xi).astuple()
    return RankOneIso(p2 + 2.0 * dpsi * p1 / psi, -base.a * dpsi * p1 / psi)


def conformal_laplacian(base: BaseAnsatz, p: Profile, xi):
    psi, dpsi, _ = psi_jet(base, xi).astuple()
    _, p1, p2 = p.jet(xi).astuple()
    return base.a * psi**2 * (p2 - (base.n - 2) * dpsi * p1 / psi)


def grad_inner(base: BaseAnsatz, p: Profile, q: Profile, xi):
    psi = psi_jet(base, xi).value
    return base.a * psi**2 * p.jet(xi).d1 * q.jet(xi).d1


def grad_norm_sq(base: BaseAnsatz, p: Profile, xi):
    psi = psi_jet(base, xi).value
    return base.a * psi**2 * p.jet(xi).d1 ** 2


def drifted_laplacian(base: BaseAnsatz, w: Profile, u: Profile, xi):
    """``Delta u - <grad w, grad u>`` in the base metric."""
    return conformal_laplacian(base, u, xi) - grad_inner(base, w, u, xi)


def bakry_emery_eigs(base: BaseAnsatz, w: Profile, xi):
    """Eigenvalues of ``Ric + Hess w`` in a g_B-orthonormal frame.

    Returns ``(lambda_parallel, lambda_perp)``; the parallel direction is
    alpha_bar, the perpendicular eigenvalue has multiplicity n-1.
    """
    t = conformal_ricci(base, xi) + conformal_hessian(base, w, xi)
    psi2 = psi_jet(base, xi).value ** 2
    return psi2 * (t.rank1 * base.a + t.iso), psi2 * t.iso


def warped_scalar(a: WarpedAnsatz, xi, include_fiber: bool = True):
    """Scalar curvature of ``g_B + f^2 g_F``.

    With ``include_fiber`` off the fiber term ``m theta / f^2`` is dropped,
    which is the form that ignores the fiber's own curvature.
    """
    m = a.fiber.m
    fv = warp_jet(a.f, xi).value
    R = (
        conformal_scalar(a.base, xi)
        - 2.0 * m * conformal_laplacian(a.base, a.f, xi) / fv
        - m * (m - 1) * grad_norm_sq(a.base, a.f, xi) / fv**2
    )
    if include_fiber:
        R = R + a.fiber.scalar / fv**2
    return R
