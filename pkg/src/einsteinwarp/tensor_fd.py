"""Finite-difference curvature of an explicit coordinate metric.

This is the independent route used to cross-check the reduced formulas:
nothing here knows about the ansatz. Christoffel symbols come from central
differences of the metric, the Ricci tensor from central differences of the
Christoffel symbols.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

# central-difference stencils (offsets, weights) for the first derivative
_STENCILS = {
    2: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    4: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
}


def _partials(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float, order: int):
    """Stack of ``d fn / d x_k`` for every coordinate k (first axis)."""
    offs, wts = _STENCILS[order]
    out = []
    for k in range(len(x)):
        acc = 0.0
        for o, w in zip(offs, wts):
            xs = x.copy()
            xs[k] += o * step
            acc = acc + w * np.asarray(fn(xs))
        out.append(acc / step)
    return np.array(out)


class MetricFD:
    """Curvature of ``metric(x) -> (N, N)`` by nested finite differences."""

    def __init__(self, metric: Callable[[np.ndarray], np.ndarray], step: float = 1e-4, order: int = 2):
        if order not in _STENCILS:
            raise ValueError("order must be 2 or 4")
        self.metric = metric
        self.step = step
        self.order = order

    def christoffel(self, x) -> np.ndarray:
        """``G[k, i, j] = Gamma^k_ij``."""
        x = np.asarray(x, dtype=float)
        g = self.metric(x)
        ginv = np.linalg.inv(g)
        dg = _partials(self.metric, x, self.step, self.order)  # dg[l, i, j] = d_l g_ij
        # lower-index symbols [ij, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
        low = 0.5 * (
            np.einsum("ijl->ijl", dg)
            + np.einsum("jil->ijl", dg)
            - np.einsum("lij->ijl", dg)
        )
        return np.einsum("kl,ijl->kij", ginv, low)

    def ricci(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        G = self.christoffel(x)
        dG = _partials(self.christoffel, x, self.step, self.order)  # dG[l, k, i, j]
        term1 = np.einsum("kkij->ij", dG)
        term2 = np.einsum("jkik->ij", dG)
        term3 = np.einsum("kkl,lij->ij", G, G)
        term4 = np.einsum("kjl,lik->ij", G, G)
        ric = term1 - term2 + term3 - term4
        return 0.5 * (ric + ric.T)

    def scalar(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.einsum("ij,ij->", np.linalg.inv(self.metric(x)), self.ricci(x)))

    def gradient(self, fn: Callable[[np.ndarray], float], x) -> np.ndarray:
        return _partials(fn, np.asarray(x, dtype=float), self.step, self.order)

    def hessian(self, fn: Callable[[np.ndarray], float], x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d2 = _partials(lambda y: self.gradient(fn, y), x, self.step, self.order)
        d2 = 0.5 * (d2 + d2.T)
        return d2 - np.einsum("kij,k->ij", self.christoffel(x), self.gradient(fn, x))

    def laplacian(self, fn, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.einsum("ij,ij->", np.linalg.inv(self.metric(x)), self.hessian(fn, x)))
