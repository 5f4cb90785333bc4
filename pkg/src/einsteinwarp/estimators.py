"""Thin scikit-learn style wrappers around verification and construction.

Only the parts of the estimator protocol that make sense here are provided:
``get_params``/``set_params`` via :class:`sklearn.base.BaseEstimator`, input
validation with ``check_array``, ``transform`` for residual traces and
``predict`` for a constructed potential.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .ansatz import FiberData
from .catalog import get
from .solver import ConstructionSpec, construct
from .system import lemma2_residual, residual_ode1, residual_ode2, residual_ode3, theorem1b_theta


def _column(X):
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError("expected a single column of xi values")
        X = X[:, 0]
    return X


class ResidualTransformer(TransformerMixin, BaseEstimator):
    """Map xi values to the residuals (ode1, ode2, ode3, theta_implied, lemma2).

    ``entry`` is a catalog id; ``ansatz`` overrides it when given.
    """

    def __init__(self, entry="ex1", ansatz=None, fiber_in_scalar=True):
        self.entry = entry
        self.ansatz = ansatz
        self.fiber_in_scalar = fiber_in_scalar

    def fit(self, X=None, y=None):
        self.ansatz_ = self.ansatz if self.ansatz is not None else get(self.entry).ansatz
        if X is not None:
            xs = _column(X)
            if not self.ansatz_.contains(xs):
                raise ValueError("xi values outside the ansatz domain")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "ansatz_")
        xs = _column(X)
        a, fis = self.ansatz_, self.fiber_in_scalar
        cols = [
            residual_ode1(a, xs),
            residual_ode2(a, xs, fis),
            residual_ode3(a, xs, fis),
            theorem1b_theta(a, xs),
            lemma2_residual(a, xs, fiber_in_scalar=fis),
        ]
        return np.column_stack([np.broadcast_to(np.asarray(c, float), xs.shape) for c in cols])


class PotentialConstructor(BaseEstimator):
    """Solve the potential ODE once at ``fit`` and evaluate h with ``predict``.

    ``X`` passed to ``fit`` is the knot grid (one column of increasing xi).
    """

    def __init__(self, base=None, f=None, params=None, fiber=None, xi0=0.0, h0=0.0, dh0=0.0,
                 tol=1e-10, cap=1e8):
        self.base = base
        self.f = f
        self.params = params
        self.fiber = fiber
        self.xi0 = xi0
        self.h0 = h0
        self.dh0 = dh0
        self.tol = tol
        self.cap = cap

    def fit(self, X, y=None):
        xs = _column(X)
        if xs.size < 4 or np.any(np.diff(xs) <= 0):
            raise ValueError("fit needs at least 4 increasing xi values")
        fiber = self.fiber if self.fiber is not None else FiberData(1)
        spec = ConstructionSpec(self.base, self.f, self.params, fiber.m, (self.xi0, self.h0, self.dh0),
                                (float(xs[0]), float(xs[-1]), int(xs.size)), rtol=self.tol, atol=self.tol,
                                cap=self.cap)
        self.ansatz_, self.report_ = construct(spec, fiber)
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "ansatz_")
        return np.asarray(self.ansatz_.h(_column(X)), dtype=float)

    def score(self, X=None, y=None):
        """Negative worst residual of the fitted ansatz (higher is better)."""
        check_is_fitted(self, "report_")
        return -max(v[0] for k, v in self.report_.per_equation.items() if k != "theta")
