"""scikit-learn style wrappers around the projection pipeline.

``fit`` takes the *public* weights (one row per paper) and precomputes the
constraint set; ``transform`` takes one noisy release of shape ``(n,)`` or a
batch of shape ``(n_releases, n)`` and returns the projected release(s).
Because ``fit`` and ``transform`` see different kinds of data, the
estimators deliberately do not offer ``fit_transform``.
"""

from __future__ import annotations

import numbers
from typing import Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .bounds import DEFAULT_MAX_TUPLES, compute_bounds
from .exceptions import InstanceError
from .instance import PublicWeights, validate_instance
from .project import DEFAULT_MAX_ITER, DEFAULT_TOL, ProjectionProblem, project_intersection


def check_public_weights(X, reviewer_loads: Union[int, Sequence[int], None] = None) -> PublicWeights:
    """Coerce ``X`` into validated :class:`PublicWeights`.

    ``X`` may already be :class:`PublicWeights`, or a (possibly ragged)
    sequence of per-paper weight lists.  In the latter case
    ``reviewer_loads`` is required: an int for a uniform load (the number of
    reviewers is inferred) or one load per reviewer.
    """
    if isinstance(X, PublicWeights):
        pw = X
    else:
        if reviewer_loads is None:
            raise ValueError("reviewer_loads is required unless X is PublicWeights")
        rows = [np.asarray(row, dtype=float).ravel().tolist() for row in X]
        if isinstance(reviewer_loads, numbers.Integral):
            total = sum(len(row) for row in rows)
            if total % reviewer_loads:
                raise InstanceError(f"{total} reviews cannot be split into loads of {reviewer_loads}")
            pw = PublicWeights.from_rows(rows, total // reviewer_loads, int(reviewer_loads))
        else:
            loads = [int(x) for x in reviewer_loads]
            pw = PublicWeights.from_rows(rows, len(loads), loads)
    validate_instance(pw)
    return pw


def _resolve_target_sum(target_sum, pw: PublicWeights) -> Optional[float]:
    if isinstance(target_sum, str):
        if target_sum != "auto":
            raise ValueError(f"target_sum must be 'auto', None or a number, got {target_sum!r}")
        return pw.default_target_sum()
    return None if target_sum is None else float(target_sum)


class _ReleaseProjector(BaseEstimator):
    def _lower_upper(self, pw: PublicWeights):
        raise NotImplementedError

    def fit(self, X, y=None, reviewer_loads=None):
        pw = check_public_weights(X, reviewer_loads)
        self.lower_, self.upper_ = self._lower_upper(pw)
        self.target_sum_ = _resolve_target_sum(self.target_sum, pw)
        self.n_reviewers_ = pw.n
        return self

    def _project_one(self, r):
        problem = ProjectionProblem(
            r, self.lower_, self.upper_, self.target_sum_, self.tol, self.max_iter
        )
        return project_intersection(problem)

    def transform(self, X):
        check_is_fitted(self, ["lower_", "upper_"])
        R = check_array(X, ensure_2d=False, dtype=np.float64)
        if R.shape[-1] != self.n_reviewers_:
            raise ValueError(
                f"expected releases of length {self.n_reviewers_}, got {R.shape[-1]}"
            )
        if R.ndim == 1:
            return self._project_one(R)
        return np.vstack([self._project_one(r) for r in R])


class BoundsProjector(_ReleaseProjector):
    """Project noisy releases onto the polytope cut out by public-data bounds.

    Parameters
    ----------
    target_sum : 'auto', float or None, default='auto'
        Value imposed on the sum of the output.  ``'auto'`` uses the total
        public weight divided by the reviewer load, which is only defined for
        uniform reviewer loads; with mixed loads ``'auto'`` drops the sum
        constraint, as does ``None``.
    tol : float, default=1e-9
        Stopping tolerance of the alternating-projection solver.
    max_iter : int, default=100000
        Iteration budget of the solver.
    max_tuples : int, default=10**7
        Cap on the number of weight tuples enumerated during ``fit``.

    Attributes
    ----------
    bounds_ : BoundsVector
    lower_, upper_ : ndarray of shape (n_reviewers,)
    target_sum_ : float or None
    n_reviewers_ : int
    """

    def __init__(self, target_sum="auto", tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, max_tuples=DEFAULT_MAX_TUPLES):
        self.target_sum = target_sum
        self.tol = tol
        self.max_iter = max_iter
        self.max_tuples = max_tuples

    def _lower_upper(self, pw):
        self.bounds_ = compute_bounds(pw, max_tuples=self.max_tuples)
        return self.bounds_.lower, self.bounds_.upper


class BaselineProjector(_ReleaseProjector):
    """Project noisy releases onto ``[lo, hi]^n`` intersected with the sum and
    monotonicity constraints; ignores everything else about the public data."""

    def __init__(self, box=(0.0, 1.0), target_sum="auto", tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
        self.box = box
        self.target_sum = target_sum
        self.tol = tol
        self.max_iter = max_iter

    def _lower_upper(self, pw):
        lo, hi = self.box
        if lo > hi:
            raise ValueError("box lower end exceeds upper end")
        return np.full(pw.n, float(lo)), np.full(pw.n, float(hi))
