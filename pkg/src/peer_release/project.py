"""Euclidean projections used to post-process a noisy release.

The main solver projects onto the polytope

    {t : L <= t <= U, sum(t) = S, t_1 <= ... <= t_n}

with Dykstra's corrected alternating projections over three simple sets:
the box, the monotone cone (pool-adjacent-violators) and the hyperplane.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConvergenceError

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000


class InfeasibleProblemError(ValueError):
    """The constraint set of a projection problem is empty."""


def isotonic_project(v) -> np.ndarray:
    """Project ``v`` onto the cone of nondecreasing vectors (PAVA)."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("isotonic_project expects a 1-d vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("isotonic_project expects finite entries")
    sums: list[float] = []
    counts: list[int] = []
    for x in v.tolist():
        s, c = x, 1
        # merge while the previous block's mean exceeds the new block's mean
        while sums and sums[-1] * c > s * counts[-1]:
            s += sums.pop()
            c += counts.pop()
        sums.append(s)
        counts.append(c)
    return np.repeat(np.array(sums) / np.array(counts), counts)


@dataclass
class ProjectionProblem:
    """Projection of ``r`` onto box, monotone cone and (optionally) a sum plane.

    ``target_sum=None`` drops the sum constraint.
    """

    r: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    target_sum: Optional[float] = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), self.r.shape).copy()
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), self.r.shape).copy()
        if self.r.ndim != 1:
            raise ValueError("r must be a 1-d vector")
        if not np.all(np.isfinite(self.r)):
            raise ValueError("r contains NaN or infinite entries")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError("bounds contain NaN")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")

    def check_feasible(self) -> None:
        """Raise :class:`InfeasibleProblemError` if the constraint set is empty."""
        slack = 1e-12 * (1.0 + np.max(np.abs(np.concatenate([self.lower, self.upper]))))
        if np.any(self.lower > self.upper + slack):
            raise InfeasibleProblemError("some lower bound exceeds its upper bound")
        # smallest / largest monotone vectors inside the box
        lo = np.maximum.accumulate(self.lower)
        hi = np.minimum.accumulate(self.upper[::-1])[::-1]
        if np.any(lo > hi + slack):
            raise InfeasibleProblemError("no nondecreasing vector fits inside the bounds")
        if self.target_sum is not None:
            s = self.target_sum
            tol = slack * len(self.r) + 1e-12 * abs(s)
            if s < lo.sum() - tol or s > hi.sum() + tol:
                raise InfeasibleProblemError(
                    f"target sum {s} outside the attainable range [{lo.sum()}, {hi.sum()}]"
                )

    def violation(self, t) -> float:
        """Largest constraint violation of ``t`` (sum violation divided by n)."""
        t = np.asarray(t, dtype=float)
        parts = [np.max(self.lower - t), np.max(t - self.upper)]
        if len(t) > 1:
            parts.append(np.max(t[:-1] - t[1:]))
        if self.target_sum is not None:
            parts.append(abs(t.sum() - self.target_sum) / len(t))
        return float(max(0.0, *parts))


def project_intersection(p: ProjectionProblem) -> np.ndarray:
    """Solve ``argmin ||t - r||^2`` over the problem's constraint set.

    Iterates Dykstra cycles (box, monotone cone, sum plane) until the three
    sub-projections of one cycle and the previous iterate agree within
    ``p.tol`` in the max norm.

    Raises
    ------
    InfeasibleProblemError
        If the constraint set is empty.
    ConvergenceError
        If ``p.max_iter`` cycles are not enough.
    """
    p.check_feasible()
    n = len(p.r)
    lower, upper = p.lower, p.upper
    x = p.r.copy()
    corr_box = np.zeros(n)
    corr_mono = np.zeros(n)
    # the sum plane is affine, so it needs no correction term
    for _ in range(p.max_iter):
        y = np.clip(x + corr_box, lower, upper)
        corr_box = x + corr_box - y
        z = isotonic_project(y + corr_mono)
        corr_mono = y + corr_mono - z
        if p.target_sum is not None:
            w = z + (p.target_sum - z.sum()) / n
        else:
            w = z
        change = max(np.max(np.abs(w - x)), np.max(np.abs(w - y)), np.max(np.abs(w - z)))
        x = w
        if change < p.tol:
            return x
    raise ConvergenceError(
        f"projection did not converge in {p.max_iter} iterations (last change {change:.3g})"
    )


def project_baseline(
    r,
    box_lo: float,
    box_hi: float,
    target_sum: Optional[float],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """Projection onto the constant box ``[box_lo, box_hi]^n`` with the same sum
    and monotonicity constraints."""
    if box_lo > box_hi:
        raise ValueError("box_lo must not exceed box_hi")
    r = np.asarray(r, dtype=float)
    return project_intersection(
        ProjectionProblem(r, np.full(r.shape, box_lo), np.full(r.shape, box_hi), target_sum, tol, max_iter)
    )


def nearest_in_finite_set(r, candidates: Sequence) -> np.ndarray:
    """Closest candidate to ``r``; ties go to the lexicographically smallest."""
    cands = [np.atleast_1d(np.asarray(c, dtype=float)) for c in candidates]
    if not cands:
        raise ValueError("candidate set is empty")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    best = None
    for c in sorted(cands, key=lambda c: tuple(c.tolist())):
        d = float(np.sum((c - r) ** 2))
        if best is None or d < best[0]:
            best = (d, c)
    return best[1]
