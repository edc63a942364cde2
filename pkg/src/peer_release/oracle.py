"""Brute-force ground truth for small instances.

Includes exact enumeration of every sorted mean-weight vector consistent
with the public data, projection onto the convex hull of that set, and the
expected errors of the one-dimensional nearest-point counterexample.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .exceptions import InstanceTooLargeError
from .instance import PublicWeights, validate_instance
from .privacy import laplace_noise

DEFAULT_MAX_REVIEWERS = 6
DEFAULT_MAX_LOAD = 3


@dataclass(frozen=True)
class ThetaSet:
    """Every achievable sorted mean-weight vector of ``instance``."""

    vectors: frozenset
    instance: PublicWeights

    def __len__(self) -> int:
        return len(self.vectors)

    def as_array(self) -> np.ndarray:
        return np.array(sorted(self.vectors), dtype=float).reshape(len(self.vectors), -1)


def _check_cap(pw: PublicWeights, max_reviewers: int, max_load: int) -> None:
    if pw.n > max_reviewers or max(pw.reviewer_loads) > max_load:
        raise InstanceTooLargeError(
            f"oracle limited to n <= {max_reviewers} and loads <= {max_load}; "
            f"got n={pw.n}, max load={max(pw.reviewer_loads)}"
        )


def _mean(values, load: int) -> float:
    return math.fsum(values) / load


def enumerate_theta(
    pw: PublicWeights,
    max_reviewers: int = DEFAULT_MAX_REVIEWERS,
    max_load: int = DEFAULT_MAX_LOAD,
) -> ThetaSet:
    """Enumerate all sorted mean-weight vectors by backtracking.

    Reviewers are filled one at a time.  The next reviewer always takes the
    first remaining weight of the first remaining paper (somebody must), plus
    one weight from each of ``load - 1`` other papers.  Rows are tracked as
    value multisets, so equal weights and identical papers are not explored
    twice, and sub-results are memoized on the canonical remaining state.
    """
    validate_instance(pw)
    _check_cap(pw, max_reviewers, max_load)

    @lru_cache(maxsize=None)
    def solve(rows: tuple, loads: tuple) -> frozenset:
        if not rows:
            return frozenset({()}) if not loads else frozenset()
        if not loads:
            return frozenset()
        head, rest = rows[0], rows[1:]
        out = set()
        for load in sorted(set(loads)):
            if load - 1 > len(rest):
                continue
            remaining_loads = list(loads)
            remaining_loads.remove(load)
            remaining_loads = tuple(remaining_loads)
            for others in itertools.combinations(range(len(rest)), load - 1):
                choices = [sorted(set(rest[r])) for r in others]
                for picked in itertools.product(*choices):
                    new_rows = list(rest)
                    for r, value in zip(others, picked):
                        row = list(new_rows[r])
                        row.remove(value)
                        new_rows[r] = tuple(row)
                    if len(head) > 1:
                        new_rows.append(head[1:])
                    key = tuple(sorted(row for row in new_rows if row))
                    mean = _mean((head[0],) + picked, load)
                    for partial in solve(key, remaining_loads):
                        out.add(tuple(sorted(partial + (mean,))))
        return frozenset(out)

    rows = tuple(sorted(tuple(sorted(row)) for row in pw.rows))
    vectors = solve(rows, tuple(sorted(pw.reviewer_loads)))
    return ThetaSet(vectors=vectors, instance=pw)


def _distinct_permutations(items: Sequence):
    counts = Counter(items)
    keys = sorted(counts)
    size = len(items)
    out: list = []

    def rec():
        if len(out) == size:
            yield tuple(out)
            return
        for key in keys:
            if counts[key]:
                counts[key] -= 1
                out.append(key)
                yield from rec()
                out.pop()
                counts[key] += 1

    return rec()


def enumerate_theta_by_permutation(pw: PublicWeights, max_entries: int = 12) -> ThetaSet:
    """Independent enumeration: try every labelling of the entries of X with
    reviewer ids (each reviewer used as often as its load) and keep the
    labellings in which no reviewer gets two weights of the same paper."""
    validate_instance(pw)
    entries = [(i, x) for i, row in enumerate(pw.rows) for x in row]
    if len(entries) > max_entries:
        raise InstanceTooLargeError(f"{len(entries)} entries exceed the cap of {max_entries}")
    stubs = [j for j, load in enumerate(pw.reviewer_loads) for _ in range(load)]
    vectors = set()
    for labels in _distinct_permutations(stubs):
        seen = set()
        ok = True
        for (row, _), j in zip(entries, labels):
            if (row, j) in seen:
                ok = False
                break
            seen.add((row, j))
        if not ok:
            continue
        per_reviewer: list[list[float]] = [[] for _ in range(pw.n)]
        for (_, x), j in zip(entries, labels):
            per_reviewer[j].append(x)
        vectors.add(tuple(sorted(_mean(ws, len(ws)) for ws in per_reviewer)))
    return ThetaSet(vectors=frozenset(vectors), instance=pw)


def hull_project(r, theta, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
    """Project ``r`` onto the convex hull of a finite point set.

    Uses Wolfe's minimum-norm-point method on the points translated by
    ``-r``.  ``theta`` may be a :class:`ThetaSet` or an array of points.
    """
    points = theta.as_array() if isinstance(theta, ThetaSet) else np.atleast_2d(np.asarray(theta, dtype=float))
    if points.size == 0:
        raise ValueError("cannot project onto the hull of an empty set")
    r = np.asarray(r, dtype=float)
    P = points - r
    scale = max(1.0, float(np.max(np.abs(P))))

    active = [int(np.argmin(np.einsum("ij,ij->i", P, P)))]
    lam = np.array([1.0])
    x = P[active[0]].copy()
    for _ in range(max_iter):
        j = int(np.argmin(P @ x))
        if x @ x - x @ P[j] <= tol * scale**2 or j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            A = P[active]
            k = len(active)
            # affine minimum-norm point of the active points
            kkt = np.zeros((k + 1, k + 1))
            kkt[:k, :k] = A @ A.T
            kkt[:k, k] = 1.0
            kkt[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            mu = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
            if np.all(mu > tol):
                lam = mu
                break
            neg = mu <= tol
            ratios = lam[neg] / (lam[neg] - mu[neg])
            step = float(np.min(ratios))
            lam = lam + step * (mu - lam)
            keep = lam > tol
            active = [a for a, kp in zip(active, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[active]
    return x + r


@dataclass(frozen=True)
class Prop1Result:
    noisy: float
    projected: float
    mc_noisy: Optional[float] = None
    mc_projected: Optional[float] = None


def _laplace_cdf(x: float, loc: float, scale: float) -> float:
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    z = (x - loc) / scale
    return 0.5 * math.exp(z) if z < 0 else 1.0 - 0.5 * math.exp(-z)


def prop1_expected_errors(
    candidates: Sequence[float] = (-4.0, -2.0, 0.0, 2.0, 4.0),
    truth: float = 0.0,
    scale: float = 1.0,
    mc_samples: int = 0,
    seed=None,
    chunk: int = 1_000_000,
) -> Prop1Result:
    """Expected squared error of a Laplace release with and without snapping
    to the nearest point of a finite candidate set (one dimension).

    The defaults (truth 0, candidates -4..4 in steps of 2, density
    ``0.5 exp(-|x|)``) give 2 without snapping and
    ``12 e^-3 + 4 e^-1 = 2.06896...`` with it.  With ``mc_samples > 0`` the
    same two quantities are also estimated by simulation.
    """
    cands = np.sort(np.asarray(candidates, dtype=float))
    if cands.size == 0:
        raise ValueError("candidate set is empty")
    noisy = 2.0 * scale**2
    edges = np.concatenate([[-np.inf], (cands[:-1] + cands[1:]) / 2, [np.inf]])
    projected = math.fsum(
        (c - truth) ** 2 * (_laplace_cdf(hi, truth, scale) - _laplace_cdf(lo, truth, scale))
        for c, lo, hi in zip(cands, edges[:-1], edges[1:])
    )
    if mc_samples <= 0:
        return Prop1Result(noisy, projected)

    rng = np.random.default_rng(seed)
    mids = edges[1:-1]
    sq_noisy = 0.0
    sq_proj = 0.0
    done = 0
    while done < mc_samples:
        size = min(chunk, mc_samples - done)
        r = truth + laplace_noise(scale, size, rng)
        t = cands[np.searchsorted(mids, r, side="left")]
        sq_noisy += float(np.sum((r - truth) ** 2))
        sq_proj += float(np.sum((t - truth) ** 2))
        done += size
    return Prop1Result(noisy, projected, sq_noisy / mc_samples, sq_proj / mc_samples)
