"""Score-to-weight transforms, the sorted mean-weight vector and the error metric."""

from __future__ import annotations

import enum
import math
from typing import Optional, Sequence

import numpy as np

from .exceptions import InstanceError


class TransformMode(str, enum.Enum):
    IDENTITY = "identity"
    MISCALIBRATION = "miscalibration"
    SUBJECTIVITY_NORMALIZED = "subjectivity-normalized"
    SUBJECTIVITY_GAP = "subjectivity-gap"


def apply_weight_transform(
    scores_by_paper: Sequence[Sequence[float]],
    mode: TransformMode | str = TransformMode.IDENTITY,
    normalized_scores: Optional[Sequence[Sequence[float]]] = None,
) -> list[list[float]]:
    """Map per-paper review scores to per-paper weights.

    Position ``t`` of every output list corresponds to position ``t`` of the
    input list of the same paper.

    Parameters
    ----------
    scores_by_paper : sequence of sequences of float
        Raw scores, one list per paper.
    mode : TransformMode or str
        ``identity`` keeps the scores, ``miscalibration`` subtracts the mean of
        the other reviews of the same paper, ``subjectivity-normalized``
        returns the supplied normalized scores and ``subjectivity-gap`` returns
        ``score - normalized score``.
    normalized_scores : sequence of sequences of float, optional
        Required by both subjectivity modes; must match ``scores_by_paper``
        in shape.
    """
    mode = TransformMode(mode)
    papers = [[float(s) for s in row] for row in scores_by_paper]
    for row in papers:
        if not all(math.isfinite(s) for s in row):
            raise ValueError("scores must be finite")

    if mode is TransformMode.IDENTITY:
        return papers

    if mode is TransformMode.MISCALIBRATION:
        out = []
        for i, row in enumerate(papers):
            k = len(row)
            if k < 2:
                raise InstanceError(
                    f"miscalibration needs at least two reviews per paper; paper {i} has {k}"
                )
            total = math.fsum(row)
            out.append([s - (total - s) / (k - 1) for s in row])
        return out

    if normalized_scores is None:
        raise ValueError(f"mode {mode.value!r} requires normalized_scores")
    normalized = [[float(s) for s in row] for row in normalized_scores]
    if len(normalized) != len(papers) or any(
        len(a) != len(b) for a, b in zip(papers, normalized)
    ):
        raise ValueError("normalized_scores must have the same shape as scores_by_paper")
    if mode is TransformMode.SUBJECTIVITY_NORMALIZED:
        return normalized
    return [[s - z for s, z in zip(a, b)] for a, b in zip(papers, normalized)]


def sorted_mean_weights(assignment) -> np.ndarray:
    """Return the nondecreasing vector of per-reviewer mean weights.

    Each reviewer's mean is taken over their own reviews, so non-uniform
    reviewer loads are handled.
    """
    totals: list[list[float]] = [[] for _ in range(assignment.n)]
    for _, reviewer, weight in assignment.edges:
        totals[reviewer].append(weight)
    means = []
    for j, ws in enumerate(totals):
        if not ws:
            raise InstanceError(f"reviewer {j} has no reviews")
        means.append(math.fsum(ws) / len(ws))
    return np.sort(np.asarray(means, dtype=float))


def sse(t, theta) -> float:
    """Sum of squared differences between ``t`` and ``theta``."""
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if t.shape != theta.shape:
        raise ValueError(f"length mismatch: {t.shape} vs {theta.shape}")
    return float(np.sum((theta - t) ** 2))
