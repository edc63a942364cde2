"""Synthetic conference instances, their public view, and file formats.

An :class:`Assignment` is the private reviewer-paper graph with a weight on
every edge.  :class:`PublicWeights` is what the public sees: for every paper
the multiset of weights it received, plus the reviewer loads.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .exceptions import InstanceError

Loads = Union[int, Sequence[int]]
WeightSampler = Callable[[np.random.Generator, int, int, int], float]

_HEADER_RE = re.compile(r"^#\s*n=(\d+)\s+loads=([\d,\s]+)$")


def _expand_loads(loads: Loads, count: int, what: str) -> tuple[int, ...]:
    if isinstance(loads, (int, np.integer)):
        return (int(loads),) * count
    loads = tuple(int(x) for x in loads)
    if len(loads) == 1 and count != 1:
        return loads * count
    if len(loads) != count:
        raise InstanceError(f"expected {count} {what} loads, got {len(loads)}")
    return loads


@dataclass(frozen=True)
class Assignment:
    """Private bipartite graph; ``edges`` holds ``(paper, reviewer, weight)``."""

    n: int
    m: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for paper, reviewer, weight in self.edges:
            if not (0 <= paper < self.m and 0 <= reviewer < self.n):
                raise InstanceError(f"edge ({paper}, {reviewer}) out of range")
            if (paper, reviewer) in seen:
                raise InstanceError(f"duplicate edge ({paper}, {reviewer})")
            if not math.isfinite(weight):
                raise InstanceError("edge weights must be finite")
            seen.add((paper, reviewer))

    @property
    def reviewer_loads(self) -> tuple[int, ...]:
        c = Counter(r for _, r, _ in self.edges)
        return tuple(c[j] for j in range(self.n))

    @property
    def paper_loads(self) -> tuple[int, ...]:
        c = Counter(p for p, _, _ in self.edges)
        return tuple(c[i] for i in range(self.m))


@dataclass(frozen=True)
class PublicWeights:
    """Per-paper weight multisets (the matrix X) and the reviewer loads.

    ``rows[i]`` holds paper ``i``'s weights in ascending order.
    ``reviewer_loads`` has one entry per reviewer.
    """

    rows: tuple[tuple[float, ...], ...]
    reviewer_loads: tuple[int, ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[float]], n: int, reviewer_loads: Loads) -> "PublicWeights":
        rows = tuple(tuple(sorted(float(x) for x in row)) for row in rows)
        return cls(rows=rows, reviewer_loads=_expand_loads(reviewer_loads, n, "reviewer"))

    @property
    def n(self) -> int:
        return len(self.reviewer_loads)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def paper_loads(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.rows)

    @property
    def load_set(self) -> tuple[int, ...]:
        """Distinct reviewer loads, ascending."""
        return tuple(sorted(set(self.reviewer_loads)))

    @property
    def uniform_load(self) -> Optional[int]:
        loads = self.load_set
        return loads[0] if len(loads) == 1 else None

    def total_weight(self) -> float:
        return math.fsum(x for row in self.rows for x in row)

    def default_target_sum(self) -> Optional[float]:
        """Sum of the true mean-weight vector, when it follows from public data.

        With a uniform reviewer load ``l`` this is ``total / l``.  With mixed
        loads the sum depends on who reviewed what, so ``None`` is returned.
        """
        load = self.uniform_load
        if load is None:
            return None
        return self.total_weight() / load


def validate_instance(pw: PublicWeights) -> None:
    """Raise :class:`InstanceError` unless the loads are jointly feasible."""
    if pw.n < 1 or pw.m < 1:
        raise InstanceError("need at least one reviewer and one paper")
    if min(pw.reviewer_loads) < 1:
        raise InstanceError("every reviewer must review at least one paper")
    if min(pw.paper_loads) < 1:
        raise InstanceError("every paper must receive at least one review")
    total_reviews = sum(pw.paper_loads)
    if sum(pw.reviewer_loads) != total_reviews:
        raise InstanceError(
            f"load identity violated: reviewers supply {sum(pw.reviewer_loads)} "
            f"reviews, papers receive {total_reviews}"
        )
    if max(pw.reviewer_loads) > pw.m:
        raise InstanceError(f"a reviewer load exceeds the number of papers ({pw.m})")
    if max(pw.paper_loads) > pw.n:
        raise InstanceError(f"a paper load exceeds the number of reviewers ({pw.n})")
    for row in pw.rows:
        if not all(math.isfinite(x) for x in row):
            raise InstanceError("weights must be finite")


def _default_sampler(rng: np.random.Generator, paper: int, reviewer: int, slot: int) -> float:
    return float(rng.random())


def sample_assignment(
    n: int,
    m: int,
    reviewer_load: Loads,
    paper_load: Loads,
    weight_sampler: Optional[WeightSampler] = None,
    rng_seed=None,
    max_attempts: int = 10_000,
) -> Assignment:
    """Draw a uniformly random simple assignment with the given loads.

    Reviewer and paper "stubs" are matched by a uniform random permutation
    and the whole matching is rejected if it pairs a reviewer with the same
    paper twice.  Conditioned on acceptance this is uniform over simple
    bipartite graphs with the requested degrees.

    ``weight_sampler(rng, paper, reviewer, slot)`` draws the weight of each
    edge; ``slot`` is the edge's position among the paper's edges ordered by
    reviewer index.  The default draws uniform weights on [0, 1).
    """
    r_loads = _expand_loads(reviewer_load, n, "reviewer")
    p_loads = _expand_loads(paper_load, m, "paper")
    if sum(r_loads) != sum(p_loads):
        raise InstanceError(f"infeasible loads: {sum(r_loads)} != {sum(p_loads)}")
    if max(r_loads) > m or max(p_loads) > n or min(r_loads) < 1 or min(p_loads) < 1:
        raise InstanceError("infeasible loads: degree out of range")
    sampler = weight_sampler or _default_sampler
    rng = np.random.default_rng(rng_seed)

    reviewer_stubs = np.repeat(np.arange(n), r_loads)
    paper_stubs = np.repeat(np.arange(m), p_loads)
    for _ in range(max_attempts):
        perm = rng.permutation(paper_stubs)
        pairs = set(zip(perm.tolist(), reviewer_stubs.tolist()))
        if len(pairs) == len(perm):
            break
    else:
        raise InstanceError(f"no simple assignment found after {max_attempts} attempts")

    edges = []
    slots: Counter = Counter()
    for paper, reviewer in sorted(pairs):
        slot = slots[paper]
        slots[paper] += 1
        edges.append((paper, reviewer, float(sampler(rng, paper, reviewer, slot))))
    return Assignment(n=n, m=m, edges=tuple(edges))


def public_view(assignment: Assignment) -> PublicWeights:
    rows: list[list[float]] = [[] for _ in range(assignment.m)]
    for paper, _, weight in assignment.edges:
        rows[paper].append(weight)
    return PublicWeights.from_rows(rows, assignment.n, assignment.reviewer_loads)


# ---------------------------------------------------------------------------
# file formats


def format_public_csv(pw: PublicWeights) -> str:
    load = pw.uniform_load
    loads = str(load) if load is not None else ",".join(map(str, pw.reviewer_loads))
    buf = io.StringIO()
    buf.write(f"# n={pw.n} loads={loads}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in pw.rows:
        writer.writerow([repr(x) for x in row])
    return buf.getvalue()


def parse_public_csv(text: str) -> PublicWeights:
    lines = text.splitlines()
    if not lines:
        raise InstanceError("empty public weights file")
    match = _HEADER_RE.match(lines[0].strip())
    if match is None:
        raise InstanceError("missing header '# n=<n> loads=<loads>'")
    n = int(match.group(1))
    loads = [int(x) for x in match.group(2).replace(" ", "").split(",") if x]
    rows = []
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            rows.append([float(cell) for cell in row])
        except ValueError as exc:
            raise InstanceError(f"line {lineno}: {exc}") from None
    return PublicWeights.from_rows(rows, n, loads)


def write_public_csv(pw: PublicWeights, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_public_csv(pw))


def read_public_csv(path: Union[str, os.PathLike]) -> PublicWeights:
    with open(path, newline="") as fh:
        return parse_public_csv(fh.read())


def write_assignment_csv(assignment: Assignment, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["paper", "reviewer", "weight"])
        for paper, reviewer, weight in assignment.edges:
            writer.writerow([paper, reviewer, repr(weight)])


def read_assignment_csv(path: Union[str, os.PathLike], n: Optional[int] = None, m: Optional[int] = None) -> Assignment:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["paper", "reviewer", "weight"]:
            raise InstanceError("assignment CSV must have columns paper,reviewer,weight")
        edges = tuple(
            (int(rec["paper"]), int(rec["reviewer"]), float(rec["weight"])) for rec in reader
        )
    n = n if n is not None else 1 + max(r for _, r, _ in edges)
    m = m if m is not None else 1 + max(p for p, _, _ in edges)
    return Assignment(n=n, m=m, edges=edges)
