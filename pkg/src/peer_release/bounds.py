"""Per-index lower and upper bounds on the sorted mean-weight vector.

Only public data is used.  Every way a single reviewer could have produced
their reviews is a *weight tuple*: one entry from each of ``l`` distinct
rows of X, for every reviewer load ``l``.  The tuples are sorted by mean,
two tuples are compatible when they share no entry of X, and a longest
chain of compatible tuples is computed to the left and to the right of
every tuple.  A forward scan then fixes the lower bounds and a backward scan
the upper bounds.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .exceptions import BoundsError, InstanceTooLargeError
from .instance import PublicWeights, validate_instance

DEFAULT_MAX_TUPLES = 10**7


class EntryRef(NamedTuple):
    """Position of one weight in X: paper ``row``, slot ``col`` in that row."""

    row: int
    col: int


class WeightTuple(NamedTuple):
    entries: tuple[EntryRef, ...]
    mean: float
    index: int


@dataclass(frozen=True)
class TupleList:
    """All valid weight tuples, sorted by mean.

    Tuples are stored as ascending tuples of flat entry ids; ``refs[e]`` maps a
    flat id back to its :class:`EntryRef`.  Ties in the mean are broken by
    lexicographic order of the (row, col) lists, which flat ids preserve.
    """

    members: tuple[tuple[int, ...], ...]
    means: np.ndarray
    refs: tuple[EntryRef, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, index: int) -> WeightTuple:
        if index < 0:
            index += len(self)
        return WeightTuple(
            tuple(self.refs[e] for e in self.members[index]), float(self.means[index]), index
        )

    def __iter__(self) -> Iterator[WeightTuple]:
        return (self[i] for i in range(len(self)))

    def incidence(self) -> list[list[int]]:
        """For every flat entry id, the indices of the tuples containing it."""
        inc: list[list[int]] = [[] for _ in self.refs]
        for v, members in enumerate(self.members):
            for e in members:
                inc[e].append(v)
        return inc


@dataclass(frozen=True)
class ChainTable:
    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class BoundsVector:
    lower: np.ndarray
    upper: np.ndarray

    @property
    def n(self) -> int:
        return len(self.lower)

    def to_dict(self) -> dict:
        return {"L": self.lower.tolist(), "U": self.upper.tolist(), "n": self.n}


def count_tuples(paper_loads: Sequence[int], loads: Sequence[int]) -> int:
    """Number of valid tuples: elementary symmetric polynomials of the row sizes."""
    top = max(loads)
    e = [1] + [0] * top
    for k in paper_loads:
        for j in range(top, 0, -1):
            e[j] += e[j - 1] * k
    return sum(e[load] for load in set(loads))


def enumerate_tuples(pw: PublicWeights, max_tuples: int = DEFAULT_MAX_TUPLES) -> TupleList:
    """List every valid weight tuple, sorted by mean."""
    total = count_tuples(pw.paper_loads, pw.load_set)
    if total > max_tuples:
        raise InstanceTooLargeError(
            f"{total} weight tuples exceed the cap of {max_tuples}"
        )
    refs = tuple(EntryRef(i, c) for i, row in enumerate(pw.rows) for c in range(len(row)))
    values = [x for row in pw.rows for x in row]
    offsets = np.concatenate([[0], np.cumsum(pw.paper_loads)]).tolist()

    keyed = []
    for load in pw.load_set:
        for rows in itertools.combinations(range(pw.m), load):
            ranges = [range(offsets[r], offsets[r + 1]) for r in rows]
            for ids in itertools.product(*ranges):
                keyed.append((math.fsum(values[e] for e in ids) / load, ids))
    keyed.sort()
    return TupleList(
        members=tuple(ids for _, ids in keyed),
        means=np.array([mean for mean, _ in keyed], dtype=float),
        refs=refs,
    )


def tuples_compatible(a: WeightTuple, b: WeightTuple) -> bool:
    """True when the two tuples use no common entry of X."""
    return set(a.entries).isdisjoint(b.entries)


def _longest_chains(members, incidence, order) -> np.ndarray:
    # count[d] = number of already-scanned tuples whose chain length is d.
    # A tuple's best predecessor is found by walking down from the top level
    # and discounting the (few) scanned tuples that conflict with it.
    length = [0] * len(members)
    count = [0] * (len(members) + 2)
    top = 0
    for v in order:
        conflicting = set()
        for e in members[v]:
            conflicting.update(incidence[e])
        blocked = Counter(length[u] for u in conflicting if length[u])
        d = top
        while d > 0 and count[d] == blocked.get(d, 0):
            d -= 1
        length[v] = d + 1
        count[d + 1] += 1
        top = max(top, d + 1)
    return np.array(length, dtype=np.int64)


def chain_lengths(omega: TupleList) -> ChainTable:
    """Longest left and right chain length of every tuple.

    A chain is a path in the compatibility graph whose Omega-indices move
    monotonically; only consecutive tuples on the path need to be disjoint.
    """
    incidence = omega.incidence()
    size = len(omega)
    left = _longest_chains(omega.members, incidence, range(size))
    right = _longest_chains(omega.members, incidence, range(size - 1, -1, -1))
    return ChainTable(left=left, right=right)


class _Marking:
    """Marked entries of X plus an O(1) view of the largest unmarked row count."""

    def __init__(self, pw: PublicWeights, rows_of: Sequence[int]):
        self.rows_of = rows_of
        self.marked = [False] * len(rows_of)
        self.unmarked = list(pw.paper_loads)
        self.hist = [0] * (max(self.unmarked) + 1)
        for c in self.unmarked:
            self.hist[c] += 1
        self.max_unmarked = len(self.hist) - 1

    def mark(self, entries) -> None:
        for e in entries:
            if self.marked[e]:
                continue
            self.marked[e] = True
            r = self.rows_of[e]
            c = self.unmarked[r]
            self.hist[c] -= 1
            self.hist[c - 1] += 1
            self.unmarked[r] = c - 1
        while self.max_unmarked > 0 and self.hist[self.max_unmarked] == 0:
            self.max_unmarked -= 1


def lower_bounds(pw: PublicWeights, omega: TupleList, chains: ChainTable) -> np.ndarray:
    """Forward scan: the first tuple with a left chain of length >= i that
    leaves every row with at most n - i unmarked entries bounds index i."""
    n = pw.n
    marking = _Marking(pw, [ref.row for ref in omega.refs])
    out = []
    i = 1
    for v in range(len(omega)):
        marking.mark(omega.members[v])
        if chains.left[v] >= i and marking.max_unmarked <= n - i:
            out.append(float(omega.means[v]))
            i += 1
            if i > n:
                break
    if len(out) < n:
        raise BoundsError(
            f"lower-bound scan ended after {len(out)} of {n} indices; public data is inconsistent"
        )
    return np.array(out)


def upper_bounds(pw: PublicWeights, omega: TupleList, chains: ChainTable) -> np.ndarray:
    """Backward scan mirroring :func:`lower_bounds`."""
    n = pw.n
    marking = _Marking(pw, [ref.row for ref in omega.refs])
    out = np.empty(n)
    i = n
    for v in range(len(omega) - 1, -1, -1):
        marking.mark(omega.members[v])
        if chains.right[v] >= n - i + 1 and marking.max_unmarked <= i - 1:
            out[i - 1] = omega.means[v]
            i -= 1
            if i < 1:
                break
    if i >= 1:
        raise BoundsError(
            f"upper-bound scan ended with {i} of {n} indices unset; public data is inconsistent"
        )
    return out


def compute_bounds(pw: PublicWeights, max_tuples: int = DEFAULT_MAX_TUPLES) -> BoundsVector:
    validate_instance(pw)
    omega = enumerate_tuples(pw, max_tuples=max_tuples)
    chains = chain_lengths(omega)
    return BoundsVector(
        lower=lower_bounds(pw, omega, chains), upper=upper_bounds(pw, omega, chains)
    )
