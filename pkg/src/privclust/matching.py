"""Bottleneck bipartite perfect matching with Hall-deficiency certificates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .errors import InvalidInstanceError

__all__ = [
    "BipartiteWeights",
    "MatchingResult",
    "perfect_matching_exists",
    "bottleneck_perfect_matching",
]


@dataclass(frozen=True)
class BipartiteWeights:
    """Complete bipartite weight table ``weights[i][j]`` between ``left[i]`` and ``right[j]``."""

    left: tuple[Hashable, ...]
    right: tuple[Hashable, ...]
    weights: tuple[tuple, ...]

    @classmethod
    def from_matrix(cls, weights, left=None, right=None) -> "BipartiteWeights":
        w = tuple(tuple(row) for row in weights)
        nl = len(w)
        nr = len(w[0]) if w else 0
        if any(len(row) != nr for row in w):
            raise InvalidInstanceError("weight table must be rectangular")
        return cls(
            left=tuple(range(nl)) if left is None else tuple(left),
            right=tuple(range(nr)) if right is None else tuple(right),
            weights=w,
        )

    def _check_square(self):
        if len(self.left) != len(self.right):
            raise InvalidInstanceError(f"perfect matching needs equal sides, got {len(self.left)} and {len(self.right)}")
        if len(self.weights) != len(self.left) or any(len(r) != len(self.right) for r in self.weights):
            raise InvalidInstanceError("weight table does not match the side sizes")


@dataclass(frozen=True)
class MatchingResult:
    exists: bool
    matching: dict[int, int] | None
    deficient: frozenset[int] | None = None
    """Left positions whose admissible neighbourhood is smaller than the set (when ``exists`` is false)."""


def _max_matching(adj: list[list[int]], n_right: int) -> tuple[list[int], list[int]]:
    match_l = [-1] * len(adj)
    match_r = [-1] * n_right

    def augment(u, seen):
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_r[v] == -1 or augment(match_r[v], seen):
                match_l[u] = v
                match_r[v] = u
                return True
        return False

    for u in range(len(adj)):
        augment(u, [False] * n_right)
    return match_l, match_r


def _deficient_set(adj, match_l, match_r) -> frozenset[int]:
    # left vertices reachable from unmatched left vertices by alternating paths
    stack = [u for u, v in enumerate(match_l) if v == -1]
    left_seen = set(stack)
    right_seen = set()
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v in right_seen:
                continue
            right_seen.add(v)
            w = match_r[v]
            if w != -1 and w not in left_seen:
                left_seen.add(w)
                stack.append(w)
    return frozenset(left_seen)


def perfect_matching_exists(bw: BipartiteWeights, threshold) -> MatchingResult:
    """Perfect matching using only edges of weight at most ``threshold``."""
    bw._check_square()
    n = len(bw.left)
    adj = [[j for j in range(n) if bw.weights[i][j] <= threshold] for i in range(n)]
    match_l, match_r = _max_matching(adj, n)
    if all(v != -1 for v in match_l):
        return MatchingResult(True, {i: match_l[i] for i in range(n)})
    return MatchingResult(False, None, _deficient_set(adj, match_l, match_r))


def bottleneck_perfect_matching(bw: BipartiteWeights):
    """Smallest weight ``w*`` admitting a perfect matching, and such a matching.

    Binary search over the sorted distinct weights; existence is monotone in
    the threshold.
    """
    bw._check_square()
    if not bw.left:
        return 0, {}
    values = sorted({w for row in bw.weights for w in row})
    lo, hi = 0, len(values) - 1
    best = None
    while lo < hi:
        mid = (lo + hi) // 2
        got = perfect_matching_exists(bw, values[mid])
        if got.exists:
            hi, best = mid, got
        else:
            lo = mid + 1
    if best is None:
        best = perfect_matching_exists(bw, values[lo])
    return values[lo], best.matching
