"""Schulze winners via max-min (widest path) closure over the full margin matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profile import WeightedMajorityGraph

# Stand-in for "no path"; far below any margin this package ever builds.
NO_PATH = np.iinfo(np.int64).min // 4


def widest_paths(margins: np.ndarray) -> np.ndarray:
    """Max-min closure of a square margin matrix.

    Every off-diagonal entry is an edge, whatever its sign. The diagonal of the
    result is ``NO_PATH`` and carries no meaning.
    """
    p = np.array(margins, dtype=np.int64, copy=True)
    m = p.shape[0]
    np.fill_diagonal(p, NO_PATH)
    for k in range(m):
        np.maximum(p, np.minimum(p[:, k, None], p[None, k, :]), out=p)
    np.fill_diagonal(p, NO_PATH)
    return p


def winner_mask(strength: np.ndarray) -> np.ndarray:
    """Boolean mask of rows ``c`` with ``P[c, d] >= P[d, c]`` for every ``d``."""
    ok = strength >= strength.T
    np.fill_diagonal(ok, True)
    return ok.all(axis=1)


@dataclass(frozen=True)
class StrongestPathMatrix:
    candidates: tuple[str, ...]
    strength: np.ndarray

    def __call__(self, c: str, d: str) -> int:
        if c == d:
            raise ValueError("strongest path strength is undefined for c == d")
        i, j = self.candidates.index(c), self.candidates.index(d)
        return int(self.strength[i, j])

    def as_dict(self) -> dict[tuple[str, str], int]:
        return {
            (c, d): int(self.strength[i, j])
            for i, c in enumerate(self.candidates)
            for j, d in enumerate(self.candidates)
            if i != j
        }


def strongest_paths(g: WeightedMajorityGraph) -> StrongestPathMatrix:
    if g.m < 2:
        raise ValueError("strongest paths need at least two candidates")
    strength = widest_paths(g.margins)
    strength.setflags(write=False)
    return StrongestPathMatrix(g.candidates, strength)


def schulze_winners(g: WeightedMajorityGraph) -> frozenset[str]:
    if g.m == 1:
        return frozenset(g.candidates)
    mask = winner_mask(widest_paths(g.margins))
    return frozenset(c for c, w in zip(g.candidates, mask) if w)


def condorcet_winner(g: WeightedMajorityGraph) -> str | None:
    """The candidate beating every other one strictly, if any."""
    mat = g.margins.copy()
    np.fill_diagonal(mat, 1)
    hits = np.flatnonzero((mat > 0).all(axis=1))
    return g.candidates[hits[0]] if len(hits) else None


def weak_condorcet_winners(g: WeightedMajorityGraph) -> frozenset[str]:
    mat = g.margins
    return frozenset(c for i, c in enumerate(g.candidates) if (mat[i] >= 0).all())
