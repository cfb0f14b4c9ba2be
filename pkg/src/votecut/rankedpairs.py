"""Resolute ranked pairs with a fixed tie-breaking policy."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .profile import WeightedMajorityGraph

Pair = tuple[str, str]


@dataclass(frozen=True)
class TieBreakPolicy:
    """``lexicographic`` or ``favor_designated`` (needs ``designee``).

    Equal-margin pairs are ordered by (designee wins first, winner, loser).
    A zero-margin pair is directed toward the designee when it is involved,
    otherwise toward the lexicographically smaller candidate.
    """

    kind: str = "lexicographic"
    designee: str | None = None

    def __post_init__(self):
        if self.kind not in ("lexicographic", "favor_designated"):
            raise ValueError(f"unknown tie-break policy {self.kind!r}")
        if self.kind == "favor_designated" and not self.designee:
            raise ValueError("favor_designated needs a designee")
        if self.kind == "lexicographic" and self.designee is not None:
            raise ValueError("lexicographic policy takes no designee")

    @classmethod
    def favor(cls, designee: str) -> "TieBreakPolicy":
        return cls("favor_designated", designee)

    def __str__(self):
        if self.kind == "lexicographic":
            return "lexicographic"
        return f"favor_designated({self.designee})"

    @classmethod
    def parse(cls, text: str) -> "TieBreakPolicy":
        text = text.strip()
        if text in ("", "lexicographic", "lex"):
            return cls()
        for prefix in ("favor_designated(", "favor-designated(", "favor("):
            if text.startswith(prefix) and text.endswith(")"):
                return cls.favor(text[len(prefix):-1].strip())
        raise ValueError(f"cannot parse tie-break policy {text!r}")


LEXICOGRAPHIC = TieBreakPolicy()


@dataclass(frozen=True)
class LockGraph:
    candidates: tuple[str, ...]
    locked: tuple[Pair, ...]
    # (skipped pair, locked path from its loser back to its winner)
    skipped: tuple[tuple[Pair, tuple[str, ...]], ...] = field(default=())

    def sources(self) -> list[str]:
        beaten = {d for _, d in self.locked}
        return [c for c in self.candidates if c not in beaten]


def _agenda_indices(margins: np.ndarray, designee: int | None) -> list[tuple[int, int, int]]:
    m = margins.shape[0]
    items = []
    for i in range(m):
        for j in range(i + 1, m):
            w = int(margins[i, j])
            if w > 0:
                win, lose = i, j
            elif w < 0:
                win, lose, w = j, i, -w
            elif designee == j:
                win, lose = j, i
            else:
                win, lose = i, j
            items.append((w, win, lose))
    items.sort(key=lambda t: (-t[0], t[1] != designee, t[1], t[2]))
    return items


def pair_agenda(g: WeightedMajorityGraph, policy: TieBreakPolicy = LEXICOGRAPHIC
                ) -> list[tuple[Pair, int]]:
    """Directed pairs with their margins, in locking order."""
    designee = _designee_index(g.candidates, policy)
    cands = g.candidates
    return [((cands[a], cands[b]), w) for w, a, b in _agenda_indices(g.margins, designee)]


def _designee_index(candidates: Sequence[str], policy: TieBreakPolicy) -> int | None:
    if policy.kind != "favor_designated":
        return None
    try:
        return list(candidates).index(policy.designee)
    except ValueError:
        # the designee may have been removed by a control action
        return None


def _find_path(adj: dict[str, list[str]], start: str, goal: str) -> tuple[str, ...]:
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            break
        for v in adj.get(u, ()):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    path = [goal]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return tuple(reversed(path))


def lock_pairs(agenda: Sequence[tuple[Pair, int]] | Sequence[Pair],
               candidates: Sequence[str] | None = None) -> LockGraph:
    """Lock pairs in agenda order, skipping any pair whose reverse is already reachable."""
    pairs = [item[0] if isinstance(item[0], tuple) else item for item in agenda]
    if candidates is None:
        candidates = sorted({c for pair in pairs for c in pair})
    candidates = tuple(candidates)
    idx = {c: i for i, c in enumerate(candidates)}
    reach = [1 << i for i in range(len(candidates))]
    adj: dict[str, list[str]] = {}
    locked, skipped = [], []
    for c, d in pairs:
        u, v = idx[c], idx[d]
        if reach[v] >> u & 1:
            skipped.append(((c, d), _find_path(adj, d, c)))
            continue
        locked.append((c, d))
        adj.setdefault(c, []).append(d)
        bit = 1 << u
        rv = reach[v]
        for x in range(len(reach)):
            if reach[x] & bit:
                reach[x] |= rv
    return LockGraph(candidates, tuple(locked), tuple(skipped))


def rp_winner_index(margins: np.ndarray, designee: int | None = None) -> int:
    """Ranked-pairs winner on a raw margin matrix; returns the row index."""
    m = margins.shape[0]
    if m == 1:
        return 0
    reach = [1 << i for i in range(m)]
    beaten = 0
    for _, u, v in _agenda_indices(margins, designee):
        if reach[v] >> u & 1:
            continue
        beaten |= 1 << v
        bit, rv = 1 << u, reach[v]
        for x in range(m):
            if reach[x] & bit:
                reach[x] |= rv
    free = [i for i in range(m) if not beaten >> i & 1]
    assert len(free) == 1, "a complete agenda locks a tournament with one source"
    return free[0]


def ranked_pairs_winner(g: WeightedMajorityGraph, policy: TieBreakPolicy = LEXICOGRAPHIC) -> str:
    return g.candidates[rp_winner_index(g.margins, _designee_index(g.candidates, policy))]
