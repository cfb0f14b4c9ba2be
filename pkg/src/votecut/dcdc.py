"""Polynomial-time Schulze destructive control by deleting candidates (nonunique model),
the in-neighbor witness structure behind it, and cut-based drivers for the
adding/deleting and candidate-group variants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .control import ControlError, ControlInstance
from .cuts import CutResult, DiGraph, cppvc_decide, mippvc_decide, threshold_graph
from .profile import Election, WeightedMajorityGraph, build_wmg
from .schulze import condorcet_winner, widest_paths, winner_mask


@dataclass
class RivalAnalysis:
    despised: str
    rival: str
    thresholds: list[int] = field(default_factory=list)
    rounds: list[tuple[str, ...]] = field(default_factory=list)
    ctr: int = 0
    outcome: str = "pending"

    @property
    def deleted(self) -> tuple[str, ...]:
        return tuple(sorted(c for r in self.rounds for c in r))


class DcdcResult(NamedTuple):
    decision: bool
    witness: tuple[str, ...] | None
    trace: list[RivalAnalysis]
    ops: int


class CutDecomposition(NamedTuple):
    deleted: frozenset[str]
    induced: frozenset[str]
    frontier: frozenset[str]


def _as_wmg(g) -> WeightedMajorityGraph:
    return build_wmg(g) if isinstance(g, Election) else g


def _simple_path_union(adj: dict[int, list[int]], s: int, t: int):
    verts, edges = set(), set()
    path, on_path = [s], {s}

    def dfs(u):
        if u == t:
            verts.update(path)
            edges.update(zip(path, path[1:]))
            return
        for v in adj[u]:
            if v not in on_path:
                path.append(v)
                on_path.add(v)
                dfs(v)
                path.pop()
                on_path.discard(v)

    dfs(s)
    return verts, edges


def stronger_path_subgraph(g, d: str, c: str, threshold: int) -> DiGraph:
    """Union of all simple ``d -> c`` paths whose every edge has margin > ``threshold``.

    Exact (exponential in the worst case); intended for inspection and tests.
    The polynomial solver below never calls it.
    """
    g = _as_wmg(g)
    if d == c:
        raise ValueError("d and c must differ")
    M = g.margins
    i, j = g.index(d), g.index(c)
    adj = {u: [v for v in range(g.m) if v != u and M[u, v] > threshold] for u in range(g.m)}
    verts, edges = _simple_path_union(adj, i, j)
    names = g.candidates
    return DiGraph([names[v] for v in verts], [(names[u], names[v]) for u, v in edges])


def _first_hit_in_neighbors(M: np.ndarray, alive: list[int], d: int, c: int, theta: int) -> set[int] | None:
    """Smallest set of in-neighbors of ``c`` that cuts every ``d -> c`` path with
    all margins >= ``theta``: the in-neighbors ``d`` reaches without passing
    through another one. ``None`` when the direct edge ``d -> c`` is that strong."""
    if M[d, c] >= theta:
        return None
    inn = {v for v in alive if v not in (c, d) and M[v, c] >= theta}
    seen, stack, hit = {d}, [d], set()
    while stack:
        u = stack.pop()
        for v in alive:
            if v in seen or v == c or M[u, v] < theta:
                continue
            seen.add(v)
            if v in inn:
                hit.add(v)
            else:
                stack.append(v)
    return hit


def _d_wins(M: np.ndarray, alive: list[int], d: int) -> bool:
    if len(alive) == 1:
        return True
    idx = np.array(alive)
    return bool(winner_mask(widest_paths(M[np.ix_(idx, idx)]))[alive.index(d)])


def solve_dcdc_nonunique(g, d: str, ell: int) -> DcdcResult:
    """Can ``d`` be made a Schulze non-winner by deleting at most ``ell`` candidates?

    For each possible rival ``c`` the solver repeatedly takes the current
    strength ``P(c, d)`` as threshold and deletes the in-neighbors of ``c``
    that first block the ``d -> c`` paths of at least that strength, until
    ``d`` loses, nothing is left to delete, or the budget is exhausted.
    """
    g = _as_wmg(g)
    M = g.margins
    names = g.candidates
    m = g.m
    di = g.index(d)
    everyone = list(range(m))
    ops = m ** 3
    if not _d_wins(M, everyone, di):
        return DcdcResult(True, (), [], ops)
    P = widest_paths(M)
    trace = []
    for ci in range(m):
        if ci == di:
            continue
        a = RivalAnalysis(d, names[ci])
        trace.append(a)
        if M[di, ci] >= P[ci, di] or P[ci, di] <= 0:
            a.outcome = "not a rival"
            continue
        alive = list(everyone)
        deleted: list[int] = []
        while True:
            idx = np.array(alive)
            sub = widest_paths(M[np.ix_(idx, idx)])
            ops += len(alive) ** 3
            theta = int(sub[alive.index(ci), alive.index(di)])
            a.thresholds.append(theta)
            cut = _first_hit_in_neighbors(M, alive, di, ci, theta)
            ops += len(alive) ** 2
            if not cut:
                a.outcome = "no deletable in-neighbors"
                break
            a.ctr += len(cut)
            if a.ctr > ell:
                a.outcome = "over budget"
                break
            a.rounds.append(tuple(sorted(names[v] for v in cut)))
            deleted.extend(cut)
            alive = [v for v in alive if v not in cut]
            ops += len(alive) ** 3
            if not _d_wins(M, alive, di):
                a.outcome = "dethroned"
                return DcdcResult(True, tuple(sorted(names[v] for v in deleted)), trace, ops)
    return DcdcResult(False, None, trace, ops)


def in_neighbor_witness(g, d: str, ell: int) -> tuple[str, tuple[str, ...]] | None:
    """A rival ``c`` and at most ``ell`` deletions, all among the candidates that
    beat ``c`` directly, after which ``c`` beats ``d``. Exhaustive per rival."""
    g = _as_wmg(g)
    M = g.margins
    names = g.candidates
    di = g.index(d)
    everyone = list(range(g.m))
    if not _d_wins(M, everyone, di):
        return None if g.m == 1 else _already_beaten(g, di)
    for ci in everyone:
        if ci == di:
            continue
        inn = [v for v in everyone if v not in (ci, di) and M[v, ci] > 0]
        for r in range(min(ell, len(inn)) + 1):
            for combo in combinations(inn, r):
                alive = [v for v in everyone if v not in combo]
                idx = np.array(alive)
                P = widest_paths(M[np.ix_(idx, idx)])
                a, b = alive.index(ci), alive.index(di)
                if P[a, b] > P[b, a]:
                    return names[ci], tuple(names[v] for v in combo)
    return None


def _already_beaten(g: WeightedMajorityGraph, di: int):
    P = widest_paths(g.margins)
    for ci in range(g.m):
        if ci != di and P[ci, di] > P[di, ci]:
            return g.candidates[ci], ()
    return None


def cut_decomposition(g, d: str, c: str, deleted: Sequence[str]) -> CutDecomposition:
    """Split the stronger ``d -> c`` paths around a deletion set.

    ``induced`` holds the survivors on those paths that still reach ``c`` but
    are no longer reachable from ``d``; ``frontier`` is the part of ``induced``
    with a deleted in-neighbor.
    """
    g = _as_wmg(g)
    theta = int(widest_paths(g.margins)[g.index(c), g.index(d)])
    sub = stronger_path_subgraph(g, d, c, theta - 1)
    gone = set(deleted)
    keep = [v for v in sub.vertices if v not in gone]
    succ = {v: [] for v in keep}
    pred = {v: [] for v in keep}
    for u, v in sub.edges:
        if u in succ and v in succ:
            succ[u].append(v)
            pred[v].append(u)

    def closure(start, nbrs):
        seen, stack = {start}, [start]
        while stack:
            for v in nbrs[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    from_d = closure(d, succ) if d in succ else set()
    to_c = closure(c, pred) if c in pred else set()
    induced = frozenset(v for v in to_c if v not in from_d and v not in (c, d))
    frontier = frozenset(v for v in induced
                         if any((u, v) in sub.edges for u in gone))
    return CutDecomposition(frozenset(gone), induced, frontier)


# -- cut-based drivers -------------------------------------------------------

CutOracle = Callable[..., CutResult]


def _check_driver_instance(inst: ControlInstance) -> None:
    if inst.rule.kind != "schulze":
        raise ControlError("cut drivers apply to Schulze only")
    if inst.mode != "destructive" or inst.model != "nonunique":
        raise ControlError("cut drivers solve the destructive nonunique-winner problem")
    if inst.spare_ballots:
        raise ControlError("cut drivers take no spare ballots")


def _thresholds(M: np.ndarray) -> list[int]:
    vals = {int(v) for v in M[~np.eye(M.shape[0], dtype=bool)]}
    return sorted(vals, reverse=True)


def _initial_loses(inst: ControlInstance) -> bool:
    base = inst.election.project(inst.base_candidates)
    g = build_wmg(base)
    if g.m == 1:
        return False
    mask = winner_mask(widest_paths(g.margins))
    return not mask[g.index(inst.distinguished)]


def dcac_dc_via_cut(inst: ControlInstance, cut_oracle: CutOracle = mippvc_decide) -> bool:
    """Destructive adding+deleting candidates through labeled path-preserving cuts.

    For every rival ``c`` and every margin value ``theta``, ask for a cut in the
    graph of edges with margin >= ``theta`` that separates ``p`` from ``c`` but
    keeps a ``c -> p`` path, deleting at most ``ell_DC`` original candidates and
    leaving at most ``ell_AC`` spare candidates in.
    """
    _check_driver_instance(inst)
    if inst.exact or not set(inst.prongs) <= {"AC", "DC"}:
        raise ControlError("expected a nonexact AC, DC or AC+DC instance")
    if _initial_loses(inst):
        return True
    full = build_wmg(inst.election)
    if condorcet_winner(full) == inst.distinguished:
        return False
    l_ac = inst.limits.get("AC", 0)
    l_dc = inst.limits.get("DC", 0)
    spare = inst.spare_candidates
    p = inst.distinguished
    for theta in _thresholds(full.margins):
        graph = threshold_graph(full.candidates, full.margins, theta)
        for c in full.candidates:
            if c == p:
                continue
            labeled = spare - {c}
            y = max(0, len(spare) - l_ac)
            if cut_oracle(graph, p, c, labeled, l_dc, y).decision:
                return True
    return False


def group_control_via_cut(inst: ControlInstance, cut_oracle: CutOracle = cppvc_decide) -> bool:
    """Destructive deleting or adding of candidate groups through colored cuts."""
    _check_driver_instance(inst)
    if inst.exact or inst.prongs not in (("DCG",), ("ACG",)):
        raise ControlError("expected a nonexact DCG or ACG instance")
    if _initial_loses(inst):
        return True
    p = inst.distinguished
    full = build_wmg(inst.election)
    if inst.prongs == ("DCG",):
        col = {c: ("group", inst.groups[c]) for c in full.candidates}
        budget, floor = inst.limits["DCG"], 0
    else:
        # original candidates share p's color, so they are never cut
        col = {c: ("group", inst.groups[c]) if c in inst.spare_candidates else ("base",)
               for c in full.candidates}
        col[p] = ("base",)
        budget = len(inst.spare_candidates)
        floor = max(0, len(inst.spare_candidates) - inst.limits["ACG"])
    for theta in _thresholds(full.margins):
        graph = threshold_graph(full.candidates, full.margins, theta)
        for c in full.candidates:
            if c == p:
                continue
            if cut_oracle(graph, p, c, col, budget, floor).decision:
                return True
    return False
