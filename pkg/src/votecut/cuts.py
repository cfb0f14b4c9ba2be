"""s-t vertex cuts and path-preserving vertex cut variants on small digraphs.

The path-preserving problems are decided by exact subset enumeration. Cut
sets never contain ``s`` or ``t``. Candidate subsets are visited by size and
then in ``itertools.combinations`` order over the sorted vertex list, so the
reported witness is the first such subset.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import networkx as nx


class CutError(ValueError):
    pass


@dataclass(frozen=True)
class DiGraph:
    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        verts = tuple(sorted(set(vertices)))
        es = frozenset((u, v) for u, v in edges)
        known = set(verts)
        for u, v in es:
            if u == v:
                raise CutError(f"self-loop on {u!r}")
            if u not in known or v not in known:
                raise CutError(f"edge ({u}, {v}) references an unknown vertex")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", es)

    def successors(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in sorted(self.edges):
            out[u].append(v)
        return out

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g


class CutResult(NamedTuple):
    decision: bool
    witness: frozenset[str] | None


class _Bits:
    """Bitmask adjacency for fast repeated reachability under vertex removal."""

    def __init__(self, g: DiGraph):
        self.index = {v: i for i, v in enumerate(g.vertices)}
        self.adj = [0] * len(g.vertices)
        for u, v in g.edges:
            self.adj[self.index[u]] |= 1 << self.index[v]

    def mask(self, vs: Iterable[str]) -> int:
        out = 0
        for v in vs:
            out |= 1 << self.index[v]
        return out

    def reaches(self, s: int, t: int, removed: int) -> bool:
        seen = frontier = 1 << s
        target = 1 << t
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= self.adj[low.bit_length() - 1]
                f ^= low
            nxt &= ~removed & ~seen
            if nxt & target:
                return True
            seen |= nxt
            frontier = nxt
        return False


def _check_st(g: DiGraph, s: str, t: str) -> None:
    if s == t:
        raise CutError("s and t must differ")
    for v in (s, t):
        if v not in g.vertices:
            raise CutError(f"unknown vertex {v!r}")


def min_st_vertex_cut(g: DiGraph, s: str, t: str) -> tuple[int, frozenset[str]]:
    """Minimum internal vertex cut via vertex splitting and max flow."""
    _check_st(g, s, t)
    if (s, t) in g.edges:
        raise CutError("a direct s->t edge cannot be cut by removing vertices")
    flow = nx.DiGraph()
    big = len(g.vertices) + 1
    for v in g.vertices:
        cap = big if v in (s, t) else 1
        flow.add_edge((v, "in"), (v, "out"), capacity=cap)
    for u, v in g.edges:
        flow.add_edge((u, "out"), (v, "in"), capacity=big)
    value, (reach, _) = nx.minimum_cut(flow, (s, "out"), (t, "in"))
    cut = frozenset(v for v in g.vertices
                    if (v, "in") in reach and (v, "out") not in reach)
    assert len(cut) == value
    return int(value), cut


def _internal(g: DiGraph, s: str, t: str) -> list[str]:
    return [v for v in g.vertices if v not in (s, t)]


def _is_ppvc(bits: _Bits, s: int, t: int, removed: int) -> bool:
    # preservation first: it fails more often on the subsets we try
    return bits.reaches(t, s, removed) and not bits.reaches(s, t, removed)


def is_path_preserving_cut(g: DiGraph, s: str, t: str, cut: Iterable[str]) -> bool:
    cut = set(cut)
    if s in cut or t in cut:
        return False
    bits = _Bits(g)
    return _is_ppvc(bits, bits.index[s], bits.index[t], bits.mask(cut))


def _search(g: DiGraph, s: str, t: str, pool: Sequence[str], max_size: int,
            accept=None) -> CutResult:
    bits = _Bits(g)
    si, ti = bits.index[s], bits.index[t]
    if not bits.reaches(ti, si, 0):
        return CutResult(False, None)
    for size in range(0, min(max_size, len(pool)) + 1):
        for combo in combinations(pool, size):
            if accept is not None and not accept(combo):
                continue
            if _is_ppvc(bits, si, ti, bits.mask(combo)):
                return CutResult(True, frozenset(combo))
    return CutResult(False, None)


def ppvc_decide(g: DiGraph, s: str, t: str, k: int) -> CutResult:
    """Is there a cut of at most ``k`` internal vertices that kills every s->t path
    while some t->s path survives?"""
    _check_st(g, s, t)
    if k < 0:
        return CutResult(False, None)
    return _search(g, s, t, _internal(g, s, t), k)


def mippvc_decide(g: DiGraph, s: str, t: str, labeled: Iterable[str], x: int, y: int
                  ) -> CutResult:
    """PPVC where at most ``x`` cut vertices are unlabeled and at least ``y`` are labeled."""
    _check_st(g, s, t)
    labeled = frozenset(labeled)
    if s in labeled or t in labeled:
        raise CutError("s and t cannot be labeled")
    if not labeled <= set(g.vertices):
        raise CutError("labels reference unknown vertices")
    if x < 0 or y > len(labeled):
        return CutResult(False, None)
    pool = _internal(g, s, t)

    def accept(combo):
        inside = sum(1 for v in combo if v in labeled)
        return inside >= y and len(combo) - inside <= x

    return _search(g, s, t, pool, x + len(labeled), accept)


def cppvc_decide(g: DiGraph, s: str, t: str, col: Mapping[str, object], k: int,
                 min_size: int = 0) -> CutResult:
    """PPVC where the cut is a union of whole color classes.

    Classes containing ``s`` or ``t`` are never cut. ``min_size`` additionally
    demands at least that many cut vertices (used by the group-adding driver).
    """
    _check_st(g, s, t)
    missing = [v for v in g.vertices if v not in col]
    if missing:
        raise CutError(f"coloring is not total: {missing[0]!r} has no color")
    banned = {col[s], col[t]}
    classes: dict[object, list[str]] = {}
    for v in g.vertices:
        if col[v] not in banned:
            classes.setdefault(col[v], []).append(v)
    keys = sorted(classes, key=lambda c: classes[c][0])
    bits = _Bits(g)
    si, ti = bits.index[s], bits.index[t]
    if k < 0 or not bits.reaches(ti, si, 0):
        return CutResult(False, None)
    for count in range(len(keys) + 1):
        for combo in combinations(keys, count):
            members = [v for c in combo for v in classes[c]]
            if not (min_size <= len(members) <= k):
                continue
            if _is_ppvc(bits, si, ti, bits.mask(members)):
                return CutResult(True, frozenset(members))
    return CutResult(False, None)


# -- file format ------------------------------------------------------------

def parse_digraph(text: str) -> DiGraph:
    vertices: list[str] | None = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if vertices is None:
            if not line.startswith("vertices:"):
                raise CutError(f"line {lineno}: expected 'vertices:' header")
            vertices = [v for v in re.split(r"[,\s]+", line[len("vertices:"):]) if v]
            if not vertices:
                raise CutError(f"line {lineno}: empty vertex list")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CutError(f"line {lineno}: expected 'u v'")
        edges.append((parts[0], parts[1]))
    if vertices is None:
        raise CutError("empty digraph file")
    if len(set(vertices)) != len(vertices):
        raise CutError("duplicate vertex in header")
    return DiGraph(vertices, edges)


def serialize_digraph(g: DiGraph) -> str:
    lines = [f"vertices: {', '.join(g.vertices)}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def threshold_graph(candidates: Sequence[str], margins, theta: int) -> DiGraph:
    """Digraph with an edge c->d for every margin(c, d) >= theta."""
    edges = []
    for i, c in enumerate(candidates):
        for j, d in enumerate(candidates):
            if i != j and margins[i, j] >= theta:
                edges.append((c, d))
    return DiGraph(candidates, edges)


def iter_subsets(pool: Sequence[str], max_size: int) -> Iterator[tuple[str, ...]]:
    for size in range(min(max_size, len(pool)) + 1):
        yield from combinations(pool, size)
