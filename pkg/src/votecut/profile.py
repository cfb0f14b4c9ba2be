"""Elections over strict linear orders, pairwise statistics and weighted majority graphs.

Ballots are stored as ``(ranking, multiplicity)`` pairs. Candidate names are
plain tokens, ordered byte-wise; every matrix in this package is indexed by
the sorted candidate tuple, so index order and lexicographic order coincide.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

Ballot = tuple[str, ...]

_BAD_NAME = re.compile(r"[\s>,:=#\[\]]")


class ProfileError(ValueError):
    """Raised for malformed candidates, ballots or election files."""


class ParityError(ProfileError):
    """A margin residual cannot be realized with linear-order ballot pairs."""

    def __init__(self, pair: tuple[str, str], residual: int):
        self.pair = pair
        self.residual = residual
        super().__init__(
            f"margin residual {residual} on pair ({pair[0]}, {pair[1]}) is odd; "
            "linear-order ballots change every margin by an even amount in pairs"
        )


def check_name(name: str) -> str:
    if not isinstance(name, str) or not name or _BAD_NAME.search(name):
        raise ProfileError(f"invalid candidate name {name!r}")
    return name


@dataclass(frozen=True)
class Election:
    """A candidate set plus a multiset of strict rankings.

    ``candidates`` is normalized to sorted order. ``ballots`` keeps the given
    order; each entry is ``(ranking, multiplicity)`` with multiplicity >= 1.
    """

    candidates: tuple[str, ...]
    ballots: tuple[tuple[Ballot, int], ...] = ()

    def __post_init__(self):
        cands = tuple(sorted(check_name(c) for c in self.candidates))
        if not cands:
            raise ProfileError("an election needs at least one candidate")
        if len(set(cands)) != len(cands):
            dup = next(c for c in cands if cands.count(c) > 1)
            raise ProfileError(f"duplicate candidate {dup!r}")
        object.__setattr__(self, "candidates", cands)
        known = set(cands)
        norm = []
        for ranking, count in self.ballots:
            ranking = tuple(ranking)
            _check_ranking(ranking, known)
            if isinstance(count, bool) or not isinstance(count, (int, np.integer)) or count < 1:
                raise ProfileError(f"ballot multiplicity must be a positive integer, got {count!r}")
            norm.append((ranking, int(count)))
        object.__setattr__(self, "ballots", tuple(norm))

    @property
    def n(self) -> int:
        return sum(count for _, count in self.ballots)

    @property
    def m(self) -> int:
        return len(self.candidates)

    def index(self, c: str) -> int:
        try:
            return self.candidates.index(c)
        except ValueError:
            raise ProfileError(f"unknown candidate {c!r}") from None

    def expanded(self) -> Iterator[Ballot]:
        """Yield every ballot once per multiplicity, in file order."""
        for ranking, count in self.ballots:
            for _ in range(count):
                yield ranking

    def project(self, keep: Iterable[str]) -> "Election":
        """Restrict every ballot to ``keep``, preserving relative order."""
        keep = set(keep)
        missing = keep - set(self.candidates)
        if missing:
            raise ProfileError(f"unknown candidates {sorted(missing)}")
        ballots = [(tuple(c for c in r if c in keep), k) for r, k in self.ballots]
        return Election(tuple(keep), tuple(ballots))


def _check_ranking(ranking: Sequence[str], known: set[str]) -> None:
    seen = set()
    for c in ranking:
        if c not in known:
            raise ProfileError(f"ballot ranks unknown candidate {c!r}")
        if c in seen:
            raise ProfileError(f"ballot ranks candidate {c!r} twice")
        seen.add(c)
    if len(seen) != len(known):
        missing = sorted(known - seen)
        raise ProfileError(f"ballot omits candidate {missing[0]!r}")


def ballot_contribution(ranking: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
    """Margin matrix (+1/-1 off-diagonal) of a single ballot over ``candidates``."""
    pos = {c: i for i, c in enumerate(ranking)}
    order = np.array([pos[c] for c in candidates])
    above = order[:, None] < order[None, :]
    return above.astype(np.int64) - above.T.astype(np.int64)


def _support_matrix(e: Election) -> np.ndarray:
    m = e.m
    support = np.zeros((m, m), dtype=np.int64)
    for ranking, count in e.ballots:
        pos = {c: i for i, c in enumerate(ranking)}
        order = np.array([pos[c] for c in e.candidates])
        support += (order[:, None] < order[None, :]) * count
    return support


def pairwise_support(e: Election, c: str, d: str) -> int:
    """Number of ballots (with multiplicity) ranking ``c`` above ``d``."""
    if c == d:
        raise ProfileError("pairwise support needs two distinct candidates")
    e.index(c), e.index(d)
    total = 0
    for ranking, count in e.ballots:
        if ranking.index(c) < ranking.index(d):
            total += count
    return total


def pairwise_margin(e: Election, c: str, d: str) -> int:
    return pairwise_support(e, c, d) - pairwise_support(e, d, c)


class WeightedMajorityGraph:
    """Complete antisymmetric integer margin function over a candidate set.

    ``margins[i, j]`` is the margin of ``candidates[i]`` over ``candidates[j]``;
    the diagonal is zero and never consulted. ``parity`` is ``n mod 2`` when the
    graph was built from an election, else ``None``.
    """

    __slots__ = ("candidates", "margins", "parity", "_index")

    def __init__(self, candidates: Sequence[str], margins, parity: int | None = None):
        cands = tuple(check_name(c) for c in candidates)
        if list(cands) != sorted(cands) or len(set(cands)) != len(cands):
            order = sorted(range(len(cands)), key=lambda i: cands[i])
            if len(set(cands)) != len(cands):
                raise ProfileError("duplicate candidate in weighted majority graph")
            margins = np.asarray(margins)[np.ix_(order, order)]
            cands = tuple(cands[i] for i in order)
        mat = np.array(margins, dtype=np.int64)
        if mat.shape != (len(cands), len(cands)):
            raise ProfileError("margin matrix shape does not match candidate count")
        np.fill_diagonal(mat, 0)
        if not np.array_equal(mat, -mat.T):
            raise ProfileError("margins must be antisymmetric")
        mat.setflags(write=False)
        self.candidates = cands
        self.margins = mat
        self.parity = parity
        self._index = {c: i for i, c in enumerate(cands)}

    @classmethod
    def from_edges(cls, candidates: Iterable[str], edges: Mapping[tuple[str, str], int]
                   ) -> "WeightedMajorityGraph":
        """Build from ``{(c, d): margin}``; the reverse direction is implied."""
        cands = tuple(sorted(candidates))
        idx = {c: i for i, c in enumerate(cands)}
        mat = np.zeros((len(cands), len(cands)), dtype=np.int64)
        for (c, d), w in edges.items():
            if c not in idx or d not in idx:
                raise ProfileError(f"edge ({c}, {d}) references an unknown candidate")
            if c == d:
                raise ProfileError(f"self-loop on {c!r}")
            i, j = idx[c], idx[d]
            if mat[i, j] != 0 and mat[i, j] != w:
                raise ProfileError(f"conflicting margins for ({c}, {d})")
            mat[i, j] = w
            mat[j, i] = -w
        return cls(cands, mat)

    def index(self, c: str) -> int:
        try:
            return self._index[c]
        except KeyError:
            raise ProfileError(f"unknown candidate {c!r}") from None

    def margin(self, c: str, d: str) -> int:
        if c == d:
            raise ProfileError("margin needs two distinct candidates")
        return int(self.margins[self.index(c), self.index(d)])

    @property
    def m(self) -> int:
        return len(self.candidates)

    def positive_edges(self) -> list[tuple[str, str, int]]:
        out = []
        for i, c in enumerate(self.candidates):
            for j, d in enumerate(self.candidates):
                if self.margins[i, j] > 0:
                    out.append((c, d, int(self.margins[i, j])))
        return out

    def restrict(self, keep: Iterable[str]) -> "WeightedMajorityGraph":
        """Sub-WMG on ``keep``; margins between survivors do not depend on the rest."""
        keep = sorted(set(keep))
        idx = [self.index(c) for c in keep]
        return WeightedMajorityGraph(keep, self.margins[np.ix_(idx, idx)], self.parity)

    def without(self, drop: Iterable[str]) -> "WeightedMajorityGraph":
        drop = set(drop)
        return self.restrict(c for c in self.candidates if c not in drop)

    def __eq__(self, other):
        if not isinstance(other, WeightedMajorityGraph):
            return NotImplemented
        return self.candidates == other.candidates and np.array_equal(self.margins, other.margins)

    def __hash__(self):
        return hash((self.candidates, self.margins.tobytes()))

    def __repr__(self):
        edges = ", ".join(f"{c}>{d}:{w}" for c, d, w in self.positive_edges())
        return f"WeightedMajorityGraph([{', '.join(self.candidates)}], {{{edges}}})"


def build_wmg(e: Election) -> WeightedMajorityGraph:
    support = _support_matrix(e)
    return WeightedMajorityGraph(e.candidates, support - support.T, parity=e.n % 2)


def w_pair(candidates: Iterable[str], c: str, d: str) -> tuple[Ballot, Ballot]:
    """The two ballots ``c d rest`` and ``reversed(rest) c d``.

    Together they raise margin(c, d) by 2 and leave every other pair unchanged.
    """
    if c == d:
        raise ProfileError("w_pair needs two distinct candidates")
    cands = sorted(candidates)
    if c not in cands or d not in cands:
        raise ProfileError(f"w_pair candidates {c!r}, {d!r} must belong to the candidate set")
    rest = [x for x in cands if x != c and x != d]
    return (c, d, *rest), (*reversed(rest), c, d)


def mcgarvey_realize(target: WeightedMajorityGraph, base: Election | None = None) -> Election:
    """Append W-pairs to ``base`` until its WMG equals ``target`` exactly.

    Residual pairs are visited in lexicographic order; each positive residual
    ``r`` on ``(c, d)`` contributes ``r/2`` copies of both ballots of
    ``w_pair(c, d)``.
    """
    cands = target.candidates
    if base is not None:
        if base.candidates != cands:
            raise ProfileError("base election must rank exactly the target's candidates")
        residual = target.margins - build_wmg(base).margins
        ballots = list(base.ballots)
    else:
        residual = target.margins
        ballots = []
    for i, c in enumerate(cands):
        for j in range(i + 1, len(cands)):
            r = int(residual[i, j])
            if r == 0:
                continue
            win, lose = (c, cands[j]) if r > 0 else (cands[j], c)
            if r % 2:
                raise ParityError((win, lose), abs(r))
            fwd, rev = w_pair(cands, win, lose)
            ballots.append((fwd, abs(r) // 2))
            ballots.append((rev, abs(r) // 2))
    return Election(cands, tuple(ballots))


def pad_bottom(e: Election, newcomers: Sequence[str]) -> Election:
    """Append ``newcomers`` (in the given order) to the bottom of every ballot."""
    newcomers = tuple(newcomers)
    clash = set(newcomers) & set(e.candidates)
    if clash:
        raise ProfileError(f"name collision: {sorted(clash)}")
    if len(set(newcomers)) != len(newcomers):
        raise ProfileError("duplicate newcomer")
    if not newcomers:
        return e
    ballots = tuple((ranking + newcomers, k) for ranking, k in e.ballots)
    return Election(e.candidates + newcomers, ballots)


def scale_margins(g: WeightedMajorityGraph, k: int) -> WeightedMajorityGraph:
    if k < 1:
        raise ValueError("scale factor must be a positive integer")
    return WeightedMajorityGraph(g.candidates, g.margins * k)


def double_margins(g: WeightedMajorityGraph) -> WeightedMajorityGraph:
    """Doubling keeps every margin comparison, so winners of both rules are unchanged."""
    return scale_margins(g, 2)


# -- file formats -----------------------------------------------------------

def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_header(line: str, lineno: int) -> tuple[str, ...]:
    if not line.startswith("candidates:"):
        raise ProfileError(f"line {lineno}: expected 'candidates:' header")
    body = line[len("candidates:"):].strip()
    names = tuple(t.strip() for t in body.split(",")) if body else ()
    if not names or any(not t for t in names):
        raise ProfileError(f"line {lineno}: empty candidate list")
    for t in names:
        try:
            check_name(t)
        except ProfileError:
            raise ProfileError(f"line {lineno}: invalid candidate token {t!r}") from None
    return names


def parse_ballot_line(line: str, lineno: int, candidates: Sequence[str]) -> tuple[Ballot, int]:
    count_text, sep, body = line.partition(":")
    if not sep:
        raise ProfileError(f"line {lineno}: expected '<count>: a > b > ...'")
    count_text = count_text.strip()
    if not count_text.isdigit() or int(count_text) < 1:
        raise ProfileError(f"line {lineno}: malformed count {count_text!r}")
    ranking = tuple(t.strip() for t in body.split(">"))
    known = set(candidates)
    seen: set[str] = set()
    for t in ranking:
        if t not in known:
            raise ProfileError(f"line {lineno}: unknown token {t!r}")
        if t in seen:
            raise ProfileError(f"line {lineno}: duplicate candidate {t!r} in ballot")
        seen.add(t)
    missing = [c for c in sorted(known) if c not in seen]
    if missing:
        raise ProfileError(f"line {lineno}: ballot is missing candidate {missing[0]!r}")
    return ranking, int(count_text)


def parse_election_lines(lines: Iterable[tuple[int, str]]) -> Election:
    lines = iter(lines)
    try:
        lineno, first = next(lines)
    except StopIteration:
        raise ProfileError("empty election file") from None
    names = _parse_header(first, lineno)
    if len(set(names)) != len(names):
        raise ProfileError(f"line {lineno}: duplicate candidate in header")
    ballots = [parse_ballot_line(line, no, names) for no, line in lines]
    return Election(names, tuple(ballots))


def parse_election(text: str) -> Election:
    return parse_election_lines(_content_lines(text))


def format_ballot(ranking: Ballot, count: int) -> str:
    return f"{count}: {' > '.join(ranking)}"


def serialize_election(e: Election) -> str:
    lines = [f"candidates: {', '.join(e.candidates)}"]
    lines.extend(format_ballot(r, k) for r, k in e.ballots)
    return "\n".join(lines) + "\n"


def parse_wmg(text: str) -> WeightedMajorityGraph:
    lines = _content_lines(text)
    try:
        lineno, first = next(lines)
    except StopIteration:
        raise ProfileError("empty WMG file") from None
    names = _parse_header(first, lineno)
    edges: dict[tuple[str, str], int] = {}
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 3:
            raise ProfileError(f"line {lineno}: expected 'c d <margin>'")
        c, d, w = parts
        try:
            weight = int(w)
        except ValueError:
            raise ProfileError(f"line {lineno}: malformed margin {w!r}") from None
        if weight <= 0:
            raise ProfileError(f"line {lineno}: only positive margins are listed")
        if (c, d) in edges or (d, c) in edges:
            raise ProfileError(f"line {lineno}: pair ({c}, {d}) listed twice")
        edges[(c, d)] = weight
    return WeightedMajorityGraph.from_edges(names, edges)


def serialize_wmg(g: WeightedMajorityGraph) -> str:
    lines = [f"candidates: {', '.join(g.candidates)}"]
    lines.extend(f"{c} {d} {w}" for c, d, w in g.positive_edges())
    return "\n".join(lines) + "\n"


def looks_like_wmg(text: str) -> bool:
    """True when the body lines are ``c d <int>`` edges rather than ballots."""
    for i, (_, line) in enumerate(_content_lines(text)):
        if i == 0:
            continue
        return ":" not in line
    return False
