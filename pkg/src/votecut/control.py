"""Exhaustive control solvers for Schulze and ranked pairs, with canonical witnesses.

An instance stores one election over ``C ∪ D`` (registered ballots ``V``),
the spare candidates ``D`` and spare ballots ``U``. Every action is evaluated
on margin matrices: candidate changes select a sub-matrix of the full
``C ∪ D`` margins, ballot changes add or subtract per-ballot contribution
matrices. This is equivalent to projecting the ballots onto the active set.

Enumeration order (and hence the reported witness) is fixed: deleted
candidates, added candidates, deleted ballots, added ballots, bribes. Each
prong runs through sizes in increasing order and subsets in combination
order. Ballots are grouped by file entry; within an entry the lowest
indices are used first.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from itertools import combinations, combinations_with_replacement, permutations
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .profile import (Ballot, Election, ProfileError, ballot_contribution, build_wmg,
                      check_name, format_ballot, pad_bottom, parse_ballot_line,
                      parse_election_lines, serialize_election)
from .rankedpairs import TieBreakPolicy, rp_winner_index
from .schulze import widest_paths, winner_mask

DEFAULT_GUARD = 10_000_000

PRONG_ORDER = ("AC", "DC", "ACG", "DCG", "RC", "AV", "DV", "RV", "B")
CANDIDATE_PRONGS = {"AC", "DC", "ACG", "DCG", "RC"}
BALLOT_PRONGS = {"AV", "DV", "RV", "B"}


class ControlError(ValueError):
    """Malformed control instance or file."""


class SearchSpaceExceeded(RuntimeError):
    def __init__(self, estimate: int, guard: int):
        self.estimate = estimate
        self.guard = guard
        super().__init__(f"search space of about {estimate:,} actions exceeds the guard of {guard:,}")


# -- rules and goals --------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    kind: str = "schulze"
    policy: TieBreakPolicy | None = None

    def __post_init__(self):
        if self.kind not in ("schulze", "ranked_pairs"):
            raise ControlError(f"unknown rule {self.kind!r}")
        if self.kind == "ranked_pairs" and self.policy is None:
            object.__setattr__(self, "policy", TieBreakPolicy())
        if self.kind == "schulze" and self.policy is not None:
            raise ControlError("schulze takes no tie-break policy")

    @classmethod
    def ranked_pairs(cls, policy: TieBreakPolicy | None = None) -> "Rule":
        return cls("ranked_pairs", policy or TieBreakPolicy())

    @classmethod
    def parse(cls, text: str) -> "Rule":
        text = text.strip()
        if text == "schulze":
            return cls()
        for name in ("ranked_pairs", "ranked-pairs"):
            if text == name:
                return cls.ranked_pairs()
            if text.startswith(name + "(") and text.endswith(")"):
                return cls.ranked_pairs(TieBreakPolicy.parse(text[len(name) + 1:-1]))
        raise ControlError(f"unknown rule {text!r}")

    def __str__(self):
        return "schulze" if self.kind == "schulze" else f"ranked_pairs({self.policy})"

    def winner_mask(self, candidates: Sequence[str], margins: np.ndarray) -> np.ndarray:
        m = len(candidates)
        if self.kind == "schulze":
            if m == 1:
                return np.ones(1, dtype=bool)
            return winner_mask(widest_paths(margins))
        designee = None
        if self.policy.kind == "favor_designated" and self.policy.designee in candidates:
            designee = list(candidates).index(self.policy.designee)
        out = np.zeros(m, dtype=bool)
        out[rp_winner_index(margins, designee)] = True
        return out

    def winners(self, candidates: Sequence[str], margins: np.ndarray) -> frozenset[str]:
        mask = self.winner_mask(candidates, margins)
        return frozenset(c for c, w in zip(candidates, mask) if w)


SCHULZE = Rule()


def _goal(mode: str, model: str, p_index: int | None, mask: np.ndarray) -> bool:
    if p_index is None:
        return mode == "destructive"
    wins = bool(mask[p_index])
    sole = wins and int(mask.sum()) == 1
    if mode == "constructive":
        return sole if model == "unique" else wins
    return not sole if model == "unique" else not wins


def goal_met(rule: Rule, mode: str, model: str, p: str, e: Election) -> bool:
    """Whether the control goal holds in ``e``.

    A destructive goal is met when ``p`` is no longer in the election.
    """
    _check_mode_model(mode, model)
    if p not in e.candidates:
        return mode == "destructive"
    mask = rule.winner_mask(e.candidates, build_wmg(e).margins)
    return _goal(mode, model, e.candidates.index(p), mask)


def _check_mode_model(mode: str, model: str) -> None:
    if mode not in ("constructive", "destructive"):
        raise ControlError(f"mode must be constructive or destructive, not {mode!r}")
    if model not in ("unique", "nonunique"):
        raise ControlError(f"model must be unique or nonunique, not {model!r}")


# -- problem types ----------------------------------------------------------

def parse_type(text: str) -> tuple[tuple[str, ...], bool]:
    """``'E_AC+DC'`` -> ``(('AC', 'DC'), True)``."""
    text = text.strip()
    exact = text.startswith("E_")
    body = text[2:] if exact else text
    prongs = tuple(t.strip() for t in body.split("+")) if body else ()
    return _normalize_prongs(prongs), exact


def _normalize_prongs(prongs: Sequence[str]) -> tuple[str, ...]:
    if not prongs:
        raise ControlError("a control type needs at least one prong")
    for t in prongs:
        if t not in PRONG_ORDER:
            raise ControlError(f"unknown control prong {t!r}")
    if len(set(prongs)) != len(prongs):
        raise ControlError("repeated control prong")
    s = set(prongs)
    if "RC" in s and s & {"AC", "DC", "ACG", "DCG"}:
        raise ControlError("replacing candidates cannot be combined with adding or deleting them")
    if "RV" in s and s & {"AV", "DV"}:
        raise ControlError("replacing ballots cannot be combined with adding or deleting them")
    if {"AC", "ACG"} <= s or {"DC", "DCG"} <= s:
        raise ControlError("group and single-candidate versions of one prong cannot be mixed")
    return tuple(t for t in PRONG_ORDER if t in s)


def render_type(prongs: Sequence[str], exact: bool) -> str:
    return ("E_" if exact else "") + "+".join(prongs)


def problem_name(prongs: Sequence[str], exact: bool, mode: str) -> str:
    """Conventional short name, e.g. ``ECCAC+DC``, ``DCDC``, ``DCACG``."""
    parts = [p[:-1] if p.endswith("G") else p for p in prongs]
    suffix = "G" if any(p.endswith("G") for p in prongs) else ""
    return ("E" if exact else "") + ("CC" if mode == "constructive" else "DC") + "+".join(parts) + suffix


def parse_problem_name(name: str) -> tuple[tuple[str, ...], bool, str]:
    """Inverse of :func:`problem_name`; returns ``(prongs, exact, mode)``."""
    text = name.strip().upper()
    exact = False
    if text.startswith("E-"):
        text = text[2:]
        exact = True
    elif text.startswith("E") and text[1:3] in ("CC", "DC") and len(text) > 3:
        exact = True
        text = text[1:]
    if text[:2] not in ("CC", "DC"):
        raise ControlError(f"cannot parse problem name {name!r}")
    mode = "constructive" if text[:2] == "CC" else "destructive"
    body = text[2:]
    grouped = body.endswith("G")
    if grouped:
        body = body[:-1]
    prongs = [t for t in body.split("+") if t]
    if grouped:
        if len(prongs) != 1 or prongs[0] not in ("AC", "DC"):
            raise ControlError("group variants exist for AC and DC only")
        prongs = [prongs[0] + "G"]
    return _normalize_prongs(prongs), exact, mode


# -- instances and witnesses ------------------------------------------------

@dataclass(frozen=True)
class ControlInstance:
    """A control problem.

    ``election`` ranks ``C ∪ D``; ``spare_candidates`` is ``D``; ``spare_ballots``
    rank ``C ∪ D`` as well. ``limits`` maps prong tokens to budgets; for group
    prongs the budget counts candidates.
    """

    election: Election
    distinguished: str
    prongs: tuple[str, ...]
    limits: Mapping[str, int]
    mode: str = "constructive"
    model: str = "unique"
    rule: Rule = SCHULZE
    exact: bool = False
    spare_candidates: frozenset[str] = frozenset()
    spare_ballots: tuple[tuple[Ballot, int], ...] = ()
    groups: Mapping[str, str] | None = None

    def __post_init__(self):
        _check_mode_model(self.mode, self.model)
        prongs = _normalize_prongs(self.prongs)
        object.__setattr__(self, "prongs", prongs)
        spare = frozenset(self.spare_candidates)
        object.__setattr__(self, "spare_candidates", spare)
        known = set(self.election.candidates)
        if not spare <= known:
            raise ControlError(f"spare candidates {sorted(spare - known)} are not ranked by the ballots")
        if self.distinguished not in known or self.distinguished in spare:
            raise ControlError(f"distinguished candidate {self.distinguished!r} must belong to C")
        limits = {}
        for key, val in dict(self.limits).items():
            if key not in prongs:
                raise ControlError(f"limit {key!r} does not match a prong of {render_type(prongs, self.exact)}")
            if isinstance(val, bool) or int(val) != val or val < 0:
                raise ControlError(f"limit {key} must be a nonnegative integer")
            limits[key] = int(val)
        missing = [t for t in prongs if t not in limits]
        if missing:
            raise ControlError(f"missing limit for prong {missing[0]}")
        object.__setattr__(self, "limits", dict(sorted(limits.items(), key=lambda kv: PRONG_ORDER.index(kv[0]))))
        ballots = []
        for ranking, count in self.spare_ballots:
            ranking = tuple(ranking)
            if sorted(ranking) != list(self.election.candidates):
                raise ControlError("spare ballots must rank exactly C ∪ D")
            if int(count) < 1:
                raise ControlError("spare ballot multiplicity must be positive")
            ballots.append((ranking, int(count)))
        object.__setattr__(self, "spare_ballots", tuple(ballots))
        grouped = any(t.endswith("G") for t in prongs)
        if self.groups is not None:
            groups = {c: str(g) for c, g in dict(self.groups).items()}
            if set(groups) != known:
                raise ControlError("group labeling must cover every candidate exactly")
            object.__setattr__(self, "groups", groups)
        elif grouped:
            raise ControlError("group variants require a total group labeling")

    @property
    def base_candidates(self) -> tuple[str, ...]:
        return tuple(c for c in self.election.candidates if c not in self.spare_candidates)

    @property
    def type_token(self) -> str:
        return render_type(self.prongs, self.exact)

    @property
    def name(self) -> str:
        return problem_name(self.prongs, self.exact, self.mode)

    def with_(self, **changes) -> "ControlInstance":
        return replace(self, **changes)


@dataclass(frozen=True)
class ControlWitness:
    deleted_candidates: tuple[str, ...] = ()
    added_candidates: tuple[str, ...] = ()
    deleted_ballots: tuple[int, ...] = ()
    added_ballots: tuple[int, ...] = ()
    # (pool "V" or "U", expanded index within that pool, new ranking)
    bribes: tuple[tuple[str, int, Ballot], ...] = ()

    def describe(self) -> dict:
        out = {}
        if self.deleted_candidates:
            out["deleted_candidates"] = list(self.deleted_candidates)
        if self.added_candidates:
            out["added_candidates"] = list(self.added_candidates)
        if self.deleted_ballots:
            out["deleted_ballots"] = list(self.deleted_ballots)
        if self.added_ballots:
            out["added_ballots"] = list(self.added_ballots)
        if self.bribes:
            out["bribes"] = [[pool, i, " > ".join(r)] for pool, i, r in self.bribes]
        return out


class ControlResult(NamedTuple):
    decision: bool
    witness: ControlWitness | None


# -- enumeration helpers ----------------------------------------------------

def _sizes(limit: int, exact: bool) -> range:
    return range(limit, limit + 1) if exact else range(0, limit + 1)


def count_vectors(caps: Sequence[int], total: int) -> Iterator[tuple[int, ...]]:
    """All vectors ``0 <= v[i] <= caps[i]`` summing to ``total``, descending-lex."""
    n = len(caps)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]
    vec = [0] * n

    def rec(i, left):
        if i == n:
            if left == 0:
                yield tuple(vec)
            return
        hi = min(caps[i], left)
        lo = max(0, left - suffix[i + 1])
        for v in range(hi, lo - 1, -1):
            vec[i] = v
            yield from rec(i + 1, left - v)
        vec[i] = 0

    if total <= suffix[0]:
        yield from rec(0, total)


def _count_vector_total(caps: Sequence[int], total: int) -> int:
    ways = [1] + [0] * total
    for cap in caps:
        nxt = [0] * (total + 1)
        for t, w in enumerate(ways):
            if w:
                for v in range(min(cap, total - t) + 1):
                    nxt[t + v] += w
        ways = nxt
    return ways[total]


def _expand_indices(counts: Sequence[int], vec: Sequence[int]) -> tuple[int, ...]:
    out, start = [], 0
    for c, v in zip(counts, vec):
        out.extend(range(start, start + v))
        start += c
    return tuple(out)


def _group_blocks(cands: Sequence[str], groups: Mapping[str, str], banned: set[str]) -> list[tuple[str, ...]]:
    blocks: dict[str, list[str]] = {}
    for c in cands:
        blocks.setdefault(groups[c], []).append(c)
    out = []
    for label in sorted(blocks, key=lambda g: blocks[g][0]):
        members = tuple(blocks[label])
        if not banned & set(groups[c] for c in members) and not banned & set(members):
            out.append(members)
    return out


def _block_moves(blocks: list[tuple[str, ...]], limit: int, exact: bool) -> Iterator[tuple[str, ...]]:
    for r in range(len(blocks) + 1):
        for combo in combinations(blocks, r):
            members = tuple(sorted(c for b in combo for c in b))
            if (len(members) == limit) if exact else (len(members) <= limit):
                yield members


def _subset_moves(pool: Sequence[str], limit: int, exact: bool) -> Iterator[tuple[str, ...]]:
    for r in _sizes(limit, exact):
        yield from combinations(pool, r)


class _Plan:
    """Everything the enumerator needs, precomputed once per instance."""

    def __init__(self, inst: ControlInstance):
        self.inst = inst
        e = inst.election
        self.all = e.candidates
        self.index = {c: i for i, c in enumerate(self.all)}
        self.C = inst.base_candidates
        self.D = tuple(sorted(inst.spare_candidates))
        self.p = inst.distinguished
        self.V = e.ballots
        self.U = inst.spare_ballots
        self.V_contrib = [ballot_contribution(r, self.all) for r, _ in self.V]
        self.U_contrib = [ballot_contribution(r, self.all) for r, _ in self.U]
        self.base = np.zeros((len(self.all), len(self.all)), dtype=np.int64)
        for (_, k), mat in zip(self.V, self.V_contrib):
            self.base += k * mat
        lim = inst.limits
        self.exact = inst.exact
        self.lim = lim

    # candidate side
    def candidate_moves(self) -> Iterator[tuple[tuple[str, ...], tuple[str, ...]]]:
        inst, lim, exact = self.inst, self.lim, self.exact
        deletable = [c for c in self.C if c != self.p]
        if "RC" in lim:
            for r in _sizes(lim["RC"], exact):
                for dl in combinations(deletable, r):
                    for ad in combinations(self.D, r):
                        yield dl, ad
            return
        if "DC" in lim:
            del_opts = lambda: _subset_moves(deletable, lim["DC"], exact)
        elif "DCG" in lim:
            blocks = _group_blocks(self.C, inst.groups, {inst.groups[self.p]})
            del_opts = lambda: _block_moves(blocks, lim["DCG"], exact)
        else:
            del_opts = lambda: iter([()])
        if "AC" in lim:
            add_opts = lambda: _subset_moves(self.D, lim["AC"], exact)
        elif "ACG" in lim:
            blocks = _group_blocks(self.D, inst.groups, set())
            add_opts = lambda: _block_moves(blocks, lim["ACG"], exact)
        else:
            add_opts = lambda: iter([()])
        for dl in del_opts():
            for ad in add_opts():
                yield dl, ad

    def candidate_move_count(self) -> int:
        lim, exact = self.lim, self.exact
        nd = max(0, len(self.C) - 1)
        if "RC" in lim:
            return sum(math.comb(nd, r) * math.comb(len(self.D), r) for r in _sizes(lim["RC"], exact))
        total = 1
        if "DC" in lim:
            total *= sum(math.comb(nd, r) for r in _sizes(lim["DC"], exact))
        if "DCG" in lim:
            total *= 2 ** len(set(self.inst.groups[c] for c in self.C))
        if "AC" in lim:
            total *= sum(math.comb(len(self.D), r) for r in _sizes(lim["AC"], exact))
        if "ACG" in lim:
            total *= 2 ** len(set(self.inst.groups[c] for c in self.D))
        return total

    # ballot side
    def ballot_moves(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Yield (deleted count vector over V, added count vector over U)."""
        lim, exact = self.lim, self.exact
        vc = [k for _, k in self.V]
        uc = [k for _, k in self.U]
        if "RV" in lim:
            for r in _sizes(lim["RV"], exact):
                for dv in count_vectors(vc, r):
                    for av in count_vectors(uc, r):
                        yield dv, av
            return
        dsizes = _sizes(lim["DV"], exact) if "DV" in lim else range(1)
        asizes = _sizes(lim["AV"], exact) if "AV" in lim else range(1)
        for r in dsizes:
            for dv in count_vectors(vc, r):
                for s in asizes:
                    for av in count_vectors(uc, s):
                        yield dv, av

    def ballot_move_count(self) -> int:
        lim, exact = self.lim, self.exact
        vc = [k for _, k in self.V]
        uc = [k for _, k in self.U]
        if "RV" in lim:
            return sum(_count_vector_total(vc, r) * _count_vector_total(uc, r)
                       for r in _sizes(lim["RV"], exact))
        total = 1
        if "DV" in lim:
            total *= sum(_count_vector_total(vc, r) for r in _sizes(lim["DV"], exact))
        if "AV" in lim:
            total *= sum(_count_vector_total(uc, r) for r in _sizes(lim["AV"], exact))
        return total

    def bribe_count(self) -> int:
        if "B" not in self.lim:
            return 1
        m = len(self.C) + (self.lim.get("AC", 0) if "AC" in self.lim else len(self.D))
        m = min(m, len(self.all))
        perms = math.factorial(m)
        pool = sum(k for _, k in self.V) + sum(k for _, k in self.U)
        return sum(math.comb(pool + b - 1, b) * math.comb(perms + b - 1, b)
                   for b in _sizes(self.lim["B"], self.exact))

    def estimate(self) -> int:
        return self.candidate_move_count() * self.ballot_move_count() * self.bribe_count()


def search_guard() -> int:
    raw = os.environ.get("VOTECUT_GUARD")
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            raise ControlError(f"VOTECUT_GUARD must be a number, got {raw!r}") from None
    return DEFAULT_GUARD


def estimate_search(inst: ControlInstance) -> int:
    return _Plan(inst).estimate()


def solve_control(inst: ControlInstance, force: bool = False, guard: int | None = None) -> ControlResult:
    """Exact decision by exhaustive search; the witness is the first success found."""
    plan = _Plan(inst)
    limit = search_guard() if guard is None else guard
    est = plan.estimate()
    if est > limit and not force:
        raise SearchSpaceExceeded(est, limit)
    rule, mode, model = inst.rule, inst.mode, inst.model
    index = plan.index
    vcounts = [k for _, k in plan.V]
    ucounts = [k for _, k in plan.U]
    ballot_moves = list(plan.ballot_moves())
    deltas = []
    for dv, av in ballot_moves:
        mat = plan.base.copy()
        for i, v in enumerate(dv):
            if v:
                mat -= v * plan.V_contrib[i]
        for i, v in enumerate(av):
            if v:
                mat += v * plan.U_contrib[i]
        deltas.append(mat)
    bribing = "B" in plan.lim
    for dl, ad in plan.candidate_moves():
        drop = set(dl)
        active = tuple(c for c in plan.all if (c not in drop and c not in plan.D) or c in ad)
        idx = np.array([index[c] for c in active])
        p_idx = active.index(plan.p) if plan.p in active else None
        sel = np.ix_(idx, idx)
        for (dv, av), full in zip(ballot_moves, deltas):
            mat = full[sel]
            if not bribing:
                if _goal(mode, model, p_idx, rule.winner_mask(active, mat)):
                    return ControlResult(True, ControlWitness(
                        deleted_candidates=tuple(dl), added_candidates=tuple(ad),
                        deleted_ballots=_expand_indices(vcounts, dv),
                        added_ballots=_expand_indices(ucounts, av)))
                continue
            found = _search_bribes(plan, active, idx, mat, dv, av, p_idx)
            if found is not None:
                return ControlResult(True, ControlWitness(
                    deleted_candidates=tuple(dl), added_candidates=tuple(ad),
                    deleted_ballots=_expand_indices(vcounts, dv),
                    added_ballots=_expand_indices(ucounts, av), bribes=found))
    return ControlResult(False, None)


def _search_bribes(plan: _Plan, active, idx, mat, dv, av, p_idx):
    inst = plan.inst
    # pools: remaining V entries, then added U entries
    pools = []
    for i, (r, k) in enumerate(plan.V):
        pools.append(("V", i, k - dv[i], plan.V_contrib[i]))
    for i, (r, k) in enumerate(plan.U):
        pools.append(("U", i, av[i], plan.U_contrib[i]))
    caps = [c for _, _, c, _ in pools]
    sel = np.ix_(idx, idx)
    rankings = list(permutations(active))
    new_contrib = [ballot_contribution(r, active) for r in rankings]
    vcounts = [k for _, k in plan.V]
    ucounts = [k for _, k in plan.U]
    for b in _sizes(plan.lim["B"], plan.exact):
        for vec in count_vectors(caps, b):
            removed = mat.copy()
            for (pool, i, _, contrib), v in zip(pools, vec):
                if v:
                    removed -= v * contrib[sel]
            for combo in combinations_with_replacement(range(len(rankings)), b):
                cur = removed.copy()
                for j in combo:
                    cur += new_contrib[j]
                if _goal(inst.mode, inst.model, p_idx, inst.rule.winner_mask(active, cur)):
                    return _bribe_witness(pools, vec, combo, rankings, vcounts, ucounts, dv)
    return None


def _bribe_witness(pools, vec, combo, rankings, vcounts, ucounts, dv):
    slots = []
    for (pool, i, _, _), v in zip(pools, vec):
        if not v:
            continue
        if pool == "V":
            start = sum(vcounts[:i]) + dv[i]   # skip the deleted copies
        else:
            start = sum(ucounts[:i])
        slots.extend((pool, start + j) for j in range(v))
    return tuple((pool, i, rankings[j]) for (pool, i), j in zip(slots, combo))


# -- replay -----------------------------------------------------------------

def apply_witness(inst: ControlInstance, w: ControlWitness) -> Election:
    """The election produced by ``w``, projected onto the active candidates."""
    deleted = set(w.deleted_candidates)
    added = set(w.added_candidates)
    if inst.distinguished in deleted:
        raise ControlError("the distinguished candidate may not be deleted")
    if not deleted <= set(inst.base_candidates) or not added <= inst.spare_candidates:
        raise ControlError("witness moves candidates outside their pools")
    active = [c for c in inst.election.candidates
              if (c in inst.base_candidates and c not in deleted) or c in added]
    v_list = list(inst.election.expanded())
    u_list = [r for r, k in inst.spare_ballots for _ in range(k)]
    gone = set(w.deleted_ballots)
    if any(i >= len(v_list) for i in gone) or any(i >= len(u_list) for i in w.added_ballots):
        raise ControlError("witness ballot index out of range")
    kept = {("V", i): r for i, r in enumerate(v_list) if i not in gone}
    kept.update({("U", i): u_list[i] for i in w.added_ballots})
    for pool, i, ranking in w.bribes:
        if (pool, i) not in kept:
            raise ControlError("bribed ballot is not part of the controlled election")
        if sorted(ranking) != sorted(active):
            raise ControlError("a bribed ballot must rank exactly the active candidates")
        kept[(pool, i)] = tuple(ranking)
    keep = set(active)
    ballots = [(tuple(c for c in r if c in keep), 1) for _, r in sorted(kept.items())]
    return Election(tuple(active), tuple(ballots))


def witness_within_limits(inst: ControlInstance, w: ControlWitness) -> bool:
    lim, exact = inst.limits, inst.exact

    def ok(n, key):
        return n == lim[key] if exact else n <= lim[key]

    nd, na = len(w.deleted_candidates), len(w.added_candidates)
    nvd, nva = len(w.deleted_ballots), len(w.added_ballots)
    checks = []
    if "RC" in lim:
        checks += [nd == na, ok(nd, "RC")]
    else:
        checks.append(ok(nd, "DC") if "DC" in lim else ok(nd, "DCG") if "DCG" in lim else nd == 0)
        checks.append(ok(na, "AC") if "AC" in lim else ok(na, "ACG") if "ACG" in lim else na == 0)
    if "RV" in lim:
        checks += [nvd == nva, ok(nvd, "RV")]
    else:
        checks.append(ok(nvd, "DV") if "DV" in lim else nvd == 0)
        checks.append(ok(nva, "AV") if "AV" in lim else nva == 0)
    checks.append(ok(len(w.bribes), "B") if "B" in lim else not w.bribes)
    if inst.groups is not None:
        for moved, pool in ((w.deleted_candidates, inst.base_candidates),
                            (w.added_candidates, inst.spare_candidates)):
            labels = {inst.groups[c] for c in moved}
            whole = {c for c in pool if inst.groups[c] in labels}
            if any(t.endswith("G") for t in inst.prongs) and whole != set(moved):
                checks.append(False)
    return all(checks)


def replay_witness(inst: ControlInstance, w: ControlWitness) -> bool:
    if not witness_within_limits(inst, w):
        return False
    e = apply_witness(inst, w)
    return goal_met(inst.rule, inst.mode, inst.model, inst.distinguished, e)


# -- lifting through bottom padding ------------------------------------------

def _fresh_names(prefix: str, count: int, taken: set[str]) -> list[str]:
    stem = prefix
    while any(t.startswith(stem) for t in taken):
        stem = "z" + stem
    width = max(2, len(str(count)))
    return [f"{stem}{i:0{width}d}" for i in range(1, count + 1)]


def _lift(src: ControlInstance, l_ac: int, mode: str) -> tuple[ControlInstance, ControlInstance]:
    if src.prongs != ("DC",) or src.exact or src.spare_candidates or src.spare_ballots:
        raise ControlError("lifting expects a plain deleting-candidates instance")
    if src.mode != mode:
        raise ControlError(f"lifting expects a {mode} instance")
    if l_ac < 0:
        raise ControlError("the adding limit must be nonnegative")
    k = src.limits["DC"]
    taken = set(src.election.candidates)
    xs = _fresh_names("pad_x", k, taken)
    ds_acdc = _fresh_names("pad_d", l_ac, taken | set(xs))
    ds_rc = _fresh_names("pad_d", max(l_ac, k), taken | set(xs))
    common = dict(distinguished=src.distinguished, mode=mode, model=src.model,
                  rule=src.rule, exact=True)
    e_acdc = ControlInstance(
        pad_bottom(src.election, xs + ds_acdc), prongs=("AC", "DC"),
        limits={"AC": l_ac, "DC": k}, spare_candidates=frozenset(ds_acdc), **common)
    e_rc = ControlInstance(
        pad_bottom(src.election, xs + ds_rc), prongs=("RC",),
        limits={"RC": k}, spare_candidates=frozenset(ds_rc), **common)
    return e_acdc, e_rc


def lift_ccdc_to_exact(ccdc: ControlInstance, l_ac: int) -> tuple[ControlInstance, ControlInstance]:
    """Exact AC+DC and exact RC instances equivalent to a CCDC instance.

    ``k`` padding candidates go to the bottom of every ballot, then the spare
    candidates below them; the deletion and replacement budgets become ``k``.
    """
    return _lift(ccdc, l_ac, "constructive")


def lift_dcdc_to_exact(dcdc: ControlInstance, l_ac: int) -> tuple[ControlInstance, ControlInstance]:
    return _lift(dcdc, l_ac, "destructive")


# -- file format ------------------------------------------------------------

_SECTIONS = ("[control]", "[spare-candidates]", "[spare-ballots]", "[groups]")


def parse_control(text: str) -> ControlInstance:
    sections: dict[str, list[tuple[int, str]]] = {"": []}
    current = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line not in _SECTIONS:
                raise ControlError(f"line {lineno}: unknown section {line}")
            if line in sections:
                raise ControlError(f"line {lineno}: section {line} repeated")
            current = line
            sections[current] = []
            continue
        sections[current].append((lineno, line))
    if "[control]" not in sections:
        raise ControlError("missing [control] section")
    election = parse_election_lines(sections[""])
    fields = {}
    for lineno, line in sections["[control]"]:
        key, sep, val = line.partition("=")
        if not sep:
            raise ControlError(f"line {lineno}: expected key=value")
        fields[key.strip()] = val.strip()
    required = ("type", "mode", "model", "rule", "distinguished", "limits")
    for key in required:
        if key not in fields:
            raise ControlError(f"[control] is missing {key}=")
    unknown = set(fields) - set(required)
    if unknown:
        raise ControlError(f"[control] has unknown key {sorted(unknown)[0]!r}")
    prongs, exact = parse_type(fields["type"])
    limits = {}
    for item in filter(None, (t.strip() for t in fields["limits"].split(","))):
        key, sep, val = item.partition(":")
        if not sep or not val.strip().isdigit():
            raise ControlError(f"malformed limit {item!r}")
        limits[key.strip()] = int(val)
    spare: list[str] = []
    for lineno, line in sections.get("[spare-candidates]", []):
        spare.extend(check_name(t.strip()) for t in line.split(",") if t.strip())
    spare_ballots = [parse_ballot_line(line, no, election.candidates)
                     for no, line in sections.get("[spare-ballots]", [])]
    groups = None
    if "[groups]" in sections:
        groups = {}
        for lineno, line in sections["[groups]"]:
            c, sep, g = line.partition(":")
            if not sep:
                raise ControlError(f"line {lineno}: expected 'candidate: group'")
            groups[c.strip()] = g.strip()
    try:
        return ControlInstance(
            election, distinguished=fields["distinguished"], prongs=prongs, limits=limits,
            mode=fields["mode"], model=fields["model"], rule=Rule.parse(fields["rule"]),
            exact=exact, spare_candidates=frozenset(spare), spare_ballots=tuple(spare_ballots),
            groups=groups)
    except ProfileError as exc:
        raise ControlError(str(exc)) from None


def serialize_control(inst: ControlInstance) -> str:
    out = [serialize_election(inst.election).rstrip("\n"), "[control]",
           f"type={inst.type_token}", f"mode={inst.mode}", f"model={inst.model}",
           f"rule={inst.rule}", f"distinguished={inst.distinguished}",
           "limits=" + ",".join(f"{k}:{v}" for k, v in inst.limits.items())]
    if inst.spare_candidates:
        out += ["[spare-candidates]", ", ".join(sorted(inst.spare_candidates))]
    if inst.spare_ballots:
        out += ["[spare-ballots]"] + [format_ballot(r, k) for r, k in inst.spare_ballots]
    if inst.groups is not None:
        out += ["[groups]"] + [f"{c}: {inst.groups[c]}" for c in inst.election.candidates]
    return "\n".join(out) + "\n"
