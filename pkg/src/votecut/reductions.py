"""Instance generators for the hardness constructions.

Every generator returns a :class:`ReductionArtifact`: the control instances,
the target margins they realize, a role for each candidate and the constants
used. Ballots are built from W-pairs (``w_pair``) plus, for the voter-control
constructions, a block of fixed ``w B p`` ballots.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .control import ControlInstance, Rule, SCHULZE
from .profile import (Election, WeightedMajorityGraph, ballot_contribution, build_wmg,
                      mcgarvey_realize, w_pair)
from .rankedpairs import TieBreakPolicy


class ReductionError(ValueError):
    pass


# -- source instances -------------------------------------------------------

@dataclass(frozen=True)
class ThreeSatInstance:
    """Clauses of exactly three nonzero DIMACS literals over variables 1..num_vars."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(x) for x in cl) for cl in self.clauses)
        if not clauses:
            raise ReductionError("a formula needs at least one clause")
        for i, cl in enumerate(clauses, 1):
            if len(cl) != 3:
                raise ReductionError(f"clause {i} has {len(cl)} literals; exactly 3 are required")
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ReductionError(f"clause {i}: literal {lit} is out of range")
        object.__setattr__(self, "clauses", clauses)

    @property
    def k(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in cl) for cl in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {self.k}"]
        lines += [" ".join(str(l) for l in cl) + " 0" for cl in self.clauses]
        return "\n".join(lines) + "\n"


def parse_cnf(text: str) -> ThreeSatInstance:
    header = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ReductionError(f"line {lineno}: malformed problem line")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ReductionError(f"line {lineno}: malformed problem line") from None
            continue
        if header is None:
            raise ReductionError(f"line {lineno}: clause before 'p cnf' line")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise ReductionError(f"line {lineno}: non-integer literal") from None
    if header is None:
        raise ReductionError("missing 'p cnf' line")
    clauses, cur = [], []
    for t in tokens:
        if t == 0:
            if len(cur) != 3:
                raise ReductionError(f"clause {len(clauses) + 1} has {len(cur)} literals; exactly 3 are required")
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(t)
    if cur:
        raise ReductionError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise ReductionError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return ThreeSatInstance(header[0], tuple(clauses))


@dataclass(frozen=True)
class Rx3cInstance:
    """Base set and list of 3-subsets (kept as sorted tuples)."""

    base: tuple[str, ...]
    triples: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        order = {x: i for i, x in enumerate(self.base)}
        key = lambda x: (order.get(x, len(order)), x)
        object.__setattr__(self, "triples", tuple(tuple(sorted(set(t), key=key))
                                                  for t in self.triples))

    @property
    def s(self) -> int:
        return len(self.base) // 3

    def exact_cover(self) -> tuple[int, ...] | None:
        target = set(self.base)
        for combo in combinations(range(len(self.triples)), self.s):
            chosen = [x for i in combo for x in self.triples[i]]
            if len(chosen) == len(target) and set(chosen) == target:
                return combo
        return None


def check_rx3c(inst: Rx3cInstance) -> list[str]:
    problems = []
    n = len(inst.base)
    if n == 0 or n % 3:
        problems.append(f"base set has {n} elements; a positive multiple of 3 is required")
    if len(set(inst.base)) != n:
        problems.append("base set lists an element twice")
    if len(inst.triples) != n:
        problems.append(f"{len(inst.triples)} sets given; exactly {n} are required")
    known = set(inst.base)
    for i, t in enumerate(inst.triples, 1):
        if len(t) != 3:
            problems.append(f"set {i} has {len(t)} distinct elements; exactly 3 are required")
        for x in t:
            if x not in known:
                problems.append(f"set {i} uses unknown element {x}")
    for x in inst.base:
        occ = sum(x in t for t in inst.triples)
        if occ != 3:
            problems.append(f"element {x} occurs in {occ} sets; exactly 3 are required")
    return problems


def validate_rx3c(inst: Rx3cInstance) -> bool:
    return not check_rx3c(inst)


def parse_rx3c(text: str) -> Rx3cInstance:
    base = None
    triples = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        items = [t for t in re.split(r"[,\s]+", rest) if t]
        if not sep or key.strip() not in ("base", "triple"):
            raise ReductionError(f"line {lineno}: expected 'base:' or 'triple:'")
        if key.strip() == "base":
            if base is not None:
                raise ReductionError(f"line {lineno}: second base line")
            base = items
        else:
            if base is None:
                raise ReductionError(f"line {lineno}: triple before base line")
            if len(items) != 3:
                raise ReductionError(f"line {lineno}: a triple lists exactly 3 elements")
            triples.append(items)
    if base is None:
        raise ReductionError("missing base line")
    inst = Rx3cInstance(tuple(base), tuple(tuple(t) for t in triples))
    problems = check_rx3c(inst)
    if problems:
        raise ReductionError("; ".join(problems))
    return inst


def serialize_rx3c(inst: Rx3cInstance) -> str:
    lines = ["base: " + ", ".join(inst.base)]
    lines += ["triple: " + " ".join(t) for t in inst.triples]
    return "\n".join(lines) + "\n"


# -- artifacts --------------------------------------------------------------

@dataclass(frozen=True)
class ReductionArtifact:
    instances: dict[str, ControlInstance]
    target: WeightedMajorityGraph
    roles: dict[str, str]
    constants: dict[str, int]
    variant: str
    source_kind: str
    source_text: str
    extra: dict[str, str] = field(default_factory=dict)

    @property
    def instance(self) -> ControlInstance:
        """The first (for 3SAT, the only) instance."""
        return next(iter(self.instances.values()))

    def provenance(self) -> str:
        rows = [("source", self.source_kind), ("variant", self.variant),
                ("candidates", str(self.target.m)),
                ("instances", ",".join(self.instances))]
        rows += [(f"constant.{k}", str(v)) for k, v in self.constants.items()]
        counts: dict[str, int] = {}
        for role in self.roles.values():
            counts[role.split(":")[0]] = counts.get(role.split(":")[0], 0) + 1
        rows += [(f"roles.{k}", str(v)) for k, v in sorted(counts.items())]
        rows += list(self.extra.items())
        rows.append(("source_text", self.source_text.strip().replace("\n", " | ")))
        return "\n".join(f"{k}={v}" for k, v in rows) + "\n"


def parse_provenance(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            k, _, v = line.partition("=")
            out[k] = v
    return out


# -- 3SAT -> CCDC ------------------------------------------------------------

SAT_VARIANTS = ("flawed_original", "fixed_nonunique", "fixed_unique")

# W-pair multiplicities per vote row; each W-pair adds 2 to its margin.
_ROW_COUNTS = {
    "flawed_original": dict(clause=1, chain=1, to_p=1, a_lit=1, p_a=1, lit_neg=1, neg_p=1, a_clause=0),
    "fixed_nonunique": dict(clause=2, chain=2, to_p=2, a_lit=2, p_a=2, lit_neg=1, neg_p=1, a_clause=1),
    "fixed_unique": dict(clause=3, chain=3, to_p=3, a_lit=4, p_a=4, lit_neg=2, neg_p=1, a_clause=2),
}


def _normalize_variant(v: str) -> str:
    v = v.replace("-", "_")
    if v not in SAT_VARIANTS:
        raise ReductionError(f"unknown variant {v!r}; choose from {', '.join(SAT_VARIANTS)}")
    return v


def sat_candidate_names(f: ThreeSatInstance) -> dict[str, list]:
    """Candidate names grouped by role, in construction order."""
    k = f.k
    w = max(2, len(str(k)))
    cw = len(str(k + 1))

    def lit(i, j):
        return f"x{i:0{w}d}_{j}"

    clause = {i: [f"c{i:0{w}d}_{j:0{cw}d}" for j in range(1, k + 2)] for i in range(1, k + 1)}
    literal = {i: [lit(i, j) for j in (1, 2, 3)] for i in range(1, k + 1)}
    pairs = []
    positions = [(i, j) for i in range(1, k + 1) for j in (1, 2, 3)]
    for a_pos, b_pos in combinations(positions, 2):
        la = f.clauses[a_pos[0] - 1][a_pos[1] - 1]
        lb = f.clauses[b_pos[0] - 1][b_pos[1] - 1]
        if la == -lb:
            (i, j), (m, n) = a_pos, b_pos
            names = [f"n{i:0{w}d}_{j}_{m:0{w}d}_{n}__{l:0{cw}d}" for l in range(1, k + 2)]
            pairs.append(((lit(i, j), lit(m, n)), names))
    return dict(clause=clause, literal=literal, negation=pairs)


def threesat_to_ccdc(f: ThreeSatInstance, variant: str = "fixed_nonunique") -> ReductionArtifact:
    """Deleting-candidates instance that is a yes-instance iff ``f`` is satisfiable
    (for the two fixed variants); ``flawed_original`` reproduces the broken table."""
    variant = _normalize_variant(variant)
    cnt = _ROW_COUNTS[variant]
    names = sat_candidate_names(f)
    roles: dict[str, str] = {"p": "distinguished", "a": "special:a"}
    for i, cs in names["clause"].items():
        roles.update({c: f"clause:{i}" for c in cs})
    for i, xs in names["literal"].items():
        roles.update({x: f"literal:{i}" for x in xs})
    for (x, y), ns in names["negation"]:
        roles.update({n: f"negation:{x}/{y}" for n in ns})
    cands = sorted(roles)
    edges: dict[tuple[str, str], int] = {}

    def add(c, d, count):
        if count:
            edges[(c, d)] = edges.get((c, d), 0) + 2 * count

    for i in names["clause"]:
        x1, x2, x3 = names["literal"][i]
        for c in names["clause"][i]:
            add(c, x1, cnt["clause"])
            add("a", c, cnt["a_clause"])
        add(x1, x2, cnt["chain"])
        add(x2, x3, cnt["chain"])
        add(x3, "p", cnt["to_p"])
        for x in (x1, x2, x3):
            add("a", x, cnt["a_lit"])
    add("p", "a", cnt["p_a"])
    for (x, y), ns in names["negation"]:
        for n in ns:
            add(x, n, cnt["lit_neg"])
            add(y, n, cnt["lit_neg"])
            add(n, "p", cnt["neg_p"])
    target = WeightedMajorityGraph.from_edges(cands, edges)
    ballots = []
    for (c, d), weight in sorted(edges.items()):
        fwd, rev = w_pair(cands, c, d)
        ballots += [(fwd, weight // 2), (rev, weight // 2)]
    election = Election(tuple(cands), tuple(ballots))
    model = "unique" if variant == "fixed_unique" else "nonunique"
    inst = ControlInstance(election, distinguished="p", prongs=("DC",), limits={"DC": f.k},
                           mode="constructive", model=model, rule=SCHULZE)
    constants = {"k": f.k, "copies": f.k + 1, **{f"count.{r}": v for r, v in cnt.items()}}
    return ReductionArtifact({"CCDC": inst}, target, roles, constants, variant, "3sat", f.to_dimacs())


def assignment_deletions(f: ThreeSatInstance, assignment: Mapping[int, bool]) -> tuple[str, ...]:
    """One true literal candidate per clause (the forward witness)."""
    names = sat_candidate_names(f)
    out = []
    for i, cl in enumerate(f.clauses, 1):
        for j, l in enumerate(cl):
            if assignment[abs(l)] == (l > 0):
                out.append(names["literal"][i][j])
                break
        else:
            raise ReductionError(f"assignment does not satisfy clause {i}")
    return tuple(out)


# -- RX3C -> voter control ---------------------------------------------------

def _rx3c_constants(s: int, model: str, chain: bool) -> dict[str, int]:
    big_l = 4 * s + 4
    if model == "nonunique":
        c = dict(L=big_l, pw=2 * big_l, bp=2 * big_l + 4 * s - 2, much=4 * big_l, bb=0)
    elif model == "unique":
        # all margins odd: p->w and the dominant edges move up by one
        c = dict(L=big_l, pw=2 * big_l + 1, bp=2 * big_l + 4 * s - 3, much=4 * big_l + 1, bb=1)
    else:
        raise ReductionError(f"model must be unique or nonunique, not {model!r}")
    if chain:
        c["bb"] = c["much"]
        if model == "unique":
            # ties between p->w and b->p already go to p, so keep the nonunique gap
            c["bp"] = 2 * big_l + 4 * s - 1
    return c


def _rx3c_build(inst: Rx3cInstance, model: str, rule: Rule, chain: bool, strict: bool
                ) -> ReductionArtifact:
    if strict:
        problems = check_rx3c(inst)
        if problems:
            raise ReductionError("; ".join(problems))
    s = len(inst.base) // 3
    if s < 1:
        raise ReductionError("base set too small")
    width = max(2, len(str(len(inst.base))))
    bnames = [f"b{i:0{width}d}" for i in range(1, len(inst.base) + 1)]
    rename = dict(zip(inst.base, bnames))
    cands = sorted(bnames + ["p", "w"])
    const = _rx3c_constants(s, model, chain)
    edges = {("p", "w"): const["pw"]}
    for b in bnames:
        edges[("w", b)] = const["much"]
        edges[(b, "p")] = const["bp"]
    for i, j in combinations(range(len(bnames)), 2):
        if const["bb"]:
            edges[(bnames[i], bnames[j])] = const["bb"]
    target = WeightedMajorityGraph.from_edges(cands, edges)
    fixed = ("w", *bnames, "p")
    want_parity = 0 if model == "nonunique" else 1
    n_fixed = s + ((s % 2) != want_parity)
    base = Election(tuple(cands), ((fixed, n_fixed),))
    election = mcgarvey_realize(target, base)
    spare = []
    for t in inst.triples:
        inside = [rename[x] for x in t]
        rest = [b for b in bnames if b not in inside]
        spare.append(((*inside, "p", *rest, "w"), 1))
    spare = tuple(spare)
    instances = {}
    for mode, who in (("constructive", "p"), ("destructive", "w")):
        # the emitted model follows the variant's claim: a nonunique variant
        # makes p a co-winner, i.e. w stops being the unique winner
        if model == "nonunique":
            m = "nonunique" if mode == "constructive" else "unique"
        else:
            m = "unique" if mode == "constructive" else "nonunique"
        tag = "CC" if mode == "constructive" else "DC"
        instances[f"E{tag}AV+DV"] = ControlInstance(
            election, distinguished=who, prongs=("AV", "DV"), limits={"AV": s, "DV": s},
            mode=mode, model=m, rule=rule, exact=True, spare_ballots=spare)
        instances[f"{tag}RV"] = ControlInstance(
            election, distinguished=who, prongs=("RV",), limits={"RV": s},
            mode=mode, model=m, rule=rule, spare_ballots=spare)
    roles = {"p": "special:p", "w": "special:w"}
    roles.update({rename[x]: f"element:{x}" for x in inst.base})
    constants = {**const, "s": s, "fixed_ballots": n_fixed}
    return ReductionArtifact(instances, target, roles, constants, model, "rx3c",
                             serialize_rx3c(inst), extra={"rule": str(rule)})


def rx3c_to_schulze_voter(inst: Rx3cInstance, model: str = "nonunique", strict: bool = True
                          ) -> ReductionArtifact:
    return _rx3c_build(inst, model, SCHULZE, chain=False, strict=strict)


def rx3c_to_rankedpairs_voter(inst: Rx3cInstance, model: str = "nonunique", strict: bool = True
                              ) -> ReductionArtifact:
    """As the Schulze construction, with ``b_i`` beating ``b_j`` (i < j) by the
    dominant margin so locked B-edges never form a cycle; ties favor ``p``."""
    rule = Rule.ranked_pairs(TieBreakPolicy.favor("p"))
    return _rx3c_build(inst, model, rule, chain=True, strict=strict)


def cover_witness_margins(art: ReductionArtifact, cover: Sequence[int]) -> WeightedMajorityGraph:
    """Margins after deleting ``s`` fixed ballots and adding the cover's spare ballots."""
    inst = art.instances[next(k for k in art.instances if k.endswith("AV+DV"))]
    s = art.constants["s"]
    e = inst.election
    fixed = next(r for r, _ in e.ballots if r[0] == "w" and r[-1] == "p")
    mat = build_wmg(e).margins.copy()
    mat -= s * ballot_contribution(fixed, e.candidates)
    for i in cover:
        mat += ballot_contribution(inst.spare_ballots[i][0], e.candidates)
    return WeightedMajorityGraph(e.candidates, mat)
