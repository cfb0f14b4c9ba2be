"""Verification sweeps: each pairs a solver or generator with an independent oracle
over an enumerated or seeded-random family of small instances.

Every sweep returns a :class:`SweepReport`; a sweep passes when it recorded no
failures. The CLI ``verify`` command and the acceptance tests call these.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .control import ControlInstance, Rule, SCHULZE, solve_control
from .cuts import (DiGraph, cppvc_decide, min_st_vertex_cut, mippvc_decide, ppvc_decide)
from .dcdc import dcac_dc_via_cut, group_control_via_cut, in_neighbor_witness, solve_dcdc_nonunique
from .profile import Election, WeightedMajorityGraph, build_wmg, pad_bottom
from .rankedpairs import TieBreakPolicy, ranked_pairs_winner
from .reductions import (Rx3cInstance, ThreeSatInstance, rx3c_to_rankedpairs_voter,
                         rx3c_to_schulze_voter, threesat_to_ccdc)
from .schulze import schulze_winners
from .control import lift_ccdc_to_exact, lift_dcdc_to_exact

DEFAULT_SEED = 20240601


@dataclass
class SweepReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0

    def fail(self, detail) -> None:
        if len(self.failures) < 20:
            self.failures.append(detail)
        else:
            self.stats["extra_failures"] = self.stats.get("extra_failures", 0) + 1

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f", {k}={v}" for k, v in self.stats.items())
        nfail = len(self.failures) + self.stats.get("extra_failures", 0)
        return f"{status} {self.name}: {self.checked} checked, {nfail} failures{extra}"


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.elapsed = time.perf_counter() - start
        return report
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- random generators -------------------------------------------------------

def random_wmg(rng: random.Random, m: int, low: int = -10, high: int = 10, step: int = 2
               ) -> WeightedMajorityGraph:
    names = [f"c{i}" for i in range(m)]
    M = np.zeros((m, m), dtype=np.int64)
    values = list(range(low, high + 1, step))
    for i in range(m):
        for j in range(i + 1, m):
            w = rng.choice(values)
            M[i, j], M[j, i] = w, -w
    return WeightedMajorityGraph(names, M)


def random_election(rng: random.Random, m: int, n: int, prefix: str = "c") -> Election:
    names = [f"{prefix}{i}" for i in range(m)]
    ballots = []
    for _ in range(n):
        r = names[:]
        rng.shuffle(r)
        ballots.append((tuple(r), 1))
    return Election(tuple(names), tuple(ballots))


def random_digraph(rng: random.Random, n: int, density: float) -> DiGraph:
    names = [f"v{i}" for i in range(n)]
    edges = [(u, v) for u in names for v in names if u != v and rng.random() < density]
    return DiGraph(names, edges)


# -- independent oracles -----------------------------------------------------

def brute_dcdc(g: WeightedMajorityGraph, d: str, ell: int, model: str = "nonunique") -> bool:
    """Try every deletion set of size <= ell that spares d."""
    others = [c for c in g.candidates if c != d]
    for r in range(ell + 1):
        for combo in combinations(others, r):
            sub = g.without(combo)
            w = schulze_winners(sub)
            if (d not in w) if model == "nonunique" else (w != {d}):
                return True
    return False


def _reach(succ: dict, s: str, t: str, removed: set) -> bool:
    if s in removed:
        return False
    seen, stack = {s}, [s]
    while stack:
        u = stack.pop()
        if u == t:
            return True
        for v in succ[u]:
            if v not in seen and v not in removed:
                seen.add(v)
                stack.append(v)
    return False


def _succ(g: DiGraph) -> dict:
    out = {v: [] for v in g.vertices}
    for u, v in g.edges:
        out[u].append(v)
    return out


def oracle_min_cut(g: DiGraph, s: str, t: str) -> int:
    succ = _succ(g)
    pool = [v for v in g.vertices if v not in (s, t)]
    for r in range(len(pool) + 1):
        for combo in combinations(pool, r):
            if not _reach(succ, s, t, set(combo)):
                return r
    raise AssertionError("unreachable: removing every internal vertex separates s from t")


def oracle_menger(g: DiGraph, s: str, t: str) -> int:
    """Maximum number of internally vertex-disjoint s->t paths by exhaustive packing."""
    succ = _succ(g)
    interiors = set()

    def dfs(u, path):
        if u == t:
            interiors.add(frozenset(path[1:-1]))
            return
        for v in succ[u]:
            if v not in path:
                dfs(v, path + [v])

    dfs(s, [s])
    paths = sorted(interiors, key=len)
    best = {}

    def pack(i, used):
        key = (i, used)
        if key in best:
            return best[key]
        if i == len(paths):
            return 0
        val = pack(i + 1, used)
        if not (paths[i] & used):
            val = max(val, 1 + pack(i + 1, used | paths[i]))
        best[key] = val
        return val

    return pack(0, frozenset())


def _oracle_ppvc_sets(g: DiGraph, s: str, t: str) -> Iterator[frozenset]:
    succ = _succ(g)
    pool = [v for v in g.vertices if v not in (s, t)]
    for r in range(len(pool) + 1):
        for combo in combinations(pool, r):
            cut = set(combo)
            if not _reach(succ, s, t, cut) and _reach(succ, t, s, cut):
                yield frozenset(cut)


def oracle_ppvc(g, s, t, k) -> bool:
    return any(len(c) <= k for c in _oracle_ppvc_sets(g, s, t))


def oracle_mippvc(g, s, t, labeled, x, y) -> bool:
    return any(len(c - labeled) <= x and len(c & labeled) >= y for c in _oracle_ppvc_sets(g, s, t))


def oracle_cppvc(g, s, t, col, k) -> bool:
    banned = {col[s], col[t]}
    for c in _oracle_ppvc_sets(g, s, t):
        if len(c) > k:
            continue
        colors = {col[v] for v in c}
        if colors & banned:
            continue
        if all(v in c for v in g.vertices if col[v] in colors):
            return True
    return False


def truth_table_sat(f: ThreeSatInstance) -> bool:
    for bits in product((False, True), repeat=f.num_vars):
        if f.satisfied_by(dict(enumerate(bits, 1))):
            return True
    return False


# -- enumerations ------------------------------------------------------------

def enumerate_3cnf(max_vars: int = 3, max_clauses: int = 2) -> list[ThreeSatInstance]:
    """Every 3-CNF over at most ``max_vars`` variables with 1..``max_clauses`` clauses,
    one representative per class under variable renaming, polarity flips, clause
    order and literal order. Literals may repeat inside a clause."""
    lits = [v * sgn for v in range(1, max_vars + 1) for sgn in (1, -1)]
    clauses = list(combinations_with_replacement(sorted(lits), 3))
    symmetries = [(perm, flips) for perm in permutations(range(1, max_vars + 1))
                  for flips in product((1, -1), repeat=max_vars)]

    def canon(formula):
        best = None
        for perm, flips in symmetries:
            mapped = tuple(sorted(tuple(sorted(perm[abs(l) - 1] * flips[abs(l) - 1] * (1 if l > 0 else -1)
                                               for l in cl)) for cl in formula))
            if best is None or mapped < best:
                best = mapped
        return best

    seen, out = set(), []
    for k in range(1, max_clauses + 1):
        for formula in combinations_with_replacement(clauses, k):
            key = canon(formula)
            if key in seen:
                continue
            seen.add(key)
            used = sorted({abs(l) for cl in key for l in cl})
            relabel = {v: i for i, v in enumerate(used, 1)}
            cls = tuple(tuple(relabel[abs(l)] * (1 if l > 0 else -1) for l in cl) for cl in key)
            out.append(ThreeSatInstance(len(used), cls))
    return out


def enumerate_rx3c(s: int) -> tuple[list[Rx3cInstance], int]:
    """Representatives of all valid instances with ``3s`` elements up to relabeling,
    plus the number of labeled instances (sets taken as a multiset)."""
    n = 3 * s
    base = tuple(f"b{i}" for i in range(1, n + 1))
    triples = list(combinations(range(n), 3))
    labeled = []

    def rec(start, chosen, counts):
        if len(chosen) == n:
            if all(c == 3 for c in counts):
                labeled.append(tuple(chosen))
            return
        for i in range(start, len(triples)):
            t = triples[i]
            if all(counts[x] < 3 for x in t):
                for x in t:
                    counts[x] += 1
                chosen.append(t)
                rec(i, chosen, counts)
                chosen.pop()
                for x in t:
                    counts[x] -= 1

    rec(0, [], [0] * n)
    perms = list(permutations(range(n)))
    seen, reps = set(), []
    for inst in labeled:
        key = min(tuple(sorted(tuple(sorted(p[x] for x in t)) for t in inst)) for p in perms)
        if key not in seen:
            seen.add(key)
            reps.append(Rx3cInstance(base, tuple(tuple(base[x] for x in t) for t in key)))
    return reps, len(labeled)


# -- sweeps -------------------------------------------------------------------

@_timed
def sweep_dcdc_equivalence(count: int = 10_000, seed: int = DEFAULT_SEED, max_m: int = 6,
                           max_ell: int = 3, with_in_neighbor: bool = True) -> SweepReport:
    """Polynomial DCDC solver against brute force; optionally the in-neighbor witness
    on every yes-instance."""
    rng = random.Random(seed)
    rep = SweepReport("dcdc-equivalence")
    yes = poly_time = 0.0
    max_ratio = 0.0
    in_fail = 0
    for _ in range(count):
        m = rng.randint(2, max_m)
        g = random_wmg(rng, m)
        d = rng.choice(g.candidates)
        ell = rng.randint(0, max_ell)
        start = time.perf_counter()
        res = solve_dcdc_nonunique(g, d, ell)
        poly_time += time.perf_counter() - start
        max_ratio = max(max_ratio, res.ops / m ** 5)
        truth = brute_dcdc(g, d, ell)
        rep.checked += 1
        if res.decision != truth:
            rep.fail({"wmg": g.positive_edges(), "d": d, "ell": ell, "poly": res.decision, "brute": truth})
        if truth:
            yes += 1
            if with_in_neighbor and in_neighbor_witness(g, d, ell) is None:
                in_fail += 1
                rep.stats.setdefault("in_neighbor_examples", []).append((g.positive_edges(), d, ell))
    rep.stats.update(yes=int(yes), in_neighbor_failures=in_fail,
                     poly_ms_mean=round(1000 * poly_time / max(count, 1), 4),
                     max_ops_over_m5=round(max_ratio, 3))
    if in_fail:
        rep.fail({"in_neighbor_failures": in_fail})
    return rep


@_timed
def sweep_theorem3(count: int = 10_000, seed: int = DEFAULT_SEED) -> SweepReport:
    """In-neighbor witness exists on every brute-force yes-instance."""
    rng = random.Random(seed)
    rep = SweepReport("theorem3")
    for _ in range(count):
        m = rng.randint(2, 6)
        g = random_wmg(rng, m)
        d = rng.choice(g.candidates)
        ell = rng.randint(0, 3)
        if not brute_dcdc(g, d, ell):
            continue
        rep.checked += 1
        if in_neighbor_witness(g, d, ell) is None:
            rep.fail({"wmg": g.positive_edges(), "d": d, "ell": ell})
    return rep


def _lift_rule(rng: random.Random) -> Rule:
    return SCHULZE if rng.random() < 0.5 else Rule.ranked_pairs()


@_timed
def sweep_lemma_lift(count: int = 500, seed: int = DEFAULT_SEED) -> SweepReport:
    """Deleting-candidates decision equals the decisions of both lifted exact instances."""
    rng = random.Random(seed)
    rep = SweepReport("lemma-lift")
    yes = 0
    for _ in range(count):
        m = rng.randint(2, 6)
        n = rng.randint(1, 9)
        e = random_election(rng, m, n)
        k = rng.randint(0, 2)
        l_ac = rng.randint(0, 2)
        mode = rng.choice(("constructive", "destructive"))
        rule = _lift_rule(rng)
        p = rng.choice(e.candidates)
        for model in ("unique", "nonunique"):
            src = ControlInstance(e, p, ("DC",), {"DC": k}, mode=mode, model=model, rule=rule)
            lift = lift_ccdc_to_exact if mode == "constructive" else lift_dcdc_to_exact
            acdc, rc = lift(src, l_ac)
            want = solve_control(src).decision
            got = (solve_control(acdc).decision, solve_control(rc).decision)
            rep.checked += 1
            yes += want
            if got != (want, want):
                rep.fail({"election": e, "p": p, "k": k, "l_ac": l_ac, "mode": mode,
                          "model": model, "rule": str(rule), "source": want, "lifted": got})
    rep.stats["yes"] = yes
    return rep


@_timed
def sweep_ibc(count: int = 1000, seed: int = DEFAULT_SEED) -> SweepReport:
    """Bottom padding keeps the Schulze winner set and the ranked-pairs winner."""
    rng = random.Random(seed)
    rep = SweepReport("ibc")
    for _ in range(count):
        m = rng.randint(1, 5)
        n = rng.randint(1, 9)
        e = random_election(rng, m, n)
        extra = [f"z{i}" for i in range(rng.randint(1, 2))]
        if rng.random() < 0.5:
            extra = [f"a{i}" for i in range(len(extra))]   # names that sort first
        padded = pad_bottom(e, extra)
        g, h = build_wmg(e), build_wmg(padded)
        policy = TieBreakPolicy() if rng.random() < 0.5 else TieBreakPolicy.favor(rng.choice(e.candidates))
        rep.checked += 1
        if schulze_winners(g) != schulze_winners(h) or \
                ranked_pairs_winner(g, policy) != ranked_pairs_winner(h, policy):
            rep.fail({"election": e, "newcomers": extra, "policy": str(policy)})
    return rep


@_timed
def sweep_cuts(count: int = 1000, seed: int = DEFAULT_SEED, driver_count: int = 300) -> SweepReport:
    """Cut solvers against subset oracles and Menger packing; cut drivers against brute force."""
    rng = random.Random(seed)
    rep = SweepReport("cuts")
    menger_checked = 0
    for _ in range(count):
        n = rng.randint(2, 8)
        g = random_digraph(rng, n, rng.choice((0.2, 0.3, 0.45)))
        s, t = rng.sample(g.vertices, 2)
        rep.checked += 1
        # a direct s->t edge is uncuttable, so the min-cut check runs without it
        h = DiGraph(g.vertices, [e for e in g.edges if e != (s, t)])
        size, cut = min_st_vertex_cut(h, s, t)
        want = oracle_min_cut(h, s, t)
        menger = oracle_menger(h, s, t)
        menger_checked += 1
        if size != want or size != menger or len(cut) != size or _reach(_succ(h), s, t, set(cut)):
            rep.fail({"kind": "min", "graph": h, "s": s, "t": t, "got": size, "want": want,
                      "menger": menger})
        k = rng.randint(0, 3)
        if ppvc_decide(g, s, t, k).decision != oracle_ppvc(g, s, t, k):
            rep.fail({"kind": "ppvc", "graph": g, "s": s, "t": t, "k": k})
        inner = [v for v in g.vertices if v not in (s, t)]
        labeled = frozenset(v for v in inner if rng.random() < 0.4)
        x, y = rng.randint(0, 2), rng.randint(0, max(0, len(labeled)))
        if mippvc_decide(g, s, t, labeled, x, y).decision != oracle_mippvc(g, s, t, labeled, x, y):
            rep.fail({"kind": "mippvc", "graph": g, "s": s, "t": t, "labeled": labeled, "x": x, "y": y})
        col = {v: rng.randint(0, 3) for v in g.vertices}
        if cppvc_decide(g, s, t, col, k).decision != oracle_cppvc(g, s, t, col, k):
            rep.fail({"kind": "cppvc", "graph": g, "s": s, "t": t, "col": col, "k": k})
    driver_checked = 0
    for _ in range(driver_count):
        for inst in _random_driver_instances(rng):
            driver_checked += 1
            rep.checked += 1
            if inst.prongs in (("DCG",), ("ACG",)):
                got = group_control_via_cut(inst)
            else:
                got = dcac_dc_via_cut(inst)
            want = solve_control(inst).decision
            if got != want:
                rep.fail({"kind": "driver", "instance": inst.name, "election": inst.election,
                          "limits": inst.limits, "spare": sorted(inst.spare_candidates),
                          "groups": inst.groups, "cut": got, "brute": want})
    rep.stats.update(menger_checked=menger_checked, driver_checked=driver_checked)
    return rep


def _random_driver_instances(rng: random.Random) -> list[ControlInstance]:
    total = rng.randint(2, 6)
    n_spare = rng.randint(0, total - 1)
    e = random_election(rng, total, rng.choice((3, 5, 7, 9)), prefix="k")
    cands = list(e.candidates)
    spare = frozenset(rng.sample(cands, n_spare))
    base = [c for c in cands if c not in spare]
    p = rng.choice(base)
    common = dict(mode="destructive", model="nonunique")
    out = [ControlInstance(e, p, ("AC", "DC"),
                           {"AC": rng.randint(0, 2), "DC": rng.randint(0, 2)},
                           spare_candidates=spare, **common)]
    labels = [f"g{i}" for i in range(rng.randint(1, 3))]
    groups = {c: rng.choice(labels) for c in cands}
    only_base = Election(tuple(base), tuple((tuple(c for c in r if c in base), k) for r, k in e.ballots)) \
        if spare else e
    out.append(ControlInstance(only_base, p, ("DCG",), {"DCG": rng.randint(0, 3)},
                               groups={c: groups[c] for c in base}, **common))
    if spare:
        out.append(ControlInstance(e, p, ("ACG",), {"ACG": rng.randint(0, 3)},
                                   spare_candidates=spare, groups=groups, **common))
    return out


@_timed
def sweep_reduction_3sat(max_vars: int = 3, max_clauses: int = 2) -> SweepReport:
    """Satisfiability equals the deletion-control decision of both fixed constructions."""
    rep = SweepReport("reduction-3sat")
    sat = 0
    for f in enumerate_3cnf(max_vars, max_clauses):
        truth = truth_table_sat(f)
        sat += truth
        for variant in ("fixed_nonunique", "fixed_unique"):
            art = threesat_to_ccdc(f, variant)
            inst = art.instance
            rep.checked += 1
            if build_wmg(inst.election) != art.target:
                rep.fail({"formula": f.clauses, "variant": variant, "problem": "margins"})
            got = solve_control(inst, force=True).decision
            if got != truth:
                rep.fail({"formula": f.clauses, "variant": variant, "sat": truth, "control": got})
    rep.stats.update(formulas=rep.checked // 2, satisfiable=sat)
    return rep


@_timed
def sweep_reduction_rx3c(sizes: Sequence[int] = (1, 2)) -> SweepReport:
    """Exact-cover existence equals the decision of every emitted voter-control instance."""
    rep = SweepReport("reduction-rx3c")
    covers = 0
    classes = 0
    for s in sizes:
        reps, labeled = enumerate_rx3c(s)
        rep.stats[f"s{s}_labeled"] = labeled
        rep.stats[f"s{s}_classes"] = len(reps)
        for inst in reps:
            classes += 1
            truth = inst.exact_cover() is not None
            covers += truth
            for model in ("nonunique", "unique"):
                for gen in (rx3c_to_schulze_voter, rx3c_to_rankedpairs_voter):
                    art = gen(inst, model)
                    if build_wmg(art.instance.election) != art.target:
                        rep.fail({"rx3c": inst.triples, "model": model, "problem": "margins"})
                    for name, ci in art.instances.items():
                        rep.checked += 1
                        got = solve_control(ci).decision
                        if got != truth:
                            rep.fail({"rx3c": inst.triples, "variant": model, "rule": str(ci.rule),
                                      "instance": name, "cover": truth, "control": got})
    rep.stats["with_cover"] = covers
    return rep


@_timed
def sweep_reduction_faithfulness(max_vars: int = 3, max_clauses: int = 2,
                                 rx3c_sizes: Sequence[int] = (1, 2)) -> SweepReport:
    a = sweep_reduction_3sat(max_vars, max_clauses)
    b = sweep_reduction_rx3c(rx3c_sizes)
    rep = SweepReport("reduction-faithfulness", a.checked + b.checked, a.failures + b.failures)
    rep.stats.update({f"3sat.{k}": v for k, v in a.stats.items()})
    rep.stats.update({f"rx3c.{k}": v for k, v in b.stats.items()})
    return rep


SUITES: dict[str, Callable[..., SweepReport]] = {
    "theorem3": sweep_theorem3,
    "dcdc-equivalence": sweep_dcdc_equivalence,
    "lemma-lift": sweep_lemma_lift,
    "reduction-faithfulness": sweep_reduction_faithfulness,
    "ibc": sweep_ibc,
    "cuts": sweep_cuts,
}
