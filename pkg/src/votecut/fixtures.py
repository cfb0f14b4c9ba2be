"""Small worked elections and margin graphs used by the tests, the CLI demos and
the verification sweeps."""

from __future__ import annotations

from .control import ControlInstance
from .profile import Election, WeightedMajorityGraph, double_margins, mcgarvey_realize
from .reductions import ThreeSatInstance


def example2_election() -> Election:
    """Four candidates, eleven ballots; d wins under both rules."""
    return Election(("a", "b", "c", "d"), (
        (("a", "c", "b", "d"), 4),
        (("d", "a", "c", "b"), 2),
        (("d", "c", "a", "b"), 3),
        (("b", "d", "a", "c"), 2),
    ))


def example2_wmg() -> WeightedMajorityGraph:
    return WeightedMajorityGraph.from_edges("abcd", {
        ("a", "b"): 7, ("a", "c"): 5, ("b", "d"): 1,
        ("c", "b"): 7, ("d", "a"): 3, ("d", "c"): 3,
    })


def adding_wmg() -> WeightedMajorityGraph:
    """Registered p, d; spare a, b. Adding only a makes p win, adding both does not."""
    return WeightedMajorityGraph.from_edges("abdp", {
        ("d", "p"): 2, ("a", "d"): 4, ("p", "a"): 4, ("b", "p"): 6, ("d", "b"): 6,
    })


def adding_instance(exact: bool = False) -> ControlInstance:
    e = mcgarvey_realize(adding_wmg())
    if exact:
        return ControlInstance(e, "p", ("AC", "DC"), {"AC": 2, "DC": 0},
                               exact=True, spare_candidates=frozenset("ab"))
    return ControlInstance(e, "p", ("AC",), {"AC": 2}, spare_candidates=frozenset("ab"))


def recently_added_wmg() -> WeightedMajorityGraph:
    """The spare d duplicates the strong w -> c1 -> p route."""
    return WeightedMajorityGraph.from_edges(["w", "c1", "p", "c2", "d"], {
        ("w", "c1"): 4, ("w", "d"): 4, ("c1", "p"): 4, ("d", "p"): 4,
        ("p", "c2"): 2, ("c2", "w"): 2,
    })


def recently_added_instance() -> ControlInstance:
    e = mcgarvey_realize(recently_added_wmg())
    return ControlInstance(e, "p", ("AC", "DC"), {"AC": 1, "DC": 2},
                           exact=True, spare_candidates=frozenset({"d"}))


def unique_vs_nonunique_wmg() -> WeightedMajorityGraph:
    """Deleting xa1 and xb1 lets c tie d; no two deletions make d lose outright.

    Contains edges of weight 1 next to even weights, so it is realizable only
    after doubling.
    """
    edges = {}
    for side in "ab":
        x1, x2, x3 = (f"x{side}{i}" for i in (1, 2, 3))
        z1, z2 = f"z{side}1", f"z{side}2"
        edges.update({("d", x2): 5, ("d", x3): 5, ("d", x1): 10, (x1, "y"): 10,
                      (x2, "c"): 10, (x3, "c"): 10, (x1, x2): 10, (x1, x3): 10,
                      ("c", z1): 20, ("c", z2): 20, ("d", z1): 1, ("d", z2): 1})
        for z in (z1, z2):
            for x in (x2, x3):
                edges[(z, x)] = 20
    edges.update({("d", "y"): 5, ("y", "c"): 5, ("c", "d"): 5})
    cands = {v for pair in edges for v in pair}
    return WeightedMajorityGraph.from_edges(cands, edges)


def unique_vs_nonunique_instance(model: str = "nonunique", ell: int = 2) -> ControlInstance:
    e = mcgarvey_realize(double_margins(unique_vs_nonunique_wmg()))
    return ControlInstance(e, "d", ("DC",), {"DC": ell}, mode="destructive", model=model)


def counterexample_formula() -> ThreeSatInstance:
    """(x1 or x2 or not x3) and (not x1 or x2 or x3)."""
    return ThreeSatInstance(3, ((1, 2, -3), (-1, 2, 3)))
