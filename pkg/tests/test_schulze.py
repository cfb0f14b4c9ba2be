import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from votecut.fixtures import adding_wmg, example2_wmg
from votecut.profile import WeightedMajorityGraph, scale_margins
from votecut.schulze import (condorcet_winner, schulze_winners, strongest_paths,
                             weak_condorcet_winners)

from conftest import wmgs


def path_oracle(g):
    """Widest path by enumerating every simple path."""
    M = g.margins
    best = {}

    def walk(start, node, strength, seen):
        for nxt in range(g.m):
            if nxt in seen:
                continue
            s = min(strength, int(M[node, nxt]))
            key = (start, nxt)
            best[key] = max(best.get(key, s), s)
            walk(start, nxt, s, seen | {nxt})

    for v in range(g.m):
        walk(v, v, 10 ** 9, {v})
    return best


def test_table_of_strongest_paths():
    P = strongest_paths(example2_wmg())
    expected = {
        "a": {"b": 7, "c": 5, "d": 1},
        "b": {"a": 1, "c": 1, "d": 1},
        "c": {"a": 1, "b": 7, "d": 1},
        "d": {"a": 3, "b": 3, "c": 3},
    }
    for c, row in expected.items():
        for d, v in row.items():
            assert P(c, d) == v


def test_two_candidates():
    P = strongest_paths(WeightedMajorityGraph.from_edges("xy", {("x", "y"): 4}))
    assert (P("x", "y"), P("y", "x")) == (4, -4)


def test_diagonal_is_not_queried():
    with pytest.raises(ValueError):
        strongest_paths(example2_wmg())("a", "a")


@given(wmgs(max_m=5))
def test_matches_path_enumeration(g):
    P = strongest_paths(g)
    for (i, j), v in path_oracle(g).items():
        assert P(g.candidates[i], g.candidates[j]) == v


@given(wmgs(min_m=3, max_m=6))
def test_closure_properties(g):
    P = strongest_paths(g)
    C = g.candidates
    for c in C:
        for d in C:
            if c == d:
                continue
            assert P(c, d) >= g.margin(c, d)
            for e in C:
                if e not in (c, d):
                    assert P(c, d) >= min(P(c, e), P(e, d))


@given(wmgs(min_m=3, max_m=6), st.data())
def test_deletion_never_raises_strength(g, data):
    drop = data.draw(st.sampled_from(g.candidates))
    P, Q = strongest_paths(g), strongest_paths(g.without([drop]))
    for c in g.candidates:
        for d in g.candidates:
            if drop not in (c, d) and c != d:
                assert Q(c, d) <= P(c, d)


def test_winners_examples():
    assert schulze_winners(example2_wmg()) == {"d"}
    assert schulze_winners(WeightedMajorityGraph(["solo"], np.zeros((1, 1)))) == {"solo"}
    assert schulze_winners(WeightedMajorityGraph("abc", np.zeros((3, 3)))) == {"a", "b", "c"}


@given(wmgs(max_m=6))
def test_winners_nonempty(g):
    assert schulze_winners(g)


def test_condorcet_examples():
    registered = adding_wmg().restrict(["d", "p"])
    assert condorcet_winner(registered) == "d"
    zero = WeightedMajorityGraph("abc", np.zeros((3, 3)))
    assert condorcet_winner(zero) is None
    assert weak_condorcet_winners(zero) == {"a", "b", "c"}
    assert condorcet_winner(example2_wmg()) is None


@given(wmgs(max_m=6))
def test_condorcet_consistency(g):
    cw = condorcet_winner(g)
    if cw is not None:
        assert schulze_winners(g) == {cw}
        assert weak_condorcet_winners(g) == {cw}


@given(wmgs(max_m=6), st.integers(1, 5))
def test_scaling_keeps_winners(g, k):
    assert schulze_winners(scale_margins(g, k)) == schulze_winners(g)
