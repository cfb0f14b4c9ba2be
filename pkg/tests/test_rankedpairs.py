import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from votecut.fixtures import example2_wmg
from votecut.profile import WeightedMajorityGraph, build_wmg, pad_bottom
from votecut.rankedpairs import LEXICOGRAPHIC, TieBreakPolicy, lock_pairs, pair_agenda, ranked_pairs_winner
from votecut.reductions import Rx3cInstance, cover_witness_margins, rx3c_to_rankedpairs_voter
from votecut.schulze import condorcet_winner

from conftest import elections, wmgs

TABLE5 = [(("a", "b"), 7), (("c", "b"), 7), (("a", "c"), 5),
          (("d", "a"), 3), (("d", "c"), 3), (("b", "d"), 1)]


def test_agenda_example():
    assert pair_agenda(example2_wmg(), LEXICOGRAPHIC) == TABLE5


def test_agenda_zero_margin():
    g = WeightedMajorityGraph("xy", np.zeros((2, 2)))
    assert pair_agenda(g) == [(("x", "y"), 0)]
    assert pair_agenda(g, TieBreakPolicy.favor("y")) == [(("y", "x"), 0)]


def test_agenda_favoring_d_is_unchanged_here():
    assert pair_agenda(example2_wmg(), TieBreakPolicy.favor("d")) == TABLE5


def test_favored_pairs_go_first():
    g = WeightedMajorityGraph.from_edges("abc", {("a", "b"): 2, ("c", "a"): 2, ("c", "b"): 2})
    assert pair_agenda(g)[0][0] == ("a", "b")
    assert pair_agenda(g, TieBreakPolicy.favor("c"))[0][0] == ("c", "a")


def test_lock_example():
    locks = lock_pairs(TABLE5)
    assert locks.locked == tuple(p for p, _ in TABLE5[:5])
    assert [p for p, _ in locks.skipped] == [("b", "d")]
    # the recorded cycle runs from d back to b through locked edges
    path = locks.skipped[0][1]
    assert path[0] == "d" and path[-1] == "b"
    assert locks.sources() == ["d"]


def test_lock_single_and_cycle():
    assert lock_pairs([("x", "y")]).locked == (("x", "y"),)
    g = WeightedMajorityGraph.from_edges("abc", {("a", "b"): 6, ("b", "c"): 4, ("c", "a"): 2})
    locks = lock_pairs(pair_agenda(g))
    assert [p for p, _ in locks.skipped] == [("c", "a")]
    assert ranked_pairs_winner(g) == "a"


def test_winner_examples():
    assert ranked_pairs_winner(example2_wmg()) == "d"
    assert ranked_pairs_winner(WeightedMajorityGraph(["z"], np.zeros((1, 1)))) == "z"


def test_winner_after_cover_is_p():
    inst = Rx3cInstance(("u", "v", "w3"), (("u", "v", "w3"),) * 3)
    for model in ("nonunique", "unique"):
        art = rx3c_to_rankedpairs_voter(inst, model)
        policy = TieBreakPolicy.favor("p")
        assert ranked_pairs_winner(art.target, policy) == "w"
        assert ranked_pairs_winner(cover_witness_margins(art, [0]), policy) == "p"


def test_policy_parse():
    assert TieBreakPolicy.parse("lexicographic") == LEXICOGRAPHIC
    assert TieBreakPolicy.parse("favor_designated(p)") == TieBreakPolicy.favor("p")
    assert str(TieBreakPolicy.favor("p")) == "favor_designated(p)"
    with pytest.raises(ValueError):
        TieBreakPolicy.parse("random")


@st.composite
def policies(draw, g):
    if draw(st.booleans()):
        return LEXICOGRAPHIC
    return TieBreakPolicy.favor(draw(st.sampled_from(g.candidates)))


@given(wmgs(max_m=6, low=-4, high=4), st.data())
def test_unique_source_and_acyclic(g, data):
    policy = data.draw(policies(g))
    agenda = pair_agenda(g, policy)
    assert len(agenda) == g.m * (g.m - 1) // 2
    locks = lock_pairs(agenda, g.candidates)
    assert len(locks.sources()) == 1
    # a total acyclic tournament: its out-degrees are exactly 0..m-1
    out = {c: 0 for c in g.candidates}
    for c, _ in locks.locked:
        out[c] += 1
    for (c, d), _ in locks.skipped:
        out[d] += 1
    assert sorted(out.values()) == list(range(g.m))


@given(wmgs(max_m=6), st.data())
def test_condorcet_winner_wins(g, data):
    cw = condorcet_winner(g)
    if cw is not None:
        assert ranked_pairs_winner(g, data.draw(policies(g))) == cw


@given(wmgs(max_m=5), st.data())
def test_deterministic(g, data):
    policy = data.draw(policies(g))
    assert pair_agenda(g, policy) == pair_agenda(g, policy)
    assert ranked_pairs_winner(g, policy) == ranked_pairs_winner(g, policy)


@given(elections(min_m=1, max_m=5, min_n=1))
def test_bottom_padding_keeps_winner(e):
    assert ranked_pairs_winner(build_wmg(pad_bottom(e, ["zz"]))) == ranked_pairs_winner(build_wmg(e))
