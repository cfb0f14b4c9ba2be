import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from votecut.fixtures import adding_wmg, example2_wmg, unique_vs_nonunique_wmg
from votecut.profile import (Election, ParityError, ProfileError, WeightedMajorityGraph,
                             build_wmg, double_margins, mcgarvey_realize, pad_bottom,
                             pairwise_margin, pairwise_support, parse_election, parse_wmg,
                             serialize_election, serialize_wmg, w_pair)
from votecut.schulze import schulze_winners

from conftest import elections, wmgs


def test_pairwise_support(ex2):
    assert pairwise_support(ex2, "a", "b") == 9
    assert pairwise_support(ex2, "b", "a") == 2
    assert pairwise_support(Election("xy"), "x", "y") == 0


def test_pairwise_margin(ex2):
    assert pairwise_margin(ex2, "a", "b") == 7
    assert pairwise_margin(ex2, "b", "a") == -7
    assert pairwise_margin(ex2, "d", "c") == 3


def test_build_wmg_example2(ex2):
    g = build_wmg(ex2)
    assert g.positive_edges() == [("a", "b", 7), ("a", "c", 5), ("b", "d", 1),
                                  ("c", "b", 7), ("d", "a", 3), ("d", "c", 3)]
    assert g == example2_wmg()
    assert g.parity == 1


def test_build_wmg_degenerate():
    assert not build_wmg(Election("abc")).margins.any()
    e = Election("xy", ((("x", "y"), 1), (("y", "x"), 1)))
    assert build_wmg(e).margin("x", "y") == 0


def test_w_pair_examples():
    assert w_pair("abcd", "a", "b") == (("a", "b", "c", "d"), ("d", "c", "a", "b"))
    assert w_pair("xy", "x", "y") == (("x", "y"), ("x", "y"))
    assert w_pair("abc", "b", "c") == (("b", "c", "a"), ("a", "b", "c"))
    e = Election("abc", tuple((r, 1) for r in w_pair("abc", "b", "c")))
    g = build_wmg(e)
    assert (g.margin("b", "c"), g.margin("a", "b"), g.margin("a", "c")) == (2, 0, 0)


@given(st.integers(3, 7), st.data())
def test_w_pair_touches_one_pair(m, data):
    names = [f"v{i}" for i in range(m)]
    c, d = data.draw(st.permutations(names))[:2]
    g = build_wmg(Election(names, tuple((r, 1) for r in w_pair(names, c, d))))
    expected = np.zeros((m, m), dtype=np.int64)
    i, j = g.index(c), g.index(d)
    expected[i, j], expected[j, i] = 2, -2
    assert np.array_equal(g.margins, expected)


def test_mcgarvey_fig4_roundtrip():
    g = adding_wmg()
    assert build_wmg(mcgarvey_realize(g)) == g


def test_mcgarvey_zero_and_parity():
    zero = WeightedMajorityGraph("abc", np.zeros((3, 3)))
    assert mcgarvey_realize(zero).n == 0
    with pytest.raises(ParityError) as info:
        mcgarvey_realize(WeightedMajorityGraph.from_edges("xy", {("x", "y"): 1}))
    assert info.value.pair == ("x", "y")


@given(wmgs(max_m=6, low=-12, high=12, even=True))
def test_mcgarvey_soundness(g):
    assert build_wmg(mcgarvey_realize(g)) == g


def test_mcgarvey_with_base():
    target = WeightedMajorityGraph.from_edges("abc", {("a", "b"): 3, ("b", "c"): 1, ("a", "c"): 1})
    base = Election("abc", ((("a", "b", "c"), 1),))
    assert build_wmg(mcgarvey_realize(target, base)) == target


@given(elections())
def test_antisymmetry_and_parity(e):
    g = build_wmg(e)
    assert np.array_equal(g.margins, -g.margins.T)
    off = g.margins[~np.eye(g.m, dtype=bool)]
    assert all(v % 2 == e.n % 2 for v in off)


def test_pad_bottom(ex2):
    assert schulze_winners(build_wmg(pad_bottom(ex2, ["x"]))) == {"d"}
    assert pad_bottom(ex2, []) == ex2
    g = build_wmg(pad_bottom(ex2, ["x1", "x2"]))
    assert g.margin("x1", "x2") == 11
    with pytest.raises(ProfileError):
        pad_bottom(ex2, ["a"])


def test_double_margins():
    g = unique_vs_nonunique_wmg()
    assert sorted({w for *_, w in g.positive_edges()}) == [1, 5, 10, 20]
    assert sorted({w for *_, w in double_margins(g).positive_edges()}) == [2, 10, 20, 40]
    zero = WeightedMajorityGraph("ab", np.zeros((2, 2)))
    assert double_margins(zero) == zero
    assert schulze_winners(double_margins(example2_wmg())) == schulze_winners(example2_wmg()) == {"d"}


def test_wmg_rejects_asymmetric():
    with pytest.raises(ProfileError):
        WeightedMajorityGraph("ab", [[0, 1], [1, 0]])


def test_wmg_sorts_candidates():
    g = WeightedMajorityGraph(["b", "a"], [[0, 4], [-4, 0]])
    assert g.candidates == ("a", "b")
    assert g.margin("b", "a") == 4


def test_parse_election_example(ex2):
    text = serialize_election(ex2)
    assert text.splitlines()[0] == "candidates: a, b, c, d"
    e = parse_election(text)
    assert e.n == 11
    assert serialize_election(e) == text


def test_parse_election_errors():
    assert parse_election("candidates: a, b\n").n == 0
    with pytest.raises(ProfileError, match="'c'"):
        parse_election("candidates: a, b, c\n2: a > b\n")
    with pytest.raises(ProfileError, match="unknown token"):
        parse_election("candidates: a, b\n1: a > z\n")
    with pytest.raises(ProfileError, match="count"):
        parse_election("candidates: a, b\nx: a > b\n")
    with pytest.raises(ProfileError, match="empty candidate"):
        parse_election("candidates:\n")
    with pytest.raises(ProfileError, match="empty election"):
        parse_election("# nothing\n")


def test_parse_comments():
    e = parse_election("# header\ncandidates: a, b  # two\n3: b > a\n")
    assert e.ballots == ((("b", "a"), 3),)


@given(elections(min_n=0))
def test_election_roundtrip(e):
    assert parse_election(serialize_election(e)) == e


@given(wmgs(max_m=6))
def test_wmg_roundtrip(g):
    text = serialize_wmg(g)
    assert parse_wmg(text) == g
    assert serialize_wmg(parse_wmg(text)) == text


def test_parse_wmg_errors():
    with pytest.raises(ProfileError, match="positive"):
        parse_wmg("candidates: a, b\na b -2\n")
    with pytest.raises(ProfileError, match="twice"):
        parse_wmg("candidates: a, b\na b 2\nb a 2\n")
    with pytest.raises(ProfileError, match="unknown"):
        parse_wmg("candidates: a, b\na q 2\n")


def test_project_keeps_order(ex2):
    sub = ex2.project(["a", "d"])
    assert sub.ballots[0] == (("a", "d"), 4)
    assert build_wmg(sub).margin("d", "a") == 3


def test_election_rejects_bad_names():
    with pytest.raises(ProfileError):
        Election(["a b"])
    with pytest.raises(ProfileError):
        Election([])
