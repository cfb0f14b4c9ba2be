import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from votecut.control import (SCHULZE, ControlError, ControlInstance, ControlWitness, Rule,
                             SearchSpaceExceeded, apply_witness, estimate_search, goal_met,
                             lift_ccdc_to_exact, lift_dcdc_to_exact, parse_control,
                             parse_problem_name, parse_type, problem_name, replay_witness,
                             serialize_control, solve_control)
from votecut.fixtures import (adding_instance, example2_election, recently_added_instance,
                              unique_vs_nonunique_instance)
from votecut.profile import Election, WeightedMajorityGraph, build_wmg, mcgarvey_realize
from votecut.rankedpairs import TieBreakPolicy
from votecut.schulze import schulze_winners, strongest_paths

from conftest import elections

RP = Rule.ranked_pairs()


def test_goal_examples(ex2):
    assert goal_met(SCHULZE, "constructive", "unique", "d", ex2)
    assert not goal_met(SCHULZE, "destructive", "nonunique", "d", ex2)
    tie = Election("ab", ((("a", "b"), 1), (("b", "a"), 1)))
    assert goal_met(SCHULZE, "constructive", "nonunique", "a", tie)
    assert not goal_met(SCHULZE, "constructive", "unique", "a", tie)
    assert goal_met(RP, "constructive", "unique", "a", tie)


def test_adding_nonexact_and_exact():
    res = solve_control(adding_instance())
    assert res.decision and res.witness.added_candidates == ("a",)
    assert not solve_control(adding_instance(exact=True)).decision


def test_recently_added_cannot_be_undone():
    assert not solve_control(recently_added_instance()).decision


def test_unique_vs_nonunique():
    assert not solve_control(unique_vs_nonunique_instance("nonunique")).decision
    res = solve_control(unique_vs_nonunique_instance("unique"))
    assert res.decision
    assert set(res.witness.deleted_candidates) == {"xa1", "xb1"}
    inst = unique_vs_nonunique_instance("unique")
    g = build_wmg(apply_witness(inst, res.witness))
    P = strongest_paths(g)
    assert P("c", "d") == P("d", "c")
    assert {"c", "d"} <= schulze_winners(g)


def test_distinguished_is_never_deleted():
    e = example2_election()
    inst = ControlInstance(e, "d", ("DC",), {"DC": 3}, mode="destructive", model="nonunique")
    res = solve_control(inst)
    if res.decision:
        assert "d" not in res.witness.deleted_candidates
    with pytest.raises(ControlError):
        apply_witness(inst, ControlWitness(deleted_candidates=("d",)))


def test_bribery():
    e = Election("abc", ((("b", "a", "c"), 3),))
    one = ControlInstance(e, "a", ("B",), {"B": 1})
    two = ControlInstance(e, "a", ("B",), {"B": 2})
    assert not solve_control(one).decision
    res = solve_control(two)
    assert res.decision and len(res.witness.bribes) == 2
    assert replay_witness(two, res.witness)


def test_replacing_ballots():
    e = Election("ab", ((("b", "a"), 2), (("a", "b"), 1)))
    spare = ((("a", "b"), 2),)
    inst = ControlInstance(e, "a", ("RV",), {"RV": 1}, spare_ballots=spare)
    res = solve_control(inst)
    assert res.decision
    assert len(res.witness.deleted_ballots) == len(res.witness.added_ballots) == 1


def test_guard(monkeypatch):
    inst = unique_vs_nonunique_instance("unique")
    monkeypatch.setenv("VOTECUT_GUARD", "10")
    with pytest.raises(SearchSpaceExceeded) as info:
        solve_control(inst)
    assert info.value.estimate == estimate_search(inst) > 10
    assert solve_control(inst, force=True).decision
    assert solve_control(inst, guard=10 ** 6).decision


def test_type_tokens():
    assert parse_type("E_AC+DC") == (("AC", "DC"), True)
    assert parse_type("DC+AC") == (("AC", "DC"), False)
    assert problem_name(("AC", "DC"), True, "constructive") == "ECCAC+DC"
    assert problem_name(("DCG",), False, "destructive") == "DCDCG"
    assert parse_problem_name("ECCAV+DV") == (("AV", "DV"), True, "constructive")
    assert parse_problem_name("DCACG") == (("ACG",), False, "destructive")
    for bad in ("RC+AC", "AV+RV", "XX", "DC+DCG"):
        with pytest.raises(ControlError):
            parse_type(bad)


def test_instance_validation():
    e = example2_election()
    with pytest.raises(ControlError, match="limit"):
        ControlInstance(e, "a", ("DC",), {"DC": -1})
    with pytest.raises(ControlError, match="missing"):
        ControlInstance(e, "a", ("DC", "AV"), {"DC": 1})
    with pytest.raises(ControlError, match="group"):
        ControlInstance(e, "a", ("DCG",), {"DCG": 1})
    with pytest.raises(ControlError, match="distinguished"):
        ControlInstance(e, "zz", ("DC",), {"DC": 1})


def test_control_format_roundtrip():
    for inst in (adding_instance(), adding_instance(True), recently_added_instance(),
                 unique_vs_nonunique_instance("unique")):
        text = serialize_control(inst)
        again = parse_control(text)
        assert again == inst
        assert serialize_control(again) == text


def test_control_format_with_groups_and_rule():
    e = example2_election()
    inst = ControlInstance(e, "d", ("DCG",), {"DCG": 2}, mode="destructive", model="nonunique",
                           rule=Rule.ranked_pairs(TieBreakPolicy.favor("d")),
                           groups={"a": "g1", "b": "g1", "c": "g2", "d": "g3"})
    text = serialize_control(inst)
    assert "rule=ranked_pairs(favor_designated(d))" in text
    assert parse_control(text) == inst


def test_control_format_errors():
    base = serialize_control(adding_instance())
    with pytest.raises(ControlError, match="unknown section"):
        parse_control(base + "[bogus]\n")
    with pytest.raises(ControlError, match="missing"):
        parse_control(base.replace("mode=constructive\n", ""))
    with pytest.raises(ControlError):
        parse_control(base.replace("limits=AC:2", "limits=AC:x"))


# -- properties over random small instances ----------------------------------

@st.composite
def spare_instances(draw, prongs=("AC", "DC")):
    """Random instance with spare candidates and spare ballots."""
    e = draw(elections(min_m=2, max_m=5, min_n=1, max_n=5, prefix="k"))
    cands = list(e.candidates)
    n_spare = draw(st.integers(0, len(cands) - 1)) if {"AC", "RC"} & set(prongs) else 0
    spare = frozenset(cands[len(cands) - n_spare:])
    base = [c for c in cands if c not in spare]
    p = draw(st.sampled_from(base))
    limits = {t: draw(st.integers(0, 2)) for t in prongs}
    spare_ballots = ()
    if {"AV", "RV"} & set(prongs):
        spare_ballots = tuple((tuple(draw(st.permutations(cands))), 1)
                              for _ in range(draw(st.integers(0, 3))))
    mode = draw(st.sampled_from(("constructive", "destructive")))
    model = draw(st.sampled_from(("unique", "nonunique")))
    rule = draw(st.sampled_from((SCHULZE, RP)))
    return ControlInstance(e, p, prongs, limits, mode=mode, model=model, rule=rule,
                           spare_candidates=spare, spare_ballots=spare_ballots)


TYPES = [("AC", "DC"), ("AV", "DV"), ("RC",), ("RV",), ("DC", "AV"), ("B",)]


@given(st.sampled_from(TYPES).flatmap(spare_instances))
def test_exact_implies_relaxed(inst):
    if "RC" in inst.prongs and not inst.spare_candidates:
        return
    keys = list(inst.limits)
    ranges = [range(inst.limits[k] + 1) for k in keys]
    exact_any = any(
        solve_control(inst.with_(exact=True, limits=dict(zip(keys, vec)))).decision
        for vec in itertools.product(*ranges))
    assert solve_control(inst).decision == exact_any


@given(st.sampled_from(TYPES).flatmap(spare_instances), st.booleans())
def test_witness_replays(inst, exact):
    inst = inst.with_(exact=exact)
    res = solve_control(inst)
    if res.decision:
        assert replay_witness(inst, res.witness)


@given(st.sampled_from(TYPES).flatmap(spare_instances))
def test_model_nesting(inst):
    uniq = solve_control(inst.with_(model="unique")).decision
    non = solve_control(inst.with_(model="nonunique")).decision
    if inst.mode == "constructive":
        assert not uniq or non
    else:
        assert not non or uniq


@given(elections(min_m=2, max_m=5, min_n=1, max_n=7), st.integers(0, 2), st.data())
def test_singleton_groups_match_plain_deletion(e, k, data):
    p = data.draw(st.sampled_from(e.candidates))
    mode = data.draw(st.sampled_from(("constructive", "destructive")))
    plain = ControlInstance(e, p, ("DC",), {"DC": k}, mode=mode, model="nonunique")
    grouped = ControlInstance(e, p, ("DCG",), {"DCG": k}, mode=mode, model="nonunique",
                              groups={c: c for c in e.candidates})
    assert solve_control(plain).decision == solve_control(grouped).decision


@given(elections(min_m=2, max_m=5, min_n=1, max_n=9), st.integers(0, 2), st.integers(0, 2),
       st.sampled_from(("constructive", "destructive")), st.sampled_from((SCHULZE, RP)),
       st.data())
def test_lifting_equivalence(e, k, l_ac, mode, rule, data):
    p = data.draw(st.sampled_from(e.candidates))
    for model in ("unique", "nonunique"):
        src = ControlInstance(e, p, ("DC",), {"DC": k}, mode=mode, model=model, rule=rule)
        lift = lift_ccdc_to_exact if mode == "constructive" else lift_dcdc_to_exact
        want = solve_control(src).decision
        assert [solve_control(x).decision for x in lift(src, l_ac)] == [want, want]


def test_lift_examples():
    # deleting b makes a beat c; a loses to b directly otherwise
    e = mcgarvey_realize(WeightedMajorityGraph.from_edges(
        "abc", {("b", "a"): 2, ("a", "c"): 2, ("c", "b"): 2}))
    yes = ControlInstance(e, "a", ("DC",), {"DC": 1}, model="unique")
    assert solve_control(yes).decision
    assert all(solve_control(x).decision for x in lift_ccdc_to_exact(yes, 1))
    zero = yes.with_(limits={"DC": 0})
    acdc, rc = lift_ccdc_to_exact(zero, 2)
    assert not any(c.startswith("pad_x") for c in acdc.election.candidates)
    assert not solve_control(acdc).decision and not solve_control(rc).decision
    no = unique_vs_nonunique_instance("nonunique")
    assert not any(solve_control(x).decision for x in lift_dcdc_to_exact(no, 1))
    # p = a is only a co-winner, so a unique-model destructive goal holds already
    dz = ControlInstance(e, "a", ("DC",), {"DC": 0}, mode="destructive", model="unique")
    assert all(solve_control(x).decision for x in lift_dcdc_to_exact(dz, 1))


def test_lift_rejects_wrong_shape():
    with pytest.raises(ControlError):
        lift_ccdc_to_exact(adding_instance(), 1)
    dc = ControlInstance(example2_election(), "a", ("DC",), {"DC": 1}, mode="destructive")
    with pytest.raises(ControlError):
        lift_ccdc_to_exact(dc, 1)
