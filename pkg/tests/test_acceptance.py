"""One check per acceptance criterion; each prints a single PASS/FAIL line."""
import time

import pytest

from votecut.control import apply_witness, solve_control
from votecut.dcdc import solve_dcdc_nonunique
from votecut.fixtures import (adding_instance, counterexample_formula, example2_election,
                              recently_added_instance, unique_vs_nonunique_instance)
from votecut.profile import build_wmg
from votecut.rankedpairs import LEXICOGRAPHIC, lock_pairs, pair_agenda, ranked_pairs_winner
from votecut.reductions import threesat_to_ccdc
from votecut.schulze import schulze_winners, strongest_paths
from votecut.sweeps import (brute_dcdc, sweep_cuts, sweep_dcdc_equivalence, sweep_ibc,
                            sweep_lemma_lift, sweep_reduction_3sat, sweep_reduction_rx3c)

from conftest import ACCEPTANCE_LINES

MARGINS = {("a", "b"): 7, ("c", "b"): 7, ("a", "c"): 5,
           ("d", "a"): 3, ("d", "c"): 3, ("b", "d"): 1}
AGENDA = [(pair, w) for pair, w in MARGINS.items()]
PATHS = {
    "a": {"b": 7, "c": 5, "d": 1},
    "b": {"a": 1, "c": 1, "d": 1},
    "c": {"a": 1, "b": 7, "d": 1},
    "d": {"a": 3, "b": 3, "c": 3},
}


def check(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


@pytest.fixture(scope="module")
def dcdc_sweep():
    with Clock() as clk:
        rep = sweep_dcdc_equivalence(10_000)
    return rep, clk.seconds


def test_criterion_01_schulze_example():
    with Clock() as clk:
        e = example2_election()
        g = build_wmg(e)
        P = strongest_paths(g)
        winners = schulze_winners(g)
    ok = (e.n == 11 and len(e.candidates) == 4
          and {(c, d): w for c, d, w in g.positive_edges()} == MARGINS
          and all(P(c, d) == v for c, row in PATHS.items() for d, v in row.items())
          and winners == {"d"} and clk.seconds < 1)
    check(1, ok, f"winners={sorted(winners)}, {clk.seconds * 1000:.1f} ms")


def test_criterion_02_ranked_pairs_example():
    with Clock() as clk:
        g = build_wmg(example2_election())
        agenda = pair_agenda(g, LEXICOGRAPHIC)
        locks = lock_pairs(agenda)
        winner = ranked_pairs_winner(g, LEXICOGRAPHIC)
    skipped = [p for p, _ in locks.skipped]
    ok = agenda == AGENDA and skipped == [("b", "d")] and winner == "d" and clk.seconds < 1
    check(2, ok, f"skipped={skipped}, winner={winner}, {clk.seconds * 1000:.1f} ms")


def test_criterion_03_counterexample():
    phi = counterexample_formula()
    with Clock() as clk:
        flawed = solve_control(threesat_to_ccdc(phi, "flawed_original").instance)
        fixed_art = threesat_to_ccdc(phi, "fixed_nonunique")
        fixed = solve_control(fixed_art.instance)
    dels = fixed.witness.deleted_candidates if fixed.decision else ()
    clauses = sorted(fixed_art.roles[c] for c in dels)
    ok = (len(fixed_art.target.candidates) == 20 and not flawed.decision and fixed.decision
          and clauses == ["literal:1", "literal:2"] and clk.seconds < 30)
    check(3, ok, f"flawed={flawed.decision}, fixed={fixed.decision}, witness={list(dels)}, "
                 f"{clk.seconds:.1f} s")


def test_criterion_04_sat_faithfulness():
    rep = sweep_reduction_3sat(3, 2)
    ok = rep.passed and rep.elapsed < 600
    check(4, ok, f"{rep.summary()}, {rep.elapsed:.1f} s")


def test_criterion_05_rx3c_faithfulness():
    rep = sweep_reduction_rx3c((1, 2))
    ok = rep.passed and rep.elapsed < 900
    check(5, ok, f"{rep.summary()}, {rep.elapsed:.1f} s")


def test_criterion_06_dcdc_oracle(dcdc_sweep):
    rep, _ = dcdc_sweep
    disagreements = len([f for f in rep.failures if "poly" in f])
    ok = rep.checked >= 10_000 and disagreements == 0 and rep.stats["poly_ms_mean"] < 1
    check(6, ok, f"{rep.checked} instances, {disagreements} disagreements, "
                 f"poly mean {rep.stats['poly_ms_mean']} ms")


def test_criterion_07_in_neighbor_witness(dcdc_sweep):
    rep, _ = dcdc_sweep
    ok = rep.stats["yes"] > 0 and rep.stats["in_neighbor_failures"] == 0
    check(7, ok, f"{rep.stats['yes']} yes-instances, {rep.stats['in_neighbor_failures']} failures")


def test_criterion_08_unique_vs_nonunique():
    with Clock() as clk:
        non = unique_vs_nonunique_instance("nonunique")
        poly = solve_dcdc_nonunique(non.election, "d", 2).decision
        brute_non = solve_control(non).decision
        g = build_wmg(non.election)
        brute_oracle = brute_dcdc(g, "d", 2)
        uniq = unique_vs_nonunique_instance("unique")
        res = solve_control(uniq)
        tie = False
        if res.decision:
            P = strongest_paths(build_wmg(apply_witness(uniq, res.witness)))
            tie = P("c", "d") == P("d", "c")
    dels = set(res.witness.deleted_candidates) if res.decision else set()
    ok = (not poly and not brute_non and not brute_oracle and res.decision
          and dels == {"xa1", "xb1"} and tie and clk.seconds < 10)
    check(8, ok, f"nonunique poly={poly} brute={brute_non}, unique={res.decision} "
                 f"witness={sorted(dels)}, {clk.seconds:.2f} s")


def test_criterion_09_adding_examples():
    with Clock() as clk:
        nonexact = solve_control(adding_instance())
        exact = solve_control(adding_instance(exact=True)).decision
        recent = solve_control(recently_added_instance()).decision
    ok = (nonexact.decision and nonexact.witness.added_candidates == ("a",)
          and not exact and not recent and clk.seconds < 5)
    check(9, ok, f"nonexact={nonexact.decision}, exact={exact}, recently_added={recent}, "
                 f"{clk.seconds:.2f} s")


def test_criterion_10_lifting():
    rep = sweep_lemma_lift(500)
    check(10, rep.passed and rep.checked >= 500, rep.summary())


def test_criterion_11_ibc():
    rep = sweep_ibc(1000)
    check(11, rep.passed and rep.checked >= 1000, rep.summary())


def test_criterion_12_cuts():
    rep = sweep_cuts(1000, driver_count=300)
    ok = rep.passed and rep.stats["menger_checked"] >= 1000 and rep.stats["driver_checked"] > 0
    check(12, ok, rep.summary())
