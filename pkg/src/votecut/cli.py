"""``votecut`` command-line front end.

Exit codes: 0 when a result was computed (whatever the decision), 1 on input
errors, 2 when the brute-force search would exceed the guard, 3 when a
verification sweep found a failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .control import (ControlError, ControlInstance, Rule, SearchSpaceExceeded, estimate_search,
                      parse_control, serialize_control, solve_control)
from .cuts import (CutError, cppvc_decide, min_st_vertex_cut, mippvc_decide, parse_digraph,
                   ppvc_decide)
from .dcdc import dcac_dc_via_cut, group_control_via_cut, solve_dcdc_nonunique
from .profile import (ProfileError, build_wmg, looks_like_wmg, mcgarvey_realize, parse_election,
                      parse_wmg, serialize_election)
from .rankedpairs import TieBreakPolicy, lock_pairs, pair_agenda
from .reductions import (ReductionError, parse_cnf, parse_rx3c, rx3c_to_rankedpairs_voter,
                         rx3c_to_schulze_voter, threesat_to_ccdc)
from .schulze import schulze_winners, strongest_paths
from . import sweeps

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_SWEEP = 0, 1, 2, 3

INPUT_ERRORS = (ProfileError, ControlError, CutError, ReductionError, ValueError, KeyError, OSError)


class Reporter:
    def __init__(self, args):
        self.json = args.json
        self.timing = not args.no_timing
        self.fields: dict = {}
        self.lines: list[str] = []

    def add(self, key, value) -> None:
        self.fields[key] = value

    def note(self, line: str) -> None:
        """Verbose-only detail, shown after the fields in text mode."""
        self.lines.append(line)

    def time(self, key: str, seconds: float) -> None:
        if self.timing:
            self.fields[key] = round(seconds * 1000, 3)

    def emit(self, out=None) -> None:
        out = out or sys.stdout
        if self.json:
            payload = dict(self.fields)
            if self.lines:
                payload["details"] = self.lines
            out.write(json.dumps(payload, sort_keys=True) + "\n")
            return
        for key, value in self.fields.items():
            out.write(f"{key}: {_text(value)}\n")
        for line in self.lines:
            out.write(line + "\n")


def _text(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return ", ".join(_text(v) for v in items) if items else "-"
    if isinstance(value, dict):
        return "; ".join(f"{k}={_text(v)}" for k, v in value.items()) or "-"
    return str(value)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


# -- winners -------------------------------------------------------------------

def cmd_winners(args, rep: Reporter) -> int:
    text = _read(args.file)
    g = parse_wmg(text) if looks_like_wmg(text) else build_wmg(parse_election(text))
    start = time.perf_counter()
    if args.rule == "schulze":
        if args.tiebreak:
            raise ValueError("--tiebreak applies to ranked pairs only")
        winners = schulze_winners(g)
        rep.add("rule", "schulze")
        rep.add("winners", sorted(winners))
        if args.verbose and g.m >= 2:
            P = strongest_paths(g)
            width = max(len(c) for c in g.candidates)
            rep.note("strongest paths (row beats column):")
            for c in g.candidates:
                row = " ".join(f"{('-' if c == d else P(c, d)):>4}" for d in g.candidates)
                rep.note(f"  {c:<{width}} {row}")
    else:
        policy = TieBreakPolicy.parse(args.tiebreak or "lexicographic")
        if policy.designee is not None and policy.designee not in g.candidates:
            raise ValueError(f"tie-break designee {policy.designee!r} is not a candidate")
        agenda = pair_agenda(g, policy)
        locks = lock_pairs(agenda, g.candidates)
        [winner] = locks.sources()
        rep.add("rule", f"ranked_pairs({policy})")
        rep.add("winner", winner)
        if args.verbose:
            skipped = dict(locks.skipped)
            for (c, d), w in agenda:
                state = "skip" if (c, d) in skipped else "lock"
                rep.note(f"  {state} {c} > {d} ({w})")
    rep.time("time_ms", time.perf_counter() - start)
    return EXIT_OK


# -- control -------------------------------------------------------------------

def _poly_ok(inst: ControlInstance) -> bool:
    return (inst.rule.kind == "schulze" and inst.prongs == ("DC",) and not inst.exact
            and inst.mode == "destructive" and inst.model == "nonunique"
            and not inst.spare_candidates and not inst.spare_ballots)


def _cut_ok(inst: ControlInstance) -> bool:
    return (inst.rule.kind == "schulze" and not inst.exact and inst.mode == "destructive"
            and inst.model == "nonunique" and not inst.spare_ballots
            and (set(inst.prongs) <= {"AC", "DC"} or inst.prongs in (("DCG",), ("ACG",))))


def cmd_control(args, rep: Reporter) -> int:
    inst = parse_control(_read(args.file))
    rep.add("instance", inst.name)
    rep.add("model", inst.model)
    rep.add("rule", str(inst.rule))
    rep.add("solver", args.solver)
    start = time.perf_counter()
    if args.solver == "poly":
        if not _poly_ok(inst):
            raise ControlError("--solver poly handles nonexact Schulze DCDC in the nonunique model only")
        res = solve_dcdc_nonunique(inst.election, inst.distinguished, inst.limits["DC"])
        rep.add("decision", res.decision)
        if res.decision:
            rep.add("witness", {"deleted_candidates": list(res.witness)})
        if args.verbose:
            for a in res.trace:
                rep.note(f"  rival {a.rival}: {a.outcome}; thresholds {a.thresholds}; rounds {a.rounds}")
    elif args.solver == "cut":
        if not _cut_ok(inst):
            raise ControlError("--solver cut handles nonexact Schulze DCAC+DC and group variants "
                               "in the destructive nonunique model only")
        if inst.prongs in (("DCG",), ("ACG",)):
            decision = group_control_via_cut(inst)
        else:
            decision = dcac_dc_via_cut(inst)
        rep.add("decision", decision)
    else:
        if args.verbose:
            rep.note(f"  search estimate {estimate_search(inst)}")
        res = solve_control(inst, force=args.force)
        rep.add("decision", res.decision)
        if res.decision:
            rep.add("witness", res.witness.describe())
    rep.time("time_ms", time.perf_counter() - start)
    return EXIT_OK


# -- reduce --------------------------------------------------------------------

def _variant_for(kind: str, text: str | None) -> str:
    if kind == "3sat":
        v = (text or "fixed_nonunique").replace("-", "_")
        if v not in ("flawed_original", "fixed_nonunique", "fixed_unique"):
            raise ValueError(f"unknown 3sat variant {text!r}")
        return v
    v = text or "nonunique"
    if v not in ("nonunique", "unique"):
        raise ValueError(f"unknown rx3c variant {text!r}")
    return v


def cmd_reduce(args, rep: Reporter) -> int:
    source = getattr(args, "from")
    variant = _variant_for(source, args.variant)
    text = _read(args.file)
    if source == "3sat":
        if args.rule != "schulze":
            raise ValueError("the 3sat construction targets Schulze only")
        art = threesat_to_ccdc(parse_cnf(text), variant)
    else:
        gen = rx3c_to_schulze_voter if args.rule == "schulze" else rx3c_to_rankedpairs_voter
        art = gen(parse_rx3c(text), variant)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.prefix or (Path(args.file).stem if args.file != "-" else source)
    written = []
    for name, inst in art.instances.items():
        path = out_dir / f"{stem}.{variant}.{args.rule}.{name}.ctl"
        path.write_text(serialize_control(inst))
        written.append(str(path))
    side = out_dir / f"{stem}.{variant}.{args.rule}.provenance"
    side.write_text(art.provenance())
    rep.add("source", source)
    rep.add("variant", variant)
    rep.add("candidates", art.target.m)
    rep.add("instances", list(art.instances))
    rep.add("limits", [f"{n}({','.join(f'{k}:{v}' for k, v in i.limits.items())})"
                       for n, i in art.instances.items()])
    rep.add("written", written + [str(side)])
    return EXIT_OK


# -- cut -----------------------------------------------------------------------

def _names(text: str | None) -> list[str]:
    return [x.strip() for x in (text or "").split(",") if x.strip()]


def _colors(text: str | None) -> dict[str, str]:
    out = {}
    for item in _names(text):
        v, sep, c = item.partition(":")
        if not sep:
            raise ValueError(f"color entries look like vertex:color, got {item!r}")
        out[v.strip()] = c.strip()
    return out


def cmd_cut(args, rep: Reporter) -> int:
    g = parse_digraph(_read(args.file))
    s, t = args.source, args.target
    rep.add("problem", args.problem)
    start = time.perf_counter()
    if args.problem == "min":
        size, cut = min_st_vertex_cut(g, s, t)
        rep.add("size", size)
        rep.add("cut", sorted(cut))
    else:
        if args.problem == "ppvc":
            res = ppvc_decide(g, s, t, _need(args.k, "-k"))
        elif args.problem == "mippvc":
            res = mippvc_decide(g, s, t, _names(args.labeled), _need(args.x, "--x"), _need(args.y, "--y"))
        else:
            res = cppvc_decide(g, s, t, _colors(args.colors), _need(args.k, "-k"))
        rep.add("decision", res.decision)
        if res.decision:
            rep.add("witness", sorted(res.witness))
    rep.time("time_ms", time.perf_counter() - start)
    return EXIT_OK


def _need(value, flag: str) -> int:
    if value is None:
        raise ValueError(f"{flag} is required for this problem")
    return value


# -- realize -------------------------------------------------------------------

def cmd_realize(args, rep: Reporter) -> int:
    g = parse_wmg(_read(args.file))
    text = serialize_election(mcgarvey_realize(g))
    if args.output:
        Path(args.output).write_text(text)
        rep.add("written", args.output)
        rep.emit()
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- verify --------------------------------------------------------------------

SUITE_SIZES = {
    "theorem3": "count", "dcdc-equivalence": "count", "lemma-lift": "count",
    "ibc": "count", "cuts": "count", "reduction-faithfulness": None,
}


def _run_suite(name: str, seed: int, size: int | None) -> sweeps.SweepReport:
    fn = sweeps.SUITES[name]
    kwargs = {}
    if SUITE_SIZES[name]:
        kwargs["seed"] = seed
        if size is not None:
            kwargs["count"] = size
    return fn(**kwargs)


def cmd_verify(args, rep: Reporter) -> int:
    names = list(sweeps.SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in sweeps.SUITES:
        raise ValueError(f"unknown suite {args.suite!r}; choose from {', '.join(sweeps.SUITES)} or all")
    if args.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_suite, names, [args.seed] * len(names), [args.size] * len(names)))
    else:
        reports = [_run_suite(n, args.seed, args.size) for n in names]
    ok = True
    for r in reports:
        ok &= r.passed
        rep.add(r.name, {"passed": r.passed, "checked": r.checked,
                         "failures": len(r.failures) + r.stats.get("extra_failures", 0)})
        rep.time(f"{r.name}.time_ms", r.elapsed)
        if args.verbose:
            for k, v in r.stats.items():
                if k not in ("in_neighbor_examples",):
                    rep.note(f"  {r.name}.{k} = {v}")
            for f in r.failures[:5]:
                rep.note(f"  {r.name} failure: {f}")
    rep.add("result", "pass" if ok else "fail")
    return EXIT_OK if ok else EXIT_SWEEP


# -- parser --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are input errors; 2 is reserved for guard refusals
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured JSON report")
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument("--no-timing", action="store_true", help="omit timings (byte-stable output)")

    p = _Parser(prog="votecut", description="Schulze and ranked-pairs winners, "
                                "electoral control solvers, reduction generators and vertex cuts.")
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("winners", parents=[common], help="winner(s) of an election or margin graph")
    w.add_argument("file")
    w.add_argument("--rule", choices=("schulze", "ranked-pairs"), default="schulze")
    w.add_argument("--tiebreak", help="lexicographic or favor_designated(NAME)")
    w.set_defaults(func=cmd_winners)

    c = sub.add_parser("control", parents=[common], help="decide a control instance")
    c.add_argument("file")
    c.add_argument("--solver", choices=("brute", "poly", "cut"), default="brute")
    c.add_argument("--force", action="store_true", help="ignore the search-space guard")
    c.set_defaults(func=cmd_control)

    r = sub.add_parser("reduce", parents=[common], help="generate control instances from 3SAT or RX3C")
    r.add_argument("--from", choices=("3sat", "rx3c"), required=True)
    r.add_argument("file")
    r.add_argument("--variant", help="3sat: flawed-original, fixed-nonunique, fixed-unique; "
                   "rx3c: nonunique, unique")
    r.add_argument("--rule", choices=("schulze", "ranked-pairs"), default="schulze")
    r.add_argument("--out-dir", default=".")
    r.add_argument("--prefix")
    r.set_defaults(func=cmd_reduce)

    k = sub.add_parser("cut", parents=[common], help="vertex-cut queries on a digraph")
    k.add_argument("file")
    k.add_argument("--problem", choices=("min", "ppvc", "mippvc", "cppvc"), required=True)
    k.add_argument("--source", "-s", required=True)
    k.add_argument("--target", "-t", required=True)
    k.add_argument("-k", type=int, help="cut size bound (ppvc, cppvc)")
    k.add_argument("--labeled", help="comma-separated labeled vertices (mippvc)")
    k.add_argument("--x", type=int, help="max unlabeled vertices in the cut (mippvc)")
    k.add_argument("--y", type=int, help="min labeled vertices in the cut (mippvc)")
    k.add_argument("--colors", help="vertex:color,... for every vertex (cppvc)")
    k.set_defaults(func=cmd_cut)

    z = sub.add_parser("realize", parents=[common], help="ballots realizing a margin graph")
    z.add_argument("file")
    z.add_argument("--output", "-o")
    z.set_defaults(func=cmd_realize)

    v = sub.add_parser("verify", parents=[common], help="run a verification sweep")
    v.add_argument("--suite", required=True, help=", ".join(sweeps.SUITES) + " or all")
    v.add_argument("--seed", type=int, default=sweeps.DEFAULT_SEED)
    v.add_argument("--size", type=int, help="override the number of random instances")
    v.add_argument("--jobs", type=int, default=1, help="worker processes for --suite all")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    rep = Reporter(args)
    try:
        code = args.func(args, rep)
    except SearchSpaceExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    if args.command != "realize":
        rep.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
