"""clocklam command line: reduce, tree, discriminate, catalog.

Every numeric flag can also be set through an environment variable named
``CLOCKLAM_<FLAG>`` (for example ``CLOCKLAM_FUEL=500``); explicit flags win.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import re
import sys
from concurrent.futures import ProcessPoolExecutor

from . import discrimination as disc
from . import fpc
from . import reduction as red
from . import trees as tr
from .terms import App, Free, ParseError, Term, format_position, parse, pretty

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CYCLE = 2
EXIT_FUEL = 3
EXIT_CONVERTIBLE = 10
EXIT_INCONCLUSIVE = 20

STRATEGIES = {
    "head": red.reduce_to_hnf,
    "whnf": red.reduce_to_whnf,
    "root-stable": red.reduce_to_root_stable,
    "normalize": red.normalize,
}
STRATEGY_NAMES = (*STRATEGIES, "random")
FAMILIES = ("bohm", "scott", "schemes", "vectors", "delta")


def _env(name: str, default, cast=str, choices=None):
    raw = os.environ.get(f"CLOCKLAM_{name}")
    if raw is None:
        return default
    try:
        value = cast(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise SystemExit(f"bad value for CLOCKLAM_{name}: {raw!r}")
    if choices is not None and value not in choices:
        raise SystemExit(f"bad value for CLOCKLAM_{name}: {raw!r}")
    return value


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _natural(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--depth", type=_positive, default=_env("DEPTH", tr.DEFAULT_DEPTH, _positive))
    p.add_argument("--fuel", type=_positive, default=_env("FUEL", red.DEFAULT_FUEL, _positive))
    p.add_argument("--mode", choices=tr.MODES, default=_env("MODE", "count", choices=tr.MODES))
    p.add_argument("--prefix-cut", type=_natural, default=_env("PREFIX_CUT", 0, _natural))
    p.add_argument("--format", choices=("text", "json", "dot"), default=_env("FORMAT", "text", choices=("text", "json", "dot")))
    p.add_argument("--seed", type=int, default=_env("SEED", 0, int))
    p.add_argument("--ascii", action="store_true", help="print \\ instead of λ")
    p.add_argument(
        "--let", action="append", default=[], metavar="NAME=TERM",
        help="bind NAME inside term text (repeatable; later bindings see earlier ones)",
    )
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="clocklam", description="Clocked Böhm trees and fpc discrimination.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", parents=[common], help="trace a reduction strategy")
    r.add_argument("term")
    r.add_argument("--strategy", choices=STRATEGY_NAMES, default=_env("STRATEGY", "head", choices=STRATEGY_NAMES))

    t = sub.add_parser("tree", parents=[common], help="render a clocked tree")
    t.add_argument("term")
    t.add_argument("--flavor", choices=tr.FLAVORS, default=_env("FLAVOR", "bt", choices=tr.FLAVORS))
    t.add_argument("--rational", action="store_true", help="emit the finite graph when one exists")

    d = sub.add_parser("discriminate", parents=[common], help="try to prove two terms inconvertible")
    d.add_argument("term_a")
    d.add_argument("term_b")
    d.add_argument("--budget", type=_positive, default=_env("BUDGET", 2000, _positive))

    c = sub.add_parser("catalog", parents=[common], help="check a family and discriminate its members")
    c.add_argument("family", choices=FAMILIES)
    c.add_argument("range", nargs="?", default=None, help="a..b for numbered families; vectors like (2,3),(3,2)")
    c.add_argument("--jobs", type=_positive, default=_env("JOBS", 1, _positive))
    c.add_argument("--manifest", default=None, help="also write the JSON report to this file")
    c.add_argument("--no-matrix", action="store_true")
    return ap


def _style(args) -> str:
    return "ascii" if args.ascii else "unicode"


def environment(bindings=()) -> dict[str, Term]:
    env = fpc.catalog_env()
    for b in bindings:
        name, sep, text = b.partition("=")
        if not sep or not name.strip().isidentifier():
            raise SystemExit(f"bad --let {b!r}; expected NAME=TERM")
        env[name.strip()] = parse(text, env)
    return env


def parse_term(text: str, bindings=()) -> Term:
    return parse(text, environment(bindings))


# ---------------------------------------------------------------------------
# reduce


def random_reduction(t: Term, fuel: int, seed: int):
    """Contract a uniformly chosen redex per step, reproducibly from ``seed``.
    Revisiting a term proves nothing here, so there is no Cycle outcome."""
    rng = random.Random(seed)
    trace = []
    for _ in range(fuel):
        ps = red.redex_positions(t)
        if not ps:
            return red.Reached(t, tuple(trace))
        t, s = red.step(t, ps[rng.randrange(len(ps))])
        trace.append(s)
    return red.Reached(t, tuple(trace)) if t.normal else red.FuelExhausted(t, tuple(trace))


def cmd_reduce(args, out) -> int:
    t = parse_term(args.term, args.let)
    if args.strategy == "random":
        outcome = random_reduction(t, args.fuel, args.seed)
    else:
        outcome = STRATEGIES[args.strategy](t, args.fuel)
    style = _style(args)
    kind = type(outcome).__name__
    code = {"Reached": EXIT_OK, "Cycle": EXIT_CYCLE, "FuelExhausted": EXIT_FUEL}[kind]
    if args.format == "json":
        steps, u = [], t
        for s in outcome.trace:
            u = red.beta_step_at(u, s.position)
            steps.append({"position": format_position(s.position, ""), "kind": s.kind.value, "term": pretty(u, style)})
        doc = {
            "input": pretty(t, style),
            "strategy": args.strategy,
            "outcome": kind,
            "steps": steps,
            "result": pretty(outcome.term, style),
        }
        print(json.dumps(doc, ensure_ascii=False, indent=2), file=out)
        return code
    print(f"   0  {'':<8} {'':<7} {pretty(t, style)}", file=out)
    u = t
    for i, s in enumerate(outcome.trace, 1):
        u = red.beta_step_at(u, s.position)
        print(f"{i:>4}  {format_position(s.position):<8} {s.kind.value:<7} {pretty(u, style)}", file=out)
    label = {"Reached": "reached", "Cycle": "cycle", "FuelExhausted": "fuel exhausted"}[kind]
    print(f"{label} after {len(outcome.trace)} steps: {pretty(outcome.term, style)}", file=out)
    return code


# ---------------------------------------------------------------------------
# tree


def cmd_tree(args, out) -> int:
    t = parse_term(args.term, args.let)
    style = _style(args)
    if args.rational:
        rt = tr.rational_expand(t, args.fuel, args.flavor, args.mode)
        if rt is None:
            print("no finite graph within budget", file=sys.stderr)
            return EXIT_FUEL
        if args.format == "json":
            print(json.dumps(tr.rational_to_json(rt), ensure_ascii=False, indent=2), file=out)
        elif args.format == "dot":
            print(tr.rational_to_dot(rt), file=out)
        else:
            for i in range(len(rt)):
                node = rt.nodes[i]
                kids = ", ".join(f"{format_position(off)}→{j}" for off, j in rt.children(i))
                label = "⊥" if node is tr.BOT else tr.format_annotation(tr.annotation_of(node), style)
                print(f"{i}: {label} {pretty(rt.states[i], style)}  [{kids}]", file=out)
        return EXIT_OK
    tree = tr.clocked_tree(t, args.flavor, args.depth, args.fuel, args.mode)
    if args.format == "json":
        print(json.dumps(tr.tree_to_json(tree), ensure_ascii=False, indent=2), file=out)
    elif args.format == "dot":
        print(tr.tree_to_dot(tree), file=out)
    else:
        print(tr.render_tree(tree, style), file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# discriminate


def _config(args) -> disc.Config:
    return disc.Config(
        depth=args.depth,
        fuel=args.fuel,
        mode=args.mode,
        prefix_cut=args.prefix_cut,
        budget=getattr(args, "budget", 2000),
    )


def _verdict_code(v) -> int:
    if isinstance(v, disc.Inconvertible):
        return EXIT_OK
    if isinstance(v, disc.Convertible):
        return EXIT_CONVERTIBLE
    return EXIT_INCONCLUSIVE


def cmd_discriminate(args, out) -> int:
    a, b = parse_term(args.term_a, args.let), parse_term(args.term_b, args.let)
    config = _config(args)
    v = disc.discriminate(a, b, config)
    if args.format == "json":
        print(json.dumps(disc.verdict_to_json(v, config), ensure_ascii=False, indent=2), file=out)
        return _verdict_code(v)
    style = _style(args)
    if isinstance(v, disc.Inconvertible):
        c = v.certificate
        print(f"inconvertible ({v.method})", file=out)
        print(f"  reduct of A: {pretty(c.reduct_m.term, style)}", file=out)
        print(f"  reduct of B: {pretty(c.reduct_n.term, style)}", file=out)
        where = ", ".join(format_position(p) for p in c.witness_positions)
        print(f"  witness: {c.relation} at {where} ({c.check}, {c.mode} clocks)", file=out)
    elif isinstance(v, disc.Convertible):
        print("convertible", file=out)
        print(f"  common reduct: {pretty(v.common_reduct, style)}", file=out)
        print(f"  steps: {len(v.path_m)} + {len(v.path_n)}", file=out)
    else:
        print(f"inconclusive: {v.reason}", file=out)
        for note in v.notes:
            print(f"  {note}", file=out)
    return _verdict_code(v)


# ---------------------------------------------------------------------------
# catalog


def _int_range(text: str | None, default: tuple[int, int]) -> range:
    if text is None:
        lo, hi = default
    else:
        m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*", text)
        if not m:
            raise SystemExit(f"bad range {text!r}; expected a..b")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) else lo
    return range(lo, hi + 1)


def _vectors(text: str | None) -> list[tuple[int, ...]]:
    if text is None:
        text = "(),(2),(3),(2,2),(2,3),(3,2),(3,3)"
    groups = re.findall(r"\(([^()]*)\)", text)
    if not groups:
        raise SystemExit(f"bad vector list {text!r}")
    return [tuple(int(x) for x in g.replace(" ", "").split(",") if x) for g in groups]


def _members(family: str, selection: str | None) -> list[dict]:
    """Name, term and parameters of each family member."""
    if family == "bohm":
        return [{"name": f"Y0δ^{n}", "term": fpc.bohm_fpc(n), "params": {"n": n}} for n in _int_range(selection, (0, 5))]
    if family == "scott":
        return [{"name": f"BY0S^{n}I", "term": fpc.scott_fpc(n), "params": {"n": n}} for n in _int_range(selection, (0, 5))]
    if family == "vectors":
        return [
            {"name": "Y⟨" + ",".join(map(str, ns)) + "⟩", "term": fpc.vector_fpc(ns), "params": {"vector": list(ns)}}
            for ns in _vectors(selection)
        ]
    if family == "schemes":
        out = []
        y0 = fpc.make("Y0")
        for s in fpc.SCHEMES:
            dummies = [Free("p"), Free("q")] if s == "vi" else None
            out.append({"name": f"scheme {s}", "term": fpc.scheme_fpc(s, y0, 1, dummies), "params": {"scheme": s, "Y": "Y0"}})
        return out
    if family == "delta":
        n = int(selection) if selection else 3
        return [{"name": pretty(t, "unicode"), "term": t, "params": {}} for t in fpc.delta_terms(n)]
    raise SystemExit(f"unknown family {family!r}")


def _clock_graph(t: Term, config: disc.Config, mode: str):
    r = disc.find_simple_reduct(t, config.simple_budget, config.depth, config.fuel)
    if r is None:
        return None
    return tr.rational_expand(r.term, config.fuel, "bt", mode)


def _clock(t: Term, config: disc.Config):
    """Annotations on the cycles of the clocked tree of a simple reduct of t x."""
    rt = _clock_graph(App(t, Free("x")), config, config.mode)
    if rt is None:
        return None
    anns = sorted({tr.format_annotation(a, "unicode") for a in rt.cycle_annotations() if a is not None})
    return anns


def _check_member(job):
    t, config = job
    report = fpc.check_fpc(t, 8, config.fuel)
    return {
        "reducing_k": report.reducing_k,
        "bt_is_x_omega_to_depth": report.bt_is_x_omega_to_depth,
        "convertibility_check": report.convertibility_check,
        "clock": _clock(t, config),
    }


def _check_delta(job):
    t, _config = job
    return {
        "length": fpc.delta_length(t),
        "criterion": fpc.delta_sn_criterion(t),
        "search": fpc.delta_sn_search(t),
    }


def _pair(job):
    i, j, a, b, config = job
    v = disc.discriminate(a, b, config)
    entry = {"pair": [i, j], "verdict": v.verdict}
    if isinstance(v, disc.Inconvertible):
        entry["method"] = v.method
    elif isinstance(v, disc.Inconclusive):
        entry["reason"] = v.reason
    if config.mode == "atomic":
        ga, gb = _clock_graph(a, config, "count"), _clock_graph(b, config, "count")
        if ga is not None and gb is not None and tr.rel_all(ga, gb, "=").holds:
            entry["note"] = "count clocks coincide"
    return entry


def _delta_pair(job):
    i, j, a, b, config = job
    expected = fpc.delta_convertible_by_length(a, b)
    found = red.convertible_bounded(a, b, config.budget) is not None
    return {"pair": [i, j], "byLength": expected, "commonReductFound": found}


def _map(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def catalog_report(family: str, selection: str | None, config: disc.Config, jobs: int = 1, matrix: bool = True) -> dict:
    members = _members(family, selection)
    check = _check_delta if family == "delta" else _check_member
    checks = _map(check, [(m["term"], config) for m in members], jobs)
    entries = [
        {"index": i, "name": m["name"], "term": pretty(m["term"], "ascii"), "params": m["params"], "checks": c}
        for i, (m, c) in enumerate(zip(members, checks))
    ]
    pairs = []
    if matrix:
        idx = range(len(members))
        if family == "delta":
            sn = [i for i in idx if checks[i]["criterion"] == "SN"]
            work = [(i, j, members[i]["term"], members[j]["term"], config) for i, j in itertools.combinations(sn, 2)]
            pairs = _map(_delta_pair, work, jobs)
        else:
            work = [(i, j, members[i]["term"], members[j]["term"], config) for i, j in itertools.combinations(idx, 2)]
            pairs = _map(_pair, work, jobs)
    return {"family": family, "range": selection, "budgets": config.budgets(), "members": entries, "matrix": pairs}


def _print_catalog(doc: dict, out):
    print(f"family {doc['family']}", file=out)
    for m in doc["members"]:
        c = m["checks"]
        if doc["family"] == "delta":
            print(f"  [{m['index']}] {m['name']}: length {c['length']}, criterion {c['criterion']}, search {c['search']}", file=out)
            continue
        clock = ",".join(c["clock"]) if c["clock"] else "?"
        k = "-" if c["reducing_k"] is None else c["reducing_k"]
        print(
            f"  [{m['index']}] {m['name']}: k={k} bt-depth={c['bt_is_x_omega_to_depth']} "
            f"conv={c['convertibility_check']} clock={clock}",
            file=out,
        )
    for e in doc["matrix"]:
        i, j = e["pair"]
        if doc["family"] == "delta":
            print(f"  {i} ~ {j}: by length {e['byLength']}, common reduct {'found' if e['commonReductFound'] else 'not found'}", file=out)
        else:
            extra = e.get("method") or e.get("reason") or ""
            note = f"; {e['note']}" if "note" in e else ""
            print(f"  {i} vs {j}: {e['verdict']}" + (f" ({extra}{note})" if extra else ""), file=out)


def cmd_catalog(args, out) -> int:
    config = _config(args)
    doc = catalog_report(args.family, args.range, config, args.jobs, not args.no_matrix)
    text = json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.format == "json":
        print(text, file=out)
    else:
        _print_catalog(doc, out)
    return EXIT_OK


COMMANDS = {"reduce": cmd_reduce, "tree": cmd_tree, "discriminate": cmd_discriminate, "catalog": cmd_catalog}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as e:
        print(f"parse error at offset {e.offset}: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
