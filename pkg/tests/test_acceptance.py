"""Acceptance criteria, one test (or group) per criterion at exact tolerances.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import itertools
import random
import time

import pytest

import oracle
from clocklam import discrimination as disc
from clocklam import fpc
from clocklam import reduction as red
from clocklam import trees as tr
from clocklam.terms import App, Free, app, parse, parse_position, pretty

ENV = fpc.catalog_env()
X, F = Free("x"), Free("f")
Y0, Y1, I, S, B = (fpc.make(n) for n in ("Y0", "Y1", "I", "S", "B"))
XI, THETA, DELTA = ENV["xi"], ENV["theta"], ENV["delta"]

# every discriminate() verdict seen in this module, by pair and budget
VERDICTS: dict[tuple, set] = {}


def judge(m, n, config=None):
    config = config or disc.Config()
    v = disc.discriminate(m, n, config)
    VERDICTS.setdefault((m, n), set()).add(v.verdict)
    assert disc.verify(m, n, v, config), (pretty(m), pretty(n))
    return v


def spine(tree):
    out = []
    while isinstance(tree, tr.BTNode) and tree.children:
        out.append(tree.annotation)
        tree = tree.children[-1]
    return out


def every_node(tree):
    stack = [(tree, None)]
    while stack:
        t, side = stack.pop()
        if isinstance(t, tr.BTNode):
            yield t, side
            stack.extend((c, i) for i, c in enumerate(t.children))


@pytest.mark.criterion(1, "clocked BTs of Y0 f and Y1 f at depth 6")
def test_criterion_1():
    assert tr.render_tree(tr.clocked_bt(App(Y0, F), 6)) == "[2]f(" + "[1]f(" * 5 + "?" + ")" * 6
    assert tr.render_tree(tr.clocked_bt(App(Y1, F), 6)) == "[2]f(" * 6 + "?" + ")" * 6


@pytest.mark.criterion(2, "clock 2n on the simple reduct of Y_n x, n = 2..6")
@pytest.mark.parametrize("n", range(2, 7))
def test_criterion_2(n):
    t = app(XI, XI, *[DELTA] * (n - 1), X)
    ours = spine(tr.clocked_bt(t, 8))
    assert len(ours) == 8 and set(ours) == {2 * n}
    theirs = oracle.bt_clocks_along_spine(oracle.read(pretty(t)), "x", 8)
    assert theirs == ours


@pytest.mark.criterion(3, "clock 3n-2 on the simple reduct of U_n x, n = 2..6")
@pytest.mark.parametrize("n", range(2, 7))
def test_criterion_3(n):
    t = app(THETA, THETA, *[S] * (n - 2), I, X)
    ours = spine(tr.clocked_bt(t, 8))
    assert len(ours) == 8 and set(ours) == {3 * n - 2}
    theirs = oracle.bt_clocks_along_spine(oracle.read(pretty(t)), "x", 8)
    assert theirs == ours


@pytest.mark.criterion(4, "Y1(SS)S^n I is (3n+9)-reducing, Y1 is 2-reducing")
def test_criterion_4():
    assert fpc.check_fpc(Y1).reducing_k == 2
    for n in range(6):
        assert fpc.check_fpc(fpc.reducing_scott_fpc(Y1, n)).reducing_k == 3 * n + 9


@pytest.mark.criterion(5, "B Y0 S^n I passes the BT check; non-reducing for n >= 2")
def test_criterion_5():
    for n in range(6):
        rep = fpc.check_fpc(fpc.scott_fpc(n), 8)
        assert rep.bt_is_x_omega_to_depth == 8
        if n >= 2:
            assert rep.reducing_k is None


@pytest.mark.criterion(6, "atomic clocks separate Y2 from U2; count clocks do not")
def test_criterion_6():
    a = tr.clocked_bt(app(XI, XI, DELTA, X), 6, mode="atomic")
    b = tr.clocked_bt(app(THETA, THETA, I, X), 6, mode="atomic")
    want_a = tuple(parse_position(p) for p in ("11", "1", "1", "ε"))
    want_b = tuple(parse_position(p) for p in ("11", "1", "ε", "1"))
    assert set(spine(a)[1:]) == {want_a}
    assert set(spine(b)[1:]) == {want_b}

    y2, u2 = ENV["Y2"], ENV["U2"]
    v = judge(y2, u2, disc.Config(mode="atomic"))
    assert isinstance(v, disc.Inconvertible) and v.method == "atomic-simple-simple"
    # stage three alone: count clocks of the simple reducts never differ
    ra = disc.find_simple_reduct(App(y2, X))
    rb = disc.find_simple_reduct(App(u2, X))
    ga, gb = tr.rational_expand(ra.term), tr.rational_expand(rb.term)
    assert tr.rel_infinitely_often(ga, gb, "!=").fails
    assert isinstance(judge(y2, u2), disc.Inconclusive)


@pytest.mark.criterion(7, "no duplicates among Y0..Y5 and U0..U5; two known conversions")
def test_criterion_7():
    start = time.perf_counter()
    for family in (fpc.bohm_fpc, fpc.scott_fpc):
        members = [family(n) for n in range(6)]
        for a, b in itertools.combinations(members, 2):
            v = judge(a, b)
            assert isinstance(v, disc.Inconvertible), (pretty(a), pretty(b), v)
    assert isinstance(judge(Y0, app(B, Y0, I)), disc.Convertible)
    assert isinstance(judge(Y1, app(B, Y0, S, I)), disc.Convertible)
    assert time.perf_counter() - start < 60


VECTORS = [(), (2,), (3,), (2, 2), (2, 3), (3, 2), (3, 3)]


@pytest.mark.criterion(8, "vector fpcs over {2,3} are pairwise inconvertible (atomic)")
def test_criterion_8():
    cfg = disc.Config(mode="atomic")
    members = {v: fpc.vector_fpc(v) for v in VECTORS}
    for a, b in itertools.combinations(VECTORS, 2):
        assert isinstance(judge(members[a], members[b], cfg), disc.Inconvertible), (a, b)
    # the permutation pair agrees node-wise on count clocks
    ga, gb = (
        tr.rational_expand(disc.find_simple_reduct(App(members[v], X)).term) for v in ((2, 3), (3, 2))
    )
    assert tr.rel_all(ga, gb, "=").holds


@pytest.mark.criterion(9, "clocked BTs of the Plotkin terms at depth 3")
def test_criterion_9():
    a, b = fpc.plotkin_terms(Y1)
    nodes_a = list(every_node(tr.clocked_bt(a, 3)))
    nodes_b = list(every_node(tr.clocked_bt(b, 3)))
    assert len(nodes_a) == len(nodes_b) == 1 + 2 + 4
    assert all(n.annotation == 3 for n, _ in nodes_a)
    for n, side in nodes_b:
        assert n.annotation == (3 if side == 1 else 6)


def llt_annotations(tree):
    out = []
    while isinstance(tree, tr.LLAbsNode):
        out.append(tree.annotation)
        tree = tree.child
    return out


@pytest.mark.criterion(10, "clocked Levy-Longo trees of aa and bb")
def test_criterion_10():
    a = parse(r"(\x y.x x) (\x y.x x)")
    b = parse(r"(\x y z.x x) (\x y z.x x)")
    assert llt_annotations(tr.clocked_llt(a, 8)) == [1] * 8
    assert llt_annotations(tr.clocked_llt(b, 8)) == [1, 0] * 4


def catalog_terms():
    out = [fpc.bohm_fpc(n) for n in range(6)] + [fpc.scott_fpc(n) for n in range(6)]
    out += [fpc.reducing_scott_fpc(Y1, n) for n in range(3)]
    out += [fpc.vector_fpc(v) for v in VECTORS]
    out += [fpc.scheme_fpc(s, Y0, 1, [Free("p"), Free("q")] if s == "vi" else None) for s in fpc.SCHEMES]
    return out + [ENV[f"Y{n}"] for n in range(1, 6)]


@pytest.mark.criterion(11, "500 random single steps never slow a clock (depth 4)")
def test_criterion_11():
    rng = random.Random(11)
    pool = catalog_terms()
    pool += [App(t, X) for t in pool]
    violations = 0
    for _ in range(500):
        t = rng.choice(pool)
        for _ in range(rng.randrange(4)):
            t = red.random_step(t, rng)[0]
        u, _ = red.random_step(t, rng)
        before, after = tr.clocked_bt(t, 4), tr.clocked_bt(u, 4)
        if tr.rel_all(before, after, ">=").fails:
            violations += 1
    assert violations == 0


def simple_reducts():
    out = []
    for t in catalog_terms():
        r = disc.find_simple_reduct(App(t, X))
        if r is not None:
            out.append(r.term)
    return out


@pytest.mark.criterion(12, "simple clocks survive 50 random reducts each")
def test_criterion_12():
    rng = random.Random(12)
    reducts = simple_reducts()
    assert len(reducts) >= 20
    violations = []
    for m in reducts:
        gm = tr.rational_expand(m)
        assert gm is not None
        for _ in range(50):
            n = m
            for _ in range(rng.randint(1, 6)):
                n = red.random_step(n, rng)[0]
            gn = tr.rational_expand(n)
            if gn is None or not tr.rel_eventually(gm, gn, "=").holds:
                violations.append((pretty(m), pretty(n)))
    assert violations == []


@pytest.mark.criterion(13, "delta-term SN criterion agrees with search; equal lengths convert")
def test_criterion_13():
    terms = fpc.delta_terms(5)
    assert len(terms) == 1 + 1 + 2 + 5 + 14 + 42
    disagreements = 0
    for t in terms:
        crit, found = fpc.delta_sn_criterion(t), fpc.delta_sn_search(t, 10_000)
        if (crit == "trivial" and found != "SN") or (crit != "trivial" and crit != found):
            disagreements += 1
        # plain exhaustive search must never contradict the criterion
        assert fpc.sn_search(t, 500) in (crit if crit != "trivial" else "SN", "unknown")
    assert disagreements == 0
    dd = App(DELTA, DELTA)
    assert fpc.delta_sn_search(App(dd, dd)) == "not-SN"
    sn = [t for t in terms if fpc.delta_sn_criterion(t) == "SN"]
    pairs = [(a, b) for a, b in itertools.combinations(sn, 2) if fpc.delta_length(a) == fpc.delta_length(b)]
    assert pairs
    assert all(red.convertible_bounded(a, b) is not None for a, b in pairs)


SWEEP_PAIRS = [
    (ENV["Y2"], ENV["U2"]),
    (Y0, app(B, Y0, I)),
    (Y1, app(B, Y0, S, I)),
    fpc.plotkin_terms(Y1),
    *itertools.combinations([fpc.bohm_fpc(n) for n in range(4)], 2),
    *itertools.combinations([fpc.scott_fpc(n) for n in range(4)], 2),
    (fpc.vector_fpc((2, 3)), fpc.vector_fpc((3, 2))),
]


@pytest.mark.criterion(14, "no pair is both convertible and inconvertible under a fuel sweep")
def test_criterion_14():
    for m, n in SWEEP_PAIRS:
        for fuel in (100, 1000, 10_000):
            for mode in ("count", "atomic"):
                judge(m, n, disc.Config(fuel=fuel, mode=mode))
    assert VERDICTS
    both = [k for k, seen in VERDICTS.items() if {"convertible", "inconvertible"} <= seen]
    assert both == []
