import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clocklam import discrimination as disc
from clocklam import fpc
from clocklam import reduction as red
from clocklam import trees as tr
from clocklam.terms import App, Free, Lam, parse, pretty, spine

ENV = fpc.catalog_env()
X = Free("x")


def P(text):
    return parse(text, ENV)


def test_curry_is_simple():
    res = disc.is_simple_term(P("Y0 f"))
    assert res.status == disc.SIMPLE and res.states


def test_normal_forms_and_unsolvables_are_simple():
    assert disc.is_simple_term(P(r"\x y.y x")).status == disc.SIMPLE
    assert disc.is_simple_term(P(r"(\x.x x) (\x.x x)")).status == disc.SIMPLE


def test_plotkin_term_is_not_simple():
    a, _ = fpc.plotkin_terms(ENV["Y1"])
    res = disc.is_simple_term(a)
    assert res.status == disc.NOT_SIMPLE
    assert res.witness == P(r"(\z.f z z) (Y1 (\z.f z z))")
    assert red.classify(res.witness) is red.RedexKind.NEITHER


def test_simple_check_runs_out():
    res = disc.is_simple_term(P(r"(\x.x x x) (\x.x x x)"), fuel=50)
    assert res.status == disc.UNKNOWN and not res


@pytest.mark.parametrize("n", range(1, 6))
def test_turing_style_members_are_their_own_simple_reducts(n):
    t = App(ENV[f"Y{n}"], X)
    r = disc.find_simple_reduct(t)
    assert r.term == t and r.path == ()


def test_curry_applied_needs_no_steps():
    t = App(fpc.bohm_fpc(0), X)
    assert disc.find_simple_reduct(t).term == t


def test_scott_simple_reduct():
    r = disc.find_simple_reduct(P("U2 x"))
    assert r.term == P("theta theta I x")
    assert r.replays()


def test_normal_form_is_its_own_simple_reduct():
    t = P(r"\a b.b a")
    r = disc.find_simple_reduct(t)
    assert r.term == t and r.path == ()


def test_closed_normalize_path_replays():
    t = P("Y0 (S S) I x")
    u, path = disc.closed_normalize(t)
    assert red.replay(t, path) == u


KNOWN = [
    ("Y0", "Y1", "count", disc.Inconvertible, "simple-simple"),
    ("Y2", "U2", "atomic", disc.Inconvertible, "atomic-simple-simple"),
    ("Y2", "U2", "count", disc.Inconclusive, None),
    ("Y0", "B Y0 I", "count", disc.Convertible, None),
    ("Y1", "B Y0 S I", "count", disc.Convertible, None),
    ("x", "y", "count", disc.Inconvertible, "bt-difference"),
    (r"\a.a a", r"\a.a (a a)", "count", disc.Inconvertible, "bt-difference"),
]


@pytest.mark.parametrize("a,b,mode,kind,method", KNOWN)
def test_known_verdicts_and_their_certificates(a, b, mode, kind, method):
    cfg = disc.Config(mode=mode)
    v = disc.discriminate(P(a), P(b), cfg)
    assert isinstance(v, kind)
    if method:
        assert v.method == method
    assert disc.verify(P(a), P(b), v, cfg)


SLOW = r"(\a p q r.f (a a p q r) (a a p q r))"


def test_one_sided_method():
    # a simple term ticking 4 per node against a non-simple one ticking 3
    m = parse(f"{SLOW} {SLOW} c c c")
    a, _ = fpc.plotkin_terms(ENV["Y1"])
    assert disc.is_simple_term(m).status == disc.SIMPLE
    v = disc.discriminate(m, a)
    assert v.method == "simple-vs-reduct" and v.certificate.relation == ">"
    assert disc.verify(m, a, v)
    flipped = disc.discriminate(a, m)
    assert flipped.method == "simple-vs-reduct" and flipped.certificate.relation == "<"
    assert disc.verify(a, m, flipped)


def test_plotkin_pair_is_inconclusive():
    a, b = fpc.plotkin_terms(ENV["Y1"])
    v = disc.discriminate(a, b)
    assert isinstance(v, disc.Inconclusive)


def test_tampered_certificate_is_rejected():
    cfg = disc.Config()
    v = disc.discriminate(P("Y0"), P("Y1"), cfg)
    c = v.certificate
    forged = disc.Inconvertible(v.method, disc.Certificate(c.reduct_m, c.reduct_m, c.relation, c.mode))
    assert not disc.verify(P("Y0"), P("Y1"), forged, cfg)
    wrong_path = disc.Reduct(c.reduct_m.source, c.reduct_m.term, ((1,),))
    forged = disc.Inconvertible(v.method, disc.Certificate(wrong_path, c.reduct_n, c.relation, c.mode))
    assert not disc.verify(P("Y0"), P("Y1"), forged, cfg)
    fake = disc.Convertible(P("Y0"))
    assert not disc.verify(P("Y0"), P("Y1"), fake, cfg)


def test_verdict_json_shape():
    v = disc.discriminate(P("Y0"), P("Y1"))
    doc = disc.verdict_to_json(v)
    assert set(doc) >= {"verdict", "method", "certificate", "budgets"}
    assert set(doc["certificate"]) >= {"reductM", "reductN", "cycleNodes", "witnessPositions", "relation"}
    assert doc["verdict"] == "inconvertible"
    json.dumps(doc)


def test_config_validation():
    with pytest.raises(ValueError):
        disc.Config(depth=0)
    with pytest.raises(ValueError):
        disc.Config(prefix_cut=-1)
    with pytest.raises(ValueError):
        disc.Config(mode="fast")


@pytest.mark.parametrize("fuel", [100, 1000, 10_000])
@pytest.mark.parametrize("a,b", [("Y0", "Y1"), ("Y0", "B Y0 I"), ("Y2", "U2"), ("U1", "Y1")])
def test_never_both_verdicts_under_budget_sweep(fuel, a, b):
    seen = set()
    for mode in ("count", "atomic"):
        for budget in (50, 2000):
            v = disc.discriminate(P(a), P(b), disc.Config(fuel=fuel, mode=mode, budget=budget))
            seen.add(v.verdict)
            assert disc.verify(P(a), P(b), v, disc.Config(fuel=fuel, mode=mode))
    assert not {"convertible", "inconvertible"} <= seen


SIMPLE_SEEDS = [App(fpc.bohm_fpc(n), X) for n in (0, 1, 2, 3)] + [App(fpc.scott_fpc(n), X) for n in (0, 2, 3)]


@settings(max_examples=40)
@given(st.sampled_from(range(len(SIMPLE_SEEDS))), st.randoms(use_true_random=False), st.integers(1, 6))
def test_simple_clocks_are_reduction_invariant(i, rng, steps):
    r = disc.find_simple_reduct(SIMPLE_SEEDS[i])
    m = r.term
    n = m
    for _ in range(steps):
        nxt = red.random_step(n, rng)
        if nxt is None:
            break
        n = nxt[0]
    gm, gn = tr.rational_expand(m), tr.rational_expand(n)
    assert gm is not None and gn is not None
    assert tr.rel_eventually(gm, gn, "=").holds


@settings(max_examples=60)
@given(st.sampled_from(["Y0 x", "Y1 x", "Y2 x", "U2 x", "U3 x", "B Y0 S S x"]), st.randoms(use_true_random=False))
def test_reduction_never_slows_clocks(text, rng):
    t = P(text)
    for _ in range(rng.randrange(4)):
        t = red.random_step(t, rng)[0]
    u, _ = red.random_step(t, rng)
    a, b = tr.clocked_bt(t, 4, 2000), tr.clocked_bt(u, 4, 2000)
    assert not tr.rel_all(a, b, ">=").fails


def test_pretty_of_reducts_is_parseable():
    v = disc.discriminate(P("Y2"), P("U2"), disc.Config(mode="atomic"))
    cert = disc.verdict_to_json(v)["certificate"]
    assert parse(cert["reductM"]) == v.certificate.reduct_m.term
    assert pretty(parse(cert["reductN"])) == pretty(v.certificate.reduct_n.term)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_scott_members_reach_theta_theta(n):
    r = disc.find_simple_reduct(App(ENV[f"U{n}"], X))
    assert r.replays()
    h, args = spine(r.term)
    assert h == Lam(ENV["theta"].body) and args[0] == ENV["theta"]
    assert args[-2:] == [ENV["I"], X]
