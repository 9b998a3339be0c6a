import json

import pytest
from hypothesis import given

import oracle
from conftest import closed_or_open_terms
from clocklam import fpc
from clocklam import trees as tr
from clocklam.terms import App, Free, parse, parse_position, pretty

ENV = fpc.catalog_env()


def P(text, **extra):
    return parse(text, {**ENV, **{k: parse(v, ENV) for k, v in extra.items()}})


def spine_annotations(tree):
    out = []
    while isinstance(tree, tr.BTNode) and tree.children:
        out.append(tree.annotation)
        tree = tree.children[-1]
    return out


def test_curry_and_turing_clocks():
    assert tr.render_tree(tr.clocked_bt(P("Y0 f"), 4)) == "[2]f([1]f([1]f([1]f(?))))"
    assert tr.render_tree(tr.clocked_bt(P("Y1 f"), 4)) == "[2]f([2]f([2]f([2]f(?))))"


@pytest.mark.parametrize("name", ["Y0", "Y1", "Y2", "Y3", "U2", "U3"])
def test_spine_clocks_match_named_oracle(name):
    t = App(ENV[name], Free("x"))
    ours = spine_annotations(tr.clocked_bt(t, 6))
    theirs = oracle.bt_clocks_along_spine(oracle.read(pretty(t)), "x", 6)
    assert ours == theirs[: len(ours)] and len(ours) >= 5


def test_atomic_annotations():
    xi = ENV["xi"]
    t = App(App(App(xi, xi), ENV["delta"]), Free("x"))
    tree = tr.clocked_bt(t, 4, mode="atomic")
    anns = spine_annotations(tree)
    want = tuple(parse_position(p) for p in ("11", "1", "1", "ε"))
    assert anns[1:] == [want] * (len(anns) - 1)
    assert tr.format_annotation(want) == "[⟨11,1,1,ε⟩]"
    assert tr.format_annotation(want, "ascii") == "[<11,1,1,e>]"


def test_counts_of_atomic_tree_equal_count_tree():
    t = P("U3 x")
    assert tr.counts(tr.clocked_bt(t, 5, mode="atomic")) == tr.clocked_bt(t, 5)


@given(closed_or_open_terms)
def test_atomic_and_count_trees_cohere(t):
    count = tr.clocked_bt(t, 3, fuel=40)
    atomic = tr.clocked_bt(t, 3, fuel=40, mode="atomic")
    assert tr.counts(atomic) == count
    assert tr.deannotate(atomic) == tr.deannotate(count)


def test_bot_only_on_certified_cycles():
    omega = parse(r"(\x.x x) (\x.x x)")
    assert tr.clocked_bt(omega) is tr.BOT
    grow = parse(r"(\x.x x x) (\x.x x x)")
    node = tr.clocked_bt(grow, fuel=30)
    assert isinstance(node, tr.Unknown) and node.reason == "fuel"


def test_depth_cut_gives_unknown():
    tree = tr.clocked_bt(P("Y0 f"), 1)
    assert isinstance(tree.children[0], tr.Unknown)
    assert tree.children[0].reason == "depth"


def test_levy_longo_examples():
    a = P("a a", a=r"\x y.x x")
    b = P("b b", b=r"\x y z.x x")
    assert tr.render_tree(tr.clocked_llt(a, 4)) == "[1]λy.[1]λy1.[1]λy2.[1]λy3.?"
    assert tr.render_tree(tr.clocked_llt(b, 4)) == "[1]λy.[0]λz.[1]λy1.[0]λz1.?"


def test_berarducci_trees():
    assert tr.render_tree(tr.clocked_bet(parse("x"))) == "[0]x"
    omega_z = parse(r"(\x.x x) (\x.x x) z")
    tree = tr.clocked_bet(omega_z, 3)
    assert isinstance(tree, tr.BeAppNode)
    assert tree.left is tr.BOT


def test_bt_positions_are_term_positions():
    t = parse(r"\a b.a (f b) c")
    tree = tr.clocked_bt(t, 3)
    offs = [off for off, _ in tr.edges(tree)]
    # children of λab.a M N sit at 00 1 2 and 00 2
    assert offs == [(0, 0, 1, 2), (0, 0, 2)]
    assert tr.subtree_at(tree, (0, 0, 2)).head == Free("c")


@given(closed_or_open_terms)
def test_rational_unfolding_equals_truncated_tree(t):
    rt = tr.rational_expand(t, 40, max_nodes=64)
    if rt is not None:
        assert rt.unfold(4) == tr.clocked_bt(t, 4, 40)


def test_rational_tree_of_curry():
    rt = tr.rational_expand(P("Y0 f"))
    assert len(rt) == 2
    assert rt.cycle_annotations() == [1]
    assert tr.rational_expand(P("Y0 f"), fuel=1) is None


def test_relations_on_rational_trees():
    y0, y1 = tr.rational_expand(P("Y0 f")), tr.rational_expand(P("Y1 f"))
    assert tr.rel_infinitely_often(y0, y1, "!=").holds
    assert tr.rel_infinitely_often(y0, y1, "<").holds
    assert tr.rel_eventually(y1, y0, ">").holds
    assert tr.rel_eventually(y0, y1, "=").fails
    res = tr.rel_all(y0, y0, "=")
    assert res.holds and res.cycle


def test_eventually_reports_the_level():
    # Y0 f and (λy.Y0 y) f agree from level 1 on
    a, b = tr.rational_expand(P("Y0 f")), tr.rational_expand(P(r"(\y.Y0 y) f"))
    res = tr.rel_eventually(a, b, "=")
    assert res.holds and res.depth == 1
    assert tr.rel_eventually(a, b, "=", prefix_cut=1).holds
    assert tr.rel_eventually(a, b, "=", prefix_cut=0).fails


def test_relations_on_finite_trees():
    a, b = tr.clocked_bt(P("Y0 f"), 5), tr.clocked_bt(P("Y1 f"), 5)
    assert tr.rel_all(a, b, "<=").status is tr.Tri.UNKNOWN
    assert tr.rel_all(b, a, "<=").fails
    assert tr.rel_eventually(a, b, "=").status is tr.Tri.UNKNOWN
    assert tr.rel_at(a, b, (), "=") is tr.Tri.HOLDS
    assert tr.rel_at(a, b, (2,), "<") is tr.Tri.HOLDS


def test_mixing_tree_kinds_is_an_error():
    with pytest.raises(TypeError):
        tr.rel_all(tr.rational_expand(P("Y0 f")), tr.clocked_bt(P("Y0 f")), "=")


def test_subsequence_order():
    assert tr.subsequence_leq(((1,), ()), ((1, 1), (1,), ()))
    assert not tr.subsequence_leq(((1,), (1,)), ((1,),))
    assert tr.compare(((1,),), ((1,), ()), "<")
    assert not tr.compare(((1,),), ((1,),), "<")


def test_json_schema():
    doc = tr.tree_to_json(tr.clocked_bt(P("Y0 f"), 2))
    assert set(doc) == {"kind", "annotation", "binders", "head", "children"}
    assert doc["annotation"] == 2 and doc["head"] == "f"
    atomic = tr.tree_to_json(tr.clocked_bt(P("Y1 f"), 1, mode="atomic"))
    assert atomic["annotation"] == ["1", ""]
    json.dumps(doc)


def test_dot_output():
    dot = tr.tree_to_dot(tr.clocked_bt(P("Y0 f"), 2))
    assert dot.startswith("digraph") and "style=dashed" in dot
    rdot = tr.rational_to_dot(tr.rational_expand(P("Y0 f")))
    assert "style=dashed" in rdot


def test_plotkin_tree_clocks():
    a, b = fpc.plotkin_terms(ENV["Y1"])
    ta, tb = tr.clocked_bt(a, 3), tr.clocked_bt(b, 3)

    def walk(t, f, d=0, side=None):
        if isinstance(t, tr.BTNode):
            f(t, side)
            for i, c in enumerate(t.children):
                walk(c, f, d + 1, i)

    walk(ta, lambda n, s: _assert(n.annotation == 3))
    walk(tb, lambda n, s: _assert(n.annotation == (3 if s == 1 else 6)))


def _assert(cond):
    assert cond
