"""Clocked Böhm, Lévy–Longo and Berarducci trees.

A clocked tree is built layer by layer: each subterm is head-reduced to the
relevant kind of stable form, and the resulting node is annotated either with
the number of head steps that took (``mode="count"``) or with the list of
their positions (``mode="atomic"``).

Finite trees are truncated at a depth; the cut-off (and any node whose
reduction ran out of fuel) becomes ``Unknown``, which is never confused with
``BOT``: ``BOT`` is only produced when the reduction was certified to cycle.

``rational_expand`` memoizes expansion states up to alpha-equality.  When all
states recur the infinite tree is represented exactly by a finite graph, and
"eventually" / "infinitely often" comparisons become decidable on the product
of two such graphs.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Union

from . import reduction as red
from .terms import (
    App,
    Free,
    Lam,
    Position,
    Term,
    Var,
    format_position,
    fresh_name,
    spine,
    strip_lambdas,
)

DEFAULT_DEPTH = 16
FLAVORS = ("bt", "llt", "bet")
MODES = ("count", "atomic")

Annotation = Union[int, tuple]


class Names(tuple):
    """Binder display hints.  Only the number of binders is significant."""

    def __eq__(self, other):
        return isinstance(other, tuple) and len(self) == len(other)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(len(self))


@dataclass(frozen=True)
class Bot:
    def __repr__(self):
        return "BOT"


BOT = Bot()


@dataclass(frozen=True)
class Unknown:
    reason: str = field(default="depth", compare=False)


@dataclass(frozen=True)
class Ref:
    """Edge to a node of a RationalTree."""

    id: int


@dataclass(frozen=True)
class BTNode:
    annotation: Annotation | None
    binders: Names
    head: Term
    children: tuple = ()


@dataclass(frozen=True)
class LLAbsNode:
    annotation: Annotation | None
    binder: str = field(compare=False)
    child: object = None


@dataclass(frozen=True)
class LLHeadNode:
    annotation: Annotation | None
    head: Term
    children: tuple = ()


@dataclass(frozen=True)
class BeVarNode:
    annotation: Annotation | None
    name: Term


@dataclass(frozen=True)
class BeAbsNode:
    annotation: Annotation | None
    binder: str = field(compare=False)
    child: object = None


@dataclass(frozen=True)
class BeAppNode:
    annotation: Annotation | None
    left: object = None
    right: object = None


ClockedTree = Union[Bot, Unknown, BTNode, LLAbsNode, LLHeadNode, BeVarNode, BeAbsNode, BeAppNode]


# ---------------------------------------------------------------------------
# Uniform node access


def edges(node) -> list[tuple[Position, object]]:
    """Children of a node with their position offsets inside the node."""
    match node:
        case BTNode(binders=bs, children=cs):
            m = len(cs)
            pre = (0,) * len(bs)
            return [(pre + (1,) * (m - 1 - i) + (2,), c) for i, c in enumerate(cs)]
        case LLHeadNode(children=cs):
            m = len(cs)
            return [((1,) * (m - 1 - i) + (2,), c) for i, c in enumerate(cs)]
        case LLAbsNode(child=c) | BeAbsNode(child=c):
            return [((0,), c)]
        case BeAppNode(left=l, right=r):
            return [((1,), l), ((2,), r)]
    return []


def shape(node):
    """Structural label of a node, ignoring annotation and children."""
    match node:
        case BTNode(binders=bs, head=h, children=cs):
            return ("bt", len(bs), h, len(cs))
        case LLHeadNode(head=h, children=cs):
            return ("ll-head", h, len(cs))
        case LLAbsNode():
            return ("ll-abs",)
        case BeVarNode(name=h):
            return ("be-var", h)
        case BeAbsNode():
            return ("be-abs",)
        case BeAppNode():
            return ("be-app",)
        case Bot():
            return ("bot",)
    raise TypeError(f"no shape for {node!r}")


def annotation_of(node):
    return getattr(node, "annotation", None)


def internal_positions(node) -> set[Position]:
    """Positions of the node's own symbols (not inside any child)."""
    match node:
        case BTNode(binders=bs, children=cs):
            n, m = len(bs), len(cs)
            return {(0,) * j for j in range(n + 1)} | {(0,) * n + (1,) * j for j in range(m + 1)}
        case LLHeadNode(children=cs):
            return {(1,) * j for j in range(len(cs) + 1)}
    return {()}


def _with_children(node, children):
    match node:
        case BTNode():
            return BTNode(node.annotation, node.binders, node.head, tuple(children))
        case LLHeadNode():
            return LLHeadNode(node.annotation, node.head, tuple(children))
        case LLAbsNode():
            return LLAbsNode(node.annotation, node.binder, children[0])
        case BeAbsNode():
            return BeAbsNode(node.annotation, node.binder, children[0])
        case BeAppNode():
            return BeAppNode(node.annotation, children[0], children[1])
    return node


def _with_annotation(node, ann):
    match node:
        case BTNode() | LLHeadNode() | LLAbsNode() | BeVarNode() | BeAbsNode() | BeAppNode():
            return replace(node, annotation=ann)
    return node


# ---------------------------------------------------------------------------
# One layer of expansion


def _annotation(trace, mode: str) -> Annotation:
    if mode == "atomic":
        return tuple(s.position for s in trace)
    if mode == "count":
        return len(trace)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Layer:
    """A node with its children still unexpanded (``children`` are terms)."""

    shell: object
    children: tuple
    outcome: object


def expand_layer(t: Term, flavor: str = "bt", fuel: int = red.DEFAULT_FUEL, mode: str = "count"):
    """Expand the root of the clocked tree of ``t``.

    Returns ``BOT``, an ``Unknown`` (fuel exhausted) or a ``Layer``.
    """
    if flavor == "bt":
        out = red.reduce_to_hnf(t, fuel)
    elif flavor == "llt":
        out = red.reduce_to_whnf(t, fuel)
    elif flavor == "bet":
        out = red.reduce_to_root_stable(t, fuel)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    if isinstance(out, red.Cycle):
        return BOT
    if isinstance(out, red.FuelExhausted):
        return Unknown("fuel")
    ann = _annotation(out.trace, mode)
    form = out.form
    if flavor == "bt":
        hints, body = strip_lambdas(form)
        h, args = spine(body)
        return Layer(BTNode(ann, Names(hints), h), tuple(args), out)
    if flavor == "llt":
        if isinstance(form, Lam):
            return Layer(LLAbsNode(ann, form.hint), (form.body,), out)
        h, args = spine(form)
        return Layer(LLHeadNode(ann, h), tuple(args), out)
    if isinstance(form, Lam):
        return Layer(BeAbsNode(ann, form.hint), (form.body,), out)
    if isinstance(form, App):
        return Layer(BeAppNode(ann), (form.fun, form.arg), out)
    return Layer(BeVarNode(ann, form), (), out)


def clocked_tree(
    t: Term,
    flavor: str = "bt",
    depth: int = DEFAULT_DEPTH,
    fuel: int = red.DEFAULT_FUEL,
    mode: str = "count",
):
    """Clocked tree of ``t`` truncated after ``depth`` node levels.

    ``fuel`` bounds the head reduction of each node separately.  Subtrees
    of alpha-equal subterms at the same remaining depth are shared.
    """
    memo: dict = {}

    def build(u: Term, d: int):
        if d <= 0:
            return Unknown("depth")
        key = (u, d)
        if key in memo:
            return memo[key]
        layer = expand_layer(u, flavor, fuel, mode)
        if isinstance(layer, Layer):
            node = _with_children(layer.shell, [build(c, d - 1) for c in layer.children])
        else:
            node = layer
        memo[key] = node
        return node

    return build(t, depth)


def clocked_bt(t: Term, depth: int = DEFAULT_DEPTH, fuel: int = red.DEFAULT_FUEL, mode: str = "count"):
    return clocked_tree(t, "bt", depth, fuel, mode)


def clocked_llt(t: Term, depth: int = DEFAULT_DEPTH, fuel: int = red.DEFAULT_FUEL, mode: str = "count"):
    return clocked_tree(t, "llt", depth, fuel, mode)


def clocked_bet(t: Term, depth: int = DEFAULT_DEPTH, fuel: int = red.DEFAULT_FUEL, mode: str = "count"):
    return clocked_tree(t, "bet", depth, fuel, mode)


def deannotate(tree):
    """Drop every annotation; structure is preserved."""
    return map_annotations(tree, lambda a: None)


def counts(tree):
    """Project atomic annotations to their lengths."""
    return map_annotations(tree, lambda a: len(a) if isinstance(a, tuple) else a)


def map_annotations(tree, f):
    memo: dict = {}

    def go(node):
        if isinstance(node, (Bot, Unknown, Ref)):
            return node
        if id(node) in memo:
            return memo[id(node)]
        new = _with_children(node, [go(c) for _, c in edges(node)])
        new = _with_annotation(new, f(node.annotation))
        memo[id(node)] = new
        return new

    return go(tree)


def contains_unknown(tree) -> bool:
    seen = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, Unknown):
            return True
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.extend(c for _, c in edges(node))
    return False


def subtree_at(tree, p: Position):
    """Node rooted at tree position ``p``; None if ``p`` is not a node root."""
    node = tree
    while p:
        for off, c in edges(node):
            if p[: len(off)] == off:
                node, p = c, p[len(off):]
                break
        else:
            return None
    return node


# ---------------------------------------------------------------------------
# Rational trees


@dataclass(frozen=True)
class RationalTree:
    """Finite graph whose unfolding is an infinite clocked tree.

    ``nodes[i]`` is a node whose children are ``Ref`` edges; ``states[i]`` is
    the (alpha-normal) term that node ``i`` was expanded from.
    """

    nodes: tuple
    states: tuple
    root: int = 0
    flavor: str = "bt"
    mode: str = "count"

    def __len__(self):
        return len(self.nodes)

    def children(self, i: int) -> list[tuple[Position, int]]:
        return [(off, ref.id) for off, ref in edges(self.nodes[i])]

    def unfold(self, depth: int):
        memo: dict = {}

        def go(i: int, d: int):
            if d <= 0:
                return Unknown("depth")
            if (i, d) in memo:
                return memo[i, d]
            node = self.nodes[i]
            node = _with_children(node, [go(ref.id, d - 1) for _, ref in edges(node)])
            memo[i, d] = node
            return node

        return go(self.root, depth)

    def cycle_annotations(self) -> list:
        """Annotations of the nodes that lie on a cycle, in node order."""
        on_cycle = _cyclic_nodes({i: [j for _, j in self.children(i)] for i in range(len(self))})
        return [annotation_of(self.nodes[i]) for i in sorted(on_cycle)]


def rational_expand(
    t: Term,
    fuel: int = red.DEFAULT_FUEL,
    flavor: str = "bt",
    mode: str = "count",
    max_nodes: int = 512,
) -> RationalTree | None:
    """Expand the clocked tree of ``t`` into a finite graph, or return None
    when some node runs out of fuel or more than ``max_nodes`` distinct
    states appear."""
    ids: dict = {t: 0}
    states = [t]
    nodes: list = [None]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        layer = expand_layer(states[i], flavor, fuel, mode)
        if isinstance(layer, Unknown):
            return None
        if layer is BOT:
            nodes[i] = BOT
            continue
        refs = []
        for c in layer.children:
            j = ids.get(c)
            if j is None:
                if len(states) >= max_nodes:
                    return None
                j = ids[c] = len(states)
                states.append(c)
                nodes.append(None)
                queue.append(j)
            refs.append(Ref(j))
        nodes[i] = _with_children(layer.shell, refs)
    return RationalTree(tuple(nodes), tuple(states), 0, flavor, mode)


def _reachable(succ: dict, starts) -> set:
    seen = set(starts)
    stack = list(starts)
    while stack:
        v = stack.pop()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _cyclic_nodes(succ: dict) -> set:
    """Nodes lying on some cycle (Tarjan's SCCs, iteratively)."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    result: set = set()
    counter = 0
    for root in succ:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in succ.get(v, ()):
                    result.update(comp)
    return result


# ---------------------------------------------------------------------------
# Relations on annotations


def subsequence_leq(a, b) -> bool:
    """True iff ``a`` embeds order-preservingly into ``b``."""
    it = iter(b)
    return all(any(x == y for y in it) for x in a)


def compare(a, b, rel: str) -> bool:
    if isinstance(a, tuple) != isinstance(b, tuple):
        raise TypeError("cannot compare count and atomic annotations")
    if rel == "=":
        return a == b
    if rel == "!=":
        return a != b
    if isinstance(a, tuple):
        if rel == ">=":
            return subsequence_leq(b, a)
        if rel == "<=":
            return subsequence_leq(a, b)
        if rel == ">":
            return a != b and subsequence_leq(b, a)
        if rel == "<":
            return a != b and subsequence_leq(a, b)
    else:
        if rel == ">=":
            return a >= b
        if rel == "<=":
            return a <= b
        if rel == ">":
            return a > b
        if rel == "<":
            return a < b
    raise ValueError(f"unknown relation {rel!r}")


RELATIONS = ("=", "!=", "<", "<=", ">", ">=")


class Tri(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RelResult:
    status: Tri
    relation: str
    depth: int | None = None
    witness: Position | None = None
    cycle: tuple = ()
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Tri.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Tri.FAILS

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "relation": self.relation,
            "depth": self.depth,
            "witness": None if self.witness is None else format_position(self.witness, ""),
            "cycle": [list(p) for p in self.cycle],
            "detail": self.detail,
        }


def rel_at(t1, t2, p: Position, rel: str) -> Tri:
    """Compare the two trees at tree position ``p``."""
    a, b = t1, t2
    while True:
        if isinstance(a, Unknown) or isinstance(b, Unknown):
            return Tri.UNKNOWN
        if shape(a) != shape(b):
            return Tri.FAILS
        if not p:
            if isinstance(a, Bot):
                return Tri.HOLDS
            return Tri.HOLDS if compare(a.annotation, b.annotation, rel) else Tri.FAILS
        for (off, ca), (_, cb) in zip(edges(a), edges(b)):
            if p[: len(off)] == off:
                a, b, p = ca, cb, p[len(off):]
                break
        else:
            # a symbol of the node itself: unannotated on both sides
            return Tri.HOLDS if p in internal_positions(a) else Tri.FAILS


def _joint_walk(t1, t2):
    """Breadth-first pairs of corresponding nodes of two finite trees."""
    queue = deque([((), 0, t1, t2)])
    while queue:
        pos, d, a, b = queue.popleft()
        if isinstance(a, Unknown) or isinstance(b, Unknown):
            yield "unknown", pos, d, a, b
            continue
        if shape(a) != shape(b):
            yield "mismatch", pos, d, a, b
            continue
        yield "pair", pos, d, a, b
        for (off, ca), (_, cb) in zip(edges(a), edges(b)):
            queue.append((pos + off, d + 1, ca, cb))


def _finite_scan(t1, t2, rel):
    """Returns (mismatch, violations, unknown, maxdepth) for two finite trees."""
    violations = []
    unknown = False
    maxdepth = 0
    for kind, pos, d, a, b in _joint_walk(t1, t2):
        maxdepth = max(maxdepth, d)
        if kind == "unknown":
            unknown = True
        elif kind == "mismatch":
            return (pos, d), violations, unknown, maxdepth
        elif not isinstance(a, Bot) and not compare(a.annotation, b.annotation, rel):
            violations.append((pos, d))
    return None, violations, unknown, maxdepth


@dataclass
class _Product:
    succ: dict
    pos: dict
    depth: dict
    mismatch: tuple | None
    annotated: dict


def _product(r1: RationalTree, r2: RationalTree) -> _Product:
    start = (r1.root, r2.root)
    succ: dict = {}
    pos = {start: ()}
    depth = {start: 0}
    annotated: dict = {}
    queue = deque([start])
    mismatch = None
    while queue:
        v = queue.popleft()
        a, b = r1.nodes[v[0]], r2.nodes[v[1]]
        if shape(a) != shape(b):
            mismatch = mismatch or v
            succ[v] = []
            continue
        if not isinstance(a, Bot):
            annotated[v] = (a.annotation, b.annotation)
        nxt = []
        for (off, ra), (_, rb) in zip(edges(a), edges(b)):
            w = (ra.id, rb.id)
            nxt.append(w)
            if w not in pos:
                pos[w] = pos[v] + off
                depth[w] = depth[v] + 1
                queue.append(w)
        succ[v] = nxt
    return _Product(succ, pos, depth, mismatch, annotated)


def _both_rational(t1, t2) -> bool:
    r1, r2 = isinstance(t1, RationalTree), isinstance(t2, RationalTree)
    if r1 != r2:
        raise TypeError("compare two RationalTrees or two finite trees, not a mix")
    return r1


def rel_all(t1, t2, rel: str) -> RelResult:
    """``rel`` at every annotated position (and equal structure throughout)."""
    if _both_rational(t1, t2):
        prod = _product(t1, t2)
        if prod.mismatch:
            return RelResult(Tri.FAILS, rel, witness=prod.pos[prod.mismatch], detail="structure differs")
        for v in sorted(prod.annotated, key=lambda v: prod.depth[v]):
            a, b = prod.annotated[v]
            if not compare(a, b, rel):
                return RelResult(Tri.FAILS, rel, depth=prod.depth[v], witness=prod.pos[v])
        return RelResult(Tri.HOLDS, rel, cycle=tuple(sorted(_cyclic_nodes(prod.succ))))
    mismatch, violations, unknown, maxdepth = _finite_scan(t1, t2, rel)
    if mismatch:
        return RelResult(Tri.FAILS, rel, depth=mismatch[1], witness=mismatch[0], detail="structure differs")
    if violations:
        pos, d = violations[0]
        return RelResult(Tri.FAILS, rel, depth=d, witness=pos)
    return RelResult(Tri.UNKNOWN if unknown else Tri.HOLDS, rel, depth=maxdepth)


def _longest_depth(prod: _Product, targets) -> int:
    """Longest root path (in node levels) to any of ``targets``; the
    ancestors of the targets must form a DAG."""
    preds: dict = {}
    for v, ws in prod.succ.items():
        for w in ws:
            preds.setdefault(w, []).append(v)
    memo: dict = {}

    def longest(v):
        if v in memo:
            return memo[v]
        memo[v] = 0
        ps = preds.get(v, [])
        memo[v] = max((longest(u) + 1 for u in ps), default=0)
        return memo[v]

    return max((longest(v) for v in targets), default=-1)


def rel_eventually(t1, t2, rel: str, prefix_cut: int | None = None) -> RelResult:
    """``rel`` holds at all node levels from some level on.

    On RationalTrees this is decided exactly; the returned ``depth`` is the
    least level from which the relation holds.  With ``prefix_cut`` the
    relation must hold from that level on.  On finite truncations a
    violation at or below ``prefix_cut`` refutes; otherwise the answer is
    UNKNOWN unless the trees are completely resolved (hence finite).
    """
    if _both_rational(t1, t2):
        prod = _product(t1, t2)
        if prod.mismatch:
            return RelResult(Tri.FAILS, rel, witness=prod.pos[prod.mismatch], detail="structure differs")
        cyclic = _cyclic_nodes(prod.succ)
        recurrent = _reachable(prod.succ, cyclic)
        bad = [v for v, (a, b) in prod.annotated.items() if not compare(a, b, rel)]
        for v in bad:
            if v in recurrent:
                return RelResult(Tri.FAILS, rel, depth=prod.depth[v], witness=prod.pos[v],
                                 cycle=tuple(sorted(cyclic)), detail="violation recurs")
        ell = _longest_depth(prod, bad) + 1
        if prefix_cut is not None and ell > prefix_cut:
            v = max(bad, key=lambda v: prod.depth[v])
            return RelResult(Tri.FAILS, rel, depth=ell, witness=prod.pos[v], detail="violation below cut")
        return RelResult(Tri.HOLDS, rel, depth=ell, cycle=tuple(sorted(cyclic)))
    mismatch, violations, unknown, maxdepth = _finite_scan(t1, t2, rel)
    if mismatch:
        return RelResult(Tri.FAILS, rel, depth=mismatch[1], witness=mismatch[0], detail="structure differs")
    cut = prefix_cut or 0
    deep = [(p, d) for p, d in violations if d >= cut]
    if prefix_cut is not None and deep:
        return RelResult(Tri.FAILS, rel, depth=deep[0][1], witness=deep[0][0])
    if not unknown:
        ell = max((d for _, d in violations), default=-1) + 1
        return RelResult(Tri.HOLDS, rel, depth=ell, detail="finite tree")
    return RelResult(Tri.UNKNOWN, rel, depth=maxdepth)


def rel_infinitely_often(t1, t2, rel: str) -> RelResult:
    """``rel`` holds at infinitely many annotated positions.

    Decided on RationalTrees: some product node satisfying ``rel`` must be
    reachable from a cycle of the product graph.  The certificate lists the
    cyclic product nodes and the position of one witness.
    """
    if _both_rational(t1, t2):
        prod = _product(t1, t2)
        if prod.mismatch:
            return RelResult(Tri.FAILS, rel, witness=prod.pos[prod.mismatch], detail="structure differs")
        cyclic = _cyclic_nodes(prod.succ)
        recurrent = _reachable(prod.succ, cyclic)
        good = [v for v, (a, b) in prod.annotated.items() if v in recurrent and compare(a, b, rel)]
        if good:
            v = min(good, key=lambda v: (prod.depth[v], v))
            return RelResult(Tri.HOLDS, rel, depth=prod.depth[v], witness=prod.pos[v], cycle=tuple(sorted(cyclic)))
        return RelResult(Tri.FAILS, rel, cycle=tuple(sorted(cyclic)))
    mismatch, _, unknown, maxdepth = _finite_scan(t1, t2, rel)
    if mismatch:
        return RelResult(Tri.FAILS, rel, depth=mismatch[1], witness=mismatch[0], detail="structure differs")
    if not unknown:
        return RelResult(Tri.FAILS, rel, depth=maxdepth, detail="finite tree")
    return RelResult(Tri.UNKNOWN, rel, depth=maxdepth)


# ---------------------------------------------------------------------------
# Rendering


def format_annotation(ann, style: str = "unicode") -> str:
    if ann is None:
        return ""
    if isinstance(ann, tuple):
        eps = "ε" if style == "unicode" else "e"
        inner = ",".join(format_position(p, eps) for p in ann)
        return f"[⟨{inner}⟩]" if style == "unicode" else f"[<{inner}>]"
    return f"[{ann}]"


def _free_names(tree) -> set[str]:
    names = set()
    seen = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        h = getattr(node, "head", None) or getattr(node, "name", None)
        if isinstance(h, Free):
            names.add(h.name)
        stack.extend(c for _, c in edges(node))
    return names


def _var_name(h: Term, scope: list[str]) -> str:
    if isinstance(h, Var):
        return scope[h.index] if h.index < len(scope) else f"#{h.index - len(scope)}"
    return h.name


def render_tree(tree, style: str = "unicode") -> str:
    """One-line rendering, e.g. ``[2]f([1]f(?))``."""
    lam = "λ" if style == "unicode" else "\\"
    bot = "⊥" if style == "unicode" else "_|_"
    avoid = _free_names(tree)

    def bind(hints, scope):
        names = []
        for h in hints:
            name = fresh_name(h, avoid | set(scope) | set(names))
            names.append(name)
        return names, list(reversed(names)) + scope

    def go(node, scope) -> str:
        if isinstance(node, Bot):
            return bot
        if isinstance(node, Unknown):
            return "?"
        ann = format_annotation(node.annotation, style)
        match node:
            case BTNode(binders=bs, head=h, children=cs):
                names, inner = bind(bs, scope)
                prefix = f"{lam}{' '.join(names)}." if names else ""
                return ann + prefix + _var_name(h, inner) + "".join(f"({go(c, inner)})" for c in cs)
            case LLHeadNode(head=h, children=cs):
                return ann + _var_name(h, scope) + "".join(f"({go(c, scope)})" for c in cs)
            case LLAbsNode(binder=b, child=c) | BeAbsNode(binder=b, child=c):
                names, inner = bind([b], scope)
                return f"{ann}{lam}{names[0]}.{go(c, inner)}"
            case BeVarNode(name=h):
                return ann + _var_name(h, scope)
            case BeAppNode(left=l, right=r):
                return f"{ann}@({go(l, scope)})({go(r, scope)})"
            case Ref(id=i):
                return f"#{i}"
        raise TypeError(node)

    return go(tree, [])


_KIND = {
    BTNode: "bt",
    LLAbsNode: "ll-abs",
    LLHeadNode: "ll-head",
    BeVarNode: "be-var",
    BeAbsNode: "be-abs",
    BeAppNode: "be-app",
}


def _annotation_json(ann):
    if isinstance(ann, tuple):
        return [format_position(p, "") for p in ann]
    return ann


def tree_to_json(tree) -> dict:
    """``{kind, annotation, binders, head, children}`` nested dictionaries."""
    avoid = _free_names(tree)

    def go(node, scope):
        if isinstance(node, Bot):
            return {"kind": "bot", "annotation": None, "binders": [], "head": None, "children": []}
        if isinstance(node, Unknown):
            return {"kind": "unknown", "annotation": None, "binders": [], "head": None,
                    "children": [], "reason": node.reason}
        if isinstance(node, Ref):
            return {"kind": "ref", "id": node.id}
        binders = []
        if isinstance(node, BTNode):
            binders = list(node.binders)
        elif isinstance(node, (LLAbsNode, BeAbsNode)):
            binders = [node.binder]
        names = []
        for h in binders:
            names.append(fresh_name(h, avoid | set(scope) | set(names)))
        inner = list(reversed(names)) + scope
        h = getattr(node, "head", None) or getattr(node, "name", None)
        return {
            "kind": _KIND[type(node)],
            "annotation": _annotation_json(node.annotation),
            "binders": names,
            "head": None if h is None else _var_name(h, inner),
            "children": [go(c, inner) for _, c in edges(node)],
        }

    return go(tree, [])


def rational_to_json(rt: RationalTree) -> dict:
    out = []
    for i, node in enumerate(rt.nodes):
        d = tree_to_json(node)
        d["id"] = i
        d["state"] = str(rt.states[i])
        out.append(d)
    return {"root": rt.root, "flavor": rt.flavor, "mode": rt.mode, "nodes": out}


def _dot_label(node, scope, style="unicode"):
    lam = "λ" if style == "unicode" else "\\\\"
    ann = format_annotation(node.annotation, style)
    match node:
        case BTNode(binders=bs, head=h):
            inner = list(reversed(bs)) + scope
            prefix = f"{lam}{' '.join(bs)}." if bs else ""
            return f"{ann} {prefix}{_var_name(h, inner)}", inner
        case LLHeadNode(head=h):
            return f"{ann} {_var_name(h, scope)}", scope
        case LLAbsNode(binder=b) | BeAbsNode(binder=b):
            return f"{ann} {lam}{b}", [b] + scope
        case BeVarNode(name=h):
            return f"{ann} {_var_name(h, scope)}", scope
        case BeAppNode():
            return f"{ann} @", scope
    raise TypeError(node)


def _dot_escape(s: str) -> str:
    return s.replace('"', '\\"')


def tree_to_dot(tree, name: str = "tree") -> str:
    """Graphviz source; Unknown leaves are dashed boxes, ⊥ is a plain box."""
    lines = [f"digraph {name} {{", "  node [shape=plaintext];"]
    counter = [0]

    def go(node, scope) -> str:
        nid = f"n{counter[0]}"
        counter[0] += 1
        if isinstance(node, Bot):
            lines.append(f'  {nid} [label="⊥", shape=box];')
            return nid
        if isinstance(node, Unknown):
            lines.append(f'  {nid} [label="?", shape=box, style=dashed];')
            return nid
        label, inner = _dot_label(node, scope)
        lines.append(f'  {nid} [label="{_dot_escape(label)}"];')
        for off, c in edges(node):
            cid = go(c, inner)
            lines.append(f'  {nid} -> {cid} [label="{format_position(off)}"];')
        return nid

    go(tree, [])
    lines.append("}")
    return "\n".join(lines)


def rational_to_dot(rt: RationalTree, name: str = "rational") -> str:
    """Graphviz source for a RationalTree; edges that close a cycle or
    return to an earlier node are dashed."""
    lines = [f"digraph {name} {{", "  node [shape=plaintext];"]
    for i, node in enumerate(rt.nodes):
        if isinstance(node, Bot):
            lines.append(f'  n{i} [label="⊥", shape=box];')
            continue
        label, _ = _dot_label(node, [])
        lines.append(f'  n{i} [label="{_dot_escape(label)}"];')
    for i in range(len(rt.nodes)):
        for off, j in rt.children(i):
            style = ", style=dashed" if j <= i else ""
            lines.append(f'  n{i} -> n{j} [label="{format_position(off)}"{style}];')
    lines.append("}")
    return "\n".join(lines)
