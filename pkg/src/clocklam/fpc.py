"""Combinators, fixed point combinator families and generation schemes,
bounded fpc checks, and facts about applicative combinations of the Owl δ.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from . import reduction as red
from . import trees as tr
from .terms import App, Free, Lam, Term, Var, abstract, app, parse, shift

_DEFINITIONS = {
    "I": r"\x.x",
    "K": r"\x y.x",
    "KI": r"\x y.y",
    "S": r"\x y z.x z (y z)",
    "B": r"\x y z.x (y z)",
    "delta": r"\a b.b (a b)",
    "eta": r"\x f.f (x x f)",
    "omega_f": r"\x.f (x x)",
    "omega_delta_nf": r"\a b.b (a a b)",
    "theta": r"\a b c.b c (a a b c)",
    "epsilon": r"\a b c.b c (a b c)",
    "xi_scheme": r"\n a b c.a b c (n a b c)",
    "Y0": r"\f.(\x.f (x x)) (\x.f (x x))",
}

ALIASES = {
    "δ": "delta",
    "η": "eta",
    "θ": "theta",
    "ε": "epsilon",
    "ξ": "omega_delta_nf",
    "omega_delta": "omega_delta_nf",
    "SS_nf": "epsilon",
}

NAMES = tuple(_DEFINITIONS) + ("A", "Y1", "Q")


@lru_cache(maxsize=None)
def _make(name: str) -> Term:
    if name in _DEFINITIONS:
        return parse(_DEFINITIONS[name])
    if name == "A":
        return App(make("B"), make("S"))
    if name == "Y1":
        return App(make("eta"), make("eta"))
    raise KeyError(f"unknown combinator {name!r}")


def make(name: str, n: int | None = None) -> Term:
    """Closed term for a catalog name (``omega_f`` has the free variable f).

    ``Q`` needs the number ``n`` of dummy parameters.
    """
    name = ALIASES.get(name, name)
    if name == "Q":
        if n is None:
            raise ValueError("Q needs n")
        return make_q(n)
    return _make(name)


def make_q(n: int) -> Term:
    ps = " ".join(f"p{i}" for i in range(1, n + 1))
    return parse(rf"\y {ps} x.x (y {ps} x)")


def omega(f: Term) -> Term:
    """ω_f = λx.f(xx) for an arbitrary term f."""
    return Lam(App(shift(f, 1), App(Var(0), Var(0))), "x")


def repeat(t: Term, n: int) -> list[Term]:
    return [t] * n


# ---------------------------------------------------------------------------
# Families


def bohm_fpc(n: int) -> Term:
    """Y0 δ…δ (n copies): the Böhm sequence."""
    return app(make("Y0"), *repeat(make("delta"), n))


def turing_bohm_fpc(n: int) -> Term:
    """ηη δ…δ (n-1 copies) for n >= 1, Y0 for n = 0; convertible with bohm_fpc(n)."""
    if n == 0:
        return make("Y0")
    return app(make("Y1"), *repeat(make("delta"), n - 1))


def scott_fpc(n: int, y: Term | None = None) -> Term:
    """B Y S…S (n copies) I: the Scott sequence."""
    y = make("Y0") if y is None else y
    return app(make("B"), y, *repeat(make("S"), n), make("I"))


def reducing_scott_fpc(y: Term, n: int) -> Term:
    """Y (SS) S…S (n copies) I."""
    s = make("S")
    return app(y, App(s, s), *repeat(s, n), make("I"))


def generating_vector(n: int) -> list[Term]:
    """The arguments of □(SS)S…S(n)I."""
    s = make("S")
    return [App(s, s), *repeat(s, n), make("I")]


def vector_fpc(ns, y: Term | None = None) -> Term:
    """Y0 B_{n1} … B_{nk} with B_n = □(SS)S^nI."""
    t = make("Y0") if y is None else y
    for n in ns:
        t = app(t, *generating_vector(n))
    return t


def pre_fpc_close(t: Term, n: int) -> Term:
    """N I…I (n-1 copies)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return app(t, *repeat(make("I"), n - 1))


SCHEMES = ("i", "ii", "iii", "iv", "v", "vi", "epsilon", "xi")


def scheme_fpc(scheme: str, y: Term, n: int = 1, dummies=None) -> Term:
    """Apply a generation scheme Y ⇒ Y P1 … Pk.

    Scheme (i) is bracketed as Y(S(AI))I; (v) takes the number ``n`` of
    extra A's; (vi) takes the list of dummy terms.
    """
    A, I, S = make("A"), make("I"), make("S")
    if scheme == "i":
        return app(y, App(S, App(A, I)), I)
    if scheme == "ii":
        return app(y, app(A, A, A), I, I)
    if scheme == "iii":
        return App(y, app(A, I, I))
    if scheme == "iv":
        return app(y, app(A, A, I), I)
    if scheme == "v":
        return app(y, app(A, A, A), *repeat(A, n), I, I)
    if scheme == "vi":
        dummies = list(dummies or [])
        return app(y, make_q(len(dummies)), *dummies)
    if scheme == "epsilon":
        return app(y, make("epsilon"), I)
    if scheme == "xi":
        return app(y, make("xi_scheme"), I, I)
    raise KeyError(f"unknown scheme {scheme!r}")


def plotkin_terms(y: Term, f: str = "f") -> tuple[Term, Term]:
    """A_Y = Y(λz.fzz) and B_Y = Y(λx.Y(λy.fxy))."""
    fz = abstract(app(Free(f), Free("z"), Free("z")), "z")
    inner = abstract(App(y, abstract(app(Free(f), Free("x"), Free("y")), "y")), "x")
    return App(y, fz), App(y, inner)


def flipflop_wfpc() -> tuple[Term, Term]:
    """Z, Z' with Zx ↠ x(Z'x) and Z'x ↠ x(Zx).

    Built as P T and P F for P = Y1 G, where the selector argument of
    G = λp s. s (λx.x(p F x)) (λx.x(p T x)) picks the component.
    """
    g = parse(r"\p s.s (\x.x (p F x)) (\x.x (p T x))", env={"T": make("K"), "F": make("KI")})
    p = App(make("Y1"), g)
    return App(p, make("K")), App(p, make("KI"))


make_flipflop_wfpc = flipflop_wfpc


# ---------------------------------------------------------------------------
# Checks


@dataclass(frozen=True)
class FpcCheckReport:
    reducing_k: int | None
    bt_is_x_omega_to_depth: int
    convertibility_check: str


def reducing_k(y: Term, var: str = "x", fuel: int = red.DEFAULT_FUEL) -> int | None:
    """k such that Y x head-reduces in k steps to exactly x(Y x), else None."""
    x = Free(var)
    target = App(x, App(y, x))
    t = App(y, x)
    for k in range(fuel + 1):
        if t == target:
            return k
        p = red.head_redex_position(t)
        if p is None:
            return None
        t = red.beta_step_at(t, p)
    return None


def x_omega_depth(t: Term, var: str, depth: int, fuel: int = red.DEFAULT_FUEL) -> int:
    """Number of leading levels of BT(t) equal to x(x(x(…)))."""
    tree = tr.clocked_bt(t, depth, fuel)
    levels = 0
    x = Free(var)
    while isinstance(tree, tr.BTNode):
        if tree.binders or tree.head != x or len(tree.children) != 1:
            break
        levels += 1
        tree = tree.children[0]
    return levels


def check_fpc(
    y: Term,
    depth: int = 8,
    fuel: int = red.DEFAULT_FUEL,
    budget: int = 2000,
    var: str = "x",
) -> FpcCheckReport:
    x = Free(var)
    k = reducing_k(y, var, fuel)
    levels = x_omega_depth(App(y, x), var, depth, fuel)
    conv = red.convertible_bounded(App(y, x), App(x, App(y, x)), budget)
    return FpcCheckReport(k, levels, "convertible" if conv else "unknown")


def is_wfpc_to_depth(z: Term, depth: int = 8, fuel: int = red.DEFAULT_FUEL) -> bool:
    return x_omega_depth(App(z, Free("x")), "x", depth, fuel) >= depth


# ---------------------------------------------------------------------------
# δ-terms


class NotADeltaTerm(ValueError):
    pass


def is_delta_term(t: Term) -> bool:
    d = make("delta")
    stack = [t]
    while stack:
        u = stack.pop()
        if u == d:
            continue
        if not isinstance(u, App):
            return False
        stack.append(u.fun)
        stack.append(u.arg)
    return True


def _require_delta(t: Term):
    if not is_delta_term(t):
        raise NotADeltaTerm(str(t))


def delta_length(t: Term) -> int:
    """Number of δ occurrences."""
    _require_delta(t)
    d = make("delta")
    if t == d:
        return 1
    return delta_length(t.fun) + delta_length(t.arg)


def delta_pairs(t: Term) -> int:
    """Number of occurrences of the subterm δδ."""
    _require_delta(t)
    d = make("delta")
    if t == d:
        return 0
    here = int(t.fun == d and t.arg == d)
    return here + delta_pairs(t.fun) + delta_pairs(t.arg)


def delta_sn_criterion(t: Term) -> str:
    """'trivial' for δ itself, else 'SN' iff exactly one δδ occurs."""
    _require_delta(t)
    if t == make("delta"):
        return "trivial"
    return "SN" if delta_pairs(t) == 1 else "not-SN"


def _contains_subterm(t: Term, s: Term) -> bool:
    if t.size < s.size:
        return False
    stack = [t]
    while stack:
        u = stack.pop()
        if u.size == s.size and u == s:
            return True
        if u.size > s.size:
            if isinstance(u, App):
                stack.append(u.fun)
                stack.append(u.arg)
            elif hasattr(u, "body"):
                stack.append(u.body)
    return False


def delta_sn_search(t: Term, fuel: int = 10_000) -> str:
    """Decide strong normalization of a δ-term without using the δδ count.

    'not-SN' when a finite δ-model separates ``t`` from every normal form
    (see ``nontermination_model``); otherwise the whole reduction graph is
    explored within ``fuel`` terms: 'SN' when it is finite and acyclic,
    'not-SN' on a cycle or a self-embedding u ↠ C[u], 'unknown' otherwise.
    """
    _require_delta(t)
    if nontermination_model(t) is not None:
        return "not-SN"
    return sn_search(t, fuel)


@lru_cache(maxsize=None)
def delta_models(max_size: int = 3) -> tuple:
    """Finite applicative algebras with δ = 0 satisfying δ·a·b = b·(a·b).

    Each model is a tuple of rows, ``table[a][b]`` being a·b.  Found by
    backtracking over multiplication tables of up to ``max_size`` elements.
    """
    found = []
    for n in range(1, max_size + 1):
        tab = [[None] * n for _ in range(n)]
        cells = [(a, b) for a in range(n) for b in range(n)]

        def consistent():
            for a in range(n):
                da = tab[0][a]
                if da is None:
                    continue
                for b in range(n):
                    ab = tab[a][b]
                    if ab is None or tab[da][b] is None or tab[b][ab] is None:
                        continue
                    if tab[da][b] != tab[b][ab]:
                        return False
            return True

        def fill(i):
            if i == len(cells):
                found.append(tuple(tuple(row) for row in tab))
                return
            a, b = cells[i]
            for v in range(n):
                tab[a][b] = v
                if consistent():
                    fill(i + 1)
            tab[a][b] = None

        fill(0)
    return tuple(found)


def _model_value(table, t: Term) -> int:
    if isinstance(t, App):
        return table[_model_value(table, t.fun)][_model_value(table, t.arg)]
    return 0


def _normal_form_values(table) -> set:
    # normal forms of δ·a·b → b·(a·b) are δ, δδ, δ(δδ), …
    seen, x = {0}, 0
    while True:
        x = table[0][x]
        if x in seen:
            return seen
        seen.add(x)


def nontermination_model(t: Term, max_size: int = 3):
    """A δ-model in which ``t`` takes a value no normal form takes, or None.

    Values are preserved by δ·a·b → b·(a·b) in any context, so such a ``t``
    has no normal form for that rule.  The rule is orthogonal, hence ``t``
    then has an infinite reduction, and each rule step is two beta steps.
    """
    _require_delta(t)
    for table in delta_models(max_size):
        if _model_value(table, t) not in _normal_form_values(table):
            return table
    return None


def sn_search(t: Term, fuel: int = 10_000) -> str:
    parents: dict = {t: None}
    order = deque([t])
    succ: dict = {}
    while order:
        u = order.popleft()
        nxt = []
        for p in red.redex_positions(u):
            v = red.beta_step_at(u, p)
            nxt.append(v)
            if v not in parents:
                if len(parents) >= fuel:
                    return "unknown"
                parents[v] = u
                order.append(v)
                # self-embedding along the path from the root
                a = u
                while a is not None:
                    if a.size < v.size and _contains_subterm(v, a):
                        return "not-SN"
                    a = parents[a]
        succ[u] = nxt
    if tr._cyclic_nodes(succ):
        return "not-SN"
    return "SN"


def delta_convertible_by_length(t: Term, t2: Term) -> str:
    """'convertible' / 'inconvertible' for SN non-trivial δ-terms (decided by
    length), 'unknown' otherwise."""
    if delta_sn_criterion(t) != "SN" or delta_sn_criterion(t2) != "SN":
        return "unknown"
    return "convertible" if delta_length(t) == delta_length(t2) else "inconvertible"


def delta_terms(max_apps: int) -> list[Term]:
    """All δ-terms with at most ``max_apps`` applications."""
    d = make("delta")
    by_apps: list[list[Term]] = [[d]]
    for k in range(1, max_apps + 1):
        level = []
        for i in range(k):
            for left in by_apps[i]:
                for right in by_apps[k - 1 - i]:
                    level.append(App(left, right))
        by_apps.append(level)
    return [t for level in by_apps for t in level]


# ---------------------------------------------------------------------------
# Name environment for term text


def catalog_env() -> dict[str, Term]:
    """Names resolvable inside term text: combinators plus Yn and Un.

    ``Yn`` (n >= 1) is ηηδ^(n-1) and ``Un`` is the Scott sequence element
    BY0S^nI.  Names for n up to 20 are provided.
    """
    env = {}
    for name in ("I", "K", "S", "B", "A", "delta", "eta", "theta", "epsilon", "Y0", "Y1"):
        env[name] = make(name)
    for alias, name in ALIASES.items():
        env[alias] = make(name)
    env["xi"] = make("omega_delta_nf")
    for n in range(21):
        env[f"Y{n}"] = turing_bohm_fpc(n)
        env[f"U{n}"] = scott_fpc(n)
    return env
