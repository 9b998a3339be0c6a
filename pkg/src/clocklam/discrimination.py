"""Inconvertibility proofs from clocks.

Two terms with equal Böhm trees can still be told apart: if both have simple
reducts, the clocks of those reducts are reduction-invariant from some level
on, so clocks that differ at infinitely many positions separate the terms.
``discriminate`` runs a fixed pipeline of increasingly expensive tests and
returns a verdict with a certificate that ``verify`` can replay.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import reduction as red
from . import trees as tr
from .terms import App, InvalidPosition, Lam, Position, Term, format_position, is_closed, pretty, subterm_at

SIMPLE = "simple"
NOT_SIMPLE = "not-simple"
UNKNOWN = "unknown"

METHODS = ("bt-difference", "simple-simple", "atomic-simple-simple", "simple-vs-reduct")


@dataclass(frozen=True)
class SimpleCheck:
    """Outcome of ``is_simple_term``.

    For ``simple`` the certificate is the closed set of expansion states;
    for ``not-simple`` it is the offending redex, the state it was met in
    and its position there.
    """

    status: str
    states: tuple = ()
    witness: Term | None = None
    state: Term | None = None
    position: Position | None = None
    reason: str = ""

    def __bool__(self):
        return self.status == SIMPLE


def _first_bad_step(t: Term, trace) -> tuple[Term, Position] | None:
    for s in trace:
        if not s.kind.simple:
            return t, s.position
        t = red.beta_step_at(t, s.position)
    return None


def is_simple_term(
    t: Term, depth: int = tr.DEFAULT_DEPTH, fuel: int = red.DEFAULT_FUEL, max_states: int = 512
) -> SimpleCheck:
    """Check that head reduction to each hnf layer contracts only simple
    redexes, co-recursively in the arguments.

    States are memoized up to alpha-equality, so a term whose expansion
    closes up into a finite graph is certified outright.  Subterms without
    hnf (certified by a head-reduction cycle) are simple.
    """
    seen = {t: 0}
    order = [t]
    queue = deque([t])
    unsure = ""
    while queue:
        u = queue.popleft()
        d = seen[u]
        out = red.reduce_to_hnf(u, fuel)
        if isinstance(out, red.Cycle):
            continue
        bad = _first_bad_step(u, out.trace)
        if bad:
            state, p = bad
            return SimpleCheck(NOT_SIMPLE, witness=subterm_at(state, p), state=state, position=p)
        if isinstance(out, red.FuelExhausted):
            unsure = unsure or "fuel"
            continue
        layer = tr.expand_layer(out.form, "bt", fuel)
        for c in layer.children:
            if c in seen:
                continue
            if d + 1 >= depth:
                unsure = unsure or "depth"
                continue
            if len(order) >= max_states:
                unsure = unsure or "states"
                continue
            seen[c] = d + 1
            order.append(c)
            queue.append(c)
    if unsure:
        return SimpleCheck(UNKNOWN, reason=unsure)
    return SimpleCheck(SIMPLE, states=tuple(order))


# ---------------------------------------------------------------------------
# Simple reducts


def closed_normalize(t: Term, fuel: int = 64) -> tuple[Term, tuple[Position, ...]]:
    """Replace each maximal closed subterm that normalizes within ``fuel``
    leftmost-outermost steps by its normal form.

    Returns the new term and the redex positions contracted, in an order
    that ``reduction.replay`` accepts.
    """
    path: list[Position] = []

    def go(u: Term, p: Position) -> Term:
        if u.normal:
            return u
        if is_closed(u):
            out = red.normalize(u, fuel)
            if isinstance(out, red.Reached):
                path.extend(p + s.position for s in out.trace)
                return out.form
        if isinstance(u, Lam):
            body = go(u.body, p + (0,))
            return u if body is u.body else Lam(body, u.hint)
        if isinstance(u, App):
            f = go(u.fun, p + (1,))
            a = go(u.arg, p + (2,))
            return u if (f is u.fun and a is u.arg) else App(f, a)
        return u

    return go(t, ()), tuple(path)


@dataclass(frozen=True)
class Reduct:
    """A reduct of ``source`` together with the redex positions leading to it."""

    source: Term
    term: Term
    path: tuple[Position, ...] = ()

    def replays(self) -> bool:
        try:
            return red.replay(self.source, self.path) == self.term
        except (InvalidPosition, red.NotARedex):
            return False


def _candidates(t: Term, budget: int, head_steps: int):
    """Reducts of ``t`` to try, cheapest and most promising first: the head
    chain (each state also closed-normalized), then breadth-first over all
    redexes."""
    u, path = t, ()
    chain = [(u, path)]
    for _ in range(head_steps):
        p = red.head_redex_position(u)
        if p is None:
            break
        u, path = red.beta_step_at(u, p), path + (p,)
        chain.append((u, path))
    for u, path in chain:
        yield u, path
        v, extra = closed_normalize(u)
        if extra:
            yield v, path + extra
    parents = {t: ()}
    frontier = deque([t])
    while frontier and len(parents) < budget:
        u = frontier.popleft()
        for p in red.redex_positions(u):
            v = red.beta_step_at(u, p)
            if v in parents:
                continue
            parents[v] = parents[u] + (p,)
            yield v, parents[v]
            frontier.append(v)
            if len(parents) >= budget:
                return


def find_simple_reduct(
    t: Term,
    budget: int = 200,
    depth: int = tr.DEFAULT_DEPTH,
    fuel: int = red.DEFAULT_FUEL,
    head_steps: int = 32,
) -> Reduct | None:
    """Search the reducts of ``t`` for one that ``is_simple_term`` certifies.

    At most ``budget`` candidates are checked.  Fuel for the check itself is
    capped so that one hopeless candidate cannot eat the whole search.
    """
    tried: set = set()
    check_fuel = min(fuel, 2000)
    for u, path in _candidates(t, budget, head_steps):
        if u in tried:
            continue
        tried.add(u)
        if len(tried) > budget:
            break
        if is_simple_term(u, depth, check_fuel):
            return Reduct(t, u, path)
    return None


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Config:
    depth: int = tr.DEFAULT_DEPTH
    fuel: int = red.DEFAULT_FUEL
    mode: str = "count"
    prefix_cut: int = 0
    budget: int = 2000
    simple_budget: int = 200

    def __post_init__(self):
        if self.depth <= 0 or self.fuel <= 0 or self.budget <= 0 or self.simple_budget <= 0:
            raise ValueError("depth, fuel and budgets must be positive")
        if self.prefix_cut < 0:
            raise ValueError("prefix_cut must be non-negative")
        if self.mode not in tr.MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    def budgets(self) -> dict:
        return {
            "depth": self.depth,
            "fuel": self.fuel,
            "mode": self.mode,
            "prefixCut": self.prefix_cut,
            "conversionBudget": self.budget,
            "simpleBudget": self.simple_budget,
        }


@dataclass(frozen=True)
class Certificate:
    reduct_m: Reduct
    reduct_n: Reduct
    relation: str
    mode: str = "count"
    check: str = "infinitely-often"
    witness_positions: tuple[Position, ...] = ()
    cycle_nodes: tuple = ()
    depth: int | None = None

    def to_json(self) -> dict:
        return {
            "reductM": pretty(self.reduct_m.term),
            "reductN": pretty(self.reduct_n.term),
            "pathM": [format_position(p, "") for p in self.reduct_m.path],
            "pathN": [format_position(p, "") for p in self.reduct_n.path],
            "cycleNodes": [list(v) for v in self.cycle_nodes],
            "witnessPositions": [format_position(p, "") for p in self.witness_positions],
            "relation": self.relation,
            "check": self.check,
            "mode": self.mode,
            "depth": self.depth,
        }


@dataclass(frozen=True)
class Inconvertible:
    method: str
    certificate: Certificate

    verdict = "inconvertible"


@dataclass(frozen=True)
class Convertible:
    common_reduct: Term
    path_m: tuple[Position, ...] = ()
    path_n: tuple[Position, ...] = ()

    verdict = "convertible"


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    notes: tuple[str, ...] = field(default=())

    verdict = "inconclusive"


Verdict = Inconvertible | Convertible | Inconclusive


def verdict_to_json(v: Verdict, config: Config | None = None) -> dict:
    out: dict = {"verdict": v.verdict, "method": None, "certificate": None}
    if isinstance(v, Inconvertible):
        out["method"] = v.method
        out["certificate"] = v.certificate.to_json()
    elif isinstance(v, Convertible):
        out["method"] = "common-reduct"
        out["certificate"] = {
            "commonReduct": pretty(v.common_reduct),
            "pathM": [format_position(p, "") for p in v.path_m],
            "pathN": [format_position(p, "") for p in v.path_n],
        }
    else:
        out["reason"] = v.reason
        out["notes"] = list(v.notes)
    out["budgets"] = (config or Config()).budgets()
    return out


# ---------------------------------------------------------------------------
# Pipeline


def _bt_difference(m: Term, n: Term, config: Config) -> Inconvertible | None:
    """A node where the truncated Böhm trees differ, with both sides fully
    resolved on the way there."""
    tm = tr.clocked_bt(m, config.depth, config.fuel)
    tn = tr.clocked_bt(n, config.depth, config.fuel)
    mismatch, _, _, _ = tr._finite_scan(tm, tn, "=")
    if mismatch is None:
        return None
    pos, d = mismatch
    cert = Certificate(Reduct(m, m), Reduct(n, n), "shape", "count", "bt", (pos,), (), d)
    return Inconvertible("bt-difference", cert)


def _rational(r: Reduct, config: Config, mode: str) -> tr.RationalTree | None:
    return tr.rational_expand(r.term, config.fuel, "bt", mode)


def _compare_reducts(rm: Reduct, rn: Reduct, config: Config, mode: str, rel: str, method: str):
    """Returns an Inconvertible verdict when ``rel`` holds infinitely often
    between the rational trees of the two reducts, else None."""
    gm, gn = _rational(rm, config, mode), _rational(rn, config, mode)
    if gm is None or gn is None:
        return None
    res = tr.rel_infinitely_often(gm, gn, rel)
    if res.detail == "structure differs":
        cert = Certificate(rm, rn, "shape", mode, "bt", (res.witness,), (), res.depth)
        return Inconvertible("bt-difference", cert)
    if res.holds:
        cert = Certificate(rm, rn, rel, mode, "infinitely-often", (res.witness,), res.cycle, res.depth)
        return Inconvertible(method, cert)
    return None


def _plain_reducts(t: Term, config: Config):
    """Reducts of an arbitrary term with a finite clocked graph, used for the
    one-sided test."""
    yield Reduct(t, t)
    v, path = closed_normalize(t)
    if path:
        yield Reduct(t, v, path)


def discriminate(m: Term, n: Term, config: Config | None = None) -> Verdict:
    """Decide, soundly but incompletely, whether ``m`` and ``n`` are
    beta-convertible."""
    config = config or Config()
    if m == n:
        return Convertible(m)
    conv = red.convertible_bounded(m, n, config.budget)
    if conv is not None:
        return Convertible(conv.witness, conv.path_a, conv.path_b)
    diff = _bt_difference(m, n, config)
    if diff is not None:
        return diff

    notes = []
    sm = find_simple_reduct(m, config.simple_budget, config.depth, config.fuel)
    sn = find_simple_reduct(n, config.simple_budget, config.depth, config.fuel)
    notes.append(f"simple reduct of M: {'found' if sm else 'none'}")
    notes.append(f"simple reduct of N: {'found' if sn else 'none'}")
    if sm and sn:
        v = _compare_reducts(sm, sn, config, "count", "!=", "simple-simple")
        if v is not None:
            return v
        notes.append("count clocks eventually equal")
        if config.mode == "atomic":
            v = _compare_reducts(sm, sn, config, "atomic", "!=", "atomic-simple-simple")
            if v is not None:
                return v
            notes.append("atomic clocks eventually equal")
    # a simple reduct that is infinitely often slower than some reduct of
    # the other term
    for simple, other, flip in ((sm, n, False), (sn, m, True)):
        if simple is None:
            continue
        for r in _plain_reducts(other, config):
            a, b = (r, simple) if flip else (simple, r)
            rel = "<" if flip else ">"
            v = _compare_reducts(a, b, config, "count", rel, "simple-vs-reduct")
            if v is not None:
                return v
    if not (sm and sn):
        return Inconclusive("no simple reducts", tuple(notes))
    return Inconclusive("clocks not separated", tuple(notes))


# ---------------------------------------------------------------------------
# Replay


def verify(m: Term, n: Term, v: Verdict, config: Config | None = None) -> bool:
    """Independently re-check a verdict's certificate."""
    config = config or Config()
    if isinstance(v, Inconclusive):
        return True
    if isinstance(v, Convertible):
        return red.replay(m, v.path_m) == v.common_reduct == red.replay(n, v.path_n)
    cert = v.certificate
    rm, rn = cert.reduct_m, cert.reduct_n
    if rm.source != m or rn.source != n or not rm.replays() or not rn.replays():
        return False
    if v.method == "bt-difference":
        if cert.check == "bt" and not rm.path and not rn.path and cert.cycle_nodes == ():
            again = _bt_difference(m, n, config)
            if again is not None and again.certificate.witness_positions == cert.witness_positions:
                return True
        gm, gn = _rational(rm, config, cert.mode), _rational(rn, config, cert.mode)
        if gm is None or gn is None:
            return False
        return tr.rel_all(gm, gn, "=").detail == "structure differs"
    needs_m = v.method != "simple-vs-reduct" or cert.relation == ">"
    needs_n = v.method != "simple-vs-reduct" or cert.relation == "<"
    if needs_m and not is_simple_term(rm.term, config.depth, min(config.fuel, 2000)):
        return False
    if needs_n and not is_simple_term(rn.term, config.depth, min(config.fuel, 2000)):
        return False
    gm, gn = _rational(rm, config, cert.mode), _rational(rn, config, cert.mode)
    if gm is None or gn is None:
        return False
    res = tr.rel_infinitely_often(gm, gn, cert.relation)
    if not res.holds or res.cycle != cert.cycle_nodes:
        return False
    # the witness position must carry the claimed relation in the unfolding
    d = (cert.depth or 0) + 2
    return all(
        tr.rel_at(gm.unfold(d), gn.unfold(d), p, cert.relation) is tr.Tri.HOLDS
        for p in cert.witness_positions
    )


__all__ = [
    "Certificate",
    "Config",
    "Convertible",
    "Inconclusive",
    "Inconvertible",
    "METHODS",
    "Reduct",
    "SimpleCheck",
    "Verdict",
    "closed_normalize",
    "discriminate",
    "find_simple_reduct",
    "is_simple_term",
    "verdict_to_json",
    "verify",
]
