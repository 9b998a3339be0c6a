"""Beta reduction: single steps at positions, head reduction with traces, and
bounded searches for (weak) head normal forms, root-stable forms, normal
forms and common reducts.

Every bounded search reports one of three outcomes.  ``Reached`` carries the
form that was found; ``Cycle`` means the deterministic strategy revisited an
alpha-equal state, which certifies that it never terminates; ``FuelExhausted``
only says the budget ran out and certifies nothing.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .terms import (
    App,
    Lam,
    Position,
    Term,
    format_position,
    occurrences,
    replace_at,
    spine,
    subterm_at,
    substitute,
)

DEFAULT_FUEL = 10_000


class NotARedex(ValueError):
    pass


class RedexKind(enum.Enum):
    LINEAR = "linear"
    CBV = "cbv"
    BOTH = "both"
    NEITHER = "neither"

    @property
    def simple(self) -> bool:
        return self is not RedexKind.NEITHER


class Step(NamedTuple):
    position: Position
    kind: RedexKind


Trace = tuple[Step, ...]


def trace_positions(trace) -> tuple[Position, ...]:
    return tuple(s.position for s in trace)


def trace_to_json(trace) -> str:
    return json.dumps([{"position": format_position(s.position, ""), "kind": s.kind.value} for s in trace])


@dataclass(frozen=True)
class Reached:
    form: Term
    trace: Trace = ()

    @property
    def term(self) -> Term:
        return self.form


@dataclass(frozen=True)
class Cycle:
    witness: Term
    trace: Trace = ()

    @property
    def term(self) -> Term:
        return self.witness


@dataclass(frozen=True)
class FuelExhausted:
    last: Term
    trace: Trace = ()

    @property
    def term(self) -> Term:
        return self.last


ReductionOutcome = Reached | Cycle | FuelExhausted


# ---------------------------------------------------------------------------
# Redexes


def is_redex(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.fun, Lam)


def head_redex_position(t: Term) -> Position | None:
    """Position of the head redex, or None when ``t`` is a head normal form."""
    prefix = 0
    while isinstance(t, Lam):
        prefix += 1
        t = t.body
    h, args = spine(t)
    if isinstance(h, Lam) and args:
        return (0,) * prefix + (1,) * (len(args) - 1)
    return None


def whnf_redex_position(t: Term) -> Position | None:
    if isinstance(t, Lam):
        return None
    return head_redex_position(t)


def leftmost_outermost_redex(t: Term) -> Position | None:
    stack = [(t, ())]
    while stack:
        u, p = stack.pop()
        if u.normal:
            continue
        if isinstance(u, App):
            if isinstance(u.fun, Lam):
                return p
            stack.append((u.arg, p + (2,)))
            stack.append((u.fun, p + (1,)))
        elif isinstance(u, Lam):
            stack.append((u.body, p + (0,)))
    return None


def redex_positions(t: Term) -> list[Position]:
    """All redex positions, leftmost-outermost first."""
    out = []
    stack = [(t, ())]
    while stack:
        u, p = stack.pop()
        if u.normal:
            continue
        if isinstance(u, App):
            if isinstance(u.fun, Lam):
                out.append(p)
            stack.append((u.arg, p + (2,)))
            stack.append((u.fun, p + (1,)))
        elif isinstance(u, Lam):
            stack.append((u.body, p + (0,)))
    return out


def contract(redex: Term) -> Term:
    if not is_redex(redex):
        raise NotARedex(f"not a redex: {redex}")
    return substitute(redex.fun.body, redex.arg)


def beta_step_at(t: Term, p: Position) -> Term:
    return replace_at(t, p, contract(subterm_at(t, p)))


def classify(redex: Term) -> RedexKind:
    if not is_redex(redex):
        raise NotARedex(f"not a redex: {redex}")
    linear = occurrences(redex.fun.body) <= 1
    cbv = redex.arg.normal
    if linear and cbv:
        return RedexKind.BOTH
    if linear:
        return RedexKind.LINEAR
    if cbv:
        return RedexKind.CBV
    return RedexKind.NEITHER


def classify_redex(t: Term, p: Position) -> RedexKind:
    return classify(subterm_at(t, p))


def step(t: Term, p: Position) -> tuple[Term, Step]:
    redex = subterm_at(t, p)
    kind = classify(redex)
    return replace_at(t, p, contract(redex)), Step(p, kind)


def replay(t: Term, ps) -> Term:
    for p in ps:
        t = beta_step_at(t, p)
    return t


# ---------------------------------------------------------------------------
# Bounded strategies


def _run(t: Term, fuel: int, next_redex: Callable[[Term], Position | None]) -> ReductionOutcome:
    seen = {t}
    trace: list[Step] = []
    while True:
        p = next_redex(t)
        if p is None:
            return Reached(t, tuple(trace))
        if len(trace) >= fuel:
            return FuelExhausted(t, tuple(trace))
        t, s = step(t, p)
        trace.append(s)
        if t in seen:
            return Cycle(t, tuple(trace))
        seen.add(t)


def reduce_to_hnf(t: Term, fuel: int = DEFAULT_FUEL) -> ReductionOutcome:
    return _run(t, fuel, head_redex_position)


def reduce_to_whnf(t: Term, fuel: int = DEFAULT_FUEL) -> ReductionOutcome:
    return _run(t, fuel, whnf_redex_position)


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> ReductionOutcome:
    """Leftmost-outermost normalization."""
    return _run(t, fuel, leftmost_outermost_redex)


def is_hnf(t: Term) -> bool:
    return head_redex_position(t) is None


def is_whnf(t: Term) -> bool:
    return whnf_redex_position(t) is None


def _head_is_variable(t: Term) -> bool:
    h, _ = spine(t)
    return not isinstance(h, Lam)


def reduce_to_root_stable(t: Term, fuel: int = DEFAULT_FUEL) -> ReductionOutcome:
    """Head-reduce until ``t`` is certainly root-stable.

    An application ``F N`` is accepted once ``F`` is variable-headed, or once
    a bounded whnf search on ``F`` cycles (``F`` then never becomes an
    abstraction).  A repeated state of this deterministic loop certifies that
    ``t`` is root-active.
    """
    seen = {t}
    trace: list[Step] = []
    while True:
        if not isinstance(t, App) or _head_is_variable(t):
            return Reached(t, tuple(trace))
        if not isinstance(t.fun, Lam):
            sub = reduce_to_whnf(t.fun, fuel - len(trace))
            shifted = tuple(Step((1,) + s.position, s.kind) for s in sub.trace)
            if isinstance(sub, Cycle):
                return Reached(t, tuple(trace))
            trace.extend(shifted)
            if isinstance(sub, FuelExhausted):
                return FuelExhausted(App(sub.last, t.arg), tuple(trace))
            t = App(sub.form, t.arg)
            if not isinstance(t.fun, Lam):
                return Reached(t, tuple(trace))
        if len(trace) >= fuel:
            return FuelExhausted(t, tuple(trace))
        t, s = step(t, ())
        trace.append(s)
        if t in seen:
            return Cycle(t, tuple(trace))
        seen.add(t)


def is_root_stable_form(t: Term) -> bool:
    """Cheap syntactic sufficient condition: variable, abstraction or
    variable-headed application."""
    return not isinstance(t, App) or _head_is_variable(t)


# ---------------------------------------------------------------------------
# Bounded convertibility


@dataclass(frozen=True)
class Conversion:
    """``a`` and ``b`` reduce to the common reduct ``witness`` along the
    recorded redex positions."""

    witness: Term
    path_a: tuple[Position, ...] = field(default=())
    path_b: tuple[Position, ...] = field(default=())


def _path_back(parents: dict, t: Term) -> tuple[Position, ...]:
    ps = []
    while parents[t] is not None:
        t, p = parents[t]
        ps.append(p)
    return tuple(reversed(ps))


def convertible_bounded(a: Term, b: Term, budget: int = 2000, max_size: int = 400) -> Conversion | None:
    """Look for a common reduct of ``a`` and ``b``.

    Both reduction graphs are explored breadth-first (by number of steps;
    within a level, successors in leftmost-outermost order), always growing
    the side that has generated fewer terms so far, until ``budget`` distinct terms have
    been generated.  A result is a proof of convertibility; None proves
    nothing.  Reducts larger than ``max_size`` are not expanded further.
    """
    parents = [{a: None}, {b: None}]
    frontiers = [deque([a]), deque([b])]
    if a == b:
        return Conversion(a)
    generated = 2
    while generated < budget and (frontiers[0] or frontiers[1]):
        side = 0 if (frontiers[0] and (not frontiers[1] or len(parents[0]) <= len(parents[1]))) else 1
        mine, other = parents[side], parents[1 - side]
        level = frontiers[side]
        frontiers[side] = deque()
        for t in level:
            if t.size > max_size:
                continue
            for p in redex_positions(t):
                u = beta_step_at(t, p)
                if u in mine:
                    continue
                mine[u] = (t, p)
                generated += 1
                if u in other:
                    pa, pb = _path_back(parents[0], u), _path_back(parents[1], u)
                    return Conversion(u, pa, pb)
                frontiers[side].append(u)
                if generated >= budget:
                    return None
    return None


def random_step(t: Term, rng) -> tuple[Term, Position] | None:
    ps = redex_positions(t)
    if not ps:
        return None
    p = ps[rng.randrange(len(ps))]
    return beta_step_at(t, p), p


__all__ = [
    "Conversion",
    "Cycle",
    "DEFAULT_FUEL",
    "FuelExhausted",
    "NotARedex",
    "Reached",
    "RedexKind",
    "ReductionOutcome",
    "Step",
    "beta_step_at",
    "classify",
    "classify_redex",
    "contract",
    "convertible_bounded",
    "head_redex_position",
    "is_hnf",
    "is_redex",
    "is_root_stable_form",
    "is_whnf",
    "leftmost_outermost_redex",
    "normalize",
    "random_step",
    "redex_positions",
    "reduce_to_hnf",
    "reduce_to_root_stable",
    "reduce_to_whnf",
    "replay",
    "step",
    "trace_positions",
    "trace_to_json",
    "whnf_redex_position",
]
