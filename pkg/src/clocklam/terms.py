"""Untyped lambda terms in locally nameless form.

Bound variables are de Bruijn indices; free variables are plain names.  A
binder keeps its source name only as a display hint, so two alpha-equivalent
terms are equal (``==``) and hash the same.

Every node caches its hash, its size, whether it is a beta-normal form and
``loose``: one more than the largest de Bruijn index that escapes the term
(0 for locally closed terms).  Shifting and substitution skip subterms whose
``loose`` value shows they cannot be affected.
"""

from __future__ import annotations

import sys
from typing import Iterator, Mapping

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

Position = tuple[int, ...]
EPSILON: Position = ()


class Term:
    __slots__ = ("_hash", "size", "loose", "normal")

    def __eq__(self, other):
        return alpha_eq(self, other)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return pretty(self)


class Var(Term):
    """Bound variable, referring to the ``index``-th enclosing binder."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index
        self._hash = hash(("var", index))
        self.size = 1
        self.loose = index + 1
        self.normal = True

    def __repr__(self):
        return f"Var({self.index})"


class Free(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("free", name))
        self.size = 1
        self.loose = 0
        self.normal = True

    def __repr__(self):
        return f"Free({self.name!r})"


class Lam(Term):
    __slots__ = ("body", "hint")

    def __init__(self, body: Term, hint: str = "x"):
        self.body = body
        self.hint = hint
        self._hash = hash(("lam", body._hash))
        self.size = body.size + 1
        self.loose = max(body.loose - 1, 0)
        self.normal = body.normal

    def __repr__(self):
        return f"Lam({self.body!r}, {self.hint!r})"


class App(Term):
    __slots__ = ("fun", "arg")

    def __init__(self, fun: Term, arg: Term):
        self.fun = fun
        self.arg = arg
        self._hash = hash(("app", fun._hash, arg._hash))
        self.size = fun.size + arg.size + 1
        self.loose = max(fun.loose, arg.loose)
        self.normal = fun.normal and arg.normal and not isinstance(fun, Lam)

    def __repr__(self):
        return f"App({self.fun!r}, {self.arg!r})"


def alpha_eq(a: Term, b: Term) -> bool:
    """Structural equality of the nameless representations (hints ignored)."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if x._hash != y._hash or type(x) is not type(y) or x.size != y.size:
            return False
        if isinstance(x, App):
            stack.append((x.arg, y.arg))
            stack.append((x.fun, y.fun))
        elif isinstance(x, Lam):
            stack.append((x.body, y.body))
        elif isinstance(x, Var):
            if x.index != y.index:
                return False
        elif x.name != y.name:
            return False
    return True


def app(head: Term, *args: Term) -> Term:
    """Left-associated application ``head args[0] args[1] ...``."""
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``h N1 ... Nm`` into ``(h, [N1, ..., Nm])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def strip_lambdas(t: Term) -> tuple[list[str], Term]:
    hints = []
    while isinstance(t, Lam):
        hints.append(t.hint)
        t = t.body
    return hints, t


def lambdas(hints, body: Term) -> Term:
    for h in reversed(list(hints)):
        body = Lam(body, h)
    return body


# ---------------------------------------------------------------------------
# Shifting and substitution


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every de Bruijn index >= ``cutoff``."""
    if by == 0 or t.loose <= cutoff:
        return t
    if isinstance(t, Var):
        return Var(t.index + by)
    if isinstance(t, Lam):
        return Lam(shift(t.body, by, cutoff + 1), t.hint)
    return App(shift(t.fun, by, cutoff), shift(t.arg, by, cutoff))


def substitute(body: Term, value: Term, target: int = 0) -> Term:
    """Replace the bound reference ``target`` in ``body`` by ``value``.

    ``body`` is seen from inside the binder being eliminated: indices above
    ``target`` are decremented, and ``value`` (given relative to the outside
    of that binder) is shifted as it moves under further binders, so no free
    variable of ``value`` is ever captured.
    """
    if body.loose <= target:
        return body
    if isinstance(body, Var):
        if body.index == target:
            return shift(value, target)
        if body.index > target:
            return Var(body.index - 1)
        return body
    if isinstance(body, Lam):
        return Lam(substitute(body.body, value, target + 1), body.hint)
    if isinstance(body, App):
        return App(substitute(body.fun, value, target), substitute(body.arg, value, target))
    return body


def substitute_free(t: Term, name: str, value: Term, depth: int = 0) -> Term:
    """Replace the free variable ``name`` by the locally closed ``value``."""
    if isinstance(t, Free):
        return shift(value, depth) if t.name == name else t
    if isinstance(t, Lam):
        return Lam(substitute_free(t.body, name, value, depth + 1), t.hint)
    if isinstance(t, App):
        return App(substitute_free(t.fun, name, value, depth), substitute_free(t.arg, name, value, depth))
    return t


def abstract(t: Term, name: str) -> Lam:
    """Bind the free variable ``name`` of ``t``: returns ``\\name.t``."""

    def go(u: Term, depth: int) -> Term:
        if isinstance(u, Free):
            return Var(depth) if u.name == name else u
        if isinstance(u, Var):
            return Var(u.index + 1) if u.index >= depth else u
        if isinstance(u, Lam):
            return Lam(go(u.body, depth + 1), u.hint)
        return App(go(u.fun, depth), go(u.arg, depth))

    return Lam(go(t, 0), name)


def free_vars(t: Term) -> set[str]:
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Free):
            out.add(u.name)
        elif isinstance(u, Lam):
            stack.append(u.body)
        elif isinstance(u, App):
            stack.append(u.fun)
            stack.append(u.arg)
    return out


def occurrences(body: Term, index: int = 0) -> int:
    """Number of occurrences of the bound reference ``index`` in ``body``."""
    if body.loose <= index:
        return 0
    if isinstance(body, Var):
        return int(body.index == index)
    if isinstance(body, Lam):
        return occurrences(body.body, index + 1)
    return occurrences(body.fun, index) + occurrences(body.arg, index)


def is_closed(t: Term) -> bool:
    return t.loose == 0 and not free_vars(t)


def fresh_name(hint: str, avoid) -> str:
    """``hint`` itself if unused, else ``hint`` with the smallest numeric suffix."""
    if hint not in avoid:
        return hint
    base = hint.rstrip("0123456789") or hint
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# Positions


class InvalidPosition(ValueError):
    pass


def subterm_at(t: Term, p: Position) -> Term:
    for i, step in enumerate(p):
        if step == 0 and isinstance(t, Lam):
            t = t.body
        elif step == 1 and isinstance(t, App):
            t = t.fun
        elif step == 2 and isinstance(t, App):
            t = t.arg
        else:
            raise InvalidPosition(f"position {format_position(p)} undefined at step {i}")
    return t


def replace_at(t: Term, p: Position, new: Term) -> Term:
    """``t`` with the subterm at ``p`` replaced by ``new`` (no index adjustment)."""
    if not p:
        return new
    step, rest = p[0], p[1:]
    if step == 0 and isinstance(t, Lam):
        return Lam(replace_at(t.body, rest, new), t.hint)
    if step == 1 and isinstance(t, App):
        return App(replace_at(t.fun, rest, new), t.arg)
    if step == 2 and isinstance(t, App):
        return App(t.fun, replace_at(t.arg, rest, new))
    raise InvalidPosition(f"position {format_position(p)} undefined")


def iter_positions(t: Term, prefix: Position = ()) -> Iterator[Position]:
    """Positions of ``t`` in pre-order (outermost, then leftmost first)."""
    yield prefix
    if isinstance(t, Lam):
        yield from iter_positions(t.body, prefix + (0,))
    elif isinstance(t, App):
        yield from iter_positions(t.fun, prefix + (1,))
        yield from iter_positions(t.arg, prefix + (2,))


def positions(t: Term) -> set[Position]:
    return set(iter_positions(t))


def format_position(p: Position, empty: str = "ε") -> str:
    return "".join(map(str, p)) if p else empty


def parse_position(s: str) -> Position:
    if s in ("", "ε", "e", "eps"):
        return ()
    if any(c not in "012" for c in s):
        raise ValueError(f"not a position: {s!r}")
    return tuple(int(c) for c in s)


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c in "_'"


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        offset = len(text[:i].encode())
        if c.isspace():
            i += 1
        elif c in "\\λ":
            tokens.append(("lam", c, offset))
            i += 1
        elif c in ".()":
            tokens.append((c, c, offset))
            i += 1
        elif _is_ident_char(c):
            j = i
            while j < len(text) and _is_ident_char(text[j]):
                j += 1
            tokens.append(("ident", text[i:j], offset))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", offset)
    tokens.append(("end", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str, env: Mapping[str, Term] | None):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.env = env or {}

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            what = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, found {what!r}", tok[2])
        self.pos += 1
        return tok

    def term(self, scope):
        if self.peek()[0] == "lam":
            return self.lam(scope)
        return self.application(scope)

    def lam(self, scope):
        self.take("lam")
        names = [self.take("ident")[1]]
        while self.peek()[0] == "ident":
            names.append(self.take("ident")[1])
        self.take(".")
        body = self.term(names[::-1] + scope)
        for name in reversed(names):
            body = Lam(body, name)
        return body

    def application(self, scope):
        head = self.atom(scope)
        while True:
            kind = self.peek()[0]
            if kind in ("ident", "("):
                head = App(head, self.atom(scope))
            elif kind == "lam":
                head = App(head, self.lam(scope))
            else:
                return head

    def atom(self, scope):
        kind, value, offset = self.peek()
        if kind == "ident":
            self.pos += 1
            if value in scope:
                return Var(scope.index(value))
            if value in self.env:
                return self.env[value]
            return Free(value)
        if kind == "(":
            self.pos += 1
            t = self.term(scope)
            self.take(")")
            return t
        raise ParseError(f"unexpected {value or 'end of input'!r}", offset)


def parse(text: str, env: Mapping[str, Term] | None = None) -> Term:
    """Parse ``text`` into a term.

    Unbound identifiers become free variables unless ``env`` maps them to a
    (closed) term, in which case that term is spliced in.
    """
    p = _Parser(text, env)
    t = p.term([])
    p.take("end")
    return t


# ---------------------------------------------------------------------------
# Printing


def pretty(t: Term, style: str = "ascii") -> str:
    """Render ``t`` so that ``parse(pretty(t))`` is alpha-equal to ``t``."""
    lam_sym = "λ" if style == "unicode" else "\\"
    avoid = free_vars(t)

    def go(u: Term, names: list[str], ctx: str) -> str:
        # ctx: "top", "fun" (left of an application) or "arg"
        if isinstance(u, Var):
            return names[u.index] if u.index < len(names) else f"#{u.index - len(names)}"
        if isinstance(u, Free):
            return u.name
        if isinstance(u, Lam):
            name = fresh_name(u.hint, avoid | set(names))
            s = f"{lam_sym}{name}.{go(u.body, [name] + names, 'top')}"
            return s if ctx == "top" else f"({s})"
        s = f"{go(u.fun, names, 'fun')} {go(u.arg, names, 'arg')}"
        return f"({s})" if ctx == "arg" else s

    return go(t, [], "top")
