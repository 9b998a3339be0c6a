"""Clocked Böhm trees and discrimination of fixed point combinators."""

from .terms import (
    App,
    Free,
    Lam,
    ParseError,
    Term,
    Var,
    alpha_eq,
    parse,
    positions,
    pretty,
    substitute,
    subterm_at,
)

__version__ = "0.1.0"
