"""
Watching fixed point combinators tick
=====================================

Two fixed point combinators can unfold into the very same infinite tree
and still run at different speeds.  Counting head steps per node makes
the difference visible.
"""

from clocklam import fpc
from clocklam import reduction as red
from clocklam import trees as tr
from clocklam.terms import App, Free, format_position, pretty

env = fpc.catalog_env()
f = Free("f")

# Curry's combinator pays 2 steps for the root, then 1 per unfolding
curry = App(env["Y0"], f)
print("Y0 f :", tr.render_tree(tr.clocked_bt(curry, 6)))

# Turing's pays 2 everywhere
turing = App(env["Y1"], f)
print("Y1 f :", tr.render_tree(tr.clocked_bt(turing, 6)))

# the trace behind one Turing unfolding
out = red.reduce_to_hnf(turing)
for s in out.trace:
    print("  step at", format_position(s.position), s.kind.value)
print("  ->", pretty(out.form, "unicode"))

# both trees are finite graphs; compare them for good, not just to a depth
g0, g1 = tr.rational_expand(curry), tr.rational_expand(turing)
print("graph sizes:", len(g0), len(g1))
print("Y0 faster infinitely often:", tr.rel_infinitely_often(g0, g1, "<").holds)
