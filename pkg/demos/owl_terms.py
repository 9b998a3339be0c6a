"""
Strong normalization of δ-terms
===============================

Terms built only from δ = λab.b(ab) terminate exactly when they contain
a single δδ.  Here that rule is checked against a search that never
looks at δδ occurrences: it either explores the whole reduction graph
or finds a small model in which the term differs from every normal form.
"""

from collections import Counter

from clocklam import fpc
from clocklam.terms import App, pretty

terms = fpc.delta_terms(5)
tally = Counter((fpc.delta_sn_criterion(t), fpc.delta_sn_search(t)) for t in terms)
for (rule, search), n in sorted(tally.items()):
    print(f"rule={rule:<8} search={search:<8} terms={n}")

d = fpc.make("delta")
dd = App(d, d)
t = App(dd, dd)
model = fpc.nontermination_model(t)
print()
print(pretty(t, "unicode"), "has no normal form; model table:")
for row in model:
    print("  ", row)
