"""
Separating the Boehm and Scott sequences
=========================================

Run the discrimination pipeline over the first members of both
families.  Each verdict comes with a certificate that is checked
independently before printing.
"""

import itertools

from clocklam import discrimination as disc
from clocklam import fpc
from clocklam.terms import pretty

bohm = {f"Y0 δ^{n}": fpc.bohm_fpc(n) for n in range(4)}
scott = {f"B Y0 S^{n} I": fpc.scott_fpc(n) for n in range(4)}

for family in (bohm, scott):
    for (na, a), (nb, b) in itertools.combinations(family.items(), 2):
        v = disc.discriminate(a, b)
        ok = disc.verify(a, b, v)
        label = getattr(v, "method", None) or getattr(v, "reason", "")
        print(f"{na:>14} vs {nb:<14} {v.verdict:<14} {label:<16} checked={ok}")

# counting steps is not always enough
cfg = disc.Config(mode="atomic")
y2, u2 = fpc.catalog_env()["Y2"], fpc.catalog_env()["U2"]
print()
print("Y2 vs U2, counts :", disc.discriminate(y2, u2).verdict)
v = disc.discriminate(y2, u2, cfg)
print("Y2 vs U2, atomic :", v.verdict, v.method)
print("  reduct of Y2   :", pretty(v.certificate.reduct_m.term, "unicode"))
print("  reduct of U2   :", pretty(v.certificate.reduct_n.term, "unicode"))
