"""Facet counts and their link to the hitting functional.

Each facet of the cell comes from one hyperplane of the process, and the
hyperplanes that miss K but hit the cell are Poisson with mean 2n times
the hitting excess. Counting both sides over many replicates shows
E f = 2n E[dPhi] within Monte Carlo error.
"""

from kcell import Ball, Isotropic
from kcell.harness import efron_check, lemma41_check

K, D = Ball(1.0, 2), Isotropic(2)
r = efron_check(K, D, 100, 5000, seed=3)
print(f"E f - 2n E dPhi = {r.diff:.4f} +/- {r.se:.4f}  (zero within 3 se: {r.passed})")

# second factorial moment against the ordered-pair and halved forms
L = lemma41_check(K, D, 100, 5000, seed=3)
print(f"E f(f-1)               = {L.lhs:.1f}")
print(f"(2n)^2 E dPhi^2        = {L.rhs_ordered:.1f}  holds: {L.passed_ordered}")
print(f"(2n)^2 E dPhi^2 / 2    = {L.rhs_stated:.1f}  holds: {L.passed_stated}")
