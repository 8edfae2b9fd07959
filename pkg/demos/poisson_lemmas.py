"""The Poisson facts behind the asymptotics, checked exactly.

No sampling here: tails and mixtures are summed from the exact Poisson
distribution.
"""

from kcell import lemmas

for lam in (10, 100, 1000):
    r = lemmas.poisson_tail_bound_check(lam)
    print(f"lambda={lam:5d}: Chernoff bound checked at {r.checked} points, {r.violations} violations")

c = lemmas.concentration_check((10, 100, 1000))
print("P(|N - lambda + 1| > lambda^0.75):", ", ".join(f"{p:.2e}" for p in c.probabilities))

# averaging lambda^a / k^a over k ~ Poisson(lambda) tends to 1
for lam in (1e2, 1e3, 1e4):
    m = lemmas.poisson_mixing("a", 2 / 3, lam)
    print(f"lambda={lam:8.0f}: mixed value {m.value:.6f}")
