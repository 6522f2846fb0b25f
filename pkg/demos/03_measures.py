"""Counting measure, upper density and quantitative recurrence."""

from fractions import Fraction

from deltaramsey import (
    counting_measure,
    cyclic,
    delta_measure_audit,
    fp_shift_corollary_check,
    quantitative_recurrence,
    upper_density,
)
from deltaramsey.measure import UpperDensity
from deltaramsey.semigroup import TruncatedNat

G = cyclic(5)
mu = counting_measure(G)
A = G.set({0, 1})

# Some direction h keeps at least mu(A)^2 / 3 of A after differentiating.
r = quantitative_recurrence(mu, G, A)
print("mu(A) =", r.mu_A, " bound =", r.bound)
for h, v in enumerate(r.values):
    mark = "good" if h in r.good_h else ""
    print(f"  h={h}  mu(d_h A) = {v}  {mark}")
print("clique size the bound feeds into:", r.ramsey_n)

# On Z_8 half the group supports finite-product shifts of length 2.
G8 = cyclic(8)
cert = fp_shift_corollary_check(counting_measure(G8), G8, G8.set({0, 1, 2, 3}), 2)
print("\ncertified prefix length:", cert.certified, "h =", cert.h)

# Upper density over a few windows of the truncated naturals.
N = TruncatedNat(100)
evens = N.set(range(0, 100, 2))
print("\nupper density of evens:", upper_density(evens, [(0, 10), (0, 50), (0, 100)]).value)

# Upper density is subadditive but not additive on translates; the audit
# reports where.
small = TruncatedNat(12)
prof = delta_measure_audit(UpperDensity(12, ((0, 4), (0, 12))), small)
for name, rep in prof.axioms.items():
    print(f"  {name:26s} holds={rep.holds} checked={rep.checked}")
assert Fraction(1, 2) == upper_density(evens, [(0, 100)]).value
