"""Derivatives, Delta-sets and recurrence degree on small cyclic groups.

Run with ``python demos/01_derivatives.py``.
"""

from deltaramsey import (
    cyclic,
    delta_set,
    derivation_tree,
    derivative,
    frechet_oracle,
    recurrence_profile,
    uniform_oracle,
)

G = cyclic(6)
A = G.set({0, 1, 2, 3})

# A derivative keeps the points of A whose step to the right stays in A.
print("A          =", A.to_list())
for g in G.elements():
    print(f"d_{g} A      =", derivative(G, A, g).to_list())

# Delta-sets collect the directions along which the derivative stays
# recurrent. The uniform oracle only calls the whole group Large, so Positive
# just means non-empty.
u = uniform_oracle(G)
for n in range(4):
    print(f"Delta^{n}(A) =", delta_set(G, A, n, u).to_list())

# The truncated cofinite oracle is stricter about what counts as Positive:
# a set needs at least two points.
f = frechet_oracle(6, 1)
prof = recurrence_profile(G, A, f, 4)
print("\nfrechet(6,1) profile:")
for row in prof.to_json()["degrees"]:
    print(f"  n={row['n']}  {row['verdict']:8s} {row['delta']}")
print("recurrence degree:", prof.degree)

# The derivation tree records every derivative path whose prefixes stay
# recurrent. Its Depth agrees with the recurrence degree.
tree = derivation_tree(G, A, f, 4)
print(f"\ntree: {len(tree)} nodes, Depth={tree.Depth}, shortest leaf={tree.depth}")
for path in sorted(tree.nodes, key=lambda p: (len(p), p))[:12]:
    nd = tree.nodes[path]
    print(f"  {path!s:12s} set={nd.set.to_list()} ext={nd.ext.to_list()}")
