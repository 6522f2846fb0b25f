"""Almost orthogonal families and the approximate Bessel chain.

Builds a family indexed by Z_8 from a random orthonormal basis plus noise of
size 1e-3, runs the difference-set argument end to end and prints every line
of the chain. Then checks the double-to-triple identity on rotations.
"""

import numpy as np

from deltaramsey import bessel_error_chain, cyclic, frechet_oracle, triple_identity_check
from deltaramsey.vdc import perturbed_orthonormal_family, rotation_action, vdc_experiment

rng = np.random.default_rng(2)
G = cyclic(8)
fam, Q = perturbed_orthonormal_family(8, 8, 1e-3, rng)
f = Q @ np.full(8, 0.3)

run = vdc_experiment(G, fam, f, frechet_oracle(8, 1), eps=0.25, hyp_eps=0.1)
print("hypothesis:", run.hypothesis.to_json())
print("bad set   :", run.conclusion.bad_set.to_list(), run.conclusion.verdict)
print("stage     :", run.stage)
for note in run.notes:
    print("  note:", note)

# The chain on eight rows directly.
chain = bessel_error_chain(fam.vectors, f, 1e-3)
for i, v in enumerate(chain.lines):
    print(f"  line {i}: {v: .12f}")
for rel in chain.relations:
    print(f"  {rel['rel']:7s} {rel['holds']}")
print("contradiction:", chain.contradiction, " anomaly:", chain.anomaly)

# Commuting rotations of Z_32 by Z_8.
act = rotation_action(8, 32, 4, 12)
f1, f2 = rng.standard_normal(32), rng.standard_normal(32)
rep = triple_identity_check(act, f1, f2, 3, 5)
print("\ntriple identity lines:", np.round(rep.lines, 12))
print("worst step residual  :", rep.residual)
