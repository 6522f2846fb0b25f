"""Extract a clique from a recurrent set, then audit the transcript.

The relation "differ" on Z_7 satisfies the hypothesis under the truncated
cofinite oracle: for every h except 0, R(g, g+h) holds for all g.
"""

from deltaramsey import (
    Relation,
    brute_force_clique,
    cyclic,
    delta_ramsey_witness,
    frechet_oracle,
    hypothesis_check,
    uniform_oracle,
    verify_transcript,
)

G = cyclic(7)
R = Relation.from_predicate(7, lambda a, b: a != b)

# The same relation is rejected by the uniform oracle, which needs R(., .h)
# to hold everywhere for all h, including h = 0.
print("uniform :", hypothesis_check(G, R, uniform_oracle(G)).to_json())
o = frechet_oracle(7, 1)
print("frechet :", hypothesis_check(G, R, o).to_json())

t = delta_ramsey_witness(G, R, 3, o)
print("\ndirections h:", t.h)
for m, (Am, Hm) in enumerate(zip(t.A_seq, t.H_seq)):
    print(f"  A_{m} = {Am.to_list()}   H_{m} = {Hm.to_list()}")
print("g =", t.g, " witness =", t.witness)

# The verifier recomputes everything from R and the directions alone.
print("verifier:", verify_transcript(G, R, G.full(), t, o) or "clean")
print("brute force:", brute_force_clique(R, G.full(), 3))

# Flip one edge of the witness and the verifier names it.
adj = R.adj.copy()
adj[t.witness[2], t.witness[0]] = False
print("after flip:", [p for p in verify_transcript(G, Relation(adj), None, t, o) if "clique" in p])
