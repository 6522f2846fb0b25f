"""Naive reference implementations on plain Python sets.

Written independently of the bitset engine: no memoisation and no shared
helpers, just the definitions spelled out. Used to cross-check the package.
"""

from fractions import Fraction


def z(n):
    """Addition table of Z_n as nested lists."""
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def preimage(table, A, g):
    return {h for h in range(len(table)) if table[h][g] in A}


def deriv(table, A, g):
    return set(A) & preimage(table, A, g)


def uniform_verdict(n, A):
    if len(A) == n:
        return "large"
    return "small" if not A else "neither"


def frechet_verdict(n, k, A):
    if n - len(A) <= k:
        return "large"
    return "small" if len(A) <= k else "neither"


def positive(verdict, A):
    return verdict(A) != "small"


def delta(table, A, n, verdict):
    """Delta^n(A) straight from the recursive definition."""
    A = set(A)
    if n == 0:
        return A
    return {g for g in range(len(table)) if recurrent(table, deriv(table, A, g), n - 1, verdict)}


def recurrent(table, A, n, verdict):
    return positive(verdict, delta(table, A, n, verdict))


def fp(table, seq):
    """Finite products, highest index on the left."""
    out = set()
    m = len(seq)
    for mask in range(1, 1 << m):
        acc = None
        for i in range(m - 1, -1, -1):
            if mask >> i & 1:
                acc = seq[i] if acc is None else table[acc][seq[i]]
        out.add(acc)
    return out


def counting(n, A):
    return Fraction(len(A), n)


def has_clique(R, A, n):
    """Is there (g_0..g_n) in A with R(g_j, g_i) for all i < j? Plain
    recursion over candidate tuples."""
    A = sorted(A)

    def extend(chosen):
        if len(chosen) == n + 1:
            return True
        return any(
            all(R[x][c] for c in chosen) and extend(chosen + [x]) for x in A
        )

    return extend([])
