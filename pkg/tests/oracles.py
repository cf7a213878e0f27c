"""Independent reference computations used only by the tests."""
from itertools import combinations
from math import exp, factorial

import sympy


def faces_by_dim(X):
    """Face lists rebuilt from the facets alone, via itertools."""
    out = {0: [(v,) for v in range(X.n)]}
    seen = set()
    for facet in X.facets():
        for r in range(2, len(facet) + 1):
            seen.update(combinations(facet, r))
    for s in seen:
        out.setdefault(len(s) - 1, []).append(s)
    return {d: sorted(v) for d, v in out.items()}


def dense_boundary(faces, d):
    rows = {s: i for i, s in enumerate(faces.get(d - 1, []))}
    cols = faces.get(d, [])
    M = sympy.zeros(len(rows), len(cols))
    for j, s in enumerate(cols):
        for i in range(len(s)):
            M[rows[s[:i] + s[i + 1:]], j] = (-1) ** i
    return M


def brute_betti(X):
    """dim ker - dim im with sympy's exact rational rank."""
    faces = faces_by_dim(X)
    top = max(faces)
    rank = {0: 0, top + 1: 0}
    for d in range(1, top + 1):
        M = dense_boundary(faces, d)
        rank[d] = M.rank() if M.rows and M.cols else 0
    return [len(faces[d]) - rank[d] - rank[d + 1] for d in range(top + 1)]


def poisson_pmf(k, mu):
    return exp(-mu) * mu ** k / factorial(k)


def brute_tv(counts, mu, K):
    """TV distance with bins 0..K and one merged tail, by explicit pmf sums."""
    T = len(counts)
    head = [poisson_pmf(j, mu) for j in range(K + 1)]
    expected = head + [1.0 - sum(head)]
    observed = [sum(1 for c in counts if c == j) / T for j in range(K + 1)]
    observed.append(sum(1 for c in counts if c > K) / T)
    return 0.5 * sum(abs(o - e) for o, e in zip(observed, expected))
