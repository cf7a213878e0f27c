"""Boundary matrices and Betti numbers over a characteristic-zero field."""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy import isprime, nextprime

from .complex import SimplicialComplex, drop_column

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SignedSparseMatrix:
    """Coordinate-format integer matrix with at most one entry per cell."""

    rows: int
    cols: int
    row: np.ndarray
    col: np.ndarray
    data: np.ndarray

    def to_dense(self) -> np.ndarray:
        M = np.zeros((self.rows, self.cols), dtype=np.int64)
        M[self.row, self.col] = self.data
        return M

    @property
    def T(self) -> "SignedSparseMatrix":
        return SignedSparseMatrix(self.cols, self.rows, self.col, self.row, self.data)

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def columns(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.cols)]
        for r, c, v in zip(self.row.tolist(), self.col.tolist(), self.data.tolist()):
            if v:
                out[c][r] = v
        return out

    @classmethod
    def from_dense(cls, M) -> "SignedSparseMatrix":
        M = np.asarray(M, dtype=np.int64)
        r, c = np.nonzero(M)
        return cls(M.shape[0], M.shape[1], r, c, M[r, c])


def boundary_matrix(X: SimplicialComplex, d: int) -> SignedSparseMatrix:
    """Matrix of the boundary map from d-chains to (d-1)-chains.

    Rows follow the lexicographic order of (d-1)-faces, columns that of d-faces;
    dropping vertex i of a face contributes (-1)^i.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    upper = X.faces(d)
    m = upper.shape[0]
    rows = X.count(d - 1)
    if m == 0:
        e = np.empty(0, np.int64)
        return SignedSparseMatrix(rows, 0, e, e, e)
    loc = X.locator(d - 1)
    r = np.concatenate([loc.indices(drop_column(upper, i)) for i in range(d + 1)])
    c = np.tile(np.arange(m, dtype=np.int64), d + 1)
    v = np.repeat(np.array([(-1) ** i for i in range(d + 1)], dtype=np.int64), m)
    order = np.lexsort((r, c))
    return SignedSparseMatrix(rows, m, r[order], c[order], v[order])


def coboundary_matrix(X: SimplicialComplex, d: int) -> SignedSparseMatrix:
    """Matrix of the coboundary from (d-1)-cochains to d-cochains (transpose)."""
    return boundary_matrix(X, d).T


def _reduce_columns(cols: list[dict[int, int]], modulus: int | None) -> int:
    # column reduction keyed on the lowest nonzero row; every surviving
    # pivot column is independent, so the pivot count is the rank
    pivots: dict[int, dict[int, int]] = {}
    for col in cols:
        c = dict(col)
        while c:
            low = max(c)
            piv = pivots.get(low)
            if piv is None:
                if modulus is None:
                    g = 0
                    for x in c.values():
                        g = math.gcd(g, x)
                    if g > 1:
                        c = {r: x // g for r, x in c.items()}
                pivots[low] = c
                break
            a, b = piv[low], c[low]
            if modulus is None:
                # c <- a*c - b*piv, then strip the content
                new = {r: a * x for r, x in c.items()}
                for r, x in piv.items():
                    y = new.get(r, 0) - b * x
                    if y:
                        new[r] = y
                    else:
                        new.pop(r, None)
                g = 0
                for x in new.values():
                    g = math.gcd(g, x)
                    if g == 1:
                        break
                c = {r: x // g for r, x in new.items()} if g > 1 else new
            else:
                f = b * pow(a, -1, modulus) % modulus
                for r, x in piv.items():
                    y = (c.get(r, 0) - f * x) % modulus
                    if y:
                        c[r] = y
                    else:
                        c.pop(r, None)
    return len(pivots)


def rank_exact(M: SignedSparseMatrix) -> int:
    """Rank over the rationals by fraction-free integer column reduction.

    Python integers are unbounded, so no overflow is possible.
    """
    if M.rows == 0 or M.cols == 0:
        return 0
    cols = M.columns() if M.rows >= M.cols else M.T.columns()
    return _reduce_columns(cols, None)


def rank_mod_p(M: SignedSparseMatrix, p: int) -> int:
    """Rank over GF(p) by sparse column reduction.  Never exceeds the rational rank."""
    if M.rows == 0 or M.cols == 0:
        return 0
    cols = M.columns() if M.rows >= M.cols else M.T.columns()
    return _reduce_columns([{r: v % p for r, v in c.items() if v % p} for c in cols], p)


def rank_mod_p_dense(M, p: int) -> int:
    """Rank over GF(p) by vectorised dense Gaussian elimination (p < 2**31)."""
    if p >= 1 << 31:
        raise ValueError("prime must be below 2**31 so products fit in int64")
    A = np.asarray(M.to_dense() if isinstance(M, SignedSparseMatrix) else M, dtype=np.int64) % p
    rows, cols = A.shape
    rank = 0
    for j in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(A[rank:, j])[0]
        if nz.size == 0:
            continue
        i = rank + nz[0]
        if i != rank:
            A[[rank, i]] = A[[i, rank]]
        inv = pow(int(A[rank, j]), -1, p)
        A[rank, j:] = A[rank, j:] * inv % p
        below = rank + 1 + np.nonzero(A[rank + 1:, j])[0]
        if below.size:
            A[np.ix_(below, np.arange(j, cols))] = (
                A[np.ix_(below, np.arange(j, cols))] - A[below, j:j + 1] * A[rank, j:]) % p
        rank += 1
    return rank


def random_prime(rng: random.Random | None = None, lo: int = 1 << 30, hi: int = 1 << 31) -> int:
    """A random prime in (lo, hi)."""
    rng = rng or random.Random()
    p = nextprime(rng.randrange(lo, hi - 1000))
    assert isprime(p) and lo < p < hi
    return int(p)


@dataclass
class BettiReport:
    f: list[int]
    rank_boundary: list[int]
    betti: list[int]
    euler: int
    prime: int | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {"f": self.f, "ranks": self.rank_boundary, "betti": self.betti, "euler": self.euler}


def boundary_ranks(X: SimplicialComplex, method: str = "exact", prime: int | None = None) -> list[int]:
    """[rank d_1, ..., rank d_dim] with the chosen rank routine."""
    if method == "exact":
        rank = rank_exact
    elif method == "modp":
        if prime is None:
            raise ValueError("modp needs a prime")
        def rank(M):
            return rank_mod_p(M, prime)
    else:
        raise ValueError(f"unknown rank method {method!r}")
    ranks = []
    for d in range(1, X.dim + 1):
        if d == 1:
            # the graph boundary has rank n - (number of components)
            ranks.append(X.n - _components(X))
        else:
            ranks.append(rank(boundary_matrix(X, d)))
    return ranks


def _components(X: SimplicialComplex) -> int:
    e = X.faces(1)
    g = coo_matrix((np.ones(e.shape[0]), (e[:, 0], e[:, 1])), shape=(X.n, X.n))
    return int(connected_components(g, directed=False)[0])


def betti(X: SimplicialComplex, method: str = "exact", prime: int | None = None,
          dims: int | None = None) -> BettiReport:
    """Unreduced Betti numbers beta^0..beta^dim over a characteristic-zero field.

    ``method="modp"`` ranks modulo ``prime`` (a random prime above 2**30 when
    omitted); its Betti numbers can only overshoot the rational ones.
    ``dims`` pads the report with zero dimensions up to that cap.
    """
    if method == "modp" and prime is None:
        prime = random_prime()
        log.info("betti: ranks modulo prime %d", prime)
    ranks = boundary_ranks(X, method, prime)
    f = X.f_vector()
    top = max(X.dim, dims or 0)
    f = f + [0] * (top + 1 - len(f))
    ranks = ranks + [0] * (top - len(ranks))
    r = [0] + ranks + [0]
    b = [f[d] - r[d] - r[d + 1] for d in range(top + 1)]
    euler = sum((-1) ** d * x for d, x in enumerate(f))
    assert euler == sum((-1) ** d * x for d, x in enumerate(b)), "Euler characteristic mismatch"
    return BettiReport(f, ranks, b, euler, prime if method == "modp" else None)
