"""Normalized Laplacian spectra, link spectral gaps and the Garland vanishing check."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .complex import SimplicialComplex, Simplex, is_pure, skeleton

ZERO_TOL = 1e-8


@dataclass(frozen=True)
class Graph:
    m: int
    edges: np.ndarray  # (E, 2), sorted pairs u < v, lexicographic

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if (e[:, 0] >= e[:, 1]).any():
                raise ValueError("edges must be pairs u < v (no self-loops)")
            if e.min() < 0 or e.max() >= self.m:
                raise ValueError("edge endpoint out of range")
            if np.unique(e, axis=0).shape[0] != e.shape[0]:
                raise ValueError("duplicate edge")
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, m: int, edges) -> "Graph":
        e = np.sort(np.asarray(edges, dtype=np.int64).reshape(-1, 2), axis=1)
        if e.size:
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
        return cls(m, e)

    @classmethod
    def complete(cls, m: int) -> "Graph":
        i, j = np.triu_indices(m, 1)
        return cls(m, np.column_stack([i, j]))

    @classmethod
    def from_complex(cls, X: SimplicialComplex) -> "Graph":
        return cls(X.n, X.faces(1))

    @property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.m)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.m, self.m))
        A[self.edges[:, 0], self.edges[:, 1]] = 1.0
        A[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return A

    def components(self) -> int:
        g = coo_matrix((np.ones(len(self.edges)), (self.edges[:, 0], self.edges[:, 1])),
                       shape=(self.m, self.m))
        return int(connected_components(g, directed=False)[0])


class NormalizedLaplacian(NamedTuple):
    matrix: np.ndarray
    vertices: np.ndarray  # original ids of the rows (non-isolated vertices)
    dropped_isolated: bool


def normalized_laplacian(G: Graph) -> NormalizedLaplacian:
    """I - D^{-1/2} A D^{-1/2} restricted to the non-isolated vertices."""
    deg = G.degrees
    keep = np.nonzero(deg > 0)[0]
    A = G.adjacency()[np.ix_(keep, keep)]
    s = 1.0 / np.sqrt(deg[keep])
    L = np.eye(len(keep)) - s[:, None] * A * s[None, :]
    return NormalizedLaplacian(L, keep, bool(len(keep) < G.m))


def jacobi_eigvalsh(S: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending."""
    A = np.array(S, dtype=float)
    m = A.shape[0]
    if m == 0:
        return np.empty(0)
    scale = max(np.abs(A).max(), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(A, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/cols p and q
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
    return np.sort(np.diag(A))


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    lambda2: float
    connected: bool

    def zero_multiplicity(self, tol: float = ZERO_TOL) -> int:
        return int(np.sum(np.abs(self.eigenvalues) < tol))


def spectrum(G: Graph, method: str = "lapack") -> SpectrumReport:
    """Normalized Laplacian eigenvalues and spectral gap of ``G``.

    ``lambda2`` is the second-smallest eigenvalue for a connected graph and 0
    otherwise; isolated vertices make a graph with other vertices disconnected.
    """
    L = normalized_laplacian(G)
    if method == "lapack":
        ev = np.linalg.eigvalsh(L.matrix) if L.matrix.size else np.empty(0)
    elif method == "jacobi":
        ev = jacobi_eigvalsh(L.matrix)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    ev = np.sort(ev)
    if G.m == 0:
        connected = False
    elif G.m == 1:
        connected = True
    else:
        connected = (not L.dropped_isolated) and G.components() == 1
    lam2 = float(ev[1]) if connected and len(ev) >= 2 else 0.0
    return SpectrumReport(ev, lam2, connected)


def spectral_gap(G: Graph) -> float:
    return spectrum(G).lambda2


def _cofaces(X: SimplicialComplex, k: int):
    """For each (k-2)-face: indices of the (k-1)- and k-faces containing it."""
    lower = X.faces(k - 2)
    nl = lower.shape[0]
    loc = X.locator(k - 2)

    def incidence(d):
        f = X.faces(d)
        drops = d - (k - 2)
        # every (k-2)-subface of a d-face is obtained by deleting `drops` vertices
        pairs_face, pairs_low = [], []
        for cols in combinations(range(d + 1), drops):
            sub = np.delete(f, cols, axis=1)
            pairs_low.append(loc.indices(sub))
            pairs_face.append(np.arange(f.shape[0]))
        if not pairs_low:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        return np.concatenate(pairs_low), np.concatenate(pairs_face)

    return nl, incidence(k - 1), incidence(k)


def link_graph(X: SimplicialComplex, sigma: Simplex) -> tuple[Graph, list[int]]:
    """1-skeleton of the link of ``sigma`` in the (|sigma|+1)-skeleton.

    Returns the graph and the original vertex ids of its vertices.
    """
    s = tuple(sigma)
    ds = len(s) - 1
    up1 = X.faces(ds + 1)
    m1 = np.ones(up1.shape[0], bool)
    for v in s:
        m1 &= (up1 == v).any(axis=1)
    verts = np.sort(up1[m1][~np.isin(up1[m1], s)])
    up2 = X.faces(ds + 2)
    m2 = np.ones(up2.shape[0], bool)
    for v in s:
        m2 &= (up2 == v).any(axis=1)
    rest = up2[m2][~np.isin(up2[m2], s)].reshape(-1, 2)
    relabel = {int(v): i for i, v in enumerate(verts)}
    edges = [(relabel[int(a)], relabel[int(b)]) for a, b in rest]
    return Graph.from_edges(len(verts), edges), verts.tolist()


@dataclass
class GarlandCertificate:
    certified: bool
    worst_gap: float | None
    failing_face: Simplex | None
    pure: bool
    threshold: float

    def to_dict(self) -> dict:
        return {"certified": self.certified, "worst_gap": self.worst_gap,
                "failing_face": list(self.failing_face) if self.failing_face is not None else None,
                "pure": self.pure, "threshold": self.threshold}


def garland_certificate(X: SimplicialComplex, k: int) -> GarlandCertificate:
    """Spectral certificate that H^{k-1}(X; Q) = 0.

    Certified iff the k-skeleton is pure k-dimensional and every (k-2)-face has
    a connected link graph with spectral gap above 1 - 1/k.
    """
    if k < 2:
        raise ValueError("k - 2 must be >= 0")
    Xk = skeleton(X, k)
    pure = is_pure(Xk, k)
    threshold = 1.0 - 1.0 / k
    worst = None
    failing = None
    for sigma in Xk.simplices(k - 2):
        G, _ = link_graph(Xk, sigma)
        gap = spectrum(G).lambda2
        if worst is None or gap < worst:
            worst = gap
        if failing is None and not gap > threshold:
            failing = sigma
    certified = pure and failing is None and worst is not None
    return GarlandCertificate(certified, worst, failing, pure, threshold)


@dataclass
class LinkRecord:
    face: Simplex
    L_sigma: int
    link_edges: int


def link_statistics(X: SimplicialComplex, k: int) -> list[LinkRecord]:
    """Vertex and edge counts of the link of every (k-2)-face of the k-skeleton."""
    L, E = link_counts(X, k)
    faces = X.simplices(k - 2)
    return [LinkRecord(f, int(a), int(b)) for f, a, b in zip(faces, L.tolist(), E.tolist())]


def link_counts(X: SimplicialComplex, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (L_sigma, link_edges) over the (k-2)-faces, in lexicographic order."""
    if k < 2:
        raise ValueError("k must be >= 2")
    nl, (low1, _), (low2, _) = _cofaces(X, k)
    L = np.bincount(low1, minlength=nl) if low1.size else np.zeros(nl, np.int64)
    E = np.bincount(low2, minlength=nl) if low2.size else np.zeros(nl, np.int64)
    return L, E
