"""Immutable simplicial complexes on the vertex set ``0..n-1``.

Faces of each dimension are kept as a lexicographically sorted integer array of
shape ``(f_d, d + 1)``.  Every vertex ``0..n-1`` is a 0-face, isolated or not.
"""
from __future__ import annotations

import json
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

Simplex = tuple[int, ...]

_INT = np.int64


def simplex(vertices: Iterable[int]) -> Simplex:
    """Validate and return a simplex as a strictly increasing tuple."""
    s = tuple(int(v) for v in vertices)
    if not s:
        raise ValueError("a simplex needs at least one vertex")
    if any(a >= b for a, b in zip(s, s[1:])):
        raise ValueError(f"simplex vertices must be strictly increasing: {s}")
    return s


def face_codes(faces: np.ndarray, n: int) -> np.ndarray:
    """Encode sorted vertex rows as base-``n`` integers.

    Lexicographic order of rows of equal length equals numeric order of codes.
    """
    faces = np.asarray(faces, dtype=_INT)
    width = faces.shape[1]
    if float(n) ** width >= 2.0**63:
        raise OverflowError(f"cannot encode {width}-vertex faces on {n} vertices in int64")
    codes = np.zeros(faces.shape[0], dtype=_INT)
    for j in range(width):
        codes = codes * n + faces[:, j]
    return codes


def drop_column(faces: np.ndarray, i: int) -> np.ndarray:
    """The faces obtained by deleting the i-th vertex of every row."""
    return np.delete(faces, i, axis=1)


def _lex_unique(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    return np.unique(rows, axis=0)


class FaceLocator:
    """Dense index of the faces of one dimension (lexicographic rank)."""

    def __init__(self, faces: np.ndarray, n: int):
        self.n = n
        self.codes = face_codes(faces, n)

    def __len__(self):
        return len(self.codes)

    def indices(self, faces: np.ndarray, strict: bool = True) -> np.ndarray:
        """Row indices of ``faces``; -1 for absent faces unless ``strict``."""
        q = face_codes(faces, self.n)
        pos = np.searchsorted(self.codes, q)
        pos_c = np.minimum(pos, max(len(self.codes) - 1, 0))
        found = (pos < len(self.codes)) & (self.codes[pos_c] == q) if len(self.codes) else np.zeros(len(q), bool)
        if strict and not found.all():
            missing = np.asarray(faces)[~found][0]
            raise KeyError(f"face {tuple(int(v) for v in missing)} not present")
        return np.where(found, pos, -1)

    def contains(self, faces: np.ndarray) -> np.ndarray:
        return self.indices(faces, strict=False) >= 0

    def index(self, s: Sequence[int]) -> int:
        return int(self.indices(np.array([s], dtype=_INT))[0])


class SimplicialComplex:
    """A downward-closed family of simplices on vertices ``0..n-1``.

    Instances are immutable; ``skeleton`` and ``link`` build new complexes.
    ``dim`` is the largest dimension holding at least one face.
    """

    __slots__ = ("n", "_faces", "_locators")

    def __init__(self, n: int, faces: Sequence[np.ndarray]):
        # `faces[d]` for d >= 1; faces[0] is rebuilt so every vertex is present
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = int(n)
        arrs = [np.arange(self.n, dtype=_INT).reshape(-1, 1)]
        for d, f in enumerate(faces[1:], start=1):
            a = np.ascontiguousarray(np.asarray(f, dtype=_INT).reshape(-1, d + 1))
            arrs.append(a)
        while len(arrs) > 1 and arrs[-1].shape[0] == 0:
            arrs.pop()
        for a in arrs:
            a.setflags(write=False)
        self._faces = tuple(arrs)
        self._locators: dict[int, FaceLocator] = {}

    # construction -----------------------------------------------------

    @classmethod
    def from_facets(cls, n: int, facets: Iterable[Sequence[int]]) -> "SimplicialComplex":
        """Downward closure of ``facets`` on ``n`` vertices."""
        by_dim: dict[int, set] = {}
        for facet in facets:
            s = simplex(facet)
            if s[0] < 0 or s[-1] >= n:
                raise ValueError(f"vertex id out of range [0, {n}): {s}")
            for size in range(2, len(s) + 1):
                by_dim.setdefault(size - 1, set()).update(combinations(s, size))
        top = max(by_dim, default=0)
        faces = [np.empty((0, 1), _INT)]
        for d in range(1, top + 1):
            rows = sorted(by_dim.get(d, ()))
            faces.append(np.array(rows, dtype=_INT).reshape(-1, d + 1))
        return cls(n, faces)

    @classmethod
    def from_arrays(cls, n: int, faces: Sequence[np.ndarray]) -> "SimplicialComplex":
        """Build from per-dimension face arrays, sorting and deduplicating rows.

        Downward closure is the caller's responsibility; see ``check_closure``.
        """
        fixed = [np.empty((0, 1), _INT)]
        for d, f in enumerate(faces[1:], start=1):
            fixed.append(_lex_unique(np.asarray(f, dtype=_INT).reshape(-1, d + 1)))
        return cls(n, fixed)

    # basic queries ------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self._faces) - 1

    def faces(self, d: int) -> np.ndarray:
        """Read-only ``(f_d, d+1)`` array of d-faces in lexicographic order."""
        if d < 0:
            raise ValueError("dimension must be >= 0")
        if d > self.dim:
            return np.empty((0, d + 1), _INT)
        return self._faces[d]

    def simplices(self, d: int) -> list[Simplex]:
        return [tuple(int(v) for v in row) for row in self.faces(d)]

    def f_vector(self) -> list[int]:
        return [int(a.shape[0]) for a in self._faces]

    def count(self, d: int) -> int:
        return int(self.faces(d).shape[0])

    def locator(self, d: int) -> FaceLocator:
        if d not in self._locators:
            self._locators[d] = FaceLocator(self.faces(d), max(self.n, 1))
        return self._locators[d]

    def __contains__(self, s) -> bool:
        s = tuple(s)
        if not s:
            return False
        d = len(s) - 1
        if d > self.dim or any(v < 0 or v >= self.n for v in s):
            return False
        return bool(self.locator(d).contains(np.array([s], dtype=_INT))[0])

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return (self.n == other.n and self.dim == other.dim
                and all(np.array_equal(a, b) for a, b in zip(self._faces, other._faces)))

    def __hash__(self):
        return hash((self.n, tuple(a.tobytes() for a in self._faces)))

    def __repr__(self):
        return f"SimplicialComplex(n={self.n}, f={self.f_vector()})"

    def check_closure(self) -> bool:
        """True iff every (d-1)-face of every stored d-face is stored."""
        for d in range(1, self.dim + 1):
            f = self.faces(d)
            if f.size and (f.min() < 0 or f.max() >= self.n):
                return False
            loc = self.locator(d - 1)
            for i in range(d + 1):
                if not loc.contains(drop_column(f, i)).all():
                    return False
        return True

    # serialization --------------------------------------------------------

    def facets(self) -> list[Simplex]:
        """Maximal faces of dimension >= 1, sorted lexicographically."""
        out: list[Simplex] = []
        for d in range(1, self.dim + 1):
            f = self.faces(d)
            out.extend(tuple(int(v) for v in row) for row in f[free_mask(self, d + 1)])
        out.sort()
        return out

    def to_dict(self, meta: dict | None = None) -> dict:
        return {"n": self.n, "facets": [list(s) for s in self.facets()], "meta": dict(meta or {})}

    def to_json(self, meta: dict | None = None) -> str:
        return json.dumps(self.to_dict(meta), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "SimplicialComplex":
        return cls.from_facets(int(data["n"]), data.get("facets", []))

    @classmethod
    def from_json(cls, text: str) -> "SimplicialComplex":
        return cls.from_dict(json.loads(text))


def skeleton(X: SimplicialComplex, k: int) -> SimplicialComplex:
    if k < 0:
        raise ValueError("k must be >= 0")
    if k >= X.dim:
        return X
    return SimplicialComplex(X.n, [X.faces(d) for d in range(k + 1)])


def f_vector(X: SimplicialComplex) -> list[int]:
    return X.f_vector()


def _containing(X: SimplicialComplex, sigma: Simplex, d: int) -> np.ndarray:
    f = X.faces(d)
    mask = np.ones(f.shape[0], dtype=bool)
    for v in sigma:
        mask &= (f == v).any(axis=1)
    return f[mask]


def link(X: SimplicialComplex, sigma: Sequence[int]) -> tuple[SimplicialComplex, dict[int, int]]:
    """Link of ``sigma`` with vertices relabelled densely.

    Returns the link and the map from old vertex ids to new ones.
    """
    s = simplex(sigma)
    if s not in X:
        raise KeyError(f"{s} is not a face of the complex")
    ds = len(s) - 1
    cofaces = _containing(X, s, ds + 1)
    keep = ~np.isin(cofaces, s)
    old = np.sort(cofaces[keep]) if cofaces.size else np.empty(0, _INT)
    mapping = {int(v): i for i, v in enumerate(old)}
    relabel = np.full(max(X.n, 1), -1, dtype=_INT)
    relabel[old] = np.arange(len(old))
    faces = [np.empty((0, 1), _INT)]
    for d in range(ds + 2, X.dim + 1):
        cf = _containing(X, s, d)
        rest = cf[~np.isin(cf, s)].reshape(cf.shape[0], d - ds)
        faces.append(relabel[rest])
    return SimplicialComplex.from_arrays(len(old), faces), mapping


def is_pure(X: SimplicialComplex, D: int) -> bool:
    """True iff every face lies in some D-face."""
    if D > X.dim:
        return X.n == 0
    if X.count(D) == 0:
        return X.n == 0
    if X.dim > D:
        return False
    return all(not free_mask(X, d + 1).any() for d in range(D))


def free_mask(X: SimplicialComplex, k: int) -> np.ndarray:
    """Boolean mask over the (k-1)-faces: True where the face lies in no k-face."""
    if k < 1:
        raise ValueError("k must be >= 1")
    lower = X.faces(k - 1)
    upper = X.faces(k)
    covered = np.zeros(lower.shape[0], dtype=bool)
    if upper.shape[0] and lower.shape[0]:
        loc = X.locator(k - 1)
        for i in range(k + 1):
            covered[loc.indices(drop_column(upper, i))] = True
    return ~covered


def free_faces(X: SimplicialComplex, k: int) -> list[Simplex]:
    f = X.faces(k - 1)[free_mask(X, k)]
    return [tuple(int(v) for v in row) for row in f]


def count_free_faces(X: SimplicialComplex, k: int) -> int:
    """N_{k-1}: number of (k-1)-faces contained in no k-face."""
    return int(free_mask(X, k).sum())


def _adjacency(X: SimplicialComplex) -> np.ndarray:
    A = np.zeros((X.n, X.n), dtype=bool)
    e = X.faces(1)
    A[e[:, 0], e[:, 1]] = True
    A[e[:, 1], e[:, 0]] = True
    return A


def boundary_candidates(X: SimplicialComplex, k: int, base: np.ndarray | None = None,
                        chunk: int = 1 << 22) -> np.ndarray:
    """All (k+1)-vertex sets whose full (k-1)-boundary lies in ``X``, lex ordered.

    Each candidate is a (k-1)-face ``tau`` of X extended by a vertex ``v > max(tau)``.
    ``base`` restricts the ``tau`` to a subset of the (k-1)-faces (kept in order).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = X.n
    if k == 1:
        if base is None:
            base = X.faces(0)
        i, j = np.nonzero(np.arange(n)[None, :] > base[:, :1])
        return np.column_stack([base[i, 0], j]).astype(_INT)
    if base is None:
        base = X.faces(k - 1)
    if base.shape[0] == 0:
        return np.empty((0, k + 1), _INT)
    A = _adjacency(X)
    above = np.arange(n)
    rows = max(1, chunk // max(n, 1))
    parts = []
    for start in range(0, base.shape[0], rows):
        tau = base[start:start + rows]
        m = above[None, :] > tau[:, -1:]
        for j in range(k):
            m &= A[tau[:, j]]
        r, v = np.nonzero(m)
        parts.append(np.column_stack([tau[r], v]))
    cand = np.concatenate(parts).astype(_INT) if parts else np.empty((0, k + 1), _INT)
    if k >= 3 and cand.shape[0]:
        # edges are already guaranteed by adjacency; check the remaining faces
        loc = X.locator(k - 1)
        ok = np.ones(cand.shape[0], dtype=bool)
        for i in range(k):
            ok &= loc.contains(drop_column(cand, i))
        cand = cand[ok]
    return cand


def unfilled_boundaries(X: SimplicialComplex, k: int) -> int:
    """M_{k-1}: unfilled k-simplex boundaries whose lexicographically first
    (k-1)-face is free."""
    if k < 1:
        raise ValueError("k must be >= 1")
    free = X.faces(k - 1)[free_mask(X, k)]
    if free.shape[0] == 0:
        return 0
    # the first (k-1)-face of a candidate is its prefix, so a free prefix also
    # rules out the k-simplex being present
    return int(boundary_candidates(X, k, base=free).shape[0])


def strong_components(X: SimplicialComplex, k: int) -> list[list[Simplex]]:
    """Partition the (k-1)-faces into classes chained by shared (k-2)-faces."""
    if k < 1:
        raise ValueError("k must be >= 1")
    faces = X.faces(k - 1)
    m = faces.shape[0]
    if m == 0:
        return []
    if k == 1:
        labels = np.zeros(m, dtype=_INT)
    else:
        loc = X.locator(k - 2)
        rows = np.concatenate([loc.indices(drop_column(faces, i)) for i in range(k)])
        cols = np.tile(np.arange(m), k)
        p = loc.codes.shape[0]
        # bipartite face/subface graph
        g = coo_matrix((np.ones(rows.shape[0]), (cols, m + rows)), shape=(m + p, m + p))
        _, lab = connected_components(g, directed=False)
        labels = lab[:m]
    groups: dict[int, list[Simplex]] = {}
    for lab, row in zip(labels.tolist(), faces.tolist()):
        groups.setdefault(lab, []).append(tuple(row))
    return sorted(groups.values())
