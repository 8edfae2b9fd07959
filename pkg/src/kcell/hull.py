"""Convex hulls of point sets in the plane and in space.

Both routines work in floating point with a small orientation tolerance.
Inputs in this package come from continuous distributions (or are
deduplicated beforehand), so exact degeneracies are not expected.
"""

from __future__ import annotations

import numpy as np

ORIENT_EPS = 1e-12


class DegenerateHull(ValueError):
    """Raised when the points do not span the ambient space."""


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(points: np.ndarray, idx: np.ndarray, eps: float) -> list[int]:
    sub = points[idx]
    order = np.lexsort((sub[:, 1], sub[:, 0]))
    pts = sub.tolist()
    lower: list[int] = []
    for i in order.tolist():
        p = pts[i]
        while len(lower) >= 2 and _cross(pts[lower[-2]], pts[lower[-1]], p) <= eps:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in order[::-1].tolist():
        p = pts[i]
        while len(upper) >= 2 and _cross(pts[upper[-2]], pts[upper[-1]], p) <= eps:
            upper.pop()
        upper.append(i)
    return idx[lower[:-1] + upper[:-1]].tolist()


def _prefilter(points: np.ndarray, n_dirs: int = 128) -> np.ndarray | None:
    """Indices surviving an Akl-Toussaint style interior test, or None.

    Extreme points in ``n_dirs`` directions form an inscribed polygon; points
    strictly inside it cannot be hull vertices. Only used when the origin is
    inside that polygon, which makes the angular sector lookup valid.
    """
    theta = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    ext = np.argmax(points @ dirs.T, axis=0)
    keep = np.concatenate([[True], ext[1:] != ext[:-1]])
    ext = ext[keep]
    if len(ext) > 1 and ext[0] == ext[-1]:
        ext = ext[:-1]
    if len(ext) < 3:
        return None
    E = points[ext]
    En = np.roll(E, -1, axis=0)
    if np.any(E[:, 0] * En[:, 1] - E[:, 1] * En[:, 0] <= 0.0):
        return None
    ang = np.arctan2(E[:, 1], E[:, 0])
    start = int(np.argmin(ang))
    E = np.roll(E, -start, axis=0)
    ext = np.roll(ext, -start)
    ang = np.roll(ang, -start)
    if np.any(np.diff(ang) <= 0.0):
        return None
    pa = np.arctan2(points[:, 1], points[:, 0])
    j = np.searchsorted(ang, pa, side="right") - 1
    j[j < 0] = len(E) - 1
    a = E[j]
    b = E[(j + 1) % len(E)]
    cr = (b[:, 0] - a[:, 0]) * (points[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (points[:, 0] - a[:, 0])
    scale = np.max(np.abs(points))
    inside = cr > 1e-9 * scale * scale
    inside[ext] = False
    return np.flatnonzero(~inside)


def hull_2d(points: np.ndarray, eps: float = ORIENT_EPS) -> np.ndarray:
    """Indices of the hull vertices in counter-clockwise order.

    Collinear boundary points are dropped.
    """
    points = np.asarray(points, dtype=float)
    m = len(points)
    if m < 3:
        raise DegenerateHull("fewer than three points")
    idx = np.arange(m)
    # coarse then fine interior elimination
    for n_dirs, threshold in ((16, 256), (128, 64)):
        if len(idx) > threshold:
            keep = _prefilter(points[idx], n_dirs)
            if keep is not None:
                idx = idx[keep]
    scale = float(np.max(np.abs(points)))
    hull = _monotone_chain(points, idx, eps * scale * scale)
    if len(hull) < 3:
        raise DegenerateHull("points are collinear")
    return np.asarray(hull, dtype=int)


class Hull3D:
    """Triangulated convex hull of a 3-D point set, built incrementally.

    Faces are stored counter-clockwise seen from outside, so the normal
    ``(b-a) x (c-a)`` points outward. ``normals`` are unit vectors and
    ``offsets`` satisfy ``normals @ x <= offsets`` for all input points.
    """

    def __init__(self, points: np.ndarray, eps: float = ORIENT_EPS):
        P = np.asarray(points, dtype=float)
        if P.ndim != 2 or P.shape[1] != 3 or len(P) < 4:
            raise DegenerateHull("need at least four points in R^3")
        self.points = P
        scale = float(np.max(np.abs(P)))
        self._eps = eps * max(scale, 1e-300)
        self._faces = np.zeros((64, 3), dtype=int)
        self._normals = np.zeros((64, 3))
        self._offsets = np.zeros(64)
        self._alive = np.zeros(64, dtype=bool)
        self._n = 0
        self._edge: dict[tuple[int, int], int] = {}
        self._build()

    def _grow(self):
        cap = 2 * len(self._alive)
        for name in ("_faces", "_normals", "_offsets", "_alive"):
            old = getattr(self, name)
            new = np.zeros((cap,) + old.shape[1:], dtype=old.dtype)
            new[: len(old)] = old
            setattr(self, name, new)

    def _add_face(self, a: int, b: int, c: int):
        if self._n == len(self._alive):
            self._grow()
        P = self.points
        n = np.cross(P[b] - P[a], P[c] - P[a])
        norm = np.linalg.norm(n)
        n = n / norm if norm > 0 else n
        f = self._n
        self._faces[f] = (a, b, c)
        self._normals[f] = n
        self._offsets[f] = n @ P[a]
        self._alive[f] = True
        self._edge[(a, b)] = f
        self._edge[(b, c)] = f
        self._edge[(c, a)] = f
        self._n += 1

    def _initial_simplex(self):
        P = self.points
        i0 = int(np.argmin(P[:, 0]))
        d0 = np.linalg.norm(P - P[i0], axis=1)
        i1 = int(np.argmax(d0))
        if d0[i1] <= self._eps:
            raise DegenerateHull("all points coincide")
        line = P[i1] - P[i0]
        line = line / np.linalg.norm(line)
        rel = P - P[i0]
        perp = rel - np.outer(rel @ line, line)
        d1 = np.linalg.norm(perp, axis=1)
        i2 = int(np.argmax(d1))
        if d1[i2] <= self._eps:
            raise DegenerateHull("points are collinear")
        n = np.cross(P[i1] - P[i0], P[i2] - P[i0])
        n = n / np.linalg.norm(n)
        d2 = rel @ n
        i3 = int(np.argmax(np.abs(d2)))
        if abs(d2[i3]) <= self._eps:
            raise DegenerateHull("points are coplanar")
        if d2[i3] > 0:
            i1, i2 = i2, i1
        return i0, i1, i2, i3

    def _build(self):
        P = self.points
        i0, i1, i2, i3 = self._initial_simplex()
        # i3 lies below plane (i0, i1, i2) oriented by the swap above
        self._add_face(i0, i1, i2)
        self._add_face(i0, i3, i1)
        self._add_face(i1, i3, i2)
        self._add_face(i2, i3, i0)
        rest = np.setdiff1d(np.arange(len(P)), [i0, i1, i2, i3])
        rest = rest[np.argsort(-np.einsum("ij,ij->i", P[rest], P[rest]), kind="stable")]
        batch = 32
        pos = 0
        while pos < len(rest):
            chunk = rest[pos : pos + batch]
            pos += batch
            for p in chunk:
                self._insert(int(p))
            if pos < len(rest):
                tail = rest[pos:]
                m = self._n
                alive = self._alive[:m]
                dist = P[tail] @ self._normals[:m][alive].T - self._offsets[:m][alive]
                rest = np.concatenate([rest[:pos], tail[np.max(dist, axis=1) > self._eps]])
            batch *= 2

    def _insert(self, p: int):
        m = self._n
        x = self.points[p]
        vis = self._alive[:m] & (self._normals[:m] @ x - self._offsets[:m] > self._eps)
        if not vis.any():
            return
        horizon = []
        faces = self._faces
        for f in np.flatnonzero(vis):
            a, b, c = faces[f]
            for e0, e1 in ((a, b), (b, c), (c, a)):
                g = self._edge[(e1, e0)]
                if not vis[g]:
                    horizon.append((e0, e1))
        for f in np.flatnonzero(vis):
            a, b, c = faces[f]
            self._alive[f] = False
            for e in ((a, b), (b, c), (c, a)):
                if self._edge.get(e) == f:
                    del self._edge[e]
        for a, b in horizon:
            self._add_face(int(a), int(b), p)

    @property
    def faces(self) -> np.ndarray:
        return self._faces[: self._n][self._alive[: self._n]]

    @property
    def normals(self) -> np.ndarray:
        return self._normals[: self._n][self._alive[: self._n]]

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets[: self._n][self._alive[: self._n]]

    @property
    def vertices(self) -> np.ndarray:
        return np.unique(self.faces.ravel())

    def edges(self) -> np.ndarray:
        """Undirected hull edges as rows (a, b, face_left, face_right), a < b."""
        live = np.flatnonzero(self._alive[: self._n])
        remap = np.full(self._n, -1, dtype=int)
        remap[live] = np.arange(len(live))
        out = []
        for (a, b), f in self._edge.items():
            if a < b:
                out.append((a, b, remap[f], remap[self._edge[(b, a)]]))
        return np.asarray(out, dtype=int).reshape(-1, 4)
