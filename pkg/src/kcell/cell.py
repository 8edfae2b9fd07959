"""The K-cell: intersection of the halfspaces containing K bounded by the
process hyperplanes that miss K.

In d <= 3 the cell is reconstructed through polar duality: with
p_i = u_i / tau_i, the cell is the polar of conv{p_i}. Its facets are the
hull vertices, its vertices the polars of the hull facets. In higher
dimensions only LP-based queries are available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .geometry import ConvexBody
from .hull import DegenerateHull, Hull3D, hull_2d
from .process import ArrivalStream, ProcessConfig, sample_window

DEDUP_ANGLE = 1e-12
FACET_TOL = 1e-9


class UnboundedCell(ValueError):
    """The halfspaces do not cut out a bounded region."""


@dataclass(frozen=True)
class Cell:
    normals: np.ndarray
    offsets: np.ndarray
    facet_flags: np.ndarray
    dim: int
    vertices: np.ndarray | None = None
    window: float = math.inf
    truncated: bool = False
    heuristic_window: bool = False
    # d = 3: rows (vertex_a, vertex_b, facet_i, facet_j) per edge
    edges: np.ndarray | None = field(default=None, repr=False)
    # d = 2: facet index between vertex k and k+1 (counter-clockwise order)
    ring: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_facets(self) -> int:
        return int(np.count_nonzero(self.facet_flags))

    @property
    def facet_normals(self) -> np.ndarray:
        return self.normals[self.facet_flags]

    @property
    def facet_offsets(self) -> np.ndarray:
        return self.offsets[self.facet_flags]

    def circumradius(self) -> float:
        if self.vertices is None:
            raise ValueError("circumradius needs the vertex representation")
        return float(np.linalg.norm(self.vertices, axis=1).max())


def dedup_normals(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Mask keeping, among parallel normals, the hyperplane of smallest offset."""
    m = len(offsets)
    keep = np.ones(m, dtype=bool)
    if m < 2:
        return keep
    order = np.lexsort(tuple(normals.T[::-1]))
    U = normals[order]
    same = np.all(np.abs(np.diff(U, axis=0)) < DEDUP_ANGLE, axis=1)
    if not same.any():
        return keep
    group = np.concatenate([[0], np.cumsum(~same)])
    for g in np.unique(group[1:][same]):
        members = order[group == g]
        best = members[np.argmin(offsets[members])]
        keep[members] = False
        keep[best] = True
    return keep


class _Dual:
    """Result of a dual hull computation on the deduplicated halfspaces."""

    __slots__ = ("hull", "vertices", "struct", "bounded")

    def __init__(self, hull, vertices=None, struct=None, bounded=False):
        self.hull = hull
        self.vertices = vertices
        self.struct = struct
        self.bounded = bounded


def _dual(U: np.ndarray, T: np.ndarray, idx: np.ndarray, structure: bool) -> _Dual:
    """Dual hull of the points U[idx] / T[idx]; indices refer to U."""
    d = U.shape[1]
    P = U[idx] / T[idx, None]
    if len(idx) < d + 1:
        return _Dual(idx)
    try:
        if d == 2:
            h = hull_2d(P)
            a, b = P[h], P[np.roll(h, -1)]
            nrm = np.column_stack([b[:, 1] - a[:, 1], a[:, 0] - b[:, 0]])
            off = np.einsum("ij,ij->i", nrm, a)
            scale = np.linalg.norm(nrm, axis=1) * np.linalg.norm(a, axis=1)
            if np.any(off <= 1e-12 * scale):
                return _Dual(idx[h])
            # vertex k lies on facets h[k] and h[k+1]; ring[k] = facet after vertex k
            return _Dual(idx[h], nrm / off[:, None], idx[np.roll(h, -1)], True)
        hull = Hull3D(P)
    except DegenerateHull:
        return _Dual(idx)
    hv = idx[hull.vertices]
    off = hull.offsets
    if np.any(off <= 1e-12 * np.linalg.norm(P, axis=1).max()):
        return _Dual(hv)
    struct = None
    if structure:
        e = hull.edges()
        struct = np.column_stack([e[:, 2], e[:, 3], idx[e[:, 0]], idx[e[:, 1]]])
    return _Dual(hv, hull.normals / off[:, None], struct, True)


def _check_input(U, T):
    m, d = U.shape if U.ndim == 2 else (0, 0)
    if d not in (2, 3):
        raise ValueError("dual hull reconstruction needs d in {2, 3}")
    if np.any(T <= 0):
        raise ValueError("offsets must be positive")


def dual_hull_reconstruct(normals, offsets, want_structure: bool = False):
    """Vertices and facet flags of the intersection of {<x, u_i> <= tau_i}.

    Requires d in {2, 3} and all tau_i > 0. Raises :class:`UnboundedCell`
    when the origin is not interior to the hull of the dual points.
    With ``want_structure`` also returns the d=2 ring or d=3 edge table.
    """
    U = np.asarray(normals, dtype=float)
    T = np.asarray(offsets, dtype=float)
    _check_input(U, T)
    res = _dual(U, T, np.flatnonzero(dedup_normals(U, T)), want_structure)
    if not res.bounded:
        raise UnboundedCell("origin not interior to the dual hull")
    flags = np.zeros(len(T), dtype=bool)
    flags[res.hull] = True
    if want_structure:
        return res.vertices, flags, res.struct
    return res.vertices, flags


def _make_cell(U, T, res: _Dual, window: float) -> Cell:
    flags = np.zeros(len(T), dtype=bool)
    flags[res.hull] = True
    if U.shape[1] == 2:
        return Cell(U, T, flags, 2, res.vertices, window, ring=res.struct)
    return Cell(U, T, flags, 3, res.vertices, window, edges=res.struct)


def cell_from_halfspaces(normals, offsets, window: float = math.inf, truncated: bool = False) -> Cell:
    """Build a :class:`Cell` directly from given halfspaces (d <= 3 exact)."""
    U = np.asarray(normals, dtype=float)
    T = np.asarray(offsets, dtype=float)
    d = U.shape[1]
    if d <= 3:
        _check_input(U, T)
        res = _dual(U, T, np.flatnonzero(dedup_normals(U, T)), True)
        if not res.bounded:
            raise UnboundedCell("origin not interior to the dual hull")
        return _make_cell(U, T, res, window)
    flags = lp_facet_flags(U, T)
    return Cell(U, T, flags, d, None, window, truncated)


class _Incremental:
    """Dual hull maintained across window extensions.

    Points strictly inside an earlier hull stay inside after more points
    are added, so each round only needs the previous hull vertices and the
    newly drawn hyperplanes.
    """

    def __init__(self, dim: int, dedup: bool):
        self.U = np.zeros((0, dim))
        self.T = np.zeros(0)
        self.cand = np.zeros(0, dtype=int)
        self.dedup = dedup

    def extend(self, u: np.ndarray, tau: np.ndarray) -> _Dual:
        m = len(self.T)
        self.U = np.vstack([self.U, u])
        self.T = np.concatenate([self.T, tau])
        idx = np.concatenate([self.cand, np.arange(m, len(self.T))])
        if self.dedup:
            idx = idx[dedup_normals(self.U[idx], self.T[idx])]
        res = _dual(self.U, self.T, idx, True)
        self.cand = res.hull
        return res


def lp_support(normals, offsets, u) -> float:
    try:
        return lp.maximize(u, normals, offsets).value
    except lp.Unbounded:
        return math.inf


def lp_facet_flags(normals, offsets, tol: float = FACET_TOL) -> np.ndarray:
    """Facet iff max <x, u_i> over the other halfspaces exceeds tau_i."""
    U = np.asarray(normals, dtype=float)
    T = np.asarray(offsets, dtype=float)
    keep = dedup_normals(U, T)
    flags = np.zeros(len(T), dtype=bool)
    for i in np.flatnonzero(keep):
        others = keep.copy()
        others[i] = False
        val = lp_support(U[others], T[others], U[i])
        flags[i] = val > T[i] + tol
    return flags


def cell_support(cell: Cell, u) -> float | np.ndarray:
    u = np.asarray(u, dtype=float)
    if cell.truncated:
        raise ValueError("support of a truncated cell is not defined")
    if cell.vertices is not None:
        return np.max(u @ cell.vertices.T, axis=-1)
    if u.ndim == 1:
        val = lp_support(cell.facet_normals, cell.facet_offsets, u)
        if math.isinf(val):
            raise lp.Unbounded("cell is unbounded in this direction")
        return val
    return np.array([cell_support(cell, v) for v in u])


def facet_count(cell: Cell) -> int:
    return cell.n_facets


def _certificate_directions(d: int) -> np.ndarray:
    rng = np.random.default_rng(7919)
    g = rng.standard_normal((1000, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack([np.eye(d), -np.eye(d), g])


def _max_gap(cell_vertices: np.ndarray, body: ConvexBody, dist) -> float:
    """sup over directions in the support of phi of h(Z, u) - h(K, u)."""
    if dist.is_atomic:
        U = dist.directions
        return float(np.max(np.max(U @ cell_vertices.T, axis=1) - body.support(U)))
    return float(np.max(body.distance(cell_vertices)))


def build_cell(cfg: ProcessConfig, rng: np.random.Generator, phi_k: float | None = None) -> Cell:
    """Exact sample of the K-cell of the process with intensity ``cfg.intensity``.

    Hyperplanes are generated in increasing order of tau (window sampler)
    or of tau - h(K, u) (shell sampler). Generation stops once the cell
    built so far provably equals the cell of the full process: every
    hyperplane not yet drawn lies beyond the current cell.
    """
    if cfg.sampler == "shell":
        return _build_shell(cfg, rng)
    return _build_window(cfg, rng, phi_k)


def _build_window(cfg: ProcessConfig, rng, phi_k):
    body = cfg.body
    d = cfg.dim
    r0 = body.circumradius
    first = sample_window(cfg, r0, rng, phi_k=phi_k)
    stream = ArrivalStream(2.0 * cfg.intensity, cfg.dist, rng, start=r0)
    R = cfg.window0
    if d > 3:
        return _build_window_lp(cfg, first, stream, R)
    inc = _Incremental(d, cfg.dist.is_atomic)
    inc.extend(first.normals, first.offsets)
    seen = 0
    for step in range(cfg.max_doublings + 1):
        tau, u = stream.upto(R)
        res = inc.extend(u[seen:], tau[seen:])
        seen = len(tau)
        if res.bounded and np.max(np.linalg.norm(res.vertices, axis=1)) < R:
            return _make_cell(inc.U, inc.T, res, R)
        if step < cfg.max_doublings:
            R *= cfg.growth_factor
    return Cell(inc.U, inc.T, np.zeros(len(inc.T), dtype=bool), d, None, R, truncated=True)


def _build_window_lp(cfg, first, stream, R):
    d = cfg.dim
    grid = _certificate_directions(d)
    for step in range(cfg.max_doublings + 1):
        tau, u = stream.upto(R)
        U = np.vstack([first.normals, u])
        T = np.concatenate([first.offsets, tau])
        if len(T) > d:
            flags = lp_facet_flags(U, T)
            vals = [lp_support(U[flags], T[flags], g) for g in grid]
            if max(vals) < R * (1 - 1e-6):
                return Cell(U, T, flags, d, None, R, heuristic_window=True)
        if step < cfg.max_doublings:
            R *= cfg.growth_factor
    return Cell(U, T, np.zeros(len(T), dtype=bool), d, None, R, truncated=True, heuristic_window=True)


def _build_shell(cfg: ProcessConfig, rng):
    body = cfg.body
    stream = ArrivalStream(2.0 * cfg.intensity, cfg.dist, rng, start=0.0)
    inc = _Incremental(cfg.dim, cfg.dist.is_atomic)
    gap = cfg.gap0
    seen = 0
    for step in range(cfg.max_doublings + 1):
        g, u = stream.upto(gap)
        u = u[seen:]
        res = inc.extend(u, body.support(u) + g[seen:] if len(u) else np.zeros(0))
        seen = len(g)
        if res.bounded and _max_gap(res.vertices, body, cfg.dist) < gap:
            return _make_cell(inc.U, inc.T, res, gap)
        if step < cfg.max_doublings:
            gap *= cfg.growth_factor
    return Cell(inc.U, inc.T, np.zeros(len(inc.T), dtype=bool), cfg.dim, None, gap, truncated=True)
