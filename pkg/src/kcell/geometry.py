"""Fixed convex bodies K and the elementary geometry around them.

Every body is centred so that its centroid is the origin. Bodies are
immutable after construction and may be shared freely between replicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sphere
from .hull import Hull3D, hull_2d

GEOM_TOL = 1e-9
MIN_SCALE, MAX_SCALE = 1e-3, 1e3


class BodyError(ValueError):
    """Invalid body description."""


class UnsupportedVariant(BodyError):
    """The requested operation is not available for this kind of body."""


@dataclass(frozen=True)
class Hyperplane:
    """H(u, tau) = {x : <x, u> = tau} with a unit normal ``u``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        u = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError("hyperplane normal must be a unit vector")
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "offset", float(self.offset))

    def misses(self, body: "ConvexBody") -> bool:
        return self.offset > body.support(self.normal)


@dataclass(frozen=True)
class BoundaryQuadrature:
    """Nodes on the boundary of K for integrals against Hausdorff measure.

    ``points[i]`` lies on the boundary, ``normals[i]`` is the outer unit
    normal there, ``curvature[i]`` the Gauss-Kronecker curvature and
    ``weights[i]`` the surface weight.
    """

    points: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    weights: np.ndarray

    @property
    def surface_area(self) -> float:
        return float(self.weights.sum())


def _unit(u):
    u = np.asarray(u, dtype=float)
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


class ConvexBody:
    """Base class. Subclasses provide ``support`` and ``distance``."""

    dim: int
    spec: str = ""

    def support(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def circumradius(self) -> float:
        raise NotImplementedError

    def distance(self, x: np.ndarray) -> np.ndarray:
        """Euclidean distance from points ``x`` (shape (..., d)) to the body."""
        raise NotImplementedError

    def contains(self, x: np.ndarray, tol: float = GEOM_TOL) -> np.ndarray:
        return self.distance(x) <= tol

    def boundary_quadrature(self, resolution: int) -> BoundaryQuadrature:
        raise UnsupportedVariant(f"{type(self).__name__} has no boundary parametrization")

    @property
    def is_polytope(self) -> bool:
        return False

    def mean_width(self) -> float:
        from .functionals import mean_width

        return mean_width(self)

    def _check_scale(self):
        r = self.circumradius
        if not (MIN_SCALE <= r <= MAX_SCALE):
            raise BodyError(f"circumradius {r:g} outside [{MIN_SCALE:g}, {MAX_SCALE:g}]")

    def __repr__(self):
        return f"{type(self).__name__}({self.spec or self.dim})"


class Ellipsoid(ConvexBody):
    """Axis-parallel ellipsoid with the given semiaxes (a ball if all equal)."""

    def __init__(self, semiaxes):
        a = np.asarray(semiaxes, dtype=float)
        if a.ndim != 1 or len(a) < 2 or np.any(a <= 0) or not np.all(np.isfinite(a)):
            raise BodyError("semiaxes must be positive and at least two")
        self.semiaxes = a
        self.dim = len(a)
        self.spec = "ellipsoid:" + ",".join(f"{x:g}" for x in a)
        self._check_scale()

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return np.sqrt(np.sum((self.semiaxes * u) ** 2, axis=-1))

    @property
    def circumradius(self):
        return float(self.semiaxes.max())

    def support_point(self, u):
        """The boundary point with outer normal ``u`` (gradient of h)."""
        u = np.asarray(u, dtype=float)
        return self.semiaxes**2 * u / self.support(u)[..., None]

    def curvature_at_normal(self, u):
        a2 = np.prod(self.semiaxes**2)
        return self.support(u) ** (self.dim + 1) / a2

    def distance(self, x, iters: int = 60):
        x = np.asarray(x, dtype=float)
        a2 = self.semiaxes**2
        out = np.zeros(x.shape[:-1])
        level = np.sum(x**2 / a2, axis=-1)
        outside = level > 1.0
        if not np.any(outside):
            return out
        xo = x[outside]
        # Newton on g(t) = sum a^2 x^2 / (a^2 + t)^2 - 1, convex decreasing on t >= 0
        t = np.zeros(len(xo))
        for _ in range(iters):
            den = a2 + t[:, None]
            g = np.sum(a2 * xo**2 / den**2, axis=-1) - 1.0
            dg = -2.0 * np.sum(a2 * xo**2 / den**3, axis=-1)
            step = g / dg
            t = t - step
            if np.all(np.abs(step) <= 1e-15 * (1.0 + t)):
                break
        y = a2 * xo / (a2 + t[:, None])
        out[outside] = np.linalg.norm(xo - y, axis=-1)
        return out

    def boundary_quadrature(self, resolution: int) -> BoundaryQuadrature:
        """Nodes placed by the Gauss map: x(u) = grad h(u), dH = du / kappa."""
        if resolution < 8:
            raise ValueError("resolution must be at least 8")
        if self.dim > 3:
            raise UnsupportedVariant("boundary quadrature only for d <= 3")
        u, w = sphere.smooth_rule(self.dim, resolution)
        kappa = self.curvature_at_normal(u)
        weights = w * sphere.sphere_area(self.dim) / kappa
        return BoundaryQuadrature(self.support_point(u), u, kappa, weights)


class Ball(Ellipsoid):
    def __init__(self, radius: float, dim: int):
        if dim < 2:
            raise BodyError("dimension must be at least 2")
        super().__init__(np.full(dim, float(radius)))
        self.radius = float(radius)
        self.spec = f"ball:{radius:g}"

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return np.full(u.shape[:-1], self.radius) if u.ndim > 1 else self.radius

    def distance(self, x):
        return np.maximum(np.linalg.norm(x, axis=-1) - self.radius, 0.0)


def _polygon_centroid(V):
    x, y = V[:, 0], V[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    area = cr.sum() / 2.0
    return np.array([((x + xn) * cr).sum(), ((y + yn) * cr).sum()]) / (6.0 * area), area


class Polytope(ConvexBody):
    """Convex hull of a vertex list, translated so its centroid is the origin.

    In d=2 the vertices are stored counter-clockwise; in d=3 the boundary is
    triangulated and coplanar triangles are merged into facets.
    """

    def __init__(self, vertices, center: bool = True, spec: str = ""):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] < 2 or not np.all(np.isfinite(V)):
            raise BodyError("vertices must be a finite (m, d) array")
        self.dim = V.shape[1]
        if len(V) < self.dim + 1:
            raise BodyError("too few vertices for a full-dimensional polytope")
        self.spec = spec or f"polytope[{len(V)}]"
        try:
            if self.dim == 2:
                V = V[hull_2d(V)]
                if center:
                    c, _ = _polygon_centroid(V)
                    V = V - c
            elif self.dim == 3:
                h = Hull3D(V)
                V = V[h.vertices]
                if center:
                    h = Hull3D(V)
                    P = h.points
                    tri = P[h.faces]
                    ref = P.mean(axis=0)
                    tri_c = (tri.sum(axis=1) + ref) / 4.0
                    vol = np.einsum("ij,ij->i", tri[:, 0] - ref, np.cross(tri[:, 1] - ref, tri[:, 2] - ref)) / 6.0
                    V = V - (vol[:, None] * tri_c).sum(axis=0) / vol.sum()
            elif center:
                V = V - V.mean(axis=0)
        except ValueError as exc:
            raise BodyError(f"polytope is not full-dimensional: {exc}") from None
        self.vertices = V
        self._setup_faces()
        if np.any(self.facet_offsets <= GEOM_TOL):
            raise BodyError("origin is not interior to the polytope")
        self._check_scale()

    def _setup_faces(self):
        V = self.vertices
        if self.dim == 2:
            E = np.roll(V, -1, axis=0) - V
            n = np.column_stack([E[:, 1], -E[:, 0]])
            n /= np.linalg.norm(n, axis=1, keepdims=True)
            self.facet_normals = n
            self.facet_offsets = np.einsum("ij,ij->i", n, V)
        elif self.dim == 3:
            h = Hull3D(V)
            self._hull = h
            self.triangles = h.faces
            normals, offsets = [], []
            for n, o in zip(h.normals, h.offsets):
                if not any(np.dot(n, m) > 1 - 1e-9 for m in normals):
                    normals.append(n)
                    offsets.append(o)
            self.facet_normals = np.asarray(normals)
            self.facet_offsets = np.asarray(offsets)
        else:
            self.facet_normals = np.zeros((0, self.dim))
            self.facet_offsets = np.ones(1)

    @property
    def is_polytope(self):
        return True

    @property
    def n_facets(self) -> int:
        return len(self.facet_normals)

    @property
    def is_simplicial(self) -> bool:
        if self.dim == 2:
            return True
        if self.dim == 3:
            return self.n_facets == len(self.triangles)
        return len(self.vertices) == self.dim + 1

    def support(self, u):
        return np.max(np.asarray(u, dtype=float) @ self.vertices.T, axis=-1)

    @property
    def circumradius(self):
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.dim)
        if self.dim == 2:
            out = _dist_polygon(flat, self.vertices)
        elif self.dim == 3:
            out = _dist_triangles(flat, self.vertices[self.triangles])
        else:
            raise UnsupportedVariant("polytope distance only for d <= 3")
        inside = np.all(flat @ self.facet_normals.T <= self.facet_offsets + GEOM_TOL, axis=1)
        out[inside] = 0.0
        return out.reshape(x.shape[:-1])

    def boundary_quadrature(self, resolution: int) -> BoundaryQuadrature:
        """Facet-interior Gauss nodes; curvature vanishes there."""
        if resolution < 8:
            raise ValueError("resolution must be at least 8")
        if self.dim == 2:
            V = self.vertices
            k = max(2, resolution // len(V))
            s, ws = np.polynomial.legendre.leggauss(k)
            s, ws = (s + 1) / 2, ws / 2
            pts, nrm, wts = [], [], []
            for i in range(len(V)):
                a, b = V[i], V[(i + 1) % len(V)]
                pts.append(a + np.outer(s, b - a))
                nrm.append(np.repeat(self.facet_normals[i][None], k, axis=0))
                wts.append(ws * np.linalg.norm(b - a))
        elif self.dim == 3:
            tri = self.vertices[self.triangles]
            bary = np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]])
            pts, nrm, wts = [], [], []
            for t, n in zip(tri, self._hull.normals):
                area = np.linalg.norm(np.cross(t[1] - t[0], t[2] - t[0])) / 2
                pts.append(bary @ t)
                nrm.append(np.repeat(n[None], 3, axis=0))
                wts.append(np.full(3, area / 3))
        else:
            raise UnsupportedVariant("boundary quadrature only for d <= 3")
        pts, nrm, wts = np.vstack(pts), np.vstack(nrm), np.concatenate(wts)
        return BoundaryQuadrature(pts, nrm, np.zeros(len(wts)), wts)


class Cube(Polytope):
    def __init__(self, half_side: float, dim: int):
        if dim < 2 or dim > 10:
            raise BodyError("cube dimension must be in [2, 10]")
        a = float(half_side)
        if a <= 0:
            raise BodyError("half-side must be positive")
        grid = np.array(np.meshgrid(*[[-a, a]] * dim, indexing="ij")).reshape(dim, -1).T
        self.half_side = a
        super().__init__(grid, center=False, spec=f"cube:{a:g}")
        self.facet_normals = np.vstack([np.eye(dim), -np.eye(dim)])
        self.facet_offsets = np.full(2 * dim, a)

    @property
    def is_simplicial(self):
        return self.dim == 2

    def support(self, u):
        return self.half_side * np.sum(np.abs(np.asarray(u, dtype=float)), axis=-1)

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - np.clip(x, -self.half_side, self.half_side), axis=-1)


def regular_simplex_vertices(d: int, scale: float = 1.0) -> np.ndarray:
    """Vertices of a regular d-simplex with circumradius ``scale``, centroid 0."""
    if d == 2:
        ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
        V = np.column_stack([np.cos(ang), np.sin(ang)])
    elif d == 3:
        V = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(3)
    else:
        E = np.eye(d + 1) - 1.0 / (d + 1)
        # orthonormal basis of the sum-zero hyperplane
        Q, _ = np.linalg.qr(E[:, :d])
        V = E @ Q
        V /= np.linalg.norm(V[0])
    return scale * V


class Simplex(Polytope):
    def __init__(self, dim: int, scale: float = 1.0):
        if dim < 2:
            raise BodyError("simplex dimension must be at least 2")
        super().__init__(regular_simplex_vertices(dim, scale), center=False, spec=f"simplex:{dim},{scale:g}")
        if dim > 3:
            self.facet_normals = -self.vertices / np.linalg.norm(self.vertices, axis=1, keepdims=True)
            self.facet_offsets = np.full(dim + 1, scale / dim)


def _dist_polygon(X, V):
    A = V
    B = np.roll(V, -1, axis=0)
    AB = B - A
    rel = X[:, None, :] - A[None]
    t = np.clip(np.einsum("mkd,kd->mk", rel, AB) / np.einsum("kd,kd->k", AB, AB), 0.0, 1.0)
    proj = A[None] + t[..., None] * AB[None]
    return np.min(np.linalg.norm(X[:, None, :] - proj, axis=-1), axis=1)


def _closest_on_triangle(p, a, b, c):
    """Closest points on triangle (a, b, c) to each row of ``p`` (Ericson)."""
    ab, ac = b - a, c - a
    ap = p - a
    d1, d2 = ap @ ab, ap @ ac
    bp = p - b
    d3, d4 = bp @ ab, bp @ ac
    cp = p - c
    d5, d6 = cp @ ab, cp @ ac
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4
    denom = va + vb + vc
    with np.errstate(divide="ignore", invalid="ignore"):
        v = vb / denom
        w = vc / denom
        out = a + v[:, None] * ab + w[:, None] * ac
        # edge ab
        m = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
        t = d1 / (d1 - d3)
        out[m] = a + t[m, None] * ab
        # edge ac
        m = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
        t = d2 / (d2 - d6)
        out[m] = a + t[m, None] * ac
        # edge bc
        m = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        out[m] = b + t[m, None] * (c - b)
    out[(d1 <= 0) & (d2 <= 0)] = a
    out[(d3 >= 0) & (d4 <= d3)] = b
    out[(d6 >= 0) & (d5 <= d6)] = c
    return out


def _dist_triangles(X, tris):
    best = np.full(len(X), np.inf)
    for a, b, c in tris:
        q = _closest_on_triangle(X, a, b, c)
        best = np.minimum(best, np.linalg.norm(X - q, axis=1))
    return best


def support(body: ConvexBody, u) -> float | np.ndarray:
    return body.support(u)


def circumradius(body: ConvexBody) -> float:
    return body.circumradius


def boundary_quadrature(body: ConvexBody, resolution: int) -> BoundaryQuadrature:
    return body.boundary_quadrature(resolution)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise BodyError(f"cannot parse numbers from {text!r}") from None


def parse_body(text: str, dim: int | None = None) -> ConvexBody:
    """Parse ``ball:R``, ``cube:A``, ``ellipse:A,B``, ``ellipsoid:A,B,C``,
    ``simplex:D[,SCALE]`` or ``polygon:x1,y1;x2,y2;...``.

    ``dim`` is needed for balls and cubes and checked against the others.
    """
    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    if kind in ("ball", "cube"):
        vals = _floats(arg)
        if len(vals) != 1:
            raise BodyError(f"{kind} takes one parameter")
        if dim is None:
            raise BodyError(f"{kind} needs an explicit dimension")
        body = Ball(vals[0], dim) if kind == "ball" else Cube(vals[0], dim)
    elif kind in ("ellipse", "ellipsoid"):
        vals = _floats(arg)
        want = 2 if kind == "ellipse" else 3
        if len(vals) != want:
            raise BodyError(f"{kind} takes {want} semiaxes")
        body = Ellipsoid(vals)
    elif kind == "simplex":
        vals = _floats(arg)
        if len(vals) not in (1, 2) or vals[0] != int(vals[0]):
            raise BodyError("simplex takes D[,SCALE]")
        body = Simplex(int(vals[0]), vals[1] if len(vals) == 2 else 1.0)
    elif kind == "polygon":
        pts = [_floats(p) for p in arg.split(";") if p.strip()]
        if any(len(p) != 2 for p in pts):
            raise BodyError("polygon vertices must be x,y pairs")
        body = Polytope(np.array(pts), spec=text.strip())
    else:
        raise BodyError(f"unknown body kind {kind!r}")
    if dim is not None and body.dim != dim:
        raise BodyError(f"body has dimension {body.dim}, expected {dim}")
    return body
