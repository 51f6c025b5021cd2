"""Convex bodies: membership, support, exact sections and intrinsic volumes.

Four representations are provided: :class:`Ball`, :class:`Box`,
:class:`HPolytope` and :class:`SupportBody` (oracle-defined). Sections by
flats are expressed in the flat's orthonormal coordinates and wrapped in a
:class:`SectionBody`; an empty intersection is returned as ``None``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .constants import ball_intrinsic_volume, kappa
from .estimate import Estimate
from .exceptions import DomainError, NotAvailableError
from .geometry import Flat, Subspace, uniform_sphere

MEMBER_TOL = 1e-10
VERTEX_TOL = 1e-9
MERGE_TOL = 1e-8


class ConvexBody:
    """Common interface of all body representations."""

    dim: int

    def contains(self, x) -> np.ndarray:
        raise NotImplementedError

    def support(self, u) -> np.ndarray:
        raise NotImplementedError

    def circumradius(self) -> float:
        raise NotImplementedError

    def section(self, E: Flat) -> Optional["SectionBody"]:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.dim)
        return -self.support(-eye), self.support(eye)


def _point_section(E: Flat) -> "SectionBody":
    return SectionBody(E, Ball(np.zeros(0), 0.0))


@dataclass(frozen=True, eq=False)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(-1)
        if self.radius < 0:
            raise DomainError("ball radius must be non-negative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - self.center, axis=-1) <= self.radius + MEMBER_TOL

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return u @ self.center + self.radius * np.linalg.norm(u, axis=-1)

    def circumradius(self) -> float:
        return float(np.linalg.norm(self.center) + self.radius)

    def section(self, E: Flat):
        if E.dim == 0:
            return _point_section(E) if self.contains(E.offset) else None
        rel = self.center - E.offset
        t = E.direction.coords(rel)
        dist2 = max(float(rel @ rel - t @ t), 0.0)
        if dist2 > (self.radius + MEMBER_TOL) ** 2:
            return None
        return SectionBody(E, Ball(t, math.sqrt(max(self.radius ** 2 - dist2, 0.0))))


@dataclass(frozen=True, eq=False)
class HPolytope(ConvexBody):
    """Bounded, nonempty polytope ``{x : normals @ x <= offsets}``."""

    normals: np.ndarray
    offsets: np.ndarray
    validate: bool = True

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.normals, dtype=float))
        b = np.array(self.offsets, dtype=float).reshape(-1)
        if a.shape[0] != b.shape[0]:
            raise DomainError("normals and offsets disagree in length")
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", b)
        object.__setattr__(self, "_vertices", None)
        if self.validate:
            self._check_bounded_nonempty()

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def _check_bounded_nonempty(self) -> None:
        for i in range(self.dim):
            for sign in (1.0, -1.0):
                c = np.zeros(self.dim)
                c[i] = -sign
                res = linprog(c, A_ub=self.normals, b_ub=self.offsets,
                              bounds=[(None, None)] * self.dim, method="highs")
                if res.status == 2:
                    raise DomainError("HPolytope is empty")
                if res.status == 3:
                    raise DomainError("HPolytope is unbounded")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        slack = x @ self.normals.T - self.offsets
        scale = np.linalg.norm(self.normals, axis=1)
        return np.all(slack <= MEMBER_TOL * np.maximum(scale, 1.0), axis=-1)

    @property
    def vertices(self) -> np.ndarray:
        if self._vertices is None:
            object.__setattr__(self, "_vertices", enumerate_vertices(self.normals, self.offsets))
        return self._vertices

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return np.max(u @ self.vertices.T, axis=-1)

    def circumradius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def section(self, E: Flat):
        if E.dim == 0:
            return _point_section(E) if self.contains(E.offset) else None
        a = self.normals @ E.direction.frame.T
        b = self.offsets - self.normals @ E.offset
        flat_rows = np.linalg.norm(a, axis=1) <= 1e-12
        if np.any(b[flat_rows] < -VERTEX_TOL):
            return None
        a, b = a[~flat_rows], b[~flat_rows]
        res = linprog(np.zeros(E.dim), A_ub=a, b_ub=b + VERTEX_TOL,
                      bounds=[(None, None)] * E.dim, method="highs")
        if res.status != 0:
            return None
        return SectionBody(E, HPolytope(a, b, validate=False))

    def volume(self) -> float:
        return polytope_volume(self.vertices)

    def boundary_measure(self) -> float:
        return polytope_boundary(self.vertices)


class Box(HPolytope):
    """Axis-aligned box ``[lower, upper]``."""

    def __init__(self, lower, upper):
        lo = np.array(lower, dtype=float).reshape(-1)
        hi = np.array(upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape or np.any(lo > hi):
            raise DomainError("Box requires lower <= upper componentwise")
        n = lo.shape[0]
        super().__init__(np.vstack([np.eye(n), -np.eye(n)]), np.concatenate([hi, -lo]), validate=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def __repr__(self) -> str:
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"

    @property
    def vertices(self) -> np.ndarray:
        if self._vertices is None:
            pts = np.array(list(itertools.product(*zip(self.lower, self.upper))))
            object.__setattr__(self, "_vertices", np.unique(pts, axis=0))
        return self._vertices

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower - MEMBER_TOL) & (x <= self.upper + MEMBER_TOL), axis=-1)

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return np.sum(np.maximum(u * self.lower, u * self.upper), axis=-1)

    def circumradius(self) -> float:
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    @property
    def sides(self) -> np.ndarray:
        return self.upper - self.lower


class SupportBody(ConvexBody):
    """Body known only through vectorised oracles.

    ``support`` may be ``None`` (sections of oracle bodies have no induced
    support function).
    """

    def __init__(self, dim: int, membership: Callable, radius_bound: float,
                 support: Optional[Callable] = None):
        if radius_bound <= 0:
            raise DomainError("radius_bound must be positive")
        self.dim = int(dim)
        self._membership = membership
        self._support = support
        self.radius_bound = float(radius_bound)

    def contains(self, x):
        return np.asarray(self._membership(np.asarray(x, dtype=float)), dtype=bool)

    def support(self, u):
        if self._support is None:
            raise NotAvailableError("this body has no support oracle")
        return np.asarray(self._support(np.asarray(u, dtype=float)), dtype=float)

    def circumradius(self) -> float:
        return self.radius_bound

    def bounding_box(self):
        if self._support is None:
            r = self.radius_bound
            return -r * np.ones(self.dim), r * np.ones(self.dim)
        return super().bounding_box()

    def _meets(self, E: Flat, probes: int = 4096, seed: int = 0) -> bool:
        """Decide K meets E by probing the support function on E's normal directions."""
        if self._support is None:
            raise NotAvailableError("nonemptiness probing requires a support oracle")
        comp = E.direction.complement()
        if comp.dim == 0:
            return True
        z = comp.coords(E.offset)
        rng = np.random.default_rng(seed)
        dirs = uniform_sphere(rng, comp.dim, probes)
        if comp.dim == 1:
            dirs = np.array([[1.0], [-1.0]])
        gaps = self.support(dirs @ comp.frame) - dirs @ z
        return bool(np.min(gaps) >= -1e-9)

    def section(self, E: Flat):
        if E.dim == 0:
            return _point_section(E) if self.contains(E.offset) else None
        if not self._meets(E):
            return None
        body = SupportBody(E.dim, lambda t, _E=E: self.contains(_E.parametrize(t)),
                           self.radius_bound)
        return SectionBody(E, body)


def swept_ball_body(L_prime: Subspace, u) -> SupportBody:
    """``(B^n cap L') + conv{o, u}`` for a unit vector u orthogonal to L'."""
    u = np.asarray(u, dtype=float)
    n = L_prime.ambient_dim
    if abs(np.linalg.norm(u) - 1.0) > 1e-12 or np.linalg.norm(L_prime.project(u)) > 1e-12:
        raise DomainError("u must be a unit vector orthogonal to L'")

    def membership(x):
        t = x @ u
        y = x - t[..., None] * u
        inside = L_prime.project(y)
        off = np.linalg.norm(y - inside, axis=-1)
        return ((off <= MEMBER_TOL) & (np.linalg.norm(inside, axis=-1) <= 1 + MEMBER_TOL)
                & (t >= -MEMBER_TOL) & (t <= 1 + MEMBER_TOL))

    def support(v):
        return np.linalg.norm(L_prime.project(v), axis=-1) + np.maximum(0.0, v @ u)

    return SupportBody(n, membership, math.sqrt(2.0), support)


@dataclass(frozen=True, eq=False)
class SectionBody:
    """``K cap E`` expressed in the orthonormal coordinates of the flat E."""

    flat: Flat
    body: ConvexBody

    @property
    def dim(self) -> int:
        return self.flat.dim


# --------------------------------------------------------------------------
# polytope helpers

def enumerate_vertices(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Brute-force vertex enumeration over all d-subsets of the constraints."""
    m, d = normals.shape
    if d == 0:
        return np.zeros((1, 0))
    subsets = np.array(list(itertools.combinations(range(m), d)))
    if subsets.size == 0:
        return np.zeros((0, d))
    a = normals[subsets]
    b = offsets[subsets]
    dets = np.linalg.det(a)
    scale = np.prod(np.linalg.norm(a, axis=2), axis=1)
    ok = np.abs(dets) > 1e-12 * np.maximum(scale, 1e-300)
    if not np.any(ok):
        return np.zeros((0, d))
    pts = np.linalg.solve(a[ok], b[ok][..., None])[..., 0]
    slack = pts @ normals.T - offsets
    feas = np.all(slack <= VERTEX_TOL * np.maximum(np.linalg.norm(normals, axis=1), 1.0), axis=1)
    pts = pts[feas]
    out: list[np.ndarray] = []
    for p in pts:
        if not any(np.linalg.norm(p - v) <= MERGE_TOL for v in out):
            out.append(p)
    return np.array(out).reshape(-1, d)


def _polygon_order(vertices: np.ndarray) -> np.ndarray:
    c = vertices.mean(axis=0)
    ang = np.arctan2(vertices[:, 1] - c[1], vertices[:, 0] - c[0])
    return vertices[np.argsort(ang)]


def polytope_volume(vertices: np.ndarray) -> float:
    """Volume of conv(vertices) by a fan of simplices from the centroid."""
    nv, d = vertices.shape
    if nv == 0:
        return 0.0
    if d == 0:
        return 1.0
    if d == 1:
        return float(vertices.max() - vertices.min())
    if nv <= d:
        return 0.0
    c = vertices.mean(axis=0)
    if d == 2:
        poly = _polygon_order(vertices) - c
        nxt = np.roll(poly, -1, axis=0)
        return float(0.5 * np.sum(np.abs(poly[:, 0] * nxt[:, 1] - poly[:, 1] * nxt[:, 0])))
    try:
        hull = ConvexHull(vertices)
    except QhullError:
        return 0.0
    if d == 3:
        tets = vertices[hull.simplices] - c
        return float(np.sum(np.abs(np.linalg.det(tets))) / 6.0)
    return float(hull.volume)


def polytope_boundary(vertices: np.ndarray) -> float:
    """(d-1)-measure of the boundary of conv(vertices)."""
    nv, d = vertices.shape
    if nv == 0:
        return 0.0
    if d == 1:
        return 2.0
    if d == 2:
        if nv == 1:
            return 0.0
        if nv == 2:
            return 2.0 * float(np.linalg.norm(vertices[1] - vertices[0]))
        poly = _polygon_order(vertices)
        return float(np.sum(np.linalg.norm(poly - np.roll(poly, -1, axis=0), axis=1)))
    try:
        hull = ConvexHull(vertices)
    except QhullError:
        return 0.0
    if d == 3:
        tri = vertices[hull.simplices]
        cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        return float(0.5 * np.sum(np.linalg.norm(cross, axis=1)))
    return float(hull.area)


# --------------------------------------------------------------------------
# spec-level operations

def membership(K: Optional[ConvexBody], x) -> bool:
    if K is None:
        return False
    return bool(K.contains(np.asarray(x, dtype=float)))


def circumradius(K: ConvexBody) -> float:
    return K.circumradius()


def section(K: ConvexBody, E: Flat) -> Optional[SectionBody]:
    if E.ambient_dim != K.dim:
        raise DomainError("flat and body live in different dimensions")
    return K.section(E)


def _elementary_symmetric(values: np.ndarray, m: int) -> float:
    coeffs = np.zeros(m + 1)
    coeffs[0] = 1.0
    for v in values:
        coeffs[1:] = coeffs[1:] + v * coeffs[:-1]
    return float(coeffs[m])


def exact_intrinsic_volume(K: ConvexBody, m: int) -> float:
    """Closed-form V_m for balls and boxes."""
    n = K.dim
    if not 0 <= m <= n:
        raise DomainError(f"need 0 <= m <= n, got m={m}, n={n}")
    if isinstance(K, Ball):
        return ball_intrinsic_volume(n, m, K.radius)
    if isinstance(K, Box):
        return _elementary_symmetric(K.sides, m)
    raise NotAvailableError(f"no closed-form intrinsic volumes for {type(K).__name__}")


def hit_or_miss_volume(body: ConvexBody, rng: np.random.Generator, samples: int = 200_000) -> Estimate:
    lo, hi = body.bounding_box()
    pts = lo + (hi - lo) * rng.random((samples, body.dim))
    hits = body.contains(pts).astype(float) * float(np.prod(hi - lo))
    return Estimate.from_samples(hits)


def cauchy_kubota_v1(body: ConvexBody, rng: np.random.Generator, samples: int = 200_000) -> Estimate:
    """V_1 as a multiple of the mean width over uniform directions."""
    d = body.dim
    u = uniform_sphere(rng, d, samples)
    widths = body.support(u) + body.support(-u)
    return Estimate.from_samples(d * kappa(d) / (2.0 * kappa(d - 1)) * widths)


def section_intrinsic_volume(S: Optional[SectionBody], m: int, rng: Optional[np.random.Generator] = None,
                             samples: int = 200_000) -> float:
    """V_m of a section, for ``m`` in {0, 1, d-1, d} (any m for ball sections)."""
    if S is None:
        return 0.0
    d = S.dim
    if m < 0:
        raise DomainError("m must be non-negative")
    if m > d:
        return 0.0
    body = S.body
    if m == 0:
        return 1.0
    if isinstance(body, Ball):
        return ball_intrinsic_volume(d, m, body.radius)
    if isinstance(body, HPolytope):
        if m == d:
            return body.volume()
        if m == d - 1:
            return 0.5 * body.boundary_measure()
        if m == 1:
            return cauchy_kubota_v1(body, _need_rng(rng), samples).mean
    elif isinstance(body, SupportBody) and m == d:
        return hit_or_miss_volume(body, _need_rng(rng), samples).mean
    raise NotAvailableError(f"V_{m} of a {d}-dimensional {type(body).__name__} section is not supported")


def _need_rng(rng):
    if rng is None:
        raise DomainError("a random stream is required for Monte Carlo section functionals")
    return rng


# --------------------------------------------------------------------------
# batched section functionals for the estimators

def section_functionals(K: ConvexBody, offsets: np.ndarray, frames: np.ndarray, m: int,
                        rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """``V_m(K cap E_i)`` for flats ``E_i = offsets[i] + span(frames[i])``.

    ``offsets`` has shape ``(N, n)`` and must be orthogonal to the rows of
    ``frames`` ``(N, q, n)``.
    """
    size, q, _ = frames.shape
    if m > q:
        return np.zeros(size)
    if isinstance(K, Ball):
        rel = K.center - offsets
        t = np.einsum("bqn,bn->bq", frames, rel)
        dist2 = np.maximum(np.einsum("bn,bn->b", rel, rel) - np.einsum("bq,bq->b", t, t), 0.0)
        hit = dist2 <= (K.radius + MEMBER_TOL) ** 2
        rad = np.sqrt(np.maximum(K.radius ** 2 - dist2, 0.0))
        return np.where(hit, ball_intrinsic_volume(q, m, 1.0) * rad ** m, 0.0)
    if q == 0:
        return K.contains(offsets).astype(float)
    if q == 1 and isinstance(K, HPolytope):
        return _clip_lines(K, offsets, frames[:, 0], m)
    out = np.empty(size)
    n = K.dim
    for i in range(size):
        E = Flat.through(offsets[i], Subspace(frames[i], n))
        out[i] = section_intrinsic_volume(K.section(E), m, rng)
    return out


def _clip_lines(K: HPolytope, z: np.ndarray, u: np.ndarray, m: int) -> np.ndarray:
    az = z @ K.normals.T
    au = u @ K.normals.T
    slack = K.offsets - az
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = slack / au
    par = np.abs(au) <= 1e-14
    upper = np.min(np.where(au > 1e-14, bound, np.inf), axis=1)
    lower = np.max(np.where(au < -1e-14, bound, -np.inf), axis=1)
    ok = np.all(~par | (slack >= -VERTEX_TOL), axis=1) & (lower <= upper + VERTEX_TOL)
    if m == 0:
        return ok.astype(float)
    return np.where(ok, np.maximum(upper - lower, 0.0), 0.0)
