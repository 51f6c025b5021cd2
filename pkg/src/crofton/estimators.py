"""Unbiased Monte Carlo estimators of intrinsic volumes from sections.

Rotational design: sections by k-subspaces L that contain a fixed
r-subspace L0, with the nested flat integral of the measurement function
estimated inside L. Vertical design: sections by translates L + x with
x in L^perp.

Every kernel works in the coordinates of an *adapted* frame of L whose first
r rows span L0; distances to L0 and angles with L0 then only involve the
trailing k - r coordinates.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .bodies import Ball, ConvexBody, SupportBody, section_functionals
from .constants import c0_const, d_const, kappa, omega
from .estimate import Estimate, merge_estimates
from .exceptions import DomainError
from .geometry import (
    Subspace,
    containing_frames,
    hitting_flats_local,
    local_d_weight,
    local_subspace_det,
    make_rng,
    uniform_sphere,
)
from .validation import check_body, check_indices, check_positive_int, check_subspace

__all__ = [
    "Indices", "EstimatorSpec", "Estimate", "merge_estimates",
    "measurement_phi", "measurement_phi_volume", "measurement_phi_projection",
    "measurement_phi_radial", "radial_function", "adapted_frame", "rotational_crofton_estimate",
    "vertical_measurement_tilde", "vertical_sections_estimate",
    "RotationalCroftonEstimator", "VerticalSectionsEstimator",
]

ROUTES = ("generic", "volume", "projection", "radial")
BISECTION_TOL = 1e-10


@dataclass(frozen=True)
class Indices:
    n: int
    k: int
    r: int
    j: int
    q: int

    def check(self, design: str) -> "Indices":
        check_indices(design, self.n, self.k, self.r, self.j, self.q)
        return self


@dataclass(frozen=True, eq=False)
class EstimatorSpec:
    indices: Indices
    body: ConvexBody
    L0: Subspace
    outer_samples: int = 10_000
    inner_samples: int = 64
    reference_radius: Optional[float] = None
    seed: int = 0
    design: str = "rotational"
    route: str = "generic"
    chunk_size: int = 2048

    def __post_init__(self):
        idx = self.indices.check(self.design)
        check_body(self.body, idx.n)
        check_subspace(self.L0, idx.n, idx.r)
        check_positive_int("outer_samples", self.outer_samples)
        check_positive_int("inner_samples", self.inner_samples)
        check_positive_int("chunk_size", self.chunk_size)
        if self.route not in ROUTES:
            raise DomainError(f"route must be one of {ROUTES}, got {self.route!r}")
        cr = self.body.circumradius()
        R = self.reference_radius
        if R is None:
            R = max(cr * (1 + 1e-9), 1e-12)
        elif R < cr:
            raise DomainError(f"reference_radius {R} is below the body's circumradius {cr}")
        object.__setattr__(self, "reference_radius", float(R))

    def with_(self, **changes) -> "EstimatorSpec":
        idx_changes = {k: changes.pop(k) for k in ("n", "k", "r", "j", "q") if k in changes}
        if idx_changes:
            changes["indices"] = replace(self.indices, **idx_changes)
        return replace(self, **changes)


# --------------------------------------------------------------------------
# frame handling

def adapted_frame(L: Subspace, L0: Subspace) -> np.ndarray:
    """Orthonormal frame of L whose first rows are the frame of L0."""
    if L.ambient_dim != L0.ambient_dim:
        raise DomainError("L and L0 live in different dimensions")
    if np.linalg.norm(L0.frame - L.project(L0.frame)) > 1e-8:
        raise DomainError("L must contain L0")
    k, r = L.dim, L0.dim
    rest = L.frame - L0.project(L.frame)
    if k == r:
        return L0.frame.copy()
    u, _, _ = np.linalg.svd(rest.T, full_matrices=False)
    return np.vstack([L0.frame, u[:, : k - r].T])


def _complement_ball(rng: np.random.Generator, frames: np.ndarray, R: float) -> np.ndarray:
    """Uniform point of the R-ball in the orthogonal complement of each L (rows of ``frames``)."""
    size, k, n = frames.shape
    if k == n:
        return np.zeros((size, n))
    g = rng.standard_normal((size, n))
    for _ in range(2):
        g -= np.einsum("bk,bkn->bn", np.einsum("bn,bkn->bk", g, frames), frames)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (R * rng.random(size) ** (1.0 / (n - k)))[:, None]


def _to_ambient(local: np.ndarray, frames: np.ndarray, inner: int) -> np.ndarray:
    """Map L-coordinates ``(B*I, ..., k)`` to R^n using per-L frames ``(B, k, n)``."""
    f = np.repeat(frames, inner, axis=0)
    if local.ndim == 2:
        return np.einsum("bk,bkn->bn", local, f)
    return np.einsum("bqk,bkn->bqn", local, f)


# --------------------------------------------------------------------------
# batched measurement kernels: frames (B, k, n) adapted to L0 -> values (B, I)

def _phi_generic(spec: EstimatorSpec, frames, rng, inner) -> np.ndarray:
    n, k, r, j, q = (getattr(spec.indices, a) for a in "nkrjq")
    B = frames.shape[0]
    R = spec.reference_radius
    m_loc, z_loc = hitting_flats_local(rng, k, q, R, B * inner)
    z = _to_ambient(z_loc, frames, inner)
    m = _to_ambient(m_loc, frames, inner) if q else np.zeros((B * inner, 0, n))
    vals = section_functionals(spec.body, z, m, q - j, rng)
    if n > k:
        vals = vals * local_d_weight(m_loc, z_loc, r) ** (n - k)
    vals = vals * (c0_const(n, k, q, r, j) * kappa(k - q) * R ** (k - q))
    return vals.reshape(B, inner)


def _phi_projection(spec: EstimatorSpec, frames, rng, inner) -> np.ndarray:
    n, k, r, j, q = (getattr(spec.indices, a) for a in "nkrjq")
    if q != j:
        raise DomainError("the projection form requires q = j")
    B = frames.shape[0]
    R = spec.reference_radius
    m_loc, z_loc = hitting_flats_local(rng, k, j, R, B * inner)
    z = _to_ambient(z_loc, frames, inner)
    m = _to_ambient(m_loc, frames, inner) if j else np.zeros((B * inner, 0, n))
    hit = section_functionals(spec.body, z, m, 0, rng)
    weight = np.ones(B * inner)
    if n > k:
        zp = z_loc[:, r:]
        if j:
            qm, _ = np.linalg.qr(np.swapaxes(m_loc[:, :, r:], 1, 2))
            zp = zp - np.einsum("bpj,bj->bp", qm, np.einsum("bpj,bp->bj", qm, zp))
        dist = np.linalg.norm(zp, axis=1)
        weight = (local_subspace_det(m_loc, r) * dist) ** (n - k)
    vals = hit * weight * (c0_const(n, k, j, r, j) * kappa(k - j) * R ** (k - j))
    return vals.reshape(B, inner)


def _local_box(spec: EstimatorSpec, frames):
    body = spec.body
    B, k, _ = frames.shape
    if isinstance(body, SupportBody) and body._support is None:
        R = spec.reference_radius
        return -R * np.ones((B, k)), R * np.ones((B, k))
    return -body.support(-frames), body.support(frames)


def _phi_volume(spec: EstimatorSpec, frames, rng, inner) -> np.ndarray:
    n, k, r, j, _ = (getattr(spec.indices, a) for a in "nkrjq")
    if j != 0:
        raise DomainError("the volume form requires j = 0")
    B = frames.shape[0]
    lo, hi = _local_box(spec, frames)
    x_loc = lo[:, None, :] + (hi - lo)[:, None, :] * rng.random((B, inner, k))
    x = np.einsum("bik,bkn->bin", x_loc, frames)
    inside = spec.body.contains(x).astype(float)
    if n > k:
        inside = inside * np.linalg.norm(x_loc[..., r:], axis=-1) ** (n - k)
    vol = np.prod(hi - lo, axis=1)[:, None]
    return inside * vol * (omega(n - r) / omega(k - r))


def _phi_radial(spec: EstimatorSpec, frames, rng, inner) -> np.ndarray:
    n, k, r, j, _ = (getattr(spec.indices, a) for a in "nkrjq")
    if j != 0:
        raise DomainError("the radial form requires j = 0")
    body = spec.body
    if not bool(body.contains(np.zeros(n))):
        raise DomainError("the radial form requires the origin to lie in the body")
    B = frames.shape[0]
    u_loc = uniform_sphere(rng, k, (B, inner))
    u = np.einsum("bik,bkn->bin", u_loc, frames)
    rho = radial_function(body, u, spec.reference_radius)
    dist = np.linalg.norm(u_loc[..., r:], axis=-1) if n > k else 1.0
    const = omega(n - r) / (n * omega(k - r)) * omega(k)
    return const * dist ** (n - k) * rho ** n


def radial_function(body: ConvexBody, u: np.ndarray, bound: float) -> np.ndarray:
    """Distance from the origin to the boundary of ``body`` along unit vectors ``u``.

    Closed form for balls, bisection on membership (to BISECTION_TOL) otherwise.
    """
    if isinstance(body, Ball):
        c = body.center
        uc = u @ c
        return uc + np.sqrt(np.maximum(uc * uc - c @ c + body.radius ** 2, 0.0))
    lo = np.zeros(u.shape[:-1])
    hi = np.full(u.shape[:-1], bound)
    while np.max(hi - lo) > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        inside = body.contains(u * mid[..., None])
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


_ROUTE_KERNELS: dict[str, Callable] = {
    "generic": _phi_generic,
    "volume": _phi_volume,
    "projection": _phi_projection,
    "radial": _phi_radial,
}


def _require(spec: EstimatorSpec, design: str) -> None:
    if spec.design != design:
        spec.indices.check(design)


def _single_L(spec: EstimatorSpec, L: Subspace, kernel, rng) -> Estimate:
    _require(spec, "rotational")
    if L.dim != spec.indices.k:
        raise DomainError(f"L must have dimension k={spec.indices.k}, got {L.dim}")
    frame = adapted_frame(L, spec.L0)[None]
    rng = make_rng(spec.seed) if rng is None else rng
    vals = kernel(spec, frame, rng, spec.inner_samples)[0]
    return Estimate.from_samples(vals, spec.seed)


def measurement_phi(spec: EstimatorSpec, L: Subspace, rng=None) -> Estimate:
    """Inner flat integral of the rotational measurement function at a fixed L."""
    return _single_L(spec, L, _phi_generic, rng)


def measurement_phi_volume(spec: EstimatorSpec, L: Subspace, rng=None) -> Estimate:
    """``(omega[n-r]/omega[k-r]) * integral over K cap L of d(x, L0)^(n-k)`` (j = 0)."""
    return _single_L(spec, L, _phi_volume, rng)


def measurement_phi_projection(spec: EstimatorSpec, L: Subspace, rng=None) -> Estimate:
    """Weighted projections onto j-subspaces of L (minimal q = j)."""
    return _single_L(spec, L, _phi_projection, rng)


def measurement_phi_radial(spec: EstimatorSpec, L: Subspace, rng=None) -> Estimate:
    """Spherical-coordinates form via the radial function (j = 0, origin in K)."""
    return _single_L(spec, L, _phi_radial, rng)


# --------------------------------------------------------------------------
# chunked outer loops

def _run_chunks(spec: EstimatorSpec, chunk_fn, jobs: int) -> Estimate:
    total, size = spec.outer_samples, spec.chunk_size
    bounds = [(c, min(size, total - c * size)) for c in range(math.ceil(total / size))]

    def work(arg):
        c, count = arg
        rng = make_rng(spec.seed, c)
        return Estimate.from_samples(chunk_fn(rng, count), spec.seed)

    jobs = check_positive_int("jobs", jobs)
    if jobs == 1 or len(bounds) == 1:
        parts = [work(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, bounds))
    return merge_estimates(parts)


def rotational_crofton_estimate(spec: EstimatorSpec, jobs: int = 1) -> Estimate:
    """Estimate of V_{n-j}(K) averaging the measurement function over L containing L0."""
    _require(spec, "rotational")
    kernel = _ROUTE_KERNELS[spec.route]
    k, inner = spec.indices.k, spec.inner_samples

    def chunk(rng, count):
        frames = containing_frames(spec.L0, k, rng, count)
        return kernel(spec, frames, rng, inner).mean(axis=1)

    return _run_chunks(spec, chunk, jobs)


def _tilde_batch(spec: EstimatorSpec, frames, shifts, rng, inner) -> np.ndarray:
    n, k, r, j, q = (getattr(spec.indices, a) for a in "nkrjq")
    B = frames.shape[0]
    R = spec.reference_radius
    m_loc, y_loc = hitting_flats_local(rng, k, q, R, B * inner)
    z = _to_ambient(y_loc, frames, inner) + np.repeat(shifts, inner, axis=0)
    m = _to_ambient(m_loc, frames, inner) if q else np.zeros((B * inner, 0, n))
    vals = section_functionals(spec.body, z, m, q - j, rng)
    if n > k:
        vals = vals * local_subspace_det(m_loc, r) ** (n - k)
    vals = vals * (d_const(n, k, r, j, q) * kappa(k - q) * R ** (k - q))
    return vals.reshape(B, inner)


def vertical_measurement_tilde(spec: EstimatorSpec, L: Subspace, x, rng=None) -> Estimate:
    """Vertical-sections measurement function on the section K cap (L + x)."""
    _require(spec, "vertical")
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(L.project(x)) > 1e-9 * max(1.0, np.linalg.norm(x)):
        raise DomainError("x must lie in the orthogonal complement of L")
    frame = adapted_frame(L, spec.L0)[None]
    rng = make_rng(spec.seed) if rng is None else rng
    vals = _tilde_batch(spec, frame, x[None], rng, spec.inner_samples)[0]
    return Estimate.from_samples(vals, spec.seed)


def vertical_sections_estimate(spec: EstimatorSpec, jobs: int = 1) -> Estimate:
    """Estimate of V_{n-j}(K) from translated sections L + x, x in L^perp."""
    _require(spec, "vertical")
    n, k = spec.indices.n, spec.indices.k
    R = spec.reference_radius
    shift_weight = kappa(n - k) * R ** (n - k)

    def chunk(rng, count):
        frames = containing_frames(spec.L0, k, rng, count)
        shifts = _complement_ball(rng, frames, R)
        vals = _tilde_batch(spec, frames, shifts, rng, spec.inner_samples)
        return vals.mean(axis=1) * shift_weight

    return _run_chunks(spec, chunk, jobs)


# --------------------------------------------------------------------------
# estimator objects

class _SectionEstimator(BaseEstimator):
    design = "rotational"

    def _spec(self, body) -> EstimatorSpec:
        body = check_body(body)
        n = body.dim
        q = self.j if self.q is None else self.q
        L0 = check_subspace(self.L0, n, self.r)
        return EstimatorSpec(
            Indices(n, self.k, self.r, self.j, q), body, L0,
            outer_samples=self.outer_samples, inner_samples=self.inner_samples,
            reference_radius=self.reference_radius, seed=self.random_state,
            design=self.design, route=getattr(self, "route", "generic"),
            chunk_size=self.chunk_size,
        )

    def fit(self, X, y=None):
        """Estimate the intrinsic volume V_{n-j} of the convex body ``X``."""
        self.spec_ = self._spec(X)
        self.estimate_ = self._run(self.spec_)
        self.mean_ = self.estimate_.mean
        self.stderr_ = self.estimate_.stderr
        self.n_samples_ = self.estimate_.count
        return self


class RotationalCroftonEstimator(_SectionEstimator):
    """Intrinsic volume V_{n-j} from sections by subspaces containing L0.

    Parameters
    ----------
    k, r, j : int
        Section dimension, dimension of the fixed subspace, and the
        co-degree of the target intrinsic volume (V_{n-j}).
    q : int, optional
        Flat dimension of the inner integral; defaults to ``j``.
    L0 : Subspace or array-like of basis vectors, optional
        Fixed subspace; defaults to the span of the last ``r`` axes.
    route : {"generic", "volume", "projection", "radial"}
        Representation of the measurement function.
    """

    design = "rotational"

    def __init__(self, k=2, r=1, j=0, q=None, L0=None, outer_samples=10_000, inner_samples=64,
                 reference_radius=None, route="generic", chunk_size=2048, n_jobs=1, random_state=0):
        self.k = k
        self.r = r
        self.j = j
        self.q = q
        self.L0 = L0
        self.outer_samples = outer_samples
        self.inner_samples = inner_samples
        self.reference_radius = reference_radius
        self.route = route
        self.chunk_size = chunk_size
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _run(self, spec):
        return rotational_crofton_estimate(spec, jobs=self.n_jobs)

    def measure(self, X, L: Subspace, rng=None) -> Estimate:
        """Measurement function of ``X`` on the single section by ``L``."""
        spec = self._spec(X)
        return _single_L(spec, L, _ROUTE_KERNELS[spec.route], rng)


class VerticalSectionsEstimator(_SectionEstimator):
    """Intrinsic volume V_{n-j} from translates of subspaces containing L0."""

    design = "vertical"

    def __init__(self, k=2, r=1, j=0, q=None, L0=None, outer_samples=10_000, inner_samples=64,
                 reference_radius=None, chunk_size=2048, n_jobs=1, random_state=0):
        self.k = k
        self.r = r
        self.j = j
        self.q = q
        self.L0 = L0
        self.outer_samples = outer_samples
        self.inner_samples = inner_samples
        self.reference_radius = reference_radius
        self.chunk_size = chunk_size
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _run(self, spec):
        return vertical_sections_estimate(spec, jobs=self.n_jobs)

    def measure(self, X, L: Subspace, x, rng=None) -> Estimate:
        return vertical_measurement_tilde(self._spec(X), L, x, rng)
