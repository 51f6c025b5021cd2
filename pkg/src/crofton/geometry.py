"""Subspaces, flats, Gram volumes and invariant samplers.

A :class:`Subspace` is stored as a ``(k, n)`` array whose rows form an
orthonormal frame. Random objects are drawn from :class:`numpy.random.Generator`
streams; see :func:`make_rng` for the seeding discipline used by the runners.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .constants import kappa
from .exceptions import DegenerateInputError, DomainError

ORTHO_TOL = 1e-10
RANK_TOL = 1e-10
CLAMP_TOL = 1e-14


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic stream for ``seed``; ``key`` selects an independent substream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def split_rng(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    return list(rng.spawn(count))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of R^n given by an orthonormal frame (rows)."""

    frame: np.ndarray
    ambient_dim: int = field(default=-1)

    def __post_init__(self):
        frame = np.atleast_2d(np.array(self.frame, dtype=float))
        n = self.ambient_dim
        if frame.ndim == 2 and frame.shape[0] == 0 and frame.shape[1] > 0:
            n = frame.shape[1]
        if frame.size == 0:
            if n < 0:
                raise DomainError("ambient_dim is required for the trivial subspace")
            frame = np.zeros((0, n))
        n = frame.shape[1]
        if frame.shape[0] > n:
            raise DomainError(f"{frame.shape[0]} frame vectors in R^{n}")
        gram = frame @ frame.T
        if frame.shape[0] and np.max(np.abs(gram - np.eye(frame.shape[0]))) > ORTHO_TOL:
            raise DegenerateInputError("frame is not orthonormal; use orthonormalize()")
        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "ambient_dim", n)

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @classmethod
    def trivial(cls, n: int) -> "Subspace":
        return cls(np.zeros((0, n)), n)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n), n)

    @classmethod
    def coordinate(cls, n: int, axes) -> "Subspace":
        """Span of the standard basis vectors with the given (0-based) indices."""
        return cls(np.eye(n)[list(axes)], n)

    def project(self, x: np.ndarray) -> np.ndarray:
        return (x @ self.frame.T) @ self.frame

    def coords(self, x: np.ndarray) -> np.ndarray:
        return x @ self.frame.T

    def complement(self) -> "Subspace":
        n, k = self.ambient_dim, self.dim
        if k == 0:
            return Subspace.full(n)
        if k == n:
            return Subspace.trivial(n)
        # trailing right-singular vectors span the orthogonal complement
        _, _, vt = np.linalg.svd(self.frame)
        return Subspace(_reorthonormalize(vt[k:]), n)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.linalg.norm(x - self.project(x)) <= tol * max(1.0, np.linalg.norm(x)))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _reorthonormalize(frame: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(frame.T)
    return q.T


@dataclass(frozen=True, eq=False)
class Flat:
    """Affine flat ``direction + offset`` with ``offset`` orthogonal to ``direction``."""

    direction: Subspace
    offset: np.ndarray

    def __post_init__(self):
        z = np.array(self.offset, dtype=float).reshape(-1)
        if z.shape[0] != self.direction.ambient_dim:
            raise DomainError("offset dimension does not match the direction subspace")
        if np.linalg.norm(self.direction.project(z)) > ORTHO_TOL * max(1.0, np.linalg.norm(z)):
            raise DomainError("flat offset must be orthogonal to its direction; use Flat.through()")
        z.setflags(write=False)
        object.__setattr__(self, "offset", z)

    @classmethod
    def through(cls, point, direction: Subspace) -> "Flat":
        point = np.asarray(point, dtype=float)
        return cls(direction, point - direction.project(point))

    @property
    def dim(self) -> int:
        return self.direction.dim

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    @property
    def lin(self) -> Subspace:
        return self.direction

    def parametrize(self, t: np.ndarray) -> np.ndarray:
        """Map flat coordinates ``(..., dim)`` to points of R^n."""
        return self.offset + np.asarray(t, dtype=float) @ self.direction.frame

    def coords(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.offset) @ self.direction.frame.T

    def __repr__(self) -> str:
        return f"Flat(dim={self.dim}, ambient_dim={self.ambient_dim}, |offset|={np.linalg.norm(self.offset):.4g})"


def orthonormalize(vectors, ambient_dim: int | None = None) -> Subspace:
    """Gram-Schmidt with one re-orthogonalisation pass.

    Raises :class:`DegenerateInputError` when a residual norm drops below 1e-10
    (relative to the input vector).
    """
    vecs = np.asarray(vectors, dtype=float)
    if vecs.size == 0:
        if ambient_dim is None:
            raise DomainError("ambient_dim is required for an empty vector list")
        return Subspace.trivial(ambient_dim)
    vecs = np.atleast_2d(vecs)
    basis: list[np.ndarray] = []
    for v in vecs:
        scale = np.linalg.norm(v)
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w -= (w @ b) * b
        nrm = np.linalg.norm(w)
        if scale == 0.0 or nrm < RANK_TOL * max(1.0, scale):
            raise DegenerateInputError("input vectors are linearly dependent (rank deficiency)")
        basis.append(w / nrm)
    return Subspace(np.array(basis), vecs.shape[1])


def direct_sum(a: Subspace, b: Subspace) -> Subspace:
    """Frame of ``a`` followed by an orthonormalised frame of ``b`` relative to ``a``."""
    if b.dim == 0:
        return a
    return orthonormalize(np.vstack([a.frame, b.frame]), a.ambient_dim)


# --------------------------------------------------------------------------
# samplers

def haar_frames(rng: np.random.Generator, n: int, k: int, size: int) -> np.ndarray:
    """``size`` independent orthonormal ``(k, n)`` frames spanning nu_k-distributed subspaces."""
    if k == 0:
        return np.zeros((size, 0, n))
    g = rng.standard_normal((size, n, k))
    q, _ = np.linalg.qr(g)
    return np.swapaxes(q, 1, 2)


def uniform_sphere(rng: np.random.Generator, d: int, size) -> np.ndarray:
    g = rng.standard_normal((*np.atleast_1d(size), d))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def uniform_ball(rng: np.random.Generator, d: int, size, radius: float = 1.0) -> np.ndarray:
    shape = tuple(np.atleast_1d(size))
    if d == 0:
        return np.zeros((*shape, 0))
    u = uniform_sphere(rng, d, shape)
    rad = radius * rng.random(shape) ** (1.0 / d)
    return u * rad[..., None]


def sample_grassmannian(n: int, k: int, rng: np.random.Generator) -> Subspace:
    """Draw from the rotation-invariant probability measure on G(n, k)."""
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if k == 0:
        return Subspace.trivial(n)
    while True:
        try:
            return orthonormalize(rng.standard_normal((k, n)))
        except DegenerateInputError:  # pragma: no cover - probability zero
            continue


def complement_frame(L0: Subspace) -> np.ndarray:
    return L0.complement().frame


def containing_frames(L0: Subspace, k: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Batched frames of subspaces L0 + W, W uniform in L0^perp; rows of L0 come first."""
    n, r = L0.ambient_dim, L0.dim
    comp = complement_frame(L0)
    w = haar_frames(rng, n - r, k - r, size) @ comp
    head = np.broadcast_to(L0.frame, (size, r, n))
    return np.concatenate([head, w], axis=1)


def sample_grassmannian_containing(L0: Subspace, k: int, rng: np.random.Generator) -> Subspace:
    """Draw from the invariant probability measure on subspaces of dimension k containing L0."""
    n, r = L0.ambient_dim, L0.dim
    if not r <= k <= n:
        raise DomainError(f"need dim(L0) <= k <= n, got r={r}, k={k}, n={n}")
    if k == r:
        return L0
    if k == n:
        return Subspace(containing_frames(L0, k, rng, 1)[0], n)
    comp = L0.complement()
    w = sample_grassmannian(n - r, k - r, rng)
    return Subspace(np.vstack([L0.frame, w.frame @ comp.frame]), n)


def haar_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed element of O(d) (QR with sign correction)."""
    if d == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def sample_rotation_fixing(L0: Subspace, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal ``(n, n)`` matrix fixing L0 pointwise, Haar on its complement.

    Acts on row vectors as ``x @ rho.T`` or column vectors as ``rho @ x``.
    """
    n, r = L0.ambient_dim, L0.dim
    if r >= n:
        raise DomainError("sample_rotation_fixing requires dim(L0) < n")
    comp = complement_frame(L0)
    q = haar_orthogonal(rng, n - r)
    return L0.frame.T @ L0.frame + comp.T @ q @ comp


# --------------------------------------------------------------------------
# volumes of parallelepipeds and simplices

def nabla(vectors) -> float:
    """q-volume of the parallelepiped spanned by the rows of ``vectors``."""
    x = np.atleast_2d(np.asarray(vectors, dtype=float))
    q, n = x.shape
    if q == 0:
        return 1.0
    if q > n:
        return 0.0
    # pivoted QR: |prod diag R| equals sqrt(det Gram)
    r = scipy.linalg.qr(x.T, mode="r", pivoting=True)[0]
    val = float(np.abs(np.prod(np.diag(r[:q, :q]))))
    return 0.0 if val < CLAMP_TOL else val


def delta(points) -> float:
    """q-volume of the simplex with vertices given by the ``q + 1`` rows of ``points``."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    q = x.shape[0] - 1
    if q < 1:
        raise DomainError("delta needs at least two points")
    return nabla(x[1:] - x[0]) / math.factorial(q)


def nabla_mixed(vectors, M: Subspace) -> float:
    x = np.asarray(vectors, dtype=float).reshape(-1, M.ambient_dim)
    if x.shape[0] + M.dim > M.ambient_dim:
        raise DomainError("nabla_mixed requires q + dim(M) <= n")
    return nabla(np.vstack([x, M.frame]))


def subspace_det(L: Subspace, M: Subspace) -> float:
    """Generalised sine ``[L, M]``; equal to 1 when either argument is trivial."""
    if L.ambient_dim != M.ambient_dim:
        raise DomainError("subspaces live in different ambient spaces")
    if L.dim + M.dim > L.ambient_dim:
        raise DomainError(f"subspace_det requires dim L + dim M <= n, got {L.dim} + {M.dim} > {L.ambient_dim}")
    if L.dim == 0 or M.dim == 0:
        return 1.0
    return min(1.0, nabla(np.vstack([L.frame, M.frame])))


def _residual(x: np.ndarray, rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return x
    coef, *_ = np.linalg.lstsq(rows.T, x, rcond=None)
    return x - rows.T @ coef


def dist_point_flat(x, E: Flat) -> float:
    y = np.asarray(x, dtype=float) - E.offset
    return float(np.linalg.norm(y - E.direction.project(y)))


def dist_flat_subspace(E: Flat, L: Subspace) -> float:
    """Distance between the flat E and the linear subspace L."""
    rows = np.vstack([E.direction.frame, L.frame])
    return float(np.linalg.norm(_residual(E.offset, rows)))


def _check_d_dims(E: Flat, L0: Subspace) -> None:
    if E.dim + L0.dim > E.ambient_dim - 1:
        raise DomainError(
            f"D(E, L0) requires dim E + dim L0 <= n - 1, got {E.dim} + {L0.dim} > {E.ambient_dim - 1}")


def d_weight(E: Flat, L0: Subspace) -> float:
    """``D(E, L0)`` as distance between E and L0 times ``[lin E, L0]``."""
    _check_d_dims(E, L0)
    return dist_flat_subspace(E, L0) * subspace_det(E.direction, L0)


def span_of_flat(E: Flat) -> Subspace:
    z = E.offset
    if np.linalg.norm(z) <= ORTHO_TOL:
        return E.direction
    return Subspace(np.vstack([E.direction.frame, z / np.linalg.norm(z)]), E.ambient_dim)


def d_weight_definition(E: Flat, L0: Subspace) -> float:
    """``D(E, L0)`` from its definition ``d(o, E) [span E, L0]``."""
    _check_d_dims(E, L0)
    dist = float(np.linalg.norm(E.offset))
    if dist <= ORTHO_TOL:
        return 0.0
    return dist * subspace_det(span_of_flat(E), L0)


def sample_hitting_flat(L: Subspace, q: int, R: float, rng: np.random.Generator) -> tuple[Flat, float]:
    """Random q-flat inside L meeting the R-ball, with importance weight.

    ``weight * E[f(E)]`` equals the integral of f against the invariant flat
    measure on L for every f supported on flats meeting the R-ball.
    """
    k = L.dim
    if not 0 <= q <= k:
        raise DomainError(f"need 0 <= q <= dim L, got q={q}, dim L={k}")
    if R <= 0:
        raise DomainError("reference radius must be positive")
    m_local = haar_frames(rng, k, q, 1)[0]
    y_local = _ball_in_complement(rng, m_local[None], R)[0]
    n = L.ambient_dim
    direction = Subspace(m_local @ L.frame, n) if q else Subspace.trivial(n)
    flat = Flat(direction, y_local @ L.frame)
    return flat, kappa(k - q) * R ** (k - q)


def _ball_in_complement(rng: np.random.Generator, frames: np.ndarray, R: float) -> np.ndarray:
    """Uniform points in the R-ball of the orthogonal complement of each frame (batched)."""
    size, q, k = frames.shape
    d = k - q
    if d == 0:
        return np.zeros((size, k))
    g = rng.standard_normal((size, k))
    # projecting twice keeps the result orthogonal even when g almost lies in the span
    for _ in range(2 if q else 0):
        g = g - np.einsum("bq,bqk->bk", np.einsum("bk,bqk->bq", g, frames), frames)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (R * rng.random(size) ** (1.0 / d))[:, None]


def sample_translate_in_complement(L: Subspace, R: float, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Uniform point of the R-ball in L^perp and the ball's volume."""
    n, k = L.ambient_dim, L.dim
    if k >= n:
        raise DomainError("sample_translate_in_complement requires dim L < n")
    comp = L.complement()
    x = uniform_ball(rng, n - k, 1, R)[0] @ comp.frame
    return x, kappa(n - k) * R ** (n - k)


# --------------------------------------------------------------------------
# batched kernels used by the estimators

def hitting_flats_local(rng: np.random.Generator, k: int, q: int, R: float, size: int):
    """Batched flats of A(R^k, q) meeting the R-ball: frames ``(size, q, k)``, offsets ``(size, k)``."""
    frames = haar_frames(rng, k, q, size)
    return frames, _ball_in_complement(rng, frames, R)


def gram_volume(rows: np.ndarray) -> np.ndarray:
    """Batched sqrt(det Gram) for stacks of row sets ``(..., p, d)``."""
    p = rows.shape[-2]
    if p == 0:
        return np.ones(rows.shape[:-2])
    g = rows @ np.swapaxes(rows, -1, -2)
    det = np.linalg.det(g)
    return np.sqrt(np.where(det > CLAMP_TOL ** 2, det, 0.0))


def local_subspace_det(frames: np.ndarray, r: int) -> np.ndarray:
    """``[M, L0]`` for frames in L-coordinates where L0 spans the first r axes."""
    if r == 0 or frames.shape[-2] == 0:
        return np.ones(frames.shape[:-2])
    return np.minimum(gram_volume(frames[..., r:]), 1.0)


def local_d_weight(frames: np.ndarray, offsets: np.ndarray, r: int) -> np.ndarray:
    """``D(M + z, L0)`` in L-coordinates where L0 spans the first r axes.

    Equals the (q+1)-volume spanned by z and M after projection onto L0^perp.
    """
    stacked = np.concatenate([offsets[..., None, r:], frames[..., r:]], axis=-2)
    return gram_volume(stacked)
