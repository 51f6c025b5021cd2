"""Input validation shared by the estimators, checks and the CLI."""
from __future__ import annotations

import numpy as np

from .bodies import ConvexBody
from .exceptions import DomainError
from .geometry import Subspace, orthonormalize

DESIGNS = ("rotational", "vertical")


def check_indices(design: str, n: int, k: int, r: int, j: int, q: int) -> None:
    """Raise :class:`DomainError` naming the violated index constraint."""
    if design not in DESIGNS:
        raise DomainError(f"design must be one of {DESIGNS}, got {design!r}")
    for name, v in (("n", n), ("k", k), ("r", r), ("j", j), ("q", q)):
        if isinstance(v, bool) or int(v) != v or v < 0:
            raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
    if n < 3:
        raise DomainError(f"n must satisfy n >= 3 (ambient dimension), got n={n}")
    if not r + 1 <= k <= n:
        raise DomainError(f"k must satisfy r+1 <= k <= n, got r={r}, k={k}, n={n}")
    if design == "rotational":
        top, label = k - (r + 1), "k-(r+1)"
        rng_name = "rotational Crofton index range"
    else:
        top, label = k - r, "k-r"
        rng_name = "vertical sections index range"
    if not 0 <= j <= top:
        raise DomainError(f"j must satisfy j <= {label} = {top} for design={design} ({rng_name}), got j={j}")
    if not j <= q <= top:
        raise DomainError(f"q must satisfy j <= q <= {label} = {top} for design={design} ({rng_name}), got q={q}")


def check_body(body, n: int | None = None) -> ConvexBody:
    if not isinstance(body, ConvexBody):
        raise DomainError(f"expected a ConvexBody, got {type(body).__name__}")
    if n is not None and body.dim != n:
        raise DomainError(f"body lives in R^{body.dim}, expected R^{n}")
    return body


def check_subspace(L0, n: int, r: int | None = None) -> Subspace:
    """Accept a Subspace or a list of basis vectors; default is the span of the last r axes."""
    if L0 is None:
        if r is None:
            raise DomainError("either L0 or r is required")
        return Subspace.coordinate(n, range(n - r, n))
    if not isinstance(L0, Subspace):
        vecs = np.asarray(L0, dtype=float)
        L0 = orthonormalize(vecs.reshape(-1, n) if vecs.size else vecs, n)
    if L0.ambient_dim != n:
        raise DomainError(f"L0 lives in R^{L0.ambient_dim}, expected R^{n}")
    if r is not None and L0.dim != r:
        raise DomainError(f"L0 has dimension {L0.dim}, but r={r}")
    return L0


def check_positive_int(name: str, value) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
