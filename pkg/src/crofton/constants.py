"""Dimensional constants of integral geometry.

All values are double precision. ``omega(0)`` is deliberately undefined; the
vertical-sections constant is therefore evaluated through ratios of
``b_coeff``, which never touch it.
"""
from __future__ import annotations

import math
from functools import lru_cache

from .exceptions import DomainError

MAX_DIM = 64


def _check_index(name: str, value: int) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}")
    if value > MAX_DIM:
        raise DomainError(f"{name}={value} exceeds the supported maximum {MAX_DIM}")
    return value


@lru_cache(maxsize=None)
def kappa(n: int) -> float:
    """Volume of the unit ball in R^n, ``pi**(n/2) / Gamma(1 + n/2)``."""
    n = _check_index("n", n)
    return math.pi ** (n / 2) / math.gamma(1 + n / 2)


@lru_cache(maxsize=None)
def omega(n: int) -> float:
    """Surface area of the unit sphere S^{n-1}, equal to ``n * kappa(n)``."""
    n = _check_index("n", n)
    if n == 0:
        raise DomainError("omega(0) undefined by convention")
    return n * kappa(n)


def b_coeff(n: int, q: int) -> float:
    """``omega(n-q+1)...omega(n) / (omega(1)...omega(q))``; empty product for q = 0."""
    n = _check_index("n", n)
    q = _check_index("q", q)
    if q > n:
        raise DomainError(f"b_coeff requires q <= n, got n={n}, q={q}")
    out = 1.0
    for i in range(1, q + 1):
        out *= omega(n - q + i) / omega(i)
    return out


def crofton_const(s1: int, s2: int, r1: int, r2: int) -> float:
    """Classical Crofton constant with upper indices (r1, r2), lower (s1, s2).

    ``(r1! kappa(r1) / (s1! kappa(s1))) * (r2! kappa(r2) / (s2! kappa(s2)))``
    """
    s1, s2, r1, r2 = (_check_index(nm, v) for nm, v in
                      (("s1", s1), ("s2", s2), ("r1", r1), ("r2", r2)))

    def fk(m: int) -> float:
        return math.factorial(m) * kappa(m)

    return (fk(r1) / fk(s1)) * (fk(r2) / fk(s2))


def alpha_const(n: int, k: int, q: int, r: int) -> float:
    """Normalising constant of the linear Blaschke-Petkantschin formula with a
    fixed r-dimensional subspace; requires ``q + r + 1 <= k <= n``."""
    n, k, q, r = (_check_index(nm, v) for nm, v in
                  (("n", n), ("k", k), ("q", q), ("r", r)))
    if k > n:
        raise DomainError(f"alpha_const requires k <= n, got k={k}, n={n}")
    if k < q + r + 1:
        raise DomainError(
            f"alpha_const requires q + r + 1 <= k (smallest sphere index k-q-r >= 1), "
            f"got k={k}, q={q}, r={r}")
    out = 1.0
    for i in range(r + 1):
        out *= omega(k - q - r + i) / omega(n - q - r + i)
    for i in range(r):
        out *= omega(n - i) / omega(k - i)
    return out


def c0_const(n: int, k: int, q: int, r: int, j: int) -> float:
    """Leading constant of the rotational measurement function."""
    if _check_index("j", j) > _check_index("q", q):
        raise DomainError(f"c0_const requires j <= q, got j={j}, q={q}")
    return crofton_const(n - j, q, q - j, n) / alpha_const(n, k, q, r)


def d_const(n: int, k: int, r: int, j: int, q: int) -> float:
    """Leading constant of the vertical-sections measurement function.

    Computed as ``(b[n-r,q]/b[k-r,q]) * (b[k,q]/b[n,q]) * c`` so that the
    boundary case ``q = k - r`` is covered without ``omega(0)``.
    """
    n, k, r, j, q = (_check_index(nm, v) for nm, v in
                     (("n", n), ("k", k), ("r", r), ("j", j), ("q", q)))
    if not r + 1 <= k <= n:
        raise DomainError(f"d_const requires r + 1 <= k <= n, got n={n}, k={k}, r={r}")
    if not j <= q <= k - r:
        raise DomainError(f"d_const requires j <= q <= k - r, got j={j}, q={q}, k-r={k - r}")
    ratio = (b_coeff(n - r, q) / b_coeff(k - r, q)) * (b_coeff(k, q) / b_coeff(n, q))
    return ratio * crofton_const(n - j, q, q - j, n)


def ball_intrinsic_volume(d: int, m: int, radius: float = 1.0) -> float:
    """V_m of a d-dimensional ball; zero for ``m > d``."""
    if m > d:
        return 0.0
    return math.comb(d, m) * kappa(d) / kappa(d - m) * radius ** m
