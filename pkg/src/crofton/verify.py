"""Numerical checks of the integral-geometric identities behind the estimators.

Each check returns a :class:`CheckReport`. Statistical checks pass when the
two sides agree within ``SIGMA`` combined standard errors; deterministic
checks use explicit relative tolerances.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

from .bodies import Ball, ConvexBody, exact_intrinsic_volume, section_functionals, swept_ball_body
from .constants import alpha_const, b_coeff, c0_const, crofton_const, d_const, kappa, omega
from .estimate import Estimate, combined_z, merge_estimates
from .estimators import EstimatorSpec, Indices, _complement_ball, _phi_generic, _tilde_batch, adapted_frame
from .exceptions import DomainError
from .geometry import (
    Flat,
    Subspace,
    _ball_in_complement,
    containing_frames,
    d_weight,
    d_weight_definition,
    delta,
    gram_volume,
    haar_frames,
    make_rng,
    nabla_mixed,
    sample_grassmannian,
    sample_grassmannian_containing,
    uniform_sphere,
)

SIGMA = 4.0
REL_FLOOR = 1e-9
CHUNK = 100_000
Value = Union[Estimate, float]


@dataclass(frozen=True)
class CheckReport:
    name: str
    lhs: Value
    rhs: Value
    tolerance: str
    passed: bool
    details: str = ""

    @staticmethod
    def _num(v: Value) -> float:
        return v.mean if isinstance(v, Estimate) else float(v)

    @property
    def lhs_value(self) -> float:
        return self._num(self.lhs)

    @property
    def rhs_value(self) -> float:
        return self._num(self.rhs)

    @property
    def stderr(self) -> float:
        se = [v.stderr for v in (self.lhs, self.rhs) if isinstance(v, Estimate)]
        return math.sqrt(sum(s * s for s in se)) if se else 0.0

    @property
    def samples(self) -> int:
        return sum(v.count for v in (self.lhs, self.rhs) if isinstance(v, Estimate))

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: lhs={self.lhs_value:.10g} rhs={self.rhs_value:.10g} "
                f"({self.tolerance}) {self.details}").rstrip()


def statistical_report(name: str, lhs: Value, rhs: Value, details: str = "", sigma: float = SIGMA) -> CheckReport:
    """Two-sided comparison passing when |lhs - rhs| <= sigma * combined stderr."""
    if not isinstance(lhs, Estimate):
        lhs, rhs = rhs, lhs
        if not isinstance(lhs, Estimate):
            raise DomainError("a statistical report needs at least one Estimate")
    z = combined_z(lhs, rhs)
    diff = abs(lhs.mean - CheckReport._num(rhs))
    se = math.hypot(lhs.stderr, rhs.stderr if isinstance(rhs, Estimate) else 0.0)
    # the relative floor only matters for integrands that are constant on the sample
    ok = diff <= sigma * se + REL_FLOOR * max(abs(lhs.mean), abs(CheckReport._num(rhs)))
    note = f"z={z:.3f}" + (f"; {details}" if details else "")
    return CheckReport(name, lhs, rhs, f"|z| <= {sigma:g}", ok, note)


def relative_report(name: str, lhs: float, rhs: float, rtol: float, details: str = "") -> CheckReport:
    err = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    note = f"rel.err={err:.3e}" + (f"; {details}" if details else "")
    return CheckReport(name, float(lhs), float(rhs), f"relative <= {rtol:g}", err <= rtol, note)


def _derive_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


def _chunked(sample: Callable[[np.random.Generator, int], np.ndarray], total: int, seed: int, tag: int) -> Estimate:
    """Estimate of E[sample] from ``total`` draws split into fixed-size substream chunks."""
    if total < 2:
        raise DomainError("a Monte Carlo side needs at least 2 samples")
    parts = []
    for c, start in enumerate(range(0, total, CHUNK)):
        count = min(CHUNK, total - start)
        parts.append(Estimate.from_samples(sample(make_rng(seed, tag, c), count), seed))
    return merge_estimates(parts)


def _full_space_flats(rng, n: int, q: int, R: float, size: int):
    """Flats of A(n, q) meeting the R-ball, with the restricted measure's mass as weight."""
    frames = haar_frames(rng, n, q, size)
    return frames, _ball_in_complement(rng, frames, R), kappa(n - q) * R ** (n - q)


def _test_integrand(offsets: np.ndarray) -> np.ndarray:
    """``exp(-d(o,E)^2)`` restricted to flats meeting the unit ball."""
    d2 = np.einsum("bn,bn->b", offsets, offsets)
    return np.where(d2 <= 1.0, np.exp(-d2), 0.0)


# --------------------------------------------------------------------------
# classical Crofton formula

def check_classical_crofton(n: int, q: int, j: int, body: ConvexBody, budget: int = 200_000,
                            seed: int = 0) -> CheckReport:
    if not 0 <= j <= q <= n:
        raise DomainError(f"need 0 <= j <= q <= n, got n={n}, q={q}, j={j}")
    # a reference ball strictly larger than the body keeps the hit indicator random
    R = 1.25 * body.circumradius()

    def sample(rng, size):
        frames, offsets, w = _full_space_flats(rng, n, q, R, size)
        return w * section_functionals(body, offsets, frames, q - j, rng)

    lhs = _chunked(sample, budget, seed, 0)
    rhs = crofton_const(q - j, n, n - j, q) * exact_intrinsic_volume(body, n - j)
    return statistical_report(f"classical Crofton (n={n}, q={q}, j={j})", lhs, rhs)


# --------------------------------------------------------------------------
# Blaschke-Petkantschin formulas with a fixed subspace

def _perp_projector(L0: Subspace) -> np.ndarray:
    return np.eye(L0.ambient_dim) - L0.frame.T @ L0.frame


def check_bp_linear(n: int, q: int, r: int, k: int, seed: int = 0, budget: int = 1_000_000,
                    L0: Optional[Subspace] = None) -> CheckReport:
    """Flats inside subspaces containing L0 weighted by D(E, L0)^(n-k) versus all flats."""
    if not (q + r + 1 <= k <= n):
        raise DomainError(f"linear fixed-subspace BP needs q+r+1 <= k <= n, got n={n}, q={q}, r={r}, k={k}")
    L0 = sample_grassmannian(n, r, make_rng(seed, 99)) if L0 is None else L0
    P = _perp_projector(L0)

    def lhs_sample(rng, size):
        frames = containing_frames(L0, k, rng, size)
        m_loc = haar_frames(rng, k, q, size)
        z_loc = _ball_in_complement(rng, m_loc, 1.0)
        z = np.einsum("bk,bkn->bn", z_loc, frames)
        m = np.einsum("bqk,bkn->bqn", m_loc, frames)
        vals = _test_integrand(z) * kappa(k - q)
        if n > k:
            rows = np.concatenate([z[:, None, :], m], axis=1) @ P
            vals = vals * gram_volume(rows) ** (n - k)
        return vals

    def rhs_sample(rng, size):
        _, offsets, w = _full_space_flats(rng, n, q, 1.0, size)
        return w * _test_integrand(offsets)

    half = budget // 2
    lhs = _chunked(lhs_sample, half, seed, 1)
    a = alpha_const(n, k, q, r)
    rhs = _chunked(rhs_sample, budget - half, seed, 2).scaled(a)
    return statistical_report(f"linear BP with fixed subspace (n={n}, q={q}, r={r}, k={k})", lhs, rhs,
                              f"alpha={a:.12g}")


def affine_bp_constant(n: int, k: int, q: int, r: int) -> float:
    return b_coeff(k - r, q) / b_coeff(n - r, q) * b_coeff(n, q) / b_coeff(k, q)


def check_bp_affine(n: int, q: int, r: int, k: int, seed: int = 0, budget: int = 1_000_000,
                    L0: Optional[Subspace] = None) -> CheckReport:
    """Flats in translates L + x, x in L^perp, weighted by [lin E, L0]^(n-k) versus all flats."""
    if not (q + r <= k <= n):
        raise DomainError(f"affine fixed-subspace BP needs q+r <= k <= n, got n={n}, q={q}, r={r}, k={k}")
    L0 = sample_grassmannian(n, r, make_rng(seed, 99)) if L0 is None else L0
    P = _perp_projector(L0)

    def lhs_sample(rng, size):
        frames = containing_frames(L0, k, rng, size)
        shift = _complement_ball(rng, frames, 1.0)
        m_loc = haar_frames(rng, k, q, size)
        z_loc = _ball_in_complement(rng, m_loc, 1.0)
        offsets = shift + np.einsum("bk,bkn->bn", z_loc, frames)
        vals = _test_integrand(offsets) * kappa(k - q) * kappa(n - k)
        if n > k and q and r:
            m = np.einsum("bqk,bkn->bqn", m_loc, frames)
            vals = vals * np.minimum(gram_volume(m @ P), 1.0) ** (n - k)
        return vals

    def rhs_sample(rng, size):
        _, offsets, w = _full_space_flats(rng, n, q, 1.0, size)
        return w * _test_integrand(offsets)

    half = budget // 2
    lhs = _chunked(lhs_sample, half, seed, 1)
    const = affine_bp_constant(n, k, q, r)
    rhs = _chunked(rhs_sample, budget - half, seed, 2).scaled(const)
    report = statistical_report(f"affine BP with fixed subspace (n={n}, q={q}, r={r}, k={k})", lhs, rhs,
                                f"constant={const:.12g}")
    if q + r + 1 > k:
        # the reduced form divides by omega_{k-r-q} = omega_0, so there is nothing to compare
        return CheckReport(report.name, report.lhs, report.rhs, report.tolerance, report.passed,
                           f"{report.details}; constant reduction skipped at q = k - r")
    reduced = alpha_const(n, k, q, r) * omega(n - r - q) / omega(k - r - q)
    sub = relative_report("constant reduction", const, reduced, 1e-12)
    return CheckReport(report.name, report.lhs, report.rhs, report.tolerance + " and constant reduction",
                       report.passed and sub.passed, f"{report.details}; reduction {sub.details}")


# --------------------------------------------------------------------------
# independence of the flat dimension q

def _pairwise(name: str, results: dict[int, Estimate], label: str) -> tuple[bool, float, list[str]]:
    ok, worst, notes = True, 0.0, []
    for (qa, ea), (qb, eb) in itertools.combinations(results.items(), 2):
        z = combined_z(ea, eb)
        worst = max(worst, abs(z))
        ok &= abs(z) <= SIGMA
        notes.append(f"{label} q={qa}:{ea.mean:.6g} vs q={qb}:{eb.mean:.6g} z={z:.2f}")
    return ok, worst, notes


def check_uniqueness_q(n: int, k: int, r: int, j: int, body: ConvexBody, draws: int = 10,
                       budget: int = 100_000, seed: int = 0) -> CheckReport:
    """Measurement functions at every admissible q agree on each sampled subspace L."""
    name = f"rotational measurement independent of q (n={n}, k={k}, r={r}, j={j})"
    qs = list(range(j, k - r))
    if len(qs) < 2:
        return CheckReport(name, 0.0, 0.0, "skipped", True, "only one admissible q; nothing to compare")
    L0 = Subspace.coordinate(n, range(n - r, n))
    rng = make_rng(seed, 0)
    all_ok, worst, notes, first = True, 0.0, [], None
    for d in range(draws):
        L = sample_grassmannian_containing(L0, k, rng)
        frame = adapted_frame(L, L0)[None]
        res = {}
        for q in qs:
            spec = EstimatorSpec(Indices(n, k, r, j, q), body, L0, outer_samples=1, inner_samples=budget,
                                 seed=seed)
            vals = _chunked(lambda g, s, _sp=spec: _phi_generic(_sp, frame, g, s)[0], budget, seed, 1000 * d + q)
            res[q] = vals
        ok, w, nts = _pairwise(name, res, f"L#{d}")
        first = first or res
        all_ok &= ok
        worst = max(worst, w)
        if not ok:
            notes.extend(nts)
    lhs, rhs = first[qs[0]], first[qs[-1]]
    return CheckReport(name, lhs, rhs, f"|z| <= {SIGMA:g} for all q-pairs on {draws} subspaces", all_ok,
                       f"max |z|={worst:.3f}" + ("; " + "; ".join(notes) if notes else ""))


def check_uniqueness_q_affine(n: int, k: int, r: int, j: int, body: ConvexBody, draws: int = 10,
                              budget: int = 100_000, seed: int = 0) -> CheckReport:
    """Vertical measurement functions at every admissible q agree at each sampled (L, x)."""
    name = f"vertical measurement independent of q (n={n}, k={k}, r={r}, j={j})"
    qs = list(range(j, k - r + 1))
    if len(qs) < 2:
        return CheckReport(name, 0.0, 0.0, "skipped", True, "only one admissible q; nothing to compare")
    L0 = Subspace.coordinate(n, range(n - r, n))
    rng = make_rng(seed, 0)
    R = body.circumradius()
    all_ok, worst, notes, first = True, 0.0, [], None
    for d in range(draws):
        L = sample_grassmannian_containing(L0, k, rng)
        frame = adapted_frame(L, L0)[None]
        shift = _complement_ball(rng, frame, 0.5 * R)
        res = {}
        for q in qs:
            spec = EstimatorSpec(Indices(n, k, r, j, q), body, L0, outer_samples=1, inner_samples=budget,
                                 seed=seed, design="vertical")
            res[q] = _chunked(lambda g, s, _sp=spec: _tilde_batch(_sp, frame, shift, g, s)[0],
                              budget, seed, 1000 * d + q)
        ok, w, nts = _pairwise(name, res, f"(L,x)#{d}")
        first = first or res
        all_ok &= ok
        worst = max(worst, w)
        if not ok:
            notes.extend(nts)
    lhs, rhs = first[qs[0]], first[qs[-1]]
    return CheckReport(name, lhs, rhs, f"|z| <= {SIGMA:g} for all q-pairs at {draws} translates", all_ok,
                       f"max |z|={worst:.3f}" + ("; " + "; ".join(notes) if notes else ""))


# --------------------------------------------------------------------------
# the weight D(E, L0)

def _random_flat(rng, n: int, q: int) -> Flat:
    M = sample_grassmannian(n, q, rng)
    z = rng.standard_normal(n)
    return Flat(M, z - M.project(z))


def d_weight_discrepancies(n: int, q: int, r: int, trials: int = 200, seed: int = 0) -> dict[str, float]:
    """Maximum relative discrepancy of each alternative formula for D(E, L0)."""
    if q + r > n - 1:
        raise DomainError(f"D(E, L0) needs q + r <= n - 1, got q={q}, r={r}, n={n}")
    rng = make_rng(seed, 0)
    worst = {"product": 0.0, "points": 0.0}
    if q + r <= n - 2:
        worst["extension"] = 0.0

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-300)

    for _ in range(trials):
        L0 = sample_grassmannian(n, r, rng)
        E = _random_flat(rng, n, q)
        D = d_weight_definition(E, L0)
        worst["product"] = max(worst["product"], rel(D, d_weight(E, L0)))
        # E as the affine hull of q+1 random points
        pts = E.parametrize(rng.standard_normal((q + 1, q))) if q else E.offset[None]
        simplex = delta(pts) if q else 1.0
        ratio = nabla_mixed(pts, L0) / (math.factorial(q) * simplex)
        worst["points"] = max(worst["points"], rel(D, ratio))
        if "extension" in worst:
            M = E.direction
            u = rng.standard_normal(n)
            u -= M.project(u)
            u /= np.linalg.norm(u)
            grown = Subspace(np.vstack([M.frame, u]), n)
            E2 = Flat(grown, E.offset - grown.project(E.offset))
            span = np.vstack([L0.frame, M.frame, E.offset[None]])
            qmat, _ = np.linalg.qr(span.T)
            factor = np.linalg.norm(u - qmat @ (qmat.T @ u))
            worst["extension"] = max(worst["extension"], rel(d_weight_definition(E2, L0), D * factor))
    return worst


def check_lemma_D(n: int, q: int, r: int, trials: int = 200, seed: int = 0) -> CheckReport:
    worst = d_weight_discrepancies(n, q, r, trials, seed)
    tol = {"product": 1e-10, "points": 1e-8, "extension": 1e-8}
    ok = all(v <= tol[key] for key, v in worst.items())
    top = max(worst.values())
    details = ", ".join(f"{key}={v:.2e}" for key, v in worst.items())
    return CheckReport(f"D(E, L0) alternative forms (n={n}, q={q}, r={r}, {trials} trials)", top, 0.0,
                       "product <= 1e-10, points and extension <= 1e-8 relative", ok, details)


# --------------------------------------------------------------------------
# sphere integrals

def cylinder_inner_integral(n: int) -> float:
    """Integral of (1 - t^2)^((n-3)/2) over [-1, 1], evaluated by quadrature."""
    return integrate.quad(lambda t: (1.0 - t * t) ** ((n - 3) / 2.0), -1.0, 1.0)[0]


def sphere_projection_moment(d: int, j: int, p: int) -> float:
    """Closed form of the integral over S^(d-1) of ||p(u | L')||^j with dim L' = p."""
    return omega(d + j) * omega(p) / omega(p + j)


def check_sphere_identities(n: int, seed: int = 0, budget: int = 200_000,
                            moments=((3, 1, 1), (4, 2, 2), (5, 1, 3))) -> CheckReport:
    if n < 3:
        raise DomainError("sphere identities are checked for n >= 3")
    a = np.linspace(0.3, 0.9, n)
    reports = []

    def direct(rng, size):
        return omega(n) * np.exp(uniform_sphere(rng, n, size) @ a)

    def nested(rng, size):
        # u = t e_1 + sqrt(1 - t^2) w with w uniform on the sphere of e_1^perp
        t = rng.uniform(-1.0, 1.0, size)
        w = np.concatenate([np.zeros((size, 1)), uniform_sphere(rng, n - 1, size)], axis=1)
        u = t[:, None] * np.eye(n)[0] + np.sqrt(1 - t * t)[:, None] * w
        return 2.0 * (1 - t * t) ** ((n - 3) / 2.0) * omega(n - 1) * np.exp(u @ a)

    reports.append(statistical_report(f"cylindrical coordinates on S^{n - 1}",
                                      _chunked(direct, budget, seed, 0), _chunked(nested, budget, seed, 1)))
    reports.append(relative_report("cylindrical radial factor", cylinder_inner_integral(n),
                                   omega(n) / omega(n - 1), 1e-10))
    for idx, (d, j, p) in enumerate(moments):
        def moment(rng, size, d=d, j=j, p=p):
            u = uniform_sphere(rng, d, size)
            return omega(d) * np.linalg.norm(u[:, :p], axis=1) ** j
        reports.append(statistical_report(f"projection moment (d={d}, j={j}, p={p})",
                                          _chunked(moment, budget, seed, 10 + idx),
                                          sphere_projection_moment(d, j, p)))
    ok = all(r.passed for r in reports)
    bad = [r for r in reports if not r.passed] or reports
    return CheckReport(f"sphere identities (n={n})", bad[0].lhs, bad[0].rhs, "|z| <= 4 and quadrature 1e-10",
                       ok, "; ".join(str(r) for r in reports))


# --------------------------------------------------------------------------
# intrinsic volumes that are not determined by sections

def impossibility_bodies(n: int, r: int, m: int):
    """Two bodies with the same sections by every generic L containing L0 but different V_m.

    Returns ``(L0, K1, K2, aff_K1)``: L0 spans the first r axes, ``K2`` is
    ``None`` when it is empty, and ``aff_K1`` is an orthonormal frame of the
    affine hull of K1 (through the origin).
    """
    L0 = Subspace.coordinate(n, range(r))
    u = np.eye(n)[n - 1]
    if m == 0:
        point = u
        K1 = _Singleton(point)
        return L0, K1, None, np.zeros((0, n))
    L_prime = Subspace.coordinate(n, range(m - 1))
    K1 = swept_ball_body(L_prime, u)
    K2 = _FlatDisk(L_prime)
    return L0, K1, K2, np.vstack([L_prime.frame, u])


class _Singleton:
    def __init__(self, point):
        self.point = np.asarray(point, dtype=float)

    def contains(self, x):
        return np.linalg.norm(np.asarray(x) - self.point, axis=-1) <= 1e-10


class _FlatDisk:
    """Unit ball of a linear subspace L' (lower-dimensional convex body)."""

    def __init__(self, L_prime: Subspace):
        self.L = L_prime

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        inside = self.L.project(x)
        return ((np.linalg.norm(x - inside, axis=-1) <= 1e-10)
                & (np.linalg.norm(inside, axis=-1) <= 1 + 1e-10))

    def sample(self, rng, size):
        d = self.L.dim
        if d == 0:
            return np.zeros((size, self.L.ambient_dim))
        g = uniform_sphere(rng, d, size) * (rng.random(size) ** (1.0 / d))[:, None]
        return g @ self.L.frame


def check_impossibility(n: int, k: int, r: int, m: int, seed: int = 0, draws: int = 1000,
                        probes: int = 10_000, volume_budget: int = 200_000) -> CheckReport:
    """Sections of K1 and K2 by subspaces containing L0 coincide while V_m(K1) > 0 = V_m(K2)."""
    if not (r + 1 <= k <= n - 1):
        raise DomainError(f"the counterexample needs r+1 <= k <= n-1, got n={n}, k={k}, r={r}")
    if not 0 <= m <= r + 1:
        raise DomainError(f"the counterexample needs 0 <= m <= r+1, got m={m}, r={r}")
    name = f"V_{m} not determined by sections through L0 (n={n}, k={k}, r={r})"
    L0, K1, K2, aff = impossibility_bodies(n, r, m)
    rng = make_rng(seed, 0)
    disagree, checked = 0, 0
    for _ in range(draws):
        L = sample_grassmannian_containing(L0, k, rng)
        if K2 is None:
            # both sections are empty unless the single point of K1 lies in L
            dist = np.linalg.norm(K1.point - L.project(K1.point))
            disagree += int(dist <= 1e-10)
            checked += 1
            continue
        per = max(probes // 3, 1)
        in_L = uniform_sphere(rng, k, per) * (math.sqrt(2.0) * rng.random(per) ** (1.0 / k))[:, None]
        pts = [K2.sample(rng, per), in_L @ L.frame]
        t = rng.random(per)
        k1_pts = K2.sample(rng, per) + t[:, None] * np.eye(n)[n - 1]
        pts.append(L.project(k1_pts))
        pts = np.vstack(pts)
        disagree += int(np.count_nonzero(K1.contains(pts) != K2.contains(pts)))
        checked += pts.shape[0]
    if K2 is None:
        v1, v2 = 1.0, 0.0
        vol_ok = True
        vol_note = "V_0 = 1 for the singleton and 0 for the empty set"
    else:
        # hit-or-miss in aff K1 = L' + span{u}: a box [-1,1]^(m-1) x [0,1]
        def hits(g, size):
            c = np.concatenate([g.uniform(-1, 1, (size, m - 1)), g.random((size, 1))], axis=1)
            return 2.0 ** (m - 1) * K1.contains(c @ aff).astype(float)
        v1 = _chunked(hits, volume_budget, seed, 1)
        v2 = 0.0
        vol_ok = v1.mean - SIGMA * v1.stderr > 0.0
        vol_note = f"V_{m}(K2)=0 since dim K2 = {m - 1}"
    ok = disagree == 0 and vol_ok
    return CheckReport(name, v1, v2, "sections agree at every probe and V_m(K1) > 4 stderr", ok,
                       f"{disagree} disagreements in {checked} probes over {draws} subspaces; {vol_note}")


impossibility_demo = check_impossibility


# --------------------------------------------------------------------------
# constants

def check_constants(max_n: int = 10) -> CheckReport:
    """Reductions between the normalising constants, to 1e-12 relative."""
    worst = {"omega": 0.0, "alpha r=0": 0.0, "affine reduction": 0.0, "classical vertical": 0.0}

    def upd(key, a, b):
        worst[key] = max(worst[key], abs(a - b) / max(abs(a), abs(b)))

    for n in range(1, 26):
        upd("omega", omega(n), n * kappa(n))
    for n in range(3, max_n + 1):
        for k in range(1, n + 1):
            for q in range(0, k):
                upd("alpha r=0", alpha_const(n, k, q, 0), omega(k - q) / omega(n - q))
            for r in range(0, k):
                for q in range(0, k - r):
                    upd("affine reduction", affine_bp_constant(n, k, q, r),
                        alpha_const(n, k, q, r) * omega(n - r - q) / omega(k - r - q))
            for j in range(0, k + 1):
                upd("classical vertical", d_const(n, k, 0, j, k), crofton_const(n - j, k, k - j, n))
    c0 = c0_const(3, 2, 0, 1, 0)
    upd_key = "c0(3,2,0,1,0)=pi"
    worst[upd_key] = abs(c0 - math.pi) / math.pi
    ok = all(v <= 1e-12 for v in worst.values())
    return CheckReport("constant identities", max(worst.values()), 0.0, "relative <= 1e-12", ok,
                       ", ".join(f"{key}: {v:.1e}" for key, v in worst.items()))


# --------------------------------------------------------------------------
# the battery

def default_battery(scale: float = 1.0) -> list[tuple[str, Callable[..., CheckReport], dict]]:
    """Checks of the full battery as ``(label, function, kwargs)``; budgets scaled by ``scale``."""
    b = lambda x: max(int(x * scale), 1000)
    B3, B4, B5 = (Ball(np.zeros(d), 1.0) for d in (3, 4, 5))
    return [
        ("constants", check_constants, {}),
        ("crofton-3-2-0", check_classical_crofton, dict(n=3, q=2, j=0, body=B3, budget=b(2e5))),
        ("crofton-3-2-2", check_classical_crofton, dict(n=3, q=2, j=2, body=B3, budget=b(2e5))),
        ("crofton-3-0-0", check_classical_crofton, dict(n=3, q=0, j=0, body=B3, budget=b(2e5))),
        ("bp-linear-4-1-1-3", check_bp_linear, dict(n=4, q=1, r=1, k=3, budget=b(1e6))),
        ("bp-linear-3-0-1-2", check_bp_linear, dict(n=3, q=0, r=1, k=2, budget=b(1e6))),
        ("bp-linear-4-1-1-4", check_bp_linear, dict(n=4, q=1, r=1, k=4, budget=b(2e5))),
        ("bp-affine-3-1-1-2", check_bp_affine, dict(n=3, q=1, r=1, k=2, budget=b(1e6))),
        ("bp-affine-4-2-1-3", check_bp_affine, dict(n=4, q=2, r=1, k=3, budget=b(1e6))),
        ("bp-affine-4-1-1-3", check_bp_affine, dict(n=4, q=1, r=1, k=3, budget=b(4e5))),
        ("unique-4-3-0-0", check_uniqueness_q, dict(n=4, k=3, r=0, j=0, body=B4, budget=b(5e4))),
        ("unique-5-4-1-0", check_uniqueness_q, dict(n=5, k=4, r=1, j=0, body=B5, budget=b(5e4))),
        ("unique-4-3-0-1", check_uniqueness_q, dict(n=4, k=3, r=0, j=1, body=B4, budget=b(5e4))),
        ("unique-affine-3-2-1-0", check_uniqueness_q_affine, dict(n=3, k=2, r=1, j=0, body=B3, budget=b(5e4))),
        ("unique-affine-4-3-1-0", check_uniqueness_q_affine, dict(n=4, k=3, r=1, j=0, body=B4, budget=b(5e4))),
        ("unique-affine-4-3-1-1", check_uniqueness_q_affine, dict(n=4, k=3, r=1, j=1, body=B4, budget=b(5e4))),
        ("d-weight-5-2-1", check_lemma_D, dict(n=5, q=2, r=1)),
        ("d-weight-4-1-1", check_lemma_D, dict(n=4, q=1, r=1)),
        ("d-weight-4-0-2", check_lemma_D, dict(n=4, q=0, r=2)),
        ("d-weight-3-1-1", check_lemma_D, dict(n=3, q=1, r=1)),
        ("sphere-3", check_sphere_identities, dict(n=3, budget=b(2e5))),
        ("sphere-4", check_sphere_identities, dict(n=4, budget=b(2e5))),
        ("sphere-5", check_sphere_identities, dict(n=5, budget=b(2e5))),
        ("impossible-3-2-1-2", check_impossibility, dict(n=3, k=2, r=1, m=2)),
        ("impossible-4-3-1-1", check_impossibility, dict(n=4, k=3, r=1, m=1)),
        ("impossible-3-2-1-0", check_impossibility, dict(n=3, k=2, r=1, m=0)),
    ]


def run_battery(seed: int = 20240101, jobs: int = 1, scale: float = 1.0,
                select: Optional[Callable[[str], bool]] = None) -> list[CheckReport]:
    """Run the verification battery; check i uses a seed derived from ``(seed, i)``."""
    jobs_list = [(i, label, fn, kw) for i, (label, fn, kw) in enumerate(default_battery(scale))
                 if select is None or select(label)]

    def work(item):
        i, _, fn, kw = item
        if fn is check_constants:
            return fn(**kw)
        return fn(seed=_derive_seed(seed, i), **kw)

    if jobs <= 1:
        return [work(item) for item in jobs_list]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, jobs_list))
