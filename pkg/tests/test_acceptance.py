"""Acceptance criteria A1 to A10; a summary line per criterion is printed at the end of the run."""
import math
import time

import numpy as np
import pytest

from crofton.bodies import Ball, Box
from crofton.constants import alpha_const, c0_const, crofton_const, d_const, kappa, omega
from crofton.estimators import (
    EstimatorSpec,
    Indices,
    measurement_phi_radial,
    rotational_crofton_estimate,
    vertical_sections_estimate,
)
from crofton.geometry import make_rng, sample_grassmannian_containing
from crofton.validation import check_subspace
from crofton.verify import (
    affine_bp_constant,
    check_bp_affine,
    check_bp_linear,
    check_lemma_D,
    check_sphere_identities,
    check_uniqueness_q,
    impossibility_demo,
)

PI = math.pi
SIGMA = 4.0
BALL3 = Ball(np.zeros(3), 1.0)


def spec(n, k, r, j, q, body, design="rotational", outer=100_000, inner=16, seed=0):
    return EstimatorSpec(Indices(n, k, r, j, q), body, check_subspace(None, n, r), outer_samples=outer,
                         inner_samples=inner, seed=seed, design=design)


def z_line(est, exact):
    return f"mean={est.mean:.6f} exact={exact:.6f} z={est.z_score(exact):+.2f} N={est.count}"


@pytest.mark.acceptance("A1")
def test_a1_vertical_rotator(detail):
    start = time.perf_counter()
    est = rotational_crofton_estimate(spec(3, 2, 1, 0, 0, BALL3, inner=64, seed=101))
    seconds = time.perf_counter() - start
    detail(z_line(est, 4 * PI / 3) + f" {seconds:.1f}s")
    assert est.count == 100_000
    assert abs(est.z_score(4 * PI / 3)) <= SIGMA
    assert seconds < 60.0


@pytest.mark.acceptance("A2")
@pytest.mark.parametrize("n,k,r", [(3, 2, 1), (4, 3, 1), (5, 3, 2)])
def test_a2_radial_ball(n, k, r, detail):
    s = spec(n, k, r, 0, 0, Ball(np.zeros(n), 1.0), inner=4000, seed=200 + n)
    rng = make_rng(s.seed, 1)
    zs = []
    for _ in range(50):
        L = sample_grassmannian_containing(s.L0, k, rng)
        zs.append(measurement_phi_radial(s, L, rng).z_score(kappa(n)))
    detail(f"max |z| over 50 subspaces = {max(map(abs, zs)):.2f}")
    assert max(map(abs, zs)) <= SIGMA


@pytest.mark.acceptance("A3")
@pytest.mark.parametrize("k,j,exact", [(1, 0, 4 * PI / 3), (2, 1, 2 * PI)], ids=["nucleator", "surfactor"])
def test_a3_r0_reduction(k, j, exact, detail):
    est = rotational_crofton_estimate(spec(3, k, 0, j, j, BALL3, outer=50_000, seed=300 + k))
    detail(z_line(est, exact))
    assert abs(est.z_score(exact)) <= SIGMA


@pytest.mark.acceptance("A4")
def test_a4_four_dimensional_example(detail):
    est = rotational_crofton_estimate(spec(4, 3, 1, 1, 1, Ball(np.zeros(4), 1.0), seed=401))
    detail(z_line(est, PI ** 2))
    assert est.count == 100_000
    assert abs(est.z_score(PI ** 2)) <= SIGMA


@pytest.mark.acceptance("A5")
def test_a5_cube(detail):
    shift = np.array([0.3, 0.45, 0.6])
    cube = Box(-shift, 1.0 - shift)
    assert cube.contains(np.zeros(3))
    est = rotational_crofton_estimate(spec(3, 2, 1, 0, 0, cube, seed=501))
    detail(z_line(est, 1.0))
    assert abs(est.z_score(1.0)) <= SIGMA


@pytest.mark.acceptance("A6")
@pytest.mark.parametrize("kind,n,q,r,k", [
    ("linear", 4, 1, 1, 3), ("linear", 3, 0, 1, 2), ("affine", 3, 1, 1, 2), ("affine", 4, 2, 1, 3)])
def test_a6_bp_identities(kind, n, q, r, k, detail):
    fn = check_bp_linear if kind == "linear" else check_bp_affine
    rep = fn(n, q, r, k, seed=600 + n * 100 + q * 10 + k, budget=1_000_000)
    detail(f"{kind} {rep.details}")
    assert rep.samples == 1_000_000
    assert rep.passed, str(rep)


@pytest.mark.acceptance("A7")
@pytest.mark.parametrize("j,q,exact", [(1, 1, 2 * PI), (0, 0, 4 * PI / 3), (0, 1, 4 * PI / 3)])
def test_a7_vertical_sections(j, q, exact, detail):
    est = vertical_sections_estimate(spec(3, 2, 1, j, q, BALL3, design="vertical", outer=50_000,
                                          seed=700 + 10 * j + q))
    detail(z_line(est, exact))
    assert abs(est.z_score(exact)) <= SIGMA


@pytest.mark.acceptance("A8")
@pytest.mark.parametrize("n,k,r", [(4, 3, 0), (5, 4, 1)])
def test_a8_uniqueness(n, k, r, detail):
    rep = check_uniqueness_q(n, k, r, 0, Ball(np.zeros(n), 1.0), draws=10, budget=50_000, seed=800 + n)
    detail(rep.details.split(";")[0])
    assert rep.passed, str(rep)


@pytest.mark.acceptance("A9")
@pytest.mark.parametrize("n,k,r,m", [(3, 2, 1, 2), (4, 3, 1, 1), (3, 2, 1, 0)])
def test_a9_impossibility(n, k, r, m, detail):
    rep = impossibility_demo(n, k, r, m, seed=900 + m)
    detail(f"V_{m}: {rep.lhs_value:.4g} vs {rep.rhs_value:.4g}; {rep.details.split(';')[0]}")
    assert rep.passed, str(rep)


@pytest.mark.acceptance("A10")
@pytest.mark.parametrize("n,q,r", [(5, 2, 1), (4, 1, 1), (4, 0, 2), (6, 2, 2)])
def test_a10_d_weight_forms(n, q, r, detail):
    rep = check_lemma_D(n, q, r, trials=200, seed=1000 + n)
    detail(rep.details)
    assert rep.passed


@pytest.mark.acceptance("A10")
def test_a10_constant_identities(detail):
    worst = 0.0

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b))

    for n in range(3, 11):
        for k in range(1, n + 1):
            for q in range(0, k):
                worst = max(worst, rel(alpha_const(n, k, q, 0), omega(k - q) / omega(n - q)))
            for r in range(0, k):
                for q in range(0, k - r):
                    worst = max(worst, rel(affine_bp_constant(n, k, q, r),
                                           alpha_const(n, k, q, r) * omega(n - r - q) / omega(k - r - q)))
            for j in range(0, k + 1):
                worst = max(worst, rel(d_const(n, k, 0, j, k), crofton_const(n - j, k, k - j, n)))
    worst = max(worst, rel(c0_const(3, 2, 0, 1, 0), PI))
    detail(f"max relative error {worst:.2e}")
    assert worst <= 1e-12


@pytest.mark.acceptance("A10")
@pytest.mark.parametrize("n", [3, 4, 5])
def test_a10_sphere_identities(n, detail):
    rep = check_sphere_identities(n, seed=1100 + n, budget=200_000)
    detail("passed" if rep.passed else rep.details)
    assert rep.passed, rep.details
