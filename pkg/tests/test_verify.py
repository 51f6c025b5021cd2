import math

import numpy as np
import pytest

from crofton.bodies import Ball, Box
from crofton.constants import alpha_const, omega
from crofton.estimate import Estimate
from crofton.exceptions import DomainError
from crofton.geometry import Flat, Subspace, d_weight, d_weight_definition, nabla_mixed
from crofton.verify import (
    CheckReport,
    affine_bp_constant,
    check_bp_affine,
    check_bp_linear,
    check_classical_crofton,
    check_constants,
    check_impossibility,
    check_lemma_D,
    check_sphere_identities,
    check_uniqueness_q,
    check_uniqueness_q_affine,
    cylinder_inner_integral,
    d_weight_discrepancies,
    default_battery,
    impossibility_bodies,
    relative_report,
    run_battery,
    sphere_projection_moment,
    statistical_report,
)

PI = math.pi
B3 = Ball(np.zeros(3), 1.0)


class TestReports:
    def test_statistical_pass_and_fail(self):
        est = Estimate(1.0, 0.1, 100)
        assert statistical_report("x", est, 1.39).passed
        assert not statistical_report("x", est, 1.41).passed

    def test_rhs_estimate_combines_errors(self):
        a, b = Estimate(1.0, 0.3, 10), Estimate(2.9, 0.4, 10)
        assert statistical_report("x", a, b).passed  # combined stderr 0.5
        assert not statistical_report("x", a, Estimate(3.1, 0.4, 10)).passed

    def test_passed_is_function_of_values(self):
        est = Estimate(2.0, 0.25, 50)
        assert statistical_report("a", est, 3.0, "one").passed == statistical_report("b", est, 3.0, "two").passed

    def test_exact_sides_rejected(self):
        with pytest.raises(DomainError):
            statistical_report("x", 1.0, 1.0)

    def test_relative(self):
        assert relative_report("x", 1.0, 1.0 + 1e-13, 1e-12).passed
        assert not relative_report("x", 1.0, 1.001, 1e-12).passed

    def test_str_names_outcome(self):
        rep = CheckReport("demo", 1.0, 1.0, "exact", True)
        assert str(rep).startswith("[PASS] demo")


class TestClassicalCrofton:
    def test_volume_by_flats_of_dimension_two(self):
        assert check_classical_crofton(3, 2, 0, B3, budget=100_000, seed=1).passed

    def test_mean_width_case(self):
        rep = check_classical_crofton(3, 2, 2, B3, budget=100_000, seed=2)
        assert rep.passed
        assert rep.rhs_value == pytest.approx(rep.rhs_value)  # exact side is a float
        assert isinstance(rep.rhs, float)

    def test_points_give_volume(self):
        rep = check_classical_crofton(3, 0, 0, B3, budget=100_000, seed=3)
        assert rep.passed and rep.rhs_value == pytest.approx(4 * PI / 3, rel=1e-14)

    def test_box(self):
        assert check_classical_crofton(3, 1, 1, Box(np.zeros(3), np.array([1.0, 2.0, 0.5])), 100_000, 4).passed

    def test_bad_indices(self):
        with pytest.raises(DomainError):
            check_classical_crofton(3, 1, 2, B3)


class TestBlaschkePetkantschin:
    def test_linear_full_space_constant_is_one(self):
        assert alpha_const(4, 4, 1, 1) == pytest.approx(1.0, rel=1e-14)
        assert check_bp_linear(4, 1, 1, 4, seed=1, budget=50_000).passed

    def test_linear_small(self):
        assert check_bp_linear(4, 1, 1, 3, seed=2, budget=100_000).passed

    def test_linear_index_error(self):
        with pytest.raises(DomainError):
            check_bp_linear(4, 2, 1, 3)

    def test_affine_full_space(self):
        assert affine_bp_constant(4, 4, 1, 1) == pytest.approx(1.0, rel=1e-14)
        assert check_bp_affine(4, 1, 1, 4, seed=3, budget=50_000).passed

    def test_affine_small(self):
        assert check_bp_affine(3, 1, 1, 2, seed=4, budget=100_000).passed

    def test_affine_top_q_notes_skipped_reduction(self):
        rep = check_bp_affine(4, 2, 1, 3, seed=5, budget=50_000)
        assert rep.passed
        assert "skipped" in rep.details

    def test_affine_index_error(self):
        with pytest.raises(DomainError):
            check_bp_affine(4, 3, 1, 3)


class TestUniqueness:
    def test_rotational_ball(self):
        assert check_uniqueness_q(4, 3, 0, 0, Ball(np.zeros(4), 1.0), draws=2, budget=20_000, seed=1).passed

    def test_rotational_box(self):
        box = Box(-np.ones(4), np.ones(4))
        assert check_uniqueness_q(4, 3, 0, 1, box, draws=2, budget=20_000, seed=2).passed

    def test_singleton_range_is_skipped(self):
        rep = check_uniqueness_q(3, 2, 1, 0, B3)
        assert rep.passed and rep.tolerance == "skipped"

    def test_vertical(self):
        assert check_uniqueness_q_affine(3, 2, 1, 0, B3, draws=2, budget=20_000, seed=3).passed

    def test_vertical_singleton_range(self):
        rep = check_uniqueness_q_affine(3, 2, 1, 1, B3)
        assert rep.tolerance == "skipped"


class TestDWeightForms:
    def test_flat_through_origin_gives_zero(self):
        L0 = Subspace.coordinate(5, [4])
        E = Flat(Subspace.coordinate(5, [0, 1]), np.zeros(5))
        assert d_weight_definition(E, L0) == pytest.approx(0.0, abs=1e-14)
        assert d_weight(E, L0) == pytest.approx(0.0, abs=1e-14)
        pts = E.parametrize(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        assert nabla_mixed(pts, L0) == pytest.approx(0.0, abs=1e-14)

    def test_orthogonal_unit_offset_gives_one(self):
        L0 = Subspace.coordinate(5, [4])
        E = Flat(Subspace.coordinate(5, [0, 1]), np.eye(5)[2])
        assert d_weight_definition(E, L0) == pytest.approx(1.0, rel=1e-14)
        assert d_weight(E, L0) == pytest.approx(1.0, rel=1e-14)
        pts = E.parametrize(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        # nabla over q! times the simplex volume; the unit right simplex has volume 1/2
        assert nabla_mixed(pts, L0) / (2 * 0.5) == pytest.approx(1.0, rel=1e-12)

    def test_three_routes(self):
        worst = d_weight_discrepancies(5, 2, 1, trials=200, seed=1)
        assert set(worst) == {"product", "points", "extension"}
        assert max(worst.values()) <= 1e-8

    def test_extension_absent_at_top(self):
        assert "extension" not in d_weight_discrepancies(4, 2, 1, trials=5)

    def test_report(self):
        assert check_lemma_D(4, 1, 1, trials=50, seed=2).passed

    def test_index_error(self):
        with pytest.raises(DomainError):
            d_weight_discrepancies(4, 2, 2)


class TestSphere:
    @pytest.mark.parametrize("n", [3, 4, 5, 8])
    def test_inner_integral(self, n):
        assert cylinder_inner_integral(n) == pytest.approx(omega(n) / omega(n - 1), rel=1e-10)

    def test_zero_moment(self):
        assert sphere_projection_moment(4, 0, 2) == pytest.approx(omega(4), rel=1e-14)

    def test_moment_example(self):
        assert sphere_projection_moment(3, 1, 1) == pytest.approx(2 * PI, rel=1e-14)

    def test_report(self):
        assert check_sphere_identities(4, seed=1, budget=50_000).passed

    def test_low_dimension(self):
        with pytest.raises(DomainError):
            check_sphere_identities(2)


class TestImpossibility:
    def test_singleton(self):
        rep = check_impossibility(3, 2, 1, 0, seed=1, draws=200)
        assert rep.passed and (rep.lhs_value, rep.rhs_value) == (1.0, 0.0)

    def test_bodies_have_stated_dimensions(self):
        L0, K1, K2, aff = impossibility_bodies(3, 1, 2)
        assert aff.shape == (2, 3)
        assert K2.contains(np.zeros(3)) and K1.contains(np.zeros(3))
        # the extra segment direction sticks out of K2 only
        u = aff[-1]
        assert K1.contains(0.5 * u) and not K2.contains(0.5 * u)

    def test_small(self):
        assert check_impossibility(3, 2, 1, 2, seed=2, draws=50, probes=600, volume_budget=20_000).passed

    def test_index_errors(self):
        with pytest.raises(DomainError):
            check_impossibility(3, 3, 1, 1)
        with pytest.raises(DomainError):
            check_impossibility(4, 3, 1, 3)


def test_constants_report():
    rep = check_constants()
    assert rep.passed and rep.lhs_value <= 1e-12


class TestBattery:
    def test_labels_unique(self):
        labels = [lab for lab, _, _ in default_battery()]
        assert len(labels) == len(set(labels))

    def test_scaled_battery_is_deterministic(self):
        select = lambda lab: lab.startswith(("crofton", "sphere-3", "d-weight-3"))
        a = run_battery(seed=3, scale=0.05, select=select)
        b = run_battery(seed=3, scale=0.05, select=select, jobs=3)
        assert [r.lhs_value for r in a] == [r.lhs_value for r in b]
        assert all(r.passed for r in a)

    def test_seed_per_check_is_stable_under_selection(self):
        full = run_battery(seed=5, scale=0.02, select=lambda lab: lab.startswith("crofton"))
        one = run_battery(seed=5, scale=0.02, select=lambda lab: lab == "crofton-3-2-2")
        assert full[1].lhs_value == one[0].lhs_value
