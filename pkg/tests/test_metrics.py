import math

import numpy as np
import pytest

from conftest import random_convex_polygon, unit_cube
from projmetrics.bodies import VPolytope
from projmetrics.constructions import NeedleSpec, augment, cross_section, prism_needle
from projmetrics.grassmann import axis_subspace, full_space, haar_sample
from projmetrics.metrics import (
    SamplingPlan,
    UnsupportedModeError,
    delta_j,
    fiber_profile,
    hausdorff,
    intrinsic_volume,
    projected_volume,
    symdiff_volume,
)
from projmetrics.numerics import RngStream


def grassmann_line_average_oracle(n: int = 20_001) -> float:
    # quadrature oracle for E |cos(angle)| over random lines in R^3:
    # (1/2) int_0^pi |cos t| sin t dt
    t = np.linspace(0.0, math.pi, n)
    f = np.abs(np.cos(t)) * np.sin(t) / 2.0
    return float(np.trapezoid(f, t))


class TestProjectedVolume:
    def test_cube_axis_shadow(self, cube3, plane_e12):
        est = projected_volume(cube3, plane_e12, SamplingPlan(seed=0))
        assert est.exact and est.value == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_projection(self):
        seg = VPolytope([[0.0, 0.0, 0.0], [0.0, 0.0, 4.0]])
        est = projected_volume(seg, axis_subspace(3, [0, 1]), SamplingPlan(seed=0))
        assert est.value == 0.0

    def test_mc_matches_exact_polygon(self, cube3):
        h = haar_sample(3, 2, RngStream(31, 0))
        exact = projected_volume(cube3, h, SamplingPlan(seed=1))
        mc = projected_volume(cube3, h, SamplingPlan(n_points=100_000, seed=1,
                                                     mode="monte_carlo"))
        assert abs(mc.value - exact.value) <= 4.0 * mc.std_error

    def test_exact_mode_unavailable_high_dim(self, cube3):
        with pytest.raises(UnsupportedModeError):
            projected_volume(cube3, full_space(3), SamplingPlan(seed=0, mode="exact"))

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone_under_containment(self, seed):
        rng = np.random.default_rng(seed)
        small = VPolytope(rng.uniform(-1, 1, size=(6, 3)))
        big = VPolytope(np.vstack([small.vertices, rng.uniform(-1.5, 1.5, size=(4, 3))]))
        h = haar_sample(3, 2, RngStream(seed, 77))
        vs = projected_volume(small, h, SamplingPlan(seed=0))
        vb = projected_volume(big, h, SamplingPlan(seed=0))
        assert vs.value <= vb.value + 1e-12


class TestSymdiffVolume:
    def test_identical_operands(self, square2):
        assert symdiff_volume(square2, square2, SamplingPlan(seed=0)).value == 0.0

    def test_nested_squares(self):
        small = VPolytope([[0, 0], [1, 0], [1, 1], [0, 1.0]])
        big = VPolytope([[0, 0], [2, 0], [2, 2], [0, 2.0]])
        est = symdiff_volume(small, big, SamplingPlan(seed=0))
        assert est.exact and est.value == pytest.approx(3.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_mc_within_four_se(self, seed):
        rng = np.random.default_rng(seed)
        a = random_convex_polygon(rng)
        b = random_convex_polygon(rng)
        exact = symdiff_volume(a, b, SamplingPlan(seed=2))
        mc = symdiff_volume(a, b, SamplingPlan(n_points=100_000, seed=2,
                                               mode="monte_carlo"))
        assert abs(mc.value - exact.value) <= 4.0 * mc.std_error

    def test_interval_symdiff(self):
        a = VPolytope([[0.0], [2.0]])
        b = VPolytope([[1.0], [4.0]])
        est = symdiff_volume(a, b, SamplingPlan(seed=0))
        assert est.value == pytest.approx(3.0, abs=1e-12)  # (2-1) + (4-2)


class TestDeltaJ:
    def test_self_distance_draws_nothing(self, cube3):
        est = delta_j(cube3, cube3, 2, SamplingPlan(seed=0))
        assert est.value == 0.0 and est.std_error == 0.0 and est.n_subspaces == 0

    def test_both_empty(self):
        est = delta_j(None, None, 2, SamplingPlan(seed=0))
        assert est.value == 0.0 and est.exact

    def test_top_dimension_is_symmetric_difference(self):
        small = VPolytope([[0, 0], [1, 0], [1, 1], [0, 1.0]])
        tall = VPolytope([[0, 0], [1, 0], [1, 2], [0, 2.0]])
        est = delta_j(small, tall, 2, SamplingPlan(seed=0))
        assert est.exact and est.n_subspaces == 1
        assert est.value == pytest.approx(1.0, abs=1e-12)

    def test_empty_operand_is_projection_volume(self, cube3):
        plan = SamplingPlan(n_subspaces=500, seed=9)
        est = delta_j(cube3, None, 2, plan)
        assert abs(est.value - 3.0) <= 4.0 * est.std_error

    def test_symmetry_bitwise(self):
        rng = np.random.default_rng(4)
        a = VPolytope(rng.uniform(0, 1, size=(6, 3)))
        b = VPolytope(rng.uniform(0, 2, size=(6, 3)))
        plan = SamplingPlan(n_subspaces=80, seed=3)
        ab = delta_j(a, b, 2, plan)
        ba = delta_j(b, a, 2, plan)
        assert ab.value == ba.value and ab.std_error == ba.std_error

    def test_worker_invariance(self):
        rng = np.random.default_rng(5)
        a = VPolytope(rng.uniform(0, 1, size=(6, 3)))
        plan = SamplingPlan(n_subspaces=120, seed=3)
        serial = delta_j(a, None, 2, plan, workers=1)
        parallel = delta_j(a, None, 2, plan, workers=3)
        assert serial.value == parallel.value
        assert serial.std_error == parallel.std_error

    def test_per_subspace_consistency(self, cube3):
        plan = SamplingPlan(n_subspaces=50, seed=13)
        est = delta_j(cube3, None, 2, plan)
        flag_scaled = 2.0 * float(np.mean([f for _, f in est.per_subspace]))
        assert abs(flag_scaled - est.value) < 1e-12

    def test_range_errors(self, cube3):
        with pytest.raises(ValueError):
            delta_j(cube3, None, 4, SamplingPlan(seed=0))
        with pytest.raises(ValueError):
            delta_j(cube3, None, 0, SamplingPlan(seed=0))


class TestIntrinsicVolume:
    def test_top_volume_cube(self, cube3):
        est = intrinsic_volume(cube3, 3, SamplingPlan(n_points=50_000, seed=0))
        assert est.value == pytest.approx(1.0, abs=1e-6)

    def test_segment_length(self):
        seg = VPolytope([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])
        plan = SamplingPlan(n_subspaces=4000, seed=42)
        est = intrinsic_volume(seg, 1, plan)
        oracle = 2.0 * 5.0 * grassmann_line_average_oracle()
        assert oracle == pytest.approx(5.0, abs=1e-6)
        assert abs(est.value - oracle) <= 3.0 * est.std_error

    def test_embedding_invariance(self):
        plan = SamplingPlan(n_subspaces=2000, seed=8)
        est = intrinsic_volume(unit_cube(3, 2), 2, plan)
        assert abs(est.value - 1.0) <= 3.0 * est.std_error

    def test_shares_bits_with_empty_distance(self, cube3):
        plan = SamplingPlan(n_subspaces=60, seed=21)
        a = intrinsic_volume(cube3, 2, plan)
        b = delta_j(cube3, None, 2, plan)
        assert a.value == b.value and a.std_error == b.std_error
        assert a.per_subspace == b.per_subspace


class TestHausdorff:
    def test_identity(self, square2):
        assert hausdorff(square2, square2) == 0.0

    def test_translation(self, square2):
        t = np.array([0.6, -0.2])
        assert hausdorff(square2, square2.translate(t)) \
            == pytest.approx(float(np.linalg.norm(t)), abs=1e-9)

    def test_nested_squares(self, square2):
        big = VPolytope([[0, 0], [2, 0], [2, 2], [0, 2.0]])
        assert hausdorff(square2, big) == pytest.approx(math.sqrt(2.0), abs=1e-9)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(11)
        a = VPolytope(rng.uniform(-1, 1, size=(7, 3)))
        b = VPolytope(rng.uniform(-1, 1, size=(7, 3)))
        assert hausdorff(a, b) == hausdorff(b, a)

    @pytest.mark.parametrize("seed", range(10))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (VPolytope(rng.uniform(-1, 1, size=(6, 2))) for _ in range(3))
        assert hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 3e-9


class TestFiberProfile:
    def canonical_instance(self, length=8.0, eps=0.01):
        square = VPolytope([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        plane = full_space(2)
        x0 = np.array([0.5, 0.5])
        u = np.array([1.0, 0.0])
        spec = NeedleSpec(x0=x0, u=u, plane=plane, length=length, eps=eps, kind="prism")
        grown = augment(square, prism_needle(spec))
        tube = VPolytope(x0 + cross_section(plane, u, eps).vertices)
        return square, grown, plane, u, tube

    def test_equal_bodies_all_zero(self, square2):
        prof = fiber_profile(square2, square2, full_space(2),
                             np.array([1.0, 0.0]), grid_n=20)
        assert all(r.diff_length == 0.0 for r in prof.rows)
        assert prof.diff_measure == 0.0

    def test_bridging_mass_escapes_tube(self):
        square, grown, plane, u, tube = self.canonical_instance()
        prof = fiber_profile(grown, square, plane, u, grid_n=100, tube=tube)
        near = [r for r in prof.rows if 0.88 < r.y[0] < 0.92]
        assert any(r.diff_length > 0 and not r.in_tube for r in near)
        assert prof.diff_measure_outside_tube > 0.0
        assert prof.tube_measure == pytest.approx(0.02, abs=1e-9)

    def test_fiber_differences_bounded_by_axial_extent(self):
        square, grown, plane, u, tube = self.canonical_instance()
        prof = fiber_profile(grown, square, plane, u, grid_n=100, tube=tube)
        assert max(r.diff_length for r in prof.rows) <= 8.0 + 2e-9

    def test_containment_enforced(self, square2):
        outside = VPolytope([[5.0, 5.0], [6.0, 5.0], [6.0, 6.0]])
        with pytest.raises(ValueError):
            fiber_profile(square2, outside, full_space(2), np.array([1.0, 0.0]), 10)

    def test_three_dim_transverse_grid(self, cube3):
        # 2-D transverse grid: the needle's own fibers extend the cube's
        plane = full_space(3)
        u = np.array([1.0, 0.0, 0.0])
        x0 = np.full(3, 0.5)
        spec = NeedleSpec(x0=x0, u=u, plane=plane, length=5.0, eps=0.05, kind="prism")
        grown = augment(cube3, prism_needle(spec))
        tube = VPolytope(x0 + cross_section(plane, u, 0.05).vertices)
        prof = fiber_profile(grown, cube3, plane, u, grid_n=100, tube=tube)
        assert len(prof.rows[0].y) == 2
        assert prof.diff_measure > 0.0
        assert prof.tube_measure == pytest.approx(2 * 0.05 * 0.05, abs=1e-9)
        assert max(r.diff_length for r in prof.rows) <= 5.0 + 2e-9
