import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ks_2samp

from projmetrics.bodies import VPolytope
from projmetrics.grassmann import (
    DegenerateDirectionError,
    Subspace,
    axis_split,
    axis_subspace,
    complete_to_basis,
    full_space,
    goodness,
    haar_sample,
    project_body,
    project_point,
)
from projmetrics.numerics import RngStream, ball_volume, gaussian_block


class TestSubspace:
    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            Subspace(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))

    def test_basis_is_orthonormal(self):
        for i in range(50):
            h = haar_sample(5, 3, RngStream(2, i))
            assert np.max(np.abs(h.basis.T @ h.basis - np.eye(3))) < 1e-10


class TestHaarSample:
    def test_full_space(self):
        h = haar_sample(3, 3, RngStream(0, 0))
        x = np.array([0.3, -1.2, 2.0])
        assert np.linalg.norm(h.basis @ project_point(h, x) - x) < 1e-10

    def test_deterministic(self):
        a = haar_sample(4, 2, RngStream(5, 7))
        b = haar_sample(4, 2, RngStream(5, 7))
        assert np.array_equal(a.basis, b.basis)

    def test_trace_identity(self):
        # E ||P_H v||^2 = j/d for unit v, by rotation invariance
        e1 = np.array([1.0, 0.0, 0.0])
        vals = [float(np.sum(project_point(haar_sample(3, 2, RngStream(1, i)), e1) ** 2))
                for i in range(10_000)]
        assert abs(np.mean(vals) - 2.0 / 3.0) < 0.02

    def test_rotation_invariance(self):
        # empirical distributions of ||P_H v||^2 and ||P_H Rv||^2 agree,
        # with R the rotation taking e1 to the unit diagonal direction
        v = np.array([1.0, 0.0, 0.0, 0.0])
        rv = np.full(4, 0.5)
        s1 = [float(np.sum(project_point(haar_sample(4, 2, RngStream(3, i)), v) ** 2))
              for i in range(10_000)]
        s2 = [float(np.sum(project_point(haar_sample(4, 2, RngStream(4, i)), rv) ** 2))
              for i in range(10_000)]
        assert ks_2samp(s1, s2).statistic < 0.03


class TestProjection:
    def test_axis_plane(self):
        h = axis_subspace(3, [0, 1])
        assert np.allclose(project_point(h, np.array([3.0, 4.0, 5.0])), [3.0, 4.0])

    def test_in_plane_isometry(self, plane_e12):
        x = np.array([0.3, -0.7, 0.0])
        assert abs(np.linalg.norm(project_point(plane_e12, x)) - np.linalg.norm(x)) < 1e-12

    def test_orthogonal_point(self, plane_e12):
        assert np.allclose(project_point(plane_e12, np.array([0.0, 0.0, 2.0])), [0.0, 0.0])

    @given(st.integers(0, 1000))
    @settings(max_examples=40, deadline=None)
    def test_contraction(self, seed):
        s = RngStream(seed, 0)
        h = haar_sample(5, 2, s)
        x = gaussian_block(s, 5)
        assert np.linalg.norm(project_point(h, x)) <= np.linalg.norm(x) + 1e-12

    def test_project_body_cube(self, cube3, plane_e12):
        shadow = project_body(plane_e12, cube3)
        assert shadow.ambient_dim == 2
        corners = {tuple(v) for v in shadow.vertices}
        assert corners == {(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)}

    def test_project_body_identity(self, cube3):
        assert np.array_equal(project_body(full_space(3), cube3).vertices, cube3.vertices)

    def test_segment_collapses(self):
        seg = VPolytope([[0.0, 0.0, 0.0], [0.0, 0.0, 5.0]])
        shadow = project_body(axis_subspace(3, [0, 1]), seg)
        assert np.array_equal(shadow.vertices, np.zeros((2, 2)))


class TestAxisSplit:
    def test_axis_in_plane(self, plane_e12):
        u_h, e_basis = axis_split(plane_e12, np.array([1.0, 0.0, 0.0]))
        assert np.allclose(u_h, [1.0, 0.0])
        assert e_basis.shape == (2, 1)
        assert np.allclose(e_basis[:, 0], [0.0, 1.0])

    def test_perpendicular_axis_errors(self):
        h = axis_subspace(3, [1, 2])
        with pytest.raises(DegenerateDirectionError):
            axis_split(h, np.array([1.0, 0.0, 0.0]))

    def test_sign_convention(self):
        # the completion's first nonzero coordinate is positive
        for i in range(30):
            s = RngStream(17, i)
            h = haar_sample(3, 2, s)
            try:
                _, e_basis = axis_split(h, np.array([1.0, 0.0, 0.0]))
            except DegenerateDirectionError:
                continue
            lead = e_basis[:, 0][np.abs(e_basis[:, 0]) > 1e-14]
            assert lead[0] > 0

    def test_completion_orthonormal(self):
        for i in range(30):
            v = gaussian_block(RngStream(23, i), 4)
            v /= np.linalg.norm(v)
            comp = complete_to_basis(v)
            frame = np.column_stack([v, comp])
            assert np.max(np.abs(frame.T @ frame - np.eye(4))) < 1e-12


class TestGoodness:
    def test_identity_certificate(self):
        for j in (2, 3):
            plane = axis_subspace(j + 1, list(range(j)))
            u = np.zeros(j + 1)
            u[0] = 1.0
            cert = goodness(plane, plane, u)
            assert cert.sigma_min == pytest.approx(1.0, abs=1e-12)
            assert cert.ell == pytest.approx(1.0, abs=1e-12)
            assert cert.jacobian == pytest.approx(1.0, abs=1e-12)
            assert cert.b == pytest.approx(ball_volume(j - 1), abs=1e-12)
            assert cert.c == pytest.approx(2.0 * ball_volume(j - 1), abs=1e-12)

    def test_rank_drop_certificate(self):
        plane = axis_subspace(3, [0, 1])
        h = axis_subspace(3, [0, 2])
        cert = goodness(h, plane, np.array([1.0, 0.0, 0.0]))
        assert cert.sigma_min == pytest.approx(0.0, abs=1e-14)

    def test_degenerate_axis_zeroes_certificate(self):
        plane = axis_subspace(3, [0, 1])
        h = axis_subspace(3, [1, 2])
        cert = goodness(h, plane, np.array([1.0, 0.0, 0.0]))
        assert cert.ell == 0.0
        assert cert.jacobian == cert.b == cert.c == 0.0

    def test_random_certificates(self):
        plane = axis_subspace(4, [0, 1])
        u = np.array([1.0, 0.0, 0.0, 0.0])
        near_singular = 0
        for i in range(2000):
            h = haar_sample(4, 2, RngStream(6, i))
            cert = goodness(h, plane, u)
            if cert.sigma_min < 1e-8:
                near_singular += 1
                continue
            assert cert.jacobian > 0.0
            assert cert.jacobian <= 1.0 + 1e-12  # composition of contractions
            assert cert.c == 2.0 * cert.ell * cert.b
        assert near_singular == 0

    def test_axis_must_be_in_plane(self):
        plane = axis_subspace(3, [0, 1])
        with pytest.raises(ValueError):
            goodness(plane, plane, np.array([0.0, 0.0, 1.0]))
