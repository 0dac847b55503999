import numpy as np
import pytest

from hopflab.duality import (
    Inapplicable,
    biduality_spot_check,
    dual_quadric,
    gauss_point,
    incidence_pair,
    quadric_matrix,
    sample_smooth_points,
    singular_locus_probe,
    tube_duality_check,
)
from hopflab.polynomial import (
    OffVarietyError,
    SingularPointError,
    fermat_quadric,
    linear_form,
    singular_sextic,
)
from hopflab.space_forms import CP, coords_distance


def proj_equal(a, b, tol=1e-12):
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    return abs(abs(np.vdot(a, b)) - 1) < tol


class TestGaussPoint:
    def test_hyperplane(self):
        y = gauss_point(linear_form(3, 2), np.array([1, 0, 0]))
        assert proj_equal(y.coords, np.array([0, 0, 1]))

    def test_quadric(self):
        x = np.array([1, 1j, 0]) / np.sqrt(2)
        y = gauss_point(fermat_quadric(3), x)
        assert proj_equal(y.coords, np.conj(x))

    def test_distance_quarter_turn(self, rng):
        f = fermat_quadric(4)
        for x in sample_smooth_points(f, 10, rng):
            assert incidence_pair(f, x).distance == pytest.approx(np.pi / 2, abs=1e-12)

    def test_euler_orthogonality(self, rng):
        f = singular_sextic()
        for x in sample_smooth_points(f, 10, rng):
            y = gauss_point(f, x).coords
            assert abs(np.vdot(y, x)) < 1e-10

    def test_phase_invariance(self, rng):
        f = fermat_quadric(3)
        x = sample_smooth_points(f, 1, rng)[0]
        a, b = gauss_point(f, x), gauss_point(f, np.exp(0.7j) * 2.0 * x)
        assert coords_distance(CP(2), a.coords, b.coords) < 1e-7

    def test_off_variety(self):
        with pytest.raises(OffVarietyError):
            gauss_point(fermat_quadric(3), np.array([1, 0, 0]))

    def test_singular(self):
        with pytest.raises(SingularPointError):
            gauss_point(singular_sextic(), np.array([1, 0, 0, 0]))


class TestTubeDuality:
    def test_hyperplane(self):
        res = tube_duality_check(linear_form(3, 2), 0.4, 20, rng=1, dense_count=20)
        assert res.max_direct_residual < 1e-12
        # the dual is a single point, so membership is the same as the direct test
        assert res.max_membership_residual < 1e-12

    @pytest.mark.parametrize("r", [0.1, np.pi / 4, np.pi / 2 - 1e-6])
    def test_quadric(self, r):
        res = tube_duality_check(fermat_quadric(3), r, 20, rng=2, dense_count=20)
        assert res.max_direct_residual < 1e-8
        assert res.samples == 20

    def test_radius_range(self):
        with pytest.raises(ValueError):
            tube_duality_check(fermat_quadric(3), np.pi / 2)


class TestBiduality:
    def test_quadric(self, rng):
        f = fermat_quadric(4)
        for x in sample_smooth_points(f, 20, rng):
            res = biduality_spot_check(f, x)
            assert res.applicable and res.passed and res.error < 1e-12

    def test_dual_quadric_matrix(self):
        f = fermat_quadric(3)
        g = dual_quadric(f)
        assert np.allclose(quadric_matrix(g) / quadric_matrix(g)[0, 0], np.eye(3))

    def test_sextic(self, rng):
        f = singular_sextic()
        for x in sample_smooth_points(f, 3, rng):
            res = biduality_spot_check(f, x)
            assert res.applicable and res.passed

    def test_hyperplane_inapplicable(self):
        res = biduality_spot_check(linear_form(3, 2), np.array([1, 0, 0]))
        assert not res.applicable and res.passed is None

    def test_off_variety(self, rng):
        f = fermat_quadric(3)
        x = sample_smooth_points(f, 1, rng)[0] + 1e-3
        with pytest.raises(OffVarietyError):
            biduality_spot_check(f, x)

    def test_degenerate_quadric(self):
        from hopflab.duality import quadric_from_matrix

        with pytest.raises(Inapplicable):
            dual_quadric(quadric_from_matrix(np.diag([1.0, 1.0, 0.0])))


class TestSingularLocus:
    def test_sextic_contains_vertex(self):
        cands = singular_locus_probe(singular_sextic())
        hits = [c for c in cands if proj_equal(c.point, np.array([1, 0, 0, 0]))]
        assert hits and hits[0].f_residual < 1e-12 and hits[0].grad_residual < 1e-12

    @pytest.mark.parametrize("f", [fermat_quadric(4), linear_form(3, 0)], ids=["quadric", "hyperplane"])
    def test_smooth_empty(self, f):
        assert singular_locus_probe(f) == []

    def test_explicit_grid(self):
        cands = singular_locus_probe(singular_sextic(), grid=[[1, 0, 0, 0], [0, 1, 0, 0]])
        assert len(cands) >= 1
