import numpy as np
import pytest

from hopflab.hypersurface import spectrum
from hopflab.polynomial import SingularPointError, fermat_quadric, linear_form, singular_sextic
from hopflab.space_forms import CH, CP, PreconditionError, coords_distance, hermitian_form
from hopflab.tubes import (
    FocalDegeneracyError,
    TubeSpec,
    algebraic_base,
    algebraic_base_curvatures,
    complex_linear_base,
    focal_radii,
    jacobian_rank,
    point_base,
    predicted_spectrum,
    rank_sweep,
    real_form_base,
    singular_blowup_probe,
    sphere_spectrum,
    tube_chart_algebraic,
    tube_curvature,
    tube_point,
)

QUADRIC_CP2_POINT = np.array([1, 1j, 0]) / np.sqrt(2)
QUADRIC_CP3_POINT = np.array([1, 0.4j, 0.3, np.sqrt(1 - 0.16 + 0.09) * 1j]) / np.sqrt(2)


def bases():
    return {
        "point_cp2": point_base(CP(2)),
        "point_ch2": point_base(CH(2)),
        "cp1_cp2": complex_linear_base(CP(2), 1),
        "cp1_cp3": complex_linear_base(CP(3), 1),
        "rp2": real_form_base(CP(2)),
        "quadric_cp2": algebraic_base(fermat_quadric(3), QUADRIC_CP2_POINT),
        "quadric_cp3": algebraic_base(fermat_quadric(4), QUADRIC_CP3_POINT),
    }


@pytest.fixture(params=sorted(bases()))
def base(request):
    return bases()[request.param]


def sample_params(spec, rng, count=5):
    box = spec.domain_box
    lo, hi = box[:, 0] + 0.05, box[:, 1] - 0.05
    return lo + (hi - lo) * rng.random((count, len(box)))


class TestBases:
    def test_quadric_point_on_variety(self):
        assert abs(fermat_quadric(4)(QUADRIC_CP3_POINT)) < 1e-15

    def test_normals_unit_and_orthogonal(self, base, rng):
        space = base.space
        spec = TubeSpec(base, 0.3)
        for params in sample_params(spec, rng):
            s, w = spec.split(params)
            x, v = base.point(s), base.normal(s, w)
            assert hermitian_form(space, v, v).real == pytest.approx(1.0, abs=1e-9)
            assert abs(hermitian_form(space, v, x)) < 1e-9
            h = 1e-6
            for i in range(len(s)):
                ds = np.zeros(len(s))
                ds[i] = h
                t = (base.point(s + ds) - base.point(s - ds)) / (2 * h)
                # real orthogonality to the base tangent (phase-aligned representatives)
                assert abs(hermitian_form(space, v, t).real) < 1e-8

    def test_quadric_base_curvatures(self):
        lam = algebraic_base_curvatures(fermat_quadric(3), QUADRIC_CP2_POINT)
        assert np.allclose(np.abs(lam), lam.max())


class TestTubePoint:
    def test_distance_r(self, base, rng):
        spec = TubeSpec(base, 0.37)
        for params in sample_params(spec, rng):
            s, w = spec.split(params)
            p = tube_point(spec, s, w)
            assert coords_distance(base.space, p.coords, base.point(s) / np.sqrt(abs(hermitian_form(base.space, base.point(s), base.point(s))))) \
                == pytest.approx(0.37, abs=1e-9)

    def test_small_radius_is_base(self, rng):
        base = complex_linear_base(CP(2), 1)
        spec = TubeSpec(base, 1e-12)
        s, w = spec.split(sample_params(spec, rng, 1)[0])
        assert coords_distance(CP(2), tube_point(spec, s, w).coords, base.point(s)) < 1e-10

    def test_sphere_about_point(self, rng):
        P = np.array([0.6, 0.8j, 0])
        spec = TubeSpec(point_base(CP(2), P), 0.4)
        for params in sample_params(spec, rng, 20):
            assert coords_distance(CP(2), spec.coords(params), P) == pytest.approx(0.4, abs=1e-12)

    def test_hyperplane_tube_is_sphere_about_dual_point(self, rng):
        spec = TubeSpec(complex_linear_base(CP(2), 1), np.pi / 2 - 0.4)
        e2 = np.array([0, 0, 1.0])
        tube = np.array([spec.coords(p) for p in sample_params(spec, rng, 400)])
        assert max(abs(coords_distance(CP(2), z, e2) - 0.4) for z in tube) < 1e-12
        # every sphere point is reached: the point of the hyperplane it projects to
        # is the base point, and the phase of its e2 coordinate is the fibre angle
        sph = TubeSpec(point_base(CP(2), e2), 0.4)
        for q in [sph.coords(p) for p in sample_params(sph, rng, 20)]:
            x = q[:2] / np.linalg.norm(q[:2])
            s = np.r_[(x[1] / x[0]).real, (x[1] / x[0]).imag]
            w = np.array([np.angle(q[2] / x[0] * abs(x[0]))])
            assert coords_distance(CP(2), spec.coords(np.r_[s, w]), q) < 1e-7

    def test_radius_range(self):
        with pytest.raises(ValueError):
            TubeSpec(point_base(CP(2)), np.pi / 2)


class TestAlgebraicChart:
    def test_formula(self):
        p = tube_chart_algebraic(linear_form(3, 2), np.array([1, 0, 0]), 0.0, 0.3)
        assert np.allclose(p.coords, [np.cos(0.3), 0, np.sin(0.3)])

    def test_zero_radius(self):
        x = QUADRIC_CP2_POINT
        for t in (0.0, 1.0, 2.5):
            assert coords_distance(CP(2), tube_chart_algebraic(fermat_quadric(3), x, t, 0.0).coords, x) < 1e-7

    def test_quadric_distance(self, rng):
        from hopflab.duality import sample_smooth_points

        f = fermat_quadric(3)
        xs = sample_smooth_points(f, 20, rng)
        for x in xs:
            t, r = rng.uniform(0, 2 * np.pi), rng.uniform(0.01, 1.5)
            assert coords_distance(CP(2), tube_chart_algebraic(f, x, t, r).coords, x) == pytest.approx(r, abs=1e-9)

    def test_singular(self):
        with pytest.raises(SingularPointError):
            tube_chart_algebraic(singular_sextic(), np.array([1, 0, 0, 0]), 0.0, 0.3)


class TestPredictedSpectrum:
    def test_sphere_quarter(self):
        pairs = predicted_spectrum([], np.pi / 2, 3, np.pi / 4)
        assert [(round(v, 12), m) for v, m in pairs] == [(-1.0, 2), (0.0, 1)]

    @pytest.mark.parametrize("r", [0.2, 0.7, 1.3])
    def test_sphere_outward(self, r):
        pairs = predicted_spectrum([], np.pi / 2, 3, r)
        vals = np.sort(np.repeat([v for v, _ in pairs], [m for _, m in pairs]))
        assert np.allclose(vals, -sphere_spectrum(2, r)[::-1], atol=1e-12)

    def test_focal(self):
        with pytest.raises(FocalDegeneracyError):
            predicted_spectrum([(0.5, 1)], np.pi / 2, 1, 0.5)
        with pytest.raises(FocalDegeneracyError):
            predicted_spectrum([], np.pi / 4, 1, np.pi / 4)

    def test_tangency_form(self):
        # tube at rho - pi/2 over principal angle theta has curvature tan(rho - theta)
        for theta in (0.3, 1.1, 2.0):
            for rho in (1.7, 2.2, 2.9):
                assert tube_curvature(theta, rho - np.pi / 2) == pytest.approx(np.tan(rho - theta), abs=1e-12)


class TestAgainstFiniteDifferences:
    @pytest.mark.parametrize("key,r", [
        ("point_cp2", np.pi / 3), ("point_ch2", 0.7), ("cp1_cp2", np.pi / 6), ("cp1_cp3", np.pi / 6),
        ("rp2", np.pi / 6), ("quadric_cp2", np.pi / 8), ("quadric_cp3", np.pi / 8),
    ])
    def test_outward_spectrum(self, key, r, rng):
        spec = TubeSpec(bases()[key], r)
        patch = spec.patch("outward")
        for params in sample_params(spec, rng, 3):
            sp = spectrum(patch, params)
            assert sp.hopf_defect <= 1e-6
            assert np.allclose(sp.eigenvalues, spec.predicted(params), atol=1e-5)

    def test_codimension_multiplicity(self, rng):
        # CP^1 in CP^3: -cot r appears 2(n-m)-2 = 2 times
        spec = TubeSpec(bases()["cp1_cp3"], 0.5)
        sp = spectrum(spec.patch("outward"), sample_params(spec, rng, 1)[0])
        assert np.sum(np.abs(sp.eigenvalues + 1 / np.tan(0.5)) < 1e-5) == 2


class TestFocal:
    def test_sphere_centre(self):
        spec = TubeSpec(point_base(CP(2)), np.pi / 4)
        rep = focal_radii(spectrum(spec.patch(), spec.domain_box.mean(axis=1)))
        assert np.allclose(rep.values(), np.pi / 4, atol=1e-6)
        assert sorted(m for _, m, _ in rep.radii) == [1, 2]

    def test_hopf_inversion(self):
        spec = TubeSpec(point_base(CP(2)), 0.5)
        rep = focal_radii(spectrum(spec.patch(), spec.domain_box.mean(axis=1)))
        hopf = [r for r, _, s in rep.radii if s == "hopf"]
        assert hopf[0] == pytest.approx(0.5, abs=1e-6)

    def test_tube_returns_to_base(self):
        spec = TubeSpec(complex_linear_base(CP(2), 1), np.pi / 6)
        rep = focal_radii(spectrum(spec.patch(), spec.domain_box.mean(axis=1)))
        assert np.min(np.abs(rep.values() - np.pi / 6)) < 1e-6

    def test_non_hopf_rejected(self):
        from hopflab.hypersurface import HypersurfacePatch

        spec = TubeSpec(point_base(CP(2)), 0.5)
        warped = HypersurfacePatch(CP(2), lambda u: spec.coords(u) + 1e-2 * np.array([0, np.sin(u[0]) ** 2, 0]),
                                   spec.domain_box, normal_hint=spec.patch().normal_hint)
        with pytest.raises(PreconditionError):
            focal_radii(spectrum(warped, spec.domain_box.mean(axis=1)))


class TestRank:
    def test_full_rank_off_focal(self):
        spec = TubeSpec(complex_linear_base(CP(2), 1), np.pi / 6)
        u = spec.domain_box.mean(axis=1) + 0.1
        assert jacobian_rank(spec, u) == 3
        assert jacobian_rank(spec.patch(), u, 0.3) == 3

    def test_hopf_focal_rank_even(self):
        spec = TubeSpec(complex_linear_base(CP(2), 1), np.pi / 6)
        u = spec.domain_box.mean(axis=1) + 0.1
        # inward: distance pi/6 lands on the complex line, a 2-dimensional image
        assert jacobian_rank(spec.patch(), u, np.pi / 6) == 2
        # pi/6 + pi/2 lands on the dual point
        assert jacobian_rank(spec.patch(), u, 2 * np.pi / 3) == 0
        # the tube map itself collapses onto the dual point at r = pi/2
        assert jacobian_rank(spec, u, np.pi / 2 - 1e-9, tol_ratio=1e-6) == 0

    def test_sphere_sweep(self):
        spec = TubeSpec(point_base(CP(2)), 0.5)
        patch = spec.patch()
        edges = np.linspace(0.25, 1.45, 13)
        rows = rank_sweep(patch, edges, patch.sample_grid([2, 1, 1]))
        dips = [i for i, row in enumerate(rows) if row.min_rank < 3]
        # inward sphere normals focus at the centre, distance 0.5
        assert dips == [2]
        assert rows[2].min_rank == 0

    def test_quadric_sweep_populated(self):
        spec = TubeSpec(bases()["quadric_cp2"], np.pi / 8)
        patch = spec.patch()
        rows = rank_sweep(patch, np.linspace(0.1, 3.0, 9), patch.sample_grid([1, 1, 2]))
        assert len(rows) == 8 and all(row.min_rank >= 0 for row in rows)

    def test_empty_sweep(self):
        spec = TubeSpec(point_base(CP(2)), 0.5)
        assert rank_sweep(spec.patch(), [], [spec.domain_box.mean(axis=1)]) == []


class TestBlowup:
    def test_empty(self):
        assert singular_blowup_probe(singular_sextic(), [1, 0, 0, 0], 0.5, []) == []

    def test_requires_singular_point(self):
        with pytest.raises(PreconditionError):
            singular_blowup_probe(fermat_quadric(4), QUADRIC_CP3_POINT, 0.5, [1e-1])

    @pytest.mark.slow
    def test_sextic_diverges(self):
        from hopflab.tubes import sextic_focal_curve

        vals = singular_blowup_probe(singular_sextic(), [1, 0, 0, 0], 0.5, [1e-1, 1e-2, 1e-3],
                                     curve=sextic_focal_curve(0.5))
        assert vals[0] < vals[1] < vals[2] and vals[2] > 1e3

    def test_line_approach_stays_bounded(self):
        # along a straight line the base curvature tends to 0, not to the focal value
        vals = singular_blowup_probe(singular_sextic(), [1, 0, 0, 0], 0.5, [1e-1, 1e-2])
        assert vals[1] < 10 * vals[0]
