import numpy as np
import pytest

from hopflab.hypersurface import (
    DegenerateChartError,
    HypersurfacePatch,
    asymmetry,
    frame_at,
    hopf_report,
    lemma4_residuals,
    miquel_bound,
    miquel_check,
    shape_operator,
    spectrum,
    spectrum_from_matrix,
    structure_tensors,
)
from hopflab.space_forms import CH, CP, PreconditionError, coords_distance
from hopflab.tubes import TubeSpec, complex_linear_base, point_base, sphere_spectrum


def sphere(r, n=2, c=1, orientation="inward"):
    space = CP(n) if c > 0 else CH(n)
    return TubeSpec(point_base(space), r).patch(orientation)


@pytest.fixture
def sphere_cp2():
    return sphere(np.pi / 3)


@pytest.fixture
def u0():
    return np.array([0.7, 0.3, -1.1])


class TestFrame:
    def test_orthonormal(self, sphere_cp2, u0):
        fr = frame_at(sphere_cp2, u0)
        G = np.array([[fr.g(a, b) for b in fr.tangents] for a in fr.tangents])
        assert np.allclose(G, np.eye(3), atol=1e-9)
        assert fr.g(fr.normal, fr.normal) == pytest.approx(1.0, abs=1e-9)
        assert max(abs(fr.g(fr.normal, t)) for t in fr.tangents) < 1e-9

    def test_inward_normal_points_at_centre(self, sphere_cp2, u0):
        # stepping along xi for the radius reaches the centre e0
        fr = frame_at(sphere_cp2, u0)
        r = np.pi / 3
        p = np.cos(r) * fr.coords + np.sin(r) * fr.normal
        assert coords_distance(CP(2), p, np.array([1, 0, 0])) < 1e-8

    def test_deterministic(self, sphere_cp2, u0):
        a, b = frame_at(sphere_cp2, u0), frame_at(sphere_cp2, u0)
        assert np.array_equal(a.normal, b.normal) and np.array_equal(a.tangents, b.tangents)

    def test_degenerate_chart(self, sphere_cp2):
        flat = HypersurfacePatch(CP(2), lambda u: sphere_cp2.chart(np.array([u[0], u[1], 0.0])),
                                 sphere_cp2.domain_box)
        with pytest.raises(DegenerateChartError) as exc:
            frame_at(flat, np.array([0.7, 0.3, 0.2]))
        assert exc.value.sigma_min < 1e-6


class TestShapeOperator:
    def test_sphere_quarter(self, u0):
        ev = spectrum(sphere(np.pi / 4), u0).eigenvalues
        assert np.allclose(ev, [0, 1, 1], atol=1e-5)

    @pytest.mark.parametrize("r", [0.3, np.pi / 4, np.pi / 3, 1.2])
    def test_sphere_closed_form(self, r, u0):
        assert np.allclose(spectrum(sphere(r), u0).eigenvalues, sphere_spectrum(2, r), atol=1e-5)

    def test_cp3_sphere(self):
        p = sphere(0.5, n=3)
        u = p.domain_box.mean(axis=1) + 0.05
        assert np.allclose(spectrum(p, u).eigenvalues, sphere_spectrum(3, 0.5), atol=1e-5)

    def test_outward_flips_exactly(self, sphere_cp2, u0):
        a = spectrum(sphere_cp2, u0)
        b = spectrum(sphere_cp2.flipped(), u0)
        assert np.array_equal(b.eigenvalues, -a.eigenvalues[::-1])
        assert b.mu == -a.mu
        assert b.hopf_defect == pytest.approx(a.hopf_defect, abs=1e-12)

    def test_asymmetry_small(self, sphere_cp2, u0):
        assert asymmetry(sphere_cp2, u0) <= 1e-5

    def test_reconstruction(self, sphere_cp2, u0):
        sp = spectrum(sphere_cp2, u0)
        A = sp.eigenvectors @ np.diag(sp.eigenvalues) @ sp.eigenvectors.T
        assert np.linalg.norm(A - sp.matrix, 2) < 1e-8

    def test_richardson_is_closer(self):
        spec = TubeSpec(complex_linear_base(CP(2), 1), np.pi / 6)
        p = spec.patch("outward", fd_step=1e-2)
        u = p.domain_box.mean(axis=1) + 0.1
        plain = np.abs(spectrum(p, u).eigenvalues - spec.predicted(u)).max()
        rich = np.abs(spectrum(p.with_step(1e-2, True), u).eigenvalues - spec.predicted(u)).max()
        assert rich < plain / 100


class TestSpectrum:
    def test_mu_sphere(self, sphere_cp2, u0):
        sp = spectrum(sphere_cp2, u0)
        assert sp.mu == pytest.approx(-2 / np.sqrt(3), abs=1e-5)
        assert sp.hopf_defect <= 1e-6
        assert sp.mean_curvature == pytest.approx(np.trace(sp.matrix) / 3)

    def test_mu_ch_sphere(self, u0):
        sp = spectrum(sphere(0.7, c=-1), u0)
        assert sp.mu == pytest.approx(2 / np.tanh(1.4), abs=1e-5)
        assert np.allclose(sp.eigenvalues, np.sort([2 / np.tanh(1.4), 1 / np.tanh(0.7), 1 / np.tanh(0.7)]), atol=1e-5)

    def test_non_hopf_warp(self, sphere_cp2, u0):
        base = sphere_cp2.chart

        def warped(u):
            z = base(u)
            return z + 1e-2 * np.array([0, np.sin(u[0]) ** 2, 0.5 * np.cos(u[1])])

        p = HypersurfacePatch(CP(2), warped, sphere_cp2.domain_box, normal_hint=sphere_cp2.normal_hint)
        assert spectrum(p, u0).hopf_defect > 1e-4


class TestStructure:
    def test_identities(self, sphere_cp2, u0):
        fr = frame_at(sphere_cp2, u0)
        st = structure_tensors(fr)
        assert max(st.residuals().values()) < 1e-9
        assert st.f_form @ st.U == pytest.approx(1.0, abs=1e-9)
        assert np.abs(st.phi @ st.U).max() < 1e-9

    def test_phi_isometric_on_u_perp(self, sphere_cp2, u0):
        st = structure_tensors(frame_at(sphere_cp2, u0))
        x = np.array([1.0, -2.0, 0.5])
        x = x - (x @ st.U) * st.U
        x /= np.linalg.norm(x)
        assert np.linalg.norm(st.phi @ x) == pytest.approx(1.0, abs=1e-9)


class TestHopfReport:
    def test_sphere_grid(self, sphere_cp2):
        rep = hopf_report(sphere_cp2, sphere_cp2.sample_grid([5, 5, 4]))
        assert rep.is_hopf and len(rep.mus) == 100
        assert rep.mu_max_deviation <= 1e-6

    def test_failures_recorded(self, sphere_cp2):
        bad = HypersurfacePatch(CP(2), lambda u: sphere_cp2.chart(np.array([u[0], u[1], 0.0])),
                                sphere_cp2.domain_box)
        rep = hopf_report(bad, bad.sample_grid([2, 1, 1]))
        assert not rep.is_hopf and len(rep.failures) == 2

    def test_non_hopf(self, sphere_cp2):
        base = sphere_cp2.chart
        warped = HypersurfacePatch(
            CP(2), lambda u: base(u) + 1e-2 * np.array([0, np.sin(u[0]) ** 2, 0.5 * np.cos(u[1])]),
            sphere_cp2.domain_box, normal_hint=sphere_cp2.normal_hint)
        assert not hopf_report(warped, warped.sample_grid([2, 2, 2])).is_hopf


class TestHopfIdentities:
    @pytest.mark.parametrize("c", [1, -1])
    def test_identity(self, c, u0):
        res = lemma4_residuals(sphere(np.pi / 3 if c > 0 else 0.7, c=c), u0)
        assert res.identity_a_residual <= 1e-5

    def test_self_paired_quarter_sphere(self, u0):
        res = lemma4_residuals(sphere(np.pi / 4), u0)
        assert res.pairing_residual <= 1e-6

    def test_rejects_non_hopf(self, sphere_cp2, u0):
        base = sphere_cp2.chart
        warped = HypersurfacePatch(
            CP(2), lambda u: base(u) + 1e-2 * np.array([0, np.sin(u[0]) ** 2, 0.5 * np.cos(u[1])]),
            sphere_cp2.domain_box, normal_hint=sphere_cp2.normal_hint)
        with pytest.raises(PreconditionError):
            lemma4_residuals(warped, u0)


class TestMiquel:
    def test_quarter_sphere_equality(self):
        res = miquel_bound(0.0, 2 / 3, 2)
        assert res.rhs == pytest.approx(0.0, abs=1e-12) and res.satisfied

    def test_closed_form_spheres(self):
        for r in (np.pi / 6, np.pi / 4, np.pi / 3):
            ev = sphere_spectrum(2, r)
            res = miquel_bound(2 / np.tan(2 * r), ev.mean(), 2)
            assert abs(res.lhs - res.rhs) < 1e-12

    def test_lowered_mu_fails(self, sphere_cp2, u0):
        sp = spectrum(sphere_cp2, u0)
        u = sp.u_components
        low = spectrum_from_matrix(sp.matrix - 0.5 * np.outer(u, u), sp.frame)
        assert miquel_check(sp, tol=1e-5).satisfied
        assert not miquel_check(low).satisfied

    def test_ch_rejected(self, u0):
        with pytest.raises(PreconditionError):
            miquel_check(spectrum(sphere(0.7, c=-1), u0))
