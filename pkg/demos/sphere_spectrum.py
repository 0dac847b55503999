"""Geodesic spheres in CP^2 and CH^2: finite-difference spectra against closed forms."""

import numpy as np

from hopflab.hypersurface import hopf_report, spectrum
from hopflab.space_forms import CH, CP
from hopflab.tubes import TubeSpec, ch_sphere_spectrum, point_base


def main():
    for r in (np.pi / 6, np.pi / 4, np.pi / 3):
        patch = TubeSpec(point_base(CP(2)), r).patch("inward")
        sp = spectrum(patch, patch.domain_box.mean(axis=1))
        expected = np.sort([2 / np.tan(2 * r), 1 / np.tan(r), 1 / np.tan(r)])
        print(f"CP^2 sphere r={r:.4f}: fd {np.round(sp.eigenvalues, 8) + 0.0} closed form {np.round(expected, 8)}")

    r = 0.7
    patch = TubeSpec(point_base(CH(2)), r).patch("outward")
    rep = hopf_report(patch, patch.sample_grid([3, 3, 3]))
    print(f"CH^2 sphere r={r}: mu mean {rep.mu_mean:.8f} (2 coth 2r = {2 / np.tanh(2 * r):.8f}), std {rep.mu_std:.1e}")
    print("closed-form outward spectrum:", np.round(ch_sphere_spectrum(2, r, outward=True), 8))


if __name__ == "__main__":
    main()
