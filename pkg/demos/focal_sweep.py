"""Tube over CP^1 in CP^2: focal radii from the spectrum, then a Jacobian rank sweep."""

import numpy as np

from hopflab.hypersurface import spectrum
from hopflab.space_forms import CP
from hopflab.tubes import TubeSpec, complex_linear_base, focal_radii, rank_sweep


def main():
    spec = TubeSpec(complex_linear_base(CP(2), 1), np.pi / 6)
    patch = spec.patch("inward")
    pts = patch.sample_grid([3, 1, 1])
    rep = focal_radii(spectrum(patch, pts[0]))
    for r, mult, source in rep.radii:
        print(f"focal radius {r:.6f}  multiplicity {mult}  from {source}")
    rows = rank_sweep(patch, np.linspace(1e-9, np.pi - 1e-9, 51), pts)
    for i, row in enumerate(rows):
        if row.min_rank < patch.dim:
            print(f"cell {i:2d} [{row.r_lo:.4f}, {row.r_hi:.4f}): rank {row.min_rank} at r={row.r_star:.6f}")


if __name__ == "__main__":
    main()
