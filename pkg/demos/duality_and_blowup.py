"""Gauss points, tubes over a quadric, and curvature blow-up near a singular point."""

import numpy as np

from hopflab.duality import biduality_spot_check, gauss_point, sample_smooth_points, tube_duality_check
from hopflab.polynomial import fermat_quadric, singular_sextic
from hopflab.space_forms import CP, coords_distance
from hopflab.tubes import sextic_focal_curve, singular_blowup_probe


def main():
    rng = np.random.default_rng(0)
    q = fermat_quadric(3)
    x = sample_smooth_points(q, 1, rng)[0]
    y = gauss_point(q, x)
    print(f"distance from x to its Gauss point: {coords_distance(CP(2), x, y.coords):.15f} (pi/2 = {np.pi / 2:.15f})")
    res = tube_duality_check(q, 0.4, 10, rng=1)
    print(f"tube radius 0.4 vs distance pi/2 - 0.4 to the Gauss point: residual {res.max_direct_residual:.1e}")
    print("biduality error:", biduality_spot_check(fermat_quadric(4), sample_smooth_points(fermat_quadric(4), 1, rng)[0]).error)

    scales = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
    vals = singular_blowup_probe(singular_sextic(), [1, 0, 0, 0], 0.5, scales, curve=sextic_focal_curve(0.5))
    for s, v in zip(scales, vals):
        print(f"scale {s:.0e}: max |principal curvature| {v:.4e}")


if __name__ == "__main__":
    main()
