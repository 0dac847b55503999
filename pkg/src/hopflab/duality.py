"""Gauss map and dual varieties of algebraic hypersurfaces in CP^n.

The dual projective space is identified with CP^n by sending a hyperplane
to the point Hermitian-orthogonal to it, so the Gauss point of a smooth
point x is ``conj(grad f(x))`` and lies at distance pi/2 from x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import null_space

from .polynomial import AlgebraicHypersurface, OffVarietyError, SingularPointError
from .space_forms import CP, ModelPoint, coords_distance, gauge
from .tubes import SMOOTH_THRESHOLD, AlgebraicChart, tube_chart_algebraic

ON_VARIETY_TOL = 1e-9


class Inapplicable(Exception):
    """The requested check has no meaning for this input."""


@dataclass(frozen=True)
class IncidencePair:
    x: ModelPoint
    y: ModelPoint

    @property
    def distance(self) -> float:
        return coords_distance(self.x.space, self.x.coords, self.y.coords)


def _check_on(f: AlgebraicHypersurface, x: np.ndarray, tol: float = ON_VARIETY_TOL) -> None:
    res = abs(f(x)) / max(f.scale(x), 1e-300)
    if res > tol:
        raise OffVarietyError(res)


def gauss_point(f: AlgebraicHypersurface, x) -> ModelPoint:
    """Point of CP^n dual to the tangent hyperplane of ``f = 0`` at ``x``."""
    x = np.asarray(getattr(x, "coords", x), dtype=complex)
    x = x / np.linalg.norm(x)
    _check_on(f, x)
    g = f.gradient(x)
    if np.linalg.norm(g) <= SMOOTH_THRESHOLD:
        raise SingularPointError(f"|grad f| = {np.linalg.norm(g):.3e} at x")
    return ModelPoint.from_coords(CP(f.nvars - 1), np.conj(g))


def incidence_pair(f: AlgebraicHypersurface, x) -> IncidencePair:
    x = np.asarray(getattr(x, "coords", x), dtype=complex)
    return IncidencePair(ModelPoint.from_coords(CP(f.nvars - 1), x), gauss_point(f, x))


def sample_smooth_points(f: AlgebraicHypersurface, count: int, rng=None, solve_index: Optional[int] = None) -> np.ndarray:
    """Random smooth points of ``f = 0`` (rows, unit norm).

    Random Gaussian coordinates, then one coordinate is replaced by a root
    of the resulting univariate polynomial.
    """
    rng = np.random.default_rng(rng)
    k = int(np.argmax(f.exponents.max(axis=0))) if solve_index is None else solve_index
    deg = int(f.exponents[:, k].max())
    if deg == 0:
        raise ValueError("f does not involve the solve coordinate")
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 100:
            raise RuntimeError("could not sample enough smooth points")
        z = rng.normal(size=f.nvars) + 1j * rng.normal(size=f.nvars)
        coeffs = np.zeros(deg + 1, dtype=complex)
        for e, c in zip(f.exponents, f.coefficients):
            rest = np.prod([z[j] ** e[j] for j in range(f.nvars) if j != k])
            coeffs[deg - e[k]] += c * rest
        if abs(coeffs[0]) < 1e-12:
            continue
        roots = np.roots(coeffs)
        z[k] = roots[rng.integers(len(roots))]
        z = z / np.linalg.norm(z)
        if abs(f(z)) > 1e-11 * f.scale(z) or not f.is_smooth_at(z, 1e-6):
            continue
        out.append(z)
    return np.array(out)


def quadric_matrix(f: AlgebraicHypersurface) -> np.ndarray:
    if f.degree != 2:
        raise ValueError("not a quadric")
    m = f.nvars
    Q = np.zeros((m, m), dtype=complex)
    for e, c in zip(f.exponents, f.coefficients):
        idx = np.flatnonzero(e)
        if len(idx) == 1:
            Q[idx[0], idx[0]] += c
        else:
            Q[idx[0], idx[1]] += c / 2
            Q[idx[1], idx[0]] += c / 2
    return Q


def quadric_from_matrix(Q: np.ndarray, name: str = "") -> AlgebraicHypersurface:
    m = Q.shape[0]
    exps, coefs = [], []
    for i in range(m):
        for j in range(i, m):
            c = Q[i, j] if i == j else 2 * Q[i, j]
            if abs(c) > 1e-15:
                e = np.zeros(m, dtype=int)
                e[i] += 1
                e[j] += 1
                exps.append(e)
                coefs.append(c)
    return AlgebraicHypersurface(np.array(exps), np.array(coefs), name)


def dual_quadric(f: AlgebraicHypersurface) -> AlgebraicHypersurface:
    """Dual of the smooth quadric ``z^T Q z = 0``: ``w^T conj(Q)^{-1} w = 0``."""
    Q = quadric_matrix(f)
    if abs(np.linalg.det(Q)) < 1e-12:
        raise Inapplicable("degenerate quadric")
    return quadric_from_matrix(np.linalg.inv(np.conj(Q)), name=f"dual({f.name})")


@dataclass
class TubeDualityResult:
    max_membership_residual: float
    max_direct_residual: float
    samples: int

    def as_dict(self) -> dict:
        return {
            "max_membership_residual": self.max_membership_residual,
            "max_direct_residual": self.max_direct_residual,
            "samples": self.samples,
        }


def tube_duality_check(f: AlgebraicHypersurface, r: float, sample_count: int = 20,
                       rng=None, dense_count: int = 400) -> TubeDualityResult:
    """Distances from tube points of radius r over X to the dual variety.

    ``max_direct_residual`` compares each tube point with the Gauss point of
    its own base point; ``max_membership_residual`` with the nearest point
    of a dense sample of the dual variety.
    """
    if not 0 < r < np.pi / 2:
        raise ValueError("need 0 < r < pi/2")
    rng = np.random.default_rng(rng)
    space = CP(f.nvars - 1)
    xs = sample_smooth_points(f, sample_count, rng)
    dense = np.array([gauss_point(f, x).coords for x in sample_smooth_points(f, dense_count, rng)])
    target = np.pi / 2 - r
    direct, member = 0.0, 0.0
    for x in xs:
        t = rng.uniform(0, 2 * np.pi)
        p = tube_chart_algebraic(f, x, t, r)
        y = gauss_point(f, x)
        direct = max(direct, abs(coords_distance(space, p.coords, y.coords) - target))
        pool = np.vstack([dense, y.coords])
        dmin = min(coords_distance(space, p.coords, w) for w in pool)
        member = max(member, abs(dmin - target))
    return TubeDualityResult(member, direct, len(xs))


def _dual_tangent_point(f: AlgebraicHypersurface, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Point orthogonal to the tangent hyperplane of the dual variety at the
    Gauss point of x, computed from the differential of the Gauss map."""
    chart = AlgebraicChart(f, x)
    s0 = np.zeros(chart.dim)
    x0 = chart(s0)
    scale = x0[chart.affine_index]

    def cone(s):
        z = chart(s)
        z = z * (scale / z[chart.affine_index])  # fixed affine normalization
        return np.conj(f.gradient(z))

    Y = cone(s0)
    vecs = [Y]
    for i in range(chart.dim):
        ds = np.zeros(chart.dim)
        ds[i] = h
        vecs.append((cone(s0 + ds) - cone(s0 - ds)) / (2 * h))
    V = np.array(vecs)
    sv = np.linalg.svd(V, compute_uv=False)
    rank = int(np.sum(sv > 1e-7 * sv[0]))
    n = f.nvars - 1
    if rank < n:
        raise Inapplicable(f"dual variety is not a hypersurface here (tangent rank {rank} < {n})")
    w = null_space(np.conj(V), rcond=1e-7)
    if w.shape[1] != 1:
        raise Inapplicable("dual tangent hyperplane is not determined")
    return w[:, 0]


@dataclass
class BidualityResult:
    applicable: bool
    passed: Optional[bool]
    error: Optional[float] = None
    reason: str = ""
    method: str = ""


def biduality_spot_check(f: AlgebraicHypersurface, x, tol: float = 1e-7) -> BidualityResult:
    """Does the dual construction applied at the Gauss point return ``x``?

    Quadrics use the closed-form dual quadric; other degrees use the tangent
    hyperplane of the dual variety obtained from the Gauss map's
    differential.
    """
    x = np.asarray(getattr(x, "coords", x), dtype=complex)
    x = x / np.linalg.norm(x)
    y = gauss_point(f, x)  # raises off-variety / singular errors
    if f.degree == 1:
        return BidualityResult(False, None, reason="dual of a hyperplane is a point", method="none")
    try:
        if f.degree == 2:
            g = dual_quadric(f)
            back = gauss_point(g, y).coords
            method = "dual quadric"
        else:
            back = _dual_tangent_point(f, x)
            method = "gauss-map differential"
    except (Inapplicable, SingularPointError, OffVarietyError) as exc:
        return BidualityResult(False, None, reason=str(exc))
    err = float(np.max(np.abs(gauge(back / np.linalg.norm(back)) - gauge(x))))
    return BidualityResult(True, err <= tol, err, method=method)


@dataclass
class SingularCandidate:
    point: np.ndarray
    f_residual: float
    grad_residual: float


def default_grid(nvars: int, values=(0, 1, -1, 1j, -1j)) -> np.ndarray:
    """Points with coordinates in ``values``, one per projective class."""
    import itertools

    seen = []
    for combo in itertools.product(values, repeat=nvars):
        z = np.array(combo, dtype=complex)
        if not np.any(z):
            continue
        z = gauge(z / np.linalg.norm(z))
        if not any(np.max(np.abs(z - w)) < 1e-12 for w in seen):
            seen.append(z)
    return np.array(seen)


def _grad_scale(f: AlgebraicHypersurface, z: np.ndarray) -> float:
    return float(np.sum(np.abs(f.coefficients)) * f.degree * np.linalg.norm(z) ** (f.degree - 1))


def singular_locus_probe(f: AlgebraicHypersurface, grid=None, f_tol: float = 1e-8,
                         grad_tol: float = 1e-6, max_iter: int = 100) -> list:
    """Grid points of ``f = 0`` with vanishing gradient, refined by damped descent.

    The refinement minimizes ``|grad f|^2 + |f|^2`` over unit vectors with
    step halving.  Candidates are returned once per projective point.
    """
    grid = default_grid(f.nvars) if grid is None else np.atleast_2d(np.asarray(grid, dtype=complex))
    out = []
    for z in grid:
        z = z / np.linalg.norm(z)
        if abs(f(z)) > f_tol * f.scale(z) or np.linalg.norm(f.gradient(z)) > grad_tol * _grad_scale(f, z):
            continue
        z = _refine(f, z, max_iter)
        fr = abs(f(z)) / f.scale(z)
        gr = float(np.linalg.norm(f.gradient(z)) / _grad_scale(f, z))
        zg = gauge(z)
        if not any(np.max(np.abs(zg - c.point)) < 1e-8 for c in out):
            out.append(SingularCandidate(zg, fr, gr))
    return out


def _refine(f: AlgebraicHypersurface, z: np.ndarray, max_iter: int) -> np.ndarray:
    def phi(w):
        return float(np.sum(np.abs(f.gradient(w)) ** 2) + abs(f(w)) ** 2)

    val = phi(z)
    step = 1e-2
    for _ in range(max_iter):
        if val == 0.0:
            break
        H = f.hessian(z)
        g = f.gradient(z)
        # Wirtinger gradient of |grad f|^2 + |f|^2 with respect to conj(z)
        direction = np.conj(H) @ g + f(z) * np.conj(g)
        direction = direction - np.vdot(z, direction) * z
        nd = np.linalg.norm(direction)
        if nd == 0.0:
            break
        while step > 1e-16:
            cand = z - step * direction / nd
            cand = cand / np.linalg.norm(cand)
            cval = phi(cand)
            if cval < val:
                z, val = cand, cval
                step *= 2
                break
            step /= 2
        else:
            break
    return z
