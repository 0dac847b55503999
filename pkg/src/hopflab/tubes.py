"""Tubes over submanifolds, predicted tube spectra, focal radii and Jacobian ranks.

A base submanifold is described by a parametrized point map and a
parametrized unit-normal sampler.  The tube map sends (base parameter,
normal parameter) to ``F(r xi)``, the point at arc length ``r`` along the
normal geodesic, so a tube chart is an ordinary ``HypersurfacePatch``.
Unless stated otherwise tube charts use the "inward" normal pointing back
at the base; the closed-form spectra here are written for the opposite,
outward normal, which is the one the parallel-hypersurface formulas use.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize_scalar

from .hypersurface import (
    HOPF_TOL,
    HypersurfacePatch,
    ShapeSpectrum,
    _aligned,
    arccot,
    frame_at,
    _normal_derivatives,
)
from .polynomial import AlgebraicHypersurface, SingularPointError
from .space_forms import (
    CP,
    ModelPoint,
    PreconditionError,
    SpaceForm,
    _form,
    _geodesic_coords,
    align_phase,
    horizontal_basis,
    horizontal_part,
    normalize,
)

FOCAL_GUARD = 1e-8
SMOOTH_THRESHOLD = 1e-8


class FocalDegeneracyError(ValueError):
    pass


class GaugeError(RuntimeError):
    pass


# -- sphere coordinates ----------------------------------------------------

def complex_sphere(p) -> np.ndarray:
    """Unit vector of C^q from 2q-1 parameters.

    The first q-1 entries are modulus angles in (0, pi/2), the last q are
    phases.
    """
    p = np.asarray(p, dtype=float)
    q = (len(p) + 1) // 2
    angles, phases = p[: q - 1], p[q - 1:]
    mod = np.ones(q)
    s = 1.0
    for k, a in enumerate(angles):
        mod[k] = s * np.cos(a)
        s *= np.sin(a)
    mod[q - 1] = s
    return mod * np.exp(1j * phases)


def complex_sphere_box(q: int, margin: float = 0.1) -> list:
    return [(margin, np.pi / 2 - margin)] * (q - 1) + [(-np.pi, np.pi)] * q


def real_sphere(p) -> np.ndarray:
    """Unit vector of R^{d+1} from d hyperspherical angles."""
    p = np.asarray(p, dtype=float)
    d = len(p)
    x = np.ones(d + 1)
    s = 1.0
    for k, a in enumerate(p):
        x[k] = s * np.cos(a)
        s *= np.sin(a)
    x[d] = s
    return x


def real_sphere_frame(p) -> np.ndarray:
    """Orthonormal rows spanning the tangent space of the real sphere at
    ``real_sphere(p)``: the normalized coordinate partials, which are
    mutually orthogonal in hyperspherical coordinates."""
    p = np.asarray(p, dtype=float)
    d = len(p)
    rows = np.zeros((d, d + 1))
    for k in range(d):
        for j in range(k, d + 1):
            val = 1.0
            for i in range(min(j, d)):
                if i == k:
                    val *= np.cos(p[i])
                elif i < j:
                    val *= np.sin(p[i])
            if j < d:
                val *= -np.sin(p[j]) if j == k else np.cos(p[j])
            rows[k, j] = val
        rows[k] /= np.linalg.norm(rows[k])
    return rows


def real_sphere_box(d: int, margin: float = 0.15) -> list:
    if d == 0:
        return []
    return [(margin, np.pi - margin)] * (d - 1) + [(-np.pi, np.pi)]


def _unit(space: SpaceForm, v: np.ndarray) -> np.ndarray:
    return v / np.sqrt(_form(space.signature, v, v).real)


def _complete(space: SpaceForm, vecs: list, count: int) -> list:
    """Extend ``vecs`` by ``count`` Hermitian-orthonormal vectors, deterministically."""
    sig = space.signature
    out = []
    basis = list(vecs)
    for k in range(space.n + 1):
        if len(out) == count:
            break
        e = np.zeros(space.n + 1, dtype=complex)
        e[k] = 1.0
        for b in basis:
            e = e - _form(sig, e, b) / _form(sig, b, b) * b
        nv = _form(sig, e, e).real
        if nv > 1e-6:
            e = e / np.sqrt(nv)
            basis.append(e)
            out.append(e)
    return out


# -- base submanifolds -----------------------------------------------------

@dataclass
class BaseSubmanifold:
    """Base of a tube.

    ``point(s)`` gives a representative, ``normal(s, w)`` a unit horizontal
    normal at that representative (same gauge).  ``base_box`` and
    ``fiber_box`` bound the parameters.  ``theta_hopf`` and ``fiber_count``
    encode the shape of the tube spectrum: the structure direction
    contributes ``2 cot(2(theta_hopf - r))`` and ``fiber_count`` normal
    directions contribute ``-cot r``.  ``base_curvatures(s, w)`` returns the
    eigenvalues of the base shape operator along the normal that are not
    accounted for by the structure direction.
    """

    space: SpaceForm
    kind: str
    point: Callable[[np.ndarray], np.ndarray]
    normal: Callable[[np.ndarray, np.ndarray], np.ndarray]
    base_box: list
    fiber_box: list
    theta_hopf: float
    fiber_count: int
    base_curvatures: Callable[[np.ndarray, np.ndarray], np.ndarray]
    payload: object = None
    name: str = ""

    @property
    def base_dim(self) -> int:
        return len(self.base_box)

    @property
    def fiber_dim(self) -> int:
        return len(self.fiber_box)

    def normal_sampler(self, s, w):
        return self.normal(np.asarray(s, dtype=float), np.asarray(w, dtype=float))


def point_base(space: SpaceForm, center=None) -> BaseSubmanifold:
    """A single point; its tubes are geodesic spheres."""
    n = space.n
    if center is None:
        center = np.zeros(n + 1, dtype=complex)
        center[0] = 1.0
    center = normalize(space, center)
    frame = np.array(_complete(space, [center], n))

    def normal(s, w):
        return complex_sphere(w) @ frame

    return BaseSubmanifold(
        space, "point", lambda s: center.copy(), normal, [], complex_sphere_box(n),
        np.pi / 2, 2 * n - 2, lambda s, w: np.zeros(0), payload=center, name="point",
    )


def complex_linear_base(space: SpaceForm, k: int) -> BaseSubmanifold:
    """Totally geodesic CP^k = {z_{k+1} = ... = z_n = 0}, affine chart z_0 = 1."""
    n = space.n
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    if space.c != 1:
        raise ValueError("complex linear bases are provided for CP^n only")

    def point(s):
        z = np.zeros(n + 1, dtype=complex)
        z[0] = 1.0
        z[1: k + 1] = s[0::2] + 1j * s[1::2]
        return z / np.linalg.norm(z)

    def normal(s, w):
        v = np.zeros(n + 1, dtype=complex)
        v[k + 1:] = complex_sphere(w)
        return v

    return BaseSubmanifold(
        space, "holomorphic_chart", point, normal, [(-0.8, 0.8)] * (2 * k),
        complex_sphere_box(n - k), np.pi / 2, 2 * (n - k) - 2,
        lambda s, w: np.zeros(2 * k), payload=k, name=f"CP{k}",
    )


def real_form_base(space: SpaceForm) -> BaseSubmanifold:
    """Totally geodesic RP^n: real unit vectors, normals i times real tangents."""
    n = space.n
    if space.c != 1:
        raise ValueError("the real form is provided for CP^n only")

    def point(s):
        return real_sphere(s).astype(complex)

    def normal(s, w):
        return 1j * (real_sphere(w) @ real_sphere_frame(s))

    return BaseSubmanifold(
        space, "real_form", point, normal, real_sphere_box(n, 0.3), real_sphere_box(n - 1, 0.3),
        np.pi / 4, n - 1, lambda s, w: np.zeros(n - 1), name=f"RP{n}",
    )


class AlgebraicChart:
    """Local holomorphic chart of ``f = 0`` around a smooth point.

    One coordinate is solved for by Newton's method; the rest are free
    complex offsets in an affine chart.
    """

    def __init__(self, f: AlgebraicHypersurface, x0, solve_index: Optional[int] = None,
                 affine_index: Optional[int] = None):
        x0 = np.asarray(x0, dtype=complex)
        g = f.gradient(x0)
        if not f.is_smooth_at(x0, SMOOTH_THRESHOLD):
            raise SingularPointError(f"|grad f| = {np.linalg.norm(g):.3e} at the chart centre")
        self.f = f
        self.solve_index = int(np.argmax(np.abs(g))) if solve_index is None else solve_index
        if affine_index is None:
            order = np.argsort(-np.abs(x0), kind="stable")
            affine_index = int(order[0] if order[0] != self.solve_index else order[1])
        self.affine_index = affine_index
        self.y0 = x0 / x0[affine_index]
        self.free = [j for j in range(f.nvars) if j not in (self.solve_index, affine_index)]

    @property
    def dim(self) -> int:
        return 2 * len(self.free)

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self._solve(tuple(s.tolist())).copy()

    @functools.lru_cache(maxsize=4096)
    def _solve(self, key) -> np.ndarray:
        s = np.array(key)
        y = self.y0.copy()
        y[self.free] = self.y0[self.free] + s[0::2] + 1j * s[1::2]
        k = self.solve_index
        scale = max(self.f.scale(y), 1e-300)
        for _ in range(40):
            d = self.f.gradient(y)[k]
            if d == 0:
                break
            step = self.f(y) / d
            y[k] -= step
            if abs(step) <= 1e-15 * max(1.0, abs(y[k])):
                break
        if abs(self.f(y)) > 1e-10 * scale:
            raise ValueError(f"Newton solve for the chart did not converge at s={s}")
        return y / np.linalg.norm(y)


def hypersurface_normal(f: AlgebraicHypersurface, x: np.ndarray) -> np.ndarray:
    g = f.gradient(x)
    ng = np.linalg.norm(g)
    if ng <= SMOOTH_THRESHOLD * np.linalg.norm(x) ** (f.degree - 1):
        raise SingularPointError(f"|grad f| = {ng:.3e}")
    return np.conj(g) / ng


def algebraic_base_curvatures(f: AlgebraicHypersurface, x: np.ndarray) -> np.ndarray:
    """Eigenvalues of the shape operator of ``f = 0`` at ``x`` (any unit normal).

    From the holomorphic Hessian restricted to the complex tangent space:
    they are plus/minus the singular values of ``Q^T Hess Q / |grad f|``.
    """
    x = np.asarray(x, dtype=complex)
    x = x / np.linalg.norm(x)
    g = f.gradient(x)
    Q = null_space(np.vstack([np.conj(x), g]))
    S = Q.T @ f.hessian(x) @ Q
    sv = np.linalg.svd(S, compute_uv=False) / np.linalg.norm(g)
    return np.sort(np.concatenate([sv, -sv]))


def algebraic_base(f: AlgebraicHypersurface, x0, half_width: float = 0.15,
                   space: Optional[SpaceForm] = None) -> BaseSubmanifold:
    """Local patch of ``f = 0`` around ``x0``; normals ``e^{it} conj(grad f)/|grad f|``."""
    space = space or CP(f.nvars - 1)
    chart = AlgebraicChart(f, x0)

    def normal(s, w):
        return hypersurface_normal(f, chart(s)) * np.exp(1j * w[0])

    return BaseSubmanifold(
        space, "algebraic_hypersurface", chart, normal, [(-half_width, half_width)] * chart.dim,
        [(-np.pi, np.pi)], np.pi / 2, 0,
        lambda s, w: algebraic_base_curvatures(f, chart(s)), payload=f, name=f.name or "algebraic",
    )


# -- tubes -----------------------------------------------------------------

@dataclass
class TubeSpec:
    base: BaseSubmanifold
    radius: float

    def __post_init__(self):
        r = self.radius
        if self.base.space.c > 0 and not 0 < r < np.pi / 2:
            raise ValueError(f"tube radius {r} outside (0, pi/2)")
        if self.base.space.c < 0 and not r > 0:
            raise ValueError(f"tube radius {r} must be positive")

    @property
    def space(self) -> SpaceForm:
        return self.base.space

    def split(self, params):
        params = np.asarray(params, dtype=float)
        return params[: self.base.base_dim], params[self.base.base_dim:]

    def coords(self, params, r: Optional[float] = None) -> np.ndarray:
        r = self.radius if r is None else r
        s, w = self.split(params)
        x = self.base.point(s)
        return _geodesic_coords(self.space, x, self.base.normal(s, w), r)

    def outward(self, params) -> np.ndarray:
        """Velocity of the normal geodesic at the tube point (away from the base)."""
        s, w = self.split(params)
        x, v = self.base.point(s), self.base.normal(s, w)
        r = self.radius
        if self.space.c > 0:
            return -np.sin(r) * x + np.cos(r) * v
        return np.sinh(r) * x + np.cosh(r) * v

    @property
    def domain_box(self) -> np.ndarray:
        return np.array(self.base.base_box + self.base.fiber_box, dtype=float)

    def patch(self, orientation: str = "inward", fd_step: float = 1e-4, domain_box=None) -> HypersurfacePatch:
        box = self.domain_box if domain_box is None else domain_box
        return HypersurfacePatch(
            self.space, self.coords, box, fd_step, orientation,
            normal_hint=lambda u: -self.outward(u),
            name=f"tube({self.base.name}, r={self.radius:.6g})",
        )

    def predicted(self, params) -> np.ndarray:
        """Closed-form spectrum at ``params`` for the outward normal."""
        s, w = self.split(params)
        if self.space.c < 0:
            if self.base.kind != "point":
                raise NotImplementedError("CH^n predictions are available for spheres only")
            return ch_sphere_spectrum(self.space.n, self.radius, outward=True)
        lams = self.base.base_curvatures(s, w)
        thetas = [(arccot(l), 1) for l in lams]
        pairs = predicted_spectrum(thetas, self.base.theta_hopf, self.base.fiber_count + 1, self.radius)
        return np.sort(np.repeat([p[0] for p in pairs], [p[1] for p in pairs]))


def sphere_chart_mp(spec: TubeSpec):
    """mpmath chart and inward hint for a geodesic sphere ``TubeSpec`` in CP^n.

    Same parametrization as ``spec.coords``; feeds the extended-precision
    shape operator.
    """
    import mpmath as mp

    if spec.base.kind != "point" or spec.space.c != 1:
        raise ValueError("extended-precision charts are provided for spheres in CP^n")
    n = spec.space.n
    center = [mp.mpc(complex(v)) for v in spec.base.payload]
    frame = [[mp.mpc(complex(v)) for v in row] for row in _complete(spec.space, [spec.base.payload], n)]
    r = spec.radius

    def direction(w):
        q = n
        angles, phases = w[: q - 1], w[q - 1:]
        mods, s = [], mp.mpf(1)
        for a in angles:
            mods.append(s * mp.cos(a))
            s *= mp.sin(a)
        mods.append(s)
        coef = [m * mp.expj(ph) for m, ph in zip(mods, phases)]
        return [mp.fsum(coef[k] * frame[k][j] for k in range(q)) for j in range(n + 1)]

    def chart(u):
        rr = mp.mpf(r)
        v = direction(u)
        return [mp.cos(rr) * c + mp.sin(rr) * vj for c, vj in zip(center, v)]

    def hint(u):
        rr = mp.mpf(r)
        v = direction(u)
        return [mp.sin(rr) * c - mp.cos(rr) * vj for c, vj in zip(center, v)]

    return chart, hint


def tube_point(spec: TubeSpec, base_param, normal_param) -> ModelPoint:
    return ModelPoint.from_coords(
        spec.space, spec.coords(np.concatenate([np.atleast_1d(base_param), np.atleast_1d(normal_param)]))
    )


def tube_chart_algebraic(f: AlgebraicHypersurface, x, t: float, r: float) -> ModelPoint:
    """``x cos r + sin r e^{it} conj(grad f)/|grad f|``: the circle of radius r about x
    on the projective line through x and its Gauss point."""
    x = np.asarray(x, dtype=complex)
    x = x / np.linalg.norm(x)
    N = hypersurface_normal(f, x)
    return ModelPoint.from_coords(CP(f.nvars - 1), np.cos(r) * x + np.sin(r) * np.exp(1j * t) * N)


def tube_curvature(theta: float, r: float) -> float:
    """Principal curvature ``cot(theta - r)`` after moving a distance r."""
    return float(np.cos(theta - r) / np.sin(theta - r))


def predicted_spectrum(theta_list, Theta: float, k: int, r: float) -> list:
    """Tube spectrum as (eigenvalue, multiplicity) pairs, outward normal.

    ``-cot r`` on the ``k - 1`` normal-sphere directions, ``cot(theta_j - r)``
    on the base principal directions and ``2 cot(2(Theta - r))`` on the
    structure direction.
    """
    if not 0 < r < np.pi / 2:
        raise ValueError("need 0 < r < pi/2")
    if not 0 < Theta <= np.pi / 2:
        raise ValueError("need 0 < Theta <= pi/2")
    out = []
    if k - 1 > 0:
        if abs(np.sin(r)) < FOCAL_GUARD:
            raise FocalDegeneracyError("r is at the pole of cot r")
        out.append((-1.0 / np.tan(r), k - 1))
    for item in theta_list:
        th, mult = item if np.iterable(item) else (item, 1)
        if not 0 < th < np.pi:
            raise ValueError(f"principal angle {th} outside (0, pi)")
        if abs(np.sin(th - r)) < FOCAL_GUARD:
            raise FocalDegeneracyError(f"r = {r} is focal for principal angle {th}")
        out.append((tube_curvature(th, r), int(mult)))
    if abs(np.sin(2 * (Theta - r))) < FOCAL_GUARD:
        raise FocalDegeneracyError(f"r = {r} is focal for the structure direction")
    out.append((2.0 * tube_curvature(2 * Theta, 2 * r), 1))
    merged = {}
    for val, mult in out:
        key = round(val, 12)
        merged[key] = (val, merged.get(key, (val, 0))[1] + mult)
    return sorted(merged.values())


def sphere_spectrum(n: int, r: float) -> np.ndarray:
    """Geodesic sphere of CP^n, inward normal: 2 cot 2r once, cot r (2n-2) times."""
    return np.sort(np.r_[2 / np.tan(2 * r), np.full(2 * n - 2, 1 / np.tan(r))])


def ch_sphere_spectrum(n: int, r: float, outward: bool = False) -> np.ndarray:
    sp = np.r_[2 / np.tanh(2 * r), np.full(2 * n - 2, 1 / np.tanh(r))]
    return np.sort(-sp if outward else sp)


# -- focal radii -----------------------------------------------------------

@dataclass
class FocalReport:
    radii: list  # (r, multiplicity, source)

    def values(self) -> np.ndarray:
        return np.array([r for r, _, _ in self.radii])


def focal_radii(sp: ShapeSpectrum, tol: float = HOPF_TOL, cluster: float = 1e-6) -> FocalReport:
    """Distances along the normal at which ``Phi_r`` loses rank at this point."""
    if sp.c != 1:
        raise PreconditionError("focal radii are computed for CP^n")
    if sp.hopf_defect > tol:
        raise PreconditionError(f"not a Hopf point: defect {sp.hopf_defect:.3e}")
    alphas = np.sort(sp.restricted_eigenvalues())
    groups = []
    for a in alphas:
        if groups and abs(a - groups[-1][-1]) <= cluster:
            groups[-1].append(a)
        else:
            groups.append([a])
    radii = [(arccot(float(np.mean(g))), len(g), "eigenvalue") for g in groups]
    # mu = 2 cot 2r with 2r in (0, pi)
    radii.append((arccot(sp.mu / 2) / 2, 1, "hopf"))
    return FocalReport(sorted(radii))


# -- Jacobian rank of the normal exponential map --------------------------

@dataclass
class _Linearization:
    coords: np.ndarray
    normal: np.ndarray
    dz: np.ndarray
    dxi: np.ndarray


def _linearize(patch: HypersurfacePatch, u) -> _Linearization:
    u = np.asarray(u, dtype=float)
    frame = frame_at(patch, u)
    space, z, xi = patch.space, frame.coords, frame.normal
    dxi = _normal_derivatives(patch, u, frame)
    # restore the component along z dropped by the horizontal projection:
    # d<xi, z> = 0 gives c<dxi, z> = -c<xi, dz>
    sig = space.signature
    along = np.array([-space.c * _form(sig, xi, dz) for dz in frame.raw_tangents])
    dxi = dxi + along[:, None] * z[None, :]
    return _Linearization(z, xi, frame.raw_tangents, dxi)


def _jacobian_singular_values(space: SpaceForm, lin: _Linearization, r: float) -> np.ndarray:
    p = _geodesic_coords(space, lin.coords, lin.normal, r)
    if space.c > 0:
        cols = np.cos(r) * lin.dz + np.sin(r) * lin.dxi
    else:
        cols = np.cosh(r) * lin.dz + np.sinh(r) * lin.dxi
    basis = horizontal_basis(space, p)
    sig = space.signature
    J = np.array([[np.sum(sig * horizontal_part(space, p, col) * np.conj(b)).real for col in cols]
                  for b in basis])
    return np.linalg.svd(J, compute_uv=False)


def _rank(sv: np.ndarray, tol_ratio: float, scale: float) -> int:
    return int(np.sum(sv > tol_ratio * scale))


def jacobian_rank(target, params, r: Optional[float] = None, tol_ratio: float = 1e-6) -> int:
    """Rank of the real (2n) x (2n-1) Jacobian of the normal exponential map.

    ``target`` is a ``HypersurfacePatch`` (map ``u -> F(r xi(u))``) or a
    ``TubeSpec`` (its own tube map over the unit normal bundle, radius
    ``spec.radius`` unless ``r`` is given).
    """
    if isinstance(target, TubeSpec):
        return _tube_map_rank(target, params, target.radius if r is None else r, tol_ratio)
    lin = _linearize(target, params)
    sv = _jacobian_singular_values(target.space, lin, r)
    # threshold relative to the chart's own speed at r = 0
    return _rank(sv, tol_ratio, _speed(target.space, lin))


def _speed(space: SpaceForm, lin: _Linearization) -> float:
    return float(_jacobian_singular_values(space, lin, 0.0).max())


def _tube_map_rank(spec: TubeSpec, params, r: float, tol_ratio: float, h: float = 1e-5) -> int:
    sv = _tube_map_singular_values(spec, params, r, h)
    # threshold relative to the base chart's speed (r = 0), so a uniform collapse is detected
    ref = max(_tube_map_singular_values(spec, params, 0.0, h).max(), sv.max(), 1e-300)
    return _rank(sv, tol_ratio, ref)


def _tube_map_singular_values(spec: TubeSpec, params, r: float, h: float) -> np.ndarray:
    space = spec.space
    params = np.asarray(params, dtype=float)
    p = normalize(space, spec.coords(params, r))
    cols = []
    for i in range(len(params)):
        dp = np.zeros(len(params))
        dp[i] = h
        a = normalize(space, spec.coords(params + dp, r))
        b = normalize(space, spec.coords(params - dp, r))
        la, lb = align_phase(space, a, p), align_phase(space, b, p)
        if abs(_form(space.signature, a * la, p)) < 0.5 or abs(_form(space.signature, b * lb, p)) < 0.5:
            raise GaugeError("neighbouring tube points are too far apart to align")
        cols.append(horizontal_part(space, p, (a * la - b * lb) / (2 * h)))
    basis = horizontal_basis(space, p)
    sig = space.signature
    J = np.array([[np.sum(sig * col * np.conj(bv)).real for col in cols] for bv in basis])
    return np.linalg.svd(J, compute_uv=False)


@dataclass
class SweepRow:
    r_lo: float
    r_hi: float
    r_star: float
    min_rank: int
    max_rank: int


def rank_sweep(patch: HypersurfacePatch, radii, grid, tol_ratio: float = 1e-6) -> list:
    """Rank extrema of ``u -> F(r xi(u))`` over ``grid`` for each sweep cell.

    ``radii`` are cell edges; each cell ``[r_i, r_{i+1}]`` is refined by
    minimizing the smallest singular value inside the cell, so a rank drop
    at an isolated radius is caught by the cell containing it.  Per-cell
    failures are recorded as rank -1.
    """
    radii = list(radii)
    if len(radii) < 2:
        return []
    lins = []
    for u in np.atleast_2d(grid):
        try:
            lins.append(_linearize(patch, u))
        except (ValueError, np.linalg.LinAlgError):
            lins.append(None)
    rows = []
    for lo, hi in zip(radii[:-1], radii[1:]):
        ranks = []
        r_stars = []
        for lin in lins:
            if lin is None:
                ranks.append(-1)
                continue
            scale = _speed(patch.space, lin)

            def smin(r):
                return _jacobian_singular_values(patch.space, lin, r).min()

            res = minimize_scalar(smin, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12, "maxiter": 500})
            cands = [lo, hi, float(res.x)]
            r_best = min(cands, key=smin)
            r_stars.append(r_best)
            ranks.append(_rank(_jacobian_singular_values(patch.space, lin, r_best), tol_ratio, scale))
        good = [k for k in ranks if k >= 0]
        rows.append(SweepRow(
            float(lo), float(hi), float(np.median(r_stars)) if r_stars else float("nan"),
            min(good) if good else -1, max(good) if good else -1,
        ))
    return rows


# -- singular blow-up -----------------------------------------------------

@dataclass
class MonomialCurve:
    """Curve ``s -> (coeff_j s^power_j)_j`` in an affine chart, completed onto
    ``f = 0`` by solving for coordinate ``solve_index``.

    The coefficient and power of ``solve_index`` are ignored.
    """

    coeffs: tuple
    powers: tuple
    solve_index: int
    affine_index: int = 0

    def free_values(self, s):
        import mpmath as mp

        return [mp.mpc(complex(c)) * s ** p for c, p in zip(self.coeffs, self.powers)]


def sextic_focal_curve(r: float) -> MonomialCurve:
    """Approach to [1:0:0:0] on x0^6 x3^2 + x1^3 x2^5 = 0 along x1 = a x2^5.

    Near the singular point the surface is the graph x3 = i x1^{3/2} x2^{5/2};
    along x1 = a s^5, x2 = s its principal curvatures tend to
    +-(3/4) a^{-1/2}.  Choosing a = (3 / (4 cot r))^2 makes that limit the
    focal value cot r, so the tube of radius r sees its curvature diverge.
    """
    a = (3.0 / (4.0 / np.tan(r))) ** 2
    return MonomialCurve((1.0, a, 1.0, 0.0), (0, 5, 1, 0), solve_index=3)


def _pick_root(roots):
    import mpmath as mp

    return sorted(roots, key=lambda z: (-float(mp.re(z)), -float(mp.im(z))))[0]


def _mp_newton(f: AlgebraicHypersurface, y, k: int, maxiter: int = 200):
    import mpmath as mp

    tol = mp.mpf(10) ** (-mp.mp.dps + 8)
    for _ in range(maxiter):
        d = f.gradient_mp(y)[k]
        if d == 0:
            break
        step = f.evaluate_mp(y) / d
        y[k] -= step
        if abs(step) <= tol * max(abs(y[k]), tol):
            break
    return y


def _probe_tube_chart(f: AlgebraicHypersurface, curve: MonomialCurve, s, r):
    """Tube chart over a neighbourhood of the curve point, parameters scaled to it."""
    import mpmath as mp

    k, a = curve.solve_index, curve.affine_index
    y0 = curve.free_values(s)
    y0[a] = mp.mpc(1)
    roots = mp.polyroots(f.univariate(y0, k), maxsteps=200, extraprec=2 * mp.mp.dps)
    y0[k] = _pick_root(roots)
    free = [j for j in range(f.nvars) if j not in (k, a)]
    scales = [abs(y0[j]) if y0[j] != 0 else s for j in free]
    r = mp.mpf(r)

    def base(u):
        y = list(y0)
        for m, j in enumerate(free):
            y[j] = y0[j] + scales[m] * mp.mpc(u[2 * m], u[2 * m + 1])
        y = _mp_newton(f, y, k)
        ny = mp.sqrt(mp.fsum(abs(v) ** 2 for v in y))
        y = [v / ny for v in y]
        g = f.gradient_mp(y)
        ng = mp.sqrt(mp.fsum(abs(v) ** 2 for v in g))
        return y, [mp.conj(v) / ng for v in g]

    def chart(u):
        y, N = base(u)
        e = mp.expj(u[-1])
        return [mp.cos(r) * yv + mp.sin(r) * e * nv for yv, nv in zip(y, N)]

    def hint(u):
        y, N = base(u)
        e = mp.expj(u[-1])
        return [mp.sin(r) * yv - mp.cos(r) * e * nv for yv, nv in zip(y, N)]

    return chart, hint, y0, len(free)


def singular_blowup_probe(f: AlgebraicHypersurface, singular_point, r: float, approach_scales,
                          curve: Optional[MonomialCurve] = None, t: float = 0.3,
                          dps: int = 120, h: float = 1e-30, require_singular: bool = True) -> list:
    """Max |principal curvature| of the tube of radius ``r`` over base points
    approaching ``singular_point`` along ``curve``, one entry per scale.

    The tube spectrum comes from the extended-precision finite-difference
    shape operator.  ``None`` marks an approach point that is itself
    singular.  Without ``curve`` the approach is the straight line with
    unit coefficients in the affine chart of the largest coordinate.
    """
    import mpmath as mp

    from .hpfd import shape_operator_hp

    P = np.asarray(singular_point, dtype=complex)
    P = P / np.linalg.norm(P)
    if require_singular and np.linalg.norm(f.gradient(P)) > 1e-10 * max(f.scale(P), 1.0):
        raise PreconditionError("grad f does not vanish at the probed point")
    if curve is None:
        a = int(np.argmax(np.abs(P)))
        base_pt = P / P[a]
        k = max((j for j in range(f.nvars) if j != a), key=lambda j: abs(f.gradient(base_pt + 0.01)[j]))
        curve = MonomialCurve(
            tuple(complex(base_pt[j]) for j in range(f.nvars)),
            tuple(0 for _ in range(f.nvars)), solve_index=k, affine_index=a,
        )
        curve = _LineCurve(curve)
    out = []
    for s in approach_scales:
        with mp.workdps(dps):
            s_mp = mp.mpf(s)
            chart, hint, y0, nfree = _probe_tube_chart(f, curve, s_mp, r)
            g = f.gradient_mp(y0)
            ng = mp.sqrt(mp.fsum(abs(v) ** 2 for v in g))
            ny = mp.sqrt(mp.fsum(abs(v) ** 2 for v in y0))
            if ng <= mp.mpf(SMOOTH_THRESHOLD) * ny ** (f.degree - 1) * mp.mpf(10) ** (-dps // 2):
                out.append(None)
                continue
        A = shape_operator_hp(chart, [0.0] * (2 * nfree) + [t], h=h, dps=dps, hint=hint)
        out.append(float(np.max(np.abs(np.linalg.eigvalsh(A)))))
    return out


class _LineCurve(MonomialCurve):
    """Straight-line approach: the base value plus ``s`` in every free coordinate."""

    def __init__(self, base: MonomialCurve):
        super().__init__(base.coeffs, base.powers, base.solve_index, base.affine_index)

    def free_values(self, s):
        import mpmath as mp

        return [mp.mpc(complex(c)) + s for c in self.coeffs]
