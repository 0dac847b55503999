"""Homogeneous models of the complex space forms CP^n and CH^n.

CP^n (holomorphic curvature 4) is the unit sphere of C^{n+1} modulo phase;
CH^n (holomorphic curvature -4) is the hyperboloid <z, z> = -1 in C^{1,n}
modulo phase.  Tangent vectors are carried by horizontal representatives,
the metric is the real part of the ambient Hermitian form and the complex
structure is multiplication by i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12
HORIZONTAL_TOL = 1e-10


class DimensionError(ValueError):
    pass


class DomainError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SpaceForm:
    curvature_sign: int
    complex_dim: int

    def __post_init__(self):
        if self.curvature_sign not in (1, -1):
            raise ValueError(f"curvature_sign must be +1 or -1, got {self.curvature_sign}")
        if self.complex_dim < 2:
            raise ValueError(f"complex_dim must be >= 2, got {self.complex_dim}")

    @property
    def c(self) -> int:
        return self.curvature_sign

    @property
    def n(self) -> int:
        return self.complex_dim

    @property
    def signature(self) -> np.ndarray:
        sig = np.ones(self.n + 1)
        if self.c < 0:
            sig[0] = -1.0
        return sig

    @property
    def name(self) -> str:
        return f"{'CP' if self.c > 0 else 'CH'}{self.n}"

    def form(self, a, b) -> complex:
        return hermitian_form(self, a, b)

    def point(self, coords) -> "ModelPoint":
        return ModelPoint.from_coords(self, coords)


def CP(n: int) -> SpaceForm:
    return SpaceForm(1, n)


def CH(n: int) -> SpaceForm:
    return SpaceForm(-1, n)


def hermitian_form(space: SpaceForm, a, b) -> complex:
    """Hermitian form of the model, conjugate-linear in ``b``.

    Definite for CP^n, signature (-, +, ..., +) for CH^n.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (space.n + 1,) or b.shape != (space.n + 1,):
        raise DimensionError(
            f"expected vectors of length {space.n + 1}, got {a.shape} and {b.shape}"
        )
    return complex(np.sum(space.signature * a * np.conj(b)))


def _form(sig, a, b):
    # unchecked hot-path variant
    return np.sum(sig * a * np.conj(b))


def gauge(coords: np.ndarray) -> np.ndarray:
    """Rotate so the first coordinate of largest modulus is real and nonnegative."""
    coords = np.asarray(coords, dtype=complex)
    k = int(np.argmax(np.abs(coords)))
    a = coords[k]
    if abs(a) == 0.0:
        return coords.copy()
    out = coords * (abs(a) / a)
    out[k] = abs(a)  # exactly real, no rounding residue
    return out


def normalize(space: SpaceForm, coords) -> np.ndarray:
    z = np.asarray(coords, dtype=complex)
    val = _form(space.signature, z, z).real
    if val * space.c <= 0.0:
        raise DomainError(
            f"vector with self-pairing {val:.3e} does not represent a point of {space.name}"
        )
    return z / np.sqrt(abs(val))


@dataclass(frozen=True, eq=False)
class ModelPoint:
    space: SpaceForm
    coords: np.ndarray
    form_value: float = field(default=0.0)

    @classmethod
    def from_coords(cls, space: SpaceForm, coords, gauged: bool = True) -> "ModelPoint":
        z = normalize(space, coords)
        if gauged:
            z = gauge(z)
        z.setflags(write=False)
        return cls(space, z, float(_form(space.signature, z, z).real))

    def equals(self, other: "ModelPoint", tol: float = 1e-10) -> bool:
        return self.space == other.space and bool(
            np.max(np.abs(gauge(self.coords) - gauge(other.coords))) <= tol
        )


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: ModelPoint
    rep: np.ndarray

    def __add__(self, other: "TangentVector") -> "TangentVector":
        _same_base(self, other)
        return TangentVector(self.base, self.rep + other.rep)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        _same_base(self, other)
        return TangentVector(self.base, self.rep - other.rep)

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.rep)

    def __mul__(self, s: float) -> "TangentVector":
        return TangentVector(self.base, float(s) * self.rep)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(max(metric_g(self, self), 0.0)))

    def horizontality(self) -> float:
        return abs(hermitian_form(self.base.space, self.rep, self.base.coords))


def _same_base(X: TangentVector, Y: TangentVector) -> None:
    if X.base is Y.base:
        return
    if X.base.space != Y.base.space or not np.allclose(
        X.base.coords, Y.base.coords, rtol=0.0, atol=1e-12
    ):
        raise DomainError("tangent vectors are based at different points")


def project_horizontal(x: ModelPoint, w) -> TangentVector:
    """Remove the component of ``w`` along the fibre through ``x``."""
    space = x.space
    w = np.asarray(w, dtype=complex)
    z = x.coords
    return TangentVector(x, w - space.c * _form(space.signature, w, z) * z)


def horizontal_part(space: SpaceForm, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return w - space.c * _form(space.signature, w, z) * z


def metric_g(X: TangentVector, Y: TangentVector) -> float:
    _same_base(X, Y)
    return float(hermitian_form(X.base.space, X.rep, Y.rep).real)


def complex_structure_J(X: TangentVector) -> TangentVector:
    return TangentVector(X.base, 1j * X.rep)


def _geodesic_coords(space: SpaceForm, z, v, t):
    if space.c > 0:
        return np.cos(t) * z + np.sin(t) * v
    return np.cosh(t) * z + np.sinh(t) * v


def geodesic_F(x: ModelPoint, v: TangentVector, t: float) -> ModelPoint:
    """Point reached from ``x`` after arc length ``t`` along the unit vector ``v``."""
    _same_base(TangentVector(x, v.rep), v)
    gv = metric_g(v, v)
    if abs(gv - 1.0) > 1e-9:
        raise PreconditionError(f"geodesic_F needs a unit vector, g(v, v) = {gv:.12g}")
    if v.horizontality() > HORIZONTAL_TOL:
        raise PreconditionError("geodesic_F needs a horizontal vector")
    return ModelPoint.from_coords(x.space, _geodesic_coords(x.space, x.coords, v.rep, t))


def distance(x: ModelPoint, y: ModelPoint) -> float:
    space = x.space
    if y.space != space:
        raise DomainError("points live in different spaces")
    s = abs(_form(space.signature, x.coords, y.coords))
    if space.c > 0:
        return float(np.arccos(min(s, 1.0)))
    return float(np.arccosh(max(s, 1.0)))


def coords_distance(space: SpaceForm, a: np.ndarray, b: np.ndarray) -> float:
    """Distance between two raw (normalized) representatives."""
    s = abs(_form(space.signature, a, b))
    if space.c > 0:
        return float(np.arccos(min(s, 1.0)))
    return float(np.arccosh(max(s, 1.0)))


def align_phase(space: SpaceForm, w: np.ndarray, z: np.ndarray) -> complex:
    """Unit scalar ``lam`` maximizing the real part of c * <lam w, z>."""
    p = space.c * _form(space.signature, w, z)
    a = abs(p)
    if a == 0.0:
        return 1.0 + 0j
    return np.conj(p) / a


def horizontal_basis(space: SpaceForm, z: np.ndarray) -> np.ndarray:
    """Rows form a g-orthonormal real basis (2n vectors) of the horizontal space at z."""
    n = space.n
    sig = space.signature
    vecs = []
    for k in range(n + 1):
        for s in (1.0, 1j):
            e = np.zeros(n + 1, dtype=complex)
            e[k] = s
            vecs.append(horizontal_part(space, z, e))
    basis = []
    for v in vecs:
        for b in basis:
            v = v - _form(sig, v, b).real * b
        nv = _form(sig, v, v).real
        if nv > 1e-8:
            basis.append(v / np.sqrt(nv))
        if len(basis) == 2 * n:
            break
    return np.array(basis)
