"""Real hypersurfaces given by charts, and their Weingarten numerics.

Everything here works on raw homogeneous representatives.  Neighbouring
chart values are phase-aligned to the centre representative before any
difference quotient is taken, so the differences only see geometric
motion.  The shape operator is ``A X = -(D_X xi)^T`` with the horizontal
projection standing in for the Levi-Civita connection of the quotient.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .space_forms import (
    ModelPoint,
    PreconditionError,
    SpaceForm,
    TangentVector,
    _form,
    align_phase,
    horizontal_part,
    normalize,
)

HOPF_TOL = 1e-6
ASYMMETRY_TOL = 1e-4
IMMERSION_TOL = 1e-6


class DegenerateChartError(ValueError):
    def __init__(self, sigma_min: float, where=None):
        self.sigma_min = sigma_min
        self.where = where
        super().__init__(f"chart is not an immersion here (smallest singular value {sigma_min:.3e})")


class NoisyDerivativeError(ValueError):
    def __init__(self, asymmetry: float):
        self.asymmetry = asymmetry
        super().__init__(
            f"shape operator asymmetry {asymmetry:.3e} exceeds {ASYMMETRY_TOL:g}; try another fd_step"
        )


@dataclass
class HypersurfacePatch:
    """A chart ``u -> z`` from a box in R^{2n-1} into the model.

    ``normal_hint(u)`` returns a vector in the same gauge as ``chart(u)``
    whose g-pairing with the "inward" normal is positive.  Without a hint
    the inward side is the one making ``(z, iz, d_1 z, ..., d_{2n-1} z, xi)``
    a positively oriented real frame.
    """

    space: SpaceForm
    chart: Callable[[np.ndarray], np.ndarray]
    domain_box: np.ndarray
    fd_step: float = 1e-4
    normal_orientation: str = "inward"
    normal_hint: Optional[Callable[[np.ndarray], np.ndarray]] = None
    richardson: bool = False
    name: str = ""

    def __post_init__(self):
        self.domain_box = np.asarray(self.domain_box, dtype=float)
        if self.domain_box.shape != (self.dim, 2):
            raise ValueError(f"domain_box must have shape ({self.dim}, 2)")
        if self.normal_orientation not in ("inward", "outward"):
            raise ValueError("normal_orientation must be 'inward' or 'outward'")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.space.n - 1

    @property
    def orientation_sign(self) -> float:
        return 1.0 if self.normal_orientation == "inward" else -1.0

    def flipped(self) -> "HypersurfacePatch":
        other = "outward" if self.normal_orientation == "inward" else "inward"
        return HypersurfacePatch(
            self.space, self.chart, self.domain_box, self.fd_step, other,
            self.normal_hint, self.richardson, self.name,
        )

    def with_step(self, h: float, richardson: Optional[bool] = None) -> "HypersurfacePatch":
        return HypersurfacePatch(
            self.space, self.chart, self.domain_box, h, self.normal_orientation,
            self.normal_hint, self.richardson if richardson is None else richardson, self.name,
        )

    def point(self, u) -> np.ndarray:
        return normalize(self.space, self.chart(np.asarray(u, dtype=float)))

    def sample_grid(self, counts, margin: Optional[float] = None) -> np.ndarray:
        """Tensor grid of parameter points, kept ``margin`` away from the box edges."""
        if margin is None:
            margin = 4 * self.fd_step
        counts = list(counts) if np.iterable(counts) else [int(counts)] * self.dim
        axes = []
        for (lo, hi), k in zip(self.domain_box, counts):
            lo, hi = lo + margin, hi - margin
            axes.append(np.array([(lo + hi) / 2]) if k == 1 else np.linspace(lo, hi, k))
        return np.array(list(itertools.product(*axes)))


@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal tangent frame and unit normal at a chart point.

    ``tangents`` rows are g-orthonormal horizontal representatives at
    ``coords``; ``raw_tangents = chol @ tangents`` are the coordinate
    derivatives of the chart.
    """

    space: SpaceForm
    coords: np.ndarray
    tangents: np.ndarray
    normal: np.ndarray
    raw_tangents: np.ndarray
    chol: np.ndarray

    @property
    def base(self) -> ModelPoint:
        return ModelPoint.from_coords(self.space, self.coords, gauged=False)

    @property
    def U(self) -> np.ndarray:
        return -1j * self.normal

    def g(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(_form(self.space.signature, a, b).real)

    def coordinates(self, w: np.ndarray) -> np.ndarray:
        """Components of a tangent representative in the orthonormal frame."""
        sig = self.space.signature
        return np.array([np.sum(sig * w * np.conj(e)).real for e in self.tangents])

    def tangent_vector(self, comps: np.ndarray) -> TangentVector:
        return TangentVector(self.base, np.asarray(comps) @ self.tangents)

    @property
    def normal_vector(self) -> TangentVector:
        return TangentVector(self.base, self.normal)

    def tangent_vectors(self) -> list:
        base = self.base
        return [TangentVector(base, e) for e in self.tangents]


def _real(vecs: np.ndarray) -> np.ndarray:
    vecs = np.atleast_2d(vecs)
    return np.concatenate([vecs.real, vecs.imag], axis=1)


def _aligned(space: SpaceForm, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    return w * align_phase(space, w, z)


def _raw_tangents(patch: HypersurfacePatch, u: np.ndarray, z: np.ndarray, h: float) -> np.ndarray:
    space = patch.space
    rows = []
    for i in range(patch.dim):
        du = np.zeros(patch.dim)
        du[i] = h
        zp = _aligned(space, patch.point(u + du), z)
        zm = _aligned(space, patch.point(u - du), z)
        rows.append(horizontal_part(space, z, (zp - zm) / (2 * h)))
    return np.array(rows)


def frame_at(patch: HypersurfacePatch, u, ref_coords: Optional[np.ndarray] = None) -> Frame:
    """Frame at parameter ``u``.

    With ``ref_coords`` the centre representative (and everything built on
    it) is first phase-aligned to that reference.
    """
    space = patch.space
    u = np.asarray(u, dtype=float)
    z = patch.point(u)
    lam = 1.0 + 0j
    if ref_coords is not None:
        lam = align_phase(space, z, ref_coords)
        z = z * lam
    h = patch.fd_step
    T = _raw_tangents(patch, u, z, h)
    if patch.richardson:
        T = (4.0 * _raw_tangents(patch, u, z, h / 2) - T) / 3.0

    sig = space.signature
    gram = np.array([[np.sum(sig * a * np.conj(b)).real for b in T] for a in T])
    evals = np.linalg.eigvalsh(gram)
    smin = float(np.sqrt(max(evals[0], 0.0)))
    if smin <= IMMERSION_TOL:
        raise DegenerateChartError(smin, u)
    L = np.linalg.cholesky(gram)
    E = np.linalg.solve(L, T)

    # normal: g-orthogonal to z, iz and all tangents
    constraints = _real(sig * np.vstack([z, 1j * z, E]))
    _, _, vt = np.linalg.svd(constraints)
    nr = vt[-1]
    xi = nr[: space.n + 1] + 1j * nr[space.n + 1:]
    xi = horizontal_part(space, z, xi)
    xi = xi / np.sqrt(np.sum(sig * xi * np.conj(xi)).real)

    if patch.normal_hint is not None:
        # the hint shares the chart's gauge
        ref = np.asarray(patch.normal_hint(u), dtype=complex) * lam
        side = np.sum(sig * xi * np.conj(ref)).real
    else:
        side = np.linalg.det(_real(np.vstack([z, 1j * z, T, xi])))
    if side < 0:
        xi = -xi
    xi = patch.orientation_sign * xi
    return Frame(space, z, E, xi, T, L)


def _normal_derivatives(patch: HypersurfacePatch, u: np.ndarray, frame: Frame) -> np.ndarray:
    space = patch.space
    h = patch.fd_step

    def diff(step):
        rows = []
        for i in range(patch.dim):
            du = np.zeros(patch.dim)
            du[i] = step
            fp = frame_at(patch, u + du, ref_coords=frame.coords)
            fm = frame_at(patch, u - du, ref_coords=frame.coords)
            rows.append(horizontal_part(space, frame.coords, (fp.normal - fm.normal) / (2 * step)))
        return np.array(rows)

    D = diff(h)
    if patch.richardson:
        D = (4.0 * diff(h / 2) - D) / 3.0
    return D


def _weingarten(frame: Frame, D: np.ndarray, check: bool = True) -> np.ndarray:
    sig = frame.space.signature
    W = -np.array([[np.sum(sig * d * np.conj(e)).real for e in frame.tangents] for d in D])
    A = np.linalg.solve(frame.chol, W)
    asym = float(np.linalg.norm(A - A.T, 2))
    if check and asym > ASYMMETRY_TOL:
        raise NoisyDerivativeError(asym)
    return (A + A.T) / 2


def shape_operator(patch: HypersurfacePatch, u, return_frame: bool = False, check: bool = True):
    """Symmetric matrix of the Weingarten map in the orthonormal frame at ``u``."""
    u = np.asarray(u, dtype=float)
    frame = frame_at(patch, u)
    D = _normal_derivatives(patch, u, frame)
    A = _weingarten(frame, D, check)
    if return_frame:
        return A, frame
    return A


def asymmetry(patch: HypersurfacePatch, u) -> float:
    u = np.asarray(u, dtype=float)
    frame = frame_at(patch, u)
    D = _normal_derivatives(patch, u, frame)
    sig = frame.space.signature
    W = -np.array([[np.sum(sig * d * np.conj(e)).real for e in frame.tangents] for d in D])
    A = np.linalg.solve(frame.chol, W)
    return float(np.linalg.norm(A - A.T, 2))


@dataclass(frozen=True, eq=False)
class ShapeSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, frame components
    mu: float
    hopf_defect: float
    mean_curvature: float
    matrix: np.ndarray
    frame: Frame
    u_components: np.ndarray

    @property
    def n(self) -> int:
        return self.frame.space.n

    @property
    def c(self) -> int:
        return self.frame.space.c

    def principal_vectors(self) -> list:
        return [self.frame.tangent_vector(v) for v in self.eigenvectors.T]

    def restricted_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of A on the g-orthogonal complement of U."""
        u = self.u_components / np.linalg.norm(self.u_components)
        q, _ = np.linalg.qr(np.column_stack([u, np.eye(len(u))]))
        Q = q[:, 1:]
        return np.linalg.eigvalsh(Q.T @ self.matrix @ Q)


def spectrum_from_matrix(A: np.ndarray, frame: Frame) -> ShapeSpectrum:
    w, V = np.linalg.eigh(A)
    u = frame.coordinates(frame.U)
    mu = float(u @ A @ u)
    defect = float(np.linalg.norm(A @ u - mu * u))
    H = float(np.trace(A) / A.shape[0])
    return ShapeSpectrum(w, V, mu, defect, H, A, frame, u)


def spectrum(patch: HypersurfacePatch, u) -> ShapeSpectrum:
    A, frame = shape_operator(patch, u, return_frame=True)
    return spectrum_from_matrix(A, frame)


@dataclass(frozen=True, eq=False)
class StructureTensors:
    phi: np.ndarray
    f_form: np.ndarray
    U: np.ndarray  # frame components

    def residuals(self, metric: Optional[np.ndarray] = None) -> dict:
        """Max violation of each algebraic identity over the frame basis."""
        phi, f, U = self.phi, self.f_form, self.U
        m = len(f)
        eye = np.eye(m)
        return {
            "phi_squared": float(np.max(np.abs(phi @ phi + eye - np.outer(U, f)))),
            "phi_U": float(np.max(np.abs(phi @ U))),
            "f_phi": float(np.max(np.abs(f @ phi))),
            "skew": float(np.max(np.abs(phi + phi.T))),
            "isometry": float(np.max(np.abs(phi.T @ phi - eye + np.outer(f, f)))),
        }


def structure_tensors(frame: Frame) -> StructureTensors:
    """Tangential part ``phi`` of J and the 1-form ``f`` with ``JX = phi X + f(X) xi``."""
    E = frame.tangents
    m = len(E)
    phi = np.empty((m, m))
    f = np.empty(m)
    for k in range(m):
        JE = 1j * E[k]
        phi[:, k] = frame.coordinates(JE)
        f[k] = frame.g(JE, frame.normal)
    U = frame.coordinates(frame.U)
    return StructureTensors(phi, f, U)


@dataclass
class HopfReport:
    max_defect: float
    mu_mean: float
    mu_std: float
    mu_max_deviation: float
    is_hopf: bool
    mus: np.ndarray
    defects: np.ndarray
    failures: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "max_defect": self.max_defect,
            "mu_mean": self.mu_mean,
            "mu_std": self.mu_std,
            "mu_max_deviation": self.mu_max_deviation,
            "is_hopf": self.is_hopf,
            "points": int(len(self.mus)),
            "failures": {str(k): v for k, v in sorted(self.failures.items())},
        }


def hopf_report(patch: HypersurfacePatch, sample_grid, tol: float = HOPF_TOL) -> HopfReport:
    mus, defects, failures = [], [], {}
    for idx, u in enumerate(np.atleast_2d(sample_grid)):
        try:
            sp = spectrum(patch, u)
        except (ValueError, np.linalg.LinAlgError) as exc:
            failures[idx] = str(exc)
            continue
        mus.append(sp.mu)
        defects.append(sp.hopf_defect)
    mus = np.array(mus)
    defects = np.array(defects)
    if len(mus) == 0:
        return HopfReport(np.inf, np.nan, np.nan, np.nan, False, mus, defects, failures)
    max_defect = float(defects.max())
    mean = float(mus.mean())
    return HopfReport(
        max_defect, mean, float(mus.std()), float(np.max(np.abs(mus - mean))),
        max_defect <= tol and not failures, mus, defects, failures,
    )


@dataclass
class HopfIdentityResiduals:
    identity_a_residual: float
    pairing_residual: Optional[float]
    pairs: list


def lemma4_residuals(patch: HypersurfacePatch, u, tol: float = HOPF_TOL, sp: Optional[ShapeSpectrum] = None):
    """Residuals of the Hopf identity ``-2c phi = mu(phi A + A phi) - 2 A phi A``
    and of the eigenvalue pairing ``alpha -> (mu alpha + 2c) / (2 alpha - mu)``.

    ``pairing_residual`` is ``None`` when every eigenvalue sits at the pole
    ``2 alpha = mu``.
    """
    if sp is None:
        sp = spectrum(patch, u)
    if sp.hopf_defect > tol:
        raise PreconditionError(f"not a Hopf point: defect {sp.hopf_defect:.3e} > {tol:g}")
    c = sp.c
    A, mu = sp.matrix, sp.mu
    phi = structure_tensors(sp.frame).phi
    R = -2 * c * phi - mu * (phi @ A + A @ phi) + 2 * A @ phi @ A
    ident = float(np.linalg.norm(R, 2))

    alphas = sp.restricted_eigenvalues()
    pairs = []
    worst = None
    for a in alphas:
        den = 2 * a - mu
        if abs(den) < 1e-8:
            pairs.append((float(a), None, None))
            continue
        partner = (mu * a + 2 * c) / den
        res = float(np.min(np.abs(alphas - partner)))
        pairs.append((float(a), float(partner), res))
        worst = res if worst is None else max(worst, res)
    return HopfIdentityResiduals(ident, worst, pairs)


@dataclass
class MiquelResult:
    lhs: float
    rhs: Optional[float]
    satisfied: Optional[bool]

    @property
    def applicable(self) -> bool:
        return self.rhs is not None


def arccot(x: float) -> float:
    """Inverse cotangent with values in (0, pi)."""
    return float(np.pi / 2 - np.arctan(x))


def miquel_check(sp: ShapeSpectrum, n: Optional[int] = None, tol: float = 1e-9) -> MiquelResult:
    """Compare mu with ``2 cot(2 arccot(((2n-1)H - mu)/(2n-2)))``."""
    if sp.c != 1:
        raise PreconditionError("the Miquel bound is stated for CP^n")
    n = sp.n if n is None else n
    return miquel_bound(sp.mu, sp.mean_curvature, n, tol)


def miquel_bound(mu: float, H: float, n: int, tol: float = 1e-9) -> MiquelResult:
    """The Miquel comparison from ``mu`` and the mean curvature ``H = tr A / (2n-1)``."""
    if n < 2:
        raise PreconditionError("the Miquel bound needs n >= 2")
    x = ((2 * n - 1) * H - mu) / (2 * n - 2)
    angle = 2 * arccot(x)
    s = np.sin(angle)
    if abs(s) < 1e-12:
        return MiquelResult(mu, None, None)
    rhs = float(2 * np.cos(angle) / s)
    return MiquelResult(mu, rhs, bool(mu >= rhs - tol))
