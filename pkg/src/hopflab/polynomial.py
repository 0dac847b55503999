"""Homogeneous polynomials on C^{n+1} and their plain-text format.

The text format has one monomial per line::

    # comment
    <re> <im> : e0 e1 ... en

Blank lines and ``#`` comments are ignored.  Homogeneity is checked on load.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np


class PolynomialFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class SingularPointError(ValueError):
    pass


class OffVarietyError(ValueError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"point is not on the variety (relative residual {residual:.3e})")


@dataclass(frozen=True, eq=False)
class AlgebraicHypersurface:
    exponents: np.ndarray  # (m, n+1) nonnegative integers
    coefficients: np.ndarray  # (m,) complex
    name: str = ""

    def __post_init__(self):
        e = np.atleast_2d(np.asarray(self.exponents, dtype=int))
        c = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if e.shape[0] != c.shape[0] or e.shape[0] == 0:
            raise ValueError("need one coefficient per monomial and at least one monomial")
        if np.any(e < 0):
            raise ValueError("exponents must be nonnegative")
        degrees = e.sum(axis=1)
        if np.any(degrees != degrees[0]):
            raise ValueError(f"polynomial is not homogeneous (degrees {sorted(set(degrees.tolist()))})")
        object.__setattr__(self, "exponents", e)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_monomials(cls, monomials: Iterable, name: str = "") -> "AlgebraicHypersurface":
        monomials = list(monomials)
        return cls(np.array([m[0] for m in monomials]), np.array([m[1] for m in monomials]), name)

    @property
    def degree(self) -> int:
        return int(self.exponents[0].sum())

    @property
    def nvars(self) -> int:
        return self.exponents.shape[1]

    @property
    def monomials(self) -> list:
        return [(tuple(int(k) for k in e), complex(c)) for e, c in zip(self.exponents, self.coefficients)]

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        return complex(np.sum(self.coefficients * np.prod(z ** self.exponents, axis=1)))

    def gradient(self, z) -> np.ndarray:
        """Holomorphic gradient (df/dz_0, ..., df/dz_n)."""
        z = np.asarray(z, dtype=complex)
        e, c = self.exponents, self.coefficients
        g = np.zeros(self.nvars, dtype=complex)
        for j in range(self.nvars):
            ej = e[:, j]
            mask = ej > 0
            if not np.any(mask):
                continue
            ee = e[mask].copy()
            ee[:, j] -= 1
            g[j] = np.sum(c[mask] * ej[mask] * np.prod(z ** ee, axis=1))
        return g

    def hessian(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        e, c = self.exponents, self.coefficients
        m = self.nvars
        H = np.zeros((m, m), dtype=complex)
        for j in range(m):
            for k in range(j, m):
                ee = e.copy()
                coef = c * ee[:, j]
                ee[:, j] -= 1
                coef = coef * ee[:, k]
                ee[:, k] -= 1
                mask = coef != 0
                if np.any(mask):
                    H[j, k] = H[k, j] = np.sum(coef[mask] * np.prod(z ** ee[mask], axis=1))
        return H

    def scale(self, z) -> float:
        """Size of f near ``z``: sum of |coefficient| times |z|^d."""
        return float(np.sum(np.abs(self.coefficients)) * np.linalg.norm(z) ** self.degree)

    def euler_residual(self, z) -> float:
        z = np.asarray(z, dtype=complex)
        lhs = np.sum(z * self.gradient(z))
        rhs = self.degree * self(z)
        return float(abs(lhs - rhs) / max(self.scale(z), 1e-300))

    def is_smooth_at(self, z, threshold: float = 1e-8) -> bool:
        z = np.asarray(z, dtype=complex)
        nz = np.linalg.norm(z)
        return bool(np.linalg.norm(self.gradient(z)) > threshold * nz ** (self.degree - 1))

    # mpmath variants, used by the extended-precision probes
    def evaluate_mp(self, z):
        import mpmath as mp

        return mp.fsum(
            mp.mpc(complex(c)) * mp.fprod(zi ** int(k) for zi, k in zip(z, e))
            for e, c in zip(self.exponents, self.coefficients)
        )

    def gradient_mp(self, z):
        import mpmath as mp

        out = []
        for j in range(self.nvars):
            terms = []
            for e, c in zip(self.exponents, self.coefficients):
                if e[j] == 0:
                    continue
                ee = [int(k) for k in e]
                ee[j] -= 1
                terms.append(mp.mpc(complex(c)) * e[j] * mp.fprod(zi ** k for zi, k in zip(z, ee)))
            out.append(mp.fsum(terms) if terms else mp.mpc(0))
        return out

    def univariate(self, z, k: int) -> list:
        """Coefficients (highest degree first) of f as a polynomial in z_k, others fixed."""
        import mpmath as mp

        deg = int(self.exponents[:, k].max())
        coeffs = [mp.mpc(0)] * (deg + 1)
        for e, c in zip(self.exponents, self.coefficients):
            rest = mp.fprod(zi ** int(p) for j, (zi, p) in enumerate(zip(z, e)) if j != k)
            coeffs[deg - int(e[k])] += mp.mpc(complex(c)) * rest
        return coeffs

    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"# {self.name}")
        for e, c in zip(self.exponents, self.coefficients):
            lines.append(f"{float(c.real)!r} {float(c.imag)!r} : " + " ".join(str(int(k)) for k in e))
        return "\n".join(lines) + "\n"


def parse_polynomial(text: str, name: str = "") -> AlgebraicHypersurface:
    exps, coefs = [], []
    nvars = None
    degree = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise PolynomialFormatError("expected '<re> <im> : e0 ... en'", lineno)
        left, right = line.split(":", 1)
        parts = left.split()
        if len(parts) != 2:
            raise PolynomialFormatError("coefficient must be two reals '<re> <im>'", lineno)
        try:
            coef = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise PolynomialFormatError(f"bad coefficient {left.strip()!r}", lineno) from None
        try:
            e = [int(tok) for tok in right.split()]
        except ValueError:
            raise PolynomialFormatError(f"bad exponent list {right.strip()!r}", lineno) from None
        if not e or any(k < 0 for k in e):
            raise PolynomialFormatError("exponents must be nonnegative integers", lineno)
        if nvars is None:
            nvars, degree = len(e), sum(e)
        elif len(e) != nvars:
            raise PolynomialFormatError(f"expected {nvars} exponents, got {len(e)}", lineno)
        elif sum(e) != degree:
            raise PolynomialFormatError(
                f"monomial of degree {sum(e)} in a polynomial of degree {degree} (not homogeneous)",
                lineno,
            )
        exps.append(e)
        coefs.append(coef)
    if not exps:
        raise PolynomialFormatError("no monomials found")
    return AlgebraicHypersurface(np.array(exps), np.array(coefs), name)


def load_polynomial(path) -> AlgebraicHypersurface:
    path = Path(path)
    return parse_polynomial(path.read_text(), name=path.stem)


def linear_form(nvars: int, index: int) -> AlgebraicHypersurface:
    e = np.zeros((1, nvars), dtype=int)
    e[0, index] = 1
    return AlgebraicHypersurface(e, np.array([1.0 + 0j]), f"z{index}")


def fermat_quadric(nvars: int) -> AlgebraicHypersurface:
    return AlgebraicHypersurface(2 * np.eye(nvars, dtype=int), np.ones(nvars, dtype=complex), "quadric")


def singular_sextic() -> AlgebraicHypersurface:
    """x0^6 x3^2 + x1^3 x2^5 on C^4, singular at [1:0:0:0]."""
    return AlgebraicHypersurface(
        np.array([[6, 0, 0, 2], [0, 3, 5, 0]]), np.array([1.0 + 0j, 1.0 + 0j]), "sextic"
    )
