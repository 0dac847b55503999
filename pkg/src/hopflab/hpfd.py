"""Extended-precision finite-difference shape operator for charts into CP^n.

Same recipe as ``hypersurface.shape_operator`` (phase-aligned central
differences, Gram-Schmidt frame, difference quotient of the unit normal)
carried out in mpmath.  Needed near singular points of algebraic bases,
where the geometry lives at scales far below double-precision resolution
of a unit-size chart.  Raw tangents are rescaled to unit length before the
frame is built, which is a reparametrization and leaves A unchanged.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np


def _herm(a, b):
    return mp.fsum(x * mp.conj(y) for x, y in zip(a, b))


def _re(a, b):
    return mp.re(_herm(a, b))


def _axpy(alpha, x, y):
    return [alpha * xi + yi for xi, yi in zip(x, y)]


def _scale(alpha, x):
    return [alpha * xi for xi in x]


def _unit(z):
    return _scale(1 / mp.sqrt(_re(z, z)), z)


def _hproj(z, w):
    return _axpy(-_herm(w, z), z, w)


def _align(w, z):
    p = _herm(w, z)
    return _scale(mp.conj(p) / abs(p), w)


class _Frame:
    __slots__ = ("z", "E", "R", "norms", "xi")


def _frame(chart, u, h, ref=None, hint=None):
    z = _unit(chart(u))
    lam = mp.mpc(1)
    if ref is not None:
        p = _herm(z, ref)
        lam = mp.conj(p) / abs(p)
        z = _scale(lam, z)
    m = len(u)
    T, norms = [], []
    for i in range(m):
        up = list(u)
        um = list(u)
        up[i] += h
        um[i] -= h
        d = _axpy(-1, _align(_unit(chart(um)), z), _align(_unit(chart(up)), z))
        t = _hproj(z, _scale(1 / (2 * h), d))
        nt = mp.sqrt(_re(t, t))
        norms.append(nt)
        T.append(_scale(1 / nt, t))
    # Gram-Schmidt, T_i = sum_j R[i][j] E_j
    E = []
    R = [[mp.mpf(0)] * m for _ in range(m)]
    for i, t in enumerate(T):
        v = list(t)
        for j, e in enumerate(E):
            c = _re(t, e)
            R[i][j] = c
            v = _axpy(-c, e, v)
        nv = mp.sqrt(_re(v, v))
        R[i][i] = nv
        E.append(_scale(1 / nv, v))
    # unit normal: residual of a coordinate vector against z, iz and the frame
    iz = _scale(1j, z)
    best = None
    for k in range(len(z)):
        for s in (1, 1j):
            w = [mp.mpc(0)] * len(z)
            w[k] = mp.mpc(s)
            for b in [z, iz] + E:
                w = _axpy(-_re(w, b), b, w)
            nw = _re(w, w)
            if best is None or nw > best[0]:
                best = (nw, w)
    xi = _scale(1 / mp.sqrt(best[0]), best[1])
    if hint is not None:
        ref_n = _scale(lam, hint(u))
        if _re(xi, ref_n) < 0:
            xi = _scale(-1, xi)
    f = _Frame()
    f.z, f.E, f.R, f.norms, f.xi = z, E, R, norms, xi
    return f


def shape_operator_hp(chart, u, h=1e-12, dps=60, hint=None, return_u=False):
    """Weingarten matrix (frame basis, float64) of a chart into CP^n.

    ``chart`` takes a list of mpf parameters and returns a list of mpc
    homogeneous coordinates; ``hint(u)`` (same gauge) marks the side the
    normal should point to.  With ``return_u`` the frame components of the
    structure vector ``U = -J xi`` are returned as well.
    """
    with mp.workdps(dps):
        u = [mp.mpf(x) for x in u]
        h = mp.mpf(h)
        c = _frame(chart, u, h, hint=hint)
        m = len(u)
        W = []
        for i in range(m):
            up = list(u)
            um = list(u)
            up[i] += h
            um[i] -= h
            fp = _frame(chart, up, h, ref=c.z, hint=hint)
            fm = _frame(chart, um, h, ref=c.z, hint=hint)
            d = _hproj(c.z, _scale(1 / (2 * h), _axpy(-1, fm.xi, fp.xi)))
            # same rescaling as the tangent T_i
            W.append([-_re(d, e) / c.norms[i] for e in c.E])
        Rm = mp.matrix(c.R)
        A = mp.inverse(Rm) * mp.matrix(W)
        A = np.array(A.tolist(), dtype=float)
        U = _scale(-1j, c.xi)
        ucomp = np.array([float(_re(U, e)) for e in c.E])
    A = (A + A.T) / 2
    return (A, ucomp) if return_u else A
