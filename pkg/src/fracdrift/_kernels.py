"""Hot inner loops, in a numba flavour and a plain numpy flavour.

The numba flavour is used when numba imports cleanly and the environment
variable ``FRACDRIFT_BACKEND`` is not set to ``numpy``.  Both flavours expose
the same three functions with the same signatures:

``covariance_fill(times, two_h, sigma2)``
    dense fBm covariance matrix on an increasing grid
``accurate_dot(x, y)``
    sum of ``x * y`` evaluated as if in twice the working precision, then
    rounded once (error-free product and sum transforms; exact only while
    products stay clear of the subnormal range and of overflow)
``renewal_terms(increments)``
    the (T, Q, U) fluctuation terms of the mean squared renewal time

The Cholesky factorisation itself always goes through LAPACK.
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant


# --------------------------------------------------------------------------
# numpy flavour
# --------------------------------------------------------------------------

def _np_covariance_fill(times, two_h, sigma2):
    p = times ** two_h
    d = np.abs(times[:, None] - times[None, :]) ** two_h
    return (0.5 * sigma2) * (p[:, None] + p[None, :] - d)


def _np_accurate_dot(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p = x * y
    cx, cy = _SPLIT * x, _SPLIT * y
    xh = cx - (cx - x)
    yh = cy - (cy - y)
    xl, yl = x - xh, y - yh
    err = xl * yl - (((p - xh * yh) - xl * yh) - xh * yl)  # p + err == x * y exactly
    return math.fsum(np.concatenate((p, err)))


def _np_renewal_terms(t):
    n = t.shape[0]
    nf = float(n)
    j = np.arange(1, n + 1, dtype=np.float64)
    w = nf - j + 1.0
    before = np.concatenate(([0.0], np.cumsum(t)[:-1]))
    x = t - 1.0 / nf
    centred_before = np.concatenate(([0.0], np.cumsum(x)[:-1]))

    t_term = np.sum(w * (t * t - 2.0 / nf**2)) / nf
    q_term = 2.0 / nf * np.sum(
        w * ((before + (j - 1.0) * t) / nf - 2.0 * (j - 1.0) / nf**2))
    u_term = 2.0 / nf * np.sum(w * x * centred_before)
    return float(t_term), float(q_term), float(u_term)


numpy_kernels = SimpleNamespace(
    name="numpy",
    covariance_fill=_np_covariance_fill,
    accurate_dot=_np_accurate_dot,
    renewal_terms=_np_renewal_terms,
)


# --------------------------------------------------------------------------
# numba flavour
# --------------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def covariance_fill(times, two_h, sigma2):
        n = times.shape[0]
        out = np.empty((n, n))
        half = 0.5 * sigma2
        p = np.empty(n)
        for i in range(n):
            p[i] = times[i] ** two_h
        for i in range(n):
            out[i, i] = half * (p[i] + p[i])
            for j in range(i):
                v = half * (p[i] + p[j] - (times[i] - times[j]) ** two_h)
                out[i, j] = v
                out[j, i] = v
        return out

    @njit(cache=True, nogil=True, inline="always")
    def two_prod(a, b):
        p = a * b
        ca = _SPLIT * a
        ah = ca - (ca - a)
        al = a - ah
        cb = _SPLIT * b
        bh = cb - (cb - b)
        bl = b - bh
        return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)

    @njit(cache=True, nogil=True)
    def accurate_dot(x, y):
        # compensated dot product (Ogita, Rump and Oishi's Dot2)
        s = 0.0
        c = 0.0
        for k in range(x.shape[0]):
            h, r = two_prod(x[k], y[k])
            t = s + h
            z = t - s
            c += ((s - (t - z)) + (h - z)) + r
            s = t
        return s + c

    @njit(cache=True, nogil=True)
    def renewal_terms(t):
        n = t.shape[0]
        nf = float(n)
        inv = 1.0 / nf
        second = 2.0 / (nf * nf)
        t_acc = 0.0
        q_acc = 0.0
        u_acc = 0.0
        before = 0.0
        centred_before = 0.0
        for k in range(n):
            jm1 = float(k)          # j - 1 for 1-based j
            w = nf - jm1            # N - j + 1
            tj = t[k]
            xj = tj - inv
            t_acc += w * (tj * tj - second)
            q_acc += w * ((before + jm1 * tj) * inv - 2.0 * jm1 * inv * inv)
            u_acc += w * xj * centred_before
            before += tj
            centred_before += xj
        return t_acc * inv, 2.0 * inv * q_acc, 2.0 * inv * u_acc

    return SimpleNamespace(
        name="numba",
        covariance_fill=covariance_fill,
        accurate_dot=accurate_dot,
        renewal_terms=renewal_terms,
    )


try:
    numba_kernels = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_kernels = None


def select_backend(name: str | None = None) -> SimpleNamespace:
    name = (name or os.environ.get("FRACDRIFT_BACKEND", "numba")).lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"FRACDRIFT_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and numba_kernels is not None:
        return numba_kernels
    return numpy_kernels


kernels = select_backend()
BACKEND = kernels.name
