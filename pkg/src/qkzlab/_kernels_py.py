"""Pure numpy fallback for the compiled kernels in ``_kernels.pyx``.

Both implementations compute the same quantities with the same node sets;
results agree to rounding.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 2048


def strip_weights(w1, w2, h, count):
    """Node weights P_k and the constant of :func:`strip_integral`.

    With t_k = (k + 1/2) h the strip integral is

        I(x) = sum_k P_k sinh(a t_k) - a * C,   a = w1 + w2 - 2x,

    where P_k = h / (2 t_k sinh(w1 t_k) sinh(w2 t_k)).  The singular part
    a / (2 w1 w2 t^2) of the integrand is traded for a c^2 / (2 w1 w2 sinh^2(c t)),
    c = max(w1, w2); the difference of the two integrates to -c.  The summand
    is then even, analytic in |Im t| < pi / c and exponentially decaying, so the
    midpoint rule converges geometrically in 1/h.
    """
    c = max(w1, w2)
    t = (np.arange(count) + 0.5) * h
    P = h / (2.0 * t * np.sinh(w1 * t) * np.sinh(w2 * t))
    Q = h * c * c / (2.0 * w1 * w2 * np.sinh(c * t) ** 2)
    return P, float(Q.sum() + c / (2.0 * w1 * w2))


def strip_integral(x, w, h, P, C):
    """Integral I(x) with log S2(x) = -I(x), valid for 0 < Re x < w, w = w1 + w2.

    Vectorised over ``x``; ``P`` and ``C`` come from :func:`strip_weights`.
    """
    x = np.ascontiguousarray(x, dtype=complex)
    flat = x.ravel()
    P = np.asarray(P, dtype=float)
    t = (np.arange(P.size) + 0.5) * h
    out = np.empty(flat.shape, dtype=complex)
    for lo in range(0, flat.size, _CHUNK):
        a = w - 2.0 * flat[lo:lo + _CHUNK]
        out[lo:lo + _CHUNK] = np.sinh(a[:, None] * t[None, :]) @ P - a * C
    return out.reshape(x.shape)


def q_series(x, w1, w2, c1, c2):
    """sum_k c2[k] e^{2 pi i (k+1) x / w2} + c1[k] e^{2 pi i (k+1) x / w1}."""
    x = np.ascontiguousarray(x, dtype=complex)
    flat = x.ravel()
    k = np.arange(1, len(c1) + 1, dtype=float)
    out = np.empty(flat.shape, dtype=complex)
    for lo in range(0, flat.size, _CHUNK):
        xs = flat[lo:lo + _CHUNK, None]
        out[lo:lo + _CHUNK] = (np.exp(2j * np.pi * xs * k / w2) @ c2
                               + np.exp(2j * np.pi * xs * k / w1) @ c1)
    return out.reshape(x.shape)


def log_2sin(z):
    """Branch of log(2 sin z) analytic in each open half plane, stable for large |Im z|."""
    z = np.asarray(z, dtype=complex)
    up = z.imag >= 0
    out = np.empty_like(z)
    zu = z[up]
    out[up] = 0.5j * np.pi - 1j * zu + np.log(-np.expm1(2j * zu))
    zd = z[~up]
    out[~up] = -0.5j * np.pi + 1j * zd + np.log(-np.expm1(-2j * zd))
    return out
