"""Double sine function S2(x | w1, w2) for real positive periods, and the kernel factors.

Normalisation: S2 has zeros on w1*Z<=0 + w2*Z<=0, poles on w1*Z>=1 + w2*Z>=1,

    S2(x + w1) / S2(x) = 1 / (2 sin(pi x / w2)),      S2(x) ~ 2 pi x / sqrt(w1 w2)  (x -> 0),

and S2(x) S2(w1 + w2 - x) = 1.

Evaluation strategy
-------------------
* ``|Im x| >= y_switch``: the exponentially convergent expansion

      log S2(x) = pi i B(x) + sum_k (1/k) [e^{2 pi i k x/w2} / (e^{2 pi i k w1/w2} - 1)
                                        + e^{2 pi i k x/w1} / (e^{2 pi i k w2/w1} - 1)],

  with B the quadratic asymptote (see :func:`s2_asymptotic`), for Im x > 0 and
  its complex conjugate for Im x < 0 (real periods).
* otherwise: shift reduction by the smaller period into the strip centred on
  (w1 + w2)/2, then ``log S2 = -I`` with I the Malmsten-type integral computed
  by the kernel in :mod:`qkzlab._backend`.

The logarithm returned is analytic inside each of the two regimes; only
``exp(log_s2)`` is meaningful across them.  Every downstream quantity uses
integer powers of S2, so the branch never leaks into a result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from ._backend import kernels
from .errors import NonconvergentReduction, PoleProximity
from .params import check_irrational_ratio

__all__ = [
    "Periods", "log_s2", "log_s2_array", "s2", "s2_array", "phi", "psi", "log_phi", "log_psi",
    "h_closed", "log_h_closed", "s2_asymptotic", "log_s2_mp", "s2_table",
]

POLE_RTOL = 1e-12
MAX_SHIFTS = 10_000


@dataclass(frozen=True)
class Periods:
    omega1: float
    omega2: float

    def __post_init__(self):
        check_irrational_ratio(self.omega1, self.omega2)

    @property
    def total(self) -> float:
        return self.omega1 + self.omega2


class _Engine:
    """Precomputed nodes and series coefficients for one period pair."""

    def __init__(self, w1: float, w2: float):
        self.w1, self.w2 = float(w1), float(w2)
        self.w = self.w1 + self.w2
        self.p = min(self.w1, self.w2)  # reduction step
        self.q = max(self.w1, self.w2)
        self.y_switch = 0.4 * self.q
        self.tol = POLE_RTOL * self.w
        # strip integral: after reduction |Re(w - 2x)| <= p, the summand decays like
        # e^{-q t}; the step keeps the midpoint-rule error near 1e-17 for
        # |Im x| < y_switch (the summand grows at most like e^{2 pi y_switch / q}
        # inside its strip of analyticity |Im t| < pi/q)
        self.tmax = 41.5 / self.q
        self.h = 2 * math.pi * 0.95 * math.pi / (self.q * (41.0 + 2 * math.pi * self.y_switch / self.q))
        count = math.ceil(self.tmax / self.h)
        self.P, self.C = kernels.strip_weights(self.w1, self.w2, self.h, count)
        # series: enough terms for 1e-18 at |Im x| = y_switch
        k = np.arange(1, 200)
        c2 = 1.0 / np.expm1(2j * np.pi * k * self.w1 / self.w2)
        c1 = 1.0 / np.expm1(2j * np.pi * k * self.w2 / self.w1)
        big = max(np.abs(c1).max(), np.abs(c2).max(), 1.0)
        kmax = math.ceil((18 * math.log(10) + math.log(big)) * self.q / (2 * math.pi * self.y_switch))
        kmax = max(4, min(kmax, 199))
        self.k = k[:kmax].astype(float)
        self.c1 = c1[:kmax] / self.k
        self.c2 = c2[:kmax] / self.k

    # -- regimes -------------------------------------------------------
    def quad_asym(self, x):
        w1, w2 = self.w1, self.w2
        return 1j * np.pi * (x * x / (2 * w1 * w2) - self.w * x / (2 * w1 * w2)
                             + (w1 / w2 + w2 / w1 + 3.0) / 12.0)

    def series_upper(self, x):
        """log S2 for Im x >= y_switch."""
        x = np.asarray(x, dtype=complex)
        return self.quad_asym(x) + kernels.q_series(x, self.w1, self.w2, self.c1, self.c2)

    def strip(self, x):
        """log S2 for |Im x| < y_switch, arbitrary real part (poles excluded by caller)."""
        x = np.asarray(x, dtype=complex)
        c = 0.5 * self.w
        m = np.rint((c - x.real) / self.p).astype(np.int64)
        if m.size and np.abs(m).max() > MAX_SHIFTS:
            raise NonconvergentReduction(
                f"shift reduction needs {int(np.abs(m).max())} steps (limit {MAX_SHIFTS})")
        xr = x + m * self.p
        val = -kernels.strip_integral(xr, self.w, self.h, self.P, self.C)
        # Kahan-compensated accumulation of the shift factors
        acc = np.zeros_like(x)
        comp = np.zeros_like(x)
        mmax = int(np.abs(m).max()) if m.size else 0
        for i in range(mmax):
            up = m > i
            dn = (-m) > i
            term = np.zeros_like(x)
            if up.any():
                term[up] = kernels.log_2sin(np.pi * (x[up] + i * self.p) / self.q)
            if dn.any():
                term[dn] = -kernels.log_2sin(np.pi * (x[dn] - (i + 1) * self.p) / self.q)
            yk = term - comp
            tk = acc + yk
            comp = (tk - acc) - yk
            acc = tk
        return val + acc

    def lattice_hits(self, x):
        """Masks (near_zero, near_pole) for the zero and pole lattices."""
        x = np.asarray(x, dtype=complex)
        zero = np.zeros(x.shape, dtype=bool)
        pole = np.zeros(x.shape, dtype=bool)
        cand = np.abs(x.imag) <= self.tol
        if not cand.any():
            return zero, pole
        for idx in np.flatnonzero(cand):
            r = x.real.flat[idx]
            if r <= self.tol:
                zero.flat[idx] = _near_lattice(-r, self.w1, self.w2, 0, self.tol)
            if r >= self.w - self.tol:
                pole.flat[idx] = _near_lattice(r, self.w1, self.w2, 1, self.tol)
        return zero, pole


def _near_lattice(y: float, w1: float, w2: float, start: int, tol: float) -> bool:
    """Is y within tol of i*w1 + j*w2 for some integers i, j >= start?"""
    imax = int((y + tol) / w1) + 1
    for i in range(start, imax + 1):
        rest = y - i * w1
        j = max(start, round(rest / w2))
        if abs(rest - j * w2) <= tol:
            return True
    return False


@lru_cache(maxsize=64)
def _engine(w1: float, w2: float) -> _Engine:
    # symmetric in the periods: canonical order keeps results bitwise symmetric
    a, b = sorted((float(w1), float(w2)))
    return _Engine(a, b)


def log_s2_array(x, w1: float, w2: float, *, on_zero: str = "neg_inf") -> np.ndarray:
    """Vectorised log S2 (see module docstring for the branch).

    Points within tolerance of the pole lattice raise :class:`PoleProximity`.
    Zeros give ``-inf`` (``on_zero="neg_inf"``) or raise (``on_zero="raise"``).
    """
    eng = _engine(w1, w2)
    x = np.asarray(x, dtype=complex)
    flat = x.ravel()
    out = np.empty(flat.shape, dtype=complex)
    zero, pole = eng.lattice_hits(flat)
    if pole.any():
        raise PoleProximity(f"S2 pole at x={flat[pole][0]!r} (periods {w1}, {w2})")
    if zero.any() and on_zero == "raise":
        raise PoleProximity(f"S2 zero at x={flat[zero][0]!r} (periods {w1}, {w2})")
    ok = ~zero
    im = flat.imag
    hi = ok & (im >= eng.y_switch)
    lo = ok & (im <= -eng.y_switch)
    mid = ok & ~hi & ~lo
    if hi.any():
        out[hi] = eng.series_upper(flat[hi])
    if lo.any():
        out[lo] = np.conj(eng.series_upper(np.conj(flat[lo])))
    if mid.any():
        out[mid] = eng.strip(flat[mid])
    out[zero] = complex(-np.inf, 0.0)
    return out.reshape(x.shape)


def log_s2(x, p: Periods) -> complex:
    """log S2(x | p) for a single point; ``-inf`` at lattice zeros."""
    return complex(log_s2_array(np.array([complex(x)]), p.omega1, p.omega2)[0])


def s2_array(x, w1: float, w2: float) -> np.ndarray:
    return np.exp(log_s2_array(x, w1, w2))


def s2(x, p: Periods) -> complex:
    return complex(np.exp(log_s2(x, p)))


# -- kernel factors ------------------------------------------------------

def log_phi(x, n: int, rho: float, lam: float) -> np.ndarray:
    """log of phi(x) = 1/(S2(ix - pi/n) S2(-ix - pi/n)), vectorised."""
    x = np.asarray(x, dtype=complex)
    a = np.pi / n
    args = np.stack([1j * x - a, -1j * x - a])
    try:
        ls = log_s2_array(args, rho, lam, on_zero="raise")
    except PoleProximity as exc:
        raise PoleProximity(f"phi pole near {x!r}: {exc}") from None
    return -(ls[0] + ls[1])


def log_psi(x, n: int, rho: float, lam: float) -> np.ndarray:
    """log of psi(x) = 1/(S2(ix + 2pi/n) S2(-ix + 2pi/n)), vectorised."""
    x = np.asarray(x, dtype=complex)
    a = 2 * np.pi / n
    args = np.stack([1j * x + a, -1j * x + a])
    try:
        ls = log_s2_array(args, rho, lam, on_zero="raise")
    except PoleProximity as exc:
        raise PoleProximity(f"psi pole near {x!r}: {exc}") from None
    return -(ls[0] + ls[1])


def phi(x, n: int, p: Periods) -> complex:
    return complex(np.exp(log_phi(np.array([complex(x)]), n, p.omega1, p.omega2)[0]))


def psi(x, n: int, p: Periods) -> complex:
    return complex(np.exp(log_psi(np.array([complex(x)]), n, p.omega1, p.omega2)[0]))


def log_h_closed(x, n: int, rho: float, lam: float) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    half = 0.5 * (rho + lam)
    a = np.pi / n
    c = 0.5 * math.log(rho * lam) - log_s2_array(np.array([-2 * a + 0j]), rho, lam,
                                                   on_zero="raise")[0]
    ls = log_s2_array(np.stack([x + half - a, x + half + a]), rho, lam, on_zero="raise")
    return c + ls[0] - ls[1]


def h_closed(x, n: int, p: Periods) -> complex:
    """Closed form of the one-point integral H(x)."""
    return complex(np.exp(log_h_closed(np.array([complex(x)]), n, p.omega1, p.omega2)[0]))


def s2_asymptotic(x, sign: int, p: Periods) -> complex:
    """Quadratic asymptote of log S2 for Im x -> +inf (sign=+1) or -inf (sign=-1).

    The constant term enters with a plus sign, which is what the shift
    relations and the x -> 0 normalisation force.
    """
    w1, w2 = p.omega1, p.omega2
    x = complex(x)
    q = x * x / (2 * w1 * w2) - (w1 + w2) * x / (2 * w1 * w2) + (w1 / w2 + w2 / w1 + 3.0) / 12.0
    return sign * 1j * math.pi * q


# -- high precision oracle ------------------------------------------------

def log_s2_mp(x, w1, w2, dps: int = 30, panels: int = 48, degree: int = 6):
    """High-precision log S2 via shift reduction and Gauss-Legendre on the strip integral.

    Only used to produce reference values.  ``panels``/``degree`` set the
    resolution so independent resolutions can be compared.
    """
    with mpmath.workdps(dps + 15):
        w1 = mpmath.mpf(w1)
        w2 = mpmath.mpf(w2)
        x = mpmath.mpc(x)
        p, q = (w1, w2) if w1 <= w2 else (w2, w1)
        w = w1 + w2
        m = int(mpmath.nint((w / 2 - x.real) / p))
        acc = mpmath.mpc(0)
        if m > 0:
            for i in range(m):
                acc += mpmath.log(2 * mpmath.sin(mpmath.pi * (x + i * p) / q))
        else:
            for i in range(1, -m + 1):
                acc -= mpmath.log(2 * mpmath.sin(mpmath.pi * (x - i * p) / q))
        xr = x + m * p
        a = w - 2 * xr
        tmax = mpmath.mpf(dps + 20) * mpmath.log(10) / (w - abs(a.real))

        def f(t):
            return (mpmath.sinh(a * t) / (2 * mpmath.sinh(w1 * t) * mpmath.sinh(w2 * t))
                    - a / (2 * w1 * w2 * t)) / t

        edges = [tmax * k / panels for k in range(panels + 1)]
        integral = mpmath.quad(f, edges, method="gauss-legendre", maxdegree=degree)
        val = acc - integral + a / (2 * w1 * w2 * tmax)
    return +val


def s2_table(xs, p: Periods):
    """Rows (x_re, x_im, s2_re, s2_im) for the ``s2-table`` CLI."""
    vals = s2_array(np.asarray(xs, dtype=complex), p.omega1, p.omega2)
    return [(complex(x).real, complex(x).imag, v.real, v.imag) for x, v in zip(xs, vals)]
