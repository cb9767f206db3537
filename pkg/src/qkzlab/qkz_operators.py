"""R-matrices, qKZ operators on a weight subspace, and the closed-form determinant data.

Matrix convention: ``R[j*n + k, l*n + m]`` is the coefficient of
v_j (x) v_k in R(v_l (x) v_m).  Rows are outputs, columns inputs.

Orientation ``"rho"`` builds K^(rho) (R-matrices with period rho, shifts by
lam*i, twist D(-mu/rho)); ``"lam"`` builds the mirror operator with the two
periods exchanged.

Every closed form is assembled in log space from :func:`log_s2_array` and
exponentiated once at the end.  Integer exponents make the result
independent of the branch picked for each individual log.
"""
from __future__ import annotations

import cmath
import math
from functools import reduce

import numpy as np

from .combinatorics import (JTuple, NuVector, enumerate_z, lambda_invariants, mu_tilde,
                            reduced_multinomials)
from .errors import DegenerateSpectral, ShapeMismatch
from .params import Params
from .special_functions import log_s2_array

__all__ = [
    "r_matrix", "k_operator", "k_operator_full", "det_k_closed", "log_det_k_closed",
    "e_function", "log_e_function", "rhs_theorem", "log_rhs_theorem", "c_constant",
    "log_c_constant", "g_k_closed", "log_g_k_closed", "weight_basis",
]

_SH_ZERO = 1e-13


def _periods(params: Params, orientation: str) -> tuple[float, float]:
    """(period of the R-matrices, period of the shift) for an orientation."""
    s = params.step(orientation)
    return s, params.other_step(orientation)


def r_matrix(beta: complex, step: float, n: int) -> np.ndarray:
    """The n^2 x n^2 R-matrix with period ``step`` at spectral value ``beta``."""
    c = math.pi / step
    den = cmath.sinh(c * (beta - 2j * math.pi / n))
    if abs(den) < _SH_ZERO:
        raise DegenerateSpectral(f"R-matrix denominator vanishes at beta={beta!r} (period {step})")
    diag = cmath.sinh(c * beta) / den
    swap = cmath.sinh(2j * math.pi ** 2 / (step * n)) / den
    up = -cmath.exp(c * beta) * swap      # v_j v_k -> v_k v_j, j < k
    down = -cmath.exp(-c * beta) * swap   # v_k v_j -> v_j v_k, j < k
    R = np.zeros((n * n, n * n), dtype=complex)
    for j in range(n):
        R[j * n + j, j * n + j] = 1.0
        for k in range(n):
            if j == k:
                continue
            R[j * n + k, j * n + k] = diag
            if j < k:
                R[k * n + j, j * n + k] = up
                R[j * n + k, k * n + j] = down
    return R


def _two_site(R: np.ndarray, a: int, b: int, N: int, n: int) -> np.ndarray:
    """Embed R acting on tensor factors (a, b) (0-based) into End(V^{(x)N})."""
    T = R.reshape(n, n, n, n)  # out_a, out_b, in_a, in_b
    dim = n ** N
    eye = np.eye(dim, dtype=complex).reshape((n,) * N + (dim,))
    moved = np.moveaxis(eye, (a, b), (0, 1))
    out = np.einsum("ijkl,kl...->ij...", T, moved)
    return np.moveaxis(out, (0, 1), (a, b)).reshape(dim, dim)


def _one_site(diag, a: int, N: int, n: int) -> np.ndarray:
    d = np.ones(n ** N, dtype=complex).reshape((n,) * N)
    shape = [1] * N
    shape[a] = n
    d = d * np.asarray(diag, dtype=complex).reshape(shape)
    return np.diag(d.ravel())


def k_operator_full(m: int, params: Params, orientation: str = "rho") -> np.ndarray:
    """K_m on the whole tensor power, sites 1-based."""
    n, N = params.n, params.N
    if not 1 <= m <= N:
        raise ShapeMismatch(f"site m={m} outside 1..{N}")
    s, t = _periods(params, orientation)
    b = params.beta
    left = [_two_site(r_matrix(b[m - 1] - b[mp - 1] - 1j * t, s, n), m - 1, mp - 1, N, n)
            for mp in range(m - 1, 0, -1)]
    twist = _one_site([cmath.exp(-2j * math.pi * mu / s) for mu in params.mu], m - 1, N, n)
    right = [_two_site(r_matrix(b[m - 1] - b[mp - 1], s, n), m - 1, mp - 1, N, n)
             for mp in range(N, m, -1)]
    eye = np.eye(n ** N, dtype=complex)
    return reduce(np.matmul, left + [twist] + right, eye)


def weight_basis(nu: NuVector) -> list[int]:
    """Flat tensor indices of v_J for J in Z_nu, canonical order."""
    n = nu.n
    return [int(np.ravel_multi_index(J.entries, (n,) * nu.N)) for J in enumerate_z(nu)]


def k_operator(m: int, params: Params, nu: NuVector, orientation: str = "rho",
               *, check_block: bool = True) -> np.ndarray:
    """K_m restricted to the weight subspace spanned by v_J, J in Z_nu."""
    if nu.N != params.N or nu.n != params.n:
        raise ShapeMismatch(f"nu {nu.full} does not fit n={params.n}, N={params.N}")
    full = k_operator_full(m, params, orientation)
    idx = weight_basis(nu)
    block = full[np.ix_(idx, idx)]
    if check_block:
        rest = np.setdiff1d(np.arange(full.shape[0]), idx)
        leak = np.abs(full[np.ix_(rest, idx)]).max() if rest.size else 0.0
        if leak > 1e-14 * max(1.0, np.abs(block).max()):
            raise ShapeMismatch(f"K_{m} leaks out of the weight subspace ({leak:.3e})")
    return block


def _sh(z: complex) -> complex:
    return cmath.sinh(z)


def log_det_k_closed(m: int, params: Params, lambdas, orientation: str = "rho") -> complex:
    n, N = params.n, params.N
    s, t = _periods(params, orientation)
    inv = lambda_invariants(lambdas)
    red = reduced_multinomials(lambdas)
    c = math.pi / s
    a = 2j * math.pi / n
    out = -2j * math.pi / s * sum(r * mu for r, mu in zip(red, params.mu))
    b = params.beta
    acc = 0j
    for mp in range(1, N + 1):
        if mp == m:
            continue
        x = b[m - 1] - b[mp - 1] - (1j * t if mp < m else 0.0)
        num, den = _sh(c * (x + a)), _sh(c * (x - a))
        if abs(den) < _SH_ZERO or abs(num) < _SH_ZERO:
            raise DegenerateSpectral(f"closed determinant degenerate at beta_{m}-beta_{mp}")
        acc += cmath.log(num) - cmath.log(den)
    return out + inv.lambda2 * acc


def det_k_closed(m: int, params: Params, lambdas, orientation: str = "rho") -> complex:
    """Closed form of det K_m on the weight subspace with weights ``lambdas``."""
    return cmath.exp(log_det_k_closed(m, params, lambdas, orientation))


# -- double sine closed forms ----------------------------------------------

def _ls2(args, params: Params) -> np.ndarray:
    return log_s2_array(np.asarray(args, dtype=complex), params.rho, params.lam, on_zero="raise")


def log_e_function(params: Params, lambdas) -> complex:
    n, N = params.n, params.N
    inv = lambda_invariants(lambdas)
    red = reduced_multinomials(lambdas)
    b = params.beta
    out = params.kappa * sum(r * mu for r, mu in zip(red, params.mu)) * sum(b)
    if inv.lambda2 and N > 1:
        pairs = [(r, s) for r in range(N) for s in range(r + 1, N)]
        x = np.array([1j * (b[r] - b[s]) for r, s in pairs])
        a = 2 * math.pi / n
        ls = _ls2(np.concatenate([x + a, x - a]), params)
        out += inv.lambda2 * (ls[:len(pairs)].sum() - ls[len(pairs):].sum())
    return complex(out)


def e_function(params: Params, lambdas) -> complex:
    """The beta-dependent factor E of the determinant."""
    return cmath.exp(log_e_function(params, lambdas))


def _log_norm(params: Params) -> complex:
    """log of sqrt(rho*lam) / S2(-2pi/n)."""
    return 0.5 * math.log(params.rho * params.lam) - complex(_ls2([-2 * math.pi / params.n], params)[0])


def log_g_k_closed(mu_seq, k: int, params: Params) -> complex:
    if k == 0:
        return 0j
    n = params.n
    w2 = 0.5 * (params.rho + params.lam)
    d = np.array([mu_seq[k] - mu_seq[j] + w2 for j in range(k)], dtype=complex)
    a = math.pi / n
    ls = _ls2(np.concatenate([d - a, d + a]), params)
    return k * _log_norm(params) + complex(ls[:k].sum() - ls[k:].sum())


def g_k_closed(mu_seq, k: int, params: Params) -> complex:
    """One-point function G_k in closed form (product of k closed-form H values)."""
    return cmath.exp(log_g_k_closed(mu_seq, k, params))


def _phase_and_power(params: Params, lambdas) -> complex:
    inv = lambda_invariants(lambdas)
    N = params.N
    return (-inv.d * inv.lambda0 * math.log(2.0)
            + (N * N - N - 2) * (1 / params.rho + 1 / params.lam) * (math.pi ** 2 * 1j / params.n)
            * inv.lambda2)


def log_c_constant(params: Params, lambdas) -> complex:
    nu = NuVector.from_lambdas(lambdas)
    if nu.n != params.n or nu.N != params.N:
        raise ShapeMismatch(f"weights {tuple(lambdas)} do not fit n={params.n}, N={params.N}")
    out = _phase_and_power(params, lambdas)
    for J in enumerate_z(nu):
        for r in range(1, params.N + 1):
            mt = mu_tilde(J, r, params.mu, params.rho, params.lam)
            out += log_g_k_closed(mt, J[r - 1], params)
    return complex(out)


def c_constant(params: Params, lambdas) -> complex:
    """The beta-independent constant in D = c * E, as a product over Z of one-point functions."""
    return cmath.exp(log_c_constant(params, lambdas))


def log_rhs_theorem(params: Params, lambdas) -> complex:
    lam = list(lambdas)
    n = params.n
    if len(lam) != n or sum(lam) != params.N:
        raise ShapeMismatch(f"weights {tuple(lam)} do not fit n={n}, N={params.N}")
    inv = lambda_invariants(lam)
    out = _phase_and_power(params, lam)
    out += inv.lambda0 * sum(j * lj for j, lj in enumerate(lam)) * _log_norm(params)
    for r in range(2, n + 1):
        for rp in range(1, r):
            lr, lrp = lam[r - 1], lam[rp - 1]
            if lr == 0:
                continue
            tot = lr + lrp
            outer, rem = divmod(inv.lambda0, math.comb(tot, lr))
            assert rem == 0
            delta = params.mu[r - 1] - params.mu[rp - 1]
            amax = min(lr - 1, lrp)
            shifts = np.array([math.pi / n * (tot - 2 * a) for a in range(amax + 1)])
            ls = _ls2(np.concatenate([delta - shifts, delta + shifts]), params)
            expo = np.array([math.comb(tot, a) for a in range(amax + 1)], dtype=float)
            out += outer * complex(np.dot(expo, ls[:amax + 1] - ls[amax + 1:]))
    return complex(out + log_e_function(params, lam))


def rhs_theorem(params: Params, lambdas) -> complex:
    """Right-hand side of the determinant formula for the pairing matrix."""
    return cmath.exp(log_rhs_theorem(params, lambdas))
