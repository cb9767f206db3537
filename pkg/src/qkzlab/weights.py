"""Weight functions g_J, their skew-symmetrisations w_J, the kernel K and the split integrand.

``sh`` is read as sinh with the prefactor multiplying the whole argument:
sh(pi/rho)(z) = sinh(pi*z/rho).

All evaluators broadcast: any entry of a :class:`GammaAssignment` may be a
numpy array, which is how the integrator feeds a whole panel of nodes for
the innermost variable in one call.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import JTuple, NuVector
from .errors import ShapeMismatch
from .params import Params
from .qkz_operators import r_matrix
from .special_functions import log_phi, log_psi

__all__ = [
    "GammaAssignment", "PermTuple", "perm_tuples", "eval_g", "eval_w", "eval_kernel",
    "log_kernel", "eval_term", "exchange_check", "MAX_PERMS",
]

MAX_PERMS = 10_000


@dataclass(frozen=True)
class GammaAssignment:
    """Integration variables gamma_{j,m}, 1 <= j <= n-1, plus gamma_{0,m} = beta_m.

    ``levels[j-1][m-1]`` is gamma_{j,m}.
    """

    nu: NuVector
    levels: tuple
    beta: tuple

    def __post_init__(self):
        levels = tuple(tuple(lv) for lv in self.levels)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "beta", tuple(self.beta))
        if len(self.beta) != self.nu.N:
            raise ShapeMismatch(f"beta has {len(self.beta)} entries, expected N={self.nu.N}")
        if len(levels) != self.nu.n - 1 or any(len(lv) != self.nu.nu(j + 1)
                                               for j, lv in enumerate(levels)):
            raise ShapeMismatch(f"gamma shape {[len(lv) for lv in levels]} does not match nu "
                                f"{self.nu.full}")

    def level(self, j: int) -> tuple:
        return self.beta if j == 0 else self.levels[j - 1]

    def permuted(self, sigma: "PermTuple") -> "GammaAssignment":
        """gamma_sigma: level j becomes (gamma_{j,sigma_j(1)}, ..., gamma_{j,sigma_j(nu_j)})."""
        lv = tuple(tuple(self.levels[j][s] for s in sigma.perms[j]) for j in range(len(self.levels)))
        return GammaAssignment(self.nu, lv, self.beta)

    @classmethod
    def from_flat(cls, nu: NuVector, values, beta) -> "GammaAssignment":
        """Build from a flat list ordered level by level, index by index."""
        values = list(values)
        out, pos = [], 0
        for j in range(1, nu.n):
            out.append(values[pos:pos + nu.nu(j)])
            pos += nu.nu(j)
        if pos != len(values):
            raise ShapeMismatch(f"{len(values)} values for {pos} variables")
        return cls(nu, tuple(out), tuple(beta))

    def flat(self) -> list:
        return [v for lv in self.levels for v in lv]


@dataclass(frozen=True)
class PermTuple:
    """(sigma_1, ..., sigma_{n-1}) stored 0-based: ``perms[j-1][m-1] = sigma_j(m) - 1``."""

    perms: tuple

    def __post_init__(self):
        perms = tuple(tuple(int(v) for v in p) for p in self.perms)
        object.__setattr__(self, "perms", perms)
        for p in perms:
            if sorted(p) != list(range(len(p))):
                raise ShapeMismatch(f"{p} is not a permutation")

    @property
    def sign(self) -> int:
        s = 1
        for p in self.perms:
            seen = [False] * len(p)
            for i in range(len(p)):
                if seen[i]:
                    continue
                length, k = 0, i
                while not seen[k]:
                    seen[k] = True
                    k = p[k]
                    length += 1
                if length % 2 == 0:
                    s = -s
        return s

    def image(self, j: int, m: int) -> int:
        """sigma_j(m), 1-based; sigma_0 is the identity."""
        return m if j == 0 else self.perms[j - 1][m - 1] + 1

    @classmethod
    def identity(cls, nu: NuVector) -> "PermTuple":
        return cls(tuple(tuple(range(nu.nu(j))) for j in range(1, nu.n)))


def perm_tuples(nu: NuVector):
    """Iterate S_{nu_1} x ... x S_{nu_{n-1}} in a fixed order."""
    total = math.prod(math.factorial(nu.nu(j)) for j in range(1, nu.n))
    if total > MAX_PERMS:
        raise ShapeMismatch(f"{total} permutation tuples exceed the cap {MAX_PERMS}")
    for combo in itertools.product(*(itertools.permutations(range(nu.nu(j)))
                                     for j in range(1, nu.n))):
        yield PermTuple(combo)


def _check(J: JTuple, g: GammaAssignment):
    if J.nu != g.nu:
        raise ShapeMismatch(f"J={J.entries} has nu {J.nu.full}, gamma has {g.nu.full}")


def eval_g(J: JTuple, g: GammaAssignment, step: float, n: int | None = None):
    """g_J with period ``step`` at the variables in ``g`` (no permutation applied)."""
    _check(J, g)
    n = J.n if n is None else n
    c = math.pi / step
    a = 1j * math.pi / n
    out = 1.0 + 0j
    for j in range(1, n):
        cur, prev = g.level(j), g.level(j - 1)
        nj = len(cur)
        for m in range(nj):
            for mp in range(m + 1, nj):
                out = out * np.sinh(c * (cur[mp] - cur[m] - 2 * a))
        for m in range(1, nj + 1):
            rjm = J.r(j, m)
            out = out * np.exp(-c * (cur[m - 1] - prev[J.mstar(j, m) - 1]))
            for mp in range(1, len(prev) + 1):
                rprev = J.r(j - 1, mp)
                if rprev < rjm:
                    out = out * np.sinh(c * (cur[m - 1] - prev[mp - 1] + a))
                elif rjm < rprev:
                    out = out * np.sinh(c * (cur[m - 1] - prev[mp - 1] - a))
    return out


def eval_w(J: JTuple, g: GammaAssignment, step: float):
    """Skew-symmetrisation of g_J over every level."""
    _check(J, g)
    total = 0j
    for sigma in perm_tuples(J.nu):
        total = total + sigma.sign * eval_g(J, g.permuted(sigma), step)
    return total


def log_kernel(g: GammaAssignment, params: Params):
    """log K at the variables in ``g``; the branch is irrelevant, only exp() is used."""
    n = params.n
    mu = (0.0,) + tuple(params.mu)  # mu[j] = mu_j with mu_0 = 0
    expo = 0j
    for j in range(0, n):
        for v in g.level(j):
            expo = expo + v * (mu[j + 1] - mu[j])
    out = params.kappa * expo
    for j in range(1, n):
        cur, prev = g.level(j), g.level(j - 1)
        for x in cur:
            for y in prev:
                out = out + log_phi(np.asarray(x) - y, n, params.rho, params.lam)
        for m in range(len(cur)):
            for mp in range(m + 1, len(cur)):
                out = out + log_psi(np.asarray(cur[m]) - cur[mp], n, params.rho, params.lam)
    return out


def eval_kernel(g: GammaAssignment, params: Params):
    """The kernel K (exponential prefactor times the phi and psi products)."""
    return np.exp(log_kernel(g, params))


def eval_term(J: JTuple, Jp: JTuple, sigma: PermTuple, sigmap: PermTuple,
              g: GammaAssignment, params: Params):
    """K(gamma) g_J^(rho)(gamma_sigma) g_J'^(lam)(gamma_sigma')."""
    return (eval_kernel(g, params) * eval_g(J, g.permuted(sigma), params.rho)
            * eval_g(Jp, g.permuted(sigmap), params.lam))


def exchange_check(J: JTuple, k: int, g: GammaAssignment, step: float) -> float:
    """Relative residual of the exchange relation for w_J at adjacent sites (k, k+1).

    Left side: w with J_k, J_{k+1} swapped, evaluated with beta_k, beta_{k+1}
    swapped.  Right side: R(beta_k - beta_{k+1}) applied to the pair of letters,
    where the coefficient of w_{..J'_k J'_{k+1}..} is the matrix element with
    output (J_k, J_{k+1}) and input (J'_k, J'_{k+1}).
    """
    _check(J, g)
    N, n = J.N, J.n
    if not 1 <= k < N:
        raise ShapeMismatch(f"k={k} must satisfy 1 <= k < N={N}")
    e = list(J.entries)
    b = list(g.beta)
    R = r_matrix(b[k - 1] - b[k], step, n)
    swapped_e = e.copy()
    swapped_e[k - 1], swapped_e[k] = e[k], e[k - 1]
    swapped_b = b.copy()
    swapped_b[k - 1], swapped_b[k] = b[k], b[k - 1]
    lhs = eval_w(JTuple(swapped_e, n), GammaAssignment(g.nu, g.levels, swapped_b), step)
    row = e[k - 1] * n + e[k]
    rhs = 0j
    for x, y in {(e[k - 1], e[k]), (e[k], e[k - 1])}:
        coef = R[row, x * n + y]
        if coef == 0:
            continue
        ep = e.copy()
        ep[k - 1], ep[k] = x, y
        rhs += coef * eval_w(JTuple(ep, n), g, step)
    scale = max(abs(lhs), abs(rhs), 1e-30)
    return float(abs(lhs - rhs) / scale)
