"""Index sets Z_nu, their index tables, and the multinomial bookkeeping.

Sites are 1-based (r = 1..N) and letters 0-based (J_r in 0..n-1), matching
the usual way the tuples are written.  Levels j run over 0..n-1; level 0
contains every site.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidNu, ShapeMismatch

__all__ = [
    "NuVector", "JTuple", "multinomial", "enumerate_z", "partial_order_leq",
    "lambda_invariants", "nu_pm", "mu_tilde", "m_pm", "mult_table", "mult_closed_difference",
    "p_j_factor", "p_j_product_closed", "ramp",
]

MAX_N = 20


def multinomial(total: int, parts) -> int:
    """total! / prod(parts!), zero when any part is negative or the parts do not sum to total."""
    parts = list(parts)
    if any(p < 0 for p in parts) or sum(parts) != total or total < 0:
        return 0
    out = 1
    rest = total
    for p in parts:
        out *= math.comb(rest, p)
        rest -= p
    if out >= 2 ** 63:
        raise OverflowError(f"multinomial({total}; {parts}) exceeds 64-bit range")
    return out


@dataclass(frozen=True)
class NuVector:
    """Level counts N = nu_0 >= nu_1 >= ... >= nu_{n-1} >= nu_n = 0.

    ``levels`` holds (nu_1, ..., nu_{n-1}).
    """

    N: int
    levels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(v) for v in self.levels))
        if not 1 <= self.N <= MAX_N:
            raise InvalidNu(f"N must lie in 1..{MAX_N}, got {self.N}")
        full = self.full
        if any(full[j] < full[j + 1] for j in range(len(full) - 1)) or full[-2] < 0:
            raise InvalidNu(f"nu must be weakly decreasing from N to 0, got {full}")

    @classmethod
    def from_lambdas(cls, lambdas) -> "NuVector":
        lam = [int(v) for v in lambdas]
        if any(v < 0 for v in lam):
            raise InvalidNu(f"weights must be nonnegative, got {lam}")
        N = sum(lam)
        levels = [sum(lam[j:]) for j in range(1, len(lam))]
        return cls(N, tuple(levels))

    @property
    def n(self) -> int:
        return len(self.levels) + 1

    @property
    def full(self) -> tuple[int, ...]:
        """(nu_0, ..., nu_n)."""
        return (self.N, *self.levels, 0)

    def nu(self, j: int) -> int:
        return self.full[j]

    @property
    def lambdas(self) -> tuple[int, ...]:
        f = self.full
        return tuple(f[j - 1] - f[j] for j in range(1, self.n + 1))

    @property
    def n_variables(self) -> int:
        return sum(self.levels)


@dataclass(frozen=True)
class JTuple:
    """An element of Z_nu together with its derived tables."""

    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(v) for v in self.entries))
        if any(not 0 <= v < self.n for v in self.entries):
            raise ShapeMismatch(f"entries of {self.entries} must lie in 0..{self.n - 1}")

    @property
    def N(self) -> int:
        return len(self.entries)

    @cached_property
    def nu(self) -> NuVector:
        levels = tuple(sum(1 for v in self.entries if v >= j) for j in range(1, self.n))
        return NuVector(self.N, levels)

    @cached_property
    def _sites(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r for r in range(1, self.N + 1) if self.entries[r - 1] >= j)
                     for j in range(self.n + 1))

    def sites(self, j: int) -> tuple[int, ...]:
        """N_j: the sorted sites r with J_r >= j."""
        return self._sites[j]

    def r(self, j: int, m: int) -> int:
        """r_{j,m}: the m-th smallest site of N_j (m is 1-based)."""
        return self._sites[j][m - 1]

    def mstar(self, j: int, m: int) -> int:
        """m*(j, m): the index with r_{j,m} = r_{j-1, m*}."""
        return self._sites[j - 1].index(self.r(j, m)) + 1

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def table(self) -> dict:
        """Index tables in a JSON-friendly shape."""
        nu = self.nu.full
        return {
            "J": list(self.entries),
            "N_j": {j: list(self.sites(j)) for j in range(self.n)},
            "r": {j: [self.r(j, m) for m in range(1, nu[j] + 1)] for j in range(self.n)},
            "mstar": {j: [self.mstar(j, m) for m in range(1, nu[j] + 1)] for j in range(1, self.n)},
        }


def _multiset_perms(counts: list[int], length: int):
    """All words with letter-counts ``counts``, in lexicographic order."""
    word: list[int] = []

    def rec():
        if len(word) == length:
            yield tuple(word)
            return
        for letter, c in enumerate(counts):
            if c:
                counts[letter] -= 1
                word.append(letter)
                yield from rec()
                word.pop()
                counts[letter] += 1

    yield from rec()


def enumerate_z(nu: NuVector) -> list[JTuple]:
    """Z_nu in lexicographic order of (J_1, ..., J_N)."""
    if not isinstance(nu, NuVector):
        nu = NuVector(nu[0], tuple(nu[1:]))
    return [JTuple(w, nu.n) for w in _multiset_perms(list(nu.lambdas), nu.N)]


def _suffix_sums(J) -> list[int]:
    out, acc = [], 0
    for v in reversed(tuple(J)):
        acc += v
        out.append(acc)
    return out[::-1]


def partial_order_leq(J, Jp) -> bool:
    """J <= J' iff every suffix sum J_r + ... + J_N is <= the one of J'."""
    if len(J) != len(Jp):
        raise ShapeMismatch(f"tuples of different length: {tuple(J)} vs {tuple(Jp)}")
    return all(a <= b for a, b in zip(_suffix_sums(J), _suffix_sums(Jp)))


@dataclass(frozen=True)
class LambdaInvariants:
    lambda0: int
    lambda2: int
    d: int


def lambda_invariants(lambdas) -> LambdaInvariants:
    """Lambda^(0), Lambda^(2) and the exponent d for weights (lambda_1..lambda_n).

    Also asserts (N^2 - sum lambda_j^2)/2 * Lambda0 == N(N-1) * Lambda2.
    """
    lam = list(lambdas)
    nu = NuVector.from_lambdas(lam)
    N, n = nu.N, nu.n
    l0 = multinomial(N, lam)
    l2 = 0
    for j in range(n):
        for k in range(j + 1, n):
            parts = lam.copy()
            parts[j] -= 1
            parts[k] -= 1
            l2 += multinomial(N - 2, parts)
    full = nu.full
    d = sum(2 * full[j] * full[j - 1] + full[j] ** 2 - 3 * full[j] for j in range(1, n))
    lhs = (N * N - sum(v * v for v in lam)) * l0
    assert lhs == 2 * N * (N - 1) * l2, "Lambda identity violated"
    return LambdaInvariants(l0, l2, d)


def reduced_multinomials(lambdas) -> list[int]:
    """multinomial(N-1; lambda with lambda_j - 1) for j = 1..n."""
    lam = list(lambdas)
    N = sum(lam)
    out = []
    for j in range(len(lam)):
        parts = lam.copy()
        parts[j] -= 1
        out.append(multinomial(N - 1, parts))
    return out


def nu_pm(J: JTuple, j: int, r: int) -> tuple[int, int]:
    """(#{s in N_j : s > r}, #{s in N_j : s < r})."""
    s = J.sites(j)
    return sum(1 for v in s if v > r), sum(1 for v in s if v < r)


def mu_tilde(J: JTuple, r: int, mu, rho: float, lam: float) -> list[float]:
    """Shifted spectral data feeding the one-point function G_{J_r} at site r."""
    n = J.n
    out = []
    for j in range(1, n + 1):
        p_hi, p_lo = nu_pm(J, j, r)
        q_hi, q_lo = nu_pm(J, j - 1, r)
        val = mu[j - 1] + (math.pi / n) * ((p_hi - q_hi) - (p_lo - q_lo))
        if j == J[r - 1] + 1:
            val -= 0.5 * (rho + lam)
        out.append(val)
    return out


def m_pm(J, j: int, k: int) -> tuple[int, int]:
    """(#{r : J_r = j, r > k}, #{r : J_r = j, r < k}) with 1-based sites."""
    e = tuple(J)
    return (sum(1 for r in range(k + 1, len(e) + 1) if e[r - 1] == j),
            sum(1 for r in range(1, k) if e[r - 1] == j))


def mult_table(rp: int, r: int, lambdas) -> Counter:
    """Brute-force multiplicities of M^-_{r'-1,k} - M^-_{r-1,k} over (J, k) with J_k + 1 = r."""
    if not 1 <= rp < r <= len(lambdas):
        raise ValueError(f"need 1 <= r' < r <= n, got ({rp}, {r})")
    nu = NuVector.from_lambdas(lambdas)
    out: Counter = Counter()
    for J in enumerate_z(nu):
        for k in range(1, nu.N + 1):
            if J[k - 1] + 1 == r:
                out[m_pm(J, rp - 1, k)[1] - m_pm(J, r - 1, k)[1]] += 1
    return out


def mult_closed_difference(rp: int, r: int, lambdas, a: int) -> int:
    """Closed three-case formula for mult(a) - mult(a+1)."""
    lam = list(lambdas)
    l0 = multinomial(sum(lam), lam)
    lr, lrp = lam[r - 1], lam[rp - 1]
    denom = math.comb(lr + lrp, lr)
    if -lr <= a <= min(-1, lrp - lr):
        num = -l0 * math.comb(lr + lrp, lr + a)
    elif max(0, lrp - lr + 1) <= a <= lrp:
        num = l0 * math.comb(lr + lrp, lrp - a)
    else:
        return 0
    q, rem = divmod(num, denom)
    assert rem == 0
    return q


def p_j_factor(J, mu, beta, rho: float, lam: float) -> float:
    """Scaling factor P_J that makes the spread-beta limit finite."""
    n_letters = len(mu)
    e = tuple(J)
    N = len(e)
    pair = sum(beta[s] - beta[r] for r in range(N) for s in range(r + 1, N) if e[r] != e[s])
    lin = sum(mu[e[r]] * beta[r] for r in range(N))
    assert max(e) < n_letters
    return math.exp(2 * math.pi ** 2 / (rho * lam * n_letters) * pair
                    - 2 * math.pi / (rho * lam) * lin)


def p_j_product_closed(lambdas, mu, beta, rho: float, lam: float) -> float:
    """Closed form of prod_{J in Z} P_J."""
    n = len(lambdas)
    inv = lambda_invariants(lambdas)
    red = reduced_multinomials(lambdas)
    N = len(beta)
    spread = sum(beta[s] - beta[r] for r in range(N) for s in range(r + 1, N))
    return math.exp(4 * math.pi ** 2 / (n * rho * lam) * spread * inv.lambda2
                    - 2 * math.pi / (rho * lam) * sum(c * m for c, m in zip(red, mu)) * sum(beta))


def ramp(x: float) -> float:
    """x + |x|; diagnostic only."""
    return x + abs(x)
