"""Global problem data shared by every module."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import ConfigError

__all__ = ["Params", "check_irrational_ratio", "default_params"]


def check_irrational_ratio(w1: float, w2: float, max_den: int = 50, gap: float = 1e-6) -> None:
    """Reject period pairs whose ratio sits within ``gap`` of p/q with p, q <= max_den."""
    if not (w1 > 0 and w2 > 0):
        raise ConfigError(f"periods must be positive, got {w1}, {w2}")
    r = w1 / w2
    for q in range(1, max_den + 1):
        p = round(r * q)
        if 1 <= p <= max_den and abs(r - p / q) <= gap:
            raise ConfigError(
                f"period ratio {r!r} is within {gap} of {Fraction(p, q)}; "
                "pole lattices would nearly collide")


@dataclass(frozen=True)
class Params:
    """Problem data: rank ``n``, number of sites ``N``, periods and spectral data.

    ``mu`` has ``n`` entries, ``beta`` has ``N`` entries.  The two periods
    ``rho`` and ``lam`` are real and positive.
    """

    n: int
    N: int
    rho: float = 7.3
    lam: float = 9.4
    mu: tuple[float, ...] = field(default=())
    beta: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.n < 2 or self.N < 1:
            raise ConfigError(f"need n >= 2 and N >= 1, got n={self.n}, N={self.N}")
        if self.N > 20:
            raise ConfigError("N > 20 is outside the supported range")
        mu = tuple(float(m) for m in self.mu) if self.mu else tuple(float(j) for j in range(self.n))
        beta = tuple(complex(b) if isinstance(b, complex) else float(b) for b in self.beta) \
            if self.beta else tuple(float(m) for m in range(self.N))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "beta", beta)
        if len(mu) != self.n:
            raise ConfigError(f"mu must have n={self.n} entries")
        if len(beta) != self.N:
            raise ConfigError(f"beta must have N={self.N} entries")
        check_irrational_ratio(self.rho, self.lam)

    @property
    def kappa(self) -> float:
        """The recurring exponent scale 2*pi/(rho*lam)."""
        return 2 * math.pi / (self.rho * self.lam)

    @property
    def q(self) -> complex:
        return complex(math.cos(-2 * math.pi ** 2 / (self.rho * self.n)),
                       math.sin(-2 * math.pi ** 2 / (self.rho * self.n)))

    @property
    def q_prime(self) -> complex:
        return complex(math.cos(-2 * math.pi ** 2 / (self.lam * self.n)),
                       math.sin(-2 * math.pi ** 2 / (self.lam * self.n)))

    def step(self, which: str) -> float:
        if which == "rho":
            return self.rho
        if which == "lam":
            return self.lam
        raise ConfigError(f"step must be 'rho' or 'lam', got {which!r}")

    def other_step(self, which: str) -> float:
        return self.lam if which == "rho" else self.rho

    def mu_window(self) -> tuple[bool, tuple[float, float]]:
        """Admissible interval for the convergence constant epsilon.

        Needs kappa*(mu_{j+1}-mu_j) > eps for all j and
        kappa*(mu_n - mu_1) < n*eps.  Returns (nonempty, (lo, hi)).
        """
        k = self.kappa
        gaps = [self.mu[j + 1] - self.mu[j] for j in range(self.n - 1)]
        hi = k * min(gaps)
        lo = k * (self.mu[-1] - self.mu[0]) / self.n
        return (lo < hi and hi > 0), (lo, hi)

    def with_beta(self, beta) -> "Params":
        return replace(self, beta=tuple(beta))

    def swapped(self) -> "Params":
        """Same data with the two periods exchanged."""
        return replace(self, rho=self.lam, lam=self.rho)


def default_params(n: int = 2, N: int = 2, **kw) -> Params:
    """Desk-scale defaults: periods 7.3 and 9.4, equally spaced mu, integer beta."""
    kw.setdefault("mu", tuple(2.0 * j for j in range(n)))
    kw.setdefault("beta", tuple(float(m) for m in range(N)))
    return Params(n=n, N=N, **kw)
