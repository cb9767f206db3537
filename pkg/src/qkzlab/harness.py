"""Experiment configuration, check suites and report emission.

Every check produces a :class:`CheckRecord` comparing a computed quantity
(``lhs``) with its reference (``rhs``).  A suite is a function returning a
list of records; :func:`run_suite` runs the suites named in an
:class:`ExperimentConfig` and collects the records into a :class:`Report`
that can be written as JSON and CSV.

Config files are INI::

    [problem]
    n = 2
    N = 2
    rho = 7.3
    lam = 9.4
    mu = 0, 2
    beta = 0, 1
    lambdas = 1, 1

    [quadrature]
    rel_tol = 1e-8
    mode = reduced

    [run]
    suites = s2-properties, theorem61
    output = reports/run1
    seed = 1234
"""
from __future__ import annotations

import configparser
import csv
import itertools
import json
import math
import platform
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .combinatorics import (JTuple, NuVector, enumerate_z, lambda_invariants, mu_tilde,
                            mult_closed_difference, mult_table, p_j_factor, partial_order_leq)
from .errors import ConfigError, QKZError
from .integration import (QuadratureConfig, h_numeric, integrate_term, pairing, pairing_matrix,
                          skew_factor)
from .params import Params, default_params
from .qkz_operators import (c_constant, det_k_closed, e_function, g_k_closed, k_operator,
                            rhs_theorem)
from .special_functions import h_closed, log_s2_array, Periods
from .weights import GammaAssignment, exchange_check, perm_tuples

__all__ = [
    "CheckRecord", "Report", "ExperimentConfig", "SUITES", "run_suite", "load_config",
    "compare_theorem61", "s2_properties", "h_identity", "detk_oracle", "exchange_suite",
    "e_difference", "rhs_consistency", "mult_oracle", "asymptotics", "contour_robustness",
    "weight_vectors", "rel_err",
]


def rel_err(lhs, rhs) -> float:
    """|lhs - rhs| / |rhs|, or |lhs| when the reference is zero."""
    d = abs(complex(lhs) - complex(rhs))
    s = abs(complex(rhs))
    return float(d / s) if s > 0 else float(d)


@dataclass
class CheckRecord:
    name: str
    lhs: complex
    rhs: complex
    rel_err: float
    tolerance: float
    passed: bool
    wall_time: float
    provenance: str
    suite: str = ""
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        lhs, rhs = complex(self.lhs), complex(self.rhs)
        return {"suite": self.suite, "name": self.name,
                "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag],
                "rel_err": self.rel_err, "tolerance": self.tolerance, "pass": self.passed,
                "wall_time": self.wall_time, "provenance": self.provenance, "meta": self.meta}


def _record(name, lhs, rhs, tol, t0, provenance, *, err=None, passed=None, **meta) -> CheckRecord:
    e = rel_err(lhs, rhs) if err is None else float(err)
    ok = (e <= tol) if passed is None else bool(passed)
    return CheckRecord(name, complex(lhs), complex(rhs), e, tol, ok,
                       time.perf_counter() - t0, provenance, meta=meta)


def _worst(name, samples, tol, t0, provenance, **meta) -> CheckRecord:
    """Collapse (lhs, rhs) samples into one record carrying the worst one."""
    errs = [rel_err(a, b) for a, b in samples]
    k = int(np.argmax(errs))
    return _record(name, samples[k][0], samples[k][1], tol, t0, provenance,
                   samples=len(samples), **meta)


def _tag(values) -> str:
    """Compact comma-free label for a tuple: (0, 1) -> '0-1'."""
    return "-".join(f"{v:g}" if isinstance(v, float) else str(v) for v in values)


def _perm_tag(sigma) -> str:
    return "/".join(_tag(p) for p in sigma.perms)


def weight_vectors(n: int, N: int, *, allow_zero: bool = True):
    """All (lambda_1..lambda_n) with sum N, in lexicographic order."""
    for lam in itertools.product(range(N + 1), repeat=n):
        if sum(lam) == N and (allow_zero or min(lam) > 0):
            yield lam


# -- closed-form and property suites -------------------------------------------

def s2_properties(rho: float = 7.3, lam: float = 9.4, rng=None, samples: int = 100,
                  tol: float = 1e-10) -> list[CheckRecord]:
    rng = np.random.default_rng(0) if rng is None else rng
    w1, w2 = rho, lam
    W = w1 + w2

    def ls(x, a=w1, b=w2):
        return log_s2_array(np.asarray(x, dtype=complex), a, b)

    x = rng.uniform(-W, W, samples) + 1j * rng.uniform(-5, 5, samples)
    out = []
    for name, p, q in (("s2.shift-omega1", w1, w2), ("s2.shift-omega2", w2, w1)):
        t0 = time.perf_counter()
        lhs = np.exp(ls(x + p) - ls(x))
        rhs = 1.0 / (2 * np.sin(np.pi * x / q))
        out.append(_worst(name, list(zip(lhs, rhs)), tol, t0,
                          "S2(x+w)/S2(x) = 1/(2 sin(pi x/w')) at random x"))

    t0 = time.perf_counter()
    r = 1e-6 * rng.uniform(0.5, 2.0, samples)
    theta = rng.choice([0.0, 0.5, 1.0, 1.5], samples) * np.pi + rng.uniform(-0.3, 0.3, samples)
    z = r * np.exp(1j * theta)
    c = 2 * np.pi / math.sqrt(w1 * w2)
    odd = 0.5 * (np.exp(ls(z)) - np.exp(ls(-z)))
    out.append(_worst("s2.normalization-odd", list(zip(odd, c * z)), tol, t0,
                      "(S2(x) - S2(-x))/2 vs 2 pi x/sqrt(w1 w2) at |x| ~ 1e-6"))
    t0 = time.perf_counter()
    out.append(_worst("s2.normalization-ratio", list(zip(np.exp(ls(z)), c * z)), 1e-6, t0,
                      "S2(x)/(2 pi x/sqrt(w1 w2)) -> 1 at |x| ~ 1e-6"))

    t0 = time.perf_counter()
    out.append(_worst("s2.period-symmetry", list(zip(np.exp(ls(x, w2, w1)), np.exp(ls(x)))),
                      1e-12, t0, "S2(x|w1,w2) = S2(x|w2,w1)"))
    t0 = time.perf_counter()
    out.append(_worst("s2.reflection", list(zip(np.exp(ls(x) + ls(W - x)), np.ones_like(x))),
                      tol, t0, "S2(x) S2(w1+w2-x) = 1"))

    t0 = time.perf_counter()
    off = 1e-10 * np.exp(1j * rng.uniform(0, 2 * np.pi))
    zeros = [-(a * w1 + b * w2) for a in range(3) for b in range(3)]
    zvals = [abs(np.exp(ls([z0])[0])) for z0 in zeros]
    zoff = [abs(np.exp(ls([z0 + off])[0])) for z0 in zeros]
    worst = max(zvals + zoff)
    out.append(_record("s2.zeros", worst, 0.0, 1e-8, t0,
                       "|S2| at the zero lattice -(a w1 + b w2), a, b <= 2, and 1e-10 away"))
    t0 = time.perf_counter()
    poles = [a * w1 + b * w2 for a in range(1, 3) for b in range(1, 3)]
    pinv = [abs(np.exp(-ls([p0 + off])[0])) for p0 in poles]
    out.append(_record("s2.poles", max(pinv), 0.0, 1e-8, t0,
                       "1/|S2| 1e-10 away from the pole lattice a w1 + b w2, a, b in {1, 2}"))
    for rec in out:
        rec.suite = "s2-properties"
    return out


H_GRID = (-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0)
H_PERIODS = ((7.3, 9.4), (8.1, 11.3))


def h_identity(cfg: QuadratureConfig | None = None, *, grid=H_GRID, periods=H_PERIODS,
               ranks=(2, 3), tol: float = 1e-8) -> list[CheckRecord]:
    cfg = cfg or QuadratureConfig(rel_tol=1e-10)
    out = []
    for (rho, lam), n in itertools.product(periods, ranks):
        for x in grid:
            t0 = time.perf_counter()
            num, err = h_numeric(x, n, rho, lam, cfg, return_error=True)
            rec = _record(f"h.n{n}.periods{_tag((rho, lam))}.x{x:+g}", num,
                          h_closed(x, n, Periods(rho, lam)), tol, t0,
                          "contour integral H(x) vs double-sine closed form", quad_err=err)
            rec.suite = "h-identity"
            out.append(rec)
    return out


DESK_CASES = ((2, 2), (2, 3), (3, 2), (3, 3))


def _random_params(n, N, rng, rho=7.3, lam=9.4) -> Params:
    mu = np.sort(rng.uniform(0.0, 3.0, n))
    beta = rng.uniform(-2.0, 2.0, N)
    return Params(n=n, N=N, rho=rho, lam=lam, mu=tuple(mu), beta=tuple(beta))


def detk_oracle(rng=None, *, cases=DESK_CASES, draws: int = 10,
                tol: float = 1e-11) -> list[CheckRecord]:
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for (n, N), d in itertools.product(cases, range(draws)):
        p = _random_params(n, N, rng)
        for lam in weight_vectors(n, N):
            nu = NuVector.from_lambdas(lam)
            for m, orient in itertools.product(range(1, N + 1), ("rho", "lam")):
                t0 = time.perf_counter()
                direct = complex(np.linalg.det(k_operator(m, p, nu, orient)))
                rec = _record(f"detk.n{n}.N{N}.draw{d}.lam{_tag(lam)}.m{m}.{orient}", direct,
                              det_k_closed(m, p, lam, orient), tol, t0,
                              "det of K_m on a weight subspace vs closed form")
                rec.suite = "detk-oracle"
                out.append(rec)
    return out


def exchange_suite(rng=None, *, cases=((2, 2), (2, 3), (3, 2)), draws: int = 20,
                   tol: float = 1e-9, rho: float = 7.3, lam: float = 9.4) -> list[CheckRecord]:
    """Exchange relation of the skew-symmetrised weight functions, all J and adjacent sites."""
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for n, N in cases:
        for lw in weight_vectors(n, N):
            nu = NuVector.from_lambdas(lw)
            if nu.n_variables == 0:
                continue
            for step in (rho, lam):
                t0 = time.perf_counter()
                worst, where = 0.0, None
                for _ in range(draws):
                    beta = tuple(rng.uniform(-2, 2, N))
                    vals = rng.uniform(-3, 3, nu.n_variables) + 1j * rng.uniform(-0.5, 0.5,
                                                                               nu.n_variables)
                    g = GammaAssignment.from_flat(nu, vals, beta)
                    for J in enumerate_z(nu):
                        for k in range(1, N):
                            r = exchange_check(J, k, g, step)
                            if r > worst:
                                worst, where = r, (J.entries, k)
                rec = _record(f"exchange.n{n}.N{N}.lam{_tag(lw)}.step{step:g}", worst, 0.0, tol, t0,
                              "w with swapped letters and spectral values vs R acting on w",
                              worst_at=str(where))
                rec.suite = "exchange"
                out.append(rec)
    return out


def e_difference(rng=None, *, cases=DESK_CASES, draws: int = 3,
                 tol: float = 1e-9) -> list[CheckRecord]:
    """E(beta_m - i*shift) / E(beta) against the closed determinant of K_m, both orientations."""
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for (n, N), d in itertools.product(cases, range(draws)):
        p = _random_params(n, N, rng)
        for lw in weight_vectors(n, N):
            base = e_function(p, lw)
            for m, orient in itertools.product(range(1, N + 1), ("rho", "lam")):
                t0 = time.perf_counter()
                b = list(p.beta)
                b[m - 1] = b[m - 1] - 1j * p.other_step(orient)
                ratio = e_function(p.with_beta(b), lw) / base
                rec = _record(f"ediff.n{n}.N{N}.draw{d}.lam{_tag(lw)}.m{m}.{orient}", ratio,
                              det_k_closed(m, p, lw, orient), tol, t0,
                              "shifted E over E vs det K_m (double-sine shift relations)")
                rec.suite = "e-difference"
                out.append(rec)
    return out


RHS_CASES = ((2, 2, (1, 1)), (2, 3, (2, 1)), (3, 2, (1, 1, 0)), (3, 2, (1, 0, 1)),
             (3, 2, (0, 1, 1)), (3, 3, (1, 1, 1)))


def rhs_consistency(rng=None, *, cases=RHS_CASES, draws: int = 2,
                    tol: float = 1e-9) -> list[CheckRecord]:
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for (n, N, lw), d in itertools.product(cases, range(draws + 1)):
        p = default_params(n, N) if d == 0 else _random_params(n, N, rng)
        t0 = time.perf_counter()
        rec = _record(f"rhs.n{n}.N{N}.lam{_tag(lw)}.draw{d}", rhs_theorem(p, lw),
                      c_constant(p, lw) * e_function(p, lw), tol, t0,
                      "closed determinant vs constant (one-point functions) times E")
        rec.suite = "rhs-consistency"
        out.append(rec)
    return out


def mult_oracle(*, ranks=(2, 3), sites=(1, 2, 3, 4)) -> list[CheckRecord]:
    """Brute-force multiplicity differences vs the three-case formula; exact integers."""
    out = []
    for n, N in itertools.product(ranks, sites):
        t0 = time.perf_counter()
        bad, total = 0, 0
        for lw in weight_vectors(n, N):
            for rp, r in itertools.combinations(range(1, n + 1), 2):
                table = mult_table(rp, r, lw)
                lo = min(table, default=0) - 1
                hi = max(table, default=0) + 1
                for a in range(min(lo, -N - 1), max(hi, N + 1) + 1):
                    total += 1
                    if table.get(a, 0) - table.get(a + 1, 0) != mult_closed_difference(rp, r, lw, a):
                        bad += 1
        rec = _record(f"mult.n{n}.N{N}", bad, 0, 0.0, t0,
                      "brute-force mult(a) - mult(a+1) vs closed three-case formula",
                      err=bad, passed=bad == 0, compared=total)
        rec.suite = "mult-oracle"
        out.append(rec)
    return out


# -- integral suites ------------------------------------------------------------

def _diag_limit(J: JTuple, params: Params) -> complex:
    """The predicted spread-beta limit of P_J I(w_J, w_J) / prod nu_j!."""
    n = params.n
    full = J.nu.full
    ex = sum(full[j] * (full[j - 1] - 1) - full[j] * (full[j] - 1) for j in range(1, n))
    phase = np.exp((1 / params.rho + 1 / params.lam) * math.pi ** 2 * 1j / n * ex)
    d = lambda_invariants(J.nu.lambdas).d
    G = math.prod(g_k_closed(mu_tilde(J, r, params.mu, params.rho, params.lam), J[r - 1], params)
                  for r in range(1, params.N + 1))
    return complex(phase * G / 2 ** d)


def asymptotics(params: Params, nu: NuVector, cfg: QuadratureConfig | None = None, *,
                spacings=(4.0, 8.0, 12.0), tol: float = 1e-3) -> list[CheckRecord]:
    """Spread-beta structure of the P_J-scaled pairing matrix.

    For every J not <= J' the scaled entry must shrink monotonically over
    ``spacings``; every scaled diagonal entry must match the product of
    one-point functions within ``tol`` at the largest spacing.
    """
    cfg = cfg or QuadratureConfig(rel_tol=1e-8)
    basis = enumerate_z(nu)
    f = skew_factor(nu)
    scaled, times = {}, {}
    for s in spacings:
        p = params.with_beta(tuple(s * m for m in range(params.N)))
        for J, Jp in itertools.product(basis, basis):
            if J != Jp and partial_order_leq(J, Jp):
                continue
            t0 = time.perf_counter()
            v = pairing(J, Jp, p, cfg, mode="reduced")
            scaled[s, J, Jp] = p_j_factor(J, p.mu, p.beta, p.rho, p.lam) * v / f
            times[J, Jp] = times.get((J, Jp), 0.0) + time.perf_counter() - t0
    out = []
    last = spacings[-1]
    plast = params.with_beta(tuple(last * m for m in range(params.N)))
    for J, Jp in itertools.product(basis, basis):
        if J == Jp:
            seq = [abs(scaled[s, J, J]) for s in spacings]
            pred = _diag_limit(J, plast)
            errs = [rel_err(scaled[s, J, J], pred) for s in spacings]
            rec = CheckRecord(f"asym.diag.J{_tag(J.entries)}", scaled[last, J, J], pred, errs[-1],
                              tol, errs[-1] <= tol, times[J, J],
                              "scaled diagonal pairing vs product of one-point functions",
                              meta={"spacings": list(spacings), "rel_err_by_spacing": errs})
        elif not partial_order_leq(J, Jp):
            seq = [abs(scaled[s, J, Jp]) for s in spacings]
            mono = all(b < a for a, b in zip(seq, seq[1:]))
            rec = CheckRecord(f"asym.offdiag.J{_tag(J.entries)}.Jp{_tag(Jp.entries)}", seq[-1], 0.0,
                              seq[-1] / seq[0], 1.0, mono, times[J, Jp],
                              "scaled entry for J not <= J' decreases monotonically to 0",
                              meta={"spacings": list(spacings), "abs_by_spacing": seq})
        else:
            continue
        rec.suite = "asymptotics"
        out.append(rec)
    return out


def _second_beta(N: int) -> tuple:
    if N == 2:
        return (0.3, 1.7)
    return tuple(m + 0.3 * (-1) ** m for m in range(N))


def compare_theorem61(params: Params, nu: NuVector, cfg: QuadratureConfig | None = None, *,
                      tol: float = 1e-3, ror_tol: float = 2e-3, betas=None,
                      mode: str = "reduced", workers: int = 1,
                      mirror: bool = True) -> list[CheckRecord]:
    """Determinant of the pairing matrix against the closed formula.

    Three kinds of record: the determinant (normalised by prod nu_j!) against
    the closed form at each beta vector, the ratio det/E at two beta vectors
    (which must not depend on beta), and the determinant magnitude after
    exchanging the two periods.
    """
    cfg = cfg or QuadratureConfig(rel_tol=1e-6)
    lw = nu.lambdas
    if betas is None:
        betas = (tuple(params.beta), _second_beta(params.N))
    tag = f"n{params.n}.N{params.N}.lam{_tag(lw)}"
    out, ratios, first = [], [], None
    for b in betas:
        p = params.with_beta(b)
        t0 = time.perf_counter()
        M = pairing_matrix(p, nu, cfg, mode=mode, workers=workers)
        det = M.det(normalized=True)
        rhs = rhs_theorem(p, lw)
        ratios.append(det / e_function(p, lw))
        first = first or (M, p, det)
        out.append(_record(f"theorem61.{tag}.beta{_tag(tuple(float(x) for x in b))}", det, rhs, tol,
                           t0, "det of the pairing matrix (entries / prod nu_j!) vs closed form",
                           det_err=M.det_error(normalized=True), size=M.size,
                           literal_over_normalized=abs(M.det() / det) if det else None,
                           max_entry_rel_err=M.max_rel_error()))
    if len(ratios) >= 2:
        t0 = time.perf_counter()
        out.append(_record(f"theorem61.{tag}.ratio-of-ratios", ratios[0], ratios[1], ror_tol, t0,
                           "det/E at two beta vectors (constant in beta)"))
    if mirror:
        M, p, det = first
        t0 = time.perf_counter()
        Ms = pairing_matrix(p.swapped(), nu, cfg, mode=mode, workers=workers)
        out.append(_record(f"theorem61.{tag}.mirror", abs(Ms.det(normalized=True)), abs(det),
                           tol, t0, "|det| invariant under exchanging the two periods",
                           transpose_residual=float(np.max(np.abs(Ms.values.T - M.values)))))
    for rec in out:
        rec.suite = "theorem61"
    return out


def contour_robustness(params: Params, nu: NuVector, cfg: QuadratureConfig | None = None,
                       *, slack: float = 1.0) -> list[CheckRecord]:
    """Every term integral under halving the contour offset and doubling the truncation.

    A record passes when the change is within the sum of the two reported
    error estimates (times ``slack``).
    """
    cfg = cfg or QuadratureConfig(rel_tol=1e-8)
    basis = enumerate_z(nu)
    perms = list(perm_tuples(nu))
    delta = cfg.contour.resolved_delta(params.n)
    variants = {"half-delta": cfg.with_delta(0.5 * delta),
                "double-T": QuadratureConfig(**{**_cfg_fields(cfg), "truncation_margin":
                                                2.0 * cfg.truncation_margin})}
    out = []
    for J, Jp in itertools.product(basis, basis):
        for s, sp in itertools.product(perms, perms):
            ref = integrate_term(J, Jp, s, sp, params, cfg)
            for label, vcfg in variants.items():
                t0 = time.perf_counter()
                alt = integrate_term(J, Jp, s, sp, params, vcfg)
                budget = slack * (ref.err + alt.err)
                diff = abs(alt.value - ref.value)
                scale = max(abs(ref.value), 1e-300)
                rec = CheckRecord(
                    f"robust.J{_tag(J.entries)}.Jp{_tag(Jp.entries)}.s{_perm_tag(s)}.sp{_perm_tag(sp)}.{label}",
                    alt.value, ref.value, diff / scale, budget / scale, diff <= budget,
                    time.perf_counter() - t0, "term integral under contour/truncation change",
                    meta={"abs_diff": diff, "err_ref": ref.err, "err_alt": alt.err})
                rec.suite = "contour-robustness"
                out.append(rec)
    return out


def _cfg_fields(cfg: QuadratureConfig) -> dict:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


# -- configuration and orchestration --------------------------------------------

ASYM_MU_GAP = 8.5


@dataclass
class ExperimentConfig:
    params: Params
    nu: NuVector
    cfg: QuadratureConfig = field(default_factory=QuadratureConfig)
    suites: list = field(default_factory=list)
    output_path: str | None = None
    seed: int = 0
    workers: int = 1
    mode: str = "reduced"
    asym_mu: tuple | None = None
    spacings: tuple = (4.0, 8.0, 12.0)

    def __post_init__(self):
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s) {unknown}; known: {sorted(SUITES)}")
        if self.nu.n != self.params.n or self.nu.N != self.params.N:
            raise ConfigError(f"weights {self.nu.lambdas} do not fit n={self.params.n}, "
                              f"N={self.params.N}")
        if skew_factor(self.nu) > 10_000:
            raise ConfigError(f"prod nu_j! = {skew_factor(self.nu)} exceeds 10^4")
        if self.mode not in ("full", "reduced"):
            raise ConfigError(f"mode must be 'full' or 'reduced', got {self.mode!r}")

    def echo(self) -> dict:
        p = self.params
        return {"n": p.n, "N": p.N, "rho": p.rho, "lam": p.lam, "mu": list(p.mu),
                "beta": [complex(b).real for b in p.beta], "lambdas": list(self.nu.lambdas),
                "rel_tol": self.cfg.rel_tol, "truncation_margin": self.cfg.truncation_margin,
                "delta": self.cfg.contour.delta, "suites": list(self.suites), "seed": self.seed,
                "mode": self.mode, "workers": self.workers,
                "asym_mu": list(self.asymptotic_params().mu), "spacings": list(self.spacings)}

    def asymptotic_params(self) -> Params:
        mu = self.asym_mu or tuple(ASYM_MU_GAP * j for j in range(self.params.n))
        return replace(self.params, mu=tuple(mu))


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma separated list of numbers, got {text!r}") from exc


def load_config(path) -> ExperimentConfig:
    """Parse an INI experiment file; every problem is reported as :class:`ConfigError`."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # n and N are different keys
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        prob = cp["problem"] if cp.has_section("problem") else {}
        n = int(prob.get("n", 2))
        N = int(prob.get("N", 2))
        kw = {}
        for key in ("rho", "lam"):
            if key in prob:
                kw[key] = float(prob[key])
        if "mu" in prob:
            kw["mu"] = _floats(prob["mu"])
        if "beta" in prob:
            kw["beta"] = _floats(prob["beta"])
        params = default_params(n, N, **kw)
        if "lambdas" in prob:
            lw = tuple(int(v) for v in _floats(prob["lambdas"]))
        else:
            lw = (N - 1, 1) + (0,) * (n - 2) if N > 1 else (1,) + (0,) * (n - 1)
        nu = NuVector.from_lambdas(lw)
        q = cp["quadrature"] if cp.has_section("quadrature") else {}
        cfg = QuadratureConfig(rel_tol=float(q.get("rel_tol", 1e-8)),
                               abs_tol=float(q.get("abs_tol", 0.0)),
                               truncation_margin=float(q.get("truncation_margin", 1.0)))
        if q.get("delta"):
            cfg = cfg.with_delta(float(q["delta"]))
        run = cp["run"] if cp.has_section("run") else {}
        suites = [s.strip() for s in run.get("suites", "theorem61").split(",") if s.strip()]
        asym = cp["asymptotics"] if cp.has_section("asymptotics") else {}
        return ExperimentConfig(
            params=params, nu=nu, cfg=cfg, suites=suites, output_path=run.get("output"),
            seed=int(run.get("seed", 0)), workers=int(run.get("workers", 1)),
            mode=q.get("mode", "reduced"),
            asym_mu=_floats(asym["mu"]) if "mu" in asym else None,
            spacings=_floats(asym["spacings"]) if "spacings" in asym else (4.0, 8.0, 12.0))
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError, QKZError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc


def environment_stamp() -> dict:
    return {"qkzlab": __version__, "backend": BACKEND, "python": platform.python_version(),
            "numpy": np.__version__, "platform": platform.platform()}


@dataclass
class Report:
    records: list
    config: dict
    environment: dict
    errors: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors and all(r.passed for r in self.records)

    @property
    def exit_code(self) -> int:
        if self.errors:
            return 3
        return 0 if self.passed else 1

    def to_dict(self) -> dict:
        return {"pass": self.passed, "environment": self.environment, "config": self.config,
                "errors": self.errors, "records": [r.to_dict() for r in self.records]}

    def write(self, prefix) -> tuple[Path, Path]:
        prefix = Path(prefix)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        jpath, cpath = prefix.with_suffix(".json"), prefix.with_suffix(".csv")
        jpath.write_text(json.dumps(self.to_dict(), indent=2, default=str) + "\n")
        with open(cpath, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["suite", "name", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err",
                        "tolerance", "pass", "wall_time", "provenance"])
            for r in self.records:
                lhs, rhs = complex(r.lhs), complex(r.rhs)
                w.writerow([r.suite, r.name, repr(lhs.real), repr(lhs.imag), repr(rhs.real),
                            repr(rhs.imag), repr(r.rel_err), repr(r.tolerance), int(r.passed),
                            f"{r.wall_time:.6f}", r.provenance])
        return jpath, cpath


def _suite_args(name: str, ec: ExperimentConfig):
    rng = np.random.default_rng([ec.seed, sorted(SUITES).index(name)])
    p = ec.params
    if name == "s2-properties":
        return s2_properties(p.rho, p.lam, rng)
    if name == "h-identity":
        return h_identity()
    if name == "detk-oracle":
        return detk_oracle(rng)
    if name == "exchange":
        return exchange_suite(rng, rho=p.rho, lam=p.lam)
    if name == "e-difference":
        return e_difference(rng)
    if name == "rhs-consistency":
        return rhs_consistency(rng)
    if name == "mult-oracle":
        return mult_oracle()
    if name == "asymptotics":
        return asymptotics(ec.asymptotic_params(), ec.nu, ec.cfg, spacings=ec.spacings)
    if name == "theorem61":
        return compare_theorem61(p, ec.nu, ec.cfg, mode=ec.mode, workers=ec.workers)
    if name == "contour-robustness":
        return contour_robustness(p, ec.nu, ec.cfg)
    raise ConfigError(f"unknown suite {name!r}")


SUITES = ("s2-properties", "h-identity", "detk-oracle", "exchange", "e-difference",
          "rhs-consistency", "mult-oracle", "asymptotics", "theorem61", "contour-robustness")


def run_suite(config: ExperimentConfig, *, write: bool = True) -> Report:
    """Run every suite named in ``config``; numerical failures are recorded, not raised."""
    records, errors = [], []
    for name in config.suites:
        try:
            records.extend(_suite_args(name, config))
        except ConfigError:
            raise
        except QKZError as exc:
            errors.append({"suite": name, "error": type(exc).__name__, "message": str(exc)})
    rep = Report(records, config.echo(), environment_stamp(), errors)
    if write and config.output_path:
        rep.write(config.output_path)
    return rep
