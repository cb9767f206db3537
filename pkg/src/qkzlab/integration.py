"""Adaptive quadrature along line-plus-loop paths, iterated integrals and the pairing.

Line part: global adaptive Gauss-Kronrod (7/15) with vector-valued panels;
the panel with the largest error estimate is bisected until the total
estimate drops below the requested tolerance.  The infinite line is
integrated on a core interval and then extended piece by piece; the masses
of the last two pieces give the exponential decay rate, and extension stops
once the geometric remainder is negligible.

Loop part: the periodic trapezoid rule on each circle, doubling the number
of nodes until two successive values agree.  For a function analytic in an
annulus around the circle this converges geometrically.

Iterated integrals run outer to inner in the order of
:func:`qkzlab.contours.term_pole_table`.  The innermost variable is
vectorised over a whole panel of nodes; every node of an outer variable
triggers a fresh inner integral on a contour rebuilt against that node.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .combinatorics import JTuple, NuVector, enumerate_z
from .contours import (ABOVE, BELOW, ContourConfig, PathSpec, PoleSpec, build_contour,
                       path_polyline, poles_from_table, term_pole_table, validate_contour)
from .errors import ConfigError, DomainViolation, ToleranceNotMet
from .params import Params
from .special_functions import log_phi
from .weights import GammaAssignment, PermTuple, eval_g, log_kernel, perm_tuples

__all__ = [
    "QuadratureConfig", "PairingMatrix", "integrate_path", "h_numeric", "g_k_numeric",
    "integrate_term", "term_contours", "pairing", "pairing_matrix", "TermResult",
    "PairingResult", "skew_factor",
]

_EPS = np.finfo(float).eps

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15)
_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])           # 15 nodes, ascending
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])[:7]
_GW[7] = _WG[-1]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for every integral.

    ``truncation_margin`` multiplies the truncation length found by the tail
    probe; 2.0 doubles T.  ``contour`` carries the path geometry.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    max_depth: int = 48
    truncation_margin: float = 1.0
    initial_panels: int = 16
    max_panels: int = 20_000
    loop_min: int = 8
    loop_max: int = 2048
    max_length: float = 20_000.0
    inner_factor: float = 0.1
    contour: ContourConfig = field(default_factory=ContourConfig)

    def __post_init__(self):
        if not 1e-14 <= self.rel_tol <= 1e-2:
            raise ConfigError(f"rel_tol must lie in [1e-14, 1e-2], got {self.rel_tol}")
        if self.abs_tol < 0 or self.truncation_margin < 1.0 or self.max_depth < 1:
            raise ConfigError("abs_tol >= 0, truncation_margin >= 1 and max_depth >= 1 required")

    def inner(self) -> "QuadratureConfig":
        """Tighter settings for nested integrals, so their error stays below the outer one."""
        return replace(self, rel_tol=max(self.rel_tol * self.inner_factor, 1e-14),
                       abs_tol=self.abs_tol * self.inner_factor)

    def with_delta(self, delta: float) -> "QuadratureConfig":
        return replace(self, contour=replace(self.contour, delta=delta))


def _evaluate(f, z, nom):
    out = f(z, nom)
    if isinstance(out, tuple):
        v, e = out
        return np.asarray(v, dtype=complex), np.asarray(e, dtype=float)
    v = np.asarray(out, dtype=complex)
    return v, np.zeros(v.shape, dtype=float)


# -- line ---------------------------------------------------------------------

def _panels(f, h: float, pairs: np.ndarray) -> tuple:
    """G7K15 on the panels ``pairs[i] = (a_i, b_i)`` in one vectorised call."""
    a = pairs[:, 0]
    b = pairs[:, 1]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    t = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    z = t + 1j * h
    v, e = _evaluate(f, z, z)
    v = v.reshape(len(a), 15)
    e = e.reshape(len(a), 15)
    k = (v @ _KW) * half
    g = (v @ _GW) * half
    mass = (np.abs(v) @ _KW) * np.abs(half)
    err = np.abs(k - g) + (e @ _KW) * np.abs(half)
    # keep roundoff-level panels from being split forever
    err = np.maximum(err, 50 * _EPS * mass)
    return k, err, mass


def _adaptive_line(f, h: float, lo: float, hi: float, cfg: QuadratureConfig, target_abs: float,
                   panels: int | None = None):
    n0 = max(1, panels or cfg.initial_panels)
    edges = np.linspace(lo, hi, n0 + 1)
    k, err, mass = _panels(f, h, np.column_stack([edges[:-1], edges[1:]]))
    heap = [(-err[i], float(edges[i]), float(edges[i + 1]), 0, complex(k[i]), float(mass[i]))
            for i in range(n0)]
    heapq.heapify(heap)
    total = complex(k.sum())
    tot_err = float(err.sum())
    tot_mass = float(mass.sum())
    count = n0
    while True:
        tol = max(target_abs, cfg.abs_tol, cfg.rel_tol * abs(total), 50 * _EPS * tot_mass)
        if tot_err <= tol:
            return total, tot_err, tot_mass
        batch = []
        acc = 0.0
        # split the worst panels together: one vectorised call per round
        while heap and (acc < tot_err - 0.5 * tol or not batch) and len(batch) < 64:
            item = heapq.heappop(heap)
            batch.append(item)
            acc += -item[0]
        if any(item[3] >= cfg.max_depth for item in batch) or count + len(batch) > cfg.max_panels:
            raise ToleranceNotMet(
                f"line quadrature stalled at error {tot_err:.3e} (target {tol:.3e}, "
                f"{count} panels)")
        ends = np.array([(it[1], it[2]) for it in batch])
        mids = 0.5 * (ends[:, 0] + ends[:, 1])
        # left halves first, then right halves
        halves = np.concatenate([np.column_stack([ends[:, 0], mids]),
                                 np.column_stack([mids, ends[:, 1]])])
        kk, ee, mm = _panels(f, h, halves)
        nb = len(batch)
        for i, item in enumerate(batch):
            _, a, b, depth, kold, mold = item
            total -= kold
            tot_err -= -item[0]
            tot_mass -= mold
            for side, (pa, pb) in ((i, (a, 0.5 * (a + b))), (i + nb, (0.5 * (a + b), b))):
                total += kk[side]
                tot_err += ee[side]
                tot_mass += mm[side]
                heapq.heappush(heap, (-ee[side], pa, pb, depth + 1, complex(kk[side]),
                                      float(mm[side])))
        count += nb
        # recompute the running sums now and then to shed accumulated rounding
        if count % 512 < nb:
            total = complex(sum(it[4] for it in heap))
            tot_err = float(sum(-it[0] for it in heap))
            tot_mass = float(sum(it[5] for it in heap))


def _tails(f, h: float, center: float, half: float, cfg: QuadratureConfig, scale_fn):
    """Integrate outward from center +- half in both directions, piece by piece.

    Pieces are half/2 long.  The ratio of the last two piece masses gives a
    measured exponential decay rate; the extension stops once the
    extrapolated remainder falls below a tenth of the tolerance.  With
    ``truncation_margin`` m > 1 it then continues until the total half-length
    has grown by the factor m.  The remainder extrapolated from the last two
    pieces is added to the error estimate.
    """
    val, err, mass = 0j, 0.0, 0.0
    step = 0.5 * half
    ends = []
    for direction in (+1, -1):
        x = half
        prev = None
        stop_at = None
        rem = 0.0
        while stop_at is None or x < stop_at:
            a, b = center + direction * x, center + direction * (x + step)
            v, e, m = _adaptive_line(f, h, min(a, b), max(a, b), cfg,
                                     0.1 * scale_fn(val, mass), panels=2)
            val, err, mass = val + v, err + e, mass + m
            x += step
            if m == 0.0:
                rem = 0.0
                stop_at = stop_at or cfg.truncation_margin * x
            elif prev:
                r = m / prev
                if r < 0.9:
                    rem = m * r / (1 - r)
                    if stop_at is None and rem <= 0.1 * scale_fn(val, mass):
                        stop_at = cfg.truncation_margin * x
            prev = m
            if x > cfg.max_length:
                raise ToleranceNotMet(f"integrand does not decay within {cfg.max_length} "
                                      f"(last piece mass {m:.3e})")
        # the extrapolated remainder beyond the last piece is part of the error
        err += rem
        ends.append(center + direction * x)
    return val, err, mass, ends[1], ends[0]


# -- loops ----------------------------------------------------------------------

def _loop_integral(f, loop, cfg: QuadratureConfig, target_abs: float):
    """Trapezoid rule on the circle, nodes doubled until the value settles."""
    M = cfg.loop_min
    th = 2 * np.pi * np.arange(M) / M
    w = loop.radius * np.exp(1j * th)
    z = loop.center + w
    nom = np.full(M, loop.center, dtype=complex)
    v, e = _evaluate(f, z, nom)
    # dz = i w dtheta, orientation flips the sign
    s = np.sum(v * 1j * w)
    es = np.sum(e * np.abs(w))
    mass = np.sum(np.abs(v) * np.abs(w))
    val = loop.orientation * s * 2 * np.pi / M
    while True:
        M2 = 2 * M
        th = 2 * np.pi * (np.arange(M) + 0.5) / M
        w = loop.radius * np.exp(1j * th)
        z = loop.center + w
        nom = np.full(M, loop.center, dtype=complex)
        v2, e2 = _evaluate(f, z, nom)
        s = s + np.sum(v2 * 1j * w)
        es = es + np.sum(e2 * np.abs(w))
        mass = mass + np.sum(np.abs(v2) * np.abs(w))
        new = loop.orientation * s * 2 * np.pi / M2
        diff = abs(new - val)
        M = M2
        val = new
        mass_int = mass * 2 * np.pi / M
        tol = max(target_abs, cfg.abs_tol, cfg.rel_tol * abs(val), 50 * _EPS * mass_int)
        inner_err = es * 2 * np.pi / M
        if diff <= tol:
            # the doubling difference overestimates the error of the finer rule
            return val, inner_err + min(diff, tol), mass_int
        if M >= cfg.loop_max:
            raise ToleranceNotMet(f"loop quadrature at {loop.center:.4g} did not settle "
                                  f"({diff:.3e} with {M} nodes)")


# -- public path integral ---------------------------------------------------------

def _integrate(f, path: PathSpec, cfg: QuadratureConfig, center: float, floor: float,
               target_abs: float = 0.0):
    """f(z, nominal) -> values or (values, errors).  Returns (value, err, mass, path).

    An infinite line is split into the core [center - floor, center + floor]
    and tail pieces (see :func:`_tails`).
    """
    val, err, mass = 0j, 0.0, 0.0
    for lp in path.loops:
        v, e, m = _loop_integral(f, lp, cfg, target_abs)
        val += v
        err += e
        mass += m
    if math.isfinite(path.t_lo) and math.isfinite(path.t_hi):
        lo, hi = path.t_lo, path.t_hi
        v, e, m = _adaptive_line(f, path.height, lo, hi, cfg, target_abs)
        return val + v, err + e, mass + m, path
    half = max(floor, 1.0)
    v, e, m = _adaptive_line(f, path.height, center - half, center + half, cfg, target_abs)
    val, err, mass = val + v, err + e, mass + m

    def scale(tail_val, tail_mass):
        tv, tm = val + tail_val, mass + tail_mass
        return max(target_abs, cfg.abs_tol, cfg.rel_tol * abs(tv), 50 * _EPS * tm)

    tv, te, tm, lo, hi = _tails(f, path.height, center, half, cfg, scale)
    return val + tv, err + te, mass + tm, path.with_truncation(lo, hi)


def integrate_path(f, path: PathSpec, cfg: QuadratureConfig | None = None, *,
                   center: float = 0.0, floor: float = 0.0) -> tuple[complex, float]:
    """Integrate a vectorised ``f(z)`` along ``path``.

    An infinite line is integrated on [center - floor, center + floor] and
    then extended outward until the tails are negligible.
    """
    cfg = cfg or QuadratureConfig()
    val, err, _, _ = _integrate(lambda z, nom: f(z), path, cfg, center, floor)
    return complex(val), float(err)


def _floor(params_or_periods) -> float:
    rho, lam = params_or_periods
    return 3.0 * max(rho, lam)


# -- one-point functions -------------------------------------------------------------

def _phi_pair(anchor: complex, n: int, active=(True, True)) -> list[PoleSpec]:
    off = 1j * math.pi / n
    return [PoleSpec(anchor - off, anchor - off, ABOVE, "phi", (0, 1), -off, active[0]),
            PoleSpec(anchor + off, anchor + off, BELOW, "phi", (0, 1), off, active[1])]


def h_numeric(x, n: int, rho: float, lam: float, cfg: QuadratureConfig | None = None,
              *, return_error: bool = False):
    """H(x) as the contour integral of phi(u) exp(2 pi x u / (rho lam)).

    The pole at -pi i/n lies above the path, the one at +pi i/n below.
    """
    cfg = cfg or QuadratureConfig()
    x = complex(x)
    edge = 0.5 * (rho + lam) + math.pi / n
    if abs(x.real) >= edge:
        raise DomainViolation(f"|Re x| = {abs(x.real):.6g} outside the strip |Re x| < {edge:.6g}")
    kappa = 2 * math.pi / (rho * lam)

    def f(z, nom):
        return np.exp(log_phi(z, n, rho, lam) + kappa * x * z)

    path = build_contour(_phi_pair(0j, n), n, rho, lam, cfg.contour)
    val, err, _, _ = _integrate(f, path, cfg, 0.0, _floor((rho, lam)))
    return (complex(val), float(err)) if return_error else complex(val)


def g_k_numeric(mu_seq, k: int, params: Params, cfg: QuadratureConfig | None = None, *,
                measure: str = "plain", return_error: bool = False):
    """Iterated k-fold integral defining the one-point function G_k.

    ``gamma_0 = 0`` and the integrand is
    prod_j phi(gamma_j - gamma_{j-1}) exp(kappa * sum_j gamma_j (mu_{j+1} - mu_j)).
    ``measure="plain"`` integrates d gamma; ``"display"`` uses d gamma / (2 pi i)
    per variable.
    """
    if measure not in ("plain", "display"):
        raise ConfigError(f"measure must be 'plain' or 'display', got {measure!r}")
    cfg = cfg or QuadratureConfig()
    n, rho, lam, kappa = params.n, params.rho, params.lam, params.kappa
    if not 0 <= k <= n - 1:
        raise DomainViolation(f"k={k} must lie in 0..{n - 1}")
    if k == 0:
        return (1.0 + 0j, 0.0) if return_error else 1.0 + 0j
    mu = [complex(m) for m in mu_seq]
    coef = [mu[j] - mu[j - 1] for j in range(1, k + 1)]
    floor = _floor((rho, lam))

    def level(j, prev, prev_nom, acc_log, c):
        """Integral over gamma_j .. gamma_k given gamma_{j-1} = prev."""
        path = build_contour(_phi_pair(prev, n), n, rho, lam, c.contour)
        # poles sit on actual anchors; the pinch test inside build_contour needs only those

        if j == k:
            def f(z, nom):
                return np.exp(acc_log + log_phi(z - prev, n, rho, lam) + kappa * coef[j - 1] * z)
        else:
            inner = c.inner()

            def f(z, nom):
                vals = np.empty(z.shape, dtype=complex)
                errs = np.empty(z.shape, dtype=float)
                base = log_phi(z - prev, n, rho, lam) + kappa * coef[j - 1] * z
                for i in range(z.size):
                    v, e = level(j + 1, z[i], nom[i], acc_log + base[i], inner)
                    vals[i], errs[i] = v, e
                return vals, errs

        val, err, _, _ = _integrate(f, path, c, float(np.real(prev)), floor)
        return val, err

    val, err = level(1, 0j, 0j, 0j, cfg)
    if measure == "display":
        scale = (2j * math.pi) ** (-k)
        val, err = val * scale, err * abs(scale)
    return (complex(val), float(err)) if return_error else complex(val)


# -- split terms and the pairing ----------------------------------------------------------

@dataclass
class TermResult:
    value: complex
    err: float
    evaluations: int
    sign: int


class _TermIntegrator:
    """Iterated integral of one split term K g_J^(rho)(gamma_sigma) g_J'^(lam)(gamma_sigma')."""

    def __init__(self, J: JTuple, Jp: JTuple, sigma: PermTuple, sigmap: PermTuple,
                 params: Params, cfg: QuadratureConfig):
        self.J, self.Jp, self.sigma, self.sigmap = J, Jp, sigma, sigmap
        self.params = params
        self.cfg = cfg
        self.nu = J.nu
        self.table = term_pole_table(J, Jp, sigma, sigmap)
        self.order = [(j, m) for j in range(1, self.nu.n) for m in range(1, self.nu.nu(j) + 1)]
        self.evaluations = 0
        self.floor = _floor((params.rho, params.lam))
        self.center = float(np.mean(np.real(params.beta)))

    def _assign(self, values: dict, last, z) -> GammaAssignment:
        levels = []
        for j in range(1, self.nu.n):
            row = []
            for m in range(1, self.nu.nu(j) + 1):
                row.append(z if (j, m) == last else values[(j, m)])
            levels.append(row)
        return GammaAssignment(self.nu, levels, self.params.beta)

    def _integrand(self, values: dict, var, z):
        g = self._assign(values, var, z)
        p = self.params
        self.evaluations += np.size(z)
        out = np.exp(log_kernel(g, p))
        out = out * eval_g(self.J, g.permuted(self.sigma), p.rho)
        out = out * eval_g(self.Jp, g.permuted(self.sigmap), p.lam)
        return np.broadcast_to(out, np.shape(z)).astype(complex)

    def run(self, k: int, actual: dict, nominal: dict, cfg: QuadratureConfig):
        var = self.order[k]
        poles = poles_from_table(self.table[var], self.nu.n, actual, nominal)
        p = self.params
        path = build_contour(poles, p.n, p.rho, p.lam, cfg.contour)
        if k == len(self.order) - 1:
            def f(z, nom):
                return self._integrand(actual, var, z)
        else:
            inner = cfg.inner()

            def f(z, nom):
                vals = np.empty(z.shape, dtype=complex)
                errs = np.empty(z.shape, dtype=float)
                for i in range(z.size):
                    a2 = dict(actual)
                    a2[var] = complex(z[i])
                    n2 = dict(nominal)
                    n2[var] = complex(nom[i])
                    vals[i], errs[i] = self.run(k + 1, a2, n2, inner)
                return vals, errs

        anchor_re = [np.real(actual[t.anchor]) for t in self.table[var]]
        center = float(np.mean(anchor_re)) if anchor_re else self.center
        val, err, _, _ = _integrate(f, path, cfg, center, self.floor)
        return val, err

    def integrate(self) -> TermResult:
        base = {(0, m): complex(b) for m, b in enumerate(self.params.beta, start=1)}
        if not self.order:
            v = complex(np.exp(log_kernel(self._assign({}, None, None), self.params)))
            return TermResult(v, 0.0, 1, self.sigma.sign * self.sigmap.sign)
        val, err = self.run(0, base, dict(base), self.cfg)
        return TermResult(complex(val), float(err), self.evaluations,
                          self.sigma.sign * self.sigmap.sign)


def term_contours(J: JTuple, Jp: JTuple, sigma: PermTuple, sigmap: PermTuple, params: Params,
                  cfg: QuadratureConfig | None = None) -> list[dict]:
    """The contour of every variable of one split term, for inspection.

    Outer variables are frozen at a representative point of their own path:
    the mean real part of their anchors, at the height of the line.
    """
    cfg = cfg or QuadratureConfig()
    ti = _TermIntegrator(J, Jp, sigma, sigmap, params, cfg)
    actual = {(0, m): complex(b) for m, b in enumerate(params.beta, start=1)}
    out = []
    for var in ti.order:
        poles = poles_from_table(ti.table[var], params.n, actual, dict(actual))
        path = build_contour(poles, params.n, params.rho, params.lam, cfg.contour)
        ok, margin = validate_contour(path, poles)
        anchors = [np.real(actual[t.anchor]) for t in ti.table[var]]
        rep = complex(float(np.mean(anchors)) if anchors else ti.center, path.height)
        out.append({"variable": list(var), "valid": bool(ok), "margin": float(margin),
                    "representative": [rep.real, rep.imag],
                    "poles": [{"position": [p.position.real, p.position.imag], "side": p.side,
                               "kind": p.kind, "anchor": list(p.anchor), "active": p.active}
                              for p in poles],
                    "path": path_polyline(path)})
        actual[var] = rep
    return out


def integrate_term(J: JTuple, Jp: JTuple, sigma: PermTuple, sigmap: PermTuple, params: Params,
                   cfg: QuadratureConfig | None = None) -> TermResult:
    """Iterated integral of K(gamma) g_J^(rho)(gamma_sigma) g_J'^(lam)(gamma_sigma')."""
    cfg = cfg or QuadratureConfig()
    return _TermIntegrator(J, Jp, sigma, sigmap, params, cfg).integrate()


@dataclass
class PairingResult:
    J: tuple
    Jp: tuple
    value: complex
    err: float
    terms: int
    evaluations: int
    wall_time: float

    def to_dict(self) -> dict:
        return {"J": list(self.J), "J'": list(self.Jp), "value_re": self.value.real,
                "value_im": self.value.imag, "err": self.err, "terms": self.terms,
                "evaluations": self.evaluations, "wall_time": self.wall_time}


def skew_factor(nu: NuVector) -> int:
    """prod_j nu_j!, the size of the permutation group acting on each side."""
    return math.prod(math.factorial(nu.nu(j)) for j in range(1, nu.n))


def pairing(J: JTuple, Jp: JTuple, params: Params, cfg: QuadratureConfig | None = None,
            *, mode: str = "full", detail: bool = False):
    """The pairing of w_J^(rho) and w_J'^(lam): the full double skew sum.

    ``mode="full"`` sums every signed (sigma, sigma') term.  ``mode="reduced"``
    relabels the variables so that sigma = id and multiplies the remaining
    signed sum over sigma' by prod_j nu_j!; both give the same number.
    """
    cfg = cfg or QuadratureConfig()
    if J.nu != Jp.nu:
        raise ConfigError(f"J={J.entries} and J'={Jp.entries} lie in different weight spaces")
    if mode not in ("full", "reduced"):
        raise ConfigError(f"mode must be 'full' or 'reduced', got {mode!r}")
    ok, window = params.mu_window()
    if not ok:
        raise DomainViolation(f"mu={params.mu} leaves no convergence window (interval {window})")
    t0 = time.perf_counter()
    total, err, terms, evals = 0j, 0.0, 0, 0
    perms = list(perm_tuples(J.nu))
    outer = perms if mode == "full" else [PermTuple.identity(J.nu)]
    # fixed order: the reduction is deterministic
    for s in outer:
        for sp in perms:
            r = integrate_term(J, Jp, s, sp, params, cfg)
            total += r.sign * r.value
            err += r.err
            terms += 1
            evals += r.evaluations
    if mode == "reduced":
        f = skew_factor(J.nu)
        total, err = total * f, err * f
    res = PairingResult(J.entries, Jp.entries, total, err, terms, evals,
                        time.perf_counter() - t0)
    return res if detail else res.value


@dataclass
class PairingMatrix:
    """Pairing values over Z x Z (rows J, columns J') with per-entry error estimates."""

    nu: NuVector
    basis: list
    values: np.ndarray
    errors: np.ndarray
    wall_time: float = 0.0
    entries: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def skew_factor(self) -> int:
        return skew_factor(self.nu)

    def det(self, normalized: bool = False) -> complex:
        """Determinant by Gaussian elimination with partial pivoting.

        ``normalized=True`` divides every entry by prod_j nu_j! first, which
        is the normalisation the closed-form determinant refers to.
        """
        a = np.array(self.values, dtype=complex)
        if normalized:
            a = a / self.skew_factor
        m = a.shape[0]
        d = 1.0 + 0j
        for c in range(m):
            p = c + int(np.argmax(np.abs(a[c:, c])))
            if a[p, c] == 0:
                return 0j
            if p != c:
                a[[c, p]] = a[[p, c]]
                d = -d
            d *= a[c, c]
            a[c + 1:, c:] -= np.outer(a[c + 1:, c] / a[c, c], a[c, c:])
        return complex(d)

    def det_error(self, normalized: bool = False) -> float:
        """First-order error bound of the determinant from the entry errors."""
        f = self.skew_factor if normalized else 1
        a = np.array(self.values, dtype=complex) / f
        errs = self.errors / f
        if a.size == 1:
            return float(errs[0, 0])
        try:
            adj = np.linalg.det(a) * np.linalg.inv(a).T
        except np.linalg.LinAlgError:
            return math.inf
        return float(np.sum(np.abs(adj) * errs))

    def max_rel_error(self) -> float:
        return float(np.max(self.errors / np.maximum(np.abs(self.values), 1e-300)))

    def to_dict(self) -> dict:
        return {"basis": [list(J.entries) for J in self.basis],
                "re": self.values.real.tolist(), "im": self.values.imag.tolist(),
                "err": self.errors.tolist(), "det": [self.det().real, self.det().imag],
                "skew_factor": self.skew_factor,
                "wall_time": self.wall_time}


def pairing_matrix(params: Params, nu: NuVector, cfg: QuadratureConfig | None = None,
                   *, mode: str = "full", workers: int = 1) -> PairingMatrix:
    """All pairings I(w_J, w_J') over Z_nu in canonical order.

    ``workers > 1`` spreads entries over processes; the result does not
    depend on the schedule.
    """
    cfg = cfg or QuadratureConfig()
    basis = enumerate_z(nu)
    jobs = [(J, Jp) for J in basis for Jp in basis]
    t0 = time.perf_counter()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_pair_job, [(J, Jp, params, cfg, mode) for J, Jp in jobs]))
    else:
        results = [_pair_job((J, Jp, params, cfg, mode)) for J, Jp in jobs]
    m = len(basis)
    vals = np.array([r.value for r in results], dtype=complex).reshape(m, m)
    errs = np.array([r.err for r in results], dtype=float).reshape(m, m)
    return PairingMatrix(nu, basis, vals, errs, time.perf_counter() - t0, results)


def _pair_job(args):
    J, Jp, params, cfg, mode = args
    return pairing(J, Jp, params, cfg, mode=mode, detail=True)
