"""Pole bookkeeping and admissible contours for the iterated integrals.

Every integration variable sees near-axis poles of two kinds, each tied to an
anchor that is already fixed when the variable is integrated:

* phi(gamma_{j,m} - gamma_{j-1,m'}): a pole at anchor - pi i/n that must lie
  above the contour and one at anchor + pi i/n that must lie below;
* psi(gamma_{j,m} - gamma_{j,m'}) for an earlier variable m' of the same
  level: anchor + 2 pi i/n above, anchor - 2 pi i/n below.

Lattice copies shifted by rho*i*a + lam*i*b with a + b >= 1 sit at distance
at least min(rho, lam) - 2pi/n from the anchor and never come near a path.

A zero of one of the sinh factors in g_J^(rho)(gamma_sigma) or
g_J'^(lam)(gamma_sigma') removes a pole exactly; such a pole imposes no side
condition (it is kept in the table, flagged inactive, so paths still keep
clear of it).

A path is a horizontal line Im z = h from -T to +T plus small circles around
active poles that sit on the wrong side of the line: counter-clockwise around
a pole that must be above but lies below, clockwise in the opposite case.
This is homologous to the usual indented real line and keeps every circle
away from the line's quadrature panels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import JTuple
from .errors import BandOverflow, UnresolvedPinch
from .weights import PermTuple

__all__ = [
    "PoleTemplate", "PoleSpec", "Loop", "PathSpec", "ContourConfig", "term_pole_table",
    "active_poles", "poles_from_table", "build_contour", "validate_contour", "path_polyline",
    "lattice_instances", "PINCH_TOL",
]

PINCH_TOL = 1e-9
ABOVE, BELOW = "above", "below"


@dataclass(frozen=True)
class PoleTemplate:
    """A potential pole of one variable, relative to an anchor variable.

    ``anchor`` is (level, index) with level 0 meaning beta_index.
    ``offset`` is the imaginary shift in units of pi i / n (so -1, +1, +2, -2).
    """

    anchor: tuple[int, int]
    offset: int
    side: str
    kind: str
    active: bool


@dataclass(frozen=True)
class PoleSpec:
    position: complex
    nominal: complex
    side: str
    kind: str
    anchor: tuple[int, int]
    offset: complex
    active: bool
    lattice: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Loop:
    center: complex
    radius: float
    orientation: int  # +1 counter-clockwise, -1 clockwise
    members: tuple[int, ...] = ()


@dataclass(frozen=True)
class PathSpec:
    height: float
    loops: tuple[Loop, ...] = ()
    t_lo: float = -math.inf
    t_hi: float = math.inf
    delta: float = 0.0

    def with_truncation(self, lo: float, hi: float) -> "PathSpec":
        return PathSpec(self.height, self.loops, lo, hi, self.delta)


@dataclass(frozen=True)
class ContourConfig:
    """Geometry knobs.  ``delta`` is the nominal clearance and loop radius."""

    delta: float | None = None
    max_height: float | None = None
    band: float | None = None
    candidates: int = 401
    extra: dict = field(default_factory=dict)

    def resolved_delta(self, n: int) -> float:
        return self.delta if self.delta is not None else math.pi / (4 * n)


def lattice_instances(pole: PoleSpec, rho: float, lam: float, amax: int = 2):
    """Copies of ``pole`` with a + b >= 1 (a, b <= amax), shifted away from the axis."""
    sgn = 1 if pole.side == ABOVE else -1
    out = []
    for a in range(amax + 1):
        for b in range(amax + 1):
            if a + b:
                out.append(pole.position + sgn * 1j * (a * rho + b * lam))
    return out


# -- cancellation table -----------------------------------------------------

def _position(perm_j: tuple[int, ...], m: int) -> int:
    """1-based position k with sigma(k) = m."""
    return perm_j.index(m - 1) + 1


def _killed(J: JTuple, sigma: PermTuple, j: int, m: int, anchor: tuple[int, int]) -> set[str]:
    """Which sides of the (variable, anchor) pole pair are zeros of g_J(gamma_sigma)."""
    lvl, mp = anchor
    if lvl == j - 1:
        mhat = _position(sigma.perms[j - 1], m)
        mtil = mp if lvl == 0 else _position(sigma.perms[lvl - 1], mp)
        r_out, r_in = J.r(j - 1, mtil), J.r(j, mhat)
        if r_out < r_in:
            return {ABOVE}
        if r_in < r_out:
            return {BELOW}
        return set()
    # same level: factor sh(gamma_{sigma(b)} - gamma_{sigma(a)} - 2 pi i/n), a < b
    pos_m = _position(sigma.perms[j - 1], m)
    pos_a = _position(sigma.perms[j - 1], mp)
    return {ABOVE} if pos_m > pos_a else {BELOW}


def term_pole_table(J: JTuple, Jp: JTuple, sigma: PermTuple, sigmap: PermTuple):
    """Symbolic near-axis poles for every variable of the split integrand.

    Returns {(j, m): [PoleTemplate, ...]} over the integration order
    j = 1..n-1, m = 1..nu_j.  Anchors are the variables of the previous
    level and the earlier variables of the same level.
    """
    nu = J.nu
    table = {}
    for j in range(1, nu.n):
        for m in range(1, nu.nu(j) + 1):
            rows = []
            anchors = [(j - 1, mp) for mp in range(1, nu.nu(j - 1) + 1)]
            anchors += [(j, mp) for mp in range(1, m)]
            for anc in anchors:
                killed = _killed(J, sigma, j, m, anc) | _killed(Jp, sigmap, j, m, anc)
                kind = "phi" if anc[0] == j - 1 else "psi"
                off = 1 if kind == "phi" else 2
                rows.append(PoleTemplate(anc, -off if kind == "phi" else off, ABOVE, kind,
                                         ABOVE not in killed))
                rows.append(PoleTemplate(anc, off if kind == "phi" else -off, BELOW, kind,
                                         BELOW not in killed))
            table[(j, m)] = rows
    return table


def poles_from_table(templates, n: int, actual: dict, nominal: dict) -> list[PoleSpec]:
    """Place symbolic poles at the current anchor values.

    ``actual`` and ``nominal`` map (level, index) to values.  Nominal values
    put a variable that runs on a loop at that loop's center; they are kept
    for diagnostics.  Two active poles with opposite side requirements at
    the same actual point raise :class:`UnresolvedPinch`.
    """
    unit = 1j * math.pi / n
    out = []
    for t in templates:
        off = t.offset * unit
        out.append(PoleSpec(actual[t.anchor] + off, nominal[t.anchor] + off, t.side, t.kind,
                            t.anchor, off, t.active))
    _check_pinch(out)
    return out


def _check_pinch(poles: list[PoleSpec]):
    act = [p for p in poles if p.active]
    for i, p in enumerate(act):
        for q in act[i + 1:]:
            if p.side != q.side and abs(p.position - q.position) < PINCH_TOL:
                raise UnresolvedPinch(
                    f"poles {p.anchor}{p.side} and {q.anchor}{q.side} pinch at {p.position:.6g}")


def active_poles(J: JTuple, Jp: JTuple, sigma: PermTuple, sigmap: PermTuple, j: int, m: int,
                 outer_points: dict, nominal: dict | None = None) -> list[PoleSpec]:
    """Near-axis poles of gamma_{j,m} for one split term, given fixed anchor values.

    ``outer_points`` maps (0, m) to beta_m and (level, index) to the values of
    already-integrated variables.  Inactive poles are returned with
    ``active=False``.
    """
    table = term_pole_table(J, Jp, sigma, sigmap)
    nominal = outer_points if nominal is None else nominal
    return poles_from_table(table[(j, m)], J.n, outer_points, nominal)


# -- geometry ------------------------------------------------------------------

def _choose_height(ims: np.ndarray, hmax: float, ncand: int) -> tuple[float, float]:
    """Height in [-hmax, hmax] maximising the distance to the given Im values."""
    cand = np.linspace(-hmax, hmax, ncand)
    cand = np.concatenate([cand, [0.0]])
    if ims.size == 0:
        return 0.0, math.inf
    gap = np.abs(cand[:, None] - ims[None, :]).min(axis=1)
    best = gap.max()
    # among near-optimal heights prefer the one closest to the real axis
    ok = gap >= best * (1 - 1e-9)
    idx = np.flatnonzero(ok)
    k = idx[np.argmin(np.abs(cand[idx]))]
    return float(cand[k]), float(gap[k])


def build_contour(poles: list[PoleSpec], n: int, rho: float, lam: float,
                  cfg: ContourConfig | None = None) -> PathSpec:
    """Line plus corrective loops putting every active pole on its required side."""
    cfg = cfg or ContourConfig()
    delta = cfg.resolved_delta(n)
    band = cfg.band if cfg.band is not None else min(rho, lam) - 2 * math.pi / n
    hmax = cfg.max_height if cfg.max_height is not None else 0.5 * math.pi / n
    _check_pinch(poles)
    pos = np.array([p.position for p in poles], dtype=complex)
    h, _ = _choose_height(pos.imag, hmax, cfg.candidates)
    loops = []
    done = set()
    for i, p in enumerate(poles):
        if not p.active or i in done:
            continue
        below_line = p.position.imag < h
        wrong = (p.side == ABOVE and below_line) or (p.side == BELOW and not below_line)
        if not wrong:
            continue
        # exact coincidences (same side) share one loop
        members = [k for k, q in enumerate(poles)
                   if k not in done and abs(q.position - p.position) < 1e-6
                   and (q.side == p.side or not q.active)]
        done.update(members)
        center = p.position
        others = [abs(q.position - center) for k, q in enumerate(poles) if k not in members]
        far = min(others) if others else math.inf
        radius = min(delta, 0.45 * far)
        if radius < 1e-6:
            raise UnresolvedPinch(f"no room for a loop around {center:.6g} (nearest pole {far:.3g})")
        loops.append(Loop(complex(center), float(radius), 1 if p.side == ABOVE else -1,
                          tuple(members)))
    path = PathSpec(h, tuple(loops), delta=delta)
    extent = max([abs(h)] + [abs(lp.center.imag) + lp.radius for lp in loops])
    if extent >= band:
        raise BandOverflow(f"path reaches |Im| = {extent:.3g}, band limit {band:.3g}")
    return path


def _winding_side(path: PathSpec, z: complex) -> str:
    below = 1 if z.imag < path.height else 0
    for lp in path.loops:
        if abs(z - lp.center) < lp.radius:
            below -= lp.orientation
    if below not in (0, 1):
        return "invalid"
    return BELOW if below else ABOVE


def validate_contour(path: PathSpec, poles: list[PoleSpec]) -> tuple[bool, float]:
    """Every active pole on its required side, with a clearance margin.

    Returns (ok, minimum margin).  The margin is the distance of the pole to
    the line and to every circle; it must reach half of the smaller of delta
    and the smallest loop radius (loops shrink near crowded poles).
    """
    margin = math.inf
    ok = True
    for p in poles:
        if not p.active:
            continue
        d = abs(p.position.imag - path.height)
        for lp in path.loops:
            d = min(d, abs(abs(p.position - lp.center) - lp.radius))
        margin = min(margin, d)
        if _winding_side(path, p.position) != p.side:
            ok = False
    need = 0.5 * min([path.delta] + [lp.radius for lp in path.loops])
    return ok and margin >= need, margin


def path_polyline(path: PathSpec, samples: int = 64) -> dict:
    """JSON-friendly polylines: the line and one closed ring per loop."""
    lo = path.t_lo if math.isfinite(path.t_lo) else -50.0
    hi = path.t_hi if math.isfinite(path.t_hi) else 50.0
    line = [[lo, path.height], [hi, path.height]]
    rings = []
    th = np.linspace(0, 2 * np.pi, samples + 1)
    for lp in path.loops:
        z = lp.center + lp.radius * np.exp(1j * th * lp.orientation)
        rings.append({"center": [lp.center.real, lp.center.imag], "radius": lp.radius,
                      "orientation": "ccw" if lp.orientation > 0 else "cw",
                      "points": [[float(v.real), float(v.imag)] for v in z]})
    return {"height": path.height, "line": line, "loops": rings}
