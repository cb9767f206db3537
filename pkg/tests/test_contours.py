import itertools
import math

import pytest

from qkzlab.combinatorics import JTuple, NuVector, enumerate_z
from qkzlab.contours import (ABOVE, BELOW, ContourConfig, Loop, PathSpec, PoleSpec, active_poles,
                             build_contour, lattice_instances, path_polyline, term_pole_table,
                             validate_contour)
from qkzlab.errors import BandOverflow, UnresolvedPinch
from qkzlab.weights import PermTuple, perm_tuples

RHO, LAM = 7.3, 9.4


def pole(pos, side, active=True):
    return PoleSpec(pos, pos, side, "phi", (0, 1), 0j, active)


def test_single_site_poles():
    J = JTuple((1,), 2)
    ident = PermTuple.identity(J.nu)
    poles = active_poles(J, J, ident, ident, 1, 1, {(0, 1): 0.5})
    got = {(p.side, p.position) for p in poles}
    assert got == {(ABOVE, 0.5 - 1j * math.pi / 2), (BELOW, 0.5 + 1j * math.pi / 2)}
    assert all(p.active for p in poles)
    # both poles start on the wrong side of the real line, so each gets a loop
    path = build_contour(poles, 2, RHO, LAM)
    assert path.height == 0.0
    assert sorted(lp.orientation for lp in path.loops) == [-1, 1]
    assert validate_contour(path, poles)[0]


def test_sinh_zero_cancels_pole():
    # J = (0, 1): r_{0,1} = 1 < r_{1,1} = 2, so g carries sh(gamma - beta_1 + pi i/n)
    J = JTuple((0, 1), 2)
    ident = PermTuple.identity(J.nu)
    rows = term_pole_table(J, J, ident, ident)[(1, 1)]
    beta1 = [t for t in rows if t.anchor == (0, 1)]
    assert {t.side for t in beta1 if not t.active} == {ABOVE}
    # same site as the variable: nothing cancels
    beta2 = [t for t in rows if t.anchor == (0, 2)]
    assert all(t.active for t in beta2)
    rows = term_pole_table(JTuple((1, 0), 2), J, ident, ident)[(1, 1)]
    assert {t.side for t in rows if t.anchor == (0, 2) and not t.active} == {BELOW}


def test_lattice_copies_leave_the_band():
    p = pole(0.3 + 1j * math.pi / 3, BELOW)
    for n in (2, 3):
        for z in lattice_instances(p, RHO, LAM):
            assert abs(z.imag) >= min(RHO, LAM) - 2 * math.pi / n


def test_no_poles_gives_plain_line():
    path = build_contour([], 2, RHO, LAM)
    assert path.loops == () and path.height == 0.0
    assert validate_contour(path, []) == (True, math.inf)


def test_wrong_side_pole_gets_a_loop():
    poles = [pole(0.0 + 0.1j, ABOVE), pole(0.0 + 0.2j, BELOW)]
    path = build_contour(poles, 2, RHO, LAM)
    assert validate_contour(path, poles)[0]
    assert len(path.loops) >= 1


def test_separate_loops_are_disjoint():
    n = 2
    d = math.pi / (4 * n)
    poles = [pole(0.0 - 0.2j, BELOW), pole(5 * d - 0.2j, BELOW), pole(0.0 - 1.5j, ABOVE),
             pole(5 * d - 1.5j, ABOVE)]
    path = build_contour(poles, n, RHO, LAM, ContourConfig(max_height=0.0))
    assert len(path.loops) == 2
    a, b = path.loops
    assert abs(a.center - b.center) > a.radius + b.radius
    assert validate_contour(path, poles)[0]


def test_displaced_loop_fails_validation():
    p = pole(0.0 - math.pi / 2 * 1j, ABOVE)
    path = build_contour([p], 2, RHO, LAM)
    assert validate_contour(path, [p])[0]
    (lp,) = path.loops
    moved = PathSpec(path.height, (Loop(lp.center - 2j * path.delta, lp.radius, lp.orientation),),
                     delta=path.delta)
    assert not validate_contour(moved, [p])[0]
    assert not validate_contour(PathSpec(0.0, (), delta=path.delta), [p])[0]


def test_pinch_detected():
    with pytest.raises(UnresolvedPinch):
        build_contour([pole(0.2j, ABOVE), pole(0.2j, BELOW)], 2, RHO, LAM)


def test_inactive_coincidence_is_not_a_pinch():
    poles = [pole(0.2j, ABOVE), pole(0.2j, BELOW, active=False)]
    path = build_contour(poles, 2, RHO, LAM)
    assert validate_contour(path, poles)[0]


def test_band_overflow():
    with pytest.raises(BandOverflow):
        build_contour([pole(0.1 - 0.5j, BELOW)], 2, RHO, LAM, ContourConfig(band=0.2, delta=0.3))


@pytest.mark.parametrize("n,N", [(2, 2), (2, 3), (3, 2)])
def test_outer_level_never_pinches(n, N):
    """First variable against the real anchors for every term of every small weight space."""
    for lw in itertools.product(range(N + 1), repeat=n):
        if sum(lw) != N or sum(NuVector.from_lambdas(lw).levels) > 3:
            continue
        nu = NuVector.from_lambdas(lw)
        if nu.n_variables == 0:
            continue
        beta = {(0, m): 1.3 * (m - 1) for m in range(1, N + 1)}
        for J, Jp in itertools.product(enumerate_z(nu), repeat=2):
            for s, sp in itertools.product(perm_tuples(nu), repeat=2):
                poles = active_poles(J, Jp, s, sp, 1, 1, beta)
                path = build_contour(poles, n, RHO, LAM)
                assert validate_contour(path, poles)[0]


def test_polyline_shape():
    path = PathSpec(0.1, (Loop(0.5 - 0.5j, 0.2, -1),), delta=0.2).with_truncation(-3, 3)
    out = path_polyline(path, samples=8)
    assert out["line"] == [[-3, 0.1], [3, 0.1]]
    ring = out["loops"][0]
    assert ring["orientation"] == "cw" and len(ring["points"]) == 9
