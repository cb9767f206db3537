import math

import numpy as np
import pytest

from qkzlab.combinatorics import JTuple, NuVector
from qkzlab.contours import ABOVE, BELOW, PathSpec, PoleSpec, build_contour
from qkzlab.errors import ConfigError, DomainViolation
from qkzlab.integration import (QuadratureConfig, g_k_numeric, h_numeric, integrate_path,
                                integrate_term, pairing, pairing_matrix, skew_factor)
from qkzlab.params import default_params
from qkzlab.qkz_operators import g_k_closed, rhs_theorem
from qkzlab.special_functions import Periods, h_closed
from qkzlab.weights import PermTuple

RHO, LAM = 7.3, 9.4


def rel(a, b):
    return abs(a - b) / abs(b)


def test_gaussian_calibration():
    val, err = integrate_path(lambda z: np.exp(-z * z), PathSpec(0.0).with_truncation(-10, 10))
    assert abs(val - math.sqrt(math.pi)) < 1e-10
    assert err < 1e-9


def test_infinite_line_is_truncated_adaptively():
    val, _ = integrate_path(lambda z: 1 / np.cosh(z), PathSpec(0.0), center=0.0, floor=5.0)
    assert abs(val - math.pi) < 1e-9


def test_shifted_line_gives_the_same_integral():
    f = lambda z: np.exp(-z * z / 3 + 0.4j * z)
    a, _ = integrate_path(f, PathSpec(0.0), floor=10.0)
    b, _ = integrate_path(f, PathSpec(0.6), floor=10.0)
    assert abs(a - b) < 1e-10


def test_loop_picks_up_a_residue():
    # 1/(z - p) e^{-z^2}: a pole that must lie above the path, placed below the line
    p = 0.3 - 0.2j
    pole = PoleSpec(p, p, ABOVE, "phi", (0, 1), 0j, True)
    path = build_contour([pole], 2, RHO, LAM)
    f = lambda z: np.exp(-z * z) / (z - p)
    with_loop, _ = integrate_path(f, path, floor=10.0)
    below, _ = integrate_path(f, PathSpec(-0.5), floor=10.0)
    assert abs(with_loop - below) < 1e-9
    plain, _ = integrate_path(f, PathSpec(path.height), floor=10.0)
    assert abs(with_loop - plain - 2j * math.pi * np.exp(-p * p)) < 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_h_numeric_matches_closed_form(n):
    P = Periods(RHO, LAM)
    tol = 1e-8 if n == 2 else 1e-7
    for x in (0.0, 1.5, -2.0 + 0.5j):
        assert rel(h_numeric(x, n, RHO, LAM), h_closed(x, n, P)) < tol


def test_h_numeric_near_strip_edge():
    x = 0.95 * (0.5 * (RHO + LAM) + math.pi / 2)
    got = h_numeric(x, 2, RHO, LAM, QuadratureConfig(rel_tol=1e-9))
    assert rel(got, h_closed(x, 2, Periods(RHO, LAM))) < 1e-6


def test_h_numeric_outside_strip():
    with pytest.raises(DomainViolation):
        h_numeric(0.5 * (RHO + LAM) + 2.0, 2, RHO, LAM)


def test_g1_matches_h():
    p = default_params(2, 1, mu=(0.0, 2.2))
    assert rel(g_k_numeric(p.mu, 1, p), h_closed(2.2, 2, Periods(RHO, LAM))) < 1e-8


def test_g2_matches_closed_form():
    p = default_params(3, 1, mu=(0.0, 2.0, 4.5))
    got = g_k_numeric(p.mu, 2, p, QuadratureConfig(rel_tol=1e-6))
    assert rel(got, g_k_closed(p.mu, 2, p)) < 1e-6


def test_display_measure_scale():
    p = default_params(3, 1, mu=(0.0, 2.0, 4.5))
    plain = g_k_numeric(p.mu, 1, p)
    disp = g_k_numeric(p.mu, 1, p, measure="display")
    assert abs(disp / plain - 1 / (2j * math.pi)) < 1e-14
    assert g_k_numeric(p.mu, 0, p) == 1
    with pytest.raises(ConfigError):
        g_k_numeric(p.mu, 1, p, measure="other")
    with pytest.raises(DomainViolation):
        g_k_numeric(p.mu, 3, p)


def test_config_validation():
    with pytest.raises(ConfigError):
        QuadratureConfig(rel_tol=1e-16)
    with pytest.raises(ConfigError):
        QuadratureConfig(truncation_margin=0.5)


def test_pairing_rejects_mu_outside_window():
    p = default_params(3, 2, mu=(0.0, 0.1, 9.0))
    J = JTuple((1, 2), 3)
    with pytest.raises(DomainViolation):
        pairing(J, J, p)


def test_pairing_rejects_mixed_weights():
    p = default_params(2, 2)
    with pytest.raises(ConfigError):
        pairing(JTuple((0, 1), 2), JTuple((1, 1), 2), p)


def test_one_dimensional_term_is_stable():
    p = default_params(2, 2)
    J, Jp = JTuple((0, 1), 2), JTuple((1, 0), 2)
    ident = PermTuple.identity(J.nu)
    a = integrate_term(J, Jp, ident, ident, p, QuadratureConfig(rel_tol=1e-10))
    b = integrate_term(J, Jp, ident, ident, p, QuadratureConfig(rel_tol=1e-10).with_delta(0.2))
    c = integrate_term(J, Jp, ident, ident, p, QuadratureConfig(rel_tol=1e-10, truncation_margin=2))
    assert abs(a.value - b.value) < 1e-8 * abs(a.value)
    assert abs(a.value - c.value) < 1e-8 * abs(a.value)


def test_pairing_is_deterministic():
    p = default_params(2, 2)
    J, Jp = JTuple((0, 1), 2), JTuple((1, 0), 2)
    assert pairing(J, Jp, p) == pairing(J, Jp, p)


def test_matrix_and_theorem_1d():
    p = default_params(2, 2)
    M = pairing_matrix(p, NuVector.from_lambdas((1, 1)))
    assert M.size == 2 and M.skew_factor == 1
    assert abs(M.det() - np.linalg.det(M.values)) < 1e-13 * abs(M.det())
    assert M.max_rel_error() < 1e-8
    assert rel(M.det(normalized=True), rhs_theorem(p, (1, 1))) < 1e-6
    d = M.to_dict()
    assert d["basis"] == [[0, 1], [1, 0]]


def test_matrix_workers_agree():
    p = default_params(2, 2)
    nu = NuVector.from_lambdas((1, 1))
    a = pairing_matrix(p, nu)
    b = pairing_matrix(p, nu, workers=2)
    assert np.array_equal(a.values, b.values)


def test_skew_factor():
    assert skew_factor(NuVector(3, (2, 1))) == 2
    assert skew_factor(NuVector(4, (3, 2))) == 12


@pytest.mark.slow
def test_full_and_reduced_sums_agree():
    p = default_params(2, 2)
    J = JTuple((1, 1), 2)
    cfg = QuadratureConfig(rel_tol=1e-6)
    full = pairing(J, J, p, cfg, mode="full", detail=True)
    red = pairing(J, J, p, cfg, mode="reduced", detail=True)
    assert full.terms == 4 and red.terms == 2
    assert abs(full.value - red.value) <= full.err + red.err
    assert rel(full.value / 2, rhs_theorem(p, (0, 2))) < 1e-5
