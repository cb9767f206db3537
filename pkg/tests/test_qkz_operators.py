import cmath
import itertools
import math

import numpy as np
import pytest

from qkzlab.combinatorics import NuVector, lambda_invariants
from qkzlab.errors import DegenerateSpectral, ShapeMismatch
from qkzlab.params import Params, default_params
from qkzlab.qkz_operators import (c_constant, det_k_closed, e_function, g_k_closed, k_operator,
                                  k_operator_full, r_matrix, rhs_theorem)
from qkzlab.special_functions import Periods, h_closed

RHO, LAM = 7.3, 9.4


def test_r_at_zero_permutes_mixed_pairs():
    R = r_matrix(0.0, RHO, 3)
    for j, k in itertools.product(range(3), repeat=2):
        col = np.zeros(9)
        col[j * 3 + k] = 1
        out = R @ col
        want = np.zeros(9)
        want[k * 3 + j] = 1
        assert np.allclose(out, want, atol=1e-14)


def test_r_spot_entry():
    R = r_matrix(0.5, RHO, 2)
    want = math.sinh(math.pi * 0.5 / RHO) / cmath.sinh((math.pi / RHO) * (0.5 - 1j * math.pi))
    assert abs(R[1, 1] - want) < 1e-15


def test_r_preserves_weight():
    R = r_matrix(0.3 + 0.2j, LAM, 3)
    for row, col in itertools.product(range(9), repeat=2):
        if sorted(divmod(row, 3)) != sorted(divmod(col, 3)):
            assert R[row, col] == 0


def test_r_degenerate():
    with pytest.raises(DegenerateSpectral):
        r_matrix(2j * math.pi / 3, RHO, 3)


def test_single_site_operator():
    p = default_params(3, 1, mu=(0.1, 0.5, 1.7), beta=(0.4,))
    K = k_operator_full(1, p)
    assert np.allclose(K, np.diag([cmath.exp(-2j * math.pi * m / RHO) for m in p.mu]), atol=1e-15)
    for j, mu in enumerate(p.mu):
        lw = [0, 0, 0]
        lw[j] = 1
        assert abs(det_k_closed(1, p, lw) - cmath.exp(-2j * math.pi * mu / RHO)) < 1e-14


def test_k_operator_weight_closure():
    p = default_params(3, 3, beta=(0.0, 0.8, 2.1))
    K = k_operator_full(2, p, "lam")
    idx = [int(np.ravel_multi_index(w, (3, 3, 3))) for w in itertools.product(range(3), repeat=3)]
    for a in idx:
        for b in idx:
            wa = np.unravel_index(a, (3, 3, 3))
            wb = np.unravel_index(b, (3, 3, 3))
            if sorted(wa) != sorted(wb):
                assert abs(K[a, b]) < 1e-14


def test_k_operator_bad_shapes():
    p = default_params(2, 2)
    with pytest.raises(ShapeMismatch):
        k_operator(1, p, NuVector(3, (1,)))
    with pytest.raises(ShapeMismatch):
        k_operator_full(3, p)


@pytest.mark.parametrize("n,N", [(2, 2), (2, 3), (3, 2), (3, 3)])
@pytest.mark.parametrize("orientation", ["rho", "lam"])
def test_det_k_against_direct(n, N, orientation):
    rng = np.random.default_rng(n * 10 + N)
    for lw in itertools.product(range(N + 1), repeat=n):
        if sum(lw) != N:
            continue
        nu = NuVector.from_lambdas(lw)
        for _ in range(3):
            mu = tuple(np.sort(rng.uniform(0, 4, n)))
            p = Params(n, N, RHO, LAM, mu, tuple(rng.uniform(-2, 2, N)))
            for m in range(1, N + 1):
                direct = np.linalg.det(k_operator(m, p, nu, orientation))
                closed = det_k_closed(m, p, lw, orientation)
                assert abs(direct - closed) < 1e-11 * abs(closed)


@pytest.mark.parametrize("lw", [(1, 1), (2, 1), (1, 1, 1), (0, 2, 1)])
def test_e_difference_relations(lw):
    n, N = len(lw), sum(lw)
    p = default_params(n, N, beta=tuple(0.3 + 0.9 * r for r in range(N)))
    for orientation, shift in (("rho", LAM), ("lam", RHO)):
        for m in range(1, N + 1):
            b = list(p.beta)
            b[m - 1] = b[m - 1] - 1j * shift
            ratio = e_function(p.with_beta(b), lw) / e_function(p, lw)
            closed = det_k_closed(m, p, lw, orientation)
            assert abs(ratio - closed) < 1e-9 * abs(closed)


def test_e_single_site():
    p = default_params(2, 1, mu=(0.2, 1.3), beta=(0.7,))
    assert abs(e_function(p, (0, 1)) - cmath.exp(p.kappa * 1.3 * 0.7)) < 1e-14


@pytest.mark.parametrize("lw", [(1, 1), (0, 2), (2, 1), (1, 2), (1, 1, 0), (0, 1, 1), (1, 1, 1)])
def test_rhs_factorizes(lw):
    n, N = len(lw), sum(lw)
    p = default_params(n, N)
    rhs = rhs_theorem(p, lw)
    assert abs(rhs - c_constant(p, lw) * e_function(p, lw)) < 1e-9 * abs(rhs)


def test_c_constant_independent_of_beta():
    p = default_params(2, 2)
    a = c_constant(p, (1, 1))
    b = c_constant(p.with_beta((0.3, -1.2)), (1, 1))
    assert a == b


def test_trivial_weight_has_no_s2_content():
    p = default_params(2, 2, beta=(0.4, 1.1))
    assert abs(rhs_theorem(p, (2, 0)) - c_constant(p, (2, 0)) * e_function(p, (2, 0))) < 1e-14
    assert lambda_invariants((2, 0)).lambda2 == 0


def test_binomial_exponents_are_integers():
    for lw in itertools.product(range(4), repeat=3):
        if not 1 <= sum(lw) <= 5:
            continue
        l0 = lambda_invariants(lw).lambda0
        for r in range(3):
            for rp in range(r):
                assert l0 % math.comb(lw[r] + lw[rp], lw[r]) == 0


def test_g_k_closed_small_k():
    p = default_params(3, 1, mu=(0.0, 2.0, 4.5))
    assert g_k_closed(p.mu, 0, p) == 1
    P = Periods(RHO, LAM)
    assert abs(g_k_closed(p.mu, 1, p) - h_closed(2.0, 3, P)) < 1e-13 * abs(h_closed(2.0, 3, P))
    want = h_closed(4.5, 3, P) * h_closed(2.5, 3, P)
    assert abs(g_k_closed(p.mu, 2, p) - want) < 1e-12 * abs(want)


def test_q_on_unit_circle():
    p = default_params(3, 2)
    assert abs(abs(p.q) - 1) < 1e-15 and abs(abs(p.q_prime) - 1) < 1e-15
