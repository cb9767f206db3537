import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from qkzlab import _kernels_py
from qkzlab._backend import compiled, kernels
from qkzlab.errors import ConfigError, PoleProximity
from qkzlab.special_functions import (Periods, h_closed, log_s2, log_s2_array, phi, psi, s2,
                                      s2_array, s2_asymptotic, s2_table)

W1, W2 = 7.3, 9.4
P = Periods(W1, W2)


def rel(a, b):
    return abs(a - b) / abs(b)


# -- frozen oracle values -------------------------------------------------------

def test_frozen_s2_values(frozen):
    for rec in frozen["s2"]:
        x = complex(*rec["x"])
        ref = complex(*rec["value"])
        got = s2_array(np.array([x]), *rec["periods"])[0]
        assert rel(got, ref) < 1e-12, (x, rec["periods"])


def test_frozen_phi_psi_h(frozen):
    for rec in frozen["phi"]:
        assert rel(phi(complex(*rec["x"]), rec["n"], Periods(*rec["periods"])),
                   complex(*rec["value"])) < 1e-12
    for rec in frozen["psi"]:
        assert rel(psi(complex(*rec["x"]), rec["n"], Periods(*rec["periods"])),
                   complex(*rec["value"])) < 1e-12
    from qkzlab.special_functions import log_h_closed
    for rec in frozen["h"]:
        got = np.exp(log_h_closed(np.array([complex(*rec["x"])]), rec["n"], *rec["periods"]))[0]
        assert rel(got, complex(*rec["value"])) < 1e-12


def test_log_s2_at_two_is_real_positive(frozen):
    v = s2(2.0, P)
    assert abs(v.imag) < 1e-15
    assert v.real == pytest.approx(frozen["s2"][0]["value"][0], rel=1e-13)


# -- defining relations --------------------------------------------------------

finite = dict(allow_nan=False, allow_infinity=False)
LATTICE = [a * W1 + b * W2 for a in range(-4, 5) for b in range(-4, 5)]


def off_lattice(x, gap=1e-3):
    return min(abs(x - p) for p in LATTICE) > gap


@settings(max_examples=60, deadline=None)
@given(st.floats(-16.0, 16.0, **finite), st.floats(-5.0, 5.0, **finite))
def test_shift_relations(re, im):
    x = complex(re, im)
    assume(off_lattice(x))
    for a, b in ((W1, W2), (W2, W1)):
        assume(abs(cmath.sin(math.pi * x / b)) > 1e-3)
        lhs = np.exp(log_s2_array([x + a], W1, W2)[0] - log_s2_array([x], W1, W2)[0])
        assert rel(lhs, 1 / (2 * cmath.sin(math.pi * x / b))) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(-16.0, 16.0, **finite), st.floats(-5.0, 5.0, **finite))
def test_reflection_and_period_symmetry(re, im):
    x = complex(re, im)
    W = W1 + W2
    assume(off_lattice(x) and off_lattice(W - x))
    both = np.exp(log_s2_array([x], W1, W2)[0] + log_s2_array([W - x], W1, W2)[0])
    assert abs(both - 1) < 1e-10
    assert rel(s2_array([x], W2, W1)[0], s2_array([x], W1, W2)[0]) < 1e-12


def test_normalization_at_origin():
    c = 2 * math.pi / math.sqrt(W1 * W2)
    for ang in (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi):
        x = 1e-6 * cmath.exp(1j * ang)
        assert rel(s2(x, P) / x, c) < 1e-6
        odd = 0.5 * (s2(x, P) - s2(-x, P))
        assert rel(odd, c * x) < 1e-10


def test_zero_and_pole_lattice():
    assert s2(0.0, P) == 0
    assert s2(-W1, P) == 0
    for a in range(3):
        for b in range(3):
            z = -(a * W1 + b * W2)
            assert abs(s2(z + 1e-10, P)) < 1e-8
    for a in (1, 2):
        for b in (1, 2):
            p = a * W1 + b * W2
            with pytest.raises(PoleProximity):
                s2(p, P)
            assert 1 / abs(s2(p + 1e-10j, P)) < 1e-8


def test_zero_can_raise():
    with pytest.raises(PoleProximity):
        log_s2_array([-W2], W1, W2, on_zero="raise")


def test_rational_period_ratio_rejected():
    with pytest.raises(ConfigError):
        Periods(8.1, 11.7)
    with pytest.raises(ConfigError):
        Periods(1.0, -1.0)


# -- asymptotics -----------------------------------------------------------------

def test_asymptote_upper_and_lower():
    x = complex(1, 40)
    assert abs(log_s2(x, P) - s2_asymptotic(x, +1, P)) < 1e-3
    y = complex(1, -40)
    d = log_s2(y, P) - s2_asymptotic(y, -1, P)
    # only exp() is meaningful: compare modulo 2 pi i
    assert abs(d - 2j * math.pi * round(d.imag / (2 * math.pi))) < 1e-3


def test_asymptote_pair_identity():
    a, x = 1.7, complex(0.3, 30)
    lhs = s2_asymptotic(a + x, +1, P) + s2_asymptotic(a - x, -1, P)
    rhs = 1j * math.pi * (2 * a - W1 - W2) * x / (W1 * W2)
    assert abs(lhs - rhs) < 1e-12 * abs(rhs)


def test_series_and_strip_regimes_agree():
    from qkzlab.special_functions import _engine
    eng = _engine(W1, W2)
    for y in (eng.y_switch - 1e-9, eng.y_switch + 1e-9):
        x = np.array([complex(1.1, y)])
        a = np.exp(eng.strip(x))[0]
        b = np.exp(eng.series_upper(x))[0]
        assert rel(a, b) < 1e-12


# -- phi, psi, H -----------------------------------------------------------------

def test_phi_psi_even():
    for x in (complex(0.7, 0.1), 1.1, complex(-2.3, 0.4)):
        assert rel(phi(x, 2, P), phi(-x, 2, P)) < 1e-12
        assert rel(psi(x, 3, P), psi(-x, 3, P)) < 1e-12


def test_phi_pole_detected():
    with pytest.raises(PoleProximity):
        phi(-1j * math.pi / 2, 2, P)


def test_psi_regular_at_zero():
    assert math.isfinite(abs(psi(0.0, 2, P)))


def test_phi_decay_rate():
    n = 2
    rate = math.pi * (1 / W1 + 1 / W2 + 2 * math.pi / (W1 * W2 * n))
    xs = np.array([30.0, 35.0, 40.0])
    vals = np.array([abs(phi(x, n, P)) for x in xs])
    slope = np.diff(np.log(vals)) / np.diff(xs)
    assert np.allclose(slope, -rate, rtol=1e-6)


def test_h_closed_finite_at_zero():
    assert math.isfinite(abs(h_closed(0.0, 2, P)))


def test_s2_table_rows():
    rows = s2_table([0.5, complex(1, 1)], P)
    assert len(rows) == 2 and rows[0][:2] == (0.5, 0.0)
    assert rel(complex(rows[1][2], rows[1][3]), s2(complex(1, 1), P)) < 1e-15


# -- the two kernel backends ----------------------------------------------------

@pytest.mark.skipif(compiled is None, reason="compiled kernels not built")
def test_backends_agree():
    rng = np.random.default_rng(3)
    x = rng.uniform(4, 12, 200) + 1j * rng.uniform(-3.5, 3.5, 200)
    h = 0.05
    Pp, Cp = _kernels_py.strip_weights(W1, W2, h, 300)
    Pc, Cc = compiled.strip_weights(W1, W2, h, 300)
    assert np.allclose(Pp, Pc, rtol=1e-15, atol=0) and Cp == pytest.approx(Cc, rel=1e-15)
    a = _kernels_py.strip_integral(x, W1 + W2, h, Pp, Cp)
    b = compiled.strip_integral(x, W1 + W2, h, Pp, Cp)
    assert np.max(np.abs(a - b)) < 1e-13 * np.max(np.abs(a))
    k = np.arange(1, 30, dtype=float)
    c1 = 1 / np.expm1(2j * np.pi * k * W2 / W1) / k
    c2 = 1 / np.expm1(2j * np.pi * k * W1 / W2) / k
    y = rng.uniform(-5, 5, 50) + 1j * rng.uniform(4, 8, 50)
    assert np.allclose(_kernels_py.q_series(y, W1, W2, c1, c2),
                       compiled.q_series(y, W1, W2, c1, c2), rtol=1e-13, atol=1e-15)
    z = rng.uniform(-3, 3, 50) + 1j * rng.uniform(-1, 1, 50)
    assert np.allclose(_kernels_py.log_2sin(z), compiled.log_2sin(z), rtol=1e-14, atol=1e-15)


def test_pure_backend_selected_by_env():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "from qkzlab._backend import BACKEND; print(BACKEND)"],
                         env={"QKZLAB_PURE": "1", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_active_backend_has_all_kernels():
    for name in ("strip_weights", "strip_integral", "q_series", "log_2sin"):
        assert callable(getattr(kernels, name))
