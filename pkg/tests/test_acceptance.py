"""Acceptance criteria 1-10.

Each test records one line in ``RESULTS``; ``conftest.py`` prints the table
at the end of the session.  Running this file directly prints the same
lines.  Thresholds and runtime limits are the stated ones.
"""
import time

import numpy as np
import pytest

from qkzlab import harness
from qkzlab.combinatorics import NuVector
from qkzlab.integration import QuadratureConfig
from qkzlab.params import default_params

RESULTS: dict[int, str] = {}


def report(k, title, records, *, elapsed, limit=None):
    worst = max(records, key=lambda r: r.rel_err / r.tolerance if r.tolerance else r.rel_err)
    failed = [r.name for r in records if not r.passed]
    in_time = limit is None or elapsed < limit
    ok = bool(records) and not failed and in_time
    line = (f"acceptance {k:2d} {'PASS' if ok else 'FAIL'}  {title}: {len(records)} checks, "
            f"worst {worst.name} rel_err={worst.rel_err:.2e} (tol {worst.tolerance:.0e}), "
            f"{elapsed:.1f}s" + (f" (limit {limit:.0f}s)" if limit else ""))
    if failed:
        line += f"; failed: {', '.join(failed[:4])}" + (" ..." if len(failed) > 4 else "")
    RESULTS[k] = line
    print(line)
    assert not failed, line
    assert in_time, line


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def test_01_s2_properties():
    recs, dt = timed(harness.s2_properties, 7.3, 9.4, np.random.default_rng(1), samples=100,
                     tol=1e-10)
    report(1, "S2 shift/normalisation/symmetry/zeros/poles", recs, elapsed=dt, limit=10)


def test_02_h_identity():
    recs, dt = timed(harness.h_identity, tol=1e-8)
    assert len(recs) == 9 * 2 * 2
    report(2, "H numeric vs closed", recs, elapsed=dt, limit=60)


def test_03_detk_oracle():
    recs, dt = timed(harness.detk_oracle, np.random.default_rng(3), draws=10, tol=1e-11)
    report(3, "det K_m direct vs closed", recs, elapsed=dt, limit=30)


def test_04_exchange():
    recs, dt = timed(harness.exchange_suite, np.random.default_rng(4), draws=20, tol=1e-9)
    report(4, "exchange relation", recs, elapsed=dt, limit=60)


def test_05_e_difference():
    recs, dt = timed(harness.e_difference, np.random.default_rng(5), tol=1e-9)
    report(5, "E difference equations", recs, elapsed=dt)


def test_06_multiplicities():
    recs, dt = timed(harness.mult_oracle, ranks=(2, 3), sites=(1, 2, 3, 4))
    report(6, "multiplicity differences, exact", recs, elapsed=dt, limit=10)


def test_07_rhs_consistency():
    recs, dt = timed(harness.rhs_consistency, np.random.default_rng(7), tol=1e-9)
    report(7, "closed form = c * E", recs, elapsed=dt)


ASYM_CASES = [(2, 2, (1, 1)), (3, 2, (1, 1, 0))]


def test_08_asymptotics():
    recs, worst_dt = [], 0.0
    for n, N, lw in ASYM_CASES:
        p = default_params(n, N, mu=tuple(harness.ASYM_MU_GAP * j for j in range(n)))
        r, dt = timed(harness.asymptotics, p, NuVector.from_lambdas(lw),
                      QuadratureConfig(rel_tol=1e-8), spacings=(4.0, 8.0, 12.0), tol=1e-3)
        recs += r
        worst_dt = max(worst_dt, dt)
    report(8, "spread-beta triangularity and diagonal limit", recs, elapsed=worst_dt, limit=600)


THEOREM_CASES = [(2, 2, (1, 1)), (2, 2, (0, 2)), (3, 2, (1, 1, 0))]


def test_09_theorem61():
    recs, worst_dt = [], 0.0
    for n, N, lw in THEOREM_CASES:
        r, dt = timed(harness.compare_theorem61, default_params(n, N), NuVector.from_lambdas(lw),
                      QuadratureConfig(rel_tol=1e-6), tol=1e-3, ror_tol=2e-3)
        recs += r
        worst_dt = max(worst_dt, dt)
    report(9, "det of pairing matrix vs closed form", recs, elapsed=worst_dt, limit=1800)


def test_10_contour_robustness():
    recs, total = [], 0.0
    for n, N, lw in THEOREM_CASES:
        r, dt = timed(harness.contour_robustness, default_params(n, N), NuVector.from_lambdas(lw),
                      QuadratureConfig(rel_tol=1e-8))
        recs += r
        total += dt
    report(10, "term integrals under half delta and double T", recs, elapsed=total)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
