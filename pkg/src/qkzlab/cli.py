"""Command line entry point ``qkzlab``.

Exit codes: 0 every check passed, 1 a check failed, 2 configuration error,
3 numerical failure (tolerance not met, unresolved pinch and friends).
"""
from __future__ import annotations

import csv
import functools
import json
import sys

import click
import numpy as np

from .combinatorics import JTuple, NuVector, enumerate_z
from .errors import (BandOverflow, ConfigError, DomainViolation, InvalidNu, NonconvergentReduction,
                     PoleProximity, ShapeMismatch, ToleranceNotMet, UnresolvedPinch)
from .harness import load_config, rel_err, run_suite
from .integration import QuadratureConfig, pairing, pairing_matrix, term_contours
from .params import default_params
from .qkz_operators import det_k_closed, k_operator, rhs_theorem
from .special_functions import Periods, s2_table
from .weights import PermTuple

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_CONFIG_ERRORS = (ConfigError, DomainViolation, InvalidNu, ShapeMismatch)
_NUMERIC_ERRORS = (ToleranceNotMet, UnresolvedPinch, BandOverflow, PoleProximity,
                   NonconvergentReduction)


def _guard(fn):
    """Map library exceptions to exit codes with a one-line message on stderr."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            code = fn(*args, **kwargs)
        except _CONFIG_ERRORS as exc:
            click.echo(f"configuration error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except _NUMERIC_ERRORS as exc:
            click.echo(f"numerical failure ({type(exc).__name__}): {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
        sys.exit(code or EXIT_OK)
    return wrapper


def _ints(text: str | None):
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"expected comma separated integers, got {text!r}") from None


def _floats(text: str | None):
    if text is None:
        return None
    try:
        return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"expected comma separated numbers, got {text!r}") from None


def problem_options(fn):
    opts = [
        click.option("--n", "n", type=int, default=2, show_default=True, help="rank: letters 0..n-1"),
        click.option("--N", "N", type=int, default=2, show_default=True, help="number of sites"),
        click.option("--rho", type=float, default=7.3, show_default=True),
        click.option("--lam", type=float, default=9.4, show_default=True),
        click.option("--mu", default=None, help="comma separated, n entries"),
        click.option("--beta", default=None, help="comma separated, N entries"),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def _params(n, N, rho, lam, mu, beta):
    kw = {"rho": rho, "lam": lam}
    if mu is not None:
        kw["mu"] = _floats(mu)
    if beta is not None:
        kw["beta"] = _floats(beta)
    return default_params(n, N, **kw)


def _emit(obj, output):
    text = json.dumps(obj, indent=2, default=str)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@click.group()
@click.version_option(package_name="qkzlab")
def main():
    """Verification lab for hypergeometric qKZ solutions at |q| = 1."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--output", default=None, help="report prefix; overrides the config value")
@_guard
def run(config_path, output):
    """Run the suites listed in an INI experiment file and write JSON + CSV reports."""
    ec = load_config(config_path)
    if output:
        ec.output_path = output
    rep = run_suite(ec)
    failed = [r.name for r in rep.records if not r.passed]
    click.echo(json.dumps({"pass": rep.passed, "records": len(rep.records), "failed": failed,
                           "errors": rep.errors, "output": ec.output_path}, indent=2))
    return rep.exit_code


@main.command()
@problem_options
@click.option("--lambdas", default=None, help="weights lambda_1..lambda_n, for the full matrix")
@click.option("--J", "J", default=None, help="row index, e.g. 0,1")
@click.option("--Jp", "Jp", default=None, help="column index, e.g. 1,0")
@click.option("--rel-tol", type=float, default=1e-8, show_default=True)
@click.option("--mode", type=click.Choice(["full", "reduced"]), default="full", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--output", default=None)
@_guard
def pair(n, N, rho, lam, mu, beta, lambdas, J, Jp, rel_tol, mode, workers, output):
    """One pairing entry (--J and --Jp) or the whole matrix (weights only)."""
    p = _params(n, N, rho, lam, mu, beta)
    cfg = QuadratureConfig(rel_tol=rel_tol)
    if J is not None or Jp is not None:
        if J is None or Jp is None:
            raise ConfigError("give both --J and --Jp, or neither for the full matrix")
        a, b = JTuple(_ints(J), n), JTuple(_ints(Jp), n)
        if a.N != N or b.N != N:
            raise ConfigError(f"J and J' must have N={N} entries")
        res = pairing(a, b, p, cfg, mode=mode, detail=True)
        _emit(res.to_dict(), output)
        return EXIT_OK
    if lambdas is None:
        raise ConfigError("give --J/--Jp for one entry or --lambdas for the matrix")
    lw = _ints(lambdas)
    nu = NuVector.from_lambdas(lw)
    if nu.n != n or nu.N != N:
        raise ConfigError(f"weights {lw} do not fit n={n}, N={N}")
    M = pairing_matrix(p, nu, cfg, mode=mode, workers=workers)
    det = M.det(normalized=True)
    rhs = rhs_theorem(p, lw)
    _emit({"entries": [e.to_dict() for e in M.entries], "det": [det.real, det.imag],
           "det_literal": [M.det().real, M.det().imag], "skew_factor": M.skew_factor,
           "rhs": [rhs.real, rhs.imag], "rel_err": rel_err(det, rhs),
           "det_err": M.det_error(normalized=True), "wall_time": M.wall_time}, output)
    return EXIT_OK


@main.command()
@problem_options
@click.option("--lambdas", required=True, help="weights lambda_1..lambda_n")
@click.option("--m", "m", type=int, default=None, help="site (default: all)")
@click.option("--orientation", type=click.Choice(["rho", "lam"]), default="rho",
              show_default=True)
@click.option("--tol", type=float, default=1e-11, show_default=True)
@click.option("--output", default=None)
@_guard
def detk(n, N, rho, lam, mu, beta, lambdas, m, orientation, tol, output):
    """Direct determinant of K_m on a weight subspace against the closed form."""
    p = _params(n, N, rho, lam, mu, beta)
    lw = _ints(lambdas)
    nu = NuVector.from_lambdas(lw)
    if nu.n != n or nu.N != N:
        raise ConfigError(f"weights {lw} do not fit n={n}, N={N}")
    sites = [m] if m is not None else list(range(1, N + 1))
    recs = []
    for site in sites:
        direct = complex(np.linalg.det(k_operator(site, p, nu, orientation)))
        closed = det_k_closed(site, p, lw, orientation)
        recs.append({"m": site, "det_direct": [direct.real, direct.imag],
                     "det_closed": [closed.real, closed.imag], "rel_err": rel_err(direct, closed)})
    _emit(recs[0] if m is not None else recs, output)
    return EXIT_OK if all(r["rel_err"] <= tol for r in recs) else EXIT_CHECK


@main.command("enumerate")
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--lambdas", required=True, help="weights lambda_1..lambda_n")
@click.option("--output", default=None)
@_guard
def enumerate_cmd(n, lambdas, output):
    """The index set Z with the site, r and m* tables of every element."""
    lw = _ints(lambdas)
    if len(lw) != n:
        raise ConfigError(f"need n={n} weights, got {lw}")
    nu = NuVector.from_lambdas(lw)
    _emit({"nu": list(nu.full), "lambdas": list(lw), "Z": [J.table() for J in enumerate_z(nu)]},
          output)
    return EXIT_OK


@main.command("s2-table")
@click.option("--rho", type=float, default=7.3, show_default=True)
@click.option("--lam", type=float, default=9.4, show_default=True)
@click.option("--re", "re_range", default="-5,5,11", show_default=True,
              help="start,stop,count of the real parts")
@click.option("--im", "im_range", default="0,0,1", show_default=True,
              help="start,stop,count of the imaginary parts")
@click.option("--output", default=None, help="CSV file (default: stdout)")
@_guard
def s2_table_cmd(rho, lam, re_range, im_range, output):
    """CSV table of S2(x | rho, lam) on a rectangular grid."""
    grids = []
    for spec in (re_range, im_range):
        v = _floats(spec)
        if len(v) != 3 or v[2] < 1:
            raise ConfigError(f"grid spec must be start,stop,count, got {spec!r}")
        grids.append(np.linspace(v[0], v[1], int(v[2])))
    xs = [complex(a, b) for b in grids[1] for a in grids[0]]
    rows = s2_table(xs, Periods(rho, lam))
    fh = open(output, "w", newline="") if output else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["x_re", "x_im", "s2_re", "s2_im"])
        for r in rows:
            w.writerow([repr(float(v)) for v in r])
    finally:
        if output:
            fh.close()
    return EXIT_OK


@main.command("contour-dump")
@problem_options
@click.option("--J", "J", required=True)
@click.option("--Jp", "Jp", required=True)
@click.option("--sigma", default=None, help="0-based images per level, levels separated by '/', e.g. '1,0'")
@click.option("--sigmap", default=None)
@click.option("--delta", type=float, default=None)
@click.option("--output", default=None)
@_guard
def contour_dump(n, N, rho, lam, mu, beta, J, Jp, sigma, sigmap, delta, output):
    """Poles and line-plus-loop contours of every variable of one split term."""
    p = _params(n, N, rho, lam, mu, beta)
    a, b = JTuple(_ints(J), n), JTuple(_ints(Jp), n)
    if a.nu != b.nu:
        raise ConfigError(f"J={a.entries} and J'={b.entries} lie in different weight spaces")

    def perm(text):
        if text is None:
            return PermTuple.identity(a.nu)
        levels = [_ints(part) for part in text.split("/")]
        return PermTuple(levels)

    cfg = QuadratureConfig()
    if delta is not None:
        cfg = cfg.with_delta(delta)
    s, sp = perm(sigma), perm(sigmap)
    _emit({"J": list(a.entries), "J'": list(b.entries), "sigma": [list(x) for x in s.perms],
           "sigma'": [list(x) for x in sp.perms],
           "contours": term_contours(a, b, s, sp, p, cfg)}, output)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    main()
